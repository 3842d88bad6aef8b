"""Focused crawl loop: fetch, parse, score, keep or discard, follow links."""

from __future__ import annotations

import enum
import logging
import threading
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .fetcher import FetchLimits, Fetcher, FetchResult, FetchStatus, Politeness, Transport
from .frontier import (
    DEFAULT_MAX_DEPTH,
    DEFAULT_MAX_PAGES_PER_HOST,
    DEFAULT_MAX_PATH_SEGMENTS,
    Frontier,
    FrontierEntry,
    TrapGuardState,
)
from .html_model import NOFOLLOW, NOINDEX, NotHtml, TagDocument, extract_links, parse
from .relevance import EmptyQuery, MatchMode, OccurrenceCounts, PageScore, WeightConfig, normalize_query, score_page
from .urls import CanonicalUrl, UrlError, canonicalize

logger = logging.getLogger(__name__)


class ValidationError(ValueError):
    pass


class NoValidSeeds(ValidationError):
    pass


class EmptyQueryError(ValidationError, EmptyQuery):
    pass


class Discard(str, enum.Enum):
    BELOW_THRESHOLD = "below_threshold"
    NO_INDEX = "noindex"
    FETCH_FAILED = "fetch_failed"
    NOT_HTML = "not_html"


@dataclass(frozen=True)
class CrawlConfig:
    seeds: Tuple[CanonicalUrl, ...]
    query: str
    weights: WeightConfig = WeightConfig()
    max_pages: int = 100
    max_depth: int = DEFAULT_MAX_DEPTH
    max_pages_per_host: int = DEFAULT_MAX_PAGES_PER_HOST
    max_path_segments: int = DEFAULT_MAX_PATH_SEGMENTS
    workers: int = 1
    limits: FetchLimits = FetchLimits()
    respect_meta_robots: bool = True
    match_mode: MatchMode = MatchMode.PHRASE

    def __post_init__(self):
        if not self.seeds:
            raise NoValidSeeds("at least one seed URL is required")
        if not (self.query or "").strip():
            raise EmptyQueryError("query is empty")
        if self.max_pages < 1:
            raise ValidationError("max_pages must be positive")
        if self.workers < 1:
            raise ValidationError("workers must be positive")
        if self.max_depth < 0:
            raise ValidationError("max_depth must be non-negative")

    @property
    def respect_robots_txt(self) -> bool:
        return self.limits.respect_robots_txt


def validate_inputs(seeds: Iterable[str], query: str, **options) -> CrawlConfig:
    """Canonicalize seeds and trim the query; refuse to start without both."""
    good: List[CanonicalUrl] = []
    for raw in seeds:
        try:
            url = canonicalize(raw)
        except (UrlError, TypeError) as exc:
            logger.warning("dropping seed %r: %s", raw, exc)
            continue
        if url not in good:
            good.append(url)
    if not good:
        raise NoValidSeeds("no valid seed URL")
    try:
        q = normalize_query(query)
    except EmptyQuery:
        raise EmptyQueryError("query is empty") from None
    return CrawlConfig(seeds=tuple(good), query=q, **options)


# anything with total_weight, counts and relevant attributes
Score = PageScore
Scorer = Callable[[TagDocument, CanonicalUrl, "CrawlConfig"], Score]


@dataclass
class CrawlRecord:
    url: CanonicalUrl
    depth: int
    order: int
    status: FetchStatus
    parent: Optional[CanonicalUrl] = None
    http_code: Optional[int] = None
    final_url: Optional[CanonicalUrl] = None
    score: Optional[Score] = None
    discarded: Optional[Discard] = None
    robots_meta: frozenset = frozenset()
    links_found: int = 0
    links_admitted: int = 0
    links_dropped: int = 0
    bytes: int = 0

    @property
    def retained(self) -> bool:
        return self.discarded is None


@dataclass(frozen=True)
class RankedEntry:
    url: CanonicalUrl
    weight: int
    counts: Optional[OccurrenceCounts]
    order: int


@dataclass
class RankedResults:
    entries: List[RankedEntry] = field(default_factory=list)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def urls(self) -> List[CanonicalUrl]:
        return [e.url for e in self.entries]


@dataclass
class CrawlStats:
    pages: int = 0
    dispositions: Dict[str, int] = field(default_factory=dict)
    statuses: Dict[str, int] = field(default_factory=dict)
    per_host: Dict[str, int] = field(default_factory=dict)
    depth_histogram: Dict[int, int] = field(default_factory=dict)
    bytes: int = 0
    links_found: int = 0
    links_admitted: int = 0
    links_dropped: int = 0
    rejected: Dict[str, int] = field(default_factory=dict)
    elapsed: float = 0.0

    def to_json(self) -> dict:
        # elapsed is excluded: machine-readable output must be reproducible
        return {
            "pages": self.pages,
            "dispositions": dict(sorted(self.dispositions.items())),
            "statuses": dict(sorted(self.statuses.items())),
            "per_host": dict(sorted(self.per_host.items())),
            "depth_histogram": {str(k): v for k, v in sorted(self.depth_histogram.items())},
            "bytes": self.bytes,
            "links_found": self.links_found,
            "links_admitted": self.links_admitted,
            "links_dropped": self.links_dropped,
            "rejected": dict(sorted(self.rejected.items())),
        }


@dataclass
class CrawlOutcome:
    results: RankedResults
    records: List[CrawlRecord]
    stats: CrawlStats

    def __iter__(self):
        return iter((self.results, self.records, self.stats))


def stats(records: Sequence[CrawlRecord]) -> CrawlStats:
    dispositions: Counter = Counter()
    statuses: Counter = Counter()
    hosts: Counter = Counter()
    depths: Counter = Counter()
    out = CrawlStats(pages=len(records))
    for r in records:
        dispositions["relevant" if r.retained else r.discarded.value] += 1
        statuses[r.status.value] += 1
        hosts[r.url.authority] += 1
        depths[r.depth] += 1
        out.bytes += r.bytes
        out.links_found += r.links_found
        out.links_admitted += r.links_admitted
        out.links_dropped += r.links_dropped
    out.dispositions = dict(dispositions)
    out.statuses = dict(statuses)
    out.per_host = dict(hosts)
    out.depth_histogram = dict(depths)
    return out


def rank(records: Iterable[CrawlRecord]) -> RankedResults:
    """Retained pages by weight, heaviest first; ties keep dequeue order."""
    entries = []
    seen = set()
    for r in sorted(records, key=lambda r: r.order):
        if not r.retained or r.score is None:
            continue
        url = r.final_url or r.url
        if url in seen:
            continue
        seen.add(url)
        entries.append(RankedEntry(url=url, weight=r.score.total_weight, counts=r.score.counts, order=r.order))
    entries.sort(key=lambda e: (-e.weight, e.order))
    return RankedResults(entries)


def weighted_score(doc: TagDocument, url: CanonicalUrl, config: CrawlConfig) -> PageScore:
    return score_page(doc, url, config.query, config.weights, config.match_mode)


class _Crawler:
    def __init__(self, config: CrawlConfig, transport: Transport, scorer: Scorer,
                 politeness: Optional[Politeness] = None):
        self.config = config
        self.scorer = scorer
        self.fetcher = Fetcher(transport, config.limits, politeness)
        self.frontier = Frontier(
            TrapGuardState(
                max_depth=config.max_depth,
                max_pages_per_host=config.max_pages_per_host,
                max_path_segments=config.max_path_segments,
            )
        )
        self.records: List[CrawlRecord] = []
        self._cond = threading.Condition()
        self._taken = 0
        self._in_flight = 0

    def _next(self) -> Optional[Tuple[int, FrontierEntry]]:
        with self._cond:
            while True:
                if self._taken >= self.config.max_pages:
                    return None
                entry = self.frontier.dequeue()
                if entry is not None:
                    order = self._taken
                    self._taken += 1
                    self._in_flight += 1
                    return order, entry
                if self._in_flight == 0:
                    return None
                self._cond.wait()

    def _done(self, record: CrawlRecord) -> None:
        with self._cond:
            self.records.append(record)
            self._in_flight -= 1
            self._cond.notify_all()

    def visit(self, order: int, entry: FrontierEntry) -> CrawlRecord:
        result: FetchResult = self.fetcher.fetch(entry.url)
        record = CrawlRecord(
            url=entry.url, depth=entry.depth, order=order, status=result.status,
            parent=entry.parent, http_code=result.http_code, final_url=result.final_url,
        )
        if not result.ok:
            record.discarded = Discard.FETCH_FAILED
            return record
        record.bytes = len(result.body)
        page_url = result.final_url
        try:
            doc = parse(result.body, page_url, result.content_type)
        except NotHtml:
            record.discarded = Discard.NOT_HTML
            return record

        directives = doc.robots_meta if self.config.respect_meta_robots else frozenset()
        record.robots_meta = doc.robots_meta
        if NOINDEX in directives:
            record.discarded = Discard.NO_INDEX
        else:
            record.score = self.scorer(doc, page_url, self.config)
            if not record.score.relevant:
                record.discarded = Discard.BELOW_THRESHOLD

        # links are followed whatever the page weight; only nofollow stops them
        if NOFOLLOW not in directives:
            links = extract_links(doc, page_url)
            record.links_found = len(doc.outlinks)
            record.links_dropped = len([h for h in doc.outlinks if h]) - len(links)
            parent = FrontierEntry(page_url, entry.depth, entry.parent)
            for link in links:
                if self.frontier.enqueue(parent.child(link)):
                    record.links_admitted += 1
        return record

    def _worker(self) -> None:
        while True:
            job = self._next()
            if job is None:
                return
            try:
                record = self.visit(*job)
            except Exception:
                order, entry = job
                logger.exception("unexpected failure visiting %s", entry.url)
                record = CrawlRecord(url=entry.url, depth=entry.depth, order=order,
                                     status=FetchStatus.TRANSPORT_ERROR, parent=entry.parent,
                                     discarded=Discard.FETCH_FAILED)
            self._done(record)

    def run(self) -> CrawlOutcome:
        started = time.monotonic()
        for seed in self.config.seeds:
            self.frontier.enqueue(FrontierEntry(seed, 0, None))
        if self.config.workers == 1:
            self._worker()
        else:
            threads = [threading.Thread(target=self._worker, name=f"crawl-{i}", daemon=True)
                       for i in range(self.config.workers)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
        self.records.sort(key=lambda r: r.order)
        summary = stats(self.records)
        summary.rejected = {k.value: v for k, v in self.frontier.rejections.items()}
        summary.elapsed = time.monotonic() - started
        return CrawlOutcome(rank(self.records), self.records, summary)


def run_crawl(config: CrawlConfig, transport: Transport, scorer: Scorer,
              politeness: Optional[Politeness] = None) -> CrawlOutcome:
    return _Crawler(config, transport, scorer, politeness).run()


def crawl(config: CrawlConfig, transport: Transport, politeness: Optional[Politeness] = None) -> CrawlOutcome:
    """Run the focused crawl and return ranked results, audit records and stats."""
    return run_crawl(config, transport, weighted_score, politeness)
