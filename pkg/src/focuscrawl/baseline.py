"""Link-only comparison crawler.

Traversal is identical to the focused crawl; only the keep/discard rule
differs. A page is kept when the query text occurs in its URL, and pages
are ranked by how many times it occurs there. Page content plays no part.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .engine import CrawlConfig, CrawlOutcome, run_crawl
from .fetcher import Politeness, Transport
from .html_model import TagDocument
from .relevance import count_in
from .urls import CanonicalUrl


@dataclass(frozen=True)
class BaselineScore:
    url: CanonicalUrl
    anchor_hits: int
    relevant: bool

    @property
    def total_weight(self) -> int:
        return self.anchor_hits

    @property
    def counts(self) -> None:
        return None


def baseline_score(doc: TagDocument, url: CanonicalUrl, config: CrawlConfig) -> BaselineScore:
    hits = count_in(doc.url_text, config.query, config.match_mode)
    return BaselineScore(url=url, anchor_hits=hits, relevant=hits > 0)


def baseline_crawl(config: CrawlConfig, transport: Transport,
                   politeness: Optional[Politeness] = None) -> CrawlOutcome:
    return run_crawl(config, transport, baseline_score, politeness)
