"""Offline fixture corpora.

On disk a corpus is a directory holding ``manifest.json`` plus page files::

    {
      "entries": [
        {"content_type": "text/html; charset=utf-8", "file": "pages/00000.html",
         "label": true, "redirect": null, "redirect_external": false,
         "status": 200, "url": "http://site.test/"},
        ...
      ],
      "format": "focuscrawl-corpus",
      "version": 1
    }

``url`` is the canonical URL text and the lookup key. ``file`` is relative
to the corpus directory (null for redirects and bodiless errors).
``redirect`` holds a target URL for 3xx entries; it must itself be in the
manifest unless ``redirect_external`` is true. ``label`` is the optional
ground-truth relevance used by the evaluator. The manifest is written with
sorted keys, two-space indentation, entries sorted by ``url`` and a trailing
newline, so identical corpora are byte-identical.
"""

from __future__ import annotations

import html
import json
import random
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
from urllib.parse import quote

from .fetcher import Response
from .relevance import normalize_query
from .urls import CanonicalUrl, UrlError, canonicalize

MANIFEST_NAME = "manifest.json"
FORMAT_NAME = "focuscrawl-corpus"
FORMAT_VERSION = 1
SUITE_FORMAT = "focuscrawl-suite"
HTML_TYPE = "text/html; charset=utf-8"
REGIONS = ("meta", "title", "heading", "body")


class ManifestInvalid(ValueError):
    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class InvalidSpec(ValueError):
    pass


@dataclass(frozen=True)
class ManifestEntry:
    url: str
    file: Optional[str] = None
    status: int = 200
    content_type: Optional[str] = HTML_TYPE
    redirect: Optional[str] = None
    redirect_external: bool = False
    label: Optional[bool] = None

    def to_json(self) -> dict:
        return {
            "url": self.url,
            "file": self.file,
            "status": self.status,
            "content_type": self.content_type,
            "redirect": self.redirect,
            "redirect_external": self.redirect_external,
            "label": self.label,
        }


@dataclass
class Corpus:
    entries: List[ManifestEntry] = field(default_factory=list)
    files: Dict[str, bytes] = field(default_factory=dict)

    @classmethod
    def from_pages(cls, pages: Mapping[str, Union[str, bytes, dict]]) -> "Corpus":
        """Build an in-memory corpus from ``{url: html}``.

        A value may also be a dict of :class:`ManifestEntry` fields plus an
        optional ``body``.
        """
        corpus = cls()
        for n, (raw, value) in enumerate(pages.items()):
            url = canonicalize(raw).text
            if isinstance(value, dict):
                spec = dict(value)
                body = spec.pop("body", None)
            else:
                spec, body = {}, value
            if body is not None:
                path = f"pages/{n:05d}.html"
                corpus.files[path] = body.encode("utf-8") if isinstance(body, str) else body
                spec.setdefault("file", path)
            corpus.entries.append(ManifestEntry(url=url, **spec))
        corpus.validate(raise_on_error=True)
        return corpus

    def index(self) -> Dict[str, ManifestEntry]:
        return {e.url: e for e in self.entries}

    def labels(self) -> Dict[CanonicalUrl, bool]:
        return {canonicalize(e.url): e.label for e in self.entries if e.label is not None}

    def validate(self, raise_on_error: bool = False) -> List[str]:
        errors = []
        seen = set()
        known = {x.url for x in self.entries}
        for e in self.entries:
            if e.url in seen:
                errors.append(f"duplicate url {e.url}")
            seen.add(e.url)
            try:
                if canonicalize(e.url).text != e.url:
                    errors.append(f"url not canonical: {e.url}")
            except UrlError as exc:
                errors.append(f"bad url {e.url}: {exc}")
            if e.file is not None and e.file not in self.files:
                errors.append(f"missing file {e.file} for {e.url}")
            if e.redirect is not None:
                if not 300 <= e.status < 400:
                    errors.append(f"redirect on non-3xx entry {e.url}")
                try:
                    target = canonicalize(e.redirect, canonicalize(e.url)).text
                except UrlError as exc:
                    errors.append(f"bad redirect {e.redirect}: {exc}")
                    continue
                if target not in known and not e.redirect_external:
                    errors.append(f"redirect target {target} not in manifest")
        if errors and raise_on_error:
            raise ManifestInvalid(errors)
        return errors

    def manifest_bytes(self) -> bytes:
        doc = {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "entries": [e.to_json() for e in sorted(self.entries, key=lambda e: e.url)],
        }
        return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")

    def write(self, directory: Union[str, Path]) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / MANIFEST_NAME).write_bytes(self.manifest_bytes())
        for rel, data in sorted(self.files.items()):
            target = directory / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(data)
        return directory

    def transport(self) -> "CorpusTransport":
        return CorpusTransport(self)


def load(path: Union[str, Path]) -> Corpus:
    """Load and validate a corpus directory (or its manifest file)."""
    path = Path(path)
    manifest = path / MANIFEST_NAME if path.is_dir() else path
    root = manifest.parent
    if not manifest.is_file():
        raise ManifestInvalid([f"no manifest at {manifest}"])
    try:
        doc = json.loads(manifest.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ManifestInvalid([f"unreadable manifest: {exc}"]) from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise ManifestInvalid(["not a corpus manifest"])
    if doc.get("version") != FORMAT_VERSION:
        raise ManifestInvalid([f"unsupported version {doc.get('version')!r}"])

    corpus = Corpus()
    errors = []
    for raw in doc.get("entries", []):
        try:
            entry = ManifestEntry(**raw)
        except TypeError as exc:
            errors.append(f"bad entry {raw!r}: {exc}")
            continue
        corpus.entries.append(entry)
        if entry.file is not None and entry.file not in corpus.files:
            fp = root / entry.file
            if fp.is_file():
                corpus.files[entry.file] = fp.read_bytes()
    errors.extend(corpus.validate())
    if errors:
        raise ManifestInvalid(errors)
    return corpus


class CorpusTransport:
    """Serves a :class:`Corpus` as if it were the web; unknown URLs are 404.

    Every requested URL is appended to ``requests`` so tests can spy on
    traffic.
    """

    def __init__(self, corpus: Corpus):
        self.corpus = corpus
        self._index = corpus.index()
        self._lock = threading.Lock()
        self.requests: List[str] = []

    def get(self, url, *, max_bytes=None, timeout=None, user_agent=None) -> Response:
        with self._lock:
            self.requests.append(url)
        try:
            key = canonicalize(url).text
        except UrlError:
            return Response(status=400)
        entry = self._index.get(key)
        if entry is None:
            return Response(status=404, content_type="text/plain")
        body = self.corpus.files.get(entry.file, b"") if entry.file else b""
        if max_bytes is not None and len(body) > max_bytes:
            return Response(entry.status, body[: max_bytes + 1], entry.content_type, entry.redirect, True)
        return Response(entry.status, body, entry.content_type, entry.redirect)


class InfiniteTrapTransport:
    """A site that never runs out of pages.

    ``/trap/a`` links to ``/trap/a/a`` and so on forever, every page also
    links to a calendar-style ``?page=n+1`` successor, and ``/loop/1`` and
    ``/loop/2`` redirect to each other. Everything else delegates to
    ``fallback`` (404 when absent).
    """

    def __init__(self, host: str = "trap.test", fallback: Optional[CorpusTransport] = None):
        self.host = host
        self.fallback = fallback
        self._lock = threading.Lock()
        self.requests: List[str] = []

    def get(self, url, *, max_bytes=None, timeout=None, user_agent=None) -> Response:
        with self._lock:
            self.requests.append(url)
        u = canonicalize(url)
        if u.host != self.host:
            if self.fallback is not None:
                return self.fallback.get(url, max_bytes=max_bytes)
            return Response(status=404)
        if u.path == "/loop/1":
            return Response(302, location="/loop/2")
        if u.path == "/loop/2":
            return Response(302, location="/loop/1")
        if u.path == "/" or u.path.startswith("/trap"):
            page = 0
            if u.query and u.query.startswith("page="):
                page = int(u.query[5:] or 0)
            deeper = (u.path.rstrip("/") if u.path != "/" else "/trap") + "/a"
            links = [deeper, f"{u.path}?page={page + 1}", "/loop/1"]
            anchors = "".join(f'<a href="{h}">next</a>' for h in links)
            body = f"<html><head><title>Archive</title></head><body>{anchors}</body></html>"
            return Response(200, body.encode(), HTML_TYPE)
        return Response(status=404)


# -- the worked example page -------------------------------------------------------

EXAMPLE_PAGE = b"""<html>
<head>
<meta name="description" content="Free HTML Web tutorials">
<meta name="keywords" content="HTML, CSS, XML">
<meta name="author" content="RGCER">
<meta charset="UTF-8">
< title > HTML title of page< /title >
</head>
< body>
    This is my very own HTML page. This page is just for reference.
< /body >
< /html >
"""

EXAMPLE_URLS = ("http://www.myblogindia.com/html/default.asp", "http://fixture/html/default.asp")


def example_corpus() -> Corpus:
    corpus = Corpus(files={"pages/default.asp.html": EXAMPLE_PAGE})
    for url in EXAMPLE_URLS:
        corpus.entries.append(ManifestEntry(url=url, file="pages/default.asp.html", label=True))
    corpus.validate(raise_on_error=True)
    return corpus


# -- synthetic generator ---------------------------------------------------------------

FILLER = """
about across after again also archive around article available back best
better board button career center change city clear close community company
contact content course daily data design detail develop early easy editor
event every family feature field find first follow form free full garden
general group guide health help history home house idea image include
information issue item journal kitchen later latest learn letter level life
light list local long major market media member menu method model modern
money month morning music nature network news next note offer office online
open order other paper people photo place plan point policy popular power
press price private product program project public quick range read recent
record report research review river road school science season section
service share simple single site small social source space special sport
staff start state story street student study style support system table team
technology thing today topic total travel update value video view visit
water week weather welcome world write year young
""".split()


@dataclass(frozen=True)
class GeneratorSpec:
    seed: int = 42
    sites: int = 1
    pages_per_site: int = 10
    fanout: int = 3
    relevant_fraction: float = 0.3
    query: str = "cricket match"
    placement: Tuple[Tuple[str, float], ...] = (
        ("meta", 1.0), ("title", 1.0), ("heading", 1.0), ("body", 2.0),
    )
    # irrelevant pages that mention the query incidentally
    decoy_fraction: float = 0.0
    # pages whose URL carries the query text
    url_bait_fraction: float = 0.0
    # share of those drawn from relevant pages; None samples uniformly
    bait_relevant_share: Optional[float] = None
    topic_words: Tuple[str, ...] = ()
    site_names: Tuple[str, ...] = ()
    traps: bool = False
    dead_links: bool = False

    def validate(self) -> None:
        problems = []
        if self.sites < 1:
            problems.append("sites must be >= 1")
        if self.pages_per_site < 1:
            problems.append("pages_per_site must be >= 1")
        if self.fanout < 1:
            problems.append("fanout must be >= 1")
        for name in ("relevant_fraction", "decoy_fraction", "url_bait_fraction", "bait_relevant_share"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                problems.append(f"{name} must be within [0, 1]")
        if self.relevant_fraction + self.decoy_fraction > 1.0:
            problems.append("relevant_fraction + decoy_fraction exceeds 1")
        if self.site_names and len(self.site_names) != self.sites:
            problems.append("site_names must name every site")
        regions = dict(self.placement)
        if set(regions) - set(REGIONS) or not regions or sum(regions.values()) <= 0:
            problems.append(f"placement must weight a subset of {REGIONS}")
        if any(w < 0 for w in regions.values()):
            problems.append("placement weights must be >= 0")
        try:
            normalize_query(self.query)
        except ValueError:
            problems.append("query is empty")
        if problems:
            raise InvalidSpec("; ".join(problems))


@dataclass
class _Page:
    path: str
    label: bool
    mentions: Dict[str, int] = field(default_factory=dict)
    links: List[Tuple[str, str]] = field(default_factory=list)
    clean: bool = False


def _sentence(rng: random.Random, words: Sequence[str], n: int) -> str:
    return " ".join(rng.choice(words) for _ in range(n))


def _with_mentions(rng: random.Random, words: Sequence[str], query: str, n_words: int, k: int) -> str:
    chunks = [rng.choice(words) for _ in range(n_words)]
    for _ in range(k):
        chunks.insert(rng.randrange(len(chunks) + 1), query)
    return " ".join(chunks)


def _render(rng: random.Random, page: _Page, query: str, vocab: Sequence[str], topic: Sequence[str]) -> bytes:
    words = list(vocab) + (list(topic) * 2 if page.label else [])
    m = page.mentions

    def region(n_words: int, key: str) -> str:
        return html.escape(_with_mentions(rng, words, query, n_words, m.get(key, 0)), quote=True)

    title = region(4, "title").capitalize()
    description = region(8, "meta")
    keywords = ", ".join(rng.sample(list(vocab), 4))
    heading = region(3, "heading").capitalize()
    body_k = m.get("body", 0)
    paragraphs = []
    for i in range(3):
        k = body_k if i == 0 else 0
        paragraphs.append("<p>" + html.escape(_with_mentions(rng, words, query, 24, k)) + ".</p>")
    items = "\n".join(
        f'<li><a href="{html.escape(href, quote=True)}">{html.escape(text)}</a></li>'
        for href, text in page.links
    )
    doc = f"""<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<meta name="description" content="{description}">
<meta name="keywords" content="{keywords}">
<title>{title}</title>
<style>body {{ font-family: sans-serif; }}</style>
</head>
<body>
<h1>{heading}</h1>
{chr(10).join(paragraphs)}
<ul>
{items}
</ul>
</body>
</html>
"""
    return doc.encode("utf-8")


def _relevant_mentions(rng: random.Random, placement: Sequence[Tuple[str, float]]) -> Dict[str, int]:
    regions = [r for r, _ in placement]
    weights = [w for _, w in placement]
    mentions: Dict[str, int] = {}
    for region in rng.choices(regions, weights=weights, k=rng.randint(1, 3)):
        mentions[region] = mentions.get(region, 0) + 1
    return mentions


def _decoy_mentions(rng: random.Random) -> Dict[str, int]:
    # off-topic pages that still say the phrase: keyword stuffing,
    # a catchy title, or a page that repeats it in passing
    kind = rng.choice(["meta", "title_body", "body"])
    if kind == "meta":
        return {"meta": 1}
    if kind == "title_body":
        return {"title": 1, "body": 1}
    return {"body": rng.randint(4, 5)}


def _pick_bait(rng: random.Random, n: int, k: int, relevant: set, share: Optional[float]) -> set:
    pool = list(range(1, n))
    if not k:
        return set()
    if share is None:
        return set(rng.sample(pool, k))
    rel = [i for i in pool if i in relevant]
    other = [i for i in pool if i not in relevant]
    k_rel = min(round(share * k), len(rel))
    k_other = min(k - k_rel, len(other))
    return set(rng.sample(rel, k_rel)) | set(rng.sample(other, k_other))


def generate(spec: GeneratorSpec) -> Corpus:
    """Build a deterministic synthetic corpus; same spec, same bytes."""
    spec.validate()
    rng = random.Random(spec.seed)
    query = normalize_query(spec.query).lower()
    terms = query.split(" ")
    vocab = [w for w in FILLER if not any(t in w or w in t for t in terms)]
    topic = [w for w in spec.topic_words if not any(t in w or w in t for t in terms)]
    slug = quote(query, safe="")

    corpus = Corpus()
    clean: List[str] = []
    file_no = 0
    for s in range(spec.sites):
        host = (spec.site_names[s] if spec.site_names else f"site{s}") + ".test"
        origin = f"http://{host}"
        n = spec.pages_per_site
        n_rel = round(spec.relevant_fraction * n)
        n_decoy = round(spec.decoy_fraction * n)
        n_bait = min(round(spec.url_bait_fraction * n), n - 1)

        order = list(range(n))
        rng.shuffle(order)
        relevant = set(order[:n_rel])
        decoys = set(order[n_rel:n_rel + n_decoy])
        bait = _pick_bait(rng, n, n_bait, relevant, spec.bait_relevant_share)

        pages: List[_Page] = []
        for i in range(n):
            if i == 0:
                path = "/"
            elif i in bait:
                path = f"/{slug}/{i}.html"
            else:
                path = f"/p/{i}.html"
            page = _Page(path=path, label=i in relevant)
            if i in relevant:
                page.mentions = _relevant_mentions(rng, spec.placement)
            elif i in decoys:
                page.mentions = _decoy_mentions(rng)
            if not page.mentions and i not in bait:
                page.clean = True
            pages.append(page)

        # BFS-numbered tree guarantees reachability from the seed page
        for i in range(1, n):
            parent = (i - 1) // spec.fanout
            pages[parent].links.append((pages[i].path, f"{rng.choice(vocab)} {i}"))
        for i, page in enumerate(pages):
            if n > 1:
                j = rng.randrange(n)
                if j != i:
                    page.links.append((pages[j].path, rng.choice(vocab)))
            if i:
                page.links.append(("/", "home"))
        if spec.dead_links:
            for i in rng.sample(range(n), max(1, n // 10)):
                pages[i].links.append((f"/gone/{i}.html", "archive"))

        extra: List[ManifestEntry] = []
        if spec.traps:
            depth = 30
            chain = ["/trap" + "/a" * k for k in range(1, depth + 1)]
            pages[0].links.append((chain[0], "archive"))
            pages[0].links.append(("/loop/1", "mirror"))
            for k, path in enumerate(chain):
                trap = _Page(path=path, label=False, clean=True)
                if k + 1 < depth:
                    trap.links.append((chain[k + 1], "older"))
                pages.append(trap)
            extra.append(ManifestEntry(url=f"{origin}/loop/1", status=302, content_type=None, redirect=f"{origin}/loop/2", label=False))
            extra.append(ManifestEntry(url=f"{origin}/loop/2", status=302, content_type=None, redirect=f"{origin}/loop/1", label=False))

        for page in pages:
            rel = f"pages/{file_no:05d}.html"
            file_no += 1
            corpus.files[rel] = _render(rng, page, spec.query.strip(), vocab, topic)
            url = canonicalize(origin + page.path).text
            corpus.entries.append(ManifestEntry(url=url, file=rel, label=page.label))
            if page.clean:
                clean.append(url)
        corpus.entries.extend(extra)

    corpus.validate(raise_on_error=True)
    _check_clean(corpus, clean, spec.query)
    return corpus


def _check_clean(corpus: Corpus, clean: Iterable[str], query: str) -> None:
    """Pages planted with no mention must not contain the query anywhere."""
    from .html_model import parse
    from .relevance import count_occurrences

    index = corpus.index()
    for url in clean:
        e = index[url]
        doc = parse(corpus.files[e.file], canonicalize(e.url))
        if any(vars(count_occurrences(doc, query)).values()):
            raise InvalidSpec(f"query {query!r} leaks into generated page {e.url}")


# -- shipped comparison suite --------------------------------------------------------------


@dataclass(frozen=True)
class SuiteRow:
    name: str
    query: str
    seeds: Tuple[str, ...]


SUITE_DOMAINS = (
    ("bookshow", "book show", ("tickets", "seats", "theatre", "concert", "booking", "stage", "venue")),
    ("bookstoread", "book to read", ("novel", "author", "chapter", "fiction", "library", "reading")),
    ("cricketmatch", "cricket match", ("wicket", "innings", "bowler", "batsman", "stadium", "umpire")),
    ("matchmaking", "match making", ("horoscope", "wedding", "bride", "groom", "kundli", "alliance")),
)


def suite_specs(pages_per_site: int = 100) -> List[Tuple[SuiteRow, GeneratorSpec]]:
    out = []
    for k, (name, query, topic) in enumerate(SUITE_DOMAINS):
        spec = GeneratorSpec(
            seed=1000 + k,
            sites=1,
            pages_per_site=pages_per_site,
            fanout=4,
            relevant_fraction=0.25,
            decoy_fraction=0.1,
            url_bait_fraction=0.2,
            bait_relevant_share=0.35,
            query=query,
            topic_words=topic,
            site_names=(name,),
        )
        out.append((SuiteRow(name=name, query=query, seeds=(f"http://{name}.test/",)), spec))
    return out


def suite_corpus(pages_per_site: int = 100) -> Tuple[Corpus, List[SuiteRow]]:
    merged = Corpus()
    rows = []
    for k, (row, spec) in enumerate(suite_specs(pages_per_site)):
        part = generate(spec)
        for e in part.entries:
            if e.file is not None:
                rel = f"pages/{row.name}/{Path(e.file).name}"
                merged.files[rel] = part.files[e.file]
                e = ManifestEntry(**{**e.to_json(), "file": rel})
            merged.entries.append(e)
        rows.append(row)
    merged.validate(raise_on_error=True)
    return merged, rows


def suite_bytes(rows: Iterable[SuiteRow], corpus: str = ".") -> bytes:
    doc = {
        "format": SUITE_FORMAT,
        "version": 1,
        "corpus": corpus,
        "rows": [{"name": r.name, "query": r.query, "seeds": list(r.seeds)} for r in rows],
    }
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")


def load_suite(path: Union[str, Path]) -> Tuple[Path, List[SuiteRow]]:
    """Read a suite file; returns the corpus directory it points at and its rows."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ManifestInvalid([f"unreadable suite {path}: {exc}"]) from None
    if not isinstance(doc, dict) or doc.get("format") != SUITE_FORMAT:
        raise ManifestInvalid([f"{path} is not a suite file"])
    rows = []
    for raw in doc.get("rows") or []:
        try:
            rows.append(SuiteRow(name=raw["name"], query=raw["query"], seeds=tuple(raw["seeds"])))
        except (KeyError, TypeError):
            raise ManifestInvalid([f"bad suite row {raw!r}"]) from None
    return path.parent / doc.get("corpus", "."), rows


def write_preset(name: str, directory: Union[str, Path]) -> Path:
    directory = Path(directory)
    if name == "example":
        return example_corpus().write(directory)
    if name == "suite":
        corpus, rows = suite_corpus()
        corpus.write(directory)
        (directory / "suite.json").write_bytes(suite_bytes(rows))
        return directory
    if name == "traps":
        spec = GeneratorSpec(seed=7, pages_per_site=12, relevant_fraction=0.25, traps=True, dead_links=True,
                             site_names=("traps",))
        return generate(spec).write(directory)
    raise InvalidSpec(f"unknown preset {name!r}")

