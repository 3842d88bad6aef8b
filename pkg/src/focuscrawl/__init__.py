"""Focused web crawler ranking pages by tag-weighted query occurrences."""

from .baseline import BaselineScore, baseline_crawl
from .engine import CrawlConfig, CrawlOutcome, CrawlRecord, Discard, RankedResults, crawl, stats, validate_inputs
from .fetcher import Fetcher, FetchLimits, FetchResult, FetchStatus, HttpTransport
from .frontier import Admission, Frontier, FrontierEntry, TrapGuardState
from .html_model import TagDocument, extract_links, parse, robots_directives
from .relevance import OccurrenceCounts, PageScore, WeightConfig, count_occurrences, is_relevant, page_weight
from .urls import CanonicalUrl, canonicalize

__version__ = "0.1.0"

__all__ = [
    "Admission", "BaselineScore", "CanonicalUrl", "CrawlConfig", "CrawlOutcome", "CrawlRecord",
    "Discard", "FetchLimits", "FetchResult", "FetchStatus", "Fetcher", "Frontier", "FrontierEntry",
    "HttpTransport", "OccurrenceCounts", "PageScore", "RankedResults", "TagDocument",
    "TrapGuardState", "WeightConfig", "baseline_crawl", "canonicalize", "count_occurrences",
    "crawl", "extract_links", "is_relevant", "page_weight", "parse", "robots_directives",
    "stats", "validate_inputs",
]
