"""Tag-weighted occurrence scoring.

A page's weight is the sum, over the five regions, of the number of query
occurrences in the region times that region's weight::

    t = Nb*B + Nt*T + Nm*M + Nh*H + Nu*U

and a page is kept only when ``t`` is strictly above the threshold.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields
from typing import Iterable

from .html_model import TagDocument, normalize_space
from .urls import CanonicalUrl


class EmptyQuery(ValueError):
    pass


class MatchMode(str, enum.Enum):
    PHRASE = "phrase"
    ANY_TERM = "any"


@dataclass(frozen=True)
class WeightConfig:
    meta: int = 5
    url: int = 4
    title: int = 3
    heading: int = 2
    body: int = 1
    threshold: int = 3

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise TypeError(f"{f.name} must be an integer, got {value!r}")
            if f.name != "threshold" and value < 0:
                raise ValueError(f"{f.name} weight must be >= 0, got {value}")

    def scaled(self, factor: int) -> "WeightConfig":
        return WeightConfig(*(getattr(self, f.name) * factor for f in fields(self)))


@dataclass(frozen=True)
class OccurrenceCounts:
    body: int = 0
    title: int = 0
    meta: int = 0
    heading: int = 0
    url: int = 0

    def scaled(self, factor: int) -> "OccurrenceCounts":
        return OccurrenceCounts(*(getattr(self, f.name) * factor for f in fields(self)))

    def as_dict(self) -> dict:
        return {"Nm": self.meta, "Nu": self.url, "Nt": self.title, "Nh": self.heading, "Nb": self.body}


@dataclass(frozen=True)
class PageScore:
    url: CanonicalUrl
    counts: OccurrenceCounts
    total_weight: int
    relevant: bool


def normalize_query(query: str) -> str:
    q = normalize_space(query or "")
    if not q:
        raise EmptyQuery("query is empty")
    return q


def _fold(text: str) -> str:
    return normalize_space(text).casefold()


def count_in(text: str, query: str, mode: MatchMode = MatchMode.PHRASE) -> int:
    """Case-insensitive, non-overlapping substring count of ``query`` in ``text``."""
    q = _fold(normalize_query(query))
    haystack = _fold(text)
    if mode is MatchMode.ANY_TERM:
        return sum(haystack.count(term) for term in q.split(" "))
    return haystack.count(q)


def _count_all(texts: Iterable[str], query: str, mode: MatchMode) -> int:
    return sum(count_in(t, query, mode) for t in texts)


def count_occurrences(doc: TagDocument, query: str, mode: MatchMode = MatchMode.PHRASE) -> OccurrenceCounts:
    normalize_query(query)
    mode = MatchMode(mode)
    return OccurrenceCounts(
        body=count_in(doc.body_text, query, mode),
        title=count_in(doc.title_text, query, mode),
        meta=_count_all(doc.meta_texts, query, mode),
        heading=_count_all(doc.heading_texts, query, mode),
        url=count_in(doc.url_text, query, mode),
    )


def page_weight(counts: OccurrenceCounts, w: WeightConfig) -> int:
    return (
        counts.body * w.body
        + counts.title * w.title
        + counts.meta * w.meta
        + counts.heading * w.heading
        + counts.url * w.url
    )


def is_relevant(t: int, w: WeightConfig) -> bool:
    return t > w.threshold


def score_page(
    doc: TagDocument,
    url: CanonicalUrl,
    query: str,
    weights: WeightConfig,
    mode: MatchMode = MatchMode.PHRASE,
) -> PageScore:
    counts = count_occurrences(doc, query, mode)
    t = page_weight(counts, weights)
    return PageScore(url=url, counts=counts, total_weight=t, relevant=is_relevant(t, weights))
