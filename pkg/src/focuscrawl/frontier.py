"""FIFO crawl frontier with deduplication and spider-trap guards."""

from __future__ import annotations

import enum
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Set

from .urls import CanonicalUrl

DEFAULT_MAX_DEPTH = 8
DEFAULT_MAX_PAGES_PER_HOST = 200
DEFAULT_MAX_PATH_SEGMENTS = 16


class Admission(enum.Enum):
    ADMITTED = "admitted"
    DUPLICATE = "duplicate"
    DEPTH_EXCEEDED = "depth_exceeded"
    HOST_BUDGET_EXHAUSTED = "host_budget_exhausted"
    PATH_TOO_DEEP = "path_too_deep"

    @property
    def admitted(self) -> bool:
        return self is Admission.ADMITTED

    def __bool__(self) -> bool:
        return self.admitted


@dataclass(frozen=True)
class FrontierEntry:
    url: CanonicalUrl
    depth: int = 0
    parent: Optional[CanonicalUrl] = None

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be non-negative")

    def child(self, url: CanonicalUrl) -> "FrontierEntry":
        return FrontierEntry(url=url, depth=self.depth + 1, parent=self.url)


@dataclass
class TrapGuardState:
    max_depth: int = DEFAULT_MAX_DEPTH
    max_pages_per_host: int = DEFAULT_MAX_PAGES_PER_HOST
    max_path_segments: int = DEFAULT_MAX_PATH_SEGMENTS
    host_counts: Dict[str, int] = field(default_factory=dict)
    seen: Set[CanonicalUrl] = field(default_factory=set)

    def check(self, entry: FrontierEntry) -> Admission:
        if entry.url in self.seen:
            return Admission.DUPLICATE
        if entry.depth > self.max_depth:
            return Admission.DEPTH_EXCEEDED
        if entry.url.path_segments > self.max_path_segments:
            return Admission.PATH_TOO_DEEP
        if self.host_counts.get(entry.url.authority, 0) >= self.max_pages_per_host:
            return Admission.HOST_BUDGET_EXHAUSTED
        return Admission.ADMITTED

    def admit(self, entry: FrontierEntry) -> None:
        self.seen.add(entry.url)
        host = entry.url.authority
        self.host_counts[host] = self.host_counts.get(host, 0) + 1


class Frontier:
    """First-come-first-served queue of unvisited URLs.

    A URL is marked seen when it is admitted, not when it is dequeued, so
    a page linked from many places occupies at most one queue slot.
    Admission and dequeue are atomic with respect to the seen set.
    """

    def __init__(self, guard: Optional[TrapGuardState] = None):
        self.guard = guard if guard is not None else TrapGuardState()
        self._queue: deque[FrontierEntry] = deque()
        self._lock = threading.Lock()
        self.admitted = 0
        self.dequeued = 0
        self.rejections: Dict[Admission, int] = {}

    def enqueue(self, entry: FrontierEntry) -> Admission:
        with self._lock:
            verdict = self.guard.check(entry)
            if verdict.admitted:
                self.guard.admit(entry)
                self._queue.append(entry)
                self.admitted += 1
            else:
                self.rejections[verdict] = self.rejections.get(verdict, 0) + 1
            return verdict

    def extend(self, entries: Iterable[FrontierEntry]) -> list[Admission]:
        return [self.enqueue(e) for e in entries]

    def dequeue(self) -> Optional[FrontierEntry]:
        with self._lock:
            if not self._queue:
                return None
            self.dequeued += 1
            return self._queue.popleft()

    def mark_seen(self, url: CanonicalUrl) -> bool:
        """Record ``url`` as seen without queueing it; False if already seen."""
        with self._lock:
            if url in self.guard.seen:
                return False
            self.guard.seen.add(url)
            return True

    def __len__(self) -> int:
        with self._lock:
            return len(self._queue)

    def __bool__(self) -> bool:
        return len(self) > 0
