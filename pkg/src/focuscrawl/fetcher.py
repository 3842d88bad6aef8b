"""Page downloading with robots.txt compliance and per-host politeness."""

from __future__ import annotations

import enum
import logging
import threading
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Protocol, Tuple

from .urls import CanonicalUrl, UrlError, canonicalize

logger = logging.getLogger(__name__)

DEFAULT_USER_AGENT = "focuscrawl/0.1"
REDIRECT_CODES = frozenset({301, 302, 303, 307, 308})


class FetchStatus(str, enum.Enum):
    OK = "ok"
    HTTP_ERROR = "http_error"
    TIMEOUT = "timeout"
    TOO_LARGE = "too_large"
    ROBOTS_DENIED = "robots_denied"
    TRANSPORT_ERROR = "transport_error"


@dataclass(frozen=True)
class FetchLimits:
    max_body_bytes: int = 2 * 1024 * 1024
    timeout: float = 10.0
    max_redirects: int = 5
    min_delay: float = 0.5
    user_agent: str = DEFAULT_USER_AGENT
    respect_robots_txt: bool = True


@dataclass
class FetchResult:
    url: CanonicalUrl
    status: FetchStatus
    body: Optional[bytes] = None
    content_type: Optional[str] = None
    http_code: Optional[int] = None
    final_url: Optional[CanonicalUrl] = None
    redirects: int = 0
    error: Optional[str] = None
    fetched_at: float = field(default_factory=time.time)

    def __post_init__(self):
        if (self.body is not None) != (self.status is FetchStatus.OK):
            raise ValueError("body must be present exactly when status is OK")
        if self.final_url is None:
            self.final_url = self.url

    @property
    def ok(self) -> bool:
        return self.status is FetchStatus.OK


# -- transports ---------------------------------------------------------------


class TransportTimeout(Exception):
    pass


class TransportFailure(Exception):
    pass


@dataclass
class Response:
    status: int
    body: bytes = b""
    content_type: Optional[str] = None
    location: Optional[str] = None
    truncated: bool = False


class Transport(Protocol):
    def get(self, url: str, *, max_bytes: int, timeout: float, user_agent: str) -> Response:
        """Issue one GET without following redirects.

        Reads at most ``max_bytes + 1`` bytes of body. Raises
        :class:`TransportTimeout` or :class:`TransportFailure`.
        """


class _NoRedirect(urllib.request.HTTPRedirectHandler):
    def redirect_request(self, req, fp, code, msg, headers, newurl):
        return None


class HttpTransport:
    """Live HTTP(S) transport on top of :mod:`urllib.request`."""

    def __init__(self):
        self._opener = urllib.request.build_opener(_NoRedirect)

    def get(self, url, *, max_bytes, timeout, user_agent):
        req = urllib.request.Request(url, headers={"User-Agent": user_agent})
        try:
            resp = self._opener.open(req, timeout=timeout)
        except urllib.error.HTTPError as exc:
            resp = exc
        except (TimeoutError, OSError) as exc:
            reason = getattr(exc, "reason", exc)
            if isinstance(exc, TimeoutError) or isinstance(reason, TimeoutError):
                raise TransportTimeout(str(exc)) from exc
            raise TransportFailure(str(exc)) from exc
        try:
            headers = resp.headers
            status = resp.getcode() or 0
            if status >= 400:
                body = b""
            else:
                body = resp.read(max_bytes + 1)
            return Response(
                status=status,
                body=body,
                content_type=headers.get("Content-Type"),
                location=headers.get("Location"),
                truncated=len(body) > max_bytes,
            )
        except TimeoutError as exc:
            raise TransportTimeout(str(exc)) from exc
        except OSError as exc:
            raise TransportFailure(str(exc)) from exc
        finally:
            resp.close()


# -- robots.txt -----------------------------------------------------------------


@dataclass(frozen=True)
class RobotsPolicy:
    host: str
    disallow_prefixes: Tuple[str, ...] = ()
    fetched: bool = False

    def allows(self, path: str) -> bool:
        return not any(path.startswith(prefix) for prefix in self.disallow_prefixes)


def parse_robots_txt(text: str, user_agent: str, host: str = "") -> RobotsPolicy:
    """Pick the rule group for ``user_agent`` (falling back to ``*``).

    Only ``User-agent`` and ``Disallow`` lines are honoured; an empty
    ``Disallow`` allows everything.
    """
    token = user_agent.split("/", 1)[0].strip().lower()
    groups: List[Tuple[List[str], List[str]]] = []
    agents: List[str] = []
    rules: List[str] = []
    in_rules = False

    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line or ":" not in line:
            continue
        key, value = (part.strip() for part in line.split(":", 1))
        key = key.lower()
        if key == "user-agent":
            if in_rules:
                groups.append((agents, rules))
                agents, rules, in_rules = [], [], False
            agents.append(value.lower())
        elif key in ("disallow", "allow"):
            if not agents:
                continue
            in_rules = True
            if key == "disallow" and value:
                rules.append(value)
    if agents:
        groups.append((agents, rules))

    specific = [r for a, r in groups if any(ag != "*" and ag in token for ag in a)]
    chosen = specific or [r for a, r in groups if "*" in a]
    prefixes = tuple(p for r in chosen for p in r)
    return RobotsPolicy(host=host, disallow_prefixes=prefixes, fetched=True)


# -- politeness -----------------------------------------------------------------


class Politeness:
    """Spaces request starts to the same host by at least ``min_delay`` seconds.

    Slots are reserved under a lock, so concurrent workers targeting one host
    queue up behind each other; distinct hosts never wait on each other.
    """

    def __init__(
        self,
        min_delay: float,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.min_delay = min_delay
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._last_start: Dict[str, float] = {}

    def wait(self, host: str) -> float:
        with self._lock:
            now = self._clock()
            last = self._last_start.get(host)
            start = now if last is None else max(now, last + self.min_delay)
            self._last_start[host] = start
        delay = start - now
        if delay > 0:
            self._sleep(delay)
        return delay


# -- fetcher --------------------------------------------------------------------


class Fetcher:
    def __init__(
        self,
        transport: Transport,
        limits: FetchLimits = FetchLimits(),
        politeness: Optional[Politeness] = None,
    ):
        self.transport = transport
        self.limits = limits
        self.politeness = politeness or Politeness(limits.min_delay)
        self._robots: Dict[str, RobotsPolicy] = {}
        self._robots_locks: Dict[str, threading.Lock] = {}
        self._lock = threading.Lock()

    def politeness_wait(self, host: str) -> float:
        return self.politeness.wait(host)

    def consult_robots(self, origin: str) -> RobotsPolicy:
        """Fetch and cache ``origin``/robots.txt; any failure means allow-all."""
        with self._lock:
            cached = self._robots.get(origin)
            if cached is not None:
                return cached
            host_lock = self._robots_locks.setdefault(origin, threading.Lock())
        with host_lock:
            with self._lock:
                if origin in self._robots:
                    return self._robots[origin]
            policy = self._load_robots(origin)
            with self._lock:
                self._robots[origin] = policy
            return policy

    def _load_robots(self, origin: str) -> RobotsPolicy:
        self.politeness_wait(origin)
        try:
            resp = self.transport.get(
                origin + "/robots.txt",
                max_bytes=self.limits.max_body_bytes,
                timeout=self.limits.timeout,
                user_agent=self.limits.user_agent,
            )
        except (TransportTimeout, TransportFailure) as exc:
            logger.info("robots.txt for %s unavailable (%s); allowing all", origin, exc)
            return RobotsPolicy(host=origin)
        if resp.status != 200 or resp.truncated:
            logger.debug("robots.txt for %s: status %s; allowing all", origin, resp.status)
            return RobotsPolicy(host=origin)
        text = resp.body.decode("utf-8", errors="replace")
        return parse_robots_txt(text, self.limits.user_agent, host=origin)

    def allowed(self, url: CanonicalUrl) -> bool:
        if not self.limits.respect_robots_txt:
            return True
        return self.consult_robots(url.origin).allows(url.path_and_query)

    def fetch(self, url: CanonicalUrl) -> FetchResult:
        if not isinstance(url, CanonicalUrl):
            raise TypeError(f"fetch expects a CanonicalUrl, got {type(url).__name__}")

        current = url
        for hops in range(self.limits.max_redirects + 1):
            if not self.allowed(current):
                return FetchResult(url, FetchStatus.ROBOTS_DENIED, final_url=current, redirects=hops)
            self.politeness_wait(current.origin)
            try:
                resp = self.transport.get(
                    current.text,
                    max_bytes=self.limits.max_body_bytes,
                    timeout=self.limits.timeout,
                    user_agent=self.limits.user_agent,
                )
            except TransportTimeout as exc:
                return FetchResult(url, FetchStatus.TIMEOUT, final_url=current, error=str(exc))
            except TransportFailure as exc:
                return FetchResult(url, FetchStatus.TRANSPORT_ERROR, final_url=current, error=str(exc))

            if resp.status in REDIRECT_CODES and resp.location:
                try:
                    current = canonicalize(resp.location, current)
                except UrlError as exc:
                    return FetchResult(
                        url, FetchStatus.TRANSPORT_ERROR, http_code=resp.status,
                        final_url=current, error=f"bad redirect: {exc}",
                    )
                continue
            if resp.status != 200:
                return FetchResult(
                    url, FetchStatus.HTTP_ERROR, http_code=resp.status,
                    content_type=resp.content_type, final_url=current, redirects=hops,
                )
            if resp.truncated or len(resp.body) > self.limits.max_body_bytes:
                return FetchResult(
                    url, FetchStatus.TOO_LARGE, http_code=resp.status,
                    content_type=resp.content_type, final_url=current, redirects=hops,
                )
            return FetchResult(
                url, FetchStatus.OK, body=bytes(resp.body), content_type=resp.content_type,
                http_code=resp.status, final_url=current, redirects=hops,
            )

        return FetchResult(
            url, FetchStatus.TRANSPORT_ERROR, final_url=current,
            redirects=self.limits.max_redirects + 1,
            error=f"more than {self.limits.max_redirects} redirects",
        )
