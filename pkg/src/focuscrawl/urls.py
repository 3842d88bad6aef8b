"""URL canonicalization.

A :class:`CanonicalUrl` is the identity key used by the frontier for
deduplication and trap accounting, so two spellings of the same resource
must collapse to one value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional
from urllib.parse import quote, unquote, urljoin, urlsplit

DEFAULT_PORTS = {"http": 80, "https": 443}

_PERCENT_RE = re.compile(r"%([0-9A-Fa-f]{2})")
_UNRESERVED = frozenset(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-._~"
)
# pchar plus "/" and "%" (existing escapes are normalized separately)
_PATH_SAFE = "/%:@!$&'()*+,;=-._~"
_HOST_RE = re.compile(r"^(?:[a-z0-9_~!$&'()*+,;=.-]|%[0-9a-f]{2})+$|^\[[0-9a-f:.]+\]$")


class UrlError(ValueError):
    """Base class for URL canonicalization failures."""


class MalformedUrl(UrlError):
    pass


class UnsupportedScheme(UrlError):
    pass


@dataclass(frozen=True)
class CanonicalUrl:
    """Normalized absolute http(s) URL.

    Equality and hashing ignore ``original``, the verbatim input string.
    """

    scheme: str
    host: str
    port: Optional[int]
    path: str
    query: Optional[str] = None
    original: str = field(default="", compare=False, repr=False)

    def __post_init__(self):
        if self.scheme not in DEFAULT_PORTS:
            raise UnsupportedScheme(self.scheme)

    @property
    def authority(self) -> str:
        if self.port is None:
            return self.host
        return f"{self.host}:{self.port}"

    @property
    def origin(self) -> str:
        return f"{self.scheme}://{self.authority}"

    @property
    def path_and_query(self) -> str:
        if self.query is None:
            return self.path
        return f"{self.path}?{self.query}"

    @property
    def text(self) -> str:
        return self.origin + self.path_and_query

    @property
    def display_text(self) -> str:
        """URL text with percent-escapes decoded, as a reader would see it."""
        return unquote(self.text, errors="replace")

    @property
    def path_segments(self) -> int:
        return sum(1 for seg in self.path.split("/") if seg)

    def __str__(self) -> str:
        return self.text


def remove_dot_segments(path: str) -> str:
    # RFC 3986 section 5.2.4
    output: list[str] = []
    buf = path
    while buf:
        if buf.startswith("../"):
            buf = buf[3:]
        elif buf.startswith("./"):
            buf = buf[2:]
        elif buf.startswith("/./"):
            buf = buf[2:]
        elif buf == "/.":
            buf = "/"
        elif buf.startswith("/../"):
            buf = buf[3:]
            if output:
                output.pop()
        elif buf == "/..":
            buf = "/"
            if output:
                output.pop()
        elif buf in (".", ".."):
            buf = ""
        else:
            start = 1 if buf.startswith("/") else 0
            cut = buf.find("/", start)
            if cut == -1:
                cut = len(buf)
            output.append(buf[:cut])
            buf = buf[cut:]
    return "".join(output)


def _normalize_escapes(text: str) -> str:
    def fix(m: re.Match) -> str:
        ch = chr(int(m.group(1), 16))
        if ch in _UNRESERVED:
            return ch
        return "%" + m.group(1).upper()

    return _PERCENT_RE.sub(fix, text)


def _normalize_path(path: str) -> str:
    path = quote(path, safe=_PATH_SAFE)
    # a lone "%" not starting an escape must itself be escaped
    path = re.sub(r"%(?![0-9A-Fa-f]{2})", "%25", path)
    path = _normalize_escapes(path)
    path = remove_dot_segments(path)
    return path or "/"


def canonicalize(raw: str, base: Optional[CanonicalUrl] = None) -> CanonicalUrl:
    """Resolve ``raw`` (against ``base`` if relative) and normalize it.

    Scheme and host are lowercased, the default port is dropped, dot
    segments are removed, percent-escapes are normalized, an empty path
    becomes ``/`` and the fragment is discarded. The query is kept verbatim.
    """
    if raw is None or not raw.strip():
        raise MalformedUrl("empty URL")
    source = raw
    raw = raw.strip()
    if any(ch in raw for ch in "\r\n\t"):
        raw = re.sub(r"[\r\n\t]", "", raw)

    try:
        parts = urlsplit(raw)
    except ValueError as exc:
        raise MalformedUrl(f"{raw!r}: {exc}") from None

    if not parts.scheme:
        if base is None:
            raise MalformedUrl(f"relative URL {raw!r} without a base")
        try:
            parts = urlsplit(urljoin(base.text, raw))
        except ValueError as exc:
            raise MalformedUrl(f"{raw!r}: {exc}") from None
    elif base is not None and parts.scheme.lower() in DEFAULT_PORTS and not parts.netloc:
        # "http:page.html" style reference
        parts = urlsplit(urljoin(base.text, raw))

    scheme = parts.scheme.lower()
    if scheme not in DEFAULT_PORTS:
        raise UnsupportedScheme(f"{scheme!r} in {raw!r}")
    if not parts.netloc:
        raise MalformedUrl(f"missing host in {raw!r}")

    try:
        host = (parts.hostname or "").lower()
        port = parts.port
    except ValueError as exc:
        raise MalformedUrl(f"{raw!r}: {exc}") from None
    if not host:
        raise MalformedUrl(f"missing host in {raw!r}")
    if ":" in host:
        host = f"[{host}]"
    if not _HOST_RE.match(host):
        raise MalformedUrl(f"bad host {host!r}")
    if port == DEFAULT_PORTS[scheme]:
        port = None

    query = parts.query if (parts.query or "?" in raw.split("#", 1)[0]) else None
    return CanonicalUrl(
        scheme=scheme,
        host=host,
        port=port,
        path=_normalize_path(parts.path),
        query=query,
        original=source,
    )
