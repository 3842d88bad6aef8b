"""Decompose HTML into the scoring regions used for relevance.

Regions are disjoint: heading text is taken out of the body text, and the
title and meta contents never reach it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import FrozenSet, List, Optional, Tuple

from .urls import CanonicalUrl, UrlError, canonicalize

NOINDEX = "noindex"
NOFOLLOW = "nofollow"

HEADINGS = frozenset({"h1", "h2", "h3", "h4", "h5", "h6"})
SKIPPED = frozenset({"script", "style", "template", "noscript"})
# elements whose boundaries separate words in rendered text
_BLOCKS = frozenset(
    """address article aside blockquote br dd div dl dt fieldset figcaption
    figure footer form h1 h2 h3 h4 h5 h6 header hr li main nav ol p pre
    section table tbody td tfoot th thead tr ul title body head html option
    select textarea img""".split()
)
# an unclosed heading ends with its enclosing container
_CONTAINERS = frozenset(
    "article aside body div footer header html li main nav section td th".split()
)
_KNOWN_TAGS = sorted(
    _BLOCKS
    | HEADINGS
    | SKIPPED
    | {"a", "b", "i", "em", "strong", "span", "meta", "link", "base", "small",
       "u", "code", "font", "center", "label", "input", "button", "iframe"},
    key=len,
    reverse=True,
)
# "< title >" / "< /body >": whitespace after "<" in front of a known tag name
_SPACED_TAG_RE = re.compile(
    r"<\s+(/?)\s*(" + "|".join(_KNOWN_TAGS) + r")(?=[\s/>])([^<>]*)>",
    re.IGNORECASE,
)
_META_CHARSET_RE = re.compile(
    rb"""<meta[^>]+charset\s*=\s*["']?\s*([A-Za-z0-9_.:-]+)""", re.IGNORECASE
)
_WS_RE = re.compile(r"\s+")


class NotHtml(ValueError):
    """Raised for bodies that are binary or declared as non-HTML."""


@dataclass(frozen=True)
class TagDocument:
    url_text: str
    meta_texts: List[str] = field(default_factory=list)
    title_text: str = ""
    heading_texts: List[str] = field(default_factory=list)
    body_text: str = ""
    outlinks: List[str] = field(default_factory=list)
    robots_meta: FrozenSet[str] = frozenset()


def normalize_space(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


def is_html_content_type(content_type: Optional[str]) -> bool:
    if not content_type:
        return True
    mime = content_type.split(";", 1)[0].strip().lower()
    return mime in ("text/html", "application/xhtml+xml", "")


def decode_body(body: bytes) -> str:
    """Decode as UTF-8 unless a meta charset says otherwise; never fails."""
    m = _META_CHARSET_RE.search(body[:4096])
    if m:
        encoding = m.group(1).decode("ascii", "replace")
        try:
            return body.decode(encoding, errors="replace")
        except LookupError:
            pass
    return body.decode("utf-8", errors="replace")


def parse_robots_content(content: str) -> FrozenSet[str]:
    tokens = {t.strip().lower() for t in content.split(",")}
    found = set()
    if NOINDEX in tokens or "none" in tokens:
        found.add(NOINDEX)
    if NOFOLLOW in tokens or "none" in tokens:
        found.add(NOFOLLOW)
    return frozenset(found)


class _RegionParser(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.meta: List[str] = []
        self.robots: set = set()
        self.title: List[str] = []
        self.headings: List[str] = []
        self.body: List[str] = []
        self.links: List[str] = []
        self._skip = 0
        self._title_depth = 0
        self._heading: Optional[List[str]] = None
        self._heading_tag: Optional[str] = None

    def handle_starttag(self, tag: str, attrs: List[Tuple[str, Optional[str]]]) -> None:
        self._open(tag, attrs)

    def handle_startendtag(self, tag, attrs):
        self._open(tag, attrs, void=True)

    def _open(self, tag, attrs, void=False):
        values = {k.lower(): (v or "") for k, v in attrs}
        if tag == "meta":
            if "content" in values:
                self.meta.append(normalize_space(values["content"]))
                if values.get("name", "").strip().lower() == "robots":
                    self.robots |= parse_robots_content(values["content"])
            return
        if tag == "a" and "href" in values:
            self.links.append(values["href"].strip())
        if void:
            self._gap()
            return
        if tag in SKIPPED:
            self._skip += 1
        elif tag == "title":
            self._title_depth += 1
        elif tag in HEADINGS:
            if self._heading is not None:
                # unclosed heading: close it before opening the next
                self._close_heading()
            self._heading = []
            self._heading_tag = tag
        self._gap(tag)

    def handle_endtag(self, tag: str) -> None:
        if tag in SKIPPED:
            self._skip = max(0, self._skip - 1)
        elif tag == "title":
            self._title_depth = max(0, self._title_depth - 1)
        elif self._heading is not None and (tag in HEADINGS or tag in _CONTAINERS):
            self._close_heading()
        self._gap(tag)

    def _close_heading(self):
        text = normalize_space("".join(self._heading or []))
        if text:
            self.headings.append(text)
        self._heading = None
        self._heading_tag = None

    def _gap(self, tag: Optional[str] = None):
        if tag is None or tag in _BLOCKS:
            self._sink().append(" ")

    def _sink(self) -> List[str]:
        if self._skip:
            return []
        if self._title_depth:
            return self.title
        if self._heading is not None:
            return self._heading
        return self.body

    def handle_data(self, data: str) -> None:
        self._sink().append(data)

    def close(self):
        super().close()
        if self._heading is not None:
            self._close_heading()


def _untangle_spaced_tags(text: str) -> str:
    return _SPACED_TAG_RE.sub(lambda m: f"<{m.group(1)}{m.group(2)}{m.group(3)}>", text)


def parse(body: bytes, page_url: CanonicalUrl, content_type: Optional[str] = None) -> TagDocument:
    """Parse raw page bytes into a :class:`TagDocument`.

    Raises :class:`NotHtml` when the declared content type is not HTML or
    the body looks binary (NUL bytes near the start).
    """
    if not is_html_content_type(content_type):
        raise NotHtml(f"content type {content_type!r}")
    if b"\x00" in body[:1024]:
        raise NotHtml("binary body")

    text = _untangle_spaced_tags(decode_body(body))
    parser = _RegionParser()
    parser.feed(text)
    parser.close()

    return TagDocument(
        url_text=page_url.display_text,
        meta_texts=parser.meta,
        title_text=normalize_space("".join(parser.title)),
        heading_texts=parser.headings,
        body_text=normalize_space("".join(parser.body)),
        outlinks=parser.links,
        robots_meta=frozenset(parser.robots),
    )


def extract_links(doc: TagDocument, base: CanonicalUrl) -> List[CanonicalUrl]:
    """Resolve the document's hrefs against ``base``; unusable ones are dropped."""
    links = []
    for href in doc.outlinks:
        if not href:
            continue
        try:
            links.append(canonicalize(href, base))
        except UrlError:
            continue
    return links


def robots_directives(doc: TagDocument) -> FrozenSet[str]:
    return doc.robots_meta
