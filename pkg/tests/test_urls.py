import pytest
from hypothesis import given, strategies as st

from focuscrawl.urls import MalformedUrl, UnsupportedScheme, canonicalize, remove_dot_segments


def test_normalization_example():
    assert canonicalize("HTTP://Example.COM:80/a/../b#frag").text == "http://example.com/b"


def test_relative_resolution():
    base = canonicalize("http://site.test/dir/page1.html")
    assert canonicalize("page2.html", base).text == "http://site.test/dir/page2.html"


def test_worked_example_url_is_already_canonical():
    raw = "http://www.myblogindia.com/html/default.asp"
    assert canonicalize(raw).text == raw


@pytest.mark.parametrize(
    "a, b",
    [
        ("HTTP://EXAMPLE.com/x", "http://example.com/x"),
        ("https://example.com:443/", "https://example.com/"),
        ("http://example.com", "http://example.com/"),
        ("http://example.com/x#top", "http://example.com/x"),
        ("http://example.com/%7euser", "http://example.com/~user"),
        ("http://example.com/a%2fb", "http://example.com/a%2Fb"),
    ],
)
def test_equivalent_spellings_compare_equal(a, b):
    assert canonicalize(a) == canonicalize(b)
    assert hash(canonicalize(a)) == hash(canonicalize(b))


def test_query_kept_verbatim_and_distinguishes():
    u = canonicalize("http://a.test/s?B=2&a=1#x")
    assert u.query == "B=2&a=1"
    assert canonicalize("http://a.test/s?a=1") != canonicalize("http://a.test/s?a=2")


def test_non_default_port_kept():
    u = canonicalize("http://a.test:8080/")
    assert u.port == 8080 and u.text == "http://a.test:8080/"


@pytest.mark.parametrize("raw", ["mailto:x@y", "ftp://a.test/f", "javascript:void(0)"])
def test_unsupported_scheme(raw):
    with pytest.raises(UnsupportedScheme):
        canonicalize(raw)


@pytest.mark.parametrize("raw", ["", "   ", "not a url", "http://", "http://a.test:99999/", "http://bad host/"])
def test_malformed(raw):
    with pytest.raises(MalformedUrl):
        canonicalize(raw)


# RFC 3986 section 5.4 reference resolution examples
RFC_BASE = "http://a/b/c/d;p?q"


@pytest.mark.parametrize(
    "ref, expected",
    [
        ("g", "http://a/b/c/g"),
        ("./g", "http://a/b/c/g"),
        ("g/", "http://a/b/c/g/"),
        ("/g", "http://a/g"),
        ("?y", "http://a/b/c/d;p?y"),
        ("g?y", "http://a/b/c/g?y"),
        ("#s", "http://a/b/c/d;p?q"),
        (";x", "http://a/b/c/;x"),
        (".", "http://a/b/c/"),
        ("..", "http://a/b/"),
        ("../g", "http://a/b/g"),
        ("../..", "http://a/"),
        ("../../g", "http://a/g"),
        ("../../../g", "http://a/g"),
        ("/./g", "http://a/g"),
        ("/../g", "http://a/g"),
        ("g.", "http://a/b/c/g."),
        ("..g", "http://a/b/c/..g"),
        ("./../g", "http://a/b/g"),
        ("g/./h", "http://a/b/c/g/h"),
        ("g/../h", "http://a/b/c/h"),
    ],
)
def test_rfc3986_resolution(ref, expected):
    assert canonicalize(ref, canonicalize(RFC_BASE)).text == expected


def test_remove_dot_segments():
    assert remove_dot_segments("/a/b/c/./../../g") == "/a/g"
    assert remove_dot_segments("mid/content=5/../6") == "mid/6"


segment = st.text(alphabet="abcxyz019-_", min_size=1, max_size=5)


@given(st.lists(segment, max_size=6), st.booleans())
def test_canonicalize_idempotent(parts, upper):
    raw = "http://Host.Test/" + "/".join(parts)
    if upper:
        raw = raw.upper()
    once = canonicalize(raw)
    assert canonicalize(once.text) == once
    assert canonicalize(once.text).text == once.text
