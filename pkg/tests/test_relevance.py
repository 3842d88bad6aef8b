import pytest
from hypothesis import assume, given, settings, strategies as st

from focuscrawl.corpus import EXAMPLE_PAGE
from focuscrawl.html_model import TagDocument, parse
from focuscrawl.relevance import (
    EmptyQuery,
    MatchMode,
    OccurrenceCounts,
    WeightConfig,
    count_in,
    count_occurrences,
    is_relevant,
    page_weight,
    score_page,
)
from focuscrawl.urls import canonicalize

DEFAULT = WeightConfig()
EXAMPLE_URL = canonicalize("http://www.myblogindia.com/html/default.asp")


def naive_count(text: str, query: str) -> int:
    """Slide one character at a time; on a match jump past it."""
    text, query = " ".join(text.split()).casefold(), " ".join(query.split()).casefold()
    n, i, hits = len(query), 0, 0
    while i + n <= len(text):
        if text[i:i + n] == query:
            hits += 1
            i += n
        else:
            i += 1
    return hits


def test_default_weights():
    assert (DEFAULT.meta, DEFAULT.url, DEFAULT.title, DEFAULT.heading, DEFAULT.body, DEFAULT.threshold) == (5, 4, 3, 2, 1, 3)


def test_negative_weight_rejected():
    with pytest.raises(ValueError):
        WeightConfig(meta=-1)
    with pytest.raises(TypeError):
        WeightConfig(body=1.5)


def test_worked_example_counts():
    counts = count_occurrences(parse(EXAMPLE_PAGE, EXAMPLE_URL), "html")
    assert counts == OccurrenceCounts(body=1, title=1, meta=2, heading=0, url=1)


def test_worked_example_weight():
    counts = OccurrenceCounts(body=1, title=1, meta=2, heading=0, url=1)
    assert page_weight(counts, DEFAULT) == 18


def test_worked_example_case_insensitive_query():
    doc = parse(EXAMPLE_PAGE, EXAMPLE_URL)
    assert count_occurrences(doc, "HTML") == count_occurrences(doc, "html")


def test_absent_query_all_zero():
    assert count_occurrences(parse(EXAMPLE_PAGE, EXAMPLE_URL), "cricket") == OccurrenceCounts()


def test_non_overlapping():
    assert count_in("aaaa", "aa") == 2
    assert naive_count("aaaa", "aa") == 2
    assert count_in("aaa", "aa") == 1


def test_zero_and_heading_only_weights():
    assert page_weight(OccurrenceCounts(), DEFAULT) == 0
    assert page_weight(OccurrenceCounts(heading=2), DEFAULT) == 4


@pytest.mark.parametrize("t, expected", [(18, True), (3, False), (4, True), (0, False)])
def test_threshold(t, expected):
    assert is_relevant(t, DEFAULT) is expected


def test_empty_query():
    doc = TagDocument(url_text="http://a/")
    with pytest.raises(EmptyQuery):
        count_occurrences(doc, "   ")


def test_phrase_whitespace_normalized():
    doc = TagDocument(url_text="", body_text="buy Book  Show tickets", title_text="book\nshow")
    counts = count_occurrences(doc, "  book   show ")
    assert counts.body == 1 and counts.title == 1


def test_phrase_vs_any_term():
    doc = TagDocument(url_text="", body_text="a book and a show")
    assert count_occurrences(doc, "book show").body == 0
    assert count_occurrences(doc, "book show", MatchMode.ANY_TERM).body == 2


def test_substring_matching_inside_punctuation():
    doc = TagDocument(url_text="http://x.test/html/", meta_texts=["HTML, CSS"])
    counts = count_occurrences(doc, "html")
    assert counts.meta == 1 and counts.url == 1


def test_meta_summed_over_elements_not_across():
    doc = TagDocument(url_text="", meta_texts=["book", "show", "book show", "BOOK SHOW book show"])
    assert count_occurrences(doc, "book show").meta == 3


def test_score_page_relevance_flag():
    doc = TagDocument(url_text="", heading_texts=["x y", "x"])
    s = score_page(doc, EXAMPLE_URL, "x", DEFAULT)
    assert s.total_weight == 4 and s.relevant


# -- properties ---------------------------------------------------------------------------

counts_st = st.builds(OccurrenceCounts, *(st.integers(0, 50) for _ in range(5)))
weights_st = st.builds(WeightConfig, *(st.integers(0, 20) for _ in range(5)), st.integers(0, 50))


@given(counts_st, weights_st)
def test_weight_formula(c, w):
    assert page_weight(c, w) == c.body * w.body + c.title * w.title + c.meta * w.meta + c.heading * w.heading + c.url * w.url


@given(counts_st, weights_st)
def test_linearity(c, w):
    assert page_weight(c.scaled(2), w) == 2 * page_weight(c, w)


@given(counts_st, st.sampled_from(["body", "title", "meta", "heading", "url"]), weights_st)
def test_monotonicity(c, region, w):
    bumped = OccurrenceCounts(**{**vars(c), region: getattr(c, region) + 1})
    assert page_weight(bumped, w) >= page_weight(c, w)
    positive = WeightConfig(*(max(1, getattr(w, f)) for f in ("meta", "url", "title", "heading", "body")), w.threshold)
    assert page_weight(bumped, positive) > page_weight(c, positive)


def test_meta_dominates_other_single_regions():
    one_meta = page_weight(OccurrenceCounts(meta=1), DEFAULT)
    for region in ("body", "title", "heading", "url"):
        assert one_meta > page_weight(OccurrenceCounts(**{region: 1}), DEFAULT)


@given(counts_st, counts_st, weights_st, st.integers(1, 9))
def test_ranking_invariant_under_weight_scaling(a, b, w, k):
    scaled = w.scaled(k)
    ta, tb = page_weight(a, w), page_weight(b, w)
    sa, sb = page_weight(a, scaled), page_weight(b, scaled)
    assert (ta > tb) == (sa > sb) and (ta == tb) == (sa == sb)
    assert is_relevant(ta, w) == is_relevant(sa, scaled)


alphabet = st.sampled_from(list("abAB ht-ml"))
small_text = st.lists(alphabet, max_size=40).map("".join)
small_query = st.lists(st.sampled_from(list("abAhtml")), min_size=1, max_size=4).map("".join)


@given(small_text, small_query)
def test_count_matches_naive_oracle(text, query):
    assert count_in(text, query) == naive_count(text, query)


docs = st.builds(
    TagDocument,
    url_text=small_text,
    meta_texts=st.lists(small_text, max_size=3),
    title_text=small_text,
    heading_texts=st.lists(small_text, max_size=3),
    body_text=small_text,
)


@given(docs, small_query)
def test_case_insensitive(doc, query):
    upper = TagDocument(
        url_text=doc.url_text.upper(),
        meta_texts=[m.upper() for m in doc.meta_texts],
        title_text=doc.title_text.upper(),
        heading_texts=[h.upper() for h in doc.heading_texts],
        body_text=doc.body_text.upper(),
    )
    assert count_occurrences(doc, query) == count_occurrences(upper, query)
    assert count_occurrences(doc, query.upper()) == count_occurrences(doc, query)


@settings(max_examples=200)
@given(st.text(max_size=60), st.text(min_size=1, max_size=4))
def test_unicode_text_oracle(text, query):
    assume(query.strip())
    assert count_in(text, query) == naive_count(text, query)
