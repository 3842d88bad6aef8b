import csv
import io
import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from focuscrawl.corpus import Corpus
from focuscrawl.engine import RankedEntry, RankedResults
from focuscrawl.evaluator import (
    BASELINE,
    CSV_COLUMNS,
    FOCUSED,
    MissingLabel,
    compare,
    precision,
    to_csv,
    to_json,
    to_text,
)
from focuscrawl.urls import canonicalize

from .conftest import OFFLINE


def results(n):
    return RankedResults([RankedEntry(canonicalize(f"http://s.test/{i}"), 10 - i, None, i) for i in range(n)])


def labels_for(flags):
    return {canonicalize(f"http://s.test/{i}"): f for i, f in enumerate(flags)}


def test_six_of_ten():
    flags = [True] * 6 + [False] * 4
    report = precision(results(10), labels_for(flags))
    assert report.precision == Fraction(3, 5)
    assert (report.retained, report.true_positives) == (10, 6)
    assert report.at_k == {5: Fraction(1), 10: Fraction(3, 5)}


def test_nothing_retained_is_zero():
    report = precision(results(0), {})
    assert report.precision == 0 and report.at_k == {5: 0, 10: 0}


def test_at_k_uses_inspected_count():
    report = precision(results(3), labels_for([True, False, True]))
    assert report.at_k[5] == Fraction(2, 3)


def test_missing_label():
    with pytest.raises(MissingLabel):
        precision(results(2), labels_for([True]))


@given(st.lists(st.booleans(), max_size=30), st.randoms())
def test_precision_independent_of_order(flags, rng):
    entries = list(results(len(flags)))
    shuffled = entries[:]
    rng.shuffle(shuffled)
    labels = labels_for(flags)
    assert precision(RankedResults(entries), labels).precision == precision(RankedResults(shuffled), labels).precision
    if flags:
        assert precision(RankedResults(entries), labels).precision == Fraction(sum(flags), len(flags))


def tiny_corpus():
    page = "<html><head><title>{}</title></head><body>{}</body></html>"
    return Corpus.from_pages({
        "http://s.test/": {"body": page.format("home", '<a href="/zebra/1">x</a><a href="/p">y</a>'), "label": False},
        "http://s.test/zebra/1": {"body": page.format("other", ""), "label": False},
        "http://s.test/p": {"body": page.format("zebra zebra", ""), "label": True},
    })


def test_compare_single_row():
    corpus = tiny_corpus()
    table = compare([(["http://s.test/"], "zebra")], corpus.labels(), corpus.transport, limits=OFFLINE)
    assert len(table) == 1
    row = table[0]
    assert row.baseline.arm == BASELINE and row.focused.arm == FOCUSED
    # the bait URL alone scores 4, so the focused arm keeps it too
    assert row.baseline.precision == 0 and row.focused.precision == Fraction(1, 2)
    assert row.gain == Fraction(1, 2)


def test_report_formats():
    corpus = tiny_corpus()
    table = compare([(["http://s.test/"], "zebra")], corpus.labels(), corpus.transport, names=["z"], limits=OFFLINE)
    rows = list(csv.DictReader(io.StringIO(to_csv(table))))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert [(r["arm"], r["precision"]) for r in rows] == [("baseline", "0.0000"), ("focused", "0.5000")]
    text = to_text(table)
    assert "0.00%" in text and "50.00%" in text
    doc = json.loads(to_json(table))
    assert doc["rows"][0]["name"] == "z"
    assert doc["rows"][0]["arms"]["focused"]["precision"] == 0.5
