import csv
import io
import json
import os

import pytest

from focuscrawl.cli import DEFAULTS, RESULT_COLUMNS, UsageError, main, read_config_file, resolve_settings

from .conftest import FIXTURES

EXAMPLE = str(FIXTURES / "example")
EXAMPLE_SEED = "http://www.myblogindia.com/html/default.asp"


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in list(os.environ):
        if key.startswith("FOCUSCRAWL_"):
            monkeypatch.delenv(key)


def test_golden_crawl(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["crawl", "--corpus", EXAMPLE, "--seed", EXAMPLE_SEED, "--query", "html", "--out-json", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["results"] == [{"rank": 1, "t": 18, "Nm": 2, "Nu": 1, "Nt": 1, "Nh": 0, "Nb": 1, "url": EXAMPLE_SEED}]
    table = capsys.readouterr().out
    assert "18" in table and EXAMPLE_SEED in table


def test_json_field_order(tmp_path):
    out = tmp_path / "r.json"
    main(["crawl", "--corpus", EXAMPLE, "--seed", EXAMPLE_SEED, "--query", "html", "--out-json", str(out)])
    doc = json.loads(out.read_text())
    assert list(doc) == ["schema", "query", "seeds", "weights", "results", "stats"]
    assert doc["schema"] == "focuscrawl.ranked/1"
    assert tuple(doc["results"][0]) == RESULT_COLUMNS
    assert doc["weights"] == {"M": 5, "U": 4, "T": 3, "H": 2, "B": 1, "threshold": 3}


def test_csv_output(tmp_path):
    out = tmp_path / "r.csv"
    main(["crawl", "--corpus", EXAMPLE, "--seed", EXAMPLE_SEED, "--query", "html", "--out-csv", str(out)])
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert tuple(rows[0]) == RESULT_COLUMNS
    assert rows[1] == ["1", "18", "2", "1", "1", "0", "1", EXAMPLE_SEED]


def test_missing_query_exit_2(capsys):
    assert main(["crawl", "--corpus", EXAMPLE, "--seed", EXAMPLE_SEED]) == 2
    assert "query" in capsys.readouterr().err


def test_bad_seed_exit_2():
    assert main(["crawl", "--corpus", EXAMPLE, "--seed", "ftp://nope", "--query", "html"]) == 2


def test_bad_corpus_exit_3(tmp_path):
    assert main(["crawl", "--corpus", str(tmp_path), "--seed", EXAMPLE_SEED, "--query", "html"]) == 3


def test_custom_weights_change_score(tmp_path):
    out = tmp_path / "r.json"
    main(["crawl", "--corpus", EXAMPLE, "--seed", EXAMPLE_SEED, "--query", "html", "--weight-m", "0",
          "--out-json", str(out)])
    assert json.loads(out.read_text())["results"][0]["t"] == 8


def test_high_threshold_empties_results(tmp_path, capsys):
    out = tmp_path / "r.json"
    main(["crawl", "--corpus", EXAMPLE, "--seed", EXAMPLE_SEED, "--query", "html", "--threshold", "18",
          "--out-json", str(out)])
    assert json.loads(out.read_text())["results"] == []
    assert "no relevant pages" in capsys.readouterr().out


def test_repeat_runs_byte_identical(tmp_path):
    args = ["crawl", "--corpus", str(FIXTURES / "suite"), "--seed", "http://cricketmatch.test/",
            "--query", "cricket match"]
    for name in ("a", "b"):
        main(args + ["--out-json", str(tmp_path / f"{name}.json"), "--out-csv", str(tmp_path / f"{name}.csv")])
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


# -- settings precedence ----------------------------------------------------------------


def test_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"max_pages": 10, "workers": 2, "delay_ms": 7, "weights": {"meta": 9}}))
    env = {"FOCUSCRAWL_MAX_PAGES": "20", "FOCUSCRAWL_WORKERS": "3"}
    s = resolve_settings({"config": str(cfg), "max_pages": 30}, env)
    assert s["max_pages"] == 30      # flag beats env and file
    assert s["workers"] == 3         # env beats file
    assert s["delay_ms"] == 7        # file beats default
    assert s["weight_m"] == 9
    assert s["max_depth"] == DEFAULTS["max_depth"]


def test_delay_default_depends_on_mode():
    assert resolve_settings({}, {})["delay_ms"] == 500
    assert resolve_settings({"corpus": "x"}, {})["delay_ms"] == 0


def test_env_booleans():
    assert resolve_settings({}, {"FOCUSCRAWL_ROBOTS_TXT": "false"})["robots_txt"] is False
    with pytest.raises(UsageError):
        resolve_settings({}, {"FOCUSCRAWL_ROBOTS_TXT": "maybe"})


def test_env_bad_integer():
    with pytest.raises(UsageError):
        resolve_settings({}, {"FOCUSCRAWL_MAX_PAGES": "lots"})


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"max_pagez": 3}')
    with pytest.raises(UsageError):
        read_config_file(str(cfg))


def test_negative_weight_exit_2():
    assert main(["crawl", "--corpus", EXAMPLE, "--seed", EXAMPLE_SEED, "--query", "html", "--weight-b", "-1"]) == 2


# -- compare ------------------------------------------------------------------------------


def test_compare_suite(tmp_path, capsys):
    out = tmp_path / "cmp.csv"
    assert main(["compare", "--suite", str(FIXTURES / "suite" / "suite.json"), "--out-csv", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 8
    assert {r["query"] for r in rows} == {"book show", "book to read", "cricket match", "match making"}
    assert "Focused precision" in capsys.readouterr().out


def write_suite(tmp_path, rows):
    doc = {"format": "focuscrawl-suite", "version": 1, "corpus": str(FIXTURES / "suite"), "rows": rows}
    path = tmp_path / "suite.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_compare_empty_suite_exit_2(tmp_path):
    assert main(["compare", "--suite", write_suite(tmp_path, [])]) == 2


def test_compare_single_row(tmp_path):
    suite = write_suite(tmp_path, [{"name": "one", "query": "book show", "seeds": ["http://bookshow.test/"]}])
    out = tmp_path / "cmp.json"
    assert main(["compare", "--suite", suite, "--out-json", str(out)]) == 0
    assert [r["name"] for r in json.loads(out.read_text())["rows"]] == ["one"]


def test_compare_bad_corpus_exit_3(tmp_path):
    suite = write_suite(tmp_path, [{"name": "x", "query": "q", "seeds": ["http://a.test/"]}])
    assert main(["compare", "--suite", suite, "--corpus", str(tmp_path / "none")]) == 3


# -- gencorpus ----------------------------------------------------------------------------


def test_gencorpus_defaults(tmp_path):
    out = tmp_path / "c"
    assert main(["gencorpus", "--out", str(out)]) == 0
    doc = json.loads((out / "manifest.json").read_text())
    assert len(doc["entries"]) == 10
    assert sum(e["label"] for e in doc["entries"]) == 3


def test_gencorpus_negative_pages(tmp_path):
    assert main(["gencorpus", "--out", str(tmp_path / "c"), "--pages", "-1"]) == 2


def test_gencorpus_refuses_non_empty(tmp_path):
    (tmp_path / "junk").write_text("x")
    assert main(["gencorpus", "--out", str(tmp_path)]) == 2


def test_gencorpus_identical_trees(tmp_path):
    for name in ("a", "b"):
        main(["gencorpus", "--out", str(tmp_path / name), "--seed", "3", "--pages", "20", "--url-bait", "0.2"])
    a = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    b = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*") if p.is_file())
    assert a == b
    assert all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes() for f in a)


def test_gencorpus_preset(tmp_path):
    assert main(["gencorpus", "--out", str(tmp_path / "p"), "--preset", "example"]) == 0
    assert (tmp_path / "p" / "manifest.json").read_bytes() == (FIXTURES / "example" / "manifest.json").read_bytes()


def test_module_entry_point():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "focuscrawl", "crawl", "--corpus", EXAMPLE, "--seed", EXAMPLE_SEED,
                           "--query", "html"], capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0 and EXAMPLE_SEED in proc.stdout
