"""Command-line entry point.

Settings resolve in four layers, later ones winning: built-in defaults,
the ``--config`` JSON file, ``FOCUSCRAWL_*`` environment variables, flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import corpus as corpus_mod
from . import evaluator
from .engine import CrawlOutcome, ValidationError, crawl, validate_inputs
from .fetcher import DEFAULT_USER_AGENT, FetchLimits, HttpTransport
from .relevance import MatchMode, WeightConfig

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_TRANSPORT = 3

ENV_PREFIX = "FOCUSCRAWL_"
OUTPUT_SCHEMA = "focuscrawl.ranked/1"
RESULT_COLUMNS = ("rank", "t", "Nm", "Nu", "Nt", "Nh", "Nb", "url")

DEFAULTS: Dict[str, Any] = {
    "seeds": [],
    "query": None,
    "corpus": None,
    "max_pages": 100,
    "max_depth": 8,
    "max_pages_per_host": 200,
    "max_path_segments": 16,
    "workers": 1,
    "delay_ms": None,  # 500 live, 0 against an offline corpus
    "timeout": 10.0,
    "max_body_bytes": 2 * 1024 * 1024,
    "max_redirects": 5,
    "user_agent": DEFAULT_USER_AGENT,
    "robots_txt": True,
    "meta_robots": True,
    "match": "phrase",
    "weight_m": 5,
    "weight_u": 4,
    "weight_t": 3,
    "weight_h": 2,
    "weight_b": 1,
    "threshold": 3,
    "out_json": None,
    "out_csv": None,
}
_WEIGHT_KEYS = {"meta": "weight_m", "url": "weight_u", "title": "weight_t",
                "heading": "weight_h", "body": "weight_b", "threshold": "threshold"}
_INT_KEYS = {"max_pages", "max_depth", "max_pages_per_host", "max_path_segments", "workers",
             "delay_ms", "max_body_bytes", "max_redirects", "weight_m", "weight_u", "weight_t",
             "weight_h", "weight_b", "threshold"}
_BOOL_KEYS = {"robots_txt", "meta_robots"}


class UsageError(Exception):
    pass


def _coerce(key: str, value: Any) -> Any:
    if value is None:
        return None
    try:
        if key in _INT_KEYS:
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise ValueError(value)
            return int(value)
        if key == "timeout":
            return float(value)
        if key in _BOOL_KEYS:
            if isinstance(value, str):
                lowered = value.strip().lower()
                if lowered not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                    raise ValueError(value)
                return lowered in ("1", "true", "yes", "on")
            return bool(value)
        if key == "seeds":
            if isinstance(value, str):
                return [s for s in value.replace(",", " ").split() if s]
            return list(value)
    except (TypeError, ValueError):
        raise UsageError(f"bad value for {key}: {value!r}") from None
    return value


def read_config_file(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    flat: Dict[str, Any] = {}
    for key, value in raw.items():
        if key == "weights" and isinstance(value, dict):
            for wkey, wval in value.items():
                if wkey not in _WEIGHT_KEYS:
                    raise UsageError(f"unknown weight {wkey!r} in {path}")
                flat[_WEIGHT_KEYS[wkey]] = wval
        elif key in DEFAULTS:
            flat[key] = value
        else:
            raise UsageError(f"unknown config key {key!r} in {path}")
    return {k: _coerce(k, v) for k, v in flat.items()}


def read_env(environ: Optional[Dict[str, str]] = None) -> Dict[str, Any]:
    environ = os.environ if environ is None else environ
    found = {}
    for key in DEFAULTS:
        name = ENV_PREFIX + key.upper()
        if name in environ:
            found[key] = _coerce(key, environ[name])
    return found


def resolve_settings(
    flags: Dict[str, Any],
    environ: Optional[Dict[str, str]] = None,
    defaults: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    settings = dict(DEFAULTS if defaults is None else defaults)
    settings.update(read_config_file(flags.get("config")))
    settings.update(read_env(environ))
    settings.update({k: _coerce(k, v) for k, v in flags.items() if k in DEFAULTS and v not in (None, [])})
    if settings["delay_ms"] is None:
        settings["delay_ms"] = 0 if settings["corpus"] else 500
    return settings


def _crawl_options(settings: Dict[str, Any]) -> Dict[str, Any]:
    try:
        weights = WeightConfig(
            meta=settings["weight_m"], url=settings["weight_u"], title=settings["weight_t"],
            heading=settings["weight_h"], body=settings["weight_b"], threshold=settings["threshold"],
        )
        match = MatchMode(settings["match"])
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    limits = FetchLimits(
        max_body_bytes=settings["max_body_bytes"],
        timeout=settings["timeout"],
        max_redirects=settings["max_redirects"],
        min_delay=settings["delay_ms"] / 1000.0,
        user_agent=settings["user_agent"],
        respect_robots_txt=settings["robots_txt"],
    )
    return dict(
        weights=weights,
        max_pages=settings["max_pages"],
        max_depth=settings["max_depth"],
        max_pages_per_host=settings["max_pages_per_host"],
        max_path_segments=settings["max_path_segments"],
        workers=settings["workers"],
        limits=limits,
        respect_meta_robots=settings["meta_robots"],
        match_mode=match,
    )


def _transport_factory(corpus_path: Optional[str]):
    if not corpus_path:
        return HttpTransport
    loaded = corpus_mod.load(corpus_path)
    return loaded.transport


# -- output ---------------------------------------------------------------------------------


def result_rows(outcome: CrawlOutcome) -> List[Dict[str, Any]]:
    rows = []
    for n, entry in enumerate(outcome.results, 1):
        counts = entry.counts.as_dict() if entry.counts else dict.fromkeys(("Nm", "Nu", "Nt", "Nh", "Nb"))
        row = {"rank": n, "t": entry.weight, **counts, "url": entry.url.text}
        rows.append({k: row[k] for k in RESULT_COLUMNS})
    return rows


def ranked_json(outcome: CrawlOutcome, query: str, seeds: Sequence[str], weights: WeightConfig) -> str:
    doc = {
        "schema": OUTPUT_SCHEMA,
        "query": query,
        "seeds": list(seeds),
        "weights": {"M": weights.meta, "U": weights.url, "T": weights.title,
                    "H": weights.heading, "B": weights.body, "threshold": weights.threshold},
        "results": result_rows(outcome),
        "stats": outcome.stats.to_json(),
    }
    return json.dumps(doc, indent=2) + "\n"


def ranked_csv(outcome: CrawlOutcome) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=RESULT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(result_rows(outcome))
    return buf.getvalue()


def ranked_table(outcome: CrawlOutcome) -> str:
    rows = result_rows(outcome)
    if not rows:
        return "no relevant pages\n"
    cells = [RESULT_COLUMNS] + [tuple("" if r[c] is None else str(r[c]) for c in RESULT_COLUMNS) for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(RESULT_COLUMNS))]
    lines = ["  ".join(c.rjust(w) if i < 7 else c for i, (c, w) in enumerate(zip(row, widths))) for row in cells]
    return "\n".join(lines) + "\n"


def _write(path: Optional[str], text: str) -> None:
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")


# -- commands -------------------------------------------------------------------------------


def cmd_crawl(args: argparse.Namespace) -> int:
    settings = resolve_settings(vars(args))
    if not settings["query"]:
        raise UsageError("a query is required (--query)")
    options = _crawl_options(settings)
    config = validate_inputs(settings["seeds"], settings["query"], **options)
    try:
        factory = _transport_factory(settings["corpus"])
    except corpus_mod.ManifestInvalid as exc:
        print(f"error: corpus unusable: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT

    outcome = crawl(config, factory())
    seeds = [s.text for s in config.seeds]
    sys.stdout.write(ranked_table(outcome))
    st = outcome.stats
    print(f"{st.pages} pages visited, {len(outcome.results)} relevant, "
          f"{st.links_admitted} links queued, {st.elapsed:.2f}s", file=sys.stderr)
    _write(settings["out_json"], ranked_json(outcome, config.query, seeds, config.weights))
    _write(settings["out_csv"], ranked_csv(outcome))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    # a suite site is crawled whole by default
    settings = resolve_settings(vars(args), defaults={**DEFAULTS, "max_pages": 500, "delay_ms": 0})
    try:
        corpus_dir, rows = corpus_mod.load_suite(args.suite)
    except corpus_mod.ManifestInvalid as exc:
        raise UsageError(str(exc)) from None
    if not rows:
        raise UsageError(f"suite {args.suite} has no rows")
    options = _crawl_options(settings)
    try:
        loaded = corpus_mod.load(settings["corpus"] or corpus_dir)
    except corpus_mod.ManifestInvalid as exc:
        print(f"error: corpus unusable: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT

    table = evaluator.compare(
        [(r.seeds, r.query) for r in rows], loaded.labels(), loaded.transport,
        names=[r.name for r in rows], **options,
    )
    text = evaluator.to_text(table)
    sys.stdout.write(text)
    _write(args.out_csv, evaluator.to_csv(table))
    _write(args.out_text, text)
    _write(args.out_json, evaluator.to_json(table))
    return EXIT_OK


def _placement(text: str):
    pairs = []
    for part in text.split(","):
        if not part.strip():
            continue
        name, _, weight = part.partition("=")
        try:
            pairs.append((name.strip(), float(weight or 1)))
        except ValueError:
            raise UsageError(f"bad placement {part!r}") from None
    return tuple(pairs)


def cmd_gencorpus(args: argparse.Namespace) -> int:
    out = Path(args.out)
    if out.exists() and any(out.iterdir()) and not args.force:
        raise UsageError(f"{out} is not empty (use --force)")
    if args.preset:
        corpus_mod.write_preset(args.preset, out)
        print(f"wrote preset {args.preset} to {out}", file=sys.stderr)
        return EXIT_OK
    spec = corpus_mod.GeneratorSpec(
        seed=args.seed, sites=args.sites, pages_per_site=args.pages, fanout=args.fanout,
        relevant_fraction=args.relevant, decoy_fraction=args.decoy,
        url_bait_fraction=args.url_bait, query=args.query,
        placement=_placement(args.placement), traps=args.traps, dead_links=args.dead_links,
    )
    generated = corpus_mod.generate(spec)
    generated.write(out)
    print(f"wrote {len(generated.entries)} entries to {out}", file=sys.stderr)
    return EXIT_OK


def _add_crawl_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON settings file")
    p.add_argument("--corpus", help="offline corpus directory (default: live HTTP)")
    p.add_argument("--max-pages", type=int)
    p.add_argument("--max-depth", type=int)
    p.add_argument("--max-pages-per-host", type=int)
    p.add_argument("--max-path-segments", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--delay-ms", type=int, help="per-host politeness gap")
    p.add_argument("--timeout", type=float)
    p.add_argument("--user-agent")
    p.add_argument("--no-robots-txt", dest="robots_txt", action="store_const", const=False)
    p.add_argument("--no-meta-robots", dest="meta_robots", action="store_const", const=False)
    p.add_argument("--match", choices=[m.value for m in MatchMode])
    for letter in "mutbh":
        p.add_argument(f"--weight-{letter}", type=int, dest=f"weight_{letter}")
    p.add_argument("--threshold", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="focuscrawl", description="Focused crawler with tag-weighted page ranking.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crawl", help="crawl from seeds and rank pages for a query")
    p.add_argument("--seed", dest="seeds", action="append", default=[], help="seed URL (repeatable)")
    p.add_argument("--query")
    p.add_argument("--out-json")
    p.add_argument("--out-csv")
    _add_crawl_flags(p)
    p.set_defaults(func=cmd_crawl)

    p = sub.add_parser("compare", help="precision of focused vs. baseline crawls over a suite")
    p.add_argument("--suite", required=True, help="suite.json listing seeds and queries")
    p.add_argument("--out-csv")
    p.add_argument("--out-text")
    p.add_argument("--out-json")
    _add_crawl_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gencorpus", help="write a synthetic or preset offline corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--preset", choices=["example", "suite", "traps"])
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--sites", type=int, default=1)
    p.add_argument("--pages", type=int, default=10)
    p.add_argument("--fanout", type=int, default=3)
    p.add_argument("--relevant", type=float, default=0.3)
    p.add_argument("--decoy", type=float, default=0.0)
    p.add_argument("--url-bait", type=float, default=0.0)
    p.add_argument("--query", default="cricket match")
    p.add_argument("--placement", default="meta=1,title=1,heading=1,body=2")
    p.add_argument("--traps", action="store_true")
    p.add_argument("--dead-links", action="store_true")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_gencorpus)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (UsageError, ValidationError, corpus_mod.InvalidSpec) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
