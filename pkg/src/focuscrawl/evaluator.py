"""Precision of ranked crawl output against ground-truth labels."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .baseline import baseline_crawl
from .engine import CrawlConfig, RankedResults, crawl, validate_inputs
from .fetcher import Transport
from .urls import CanonicalUrl

FOCUSED = "focused"
BASELINE = "baseline"
CUTOFFS = (5, 10)
CSV_COLUMNS = ("query", "arm", "retained", "true_positives", "precision")

# live-web figures (baseline %, focused %) reported for the four domains
PUBLISHED_REFERENCE = (
    ("Book show", 22.14, 59.37),
    ("Book to read", 33.64, 67.53),
    ("Cricket match", 32.43, 65.87),
    ("Match making", 42.65, 69.89),
)


class MissingLabel(KeyError):
    pass


@dataclass(frozen=True)
class PrecisionReport:
    query: str
    arm: str
    retained: int
    true_positives: int
    precision: Fraction
    at_k: Dict[int, Fraction] = field(default_factory=dict)

    def as_row(self) -> dict:
        return {
            "query": self.query,
            "arm": self.arm,
            "retained": self.retained,
            "true_positives": self.true_positives,
            "precision": f"{float(self.precision):.4f}",
        }


def _ratio(hits: int, total: int) -> Fraction:
    return Fraction(hits, total) if total else Fraction(0)


def precision(
    results: RankedResults,
    labels: Mapping[CanonicalUrl, bool],
    query: str = "",
    arm: str = FOCUSED,
) -> PrecisionReport:
    """Fraction of retained results labelled relevant (0 when nothing kept).

    Precision at k divides by the number of results actually inspected,
    ``min(k, retained)``.
    """
    hits = []
    for entry in results:
        if entry.url not in labels:
            raise MissingLabel(entry.url.text)
        hits.append(bool(labels[entry.url]))
    at_k = {k: _ratio(sum(hits[:k]), min(k, len(hits))) for k in CUTOFFS}
    return PrecisionReport(
        query=query,
        arm=arm,
        retained=len(hits),
        true_positives=sum(hits),
        precision=_ratio(sum(hits), len(hits)),
        at_k=at_k,
    )


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    query: str
    seeds: Tuple[str, ...]
    baseline: PrecisionReport
    focused: PrecisionReport

    @property
    def gain(self) -> Fraction:
        return self.focused.precision - self.baseline.precision


def compare(
    rows: Sequence[Tuple[Sequence[str], str]],
    labels: Mapping[CanonicalUrl, bool],
    transport_factory: Callable[[], Transport],
    names: Optional[Sequence[str]] = None,
    **options,
) -> List[ComparisonRow]:
    """Run both arms for every ``(seeds, query)`` row.

    ``transport_factory`` is called once per arm so request logs stay
    separate; ``options`` are passed through to :func:`validate_inputs`.
    """
    table = []
    for n, (seeds, query) in enumerate(rows):
        config: CrawlConfig = validate_inputs(seeds, query, **options)
        focused = crawl(config, transport_factory())
        base = baseline_crawl(config, transport_factory())
        table.append(
            ComparisonRow(
                name=names[n] if names else str(n + 1),
                query=config.query,
                seeds=tuple(s.text for s in config.seeds),
                baseline=precision(base.results, labels, config.query, BASELINE),
                focused=precision(focused.results, labels, config.query, FOCUSED),
            )
        )
    return table


def to_csv(table: Sequence[ComparisonRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in table:
        writer.writerow(row.baseline.as_row())
        writer.writerow(row.focused.as_row())
    return buf.getvalue()


def _pct(value: Fraction) -> str:
    return f"{float(value) * 100:.2f}%"


def to_text(table: Sequence[ComparisonRow]) -> str:
    """Plain-text comparison table, one block per row, baseline column first."""
    header = ("Sr No", "Seed URL", "Query", "Baseline precision", "Focused precision")
    lines = []
    for n, row in enumerate(table, 1):
        seeds = list(row.seeds) or [""]
        lines.append((f"{n}.", seeds[0], row.query, _pct(row.baseline.precision), _pct(row.focused.precision)))
        lines.extend(("", s, "", "", "") for s in seeds[1:])
    widths = [max(len(str(c)) for c in col) for col in zip(header, *lines)] if lines else [len(h) for h in header]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    out = ["Result comparison (percentage precision)", "", fmt.format(*header),
           fmt.format(*("-" * w for w in widths))]
    out.extend(fmt.format(*line).rstrip() for line in lines)
    out.append("")
    out.append("Precision at k (baseline / focused):")
    for row in table:
        parts = [f"@{k}: {_pct(row.baseline.at_k[k])} / {_pct(row.focused.at_k[k])}" for k in CUTOFFS]
        out.append(f"  {row.query}: " + ", ".join(parts))
    out.append("")
    out.append("Reference live-web figures (not reproduced here; baseline -> focused):")
    for query, base, focused in PUBLISHED_REFERENCE:
        out.append(f"  {query}: {base:.2f}% -> {focused:.2f}%")
    return "\n".join(out) + "\n"


def to_json(table: Sequence[ComparisonRow]) -> str:
    rows = []
    for row in table:
        rows.append({
            "name": row.name,
            "query": row.query,
            "seeds": list(row.seeds),
            "arms": {
                arm: {
                    "retained": rep.retained,
                    "true_positives": rep.true_positives,
                    "precision": float(rep.precision),
                    "precision_at": {str(k): float(v) for k, v in rep.at_k.items()},
                }
                for arm, rep in ((BASELINE, row.baseline), (FOCUSED, row.focused))
            },
        })
    return json.dumps({"version": 1, "rows": rows}, indent=2, sort_keys=True) + "\n"
