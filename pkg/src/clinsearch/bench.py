"""Benchmark harness: accuracy, paraphrase robustness, latency, scalability.

Experiments run against a variant, which bundles a predictor with an
optional flattening step: "default" and "hybrid" run on the ontology as
given, "flattened" and "hybrid+flattened" flatten it to the fixpoint first.
Accuracy counts a query as correct when the expected code appears in any
group of the returned result, so a family-level answer that contains the
expected specific code is correct.

Latency uses the monotonic high-resolution timer and excludes a short
warm-up. Scalability re-runs a fixed query set against pre-order prefixes
of the node list (a prefix is always ancestor-closed, hence a valid
ontology); keeping the query set fixed means the measured growth isolates
per-query cost as the dataset grows. Flattening is excluded from
scalability runs: it changes the structure being measured.

Reports append to an NDJSON file, one JSON object per line, so repeated
runs accumulate into an easily greppable log.
"""

from __future__ import annotations

import gc
import json
import math
import time
from dataclasses import dataclass, field as dataclass_field
from datetime import datetime, timezone
from pathlib import Path

from .config import SimilarityConfig
from .errors import EmptyFixture
from .flatten import flatten_to_fixpoint
from .hybrid import predict_hybrid
from .ontology import CodeNode, Ontology
from .predictor import MatchResult, predict_default, predict_scan

_DEFAULT_CONFIG = SimilarityConfig()

VARIANTS = ("default", "flattened", "hybrid", "hybrid+flattened")

SCALABILITY_FRACTIONS = (0.25, 0.5, 1.0)


@dataclass(frozen=True)
class BenchReport:
    experiment: str
    variant: str
    dataset: str
    nodes: int
    metrics: dict[str, object]
    level: int | None = None
    timestamp: str = dataclass_field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    def to_dict(self) -> dict[str, object]:
        return {
            "experiment": self.experiment,
            "variant": self.variant,
            "dataset": self.dataset,
            "nodes": self.nodes,
            "level": self.level,
            "metrics": self.metrics,
            "timestamp": self.timestamp,
        }


def append_report(report: BenchReport, path: str | Path) -> None:
    """Append one report as a single NDJSON line."""
    with open(path, "a", encoding="utf-8") as handle:
        handle.write(json.dumps(report.to_dict(), sort_keys=True) + "\n")


def prepare_variant(
    o: Ontology, variant: str, cfg: SimilarityConfig = _DEFAULT_CONFIG
):
    """Resolve a variant name to (ontology, predictor function)."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    prepared = o
    if "flattened" in variant:
        prepared, _ = flatten_to_fixpoint(o)
    predict = predict_hybrid if variant.startswith("hybrid") else predict_default
    return prepared, predict


def make_query_set(o: Ontology, level: int) -> list[tuple[str, str]]:
    """(description, expected code) pairs for every node at a depth."""
    return [(o.nodes[code].description, code) for code in o.levels.get(level, [])]


def score_accuracy(outcomes: list[tuple[str, MatchResult]]) -> float:
    """Percentage of outcomes whose expected code appears in any group."""
    if not outcomes:
        return 0.0
    correct = sum(1 for expected, result in outcomes if expected in result.codes())
    return correct / len(outcomes) * 100.0


def run_accuracy(
    o: Ontology,
    level: int,
    variant: str,
    cfg: SimilarityConfig = _DEFAULT_CONFIG,
) -> BenchReport:
    """Self-description accuracy: each node at ``level`` queried by its own text.

    The query set is built from the variant's (possibly flattened) ontology.
    For the default variant the whole-tree scan accuracy is reported
    alongside as accuracy_scan_pct, quantifying what the hierarchy
    restriction costs on this dataset.
    """
    prepared, predict = prepare_variant(o, variant, cfg)
    queries = make_query_set(prepared, level)
    outcomes = [(code, predict(text, prepared, cfg)) for text, code in queries]
    metrics: dict[str, object] = {
        "accuracy_pct": score_accuracy(outcomes),
        "n_queries": len(queries),
        "correct": sum(1 for code, result in outcomes if code in result.codes()),
    }
    if variant in ("default", "flattened"):
        scan_outcomes = [(code, predict_scan(text, prepared, cfg)) for text, code in queries]
        metrics["accuracy_scan_pct"] = score_accuracy(scan_outcomes)
    return BenchReport(
        experiment="accuracy",
        variant=variant,
        dataset=o.name,
        nodes=len(prepared),
        level=level,
        metrics=metrics,
    )


def load_paraphrases(path: str | Path) -> list[tuple[str, str]]:
    """Read a paraphrase fixture: expected_code<TAB>paraphrase per line."""
    pairs: list[tuple[str, str]] = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        code, _, text = line.partition("\t")
        if code.strip() and text.strip():
            pairs.append((code.strip(), text.strip()))
    if not pairs:
        raise EmptyFixture(f"no paraphrase rows in {path}")
    return pairs


def run_robustness(
    o: Ontology,
    fixture_path: str | Path,
    variant: str,
    cfg: SimilarityConfig = _DEFAULT_CONFIG,
) -> BenchReport:
    """Accuracy over a frozen paraphrase fixture instead of exact descriptions."""
    pairs = load_paraphrases(fixture_path)
    prepared, predict = prepare_variant(o, variant, cfg)
    outcomes = [(code, predict(text, prepared, cfg)) for code, text in pairs]
    return BenchReport(
        experiment="robustness",
        variant=variant,
        dataset=o.name,
        nodes=len(prepared),
        metrics={
            "accuracy_pct": score_accuracy(outcomes),
            "n_queries": len(pairs),
            "correct": sum(1 for code, result in outcomes if code in result.codes()),
            "fixture": str(fixture_path),
        },
    )


def run_latency(
    o: Ontology,
    query_set: list[tuple[str, str]],
    variant: str,
    cfg: SimilarityConfig = _DEFAULT_CONFIG,
    warmup: int = 3,
    repeats: int = 1,
) -> BenchReport:
    """Total and mean wall time over a query set, after a short warm-up.

    With repeats > 1 the whole set is timed that many times and the minimum
    total is reported; the minimum is the measurement least contaminated by
    scheduler and allocator noise.
    """
    prepared, predict = prepare_variant(o, variant, cfg)
    for text, _ in query_set[:warmup]:
        predict(text, prepared, cfg)
    totals: list[float] = []
    gc_was_enabled = gc.isenabled()
    gc.collect()
    gc.disable()
    try:
        for _ in range(max(1, repeats)):
            started = time.perf_counter()
            for text, _ in query_set:
                predict(text, prepared, cfg)
            totals.append(time.perf_counter() - started)
    finally:
        if gc_was_enabled:
            gc.enable()
    total_s = min(totals)
    mean_ms = (total_s / len(query_set) * 1000.0) if query_set else 0.0
    return BenchReport(
        experiment="latency",
        variant=variant,
        dataset=o.name,
        nodes=len(prepared),
        metrics={
            "total_latency_s": total_s,
            "mean_latency_ms": mean_ms,
            "n_queries": len(query_set),
        },
    )


def prefix_subset(o: Ontology, fraction: float) -> Ontology:
    """Ontology from the first ceil(fraction * N) pre-order nodes.

    Pre-order lists every ancestor before its descendants, so any prefix is
    ancestor-closed and parses as a valid ontology.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    keep = math.ceil(len(o) * fraction)
    nodes: list[CodeNode] = []
    for node in o.walk():
        if len(nodes) >= keep:
            break
        nodes.append(node)
    return Ontology(nodes, name=f"{o.name}[{fraction:g}]")


def fit_line(xs: list[float], ys: list[float]) -> tuple[float, float, float]:
    """Least-squares line fit: (slope, intercept, r_squared)."""
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    slope = sxy / sxx if sxx else 0.0
    intercept = mean_y - slope * mean_x
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    ss_tot = sum((y - mean_y) ** 2 for y in ys)
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return slope, intercept, r_squared


def run_scalability(
    o: Ontology,
    fractions: tuple[float, ...] = SCALABILITY_FRACTIONS,
    variant: str = "default",
    cfg: SimilarityConfig = _DEFAULT_CONFIG,
    query_cap: int = 40,
    warmup: int = 3,
    repeats: int = 3,
) -> BenchReport:
    """Fixed query set timed against growing pre-order prefixes.

    Queries are level-1 descriptions drawn from the smallest prefix (so
    every query is answerable at every size), capped at ``query_cap``.
    Metrics include per-fraction totals, a least-squares fit of total
    latency against node count, and the max/min latency ratio.
    """
    if "flattened" in variant:
        raise ValueError("flattening is excluded from scalability runs")
    ordered = tuple(sorted(fractions))
    smallest = prefix_subset(o, ordered[0])
    queries = make_query_set(smallest, 1)[:query_cap]
    subsets = [prefix_subset(o, fraction) for fraction in ordered]
    predicts = [prepare_variant(subset, variant, cfg)[1] for subset in subsets]
    for subset, predict in zip(subsets, predicts):
        for text, _ in queries[:warmup]:
            predict(text, subset, cfg)
    # Rounds visit every size before repeating, so slow drift (allocator or
    # CPU state) spreads across sizes instead of piling onto the largest one;
    # the per-size minimum then estimates the undisturbed cost.
    best: list[float] = [math.inf] * len(subsets)
    gc_was_enabled = gc.isenabled()
    gc.collect()
    gc.disable()
    try:
        for _ in range(max(1, repeats)):
            for position, (subset, predict) in enumerate(zip(subsets, predicts)):
                started = time.perf_counter()
                for text, _ in queries:
                    predict(text, subset, cfg)
                best[position] = min(best[position], time.perf_counter() - started)
    finally:
        if gc_was_enabled:
            gc.enable()
    sizes = [float(len(subset)) for subset in subsets]
    latencies = best
    per_fraction = {f"{fraction:g}": best[i] for i, fraction in enumerate(ordered)}
    slope, intercept, r_squared = fit_line(sizes, latencies)
    ratio = (latencies[-1] / latencies[0]) if latencies[0] > 0 else math.inf
    return BenchReport(
        experiment="scalability",
        variant=variant,
        dataset=o.name,
        nodes=len(o),
        metrics={
            "fractions": list(ordered),
            "sizes": [int(s) for s in sizes],
            "total_latency_s": per_fraction,
            "n_queries": len(queries),
            "slope_s_per_node": slope,
            "intercept_s": intercept,
            "r_squared": r_squared,
            "latency_ratio_max_min": ratio,
        },
    )
