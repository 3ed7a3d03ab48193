"""Tests for the benchmark harness: variants, accuracy scoring, robustness
fixtures, latency, prefix subsets, line fitting, and report output."""

import json
import math
from datetime import datetime

import pytest

from clinsearch.bench import (
    SCALABILITY_FRACTIONS,
    VARIANTS,
    BenchReport,
    append_report,
    fit_line,
    load_paraphrases,
    make_query_set,
    prefix_subset,
    prepare_variant,
    run_accuracy,
    run_latency,
    run_robustness,
    run_scalability,
    score_accuracy,
)
from clinsearch.errors import EmptyFixture
from clinsearch.hybrid import predict_hybrid
from clinsearch.predictor import MatchEntry, MatchResult, predict_default
from clinsearch.synthetic import make_synthetic_ontology


def result_for(*codes):
    entries = [MatchEntry(code=c, description="", kind="exact") for c in codes]
    if not entries:
        return MatchResult.not_found()
    return MatchResult(groups={1.0: entries}, best_score=1.0, status="found")


class TestPrepareVariant:
    def test_variant_names(self):
        assert VARIANTS == ("default", "flattened", "hybrid", "hybrid+flattened")

    def test_default_keeps_ontology_and_uses_top_down(self, bundled):
        prepared, predict = prepare_variant(bundled, "default")
        assert prepared is bundled
        assert predict is predict_default

    def test_hybrid_flattened_flattens_first(self, bundled, bundled_flat):
        prepared, predict = prepare_variant(bundled, "hybrid+flattened")
        assert predict is predict_hybrid
        assert prepared == bundled_flat
        assert prepared is not bundled

    def test_unknown_variant_rejected(self, bundled):
        with pytest.raises(ValueError, match="unknown variant"):
            prepare_variant(bundled, "quantum")


class TestScoring:
    def test_make_query_set_lists_level_descriptions(self, mini):
        queries = make_query_set(mini, 0)
        assert ("pain in throat and chest", "R07") in queries
        assert len(queries) == len(mini.levels[0])
        assert make_query_set(mini, 99) == []

    def test_score_accuracy_counts_family_membership(self):
        outcomes = [
            ("A00", result_for("A00")),
            ("B11", result_for("B10", "B11")),
            ("C22", result_for("C99")),
            ("D33", MatchResult.not_found()),
        ]
        assert score_accuracy(outcomes) == pytest.approx(50.0)
        assert score_accuracy([]) == 0.0


class TestAccuracy:
    def test_default_level1_on_bundled(self, bundled):
        report = run_accuracy(bundled, level=1, variant="default")
        assert report.experiment == "accuracy"
        assert report.variant == "default"
        assert report.level == 1
        assert report.nodes == len(bundled)
        assert report.metrics["n_queries"] == len(bundled.levels[1]) == 512
        assert report.metrics["correct"] == 416
        assert report.metrics["accuracy_pct"] == pytest.approx(81.25)
        # The whole-tree scan has no hierarchy restriction, so it recovers
        # every node from its own description.
        assert report.metrics["accuracy_scan_pct"] == pytest.approx(100.0)

    def test_hybrid_flattened_level1_is_perfect(self, bundled):
        report = run_accuracy(bundled, level=1, variant="hybrid+flattened")
        assert report.metrics["accuracy_pct"] == pytest.approx(100.0)
        assert "accuracy_scan_pct" not in report.metrics
        assert report.nodes == len(bundled)

    def test_level_zero_is_perfect_for_default(self, bundled):
        report = run_accuracy(bundled, level=0, variant="default")
        assert report.metrics["accuracy_pct"] == pytest.approx(100.0)


class TestRobustness:
    def test_load_paraphrases_skips_comments_and_blanks(self, tmp_path):
        path = tmp_path / "fixture.tsv"
        path.write_text("# code\tparaphrase\n\nA00\tcholera words\nB11\t shifted text \n")
        assert load_paraphrases(path) == [
            ("A00", "cholera words"),
            ("B11", "shifted text"),
        ]

    def test_empty_fixture_rejected(self, tmp_path):
        path = tmp_path / "empty.tsv"
        path.write_text("# only a comment\n")
        with pytest.raises(EmptyFixture):
            load_paraphrases(path)

    def test_bundled_fixture_has_100_rows(self, paraphrases_path, bundled):
        pairs = load_paraphrases(paraphrases_path)
        assert len(pairs) == 100
        assert all(code in bundled.nodes for code, _ in pairs)

    def test_robustness_ordering_on_bundled(self, bundled, paraphrases_path):
        by_variant = {
            variant: run_robustness(bundled, paraphrases_path, variant).metrics[
                "accuracy_pct"
            ]
            for variant in ("default", "hybrid", "hybrid+flattened")
        }
        assert by_variant["default"] == pytest.approx(60.0)
        assert by_variant["hybrid"] == pytest.approx(90.0)
        assert by_variant["hybrid+flattened"] == pytest.approx(90.0)
        assert (
            by_variant["hybrid+flattened"]
            >= by_variant["hybrid"]
            > by_variant["default"]
        )

    def test_report_carries_fixture_path(self, bundled, paraphrases_path):
        report = run_robustness(bundled, paraphrases_path, "default")
        assert report.experiment == "robustness"
        assert report.metrics["fixture"] == str(paraphrases_path)
        assert report.metrics["n_queries"] == 100


class TestLatency:
    def test_metrics_shape(self, mini):
        queries = make_query_set(mini, 1)
        report = run_latency(mini, queries, "hybrid", warmup=2)
        assert report.experiment == "latency"
        assert report.metrics["n_queries"] == len(queries)
        total = report.metrics["total_latency_s"]
        mean = report.metrics["mean_latency_ms"]
        assert total > 0.0
        assert mean == pytest.approx(total / len(queries) * 1000.0)

    def test_empty_query_set(self, mini):
        report = run_latency(mini, [], "default")
        assert report.metrics["mean_latency_ms"] == 0.0


class TestPrefixSubset:
    def test_preorder_prefix_is_ancestor_closed(self, bundled):
        subset = prefix_subset(bundled, 0.5)
        assert len(subset) == math.ceil(len(bundled) * 0.5) == 416
        walked = [node.code for node in bundled.walk()]
        assert [node.code for node in subset.walk()] == walked[:416]
        for node in subset.walk():
            assert node.parent is None or node.parent in subset.nodes
        assert subset.name == f"{bundled.name}[0.5]"

    def test_full_fraction_keeps_everything(self, bundled):
        subset = prefix_subset(bundled, 1.0)
        assert len(subset) == len(bundled)
        assert [n.code for n in subset.walk()] == [n.code for n in bundled.walk()]

    def test_fraction_bounds(self, bundled):
        for bad in (0.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                prefix_subset(bundled, bad)


class TestFitLine:
    def test_exact_line(self):
        slope, intercept, r_squared = fit_line([1.0, 2.0, 3.0], [3.0, 5.0, 7.0])
        assert slope == pytest.approx(2.0)
        assert intercept == pytest.approx(1.0)
        assert r_squared == pytest.approx(1.0)

    def test_constant_series(self):
        slope, _, r_squared = fit_line([1.0, 2.0, 3.0], [4.0, 4.0, 4.0])
        assert slope == pytest.approx(0.0)
        assert r_squared == pytest.approx(1.0)

    def test_noise_lowers_r_squared(self):
        _, _, r_squared = fit_line([1.0, 2.0, 3.0, 4.0], [1.0, 9.0, 2.0, 8.0])
        assert r_squared < 0.9


class TestScalability:
    def test_flattened_variants_rejected(self, bundled):
        for variant in ("flattened", "hybrid+flattened"):
            with pytest.raises(ValueError, match="excluded"):
                run_scalability(bundled, variant=variant)

    def test_metrics_on_small_synthetic(self):
        o = make_synthetic_ontology(400, seed=3)
        report = run_scalability(o, variant="default", query_cap=10, warmup=1)
        metrics = report.metrics
        assert report.experiment == "scalability"
        assert metrics["fractions"] == list(SCALABILITY_FRACTIONS)
        assert metrics["sizes"] == [100, 200, 400]
        assert set(metrics["total_latency_s"]) == {"0.25", "0.5", "1"}
        assert metrics["n_queries"] == 10
        assert metrics["latency_ratio_max_min"] > 1.0
        assert 0.0 <= metrics["r_squared"] <= 1.0
        assert all(v > 0.0 for v in metrics["total_latency_s"].values())


class TestReports:
    def test_to_dict_keys_and_timestamp(self):
        report = BenchReport(
            experiment="accuracy", variant="default", dataset="mini", nodes=7,
            metrics={"accuracy_pct": 50.0},
        )
        payload = report.to_dict()
        assert sorted(payload) == [
            "dataset", "experiment", "level", "metrics", "nodes", "timestamp", "variant",
        ]
        assert payload["level"] is None
        datetime.fromisoformat(payload["timestamp"])

    def test_append_report_is_ndjson(self, tmp_path):
        path = tmp_path / "runs.ndjson"
        first = BenchReport("latency", "hybrid", "mini", 7, {"total_latency_s": 0.5})
        second = BenchReport("accuracy", "default", "mini", 7, {"accuracy_pct": 100.0}, level=1)
        append_report(first, path)
        append_report(second, path)
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        decoded = [json.loads(line) for line in lines]
        assert decoded[0]["experiment"] == "latency"
        assert decoded[1]["metrics"]["accuracy_pct"] == 100.0
        assert decoded[1]["level"] == 1
