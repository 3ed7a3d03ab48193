"""Tests for the question pipeline: interpretation, Boolean expressions,
claims loading, filter compilation, and the query engine."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clinsearch.errors import (
    EmptyQuestion,
    MalformedRow,
    MissingColumn,
    NoCodesFound,
    UnknownColumn,
    UnparseableQuestion,
)
from clinsearch.hybrid import predict_hybrid
from clinsearch.ontology import parse_ontology_text
from clinsearch.pipeline import (
    AGE_BOUNDS,
    And,
    ClaimsRow,
    ClaimsTable,
    FilterPredicate,
    Leaf,
    Not,
    Or,
    QueryEngine,
    compile_and_execute,
    compile_expr,
    compose,
    demographic_predicate,
    interpret,
    iter_leaves,
    load_claims,
    normalize,
    render_expr,
    resolve_codes,
)
from clinsearch.predictor import MatchEntry, MatchResult

from oracle_tools import naive_eval, random_expression, random_table


def frag_tuples(question):
    return [(f.text, f.kind, f.negated, f.connective) for f in interpret(question)]


class TestInterpret:
    def test_demographics_and_trailing_disease(self):
        assert frag_tuples(
            "Show me all female patients over 65 from California with type 2 diabetes"
        ) == [
            ("female", "demographic", False, "and"),
            ("over 65", "demographic", False, "and"),
            ("california", "demographic", False, "and"),
            ("type 2 diabetes", "disease", False, "and"),
        ]

    def test_verb_shell_stripped_from_disease(self):
        assert frag_tuples("Show patients who are diagnosed with Anemia") == [
            ("anemia", "disease", False, "and")
        ]

    def test_mid_phrase_with_is_preserved(self):
        assert frag_tuples("show patients with sickle cell disorder with crisis") == [
            ("sickle cell disorder with crisis", "disease", False, "and")
        ]

    def test_pre_patients_modifier_becomes_leading_fragment(self):
        assert frag_tuples("Show sepsis patients") == [("sepsis", "disease", False, "and")]

    def test_age_clause_then_disease(self):
        assert frag_tuples("patients under 50 and who have sepsis") == [
            ("under 50", "demographic", False, "and"),
            ("sepsis", "disease", False, "and"),
        ]

    def test_two_disease_fragments(self):
        assert frag_tuples(
            "Show patients diagnosed with prediabetes and undergo drug abuse counseling"
        ) == [
            ("prediabetes", "disease", False, "and"),
            ("drug abuse counseling", "disease", False, "and"),
        ]

    def test_or_connective_and_comma_negation(self):
        assert frag_tuples(
            "list patients with hypertension or heart failure, excluding male patients"
        ) == [
            ("hypertension", "disease", False, "and"),
            ("heart failure", "disease", False, "or"),
            ("male", "demographic", True, "and"),
        ]

    def test_clause_leading_negation(self):
        assert frag_tuples("patients not from Texas") == [
            ("texas", "demographic", True, "and")
        ]

    def test_negation_exposed_after_span_removal(self):
        assert frag_tuples("patients from texas without heart failure") == [
            ("texas", "demographic", False, "and"),
            ("heart failure", "disease", True, "and"),
        ]

    def test_double_negation_cancels(self):
        fragments = interpret("patients not without sepsis")
        assert [(f.text, f.negated) for f in fragments] == [("sepsis", False)]

    def test_empty_question_rejected(self):
        with pytest.raises(EmptyQuestion):
            interpret("")
        with pytest.raises(EmptyQuestion):
            interpret("?!")

    def test_all_shell_question_rejected(self):
        with pytest.raises(UnparseableQuestion):
            interpret("show me")


class TestDemographicPredicate:
    def make(self, text):
        fragments = interpret(f"patients {text}")
        assert len(fragments) == 1 and fragments[0].kind == "demographic"
        return demographic_predicate(fragments[0])

    def test_age_comparisons(self):
        assert self.make("under 50") == FilterPredicate("age", "less_than", 50)
        assert self.make("over 65") == FilterPredicate("age", "greater_than", 65)
        assert self.make("younger than 30") == FilterPredicate("age", "less_than", 30)
        assert self.make("older than 80") == FilterPredicate("age", "greater_than", 80)

    def test_age_bounds_as_closed_intervals(self):
        assert self.make("at least 40") == FilterPredicate("age", "in_range", (40, AGE_BOUNDS[1]))
        assert self.make("at most 70") == FilterPredicate("age", "in_range", (AGE_BOUNDS[0], 70))

    def test_sex_and_state(self):
        assert self.make("who are female") == FilterPredicate("sex", "equals", "female")
        assert demographic_predicate(interpret("male patients")[0]) == FilterPredicate(
            "sex", "equals", "male"
        )
        assert self.make("from new hampshire") == FilterPredicate(
            "state", "equals", "new hampshire"
        )

    def test_non_demographic_fragment_rejected(self):
        fragment = interpret("patients with sepsis")[0]
        with pytest.raises(UnparseableQuestion):
            demographic_predicate(fragment)


class TestFilterPredicate:
    def test_unknown_op_rejected(self):
        with pytest.raises(ValueError):
            FilterPredicate("age", "approximately", 50)

    def test_inverted_range_rejected(self):
        with pytest.raises(ValueError):
            FilterPredicate("age", "in_range", (70, 40))

    def test_valid_range_accepted(self):
        FilterPredicate("age", "in_range", (40, 70))


class TestRenderExpr:
    def test_leaf_formats(self):
        assert render_expr(Leaf(FilterPredicate("state", "equals", "washington"))) == (
            "state=washington"
        )
        assert render_expr(Leaf(FilterPredicate("age", "less_than", 50))) == "age<50"
        assert render_expr(Leaf(FilterPredicate("age", "greater_than", 65))) == "age>65"
        assert render_expr(Leaf(FilterPredicate("age", "in_range", (40, 150)))) == (
            "age in [40..150]"
        )
        family = frozenset({"A00", "A00.0"})
        assert render_expr(
            Leaf(FilterPredicate("diagnosis_codes", "code_in_family", family))
        ) == "diagnosis_codes in family(2 codes)"

    def test_compound_formats(self):
        a = Leaf(FilterPredicate("age", "less_than", 18))
        b = Leaf(FilterPredicate("age", "greater_than", 65))
        assert render_expr(Or((a, b))) == "OR(age<18, age>65)"
        assert render_expr(Not(a)) == "NOT(age<18)"
        assert render_expr(And((a, Not(b)))) == "AND(age<18, NOT(age>65))"


AGE_LT = Leaf(FilterPredicate("age", "less_than", 50))
AGE_GT = Leaf(FilterPredicate("age", "greater_than", 65))
WASHINGTON = Leaf(FilterPredicate("state", "equals", "washington"))


class TestNormalize:
    def test_double_negation_removed(self):
        assert normalize(Not(Not(AGE_LT))) == AGE_LT

    def test_de_morgan_over_and(self):
        got = normalize(Not(And((AGE_LT, WASHINGTON))))
        assert got == Or((Not(AGE_LT), Not(WASHINGTON)))

    def test_de_morgan_over_or(self):
        got = normalize(Not(Or((AGE_LT, WASHINGTON))))
        assert got == And((Not(AGE_LT), Not(WASHINGTON)))

    def test_nested_same_op_flattened(self):
        got = normalize(And((And((AGE_LT, WASHINGTON)), AGE_GT)))
        assert got == And((AGE_LT, WASHINGTON, AGE_GT))

    def test_singleton_collapsed(self):
        assert normalize(And((AGE_LT,))) == AGE_LT
        assert normalize(Or((WASHINGTON,))) == WASHINGTON

    def test_order_preserved(self):
        got = normalize(And((WASHINGTON, AGE_LT)))
        assert got == And((WASHINGTON, AGE_LT))

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_normalize_preserves_semantics(self, seed):
        rng = random.Random(seed)
        expr = random_expression(rng)
        table = random_table(rng, 25)
        normalized = normalize(expr)
        for row in table.rows:
            assert naive_eval(normalized, row) == naive_eval(expr, row)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_normalize_is_idempotent_and_nnf(self, seed):
        rng = random.Random(seed)
        normalized = normalize(random_expression(rng))
        assert normalize(normalized) == normalized

        def check(node, parent_op=None):
            if isinstance(node, Not):
                assert isinstance(node.child, Leaf), "NOT above a non-leaf"
            elif isinstance(node, (And, Or)):
                assert len(node.children) > 1
                assert type(node) is not parent_op, "same-op nesting survived"
                for child in node.children:
                    check(child, type(node))

        check(normalized)


def plan_text(engine_or_none, question):
    """Interpret + compose demographics only (no ontology needed)."""
    items = []
    for fragment in interpret(question):
        items.append((fragment, demographic_predicate(fragment)))
    return render_expr(normalize(compose(items)))


class TestCompose:
    def test_same_state_values_or_merge(self):
        assert plan_text(None, "patients from Washington and Oregon") == (
            "OR(state=washington, state=oregon)"
        )

    def test_distinct_columns_and_join(self):
        assert plan_text(None, "patients under 50 in Washington") == (
            "AND(age<50, state=washington)"
        )

    def test_age_interval_stays_conjunctive(self):
        assert plan_text(None, "female patients who are at least 40 and at most 70") == (
            "AND(sex=female, age in [40..150], age in [0..70])"
        )

    def test_age_alternatives_follow_or(self):
        assert plan_text(None, "patients under 18 or over 65") == "OR(age<18, age>65)"

    def test_negated_fragment_wrapped_alone(self):
        assert plan_text(None, "patients not from Texas") == "NOT(state=texas)"

    def test_mixed_negation_and_merge(self):
        got = plan_text(
            None, "female patients from Washington or Oregon, not over 80"
        )
        assert got == "AND(sex=female, OR(state=washington, state=oregon), NOT(age>80))"

    def test_empty_items_rejected(self):
        with pytest.raises(UnparseableQuestion):
            compose([])


CLAIMS_HEADER = "patient_id,state,age,sex,diagnosis_codes,drug_codes"


def write_claims(tmp_path, body, header=CLAIMS_HEADER):
    path = tmp_path / "claims.csv"
    path.write_text(header + "\n" + body)
    return path


class TestLoadClaims:
    def test_loads_and_normalizes(self, tmp_path):
        path = write_claims(
            tmp_path,
            "P1, Washington ,42,Female,a00.1|b20,RX9\n"
            "P2,oregon,7,male,,\n",
        )
        table = load_claims(path)
        assert len(table) == 2
        first, second = table.rows
        assert first == ClaimsRow("P1", "washington", 42, "female", ("A00.1", "B20"), ("RX9",))
        assert second.diagnosis_codes == () and second.drug_codes == ()

    def test_missing_column(self, tmp_path):
        path = write_claims(tmp_path, "P1,washington,42,female,\n",
                            header="patient_id,state,age,sex,diagnosis_codes")
        with pytest.raises(MissingColumn, match="drug_codes"):
            load_claims(path)

    def test_short_row_reports_line(self, tmp_path):
        path = write_claims(tmp_path, "P1,washington,42,female,A00,RX1\nP2,oregon,7\n")
        with pytest.raises(MalformedRow) as exc:
            load_claims(path)
        assert exc.value.line_number == 3
        assert "too few fields" in exc.value.reason

    def test_bad_age(self, tmp_path):
        with pytest.raises(MalformedRow, match="not an integer"):
            load_claims(write_claims(tmp_path, "P1,washington,old,female,,\n"))
        with pytest.raises(MalformedRow, match="negative age"):
            load_claims(write_claims(tmp_path, "P1,washington,-3,female,,\n"))

    def test_empty_and_duplicate_patient_id(self, tmp_path):
        with pytest.raises(MalformedRow, match="empty patient_id"):
            load_claims(write_claims(tmp_path, " ,washington,42,female,,\n"))
        with pytest.raises(MalformedRow) as exc:
            load_claims(
                write_claims(tmp_path, "P1,washington,42,female,,\nP1,oregon,7,male,,\n")
            )
        assert exc.value.line_number == 3 and "duplicate" in exc.value.reason

    def test_too_many_diagnosis_codes(self, tmp_path):
        codes = "|".join(f"C{i:02d}" for i in range(26))
        with pytest.raises(MalformedRow, match="exceeds 25"):
            load_claims(write_claims(tmp_path, f"P1,washington,42,female,{codes},\n"))

    def test_bundled_claims_load(self, claims):
        assert len(claims) == 60
        assert all(row.state == row.state.lower() for row in claims.rows)


ROWS = ClaimsTable(
    rows=(
        ClaimsRow("P1", "washington", 20, "female", ("A00", "B01.1"), ("RX1",)),
        ClaimsRow("P2", "oregon", 50, "male", ("C22",), ()),
        ClaimsRow("P3", "texas", 75, "female", (), ("RX1", "RX2")),
    )
)


class TestExecution:
    def run(self, expr):
        return [row.patient_id for row in compile_and_execute(expr, ROWS).rows]

    def test_equals_and_not_equals(self):
        assert self.run(Leaf(FilterPredicate("state", "equals", "oregon"))) == ["P2"]
        assert self.run(Leaf(FilterPredicate("sex", "not_equals", "male"))) == ["P1", "P3"]

    def test_comparisons_and_range(self):
        assert self.run(Leaf(FilterPredicate("age", "less_than", 50))) == ["P1"]
        assert self.run(Leaf(FilterPredicate("age", "greater_than", 50))) == ["P3"]
        assert self.run(Leaf(FilterPredicate("age", "in_range", (20, 50)))) == ["P1", "P2"]

    def test_code_in_family_and_contains(self):
        family = frozenset({"B01.1", "Z99"})
        assert self.run(Leaf(FilterPredicate("diagnosis_codes", "code_in_family", family))) == ["P1"]
        assert self.run(Leaf(FilterPredicate("drug_codes", "contains", "RX2"))) == ["P3"]
        assert self.run(Leaf(FilterPredicate("patient_id", "contains", "P"))) == ["P1", "P2", "P3"]

    def test_boolean_combinations(self):
        young = Leaf(FilterPredicate("age", "less_than", 60))
        female = Leaf(FilterPredicate("sex", "equals", "female"))
        assert self.run(And((young, female))) == ["P1"]
        assert self.run(Or((young, female))) == ["P1", "P2", "P3"]
        assert self.run(Not(young)) == ["P3"]

    def test_unknown_column_rejected_upfront(self):
        bad = And((AGE_LT, Leaf(FilterPredicate("postcode", "equals", "98101"))))
        with pytest.raises(UnknownColumn, match="postcode"):
            compile_expr(bad, ROWS)

    def test_result_metadata(self):
        result = compile_and_execute(Leaf(FilterPredicate("age", "less_than", 60)), ROWS)
        assert result.row_count == len(result.rows) == 2
        assert result.elapsed_ms >= 0.0

    def test_matches_reference_evaluator_on_random_inputs(self):
        rng = random.Random(404)
        for _ in range(150):
            table = random_table(rng, rng.randrange(0, 40))
            expr = random_expression(rng)
            got = compile_and_execute(expr, table)
            want = tuple(row for row in table.rows if naive_eval(expr, row))
            assert got.rows == want
            assert got.row_count == len(want)


MINI_CHAPTER_TEXT = """\
I10\t0\tessential hypertension
I10.1\t1\tbenign hypertension
J20\t0\tacute bronchitis
K55\t0\tvascular disorders of intestine
"""


class TestResolveCodes:
    def test_predictor_family_includes_descendants(self, bundled, cfg):
        family = resolve_codes("sepsis", bundled, predict_hybrid, cfg)
        assert "D89" in family
        assert family == frozenset({"D89", *bundled.descendants("D89")})

    def test_chapter_title_bypasses_predictor(self, bundled, cfg, chapter_ranges):
        def exploding_predictor(query, o, config, **kwargs):
            raise AssertionError("predictor must not run for a chapter title")

        chapter = chapter_ranges[0]
        family = resolve_codes(
            chapter.title, bundled, exploding_predictor, cfg, ranges=chapter_ranges
        )
        assert family
        assert all(chapter.contains(code) for code in family)
        assert family == frozenset(c for c in bundled.nodes if chapter.contains(c))

    def test_chapter_title_with_connective_resolves_whole_chapter(
        self, bundled, cfg, chapter_ranges
    ):
        title = "Diseases of the blood and blood-forming organs"
        family = resolve_codes(title, bundled, predict_hybrid, cfg, ranges=chapter_ranges)
        assert {"D50", "D89"} <= {code[:3] for code in family}

    def test_cache_short_circuits_predictor(self, cfg):
        o = parse_ontology_text(MINI_CHAPTER_TEXT, name="chaptered")
        calls = []

        def counting(query, ont, config, **kwargs):
            calls.append(query)
            entry = MatchEntry(code="I10", description="essential hypertension", kind="exact")
            return MatchResult(groups={1.0: [entry]}, best_score=1.0, status="found")

        cache = {}
        first = resolve_codes("hypertension", o, counting, cfg, cache=cache)
        again = resolve_codes("Hypertension!", o, counting, cfg, cache=cache)
        assert first == again == frozenset({"I10", "I10.1"})
        assert len(calls) == 1

    def test_no_codes_found(self, bundled, cfg):
        with pytest.raises(NoCodesFound):
            resolve_codes("zzzqqqxxx", bundled, predict_hybrid, cfg)


@pytest.fixture(scope="module")
def engine(bundled, cfg, claims, chapter_ranges):
    return QueryEngine(bundled, cfg, "hybrid", claims, chapter_ranges)


class TestQueryEngine:
    def test_plan_demographics(self, engine):
        fragments, expr = engine.plan("patients under 50 in Washington")
        assert [f.kind for f in fragments] == ["demographic", "demographic"]
        assert render_expr(expr) == "AND(age<50, state=washington)"

    def test_plan_disease_or_with_negation(self, engine):
        _, expr = engine.plan("patients with sepsis or fibrosis, not from texas")
        assert isinstance(expr, And) and len(expr.children) == 2
        alternatives, negation = expr.children
        assert isinstance(alternatives, Or)
        assert all(
            leaf.column == "diagnosis_codes" and leaf.op == "code_in_family"
            for leaf in iter_leaves(alternatives)
        )
        assert render_expr(negation) == "NOT(state=texas)"

    def test_ask_demographic_rows(self, engine):
        result = engine.ask("patients under 50 in Washington")
        assert result.row_count == 5
        assert [row.patient_id for row in result.rows] == [
            "P0001", "P0011", "P0021", "P0031", "P0051",
        ]
        assert result.families == {}

    def test_ask_disease_families_reported(self, engine):
        result = engine.ask("show patients with sepsis")
        assert result.families == {
            "sepsis": ("D89", "D89.0", "D89.1", "D89.2", "D89.3")
        }
        assert all(
            any(code.startswith("D89") for code in row.diagnosis_codes)
            for row in result.rows
        )

    def test_ask_chapter_title(self, engine):
        result = engine.ask("patients with neoplasms")
        assert result.row_count == 6
        assert len(result.families["neoplasms"]) == 52

    def test_ask_without_claims_rejected(self, bundled, cfg):
        engine = QueryEngine(bundled, cfg, "hybrid", claims=None)
        with pytest.raises(ValueError, match="no claims table loaded"):
            engine.ask("patients under 50")

    def test_family_cache_is_reused(self, bundled, cfg, claims):
        engine = QueryEngine(bundled, cfg, "hybrid", claims)
        engine.ask("show patients with sepsis")
        cached = engine._family_cache["sepsis"]
        engine.ask("show patients with sepsis")
        assert engine._family_cache["sepsis"] is cached
