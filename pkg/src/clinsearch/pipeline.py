"""Natural-language questions to Boolean filters over an in-memory claims table.

The pipeline has three stages. ``interpret`` breaks a question into ordered
fragments (demographic or disease) using a deterministic surface grammar:
strip the "show patients who are ..." shell, split clauses on commas and
and/or, detect age/sex/US-state patterns inside each clause, and treat
whatever remains as disease text. ``resolve`` turns fragments into typed
predicates: demographics map directly to column comparisons, while disease text
goes through a predictor and widens to the winning code family plus all
descendants. ``compose`` assembles one Boolean expression: alternative
values of the same demographic column become OR, different columns AND, and
disease fragments follow the question's own connectives with AND binding
tighter than OR.

Negation is recognized only at a clause boundary ("..., without asthma"):
mid-phrase "without" is common inside real code descriptions ("diabetes
without complications") and must stay part of the disease text.

Resolved code families are cached per fragment text. The cache is a plain
dict: lookups and single-key writes are atomic under the GIL, and a racing
recomputation writes the identical value, so concurrent readers need no lock.
"""

from __future__ import annotations

import csv
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, Union

from .config import SimilarityConfig
from .errors import (
    EmptyQuestion,
    MalformedRow,
    MissingColumn,
    NoCodesFound,
    UnknownColumn,
    UnparseableQuestion,
)
from .hybrid import predict_hybrid
from .ontology import ChapterRange, Ontology
from .predictor import MatchResult, predict_default, predict_scan
from .textproc import clean

_DEFAULT_CONFIG = SimilarityConfig()

MAX_DIAGNOSIS_CODES = 25

DISEASE = "disease"
DEMOGRAPHIC = "demographic"
OTHER = "other"


# --- fragments -------------------------------------------------------------

@dataclass(frozen=True)
class QueryFragment:
    text: str
    kind: str  # DISEASE, DEMOGRAPHIC or OTHER
    negated: bool = False
    connective: str = "and"  # relation to the previous fragment: "and" | "or"


US_STATES = (
    "alabama", "alaska", "arizona", "arkansas", "california", "colorado",
    "connecticut", "delaware", "florida", "georgia", "hawaii", "idaho",
    "illinois", "indiana", "iowa", "kansas", "kentucky", "louisiana", "maine",
    "maryland", "massachusetts", "michigan", "minnesota", "mississippi",
    "missouri", "montana", "nebraska", "nevada", "new hampshire", "new jersey",
    "new mexico", "new york", "north carolina", "north dakota", "ohio",
    "oklahoma", "oregon", "pennsylvania", "rhode island", "south carolina",
    "south dakota", "tennessee", "texas", "utah", "vermont", "virginia",
    "washington", "west virginia", "wisconsin", "wyoming",
)

_STATE_PATTERN = re.compile(
    r"\b(" + "|".join(sorted(US_STATES, key=len, reverse=True)) + r")\b"
)
_AGE_PATTERNS: list[tuple[re.Pattern[str], str]] = [
    (re.compile(r"\b(?:under|below|younger than)\s+(\d+)\b"), "less_than"),
    (re.compile(r"\b(?:over|above|older than)\s+(\d+)\b"), "greater_than"),
    (re.compile(r"\bat least\s+(\d+)\b"), "at_least"),
    (re.compile(r"\bat most\s+(\d+)\b"), "at_most"),
]
_FEMALE_PATTERN = re.compile(r"\b(?:females?|women|woman)\b")
_MALE_PATTERN = re.compile(r"\b(?:males?|men|man)\b")

# Age range used to express "at least"/"at most" as a closed interval.
AGE_BOUNDS = (0, 150)

_SHELL_PREFIX = re.compile(r"^(?:show|find|get|list|display)(?:\s+me)?(?:\s+all)?\b\s*")
_RELATIVE_PREFIX = re.compile(r"^(?:who\s+are|who\s+have|who|that\s+are|that\s+have)\b\s*")
_NEGATION_WORDS = frozenset({"not", "without", "excluding"})
_NEGATION_PREFIX = re.compile(r"^(?:not|without|excluding)\b\s*")
_VERB_SHELLS = (
    "diagnosed with", "suffering from", "suffers from", "suffer from",
    "treated for", "undergoing", "undergoes", "undergo", "underwent",
    "having", "have", "has", "had", "taking", "with", "on", "are", "is",
)
_EDGE_FILLER = frozenset({
    "from", "in", "at", "the", "a", "an", "who", "are", "is", "was", "were",
    "of", "on", "for", "to", "live", "lives", "living", "reside", "resides",
    "residing", "located", "state", "states", "patients", "patient",
})


def _strip_verb_shells(text: str) -> str:
    changed = True
    while changed:
        changed = False
        for shell in _VERB_SHELLS:
            if text == shell:
                return ""
            if text.startswith(shell + " "):
                text = text[len(shell) + 1 :]
                changed = True
                break
    return text


def _strip_edge_filler(tokens: list[str]) -> list[str]:
    start, end = 0, len(tokens)
    while start < end and tokens[start] in _EDGE_FILLER:
        start += 1
    while end > start and tokens[end - 1] in _EDGE_FILLER:
        end -= 1
    return tokens[start:end]


def _demographic_spans(text: str) -> list[tuple[int, int, str]]:
    """Non-overlapping (start, end, surface) demographic matches, by position."""
    spans: list[tuple[int, int, str]] = []

    def add(match: re.Match[str]) -> None:
        start, end = match.span()
        if all(end <= s or start >= e for s, e, _ in spans):
            spans.append((start, end, match.group(0)))

    for pattern, _ in _AGE_PATTERNS:
        for m in pattern.finditer(text):
            add(m)
    for m in _FEMALE_PATTERN.finditer(text):
        add(m)
    for m in _MALE_PATTERN.finditer(text):
        add(m)
    for m in _STATE_PATTERN.finditer(text):
        add(m)
    return sorted(spans)


def _clause_fragments(clause: str, connective: str) -> list[QueryFragment]:
    text = clause.strip()
    if not text:
        return []
    negated = False
    if m := _NEGATION_PREFIX.match(text):
        negated = True
        text = text[m.end() :]
    text = _strip_verb_shells(text)
    if not text:
        return []
    spans = _demographic_spans(text)
    pieces: list[tuple[int, QueryFragment]] = []
    for start, _, surface in spans:
        pieces.append((start, QueryFragment(text=surface, kind=DEMOGRAPHIC, negated=negated)))
    leftover_chars = list(text)
    for start, end, _ in spans:
        for i in range(start, end):
            leftover_chars[i] = " "
    leftover = "".join(leftover_chars)
    # Removing a demographic span can expose a new edge ("from ... with type 2
    # diabetes"), so alternate filler and shell stripping until stable.  A
    # negation word surfacing at the edge ("without heart failure") flips the
    # fragment's polarity instead of being kept as disease text.
    tokens = clean(leftover).split()
    leftover_negated = negated
    while True:
        while tokens and tokens[0] in _NEGATION_WORDS:
            leftover_negated = not leftover_negated
            tokens = tokens[1:]
        stripped = _strip_verb_shells(" ".join(_strip_edge_filler(tokens))).split()
        if stripped == tokens:
            break
        tokens = stripped
    if tokens:
        position = leftover.find(tokens[0])
        pieces.append(
            (position, QueryFragment(text=" ".join(tokens), kind=DISEASE, negated=leftover_negated))
        )
    pieces.sort(key=lambda item: item[0])
    fragments = []
    for index, (_, fragment) in enumerate(pieces):
        conn = connective if index == 0 else "and"
        fragments.append(
            QueryFragment(fragment.text, fragment.kind, fragment.negated, conn)
        )
    return fragments


def interpret(question: str) -> list[QueryFragment]:
    """Break a question into ordered, classified fragments.

    Raises EmptyQuestion when the question cleans to nothing and
    UnparseableQuestion when no fragment can be extracted from it.
    """
    if not question or not clean(question):
        raise EmptyQuestion(f"question {question!r} is empty")
    text = question.lower()
    text = re.sub(r"[^a-z0-9,\s]", " ", text)
    text = re.sub(r"\s+", " ", text).strip()
    text = _SHELL_PREFIX.sub("", text)

    clause_head: list[str] = []
    if m := re.match(r"^(.*?)\bpatients?\b\s*(.*)$", text):
        prefix, rest = m.group(1).strip(), m.group(2).strip()
        if prefix:
            clause_head.append(prefix)
        text = _RELATIVE_PREFIX.sub("", rest)

    fragments: list[QueryFragment] = []
    for head in clause_head:
        fragments.extend(_clause_fragments(head, "and"))
    connective = "and"
    for piece in re.split(r"(,|\band\b|\bor\b)", text):
        token = piece.strip()
        if not token:
            continue
        if token == ",":
            connective = "and"
        elif token in ("and", "or"):
            connective = token
        else:
            clause_fragments = _clause_fragments(token, connective)
            fragments.extend(clause_fragments)
            connective = "and"
    if not fragments:
        raise UnparseableQuestion(f"no fragments recognized in {question!r}")
    return fragments


# --- predicates and expressions ---------------------------------------------

EQUALS = "equals"
NOT_EQUALS = "not_equals"
LESS_THAN = "less_than"
GREATER_THAN = "greater_than"
IN_RANGE = "in_range"
CODE_IN_FAMILY = "code_in_family"
CONTAINS = "contains"

_OPS = {EQUALS, NOT_EQUALS, LESS_THAN, GREATER_THAN, IN_RANGE, CODE_IN_FAMILY, CONTAINS}


@dataclass(frozen=True)
class FilterPredicate:
    column: str
    op: str
    value: object

    def __post_init__(self) -> None:
        if self.op not in _OPS:
            raise ValueError(f"unknown op {self.op!r}")
        if self.op == IN_RANGE:
            low, high = self.value  # type: ignore[misc]
            if low > high:
                raise ValueError(f"in_range low {low!r} > high {high!r}")


@dataclass(frozen=True)
class Leaf:
    predicate: FilterPredicate


@dataclass(frozen=True)
class Not:
    child: "BooleanExpr"


@dataclass(frozen=True)
class And:
    children: tuple["BooleanExpr", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["BooleanExpr", ...]


BooleanExpr = Union[Leaf, Not, And, Or]


def normalize(expr: BooleanExpr) -> BooleanExpr:
    """Negation-normal form: NOT only on leaves, same-op nesting flattened,
    single-child AND/OR collapsed. Child order is preserved."""
    if isinstance(expr, Leaf):
        return expr
    if isinstance(expr, Not):
        inner = expr.child
        if isinstance(inner, Leaf):
            return expr
        if isinstance(inner, Not):
            return normalize(inner.child)
        if isinstance(inner, And):
            return normalize(Or(tuple(Not(c) for c in inner.children)))
        return normalize(And(tuple(Not(c) for c in inner.children)))
    op = type(expr)
    flat: list[BooleanExpr] = []
    for child in expr.children:
        norm = normalize(child)
        if isinstance(norm, op):
            flat.extend(norm.children)
        else:
            flat.append(norm)
    if len(flat) == 1:
        return flat[0]
    return op(tuple(flat))


def iter_leaves(expr: BooleanExpr) -> Iterator[FilterPredicate]:
    if isinstance(expr, Leaf):
        yield expr.predicate
    elif isinstance(expr, Not):
        yield from iter_leaves(expr.child)
    else:
        for child in expr.children:
            yield from iter_leaves(child)


def render_expr(expr: BooleanExpr) -> str:
    """Human-readable rendering used by the CLI and the HTTP layer."""
    if isinstance(expr, Leaf):
        p = expr.predicate
        if p.op == EQUALS:
            return f"{p.column}={p.value}"
        if p.op == NOT_EQUALS:
            return f"{p.column}!={p.value}"
        if p.op == LESS_THAN:
            return f"{p.column}<{p.value}"
        if p.op == GREATER_THAN:
            return f"{p.column}>{p.value}"
        if p.op == IN_RANGE:
            low, high = p.value  # type: ignore[misc]
            return f"{p.column} in [{low}..{high}]"
        if p.op == CODE_IN_FAMILY:
            return f"{p.column} in family({len(p.value)} codes)"  # type: ignore[arg-type]
        return f"{p.column} contains {p.value}"
    if isinstance(expr, Not):
        return f"NOT({render_expr(expr.child)})"
    name = "AND" if isinstance(expr, And) else "OR"
    return f"{name}({', '.join(render_expr(c) for c in expr.children)})"


def demographic_predicate(fragment: QueryFragment) -> FilterPredicate:
    """Map a demographic fragment's surface text to a column predicate."""
    text = fragment.text
    for pattern, op in _AGE_PATTERNS:
        if m := pattern.search(text):
            value = int(m.group(1))
            if op == "at_least":
                return FilterPredicate("age", IN_RANGE, (value, AGE_BOUNDS[1]))
            if op == "at_most":
                return FilterPredicate("age", IN_RANGE, (AGE_BOUNDS[0], value))
            return FilterPredicate("age", op, value)
    if _FEMALE_PATTERN.search(text):
        return FilterPredicate("sex", EQUALS, "female")
    if _MALE_PATTERN.search(text):
        return FilterPredicate("sex", EQUALS, "male")
    if m := _STATE_PATTERN.search(text):
        return FilterPredicate("state", EQUALS, m.group(1))
    raise UnparseableQuestion(f"unrecognized demographic fragment {fragment.text!r}")


Predictor = Callable[[str, Ontology, SimilarityConfig], MatchResult]

PREDICTORS: dict[str, Predictor] = {
    "default": predict_default,
    "hybrid": predict_hybrid,
    "scan": predict_scan,
}


def resolve_codes(
    text: str,
    o: Ontology,
    predict: Predictor,
    cfg: SimilarityConfig = _DEFAULT_CONFIG,
    ranges: list[ChapterRange] | None = None,
    cache: dict[str, frozenset[str]] | None = None,
) -> frozenset[str]:
    """Resolve disease text to a code family: winning group plus descendants.

    A fragment exactly matching a chapter title (when ranges are loaded)
    resolves to every code whose category prefix falls inside the chapter
    instead of going through the predictor. Raises NoCodesFound when nothing
    resolves.
    """
    key = clean(text)
    if cache is not None and key in cache:
        return cache[key]
    family: set[str] = set()
    if ranges:
        for chapter in ranges:
            if clean(chapter.title) == key:
                family.update(code for code in o.nodes if chapter.contains(code))
    if not family:
        result = predict(text, o, cfg)
        for code in result.codes():
            family.add(code)
            family.update(o.descendants(code))
    if not family:
        raise NoCodesFound(f"no codes found for {text!r}")
    resolved = frozenset(family)
    if cache is not None:
        cache[key] = resolved
    return resolved


def _chunk_by_connective(seq: list[tuple[str, BooleanExpr]]) -> BooleanExpr:
    """Fold a connective-tagged sequence with AND binding tighter than OR."""
    chunks: list[list[BooleanExpr]] = [[]]
    for position, (connective, expr) in enumerate(seq):
        if connective == "or" and position > 0:
            chunks.append([])
        chunks[-1].append(expr)
    and_chunks = [c[0] if len(c) == 1 else And(tuple(c)) for c in chunks]
    return and_chunks[0] if len(and_chunks) == 1 else Or(tuple(and_chunks))


def compose(items: list[tuple[QueryFragment, FilterPredicate]]) -> BooleanExpr:
    """Assemble fragment predicates into one Boolean expression.

    Alternative values of one categorical column (state, sex) merge into OR,
    since a row holds exactly one value there. Age comparisons and disease
    predicates follow the question's connectives, with AND binding tighter
    than OR. Distinct parts are joined by AND; negated fragments are wrapped
    in NOT individually.
    """
    if not items:
        raise UnparseableQuestion("no fragments to compose")
    demo_buckets: dict[str, list[BooleanExpr]] = {}
    bucket_order: dict[str, int] = {}
    disease_seq: list[tuple[str, BooleanExpr]] = []
    range_seq: list[tuple[str, BooleanExpr]] = []
    solo: list[tuple[int, BooleanExpr]] = []
    disease_position: int | None = None
    range_position: int | None = None
    for index, (fragment, predicate) in enumerate(items):
        leaf: BooleanExpr = Leaf(predicate)
        if fragment.negated:
            leaf = Not(leaf)
        if predicate.op == CODE_IN_FAMILY:
            disease_seq.append((fragment.connective, leaf))
            if disease_position is None:
                disease_position = index
        elif fragment.negated:
            solo.append((index, leaf))
        elif predicate.op == EQUALS:
            demo_buckets.setdefault(predicate.column, []).append(leaf)
            bucket_order.setdefault(predicate.column, index)
        else:
            range_seq.append((fragment.connective, leaf))
            if range_position is None:
                range_position = index

    parts: list[tuple[int, BooleanExpr]] = []
    for column, exprs in demo_buckets.items():
        merged = exprs[0] if len(exprs) == 1 else Or(tuple(exprs))
        parts.append((bucket_order[column], merged))
    if range_seq:
        assert range_position is not None
        parts.append((range_position, _chunk_by_connective(range_seq)))
    if disease_seq:
        assert disease_position is not None
        parts.append((disease_position, _chunk_by_connective(disease_seq)))
    parts.extend(solo)
    parts.sort(key=lambda item: item[0])
    exprs = [expr for _, expr in parts]
    return exprs[0] if len(exprs) == 1 else And(tuple(exprs))


# --- claims table -----------------------------------------------------------

CLAIMS_COLUMNS: tuple[tuple[str, str], ...] = (
    ("patient_id", "str"),
    ("state", "str"),
    ("age", "int"),
    ("sex", "str"),
    ("diagnosis_codes", "codes"),
    ("drug_codes", "codes"),
)


@dataclass(frozen=True)
class ClaimsRow:
    patient_id: str
    state: str
    age: int
    sex: str
    diagnosis_codes: tuple[str, ...]
    drug_codes: tuple[str, ...]


@dataclass(frozen=True)
class ClaimsTable:
    rows: tuple[ClaimsRow, ...]
    columns: tuple[tuple[str, str], ...] = CLAIMS_COLUMNS

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def column_names(self) -> frozenset[str]:
        return frozenset(name for name, _ in self.columns)


def _parse_codes(raw: str) -> tuple[str, ...]:
    return tuple(part.strip().upper() for part in raw.split("|") if part.strip())


def load_claims(path: str | Path) -> ClaimsTable:
    """Read a claims CSV; state/sex are normalized to lowercase and code
    lists are |-separated and uppercased.

    Raises MissingColumn for a bad header and MalformedRow (with the 1-based
    file line number) for short rows, non-integer or negative ages, more
    than 25 diagnosis codes, or duplicate patient ids.
    """
    required = {name for name, _ in CLAIMS_COLUMNS}
    rows: list[ClaimsRow] = []
    seen_ids: set[str] = set()
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = set(reader.fieldnames or [])
        missing = required - header
        if missing:
            raise MissingColumn(f"claims file lacks column(s): {', '.join(sorted(missing))}")
        for record in reader:
            line = reader.line_num
            if any(record.get(name) is None for name in required):
                raise MalformedRow(line, "too few fields")
            patient_id = record["patient_id"].strip()
            if not patient_id:
                raise MalformedRow(line, "empty patient_id")
            if patient_id in seen_ids:
                raise MalformedRow(line, f"duplicate patient_id {patient_id!r}")
            try:
                age = int(record["age"].strip())
            except ValueError:
                raise MalformedRow(line, f"age {record['age']!r} is not an integer") from None
            if age < 0:
                raise MalformedRow(line, f"negative age {age}")
            diagnosis = _parse_codes(record["diagnosis_codes"])
            if len(diagnosis) > MAX_DIAGNOSIS_CODES:
                raise MalformedRow(line, f"{len(diagnosis)} diagnosis codes exceeds {MAX_DIAGNOSIS_CODES}")
            rows.append(
                ClaimsRow(
                    patient_id=patient_id,
                    state=record["state"].strip().lower(),
                    age=age,
                    sex=record["sex"].strip().lower(),
                    diagnosis_codes=diagnosis,
                    drug_codes=_parse_codes(record["drug_codes"]),
                )
            )
            seen_ids.add(patient_id)
    return ClaimsTable(rows=tuple(rows))


# --- execution ---------------------------------------------------------------

@dataclass(frozen=True)
class QueryResult:
    rows: tuple[ClaimsRow, ...]
    families: dict[str, tuple[str, ...]]
    row_count: int
    elapsed_ms: float
    expression: BooleanExpr


def _leaf_test(predicate: FilterPredicate) -> Callable[[ClaimsRow], bool]:
    column, op, value = predicate.column, predicate.op, predicate.value
    if op == CODE_IN_FAMILY:
        family = value if isinstance(value, frozenset) else frozenset(value)  # type: ignore[arg-type]
        return lambda row: any(code in family for code in row.diagnosis_codes)
    if op == EQUALS:
        return lambda row: getattr(row, column) == value
    if op == NOT_EQUALS:
        return lambda row: getattr(row, column) != value
    if op == LESS_THAN:
        return lambda row: getattr(row, column) < value  # type: ignore[operator]
    if op == GREATER_THAN:
        return lambda row: getattr(row, column) > value  # type: ignore[operator]
    if op == IN_RANGE:
        low, high = value  # type: ignore[misc]
        return lambda row: low <= getattr(row, column) <= high
    # CONTAINS: membership for code-list columns, substring for text columns
    def contains(row: ClaimsRow) -> bool:
        cell = getattr(row, column)
        if isinstance(cell, tuple):
            return value in cell
        return str(value) in str(cell)

    return contains


def compile_expr(expr: BooleanExpr, table: ClaimsTable) -> Callable[[ClaimsRow], bool]:
    """Compile an expression into one row-level closure.

    Raises UnknownColumn before execution when any leaf references a column
    the table does not have.
    """
    for predicate in iter_leaves(expr):
        if predicate.column not in table.column_names:
            raise UnknownColumn(f"unknown column {predicate.column!r}")

    def build(node: BooleanExpr) -> Callable[[ClaimsRow], bool]:
        if isinstance(node, Leaf):
            return _leaf_test(node.predicate)
        if isinstance(node, Not):
            inner = build(node.child)
            return lambda row: not inner(row)
        tests = [build(child) for child in node.children]
        if isinstance(node, And):
            return lambda row: all(test(row) for test in tests)
        return lambda row: any(test(row) for test in tests)

    return build(expr)


def compile_and_execute(expr: BooleanExpr, table: ClaimsTable) -> QueryResult:
    """Compile once, evaluate per row, return matching rows in table order."""
    started = time.perf_counter()
    test = compile_expr(expr, table)
    matched = tuple(row for row in table.rows if test(row))
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    return QueryResult(
        rows=matched,
        families={},
        row_count=len(matched),
        elapsed_ms=elapsed_ms,
        expression=expr,
    )


class QueryEngine:
    """Load-once façade: ontology + optional claims, predictor, family cache."""

    def __init__(
        self,
        ontology: Ontology,
        cfg: SimilarityConfig = _DEFAULT_CONFIG,
        predictor: str | Predictor = "hybrid",
        claims: ClaimsTable | None = None,
        ranges: list[ChapterRange] | None = None,
    ):
        self.ontology = ontology
        self.cfg = cfg
        self.predict: Predictor = (
            PREDICTORS[predictor] if isinstance(predictor, str) else predictor
        )
        self.claims = claims
        self.ranges = ranges
        self._family_cache: dict[str, frozenset[str]] = {}

    def resolve(self, text: str) -> frozenset[str]:
        return resolve_codes(
            text, self.ontology, self.predict, self.cfg, self.ranges, self._family_cache
        )

    def plan(self, question: str) -> tuple[list[QueryFragment], BooleanExpr]:
        """Interpret and compose without executing; the expression is normalized."""
        fragments = interpret(question)
        items: list[tuple[QueryFragment, FilterPredicate]] = []
        for fragment in fragments:
            if fragment.kind == DEMOGRAPHIC:
                items.append((fragment, demographic_predicate(fragment)))
            else:
                family = self.resolve(fragment.text)
                items.append(
                    (fragment, FilterPredicate("diagnosis_codes", CODE_IN_FAMILY, family))
                )
        return fragments, normalize(compose(items))

    def ask(self, question: str) -> QueryResult:
        """Full pipeline: interpret, resolve, compose, execute."""
        if self.claims is None:
            raise ValueError("no claims table loaded")
        fragments, expr = self.plan(question)
        result = compile_and_execute(expr, self.claims)
        families = {
            fragment.text: tuple(sorted(self._family_cache.get(clean(fragment.text), ())))
            for fragment in fragments
            if fragment.kind == DISEASE
        }
        return QueryResult(
            rows=result.rows,
            families=families,
            row_count=result.row_count,
            elapsed_ms=result.elapsed_ms,
            expression=expr,
        )
