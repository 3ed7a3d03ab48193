"""Baseline predictors: top-down traversal and whole-tree scan.

predict_default walks the hierarchy level by level. At each level the
frontier is scored (exact token intersection first; approximate string
similarity only when the whole level has no exact match), every matching
node is recorded, and the walk continues into the children of the matching
nodes only. Subtrees whose ancestors never match are therefore never
examined: a child phrased with vocabulary disjoint from its parent is
invisible to this predictor, which is the failure mode hierarchy flattening
and token promotion exist to repair.

predict_scan ignores the hierarchy and scores every node, which makes it the
natural reference point when measuring what the traversal restriction costs.

Scores are grouped under a rounded key (9 decimals) so that float summation
noise cannot split a genuine tie, and weighted sums run over sorted tokens
so identical inputs produce bit-identical scores across processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import SimilarityConfig
from .errors import EmptyQuery
from .ontology import CodeNode, Ontology
from .textproc import TokenSet, approx_similarity, clean, tokenize

EXACT = "exact"
APPROXIMATE = "approximate"

_DEFAULT_CONFIG = SimilarityConfig()


def score_key(score: float) -> float:
    """Grouping/comparison key for scores; absorbs float summation noise."""
    return round(score, 9)


def weighted_overlap(query: TokenSet, desc: TokenSet) -> float:
    """exact_score with a deterministic summation order."""
    return sum(desc.weights[t] for t in sorted(query.tokens & desc.tokens))


@dataclass(frozen=True)
class MatchEntry:
    code: str
    description: str
    kind: str  # EXACT or APPROXIMATE


@dataclass(frozen=True)
class MatchResult:
    """Outcome of one prediction: score groups, best score, found/not_found.

    groups maps a score key to the entries tied at that score, codes sorted
    lexicographically. Predictors return only the winning group(s); an empty
    groups dict is synonymous with status "not_found".
    """

    groups: dict[float, list[MatchEntry]] = field(default_factory=dict)
    best_score: float | None = None
    status: str = "not_found"

    @property
    def found(self) -> bool:
        return self.status == "found"

    def codes(self) -> set[str]:
        return {entry.code for entries in self.groups.values() for entry in entries}

    @staticmethod
    def not_found() -> "MatchResult":
        return MatchResult(groups={}, best_score=None, status="not_found")


def _prepare_query(query: str, cfg: SimilarityConfig) -> tuple[str, TokenSet]:
    cleaned = clean(query)
    if not cleaned:
        raise EmptyQuery(f"query {query!r} cleaned to the empty string")
    return cleaned, tokenize(cleaned, cfg)


def match_level(
    q_tokens: TokenSet,
    q_cleaned: str,
    nodes: list[CodeNode],
    cfg: SimilarityConfig,
) -> list[tuple[CodeNode, float, str]]:
    """Score one candidate set: exact phase, approximate fallback.

    The fallback triggers only when no candidate in the set has a positive
    exact score, so the two score regimes never compete inside one set.
    """
    exact = [
        (node, score, EXACT)
        for node in nodes
        if (score := weighted_overlap(q_tokens, node.tokens)) > 0
    ]
    if exact:
        return exact
    approximate = []
    for node in nodes:
        sim = approx_similarity(q_cleaned, clean(node.description), cfg)
        if sim is not None:
            approximate.append((node, sim, APPROXIMATE))
    return approximate


def _best_group(collected: list[tuple[CodeNode, float, str]]) -> MatchResult:
    """Reduce scored nodes to the winning group; exact entries dominate."""
    if not collected:
        return MatchResult.not_found()
    exact = [item for item in collected if item[2] == EXACT]
    pool = exact if exact else collected
    best = max(score_key(score) for _, score, _ in pool)
    winners = sorted(
        ((node, kind) for node, score, kind in pool if score_key(score) == best),
        key=lambda item: item[0].code,
    )
    entries = [MatchEntry(code=n.code, description=n.description, kind=k) for n, k in winners]
    return MatchResult(groups={best: entries}, best_score=best, status="found")


def predict_default(query: str, o: Ontology, cfg: SimilarityConfig = _DEFAULT_CONFIG) -> MatchResult:
    """Hierarchical search: descend through matching nodes, return the best group.

    Raises EmptyQuery when the query cleans to nothing. A query matching no
    root (exactly or approximately) yields not_found even if some deep node
    would have matched: entry into a subtree requires its ancestors to match.
    """
    q_cleaned, q_tokens = _prepare_query(query, cfg)
    collected: list[tuple[CodeNode, float, str]] = []
    frontier = [o.nodes[code] for code in o.roots()]
    while frontier:
        matched = match_level(q_tokens, q_cleaned, frontier, cfg)
        collected.extend(matched)
        frontier = [
            o.nodes[child]
            for node, _, _ in matched
            for child in o.children[node.code]
        ]
    return _best_group(collected)


def predict_scan(query: str, o: Ontology, cfg: SimilarityConfig = _DEFAULT_CONFIG) -> MatchResult:
    """Whole-tree variant: every node is scored regardless of its ancestors."""
    q_cleaned, q_tokens = _prepare_query(query, cfg)
    return _best_group(match_level(q_tokens, q_cleaned, list(o.walk()), cfg))


def promote_tokens(o: Ontology, cfg: SimilarityConfig = _DEFAULT_CONFIG) -> Ontology:
    """Copy the ontology, augmenting each root's token set with its direct
    children's tokens at the configured promotion weight.

    Descriptions are untouched, so persisting a promoted ontology drops the
    promoted tokens by design. Idempotent: a second application finds nothing
    left to add.
    """
    replaced: dict[str, CodeNode] = {}
    for code in o.roots():
        root = o.nodes[code]
        extra: dict[str, float] = {}
        for child_code in o.children[code]:
            for token in sorted(o.nodes[child_code].tokens.tokens):
                if token not in root.tokens.tokens and token not in extra:
                    extra[token] = cfg.promotion_weight
        if extra:
            replaced[code] = CodeNode(
                code=root.code,
                depth=root.depth,
                description=root.description,
                parent=root.parent,
                tokens=root.tokens.with_extra(extra),
            )
    if not replaced:
        return o
    return Ontology((replaced.get(n.code, n) for n in o.walk()), name=o.name)
