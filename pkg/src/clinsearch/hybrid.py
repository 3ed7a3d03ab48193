"""Hybrid predictor: greedy hierarchical descent cross-checked by a flat scan.

descend is the strict version of the hierarchical search: it keeps a single
running best, advances only while a level strictly improves on it, and
restricts each level to the children of the previous level's best-tied
nodes. That makes it fast but blind to good matches outside the greedy path.
flat_scan visits every node once in a seed-determined permutation and keeps
the best score outright. The hybrid takes the flat winner only when it
strictly beats the descent winner, then expands the winning node into its
whole descendant family, so a caller searching for a category retrieves the
specific codes beneath it in the same result.

Ties are broken identically everywhere: smaller depth first, then the
lexicographically smaller code. Because the tie-break is total, flat_scan's
answer is independent of the permutation seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .config import SimilarityConfig
from .ontology import CodeNode, Ontology
from .predictor import (
    MatchEntry,
    MatchResult,
    _prepare_query,
    match_level,
    score_key,
)

_DEFAULT_CONFIG = SimilarityConfig()


@dataclass(frozen=True)
class ScoredNode:
    code: str
    score: float
    kind: str
    depth: int

    def beats(self, other: "ScoredNode | None") -> bool:
        if other is None:
            return True
        return score_key(self.score) > score_key(other.score)


def _pick_winner(scored: list[tuple[CodeNode, float, str]]) -> ScoredNode:
    """Highest score; ties to the shallower node, then the smaller code."""
    node, score, kind = min(
        scored, key=lambda item: (-score_key(item[1]), item[0].depth, item[0].code)
    )
    return ScoredNode(code=node.code, score=score_key(score), kind=kind, depth=node.depth)


def descend(
    query: str, o: Ontology, cfg: SimilarityConfig = _DEFAULT_CONFIG
) -> tuple[ScoredNode | None, list[str]]:
    """Level-by-level greedy search.

    Starts from all roots (no prior matches to restrict by). After a level
    is scored, the best match is updated only on strict improvement and all
    nodes tied at the level's best score become the next frontier; anything
    else ends the walk. Returns the best match (or None) and the path of
    per-level winners in the order they improved the running best.
    """
    q_cleaned, q_tokens = _prepare_query(query, cfg)
    best: ScoredNode | None = None
    path: list[str] = []
    frontier: list[CodeNode] = []
    for level in range(o.max_depth() + 1):
        if frontier:
            candidates = [o.nodes[c] for node in frontier for c in o.children[node.code]]
        else:
            candidates = [o.nodes[c] for c in o.levels.get(level, [])]
        if not candidates:
            break
        scored = match_level(q_tokens, q_cleaned, candidates, cfg)
        if not scored:
            break
        level_best = _pick_winner(scored)
        if not level_best.beats(best):
            break
        best = level_best
        path.append(level_best.code)
        frontier = [
            node for node, score, _ in scored if score_key(score) == level_best.score
        ]
    return best, path


def flat_scan(
    query: str,
    o: Ontology,
    cfg: SimilarityConfig = _DEFAULT_CONFIG,
    order_seed: int = 0,
) -> ScoredNode | None:
    """Score every node once, visiting in a seeded shuffle of pre-order.

    The exact phase runs over the whole permutation; the approximate phase
    runs only when no node anywhere matched exactly, mirroring the global
    fallback of the baseline predictors. The total tie-break makes the
    result a pure function of (query, ontology, config).
    """
    q_cleaned, q_tokens = _prepare_query(query, cfg)
    order = list(o.walk())
    random.Random(order_seed).shuffle(order)
    scored = match_level(q_tokens, q_cleaned, order, cfg)
    if not scored:
        return None
    return _pick_winner(scored)


def predict_hybrid(
    query: str,
    o: Ontology,
    cfg: SimilarityConfig = _DEFAULT_CONFIG,
    order_seed: int = 0,
) -> MatchResult:
    """Descent and flat scan combined; winner expanded to its whole family.

    The flat winner replaces the descent winner only on a strictly better
    score, so the hybrid's winning score is never below the descent's. The
    result keys the winning node and every descendant of it at the winning
    score.
    """
    descent_best, _ = descend(query, o, cfg)
    flat_best = flat_scan(query, o, cfg, order_seed=order_seed)
    winner = flat_best if (flat_best is not None and flat_best.beats(descent_best)) else descent_best
    if winner is None:
        return MatchResult.not_found()
    family = [winner.code] + o.descendants(winner.code)
    entries = [
        MatchEntry(code=code, description=o.nodes[code].description, kind=winner.kind)
        for code in sorted(family)
    ]
    return MatchResult(
        groups={winner.score: entries}, best_score=winner.score, status="found"
    )
