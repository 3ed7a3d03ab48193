"""Hierarchy flattening: promote children that share no vocabulary with
their parent until every parent-child edge overlaps.

A node phrased with vocabulary disjoint from its parent can never be reached
by a top-down predictor: the parent scores zero on the child's own wording,
so the walk never enters the subtree. Flattening repairs the structure
instead of the predictor: any node whose raw token set has an empty
intersection with its parent's moves up one level (its parent becomes its
former grandparent, its whole subtree shifts up with it), repeated until a
full pass finds no such node. Promoted nodes keep their relative order by
slotting in directly after their former parent, so the result is stable and
persisting it round-trips.

The fixpoint exists because every promotion strictly decreases the total
depth sum; the iteration cap is a guard against regressions, not a tuning
knob.
"""

from __future__ import annotations

from typing import Callable

from .config import SimilarityConfig
from .errors import NonTermination, UnknownCode
from .ontology import CodeNode, Ontology, write_ontology
from .predictor import MatchResult

# Persisting a flattened ontology is the ordinary TSV write; re-exported so
# callers of this module see the full flatten-then-save workflow in one place.
persist = write_ontology

_DEFAULT_CONFIG = SimilarityConfig()

Predictor = Callable[[str, Ontology, SimilarityConfig], MatchResult]


def find_candidates(o: Ontology, depth: int) -> list[str]:
    """Codes at ``depth`` whose raw token set shares nothing with the parent.

    Token weights are ignored: a vague term counts as overlap like any other
    token. Root nodes have no parent and are never candidates.
    """
    if depth < 1:
        return []
    out = []
    for code in o.levels.get(depth, []):
        node = o.nodes[code]
        parent = o.nodes[node.parent]  # depth >= 1 guarantees a parent
        if not node.tokens.tokens & parent.tokens.tokens:
            out.append(code)
    return sorted(out)


def flatten_once(o: Ontology, candidates: list[str]) -> Ontology:
    """Promote one batch of same-depth candidates by a single level.

    Each candidate's parent becomes its former grandparent (or it becomes a
    root when the parent was one), and its entire subtree rises with it. The
    input ontology is untouched; a new one is returned.
    """
    if not candidates:
        return o
    depths = set()
    for code in candidates:
        node = o.node(code)
        if node.depth < 1:
            raise UnknownCode(f"cannot promote root node {code!r}")
        depths.add(node.depth)
    if len(depths) != 1:
        raise ValueError(f"candidates span several depths: {sorted(depths)}")

    new_depth: dict[str, int] = {}
    new_parent: dict[str, str | None] = {}
    for code in candidates:
        node = o.nodes[code]
        parent = o.nodes[node.parent]
        new_parent[code] = parent.parent
        new_depth[code] = node.depth - 1
        for sub in o.descendants(code):
            new_depth[sub] = o.nodes[sub].depth - 1

    # Rebuild sibling lists, slotting each promoted node right after its
    # former parent; several promotions under one parent keep candidate order.
    children = {code: list(kids) for code, kids in o.children.items()}
    roots = list(o.roots())
    inserted_after: dict[str, int] = {}
    for code in candidates:
        former_parent = o.nodes[code].parent
        children[former_parent].remove(code)
        offset = inserted_after.get(former_parent, 0) + 1
        inserted_after[former_parent] = offset
        grandparent = new_parent[code]
        siblings = roots if grandparent is None else children[grandparent]
        siblings.insert(siblings.index(former_parent) + offset, code)

    nodes: list[CodeNode] = []
    stack = list(reversed(roots))
    while stack:
        code = stack.pop()
        old = o.nodes[code]
        nodes.append(
            CodeNode(
                code=code,
                depth=new_depth.get(code, old.depth),
                description=old.description,
                parent=new_parent.get(code, old.parent),
                tokens=old.tokens,
            )
        )
        stack.extend(reversed(children[code]))
    return Ontology(nodes, name=o.name)


def flatten_to_fixpoint(o: Ontology, max_iterations: int = 32) -> tuple[Ontology, int]:
    """Run promotion passes (ascending depth within a pass) to the fixpoint.

    Returns the flattened ontology and the number of passes, counting the
    final no-change pass that certifies the fixpoint. Raises NonTermination
    if the cap is exhausted.
    """
    current = o
    for passes in range(1, max_iterations + 1):
        changed = False
        depth = 1
        while depth <= current.max_depth():
            candidates = find_candidates(current, depth)
            if candidates:
                current = flatten_once(current, candidates)
                changed = True
            depth += 1
        if not changed:
            return current, passes
    raise NonTermination(f"no fixpoint within {max_iterations} passes")


def check_reachability(
    o: Ontology,
    predict: Predictor,
    cfg: SimilarityConfig = _DEFAULT_CONFIG,
) -> list[str]:
    """Codes whose own description fails to retrieve them via ``predict``.

    Every node's cleaned description is issued as a query; the node is
    unreachable when it appears in no group of the result. Returned in
    pre-order.
    """
    unreachable = []
    for node in o.walk():
        result = predict(node.description, o, cfg)
        if node.code not in result.codes():
            unreachable.append(node.code)
    return unreachable
