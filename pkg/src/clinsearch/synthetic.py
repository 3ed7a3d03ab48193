"""Deterministic synthetic ontology generator for scale experiments.

Nodes come in uniform ten-node blocks (one root, four children, five
grandchildren) laid out in pre-order, so any prefix of the node list keeps
roots, children and grandchildren in near-constant proportion, which is
exactly what the scalability harness needs when it truncates. Every
description carries a unique site token, which keeps descriptions distinct
and guarantees that a node's own description never matches a foreign
subtree better than itself;
shared connective vocabulary ("of the <organ>") keeps parent-child overlap
realistic so traversal behaves the way it does on real hierarchies.
"""

from __future__ import annotations

import random

from .config import SimilarityConfig
from .ontology import CodeNode, Ontology
from .textproc import clean, tokenize

_DEFAULT_CONFIG = SimilarityConfig()

_ORGANS = (
    "kidney", "liver", "stomach", "esophagus", "pancreas", "spleen", "bladder",
    "colon", "rectum", "duodenum", "ileum", "jejunum", "larynx", "pharynx",
    "trachea", "bronchus", "pleura", "diaphragm", "aorta", "ventricle",
    "atrium", "pericardium", "thyroid", "adrenal gland", "pituitary gland",
    "cornea", "retina", "iris", "eyelid", "cochlea", "mastoid", "tympanum",
    "femur", "tibia", "humerus", "radius", "scapula", "clavicle", "sternum",
    "vertebra",
)
_CONDITIONS = (
    "acute inflammation", "chronic inflammation", "benign neoplasm",
    "malignant neoplasm", "congenital malformation", "degenerative disease",
    "acute infection", "chronic infection", "traumatic injury",
    "vascular insufficiency", "functional disorder", "obstructive disease",
)
_COMPLICATIONS = (
    "hemorrhage", "perforation", "obstruction", "abscess", "fistula",
    "stenosis", "necrosis", "edema",
)

# Ten nodes per block: root, four children, five grandchildren (2+2+1+0).
_GRANDCHILDREN_PER_CHILD = (2, 2, 1, 0)


def make_synthetic_ontology(
    n_nodes: int = 20000,
    seed: int = 7,
    name: str | None = None,
    cfg: SimilarityConfig = _DEFAULT_CONFIG,
) -> Ontology:
    """Build an n-node ontology, deterministic in (n_nodes, seed)."""
    if name is None:
        name = f"synthetic-{n_nodes}"
    rng = random.Random(seed)
    nodes: list[CodeNode] = []

    def add(code: str, depth: int, description: str, parent: str | None) -> None:
        nodes.append(
            CodeNode(
                code=code,
                depth=depth,
                description=description,
                parent=parent,
                tokens=tokenize(clean(description), cfg),
            )
        )

    block = 0
    while len(nodes) < n_nodes:
        organ = rng.choice(_ORGANS)
        root_code = f"Y{block:05d}"
        add(root_code, 0, f"disorders of the {organ} group g{block}", None)
        for i, grandchildren in enumerate(_GRANDCHILDREN_PER_CHILD):
            if len(nodes) >= n_nodes:
                break
            condition = rng.choice(_CONDITIONS)
            child_code = f"{root_code}.{i}"
            add(child_code, 1, f"{condition} of the {organ} site s{block}x{i}", root_code)
            for j in range(grandchildren):
                if len(nodes) >= n_nodes:
                    break
                complication = rng.choice(_COMPLICATIONS)
                add(
                    f"{child_code}{j}",
                    2,
                    f"{condition} of the {organ} with {complication} site s{block}x{i}y{j}",
                    child_code,
                )
        block += 1
    return Ontology(nodes, name=name)
