"""Shared fixtures: configs, a small hand-built ontology, and the bundled data."""

from __future__ import annotations

import pytest

from clinsearch.config import SimilarityConfig
from clinsearch.data import (
    bundled_claims_path,
    bundled_chapters_path,
    bundled_ontology_path,
    bundled_paraphrases_path,
)
from clinsearch.flatten import find_candidates, flatten_to_fixpoint
from clinsearch.ontology import Ontology, load_chapter_ranges, parse_ontology_file, parse_ontology_text
from clinsearch.pipeline import ClaimsTable, load_claims

MINI_TEXT = """\
R00\t0\tabnormalities of heart beat
R00.0\t1\ttachycardia unspecified
R00.1\t1\tbradycardia unspecified
R07\t0\tpain in throat and chest
R07.0\t1\tpain in throat
R07.1\t1\tchest pain on breathing
R07.11\t2\tchest pain on breathing with anxiety
"""

# A hierarchy whose second root hides one child: "glanzmann defect" shares no
# vocabulary with its parent, so a top-down walk can never reach it.
HIDDEN_TEXT = """\
D60\t0\taplastic anemia
D60.0\t1\tchronic aplastic anemia
D69\t0\tpurpura conditions
D69.0\t1\tallergic purpura
D69.1\t1\tglanzmann defect
D69.11\t2\tglanzmann defect with bleeding
"""


@pytest.fixture(scope="session")
def cfg() -> SimilarityConfig:
    return SimilarityConfig()


@pytest.fixture(scope="session")
def mini(cfg) -> Ontology:
    return parse_ontology_text(MINI_TEXT, "mini", cfg)


@pytest.fixture(scope="session")
def hidden(cfg) -> Ontology:
    return parse_ontology_text(HIDDEN_TEXT, "hidden", cfg)


@pytest.fixture(scope="session")
def bundled(cfg) -> Ontology:
    return parse_ontology_file(bundled_ontology_path(), cfg)


@pytest.fixture(scope="session")
def bundled_flat(bundled) -> Ontology:
    flattened, _ = flatten_to_fixpoint(bundled)
    return flattened


@pytest.fixture(scope="session")
def divergent_codes(bundled) -> list[str]:
    return find_candidates(bundled, 1)


@pytest.fixture(scope="session")
def claims() -> ClaimsTable:
    return load_claims(bundled_claims_path())


@pytest.fixture(scope="session")
def chapter_ranges():
    return load_chapter_ranges(bundled_chapters_path())


@pytest.fixture(scope="session")
def paraphrases_path() -> str:
    return str(bundled_paraphrases_path())
