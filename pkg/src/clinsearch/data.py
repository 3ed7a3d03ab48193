"""Paths to the data files shipped inside the package."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path


def data_path(name: str) -> Path:
    return Path(str(files("clinsearch") / "data" / name))


def bundled_ontology_path() -> Path:
    return data_path("icd_sample.tsv")


def bundled_claims_path() -> Path:
    return data_path("claims_sample.csv")


def bundled_chapters_path() -> Path:
    return data_path("chapters.csv")


def bundled_paraphrases_path() -> Path:
    return data_path("paraphrases.tsv")
