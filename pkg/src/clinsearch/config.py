"""Similarity configuration: thresholds, vague-term weighting, n-gram size.

All matching behaviour that is tunable lives here so a single object can be
threaded through the predictors. A config can be loaded from a flat
``key=value`` file; unknown keys are rejected rather than ignored so typos
surface immediately.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

DEFAULT_VAGUE_TERMS = frozenset({"unspecified", "other", "classified", "elsewhere", "not"})


@dataclass(frozen=True)
class SimilarityConfig:
    levenshtein_threshold: float = 0.80
    embedding_threshold: float = 0.75
    ngram_size: int = 3
    vague_terms: frozenset[str] = field(default_factory=lambda: DEFAULT_VAGUE_TERMS)
    vague_weight: float = 0.3
    promotion_weight: float = 0.5

    def __post_init__(self) -> None:
        for name in ("levenshtein_threshold", "embedding_threshold", "vague_weight", "promotion_weight"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value!r}")
        if self.ngram_size < 2:
            raise ConfigError(f"ngram_size must be >= 2, got {self.ngram_size!r}")


_FLOAT_KEYS = {"levenshtein_threshold", "embedding_threshold", "vague_weight", "promotion_weight"}
_INT_KEYS = {"ngram_size"}
_SET_KEYS = {"vague_terms"}


def load_config(path: str | Path) -> SimilarityConfig:
    """Parse a flat key=value file into a SimilarityConfig.

    Blank lines and lines starting with ``#`` are skipped. vague_terms is a
    comma-separated list. Any key not named in SimilarityConfig raises
    ConfigError.
    """
    overrides: dict[str, object] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        try:
            if key in _FLOAT_KEYS:
                overrides[key] = float(value)
            elif key in _INT_KEYS:
                overrides[key] = int(value)
            elif key in _SET_KEYS:
                overrides[key] = frozenset(t.strip() for t in value.split(",") if t.strip())
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {value!r}") from exc
    return SimilarityConfig(**overrides)  # type: ignore[arg-type]
