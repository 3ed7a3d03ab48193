"""Text primitives shared by every predictor.

The matching stack is deliberately lexical and deterministic: cleaned
lowercase text, weighted token-set intersection for exact scoring, and two
approximate measures (Levenshtein similarity over whole strings, cosine over
character n-gram count vectors). Stopwords are kept; instead, a short list of
vague filler terms common in code descriptions ("unspecified", "other", ...)
is down-weighted so they cannot dominate a score.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .config import SimilarityConfig

_NON_ALNUM = re.compile(r"[^a-z0-9 ]")
_SPACES = re.compile(r" +")

_DEFAULT_CONFIG = SimilarityConfig()


def clean(text: str) -> str:
    """Normalize free text: lowercase, strip punctuation, collapse spaces.

    Every character outside [a-z0-9 ] becomes a space, runs of spaces
    collapse to one, and the result is trimmed. Idempotent: clean(clean(x))
    == clean(x).
    """
    lowered = text.lower()
    spaced = _NON_ALNUM.sub(" ", lowered)
    return _SPACES.sub(" ", spaced).strip()


@dataclass(frozen=True)
class TokenSet:
    """Deduplicated tokens of a cleaned string plus per-token weights.

    Weights default to 1.0; tokens on the vague list carry the configured
    vague weight. Promotion may later add child tokens at a third weight.
    weights has exactly one entry per token.
    """

    tokens: frozenset[str]
    weights: dict[str, float] = field(compare=False)

    def with_extra(self, extra: dict[str, float]) -> "TokenSet":
        """Return a copy extended with tokens absent from this set."""
        added = {t: w for t, w in extra.items() if t not in self.tokens}
        if not added:
            return self
        weights = dict(self.weights)
        weights.update(added)
        return TokenSet(tokens=self.tokens | set(added), weights=weights)


def tokenize(cleaned: str, cfg: SimilarityConfig = _DEFAULT_CONFIG) -> TokenSet:
    """Split a cleaned string on spaces into a weighted, deduplicated TokenSet."""
    tokens = frozenset(cleaned.split()) if cleaned else frozenset()
    weights = {t: (cfg.vague_weight if t in cfg.vague_terms else 1.0) for t in tokens}
    return TokenSet(tokens=tokens, weights=weights)


def exact_score(query: TokenSet, desc: TokenSet) -> float:
    """Sum of the description-side weights over the shared tokens.

    With all-unit weights this is the intersection cardinality. The query's
    own weights are irrelevant; only which tokens it contains matters.
    """
    return sum(desc.weights[t] for t in query.tokens & desc.tokens)


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert/delete/substitute) between two strings.

    Classic two-row dynamic program: row[j] holds the distance between the
    first i characters of ``a`` and the first j of ``b``. O(len(a)*len(b))
    time, O(len(b)) space.
    """
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[len(b)]


def lev_similarity(a: str, b: str) -> float:
    """Length-normalized Levenshtein similarity in [0, 1].

    1 - distance / max(len(a), len(b)); two empty strings are identical (1.0).
    """
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def embed(cleaned: str, ngram_size: int = 3) -> dict[str, int]:
    """Character n-gram count vector of a cleaned string (spaces included).

    Strings shorter than ngram_size embed to the zero vector (empty dict).
    """
    if len(cleaned) < ngram_size:
        return {}
    counts: dict[str, int] = {}
    for i in range(len(cleaned) - ngram_size + 1):
        gram = cleaned[i : i + ngram_size]
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def cosine(u: dict[str, int], v: dict[str, int]) -> float:
    """Cosine similarity of two sparse count vectors; 0.0 if either is zero."""
    if not u or not v:
        return 0.0
    if len(u) > len(v):
        u, v = v, u
    dot = sum(count * v[gram] for gram, count in u.items() if gram in v)
    if dot == 0:
        return 0.0
    norm_u = sum(c * c for c in u.values()) ** 0.5
    norm_v = sum(c * c for c in v.values()) ** 0.5
    return dot / (norm_u * norm_v)


def approx_similarity(query_cleaned: str, desc_cleaned: str, cfg: SimilarityConfig) -> float | None:
    """Best above-threshold approximate similarity between two cleaned strings.

    Levenshtein similarity and n-gram cosine are each compared against their
    own threshold (strictly greater); the best qualifying value is returned,
    or None when neither qualifies.
    """
    best: float | None = None
    lev = lev_similarity(query_cleaned, desc_cleaned)
    if lev > cfg.levenshtein_threshold:
        best = lev
    cos = cosine(embed(query_cleaned, cfg.ngram_size), embed(desc_cleaned, cfg.ngram_size))
    if cos > cfg.embedding_threshold and (best is None or cos > best):
        best = cos
    return best
