"""Hierarchical clinical code search and claims filtering.

The package maps free-text disease descriptions to families of codes in an
ICD-10-style ontology, restructures ontologies whose hierarchy hides codes
from top-down search, turns natural-language questions into Boolean filters
over an in-memory claims table, and benchmarks the variants against each
other.
"""

from .config import SimilarityConfig, load_config
from .errors import (
    ConfigError,
    DomainError,
    DuplicateCode,
    EmptyDescription,
    EmptyFixture,
    EmptyQuery,
    EmptyQuestion,
    InvalidRange,
    MalformedHierarchy,
    MalformedRow,
    MissingColumn,
    NoCodesFound,
    NonTermination,
    UnknownCode,
    UnknownColumn,
    UnparseableQuestion,
)
from .flatten import (
    check_reachability,
    find_candidates,
    flatten_once,
    flatten_to_fixpoint,
    persist,
)
from .hybrid import descend, flat_scan, predict_hybrid
from .ontology import (
    ChapterRange,
    CodeNode,
    Ontology,
    load_chapter_ranges,
    parse_ontology_file,
    parse_ontology_text,
    write_ontology,
)
from .pipeline import (
    And,
    BooleanExpr,
    ClaimsRow,
    ClaimsTable,
    FilterPredicate,
    Leaf,
    Not,
    Or,
    QueryEngine,
    QueryFragment,
    QueryResult,
    compile_and_execute,
    compose,
    interpret,
    load_claims,
    normalize,
    render_expr,
    resolve_codes,
)
from .predictor import (
    MatchEntry,
    MatchResult,
    predict_default,
    predict_scan,
    promote_tokens,
)
from .synthetic import make_synthetic_ontology
from .textproc import clean, cosine, embed, exact_score, lev_similarity, levenshtein

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "SimilarityConfig",
    "load_config",
    "DomainError",
    "ConfigError",
    "DuplicateCode",
    "EmptyDescription",
    "EmptyFixture",
    "EmptyQuery",
    "EmptyQuestion",
    "InvalidRange",
    "MalformedHierarchy",
    "MalformedRow",
    "MissingColumn",
    "NoCodesFound",
    "NonTermination",
    "UnknownCode",
    "UnknownColumn",
    "UnparseableQuestion",
    "CodeNode",
    "Ontology",
    "ChapterRange",
    "parse_ontology_file",
    "parse_ontology_text",
    "write_ontology",
    "load_chapter_ranges",
    "predict_default",
    "predict_scan",
    "predict_hybrid",
    "promote_tokens",
    "MatchEntry",
    "MatchResult",
    "descend",
    "flat_scan",
    "find_candidates",
    "flatten_once",
    "flatten_to_fixpoint",
    "check_reachability",
    "persist",
    "interpret",
    "compose",
    "normalize",
    "render_expr",
    "resolve_codes",
    "compile_and_execute",
    "load_claims",
    "QueryFragment",
    "FilterPredicate",
    "BooleanExpr",
    "Leaf",
    "Not",
    "And",
    "Or",
    "ClaimsRow",
    "ClaimsTable",
    "QueryEngine",
    "QueryResult",
    "clean",
    "levenshtein",
    "lev_similarity",
    "embed",
    "cosine",
    "exact_score",
    "make_synthetic_ontology",
]
