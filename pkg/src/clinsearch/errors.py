"""Domain errors raised by the search engine and query pipeline.

Every error a caller is expected to handle subclasses DomainError, so the
CLI and the HTTP layer can translate them uniformly (exit code 1, HTTP 4xx)
without enumerating each one.
"""


class DomainError(Exception):
    """Base class for all recoverable, caller-visible failures."""


class ConfigError(DomainError):
    """Similarity config file is malformed or holds an out-of-range value."""


class DuplicateCode(DomainError):
    """The same code appears twice in one ontology file."""


class MalformedHierarchy(DomainError):
    """A node's depth jumps by more than one relative to the preceding line."""


class EmptyDescription(DomainError):
    """A node has no description text after cleaning."""


class UnknownCode(DomainError):
    """A code was requested that the ontology does not contain."""


class InvalidRange(DomainError):
    """A chapter range has low > high under character-wise code ordering."""


class EmptyQuery(DomainError):
    """A search query cleaned down to the empty string."""


class NonTermination(DomainError):
    """Flattening failed to reach a fixpoint within the iteration budget."""


class EmptyQuestion(DomainError):
    """A natural-language question cleaned down to the empty string."""


class UnparseableQuestion(DomainError):
    """No fragments could be extracted from a natural-language question."""


class NoCodesFound(DomainError):
    """A disease fragment resolved to no codes under the active predictor."""


class UnknownColumn(DomainError):
    """A filter predicate references a column the claims table lacks."""


class MissingColumn(DomainError):
    """The claims CSV header lacks a required column."""


class MalformedRow(DomainError):
    """A claims CSV row is invalid; the message carries the 1-based line number."""

    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"line {line_number}: {reason}")


class EmptyFixture(DomainError):
    """A robustness fixture file contains no usable query rows."""
