"""Code ontology: a forest of coded, described nodes with depth-derived edges.

The on-disk format is a tab-separated file, one node per line::

    code<TAB>depth<TAB>description

written in pre-order. A node's parent is the nearest preceding line whose
depth is exactly one less; depth 0 lines are roots. ``#`` starts a comment
line and blank lines are ignored. Because pre-order lists every ancestor
before its descendants, any prefix of the file is itself a valid ontology,
which the scalability harness relies on.

An Ontology is immutable after construction: flattening and token promotion
build new instances rather than mutating in place, so concurrent readers
never need locks.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .config import SimilarityConfig
from .errors import (
    DuplicateCode,
    EmptyDescription,
    InvalidRange,
    MalformedHierarchy,
    UnknownCode,
)
from .textproc import TokenSet, clean, tokenize

_DEFAULT_CONFIG = SimilarityConfig()


@dataclass(frozen=True)
class CodeNode:
    code: str
    depth: int
    description: str
    parent: str | None
    tokens: TokenSet


class Ontology:
    """Indexed, immutable view of a code forest.

    ``nodes`` preserves pre-order insertion order; ``levels`` maps each depth
    to the codes at that depth (pre-order within a level) and ``children``
    maps each code to its direct children in pre-order.
    """

    def __init__(self, nodes: Iterable[CodeNode], name: str = "unnamed"):
        self.name = name
        self.nodes: dict[str, CodeNode] = {}
        self.levels: dict[int, list[str]] = {}
        self.children: dict[str, list[str]] = {}
        for node in nodes:
            if node.code in self.nodes:
                raise DuplicateCode(f"duplicate code {node.code!r}")
            self.nodes[node.code] = node
            self.levels.setdefault(node.depth, []).append(node.code)
            self.children.setdefault(node.code, [])
            if node.parent is not None:
                if node.parent not in self.nodes:
                    raise MalformedHierarchy(
                        f"node {node.code!r} references parent {node.parent!r} before it was defined"
                    )
                self.children[node.parent].append(node.code)

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, code: str) -> bool:
        return code in self.nodes

    def __eq__(self, other: object) -> bool:
        """Structural equality: same codes in the same order with identical
        depth, parent and description. Token weights are derived state and
        deliberately not compared."""
        if not isinstance(other, Ontology):
            return NotImplemented
        if list(self.nodes) != list(other.nodes):
            return False
        return all(
            (a.depth, a.parent, a.description) == (b.depth, b.parent, b.description)
            for a, b in zip(self.nodes.values(), other.nodes.values())
        )

    def node(self, code: str) -> CodeNode:
        try:
            return self.nodes[code]
        except KeyError:
            raise UnknownCode(f"unknown code {code!r}") from None

    def roots(self) -> list[str]:
        return self.levels.get(0, [])

    def max_depth(self) -> int:
        return max(self.levels) if self.levels else -1

    def descendants(self, code: str) -> list[str]:
        """All codes strictly below ``code``, in pre-order."""
        self.node(code)
        out: list[str] = []
        stack = list(reversed(self.children[code]))
        while stack:
            current = stack.pop()
            out.append(current)
            stack.extend(reversed(self.children[current]))
        return out

    def walk(self) -> Iterator[CodeNode]:
        return iter(self.nodes.values())

    def validate(self) -> None:
        """Re-check the structural invariants the indexes are built on."""
        for depth, codes in self.levels.items():
            for code in codes:
                assert self.nodes[code].depth == depth, f"{code}: level index disagrees with depth"
        for code, node in self.nodes.items():
            if node.parent is None:
                assert node.depth == 0, f"{code}: parentless node at depth {node.depth}"
            else:
                parent = self.nodes[node.parent]
                assert node.depth == parent.depth + 1, f"{code}: depth not parent depth + 1"
                assert code in self.children[node.parent], f"{code}: missing from parent's child list"


def parse_ontology_text(text: str, name: str = "unnamed", cfg: SimilarityConfig = _DEFAULT_CONFIG) -> Ontology:
    """Parse the TSV pre-order format into an Ontology.

    Raises DuplicateCode, MalformedHierarchy (negative depth, non-integer
    depth, or a depth jump greater than +1 relative to the preceding node),
    or EmptyDescription.
    """
    nodes: list[CodeNode] = []
    seen: set[str] = set()
    # Stack of (depth, code) for the current ancestor chain.
    chain: list[tuple[int, str]] = []
    previous_depth: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise MalformedHierarchy(f"line {lineno}: expected code<TAB>depth<TAB>description, got {raw!r}")
        code, depth_text, description = (p.strip() for p in parts)
        if not code:
            raise MalformedHierarchy(f"line {lineno}: empty code")
        try:
            depth = int(depth_text)
        except ValueError:
            raise MalformedHierarchy(f"line {lineno}: depth {depth_text!r} is not an integer") from None
        if depth < 0:
            raise MalformedHierarchy(f"line {lineno}: negative depth {depth}")
        if previous_depth is None:
            if depth != 0:
                raise MalformedHierarchy(f"line {lineno}: first node must have depth 0, got {depth}")
        elif depth > previous_depth + 1:
            raise MalformedHierarchy(
                f"line {lineno}: depth jumps from {previous_depth} to {depth}"
            )
        if code in seen:
            raise DuplicateCode(f"line {lineno}: duplicate code {code!r}")
        cleaned = clean(description)
        if not cleaned:
            raise EmptyDescription(f"line {lineno}: node {code!r} has an empty description")
        while chain and chain[-1][0] >= depth:
            chain.pop()
        parent = chain[-1][1] if depth > 0 else None
        nodes.append(
            CodeNode(code=code, depth=depth, description=description, parent=parent, tokens=tokenize(cleaned, cfg))
        )
        seen.add(code)
        chain.append((depth, code))
        previous_depth = depth
    return Ontology(nodes, name=name)


def parse_ontology_file(path: str | Path, cfg: SimilarityConfig = _DEFAULT_CONFIG) -> Ontology:
    path = Path(path)
    return parse_ontology_text(path.read_text(encoding="utf-8"), name=path.stem, cfg=cfg)


def write_ontology(o: Ontology, path: str | Path) -> None:
    """Persist an ontology in the TSV pre-order format.

    Round-trip law: parsing the written file yields a structurally equal
    Ontology. Token weights added by promotion are derived state and are not
    persisted.
    """
    lines = [f"# {o.name}: {len(o)} nodes"]
    lines.extend(f"{n.code}\t{n.depth}\t{n.description}" for n in o.walk())
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class ChapterRange:
    chapter: str
    low: str
    high: str
    title: str

    def contains(self, code: str) -> bool:
        """Whether the code's 3-character category prefix falls in [low, high]."""
        prefix = code[:3].upper()
        return self.low <= prefix <= self.high


def load_chapter_ranges(path: str | Path) -> list[ChapterRange]:
    """Read a chapter,low,high,title CSV; raises InvalidRange when low > high
    under character-wise code ordering."""
    ranges: list[ChapterRange] = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        for row in reader:
            low = row["low"].strip().upper()
            high = row["high"].strip().upper()
            if low > high:
                raise InvalidRange(f"chapter {row['chapter']!r}: low {low!r} > high {high!r}")
            ranges.append(ChapterRange(chapter=row["chapter"].strip(), low=low, high=high, title=row["title"].strip()))
    return ranges
