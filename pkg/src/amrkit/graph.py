"""Core AMR graph model and its decomposition into Smatch-style triples.

An AMR is a rooted, labeled graph: variables carry concepts, edges carry
roles and point at other variables or at constants.  Graphs are immutable
after construction and every constructed value satisfies the structural
invariants (unique variable definitions, connectivity from the root), so
downstream code never has to re-validate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Literal, Mapping, Union

# Characters that delimit tokens in PENMAN notation and therefore can never
# appear inside a variable name or concept label.
_STRUCTURAL = set('()/"')

_FRAME_RE = re.compile(r"^(?:[a-z][a-z0-9']*-)+\d{2,3}$")


def _check_token(text: str, what: str, forbid_colon: bool) -> None:
    if not text:
        raise ValueError(f"{what} must be non-empty")
    for ch in text:
        if ch.isspace() or ch in _STRUCTURAL or (forbid_colon and ch == ":"):
            raise ValueError(f"{what} {text!r} contains illegal character {ch!r}")


@dataclass(frozen=True)
class Variable:
    """A graph variable such as ``w`` or ``g2``; unique within one graph."""

    name: str

    def __post_init__(self) -> None:
        _check_token(self.name, "variable name", forbid_colon=True)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Concept:
    """A node label: a frame id like ``want-01`` or a plain concept like ``boy``."""

    label: str

    def __post_init__(self) -> None:
        _check_token(self.label, "concept label", forbid_colon=True)

    @property
    def is_frame(self) -> bool:
        """True when the label has a trailing two-digit sense, e.g. ``go-01``."""
        return _FRAME_RE.match(self.label) is not None

    def __str__(self) -> str:
        return self.label


ConstantKind = Literal["string", "number", "symbol"]

_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


@dataclass(frozen=True)
class Constant:
    """An attribute value: a quoted string, a number, or a bare symbol.

    The kind records surface form only.  Quoted strings keep their interior
    characters verbatim (spaces and parentheses included); the surrounding
    quotes are not part of ``value``.
    """

    value: str
    kind: ConstantKind

    def __post_init__(self) -> None:
        if self.kind == "string":
            if '"' in self.value:
                raise ValueError("quoted constant cannot contain a quote character")
        elif self.kind == "number":
            if not _NUMBER_RE.match(self.value):
                raise ValueError(f"not a numeric constant: {self.value!r}")
        elif self.kind == "symbol":
            _check_token(self.value, "symbol constant", forbid_colon=False)
        else:
            raise ValueError(f"unknown constant kind: {self.kind!r}")

    def __str__(self) -> str:
        if self.kind == "string":
            return f'"{self.value}"'
        return self.value


Target = Union[Variable, Constant]

_ROLE_RE = re.compile(r"^:[^\s()/\"]+$")


@dataclass(frozen=True)
class Edge:
    """One labeled edge.  ``order_index`` is the edge's position among the
    edges sharing its source, in original surface order."""

    source: Variable
    role: str
    target: Target
    order_index: int

    def __post_init__(self) -> None:
        if not _ROLE_RE.match(self.role):
            raise ValueError(f"malformed role: {self.role!r}")
        if self.order_index < 0:
            raise ValueError("order_index must be >= 0")


TripleKind = Literal["instance", "attribute", "relation"]

INSTANCE_LABEL = "instance"
TOP_ROLE = ":top"
TOP_MARKER = Constant("<TOP>", "symbol")


@dataclass(frozen=True)
class Triple:
    """An atomic fact (source, label, target); the unit Smatch compares."""

    kind: TripleKind
    source: Variable
    label: str
    target: Union[Concept, Constant, Variable]

    def __post_init__(self) -> None:
        if self.kind == "instance":
            if self.label != INSTANCE_LABEL or not isinstance(self.target, Concept):
                raise ValueError("instance triples need label 'instance' and a Concept target")
        elif self.kind == "attribute":
            if not isinstance(self.target, Constant):
                raise ValueError("attribute triples need a Constant target")
        elif self.kind == "relation":
            if not isinstance(self.target, Variable):
                raise ValueError("relation triples need a Variable target")
        else:
            raise ValueError(f"unknown triple kind: {self.kind!r}")


@dataclass(frozen=True)
class AmrGraph:
    """A rooted AMR graph.

    ``instances`` maps each variable to its concept, in definition order.
    ``edges`` is the full edge list in surface order; per-source subsequences
    are numbered 0, 1, ... by ``order_index``.  Construction validates that
    every mentioned variable is defined, that sibling numbering is
    consistent, and that every variable is connected to the root.
    """

    root: Variable
    instances: Mapping[Variable, Concept]
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "instances", dict(self.instances))
        object.__setattr__(self, "edges", tuple(self.edges))
        if self.root not in self.instances:
            raise ValueError(f"root {self.root} has no concept")
        positions: dict[Variable, int] = {}
        for edge in self.edges:
            if edge.source not in self.instances:
                raise ValueError(f"edge source {edge.source} is not a defined variable")
            if isinstance(edge.target, Variable) and edge.target not in self.instances:
                raise ValueError(f"edge target {edge.target} is not a defined variable")
            expected = positions.get(edge.source, 0)
            if edge.order_index != expected:
                raise ValueError(
                    f"edge {edge.source} {edge.role} has order_index {edge.order_index}, "
                    f"expected {expected}"
                )
            positions[edge.source] = expected + 1
        unreachable = set(self.instances) - self._connected_from_root()
        if unreachable:
            names = ", ".join(sorted(v.name for v in unreachable))
            raise ValueError(f"variables not connected to root: {names}")

    @classmethod
    def build(
        cls,
        root: Variable,
        instances: Mapping[Variable, Concept],
        edges: Iterable[tuple[Variable, str, Target]] = (),
    ) -> "AmrGraph":
        """Construct a graph from bare (source, role, target) edges, assigning
        ``order_index`` from list position."""
        counters: dict[Variable, int] = {}
        built = []
        for source, role, target in edges:
            idx = counters.get(source, 0)
            counters[source] = idx + 1
            built.append(Edge(source, role, target, idx))
        return cls(root, instances, tuple(built))

    def _connected_from_root(self) -> set[Variable]:
        # Connectivity ignores edge direction: a variable attached only via
        # an edge it sources (e.g. after deleting its incoming relation) is
        # still part of the graph.
        neighbors: dict[Variable, list[Variable]] = {v: [] for v in self.instances}
        for edge in self.edges:
            if isinstance(edge.target, Variable):
                neighbors[edge.source].append(edge.target)
                neighbors[edge.target].append(edge.source)
        seen = {self.root}
        stack = [self.root]
        while stack:
            for nxt in neighbors[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    def variables(self) -> list[Variable]:
        """Variables in definition order."""
        return list(self.instances)

    def concept_of(self, var: Variable) -> Concept:
        return self.instances[var]

    def top_concept(self) -> Concept:
        """The concept at the root node."""
        return self.instances[self.root]

    def outgoing(self, var: Variable) -> list[Edge]:
        return [e for e in self.edges if e.source == var]

    def triples(self, include_top: bool = False) -> list[Triple]:
        """Decompose the graph into instance, attribute, and relation triples.

        One instance triple per variable, one attribute triple per
        constant-target edge, one relation triple per variable-target edge.
        With ``include_top`` an extra attribute triple ``(root, :top, <TOP>)``
        marks the root, so a wrong root costs exactly one triple in Smatch.
        """
        out: list[Triple] = []
        for var, concept in self.instances.items():
            out.append(Triple("instance", var, INSTANCE_LABEL, concept))
        for edge in self.edges:
            if isinstance(edge.target, Constant):
                out.append(Triple("attribute", edge.source, edge.role, edge.target))
            else:
                out.append(Triple("relation", edge.source, edge.role, edge.target))
        if include_top:
            out.append(Triple("attribute", self.root, TOP_ROLE, TOP_MARKER))
        return out

    def reentrant_variables(self) -> set[Variable]:
        """Variables mentioned as a target more than once, plus the root when
        it is a target at all.  These are the ones a serializer must emit as
        bare back-references after their first expansion."""
        counts: dict[Variable, int] = {}
        for edge in self.edges:
            if isinstance(edge.target, Variable):
                counts[edge.target] = counts.get(edge.target, 0) + 1
        out = {v for v, n in counts.items() if n > 1}
        if counts.get(self.root):
            out.add(self.root)
        return out
