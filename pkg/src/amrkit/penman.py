"""Reading and writing AMR graphs in PENMAN notation.

``parse`` accepts the usual pretty-printed multi-line form and collects
every problem it can find before raising, so callers see all diagnostics
for a bad graph at once.  ``serialize_canonical`` writes the one canonical
surface form: a single line, depth-first, each variable expanded at its
first mention, a space before and after every parenthesis.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

from .graph import _NUMBER_RE, AmrGraph, Concept, Constant, Edge, Variable

# Bare (unquoted) attribute values that would otherwise look like variable
# references: the sentence-mode markers.
_MODE_SYMBOLS = frozenset({"imperative", "expressive", "interrogative"})

WIKI_ROLE = ":wiki"


class DiagnosticCode(enum.Enum):
    """Machine-readable categories for parse problems."""

    UNBALANCED_PAREN = "UnbalancedParen"
    MISSING_CONCEPT = "MissingConcept"
    DUPLICATE_VARIABLE = "DuplicateVariable"
    UNDEFINED_VARIABLE = "UndefinedVariable"
    EMPTY_ROLE = "EmptyRole"
    MALFORMED_TOKEN = "MalformedToken"


@dataclass(frozen=True)
class ParseDiagnostic:
    """One problem found while parsing, located by line and column (1-based)."""

    code: DiagnosticCode
    message: str
    line: int
    column: int
    offset: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.code.value}: {self.message}"


class ParseError(ValueError):
    """Raised when PENMAN text cannot be parsed; carries every diagnostic."""

    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0]
        extra = len(self.diagnostics) - 1
        msg = str(first) if extra == 0 else f"{first} (and {extra} more)"
        super().__init__(msg)


@dataclass(frozen=True)
class _Token:
    kind: str  # lparen rparen slash role string atom
    text: str
    offset: int
    line: int
    column: int


_DELIMS = set('():/"')


def _lex(text: str, diags: list[ParseDiagnostic]) -> tuple[list[_Token], _Token]:
    """Split text into tokens; returns (tokens, end-of-input marker)."""
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def step(upto: int) -> None:
        nonlocal i, line, col
        while i < upto:
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch.isspace():
            step(i + 1)
            continue
        if ch == "(":
            tokens.append(_Token("lparen", "(", i, line, col))
            step(i + 1)
        elif ch == ")":
            tokens.append(_Token("rparen", ")", i, line, col))
            step(i + 1)
        elif ch == "/":
            tokens.append(_Token("slash", "/", i, line, col))
            step(i + 1)
        elif ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                diags.append(
                    ParseDiagnostic(
                        DiagnosticCode.MALFORMED_TOKEN,
                        "unterminated quoted string",
                        line,
                        col,
                        i,
                    )
                )
                tokens.append(_Token("string", text[i + 1 :], i, line, col))
                step(n)
            else:
                tokens.append(_Token("string", text[i + 1 : j], i, line, col))
                step(j + 1)
        elif ch == ":":
            j = i + 1
            while j < n and not text[j].isspace() and text[j] not in '()/"':
                j += 1
            tokens.append(_Token("role", text[i:j], i, line, col))
            step(j)
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in _DELIMS:
                j += 1
            tokens.append(_Token("atom", text[i:j], i, line, col))
            step(j)
    return tokens, _Token("eof", "", n, line, col)


class _Parser:
    """Recursive-descent parser with best-effort recovery: it keeps going
    after a problem so one pass reports everything, and only builds a graph
    when no diagnostics were produced."""

    def __init__(self, text: str):
        self.diags: list[ParseDiagnostic] = []
        self.tokens, self.eof = _lex(text, self.diags)
        self.pos = 0
        self.instances: dict[str, Concept] = {}
        self.definition_tokens: dict[str, _Token] = {}
        self.edges: list[tuple[str, str, Union[str, Constant]]] = []
        # targets recorded as bare strings are variable references or bare
        # constants; they are told apart once every definition is known
        self.pending: list[tuple[int, _Token]] = []
        self.synthetic = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else self.eof

    def take(self) -> _Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def report(self, code: DiagnosticCode, message: str, tok: _Token) -> None:
        self.diags.append(ParseDiagnostic(code, message, tok.line, tok.column, tok.offset))

    def parse(self) -> AmrGraph:
        tok = self.peek()
        if tok.kind != "lparen":
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            self.report(DiagnosticCode.MALFORMED_TOKEN, f"expected '(' but found {found}", tok)
            raise ParseError(self.diags)
        root = self.parse_node()
        trailing = self.peek()
        if trailing.kind == "rparen":
            self.report(DiagnosticCode.UNBALANCED_PAREN, "unmatched ')'", trailing)
        elif trailing.kind != "eof":
            self.report(
                DiagnosticCode.MALFORMED_TOKEN,
                f"unexpected text after the graph: {trailing.text!r}",
                trailing,
            )
        self.resolve_pending()
        if self.diags:
            raise ParseError(self.diags)
        edges = []
        for source, role, target in self.edges:
            resolved: Union[Variable, Constant]
            if isinstance(target, Constant):
                resolved = target
            else:
                resolved = Variable(target)
            edges.append((Variable(source), role, resolved))
        return AmrGraph.build(
            Variable(root),
            {Variable(name): concept for name, concept in self.instances.items()},
            edges,
        )

    def fresh_name(self) -> str:
        self.synthetic += 1
        return f"_missing{self.synthetic}"

    def parse_node(self) -> str:
        self.take()  # the '('
        tok = self.peek()
        if tok.kind == "atom":
            self.take()
            name = tok.text
        else:
            self.report(DiagnosticCode.MALFORMED_TOKEN, "expected a variable name after '('", tok)
            name = self.fresh_name()
        if name in self.instances:
            prev = self.definition_tokens[name]
            self.report(
                DiagnosticCode.DUPLICATE_VARIABLE,
                f"variable {name!r} already defined at {prev.line}:{prev.column}",
                tok,
            )
        else:
            self.definition_tokens[name] = tok
        concept = self.parse_concept(name)
        if name not in self.instances:
            self.instances[name] = concept
        self.parse_relations(name)
        return name

    def parse_concept(self, name: str) -> Concept:
        tok = self.peek()
        if tok.kind != "slash":
            self.report(
                DiagnosticCode.MISSING_CONCEPT, f"variable {name!r} has no '/ concept'", tok
            )
            return Concept("_missing")
        self.take()
        tok = self.peek()
        if tok.kind != "atom":
            self.report(DiagnosticCode.MISSING_CONCEPT, "expected a concept after '/'", tok)
            return Concept("_missing")
        self.take()
        return Concept(tok.text)

    def parse_relations(self, source: str) -> None:
        while True:
            tok = self.peek()
            if tok.kind == "rparen":
                self.take()
                return
            if tok.kind == "eof":
                self.report(DiagnosticCode.UNBALANCED_PAREN, "missing ')'", tok)
                return
            if tok.kind == "role":
                self.take()
                if tok.text == ":":
                    self.report(DiagnosticCode.EMPTY_ROLE, "role name is empty", tok)
                self.parse_target(source, tok.text)
                continue
            if tok.kind == "slash":
                self.report(DiagnosticCode.MALFORMED_TOKEN, "unexpected '/'", tok)
                self.take()
                continue
            # a value with no role in front of it
            self.report(
                DiagnosticCode.MALFORMED_TOKEN, f"expected a role, found {tok.text!r}", tok
            )
            if tok.kind == "lparen":
                self.parse_node()
            else:
                self.take()

    def parse_target(self, source: str, role: str) -> None:
        tok = self.peek()
        if tok.kind == "lparen":
            # reserve the slot first so edges stay in surface order even
            # though the child's name is only known after its subtree
            slot = len(self.edges)
            self.edges.append((source, role, ""))
            child = self.parse_node()
            self.edges[slot] = (source, role, child)
        elif tok.kind == "string":
            self.take()
            self.edges.append((source, role, Constant(tok.text, "string")))
        elif tok.kind == "atom":
            self.take()
            self.pending.append((len(self.edges), tok))
            self.edges.append((source, role, tok.text))
        else:
            self.report(
                DiagnosticCode.MALFORMED_TOKEN, f"role {role!r} has no value", tok
            )

    def resolve_pending(self) -> None:
        """Decide whether each bare target token is a variable reference or
        a constant.  A token naming a variable defined anywhere in the text
        (before or after the mention) is a reference; otherwise numbers,
        non-alphabetic tokens, and sentence-mode words are constants."""
        for index, tok in self.pending:
            source, role, _ = self.edges[index]
            text = tok.text
            if text in self.instances:
                continue  # stays a reference
            if _NUMBER_RE.match(text):
                self.edges[index] = (source, role, Constant(text, "number"))
            elif not text[0].isalpha() or text in _MODE_SYMBOLS:
                self.edges[index] = (source, role, Constant(text, "symbol"))
            else:
                self.report(
                    DiagnosticCode.UNDEFINED_VARIABLE, f"undefined variable {text!r}", tok
                )


def parse(text: str) -> AmrGraph:
    """Parse PENMAN text into a graph.

    Raises ParseError carrying every diagnostic found; the error's
    ``diagnostics`` list is ordered by position of discovery.
    """
    return _Parser(text).parse()


def strip_wiki(graph: AmrGraph) -> AmrGraph:
    """Return the graph without its ``:wiki`` edges.

    Any subgraph attached to the rest only through a removed edge is
    dropped too.  A graph with no wiki edges is returned unchanged.
    """
    kept = [e for e in graph.edges if e.role != WIKI_ROLE]
    if len(kept) == len(graph.edges):
        return graph
    neighbors: dict[Variable, list[Variable]] = {v: [] for v in graph.instances}
    for edge in kept:
        if isinstance(edge.target, Variable):
            neighbors[edge.source].append(edge.target)
            neighbors[edge.target].append(edge.source)
    reach = {graph.root}
    stack = [graph.root]
    while stack:
        for nxt in neighbors[stack.pop()]:
            if nxt not in reach:
                reach.add(nxt)
                stack.append(nxt)
    return AmrGraph.build(
        graph.root,
        {v: c for v, c in graph.instances.items() if v in reach},
        [(e.source, e.role, e.target) for e in kept if e.source in reach],
    )


def serialize_canonical(graph: AmrGraph) -> str:
    """Write the canonical single-line PENMAN form.

    Depth-first from the root, edges in stored order, each variable
    expanded in full at its first mention and written as a bare name
    afterwards.  Every token, parentheses included, is separated by a
    single space, so the output splits cleanly on whitespace.

    Raises ValueError for a graph with a variable that is never reached
    as an edge target: such a node has no expansion site in this notation.
    """
    outgoing: dict[Variable, list[Edge]] = {v: [] for v in graph.instances}
    for edge in graph.edges:
        outgoing[edge.source].append(edge)
    parts: list[str] = []
    expanded: set[Variable] = set()

    def expand(var: Variable) -> None:
        expanded.add(var)
        parts.extend(("(", var.name, "/", graph.instances[var].label))
        for edge in outgoing[var]:
            parts.append(edge.role)
            target = edge.target
            if isinstance(target, Constant):
                parts.append(str(target))
            elif target not in expanded:
                expand(target)
            else:
                parts.append(target.name)
        parts.append(")")

    expand(graph.root)
    missing = set(graph.instances) - expanded
    if missing:
        names = ", ".join(sorted(v.name for v in missing))
        raise ValueError(
            f"no expansion site for variables only connected against edge direction: {names}"
        )
    return " ".join(parts)


def canonicalize(text: str, remove_wiki: bool = True) -> str:
    """Parse PENMAN text and rewrite it in canonical single-line form,
    dropping ``:wiki`` edges unless told otherwise."""
    graph = parse(text)
    if remove_wiki:
        graph = strip_wiki(graph)
    return serialize_canonical(graph)
