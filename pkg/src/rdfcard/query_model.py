"""Conjunctive query parsing and interned rooted predicate trees.

A query is a `SELECT * { ... }` block over triple patterns with bound
predicates (Turtle-style `;`/`,` abbreviations, sequence paths `p1/p2`,
inverse elements `^p`, PREFIX/BASE declarations). Its node skeleton must be
connected and acyclic. Occurrences of the same constant denote the same
query node, mirroring basic graph pattern semantics; sequence paths expand
to chains over fresh `_pathN` variables.

Predicate trees are interned process-wide, so structurally equal trees from
different queries are the identical instance and are safe to use as cache
keys by identity.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence
from urllib.parse import urljoin

from .rdf_store import (
    MISSING_ID,
    RDF_TYPE,
    DirectedPredicate,
    Direction,
    Graph,
    Term,
    TermId,
    TermKind,
    _unescape,
    iri,
    literal,
)
from .rdf_store import NTriplesParseError


class QueryParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.col = col


class UnsupportedFeatureError(QueryParseError):
    pass


class PatternShapeError(ValueError):
    """The query's node skeleton is not a connected, acyclic tree."""


@dataclass(frozen=True, slots=True)
class Variable:
    name: str


@dataclass(frozen=True, slots=True)
class Bound:
    term: Term


NodeRef = Variable | Bound


@dataclass(frozen=True, slots=True)
class TriplePattern:
    subject: NodeRef
    predicate: Term
    object: NodeRef

    def __post_init__(self) -> None:
        if self.predicate.kind is not TermKind.IRI:
            raise ValueError("pattern predicate must be a bound IRI")


class BasicGraphPattern:
    """A validated, tree-shaped conjunction of triple patterns."""

    __slots__ = ("patterns", "nodes", "bound_nodes", "_adjacency")

    def __init__(self, patterns: Iterable[TriplePattern]):
        self.patterns: tuple[TriplePattern, ...] = tuple(patterns)
        if not self.patterns:
            raise PatternShapeError("a query needs at least one triple pattern")
        adjacency: dict[NodeRef, list[tuple[int, NodeRef]]] = {}
        for idx, pat in enumerate(self.patterns):
            adjacency.setdefault(pat.subject, []).append((idx, pat.object))
            adjacency.setdefault(pat.object, []).append((idx, pat.subject))
        self.nodes: tuple[NodeRef, ...] = tuple(adjacency)
        visited = {self.nodes[0]}
        frontier = [self.nodes[0]]
        while frontier:
            node = frontier.pop()
            for _, other in adjacency[node]:
                if other not in visited:
                    visited.add(other)
                    frontier.append(other)
        if len(visited) != len(self.nodes):
            raise PatternShapeError("query skeleton is disconnected")
        if len(self.patterns) != len(self.nodes) - 1:
            raise PatternShapeError("query skeleton is cyclic")
        self.bound_nodes: tuple[NodeRef, ...] = tuple(
            n for n in self.nodes if isinstance(n, Bound)
        )
        self._adjacency = {n: tuple(v) for n, v in adjacency.items()}

    def incident(self, node: NodeRef) -> tuple[tuple[int, NodeRef], ...]:
        """(pattern index, opposite node) pairs for every pattern touching `node`."""
        try:
            return self._adjacency[node]
        except KeyError:
            raise ValueError(f"{node!r} is not a node of this pattern") from None

    def variables(self) -> tuple[str, ...]:
        return tuple(n.name for n in self.nodes if isinstance(n, Variable))

    def __repr__(self) -> str:
        return f"BasicGraphPattern({len(self.patterns)} patterns, {len(self.nodes)} nodes)"


# -- interned predicate trees -------------------------------------------------

_HASH_MASK = (1 << 64) - 1
_W_FORWARD = 31
_W_INVERSE = 37


def _mix(a: int, b: int) -> int:
    x = (a * 0x9E3779B97F4A7C15 + b * 0xBF58476D1CE4E5B9) & _HASH_MASK
    x ^= x >> 29
    x = (x * 0x94D049BB133111EB) & _HASH_MASK
    return x ^ (x >> 32)


class PredicateTree:
    """Interned tree of directed predicate edges; the shared leaf is EMPTY_TREE.

    Instances come only from `intern_tree`, so structural equality coincides
    with object identity and the order-independent hash is precomputed.
    """

    __slots__ = ("edges", "canonical_hash", "_serial", "_by_label")

    def __init__(
        self,
        edges: tuple[tuple[DirectedPredicate, "PredicateTree"], ...],
        canonical_hash: int,
        serial: int,
    ):
        self.edges = edges
        self.canonical_hash = canonical_hash
        self._serial = serial
        by_label: dict[DirectedPredicate, list[PredicateTree]] = {}
        for edge, child in edges:
            by_label.setdefault(edge, []).append(child)
        self._by_label = {k: tuple(v) for k, v in by_label.items()}

    def is_empty(self) -> bool:
        return not self.edges

    def subtree(self, edge: DirectedPredicate, index: int = 0) -> "PredicateTree":
        """Child reached over `edge` in O(1); `index` picks among duplicate labels."""
        children = self._by_label.get(edge)
        if children is None or index >= len(children):
            raise LookupError(f"no edge {edge!r} (index {index}) at this node")
        return children[index]

    def __hash__(self) -> int:
        return self.canonical_hash

    def __repr__(self) -> str:
        if not self.edges:
            return "()"
        parts = []
        for edge, child in self.edges:
            mark = "" if edge.direction is Direction.FORWARD else "^"
            parts.append(f"{mark}{edge.predicate}{child!r}")
        return "(" + " ".join(parts) + ")"


_intern_lock = threading.Lock()
_intern_table: dict[tuple, PredicateTree] = {}
_intern_serial = 0

EMPTY_TREE = PredicateTree((), 1, 0)
_intern_table[()] = EMPTY_TREE


def intern_tree(
    edges: Iterable[tuple[DirectedPredicate, PredicateTree]]
) -> PredicateTree:
    """Canonicalise sibling order and return the unique shared instance."""
    entries = tuple(
        sorted(edges, key=lambda ec: (ec[0].predicate, ec[0].direction, ec[1]._serial))
    )
    key = tuple((e.predicate, e.direction, c._serial) for e, c in entries)
    found = _intern_table.get(key)
    if found is not None:
        return found
    with _intern_lock:
        found = _intern_table.get(key)
        if found is not None:
            return found
        global _intern_serial
        _intern_serial += 1
        tree = PredicateTree(entries, _hash_entries(entries), _intern_serial)
        _intern_table[key] = tree
        return tree


def _hash_entries(entries: tuple[tuple[DirectedPredicate, PredicateTree], ...]) -> int:
    if not entries:
        return 1
    total = 0
    for edge, child in entries:
        weight = _W_FORWARD if edge.direction is Direction.FORWARD else _W_INVERSE
        total += weight * _mix(edge.predicate & _HASH_MASK, child.canonical_hash)
    return total & _HASH_MASK


def tree_hash(tree: PredicateTree) -> int:
    """Order-independent structural hash (equal trees always hash equal)."""
    return tree.canonical_hash


def subtree(tree: PredicateTree, edge: DirectedPredicate, index: int = 0) -> PredicateTree:
    return tree.subtree(edge, index)


@dataclass(frozen=True, slots=True)
class RPT:
    """A root binding plus the predicate tree spanning the whole query."""

    root: TermId
    tree: PredicateTree
    root_position: NodeRef


def build_predicate_tree(g: Graph, bgp: BasicGraphPattern, root: NodeRef) -> PredicateTree:
    """Tree of directed predicate edges rooted at `root`, interned bottom-up.

    Each pattern becomes one edge (Forward when the root-side node is the
    subject). Predicates absent from the graph keep the MISSING_ID sentinel;
    such trees match nothing. Traversal is iterative, so arbitrarily deep
    chain queries are fine.
    """
    order = [root]
    parent_edge: dict[NodeRef, int | None] = {root: None}
    for node in order:  # grows while iterating: breadth-first expansion
        for idx, other in bgp.incident(node):
            if other not in parent_edge:
                parent_edge[other] = idx
                order.append(other)
    trees: dict[NodeRef, PredicateTree] = {}
    for node in reversed(order):
        entries = []
        for idx, other in bgp.incident(node):
            if parent_edge[other] != idx:
                continue  # the edge back toward the root
            pat = bgp.patterns[idx]
            direction = Direction.FORWARD if pat.subject == node else Direction.INVERSE
            entries.append(
                (DirectedPredicate(g.term_id(pat.predicate), direction), trees[other])
            )
        trees[node] = intern_tree(entries)
    return trees[root]


def rpt_of(g: Graph, bgp: BasicGraphPattern, bound: NodeRef) -> RPT:
    """The rooted predicate tree anchored at one bound node of the query.

    A bound value absent from the graph still yields an RPT (root id is the
    MISSING_ID sentinel); its cardinality is 0.
    """
    if bound not in bgp.bound_nodes:
        raise ValueError(f"{bound!r} is not a bound node of this pattern")
    assert isinstance(bound, Bound)
    return RPT(g.term_id(bound.term), build_predicate_tree(g, bgp, bound), bound)


# -- query text parsing ---------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>\#[^\n]*)
      | (?P<iriref><[^\x00-\x20<>"{}|^`\\]*>)
      | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
      | (?P<string>"(?:[^"\\\n\r]|\\.)*")
      | (?P<dtmark>\^\^)
      | (?P<langtag>@[A-Za-z]+(?:-[A-Za-z0-9]+)*)
      | (?P<pname>(?:[A-Za-z][A-Za-z0-9_\-]*)?:(?:[A-Za-z0-9_][A-Za-z0-9_.\-]*)?)
      | (?P<word>[A-Za-z]+)
      | (?P<punct>[{}.;,/^*])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str
    value: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QueryParseError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, value, line, pos - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, n - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.base = ""
        self.prefixes: dict[str, str] = {}
        self.nodes: dict[tuple, NodeRef] = {}
        self.user_vars = {t.value[1:] for t in self.tokens if t.kind == "var"}
        self.fresh_count = 0

    # -- token helpers

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept_punct(self, value: str) -> bool:
        tok = self.peek()
        if tok.kind == "punct" and tok.value == value:
            self.i += 1
            return True
        return False

    def expect_punct(self, value: str) -> None:
        tok = self.peek()
        if tok.kind != "punct" or tok.value != value:
            raise QueryParseError(f"expected {value!r}", tok.line, tok.col)
        self.i += 1

    def fail(self, message: str) -> QueryParseError:
        tok = self.peek()
        return QueryParseError(message, tok.line, tok.col)

    # -- grammar

    def parse(self) -> BasicGraphPattern:
        self._prologue()
        tok = self.peek()
        if not (tok.kind == "word" and tok.value.upper() == "SELECT"):
            raise self.fail("expected SELECT")
        self.advance()
        tok = self.peek()
        if not (tok.kind == "punct" and tok.value == "*"):
            raise self.fail("only SELECT * is supported")
        self.advance()
        self.expect_punct("{")
        patterns: list[TriplePattern] = []
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.value == "}":
                break
            subject = self._node()
            self._property_list(subject, patterns)
            if not self.accept_punct("."):
                break
        self.expect_punct("}")
        tok = self.peek()
        if tok.kind != "eof":
            raise self.fail("unexpected content after '}'")
        try:
            return BasicGraphPattern(patterns)
        except PatternShapeError:
            raise

    def _prologue(self) -> None:
        while True:
            tok = self.peek()
            if tok.kind != "word":
                return
            keyword = tok.value.upper()
            if keyword == "PREFIX":
                self.advance()
                name_tok = self.peek()
                if name_tok.kind != "pname" or not name_tok.value.endswith(":"):
                    raise self.fail("expected a prefix name ending in ':'")
                self.advance()
                iri_tok = self.peek()
                if iri_tok.kind != "iriref":
                    raise self.fail("expected IRI after prefix name")
                self.advance()
                self.prefixes[name_tok.value[:-1]] = self._resolve(iri_tok.value[1:-1])
            elif keyword == "BASE":
                self.advance()
                iri_tok = self.peek()
                if iri_tok.kind != "iriref":
                    raise self.fail("expected IRI after BASE")
                self.advance()
                self.base = self._resolve(iri_tok.value[1:-1])
            else:
                return

    def _resolve(self, value: str) -> str:
        return urljoin(self.base, value) if self.base else value

    def _property_list(self, subject: NodeRef, patterns: list[TriplePattern]) -> None:
        while True:
            path = self._path()
            objects = [self._node()]
            while self.accept_punct(","):
                objects.append(self._node())
            for obj in objects:
                self._expand_path(subject, path, obj, patterns)
            if self.accept_punct(";"):
                while self.accept_punct(";"):
                    pass
                tok = self.peek()
                if tok.kind in ("iriref", "pname") or (
                    tok.kind == "word" and tok.value == "a"
                ) or (tok.kind == "punct" and tok.value == "^"):
                    continue
                return
            return

    def _path(self) -> list[tuple[Term, bool]]:
        elements = [self._path_element()]
        while self.accept_punct("/"):
            elements.append(self._path_element())
        return elements

    def _path_element(self) -> tuple[Term, bool]:
        inverse = self.accept_punct("^")
        tok = self.peek()
        if tok.kind == "var":
            raise UnsupportedFeatureError(
                "variable predicates are not supported", tok.line, tok.col
            )
        return self._iri_term(), inverse

    def _expand_path(
        self,
        subject: NodeRef,
        path: list[tuple[Term, bool]],
        obj: NodeRef,
        patterns: list[TriplePattern],
    ) -> None:
        hops: list[NodeRef] = [subject]
        for _ in range(len(path) - 1):
            hops.append(self._fresh_variable())
        hops.append(obj)
        for (pred, inverse), left, right in zip(path, hops, hops[1:]):
            if inverse:
                patterns.append(TriplePattern(right, pred, left))
            else:
                patterns.append(TriplePattern(left, pred, right))

    def _fresh_variable(self) -> Variable:
        while True:
            self.fresh_count += 1
            name = f"_path{self.fresh_count}"
            if name not in self.user_vars:
                return self._shared(Variable(name))

    def _iri_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "iriref":
            self.advance()
            return iri(self._resolve(tok.value[1:-1]))
        if tok.kind == "pname":
            self.advance()
            prefix, _, local = tok.value.partition(":")
            if prefix not in self.prefixes:
                raise QueryParseError(f"unknown prefix {prefix!r}", tok.line, tok.col)
            return iri(self.prefixes[prefix] + local)
        if tok.kind == "word" and tok.value == "a":
            self.advance()
            return iri(RDF_TYPE)
        raise self.fail("expected an IRI")

    def _node(self) -> NodeRef:
        tok = self.peek()
        if tok.kind == "var":
            self.advance()
            return self._shared(Variable(tok.value[1:]))
        if tok.kind == "string":
            self.advance()
            try:
                value = _unescape(tok.value[1:-1], tok.line)
            except NTriplesParseError as exc:
                raise QueryParseError(str(exc), tok.line, tok.col) from None
            if self.peek().kind == "dtmark":
                self.advance()
                return self._shared(Bound(literal(value, datatype=self._iri_term().lexical)))
            if self.peek().kind == "langtag":
                lang = self.advance()
                return self._shared(Bound(literal(value, langtag=lang.value[1:])))
            return self._shared(Bound(literal(value)))
        if tok.kind in ("iriref", "pname") or (tok.kind == "word" and tok.value == "a"):
            return self._shared(Bound(self._iri_term()))
        raise self.fail("expected a variable, IRI or literal")

    def _shared(self, ref: NodeRef) -> NodeRef:
        # one NodeRef per variable name / per constant term across the query
        key = ("v", ref.name) if isinstance(ref, Variable) else ("b", ref.term)
        return self.nodes.setdefault(key, ref)


def parse_query(text: str) -> BasicGraphPattern:
    """Parse query text into a validated BasicGraphPattern.

    Raises QueryParseError (with position) on bad syntax,
    UnsupportedFeatureError for variable predicates, and PatternShapeError
    when the node skeleton is cyclic or disconnected.
    """
    return _Parser(text).parse()
