"""Dictionary-encoded RDF graph loaded from N-Triples, with adjacency indexes.

A graph is immutable once loaded: terms are interned to dense integer ids in
first-seen order, duplicate triples collapse (set semantics), and adjacency
in both directions is precomputed so a neighbour query costs one dict lookup
returning an already-sorted tuple of ids.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import IO, Iterable, Iterator

TermId = int

MISSING_ID: TermId = -1
"""Sentinel id for terms that are absent from a graph's dictionary.

Lookups against a graph with this id match nothing, which is exactly the
semantics wanted for query constants that never occur in the data.
"""

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"


class TermKind(Enum):
    IRI = "iri"
    LITERAL = "literal"
    BLANK = "blank"


class Direction(IntEnum):
    FORWARD = 0
    INVERSE = 1


@dataclass(frozen=True, slots=True)
class Term:
    """An RDF term, compared bit-exactly (no datatype-value normalisation)."""

    kind: TermKind
    lexical: str
    datatype: str | None = None
    langtag: str | None = None

    def __post_init__(self) -> None:
        if self.kind is TermKind.IRI and not self.lexical:
            raise ValueError("IRI term requires a non-empty lexical form")
        if self.kind is not TermKind.LITERAL and not (
            self.datatype is None and self.langtag is None
        ):
            raise ValueError("only literals may carry a datatype or language tag")
        if self.datatype is not None and self.langtag is not None:
            raise ValueError("a literal carries at most one of datatype/langtag")

    def ntriples(self) -> str:
        """Serialize to N-Triples token form."""
        if self.kind is TermKind.IRI:
            return f"<{self.lexical}>"
        if self.kind is TermKind.BLANK:
            return f"_:{self.lexical}"
        quoted = '"%s"' % _escape_literal(self.lexical)
        if self.datatype is not None:
            return f"{quoted}^^<{self.datatype}>"
        if self.langtag is not None:
            return f"{quoted}@{self.langtag}"
        return quoted


def iri(value: str) -> Term:
    return Term(TermKind.IRI, value)


def literal(value: str, datatype: str | None = None, langtag: str | None = None) -> Term:
    return Term(TermKind.LITERAL, value, datatype, langtag)


def blank(label: str) -> Term:
    return Term(TermKind.BLANK, label)


@dataclass(frozen=True, slots=True, order=True)
class DirectedPredicate:
    """A predicate id plus traversal direction; Inverse walks object -> subject."""

    predicate: TermId
    direction: Direction


class NTriplesParseError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class Graph:
    """Immutable, dictionary-encoded triple set with two-way adjacency indexes."""

    __slots__ = (
        "_terms", "_ids", "_triples", "_fwd", "_bwd",
        "_pred_pairs", "_subjects", "_objects",
    )

    def __init__(self, triples: Iterable[tuple[Term, Term, Term]]):
        self._terms: list[Term] = []
        self._ids: dict[Term, TermId] = {}
        id_triples: set[tuple[TermId, TermId, TermId]] = set()
        for s, p, o in triples:
            id_triples.add((self._intern(s), self._intern(p), self._intern(o)))
        self._triples = frozenset(id_triples)

        fwd: dict[tuple[TermId, TermId], list[TermId]] = {}
        bwd: dict[tuple[TermId, TermId], list[TermId]] = {}
        pairs: dict[TermId, list[tuple[TermId, TermId]]] = {}
        subjects: dict[TermId, set[TermId]] = {}
        objects: dict[TermId, set[TermId]] = {}
        # iterating in sorted (s, p, o) order leaves every adjacency list sorted
        for s, p, o in sorted(id_triples):
            fwd.setdefault((s, p), []).append(o)
            pairs.setdefault(p, []).append((s, o))
            subjects.setdefault(p, set()).add(s)
            objects.setdefault(p, set()).add(o)
        for s, p, o in sorted(id_triples, key=lambda t: (t[2], t[1], t[0])):
            bwd.setdefault((o, p), []).append(s)
        self._fwd = {k: tuple(v) for k, v in fwd.items()}
        self._bwd = {k: tuple(v) for k, v in bwd.items()}
        self._pred_pairs = {k: tuple(v) for k, v in pairs.items()}
        self._subjects = {k: frozenset(v) for k, v in subjects.items()}
        self._objects = {k: frozenset(v) for k, v in objects.items()}

    def _intern(self, term: Term) -> TermId:
        tid = self._ids.get(term)
        if tid is None:
            tid = len(self._terms)
            self._ids[term] = tid
            self._terms.append(term)
        return tid

    # -- dictionary ---------------------------------------------------------

    def term_id(self, term: Term) -> TermId:
        """Id of `term`, or MISSING_ID when the term never occurs in the data."""
        return self._ids.get(term, MISSING_ID)

    def term(self, tid: TermId) -> Term:
        if not 0 <= tid < len(self._terms):
            raise KeyError(f"unknown term id {tid}")
        return self._terms[tid]

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    @property
    def n_triples(self) -> int:
        return len(self._triples)

    @property
    def id_triples(self) -> frozenset[tuple[TermId, TermId, TermId]]:
        return self._triples

    def predicates(self) -> frozenset[TermId]:
        return frozenset(self._pred_pairs)

    # -- adjacency ----------------------------------------------------------

    def neighbors(self, node: TermId, edge: DirectedPredicate) -> tuple[TermId, ...]:
        """Nodes reachable from `node` over `edge`, ascending by id.

        Unknown node or predicate ids simply have no neighbours.
        """
        if edge.direction is Direction.FORWARD:
            return self._fwd.get((node, edge.predicate), ())
        return self._bwd.get((node, edge.predicate), ())

    def subjects_of(self, predicate: TermId) -> frozenset[TermId]:
        return self._subjects.get(predicate, frozenset())

    def objects_of(self, predicate: TermId) -> frozenset[TermId]:
        return self._objects.get(predicate, frozenset())

    def triple_pairs(self, predicate: TermId) -> tuple[tuple[TermId, TermId], ...]:
        """All (subject, object) pairs of triples with the given predicate."""
        return self._pred_pairs.get(predicate, ())

    def has_triple(self, s: TermId, p: TermId, o: TermId) -> bool:
        return (s, p, o) in self._triples

    def adjacency_totals(self) -> tuple[int, int]:
        """(sum of forward list lengths, sum of backward list lengths)."""
        return (
            sum(len(v) for v in self._fwd.values()),
            sum(len(v) for v in self._bwd.values()),
        )

    # -- serialization ------------------------------------------------------

    def iter_triples(self) -> Iterator[tuple[Term, Term, Term]]:
        for s, p, o in sorted(self._triples):
            yield self._terms[s], self._terms[p], self._terms[o]

    def to_ntriples(self) -> str:
        lines = [
            f"{s.ntriples()} {p.ntriples()} {o.ntriples()} ."
            for s, p, o in self.iter_triples()
        ]
        return "\n".join(lines) + ("\n" if lines else "")


# -- N-Triples parsing --------------------------------------------------------

_IRI_RE = re.compile(
    r'<((?:[^\x00-\x20<>"{}|^`\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*)>'
)
_BLANK_RE = re.compile(r"_:([A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)")
_STRING_RE = re.compile(r'"((?:[^"\\\n\r]|\\.)*)"')
_LANG_RE = re.compile(r"@([A-Za-z]+(?:-[A-Za-z0-9]+)*)")

_ECHAR = {
    "t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
    '"': '"', "'": "'", "\\": "\\",
}

_LITERAL_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _escape_literal(value: str) -> str:
    if not any(c in value for c in _LITERAL_ESCAPES):
        return value
    return "".join(_LITERAL_ESCAPES.get(c, c) for c in value)


def _unescape(raw: str, line_no: int) -> str:
    if "\\" not in raw:
        return raw
    out: list[str] = []
    i = 0
    n = len(raw)
    while i < n:
        ch = raw[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= n:
            raise NTriplesParseError("dangling escape at end of term", line_no)
        code = raw[i + 1]
        if code in ("u", "U"):
            width = 4 if code == "u" else 8
            hexits = raw[i + 2 : i + 2 + width]
            if len(hexits) < width:
                raise NTriplesParseError(f"truncated \\{code} escape", line_no)
            try:
                out.append(chr(int(hexits, 16)))
            except (ValueError, OverflowError) as exc:
                raise NTriplesParseError(f"bad \\{code} escape: {hexits!r}", line_no) from exc
            i += 2 + width
            continue
        if code in _ECHAR:
            out.append(_ECHAR[code])
            i += 2
            continue
        raise NTriplesParseError(f"unknown escape \\{code}", line_no)
    return "".join(out)


def _skip_ws(line: str, pos: int) -> int:
    n = len(line)
    while pos < n and line[pos] in " \t":
        pos += 1
    return pos


def _parse_term(line: str, pos: int, line_no: int, *, role: str) -> tuple[Term, int]:
    m = _IRI_RE.match(line, pos)
    if m:
        return iri(_unescape(m.group(1), line_no)), m.end()
    m = _BLANK_RE.match(line, pos)
    if m:
        if role == "predicate":
            raise NTriplesParseError("blank node is not allowed as predicate", line_no)
        return blank(m.group(1)), m.end()
    m = _STRING_RE.match(line, pos)
    if m:
        if role != "object":
            raise NTriplesParseError(f"literal is not allowed as {role}", line_no)
        value = _unescape(m.group(1), line_no)
        pos = m.end()
        if line.startswith("^^", pos):
            dt = _IRI_RE.match(line, pos + 2)
            if not dt:
                raise NTriplesParseError("expected datatype IRI after ^^", line_no)
            return literal(value, datatype=_unescape(dt.group(1), line_no)), dt.end()
        lang = _LANG_RE.match(line, pos)
        if lang:
            return literal(value, langtag=lang.group(1)), lang.end()
        return literal(value), pos
    raise NTriplesParseError(f"expected {role} term at column {pos + 1}", line_no)


def _parse_line(line: str, line_no: int) -> tuple[Term, Term, Term] | None:
    pos = _skip_ws(line, 0)
    if pos == len(line) or line[pos] == "#":
        return None
    s, pos = _parse_term(line, pos, line_no, role="subject")
    pos = _skip_ws(line, pos)
    p, pos = _parse_term(line, pos, line_no, role="predicate")
    if p.kind is not TermKind.IRI:
        raise NTriplesParseError("predicate must be an IRI", line_no)
    pos = _skip_ws(line, pos)
    o, pos = _parse_term(line, pos, line_no, role="object")
    pos = _skip_ws(line, pos)
    if pos == len(line) or line[pos] != ".":
        raise NTriplesParseError("expected '.' after object", line_no)
    pos = _skip_ws(line, pos + 1)
    if pos != len(line) and line[pos] != "#":
        raise NTriplesParseError("unexpected content after '.'", line_no)
    return s, p, o


def load_ntriples(source: str | bytes | IO[str] | IO[bytes]) -> Graph:
    """Parse N-Triples content into a Graph.

    `source` is document content (str/bytes) or a file-like object, one
    triple per line, `#` comment lines allowed. Strings are content, not
    paths. Malformed lines raise NTriplesParseError with the line number;
    empty input yields an empty graph.
    """
    data = source.read() if hasattr(source, "read") else source
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    triples = []
    for line_no, line in enumerate(data.split("\n"), start=1):
        if line.endswith("\r"):
            line = line[:-1]
        parsed = _parse_line(line, line_no)
        if parsed is not None:
            triples.append(parsed)
    return Graph(triples)
