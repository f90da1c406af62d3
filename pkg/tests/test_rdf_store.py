import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rdfcard import (
    MISSING_ID,
    DirectedPredicate,
    Direction,
    Graph,
    NTriplesParseError,
    Term,
    TermKind,
    blank,
    iri,
    literal,
    load_ntriples,
)

from conftest import FIXTURES, fx


def _names(g, ids):
    return [g.term(t).lexical.rsplit("#", 1)[1] for t in ids]


class TestLoading:
    def test_g1_counts(self, g1):
        assert g1.n_triples == 10
        # 9 nodes (a1 a2 b1 b2 c1 c2 d1 e1 e2) + 4 predicates (p q m n)
        assert g1.n_terms == 13

    def test_empty_input(self):
        g = load_ntriples("")
        assert g.n_triples == 0
        assert g.n_terms == 0

    def test_comments_and_blank_lines(self):
        text = "# header\n\n" + (FIXTURES / "g1.nt").read_text()
        assert load_ntriples(text).n_triples == 10

    def test_duplicate_line_deduplicated(self):
        text = (FIXTURES / "g1.nt").read_text()
        first = text.splitlines()[0]
        assert load_ntriples(text + first + "\n").n_triples == 10

    def test_ids_in_first_seen_order(self, g1):
        assert g1.term_id(fx("a1")) == 0
        assert g1.term_id(fx("p")) == 1
        assert g1.term_id(fx("b1")) == 2
        assert g1.term_id(fx("a2")) == 3

    def test_accepts_bytes_and_streams(self):
        data = (FIXTURES / "g2.nt").read_text()
        assert load_ntriples(data.encode()).n_triples == 8
        assert load_ntriples(io.StringIO(data)).n_triples == 8

    def test_unknown_term_is_missing(self, g1):
        assert g1.term_id(fx("nope")) == MISSING_ID


class TestParseErrors:
    @pytest.mark.parametrize(
        "line,lineno",
        [
            ("<http://a> <http://b>\n", 1),
            ("<http://a> <http://b> <http://c>\n", 1),
            ("# fine\n<http://a> nonsense <http://c> .\n", 2),
            ('<http://a> <http://b> "lit .\n', 1),
            ('"lit" <http://b> <http://c> .\n', 1),
            ("<http://a> _:b <http://c> .\n", 1),
            ("<http://a> <http://b> <http://c> . trailing\n", 1),
            ('<http://a> <http://b> "\\q" .\n', 1),
            ('<http://a> <http://b> "\\u12" .\n', 1),
        ],
    )
    def test_malformed_line_reports_line_number(self, line, lineno):
        with pytest.raises(NTriplesParseError) as exc:
            load_ntriples(line)
        assert exc.value.line_no == lineno
        assert f"line {lineno}" in str(exc.value)


class TestTermForms:
    def test_literal_variants(self):
        text = (
            '<http://s> <http://p> "plain" .\n'
            '<http://s> <http://p> "typed"^^<http://dt> .\n'
            '<http://s> <http://p> "tagged"@en-GB .\n'
            '_:b1 <http://p> "esc \\"x\\" \\n \\t \\u0041 \\U0001F600" .\n'
        )
        g = load_ntriples(text)
        assert g.n_triples == 4
        assert g.term_id(literal("plain")) != MISSING_ID
        assert g.term_id(literal("typed", datatype="http://dt")) != MISSING_ID
        assert g.term_id(literal("tagged", langtag="en-GB")) != MISSING_ID
        assert g.term_id(literal('esc "x" \n \t A \U0001F600')) != MISSING_ID
        assert g.term_id(blank("b1")) != MISSING_ID

    def test_term_equality_is_bit_exact(self):
        assert literal("1", datatype="http://dt") != literal("01", datatype="http://dt")
        assert literal("1", datatype="http://dt") != literal("1")
        assert iri("http://x") != blank("http://x".replace("://", "_"))

    def test_term_invariants(self):
        with pytest.raises(ValueError):
            Term(TermKind.IRI, "")
        with pytest.raises(ValueError):
            Term(TermKind.LITERAL, "x", datatype="http://dt", langtag="en")
        with pytest.raises(ValueError):
            Term(TermKind.IRI, "http://x", datatype="http://dt")


class TestNeighbors:
    def test_forward(self, g1):
        a2 = g1.term_id(fx("a2"))
        p = g1.term_id(fx("p"))
        out = g1.neighbors(a2, DirectedPredicate(p, Direction.FORWARD))
        assert _names(g1, out) == ["b1", "b2"]
        assert list(out) == sorted(out)

    def test_inverse(self, g1):
        d1 = g1.term_id(fx("d1"))
        m = g1.term_id(fx("m"))
        out = g1.neighbors(d1, DirectedPredicate(m, Direction.INVERSE))
        assert _names(g1, out) == ["c1", "c2"]

    def test_no_matching_triples(self, g1):
        e1 = g1.term_id(fx("e1"))
        p = g1.term_id(fx("p"))
        assert g1.neighbors(e1, DirectedPredicate(p, Direction.FORWARD)) == ()

    def test_unknown_predicate_matches_nothing(self, g1):
        a2 = g1.term_id(fx("a2"))
        assert g1.neighbors(a2, DirectedPredicate(MISSING_ID, Direction.FORWARD)) == ()

    def test_every_triple_in_both_indexes(self, g1):
        for s, p, o in g1.id_triples:
            assert o in g1.neighbors(s, DirectedPredicate(p, Direction.FORWARD))
            assert s in g1.neighbors(o, DirectedPredicate(p, Direction.INVERSE))

    def test_adjacency_totals(self, g1, g2):
        for g in (g1, g2):
            fwd_total, bwd_total = g.adjacency_totals()
            assert fwd_total == g.n_triples
            assert fwd_total + bwd_total == 2 * g.n_triples


class TestPredicateSets:
    def test_subjects_of(self, g1):
        p = g1.term_id(fx("p"))
        assert sorted(_names(g1, g1.subjects_of(p))) == ["a1", "a2"]

    def test_objects_of(self, g1):
        n = g1.term_id(fx("n"))
        assert sorted(_names(g1, g1.objects_of(n))) == ["e1", "e2"]

    def test_absent_predicate(self, g1):
        assert g1.subjects_of(MISSING_ID) == frozenset()
        assert g1.objects_of(MISSING_ID) == frozenset()


class TestRoundTrip:
    def test_fixtures_round_trip(self, g1, g2):
        for g in (g1, g2):
            again = load_ntriples(g.to_ntriples())
            assert set(again.iter_triples()) == set(g.iter_triples())


_iri_terms = st.builds(
    iri, st.text(st.characters(codec="utf-8", exclude_characters='<>"{}|^`\\ \t\n\r'), min_size=1, max_size=30)
)
_literal_terms = st.builds(
    literal,
    st.text(max_size=30),
    st.one_of(st.none(), st.just("http://dt/int")),
)
_lang_literals = st.builds(
    lambda v, tag: literal(v, langtag=tag), st.text(max_size=30), st.just("en-GB")
)
_blank_terms = st.builds(lambda n: blank(f"b{n}"), st.integers(0, 50))
_subjects = st.one_of(_iri_terms, _blank_terms)
_objects = st.one_of(_iri_terms, _blank_terms, _literal_terms, _lang_literals)


@given(st.lists(st.tuples(_subjects, _iri_terms, _objects), max_size=25))
def test_round_trip_arbitrary_terms(triples):
    g = Graph(triples)
    again = load_ntriples(g.to_ntriples())
    assert set(again.iter_triples()) == set(g.iter_triples())
    assert again.n_triples == g.n_triples
