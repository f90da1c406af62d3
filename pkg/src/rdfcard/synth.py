"""Synthetic graphs and queries for stress tests and benchmarks."""

from __future__ import annotations

import random

from .query_model import BasicGraphPattern, Bound, NodeRef, TriplePattern, Variable
from .rdf_store import Graph, Term, iri

SYN_NS = "http://example.org/syn#"


def syn_iri(name: str) -> Term:
    return iri(SYN_NS + name)


def random_graph(
    rng: random.Random,
    *,
    n_triples: int = 150,
    n_nodes: int = 40,
    n_predicates: int = 4,
) -> Graph:
    """A random triple set over a small node pool (overlaps are frequent)."""
    nodes = [syn_iri(f"n{i}") for i in range(n_nodes)]
    preds = [syn_iri(f"p{i}") for i in range(n_predicates)]
    triples: set[tuple[Term, Term, Term]] = set()
    for _ in range(n_triples * 4):
        if len(triples) >= n_triples:
            break
        triples.add((rng.choice(nodes), rng.choice(preds), rng.choice(nodes)))
    return Graph(triples)


def random_tree_bgp(
    rng: random.Random,
    g: Graph,
    *,
    max_patterns: int = 5,
    max_bound: int = 3,
) -> BasicGraphPattern:
    """A random tree-shaped query over `g`'s predicates.

    Bound values are mostly drawn from terms that occupy the position's
    incident index (so columns are often nonzero), sometimes from arbitrary
    graph nodes; distinct positions always receive distinct terms so binding
    never merges nodes.
    """
    pred_ids = sorted(g.predicates())
    n_patterns = rng.randint(1, max_patterns)
    nodes: list[NodeRef] = [Variable("v0")]
    patterns: list[TriplePattern] = []
    for i in range(1, n_patterns + 1):
        parent = rng.choice(nodes)
        child = Variable(f"v{i}")
        pred = g.term(rng.choice(pred_ids))
        if rng.random() < 0.5:
            patterns.append(TriplePattern(parent, pred, child))
        else:
            patterns.append(TriplePattern(child, pred, parent))
        nodes.append(child)

    n_bound = rng.randint(0, min(max_bound, len(nodes)))
    chosen = rng.sample(nodes, n_bound)
    substitution: dict[NodeRef, NodeRef] = {}
    used_terms: set[Term] = set()
    for node in chosen:
        pool: list[Term] = []
        if rng.random() < 0.7:
            for pat in patterns:
                if pat.subject == node:
                    pool.extend(g.term(t) for t in g.subjects_of(g.term_id(pat.predicate)))
                elif pat.object == node:
                    pool.extend(g.term(t) for t in g.objects_of(g.term_id(pat.predicate)))
        if not pool:
            pool = [g.term(t) for t in range(g.n_terms)]
        pool = [t for t in pool if t not in used_terms]
        if not pool:
            continue
        term = rng.choice(pool)
        used_terms.add(term)
        substitution[node] = Bound(term)

    def sub(node: NodeRef) -> NodeRef:
        return substitution.get(node, node)

    return BasicGraphPattern(
        TriplePattern(sub(p.subject), p.predicate, sub(p.object)) for p in patterns
    )


def paired_assignment_graph(
    rng: random.Random,
    *,
    n_subjects: int = 12,
    n_x: int = 3,
    n_y: int = 3,
) -> Graph:
    """Every subject gets one p-object and one q-object, drawn independently
    and uniformly. The two-bound-node star query over such data satisfies the
    model's independence assumption by construction.
    """
    triples = []
    for i in range(n_subjects):
        s = syn_iri(f"s{i}")
        triples.append((s, syn_iri("p"), syn_iri(f"x{rng.randrange(n_x)}")))
        triples.append((s, syn_iri("q"), syn_iri(f"y{rng.randrange(n_y)}")))
    return Graph(triples)


def layered_chain_graph(
    rng: random.Random,
    *,
    n_layers: int = 6,
    layer_width: int = 10_000,
    triples_per_layer: int = 20_000,
) -> Graph:
    """Layered data where predicate pK links layer K to layer K+1."""
    triples: set[tuple[Term, Term, Term]] = set()
    for layer in range(n_layers - 1):
        pred = syn_iri(f"p{layer + 1}")
        added = 0
        for _ in range(triples_per_layer * 4):
            if added >= triples_per_layer:
                break
            u = syn_iri(f"L{layer}_{rng.randrange(layer_width)}")
            v = syn_iri(f"L{layer + 1}_{rng.randrange(layer_width)}")
            before = len(triples)
            triples.add((u, pred, v))
            added += len(triples) - before
    return Graph(triples)
