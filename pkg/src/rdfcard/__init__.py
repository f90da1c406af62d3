"""Cardinality estimation for conjunctive RDF queries via subgraph overlap.

The estimator counts exact embeddings of a query's predicate skeleton, turns
each bound node into a column constraint, and derives the probability
distribution of the result cardinality with exact rational arithmetic. A
brute-force oracle ships alongside for validation.
"""

from .estimator import Estimate, estimate, evaluate
from .oracle import enumerate_distribution, execute_bgp
from .overlap_probability import (
    CardinalityDistribution,
    ColumnConstraints,
    mean,
    mode,
    n_column,
    reduce_columns,
    two_column,
)
from .query_model import (
    EMPTY_TREE,
    RPT,
    BasicGraphPattern,
    Bound,
    NodeRef,
    PatternShapeError,
    PredicateTree,
    QueryParseError,
    TriplePattern,
    UnsupportedFeatureError,
    Variable,
    build_predicate_tree,
    intern_tree,
    parse_query,
    rpt_of,
    subtree,
    tree_hash,
)
from .rdf_store import (
    MISSING_ID,
    DirectedPredicate,
    Direction,
    Graph,
    NTriplesParseError,
    Term,
    TermId,
    TermKind,
    blank,
    iri,
    literal,
    load_ntriples,
)
from .rpt_cardinality import (
    CacheStats,
    CardinalityCache,
    cache_get,
    cache_put,
    candidate_roots,
    rpt_cardinality,
    total_embeddings,
)

__version__ = "0.1.0"

__all__ = [
    "MISSING_ID",
    "EMPTY_TREE",
    "RPT",
    "BasicGraphPattern",
    "Bound",
    "CacheStats",
    "CardinalityCache",
    "CardinalityDistribution",
    "ColumnConstraints",
    "DirectedPredicate",
    "Direction",
    "Estimate",
    "Graph",
    "NTriplesParseError",
    "NodeRef",
    "PatternShapeError",
    "PredicateTree",
    "QueryParseError",
    "Term",
    "TermId",
    "TermKind",
    "TriplePattern",
    "UnsupportedFeatureError",
    "Variable",
    "blank",
    "build_predicate_tree",
    "cache_get",
    "cache_put",
    "candidate_roots",
    "enumerate_distribution",
    "estimate",
    "evaluate",
    "execute_bgp",
    "intern_tree",
    "iri",
    "literal",
    "load_ntriples",
    "mean",
    "mode",
    "n_column",
    "parse_query",
    "reduce_columns",
    "rpt_cardinality",
    "rpt_of",
    "subtree",
    "total_embeddings",
    "tree_hash",
    "two_column",
]
