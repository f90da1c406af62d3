"""End-to-end cardinality estimation: counts, short-circuits, distribution.

Queries with at most one bound node are answered exactly from the embedding
counts. With more bound nodes, each contributes a column; a zero column or
columns reduced away (full columns, i.e. the value occurs in every
embedding) keep the answer exact, and only genuinely partial columns produce
a probability distribution, whose mode becomes the point estimate.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from math import fsum, sqrt
from typing import Sequence

from .oracle import execute_bgp
from .overlap_probability import (
    CardinalityDistribution,
    ColumnConstraints,
    mean,
    mode,
    n_column,
    reduce_columns,
)
from .query_model import BasicGraphPattern, Bound, rpt_of
from .rdf_store import Graph
from .rpt_cardinality import CacheStats, CardinalityCache, rpt_cardinality, total_embeddings


@dataclass(frozen=True, slots=True)
class Estimate:
    """Point estimate plus everything needed to audit it."""

    point: int
    exact: bool
    mean: Fraction
    distribution: CardinalityDistribution | None
    m: int
    columns: tuple[tuple[str, int], ...]
    cardinality_micros: int
    probability_micros: int
    cache_stats: CacheStats

    @property
    def timings(self) -> tuple[int, int]:
        return (self.cardinality_micros, self.probability_micros)

    def to_report(
        self,
        query_id: str | None = None,
        *,
        with_distribution: bool = False,
        true_card: int | None = None,
    ) -> dict:
        row: dict = {}
        if query_id is not None:
            row["query_id"] = query_id
        row["point"] = self.point
        row["exact"] = self.exact
        row["mean"] = str(self.mean)
        if with_distribution and self.distribution is not None:
            row["distribution"] = self.distribution.to_json_dict()
        if true_card is not None:
            row["true_card"] = true_card
        row["m"] = self.m
        row["columns"] = [[label, count] for label, count in self.columns]
        row["cache_hits"] = self.cache_stats.hits
        row["cache_misses"] = self.cache_stats.misses
        row["timings"] = {
            "cardinality_micros": self.cardinality_micros,
            "probability_micros": self.probability_micros,
        }
        return row


def estimate(g: Graph, bgp: BasicGraphPattern, cache: CardinalityCache) -> Estimate:
    """Estimate the result cardinality of `bgp` over `g`.

    Exact whenever the answer is forced: no bound node (the answer is the
    skeleton's embedding count), a single bound node (one rooted-tree
    count), a zero column, or all columns full save at most one.
    """
    t0 = time.perf_counter_ns()
    bound = bgp.bound_nodes
    anchor = bound[0] if bound else bgp.nodes[0]
    m = total_embeddings(g, bgp, anchor, cache)
    columns = [
        (node, rpt_cardinality(g, rpt_of(g, bgp, node), cache)) for node in bound
    ]
    t1 = time.perf_counter_ns()

    distribution: CardinalityDistribution | None = None
    if not bound:
        point, exact = m, True
    elif len(bound) == 1:
        point, exact = columns[0][1], True
    elif any(count == 0 for _, count in columns):
        point, exact = 0, True
    else:
        reduced = reduce_columns(ColumnConstraints(m, tuple(c for _, c in columns)))
        if len(reduced.columns) == 0:
            point, exact = m, True
        elif len(reduced.columns) == 1:
            point, exact = reduced.columns[0], True
        else:
            distribution = n_column(reduced)
            point, exact = mode(distribution), False
    mean_value = Fraction(point) if distribution is None else mean(distribution)
    t2 = time.perf_counter_ns()

    labels = tuple(
        (node.term.ntriples(), count)
        for node, count in columns
        if isinstance(node, Bound)
    )
    return Estimate(
        point=point,
        exact=exact,
        mean=mean_value,
        distribution=distribution,
        m=m,
        columns=labels,
        cardinality_micros=(t1 - t0) // 1000,
        probability_micros=(t2 - t1) // 1000,
        cache_stats=cache.stats(),
    )


def evaluate(
    g: Graph,
    queries: Sequence[BasicGraphPattern | Exception],
    cache: CardinalityCache,
    *,
    query_ids: Sequence[str] | None = None,
    with_distribution: bool = False,
) -> dict:
    """Estimate every query, compare against brute-force truth, aggregate.

    Entries that are exceptions (e.g. parse failures collected by a caller)
    or that fail during estimation become rows marked skipped with a reason.
    The aggregate reports the mean true and estimated cardinalities and the
    Pearson correlation between them.
    """
    ids = list(query_ids) if query_ids is not None else [
        f"q{i + 1}" for i in range(len(queries))
    ]
    rows: list[dict] = []
    truths: list[int] = []
    points: list[int] = []
    for qid, bgp in zip(ids, queries):
        if isinstance(bgp, Exception):
            rows.append({"query_id": qid, "skipped": True, "reason": str(bgp)})
            continue
        try:
            est = estimate(g, bgp, cache)
            truth = execute_bgp(g, bgp)
        except ValueError as exc:
            rows.append({"query_id": qid, "skipped": True, "reason": str(exc)})
            continue
        rows.append(
            est.to_report(qid, with_distribution=with_distribution, true_card=truth)
        )
        truths.append(truth)
        points.append(est.point)
    pearson, note = _pearson(truths, points)
    aggregate: dict = {
        "n": len(points),
        "mean_true": fsum(truths) / len(truths) if truths else None,
        "mean_estimate": fsum(points) / len(points) if points else None,
        "pearson": pearson,
    }
    if note is not None:
        aggregate["correlation_note"] = note
    return {"rows": rows, "aggregate": aggregate}


def _pearson(xs: Sequence[int], ys: Sequence[int]) -> tuple[float | None, str | None]:
    n = len(xs)
    if n < 2:
        return None, "insufficient data"
    mx = fsum(xs) / n
    my = fsum(ys) / n
    sxx = fsum((x - mx) ** 2 for x in xs)
    syy = fsum((y - my) ** 2 for y in ys)
    if sxx == 0.0 or syy == 0.0:
        return 1.0, "zero variance; correlation reported as 1 by convention"
    sxy = fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / sqrt(sxx * syy), None
