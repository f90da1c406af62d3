"""Exact distribution of the all-matched row count in column-constrained binary matrices.

The model: a query with n bound nodes is scored against the m embeddings of
its predicate skeleton. Each bound node contributes a column holding 1 for
the embeddings that carry its value; the result cardinality is the number of
all-1 rows. Assuming the 1s of a column land uniformly over the rows, two
columns follow a hypergeometric law and more columns chain by convolving the
intermediate overlap count with the next column.

All arithmetic is exact (`fractions.Fraction` over unbounded ints); only row
counts beyond 10**6 switch to a log-space floating-point evaluation with the
result re-normalised so probabilities still sum to exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, exp, fsum, lgamma
from typing import Sequence

_EXACT_ROW_LIMIT = 10**6


@dataclass(frozen=True, slots=True)
class ColumnConstraints:
    """Row count plus per-column sums; every column sum must be within [0, m]."""

    m: int
    columns: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.m < 0:
            raise ValueError(f"row count must be non-negative, got {self.m}")
        for c in self.columns:
            if not 0 <= c <= self.m:
                raise ValueError(f"column sum {c} outside [0, {self.m}]")


@dataclass(frozen=True, slots=True)
class CardinalityDistribution:
    """Probability mass over result counts, dense from `support_min` upward."""

    support_min: int
    probabilities: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.probabilities:
            raise ValueError("a distribution needs at least one entry")

    @property
    def support_max(self) -> int:
        return self.support_min + len(self.probabilities) - 1

    def probability(self, count: int) -> Fraction:
        if self.support_min <= count <= self.support_max:
            return self.probabilities[count - self.support_min]
        return Fraction(0)

    def items(self) -> list[tuple[int, Fraction]]:
        return [(self.support_min + i, p) for i, p in enumerate(self.probabilities)]

    def total(self) -> Fraction:
        return sum(self.probabilities, Fraction(0))

    @classmethod
    def point_mass(cls, count: int) -> "CardinalityDistribution":
        return cls(count, (Fraction(1),))

    def to_json_dict(self) -> dict:
        return {
            "min": self.support_min,
            "p": [f"{p.numerator}/{p.denominator}" for p in self.probabilities],
        }


def _check_column(m: int, c: int) -> None:
    if not 0 <= c <= m:
        raise ValueError(f"column sum {c} outside [0, {m}]")


def two_column(m: int, c1: int, c2: int) -> CardinalityDistribution:
    """Overlap distribution of two columns with sums c1, c2 over m rows.

    P(T) = C(c1, T) * C(m - c1, c2 - T) / C(m, c2) on
    T in [max(0, c1 + c2 - m), min(c1, c2)] -- the hypergeometric law,
    symmetric in c1 and c2.
    """
    if m < 0:
        raise ValueError(f"row count must be non-negative, got {m}")
    _check_column(m, c1)
    _check_column(m, c2)
    lo = max(0, c1 + c2 - m)
    hi = min(c1, c2)
    if m > _EXACT_ROW_LIMIT:
        return _two_column_log(m, c1, c2, lo, hi)
    denom = comb(m, c2)
    probs = tuple(
        Fraction(comb(c1, t) * comb(m - c1, c2 - t), denom) for t in range(lo, hi + 1)
    )
    return CardinalityDistribution(lo, probs)


def _log_comb(n: int, k: int) -> float:
    return lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)


def _two_column_log(m: int, c1: int, c2: int, lo: int, hi: int) -> CardinalityDistribution:
    logs = [
        _log_comb(c1, t) + _log_comb(m - c1, c2 - t) - _log_comb(m, c2)
        for t in range(lo, hi + 1)
    ]
    peak = max(logs)
    weights = [Fraction(exp(l - peak)) for l in logs]
    total = sum(weights, Fraction(0))
    return CardinalityDistribution(lo, tuple(w / total for w in weights))


def reduce_columns(constraints: ColumnConstraints) -> ColumnConstraints:
    """Drop full columns (sum == m): they cannot change the all-1 row count."""
    kept = tuple(c for c in constraints.columns if c != constraints.m)
    return ColumnConstraints(constraints.m, kept)


def n_column(constraints: ColumnConstraints) -> CardinalityDistribution:
    """Overlap distribution across any number of columns.

    Full columns are dropped first. No column left forces T = m and a single
    column forces T = that sum; otherwise columns chain pairwise: the running
    overlap count acts as the first column of the next two-column step. The
    result does not depend on the chaining order; columns are processed in
    ascending order only to keep intermediate supports small.
    """
    m = constraints.m
    remaining = sorted(reduce_columns(constraints).columns)
    if not remaining:
        return CardinalityDistribution.point_mass(m)
    if len(remaining) == 1:
        return CardinalityDistribution.point_mass(remaining[0])
    dist = two_column(m, remaining[0], remaining[1])
    for c in remaining[2:]:
        acc: dict[int, Fraction] = {}
        for i, p in enumerate(dist.probabilities):
            if p == 0:
                continue
            step = two_column(m, dist.support_min + i, c)
            for j, q in enumerate(step.probabilities):
                t = step.support_min + j
                acc[t] = acc.get(t, Fraction(0)) + p * q
        dist = _from_mass(acc)
    return dist


def _from_mass(mass: dict[int, Fraction]) -> CardinalityDistribution:
    nonzero = [t for t, p in mass.items() if p != 0]
    lo, hi = min(nonzero), max(nonzero)
    probs = tuple(mass.get(t, Fraction(0)) for t in range(lo, hi + 1))
    return CardinalityDistribution(lo, probs)


def mode(dist: CardinalityDistribution) -> int:
    """Smallest count with maximal probability."""
    best_i = max(range(len(dist.probabilities)), key=lambda i: (dist.probabilities[i], -i))
    return dist.support_min + best_i


def mean(dist: CardinalityDistribution) -> Fraction:
    return sum(
        (Fraction(dist.support_min + i) * p for i, p in enumerate(dist.probabilities)),
        Fraction(0),
    )
