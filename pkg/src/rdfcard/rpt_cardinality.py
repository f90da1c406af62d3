"""Embedding counts for rooted predicate trees, memoised through an LFU cache.

The count of a rooted tree is 1 for the empty tree, otherwise the product
over the root's tree edges of the sum, over the root's graph neighbours
along that edge, of the child subtree's count rooted there. Sub-counts are
looked up in a shared bounded LFU cache before being recomputed, so repeated
sub-patterns across queries are paid for once.

Counts are plain Python ints (unbounded): products of sums overflow 64 bits
on dense graphs and the probability model needs them exact.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass
from math import ceil

from .query_model import RPT, BasicGraphPattern, NodeRef, PredicateTree, build_predicate_tree
from .rdf_store import Graph, TermId

CacheKey = tuple[TermId, PredicateTree]


@dataclass(frozen=True, slots=True)
class CacheStats:
    hits: int
    misses: int

    @property
    def lookups(self) -> int:
        return self.hits + self.misses


class CardinalityCache:
    """Bounded LFU map from (root id, tree) to an embedding count.

    `get` bumps the entry's use frequency and records a hit or miss. When a
    new key arrives at capacity, the `ceil(eviction_rate * capacity)` least
    frequently used entries are evicted first, oldest-first within a
    frequency class. Operations are individually atomic.
    """

    def __init__(self, capacity: int = 100_000, eviction_rate: float = 0.1):
        if capacity < 1:
            raise ValueError(f"cache capacity must be >= 1, got {capacity}")
        if not 0 < eviction_rate <= 1:
            raise ValueError(f"eviction rate must be in (0, 1], got {eviction_rate}")
        self.capacity = capacity
        self.eviction_rate = eviction_rate
        self._lock = threading.Lock()
        self._values: dict[CacheKey, int] = {}
        self._freq: dict[CacheKey, int] = {}
        self._buckets: dict[int, OrderedDict[CacheKey, None]] = {}
        self._min_freq = 0
        self._hits = 0
        self._misses = 0
        self._evictions = 0

    def __len__(self) -> int:
        return len(self._values)

    def __contains__(self, key: CacheKey) -> bool:
        return key in self._values

    def get(self, root: TermId, tree: PredicateTree) -> int | None:
        with self._lock:
            key = (root, tree)
            value = self._values.get(key)
            if value is None:
                self._misses += 1
                return None
            self._hits += 1
            self._bump(key)
            return value

    def put(self, root: TermId, tree: PredicateTree, count: int) -> None:
        with self._lock:
            key = (root, tree)
            if key in self._values:
                self._values[key] = count
                return
            if len(self._values) >= self.capacity:
                self._evict_batch()
            self._values[key] = count
            self._freq[key] = 0
            self._buckets.setdefault(0, OrderedDict())[key] = None
            self._min_freq = 0

    def _bump(self, key: CacheKey) -> None:
        freq = self._freq[key]
        bucket = self._buckets[freq]
        del bucket[key]
        if not bucket:
            del self._buckets[freq]
            if self._min_freq == freq:
                self._min_freq = freq + 1
        self._freq[key] = freq + 1
        self._buckets.setdefault(freq + 1, OrderedDict())[key] = None

    def _evict_batch(self) -> None:
        batch = min(len(self._values), ceil(self.eviction_rate * self.capacity))
        for _ in range(batch):
            while self._min_freq not in self._buckets:
                self._min_freq += 1
            bucket = self._buckets[self._min_freq]
            key, _ = bucket.popitem(last=False)
            if not bucket:
                del self._buckets[self._min_freq]
            del self._values[key]
            del self._freq[key]
            self._evictions += 1

    def stats(self) -> CacheStats:
        return CacheStats(self._hits, self._misses)

    @property
    def evictions(self) -> int:
        return self._evictions


def cache_get(cache: CardinalityCache, root: TermId, tree: PredicateTree) -> int | None:
    return cache.get(root, tree)


def cache_put(cache: CardinalityCache, root: TermId, tree: PredicateTree, count: int) -> None:
    cache.put(root, tree, count)


@dataclass(slots=True)
class _Frame:
    root: TermId
    tree: PredicateTree
    edge_idx: int
    nbrs: tuple[TermId, ...]
    nbr_idx: int
    acc_sum: int
    acc_prod: int


def rpt_cardinality(g: Graph, rpt: RPT, cache: CardinalityCache) -> int:
    """Number of tree embeddings that map the root position to `rpt.root`."""
    return _evaluate(g, rpt.root, rpt.tree, cache)


def _evaluate(g: Graph, root: TermId, tree: PredicateTree, cache: CardinalityCache) -> int:
    if tree.is_empty():
        return 1
    # `local` keeps values computed (or fetched) during this evaluation so
    # correctness never depends on the shared cache retaining them.
    local: dict[CacheKey, int] = {}

    def lookup(r: TermId, t: PredicateTree) -> int | None:
        value = cache.get(r, t)
        if value is None:
            value = local.get((r, t))
        return value

    top = lookup(root, tree)
    if top is not None:
        return top
    frames = [_new_frame(g, root, tree)]
    ret: int | None = None
    while frames:
        frame = frames[-1]
        if ret is not None:
            frame.acc_sum += ret
            frame.nbr_idx += 1
            ret = None
        while True:
            if frame.nbr_idx < len(frame.nbrs):
                child = frame.tree.edges[frame.edge_idx][1]
                node = frame.nbrs[frame.nbr_idx]
                if child.is_empty():
                    frame.acc_sum += 1
                    frame.nbr_idx += 1
                    continue
                value = lookup(node, child)
                if value is not None:
                    frame.acc_sum += value
                    frame.nbr_idx += 1
                    continue
                frames.append(_new_frame(g, node, child))
                break
            frame.acc_prod *= frame.acc_sum
            frame.edge_idx += 1
            if frame.edge_idx < len(frame.tree.edges):
                frame.nbrs = g.neighbors(frame.root, frame.tree.edges[frame.edge_idx][0])
                frame.nbr_idx = 0
                frame.acc_sum = 0
                continue
            value = frame.acc_prod
            cache.put(frame.root, frame.tree, value)
            local[(frame.root, frame.tree)] = value
            frames.pop()
            ret = value
            break
    assert ret is not None
    return ret


def _new_frame(g: Graph, root: TermId, tree: PredicateTree) -> _Frame:
    nbrs = g.neighbors(root, tree.edges[0][0])
    return _Frame(root, tree, 0, nbrs, 0, 0, 1)


def candidate_roots(g: Graph, bgp: BasicGraphPattern, position: NodeRef) -> tuple[TermId, ...]:
    """Graph terms that can occupy `position` in some embedding candidate.

    The intersection, over the patterns incident to the position, of the
    subjects (resp. objects) of each pattern's predicate.
    """
    candidate_sets = []
    for idx, _ in bgp.incident(position):
        pat = bgp.patterns[idx]
        pid = g.term_id(pat.predicate)
        if pat.subject == position:
            candidate_sets.append(g.subjects_of(pid))
        else:
            candidate_sets.append(g.objects_of(pid))
    result = set(candidate_sets[0])
    for s in candidate_sets[1:]:
        result &= s
    return tuple(sorted(result))


def total_embeddings(
    g: Graph, bgp: BasicGraphPattern, position: NodeRef, cache: CardinalityCache
) -> int:
    """Total embeddings of the query's predicate skeleton.

    Sums the rooted-tree count at `position` over every graph term that can
    occupy it. Independent of the chosen position (a tested invariant).
    """
    tree = build_predicate_tree(g, bgp, position)
    return sum(_evaluate(g, v, tree, cache) for v in candidate_roots(g, bgp, position))
