"""Exact queue number of a poset by branch and bound over linear extensions.

The search places elements one at a time, always from the current source
set. For the placed prefix it keeps ``depth_from[t]``: the largest rainbow
formed by completed edges (both ends placed) whose left end sits at position
t or later. Then

* the completed edges alone force ``depth_from[0]`` queues, and
* an open edge (source placed, target pending) whose source sits at position
  p will nest every completed edge that starts after p, so it forces
  ``1 + depth_from[p + 1]`` queues.

Subtrees whose bound reaches the incumbent are cut. The memo key is the set
of placed elements plus, in source order, each open edge with the depth it
already encloses; together with ``depth_from[0]`` this determines every
completion, so a state is skipped when the same key was seen with a smaller
or equal ``depth_from[0]``.
"""
import logging
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from errors import InconsistentConstraint, InvalidParameters
from extensions import TieBreak, lazy_extension, mru_extension, random_linear_extension
from poset_core import ChainDecomposition, LinearExtension, Poset, chain_decomposition
from rainbow import QueueLayout, poset_layout

logger = logging.getLogger(__name__)

ProgressHook = Callable[[int, int, int], None]


@dataclass(frozen=True)
class PrefixConstraint:
    pairs: Tuple[Tuple[str, str], ...] = ()


@dataclass
class SearchOptions:
    time_budget: Optional[float] = None
    node_budget: Optional[int] = None
    initial_upper: Optional[int] = None
    constraints: Optional[PrefixConstraint] = None
    prune: bool = True
    memo: bool = True
    memo_key_cap: int = 32
    memo_size_cap: int = 2_000_000
    jobs: int = 1
    progress: Optional[ProgressHook] = None
    progress_interval: int = 100_000


@dataclass
class SearchResult:
    lower_bound: int
    upper_bound: int
    certificate: Optional[QueueLayout]
    proven: bool
    explored: int
    leaves: int
    elapsed: float
    budget_exhausted: bool = False

    @property
    def exhausted(self) -> bool:
        """True iff the whole (constrained) extension space was covered."""
        return not self.budget_exhausted


@dataclass
class VerificationResult:
    verified: bool
    countermodel: Optional[QueueLayout]
    result: SearchResult


class _Stop(Exception):
    pass


class _Incumbent:
    """Best layout found so far; its cost only ever decreases."""

    def __init__(self, cost: int, order: List[int], cap: Optional[int]):
        self.cost = cost
        self.order = order
        self.cap = cap
        self._lock = threading.Lock()

    def target(self) -> int:
        return self.cost if self.cap is None else min(self.cost, self.cap)

    def offer(self, cost: int, order: List[int]):
        with self._lock:
            if cost < self.cost:
                self.cost = cost
                self.order = order
                logger.debug("New incumbent with %d queues", cost)


class _Budget:
    def __init__(self, options: SearchOptions, incumbent: _Incumbent, floor: int):
        self.options = options
        self.incumbent = incumbent
        self.floor = floor
        self.start = time.monotonic()
        self.nodes = 0
        self.leaves = 0
        self.exhausted = False
        self._next_report = options.progress_interval
        self._lock = threading.Lock()

    def charge(self, nodes: int, leaves: int, final: bool = False) -> bool:
        with self._lock:
            self.nodes += nodes
            self.leaves += leaves
            if final:
                return not self.exhausted
            if self.options.node_budget is not None and self.nodes >= self.options.node_budget:
                self.exhausted = True
            if self.options.time_budget is not None and time.monotonic() - self.start >= self.options.time_budget:
                self.exhausted = True
            if self.options.progress is not None and self.nodes >= self._next_report:
                self._next_report += self.options.progress_interval
                self.options.progress(self.nodes, self.floor, self.incumbent.cost)
            return not self.exhausted


class _Search:
    """One depth-first worker; owns its mutable prefix state and memo."""

    FLUSH = 512

    def __init__(self, poset: Poset, arcs: Sequence[Tuple[int, int]], options: SearchOptions,
                 incumbent: _Incumbent, budget: _Budget):
        n = poset.size
        self.n = n
        self.options = options
        self.incumbent = incumbent
        self.budget = budget
        self.edges = list(poset.cover_edges)
        self.in_edges: List[List[int]] = [[] for _ in range(n)]
        self.out_edges: List[List[int]] = [[] for _ in range(n)]
        for eid, (u, v) in enumerate(self.edges):
            self.in_edges[v].append(eid)
            self.out_edges[u].append(eid)
        blockers = [set(poset.predecessors[v]) for v in range(n)]
        for u, v in arcs:
            blockers[v].add(u)
        self.after: List[List[int]] = [[] for _ in range(n)]
        for v in range(n):
            for u in blockers[v]:
                self.after[u].append(v)
        self.pending = [len(b) for b in blockers]
        self.available = {v for v in range(n) if self.pending[v] == 0}
        self.position = [-1] * n
        self.order: List[int] = []
        self.placed = 0
        self.open_count = [0] * n
        self.depth_from = [0]
        self.undo: List[List[Tuple[int, int]]] = []
        self.memo: Optional[Dict] = {} if options.memo else None
        self.local_nodes = 0
        self.local_leaves = 0

    def place(self, v: int):
        p = len(self.order)
        self.order.append(v)
        self.position[v] = p
        self.placed |= 1 << v
        self.available.discard(v)
        for w in self.after[v]:
            self.pending[w] -= 1
            if self.pending[w] == 0:
                self.available.add(w)
        depth_from = self.depth_from
        depth_from.append(0)
        gains = [
            (self.position[self.edges[eid][0]], 1 + depth_from[self.position[self.edges[eid][0]] + 1])
            for eid in self.in_edges[v]
        ]
        changed = []
        for start, value in gains:
            t = start
            while t >= 0 and depth_from[t] < value:
                changed.append((t, depth_from[t]))
                depth_from[t] = value
                t -= 1
        self.undo.append(changed)
        for eid in self.in_edges[v]:
            self.open_count[self.edges[eid][0]] -= 1
        self.open_count[v] = len(self.out_edges[v])

    def unplace(self, v: int):
        self.open_count[v] = 0
        for eid in self.in_edges[v]:
            self.open_count[self.edges[eid][0]] += 1
        for t, old in reversed(self.undo.pop()):
            self.depth_from[t] = old
        self.depth_from.pop()
        for w in self.after[v]:
            if self.pending[w] == 0:
                self.available.discard(w)
            self.pending[w] += 1
        self.available.add(v)
        self.placed &= ~(1 << v)
        self.position[v] = -1
        self.order.pop()

    def bound(self) -> int:
        bound = self.depth_from[0]
        for p, u in enumerate(self.order):
            if self.open_count[u]:
                return max(bound, 1 + self.depth_from[p + 1])
        return bound

    def memo_key(self):
        key = []
        for p, u in enumerate(self.order):
            if not self.open_count[u]:
                continue
            enclosed = self.depth_from[p + 1]
            for eid in self.out_edges[u]:
                if self.position[self.edges[eid][1]] == -1:
                    key.append((eid, enclosed))
            if len(key) > self.options.memo_key_cap:
                return None
        return self.placed, tuple(key)

    def flush(self, final: bool = False):
        nodes, leaves = self.local_nodes, self.local_leaves
        self.local_nodes = self.local_leaves = 0
        if not self.budget.charge(nodes, leaves, final) and not final:
            raise _Stop()

    def dfs(self):
        self.local_nodes += 1
        if self.local_nodes >= self.FLUSH:
            self.flush()
        target = self.incumbent.target()
        if len(self.order) == self.n:
            self.local_leaves += 1
            if self.depth_from[0] < target:
                self.incumbent.offer(self.depth_from[0], list(self.order))
            return
        if self.options.prune and self.bound() >= target:
            return
        if self.memo is not None:
            key = self.memo_key()
            if key is not None:
                seen = self.memo.get(key)
                if seen is not None and seen <= self.depth_from[0]:
                    return
                if seen is not None or len(self.memo) < self.options.memo_size_cap:
                    self.memo[key] = self.depth_from[0]
        for v in sorted(self.available):
            self.place(v)
            self.dfs()
            self.unplace(v)
            if self.incumbent.target() <= self.budget.floor:
                return

    def run(self, first: Optional[int] = None):
        try:
            if first is None:
                self.dfs()
            else:
                self.place(first)
                self.dfs()
                self.unplace(first)
            self.flush(final=True)
        except _Stop:
            pass


def _constraint_arcs(poset: Poset, constraints: Optional[PrefixConstraint]) -> List[Tuple[int, int]]:
    if constraints is None:
        return []
    arcs = []
    for a, b in constraints.pairs:
        u, v = poset.index_of(a), poset.index_of(b)
        if u == v or poset.less(v, u):
            raise InconsistentConstraint((a, b))
        arcs.append((u, v))
    graph = poset.to_digraph()
    graph.add_edges_from(arcs)
    if not nx.is_directed_acyclic_graph(graph):
        u, v = arcs[-1]
        raise InconsistentConstraint((poset.name(u), poset.name(v)), "closes a cycle with the other constraints")
    return arcs


def _constrained_greedy(poset: Poset, chains: ChainDecomposition, arcs: Sequence[Tuple[int, int]]) -> List[int]:
    """MRU-style choice restricted to orders that respect the constraint arcs."""
    blockers = [set(poset.predecessors[v]) for v in range(poset.size)]
    for u, v in arcs:
        blockers[v].add(u)
    last_used = [-1] * len(chains)
    placed = set()
    order = []
    for step in range(poset.size):
        ready = [v for v in range(poset.size) if v not in placed and blockers[v] <= placed]
        chosen = max(ready, key=lambda v: (last_used[chains.chain_of[v]], -v))
        order.append(chosen)
        placed.add(chosen)
        last_used[chains.chain_of[chosen]] = step
    return order


def best_heuristic_layout(
    poset: Poset,
    strategies: Sequence[str] = ("lazy", "mru"),
    seeds: Sequence[int] = (),
    chains: Optional[ChainDecomposition] = None,
) -> QueueLayout:
    """Fewest-queue layout among the requested strategies; earlier strategies win ties."""
    chains = chains if chains is not None else chain_decomposition(poset)
    extensions: List[LinearExtension] = []
    for strategy in strategies:
        if strategy == "lazy":
            extensions.append(lazy_extension(poset, chains, TieBreak())[0])
        elif strategy == "mru":
            extensions.append(mru_extension(poset, chains, TieBreak())[0])
        elif strategy == "random":
            extensions += [random_linear_extension(poset, seed) for seed in seeds]
        else:
            raise InvalidParameters(f"Unknown strategy: {strategy!r}")
    if not extensions:
        raise InvalidParameters("No strategy produced an extension")
    best = None
    for extension in extensions:
        layout = poset_layout(poset, extension)
        if best is None or layout.queue_count < best.queue_count:
            best = layout
    return best


def queue_number_exact(poset: Poset, options: Optional[SearchOptions] = None) -> SearchResult:
    options = options or SearchOptions()
    started = time.monotonic()
    arcs = _constraint_arcs(poset, options.constraints)
    chains = chain_decomposition(poset)
    if arcs:
        start_order = _constrained_greedy(poset, chains, arcs)
        start_cost = poset_layout(poset, LinearExtension.build(poset, start_order)).queue_count
    else:
        layout = best_heuristic_layout(poset, ("mru", "lazy"), chains=chains)
        start_order, start_cost = list(layout.extension.order), layout.queue_count

    floor = 1 if poset.cover_edges else 0
    incumbent = _Incumbent(start_cost, start_order, options.initial_upper)
    budget = _Budget(options, incumbent, floor)
    logger.debug("Exact search on %d elements, incumbent %d, cap %s", poset.size, start_cost, options.initial_upper)

    if incumbent.target() > floor:
        root = _Search(poset, arcs, options, incumbent, budget)
        if options.jobs > 1 and len(root.available) > 1:
            firsts = sorted(root.available)
            workers = [_Search(poset, arcs, options, incumbent, budget) for _ in firsts]
            with ThreadPoolExecutor(max_workers=options.jobs) as pool:
                list(pool.map(lambda pair: pair[0].run(pair[1]), zip(workers, firsts)))
        else:
            root.run()

    certificate = poset_layout(poset, LinearExtension.build(poset, incumbent.order))
    assert certificate.queue_count == incumbent.cost
    assert all(certificate.extension.position[u] < certificate.extension.position[v] for u, v in arcs)
    lower = floor if budget.exhausted else max(floor, incumbent.target())
    proven = not budget.exhausted and lower == incumbent.cost
    return SearchResult(
        lower_bound=lower,
        upper_bound=incumbent.cost,
        certificate=certificate,
        proven=proven,
        explored=budget.nodes,
        leaves=budget.leaves,
        elapsed=time.monotonic() - started,
        budget_exhausted=budget.exhausted,
    )


def verify_lower_bound(poset: Poset, k: int, options: Optional[SearchOptions] = None) -> VerificationResult:
    """Check that every (constrained) linear extension needs at least k queues."""
    if k < 1:
        raise InvalidParameters(f"k must be >= 1, got {k}")
    options = replace(options or SearchOptions(), initial_upper=k)
    result = queue_number_exact(poset, options)
    if result.upper_bound < k:
        return VerificationResult(False, result.certificate, result)
    return VerificationResult(result.exhausted, None, result)


def count_linear_extensions(poset: Poset) -> int:
    full = (1 << poset.size) - 1
    below = poset.below

    @lru_cache(maxsize=None)
    def count(placed: int) -> int:
        if placed == full:
            return 1
        total = 0
        for v in range(poset.size):
            if not (placed >> v) & 1 and below[v] & ~placed == 0:
                total += count(placed | (1 << v))
        return total

    return count(0)


def interleaving_bound(chains: ChainDecomposition) -> int:
    """Number of interleavings of the chains, an upper bound on the extension count."""
    total = math.factorial(sum(len(c) for c in chains.chains))
    for chain in chains.chains:
        total //= math.factorial(len(chain))
    return total


def enumerate_linear_extensions(poset: Poset) -> Iterator[List[int]]:
    """Every linear extension, by recursive choice from the source set."""
    pending = [len(p) for p in poset.predecessors]
    order: List[int] = []

    def walk():
        if len(order) == poset.size:
            yield list(order)
            return
        for v in range(poset.size):
            if pending[v] != 0:
                continue
            pending[v] = -1
            for w in poset.successors[v]:
                pending[w] -= 1
            order.append(v)
            yield from walk()
            order.pop()
            for w in poset.successors[v]:
                pending[w] += 1
            pending[v] = 0

    yield from walk()


def naive_queue_number(poset: Poset) -> int:
    return min(
        poset_layout(poset, LinearExtension.build(poset, order, validate=False)).queue_count
        for order in enumerate_linear_extensions(poset)
    )
