"""Lazy and MRU linear extensions, and checkers for both strategies.

Both strategies walk the cover DAG keeping the current source set S
(elements whose predecessors are all placed). Every chain contributes at
most one element to S because the unplaced part of a chain has a unique
minimum.
"""
import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from errors import InvalidDecomposition, InvalidParameters, NotAnIdeal
from poset_core import ChainDecomposition, ElementRef, LinearExtension, Poset, chain_decomposition

logger = logging.getLogger(__name__)

SAME_CHAIN = "same-chain"
MOST_RECENT_CHAIN = "most-recent-chain"
TIE_BREAK = "tie-break"

MIN_INDEX = "min_index"
SEEDED_RANDOM = "seeded_random"
REPLAY = "replay"

# Compares the incremental recency bookkeeping of MRU with a literal backward
# scan of the placed prefix at every step.
CHECK_RECENCY_SCAN = __debug__


@dataclass(frozen=True)
class TieBreak:
    mode: str = MIN_INDEX
    seed: int = 0
    reference: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.mode not in (MIN_INDEX, SEEDED_RANDOM, REPLAY):
            raise InvalidParameters(f"Unknown tie-break mode: {self.mode!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidParameters(f"Seed must be a 64-bit unsigned integer, got {self.seed}")

    @classmethod
    def seeded(cls, seed: int) -> "TieBreak":
        return cls(mode=SEEDED_RANDOM, seed=seed)

    @classmethod
    def replay(cls, order: Sequence[str]) -> "TieBreak":
        """Prefer the candidate that appears earliest in ``order``."""
        return cls(mode=REPLAY, reference=tuple(order))

    def chooser(self, poset: Poset) -> Callable[[Sequence[int]], int]:
        if self.mode == SEEDED_RANDOM:
            rng = random.Random(self.seed)
            return lambda candidates: rng.choice(sorted(candidates))
        if self.mode == REPLAY:
            rank = {poset.index_of(name): k for k, name in enumerate(self.reference)}
            return lambda candidates: min(candidates, key=lambda v: (rank.get(v, len(rank)), v))
        return min


@dataclass(frozen=True)
class TraceStep:
    sources: Tuple[int, ...]
    chosen: int
    reason: str
    chain: Optional[int] = None


@dataclass
class StrategyTrace:
    steps: List[TraceStep] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def reasons(self) -> List[str]:
        return [step.reason for step in self.steps]


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a strategy check; ``step`` is the 1-based position of the first violation."""

    ok: bool
    step: Optional[int] = None
    expected: Optional[str] = None
    actual: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def sources(poset: Poset, placed: Iterable[ElementRef]) -> Set[int]:
    mask = 0
    members = [poset.index_of(ref) for ref in placed]
    for v in members:
        mask |= 1 << v
    for v in members:
        if poset.below[v] & ~mask:
            raise NotAnIdeal(poset.name(v))
    return {
        v
        for v in range(poset.size)
        if not (mask >> v) & 1 and all((mask >> u) & 1 for u in poset.predecessors[v])
    }


def _check_decomposition(poset: Poset, chains: Optional[ChainDecomposition]) -> ChainDecomposition:
    if chains is None:
        return chain_decomposition(poset)
    if len(chains.chain_of) != poset.size:
        raise InvalidDecomposition(
            f"Decomposition covers {len(chains.chain_of)} elements, poset has {poset.size}"
        )
    members = sorted(v for chain in chains.chains for v in chain)
    if members != list(range(poset.size)):
        raise InvalidDecomposition("Chains do not partition the elements")
    for c, chain in enumerate(chains.chains):
        for v in chain:
            if chains.chain_of[v] != c:
                raise InvalidDecomposition(
                    f"chain_of places {poset.name(v)!r} on chain {chains.chain_of[v]}, but chain {c} holds it"
                )
        for a, b in zip(chain, chain[1:]):
            if not poset.less(a, b):
                raise InvalidDecomposition(f"{poset.name(a)!r} and {poset.name(b)!r} are not ordered")
    return chains


class _SourceTracker:
    """Maintains S incrementally while elements are placed."""

    def __init__(self, poset: Poset, chains: ChainDecomposition):
        self.poset = poset
        self.chains = chains
        self.pending = [len(p) for p in poset.predecessors]
        self.available = {v for v in range(poset.size) if self.pending[v] == 0}

    def by_chain(self) -> Dict[int, int]:
        found = {}
        for v in self.available:
            c = self.chains.chain_of[v]
            assert c not in found, "two sources in one chain"
            found[c] = v
        return found

    def place(self, v: int):
        self.available.remove(v)
        for w in self.poset.successors[v]:
            self.pending[w] -= 1
            if self.pending[w] == 0:
                self.available.add(w)


def _recency_scan(order: Sequence[int], chain_of: Sequence[int], by_chain: Dict[int, int]) -> Optional[int]:
    for v in reversed(order):
        if chain_of[v] in by_chain:
            return by_chain[chain_of[v]]
    return None


def _extend(poset: Poset, chains: ChainDecomposition, tiebreak: TieBreak, use_recency: bool):
    tracker = _SourceTracker(poset, chains)
    choose = tiebreak.chooser(poset)
    chain_of = chains.chain_of
    last_used = [-1] * len(chains)
    order: List[int] = []
    trace = StrategyTrace()

    for step in range(poset.size):
        by_chain = tracker.by_chain()
        candidates = tuple(sorted(tracker.available))
        prev_chain = chain_of[order[-1]] if order else None
        chosen, reason, chain = None, TIE_BREAK, None

        if prev_chain is not None and prev_chain in by_chain:
            chosen, reason, chain = by_chain[prev_chain], SAME_CHAIN, prev_chain
        elif use_recency:
            used = [c for c in by_chain if last_used[c] >= 0]
            if used:
                chain = max(used, key=lambda c: last_used[c])
                chosen, reason = by_chain[chain], MOST_RECENT_CHAIN
        if use_recency and CHECK_RECENCY_SCAN:
            assert _recency_scan(order, chain_of, by_chain) == (chosen if reason != TIE_BREAK else None)
        if chosen is None:
            chosen = choose(candidates)

        trace.steps.append(TraceStep(sources=candidates, chosen=chosen, reason=reason, chain=chain))
        order.append(chosen)
        last_used[chain_of[chosen]] = step
        tracker.place(chosen)

    extension = LinearExtension.build(poset, order, validate=False)
    return extension, trace


def lazy_extension(
    poset: Poset, chains: Optional[ChainDecomposition] = None, tiebreak: TieBreak = TieBreak()
) -> Tuple[LinearExtension, StrategyTrace]:
    chains = _check_decomposition(poset, chains)
    return _extend(poset, chains, tiebreak, use_recency=False)


def mru_extension(
    poset: Poset, chains: Optional[ChainDecomposition] = None, tiebreak: TieBreak = TieBreak()
) -> Tuple[LinearExtension, StrategyTrace]:
    chains = _check_decomposition(poset, chains)
    return _extend(poset, chains, tiebreak, use_recency=True)


def random_linear_extension(poset: Poset, seed: int) -> LinearExtension:
    rng = random.Random(seed)
    pending = [len(p) for p in poset.predecessors]
    available = [v for v in range(poset.size) if pending[v] == 0]
    order = []
    while available:
        available.sort()
        v = available.pop(rng.randrange(len(available)))
        order.append(v)
        for w in poset.successors[v]:
            pending[w] -= 1
            if pending[w] == 0:
                available.append(w)
    return LinearExtension.build(poset, order, validate=False)


def _check(poset: Poset, chains: Optional[ChainDecomposition], order, use_recency: bool) -> CheckResult:
    chains = _check_decomposition(poset, chains)
    extension = LinearExtension.build(poset, order)
    tracker = _SourceTracker(poset, chains)
    chain_of = chains.chain_of
    placed: List[int] = []
    for step, actual in enumerate(extension.order, start=1):
        by_chain = tracker.by_chain()
        if placed:
            if use_recency:
                expected = _recency_scan(placed, chain_of, by_chain)
            else:
                expected = by_chain.get(chain_of[placed[-1]])
            if expected is not None and expected != actual:
                return CheckResult(False, step, poset.name(expected), poset.name(actual))
        placed.append(actual)
        tracker.place(actual)
    return CheckResult(True)


def is_lazy(poset: Poset, chains: Optional[ChainDecomposition], order) -> CheckResult:
    return _check(poset, chains, order, use_recency=False)


def is_mru(poset: Poset, chains: Optional[ChainDecomposition], order) -> CheckResult:
    return _check(poset, chains, order, use_recency=True)
