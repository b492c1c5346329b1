"""Canonical poset representation.

Elements are opaque strings mapped to dense integer indices at build time.
The closure is kept as one bitmask per element (bit u of ``below[v]`` is set
iff u < v), which keeps comparability tests and ideal checks cheap for the
sizes this project works with.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Set, Tuple, Union

import networkx as nx
from networkx.algorithms.bipartite.matching import hopcroft_karp_matching

from errors import (
    CycleError,
    InvalidDecomposition,
    InvalidParameters,
    NotALinearExtension,
    NotAPermutation,
    UnknownElement,
)

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
ElementRef = Union[str, int]


@dataclass(frozen=True)
class Poset:
    elements: Tuple[str, ...]
    cover_edges: Tuple[Edge, ...]
    reduction_warning: bool = False
    index: Dict[str, int] = field(init=False, repr=False, compare=False)
    successors: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    predecessors: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    below: Tuple[int, ...] = field(init=False, repr=False, compare=False)
    above: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.elements)
        succ: List[List[int]] = [[] for _ in range(n)]
        pred: List[List[int]] = [[] for _ in range(n)]
        for u, v in self.cover_edges:
            succ[u].append(v)
            pred[v].append(u)
        object.__setattr__(self, "index", {name: i for i, name in enumerate(self.elements)})
        object.__setattr__(self, "successors", tuple(tuple(s) for s in succ))
        object.__setattr__(self, "predecessors", tuple(tuple(p) for p in pred))

        topo = list(nx.topological_sort(self.to_digraph()))
        below = [0] * n
        for v in topo:
            mask = 0
            for u in pred[v]:
                mask |= below[u] | (1 << u)
            below[v] = mask
        above = [0] * n
        for u in reversed(topo):
            mask = 0
            for v in succ[u]:
                mask |= above[v] | (1 << v)
            above[u] = mask
        object.__setattr__(self, "below", tuple(below))
        object.__setattr__(self, "above", tuple(above))

    @property
    def size(self) -> int:
        return len(self.elements)

    def index_of(self, ref: ElementRef) -> int:
        if isinstance(ref, str):
            if ref not in self.index:
                raise UnknownElement(ref)
            return self.index[ref]
        if isinstance(ref, bool) or not isinstance(ref, int) or not 0 <= ref < self.size:
            raise UnknownElement(ref)
        return ref

    def less(self, u: int, v: int) -> bool:
        """True iff u < v in the closure."""
        return bool((self.below[v] >> u) & 1)

    def comparable(self, u: int, v: int) -> bool:
        return self.less(u, v) or self.less(v, u)

    def name(self, i: int) -> str:
        return self.elements[i]

    def edge_names(self) -> List[Tuple[str, str]]:
        return [(self.elements[u], self.elements[v]) for u, v in self.cover_edges]

    def sources(self) -> List[int]:
        return [v for v in range(self.size) if not self.predecessors[v]]

    def sinks(self) -> List[int]:
        return [v for v in range(self.size) if not self.successors[v]]

    def to_digraph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self.elements)))
        graph.add_edges_from(self.cover_edges)
        return graph


@dataclass(frozen=True)
class ChainDecomposition:
    chains: Tuple[Tuple[int, ...], ...]
    chain_of: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.chains)

    @classmethod
    def from_chains(cls, poset: Poset, chains: Iterable[Iterable[ElementRef]]) -> "ChainDecomposition":
        """Validate a user-supplied partition into chains.

        Chains may be given in any internal order; each is re-sorted
        ascending by the poset order.
        """
        chain_of = [-1] * poset.size
        sorted_chains = []
        for c, chain in enumerate(chains):
            members = [poset.index_of(ref) for ref in chain]
            if not members:
                raise InvalidDecomposition(f"Chain {c} is empty")
            for v in members:
                if chain_of[v] != -1:
                    raise InvalidDecomposition(f"Element {poset.name(v)!r} appears in more than one chain")
                chain_of[v] = c
            # comparable elements have strictly nested down-sets
            members.sort(key=lambda v: bin(poset.below[v]).count("1"))
            for a, b in zip(members, members[1:]):
                if not poset.less(a, b):
                    raise InvalidDecomposition(
                        f"Chain {c} holds incomparable elements {poset.name(a)!r} and {poset.name(b)!r}"
                    )
            sorted_chains.append(tuple(members))
        missing = [poset.name(v) for v in range(poset.size) if chain_of[v] == -1]
        if missing:
            raise InvalidDecomposition(f"Elements not covered by any chain: {missing}")
        return cls(chains=tuple(sorted_chains), chain_of=tuple(chain_of))

    def names(self, poset: Poset) -> List[List[str]]:
        return [[poset.name(v) for v in chain] for chain in self.chains]


@dataclass(frozen=True)
class LinearExtension:
    order: Tuple[int, ...]
    position: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.order)

    @classmethod
    def build(cls, poset: Poset, order: Sequence[ElementRef], validate: bool = True) -> "LinearExtension":
        indices = _as_permutation(poset, order)
        position = [0] * len(indices)
        for p, v in enumerate(indices):
            position[v] = p
        if validate:
            for u, v in poset.cover_edges:
                if position[u] > position[v]:
                    raise NotALinearExtension((poset.name(u), poset.name(v)))
        return cls(order=tuple(indices), position=tuple(position))

    def names(self, poset: Poset) -> List[str]:
        return [poset.name(v) for v in self.order]


def _as_permutation(poset: Poset, order: Sequence[ElementRef]) -> List[int]:
    if isinstance(order, LinearExtension):
        return list(order.order)
    try:
        indices = [poset.index_of(ref) for ref in order]
    except UnknownElement as exc:
        raise NotAPermutation(f"Order contains an unknown element: {exc.name!r}") from exc
    if len(indices) != poset.size or len(set(indices)) != poset.size:
        raise NotAPermutation(f"Order has {len(indices)} entries for {poset.size} elements or repeats one")
    return indices


def transitive_reduction(dag: Union[nx.DiGraph, Iterable[Tuple]]) -> Set[Tuple]:
    """Return the unique minimal edge set with the same reachability."""
    graph = dag if isinstance(dag, nx.DiGraph) else nx.DiGraph(list(dag))
    if not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        raise CycleError([str(u) for u, _ in cycle])
    return set(nx.transitive_reduction(graph).edges())


def build_poset(elements: Sequence[str], relations: Iterable[Tuple[str, str]]) -> Poset:
    names = list(elements)
    index = {}
    for i, name in enumerate(names):
        if name in index:
            raise InvalidParameters(f"Duplicate element: {name!r}")
        index[name] = i

    pairs = set()
    for u, v in relations:
        for ref in (u, v):
            if ref not in index:
                raise UnknownElement(ref)
        if u == v:
            raise CycleError([u])
        pairs.add((index[u], index[v]))

    graph = nx.DiGraph()
    graph.add_nodes_from(range(len(names)))
    graph.add_edges_from(sorted(pairs))
    if not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        raise CycleError([names[u] for u, _ in cycle])

    reduced = transitive_reduction(graph)
    warning = len(reduced) < len(pairs)
    if warning:
        logger.debug("Dropped %d transitive relation(s)", len(pairs) - len(reduced))
    return Poset(elements=tuple(names), cover_edges=tuple(sorted(reduced)), reduction_warning=warning)


def _raw_poset(elements: Sequence[str], edges: Iterable[Tuple[str, str]]) -> Poset:
    """Build a poset from edges as given, skipping the reduction step.

    Test fixtures use it to produce corrupted inputs with transitive edges.
    """
    index = {name: i for i, name in enumerate(elements)}
    return Poset(elements=tuple(elements), cover_edges=tuple(sorted((index[u], index[v]) for u, v in edges)))


def _maximum_matching(poset: Poset) -> Dict[int, int]:
    """Maximum matching of the split comparability graph, left index -> right index."""
    n = poset.size
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    graph.add_nodes_from(range(n, 2 * n))
    for u in range(n):
        above = poset.above[u]
        v = 0
        while above:
            if above & 1:
                graph.add_edge(u, n + v)
            above >>= 1
            v += 1
    matching = hopcroft_karp_matching(graph, top_nodes=range(n))
    return {u: matching[u] - n for u in range(n) if u in matching}


def width(poset: Poset) -> int:
    if poset.size == 0:
        return 0
    return poset.size - len(_maximum_matching(poset))


def chain_decomposition(poset: Poset) -> ChainDecomposition:
    if poset.size == 0:
        return ChainDecomposition(chains=(), chain_of=())
    successor = _maximum_matching(poset)
    has_predecessor = set(successor.values())
    chains = []
    for start in range(poset.size):
        if start in has_predecessor:
            continue
        chain = [start]
        while chain[-1] in successor:
            chain.append(successor[chain[-1]])
        chains.append(tuple(chain))
    chain_of = [0] * poset.size
    for c, chain in enumerate(chains):
        for v in chain:
            chain_of[v] = c
    logger.debug("Chain decomposition of %d elements into %d chains", poset.size, len(chains))
    return ChainDecomposition(chains=tuple(chains), chain_of=tuple(chain_of))


def is_linear_extension(poset: Poset, order: Sequence[ElementRef]) -> bool:
    indices = _as_permutation(poset, order)
    position = [0] * len(indices)
    for p, v in enumerate(indices):
        position[v] = p
    return all(position[u] < position[v] for u, v in poset.cover_edges)
