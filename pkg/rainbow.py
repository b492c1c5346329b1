"""Rainbows and queue assignments for a fixed vertex order."""
from bisect import bisect_left
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from poset_core import Edge, LinearExtension, Poset


@dataclass(frozen=True)
class RainbowCertificate:
    edges: Tuple[Edge, ...] = ()

    def __len__(self) -> int:
        return len(self.edges)

    def is_valid(self, extension: LinearExtension) -> bool:
        return all(nests(e, f, extension) for e, f in zip(self.edges, self.edges[1:]))


@dataclass(frozen=True)
class QueueLayout:
    extension: LinearExtension
    queue_of: Dict[Edge, int]
    queue_count: int

    def queues(self) -> List[List[Edge]]:
        grouped: List[List[Edge]] = [[] for _ in range(self.queue_count)]
        for edge, q in sorted(self.queue_of.items()):
            grouped[q - 1].append(edge)
        return grouped

    def is_valid(self) -> bool:
        for queue in self.queues():
            for i, e in enumerate(queue):
                for f in queue[i + 1:]:
                    if nests(e, f, self.extension) or nests(f, e, self.extension):
                        return False
        return True


def nests(e1: Edge, e2: Edge, extension: LinearExtension) -> bool:
    """True iff e1 strictly nests e2; edges sharing an endpoint never nest."""
    pos = extension.position
    return pos[e1[0]] < pos[e2[0]] < pos[e2[1]] < pos[e1[1]]


def _nesting_depths(extension: LinearExtension, edges: Sequence[Edge]):
    """Depth of every edge (1 for outermost) plus parent links for certificates.

    Edges are sorted by left end ascending and, for equal left ends, by right
    end ascending, so a strictly decreasing run of right ends never reuses a
    source. The depth of an edge is the length of the longest such run ending
    at it.
    """
    pos = extension.position
    ordered = sorted(edges, key=lambda e: (pos[e[0]], pos[e[1]]))
    # tails[k]: largest -(right end) ending a run of length k+1, stored negated
    tails: List[int] = []
    tail_edges: List[int] = []
    parent: List[Optional[int]] = [None] * len(ordered)
    depth: List[int] = [0] * len(ordered)
    for i, (x, y) in enumerate(ordered):
        key = -pos[y]
        k = bisect_left(tails, key)
        if k == len(tails):
            tails.append(key)
            tail_edges.append(i)
        else:
            tails[k] = key
            tail_edges[k] = i
        parent[i] = tail_edges[k - 1] if k > 0 else None
        depth[i] = k + 1
    return ordered, depth, parent, tail_edges


def max_rainbow(extension: LinearExtension, edges: Iterable[Edge]) -> Tuple[int, RainbowCertificate]:
    ordered, depth, parent, tail_edges = _nesting_depths(extension, list(edges))
    if not ordered:
        return 0, RainbowCertificate()
    chain = []
    i: Optional[int] = tail_edges[-1]
    while i is not None:
        chain.append(ordered[i])
        i = parent[i]
    certificate = RainbowCertificate(edges=tuple(reversed(chain)))
    assert certificate.is_valid(extension)
    return len(tail_edges), certificate


def queue_assignment(extension: LinearExtension, edges: Iterable[Edge]) -> QueueLayout:
    ordered, depth, _, tail_edges = _nesting_depths(extension, list(edges))
    queue_of = {edge: d for edge, d in zip(ordered, depth)}
    return QueueLayout(extension=extension, queue_of=queue_of, queue_count=len(tail_edges))


def poset_layout(poset: Poset, extension: LinearExtension) -> QueueLayout:
    return queue_assignment(extension, poset.cover_edges)


def max_rainbow_exhaustive(extension: LinearExtension, edges: Iterable[Edge]) -> int:
    """Largest pairwise-nested edge subset, grown one edge at a time."""
    edges = list(edges)
    best = 0

    def grow(chosen: List[Edge], start: int):
        nonlocal best
        best = max(best, len(chosen))
        for i in range(start, len(edges)):
            e = edges[i]
            if all(nests(e, f, extension) or nests(f, e, extension) for f in chosen):
                chosen.append(e)
                grow(chosen, i + 1)
                chosen.pop()

    grow([], 0)
    return best
