"""Detectors for forbidden configurations of linear extensions.

All detectors are relative to a chain decomposition. The two rainbow-based
detectors share one dynamic program: for every chain R and every edge e into
R it records the sets of source chains realisable by nested rainbows of
edges into R whose innermost edge is e.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from poset_core import ChainDecomposition, Edge, LinearExtension, Poset

logger = logging.getLogger(__name__)

BBB = "BBB"
W2 = "W2"
INCOMING = "INCOMING"
BWB = "BWB"


@dataclass(frozen=True)
class PatternWitness:
    pattern_id: str
    elements: Tuple[int, ...]
    roles: Tuple[str, ...]
    edges: Tuple[Edge, ...]

    def role(self, name: str) -> int:
        return self.elements[self.roles.index(name)]

    def names(self, poset: Poset) -> Dict[str, str]:
        return {role: poset.name(v) for role, v in zip(self.roles, self.elements)}

    def revalidate(self, poset: Poset, chains: ChainDecomposition, extension: LinearExtension) -> bool:
        check = {BBB: _valid_bbb, W2: _valid_w2, INCOMING: _valid_incoming, BWB: _valid_bwb}[self.pattern_id]
        cover = set(poset.cover_edges)
        if any(edge not in cover for edge in self.edges):
            return False
        return check(self, chains.chain_of, extension.position, len(chains))


def _increasing(pos: Sequence[int], items: Sequence[int]) -> bool:
    return all(pos[a] < pos[b] for a, b in zip(items, items[1:]))


def _valid_bbb(w: PatternWitness, chain_of, pos, _count) -> bool:
    r1, r2, r3 = w.role("r1"), w.role("r2"), w.role("r3")
    return (
        chain_of[r1] == chain_of[r2] == chain_of[r3]
        and _increasing(pos, (r1, r2, r3))
        and w.edges == ((r1, r3),)
    )


def _valid_w2(w: PatternWitness, chain_of, pos, _count) -> bool:
    r1, r2, b2, b1 = (w.role(name) for name in ("r1", "r2", "b2", "b1"))
    return (
        chain_of[r1] == chain_of[r2]
        and chain_of[b1] == chain_of[b2]
        and _increasing(pos, (r1, r2, b2, b1))
        and set(w.edges) == {(r1, b1), (r2, b2)}
    )


def _rainbow_ok(edges: Sequence[Edge], chain_of, pos, target_chain: int) -> bool:
    if any(chain_of[y] != target_chain for _, y in edges):
        return False
    if len({chain_of[x] for x, _ in edges}) != len(edges):
        return False
    return all(pos[e[0]] < pos[f[0]] < pos[f[1]] < pos[e[1]] for e, f in zip(edges, edges[1:]))


def _valid_incoming(w: PatternWitness, chain_of, pos, count) -> bool:
    r, b = w.role("r"), w.role("b")
    target = chain_of[r]
    if len(w.edges) != count - 1 or count < 2:
        return False
    if not _rainbow_ok(w.edges, chain_of, pos, target):
        return False
    if any(chain_of[x] == target for x, _ in w.edges) or chain_of[b] == target:
        return False
    innermost = w.edges[-1]
    return pos[innermost[0]] < pos[r] < pos[b] < pos[innermost[1]] and _increasing(pos, w.elements)


def _valid_bwb(w: PatternWitness, chain_of, pos, count) -> bool:
    b1, b2, x = w.role("b1"), w.role("b2"), w.role("x")
    target = chain_of[x]
    if chain_of[b1] != chain_of[b2] or target == chain_of[b1] or not w.edges:
        return False
    if any(chain_of[v] == chain_of[b1] and pos[b1] < pos[v] < pos[b2] for v in range(len(pos))):
        return False
    if not pos[b1] < pos[x] < pos[b2] or not _rainbow_ok(w.edges, chain_of, pos, target):
        return False
    innermost = w.edges[-1]
    if not (pos[innermost[0]] <= pos[b1] and pos[b2] < pos[innermost[1]]):
        return False
    inside = [v for role, v in zip(w.roles, w.elements) if role.startswith("u") and pos[b1] < pos[v] < pos[b2]]
    used = [chain_of[e[0]] for e in w.edges] + [chain_of[v] for v in inside]
    if target not in used:
        used.append(target)
    return len(set(used)) == len(used) == count


def find_bbb(poset: Poset, chains: ChainDecomposition, extension: LinearExtension) -> Optional[PatternWitness]:
    pos = extension.position
    chain_of = chains.chain_of
    for u, v in poset.cover_edges:
        if chain_of[u] != chain_of[v]:
            continue
        for r in chains.chains[chain_of[u]]:
            if pos[u] < pos[r] < pos[v]:
                return PatternWitness(BBB, (u, r, v), ("r1", "r2", "r3"), ((u, v),))
    return None


def find_w2(poset: Poset, chains: ChainDecomposition, extension: LinearExtension) -> Optional[PatternWitness]:
    pos = extension.position
    chain_of = chains.chain_of
    groups: Dict[Tuple[int, int], List[Edge]] = {}
    for u, v in poset.cover_edges:
        groups.setdefault((chain_of[u], chain_of[v]), []).append((u, v))
    for group in groups.values():
        group.sort(key=lambda e: (pos[e[0]], pos[e[1]]))
        best: Optional[Edge] = None
        i = 0
        while i < len(group):
            j = i
            while j < len(group) and pos[group[j][0]] == pos[group[i][0]]:
                j += 1
            for inner in group[i:j]:
                if best is not None and pos[best[1]] > pos[inner[1]]:
                    r1, b1 = best
                    r2, b2 = inner
                    return PatternWitness(W2, (r1, r2, b2, b1), ("r1", "r2", "b2", "b1"), (best, inner))
            for edge in group[i:j]:
                if best is None or pos[edge[1]] > pos[best[1]]:
                    best = edge
            i = j
    return None


class _IncomingRainbows:
    """Nested rainbows into one chain, indexed by innermost edge and source-chain mask."""

    def __init__(self, poset: Poset, chains: ChainDecomposition, extension: LinearExtension,
                 target_chain: int, allow_self_edges: bool):
        pos = extension.position
        chain_of = chains.chain_of
        self.edges = sorted(
            (
                (u, v)
                for u, v in poset.cover_edges
                if chain_of[v] == target_chain and (allow_self_edges or chain_of[u] != target_chain)
            ),
            key=lambda e: (pos[e[0]], pos[e[1]]),
        )
        # reach[i][mask] = parent (edge index, mask) or None when edge i starts the rainbow
        self.reach: List[Dict[int, Optional[Tuple[int, int]]]] = []
        for i, (u, v) in enumerate(self.edges):
            bit = 1 << chain_of[u]
            masks: Dict[int, Optional[Tuple[int, int]]] = {bit: None}
            for j in range(i):
                f = self.edges[j]
                if not (pos[f[0]] < pos[u] and pos[v] < pos[f[1]]):
                    continue
                for mask in self.reach[j]:
                    if not mask & bit and (mask | bit) not in masks:
                        masks[mask | bit] = (j, mask)
            self.reach.append(masks)

    def rainbow(self, i: int, mask: int) -> Tuple[Edge, ...]:
        """Edges of the recorded rainbow, outermost first."""
        chain = []
        link: Optional[Tuple[int, int]] = (i, mask)
        while link is not None:
            j, m = link
            chain.append(self.edges[j])
            link = self.reach[j][m]
        return tuple(reversed(chain))


def find_incoming_forbidden(
    poset: Poset, chains: ChainDecomposition, extension: LinearExtension
) -> Optional[PatternWitness]:
    count = len(chains)
    if count < 2:
        return None
    pos = extension.position
    order = extension.order
    chain_of = chains.chain_of
    everything = (1 << count) - 1
    for target in range(count):
        wanted = everything & ~(1 << target)
        rainbows = _IncomingRainbows(poset, chains, extension, target, allow_self_edges=False)
        for i, (u, r_in) in enumerate(rainbows.edges):
            if wanted not in rainbows.reach[i]:
                continue
            r = b = None
            for p in range(pos[u] + 1, pos[r_in]):
                v = order[p]
                if r is None:
                    if chain_of[v] == target:
                        r = v
                elif chain_of[v] != target:
                    b = v
                    break
            if b is None:
                continue
            edges = rainbows.rainbow(i, wanted)
            k = len(edges)
            elements = tuple(x for x, _ in edges) + (r, b) + tuple(y for _, y in reversed(edges))
            roles = tuple(f"u{j}" for j in range(1, k + 1)) + ("r", "b") + tuple(f"r{j}" for j in range(k, 0, -1))
            return PatternWitness(INCOMING, elements, roles, edges)
    return None


def find_bwb_forbidden(
    poset: Poset, chains: ChainDecomposition, extension: LinearExtension
) -> Optional[PatternWitness]:
    count = len(chains)
    if count < 2 or not poset.cover_edges:
        return None
    pos = extension.position
    order = extension.order
    chain_of = chains.chain_of
    everything = (1 << count) - 1
    rainbows: Dict[int, _IncomingRainbows] = {}

    for chain in chains.chains:
        for b1, b2 in zip(chain, chain[1:]):
            between: Dict[int, int] = {}
            for p in range(pos[b1] + 1, pos[b2]):
                between.setdefault(chain_of[order[p]], order[p])
            seen = 0
            for c in between:
                seen |= 1 << c
            required = everything & ~seen
            for target, x in between.items():
                if target not in rainbows:
                    rainbows[target] = _IncomingRainbows(poset, chains, extension, target, allow_self_edges=True)
                found = rainbows[target]
                for i, (u, r) in enumerate(found.edges):
                    if pos[u] > pos[b1] or pos[r] <= pos[b2]:
                        continue
                    mask = next((m for m in found.reach[i] if m & required == required), None)
                    if mask is None:
                        continue
                    edges = found.rainbow(i, mask)
                    k = len(edges)
                    # x already stands for its own chain when no rainbow edge starts there
                    inside = [between[c] for c in range(count) if not (mask >> c) & 1 and c != target]
                    elements = (
                        tuple(e[0] for e in edges) + (b1, x) + tuple(inside) + (b2,)
                        + tuple(e[1] for e in reversed(edges))
                    )
                    roles = (
                        tuple(f"u{j}" for j in range(1, k + 1)) + ("b1", "x")
                        + tuple(f"u{j}" for j in range(k + 1, k + 1 + len(inside))) + ("b2",)
                        + tuple(f"r{j}" for j in range(k, 0, -1))
                    )
                    return PatternWitness(BWB, elements, roles, edges)
    return None
