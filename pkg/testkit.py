"""Seeded random posets of bounded width for property suites."""
import logging
import random
from dataclasses import dataclass
from typing import Iterator, Sequence, Tuple

from errors import InvalidSpec
from poset_core import ChainDecomposition, Poset, build_poset, width

logger = logging.getLogger(__name__)

DENSITIES = (0.05, 0.15, 0.3, 0.6)


@dataclass(frozen=True)
class GenSpec:
    width_target: int
    n: int
    inter_chain_density: float = 0.3
    seed: int = 0

    def validate(self):
        if self.width_target < 1:
            raise InvalidSpec(f"width_target must be >= 1, got {self.width_target}")
        if self.n < self.width_target:
            raise InvalidSpec(f"n must be >= width_target, got n={self.n}, w={self.width_target}")
        if not 0.0 <= self.inter_chain_density <= 1.0:
            raise InvalidSpec(f"inter_chain_density must lie in [0, 1], got {self.inter_chain_density}")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidSpec(f"seed must be a 64-bit unsigned integer, got {self.seed}")


def random_poset(spec: GenSpec) -> Tuple[Poset, ChainDecomposition]:
    spec.validate()
    rng = random.Random(spec.seed)
    w, n = spec.width_target, spec.n

    cuts = sorted(rng.sample(range(1, n), w - 1))
    sizes = [b - a for a, b in zip([0] + cuts, cuts + [n])]
    chains = [[f"x{c}_{k}" for k in range(size)] for c, size in enumerate(sizes)]

    # a random interleaving of the chains fixes every element's global rank
    labels = [c for c, size in enumerate(sizes) for _ in range(size)]
    rng.shuffle(labels)
    rank = {}
    taken = [0] * w
    for r, c in enumerate(labels):
        rank[chains[c][taken[c]]] = r
        taken[c] += 1

    relations = [edge for chain in chains for edge in zip(chain, chain[1:])]
    elements = [name for chain in chains for name in chain]
    chain_index = {name: c for c, chain in enumerate(chains) for name in chain}
    by_rank = sorted(elements, key=rank.get)
    for i, u in enumerate(by_rank):
        for v in by_rank[i + 1:]:
            if chain_index[u] != chain_index[v] and rng.random() < spec.inter_chain_density:
                relations.append((u, v))

    poset = build_poset(elements, relations)
    decomposition = ChainDecomposition.from_chains(poset, chains)
    actual = width(poset)
    assert actual <= w, f"generated width {actual} exceeds target {w}"
    logger.debug("Random poset %s: width %d, %d cover edges", spec, actual, len(poset.cover_edges))
    return poset, decomposition


def corpus(count: int, widths: Sequence[int] = (2, 3, 4, 5), max_n: int = 40, seed: int = 0) -> Iterator[GenSpec]:
    """Reproducible mix of GenSpecs cycling through widths and densities."""
    rng = random.Random(seed)
    for i in range(count):
        w = widths[i % len(widths)]
        yield GenSpec(
            width_target=w,
            n=rng.randint(w, max(w, max_n)),
            inter_chain_density=DENSITIES[(i // len(widths)) % len(DENSITIES)],
            seed=rng.getrandbits(64),
        )
