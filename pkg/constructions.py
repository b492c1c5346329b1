"""Generators for the explicit poset families with large rainbows.

Every generator returns a ConstructionBundle: the poset, the chain
decomposition it was designed around and, where the family comes with one,
the linear extension that realises the expected rainbow.

Vertex names follow the hand notation: ``v(i,j)`` and ``vbar(i,j)``. The
recursive families suffix the level, e.g. ``v(2,3)@4`` is v_{2,3} added at
level 4; their base vertices are ``v1`` .. ``v5``.
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from errors import EmptyPoset, InvalidParameters, OddWidth
from poset_core import ChainDecomposition, LinearExtension, Poset, build_poset, chain_decomposition

logger = logging.getLogger(__name__)


class Family(str, Enum):
    GENERAL = "general"
    LAZY_LB = "lazy-lb"
    MRU_LB = "mru-lb"
    COUNTEREXAMPLE = "counterexample"
    COUNTEREXAMPLE_TILDE = "counterexample-tilde"
    LIFTED = "lifted"


@dataclass(frozen=True)
class ConstructionBundle:
    poset: Poset
    chains: ChainDecomposition
    family: Family
    prescribed_extension: Optional[LinearExtension] = None
    expected_rainbow: Optional[int] = None
    parameters: Dict[str, Any] = field(default_factory=dict)

    def metadata(self) -> Dict[str, Any]:
        return {"family": self.family.value, "parameters": dict(self.parameters)}


def _bundle(family, parameters, elements, relations, chains, order=None, expected=None) -> ConstructionBundle:
    poset = build_poset(elements, relations)
    if poset.reduction_warning:
        logger.warning("%s construction %s produced transitive edges", family.value, parameters)
    decomposition = ChainDecomposition.from_chains(poset, chains)
    extension = LinearExtension.build(poset, order) if order is not None else None
    logger.debug(
        "Built %s %s: %d vertices, %d edges", family.value, parameters, poset.size, len(poset.cover_edges)
    )
    return ConstructionBundle(
        poset=poset,
        chains=decomposition,
        family=family,
        prescribed_extension=extension,
        expected_rainbow=expected,
        parameters=dict(parameters),
    )


def _path(names: Sequence[str]) -> List[Tuple[str, str]]:
    return list(zip(names, names[1:]))


def gen_general(w: int) -> ConstructionBundle:
    """w chains of length 2w whose prescribed extension nests w² edges."""
    if w < 2 or w % 2:
        raise OddWidth(w)

    def v(i, j):
        return f"v({i},{j})"

    chains = [[v(i, j) for j in range(1, 2 * w + 1)] for i in range(1, w + 1)]
    relations = [edge for chain in chains for edge in _path(chain)]
    for i in range(1, w + 1):
        for k in range(1, i):
            relations.append((v(i, k), v(i - k, 2 * w - i + 2)))
            relations.append((v(k, w - i + k), v(i, 2 * w - k + 1)))

    def position(i, j):
        if j < w:
            return (i - 1) * (w - 1) + j
        if j == w:
            return w * (w - 1) + w - i + 1
        return w * w + (j - w - 1) * w + i

    elements = [name for chain in chains for name in chain]
    order = sorted(elements, key=lambda name: position(*map(int, name[2:-1].split(","))))
    return _bundle(Family.GENERAL, {"w": w}, elements, relations, chains, order, w * w)


_BASE_ELEMENTS = ["v1", "v2", "v3", "v4", "v5"]
_BASE_RELATIONS = [("v1", "v2"), ("v1", "v5"), ("v3", "v4"), ("v4", "v5")]
_BASE_CHAINS = [["v1", "v2"], ["v3", "v4", "v5"]]


@dataclass
class _Level:
    elements: List[str]
    relations: List[Tuple[str, str]]
    chains: List[List[str]]
    order: List[str]


def _base_level() -> _Level:
    return _Level(list(_BASE_ELEMENTS), list(_BASE_RELATIONS), [list(c) for c in _BASE_CHAINS], list(_BASE_ELEMENTS))


def _wrap_chains(w: int, inner: List[List[str]], level: _Level):
    """Add the prefixes and suffixes shared by both recursive families to chains C_1..C_{w-1}."""

    def v(i, j):
        return f"v({i},{j})@{w}"

    def vbar(i, j):
        return f"vbar({i},{j})@{w}"

    chains = []
    for i in range(1, w):
        prefix = [v(i, 1), v(i, 2)] + ([vbar(1, 2)] if i == 1 else [])
        suffix = ([vbar(w - 1, 3)] if i == w - 1 else []) + [v(i, 3), v(i, 4)]
        old = inner[i - 1]
        level.relations += _path(prefix + old[:1]) + _path(old[-1:] + suffix)
        chains.append(prefix + old + suffix)
        level.elements += prefix + suffix
    for i in range(2, w):
        level.relations.append((vbar(1, 2), inner[i - 1][0]))
    for i in range(1, w - 1):
        level.relations.append((vbar(w - 1, 3), v(i, 3)))
    return chains, v, vbar


def _lazy_level(w: int) -> _Level:
    if w == 2:
        return _base_level()
    prev = _lazy_level(w - 1)
    first = next(c for c in prev.chains if prev.order[0] in c)
    last = next(c for c in prev.chains if prev.order[-1] in c)
    assert first is not last, "first and last element of the previous extension share a chain"
    inner = [first] + [c for c in prev.chains if c is not first and c is not last] + [last]

    level = _Level(list(prev.elements), list(prev.relations), [], [])
    chains, v, vbar = _wrap_chains(w, inner, level)
    top = [v(w, j) for j in range(1, 2 * w - 1)]
    level.elements += top
    level.relations += _path(top)
    for i in range(1, w - 1):
        level.relations.append((v(i, 3), v(w - 1, 4)))
    for i in range(1, w):
        level.relations.append((v(i, 1), v(w, w + i - 1)))
        level.relations.append((v(w, i), v(w - i, 4)))
    level.chains = chains + [top]

    order = [v(w, j) for j in range(1, w)]
    for i in range(w - 1, 0, -1):
        order += [v(i, 1), v(i, 2)]
    order += [vbar(1, 2)] + prev.order + [vbar(w - 1, 3), v(w - 1, 3)]
    order += [v(w, j) for j in range(w, 2 * w - 1)]
    for i in range(1, w - 1):
        order += [v(i, 3), v(i, 4)]
    order.append(v(w - 1, 4))
    level.order = order
    return level


def _mru_level(w: int) -> _Level:
    if w == 2:
        return _base_level()
    prev = _mru_level(w - 1)
    level = _Level(list(prev.elements), list(prev.relations), [], [])
    chains, v, vbar = _wrap_chains(w, prev.chains, level)
    top = [v(w, j) for j in range(0, 2 * w - 1)]
    level.elements += top
    level.relations += _path(top)
    for i in range(1, w):
        level.relations.append((v(w, 0), v(i, 2)))
        level.relations.append((v(w, i), v(w - i, 4)))
        for j in range(i + 1, w):
            level.relations.append((v(i, 3), v(j, 4)))
    level.relations.append((vbar(1, 2), v(w, w)))
    for i in range(2, w):
        level.relations.append((v(i, 1), v(w, 2 * w - i)))
    level.chains = chains + [top]

    order = [v(i, 1) for i in range(1, w)] + [v(w, j) for j in range(0, w)]
    order += [v(i, 2) for i in range(w - 1, 0, -1)] + [vbar(1, 2)] + prev.order
    order += [vbar(w - 1, 3)] + [v(i, 3) for i in range(w - 1, 0, -1)] + [v(i, 4) for i in range(1, w)]
    order += [v(w, j) for j in range(w, 2 * w - 1)]
    level.order = order
    return level


def gen_lazy_lb(w: int) -> ConstructionBundle:
    if w < 2:
        raise InvalidParameters(f"The lazy lower-bound family needs w >= 2, got {w}")
    level = _lazy_level(w)
    assert len(level.elements) == 3 * w * w - w - 5
    return _bundle(Family.LAZY_LB, {"w": w}, level.elements, level.relations, level.chains, level.order, w * w - w)


def gen_mru_lb(w: int) -> ConstructionBundle:
    if w < 2:
        raise InvalidParameters(f"The MRU lower-bound family needs w >= 2, got {w}")
    level = _mru_level(w)
    assert len(level.elements) == max(5, 3 * w * w - 7)
    return _bundle(
        Family.MRU_LB, {"w": w}, level.elements, level.relations, level.chains, level.order, (w - 1) ** 2 + 1
    )


def gen_counterexample(p: int, q: int, tilde: bool = False) -> ConstructionBundle:
    """Three chains a_1..a_p, b_1..b_q, c_1..c_p with the +3 cross edges."""
    if q < 1 or p < q:
        raise InvalidParameters(f"Need p >= q >= 1, got p={p}, q={q}")
    if p < 4:
        raise InvalidParameters(f"Need p >= 4 for cross edges, got p={p}")
    if tilde and p < 5:
        raise InvalidParameters(f"The tilde variant needs p >= 5, got p={p}")

    a = [f"a{i}" for i in range(1, p + 1)]
    b = [f"b{j}" for j in range(1, q + 1)]
    c = [f"c{i}" for i in range(1, p + 1)]
    relations = _path(a) + _path(b) + _path(c)
    for i in range(p - 3):
        relations += [(a[i], c[i + 3]), (c[i], a[i + 3])]
    for j in range(q):
        relations += [(a[j], b[j]), (c[j], b[j])]
    if tilde:
        relations += [(b[0], a[-1]), (b[0], c[-1])]
    family = Family.COUNTEREXAMPLE_TILDE if tilde else Family.COUNTEREXAMPLE
    return _bundle(family, {"p": p, "q": q, "tilde": tilde}, a + b + c, relations, [a, b, c])


def lift(
    source: Union[ConstructionBundle, Poset], copies_prefix: Tuple[str, str] = ("g1", "g2")
) -> ConstructionBundle:
    """Two copies in series plus the chain s < v < t.

    Copy elements are named ``<prefix>:<name>``, ``g1:`` and ``g2:`` by default.
    """
    first, second = copies_prefix
    if first == second or not first or not second:
        raise InvalidParameters(f"Copy prefixes must be distinct and non-empty, got {copies_prefix!r}")
    if isinstance(source, ConstructionBundle):
        poset, chains, base = source.poset, source.chains, source.family.value
    else:
        poset, chains, base = source, chain_decomposition(source), "poset"
    if poset.size == 0:
        raise EmptyPoset()

    def g1(x):
        return f"{first}:{poset.name(x)}"

    def g2(x):
        return f"{second}:{poset.name(x)}"

    elements = [g1(x) for x in range(poset.size)] + [g2(x) for x in range(poset.size)] + ["s", "v", "t"]
    relations = [(g1(u), g1(v)) for u, v in poset.cover_edges] + [(g2(u), g2(v)) for u, v in poset.cover_edges]
    relations += [(g1(x), g2(y)) for x in poset.sinks() for y in poset.sources()]
    relations += [("s", g1(y)) for y in poset.sources()] + [(g2(x), "t") for x in poset.sinks()]
    relations += [("s", "v"), ("v", "t")]
    lifted_chains = [[g1(x) for x in chain] + [g2(x) for x in chain] for chain in chains.chains]
    lifted_chains.append(["s", "v", "t"])
    parameters = {"base": base, "base_size": poset.size, "base_chains": len(chains)}
    return _bundle(Family.LIFTED, parameters, elements, relations, lifted_chains)


def lift_iterated(
    source: Union[ConstructionBundle, Poset], levels: int, copies_prefix: Tuple[str, str] = ("g1", "g2")
) -> ConstructionBundle:
    """Apply :func:`lift` ``levels`` times; each level adds one to the width.

    Names of earlier levels nest, so ``g1:g2:s`` is the ``s`` of level one
    inside the second copy of level two, inside the first copy of level three.
    """
    if levels < 1:
        raise InvalidParameters(f"Lifting needs at least one level, got {levels}")
    base = source.family.value if isinstance(source, ConstructionBundle) else "poset"
    bundle = source
    for level in range(1, levels + 1):
        bundle = lift(bundle, copies_prefix)
        logger.debug("Lift level %d: %d vertices, %d chains", level, bundle.poset.size, len(bundle.chains))
    parameters = dict(bundle.parameters, base=base, levels=levels)
    return replace(bundle, parameters=parameters)
