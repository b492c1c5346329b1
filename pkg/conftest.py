import pytest

from constructions import gen_counterexample
from poset_core import ChainDecomposition, LinearExtension, _raw_poset, build_poset


@pytest.fixture(scope="session")
def counterexample():
    """G(6,2): 14 elements on three chains, queue number 3."""
    return gen_counterexample(6, 2)


@pytest.fixture
def lazy_not_mru():
    poset = build_poset(
        ["b1", "b2", "x", "r1", "g"],
        [("b1", "b2"), ("g", "b2"), ("x", "r1"), ("b1", "r1"), ("g", "r1")],
    )
    chains = ChainDecomposition.from_chains(poset, [["b1", "b2"], ["x", "r1"], ["g"]])
    order = LinearExtension.build(poset, ["b1", "x", "g", "b2", "r1"])
    return poset, chains, order


@pytest.fixture
def incoming_fixture():
    poset = build_poset(["u1", "b", "r", "r1"], [("u1", "b"), ("u1", "r1"), ("r", "r1")])
    chains = ChainDecomposition.from_chains(poset, [["r", "r1"], ["u1", "b"]])
    order = LinearExtension.build(poset, ["u1", "r", "b", "r1"])
    return poset, chains, order


@pytest.fixture
def transitive_chain():
    """Three elements on one chain with the transitive edge r1 -> r3 kept."""
    poset = _raw_poset(["r1", "r2", "r3"], [("r1", "r2"), ("r2", "r3"), ("r1", "r3")])
    chains = ChainDecomposition.from_chains(poset, [["r1", "r2", "r3"]])
    return poset, chains, LinearExtension.build(poset, ["r1", "r2", "r3"])


@pytest.fixture
def crossing_chains():
    """Two chains where r1 -> b1 is implied by r1 -> r2 -> b2 -> b1 but kept."""
    poset = _raw_poset(
        ["r1", "r2", "b2", "b1"],
        [("r1", "r2"), ("r2", "b2"), ("b2", "b1"), ("r1", "b1")],
    )
    chains = ChainDecomposition.from_chains(poset, [["r1", "r2"], ["b2", "b1"]])
    return poset, chains, LinearExtension.build(poset, ["r1", "r2", "b2", "b1"])
