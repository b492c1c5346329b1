import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from constructions import gen_lazy_lb
from extensions import is_lazy, lazy_extension, mru_extension, random_linear_extension
from patterns import BBB, BWB, INCOMING, W2, find_bbb, find_bwb_forbidden, find_incoming_forbidden, find_w2
from poset_core import _raw_poset, chain_decomposition
from strategies import DECOMPOSITIONS, decomposition, gen_specs, posets
from testkit import corpus, random_poset


def enumerate_bbb(poset, chains, ext):
    pos, chain_of = ext.position, chains.chain_of
    return any(
        chain_of[r1] == chain_of[r2] == chain_of[r3] and pos[r1] < pos[r2] < pos[r3]
        for r1, r3 in poset.cover_edges
        for r2 in range(poset.size)
    )


def enumerate_w2(poset, chains, ext):
    pos, chain_of = ext.position, chains.chain_of
    return any(
        chain_of[r1] == chain_of[r2] and chain_of[b1] == chain_of[b2] and pos[r1] < pos[r2] < pos[b2] < pos[b1]
        for r1, b1 in poset.cover_edges
        for r2, b2 in poset.cover_edges
    )


def rainbows_into(poset, chains, ext, target, same_chain_sources):
    """Every rainbow of cover edges into ``target`` with distinct source chains, outermost edge first."""
    pos, chain_of = ext.position, chains.chain_of
    into = [
        (u, v) for u, v in poset.cover_edges
        if chain_of[v] == target and (same_chain_sources or chain_of[u] != target)
    ]

    def grow(rainbow):
        yield rainbow
        outer_u, outer_v = rainbow[-1]
        used = {chain_of[u] for u, _ in rainbow}
        for u, v in into:
            if pos[outer_u] < pos[u] and pos[v] < pos[outer_v] and chain_of[u] not in used:
                yield from grow(rainbow + ((u, v),))

    for edge in into:
        yield from grow((edge,))


def enumerate_incoming(poset, chains, ext):
    count = len(chains)
    if count < 2:
        return False
    pos, chain_of = ext.position, chains.chain_of
    for target in range(count):
        for rainbow in rainbows_into(poset, chains, ext, target, same_chain_sources=False):
            if len(rainbow) != count - 1:
                continue
            u, r_in = rainbow[-1]
            if any(
                chain_of[r] == target and chain_of[b] != target and pos[u] < pos[r] < pos[b] < pos[r_in]
                for r in range(poset.size)
                for b in range(poset.size)
            ):
                return True
    return False


def enumerate_bwb(poset, chains, ext):
    count = len(chains)
    if count < 2:
        return False
    pos, chain_of = ext.position, chains.chain_of
    everything = set(range(count))
    rainbows = {
        target: list(rainbows_into(poset, chains, ext, target, same_chain_sources=True)) for target in range(count)
    }
    for chain in chains.chains:
        for b1, b2 in zip(chain, chain[1:]):
            present = {chain_of[v] for v in range(poset.size) if pos[b1] < pos[v] < pos[b2]}
            for target in present:
                for rainbow in rainbows[target]:
                    u, r = rainbow[-1]
                    sources = {chain_of[x] for x, _ in rainbow}
                    if pos[u] <= pos[b1] and pos[r] > pos[b2] and everything - present <= sources:
                        return True
    return False


DETECTORS = {
    BBB: (find_bbb, enumerate_bbb),
    W2: (find_w2, enumerate_w2),
    INCOMING: (find_incoming_forbidden, enumerate_incoming),
    BWB: (find_bwb_forbidden, enumerate_bwb),
}


def small_instances():
    """Valid posets under random extensions, then unreduced DAGs that still carry transitive edges."""
    for spec in corpus(60, widths=(2, 3, 4), max_n=10, seed=5):
        poset, _ = random_poset(spec)
        chains = chain_decomposition(poset)
        for seed in range(5):
            yield poset, chains, random_linear_extension(poset, seed)
    rng = random.Random(11)
    for k in range(100):
        n = rng.randint(4, 8)
        names = [f"v{i}" for i in range(n)]
        edges = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
        poset = _raw_poset(names, edges)
        yield poset, chain_decomposition(poset), random_linear_extension(poset, k)


class TestAgainstEnumeration:
    def test_detectors_agree_on_small_instances(self):
        found = Counter()
        checked = 0
        for poset, chains, ext in small_instances():
            checked += 1
            for pattern_id, (detect, enumerate_pattern) in DETECTORS.items():
                witness = detect(poset, chains, ext)
                assert (witness is not None) == enumerate_pattern(poset, chains, ext), (pattern_id, poset, ext.order)
                if witness is not None:
                    assert witness.revalidate(poset, chains, ext)
                    found[pattern_id] += 1
        for pattern_id in DETECTORS:
            assert 0 < found[pattern_id] < checked, pattern_id

    @settings(max_examples=60, deadline=None)
    @given(posets(max_width=4, max_n=10), st.integers(0, 1000))
    def test_detectors_agree_on_random_extensions(self, poset, seed):
        chains = chain_decomposition(poset)
        ext = random_linear_extension(poset, seed)
        for detect, enumerate_pattern in DETECTORS.values():
            assert (detect(poset, chains, ext) is not None) == enumerate_pattern(poset, chains, ext)


class TestBBB:
    def test_transitive_edge_over_its_own_chain(self, transitive_chain):
        poset, chains, ext = transitive_chain
        witness = find_bbb(poset, chains, ext)
        assert witness.names(poset) == {"r1": "r1", "r2": "r2", "r3": "r3"}
        assert witness.revalidate(poset, chains, ext)

    @settings(max_examples=50)
    @given(posets(max_width=4, max_n=16), st.integers(0, 1000))
    def test_never_in_a_reduced_poset(self, poset, seed):
        ext = random_linear_extension(poset, seed)
        assert find_bbb(poset, chain_decomposition(poset), ext) is None


class TestW2:
    def test_nested_edges_between_two_chains(self, crossing_chains):
        poset, chains, ext = crossing_chains
        witness = find_w2(poset, chains, ext)
        assert witness.names(poset) == {"r1": "r1", "r2": "r2", "b2": "b2", "b1": "b1"}
        assert witness.revalidate(poset, chains, ext)

    @settings(max_examples=50)
    @given(posets(max_width=4, max_n=16), st.integers(0, 1000))
    def test_never_in_a_reduced_poset(self, poset, seed):
        ext = random_linear_extension(poset, seed)
        assert find_w2(poset, chain_decomposition(poset), ext) is None


class TestIncoming:
    def test_fixture_has_the_pattern(self, incoming_fixture):
        poset, chains, ext = incoming_fixture
        witness = find_incoming_forbidden(poset, chains, ext)
        assert witness.pattern_id == INCOMING
        assert witness.names(poset) == {"u1": "u1", "r": "r", "b": "b", "r1": "r1"}
        assert witness.revalidate(poset, chains, ext)
        assert not is_lazy(poset, chains, ext)

    def test_single_chain_has_no_pattern(self, transitive_chain):
        poset, chains, ext = transitive_chain
        assert find_incoming_forbidden(poset, chains, ext) is None

    def test_witnesses_in_random_extensions_are_never_lazy(self):
        bundle = gen_lazy_lb(3)
        found = 0
        for seed in range(300):
            ext = random_linear_extension(bundle.poset, seed)
            witness = find_incoming_forbidden(bundle.poset, bundle.chains, ext)
            if witness is None:
                continue
            found += 1
            assert witness.revalidate(bundle.poset, bundle.chains, ext)
            assert not is_lazy(bundle.poset, bundle.chains, ext)
        if not found:
            pytest.skip("no incoming pattern in 300 random extensions")

    @pytest.mark.parametrize("regime", DECOMPOSITIONS)
    @settings(max_examples=60)
    @given(gen_specs(max_width=4, max_n=16))
    def test_lazy_extensions_avoid_it(self, regime, spec):
        poset, generating = random_poset(spec)
        chains = decomposition(regime, poset, generating)
        ext, _ = lazy_extension(poset, chains)
        assert find_incoming_forbidden(poset, chains, ext) is None


class TestBWB:
    def test_lazy_but_not_mru_order(self, lazy_not_mru):
        poset, chains, ext = lazy_not_mru
        witness = find_bwb_forbidden(poset, chains, ext)
        assert witness.pattern_id == BWB
        assert poset.name(witness.role("b1")) == "b1"
        assert poset.name(witness.role("b2")) == "b2"
        assert poset.name(witness.role("x")) == "x"
        assert witness.revalidate(poset, chains, ext)

    def test_mru_order_of_same_poset_avoids_it(self, lazy_not_mru):
        poset, chains, _ = lazy_not_mru
        ext, _ = mru_extension(poset, chains)
        assert find_bwb_forbidden(poset, chains, ext) is None

    def test_revalidate_rejects_other_order(self, lazy_not_mru):
        poset, chains, ext = lazy_not_mru
        witness = find_bwb_forbidden(poset, chains, ext)
        mru, _ = mru_extension(poset, chains)
        assert not witness.revalidate(poset, chains, mru)

    @pytest.mark.parametrize("regime", DECOMPOSITIONS)
    @settings(max_examples=60)
    @given(gen_specs(max_width=4, max_n=16))
    def test_mru_extensions_avoid_it(self, regime, spec):
        poset, generating = random_poset(spec)
        chains = decomposition(regime, poset, generating)
        ext, _ = mru_extension(poset, chains)
        assert find_bwb_forbidden(poset, chains, ext) is None
