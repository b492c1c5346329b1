import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import InvalidDecomposition, InvalidParameters, NotAnIdeal
from extensions import (
    MOST_RECENT_CHAIN,
    SAME_CHAIN,
    TIE_BREAK,
    TieBreak,
    is_lazy,
    is_mru,
    lazy_extension,
    mru_extension,
    random_linear_extension,
    sources,
)
from poset_core import ChainDecomposition, build_poset, chain_decomposition, is_linear_extension
from strategies import posets


class TestSources:
    def setup_method(self):
        self.poset = build_poset(["a", "b", "c"], [("a", "b"), ("a", "c")])

    def test_initial_sources(self):
        assert sources(self.poset, []) == {0}

    def test_after_placing_minimum(self):
        assert sources(self.poset, ["a"]) == {1, 2}

    def test_rejects_non_ideal(self):
        with pytest.raises(NotAnIdeal):
            sources(self.poset, ["b"])


class TestLazyExtension:
    def test_continues_current_chain(self):
        poset = build_poset(["a", "b", "x"], [("a", "b")])
        chains = ChainDecomposition.from_chains(poset, [["a", "b"], ["x"]])
        ext, trace = lazy_extension(poset, chains)
        assert ext.names(poset) == ["a", "b", "x"]
        assert trace.reasons() == [TIE_BREAK, SAME_CHAIN, TIE_BREAK]

    def test_seeded_tie_break_is_deterministic(self):
        poset = build_poset([f"x{i}" for i in range(8)], [])
        first, _ = lazy_extension(poset, None, TieBreak.seeded(7))
        second, _ = lazy_extension(poset, None, TieBreak.seeded(7))
        assert first.order == second.order

    def test_replay_reproduces_a_lazy_order(self, counterexample):
        ext, _ = lazy_extension(counterexample.poset, counterexample.chains, TieBreak.seeded(3))
        replayed, _ = lazy_extension(
            counterexample.poset, counterexample.chains, TieBreak.replay(ext.names(counterexample.poset))
        )
        assert replayed.order == ext.order

    def test_rejects_foreign_decomposition(self):
        poset = build_poset(["a", "b"], [])
        other = build_poset(["a"], [])
        with pytest.raises(InvalidDecomposition):
            lazy_extension(poset, chain_decomposition(other))

    def test_rejects_inconsistent_chain_of(self):
        poset = build_poset(["a", "b", "x"], [("a", "b")])
        good = ChainDecomposition.from_chains(poset, [["a", "b"], ["x"]])
        swapped = ChainDecomposition(chains=good.chains, chain_of=(1, 0, 0))
        with pytest.raises(InvalidDecomposition):
            lazy_extension(poset, swapped)
        with pytest.raises(InvalidDecomposition):
            is_mru(poset, swapped, ["a", "b", "x"])

    def test_rejects_chains_that_skip_an_element(self):
        poset = build_poset(["a", "b", "x"], [("a", "b")])
        partial = ChainDecomposition(chains=((0, 1), (1,)), chain_of=(0, 0, 1))
        with pytest.raises(InvalidDecomposition):
            mru_extension(poset, partial)

    def test_unknown_tie_break_mode(self):
        with pytest.raises(InvalidParameters):
            TieBreak(mode="coin-flip")

    @settings(max_examples=60)
    @given(posets(max_width=5, max_n=20), st.integers(0, 1000))
    def test_output_is_a_lazy_linear_extension(self, poset, seed):
        chains = chain_decomposition(poset)
        ext, trace = lazy_extension(poset, chains, TieBreak.seeded(seed))
        assert len(trace) == poset.size
        assert is_linear_extension(poset, ext.order)
        assert is_lazy(poset, chains, ext)


class TestMruExtension:
    def test_returns_to_most_recent_chain(self):
        poset = build_poset(["a1", "a2", "b1", "c1"], [("a1", "a2"), ("b1", "a2")])
        chains = ChainDecomposition.from_chains(poset, [["a1", "a2"], ["b1"], ["c1"]])
        ext, trace = mru_extension(poset, chains)
        assert ext.names(poset) == ["a1", "b1", "a2", "c1"]
        assert trace.reasons()[2] == MOST_RECENT_CHAIN

    @settings(max_examples=60)
    @given(posets(max_width=5, max_n=20), st.integers(0, 1000))
    def test_output_is_mru_and_lazy(self, poset, seed):
        chains = chain_decomposition(poset)
        ext, _ = mru_extension(poset, chains, TieBreak.seeded(seed))
        assert is_linear_extension(poset, ext.order)
        assert is_mru(poset, chains, ext)
        assert is_lazy(poset, chains, ext)


class TestCheckers:
    def test_lazy_violation_reports_step(self):
        poset = build_poset(["a", "b", "x"], [("a", "b")])
        chains = ChainDecomposition.from_chains(poset, [["a", "b"], ["x"]])
        result = is_lazy(poset, chains, ["a", "x", "b"])
        assert not result
        assert (result.step, result.expected, result.actual) == (2, "b", "x")

    def test_lazy_but_not_mru(self, lazy_not_mru):
        poset, chains, order = lazy_not_mru
        assert is_lazy(poset, chains, order)
        result = is_mru(poset, chains, order)
        assert not result.ok
        assert (result.step, result.expected, result.actual) == (4, "r1", "b2")

    def test_single_chain_order_is_lazy_and_mru(self):
        poset = build_poset(["a", "b", "c"], [("a", "b"), ("b", "c")])
        assert is_lazy(poset, None, ["a", "b", "c"])
        assert is_mru(poset, None, ["a", "b", "c"])


class TestRandomLinearExtension:
    @settings(max_examples=40)
    @given(posets(max_width=4, max_n=16), st.integers(0, 2 ** 32))
    def test_valid_and_reproducible(self, poset, seed):
        ext = random_linear_extension(poset, seed)
        assert is_linear_extension(poset, ext.order)
        assert random_linear_extension(poset, seed).order == ext.order


class TestTrace:
    @pytest.mark.parametrize("strategy", [lazy_extension, mru_extension])
    @settings(max_examples=40)
    @given(posets(max_width=4, max_n=16), st.integers(0, 1000))
    def test_recorded_sources_match_each_prefix(self, strategy, poset, seed):
        ext, trace = strategy(poset, chain_decomposition(poset), TieBreak.seeded(seed))
        for k, step in enumerate(trace.steps):
            assert set(step.sources) == sources(poset, ext.order[:k])
            assert step.chosen == ext.order[k]
            assert step.chosen in step.sources
