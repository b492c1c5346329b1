import pytest

from constructions import Family, gen_counterexample, gen_general, gen_lazy_lb, gen_mru_lb, lift, lift_iterated
from errors import EmptyPoset, InvalidParameters, OddWidth
from extensions import TieBreak, is_lazy, is_mru, lazy_extension, mru_extension
from poset_core import LinearExtension, build_poset, is_linear_extension, width
from rainbow import max_rainbow


def prescribed_rainbow(bundle):
    return max_rainbow(bundle.prescribed_extension, bundle.poset.cover_edges)[0]


class TestGeneral:
    @pytest.mark.parametrize("w,expected", [(2, 4), (4, 16), (6, 36)])
    def test_rainbow_is_w_squared(self, w, expected):
        bundle = gen_general(w)
        assert bundle.poset.size == 2 * w * w
        assert len(bundle.chains) == w
        assert width(bundle.poset) == w
        assert not bundle.poset.reduction_warning
        assert bundle.expected_rainbow == expected
        assert prescribed_rainbow(bundle) == expected

    @pytest.mark.parametrize("w", [0, 1, 3, 5])
    def test_rejects_odd_or_tiny_width(self, w):
        with pytest.raises(OddWidth):
            gen_general(w)


class TestLazyLowerBound:
    @pytest.mark.parametrize("w,size,expected", [(2, 5, 2), (3, 19, 6), (4, 39, 12), (5, 65, 20)])
    def test_prescribed_extension(self, w, size, expected):
        bundle = gen_lazy_lb(w)
        assert bundle.family == Family.LAZY_LB
        assert bundle.poset.size == size
        assert len(bundle.chains) == w
        assert width(bundle.poset) == w
        assert not bundle.poset.reduction_warning
        assert is_linear_extension(bundle.poset, bundle.prescribed_extension.order)
        assert is_lazy(bundle.poset, bundle.chains, bundle.prescribed_extension)
        assert prescribed_rainbow(bundle) == expected

    @pytest.mark.parametrize("w,expected", [(2, 2), (3, 6), (4, 12), (5, 20)])
    def test_replay_reproduces_prescribed_extension(self, w, expected):
        bundle = gen_lazy_lb(w)
        names = bundle.prescribed_extension.names(bundle.poset)
        ext, trace = lazy_extension(bundle.poset, bundle.chains, TieBreak.replay(names))
        assert ext.order == bundle.prescribed_extension.order
        assert len(trace) == bundle.poset.size
        assert max_rainbow(ext, bundle.poset.cover_edges)[0] == expected

    def test_rejects_width_one(self):
        with pytest.raises(InvalidParameters):
            gen_lazy_lb(1)


class TestMruLowerBound:
    @pytest.mark.parametrize("w,size,expected", [(2, 5, 2), (3, 20, 5), (4, 41, 10), (5, 68, 17)])
    def test_prescribed_extension(self, w, size, expected):
        bundle = gen_mru_lb(w)
        assert bundle.poset.size == size
        assert len(bundle.chains) == w
        assert width(bundle.poset) == w
        assert not bundle.poset.reduction_warning
        assert is_mru(bundle.poset, bundle.chains, bundle.prescribed_extension)
        assert prescribed_rainbow(bundle) == expected


class TestCounterexample:
    def test_small_instance(self, counterexample):
        assert counterexample.poset.size == 14
        assert counterexample.chains.names(counterexample.poset)[1] == ["b1", "b2"]
        assert counterexample.prescribed_extension is None

    def test_tilde_instance(self):
        bundle = gen_counterexample(16, 11, tilde=True)
        assert bundle.family == Family.COUNTEREXAMPLE_TILDE
        assert bundle.poset.size == 43
        assert len(bundle.poset.cover_edges) == 90
        assert not bundle.poset.reduction_warning
        b1 = bundle.poset.index_of("b1")
        assert bundle.poset.less(b1, bundle.poset.index_of("a16"))

    @pytest.mark.parametrize("p,q,tilde", [(3, 1, False), (5, 6, False), (6, 0, False), (4, 2, True)])
    def test_invalid_parameters(self, p, q, tilde):
        with pytest.raises(InvalidParameters):
            gen_counterexample(p, q, tilde)


class TestLift:
    def test_series_composition(self, counterexample):
        lifted = lift(counterexample)
        poset = lifted.poset
        assert lifted.family == Family.LIFTED
        assert poset.size == 2 * 14 + 3
        assert width(poset) == width(counterexample.poset) + 1
        assert len(lifted.chains) == 4
        for name in counterexample.poset.elements:
            assert poset.less(poset.index_of(f"g1:{name}"), poset.index_of(f"g2:{name}"))
        assert poset.less(poset.index_of("s"), poset.index_of("t"))

    def test_lift_of_bare_poset(self):
        lifted = lift(build_poset(["a", "b"], []))
        assert lifted.parameters["base"] == "poset"
        assert width(lifted.poset) == 3

    def test_empty_poset(self):
        with pytest.raises(EmptyPoset):
            lift(build_poset([], []))

    def test_custom_prefixes(self):
        lifted = lift(build_poset(["a"], []), copies_prefix=("low", "high"))
        assert set(lifted.poset.elements) == {"low:a", "high:a", "s", "v", "t"}

    def test_prefixes_must_differ(self):
        with pytest.raises(InvalidParameters):
            lift(build_poset(["a"], []), copies_prefix=("g", "g"))

    def _rainbows_around_v(self, v_after_first_copy):
        base = gen_lazy_lb(3)
        lifted = lift(base).poset
        inner = base.prescribed_extension.names(base.poset)
        first = [f"g1:{name}" for name in inner]
        second = [f"g2:{name}" for name in inner]
        if v_after_first_copy:
            order, copy = ["s"] + first + ["v"] + second + ["t"], first
        else:
            order, copy = ["s", "v"] + first + second + ["t"], second
        ext = LinearExtension.build(lifted, order)
        copy_set = {lifted.index_of(name) for name in copy}
        copy_edges = [(u, w) for u, w in lifted.cover_edges if u in copy_set and w in copy_set]
        return max_rainbow(ext, lifted.cover_edges)[0], max_rainbow(ext, copy_edges)[0]

    def test_v_after_first_copy_nests_it(self):
        whole, inner = self._rainbows_around_v(True)
        assert inner == 6
        assert whole >= inner + 1

    def test_v_before_second_copy_nests_it(self):
        whole, inner = self._rainbows_around_v(False)
        assert inner == 6
        assert whole >= inner + 1


class TestLiftIterated:
    @pytest.mark.parametrize("levels", [1, 2, 3])
    def test_each_level_adds_one_to_width(self, counterexample, levels):
        bundle = lift_iterated(counterexample, levels)
        assert width(bundle.poset) == width(counterexample.poset) + levels
        assert len(bundle.chains) == len(counterexample.chains) + levels
        assert not bundle.poset.reduction_warning
        assert bundle.parameters["levels"] == levels
        assert bundle.parameters["base"] == "counterexample"

    def test_sizes_and_names(self, counterexample):
        sizes = [lift_iterated(counterexample, levels).poset.size for levels in (1, 2, 3)]
        assert sizes == [31, 65, 133]
        elements = lift_iterated(counterexample, 2).poset.elements
        assert len(set(elements)) == len(elements)
        assert {"s", "g1:s", "g2:s", "g1:g2:a1", "g2:g1:b2"} <= set(elements)

    def test_lifted_extensions_keep_copies_apart(self, counterexample):
        bundle = lift_iterated(counterexample, 2)
        ext, _ = mru_extension(bundle.poset, bundle.chains)
        pos = ext.position
        first = [v for v, name in enumerate(bundle.poset.elements) if name.startswith("g1:")]
        second = [v for v, name in enumerate(bundle.poset.elements) if name.startswith("g2:")]
        assert max(pos[v] for v in first) < min(pos[v] for v in second)

    def test_rejects_zero_levels(self, counterexample):
        with pytest.raises(InvalidParameters):
            lift_iterated(counterexample, 0)
