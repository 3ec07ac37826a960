import itertools

import pytest

from theorykit.errors import FunctorialityError, TruncationError
from theorykit.graded import (
    ArityMorphism,
    GradedMap,
    GradedSet,
    Profile,
    SortSet,
    enumerate_arity_morphisms,
    enumerate_words,
    graded_from_word,
)
from theorykit.series import (
    FreeSeries,
    TabulatedSeries,
    UnitSeries,
    check_functoriality,
    compose,
    delta,
    evaluate,
    evaluate_map,
    free_series,
    star_associator,
    star_compose_iso,
    star_product,
    star_unit_left_iso,
    star_unit_right_iso,
    tabulate,
)
from theorykit.signature import Operation, Signature, signature, single_sorted
from theorykit.theory import collapse_theory, pointed_sets_theory

SINGLE = SortSet(("*",))
BIN = single_sorted({"m": 2})


def gset(*names, sorts=SINGLE, sort="*"):
    return GradedSet(sorts, {sort: list(names)})


class TestEvaluate:
    def test_unit_series_is_identity(self):
        x = gset("a", "b", "c")
        assert evaluate(UnitSeries(SINGLE), x) == x

    def test_free_series_closed_formula(self):
        x = gset("a", "b", "c")
        got = evaluate(free_series(BIN), x)
        assert got.total_size() == 9

    def test_free_series_multi_sorted(self):
        sig = signature([("e", "u", ["v", "v"])], sorts=("u", "v"))
        x = GradedSet(SortSet(("u", "v")), {"u": [], "v": ["p", "q"]})
        got = evaluate(free_series(sig), x)
        assert len(got.elements("u")) == 4
        assert len(got.elements("v")) == 0

    def test_collapse_series_by_coequalizer(self):
        series = collapse_theory().underlying_series(4)
        for size in (1, 2, 3):
            x = gset(*[f"v{i}" for i in range(size)])
            assert evaluate(series, x).total_size() == 1
        assert evaluate(series, gset()).total_size() == 0

    def test_truncation_error_when_set_too_big(self):
        series = collapse_theory().underlying_series(2)
        with pytest.raises(TruncationError):
            evaluate(series, gset("a", "b", "c"))

    def test_representability(self):
        # evaluate(A, K) recovers the table A(K) on representables
        for theory in (collapse_theory(), pointed_sets_theory()):
            series = theory.underlying_series(3)
            for w in enumerate_words(SINGLE, 3):
                x = graded_from_word(SINGLE, w)
                got = evaluate(series, x)
                assert got.total_size() == len(series.value("*", w))

    def test_evaluate_map_functorial(self):
        series = pointed_sets_theory().underlying_series(3)
        x = gset("a", "b")
        y = gset("c")
        h = GradedMap(x, y, {"*": {"a": "c", "b": "c"}})
        hh = evaluate_map(series, h)
        assert hh.domain == evaluate(series, x)
        assert hh.codomain == evaluate(series, y)
        ident = evaluate_map(series, GradedMap.identity(x))
        assert ident.is_identity()


class TestCompose:
    def test_unit_laws(self):
        unit = UnitSeries(SINGLE)
        b = free_series(BIN)
        left = compose(unit, b, 4)
        right = compose(b, unit, 4)
        for w in enumerate_words(SINGLE, 4):
            assert len(left.value("*", w)) == len(b.value("*", w))
            assert len(right.value("*", w)) == len(b.value("*", w))

    def test_binary_composite_count(self):
        comp = compose(free_series(BIN), free_series(single_sorted({"b": 2})), 4)
        # (S A . S B)(4) = |hom(2,4)|^2 = 256 and S(A*B)(4) likewise
        assert len(comp.value("*", ("*",) * 4)) == 256

    def test_composite_action_is_functorial(self):
        comp = compose(free_series(BIN), free_series(single_sorted({"b": 2})), 3)
        assert check_functoriality(comp, 3) == []

    def test_iterated_evaluation_agrees(self):
        a = free_series(single_sorted({"m": 2, "e": 0}))
        b = free_series(single_sorted({"u": 1}))
        comp = compose(a, b, 3)
        for size in (0, 1, 2):
            x = gset(*[f"v{i}" for i in range(size)])
            direct = evaluate(a, evaluate(b, x))
            via = evaluate(comp, x)
            assert via.total_size() == direct.total_size()


class TestStarProduct:
    def test_binary_binary(self):
        prod = star_product(BIN, single_sorted({"b": 2}))
        assert [len(prod.at_profile(p)) for p in prod.support()] == [1]
        assert prod.support()[0] == Profile("*", ("*",) * 4)

    def test_unit_laws(self):
        for sig in (BIN, single_sorted({"c": 0, "u": 1})):
            left = star_unit_left_iso(sig)
            right = star_unit_right_iso(sig)
            assert sorted(map(str, left.values())) == sorted(map(str, sig.ops))
            assert sorted(map(str, right.values())) == sorted(map(str, sig.ops))
            for iso in (left, right):
                for src, dst in iso.items():
                    assert src.profile == dst.profile

    def test_unary_with_constants(self):
        # A has one unary op; B has one constant and one unary op
        a = single_sorted({"u": 1})
        b = single_sorted({"c": 0, "w": 1})
        prod = star_product(a, b)
        by_arity = {}
        for op in prod.ops:
            by_arity[len(op.inputs)] = by_arity.get(len(op.inputs), 0) + 1
        assert by_arity == {0: 1, 1: 1}

    def test_delta_values(self):
        d = delta(SINGLE)
        assert len(d.ops) == 1
        assert d.ops[0].profile == Profile("*", ("*",))
        two = delta(SortSet(("v", "e")))
        assert {op.profile for op in two.ops} == {
            Profile("v", ("v",)), Profile("e", ("e",)),
        }

    def test_free_series_of_delta_is_unit(self):
        d = delta(SINGLE)
        s = free_series(d)
        unit = UnitSeries(SINGLE)
        for w in enumerate_words(SINGLE, 3):
            assert len(s.value("*", w)) == len(unit.value("*", w))

    def test_associator_bijection(self):
        for a, b, c in [
            (BIN, single_sorted({"b": 2}), single_sorted({"c": 2})),
            (single_sorted({"m": 2, "e": 0}), single_sorted({"u": 1}),
             single_sorted({"n": 2})),
        ]:
            assoc = star_associator(a, b, c)
            left = star_product(star_product(a, b), c)
            right = star_product(a, star_product(b, c))
            assert len(assoc) == len(left.ops)
            assert len(set(assoc.values())) == len(right.ops)
            for src, dst in assoc.items():
                assert src.profile == dst.profile

    def test_star_compose_natural_bijection(self):
        a, b = BIN, single_sorted({"b": 2})
        for w in [("*",) * 4, ("*",) * 2, ()]:
            iso = star_compose_iso(a, b, "*", w)
            comp = compose(free_series(a), free_series(b), 4)
            assert len(iso) == len(comp.value("*", w))


class TestFunctoriality:
    def test_unit_passes(self):
        assert check_functoriality(tabulate(UnitSeries(SINGLE), 3), 3) == []

    def test_free_passes(self):
        sig = single_sorted({"m": 2, "e": 0})
        assert check_functoriality(tabulate(free_series(sig), 3), 3) == []

    def test_corrupted_table_fails(self):
        base = free_series(BIN)

        def corrupt(j, morphism):
            if morphism.domain == ("*", "*") and morphism.mapping == (1, 0):
                # pretend the swap acts as the identity
                return {v: v for v in base.value(j, morphism.domain)}
            return base.act(j, morphism)

        bad = TabulatedSeries(SINGLE, SINGLE, 2, base.value, corrupt)
        assert check_functoriality(bad, 2) != []

    def test_malformed_action_rejected(self):
        base = free_series(BIN)
        bad = TabulatedSeries(SINGLE, SINGLE, 2, base.value, lambda j, m: {})
        with pytest.raises(FunctorialityError):
            bad.act("*", ArityMorphism(("*", "*"), ("*", "*"), (0, 1)))


def test_series_table_roundtrip():
    from theorykit.io import series_from_data, series_to_data

    sig = single_sorted({"m": 2, "e": 0})
    data = series_to_data(free_series(sig), 2)
    back = series_from_data(data)
    for w in enumerate_words(SINGLE, 2):
        assert len(back.value("*", w)) == len(free_series(sig).value("*", w))
    assert series_to_data(back, 2) == data
    assert check_functoriality(back, 2) == []
