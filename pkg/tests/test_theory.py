import pytest

from theorykit.errors import CapabilityError
from theorykit.graded import GradedSet, Profile, SortSet, enumerate_words
from theorykit.signature import Operation, Signature, signature, single_sorted
from theorykit.theory import (
    FiniteTheory,
    FreeTheory,
    Term,
    TheoryMorphism,
    adjoin_constants,
    check_clone_laws,
    collapse_theory,
    collapse_with_constant_theory,
    endomorphism_theory,
    endomorphism_theory_of_map,
    enumerate_theory_morphisms,
    free_theory,
    free_theory_hom_from_placement,
    pointed_sets_theory,
    substitute_term,
    theory_coproduct_free,
    undercategory_theory,
)
from theorykit.trees import Leaf, Node
from theorykit import algebra as al
from theorykit.graded import GradedMap

SINGLE = SortSet(("*",))


class TestFreeTheory:
    def test_pointed_value_counts(self):
        # one nullary generator: variables plus the constant
        ft = free_theory(single_sorted({"c": 0}))
        for n in range(4):
            enum = ft.value("*", ("*",) * n, 3)
            assert enum.exact
            assert len(enum.terms) == n + 1

    def test_binary_values_are_inexact(self):
        ft = free_theory(single_sorted({"m": 2}))
        enum = ft.value("*", ("*",), 4)
        # x, m(x,x), m(m(x,x),x), m(x,m(x,x)), ... repetition allowed
        assert not enum.exact
        assert len(enum.terms) > 1

    def test_projection_substitution(self):
        ft = free_theory(single_sorted({"m": 2}))
        w = ("*", "*", "*")
        terms = ft.value("*", ("*", "*"), 2).terms
        for k in range(3):
            args = tuple(terms[i % len(terms)] for i in range(3))
            # substituting into a projection picks the k-th argument,
            # after renaming the argument into the outer word
            got = ft.substitute(ft.projection(w, k), args)
            assert got.tree == args[k].tree

    def test_unit_law(self):
        ft = free_theory(single_sorted({"m": 2, "e": 0}))
        w = ("*", "*")
        for t in ft.value("*", w, 3).terms:
            assert ft.substitute(t, ft.unit_terms(w)) == t

    def test_substitution_associativity(self):
        ft = free_theory(single_sorted({"m": 2}))
        w = ("*", "*")
        pool = ft.value("*", w, 2).terms
        for t in pool:
            us = (pool[0], pool[-1])
            vs = (pool[1 % len(pool)], pool[2 % len(pool)])
            lhs = ft.substitute(ft.substitute(t, us), vs)
            rhs = ft.substitute(t, tuple(ft.substitute(u, vs) for u in us))
            assert lhs == rhs

    def test_variables_can_repeat_and_vanish(self):
        ft = free_theory(single_sorted({"m": 2}))
        terms = ft.value("*", ("*",), 1).terms
        # m applied to the same variable twice appears at arity 1
        squared = [t for t in terms if isinstance(t.tree, Node)]
        assert squared and squared[0].var_map == (0, 0)


class TestCollapseTheory:
    def test_values(self):
        c = collapse_theory()
        assert c.value("*", ()) == ()
        for n in range(1, 4):
            assert c.value("*", ("*",) * n) == ("*",)

    def test_projections_coincide(self):
        c = collapse_theory()
        w = ("*", "*", "*")
        assert len({c.projection(w, k) for k in range(3)}) == 1

    def test_clone_laws(self):
        assert check_clone_laws(collapse_theory(), 3) == []


class TestEndomorphismTheory:
    def test_sizes_for_two_element_carrier(self):
        x = GradedSet(SINGLE, {"*": ["0", "1"]})
        end = endomorphism_theory(x)
        assert len(end.value("*", ("*",))) == 4
        assert len(end.value("*", ("*", "*"))) == 16
        assert len(end.value("*", ())) == 2

    def test_singleton_carrier_is_trivial(self):
        x = GradedSet(SINGLE, {"*": ["p"]})
        end = endomorphism_theory(x)
        for w in enumerate_words(SINGLE, 2):
            assert len(end.value("*", w)) == 1

    def test_clone_laws_small(self):
        x = GradedSet(SINGLE, {"*": ["0", "1"]})
        assert check_clone_laws(endomorphism_theory(x), 1) == []

    def test_classification_counts(self):
        p = pointed_sets_theory()
        x = GradedSet(SINGLE, {"*": ["0", "1"]})
        homs = enumerate_theory_morphisms(p, endomorphism_theory(x), 2)
        structures = [
            a for a in al.enumerate_algebras(p, 2, up_to_iso=False)
            if a.carrier.total_size() == 2
        ]
        assert len(homs) == len(structures) == 2

    def test_endomorphism_of_map(self):
        x = GradedSet(SINGLE, {"*": ["0", "1"]})
        g = GradedMap(x, x, {"*": {"0": "0", "1": "0"}})
        end = endomorphism_theory_of_map(g)
        # pairs (f_X, f_Y) with g f_X = f_Y g; per unary op: 4x4 filtered
        vals = end.value("*", ("*",))
        assert 0 < len(vals) < 16
        assert check_clone_laws(end, 1, max_cases=2000) == []


class TestTheoryMorphisms:
    def test_identity_checks(self):
        p = pointed_sets_theory()
        assert TheoryMorphism.identity(p).check(2) == []

    def test_collapse_all_morphism(self):
        phi = TheoryMorphism(
            pointed_sets_theory(), collapse_with_constant_theory(),
            lambda j, w, e: "*",
        )
        assert phi.check(2) == []

    def test_no_morphism_from_collapse_to_pointed(self):
        # the collapse theory's projections coincide; pointed sets
        # distinguish them, so no morphism can preserve projections
        homs = enumerate_theory_morphisms(
            collapse_theory(), pointed_sets_theory(), 2
        )
        assert homs == []

    def test_morphism_count_into_collapse_with_constant(self):
        homs = enumerate_theory_morphisms(
            pointed_sets_theory(), collapse_with_constant_theory(), 2
        )
        assert len(homs) == 1


class TestFreeTheoryUniversalProperty:
    def test_placement_evaluation_is_morphism_within_bound(self):
        sig = single_sorted({"c": 0})
        ft = free_theory(sig)
        p = pointed_sets_theory()
        ev = free_theory_hom_from_placement(ft, p, {sig["c"]: ("c", "*")})
        # unit preservation
        for w in enumerate_words(SINGLE, 2):
            for k in range(len(w)):
                assert ev("*", w, ft.projection(w, k)) == p.projection(w, k)
        # substitution compatibility
        w = ("*", "*")
        v = ("*",)
        terms_w = ft.value("*", w, 2).terms
        terms_v = ft.value("*", v, 2).terms
        for t in terms_w:
            for u1 in terms_v:
                for u2 in terms_v:
                    lhs = ev("*", v, ft.substitute(t, (u1, u2)))
                    rhs = p.substitute(
                        "*", w, ev("*", w, t), v,
                        (ev("*", v, u1), ev("*", v, u2)),
                    )
                    assert lhs == rhs

    def test_hom_counts_into_collapse(self):
        collapse = collapse_theory()
        cases = {
            "binary": (single_sorted({"m": 2}), 1),
            "nullary": (single_sorted({"c": 0}), 0),
        }
        for label, (sig, want) in cases.items():
            placements = 1
            for op in sig.ops:
                placements *= len(collapse.value(op.output, op.inputs))
            assert placements == want, label


class TestCoproductOfFreeTheories:
    def test_empty_right_summand(self):
        a = free_theory(single_sorted({"m": 2}))
        b = free_theory(signature([]))
        total, cert = theory_coproduct_free(a, b)
        assert total.signature == a.signature.disjoint_union(b.signature)
        for leaves in (1, 2, 3):
            p = Profile("*", ("*",) * leaves)
            lhs, rhs = cert.counts(p, 4)
            assert lhs == rhs

    def test_cardinality_ledger_at_three_leaves(self):
        a = free_theory(single_sorted({"a": 2}))
        b = free_theory(single_sorted({"b": 2}))
        _, cert = theory_coproduct_free(a, b)
        p = Profile("*", ("*", "*", "*"))
        assert cert.counts(p, 4) == (8, 8)
        # ledger by essential leaf count: 2 + 2 + 4
        by_leaves = {}
        for e, forest in cert.pairs(p, 4):
            from theorykit.trees import leaf_count

            by_leaves.setdefault(leaf_count(e), 0)
            by_leaves[leaf_count(e)] += 1
        assert by_leaves == {1: 2, 2: 2, 3: 4}

    def test_name_clash_rejected(self):
        a = free_theory(single_sorted({"m": 2}))
        with pytest.raises(ValueError):
            theory_coproduct_free(a, a)


class TestUndercategoryTheory:
    def test_initial_algebra_gives_same_theory(self):
        p = pointed_sets_theory()
        init = al.free_algebra(p, GradedSet(SINGLE, {"*": []}))
        under = undercategory_theory(p, init)
        for n in range(4):
            assert len(under.value("*", ("*",) * n)) == n + 1
        assert check_clone_laws(under, 2) == []

    def test_two_element_pointed_set(self):
        p = pointed_sets_theory()
        algebras = al.enumerate_algebras(p, 2, up_to_iso=False)
        x = [a for a in algebras if a.carrier.total_size() == 2][0]
        under = undercategory_theory(p, x)
        assert [len(under.value("*", ("*",) * n)) for n in range(4)] == \
            [2, 3, 4, 5]
        assert check_clone_laws(under, 2) == []

    def test_free_theory_route_matches_tree_counts(self):
        ft = free_theory(single_sorted({"c": 0}))
        l = GradedSet(SINGLE, {"*": ["l0"]})
        x = al.FreeAlgebraOverFree(ft, l)
        under = undercategory_theory(ft, x)
        assert isinstance(under, FreeTheory)
        for n in range(3):
            got = under.value("*", ("*",) * n, 3)
            want = ft.value("*", ("*",) * (n + 1), 3)
            assert got.exact and want.exact
            assert len(got.terms) == len(want.terms)

    def test_free_route_requires_free_algebra(self):
        ft = free_theory(single_sorted({"c": 0}))
        with pytest.raises(CapabilityError):
            undercategory_theory(ft, object())


def test_finite_theory_serialization_roundtrip():
    from theorykit.io import theory_from_data, theory_to_data

    p = pointed_sets_theory()
    data = theory_to_data(p, 2)
    back = theory_from_data(data)
    for w in enumerate_words(SINGLE, 2):
        assert len(back.value("*", w)) == len(p.value("*", w))
    assert check_clone_laws(back, 2) == []
    assert theory_to_data(back, 2) == data


def test_builtin_theory_loading():
    from theorykit.io import theory_from_data

    t = theory_from_data({"kind": "builtin", "name": "collapse"})
    assert t.value("*", ()) == ()
    with pytest.raises(ValueError):
        theory_from_data({"kind": "builtin", "name": "nope"})
