import pytest

from theorykit.errors import CapabilityError
from theorykit.graded import GradedMap, GradedSet, Profile, SortSet
from theorykit.signature import signature, single_sorted
from theorykit import algebra as al
from theorykit.theory import (
    FreeTheory,
    TheoryMorphism,
    collapse_theory,
    collapse_with_constant_theory,
    free_theory,
    pointed_sets_theory,
)

SINGLE = SortSet(("*",))
P = pointed_sets_theory()
C = collapse_theory()


def gset(*names):
    return GradedSet(SINGLE, {"*": list(names)})


def pointed(names, basepoint):
    carrier = gset(*names)
    w = carrier.word()
    psi = {"*": {}}
    for t in P.value("*", w):
        psi["*"][t] = names[t[1]] if t[0] == "x" else basepoint
    return al.Algebra(P, carrier, psi)


def name_map(src, dst, table):
    return al.AlgebraMap(
        src, dst,
        GradedMap(src.carrier, dst.carrier, {"*": table}),
    )


class TestAlgebraBasics:
    def test_laws_checked(self):
        x = pointed(["a", "b"], "a")
        assert x.check_laws() == []

    def test_unit_law_violation_detected(self):
        carrier = gset("a", "b")
        bad_psi = {"*": {t: "a" for t in P.value("*", carrier.word())}}
        bad = al.Algebra(P, carrier, bad_psi)
        assert bad.check_laws() != []

    def test_eval_variables(self):
        x = pointed(["a", "b"], "a")
        w = ("*", "*")
        for k, expected in [(0, "b"), (1, "a")]:
            got = x.eval("*", w, P.projection(w, k), ("b", "a"))
            assert got == expected

    def test_eval_constant(self):
        x = pointed(["a", "b"], "b")
        got = x.eval("*", (), ("c", "*"), ())
        assert got == "b"


class TestFreeAlgebras:
    def test_pointed_free_sizes(self):
        for n in range(4):
            k = gset(*[f"k{i}" for i in range(n)])
            assert al.free_algebra(P, k).carrier.total_size() == n + 1

    def test_collapse_free_algebras(self):
        assert al.free_algebra(C, gset()).carrier.total_size() == 0
        assert al.free_algebra(C, gset("k")).carrier.total_size() == 1

    def test_induced_map_universal(self):
        k = gset("k0", "k1")
        free = al.free_algebra(P, k)
        x = pointed(["a", "b"], "a")
        h = al.induced_from_free(
            free, x, GradedMap(k, x.carrier, {"*": {"k0": "b", "k1": "b"}})
        )
        assert h.is_homomorphism()
        assert h("*", free.generator_element("*", "k0")) == "b"


class TestEnumerateAlgebras:
    def test_collapse_has_exactly_two(self):
        algebras = al.enumerate_algebras(C, 3)
        assert sorted(a.carrier.total_size() for a in algebras) == [0, 1]

    def test_pointed_structures_on_two_elements(self):
        raw = [a for a in al.enumerate_algebras(P, 2, up_to_iso=False)
               if a.carrier.total_size() == 2]
        reduced = [a for a in al.enumerate_algebras(P, 2)
                   if a.carrier.total_size() == 2]
        assert len(raw) == 2
        assert len(reduced) == 1

    def test_cross_check_with_endomorphism_homs(self):
        from theorykit.theory import endomorphism_theory, \
            enumerate_theory_morphisms

        for size in (1, 2):
            x = gset(*[f"e{i}" for i in range(size)])
            homs = enumerate_theory_morphisms(P, endomorphism_theory(x), 2)
            structures = [
                a for a in al.enumerate_algebras(P, size, up_to_iso=False)
                if a.carrier.total_size() == size
            ]
            assert len(homs) == len(structures)


class TestRestrictInduct:
    def test_restrict_identity(self):
        x = pointed(["a", "b"], "a")
        back = al.restrict(TheoryMorphism.identity(P), x)
        assert back.psi == x.psi

    def test_induct_preserves_free(self):
        phi = TheoryMorphism(P, collapse_with_constant_theory(),
                             lambda j, w, e: "*")
        k = gset("k0")
        got = al.induct(phi, al.free_algebra(P, k))
        want = al.free_algebra(collapse_with_constant_theory(), k)
        assert al.find_isomorphism(got, want) is not None

    def test_adjunction_by_double_enumeration(self):
        t2 = collapse_with_constant_theory()
        phi = TheoryMorphism(P, t2, lambda j, w, e: "*")
        xs = [pointed(["a"], "a"), pointed(["a", "b"], "a")]
        ys = al.enumerate_algebras(t2, 2, up_to_iso=False)
        for x in xs:
            pushed = al.induct(phi, x)
            for y in ys:
                lhs = len(al.enumerate_algebra_maps(pushed, y))
                rhs = len(al.enumerate_algebra_maps(x, al.restrict(phi, y)))
                assert lhs == rhs


class TestRelativeComposition:
    def test_identity_bimodule_is_identity(self):
        m = al.theory_bimodule(TheoryMorphism.identity(P))
        x = pointed(["a", "b"], "b")
        got = al.relative_composition(m, x)
        assert al.find_isomorphism(got, x) is not None

    def test_value_on_free_algebras(self):
        m = al.theory_bimodule(TheoryMorphism.identity(P))
        for n in (0, 1, 2):
            k = gset(*[f"k{i}" for i in range(n)])
            got = al.relative_composition(m, al.free_algebra(P, k))
            assert got.carrier.total_size() == n + 1  # M(K) for M = P

    def test_collapse_singleton_fixture(self):
        m = al.theory_bimodule(TheoryMorphism.identity(C))
        point = [a for a in al.enumerate_algebras(C, 1)
                 if a.carrier.total_size() == 1][0]
        got = al.relative_composition(m, point)
        assert got.carrier.total_size() == 1

    def test_bimodule_unit_and_associativity(self):
        # left action of a projection-value is the identity; right
        # action along eta recovers the element
        m = al.theory_bimodule(TheoryMorphism.identity(P))
        w = ("*",)
        mx = m.value_set(w)
        w_mx = mx.word()
        for sort, el in mx.pairs():
            pos = mx.position_of(sort, el)
            assert m.left_act(sort, w, P.projection(w_mx, pos)) == el


class TestCoproducts:
    def test_wedge_sizes(self):
        x = pointed(["a", "b", "c"], "a")
        y = pointed(["p", "q"], "p")
        cop = al.algebra_coproduct(x, y)
        assert cop.algebra.carrier.total_size() == 4
        assert cop.algebra.check_laws() == []

    def test_coprojections_are_homomorphisms(self):
        x = pointed(["a", "b"], "a")
        y = pointed(["p"], "p")
        cop = al.algebra_coproduct(x, y)
        for coproj in cop.coprojections:
            assert coproj.is_homomorphism()

    def test_couniversal_map(self):
        x = pointed(["a", "b"], "a")
        y = pointed(["p"], "p")
        z = pointed(["u", "v"], "u")
        cop = al.algebra_coproduct(x, y)
        f = name_map(x, z, {"a": "u", "b": "v"})
        g = name_map(y, z, {"p": "u"})
        h = cop.induced([f, g])
        assert h.is_homomorphism()
        assert cop.coprojections[0].then(h).graded == f.graded
        assert cop.coprojections[1].then(h).graded == g.graded

    def test_collapse_point_coproduct(self):
        point = [a for a in al.enumerate_algebras(C, 1)
                 if a.carrier.total_size() == 1][0]
        cop = al.algebra_coproduct(point, point)
        assert cop.algebra.carrier.total_size() == 1

    def test_free_coproduct_is_free_on_union(self):
        k = gset("k0")
        l = gset("l0", "l1")
        cop = al.algebra_coproduct(al.free_algebra(P, k),
                                   al.free_algebra(P, l))
        want = al.free_algebra(P, gset("k0", "l0", "l1"))
        assert al.find_isomorphism(cop.algebra, want) is not None

    def test_coproduct_with_free(self):
        x = pointed(["a", "b", "c"], "a")
        got = al.coproduct_with_free(x, gset("k"))
        assert got.algebra.carrier.total_size() == 4
        empty = al.coproduct_with_free(x, gset())
        assert al.find_isomorphism(empty.algebra, x) is not None

    def test_symbolic_free_coproduct(self):
        ft = free_theory(single_sorted({"c": 0}))
        a = al.FreeAlgebraOverFree(ft, gset("k"))
        b = al.FreeAlgebraOverFree(ft, gset("l"))
        both = a.coproduct(b)
        assert both.generators.total_size() == 2
        enum = both.elements("*", 3)
        assert enum.exact
        assert len(enum.trees) == 3  # k, l, and the constant


class TestPushoutsAndMonos:
    def test_pushout_of_wedges(self):
        u = pointed(["u0", "u1"], "u0")
        x = pointed(["x0", "x1", "x2"], "x0")
        v = pointed(["v0", "v1"], "v0")
        f = name_map(u, x, {"u0": "x0", "u1": "x1"})
        g = name_map(u, v, {"u0": "v0", "u1": "v1"})
        po = al.pushout(f, g)
        # gluing u across x and v: 3 + 2 - 2 = 3
        assert po.algebra.carrier.total_size() == 3
        assert po.inj_left.is_homomorphism()
        assert po.inj_right.is_homomorphism()

    def test_collapse_counterexample(self):
        algebras = al.enumerate_algebras(C, 3)
        empty = [a for a in algebras if a.carrier.total_size() == 0][0]
        point = [a for a in algebras if a.carrier.total_size() == 1][0]
        f = al.AlgebraMap(empty, point,
                          GradedMap(empty.carrier, point.carrier, {"*": {}}),
                          check=False)
        assert al.is_mono(f) == (True, None)
        effective, witness = al.is_effective_mono(f)
        assert not effective
        assert witness[0] == "equalizer exceeds image"

    def test_identity_is_effective(self):
        x = pointed(["a", "b"], "a")
        assert al.is_effective_mono(al.AlgebraMap.identity(x)) == (True, None)

    def test_free_inclusion_is_effective(self):
        k = gset("a")
        kl = gset("a", "l")
        tk = al.free_algebra(P, k)
        tkl = al.free_algebra(P, kl)
        inc = al.induced_from_free(
            tk, tkl,
            GradedMap(k, tkl.carrier,
                      {"*": {"a": tkl.generator_element("*", "a")}}),
        )
        assert al.is_effective_mono(inc) == (True, None)

    def test_non_mono_detected(self):
        x = pointed(["a", "b"], "a")
        y = pointed(["p"], "p")
        f = name_map(x, y, {"a": "p", "b": "p"})
        mono, witness = al.is_mono(f)
        assert not mono and witness is not None


class TestBar:
    def setup_method(self):
        self.x = pointed(["x0", "x1"], "x0")
        self.u = pointed(["u0", "u1"], "u0")
        self.v = pointed(["v0"], "v0")
        self.f = name_map(self.u, self.x, {"u0": "x0", "u1": "x1"})
        self.g = name_map(self.u, self.v, {"u0": "v0", "u1": "v0"})
        self.bar = al.BarComplex(self.f, self.g, 3)

    def test_level_formulas(self):
        # B_0 = X + V, B_1 = X + U + V as pointed wedges
        assert self.bar.algebra(0).carrier.total_size() == 2 + 1 - 1
        assert self.bar.algebra(1).carrier.total_size() == 2 + 2 + 1 - 2

    def test_faces_and_degeneracies_are_homs(self):
        for n in (1, 2, 3):
            for i in range(n + 1):
                assert self.bar.face(n, i).is_homomorphism()
        for n in (0, 1, 2):
            for i in range(n + 1):
                assert self.bar.degeneracy(n, i).is_homomorphism()

    def test_augmentation_is_pushout(self):
        aug = self.bar.augmentation_coequalizer()
        po = al.pushout(self.f, self.g)
        assert al.find_isomorphism(aug, po.algebra) is not None

    def test_simplicial_identities(self):
        bar = self.bar
        for n in (2, 3):
            for j in range(n + 1):
                for i in range(j):
                    lhs = bar.face(n, j).then(bar.face(n - 1, i)).graded
                    rhs = bar.face(n, i).then(bar.face(n - 1, j - 1)).graded
                    assert lhs == rhs
        for n in (0, 1):
            for j in range(n + 1):
                for i in range(j + 1):
                    lhs = bar.degeneracy(n, j).then(
                        bar.degeneracy(n + 1, i)).graded
                    rhs = bar.degeneracy(n, i).then(
                        bar.degeneracy(n + 1, j + 1)).graded
                    assert lhs == rhs
        for n in (1, 2):
            for j in range(n + 1):
                for i in range(n + 2):
                    got = bar.degeneracy(n, j).then(bar.face(n + 1, i)).graded
                    if i in (j, j + 1):
                        assert got == GradedMap.identity(
                            bar.algebra(n).carrier)
                    elif i < j:
                        assert got == bar.face(n, i).then(
                            bar.degeneracy(n - 1, j - 1)).graded
                    else:
                        assert got == bar.face(n, i - 1).then(
                            bar.degeneracy(n - 1, j)).graded


def test_quotient_algebra_by_congruence():
    x = pointed(["a", "b", "c"], "a")
    # glue b to the basepoint via a reflexive pair from the free algebra
    k = gset("g")
    free = al.free_algebra(P, k)
    h1 = al.induced_from_free(
        free, x, GradedMap(k, x.carrier, {"*": {"g": "b"}}))
    h2 = al.induced_from_free(
        free, x, GradedMap(k, x.carrier, {"*": {"g": "a"}}))
    relations = [("*", h1("*", e), h2("*", e))
                 for e in free.carrier.elements("*")]
    q, proj = al.quotient_algebra(x, relations)
    assert q.carrier.total_size() == 2
    assert proj("*", "b") == proj("*", "a")
    assert q.check_laws() == []


def test_algebra_serialization_roundtrip():
    from theorykit.io import algebra_from_data, algebra_to_data

    x = pointed(["a", "b"], "b")
    data = algebra_to_data(x)
    back = algebra_from_data(data, P)
    assert back.carrier == x.carrier
    assert back.psi == x.psi
    assert algebra_to_data(back) == data


def test_as_finite_theory_guard():
    ft = free_theory(single_sorted({"u": 1}))
    clone = al.as_finite_theory(ft, 3)
    with pytest.raises(CapabilityError):
        clone.value("*", ("*",))
