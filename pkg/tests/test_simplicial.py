import itertools
import math

import pytest

from theorykit.errors import FunctorialityError, TruncationError
from theorykit.graded import GradedMap, GradedSet, SortSet
from theorykit.simplicial import (
    FreenessCertificate,
    FreenessFailure,
    SubDiagram,
    Surjection,
    TruncatedDegeneracyDiagram,
    check_sfree,
    enumerate_surjections,
    factor_elementary,
    free_generators,
    is_closed_subdiagram,
    rebuild_from_certificate,
    standard_resolution_levels,
    subdiagram_as_diagram,
)
from theorykit.theory import pointed_sets_theory
from theorykit import algebra as al

SINGLE = SortSet(("*",))


def monotone_maps(n, k):
    return [
        values
        for values in itertools.product(range(k + 1), repeat=n + 1)
        if all(a <= b for a, b in zip(values, values[1:]))
    ]


def nerve(k, truncation):
    levels = [
        GradedSet(SINGLE, {"*": monotone_maps(n, k)})
        for n in range(truncation + 1)
    ]
    ops = {}
    for n in range(truncation):
        for i in range(n + 1):
            sigma = Surjection.elementary(n, i)
            ops[(n, i)] = GradedMap(
                levels[n], levels[n + 1],
                {"*": {x: tuple(x[v] for v in sigma.values)
                       for x in levels[n].elements("*")}},
            )
    return TruncatedDegeneracyDiagram(levels, ops)


class TestSurjections:
    @pytest.mark.parametrize("n,m,count", [
        (2, 1, 2), (3, 1, 3), (3, 3, 1), (4, 2, 6), (1, 0, 1), (0, 1, 0),
    ])
    def test_counts(self, n, m, count):
        assert len(enumerate_surjections(n, m)) == count

    def test_counts_are_binomial(self):
        for n in range(6):
            for m in range(n + 1):
                assert len(enumerate_surjections(n, m)) == math.comb(n, m)

    def test_validation(self):
        Surjection(2, 1, (0, 0, 1)).validate()
        with pytest.raises(ValueError):
            Surjection(2, 1, (0, 1, 1, 1)).validate()
        with pytest.raises(ValueError):
            Surjection(2, 2, (0, 0, 1)).validate()

    def test_factorization(self):
        for n in range(5):
            for m in range(n + 1):
                for sigma in enumerate_surjections(n, m):
                    acc = Surjection.identity(n)
                    for (level, i) in factor_elementary(sigma):
                        acc = acc.then(Surjection.elementary(level, i))
                    assert acc == sigma

    def test_composition(self):
        s = Surjection.elementary(1, 0)  # [2] -> [1]
        t = Surjection.elementary(0, 0)  # [1] -> [0]
        assert s.then(t) == Surjection(2, 0, (0, 0, 0))


class TestDiagrams:
    def test_nerve_sizes_and_functoriality(self):
        d = nerve(1, 3)
        assert [d.level(n).total_size() for n in range(4)] == [2, 3, 4, 5]
        assert d.check_functoriality() == []

    def test_levels_beyond_truncation_rejected(self):
        d = nerve(1, 2)
        with pytest.raises(TruncationError):
            d.level(3)
        with pytest.raises(TruncationError):
            d.operator(Surjection(3, 1, (0, 0, 0, 1)))

    def test_missing_operator_rejected(self):
        levels = [GradedSet(SINGLE, {"*": ["a"]}),
                  GradedSet(SINGLE, {"*": ["sa"]})]
        with pytest.raises(ValueError, match="missing"):
            TruncatedDegeneracyDiagram(levels, {})

    def test_broken_relations_fail_functoriality(self):
        # two elementary maps out of level 1 that cannot commute
        levels = [
            GradedSet(SINGLE, {"*": ["x"]}),
            GradedSet(SINGLE, {"*": ["a", "b"]}),
            GradedSet(SINGLE, {"*": ["p", "q"]}),
        ]
        ops = {
            (0, 0): GradedMap(levels[0], levels[1], {"*": {"x": "a"}}),
            (1, 0): GradedMap(levels[1], levels[2],
                              {"*": {"a": "p", "b": "q"}}),
            (1, 1): GradedMap(levels[1], levels[2],
                              {"*": {"a": "q", "b": "p"}}),
        }
        d = TruncatedDegeneracyDiagram(levels, ops)
        assert d.check_functoriality() != []
        with pytest.raises(FunctorialityError):
            free_generators(d)


class TestFreeness:
    def test_nerve_is_free(self):
        d = nerve(1, 3)
        cert = free_generators(d)
        assert isinstance(cert, FreenessCertificate)
        assert cert.generator_counts() == [2, 1, 0, 0]
        assert rebuild_from_certificate(d, cert)

    def test_nerve_of_two_is_free(self):
        d = nerve(2, 3)
        cert = free_generators(d)
        assert isinstance(cert, FreenessCertificate)
        assert cert.generator_counts() == [3, 3, 1, 0]

    def test_glued_diagram_fails_with_witness(self):
        levels = [
            GradedSet(SINGLE, {"*": ["x"]}),
            GradedSet(SINGLE, {"*": ["sx", "y"]}),
            GradedSet(SINGLE, {"*": ["ssx", "w"]}),
        ]
        ops = {
            (0, 0): GradedMap(levels[0], levels[1], {"*": {"x": "sx"}}),
            (1, 0): GradedMap(levels[1], levels[2],
                              {"*": {"sx": "ssx", "y": "w"}}),
            (1, 1): GradedMap(levels[1], levels[2],
                              {"*": {"sx": "ssx", "y": "w"}}),
        }
        verdict = free_generators(TruncatedDegeneracyDiagram(levels, ops))
        assert isinstance(verdict, FreenessFailure)
        assert verdict.element == "w"
        assert len(verdict.decompositions) == 2
        assert "2 decompositions" in str(verdict)

    def test_constant_diagram_is_free_on_level_zero(self):
        value = GradedSet(SINGLE, {"*": ["k1", "k2"]})
        d = TruncatedDegeneracyDiagram.constant(SINGLE, value, 3)
        cert = free_generators(d)
        assert isinstance(cert, FreenessCertificate)
        assert cert.generator_counts() == [2, 0, 0, 0]


class TestClosedSubdiagrams:
    def test_whole_diagram_is_closed(self):
        d = nerve(1, 3)
        whole = SubDiagram(tuple(
            {"*": frozenset(d.level(n).elements("*"))} for n in range(4)
        ))
        assert is_closed_subdiagram(d, whole) == (True, None)

    def test_generated_subdiagram_closed_and_free(self):
        d = nerve(1, 3)
        sub = SubDiagram(tuple(
            {"*": frozenset({(0,) * (n + 1)})} for n in range(4)
        ))
        closed, _ = is_closed_subdiagram(d, sub)
        assert closed
        inner = subdiagram_as_diagram(d, sub)
        assert isinstance(free_generators(inner), FreenessCertificate)

    def test_degenerate_without_root_not_closed(self):
        d = nerve(1, 3)
        gen = (0, 1)  # the non-degenerate 1-simplex
        levels = [{"*": frozenset()}, {"*": frozenset()}]
        for n in (2, 3):
            keep = {
                d.operator(sigma)("*", gen)
                for sigma in enumerate_surjections(n, 1)
            }
            levels.append({"*": frozenset(keep)})
        closed, witness = is_closed_subdiagram(d, SubDiagram(tuple(levels)))
        assert not closed
        assert witness is not None

    def test_unstable_subsets_rejected(self):
        d = nerve(1, 2)
        bad = SubDiagram((
            {"*": frozenset({(0, 0)})},  # only a level-... wrong level data
            {"*": frozenset()},
            {"*": frozenset()},
        ))
        with pytest.raises(ValueError, match="stable"):
            is_closed_subdiagram(d, bad)


class TestStandardResolution:
    def setup_method(self):
        self.p = pointed_sets_theory()
        carrier = GradedSet(SINGLE, {"*": ["p0", "p1"]})
        w = carrier.word()
        psi = {"*": {}}
        for t in self.p.value("*", w):
            psi["*"][t] = f"p{t[1]}" if t[0] == "x" else "p0"
        self.x = al.Algebra(self.p, carrier, psi)

    def test_level_sizes(self):
        d = standard_resolution_levels(self.p, self.x, 3)
        assert [d.level(n).total_size() for n in range(4)] == [2, 3, 4, 5]

    def test_functorial_and_free(self):
        d = standard_resolution_levels(self.p, self.x, 3)
        assert d.check_functoriality() == []
        cert = free_generators(d)
        assert isinstance(cert, FreenessCertificate)
        assert rebuild_from_certificate(d, cert)

    def test_truncation_zero_is_constant(self):
        d = standard_resolution_levels(self.p, self.x, 0)
        assert d.level(0) == self.x.carrier

    def test_check_sfree(self):
        d = standard_resolution_levels(self.p, self.x, 3)
        assert isinstance(check_sfree(d), FreenessCertificate)
        const = TruncatedDegeneracyDiagram.constant(
            SINGLE, GradedSet(SINGLE, {"*": ["k"]}), 3
        )
        assert isinstance(check_sfree(const), FreenessCertificate)


def test_diagram_serialization_roundtrip():
    from theorykit.io import diagram_from_data, diagram_to_data

    d = nerve(1, 2)
    data = diagram_to_data(d)
    back = diagram_from_data(data)
    assert back.truncation == 2
    assert back.check_functoriality() == []
    # element names are stringified in files
    assert [back.level(n).total_size() for n in range(3)] == [2, 3, 4]
    assert diagram_to_data(back) == data
