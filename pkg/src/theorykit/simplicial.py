"""Truncated degeneracy diagrams and freeness certificates.

Only the degeneracy category (weakly monotone surjections between the
ordinals [0], [1], ..., acting contravariantly) is modelled: every
freeness statement in scope mentions surjections only, and truncating
keeps all carriers finite.  A diagram is free when every element is a
degeneracy of a unique non-degenerate element in a unique way; the
certificate records that decomposition and can rebuild the diagram.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

from .errors import FunctorialityError, TruncationError
from .graded import Element, GradedMap, GradedSet, SortSet


class Surjection(NamedTuple):
    """A weakly monotone surjection [n] -> [m], as its value tuple."""

    n: int
    m: int
    values: tuple[int, ...]

    def validate(self) -> "Surjection":
        if len(self.values) != self.n + 1:
            raise ValueError("need a value for each of 0..n")
        if self.values[0] != 0 or self.values[-1] != self.m:
            raise ValueError("a monotone surjection starts at 0 and ends at m")
        for a, b in zip(self.values, self.values[1:]):
            if b - a not in (0, 1):
                raise ValueError(f"not a monotone surjection: {self.values}")
        return self

    def then(self, other: "Surjection") -> "Surjection":
        """Composite other . self : [n] -> [k] (self first)."""
        if self.m != other.n:
            raise ValueError("surjections not composable")
        return Surjection(
            self.n, other.m, tuple(other.values[v] for v in self.values)
        )

    def is_identity(self) -> bool:
        return self.n == self.m

    @staticmethod
    def identity(n: int) -> "Surjection":
        return Surjection(n, n, tuple(range(n + 1)))

    @staticmethod
    def elementary(n: int, i: int) -> "Surjection":
        """s_i: [n+1] -> [n], hitting i twice."""
        if not 0 <= i <= n:
            raise ValueError(f"elementary degeneracy s_{i} needs 0 <= i <= {n}")
        return Surjection(
            n + 1, n, tuple(j if j <= i else j - 1 for j in range(n + 2))
        )


def enumerate_surjections(n: int, m: int) -> list[Surjection]:
    """All monotone surjections [n] -> [m]; there are C(n, m) of them."""
    if m > n or m < 0:
        return []
    out = []
    for rises in itertools.combinations(range(n), m):
        values = [0]
        for j in range(n):
            values.append(values[-1] + (1 if j in rises else 0))
        out.append(Surjection(n, m, tuple(values)))
    return out


def factor_elementary(sigma: Surjection) -> list[tuple[int, int]]:
    """Factor a surjection as a composite of elementary degeneracies.

    Returns pairs (level, i) such that sigma = s(level_1, i_1) then
    s(level_2, i_2) then ... reading left to right, where s(n, i) is
    the elementary [n+1] -> [n].
    """
    if sigma.is_identity():
        return []
    for i in range(sigma.n):
        if sigma.values[i] == sigma.values[i + 1]:
            rest = Surjection(
                sigma.n - 1, sigma.m,
                sigma.values[:i] + sigma.values[i + 1:],
            )
            return [(sigma.n - 1, i)] + factor_elementary(rest)
    raise AssertionError("non-identity surjection must repeat a value")


class TruncatedDegeneracyDiagram:
    """Levels 0..N of graded sets with contravariant surjection operators.

    For a surjection sigma: [n] -> [m] the operator maps level m to
    level n (degeneracy operators raise degree).  Operators are given
    on elementary degeneracies and derived for general surjections by
    the canonical factorization; ``check_functoriality`` verifies that
    the derivation is consistent.
    """

    def __init__(self, levels: Sequence[GradedSet],
                 elementary_ops: dict[tuple[int, int], GradedMap]):
        if not levels:
            raise ValueError("need at least level 0")
        self.levels = list(levels)
        self.truncation = len(levels) - 1
        self.sorts = levels[0].sorts
        self._elementary = dict(elementary_ops)
        for (n, i), gm in self._elementary.items():
            if n + 1 > self.truncation:
                raise ValueError(f"elementary operator s_{i} at {n} beyond truncation")
            if gm.domain != self.levels[n] or gm.codomain != self.levels[n + 1]:
                raise ValueError(f"operator s_{i} at level {n} has wrong endpoints")
        for n in range(self.truncation):
            for i in range(n + 1):
                if (n, i) not in self._elementary:
                    raise ValueError(f"missing elementary operator s_{i} at level {n}")

    def level(self, n: int) -> GradedSet:
        if n > self.truncation:
            raise TruncationError(f"level {n} beyond truncation {self.truncation}")
        return self.levels[n]

    def operator(self, sigma: Surjection) -> GradedMap:
        """The operator of sigma: [n] -> [m], a map level m -> level n."""
        sigma.validate()
        if sigma.n > self.truncation:
            raise TruncationError(
                f"surjection into level {sigma.n} beyond truncation"
            )
        gm = GradedMap.identity(self.levels[sigma.m])
        for (level, i) in reversed(factor_elementary(sigma)):
            gm = gm.then(self._elementary[(level, i)])
        return gm

    def check_functoriality(self) -> list[str]:
        problems = []
        for n in range(self.truncation + 1):
            ident = self.operator(Surjection.identity(n))
            if not ident.is_identity():
                problems.append(f"identity operator at level {n} is not identity")
        for n in range(self.truncation + 1):
            for m in range(n + 1):
                for sigma in enumerate_surjections(n, m):
                    op_sigma = self.operator(sigma)
                    for k in range(self.truncation - n + 1):
                        for tau in enumerate_surjections(n + k, n):
                            lhs = self.operator(tau.then(sigma))
                            rhs = op_sigma.then(self.operator(tau))
                            if lhs != rhs:
                                problems.append(
                                    f"composite mismatch: {tau} then {sigma}"
                                )
        return problems

    @staticmethod
    def constant(sorts: SortSet, value: GradedSet, truncation: int
                 ) -> "TruncatedDegeneracyDiagram":
        levels = [value] * (truncation + 1)
        ops = {
            (n, i): GradedMap.identity(value)
            for n in range(truncation)
            for i in range(n + 1)
        }
        return TruncatedDegeneracyDiagram(levels, ops)


@dataclass
class FreenessCertificate:
    """Generators and the unique-decomposition table of a free diagram."""

    generators: list[dict[str, tuple[Element, ...]]]  # per level, per sort
    decomposition: dict[tuple[int, str, Element], tuple[int, Element, Surjection]]

    def generator_counts(self) -> list[int]:
        return [sum(len(v) for v in level.values()) for level in self.generators]


@dataclass
class FreenessFailure:
    """Witness that a diagram is not free within the truncation."""

    level: int
    sort: str
    element: Element
    decompositions: list[tuple[int, Element, Surjection]]

    def __str__(self) -> str:
        n = len(self.decompositions)
        kind = "no decomposition" if n == 0 else f"{n} decompositions"
        return (f"element {self.element!r} (sort {self.sort}, level "
                f"{self.level}) has {kind}")


def free_generators(
    diagram: TruncatedDegeneracyDiagram,
) -> FreenessCertificate | FreenessFailure:
    """Decide freeness within the truncation.

    Computes the non-degenerate elements of each level and checks that
    every element is the image of exactly one generator under exactly
    one surjection (the uniqueness claims are verified element by
    element, not assumed).  Raises FunctorialityError if the diagram is
    not functorial.
    """
    problems = diagram.check_functoriality()
    if problems:
        raise FunctorialityError("; ".join(problems[:3]))
    n_max = diagram.truncation
    degenerate: list[dict[str, set]] = []
    for n in range(n_max + 1):
        degen: dict[str, set] = {s: set() for s in diagram.sorts}
        for m in range(n):
            for sigma in enumerate_surjections(n, m):
                op = diagram.operator(sigma)
                for s in diagram.sorts:
                    for y in diagram.level(m).elements(s):
                        degen[s].add(op(s, y))
        degenerate.append(degen)
    generators = [
        {
            s: tuple(x for x in diagram.level(n).elements(s)
                     if x not in degenerate[n][s])
            for s in diagram.sorts
        }
        for n in range(n_max + 1)
    ]
    decomposition: dict = {}
    for n in range(n_max + 1):
        for s in diagram.sorts:
            for x in diagram.level(n).elements(s):
                found = []
                for m in range(n + 1):
                    for sigma in enumerate_surjections(n, m):
                        op = diagram.operator(sigma)
                        for gen in generators[m][s]:
                            if op(s, gen) == x:
                                found.append((m, gen, sigma))
                if len(found) != 1:
                    return FreenessFailure(n, s, x, found)
                decomposition[(n, s, x)] = found[0]
    return FreenessCertificate(generators, decomposition)


def rebuild_from_certificate(
    diagram: TruncatedDegeneracyDiagram, cert: FreenessCertificate
) -> bool:
    """Check that the decomposition map is a bijection level by level.

    Rebuilding the coproduct of generator copies along all surjections
    must reproduce each level exactly once.
    """
    from collections import Counter

    for n in range(diagram.truncation + 1):
        for s in diagram.sorts:
            expected = Counter(
                diagram.operator(sigma)(s, gen)
                for m in range(n + 1)
                for sigma in enumerate_surjections(n, m)
                for gen in cert.generators[m][s]
            )
            actual = Counter(diagram.level(n).elements(s))
            if expected != actual:
                return False
    return True


class SubDiagram(NamedTuple):
    """Per-level, per-sort subsets of a diagram's elements."""

    levels: tuple[dict[str, frozenset], ...]


def is_stable_subdiagram(x: TruncatedDegeneracyDiagram, y: SubDiagram) -> bool:
    """Whether the subsets are closed under applying the operators."""
    for n in range(x.truncation + 1):
        for m in range(n + 1):
            for sigma in enumerate_surjections(n, m):
                op = x.operator(sigma)
                for s in x.sorts:
                    for el in y.levels[m][s]:
                        if op(s, el) not in y.levels[n][s]:
                            return False
    return True


def is_closed_subdiagram(
    x: TruncatedDegeneracyDiagram, y: SubDiagram
) -> tuple[bool, tuple | None]:
    """The closure criterion: a degeneracy landing in Y forces membership.

    For every element at level n and every surjection [m] -> [n], if
    the operator image lies in Y at level m then the element must lie
    in Y at level n.  Returns (verdict, witness).
    """
    if not is_stable_subdiagram(x, y):
        raise ValueError("not a subdiagram: subsets are not operator-stable")
    for n in range(x.truncation + 1):
        for s in x.sorts:
            for el in x.level(n).elements(s):
                if el in y.levels[n][s]:
                    continue
                for m in range(n, x.truncation + 1):
                    for sigma in enumerate_surjections(m, n):
                        if x.operator(sigma)(s, el) in y.levels[m][s]:
                            return False, (n, s, el, sigma)
    return True, None


def subdiagram_as_diagram(
    x: TruncatedDegeneracyDiagram, y: SubDiagram
) -> TruncatedDegeneracyDiagram:
    levels = [
        GradedSet(x.sorts, {s: [el for el in x.level(n).elements(s)
                                if el in y.levels[n][s]]
                            for s in x.sorts})
        for n in range(x.truncation + 1)
    ]
    ops = {}
    for n in range(x.truncation):
        for i in range(n + 1):
            op = x.operator(Surjection.elementary(n, i))
            ops[(n, i)] = GradedMap(
                levels[n], levels[n + 1],
                {s: {el: op(s, el) for el in levels[n].elements(s)}
                 for s in x.sorts},
            )
    return TruncatedDegeneracyDiagram(levels, ops)


# ---------------------------------------------------------------------------
# the standard resolution


def standard_resolution_levels(theory, x, truncation: int
                               ) -> TruncatedDegeneracyDiagram:
    """The degeneracy diagram [n] -> T^n X underlying the standard resolution.

    Level 0 is the carrier of ``x``; each next level is the free
    carrier on the previous one.  The elementary degeneracy s_i at
    level n is T^i applied to the unit of the (n-i)-th level.  These
    operators extend to the augmented structure with a contracting
    homotopy, which is what makes the diagram free.
    """
    from .theory import FiniteTheory

    if not isinstance(theory, FiniteTheory):
        raise TruncationError("standard resolution needs a finite theory")
    carrier = x.carrier
    levels = [carrier]
    for _ in range(truncation):
        levels.append(theory.free_carrier(levels[-1]))

    def unit_map(level: int) -> GradedMap:
        src = levels[level]
        dst = levels[level + 1]
        w = src.word()
        return GradedMap(
            src, dst,
            {
                s: {
                    el: theory.projection(w, src.position_of(s, el))
                    for el in src.elements(s)
                }
                for s in src.sorts
            },
        )

    def apply_t(h: GradedMap, src: GradedSet, dst: GradedSet) -> GradedMap:
        positions = tuple(
            h.codomain.position_of(s, h(s, el)) for s, el in h.domain.pairs()
        )
        from .graded import ArityMorphism

        m = ArityMorphism(h.domain.word(), h.codomain.word(), positions)
        return GradedMap(
            src, dst,
            {
                j: {
                    t: theory.rename(j, h.domain.word(), t, m)
                    for t in src.elements(j)
                }
                for j in src.sorts
            },
        )

    ops: dict[tuple[int, int], GradedMap] = {}
    for n in range(truncation):
        for i in range(n + 1):
            h = unit_map(n - i)
            for k in range(i):
                h = apply_t(h, levels[n - i + 1 + k], levels[n - i + 2 + k])
            ops[(n, i)] = h
    return TruncatedDegeneracyDiagram(levels, ops)


def check_sfree(presentation: TruncatedDegeneracyDiagram
                ) -> FreenessCertificate | FreenessFailure:
    """s-freeness of a levelwise presentation X_n ⊔ T(K_n).

    The input is the degeneracy diagram of the K_n (the presentation is
    part of the data, not reconstructed); the map is s-free within the
    truncation exactly when that diagram is free.
    """
    return free_generators(presentation)
