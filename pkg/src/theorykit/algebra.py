"""Algebras over theories and the colimit machinery between them.

A finite algebra is stored in tautological form: the structure map is
a function from the theory's values at the carrier's own word to the
carrier.  That single table determines the action of every operation
of every arity, which keeps law checking finite and exact.

Coproducts and pushouts are computed by the explicit reflexive
coequalizer presentation (quotients of free algebras by union-find);
relative composition of a bimodule against an algebra is the same
coequalizer one level up.  The word problem for general presented
theories is undecidable, so these operations are supported exactly for
finite theories and for free algebras over free theories; everything
else raises CapabilityError.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Sequence

from .errors import CapabilityError
from .graded import (
    ArityMorphism,
    Element,
    GradedMap,
    GradedSet,
    Profile,
    UnionFind,
    Word,
    disjoint_union,
    product,
)
from .signature import Signature
from .theory import (
    FiniteTheory,
    FreeTheory,
    Term,
    TheoryMorphism,
    adjoin_constants,
)
from .trees import enumerate_trees


class Algebra:
    """A finite algebra in tautological form.

    ``psi[j]`` maps every theory value at (j, carrier word) to an
    element of the carrier at sort j.
    """

    def __init__(self, theory: FiniteTheory, carrier: GradedSet,
                 psi: dict[str, dict[Element, Element]], name: str = "algebra"):
        self.theory = theory
        self.carrier = carrier
        self.word = carrier.word()
        self.psi = {j: dict(psi.get(j, {})) for j in theory.sorts}
        self.name = name
        for j in theory.sorts:
            for t in theory.value(j, self.word):
                if t not in self.psi[j]:
                    raise ValueError(f"structure map missing value {t!r} at {j!r}")
                if (j, self.psi[j][t]) not in carrier:
                    raise ValueError(f"structure map leaves the carrier at {t!r}")

    def structure(self, output: str, t: Element) -> Element:
        return self.psi[output][t]

    def eval(self, output: str, word: Word, t: Element,
             args: Sequence[Element]) -> Element:
        """Apply a theory value of any arity to carrier elements."""
        args = tuple(args)
        mapping = tuple(
            self.carrier.position_of(s, a) for s, a in zip(word, args)
        )
        m = ArityMorphism(tuple(word), self.word, mapping)
        return self.psi[output][self.theory.rename(output, tuple(word), t, m)]

    def check_laws(self) -> list[str]:
        """Unit and substitution-compatibility laws; complete for finite data."""
        problems = []
        th = self.theory
        for j in th.sorts:
            for x in self.carrier.elements(j):
                k = self.carrier.position_of(j, x)
                if self.psi[j][th.projection(self.word, k)] != x:
                    problems.append(f"unit law fails at {j}, {x!r}")
        tx = th.free_carrier(self.carrier)
        w_tx = tx.word()
        positions = list(tx.pairs())
        # mu: substitute each variable (an element of T(X)) into the term
        # T(psi): rename variables along the structure map
        psi_positions = tuple(
            self.carrier.position_of(s, self.psi[s][t]) for s, t in positions
        )
        rename_m = ArityMorphism(w_tx, self.word, psi_positions)
        inner = tuple(t for _, t in positions)
        for j in th.sorts:
            for big in th.value(j, w_tx):
                via_mu = self.psi[j][th.substitute(j, w_tx, big, self.word, inner)]
                via_psi = self.psi[j][th.rename(j, w_tx, big, rename_m)]
                if via_mu != via_psi:
                    problems.append(f"substitution law fails at {j}, {big!r}")
        return problems

    def __repr__(self) -> str:
        sizes = {j: len(self.carrier.elements(j)) for j in self.theory.sorts}
        return f"Algebra({self.name}, {sizes})"


class AlgebraMap:
    """A carrier map commuting with all operations."""

    def __init__(self, source: Algebra, target: Algebra, graded: GradedMap,
                 check: bool = True):
        if graded.domain != source.carrier or graded.codomain != target.carrier:
            raise ValueError("graded map does not match the algebras")
        self.source = source
        self.target = target
        self.graded = graded
        if check and not self.is_homomorphism():
            raise ValueError("not a homomorphism")

    def __call__(self, sort: str, x: Element) -> Element:
        return self.graded(sort, x)

    def is_homomorphism(self) -> bool:
        th = self.source.theory
        src, dst = self.source, self.target
        mapping = tuple(
            dst.carrier.position_of(s, self.graded(s, x))
            for s, x in src.carrier.pairs()
        )
        m = ArityMorphism(src.word, dst.word, mapping)
        for j in th.sorts:
            for t in th.value(j, src.word):
                lhs = self.graded(j, src.psi[j][t])
                rhs = dst.psi[j][th.rename(j, src.word, t, m)]
                if lhs != rhs:
                    return False
        return True

    def then(self, other: "AlgebraMap") -> "AlgebraMap":
        return AlgebraMap(self.source, other.target,
                          self.graded.then(other.graded), check=False)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AlgebraMap)
            and self.graded == other.graded
        )

    def __hash__(self) -> int:
        return hash(self.graded)

    @staticmethod
    def identity(x: Algebra) -> "AlgebraMap":
        return AlgebraMap(x, x, GradedMap.identity(x.carrier), check=False)


class FreeAlgebra(Algebra):
    """Free algebra on a graded set over a finite theory."""

    def __init__(self, theory: FiniteTheory, generators: GradedSet,
                 name: str = "free"):
        self.generators = generators
        carrier = theory.free_carrier(generators)
        w_k = generators.word()
        w_c = carrier.word()
        # the structure map is one multiplication: substitute the
        # carrier's own values (terms over the generators) into a value
        # over the carrier word
        inner = tuple(t for _, t in carrier.pairs())
        psi = {
            j: {
                big: theory.substitute(j, w_c, big, w_k, inner)
                for big in theory.value(j, w_c)
            }
            for j in theory.sorts
        }
        super().__init__(theory, carrier, psi, name=name)

    def generator_element(self, sort: str, x: Element) -> Element:
        """The carrier element representing a generator."""
        k = self.generators.position_of(sort, x)
        return self.theory.projection(self.generators.word(), k)


def free_algebra(theory: FiniteTheory, generators: GradedSet) -> FreeAlgebra:
    return FreeAlgebra(theory, generators)


def induced_from_free(free: FreeAlgebra, target: Algebra,
                      gen_map: GradedMap) -> AlgebraMap:
    """The algebra map out of a free algebra induced by generator images."""
    th = free.theory
    if gen_map.domain != free.generators or gen_map.codomain != target.carrier:
        raise ValueError("generator map must go from generators to the target")
    w_k = free.generators.word()
    images = tuple(gen_map(s, x) for s, x in free.generators.pairs())
    maps = {
        j: {
            t: target.eval(j, w_k, t, images)
            for t in th.value(j, w_k)
        }
        for j in th.sorts
    }
    return AlgebraMap(free, target, GradedMap(free.carrier, target.carrier, maps),
                      check=False)


# ---------------------------------------------------------------------------
# quotients and colimits


def quotient_algebra(base: Algebra,
                     relations: Iterable[tuple[str, Element, Element]]):
    """Quotient of an algebra by the equivalence generated by relations.

    The relations must come from a reflexive pair of algebra maps into
    ``base`` (so that the set-level quotient is automatically a
    congruence); operations descend via representatives.
    Returns (quotient algebra, projection AlgebraMap).
    """
    th = base.theory
    uf: dict[str, UnionFind] = {}
    for j in th.sorts:
        uf[j] = UnionFind()
        for x in base.carrier.elements(j):
            uf[j].add(x)
    for (j, a, b) in relations:
        uf[j].union(a, b)
    reps = {j: uf[j].classes() for j in th.sorts}
    elems = {
        j: [x for x in base.carrier.elements(j) if reps[j][x] == x]
        for j in th.sorts
    }
    carrier = GradedSet(base.carrier.sorts, elems)
    w_q = carrier.word()
    lift = tuple(x for _, x in carrier.pairs())
    psi = {
        j: {
            t: reps[j][base.eval(j, w_q, t, lift)]
            for t in th.value(j, w_q)
        }
        for j in th.sorts
    }
    q = Algebra(th, carrier, psi, name=f"{base.name}/~")
    proj = AlgebraMap(
        base, q,
        GradedMap(base.carrier, carrier,
                  {j: {x: reps[j][x] for x in base.carrier.elements(j)}
                   for j in th.sorts}),
        check=False,
    )
    return q, proj


class Coproduct:
    """An explicit finite-theory coproduct with its coprojections.

    Computed as the reflexive coequalizer T(TX_1 ⊔ ... ⊔ TX_n) ⇉
    T(X_1 ⊔ ... ⊔ X_n) in graded sets.
    """

    def __init__(self, factors: Sequence[Algebra]):
        if not factors:
            raise ValueError("need at least one factor")
        th = factors[0].theory
        if any(f.theory is not th for f in factors):
            raise ValueError("factors must share one theory object")
        self.theory = th
        self.factors = list(factors)
        tags = [str(i) for i in range(len(factors))]
        k = disjoint_union(*(f.carrier for f in factors), tags=tags)
        self.generators = k
        free = FreeAlgebra(th, k, name="coprod-free")
        self._free = free
        w_k = k.word()
        # relations from T applied to the union of the T(X_i)
        m = disjoint_union(*(th.free_carrier(f.carrier) for f in factors),
                           tags=tags)
        w_m = m.word()
        # position maps out of w_m: fold by structure maps, or include
        fold_positions = []
        include_args = []
        for s, (tag, t) in m.pairs():
            i = int(tag)
            folded = factors[i].psi[s][t]
            fold_positions.append(k.position_of(s, (tag, folded)))
            # include: the value t, with its variables renamed into w_k
            xi = factors[i].carrier
            ren = ArityMorphism(
                xi.word(), w_k,
                tuple(k.position_of(s2, (tag, x2)) for s2, x2 in xi.pairs()),
            )
            include_args.append(th.rename(s, xi.word(), t, ren))
        fold_m = ArityMorphism(w_m, w_k, tuple(fold_positions))
        relations = []
        for j in th.sorts:
            for z in th.value(j, w_m):
                lhs = th.rename(j, w_m, z, fold_m)
                rhs = th.substitute(j, w_m, z, w_k, tuple(include_args))
                relations.append((j, lhs, rhs))
        self.algebra, self.projection = quotient_algebra(free, relations)
        self.coprojections = []
        for i, f in enumerate(factors):
            maps = {
                j: {
                    x: self.projection(
                        j, free.generator_element(j, (tags[i], x))
                    )
                    for x in f.carrier.elements(j)
                }
                for j in th.sorts
            }
            self.coprojections.append(
                AlgebraMap(f, self.algebra,
                           GradedMap(f.carrier, self.algebra.carrier, maps),
                           check=False)
            )

    def induced(self, maps: Sequence[AlgebraMap]) -> AlgebraMap:
        """Couniversal map out of the coproduct."""
        if len(maps) != len(self.factors):
            raise ValueError("need one map per factor")
        target = maps[0].target
        th = self.theory
        gen_images = {
            j: {
                (tag, x): maps[int(tag)](j, x)
                for (tag, x) in self.generators.elements(j)
            }
            for j in th.sorts
        }
        gen_map = GradedMap(self.generators, target.carrier, gen_images)
        h = induced_from_free(self._free, target, gen_map)
        table = {
            j: {
                q: h(j, q)
                for q in self.algebra.carrier.elements(j)
            }
            for j in th.sorts
        }
        return AlgebraMap(self.algebra, target,
                          GradedMap(self.algebra.carrier, target.carrier, table),
                          check=False)


def coproduct_many(factors: Sequence[Algebra]) -> Coproduct:
    return Coproduct(factors)


def algebra_coproduct(x: Algebra, y: Algebra) -> Coproduct:
    return Coproduct([x, y])


class PushoutResult:
    def __init__(self, algebra: Algebra, inj_left: AlgebraMap,
                 inj_right: AlgebraMap):
        self.algebra = algebra
        self.inj_left = inj_left
        self.inj_right = inj_right


def pushout(f: AlgebraMap, g: AlgebraMap) -> PushoutResult:
    """Pushout X ⊔_U V of f: U -> X and g: U -> V.

    Realized as the (reflexive) coequalizer of the two fold maps
    X ⊔ U ⊔ V ⇉ X ⊔ V; equivalently the coequalizer of the first two
    bar faces.
    """
    if f.source is not g.source and f.source.carrier != g.source.carrier:
        raise ValueError("pushout needs a common source")
    x, u, v = f.target, f.source, g.target
    b0 = Coproduct([x, v])
    b1 = Coproduct([x, u, v])
    d0 = b1.induced([b0.coprojections[0], f.then(b0.coprojections[0]),
                     b0.coprojections[1]])
    d1 = b1.induced([b0.coprojections[0], g.then(b0.coprojections[1]),
                     b0.coprojections[1]])
    relations = [
        (j, d0(j, z), d1(j, z))
        for j in b1.theory.sorts
        for z in b1.algebra.carrier.elements(j)
    ]
    q, proj = quotient_algebra(b0.algebra, relations)
    return PushoutResult(
        q,
        b0.coprojections[0].then(proj),
        b0.coprojections[1].then(proj),
    )


def coproduct_with_free(x: Algebra, k: GradedSet) -> Coproduct:
    """The properness-criterion functor X -> X ⊔ T(K) at a finite graded set."""
    return Coproduct([x, free_algebra(x.theory, k)])


# ---------------------------------------------------------------------------
# monomorphisms


def is_mono(f: AlgebraMap) -> tuple[bool, tuple | None]:
    """Injectivity check; returns a witness pair on failure."""
    for j in f.source.theory.sorts:
        seen: dict[Element, Element] = {}
        for x in f.source.carrier.elements(j):
            y = f(j, x)
            if y in seen:
                return False, (j, seen[y], x)
            seen[y] = x
    return True, None


def is_effective_mono(f: AlgebraMap) -> tuple[bool, tuple | None]:
    """Whether X -> Y ⇉ Y ⊔_X Y is an equalizer; witness on failure.

    The witness is either an injectivity failure or an element of the
    equalizer not in the image of f.
    """
    mono, witness = is_mono(f)
    if not mono:
        return False, ("not injective",) + witness
    po = pushout(f, f)
    i0, i1 = po.inj_left, po.inj_right
    y = f.target
    for j in y.theory.sorts:
        image = {f(j, x) for x in f.source.carrier.elements(j)}
        for el in y.carrier.elements(j):
            agrees = i0(j, el) == i1(j, el)
            if agrees and el not in image:
                return False, ("equalizer exceeds image", j, el)
            if not agrees and el in image:
                return False, ("image escapes equalizer", j, el)
    return True, None


# ---------------------------------------------------------------------------
# enumeration of algebras and maps


def enumerate_graded_maps(x: GradedSet, y: GradedSet) -> Iterable[GradedMap]:
    pools = []
    domain_pairs = list(x.pairs())
    for s, _ in domain_pairs:
        ys = y.elements(s)
        if not ys:
            return
        pools.append(ys)
    for combo in itertools.product(*pools):
        maps: dict[str, dict[Element, Element]] = {s: {} for s in x.sorts}
        for (s, el), img in zip(domain_pairs, combo):
            maps[s][el] = img
        yield GradedMap(x, y, maps)


def enumerate_algebra_maps(x: Algebra, y: Algebra) -> list[AlgebraMap]:
    out = []
    for g in enumerate_graded_maps(x.carrier, y.carrier):
        cand = AlgebraMap(x, y, g, check=False)
        if cand.is_homomorphism():
            out.append(cand)
    return out


def find_isomorphism(x: Algebra, y: Algebra) -> AlgebraMap | None:
    if any(len(x.carrier.elements(j)) != len(y.carrier.elements(j))
           for j in x.theory.sorts):
        return None
    for cand in enumerate_algebra_maps(x, y):
        if all(
            len(set(cand(j, e) for e in x.carrier.elements(j)))
            == len(x.carrier.elements(j))
            for j in x.theory.sorts
        ):
            return cand
    return None


def _size_vectors(sorts: Sequence[str], max_total: int):
    if not sorts:
        yield ()
        return
    for head in range(max_total + 1):
        for rest in _size_vectors(sorts[1:], max_total - head):
            yield (head,) + rest


def enumerate_algebras(theory: FiniteTheory, max_carrier: int,
                       up_to_iso: bool = True) -> list[Algebra]:
    """All algebra structures on carriers of total size <= max_carrier.

    A structure is a map from the theory's values at the carrier word
    to the carrier satisfying the unit and substitution laws; the unit
    law pins projections, the rest is brute force.
    """
    found: list[Algebra] = []
    for sizes in _size_vectors(list(theory.sorts), max_carrier):
        carrier = GradedSet(
            theory.sorts,
            {
                s: [f"{s}{i}" for i in range(n)]
                for s, n in zip(theory.sorts, sizes)
            },
        )
        w = carrier.word()
        slots: list[tuple[str, Element]] = []
        forced: dict[tuple[str, Element], Element] = {}
        ok = True
        for j in theory.sorts:
            projections = {
                theory.projection(w, carrier.position_of(j, x)): x
                for x in carrier.elements(j)
            }
            for t in theory.value(j, w):
                if t in projections:
                    forced[(j, t)] = projections[t]
                else:
                    if not carrier.elements(j):
                        ok = False
                        break
                    slots.append((j, t))
            if not ok:
                break
        if not ok:
            continue
        pools = [carrier.elements(j) for j, _ in slots]
        for combo in itertools.product(*pools):
            psi: dict[str, dict[Element, Element]] = {j: {} for j in theory.sorts}
            for (j, t), img in forced.items():
                psi[j][t] = img
            for (j, t), img in zip(slots, combo):
                psi[j][t] = img
            cand = Algebra(theory, carrier, psi, name=f"enum{sizes}")
            if cand.check_laws():
                continue
            if up_to_iso and any(
                c.carrier == cand.carrier and find_isomorphism(c, cand)
                for c in found
            ):
                continue
            found.append(cand)
    return found


# ---------------------------------------------------------------------------
# restriction and induction along theory morphisms


def restrict(phi: TheoryMorphism, y: Algebra) -> Algebra:
    """Pull a T-algebra back to an S-algebra along phi: S -> T."""
    if y.theory is not phi.target:
        raise ValueError("algebra is not over the morphism's target")
    s = phi.source
    psi = {
        j: {
            t: y.psi[j][phi(j, y.word, t)]
            for t in s.value(j, y.word)
        }
        for j in s.sorts
    }
    return Algebra(s, y.carrier, psi, name=f"{y.name}|restricted")


class Bimodule:
    """A series with a left T-action and a right S-action.

    ``value``/``act`` give the underlying series; ``left_act`` sends a
    T-value on the bimodule's values at a word to a value, and
    ``right_act`` absorbs one layer of S from the input side.
    """

    def __init__(self, left: FiniteTheory, right: FiniteTheory,
                 value_fn, act_fn, left_act_fn, right_act_fn,
                 name: str = "bimodule"):
        self.left = left
        self.right = right
        self._value_fn = value_fn
        self._act_fn = act_fn
        self._left_act_fn = left_act_fn
        self._right_act_fn = right_act_fn
        self.name = name
        self._values: dict = {}

    def value(self, output: str, word: Word) -> tuple[Element, ...]:
        key = (output, tuple(word))
        if key not in self._values:
            self._values[key] = tuple(self._value_fn(output, tuple(word)))
        return self._values[key]

    def value_set(self, word: Word) -> GradedSet:
        return GradedSet(self.left.sorts,
                         {j: self.value(j, word) for j in self.left.sorts})

    def act(self, output: str, m: ArityMorphism) -> dict[Element, Element]:
        return self._act_fn(output, m)

    def left_act(self, output: str, word: Word, t: Element) -> Element:
        """Collapse a T-value over the bimodule's values at ``word``.

        The variables of t are the elements of M(word) themselves, in
        canonical position order.
        """
        return self._left_act_fn(output, tuple(word), t)

    def right_act(self, output: str, word: Word, m: Element) -> Element:
        """Absorb one S-layer: m is a value at the word of S's values at word."""
        return self._right_act_fn(output, tuple(word), m)


def theory_bimodule(phi: TheoryMorphism) -> Bimodule:
    """T as a (T, S)-bimodule along phi: S -> T (phi = id gives T over itself)."""
    s, t = phi.source, phi.target

    def value(j, w):
        return t.value(j, w)

    def act(j, m):
        return {v: t.rename(j, m.domain, v, m) for v in t.value(j, m.domain)}

    def left_act(j, w, big):
        # big is a T-value over the word of T's values at w; collapsing
        # is substitution of those values into it
        mw = t.free_carrier(_word_set(t, w))
        return t.substitute(j, mw.word(), big, tuple(w),
                            tuple(v for _, v in mw.pairs()))

    def right_act(j, w, m):
        sx = s.free_carrier(_word_set(s, w))
        w_sx = sx.word()
        args = tuple(phi(sort, w, sv) for sort, sv in sx.pairs())
        return t.substitute(j, w_sx, m, tuple(w), args)

    return Bimodule(t, s, value, act, left_act, right_act,
                    name=f"{t.name} over {s.name}")


def _word_set(theory: FiniteTheory, w: Word) -> GradedSet:
    from .graded import graded_from_word

    return graded_from_word(theory.sorts, tuple(w))


def relative_composition(m: Bimodule, x: Algebra) -> Algebra:
    """M ∘_S X: coequalizer of M(S(X)) ⇉ M(X), as a T-algebra."""
    s, t = m.right, m.left
    if x.theory is not s:
        raise ValueError("algebra must be over the bimodule's right theory")
    w_x = x.word
    sx = s.free_carrier(x.carrier)
    w_sx = sx.word()
    # map 1: functorial action along the structure map S(X) -> X
    psi_positions = tuple(
        x.carrier.position_of(sort, x.psi[sort][val]) for sort, val in sx.pairs()
    )
    m1 = ArityMorphism(w_sx, w_x, psi_positions)
    base = GradedSet(t.sorts, {j: m.value(j, w_x) for j in t.sorts})
    relations = []
    for j in t.sorts:
        act1 = m.act(j, m1)
        for z in m.value(j, w_sx):
            relations.append((j, act1[z], m.right_act(j, w_x, z)))
    uf = {j: UnionFind() for j in t.sorts}
    for j in t.sorts:
        for el in base.elements(j):
            uf[j].add(el)
    for (j, a, b) in relations:
        uf[j].union(a, b)
    reps = {j: uf[j].classes() for j in t.sorts}
    carrier = GradedSet(
        t.sorts,
        {j: [e for e in base.elements(j) if reps[j][e] == e] for j in t.sorts},
    )
    w_q = carrier.word()
    psi: dict[str, dict[Element, Element]] = {}
    for j in t.sorts:
        psi[j] = {}
        for big in t.value(j, w_q):
            lifted = _lift_to_values(t, m, j, w_q, big, carrier, w_x)
            psi[j][big] = reps[j][m.left_act(j, w_x, lifted)]
    return Algebra(t, carrier, psi, name=f"{m.name}.{x.name}")


def _lift_to_values(t: FiniteTheory, m: Bimodule, j: str, w_q: Word,
                    big: Element, carrier: GradedSet, w_x: Word) -> Element:
    """Rename a value over the quotient word to one over M(X)'s word."""
    mx = m.value_set(w_x)
    positions = tuple(
        mx.position_of(sort, el) for sort, el in carrier.pairs()
    )
    ren = ArityMorphism(w_q, mx.word(), positions)
    return t.rename(j, w_q, big, ren)


def induct(phi: TheoryMorphism, x: Algebra) -> Algebra:
    """Left adjoint of restriction: phi_* X = T ∘_S X."""
    return relative_composition(theory_bimodule(phi), x)


def relative_composition_map(m: Bimodule, f: AlgebraMap) -> AlgebraMap:
    """Functorial action of M ∘_S - on an algebra map."""
    src = relative_composition(m, f.source)
    dst = relative_composition(m, f.target)
    w_src = f.source.word
    positions = tuple(
        f.target.carrier.position_of(s, f(s, el))
        for s, el in f.source.carrier.pairs()
    )
    ren = ArityMorphism(w_src, f.target.word, positions)
    # classes are represented by elements of M(f.source word); push and
    # re-project by finding the representative in the destination
    dst_reps = _relative_classes(m, f.target)
    maps = {}
    for j in m.left.sorts:
        act = m.act(j, ren)
        maps[j] = {}
        for rep in src.carrier.elements(j):
            maps[j][rep] = dst_reps[j][act[rep]]
    return AlgebraMap(src, dst, GradedMap(src.carrier, dst.carrier, maps),
                      check=False)


def _relative_classes(m: Bimodule, x: Algebra):
    s, t = m.right, m.left
    w_x = x.word
    sx = s.free_carrier(x.carrier)
    w_sx = sx.word()
    psi_positions = tuple(
        x.carrier.position_of(sort, x.psi[sort][val]) for sort, val in sx.pairs()
    )
    m1 = ArityMorphism(w_sx, w_x, psi_positions)
    uf = {j: UnionFind() for j in t.sorts}
    for j in t.sorts:
        for el in m.value(j, w_x):
            uf[j].add(el)
        act1 = m.act(j, m1)
        for z in m.value(j, w_sx):
            uf[j].union(act1[z], m.right_act(j, w_x, z))
    return {j: uf[j].classes() for j in t.sorts}


# ---------------------------------------------------------------------------
# bar construction


class BarComplex:
    """The two-sided bar construction B(X, U, V) up to a level bound.

    Level n is X ⊔ U^n ⊔ V.  Face 0 absorbs the first U into X along
    f, face n absorbs the last U into V along g, inner faces fold two
    adjacent U's by the coproduct codiagonal; degeneracy i inserts a
    fresh U (along the initial-algebra unit) after slot i.
    """

    def __init__(self, f: AlgebraMap, g: AlgebraMap, max_level: int):
        if f.source is not g.source:
            raise ValueError("bar construction needs one middle algebra")
        self.f = f
        self.g = g
        self.x, self.u, self.v = f.target, f.source, g.target
        self.max_level = max_level
        self.levels: list[Coproduct] = [
            Coproduct([self.x] + [self.u] * n + [self.v])
            for n in range(max_level + 1)
        ]

    def algebra(self, n: int) -> Algebra:
        return self.levels[n].algebra

    def face(self, n: int, i: int) -> AlgebraMap:
        if not (0 <= i <= n <= self.max_level and n >= 1):
            raise ValueError(f"no face d_{i} at level {n}")
        src = self.levels[n]
        dst = self.levels[n - 1]
        maps: list[AlgebraMap] = [dst.coprojections[0]]
        for j in range(1, n + 1):
            if i == 0:
                target = (self.f.then(dst.coprojections[0]) if j == 1
                          else dst.coprojections[j - 1])
            elif i == n:
                target = (self.g.then(dst.coprojections[n])
                          if j == n else dst.coprojections[j])
            else:
                target = dst.coprojections[j if j <= i else j - 1]
            maps.append(target)
        maps.append(dst.coprojections[n])
        return src.induced(maps)

    def degeneracy(self, n: int, i: int) -> AlgebraMap:
        if not (0 <= i <= n and n + 1 <= self.max_level):
            raise ValueError(f"no degeneracy s_{i} at level {n}")
        src = self.levels[n]
        dst = self.levels[n + 1]
        maps: list[AlgebraMap] = [dst.coprojections[0]]
        for j in range(1, n + 1):
            maps.append(dst.coprojections[j if j <= i else j + 1])
        maps.append(dst.coprojections[n + 2])
        return src.induced(maps)

    def augmentation_coequalizer(self) -> Algebra:
        """Coequalizer of d_0, d_1: B_1 ⇉ B_0 (equals the pushout X ⊔_U V)."""
        d0 = self.face(1, 0)
        d1 = self.face(1, 1)
        relations = [
            (j, d0(j, z), d1(j, z))
            for j in self.x.theory.sorts
            for z in self.algebra(1).carrier.elements(j)
        ]
        q, _ = quotient_algebra(self.algebra(0), relations)
        return q


def bar_level(f: AlgebraMap, g: AlgebraMap, n: int) -> Algebra:
    return BarComplex(f, g, n).algebra(n)


# ---------------------------------------------------------------------------
# free algebras over free theories (symbolic)


class FreeAlgebraOverFree:
    """Free algebra on generators over a free theory, held symbolically.

    Elements of sort j are closed trees over the signature with the
    generators adjoined as constants; enumeration is bounded and
    carries the usual exactness flag.
    """

    def __init__(self, theory: FreeTheory, generators: GradedSet,
                 name: str = "free"):
        self.theory = theory
        self.generators = generators
        self.signature = adjoin_constants(theory.signature, generators)
        self.name = name

    def elements(self, sort: str, max_vertices: int):
        return enumerate_trees(self.signature, Profile(sort, ()), max_vertices)

    def coproduct(self, other: "FreeAlgebraOverFree") -> "FreeAlgebraOverFree":
        if self.theory is not other.theory:
            raise ValueError("coproduct needs a common free theory")
        k = disjoint_union(self.generators, other.generators, tags=("l", "r"))
        return FreeAlgebraOverFree(self.theory, k,
                                   name=f"{self.name}+{other.name}")

    def coproduct_with_free(self, k: GradedSet) -> "FreeAlgebraOverFree":
        kk = disjoint_union(self.generators, k, tags=("l", "r"))
        return FreeAlgebraOverFree(self.theory, kk, name=f"{self.name}+free")


def as_finite_theory(ft: FreeTheory, max_vertices: int,
                     law_bound: int = 2) -> FiniteTheory:
    """Present a free theory as a clone, when its term sets are finite.

    Raises CapabilityError at any profile where the bounded term
    enumeration is inexact (e.g. signatures with unary loops).
    """

    def value(j, w):
        enum = ft.value(j, w, max_vertices)
        if not enum.exact:
            raise CapabilityError(
                f"term set at ({j}, {w}) is not finite within {max_vertices} vertices"
            )
        return enum.terms

    return FiniteTheory(
        ft.signature.sorts,
        value,
        lambda w, k: ft.projection(tuple(w), k),
        lambda j, w, t, v, args: ft.substitute(t, args),
        name=f"clone({ft.signature!r})",
        law_bound=law_bound,
    )
