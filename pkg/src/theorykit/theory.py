"""Theories: monoids in series, stored as trees or as abstract clones.

A free theory is presented by a signature; its elements are terms
(trees whose leaves carry variable positions, with repetition and
omission allowed) and its substitution is grafting.  A finite theory
is stored as an abstract clone: a rule giving the finite value set at
every profile, projection elements, and a substitution table.  The two
forms are interconvertible where finiteness allows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Hashable, Iterable, NamedTuple

from .errors import CapabilityError, TruncationError
from .graded import (
    ArityMorphism,
    Element,
    GradedMap,
    GradedSet,
    Profile,
    SortSet,
    Word,
    enumerate_words,
    product,
)
from .series import Series, TabulatedSeries
from .signature import Operation, Signature
from .trees import (
    Leaf,
    Node,
    Tree,
    graft,
    leaf_word,
    root_sort,
    sort_key,
    tree_profile,
    vertex_count,
)


class Term(NamedTuple):
    """A free-theory element: a tree plus a leaf-to-variable assignment.

    ``var_map[k]`` is the position (in the ambient input word) fed to
    the k-th leaf; variables may repeat or go unused.
    """

    tree: Tree
    var_map: tuple[int, ...]

    def rename(self, morphism: ArityMorphism) -> "Term":
        return Term(self.tree, tuple(morphism.mapping[k] for k in self.var_map))


def term_sort_key(t: Term):
    return (sort_key(t.tree), t.var_map)


def check_term(term: Term, word: Word) -> None:
    leaves = leaf_word(term.tree)
    if len(term.var_map) != len(leaves):
        raise ValueError("variable map must assign every leaf")
    for s, k in zip(leaves, term.var_map):
        if not 0 <= k < len(word) or word[k] != s:
            raise ValueError(f"variable {k} does not carry sort {s!r}")


def substitute_term(term: Term, args: Iterable[Term]) -> Term:
    """Clone substitution for terms: graft argument trees into leaves."""
    args = tuple(args)
    grafts = [args[k] for k in term.var_map]
    tree = graft(term.tree, [g.tree for g in grafts])
    var_map = tuple(v for g in grafts for v in g.var_map)
    return Term(tree, var_map)


class TermEnumeration(NamedTuple):
    terms: tuple[Term, ...]
    exact: bool


@lru_cache(maxsize=None)
def _terms(sig: Signature, out: str, word: Word, budget: int) -> tuple[Term, ...]:
    found: list[Term] = [
        Term(Leaf(out), (k,)) for k, s in enumerate(word) if s == out
    ]
    if budget >= 1:
        for op in sig.with_output(out):
            for children in _term_forests(sig, op.inputs, word, budget - 1):
                tree = Node(op, tuple(c.tree for c in children))
                var_map = tuple(v for c in children for v in c.var_map)
                found.append(Term(tree, var_map))
    return tuple(sorted(found, key=term_sort_key))


def _term_forests(sig: Signature, sorts: Word, word: Word,
                  budget: int):
    if not sorts:
        yield ()
        return
    for head in _terms(sig, sorts[0], word, budget):
        rest_budget = budget - vertex_count(head.tree)
        for rest in _term_forests(sig, sorts[1:], word, rest_budget):
            yield (head,) + rest


@lru_cache(maxsize=None)
def _term_productive(sig: Signature, out: str, sorts_avail: frozenset) -> bool:
    table: set[str] = set(sorts_avail)
    changed = True
    while changed:
        changed = False
        for op in sig.ops:
            if op.output not in table and all(s in table for s in op.inputs):
                table.add(op.output)
                changed = True
    return out in table


@lru_cache(maxsize=None)
def _terms_finite(sig: Signature, out: str, sorts_avail: frozenset) -> bool:
    """Whether the set of terms is finite at every word over sorts_avail.

    Terms grow without bound exactly when a productive operation cycle
    through the sort graph is reachable from the output sort.
    """
    edges: dict[str, set[str]] = {s: set() for s in sig.sorts}
    for op in sig.ops:
        for k, s in enumerate(op.inputs):
            others = op.inputs[:k] + op.inputs[k + 1:]
            if all(_term_productive(sig, t, sorts_avail) for t in others):
                edges[op.output].add(s)
    reachable: set[str] = set()
    stack = [out]
    while stack:
        s = stack.pop()
        if s in reachable:
            continue
        reachable.add(s)
        stack.extend(edges[s])
    for s in reachable:
        if not _term_productive(sig, s, sorts_avail):
            continue
        seen: set[str] = set()
        frontier = list(edges[s])
        while frontier:
            u = frontier.pop()
            if u == s:
                return False
            if u in seen:
                continue
            seen.add(u)
            frontier.extend(edges[u])
    return True


def _max_term_size(sig: Signature, out: str, sorts_avail: frozenset,
                   memo: dict | None = None) -> int:
    if memo is None:
        memo = {}
    if out in memo:
        return memo[out]
    best = 0 if out in sorts_avail else -1
    memo[out] = best
    for op in sig.with_output(out):
        if not all(_term_productive(sig, s, sorts_avail) for s in op.inputs):
            continue
        total = 1 + sum(_max_term_size(sig, s, sorts_avail, memo)
                        for s in op.inputs)
        best = max(best, total)
    memo[out] = best
    return best


class FreeTheory:
    """The free theory on a signature: values are terms, substitution grafts."""

    def __init__(self, signature: Signature):
        self.signature = signature
        self.sorts = signature.sorts

    def value(self, output: str, word: Word, max_vertices: int) -> TermEnumeration:
        word = self.sorts.check_word(word)
        avail = frozenset(word)
        terms = _terms(self.signature, output, word, max_vertices)
        if _terms_finite(self.signature, output, avail):
            exact = _max_term_size(self.signature, output, avail) <= max_vertices
        else:
            exact = False
        return TermEnumeration(terms, exact)

    def projection(self, word: Word, k: int) -> Term:
        return Term(Leaf(word[k]), (k,))

    def substitute(self, term: Term, args: Iterable[Term]) -> Term:
        return substitute_term(term, args)

    def unit_terms(self, word: Word) -> tuple[Term, ...]:
        return tuple(self.projection(word, k) for k in range(len(word)))

    def generator_term(self, op: Operation) -> Term:
        """The corolla of a generator, applied to distinct variables."""
        tree = Node(op, tuple(Leaf(s) for s in op.inputs))
        return Term(tree, tuple(range(len(op.inputs))))

    def __repr__(self) -> str:
        return f"FreeTheory({self.signature!r})"


def free_theory(sig: Signature) -> FreeTheory:
    return FreeTheory(sig)


# ---------------------------------------------------------------------------
# finite theories (abstract clones)


class FiniteTheory:
    """A theory with finite, computable value sets at every profile.

    The data is an abstract clone: ``value_fn`` lists the elements at a
    profile, ``proj_fn`` picks out the k-th projection, and ``subst_fn``
    performs simultaneous substitution into a common target arity.
    Values and substitutions are memoized; the clone laws are checked by
    ``check_clone_laws`` up to the stored law bound.
    """

    def __init__(
        self,
        sorts: SortSet,
        value_fn: Callable[[str, Word], tuple[Element, ...]],
        proj_fn: Callable[[Word, int], Element],
        subst_fn: Callable[[str, Word, Element, Word, tuple], Element],
        name: str = "finite-theory",
        law_bound: int = 3,
    ):
        self.sorts = sorts
        self.name = name
        self.law_bound = law_bound
        self._value_fn = value_fn
        self._proj_fn = proj_fn
        self._subst_fn = subst_fn
        self._values: dict[tuple[str, Word], tuple[Element, ...]] = {}
        self._subst_cache: dict = {}

    def value(self, output: str, word: Word) -> tuple[Element, ...]:
        key = (output, tuple(word))
        if key not in self._values:
            self._values[key] = tuple(self._value_fn(output, tuple(word)))
        return self._values[key]

    def projection(self, word: Word, k: int) -> Element:
        return self._proj_fn(tuple(word), k)

    def substitute(self, output: str, word: Word, element: Element,
                   target: Word, args: tuple) -> Element:
        key = (output, tuple(word), element, tuple(target), tuple(args))
        if key not in self._subst_cache:
            self._subst_cache[key] = self._subst_fn(
                output, tuple(word), element, tuple(target), tuple(args)
            )
        return self._subst_cache[key]

    def rename(self, output: str, word: Word, element: Element,
               morphism: ArityMorphism) -> Element:
        """Functorial action along an arity morphism (variable renaming)."""
        args = tuple(
            self.projection(morphism.codomain, j) for j in morphism.mapping
        )
        return self.substitute(output, word, element, morphism.codomain, args)

    def free_carrier(self, k: GradedSet) -> GradedSet:
        """Underlying graded set of the free algebra on ``k``."""
        w = k.word()
        return GradedSet(self.sorts, {j: self.value(j, w) for j in self.sorts})

    def underlying_series(self, arity_bound: int) -> TabulatedSeries:
        return TabulatedSeries(
            self.sorts,
            self.sorts,
            arity_bound,
            self.value,
            lambda j, m: {
                v: self.rename(j, m.domain, v, m)
                for v in self.value(j, m.domain)
            },
            name=self.name,
        )

    def __repr__(self) -> str:
        return f"FiniteTheory({self.name})"


Theory = FreeTheory | FiniteTheory


def check_clone_laws(theory: FiniteTheory, arity_bound: int | None = None,
                     max_cases: int = 20000, seed: int = 0) -> list[str]:
    """Verify projection/unit/associativity laws of the clone.

    Exhaustive when the number of substitution instances fits in
    ``max_cases``; otherwise a seeded deterministic sample is used.
    Returns a list of violations (empty = pass).
    """
    import random

    bound = arity_bound if arity_bound is not None else theory.law_bound
    rng = random.Random(seed)
    words = enumerate_words(theory.sorts, bound)
    problems: list[str] = []

    def arg_tuples(word: Word, target: Word):
        pools = [theory.value(s, target) for s in word]
        if any(not p for p in pools):
            return []
        return list(itertools.product(*pools))

    # projection law: subst(pi_k, us) = u_k
    for w in words:
        for v in words:
            for us in arg_tuples(w, v):
                for k in range(len(w)):
                    got = theory.substitute(
                        w[k], w, theory.projection(w, k), v, us
                    )
                    if got != us[k]:
                        problems.append(f"projection law fails at {w}->{v}, k={k}")
                if len(problems) > 10:
                    return problems
    # unit law: subst(t, projections) = t
    for j in theory.sorts:
        for w in words:
            units = tuple(theory.projection(w, k) for k in range(len(w)))
            for t in theory.value(j, w):
                if theory.substitute(j, w, t, w, units) != t:
                    problems.append(f"unit law fails at {j}, {w}, {t!r}")
    # associativity, exhaustively or sampled
    triples = []
    for w in words:
        for v in words:
            for z in words:
                n_cases = 1
                for j in theory.sorts:
                    n_cases += len(theory.value(j, w))
                triples.append((w, v, z))
    instances = []
    total = 0
    for (w, v, z) in triples:
        us = arg_tuples(w, v)
        vs = arg_tuples(v, z)
        for j in theory.sorts:
            ts = theory.value(j, w)
            count = len(ts) * len(us) * len(vs)
            total += count
            instances.append((j, w, v, z, ts, us, vs, count))
    exhaustive = total <= max_cases

    def check_assoc(j, w, v, z, t, us, vs):
        lhs = theory.substitute(
            j, v, theory.substitute(j, w, t, v, us), z, vs
        )
        inner = tuple(
            theory.substitute(w[k], v, us[k], z, vs) for k in range(len(w))
        )
        rhs = theory.substitute(j, w, t, z, inner)
        if lhs != rhs:
            problems.append(f"associativity fails at {j}, {w}->{v}->{z}, {t!r}")

    for (j, w, v, z, ts, us_all, vs_all, count) in instances:
        if not count:
            continue
        if exhaustive:
            for t in ts:
                for us in us_all:
                    for vs in vs_all:
                        check_assoc(j, w, v, z, t, us, vs)
        else:
            trials = max(1, max_cases * count // max(total, 1) // 4)
            for _ in range(trials):
                check_assoc(j, w, v, z, rng.choice(ts),
                            rng.choice(us_all), rng.choice(vs_all))
        if len(problems) > 10:
            return problems
    return problems


# ---------------------------------------------------------------------------
# stock finite theories


def pointed_sets_theory(sorts: SortSet | None = None) -> FiniteTheory:
    """The theory of pointed sets: variables plus one constant per sort."""
    ss = sorts if sorts is not None else SortSet(("*",))

    def value(j: str, w: Word):
        return tuple(("x", k) for k, s in enumerate(w) if s == j) + (("c", j),)

    def proj(w: Word, k: int):
        return ("x", k)

    def subst(j, w, t, v, args):
        if t[0] == "x":
            return args[t[1]]
        return t  # the constant is absorbing

    return FiniteTheory(ss, value, proj, subst, name="pointed-sets")


def collapse_theory() -> FiniteTheory:
    """The unique single-sorted theory with no constants and one operation
    of every positive arity; its algebras are the empty set and the point."""
    ss = SortSet(("*",))

    def value(j: str, w: Word):
        return ("*",) if len(w) >= 1 else ()

    def proj(w: Word, k: int):
        return "*"

    def subst(j, w, t, v, args):
        return "*"

    return FiniteTheory(ss, value, proj, subst, name="collapse")


def collapse_with_constant_theory() -> FiniteTheory:
    """Like collapse_theory but with a single constant; every value is a point."""
    ss = SortSet(("*",))
    return FiniteTheory(
        ss,
        lambda j, w: ("*",),
        lambda w, k: "*",
        lambda j, w, t, v, args: "*",
        name="collapse+constant",
    )


def endomorphism_theory(x: GradedSet, law_bound: int = 2) -> FiniteTheory:
    """End(X): the value at (j, w) is the full function set X^w -> X_j.

    Functions are stored as output tuples indexed by the canonical
    enumeration of X^w.  Beware: value sets grow doubly exponentially
    with the arity.
    """
    sorts = x.sorts
    index_cache: dict[Word, dict[tuple, int]] = {}

    def tuples(w: Word):
        return product(x, w)

    def index_of(w: Word, t: tuple) -> int:
        if w not in index_cache:
            index_cache[w] = {tt: i for i, tt in enumerate(tuples(w))}
        return index_cache[w][t]

    def value(j: str, w: Word):
        outs = x.elements(j)
        return tuple(
            ("fn",) + o for o in itertools.product(outs, repeat=len(tuples(w)))
        )

    def proj(w: Word, k: int):
        return ("fn",) + tuple(t[k] for t in tuples(w))

    def subst(j, w, t, v, args):
        outs = []
        for point in tuples(v):
            i = index_of(v, point)
            inner = tuple(arg[1 + i] for arg in args)
            outs.append(t[1 + index_of(w, inner)])
        return ("fn",) + tuple(outs)

    return FiniteTheory(sorts, value, proj, subst,
                        name=f"End({x!r})", law_bound=law_bound)


def endomorphism_theory_of_map(g: GradedMap, law_bound: int = 2) -> FiniteTheory:
    """End(g): pairs of operations on domain and codomain commuting with g."""
    x, y = g.domain, g.codomain
    end_x = endomorphism_theory(x, law_bound)
    end_y = endomorphism_theory(y, law_bound)
    sorts = x.sorts

    def compatible(j: str, w: Word, fx, fy) -> bool:
        xs = product(x, w)
        ys = product(y, w)
        y_index = {t: i for i, t in enumerate(ys)}
        for i, t in enumerate(xs):
            pushed = tuple(g(s, a) for s, a in zip(w, t))
            if g(j, fx[1 + i]) != fy[1 + y_index[pushed]]:
                return False
        return True

    def value(j: str, w: Word):
        return tuple(
            ("pair", fx, fy)
            for fx in end_x.value(j, w)
            for fy in end_y.value(j, w)
            if compatible(j, w, fx, fy)
        )

    def proj(w: Word, k: int):
        return ("pair", end_x.projection(w, k), end_y.projection(w, k))

    def subst(j, w, t, v, args):
        _, fx, fy = t
        return (
            "pair",
            end_x.substitute(j, w, fx, v, tuple(a[1] for a in args)),
            end_y.substitute(j, w, fy, v, tuple(a[2] for a in args)),
        )

    return FiniteTheory(sorts, value, proj, subst,
                        name="End(map)", law_bound=law_bound)


# ---------------------------------------------------------------------------
# theory morphisms


class TheoryMorphism:
    """A sorts-preserving map of theories, given per profile."""

    def __init__(self, source: FiniteTheory, target: FiniteTheory,
                 fn: Callable[[str, Word, Element], Element], name: str = "phi"):
        if source.sorts != target.sorts:
            raise ValueError("theory morphisms require a common sort set")
        self.source = source
        self.target = target
        self._fn = fn
        self.name = name

    def __call__(self, output: str, word: Word, element: Element) -> Element:
        return self._fn(output, tuple(word), element)

    def check(self, arity_bound: int = 2) -> list[str]:
        """Unit preservation and substitution compatibility within bound."""
        s, t = self.source, self.target
        words = enumerate_words(s.sorts, arity_bound)
        problems = []
        for w in words:
            for k in range(len(w)):
                if self(w[k], w, s.projection(w, k)) != t.projection(w, k):
                    problems.append(f"projection not preserved at {w}, {k}")
        for w in words:
            for v in words:
                pools = [s.value(sw, v) for sw in w]
                if any(not p for p in pools):
                    continue
                for j in s.sorts:
                    for el in s.value(j, w):
                        for args in itertools.product(*pools):
                            lhs = self(j, v, s.substitute(j, w, el, v, args))
                            rhs = t.substitute(
                                j, w, self(j, w, el), v,
                                tuple(self(w[k], v, a)
                                      for k, a in enumerate(args)),
                            )
                            if lhs != rhs:
                                problems.append(
                                    f"substitution not preserved at {j}, {w}->{v}"
                                )
                                if len(problems) > 5:
                                    return problems
        return problems

    @staticmethod
    def identity(theory: FiniteTheory) -> "TheoryMorphism":
        return TheoryMorphism(theory, theory, lambda j, w, e: e, name="id")


def enumerate_theory_morphisms(source: FiniteTheory, target: FiniteTheory,
                               arity_bound: int = 2) -> list[TheoryMorphism]:
    """Brute-force search for morphisms as per-profile value maps.

    Projections are forced; the remaining assignments are filtered by
    the substitution law on all instances within the bound.  All value
    sets of the source within the bound must be finite (they are, for a
    FiniteTheory).
    """
    words = enumerate_words(source.sorts, arity_bound)
    slots: list[tuple[str, Word, Element]] = []
    forced: dict[tuple[str, Word, Element], Element] = {}
    for w in words:
        projections = {source.projection(w, k): k for k in range(len(w))}
        for j in source.sorts:
            for el in source.value(j, w):
                if el in projections:
                    forced[(j, w, el)] = target.projection(w, projections[el])
                else:
                    slots.append((j, w, el))
    pools = []
    for (j, w, el) in slots:
        pool = target.value(j, w)
        if not pool:
            return []
        pools.append(pool)
    out = []
    for assignment in itertools.product(*pools):
        table = dict(forced)
        table.update({slot: val for slot, val in zip(slots, assignment)})
        phi = TheoryMorphism(
            source, target,
            lambda j, w, e, table=table: table[(j, tuple(w), e)],
            name="searched",
        )
        if not phi.check(arity_bound):
            out.append(phi)
    return out


def free_theory_hom_from_placement(
    ft: FreeTheory, target: FiniteTheory, placement: dict[Operation, Element]
) -> Callable[[str, Word, Term], Element]:
    """Evaluate terms in a finite theory, generators going to ``placement``."""

    def ev(output: str, word: Word, term: Term) -> Element:
        def walk(t: Tree, var_positions: list[int]) -> Element:
            # var_positions: the ambient positions fed to this subtree's leaves
            if isinstance(t, Leaf):
                return target.projection(word, var_positions[0])
            args = []
            offset = 0
            for c in t.children:
                n = len(leaf_word(c))
                args.append(walk(c, var_positions[offset:offset + n]))
                offset += n
            return target.substitute(
                t.op.output, t.op.inputs, placement[t.op], word, tuple(args)
            )

        return walk(term.tree, list(term.var_map))

    return ev


# ---------------------------------------------------------------------------
# coproducts of free theories, undercategory theories


class FreeCoproductCertificate:
    """Witness of the decomposition of a coproduct of free theories.

    Records the left and right signatures; ``split`` decomposes any
    tree over the union into its B-essential part and A-labelled
    forest, and ``counts`` produces the two sides of the cardinality
    identity per profile at a shared vertex bound.
    """

    def __init__(self, sig_a: Signature, sig_b: Signature):
        self.sig_a = sig_a
        self.sig_b = sig_b
        self._union = sig_a.disjoint_union(sig_b)
        self._essentials: dict = {}

    def union(self) -> Signature:
        return self._union

    def split(self, tree: Tree):
        from .trees import split_essential

        return split_essential(tree, self.sig_b.names())

    def _essential_table(self, output: str, max_vertices: int):
        """Non-empty essential tree lists keyed by leaf word."""
        from .trees import enumerate_essential

        key = (output, max_vertices)
        if key not in self._essentials:
            max_leaves = _max_leaves(self._union, max_vertices)
            table = []
            for g in enumerate_words(self.sig_a.sorts, max_leaves):
                enum = enumerate_essential(
                    self.sig_a, self.sig_b, Profile(output, g), max_vertices
                )
                if enum.trees:
                    table.append((g, enum.trees))
            self._essentials[key] = table
        return self._essentials[key]

    def pairs(self, profile: Profile, max_vertices: int):
        """All (essential tree, A-labelled forest) pairs grafting to the profile.

        This is the star product Q_e(A, B) * Q A enumerated directly:
        essential trees of every possible leaf word, combined with
        A-forests whose leaf words concatenate to the profile's inputs,
        within the shared vertex budget.  Independent of split_essential.
        """
        out = []
        for g, essentials in self._essential_table(profile.output, max_vertices):
            forests_by_budget: dict[int, list] = {}
            for e in essentials:
                budget = max_vertices - vertex_count(e)
                if budget not in forests_by_budget:
                    forests_by_budget[budget] = list(
                        _forest_tuples(self.sig_a, g, profile.inputs, budget)
                    )
                for forest in forests_by_budget[budget]:
                    out.append((e, forest))
        return out

    def counts(self, profile: Profile, max_vertices: int) -> tuple[int, int]:
        """Cardinalities |Q(A+B)(p)| and |(Q_e(A,B) * Q A)(p)| at a shared bound."""
        from .trees import enumerate_trees

        lhs = len(enumerate_trees(self.union(), profile, max_vertices).trees)
        return lhs, len(self.pairs(profile, max_vertices))


def _max_leaves(sig: Signature, max_vertices: int) -> int:
    growth = max(sig.max_arity() - 1, 0)
    return 1 + growth * max_vertices


def _forest_tuples(sig: Signature, sorts: Word, word: Word, budget: int):
    from .trees import _productive, _splits

    if budget < 0:
        return
    for split in _splits(word, len(sorts)):
        if all(_productive(sig, s, w) for s, w in zip(sorts, split)):
            yield from _forest_tuples_split(sig, sorts, split, budget)


def _forest_tuples_split(sig: Signature, sorts: Word,
                         words: tuple[Word, ...], budget: int):
    from .trees import _enumerate

    if not sorts:
        yield ()
        return
    for head in _enumerate(sig, sorts[0], words[0], budget):
        rest = budget - vertex_count(head)
        for tail in _forest_tuples_split(sig, sorts[1:], words[1:], rest):
            yield (head,) + tail


def theory_coproduct_free(
    a: FreeTheory, b: FreeTheory
) -> tuple[FreeTheory, FreeCoproductCertificate]:
    """Coproduct of free theories: free on the disjoint union signature."""
    cert = FreeCoproductCertificate(a.signature, b.signature)
    return FreeTheory(cert.union()), cert


def adjoin_constants(sig: Signature, k: GradedSet) -> Signature:
    """Extend a signature by one nullary generator per element of ``k``."""
    extra = [
        Operation(("const", s, x), s, ()) for s, x in k.pairs()
    ]
    return Signature(sig.sorts, sig.ops + tuple(extra))


def undercategory_theory(theory: Theory, algebra) -> Theory:
    """The theory of algebras under a fixed algebra X: K -> T(K) ⊔ X.

    For a free theory and a free algebra on generators L this is the
    free theory on the signature with L adjoined as constants; for a
    finite theory it is tabulated through algebra coproducts.  The
    clone laws of the finite case are verified computationally by the
    harness rather than assumed.
    """
    from . import algebra as algebra_mod

    if isinstance(theory, FreeTheory):
        if not isinstance(algebra, algebra_mod.FreeAlgebraOverFree):
            raise CapabilityError(
                "undercategory of a free theory needs a free algebra"
            )
        return FreeTheory(adjoin_constants(theory.signature, algebra.generators))
    if not isinstance(algebra, algebra_mod.Algebra):
        raise CapabilityError("undercategory of a finite theory needs a finite algebra")

    def value(j: str, w: Word):
        cop = _under_coproduct(theory, algebra, w)
        return cop.algebra.carrier.elements(j)

    def proj(w: Word, k: int):
        cop = _under_coproduct(theory, algebra, w)
        free_part = cop.factors[0]
        return cop.coprojections[0](
            w[k], free_part.generator_element(w[k], ("var", k))
        )

    def subst(j, w, t, v, args):
        cop_w = _under_coproduct(theory, algebra, w)
        cop_v = _under_coproduct(theory, algebra, v)
        # couniversal map: send variable k of the free part to args[k],
        # and the X part along its coprojection
        free_w = cop_w.factors[0]
        gen_map = GradedMap(free_w.generators, cop_v.algebra.carrier, {
            s: {("var", k): args[k] for k, sk in enumerate(w) if sk == s}
            for s in theory.sorts
        })
        h = algebra_mod.induced_from_free(free_w, cop_v.algebra, gen_map)
        glue = cop_w.induced([h, cop_v.coprojections[1]])
        return glue(j, t)

    return FiniteTheory(
        theory.sorts, value, proj, subst,
        name=f"under({theory.name})",
        law_bound=min(theory.law_bound, 2),
    )


def _under_coproduct(theory: FiniteTheory, algebra, w: Word):
    from . import algebra as algebra_mod

    key = ("under", tuple(w))
    cache = getattr(algebra, "_under_cache", None)
    if cache is None:
        cache = {}
        setattr(algebra, "_under_cache", cache)
    if key not in cache:
        k = GradedSet(
            theory.sorts,
            {
                s: [("var", i) for i, si in enumerate(w) if si == s]
                for s in theory.sorts
            },
        )
        free = algebra_mod.free_algebra(theory, k)
        cache[key] = algebra_mod.coproduct_many([free, algebra])
    return cache[key]
