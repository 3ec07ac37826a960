"""Finitary functors between graded-set categories ("series").

A series is determined by its values on finite graded sets.  Two
representations are provided behind one interface: free series carry a
signature of generators and evaluate by a closed coproduct formula;
tabulated series carry explicit value and action tables up to an arity
bound and evaluate by the defining reflexive-coequalizer (left Kan
extension) formula.  Every arity bound is explicit: exceeding one
raises TruncationError rather than silently truncating.

The module also implements the star product on signatures, its unit
delta, and the canonical bijections making the free-series functor
monoidal (free_series(A * B) matching compose(free_series(A),
free_series(B))).
"""

from __future__ import annotations

import itertools
from typing import Callable, Hashable, Iterable

from .errors import FunctorialityError, TruncationError
from .graded import (
    ArityMorphism,
    Element,
    GradedMap,
    GradedSet,
    Profile,
    SortSet,
    UnionFind,
    Word,
    enumerate_arity_morphisms,
    enumerate_words,
    graded_from_word,
    product,
)
from .signature import Operation, Signature


class Series:
    """Common interface: values per profile and a functorial action."""

    sorts_in: SortSet
    sorts_out: SortSet
    arity_bound: int | None  # None = values computable at every arity

    def value(self, output: str, word: Word) -> tuple[Element, ...]:
        raise NotImplementedError

    def act(self, output: str, morphism: ArityMorphism) -> dict[Element, Element]:
        raise NotImplementedError

    def value_set(self, word: Word) -> GradedSet:
        """All values at one input word, as a graded set over the output sorts."""
        return GradedSet(
            self.sorts_out, {j: self.value(j, word) for j in self.sorts_out}
        )

    def _check_word(self, word: Word) -> Word:
        word = self.sorts_in.check_word(word)
        if self.arity_bound is not None and len(word) > self.arity_bound:
            raise TruncationError(
                f"arity {len(word)} exceeds bound {self.arity_bound}"
            )
        return word


class UnitSeries(Series):
    """The identity functor: value at (i, w) is the set of i-positions of w."""

    def __init__(self, sorts: SortSet):
        self.sorts_in = sorts
        self.sorts_out = sorts
        self.arity_bound = None

    def value(self, output: str, word: Word) -> tuple[int, ...]:
        return tuple(k for k, s in enumerate(word) if s == output)

    def act(self, output: str, morphism: ArityMorphism) -> dict[int, int]:
        return {k: morphism.mapping[k] for k in self.value(output, morphism.domain)}

    def __repr__(self) -> str:
        return f"UnitSeries({self.sorts_in.sorts})"


class FreeSeries(Series):
    """Free series on a signature; values are (operation, arity morphism) pairs."""

    def __init__(self, signature: Signature):
        self.signature = signature
        self.sorts_in = signature.sorts
        self.sorts_out = signature.sorts
        self.arity_bound = None

    def value(self, output: str, word: Word) -> tuple[Element, ...]:
        out = []
        for op in self.signature.with_output(output):
            for m in enumerate_arity_morphisms(op.inputs, word):
                out.append((op, m))
        return tuple(out)

    def act(self, output: str, morphism: ArityMorphism):
        return {
            (op, m): (op, m.then(morphism))
            for (op, m) in self.value(output, morphism.domain)
        }

    def __repr__(self) -> str:
        return f"FreeSeries({self.signature!r})"


def free_series(sig: Signature) -> FreeSeries:
    return FreeSeries(sig)


class TabulatedSeries(Series):
    """A series given by (possibly lazy) value and action tables."""

    def __init__(
        self,
        sorts_in: SortSet,
        sorts_out: SortSet,
        arity_bound: int,
        value_fn: Callable[[str, Word], tuple[Element, ...]],
        action_fn: Callable[[str, ArityMorphism], dict[Element, Element]],
        name: str = "tabulated",
    ):
        self.sorts_in = sorts_in
        self.sorts_out = sorts_out
        self.arity_bound = arity_bound
        self._value_fn = value_fn
        self._action_fn = action_fn
        self._values: dict[tuple[str, Word], tuple[Element, ...]] = {}
        self._actions: dict[tuple[str, ArityMorphism], dict] = {}
        self.name = name

    def value(self, output: str, word: Word) -> tuple[Element, ...]:
        word = self._check_word(word)
        key = (output, word)
        if key not in self._values:
            self._values[key] = tuple(self._value_fn(output, word))
        return self._values[key]

    def act(self, output: str, morphism: ArityMorphism) -> dict[Element, Element]:
        self._check_word(morphism.domain)
        self._check_word(morphism.codomain)
        key = (output, morphism)
        if key not in self._actions:
            table = dict(self._action_fn(output, morphism))
            dom = set(self.value(output, morphism.domain))
            cod = set(self.value(output, morphism.codomain))
            if set(table) != dom or not set(table.values()) <= cod:
                raise FunctorialityError(
                    f"action table malformed at {output!r}, {morphism}"
                )
            self._actions[key] = table
        return self._actions[key]

    def __repr__(self) -> str:
        return f"TabulatedSeries({self.name}, bound={self.arity_bound})"

    @staticmethod
    def from_tables(
        sorts_in: SortSet,
        sorts_out: SortSet,
        arity_bound: int,
        values: dict[tuple[str, Word], Iterable[Element]],
        actions: dict[tuple[str, ArityMorphism], dict],
        name: str = "tabulated",
    ) -> "TabulatedSeries":
        vals = {k: tuple(v) for k, v in values.items()}
        return TabulatedSeries(
            sorts_in,
            sorts_out,
            arity_bound,
            lambda j, w: vals.get((j, w), ()),
            lambda j, m: actions.get((j, m), {}),
            name=name,
        )


def tabulate(series: Series, arity_bound: int, name: str | None = None) -> TabulatedSeries:
    """Snapshot any series as an explicitly tabulated one."""
    return TabulatedSeries(
        series.sorts_in,
        series.sorts_out,
        arity_bound,
        series.value,
        series.act,
        name=name or f"tab({series!r})",
    )


# ---------------------------------------------------------------------------
# evaluation


def evaluate(series: Series, x: GradedSet) -> GradedSet:
    """Apply a series to a finite graded set.

    Free series and the unit evaluate by their closed formulas; a
    tabulated series evaluates by the left Kan extension coequalizer,
    which needs all arities up to the total size of ``x`` and therefore
    requires that size to be within the arity bound.
    """
    if isinstance(series, UnitSeries):
        return x
    if isinstance(series, FreeSeries):
        elems: dict[str, list[Element]] = {j: [] for j in series.sorts_out}
        for op in series.signature.ops:
            for args in product(x, op.inputs):
                elems[op.output].append((op, args))
        return GradedSet(series.sorts_out, elems)
    cls = _coequalizer_classes(series, x)
    elems = {j: [] for j in series.sorts_out}
    for j in series.sorts_out:
        seen: dict[Element, None] = {}
        for rep in cls[j].values():
            seen.setdefault(rep, None)
        elems[j] = list(seen)
    return GradedSet(series.sorts_out, elems)


def evaluate_with_projection(series: Series, x: GradedSet):
    """Evaluate and also return the projection (j, word, value, args) -> class."""
    if isinstance(series, (UnitSeries, FreeSeries)):
        raise TypeError("projection form is only for tabulated series")
    cls = _coequalizer_classes(series, x)
    result = evaluate(series, x)

    def project(j: str, word: Word, val: Element, args: tuple) -> Element:
        return cls[j][(word, val, args)]

    return result, project


def _coequalizer_classes(series: Series, x: GradedSet):
    """Union-find classes of the defining coequalizer, per output sort.

    Keys are triples (input word, value element, argument tuple); the
    representative of each class is the least key in enumeration order
    (words shortlex, then value order, then argument product order).
    """
    if series.arity_bound is None:
        raise TypeError("coequalizer evaluation needs a bounded series")
    n = x.total_size()
    if n > series.arity_bound:
        raise TruncationError(
            f"graded set of size {n} exceeds arity bound {series.arity_bound}"
        )
    words = enumerate_words(series.sorts_in, series.arity_bound)
    out: dict[str, dict[Element, Element]] = {}
    for j in series.sorts_out:
        uf = UnionFind()
        for w in words:
            for val in series.value(j, w):
                for args in product(x, w):
                    uf.add((w, val, args))
        for p in words:
            vals_p = series.value(j, p)
            if not vals_p:
                continue
            for q in words:
                for t in enumerate_arity_morphisms(p, q):
                    action = series.act(j, t)
                    for val in vals_p:
                        moved = action[val]
                        for args in product(x, q):
                            pulled = tuple(args[i] for i in t.mapping)
                            uf.union((q, moved, args), (p, val, pulled))
        out[j] = uf.classes()
    return out


def evaluate_map(series: Series, h: GradedMap) -> GradedMap:
    """Functorial action of a series on a graded map."""
    src = evaluate(series, h.domain)
    dst = evaluate(series, h.codomain)
    if isinstance(series, UnitSeries):
        return h
    if isinstance(series, FreeSeries):
        maps = {
            j: {
                (op, args): (op, tuple(h(s, a) for s, a in zip(op.inputs, args)))
                for (op, args) in src.elements(j)
            }
            for j in series.sorts_out
        }
        return GradedMap(src, dst, maps)
    _, project = evaluate_with_projection(series, h.codomain)
    cls_src = _coequalizer_classes(series, h.domain)
    maps = {j: {} for j in series.sorts_out}
    for j in series.sorts_out:
        for (w, val, args), rep in cls_src[j].items():
            if rep in maps[j]:
                continue
            pushed = tuple(h(s, a) for s, a in zip(w, args))
            maps[j][rep] = project(j, w, val, pushed)
    return GradedMap(src, dst, maps)


# ---------------------------------------------------------------------------
# composition


def compose(a: Series, b: Series, arity_bound: int) -> TabulatedSeries:
    """The composition product: (a ∘ b)(w) = a evaluated at b's values on w.

    ``b`` maps I-graded to J-graded sets and ``a`` maps J-graded to
    K-graded sets; the result is tabulated up to ``arity_bound``.
    Intermediate values outside a's bound raise TruncationError.
    """
    if b.sorts_out != a.sorts_in:
        raise ValueError("series not composable: sort sets do not match")

    def value_fn(k: str, w: Word) -> tuple[Element, ...]:
        y = b.value_set(w)
        return tuple(evaluate(a, y).elements(k))

    def action_fn(k: str, t: ArityMorphism) -> dict[Element, Element]:
        y_src = b.value_set(t.domain)
        y_dst = b.value_set(t.codomain)
        maps = {
            j: dict(b.act(j, t))
            for j in b.sorts_out
        }
        h = GradedMap(y_src, y_dst, maps)
        pushed = evaluate_map(a, h)
        return {v: pushed(k, v) for v in value_fn(k, t.domain)}

    return TabulatedSeries(
        b.sorts_in, a.sorts_out, arity_bound, value_fn, action_fn,
        name="compose",
    )


def check_functoriality(series: Series, arity_bound: int | None = None):
    """Verify identity and composition laws of the action by enumeration.

    Returns a list of human-readable violations (empty list = pass).
    """
    bound = arity_bound if arity_bound is not None else series.arity_bound
    if bound is None:
        raise ValueError("need an arity bound to enumerate")
    words = enumerate_words(series.sorts_in, bound)
    problems: list[str] = []
    for j in series.sorts_out:
        for w in words:
            ident = ArityMorphism.identity(w)
            table = series.act(j, ident)
            for v in series.value(j, w):
                if table[v] != v:
                    problems.append(f"identity broken at {j}, {w}, {v!r}")
    for j in series.sorts_out:
        for p in words:
            if not series.value(j, p):
                continue
            for q in words:
                for t in enumerate_arity_morphisms(p, q):
                    t_act = series.act(j, t)
                    for r in words:
                        for u in enumerate_arity_morphisms(q, r):
                            lhs = series.act(j, t.then(u))
                            u_act = series.act(j, u)
                            for v in series.value(j, p):
                                if lhs[v] != u_act[t_act[v]]:
                                    problems.append(
                                        f"composition broken at {j}: "
                                        f"{t} then {u} on {v!r}"
                                    )
    return problems


# ---------------------------------------------------------------------------
# star product on signatures


def delta(sorts: SortSet) -> Signature:
    """The unit signature: one generator of profile (i, (i,)) per sort."""
    return Signature(
        sorts, [Operation(("1", s), s, (s,)) for s in sorts]
    )


def _compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    """All tuples of ``parts`` non-negative integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def star_product(a: Signature, b: Signature) -> Signature:
    """The star product of two signatures.

    An element over the input word f is an A-generator applied to a
    weakly monotone block decomposition of f whose blocks carry
    B-generators; weakly monotone maps are identified with block-size
    tuples, with each fiber ordered as a subset of f.  The resulting
    operation names are ("*", a_op, sizes, b_ops).
    """
    if a.sorts != b.sorts:
        raise ValueError("signatures must share a sort set")
    ops: list[Operation] = []
    for a_op in a.ops:
        m = len(a_op.inputs)
        block_choices: list[list[Operation]] = []
        for k in range(m):
            block_choices.append([op for op in b.ops if op.output == a_op.inputs[k]])
        for b_ops in itertools.product(*block_choices):
            word = tuple(s for op in b_ops for s in op.inputs)
            sizes = tuple(len(op.inputs) for op in b_ops)
            ops.append(
                Operation(("*", a_op, sizes, tuple(b_ops)), a_op.output, word)
            )
    return Signature(a.sorts, ops)


def star_value(a: Signature, b: Signature, profile: Profile) -> tuple[Operation, ...]:
    """The (A*B)-operations at one profile (diagnostic helper)."""
    return star_product(a, b).at_profile(profile)


def star_unit_left_iso(a: Signature) -> dict[Operation, Operation]:
    """Canonical bijection delta * A -> A."""
    d = delta(a.sorts)
    out = {}
    for op in star_product(d, a).ops:
        _, d_op, sizes, b_ops = op.name
        assert len(b_ops) == 1 and sizes == (len(b_ops[0].inputs),)
        out[op] = b_ops[0]
    return out


def star_unit_right_iso(a: Signature) -> dict[Operation, Operation]:
    """Canonical bijection A * delta -> A."""
    d = delta(a.sorts)
    out = {}
    for op in star_product(a, d).ops:
        _, a_op, sizes, b_ops = op.name
        assert all(s == 1 for s in sizes)
        out[op] = a_op
    return out


def star_associator(
    a: Signature, b: Signature, c: Signature
) -> dict[Operation, Operation]:
    """Canonical bijection (A*B)*C -> A*(B*C).

    Regroups the C-blocks of each B-block according to the composed
    block decomposition; verified to be a profile-preserving bijection
    by the verification harness.
    """
    left = star_product(star_product(a, b), c)
    right = star_product(a, star_product(b, c))
    out: dict[Operation, Operation] = {}
    for op in left.ops:
        _, ab_op, c_sizes, c_ops = op.name
        _, a_op, b_sizes, b_ops = ab_op.name
        # split the C-blocks among the B-blocks: B-block k consumed
        # b_sizes[k] inputs of ab_op, hence b_sizes[k] C-blocks
        bc_ops: list[Operation] = []
        offset = 0
        for b_op, width in zip(b_ops, b_sizes):
            blocks = c_ops[offset:offset + width]
            sizes = c_sizes[offset:offset + width]
            word = tuple(s for blk in blocks for s in blk.inputs)
            bc_ops.append(
                Operation(("*", b_op, tuple(sizes), tuple(blocks)),
                          b_op.output, word)
            )
            offset += width
        name = ("*", a_op, tuple(len(op2.inputs) for op2 in bc_ops),
                tuple(bc_ops))
        candidate = Operation(name, a_op.output,
                              tuple(s for op2 in bc_ops for s in op2.inputs))
        if candidate.name not in right:
            raise AssertionError(f"associator image missing for {op}")
        out[op] = right[candidate.name]
    return out


# ---------------------------------------------------------------------------
# the monoidal comparison free_series(A*B) vs compose(S A, S B)


def star_compose_iso(
    a: Signature, b: Signature, output: str, word: Word
) -> dict[Element, Element]:
    """Explicit bijection S(A*B)(j, w) -> (S A ∘ S B)(j, w).

    The left side is a pair (star operation, arity morphism); the right
    side is a class in the composition's coequalizer, here always the
    free-series closed form (A-generator, tuple of S B-values).
    """
    sab = free_series(star_product(a, b))
    sb = free_series(b)
    y = sb.value_set(word)
    out: dict[Element, Element] = {}
    for star_op, t in sab.value(output, word):
        _, a_op, sizes, b_ops = star_op.name
        offset = 0
        args = []
        for b_op, size in zip(b_ops, sizes):
            block = tuple(t.mapping[offset:offset + size])
            args.append((b_op, ArityMorphism(b_op.inputs, word, block)))
            offset += size
        out[(star_op, t)] = (a_op, tuple(args))
    # right side: elements of evaluate(free_series(a), y) at ``output``
    target = set(evaluate(free_series(a), y).elements(output))
    image = set(out.values())
    if image != target or len(image) != len(out):
        raise AssertionError("star/compose comparison is not a bijection")
    return out
