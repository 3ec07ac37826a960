"""The proposition harness: named checks with independent oracles.

Every structural claim in scope becomes a parameterized check that
compares library output against a brute-force oracle implemented here
(Catalan recurrence, binomial counts, monotone-map enumeration,
hom-set double counting, definition unfolding).  Oracles never call
into the internals of the module they validate.

Checks are deterministic under a fixed seed; failures carry a minimal
witness string.  ``run_all`` aggregates everything into a Report whose
machine-readable records exclude wall-clock, so seeded reruns are
byte-identical.
"""

from __future__ import annotations

import itertools
import math
import random
import time
import traceback
from dataclasses import dataclass, field

from .errors import FunctorialityError
from .graded import (
    ArityMorphism,
    GradedMap,
    GradedSet,
    Profile,
    SortSet,
    coequalize_pair,
    enumerate_words,
    product,
    reflexive_coequalizer,
)
from .signature import Operation, Signature, signature, single_sorted
from . import series as se
from . import trees as tr
from . import theory as th
from . import algebra as al
from . import simplicial as sim


@dataclass(frozen=True)
class VerifyConfig:
    """Bounds for the harness; defaults keep run_all under two minutes."""

    seed: int = 0
    max_arity: int = 4
    max_vertices: int = 5
    max_carrier: int = 4
    truncation: int = 3


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict
    witness: str | None
    seconds: float

    def record(self) -> dict:
        """Deterministic machine record (no timing)."""
        out = {"check": self.name, "passed": self.passed,
               "details": self.details}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    results: list[CheckResult]
    config: VerifyConfig

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def records(self) -> list[dict]:
        return [r.record() for r in self.results]

    def human_summary(self) -> str:
        lines = []
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            lines.append(f"[{status}] {r.name} ({r.seconds:.2f}s)")
            if not r.passed and r.witness:
                lines.append(f"       witness: {r.witness}")
        total = sum(r.seconds for r in self.results)
        verdict = "all checks passed" if self.all_passed else "FAILURES PRESENT"
        lines.append(f"{len(self.results)} checks in {total:.1f}s: {verdict}")
        return "\n".join(lines)


class _Check:
    """Collects comparisons; first failure wins as the witness."""

    def __init__(self) -> None:
        self.details: dict = {}
        self.witness: str | None = None
        self.passed = True

    def expect(self, label: str, got, want) -> None:
        if self.witness is None and got != want:
            self.passed = False
            self.witness = f"{label}: got {got!r}, want {want!r}"

    def require(self, label: str, condition: bool) -> None:
        if self.witness is None and not condition:
            self.passed = False
            self.witness = label


def _run(name: str, fn, config: VerifyConfig) -> CheckResult:
    start = time.perf_counter()
    chk = _Check()
    try:
        fn(chk, config)
    except Exception:
        chk.passed = False
        chk.witness = traceback.format_exc(limit=3).strip().splitlines()[-1]
    return CheckResult(name, chk.passed, chk.details, chk.witness,
                       time.perf_counter() - start)


# ---------------------------------------------------------------------------
# oracles (independent of the implementations they validate)


def _catalan(n: int) -> int:
    """C_n by the additive recurrence, no library code involved."""
    table = [1]
    for m in range(1, n + 1):
        table.append(sum(table[i] * table[m - 1 - i] for i in range(m)))
    return table[n]


def _monotone_maps(n: int, k: int) -> list[tuple[int, ...]]:
    """All weakly monotone maps [n] -> [k], as value tuples."""
    return [
        values
        for values in itertools.product(range(k + 1), repeat=n + 1)
        if all(a <= b for a, b in zip(values, values[1:]))
    ]


def _nerve_diagram(k: int, truncation: int) -> sim.TruncatedDegeneracyDiagram:
    """The degeneracy diagram of the nerve of [k]: level n is the set of
    monotone maps [n] -> [k], operators act by precomposition."""
    sorts = SortSet(("*",))
    levels = [
        GradedSet(sorts, {"*": _monotone_maps(n, k)})
        for n in range(truncation + 1)
    ]
    ops = {}
    for n in range(truncation):
        for i in range(n + 1):
            sigma = sim.Surjection.elementary(n, i)
            ops[(n, i)] = GradedMap(
                levels[n], levels[n + 1],
                {"*": {
                    x: tuple(x[v] for v in sigma.values)
                    for x in levels[n].elements("*")
                }},
            )
    return sim.TruncatedDegeneracyDiagram(levels, ops)


def _wedge_size(*sizes: int) -> int:
    """Expected size of an iterated pointed-set coproduct."""
    return sum(sizes) - (len(sizes) - 1)


# ---------------------------------------------------------------------------
# shared fixtures


def _binary(name: str) -> Signature:
    return signature([(name, "*", ["*", "*"])])


def _single_sorted_signatures(max_gens: int = 2) -> list[Signature]:
    """All single-sorted signatures with <= max_gens generators of arity <= 2."""
    arities = [0, 1, 2]
    sigs = []
    for count in range(max_gens + 1):
        for combo in itertools.combinations_with_replacement(arities, count):
            sigs.append(single_sorted(
                {f"g{i}a{a}": a for i, a in enumerate(combo)}
            ))
    return sigs


def _two_sorted_profiles() -> list[tuple[str, tuple[str, ...]]]:
    sorts = ("u", "v")
    out = []
    for output in sorts:
        for n in range(3):
            for inputs in itertools.product(sorts, repeat=n):
                out.append((output, inputs))
    return out


def _two_sorted_signatures(max_gens: int = 1) -> list[Signature]:
    profiles = _two_sorted_profiles()
    sigs = []
    for count in range(max_gens + 1):
        for combo in itertools.combinations_with_replacement(
            range(len(profiles)), count
        ):
            ops = [
                (f"g{i}p{p}", profiles[p][0], profiles[p][1])
                for i, p in enumerate(combo)
            ]
            sigs.append(signature(ops, sorts=("u", "v")))
    return sigs


def _prefix_sig(sig: Signature, prefix: str) -> Signature:
    return Signature(
        sig.sorts,
        [Operation(f"{prefix}{op.name}", op.output, op.inputs)
         for op in sig.ops],
    )


def _coprod_fixture_pairs() -> list[tuple[Signature, Signature]]:
    """The signature-pair family for the coproduct decomposition checks.

    All single-sorted pairs with up to two generators of arity <= 2 on
    each side; all two-sorted pairs with up to one generator each, plus
    curated two-generator two-sorted pairs (the mixed-sort fixture with
    operations (e;vv) and (v;e) among them).
    """
    pairs: list[tuple[Signature, Signature]] = []
    singles = _single_sorted_signatures(2)
    for a, b in itertools.product(singles, singles):
        pairs.append((_prefix_sig(a, "A."), _prefix_sig(b, "B.")))
    twos = _two_sorted_signatures(1)
    for a, b in itertools.product(twos, twos):
        pairs.append((_prefix_sig(a, "A."), _prefix_sig(b, "B.")))
    graph = signature([("edge", "u", ["v", "v"]), ("src", "v", ["u"])],
                      sorts=("u", "v"))
    graph_b = signature([("loop", "u", ["u", "u"]), ("pick", "v", [])],
                        sorts=("u", "v"))
    pairs.append((graph, graph_b))
    pairs.append((graph_b, graph))
    return pairs


def _profiles_up_to(sorts: SortSet, max_leaves: int) -> list[Profile]:
    return [
        Profile(j, w)
        for j in sorts
        for w in enumerate_words(sorts, max_leaves)
    ]


def _pointed_algebra(p: th.FiniteTheory, names: list[str],
                     basepoint: str) -> al.Algebra:
    carrier = GradedSet(SortSet(("*",)), {"*": names})
    w = carrier.word()
    psi = {"*": {}}
    for t in p.value("*", w):
        if t[0] == "x":
            psi["*"][t] = names[t[1]]
        else:
            psi["*"][t] = basepoint
    return al.Algebra(p, carrier, psi, name=f"pointed{names}")


# ---------------------------------------------------------------------------
# checks


def check_tree_catalan(chk: _Check, config: VerifyConfig) -> None:
    sig = _binary("m")
    counts = []
    for leaves in range(2, 9):
        enum = tr.enumerate_trees(sig, Profile("*", ("*",) * leaves),
                                  leaves - 1)
        chk.require(f"enumeration at {leaves} leaves is exact", enum.exact)
        counts.append(len(enum.trees))
    oracle = [_catalan(leaves - 1) for leaves in range(2, 9)]
    chk.expect("catalan counts for 2..8 leaves", counts, oracle)
    chk.details["counts"] = counts
    empty = signature([])
    for leaves in (1, 2):
        enum = tr.enumerate_trees(empty, Profile("*", ("*",) * leaves), 3)
        want = 1 if leaves == 1 else 0
        chk.expect(f"empty signature at {leaves} leaves", len(enum.trees), want)
    unary = single_sorted({"u": 1})
    enum = tr.enumerate_trees(unary, Profile("*", ("*",)), 3)
    chk.expect("unary chains up to 3 vertices", len(enum.trees), 4)
    chk.require("unary enumeration is flagged truncated", not enum.exact)


def check_coprod_decomposition(chk: _Check, config: VerifyConfig) -> None:
    total_pairs = 0
    total_trees = 0
    bound = min(config.max_vertices, 4)
    for sig_a, sig_b in _coprod_fixture_pairs():
        ft_a = th.FreeTheory(sig_a)
        ft_b = th.FreeTheory(sig_b)
        _, cert = th.theory_coproduct_free(ft_a, ft_b)
        union = cert.union()
        b_names = sig_b.names()
        for profile in _profiles_up_to(sig_a.sorts, 4):
            trees = tr.enumerate_trees(union, profile, bound).trees
            pairs = cert.pairs(profile, bound)
            if chk.witness is None and len(trees) != len(pairs):
                chk.passed = False
                chk.witness = (
                    f"count mismatch {len(trees)} vs {len(pairs)} at "
                    f"{profile} for {sig_a!r} + {sig_b!r}"
                )
                return
            total_pairs += 1
            for t in trees:
                total_trees += 1
                e, forest = cert.split(t)
                chk.require(
                    f"split of {t!r} is essential",
                    tr.is_essential(e, b_names),
                )
                chk.require(
                    f"forest of {t!r} avoids B labels",
                    all(not tr._contains_label(sub, b_names) for sub in forest),
                )
                chk.expect(f"regraft of {t!r}", tr.graft(e, forest), t)
            regrafts = {tr.graft(e, forest) for (e, forest) in pairs}
            chk.expect(
                f"grafted pairs cover the trees at {profile}",
                regrafts, set(trees),
            )
            if chk.witness:
                return
    sig_a, sig_b = _binary("a"), _binary("b")
    _, cert = th.theory_coproduct_free(th.FreeTheory(sig_a), th.FreeTheory(sig_b))
    lhs, rhs = cert.counts(Profile("*", ("*",) * 3), bound)
    chk.expect("worked instance at 3 leaves", (lhs, rhs), (8, 8))
    chk.details["profile_instances"] = total_pairs
    chk.details["trees_roundtripped"] = total_trees


def check_essential_equalizer(chk: _Check, config: VerifyConfig) -> None:
    bound = min(config.max_vertices, 4)
    fixtures = [
        (_binary("a"), _binary("b")),
        (single_sorted({"a0": 0, "a2": 2}), single_sorted({"b1": 1})),
        (signature([("edge", "u", ["v", "v"])], sorts=("u", "v")),
         signature([("pick", "v", ["u"])], sorts=("u", "v"))),
        (_binary("a"), signature([])),
    ]
    checked = 0
    for sig_a, sig_b in fixtures:
        doubled_left = Signature(
            sig_b.sorts,
            [Operation(("L", op.name), op.output, op.inputs) for op in sig_b.ops],
        )
        doubled_right = Signature(
            sig_b.sorts,
            [Operation(("R", op.name), op.output, op.inputs) for op in sig_b.ops],
        )
        left_map = {op: doubled_left[("L", op.name)] for op in sig_b.ops}
        right_map = {op: doubled_right[("R", op.name)] for op in sig_b.ops}
        for profile in _profiles_up_to(sig_a.sorts, 3):
            enum = tr.enumerate_essential(sig_a, sig_b, profile, bound)
            for t in enum.trees:
                checked += 1
                fixed = tr.relabel(t, left_map) == tr.relabel(t, right_map)
                trivial = isinstance(t, tr.Leaf)
                chk.expect(
                    f"doubling fixes exactly trivial trees at {profile}",
                    fixed, trivial,
                )
            if chk.witness:
                return
        # Q_e(A, empty) contains exactly the trivial trees
        empty = signature([], sorts=tuple(sig_a.sorts.sorts))
        for j in sig_a.sorts:
            enum = tr.enumerate_essential(sig_a, empty, Profile(j, (j,)), bound)
            chk.expect(
                f"Q_e(A, empty) at sort {j}",
                [type(t).__name__ for t in enum.trees], ["Leaf"],
            )
    # negative control: a relabeling that moves B into A must break the test
    sig_a, sig_b = _binary("a"), _binary("b")
    t = tr.Node(sig_b["b"], (tr.Leaf("*"), tr.Leaf("*")))
    broken = tr.relabel(t, {sig_b["b"]: sig_a["a"]})
    chk.require(
        "negative control: breaking the relabeling changes essentialness",
        tr.is_essential(t, sig_b.names())
        and not tr.is_essential(broken, sig_b.names()),
    )
    chk.details["trees_checked"] = checked


def check_star_monoid(chk: _Check, config: VerifyConfig) -> None:
    rng = random.Random(config.seed)
    fixtures = [
        _binary("a"),
        single_sorted({"c": 0, "u": 1}),
        single_sorted({"m": 2, "e": 0}),
        signature([("edge", "u", ["v", "v"]), ("pick", "v", ["u"])],
                  sorts=("u", "v")),
    ]
    for sig in fixtures:
        d = se.delta(sig.sorts)
        left = se.star_unit_left_iso(sig)
        chk.expect(
            f"delta * A has the size of A for {sig!r}",
            len(left), len(sig.ops),
        )
        chk.require(
            f"left unit is a bijection for {sig!r}",
            sorted(map(str, left.values())) == sorted(map(str, sig.ops)),
        )
        right = se.star_unit_right_iso(sig)
        chk.expect(
            f"A * delta has the size of A for {sig!r}",
            len(right), len(sig.ops),
        )
        for op, image in itertools.chain(left.items(), right.items()):
            chk.expect(f"unit iso preserves the profile of {op}",
                       op.profile, image.profile)
    # associativity on deterministic and seeded triples
    triples = [
        (_binary("a"), _binary("b"), _binary("c")),
        (single_sorted({"m": 2, "e": 0}), single_sorted({"u": 1}),
         single_sorted({"n": 2})),
    ]
    pool = _single_sorted_signatures(2)
    for _ in range(3):
        triples.append(tuple(rng.choice(pool) for _ in range(3)))
    for a, b, c in triples:
        assoc = se.star_associator(a, b, c)
        left_sig = se.star_product(se.star_product(a, b), c)
        right_sig = se.star_product(a, se.star_product(b, c))
        chk.expect(
            "associator is total",
            len(assoc), len(left_sig.ops),
        )
        chk.expect(
            "associator is a bijection",
            len(set(assoc.values())), len(right_sig.ops),
        )
        for op, image in assoc.items():
            chk.expect("associator preserves profiles",
                       op.profile, image.profile)
        if chk.witness:
            return
    # S(A*B) against the composite, as an explicit natural bijection
    for a, b in [(_binary("a"), _binary("b")),
                 (single_sorted({"m": 2, "e": 0}), single_sorted({"u": 1}))]:
        comp = se.compose(se.free_series(a), se.free_series(b),
                          config.max_arity)
        for j in a.sorts:
            for w in enumerate_words(a.sorts, config.max_arity):
                iso = se.star_compose_iso(a, b, j, w)
                chk.expect(
                    f"star/compose sizes at ({j}, {w})",
                    len(iso), len(comp.value(j, w)),
                )
        if chk.witness:
            return
    chk.details["triples"] = len(triples)


def check_kan_coequalizer(chk: _Check, config: VerifyConfig) -> None:
    rng = random.Random(config.seed)
    sorts = SortSet(("*",))
    # unit series is the identity
    for size in range(4):
        x = GradedSet(sorts, {"*": [f"v{i}" for i in range(size)]})
        chk.expect(f"unit series at size {size}",
                   se.evaluate(se.UnitSeries(sorts), x), x)
    # evaluate agrees with tabulation on representable inputs
    fixtures = [
        th.collapse_theory().underlying_series(config.max_arity),
        th.pointed_sets_theory().underlying_series(config.max_arity),
    ]
    for series in fixtures:
        for w in enumerate_words(sorts, min(config.max_arity, 3)):
            from .graded import graded_from_word

            x = graded_from_word(sorts, w)
            for j in sorts:
                got = len(se.evaluate(series, x).elements(j))
                want = len(series.value(j, w))
                chk.expect(
                    f"representability of {series!r} at {w}", got, want,
                )
    # the collapse-theory series collapses every nonempty set
    collapse = th.collapse_theory().underlying_series(config.max_arity)
    for size in range(1, config.max_arity + 1):
        x = GradedSet(sorts, {"*": [f"v{i}" for i in range(size)]})
        chk.expect(f"collapse series at size {size}",
                   se.evaluate(collapse, x).total_size(), 1)
    chk.expect("collapse series at the empty set",
               se.evaluate(collapse, GradedSet(sorts, {"*": []})).total_size(), 0)
    # reflexive coequalizers commute with finite products, randomized
    two_sorts = SortSet(("u", "v"))
    instances = 0
    for trial in range(200):
        y_sizes = {s: rng.randrange(0, 4) for s in two_sorts}
        extra = {s: rng.randrange(0, 3) for s in two_sorts}
        y = GradedSet(two_sorts,
                      {s: [f"y{i}" for i in range(y_sizes[s])]
                       for s in two_sorts})
        x_elems = {
            s: list(y.elements(s)) + [f"p{i}" for i in range(extra[s])]
            for s in two_sorts
        }
        x = GradedSet(two_sorts, x_elems)
        s_map = GradedMap(y, x, {s: {e: e for e in y.elements(s)}
                                 for s in two_sorts})

        def rand_to_y(src: GradedSet) -> GradedMap:
            return GradedMap(src, y, {
                s: {
                    e: (e if e in y.elements(s)
                        else rng.choice(y.elements(s)))
                    for e in src.elements(s)
                }
                for s in two_sorts
            })

        # keep f, g identity on the reflected part so f s = g s = id
        if any(extra[s] > 0 and y_sizes[s] == 0 for s in two_sorts):
            continue
        f = rand_to_y(x)
        g = rand_to_y(x)
        q, proj = reflexive_coequalizer(f, g, s_map)
        z = GradedSet(two_sorts,
                      {s: [f"z{i}" for i in range(rng.randrange(0, 3))]
                       for s in two_sorts})
        # product with z, sortwise: (X x Z) paired elementwise
        def times_z(a: GradedSet) -> GradedSet:
            return GradedSet(two_sorts, {
                s: [(e, zz) for e in a.elements(s) for zz in z.elements(s)]
                for s in two_sorts
            })

        def map_times_z(h: GradedMap, src: GradedSet, dst: GradedSet) -> GradedMap:
            return GradedMap(src, dst, {
                s: {(e, zz): (h(s, e), zz) for (e, zz) in src.elements(s)}
                for s in two_sorts
            })

        xz, yz = times_z(x), times_z(y)
        fz = map_times_z(f, xz, yz)
        gz = map_times_z(g, xz, yz)
        qz, projz = coequalize_pair(fz, gz)
        # explicit bijection: [ (y, z) ] -> ([y], z)
        want = times_z(q)
        bij = {}
        ok = True
        for s in two_sorts:
            bij[s] = {}
            for (e, zz) in qz.elements(s):
                target = (proj(s, e), zz)
                if target not in want.elements(s):
                    ok = False
                bij[s][(e, zz)] = target
            if len(set(bij[s].values())) != len(bij[s]) or \
               len(bij[s]) != len(want.elements(s)):
                ok = False
        chk.require(f"coequalizer/product bijection on trial {trial}", ok)
        if chk.witness:
            return
        instances += 1
    chk.details["random_instances"] = instances
    # trivial identity instance
    y = GradedSet(sorts, {"*": ["a", "b"]})
    ident = GradedMap.identity(y)
    q, proj = reflexive_coequalizer(ident, ident, ident)
    chk.expect("identity reflexive pair", q, y)
    # precondition check: fs != id must be rejected
    x2 = GradedSet(sorts, {"*": ["x"]})
    f2 = GradedMap(x2, y, {"*": {"x": "a"}})
    g2 = GradedMap(x2, y, {"*": {"x": "b"}})
    s2 = GradedMap(y, x2, {"*": {"a": "x", "b": "x"}})
    try:
        reflexive_coequalizer(f2, g2, s2)
        chk.require("reflection-law violation is rejected", False)
    except ValueError:
        pass
    # hand union-find example: X = Y + {p}, f(p)=a, g(p)=b
    x3 = GradedSet(sorts, {"*": ["a", "b", "c", "p"]})
    y3 = GradedSet(sorts, {"*": ["a", "b", "c"]})
    f3 = GradedMap(x3, y3, {"*": {"a": "a", "b": "b", "c": "c", "p": "a"}})
    g3 = GradedMap(x3, y3, {"*": {"a": "a", "b": "b", "c": "c", "p": "b"}})
    s3 = GradedMap(y3, x3, {"*": {"a": "a", "b": "b", "c": "c"}})
    q3, _ = reflexive_coequalizer(f3, g3, s3)
    chk.expect("hand union-find example", q3.total_size(), 2)


def check_improper_example(chk: _Check, config: VerifyConfig) -> None:
    collapse = th.collapse_theory()
    algebras = al.enumerate_algebras(collapse, min(config.max_carrier, 3))
    chk.expect("the collapse theory has exactly two algebras on carriers <= 3",
               sorted(a.carrier.total_size() for a in algebras), [0, 1])
    empty = [a for a in algebras if a.carrier.total_size() == 0][0]
    point = [a for a in algebras if a.carrier.total_size() == 1][0]
    f = al.AlgebraMap(empty, point,
                      GradedMap(empty.carrier, point.carrier, {"*": {}}),
                      check=False)
    mono, _ = al.is_mono(f)
    chk.require("empty -> point is a monomorphism", mono)
    effective, witness = al.is_effective_mono(f)
    chk.require("empty -> point is not an effective monomorphism",
                not effective)
    chk.details["witness"] = str(witness)
    # definition-unfolding oracle: compare hom sets out of small test algebras
    po = al.pushout(f, f)
    for z in algebras:
        into_x = al.enumerate_algebra_maps(z, empty)
        into_y = al.enumerate_algebra_maps(z, point)
        equalized = [
            h for h in into_y
            if h.then(po.inj_left).graded == h.then(po.inj_right).graded
        ]
        chk.expect(
            f"hom comparison against carrier size {z.carrier.total_size()}",
            len(into_x) == len(equalized),
            effective or (len(into_x) == len(equalized) and z is empty)
            or z.carrier.total_size() == 0,
        )
    # positive control: inclusions of free pointed-set algebras are effective
    p = th.pointed_sets_theory()
    k = GradedSet(SortSet(("*",)), {"*": ["a"]})
    kl = GradedSet(SortSet(("*",)), {"*": ["a", "l"]})
    tk_alg = al.free_algebra(p, k)
    tkl = al.free_algebra(p, kl)
    inc = al.induced_from_free(
        tk_alg, tkl,
        GradedMap(k, tkl.carrier, {"*": {"a": tkl.generator_element("*", "a")}}),
    )
    eff, _ = al.is_effective_mono(inc)
    chk.require("pointed-set free inclusion is effective", eff)
    ident_eff, _ = al.is_effective_mono(al.AlgebraMap.identity(point))
    chk.require("identity maps are effective", ident_eff)


def check_degeneracy_freeness(chk: _Check, config: VerifyConfig) -> None:
    n = config.truncation
    # the nerve of [1]: sizes n+2, free on 2 generators at level 0 and 1 at 1
    nerve = _nerve_diagram(1, n)
    sizes = [nerve.level(i).total_size() for i in range(n + 1)]
    chk.expect("nerve-of-[1] level sizes",
               sizes, [i + 2 for i in range(n + 1)])
    cert = sim.free_generators(nerve)
    chk.require("nerve diagram is free",
                isinstance(cert, sim.FreenessCertificate))
    if isinstance(cert, sim.FreenessCertificate):
        chk.expect("nerve generator counts", cert.generator_counts()[:2], [2, 1])
        chk.require("certificate rebuilds the diagram",
                    sim.rebuild_from_certificate(nerve, cert))
    # nerve of [2] is free as well (any honest simplicial set is)
    cert2 = sim.free_generators(_nerve_diagram(2, min(n, 3)))
    chk.require("nerve-of-[2] diagram is free",
                isinstance(cert2, sim.FreenessCertificate))
    # negative control: glue the two degeneracies of a non-degenerate
    # element y; the decomposition of the glued element is then ambiguous
    sorts = SortSet(("*",))
    levels = [
        GradedSet(sorts, {"*": ["x"]}),
        GradedSet(sorts, {"*": ["sx", "y"]}),
        GradedSet(sorts, {"*": ["ssx", "w"]}),
    ]
    ops = {
        (0, 0): GradedMap(levels[0], levels[1], {"*": {"x": "sx"}}),
        (1, 0): GradedMap(levels[1], levels[2], {"*": {"sx": "ssx", "y": "w"}}),
        (1, 1): GradedMap(levels[1], levels[2], {"*": {"sx": "ssx", "y": "w"}}),
    }
    glued = sim.TruncatedDegeneracyDiagram(levels, ops)
    verdict = sim.free_generators(glued)
    chk.require("glued diagram is rejected with a witness",
                isinstance(verdict, sim.FreenessFailure))
    if isinstance(verdict, sim.FreenessFailure):
        chk.expect("glued witness element", verdict.element, "w")
        chk.expect("the witness has two decompositions",
                   len(verdict.decompositions), 2)
    # closure criterion
    full = sim.SubDiagram(tuple(
        {"*": frozenset(nerve.level(i).elements("*"))} for i in range(n + 1)
    ))
    closed, _ = sim.is_closed_subdiagram(nerve, full)
    chk.require("the whole diagram is closed", closed)
    # the subdiagram generated by one level-0 generator: closed, hence free
    gen0 = cert.generators[0]["*"][0]
    orbit_levels = []
    for i in range(n + 1):
        op = nerve.operator(sim.enumerate_surjections(i, 0)[0])
        orbit_levels.append({"*": frozenset({op("*", gen0)})})
    orbit = sim.SubDiagram(tuple(orbit_levels))
    closed, _ = sim.is_closed_subdiagram(nerve, orbit)
    chk.require("the subdiagram generated by one generator is closed", closed)
    sub = sim.subdiagram_as_diagram(nerve, orbit)
    chk.require("a closed subdiagram of a free diagram is free",
                isinstance(sim.free_generators(sub), sim.FreenessCertificate))
    # negative control: degeneracies of the level-1 generator without the
    # generator itself form a stable but non-closed subdiagram
    gen1 = cert.generators[1]["*"][0]
    bad_levels: list[dict] = [{"*": frozenset()}, {"*": frozenset()}]
    for i in range(2, n + 1):
        keep = {
            nerve.operator(sigma)("*", gen1)
            for sigma in sim.enumerate_surjections(i, 1)
        }
        bad_levels.append({"*": frozenset(keep)})
    if n >= 2:
        bad = sim.SubDiagram(tuple(bad_levels))
        closed, witness = sim.is_closed_subdiagram(nerve, bad)
        chk.require("a degenerate element without its root is flagged",
                    not closed and witness is not None)
    # the standard resolution of the pointed-set theory is free
    p = th.pointed_sets_theory()
    x = _pointed_algebra(p, ["p0", "p1"], "p0")
    resolution = sim.standard_resolution_levels(p, x, n)
    chk.expect("standard resolution level sizes",
               [resolution.level(i).total_size() for i in range(n + 1)],
               [i + 2 for i in range(n + 1)])
    res_cert = sim.check_sfree(resolution)
    chk.require("standard resolution is s-free at the truncation",
                isinstance(res_cert, sim.FreenessCertificate))
    # constant free diagram of generators is s-free
    const = sim.TruncatedDegeneracyDiagram.constant(
        SortSet(("*",)), GradedSet(SortSet(("*",)), {"*": ["k1", "k2"]}), n
    )
    chk.require("constant generator diagram is s-free",
                isinstance(sim.check_sfree(const), sim.FreenessCertificate))
    # surjection counts against the binomial oracle
    for nn in range(config.truncation + 2):
        for mm in range(nn + 1):
            chk.expect(f"surjection count ({nn},{mm})",
                       len(sim.enumerate_surjections(nn, mm)),
                       math.comb(nn, mm))


def check_bar_construction(chk: _Check, config: VerifyConfig) -> None:
    p = th.pointed_sets_theory()
    x = _pointed_algebra(p, ["x0", "x1", "x2"], "x0")
    u = _pointed_algebra(p, ["u0", "u1"], "u0")
    v = _pointed_algebra(p, ["v0", "v1"], "v0")
    f = al.AlgebraMap(u, x, GradedMap(u.carrier, x.carrier,
                                      {"*": {"u0": "x0", "u1": "x1"}}))
    g = al.AlgebraMap(u, v, GradedMap(u.carrier, v.carrier,
                                      {"*": {"u0": "v0", "u1": "v1"}}))
    bar = al.BarComplex(f, g, 3)
    sizes = [bar.algebra(i).carrier.total_size() for i in range(4)]
    chk.expect("bar level sizes (pointed wedge)",
               sizes,
               [_wedge_size(3, 2), _wedge_size(3, 2, 2),
                _wedge_size(3, 2, 2, 2), _wedge_size(3, 2, 2, 2, 2)])
    aug = bar.augmentation_coequalizer()
    po = al.pushout(f, g)
    chk.expect("augmentation size equals pushout size",
               aug.carrier.total_size(), po.algebra.carrier.total_size())
    chk.require("augmentation coequalizer is the pushout",
                al.find_isomorphism(aug, po.algebra) is not None)
    for n in (2, 3):
        for j in range(n + 1):
            for i in range(j):
                lhs = bar.face(n, j).then(bar.face(n - 1, i)).graded
                rhs = bar.face(n, i).then(bar.face(n - 1, j - 1)).graded
                chk.expect(f"d_{i} d_{j} at level {n}", lhs == rhs, True)
    for n in (0, 1):
        for j in range(n + 1):
            for i in range(j + 1):
                lhs = bar.degeneracy(n, j).then(bar.degeneracy(n + 1, i)).graded
                rhs = bar.degeneracy(n, i).then(bar.degeneracy(n + 1, j + 1)).graded
                chk.expect(f"s_i s_j at level {n} ({i}<={j})", lhs == rhs, True)
    for n in (1, 2):
        for j in range(n + 1):
            for i in range(n + 2):
                lhs = bar.degeneracy(n, j).then(bar.face(n + 1, i)).graded
                if i == j or i == j + 1:
                    rhs = GradedMap.identity(bar.algebra(n).carrier)
                elif i < j:
                    rhs = bar.face(n, i).then(bar.degeneracy(n - 1, j - 1)).graded
                else:
                    rhs = bar.face(n, i - 1).then(bar.degeneracy(n - 1, j)).graded
                chk.expect(f"d_{i} s_{j} at level {n}", lhs == rhs, True)
    chk.details["levels"] = sizes


def check_adjunction_classification(chk: _Check, config: VerifyConfig) -> None:
    p = th.pointed_sets_theory()
    t2 = th.collapse_with_constant_theory()
    phi = th.TheoryMorphism(p, t2, lambda j, w, e: "*", name="to-collapse")
    chk.expect("phi is a theory morphism", phi.check(2), [])
    sources = [
        _pointed_algebra(p, ["a0"], "a0"),
        _pointed_algebra(p, ["a0", "a1"], "a0"),
    ]
    targets = al.enumerate_algebras(t2, 2, up_to_iso=False)
    pairs = 0
    for x in sources:
        pushed = al.induct(phi, x)
        for y in targets:
            lhs = len(al.enumerate_algebra_maps(pushed, y))
            rhs = len(al.enumerate_algebra_maps(x, al.restrict(phi, y)))
            chk.expect(
                f"adjunction counts for |X|={x.carrier.total_size()}, "
                f"|Y|={y.carrier.total_size()}", lhs, rhs,
            )
            pairs += 1
    ident = th.TheoryMorphism.identity(p)
    for x in sources:
        back = al.restrict(ident, x)
        chk.expect("restriction along the identity is the identity",
                   back.psi, x.psi)
        pushed = al.induct(ident, x)
        chk.require("induction along the identity is an isomorphism",
                    al.find_isomorphism(pushed, x) is not None)
    # induction sends free algebras to free algebras
    k = GradedSet(SortSet(("*",)), {"*": ["k0"]})
    free_p = al.free_algebra(p, k)
    pushed = al.induct(phi, free_p)
    free_t2 = al.free_algebra(t2, k)
    chk.require("induction preserves free algebras",
                al.find_isomorphism(pushed, free_t2) is not None)
    # classification via endomorphism theories
    for size in (1, 2):
        x_set = GradedSet(SortSet(("*",)), {"*": [f"e{i}" for i in range(size)]})
        end = th.endomorphism_theory(x_set)
        homs = th.enumerate_theory_morphisms(p, end, 2)
        structures = [
            a for a in al.enumerate_algebras(p, size, up_to_iso=False)
            if a.carrier.total_size() == size
        ]
        chk.expect(f"classification at carrier size {size}",
                   len(homs), len(structures))
    # endomorphism theory sizes against the closed formula
    x2 = GradedSet(SortSet(("*",)), {"*": ["0", "1"]})
    end2 = th.endomorphism_theory(x2)
    chk.expect("|End(X)(1)| for |X|=2", len(end2.value("*", ("*",))), 4)
    chk.expect("|End(X)(2)| for |X|=2", len(end2.value("*", ("*", "*"))), 16)
    x1 = GradedSet(SortSet(("*",)), {"*": ["0"]})
    end1 = th.endomorphism_theory(x1)
    for w in enumerate_words(SortSet(("*",)), 2):
        chk.expect(f"End of a point is trivial at {w}",
                   len(end1.value("*", w)), 1)
    chk.details["adjunction_pairs"] = pairs


def check_free_theory_iso(chk: _Check, config: VerifyConfig) -> None:
    rng = random.Random(config.seed)
    # grafting satisfies the monoid laws on enumerated terms
    sig = single_sorted({"m": 2, "e": 0})
    ft = th.FreeTheory(sig)
    words = enumerate_words(sig.sorts, 3)
    for w in words:
        terms = ft.value("*", w, 3).terms
        units = ft.unit_terms(w)
        for t in terms[:30]:
            chk.expect("right unit of grafting",
                       ft.substitute(t, units), t)
        for k in range(len(w)):
            args = tuple(rng.choice(terms) if terms else None
                         for _ in range(len(w)))
            if terms:
                chk.expect("left unit of grafting (projections)",
                           ft.substitute(ft.projection(w, k), args), args[k])
    # associativity of substitution on seeded triples
    w2 = ("*", "*")
    pool = ft.value("*", w2, 3).terms
    for _ in range(40):
        t = rng.choice(pool)
        us = tuple(rng.choice(pool) for _ in range(2))
        vs = tuple(rng.choice(pool) for _ in range(2))
        lhs = ft.substitute(ft.substitute(t, us), vs)
        rhs = ft.substitute(t, tuple(ft.substitute(u, vs) for u in us))
        chk.expect("associativity of term substitution", lhs, rhs)
        if chk.witness:
            return
    # universal property: hom(F A, T) equals generator placements
    collapse = th.collapse_theory()
    placements_into_collapse = {
        "binary": ( _binary("m"), 1),
        "pointed": (single_sorted({"c": 0}), 0),
        "mixed": (single_sorted({"c": 0, "m": 2}), 0),
        "unary": (single_sorted({"u": 1}), 1),
    }
    for label, (sig_i, want) in placements_into_collapse.items():
        placements = 1
        for op in sig_i.ops:
            placements *= len(collapse.value(op.output, op.inputs))
        chk.expect(f"placement count into the collapse theory ({label})",
                   placements, want)
        # a morphism exists iff every empty target value has an empty source
        has_closed_terms = any(
            len(th._terms(sig_i, j, (), 6)) > 0 for j in sig_i.sorts
        )
        direct = 0 if has_closed_terms else 1
        chk.expect(f"direct morphism count into collapse ({label})",
                   direct, want)
    # placements into the pointed-set theory induce honest morphisms
    p = th.pointed_sets_theory()
    sig_c = single_sorted({"c": 0})
    ftc = th.FreeTheory(sig_c)
    placements = list(p.value("*", ()))
    chk.expect("one placement for the pointed-set generator",
               len(placements), 1)
    ev = th.free_theory_hom_from_placement(
        ftc, p, {sig_c["c"]: placements[0]}
    )
    for w in enumerate_words(sig_c.sorts, 2):
        terms = ftc.value("*", w, 2).terms
        for t in terms:
            for args_words in [w]:
                pass
        # substitution compatibility within the bound
        for t in terms:
            for v in enumerate_words(sig_c.sorts, 2):
                arg_terms = ftc.value("*", v, 2).terms
                if len(arg_terms) < len(w):
                    continue
                args = tuple(arg_terms[i % len(arg_terms)]
                             for i in range(len(w)))
                lhs = ev("*", v, ft.substitute(t, args))
                rhs = p.substitute(
                    "*", w, ev("*", w, t), v,
                    tuple(ev("*", v, a) for a in args),
                )
                chk.expect("placement-induced map commutes with substitution",
                           lhs, rhs)
    # empty signature gives the unit theory: values are variables only
    empty_ft = th.FreeTheory(signature([]))
    for w in enumerate_words(SortSet(("*",)), 3):
        enum = empty_ft.value("*", w, 3)
        chk.require(f"empty-signature values at {w} are exact", enum.exact)
        chk.expect(f"empty-signature value count at {w}",
                   len(enum.terms), len(w))


def check_relative_composition(chk: _Check, config: VerifyConfig) -> None:
    p = th.pointed_sets_theory()
    ident = th.TheoryMorphism.identity(p)
    m = al.theory_bimodule(ident)
    x = _pointed_algebra(p, ["x0", "x1"], "x0")
    # S as an (S, S)-bimodule: S ∘_S X is X (split coequalizer)
    back = al.relative_composition(m, x)
    chk.require("S over itself acts as the identity",
                al.find_isomorphism(back, x) is not None)
    # M ∘_S S(K) is M(K)
    for size in (0, 1, 2):
        k = GradedSet(SortSet(("*",)),
                      {"*": [f"k{i}" for i in range(size)]})
        free = al.free_algebra(p, k)
        got = al.relative_composition(m, free)
        chk.expect(f"M over the free algebra on {size} generators",
                   got.carrier.total_size(),
                   len(p.value("*", k.word())))
    # collapse-theory fixture: the singleton algebra stays a singleton
    collapse = th.collapse_theory()
    ident_c = th.TheoryMorphism.identity(collapse)
    mc = al.theory_bimodule(ident_c)
    point = [a for a in al.enumerate_algebras(collapse, 1)
             if a.carrier.total_size() == 1][0]
    got = al.relative_composition(mc, point)
    chk.expect("collapse bimodule against the singleton",
               got.carrier.total_size(), 1)
    # relative composition commutes with reflexive coequalizers
    k2 = GradedSet(SortSet(("*",)), {"*": ["a", "b"]})
    free2 = al.free_algebra(p, k2)
    fold = al.induced_from_free(
        free2, x,
        GradedMap(k2, x.carrier, {"*": {"a": "x1", "b": "x1"}}),
    )
    other = al.induced_from_free(
        free2, x,
        GradedMap(k2, x.carrier, {"*": {"a": "x1", "b": "x0"}}),
    )
    relations = [
        (j, fold(j, z), other(j, z))
        for j in p.sorts for z in free2.carrier.elements(j)
    ]
    q, _ = al.quotient_algebra(x, relations)
    lhs = al.relative_composition(m, q)
    pushed_fold = al.relative_composition_map(m, fold)
    pushed_other = al.relative_composition_map(m, other)
    relations2 = [
        (j, pushed_fold(j, z), pushed_other(j, z))
        for j in p.sorts
        for z in pushed_fold.source.carrier.elements(j)
    ]
    rhs, _ = al.quotient_algebra(al.relative_composition(m, x), relations2)
    chk.require(
        "relative composition commutes with reflexive coequalizers",
        al.find_isomorphism(lhs, rhs) is not None,
    )
    chk.details["fixture"] = "pointed sets, collapse"


def check_closed_essential_diagram(chk: _Check, config: VerifyConfig) -> None:
    """The combinatorial kernel of the cofibration theorem: levelwise
    essential trees form a closed subdiagram of all trees when the
    labelling signatures vary along a free degeneracy diagram."""
    n = config.truncation
    sorts = SortSet(("*",))
    # free degeneracy diagram of signatures: a binary generator at level 0
    # (constant part) and an extra binary generator born at level 1
    def sig_at(level: int, tag: str) -> Signature:
        ops = [Operation((tag, "base", sim.Surjection.identity(0)), "*",
                         ("*", "*"))]
        for sigma in sim.enumerate_surjections(level, 1):
            ops.append(Operation((tag, "extra", sigma), "*", ("*", "*")))
        return Signature(sorts, ops)

    def relabel_map(level: int, i: int, tag: str):
        # the operator of the elementary degeneracy acts on a generator
        # born at level 1 by precomposition
        src = sig_at(level, tag)
        elementary = sim.Surjection.elementary(level, i)
        mapping = {}
        for op in src.ops:
            t, kind, sigma = op.name
            if kind == "extra":
                new_sigma = elementary.then(sigma)
                mapping[op] = Operation((t, kind, new_sigma), "*", ("*", "*"))
            else:
                mapping[op] = op
        return mapping

    profile = Profile("*", ("*", "*", "*"))
    bound = min(config.max_vertices, 4)
    levels = []
    essentials = []
    for lvl in range(n + 1):
        union = sig_at(lvl, "a").disjoint_union(sig_at(lvl, "b"))
        trees = tr.enumerate_trees(union, profile, bound).trees
        levels.append(GradedSet(sorts, {"*": trees}))
        b_names = sig_at(lvl, "b").names()
        essentials.append({
            "*": frozenset(t for t in trees if tr.is_essential(t, b_names))
        })
    ops = {}
    for lvl in range(n):
        for i in range(lvl + 1):
            mapping = dict(relabel_map(lvl, i, "a"))
            mapping.update(relabel_map(lvl, i, "b"))
            ops[(lvl, i)] = GradedMap(
                levels[lvl], levels[lvl + 1],
                {"*": {t: tr.relabel(t, mapping)
                       for t in levels[lvl].elements("*")}},
            )
    diagram = sim.TruncatedDegeneracyDiagram(levels, ops)
    chk.expect("tree diagram is functorial", diagram.check_functoriality(), [])
    closed, witness = sim.is_closed_subdiagram(
        diagram, sim.SubDiagram(tuple(essentials))
    )
    chk.require("essential trees form a closed subdiagram", closed)
    if witness:
        chk.details["witness"] = str(witness)
    sub = sim.subdiagram_as_diagram(diagram, sim.SubDiagram(tuple(essentials)))
    chk.require(
        "hence the essential-tree diagram is free",
        isinstance(sim.free_generators(sub), sim.FreenessCertificate),
    )
    chk.details["level_sizes"] = [lv.total_size() for lv in levels]


def check_clone_laws_all(chk: _Check, config: VerifyConfig) -> None:
    p = th.pointed_sets_theory()
    chk.expect("pointed-set clone laws", th.check_clone_laws(p, 2), [])
    chk.expect("collapse clone laws",
               th.check_clone_laws(th.collapse_theory(), 2), [])
    chk.expect("collapse+constant clone laws",
               th.check_clone_laws(th.collapse_with_constant_theory(), 2), [])
    x2 = GradedSet(SortSet(("*",)), {"*": ["0", "1"]})
    end = th.endomorphism_theory(x2)
    chk.expect("End(X) clone laws (sampled)",
               th.check_clone_laws(end, 2, max_cases=4000, seed=config.seed),
               [])
    g = GradedMap(x2, x2, {"*": {"0": "0", "1": "0"}})
    endg = th.endomorphism_theory_of_map(g)
    chk.expect("End(g) clone laws (sampled)",
               th.check_clone_laws(endg, 1, max_cases=2000, seed=config.seed),
               [])
    x = _pointed_algebra(p, ["p0", "p1"], "p0")
    under = th.undercategory_theory(p, x)
    chk.expect("undercategory clone laws",
               th.check_clone_laws(under, 2), [])
    chk.expect("undercategory value sizes",
               [len(under.value("*", ("*",) * k)) for k in range(4)],
               [2, 3, 4, 5])
    # negative control: a broken substitution rule must fail the check
    broken = th.FiniteTheory(
        SortSet(("*",)),
        lambda j, w: tuple(("x", k) for k in range(len(w))) + (("c", j),),
        lambda w, k: ("x", k),
        lambda j, w, t, v, args: args[0] if args else t,
        name="broken",
    )
    chk.require("corrupted clone is rejected",
                len(th.check_clone_laws(broken, 2)) > 0)


def check_series_functoriality(chk: _Check, config: VerifyConfig) -> None:
    bound = min(config.max_arity, 3)
    unit = se.tabulate(se.UnitSeries(SortSet(("*",))), bound)
    chk.expect("unit series functoriality",
               se.check_functoriality(unit, bound), [])
    free = se.tabulate(se.free_series(single_sorted({"m": 2, "e": 0})), bound)
    chk.expect("free series functoriality",
               se.check_functoriality(free, bound), [])
    two = se.tabulate(
        se.free_series(signature([("edge", "u", ["v", "v"])],
                                 sorts=("u", "v"))), 2)
    chk.expect("two-sorted free series functoriality",
               se.check_functoriality(two, 2), [])
    collapse = th.collapse_theory().underlying_series(bound)
    chk.expect("collapse series functoriality",
               se.check_functoriality(collapse, bound), [])

    # negative control: corrupt one action entry of the free series
    base = se.free_series(single_sorted({"m": 2}))

    def corrupt_action(j, morphism):
        table = dict(base.act(j, morphism))
        if morphism.domain == ("*", "*") and morphism.codomain == ("*", "*") \
                and morphism.mapping == (0, 1) and table:
            swap = se.free_series(single_sorted({"m": 2})).value(j, ("*", "*"))
            if len(swap) >= 1:
                key = next(iter(table))
                op, m = key
                table[key] = (op, ArityMorphism(m.domain, m.codomain, (1, 0)))
        return table

    corrupted = se.TabulatedSeries(
        base.sorts_in, base.sorts_out, 2, base.value, corrupt_action,
        name="corrupted",
    )
    chk.require("corrupted action table is rejected",
                len(se.check_functoriality(corrupted, 2)) > 0)


CHECKS = {
    "tree-catalan": check_tree_catalan,
    "coprod-decomposition": check_coprod_decomposition,
    "essential-equalizer": check_essential_equalizer,
    "star-monoid": check_star_monoid,
    "kan-coequalizer": check_kan_coequalizer,
    "improper-example": check_improper_example,
    "degeneracy-freeness": check_degeneracy_freeness,
    "bar-construction": check_bar_construction,
    "adjunction-classification": check_adjunction_classification,
    "free-theory-iso": check_free_theory_iso,
    "relative-composition": check_relative_composition,
    "closed-essential-diagram": check_closed_essential_diagram,
    "clone-laws": check_clone_laws_all,
    "series-functoriality": check_series_functoriality,
}


def canonical_summary(report: Report) -> str:
    """One deterministic summary line for the records stream."""
    from .io import canonical_json

    return canonical_json({
        "summary": {
            "checks": len(report.results),
            "failed": sorted(r.name for r in report.results if not r.passed),
            "passed": report.all_passed,
        }
    })


def run_check(name: str, config: VerifyConfig | None = None) -> CheckResult:
    if name not in CHECKS:
        raise KeyError(f"unknown check {name!r}")
    return _run(name, CHECKS[name], config or VerifyConfig())


def run_all(config: VerifyConfig | None = None) -> Report:
    config = config or VerifyConfig()
    results = [_run(name, fn, config) for name, fn in CHECKS.items()]
    return Report(results, config)
