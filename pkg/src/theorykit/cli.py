"""Command-line surface: tree enumeration, series algebra, algebra
computations, and the verification harness.

Exit codes: 0 success, 1 a verification check failed, 2 usage or
input-file errors.  All output is deterministic for fixed inputs and
seed; timing information goes to stderr only, so reruns are
byte-identical on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import algebra as al
from . import io as tkio
from . import series as se
from . import theory as th
from . import trees as tr
from . import verify
from .errors import TheorykitError
from .graded import GradedMap, GradedSet, Profile, SortSet
from .signature import Signature


class UsageError(Exception):
    pass


def _load_signature(path: str) -> Signature:
    try:
        return Signature.from_data(tkio.load_file(path))
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot read signature {path}: {exc}") from exc


def _load_theory(path: str):
    try:
        return tkio.theory_from_data(tkio.load_file(path))
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot read theory {path}: {exc}") from exc


def _load_algebra(path: str, theory) -> al.Algebra:
    try:
        return tkio.algebra_from_data(tkio.load_file(path), theory)
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot read algebra {path}: {exc}") from exc


def _parse_profile(text: str, sorts: SortSet) -> Profile:
    """Profiles are written output:in1,in2 (or just 'output:' for nullary)."""
    output, _, rest = text.partition(":")
    word = tuple(s for s in rest.split(",") if s)
    if output not in sorts:
        raise UsageError(f"unknown output sort {output!r}")
    try:
        sorts.check_word(word)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return Profile(output, word)


def _emit(records, fmt: str, human_lines) -> None:
    if fmt == "records":
        for rec in records:
            print(tkio.canonical_json(rec))
    else:
        for line in human_lines:
            print(line)


# ---------------------------------------------------------------------------
# subcommands


def cmd_trees(args) -> int:
    sig = _load_signature(args.signature)
    if args.action == "count":
        leaves_range = _parse_range(args.leaves)
        sort = args.sort or sig.sorts.sorts[0]
        records = []
        human = [f"{'leaves':>8} {'trees':>8} exact"]
        for leaves in leaves_range:
            profile = Profile(sort, (sort,) * leaves)
            enum = tr.enumerate_trees(sig, profile, args.max_vertices)
            records.append({
                "leaves": leaves,
                "count": len(enum.trees),
                "exact": enum.exact,
            })
            human.append(f"{leaves:>8} {len(enum.trees):>8} {enum.exact}")
        _emit(records, args.format, human)
        return 0
    profile = _parse_profile(args.profile, sig.sorts)
    enum = tr.enumerate_trees(sig, profile, args.max_vertices)
    if args.format == "graph":
        for t in enum.trees:
            sys.stdout.write(tr.tree_to_text(t))
            print("--")
        print(f"# {len(enum.trees)} trees, exact={enum.exact}")
        return 0
    records = [tr.tree_to_data(t) for t in enum.trees]
    human = [str(tr.tree_to_data(t)) for t in enum.trees]
    human.append(f"{len(enum.trees)} trees, exact={enum.exact}")
    _emit(records, args.format, human)
    return 0


def _parse_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def cmd_series(args) -> int:
    if args.action == "star":
        a = _load_signature(args.left)
        b = _load_signature(args.right)
        prod = se.star_product(a, b)
        records = []
        human = [f"{'profile':>16} count"]
        for profile in prod.support():
            ops = prod.at_profile(profile)
            records.append({"profile": str(profile), "count": len(ops)})
            human.append(f"{str(profile):>16} {len(ops)}")
        _emit(records, args.format, human)
        return 0
    if args.action == "compose":
        a = _load_signature(args.left)
        b = _load_signature(args.right)
        comp = se.compose(se.free_series(a), se.free_series(b), args.max_arity)
        records = []
        human = [f"{'profile':>16} count"]
        from .graded import enumerate_words

        for j in comp.sorts_out:
            for w in enumerate_words(comp.sorts_in, args.max_arity):
                n = len(comp.value(j, w))
                if n:
                    records.append({"profile": str(Profile(j, w)), "count": n})
                    human.append(f"{str(Profile(j, w)):>16} {n}")
        _emit(records, args.format, human)
        return 0
    # evaluate
    sig = _load_signature(args.left)
    try:
        x = GradedSet.from_data(tkio.load_file(args.right))
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot read graded set {args.right}: {exc}") from exc
    result = se.evaluate(se.free_series(sig), x)
    records = [{
        "sort": s,
        "size": len(result.elements(s)),
    } for s in result.sorts]
    human = [f"{s}: {len(result.elements(s))} elements" for s in result.sorts]
    _emit(records, args.format, human)
    return 0


def cmd_algebra(args) -> int:
    theory = _load_theory(args.theory)
    if isinstance(theory, th.FreeTheory):
        theory = al.as_finite_theory(theory, args.max_vertices)
    if args.action == "enumerate":
        algebras = al.enumerate_algebras(theory, args.max_carrier)
        records = [{
            "sizes": {s: len(a.carrier.elements(s)) for s in theory.sorts},
        } for a in algebras]
        human = [f"algebra with sizes {r['sizes']}" for r in records]
        human.append(f"{len(algebras)} algebras up to isomorphism")
        _emit(records, args.format, human)
        return 0
    algebras = [_load_algebra(p, theory) for p in args.algebras]
    if args.action == "coproduct":
        if len(algebras) < 2:
            raise UsageError("coproduct needs at least two algebra files")
        cop = al.coproduct_many(algebras)
        rec = {"sizes": {s: len(cop.algebra.carrier.elements(s))
                         for s in theory.sorts}}
        _emit([rec], args.format, [f"coproduct carrier sizes: {rec['sizes']}"])
        return 0
    if args.action == "pushout":
        if len(algebras) != 3:
            raise UsageError("pushout needs algebra files U X V (maps by element name)")
        u, x, v = algebras
        f = _map_by_names(u, x)
        g = _map_by_names(u, v)
        po = al.pushout(f, g)
        rec = {"sizes": {s: len(po.algebra.carrier.elements(s))
                         for s in theory.sorts}}
        _emit([rec], args.format, [f"pushout carrier sizes: {rec['sizes']}"])
        return 0
    if args.action == "effective-mono":
        if len(algebras) != 2:
            raise UsageError("effective-mono needs algebra files X Y")
        x, y = algebras
        f = _map_by_names(x, y)
        mono, mono_witness = al.is_mono(f)
        effective, witness = al.is_effective_mono(f)
        rec = {
            "mono": mono,
            "effective": effective,
            "witness": str(witness) if witness else None,
        }
        human = [
            f"monomorphism: {mono}",
            f"effective monomorphism: {effective}",
        ]
        if witness:
            human.append(f"witness: {witness}")
        _emit([rec], args.format, human)
        return 0
    if args.action == "bar":
        if len(algebras) != 3:
            raise UsageError("bar needs algebra files X U V")
        x, u, v = algebras
        f = _map_by_names(u, x)
        g = _map_by_names(u, v)
        bar = al.BarComplex(f, g, args.level)
        records = [{
            "level": n,
            "sizes": {s: len(bar.algebra(n).carrier.elements(s))
                      for s in theory.sorts},
        } for n in range(args.level + 1)]
        human = [f"B_{r['level']}: {r['sizes']}" for r in records]
        _emit(records, args.format, human)
        return 0
    raise UsageError(f"unknown algebra action {args.action!r}")


def _map_by_names(src: al.Algebra, dst: al.Algebra) -> al.AlgebraMap:
    """The algebra map sending each element to the same-named element."""
    try:
        gm = GradedMap(src.carrier, dst.carrier, {
            s: {x: x for x in src.carrier.elements(s)}
            for s in src.theory.sorts
        })
    except ValueError as exc:
        raise UsageError(
            f"carriers are not name-compatible for the induced map: {exc}"
        ) from exc
    m = al.AlgebraMap(src, dst, gm, check=False)
    if not m.is_homomorphism():
        raise UsageError("the name-induced map is not a homomorphism")
    return m


def cmd_check(args) -> int:
    config = verify.VerifyConfig(
        seed=args.seed,
        max_arity=args.max_arity,
        max_vertices=args.max_vertices,
        max_carrier=args.max_carrier,
        truncation=args.truncation,
    )
    if args.name == "all":
        report = verify.run_all(config)
    else:
        if args.name not in verify.CHECKS:
            raise UsageError(
                f"unknown check {args.name!r}; have: "
                + ", ".join(sorted(verify.CHECKS)) + ", all"
            )
        report = verify.Report([verify.run_check(args.name, config)], config)
    if args.format == "records":
        for rec in report.records():
            print(tkio.canonical_json(rec))
        print(verify.canonical_summary(report))
        print(report.human_summary(), file=sys.stderr)
    else:
        print(report.human_summary())
    return 0 if report.all_passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="theorykit",
        description="combinatorics of multi-sorted algebraic theories",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-arity", type=int, default=4)
    common.add_argument("--max-vertices", type=int, default=5)
    common.add_argument("--max-carrier", type=int, default=4)
    common.add_argument("--truncation", type=int, default=3)
    common.add_argument("--format", choices=["human", "records", "graph"],
                        default="human")
    sub = parser.add_subparsers(dest="command", required=True)

    p_trees = sub.add_parser("trees", parents=[common],
                             help="enumerate or count labelled trees")
    p_trees.add_argument("action", choices=["enumerate", "count"])
    p_trees.add_argument("signature", help="signature file")
    p_trees.add_argument("--profile", help="profile, e.g. '*:*,*,*'")
    p_trees.add_argument("--leaves", default="1..4",
                         help="leaf range for count, e.g. 2..6")
    p_trees.add_argument("--sort", help="sort for single-sorted counting")
    p_trees.set_defaults(fn=cmd_trees)

    p_series = sub.add_parser("series", parents=[common], help="star products, composition, evaluation")
    p_series.add_argument("action", choices=["star", "compose", "evaluate"])
    p_series.add_argument("left", help="signature file")
    p_series.add_argument("right", help="signature file (or graded set for evaluate)")
    p_series.set_defaults(fn=cmd_series)

    p_algebra = sub.add_parser("algebra", parents=[common], help="algebra computations")
    p_algebra.add_argument(
        "action",
        choices=["coproduct", "pushout", "enumerate", "effective-mono", "bar"],
    )
    p_algebra.add_argument("theory", help="theory file")
    p_algebra.add_argument("algebras", nargs="*", help="algebra files")
    p_algebra.add_argument("--level", type=int, default=1,
                           help="bar construction level bound")
    p_algebra.set_defaults(fn=cmd_algebra)

    p_check = sub.add_parser("check", parents=[common], help="run verification checks")
    p_check.add_argument("name", help="check name or 'all'")
    p_check.set_defaults(fn=cmd_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if args.command == "trees" and args.action == "enumerate" and not args.profile:
        print("error: trees enumerate requires --profile", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TheorykitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
