"""File schemas and canonical JSON for signatures, theories, algebras.

Every structure serializes to plain JSON-able dictionaries.  Canonical
dumping (sorted keys, fixed separators) makes outputs byte-stable, so
a seeded rerun of any command reproduces its output exactly.

Schemas:
  graded set   {"sorts": [...], "elements": {sort: [names]}}
  arity        ["v", "e", "v"]
  signature    {"sorts": [...], "ops": [{"name", "output", "inputs"}]}
  series       {"sorts_in", "sorts_out", "arity_bound", "values", "action"}
  theory       {"kind": "free", "signature": ...}
               {"kind": "builtin", "name": ...}
               {"kind": "finite", "sorts", "arity_bound", "values",
                "projections", "subst"}
  algebra      {"carrier": <graded set>, "psi": {sort: {value: element}}}
  diagram      {"truncation", "levels": [...], "operators": {"n,i": ...}}
"""

from __future__ import annotations

import json
from typing import Any

from .errors import TruncationError
from .graded import ArityMorphism, GradedMap, GradedSet, SortSet, Word
from .series import Series, TabulatedSeries
from .signature import Signature
from .simplicial import TruncatedDegeneracyDiagram
from .theory import (
    FiniteTheory,
    FreeTheory,
    collapse_theory,
    collapse_with_constant_theory,
    pointed_sets_theory,
)
from .graded import enumerate_arity_morphisms, enumerate_words


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def dump_file(path: str, data: Any) -> None:
    with open(path, "w") as fh:
        fh.write(canonical_json(data))
        fh.write("\n")


def load_file(path: str) -> Any:
    with open(path) as fh:
        return json.load(fh)


def _profile_key(output: str, word: Word) -> str:
    return f"{output}|{','.join(word)}"


def _parse_profile_key(key: str) -> tuple[str, Word]:
    output, _, rest = key.partition("|")
    word = tuple(s for s in rest.split(",") if s)
    return output, word


# ---------------------------------------------------------------------------
# tabulated series


def series_to_data(series: Series, arity_bound: int) -> dict:
    """Tabulate a series into a value table plus an action table.

    Elements get positional names per profile, so any hashable element
    representation serializes.
    """
    sorts_in = series.sorts_in
    sorts_out = series.sorts_out
    words = enumerate_words(sorts_in, arity_bound)
    names: dict[tuple[str, Word], dict] = {}
    values: dict[str, list[str]] = {}
    for j in sorts_out:
        for w in words:
            vals = series.value(j, w)
            names[(j, w)] = {v: f"e{i}" for i, v in enumerate(vals)}
            values[_profile_key(j, w)] = [f"e{i}" for i in range(len(vals))]
    action: dict[str, dict[str, str]] = {}
    for j in sorts_out:
        for p in words:
            if not series.value(j, p):
                continue
            for q in words:
                for t in enumerate_arity_morphisms(p, q):
                    table = series.act(j, t)
                    key = f"{j}|{','.join(p)}>{','.join(q)}|{','.join(map(str, t.mapping))}"
                    action[key] = {
                        names[(j, p)][src]: names[(j, q)][dst]
                        for src, dst in table.items()
                    }
    return {
        "sorts_in": list(sorts_in.sorts),
        "sorts_out": list(sorts_out.sorts),
        "arity_bound": arity_bound,
        "values": values,
        "action": action,
    }


def series_from_data(data: dict) -> TabulatedSeries:
    sorts_in = SortSet(tuple(data["sorts_in"]))
    sorts_out = SortSet(tuple(data["sorts_out"]))
    bound = data["arity_bound"]
    values = {
        _parse_profile_key(k): tuple(v) for k, v in data["values"].items()
    }
    action: dict[tuple[str, ArityMorphism], dict] = {}
    for key, table in data["action"].items():
        j, words_part, mapping_part = key.split("|")
        p_str, q_str = words_part.split(">")
        p = tuple(s for s in p_str.split(",") if s)
        q = tuple(s for s in q_str.split(",") if s)
        mapping = tuple(int(x) for x in mapping_part.split(",") if x != "")
        action[(j, ArityMorphism(p, q, mapping))] = dict(table)
    return TabulatedSeries.from_tables(
        sorts_in, sorts_out, bound, values, action, name="from-file"
    )


# ---------------------------------------------------------------------------
# theories


BUILTIN_THEORIES = {
    "pointed-sets": pointed_sets_theory,
    "collapse": collapse_theory,
    "collapse+constant": collapse_with_constant_theory,
}


def theory_to_data(theory, arity_bound: int | None = None) -> dict:
    if isinstance(theory, FreeTheory):
        return {"kind": "free", "signature": theory.signature.to_data()}
    if not isinstance(theory, FiniteTheory):
        raise TypeError(f"cannot serialize {theory!r}")
    bound = arity_bound if arity_bound is not None else theory.law_bound
    words = enumerate_words(theory.sorts, bound)
    names: dict[tuple[str, Word], dict] = {}
    values: dict[str, list[str]] = {}
    for j in theory.sorts:
        for w in words:
            vals = theory.value(j, w)
            names[(j, w)] = {v: f"e{i}" for i, v in enumerate(vals)}
            values[_profile_key(j, w)] = [f"e{i}" for i in range(len(vals))]
    projections = {
        ",".join(w): [
            names[(w[k], w)][theory.projection(w, k)] for k in range(len(w))
        ]
        for w in words
    }
    subst: dict[str, str] = {}
    import itertools as it

    for j in theory.sorts:
        for w in words:
            for v in words:
                pools = [theory.value(s, v) for s in w]
                if any(not p for p in pools):
                    continue
                for t in theory.value(j, w):
                    for args in it.product(*pools):
                        key = "|".join([
                            j, ",".join(w), names[(j, w)][t], ",".join(v),
                            ",".join(names[(w[k], v)][a]
                                     for k, a in enumerate(args)),
                        ])
                        subst[key] = names[(j, v)][
                            theory.substitute(j, w, t, v, args)
                        ]
    return {
        "kind": "finite",
        "name": theory.name,
        "sorts": list(theory.sorts.sorts),
        "arity_bound": bound,
        "values": values,
        "projections": projections,
        "subst": subst,
    }


def theory_from_data(data: dict):
    kind = data.get("kind", "finite")
    if kind == "free":
        return FreeTheory(Signature.from_data(data["signature"]))
    if kind == "builtin":
        name = data["name"]
        if name not in BUILTIN_THEORIES:
            raise ValueError(f"unknown builtin theory {name!r}")
        return BUILTIN_THEORIES[name]()
    if kind != "finite":
        raise ValueError(f"unknown theory kind {kind!r}")
    sorts = SortSet(tuple(data["sorts"]))
    bound = data["arity_bound"]
    values = {
        _parse_profile_key(k): tuple(v) for k, v in data["values"].items()
    }
    projections = {
        tuple(s for s in k.split(",") if s): list(v)
        for k, v in data["projections"].items()
    }
    subst = dict(data["subst"])

    def value_fn(j: str, w: Word):
        if (j, w) not in values:
            raise TruncationError(f"theory table has no profile ({j}, {w})")
        return values[(j, w)]

    def proj_fn(w: Word, k: int):
        return projections[w][k]

    def subst_fn(j, w, t, v, args):
        key = "|".join([j, ",".join(w), t, ",".join(v), ",".join(args)])
        if key not in subst:
            raise TruncationError(f"substitution table has no entry {key!r}")
        return subst[key]

    return FiniteTheory(
        sorts, value_fn, proj_fn, subst_fn,
        name=data.get("name", "from-file"), law_bound=bound,
    )


# ---------------------------------------------------------------------------
# algebras


def algebra_to_data(algebra) -> dict:
    """Carrier plus the tautological structure table.

    Theory values are named positionally at the carrier-word profile,
    consistent with theory_to_data's naming.
    """
    th = algebra.theory
    w = algebra.word
    out: dict = {"carrier": algebra.carrier.to_data(), "psi": {}}
    for j in th.sorts:
        vals = th.value(j, w)
        names = {v: f"e{i}" for i, v in enumerate(vals)}
        out["psi"][j] = {
            names[t]: str(algebra.psi[j][t]) for t in vals
        }
    return out


def algebra_from_data(data: dict, theory: FiniteTheory):
    from .algebra import Algebra

    carrier = GradedSet.from_data(data["carrier"])
    w = carrier.word()
    psi: dict[str, dict] = {}
    for j in theory.sorts:
        vals = theory.value(j, w)
        names = {f"e{i}": v for i, v in enumerate(vals)}
        psi[j] = {
            names[key]: img for key, img in data["psi"].get(j, {}).items()
        }
    return Algebra(theory, carrier, psi, name="from-file")


# ---------------------------------------------------------------------------
# degeneracy diagrams


def diagram_to_data(diagram: TruncatedDegeneracyDiagram) -> dict:
    ops = {}
    for n in range(diagram.truncation):
        for i in range(n + 1):
            from .simplicial import Surjection

            gm = diagram.operator(Surjection.elementary(n, i))
            ops[f"{n},{i}"] = {
                s: {str(x): str(gm(s, x)) for x in diagram.level(n).elements(s)}
                for s in diagram.sorts
            }
    return {
        "truncation": diagram.truncation,
        "levels": [diagram.level(n).to_data()
                   for n in range(diagram.truncation + 1)],
        "operators": ops,
    }


def diagram_from_data(data: dict) -> TruncatedDegeneracyDiagram:
    levels = [GradedSet.from_data(d) for d in data["levels"]]
    ops = {}
    for key, tables in data["operators"].items():
        n, i = (int(x) for x in key.split(","))
        ops[(n, i)] = GradedMap(
            levels[n], levels[n + 1],
            {s: dict(t) for s, t in tables.items()},
        )
    return TruncatedDegeneracyDiagram(levels, ops)
