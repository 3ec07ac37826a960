"""Operation signatures: finite families of named generators per profile.

A signature is the data of a generator object: for each profile
(output sort, input word) a finite set of operation symbols.  Free
series, labelled trees and free theories are all built on signatures.
Operation names are usually strings, but structured hashable names are
allowed (the star product of two signatures produces those).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable

from .graded import Profile, SortSet, Word


@dataclass(frozen=True)
class Operation:
    """A generator symbol with its profile."""

    name: Hashable
    output: str
    inputs: Word

    @property
    def profile(self) -> Profile:
        return Profile(self.output, self.inputs)

    def __str__(self) -> str:
        return f"{self.name}:{self.output}({','.join(self.inputs)})"


class Signature:
    """A finite set of operations over a fixed sort set, in a fixed order."""

    __slots__ = ("sorts", "ops", "_by_name", "_by_output", "_by_profile",
                 "_hash")

    def __init__(self, sorts: SortSet, ops: Iterable[Operation]):
        self.sorts = sorts
        self.ops = tuple(ops)
        names = [op.name for op in self.ops]
        if len(set(names)) != len(names):
            raise ValueError("duplicate operation names")
        for op in self.ops:
            if op.output not in sorts:
                raise ValueError(f"unknown output sort {op.output!r}")
            sorts.check_word(op.inputs)
        self._by_name = {op.name: op for op in self.ops}
        self._by_output: dict[str, tuple[Operation, ...]] = {
            s: tuple(op for op in self.ops if op.output == s) for s in sorts
        }
        self._by_profile: dict[Profile, list[Operation]] = {}
        for op in self.ops:
            self._by_profile.setdefault(op.profile, []).append(op)
        self._hash = hash((self.sorts, self.ops))

    def __len__(self) -> int:
        return len(self.ops)

    def __getitem__(self, name: Hashable) -> Operation:
        return self._by_name[name]

    def __contains__(self, name: Hashable) -> bool:
        return name in self._by_name

    def with_output(self, sort: str) -> tuple[Operation, ...]:
        return self._by_output[sort]

    def at_profile(self, profile: Profile) -> tuple[Operation, ...]:
        return tuple(self._by_profile.get(profile, ()))

    def support(self) -> tuple[Profile, ...]:
        """Profiles with at least one operation, in operation order."""
        seen: dict[Profile, None] = {}
        for op in self.ops:
            seen.setdefault(op.profile, None)
        return tuple(seen)

    def disjoint_union(self, other: "Signature") -> "Signature":
        if self.sorts != other.sorts:
            raise ValueError("signatures must share a sort set")
        overlap = set(op.name for op in self.ops) & set(op.name for op in other.ops)
        if overlap:
            raise ValueError(f"operation names not disjoint: {sorted(map(str, overlap))}")
        return Signature(self.sorts, self.ops + other.ops)

    def names(self) -> frozenset:
        return frozenset(op.name for op in self.ops)

    def max_arity(self) -> int:
        return max((len(op.inputs) for op in self.ops), default=0)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, Signature)
            and self._hash == other._hash
            and self.sorts == other.sorts
            and self.ops == other.ops
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Signature({', '.join(str(op) for op in self.ops)})"

    def to_data(self) -> dict:
        for op in self.ops:
            if not isinstance(op.name, str):
                raise ValueError(
                    f"only string-named operations serialize (got {op.name!r})"
                )
        return {
            "sorts": list(self.sorts.sorts),
            "ops": [
                {"name": op.name, "output": op.output, "inputs": list(op.inputs)}
                for op in self.ops
            ],
        }

    @staticmethod
    def from_data(data: dict) -> "Signature":
        sorts = SortSet(tuple(data["sorts"]))
        ops = [
            Operation(o["name"], o["output"], tuple(o["inputs"]))
            for o in data["ops"]
        ]
        return Signature(sorts, ops)


def signature(ops: Iterable[tuple[Hashable, str, Iterable[str]]],
              sorts: Iterable[str] = ("*",)) -> Signature:
    """Build a signature from (name, output, inputs) triples."""
    ss = SortSet(tuple(sorts))
    return Signature(ss, [Operation(n, o, tuple(i)) for n, o, i in ops])


def single_sorted(arities: dict[Hashable, int]) -> Signature:
    """Single-sorted signature from a name -> arity mapping."""
    return signature([(n, "*", ("*",) * k) for n, k in arities.items()])
