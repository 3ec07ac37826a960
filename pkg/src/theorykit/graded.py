"""Finite sorted sets and the elementary (co)limit machinery.

Everything downstream works with finite graded sets: families of finite
sets indexed by a fixed list of sort names.  Elements are interned
symbols (any hashable value) with a canonical per-sort order given by
construction order, so that quotients, products and enumerations are
deterministic and reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, NamedTuple

from .errors import TheorykitError

Element = Hashable
Word = tuple[str, ...]


@dataclass(frozen=True)
class SortSet:
    """An ordered finite list of distinct sort names."""

    sorts: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.sorts:
            raise ValueError("a sort set must be non-empty")
        if len(set(self.sorts)) != len(self.sorts):
            raise ValueError(f"duplicate sort names in {self.sorts!r}")

    def __contains__(self, sort: str) -> bool:
        return sort in self.sorts

    def __iter__(self) -> Iterator[str]:
        return iter(self.sorts)

    def __len__(self) -> int:
        return len(self.sorts)

    def check_word(self, word: Iterable[str]) -> Word:
        w = tuple(word)
        for s in w:
            if s not in self.sorts:
                raise ValueError(f"unknown sort {s!r} (have {self.sorts!r})")
        return w


SINGLE = SortSet(("*",))


class Profile(NamedTuple):
    """Output sort together with an input word (the shape of an operation)."""

    output: str
    inputs: Word

    def __str__(self) -> str:
        return f"{self.output}({','.join(self.inputs)})"


class GradedSet:
    """A finite family of element lists, one per sort, in canonical order."""

    __slots__ = ("sorts", "_elems", "_index")

    def __init__(self, sorts: SortSet, elements: dict[str, Iterable[Element]]):
        self.sorts = sorts
        elems: dict[str, tuple[Element, ...]] = {}
        for s in sorts:
            es = tuple(elements.get(s, ()))
            if len(set(es)) != len(es):
                raise ValueError(f"duplicate elements in sort {s!r}")
            elems[s] = es
        for s in elements:
            if s not in sorts:
                raise ValueError(f"unknown sort {s!r}")
        self._elems = elems
        self._index = {
            s: {x: i for i, x in enumerate(es)} for s, es in elems.items()
        }

    def elements(self, sort: str) -> tuple[Element, ...]:
        return self._elems[sort]

    def index(self, sort: str, x: Element) -> int:
        return self._index[sort][x]

    def __contains__(self, pair: tuple[str, Element]) -> bool:
        sort, x = pair
        return x in self._index.get(sort, ())

    def pairs(self) -> Iterator[tuple[str, Element]]:
        """All (sort, element) pairs in canonical order."""
        for s in self.sorts:
            for x in self._elems[s]:
                yield (s, x)

    def total_size(self) -> int:
        return sum(len(es) for es in self._elems.values())

    def word(self) -> Word:
        """The tautological arity: each sort repeated once per element."""
        return tuple(s for s, _ in self.pairs())

    def position_of(self, sort: str, x: Element) -> int:
        """Position of an element in the tautological word."""
        offset = 0
        for s in self.sorts:
            if s == sort:
                return offset + self.index(sort, x)
            offset += len(self._elems[s])
        raise KeyError(sort)

    def element_at(self, position: int) -> tuple[str, Element]:
        for i, pair in enumerate(self.pairs()):
            if i == position:
                return pair
        raise IndexError(position)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GradedSet)
            and self.sorts == other.sorts
            and self._elems == other._elems
        )

    def __hash__(self) -> int:
        return hash((self.sorts, tuple(sorted(self._elems.items(), key=lambda kv: kv[0]))))

    def __repr__(self) -> str:
        parts = ", ".join(f"{s}:{list(es)!r}" for s, es in self._elems.items())
        return f"GradedSet({parts})"

    def to_data(self) -> dict:
        return {
            "sorts": list(self.sorts.sorts),
            "elements": {s: [str(x) for x in self._elems[s]] for s in self.sorts},
        }

    @staticmethod
    def from_data(data: dict) -> "GradedSet":
        sorts = SortSet(tuple(data["sorts"]))
        return GradedSet(sorts, {s: list(xs) for s, xs in data["elements"].items()})


def graded_from_word(sorts: SortSet, word: Word) -> GradedSet:
    """The graded set of positions of a word (the representable object)."""
    elems: dict[str, list[Element]] = {s: [] for s in sorts}
    for k, s in enumerate(word):
        elems[s].append(("pos", k))
    return GradedSet(sorts, elems)


def disjoint_union(*parts: GradedSet, tags: Iterable[str] | None = None) -> GradedSet:
    """Coproduct of graded sets; elements are tagged (tag, x) pairs."""
    if not parts:
        raise ValueError("need at least one part")
    sorts = parts[0].sorts
    if any(p.sorts != sorts for p in parts):
        raise ValueError("mismatched sort sets")
    tag_list = list(tags) if tags is not None else [str(i) for i in range(len(parts))]
    if len(tag_list) != len(parts):
        raise ValueError("one tag per part required")
    elems: dict[str, list[Element]] = {s: [] for s in sorts}
    for tag, p in zip(tag_list, parts):
        for s in sorts:
            elems[s].extend((tag, x) for x in p.elements(s))
    return GradedSet(sorts, elems)


class GradedMap:
    """A total, sort-preserving function between graded sets."""

    __slots__ = ("domain", "codomain", "_maps")

    def __init__(
        self,
        domain: GradedSet,
        codomain: GradedSet,
        maps: dict[str, dict[Element, Element]],
    ):
        self.domain = domain
        self.codomain = codomain
        self._maps = {s: dict(maps.get(s, {})) for s in domain.sorts}
        for s in domain.sorts:
            for x in domain.elements(s):
                if x not in self._maps[s]:
                    raise ValueError(f"map not total: missing {x!r} at sort {s!r}")
                y = self._maps[s][x]
                if (s, y) not in codomain:
                    raise ValueError(f"image {y!r} not in codomain at sort {s!r}")

    def __call__(self, sort: str, x: Element) -> Element:
        return self._maps[sort][x]

    def then(self, other: "GradedMap") -> "GradedMap":
        if self.codomain != other.domain:
            raise ValueError("maps not composable")
        return GradedMap(
            self.domain,
            other.codomain,
            {
                s: {x: other(s, y) for x, y in self._maps[s].items()}
                for s in self.domain.sorts
            },
        )

    def is_identity(self) -> bool:
        return self.domain == self.codomain and all(
            x == y for s in self.domain.sorts for x, y in self._maps[s].items()
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GradedMap)
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self._maps == other._maps
        )

    def __hash__(self) -> int:
        return hash((self.domain, self.codomain,
                     tuple(sorted((s, tuple(sorted(m.items(), key=repr))) for s, m in self._maps.items()))))

    def __repr__(self) -> str:
        return f"GradedMap({self._maps!r})"

    @staticmethod
    def identity(x: GradedSet) -> "GradedMap":
        return GradedMap(x, x, {s: {e: e for e in x.elements(s)} for s in x.sorts})


class ArityMorphism(NamedTuple):
    """A sort-compatible function between the positions of two words."""

    domain: Word
    codomain: Word
    mapping: tuple[int, ...]

    def validate(self) -> "ArityMorphism":
        if len(self.mapping) != len(self.domain):
            raise ValueError("mapping must assign every domain position")
        for k, j in enumerate(self.mapping):
            if not 0 <= j < len(self.codomain):
                raise ValueError(f"position {j} out of range")
            if self.domain[k] != self.codomain[j]:
                raise ValueError(
                    f"sort mismatch at position {k}: "
                    f"{self.domain[k]!r} vs {self.codomain[j]!r}"
                )
        return self

    def then(self, other: "ArityMorphism") -> "ArityMorphism":
        if self.codomain != other.domain:
            raise ValueError("arity morphisms not composable")
        return ArityMorphism(
            self.domain, other.codomain, tuple(other.mapping[j] for j in self.mapping)
        )

    @staticmethod
    def identity(word: Word) -> "ArityMorphism":
        return ArityMorphism(word, word, tuple(range(len(word))))


def enumerate_arity_morphisms(a: Word, b: Word) -> list[ArityMorphism]:
    """All sort-compatible position functions a -> b, lexicographic order."""
    choices = []
    for s in a:
        slots = tuple(j for j, t in enumerate(b) if t == s)
        if not slots:
            return []
        choices.append(slots)
    return [ArityMorphism(a, b, m) for m in itertools.product(*choices)]


def enumerate_words(sorts: SortSet, max_len: int) -> list[Word]:
    """All words over the sort set with length <= max_len, shortlex order."""
    out: list[Word] = []
    for n in range(max_len + 1):
        out.extend(itertools.product(sorts.sorts, repeat=n))
    return out


def product(x: GradedSet, w: Word) -> list[tuple[Element, ...]]:
    """The ordered cartesian product X^w of the carriers selected by w."""
    return list(itertools.product(*(x.elements(s) for s in w)))


class UnionFind:
    """Union-find with path compression over arbitrary hashable keys.

    Representatives are chosen as the least key in the order keys were
    first added, which makes every quotient canonical.
    """

    def __init__(self) -> None:
        self._parent: dict[Hashable, Hashable] = {}
        self._rank: dict[Hashable, int] = {}

    def add(self, x: Hashable) -> None:
        if x not in self._parent:
            self._parent[x] = x
            self._rank[x] = len(self._rank)

    def find(self, x: Hashable) -> Hashable:
        root = x
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[x] != root:
            self._parent[x], x = root, self._parent[x]
        return root

    def union(self, x: Hashable, y: Hashable) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx is ry or rx == ry:
            return
        # keep the earlier-added key as representative
        if self._rank[rx] > self._rank[ry]:
            rx, ry = ry, rx
        self._parent[ry] = rx

    def classes(self) -> dict[Hashable, Hashable]:
        """Map from every key to its canonical representative."""
        return {x: self.find(x) for x in self._parent}


def reflexive_coequalizer(
    f: GradedMap, g: GradedMap, s: GradedMap
) -> tuple[GradedSet, GradedMap]:
    """Coequalize a reflexive pair f, g: X -> Y (with section s: Y -> X).

    Returns the quotient of Y by the equivalence generated by
    f(x) ~ g(x), together with the projection Y -> quotient.
    Representatives are the least elements in Y's canonical order.
    """
    if f.domain != g.domain or f.codomain != g.codomain:
        raise ValueError("f and g must be parallel")
    if s.domain != f.codomain or s.codomain != f.domain:
        raise ValueError("s must be a section Y -> X")
    for sort in f.codomain.sorts:
        for y in f.codomain.elements(sort):
            x = s(sort, y)
            if f(sort, x) != y or g(sort, x) != y:
                raise ValueError(
                    f"reflection law violated at {y!r} (sort {sort!r}): "
                    "need f*s = g*s = id"
                )
    return coequalize_pair(f, g)


def coequalize_pair(f: GradedMap, g: GradedMap) -> tuple[GradedSet, GradedMap]:
    """Quotient of the common codomain by the relation f(x) ~ g(x)."""
    y = f.codomain
    quotient_elems: dict[str, list[Element]] = {}
    proj: dict[str, dict[Element, Element]] = {}
    for sort in y.sorts:
        uf = UnionFind()
        for e in y.elements(sort):
            uf.add(e)
        for x in f.domain.elements(sort):
            uf.union(f(sort, x), g(sort, x))
        reps = uf.classes()
        seen: list[Element] = []
        for e in y.elements(sort):
            if reps[e] == e:
                seen.append(e)
        quotient_elems[sort] = seen
        proj[sort] = {e: reps[e] for e in y.elements(sort)}
    q = GradedSet(y.sorts, quotient_elems)
    return q, GradedMap(y, q, proj)
