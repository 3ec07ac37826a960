"""Totally ordered labelled trees: terms over a signature.

Input edges of every vertex are totally ordered, so trees have no
automorphisms and isomorphism classes coincide with structural
equality.  A tree is either a bare leaf (the trivial tree) or an
operation applied to an ordered list of subtrees whose root sorts
match the operation's input word.

The derived profile of a tree is (root output sort, left-to-right word
of leaf sorts).  Grafting substitutes trees into leaves and is the
multiplication of the free theory.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Iterable, Iterator, NamedTuple, Union

from .graded import Profile, Word
from .signature import Operation, Signature


@dataclass(frozen=True)
class Leaf:
    """The trivial tree: a single edge carrying a sort."""

    sort: str


@dataclass(frozen=True)
class Node:
    op: Operation
    children: tuple["Tree", ...]

    def __post_init__(self) -> None:
        if len(self.children) != len(self.op.inputs):
            raise ValueError(
                f"{self.op} expects {len(self.op.inputs)} children, "
                f"got {len(self.children)}"
            )
        for expected, child in zip(self.op.inputs, self.children):
            got = root_sort(child)
            if got != expected:
                raise ValueError(
                    f"sort mismatch under {self.op}: expected {expected!r}, "
                    f"got {got!r}"
                )


Tree = Union[Leaf, Node]


def root_sort(t: Tree) -> str:
    return t.sort if isinstance(t, Leaf) else t.op.output


def leaf_word(t: Tree) -> Word:
    if isinstance(t, Leaf):
        return (t.sort,)
    return tuple(s for c in t.children for s in leaf_word(c))


def tree_profile(t: Tree) -> Profile:
    return Profile(root_sort(t), leaf_word(t))


def vertex_count(t: Tree) -> int:
    if isinstance(t, Leaf):
        return 0
    return 1 + sum(vertex_count(c) for c in t.children)


def leaf_count(t: Tree) -> int:
    return len(leaf_word(t))


def sort_key(t: Tree):
    """Canonical comparison key; enumerations are sorted by this."""
    if isinstance(t, Leaf):
        return (0, str(t.sort))
    return (1, str(t.op.name), str(t.op.output),
            tuple(sort_key(c) for c in t.children))


def graft(root: Tree, subs: Iterable[Tree]) -> Tree:
    """Substitute trees into the leaves of ``root``, left to right."""
    subs = tuple(subs)
    if len(subs) != leaf_count(root):
        raise ValueError(
            f"need {leaf_count(root)} grafts, got {len(subs)}"
        )
    it = iter(subs)
    out = _graft(root, it)
    return out


def _graft(t: Tree, it: Iterator[Tree]) -> Tree:
    if isinstance(t, Leaf):
        sub = next(it)
        if root_sort(sub) != t.sort:
            raise ValueError(
                f"graft sort mismatch: leaf {t.sort!r} vs root {root_sort(sub)!r}"
            )
        return sub
    return Node(t.op, tuple(_graft(c, it) for c in t.children))


def relabel(t: Tree, mapping: dict[Operation, Operation]) -> Tree:
    """Apply a profile-preserving generator map to every vertex label."""
    if isinstance(t, Leaf):
        return t
    new_op = mapping.get(t.op, t.op)
    if new_op.profile != t.op.profile:
        raise ValueError(f"relabeling changes profile of {t.op}")
    return Node(new_op, tuple(relabel(c, mapping) for c in t.children))


def subtrees(t: Tree) -> Iterator[Tree]:
    yield t
    if isinstance(t, Node):
        for c in t.children:
            yield from subtrees(t=c)


class TreeEnumeration(NamedTuple):
    """Result of a bounded enumeration.

    ``exact`` is True when the returned list is the whole set of trees
    for the profile; it is False when the vertex bound cut the set off
    (in particular whenever the set is infinite).
    """

    trees: tuple[Tree, ...]
    exact: bool


def _splits(word: Word, parts: int) -> Iterator[tuple[Word, ...]]:
    """All ways to cut a word into ``parts`` consecutive (maybe empty) blocks."""
    n = len(word)
    if parts == 0:
        if n == 0:
            yield ()
        return
    for cuts in itertools.combinations_with_replacement(range(n + 1), parts - 1):
        bounds = (0,) + cuts + (n,)
        yield tuple(word[bounds[i]:bounds[i + 1]] for i in range(parts))


@lru_cache(maxsize=None)
def _enumerate(sig: Signature, out: str, word: Word, budget: int) -> tuple[Tree, ...]:
    found: list[Tree] = []
    if word == (out,):
        found.append(Leaf(out))
    if budget >= 1:
        for op in sig.with_output(out):
            for split in _splits(word, len(op.inputs)):
                for children in _forests(sig, op.inputs, split, budget - 1):
                    found.append(Node(op, children))
    return tuple(sorted(found, key=sort_key))


def _forests(sig: Signature, sorts: Word, words: tuple[Word, ...],
             budget: int) -> Iterator[tuple[Tree, ...]]:
    """Tuples of trees with given root sorts/leaf words, total size <= budget."""
    if not sorts:
        yield ()
        return
    head_sort, head_word = sorts[0], words[0]
    for head in _enumerate(sig, head_sort, head_word, budget):
        rest_budget = budget - vertex_count(head)
        for rest in _forests(sig, sorts[1:], words[1:], rest_budget):
            yield (head,) + rest


@lru_cache(maxsize=None)
def _productive(sig: Signature, out: str, word: Word) -> bool:
    """Whether at least one tree exists for the profile, at any size."""
    table: set[tuple[str, Word]] = set()
    domain = _closure_domain(sig, out, word)
    changed = True
    while changed:
        changed = False
        for (s, w) in domain:
            if (s, w) in table:
                continue
            ok = w == (s,)
            if not ok:
                for op in sig.with_output(s):
                    for split in _splits(w, len(op.inputs)):
                        if all((t, u) in table
                               for t, u in zip(op.inputs, split)):
                            ok = True
                            break
                    if ok:
                        break
            if ok:
                table.add((s, w))
                changed = True
    return (out, word) in table


def _closure_domain(sig: Signature, out: str, word: Word) -> list[tuple[str, Word]]:
    subwords = {word[i:j] for i in range(len(word) + 1)
                for j in range(i, len(word) + 1)}
    return [(s, w) for s in sig.sorts for w in sorted(subwords)]


@lru_cache(maxsize=None)
def _profile_is_finite(sig: Signature, out: str, word: Word) -> bool:
    """Whether the full (unbounded) set of trees for the profile is finite.

    Trees can only grow without bound by pumping a cycle in the
    dependency relation between subproblems (sort, contiguous subword);
    an edge exists when an operation reduces one subproblem to another
    while all sibling subproblems are productive.  The set is infinite
    exactly when some productive node on a cycle is reachable.
    """
    domain = _closure_domain(sig, out, word)
    edges: dict[tuple[str, Word], set[tuple[str, Word]]] = {d: set() for d in domain}
    for (s, w) in domain:
        for op in sig.with_output(s):
            for split in _splits(w, len(op.inputs)):
                parts = list(zip(op.inputs, split))
                if not all(_productive(sig, t, u) for t, u in parts):
                    continue
                for t, u in parts:
                    edges[(s, w)].add((t, u))
    start = (out, word)
    reachable: set[tuple[str, Word]] = set()
    stack = [start]
    while stack:
        node = stack.pop()
        if node in reachable:
            continue
        reachable.add(node)
        stack.extend(edges[node])
    # a reachable node on a cycle can be pumped; all nodes here are
    # productive at the sibling level and the node itself is productive
    # by construction of the edge relation only if it heads a tree, so
    # check productivity of the cycle node explicitly
    for node in reachable:
        if not _productive(sig, *node):
            continue
        if _on_cycle(node, edges):
            return False
    return True


def _on_cycle(node: tuple[str, Word],
              edges: dict[tuple[str, Word], set[tuple[str, Word]]]) -> bool:
    seen: set[tuple[str, Word]] = set()
    stack = list(edges[node])
    while stack:
        u = stack.pop()
        if u == node:
            return True
        if u in seen:
            continue
        seen.add(u)
        stack.extend(edges[u])
    return False


@lru_cache(maxsize=None)
def _max_tree_size(sig: Signature, out: str, word: Word) -> int:
    """Largest vertex count over the (finite) set of trees for a profile.

    Only call after _profile_is_finite returned True (the recursion
    only descends productive subproblems, which cannot cycle when the
    profile is finite); -1 means empty.
    """
    best = 0 if word == (out,) else -1
    for op in sig.with_output(out):
        for split in _splits(word, len(op.inputs)):
            parts = list(zip(op.inputs, split))
            if not all(_productive(sig, t, u) for t, u in parts):
                continue
            total = 1 + sum(_max_tree_size(sig, t, u) for t, u in parts)
            best = max(best, total)
    return best


def enumerate_trees(sig: Signature, profile: Profile,
                    max_vertices: int) -> TreeEnumeration:
    """All trees with the given profile and at most ``max_vertices`` vertices.

    The result is in canonical order and carries an exactness flag:
    signatures with unary or nullary generators can have infinitely
    many trees at a single profile, in which case the flag is False.
    """
    word = sig.sorts.check_word(profile.inputs)
    if profile.output not in sig.sorts:
        raise ValueError(f"unknown output sort {profile.output!r}")
    trees = _enumerate(sig, profile.output, word, max_vertices)
    if _profile_is_finite(sig, profile.output, word):
        exact = _max_tree_size(sig, profile.output, word) <= max_vertices
    else:
        exact = False
    return TreeEnumeration(trees, exact)


def count_trees(sig: Signature, profile: Profile, max_vertices: int) -> int:
    return len(enumerate_trees(sig, profile, max_vertices).trees)


# ---------------------------------------------------------------------------
# essential subtrees


def _contains_label(t: Tree, names: frozenset) -> bool:
    if isinstance(t, Leaf):
        return False
    return t.op.name in names or any(_contains_label(c, names) for c in t.children)


def essential_subtree(t: Tree, b_names: Iterable[Hashable]) -> Tree:
    """Minimal rooted subtree containing every vertex labelled from B.

    Cutting a subtree replaces it by a leaf of the matching sort; if no
    vertex is labelled from B the result is the trivial tree.
    """
    names = frozenset(b_names)
    if not _contains_label(t, names):
        return Leaf(root_sort(t))
    assert isinstance(t, Node)
    children = tuple(
        _prune(c, names) for c in t.children
    )
    return Node(t.op, children)


def _prune(t: Tree, names: frozenset) -> Tree:
    if not _contains_label(t, names):
        return Leaf(root_sort(t))
    assert isinstance(t, Node)
    return Node(t.op, tuple(_prune(c, names) for c in t.children))


def is_essential(t: Tree, b_names: Iterable[Hashable]) -> bool:
    return essential_subtree(t, b_names) == t


def split_essential(t: Tree, b_names: Iterable[Hashable]) -> tuple[Tree, tuple[Tree, ...]]:
    """Unique decomposition t = graft(essential part, A-labelled forest).

    The first component is the minimal rooted subtree containing all
    B-labelled vertices; the forest entries carry no B labels and graft
    back to ``t``.
    """
    names = frozenset(b_names)
    if not _contains_label(t, names):
        return Leaf(root_sort(t)), (t,)
    assert isinstance(t, Node)
    pruned: list[Tree] = []
    forest: list[Tree] = []
    for c in t.children:
        sub, grafts = split_essential(c, names)
        pruned.append(sub)
        forest.extend(grafts)
    return Node(t.op, tuple(pruned)), tuple(forest)


@lru_cache(maxsize=None)
def enumerate_essential(sig_a: Signature, sig_b: Signature, profile: Profile,
                        max_vertices: int) -> TreeEnumeration:
    """B-essential trees over the disjoint union signature."""
    union = sig_a.disjoint_union(sig_b)
    names = sig_b.names()
    full = enumerate_trees(union, profile, max_vertices)
    kept = tuple(t for t in full.trees if is_essential(t, names))
    return TreeEnumeration(kept, full.exact)


# ---------------------------------------------------------------------------
# serialization


def tree_to_data(t: Tree) -> dict:
    if isinstance(t, Leaf):
        return {"leaf": t.sort}
    return {
        "op": t.op.name,
        "output": t.op.output,
        "inputs": list(t.op.inputs),
        "children": [tree_to_data(c) for c in t.children],
    }


def tree_from_data(data: dict) -> Tree:
    if "leaf" in data:
        return Leaf(data["leaf"])
    op = Operation(data["op"], data["output"], tuple(data["inputs"]))
    return Node(op, tuple(tree_from_data(c) for c in data["children"]))


def tree_to_text(t: Tree) -> str:
    """Graph-description export: one line per vertex/leaf, ordered edges."""
    lines: list[str] = []
    counter = itertools.count()

    def walk(node: Tree) -> int:
        ident = next(counter)
        if isinstance(node, Leaf):
            lines.append(f"leaf {ident} {node.sort}")
            return ident
        lines.append(f"node {ident} {node.op.name} {node.op.output}")
        child_ids = [walk(c) for c in node.children]
        for slot, cid in enumerate(child_ids):
            lines.append(f"edge {ident} {slot} {cid}")
        return ident

    walk(t)
    return "\n".join(lines) + "\n"


def tree_from_text(text: str) -> Tree:
    nodes: dict[int, tuple[str, list[str]]] = {}
    children: dict[int, dict[int, int]] = {}
    for raw in text.strip().splitlines():
        parts = raw.split()
        if parts[0] == "leaf":
            nodes[int(parts[1])] = ("leaf", parts[2:])
        elif parts[0] == "node":
            nodes[int(parts[1])] = ("node", parts[2:])
            children.setdefault(int(parts[1]), {})
        elif parts[0] == "edge":
            parent, slot, target = int(parts[1]), int(parts[2]), int(parts[3])
            children.setdefault(parent, {})[slot] = target
        else:
            raise ValueError(f"bad line in tree text: {raw!r}")

    def build(ident: int) -> Tree:
        kind, info = nodes[ident]
        if kind == "leaf":
            return Leaf(info[0])
        name, output = info[0], info[1]
        slots = children.get(ident, {})
        kids = tuple(build(slots[i]) for i in range(len(slots)))
        op = Operation(name, output, tuple(root_sort(k) for k in kids))
        return Node(op, kids)

    return build(0)
