import pytest
from hypothesis import given, settings, strategies as st

from theorykit.graded import Profile, SortSet
from theorykit.signature import Operation, Signature, signature, single_sorted
from theorykit.trees import (
    Leaf,
    Node,
    enumerate_essential,
    enumerate_trees,
    essential_subtree,
    graft,
    is_essential,
    leaf_word,
    relabel,
    root_sort,
    split_essential,
    tree_from_data,
    tree_from_text,
    tree_profile,
    tree_to_data,
    tree_to_text,
    vertex_count,
)

BIN = single_sorted({"m": 2})
M = BIN["m"]


def node(op, *children):
    return Node(op, tuple(children))


def catalan(n):
    row = [1]
    for m in range(1, n + 1):
        row.append(sum(row[i] * row[m - 1 - i] for i in range(m)))
    return row[n]


class TestTreeBasics:
    def test_sort_checking(self):
        with pytest.raises(ValueError):
            Node(M, (Leaf("*"),))  # arity mismatch
        op = Operation("f", "v", ("e",))
        with pytest.raises(ValueError):
            Node(op, (Leaf("v"),))  # child sort mismatch

    def test_profile(self):
        t = node(M, Leaf("*"), node(M, Leaf("*"), Leaf("*")))
        assert tree_profile(t) == Profile("*", ("*", "*", "*"))
        assert vertex_count(t) == 2


class TestGraft:
    def test_leaf_is_left_unit(self):
        t = node(M, Leaf("*"), Leaf("*"))
        assert graft(Leaf("*"), [t]) == t

    def test_leaves_are_right_unit(self):
        t = node(M, Leaf("*"), node(M, Leaf("*"), Leaf("*")))
        assert graft(t, [Leaf("*")] * 3) == t

    def test_binary_substitution(self):
        corolla = node(M, Leaf("*"), Leaf("*"))
        got = graft(corolla, [corolla, Leaf("*")])
        assert got == node(M, corolla, Leaf("*"))

    def test_sort_mismatch_rejected(self):
        op = Operation("f", "v", ("e",))
        t = Leaf("e")
        with pytest.raises(ValueError):
            graft(t, [Leaf("v")])

    def test_arity_mismatch_rejected(self):
        with pytest.raises(ValueError):
            graft(Leaf("*"), [])


@st.composite
def random_trees(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        return Leaf("*")
    return node(M, draw(random_trees(depth=depth - 1)),
                draw(random_trees(depth=depth - 1)))


@given(random_trees(), st.data())
@settings(max_examples=50, deadline=None)
def test_graft_associativity(t, data):
    n = len(leaf_word(t))
    mids = [data.draw(random_trees(depth=2)) for _ in range(n)]
    total = sum(len(leaf_word(m)) for m in mids)
    outs = [data.draw(random_trees(depth=1)) for _ in range(total)]
    # (t . mids) . outs == t . (mids . outs-blocks)
    lhs = graft(graft(t, mids), outs)
    blocks = []
    offset = 0
    for m in mids:
        k = len(leaf_word(m))
        blocks.append(graft(m, outs[offset:offset + k]))
        offset += k
    rhs = graft(t, blocks)
    assert lhs == rhs


class TestEnumeration:
    @pytest.mark.parametrize("leaves", range(2, 7))
    def test_catalan(self, leaves):
        enum = enumerate_trees(BIN, Profile("*", ("*",) * leaves), leaves - 1)
        assert enum.exact
        assert len(enum.trees) == catalan(leaves - 1)

    def test_empty_signature(self):
        empty = signature([])
        one = enumerate_trees(empty, Profile("*", ("*",)), 3)
        assert one.trees == (Leaf("*"),)
        assert one.exact
        two = enumerate_trees(empty, Profile("*", ("*", "*")), 3)
        assert two.trees == ()
        assert two.exact

    def test_unary_chains_truncate(self):
        unary = single_sorted({"u": 1})
        enum = enumerate_trees(unary, Profile("*", ("*",)), 3)
        assert len(enum.trees) == 4
        assert not enum.exact

    def test_two_step_cycle_is_flagged_infinite(self):
        # unary loop through a second sort: sizes jump by 2
        sig = signature(
            [("f", "a", ["b"]), ("g", "b", ["a"])], sorts=("a", "b")
        )
        enum = enumerate_trees(sig, Profile("a", ("a",)), 1)
        assert len(enum.trees) == 1  # only the leaf fits in one vertex
        assert not enum.exact
        bigger = enumerate_trees(sig, Profile("a", ("a",)), 2)
        assert len(bigger.trees) == 2

    def test_nullary_absorption(self):
        sig = single_sorted({"m": 2, "c": 0})
        enum = enumerate_trees(sig, Profile("*", ()), 3)
        # closed trees: c, m(c,c) within 3 vertices
        assert len(enum.trees) == 2
        assert not enum.exact

    def test_canonical_order_is_stable(self):
        from theorykit.trees import sort_key

        a = enumerate_trees(BIN, Profile("*", ("*",) * 4), 3).trees
        b = enumerate_trees(BIN, Profile("*", ("*",) * 4), 3).trees
        assert a == b
        assert list(a) == sorted(a, key=sort_key)

    def test_multi_sorted_enumeration(self):
        sig = signature([("e", "u", ["v", "v"]), ("p", "v", [])],
                        sorts=("u", "v"))
        enum = enumerate_trees(sig, Profile("u", ()), 3)
        assert len(enum.trees) == 1  # e(p, p)
        assert enum.exact


AB = single_sorted({"a": 2}).disjoint_union(
    Signature(SortSet(("*",)), [Operation("b", "*", ("*", "*"))])
)
A_OP, B_OP = AB["a"], AB["b"]


class TestEssential:
    def test_all_a_tree_prunes_to_leaf(self):
        t = node(A_OP, Leaf("*"), node(A_OP, Leaf("*"), Leaf("*")))
        assert essential_subtree(t, {"b"}) == Leaf("*")

    def test_b_corolla_is_essential(self):
        t = node(B_OP, Leaf("*"), Leaf("*"))
        assert essential_subtree(t, {"b"}) == t

    def test_a_above_b_keeps_whole_tree(self):
        t = node(A_OP, node(B_OP, Leaf("*"), Leaf("*")), Leaf("*"))
        assert essential_subtree(t, {"b"}) == t

    def test_prune_cuts_a_branches(self):
        inner = node(A_OP, Leaf("*"), Leaf("*"))
        t = node(B_OP, inner, Leaf("*"))
        assert essential_subtree(t, {"b"}) == node(B_OP, Leaf("*"), Leaf("*"))

    def test_split_all_a(self):
        t = node(A_OP, Leaf("*"), Leaf("*"))
        e, forest = split_essential(t, {"b"})
        assert e == Leaf("*")
        assert forest == (t,)

    def test_split_essential_tree_gives_leaves(self):
        t = node(B_OP, Leaf("*"), Leaf("*"))
        e, forest = split_essential(t, {"b"})
        assert e == t
        assert forest == (Leaf("*"), Leaf("*"))

    def test_split_regraft_roundtrip(self):
        inner = node(A_OP, Leaf("*"), Leaf("*"))
        t = node(A_OP, node(B_OP, inner, Leaf("*")), Leaf("*"))
        e, forest = split_essential(t, {"b"})
        assert is_essential(e, {"b"})
        assert graft(e, forest) == t

    @pytest.mark.parametrize("leaves,count", [(1, 1), (2, 1), (3, 4)])
    def test_essential_counts(self, leaves, count):
        a = single_sorted({"a": 2})
        b = single_sorted({"b": 2})
        enum = enumerate_essential(a, b, Profile("*", ("*",) * leaves), 4)
        assert len(enum.trees) == count

    def test_empty_b_gives_trivial_trees(self):
        a = single_sorted({"a": 2})
        b = signature([])
        assert enumerate_essential(a, b, Profile("*", ("*",)), 4).trees == (
            Leaf("*"),
        )
        assert enumerate_essential(a, b, Profile("*", ("*", "*")), 4).trees == ()

    def test_empty_a_gives_everything(self):
        a = signature([])
        b = single_sorted({"b": 2})
        for leaves in (1, 2, 3):
            essential = enumerate_essential(
                a, b, Profile("*", ("*",) * leaves), 4
            ).trees
            full = enumerate_trees(
                b, Profile("*", ("*",) * leaves), 4
            ).trees
            assert len(essential) == len(full)

    def test_split_bijection_at_three_leaves(self):
        union = single_sorted({"a": 2}).disjoint_union(single_sorted({"b": 2}))
        trees = enumerate_trees(union, Profile("*", ("*",) * 3), 4).trees
        assert len(trees) == 8
        seen = set()
        for t in trees:
            e, forest = split_essential(t, {"b"})
            assert graft(e, forest) == t
            seen.add((e, forest))
        assert len(seen) == 8

    def test_relabel_commutes_with_essential(self):
        # a partition-preserving relabeling does not change the shape
        union2 = Signature(
            SortSet(("*",)),
            [Operation("a", "*", ("*", "*")), Operation("b", "*", ("*", "*")),
             Operation("b2", "*", ("*", "*"))],
        )
        mapping = {union2["b"]: union2["b2"]}
        trees = enumerate_trees(AB, Profile("*", ("*",) * 3), 3).trees
        for t in trees:
            relabeled = relabel(t, {AB["b"]: union2["b"], AB["a"]: union2["a"]})
            moved = relabel(relabeled, mapping)
            lhs = essential_subtree(moved, {"b", "b2"})
            rhs = relabel(essential_subtree(relabeled, {"b", "b2"}), mapping)
            assert lhs == rhs

    def test_doubling_fixes_only_trivial(self):
        a = single_sorted({"a": 2})
        b = single_sorted({"b": 2})
        left = {b["b"]: Operation(("L", "b"), "*", ("*", "*"))}
        right = {b["b"]: Operation(("R", "b"), "*", ("*", "*"))}
        for leaves in (1, 2, 3):
            for t in enumerate_essential(a, b, Profile("*", ("*",) * leaves),
                                         4).trees:
                fixed = relabel(t, left) == relabel(t, right)
                assert fixed == isinstance(t, Leaf)


class TestSerialization:
    def test_data_roundtrip(self):
        t = node(A_OP, node(B_OP, Leaf("*"), Leaf("*")), Leaf("*"))
        assert tree_from_data(tree_to_data(t)) == t

    def test_text_roundtrip(self):
        t = node(A_OP, node(B_OP, Leaf("*"), Leaf("*")), Leaf("*"))
        text = tree_to_text(t)
        assert tree_from_text(text) == t
        assert tree_to_text(tree_from_text(text)) == text

    def test_text_format_shape(self):
        t = node(B_OP, Leaf("*"), Leaf("*"))
        lines = tree_to_text(t).strip().splitlines()
        assert lines[0] == "node 0 b *"
        assert "edge 0 0 1" in lines
        assert "edge 0 1 2" in lines
