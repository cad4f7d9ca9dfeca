import itertools as it
from math import factorial

import networkx as nx
import pytest
from networkx.algorithms.isomorphism import DiGraphMatcher

from conftest import F
from core.errors import ForestLabelError, ForestSyntaxError, GradeError, PreconditionError
from core.forest import (
    bamboo,
    canonicalize,
    components,
    cut_edge,
    detach_at,
    generate,
    graft,
    has_one_loop,
    is_bamboo,
    one_loop_nodes,
    orbit_key,
    redirect,
    replace_covertex,
    replace_vertex,
    rooted_tree_codes,
    scalar_texts,
    self_loop_types,
    symmetry_order,
)
from core.genfun import dimension_table


def to_digraph(f):
    g = nx.DiGraph()
    for v in range(f.order):
        root = f.roots.index(v) if v in f.roots else -1
        g.add_node(v, label=f.labels[v], root=root)
    for v, s in enumerate(f.succ):
        if s >= 0:
            g.add_edge(v, s)
    return g


def same_node(a, b):
    return a["label"] == b["label"] and a["root"] == b["root"]


def automorphisms(f):
    g = to_digraph(f)
    return sum(1 for _ in DiGraphMatcher(g, g, node_match=same_node).isomorphisms_iter())


def isomorphic(f, g):
    return nx.is_isomorphic(to_digraph(f), to_digraph(g), node_match=same_node)


class TestParsing:
    def test_single_vertex(self):
        f = F("b")
        assert f.grade == (1, 0)
        assert f.order == 1
        assert f.text == "b"

    def test_aroma_with_predecessor(self):
        f = F("<b[b]>")
        assert f.grade == (0, 0)
        assert f.order == 2
        assert len(f.cycle_nodes) == 1

    def test_aroma_and_tree_with_covertex(self):
        f = F("<b> b[o1]")
        assert f.grade == (1, 1)
        assert f.order == 3
        assert has_one_loop(f)

    def test_empty_forest(self):
        assert F("1").order == 0
        assert F("1").text == "1"

    @pytest.mark.parametrize("text", ["b[", "<b", "b]", "x", "b[b,]", "<>", ""])
    def test_syntax_errors(self, text):
        with pytest.raises(ForestSyntaxError):
            F(text)

    @pytest.mark.parametrize("text", ["o1 o1", "o2", "b[o1,o3]"])
    def test_label_errors(self, text):
        with pytest.raises(ForestLabelError):
            F(text)

    def test_print_parse_is_stable(self):
        for f in generate(4, 1, 1) + generate(4, 0, 0):
            assert F(f.text) == f


class TestCanonicalForm:
    @pytest.mark.parametrize(
        "left, right",
        [
            ("b[b[b],b]", "b[b,b[b]]"),
            ("<b[b],b>", "<b,b[b]>"),
            ("<b> b", "b <b>"),
            ("<b[b]> <b>", "<b> <b[b]>"),
        ],
    )
    def test_equivalent_texts(self, left, right):
        assert F(left) == F(right)
        assert F(left).text == F(right).text

    def test_root_order_is_kept(self):
        assert F("b b[b]") != F("b[b] b")
        assert F("o1 o2") != F("o2 o1")

    def test_aromas_come_first(self):
        assert F("b <b>").text == "<b> b"

    def test_matches_isomorphism_oracle(self):
        forests = list(generate(4, 1, 0)) + list(generate(3, 0, 0)) + list(generate(3, 1, 1))
        for f, g in it.combinations(forests, 2):
            assert not isomorphic(f, g), (f.text, g.text)

    def test_canonicalize_preserves_isomorphism_class(self):
        for f in generate(4, 2, 0):
            shuffled = canonicalize(f)
            assert isomorphic(f, shuffled)


class TestSymmetry:
    @pytest.mark.parametrize("text, sigma", [("b", 1), ("<b,b>", 2), ("b[b,b]", 2), ("<b> <b>", 2), ("<b,b,b>", 3)])
    def test_known_values(self, text, sigma):
        assert symmetry_order(F(text)) == sigma

    def test_against_automorphism_count(self):
        for N in range(1, 5):
            for f in generate(N, 1, 0) + generate(N, 0, 0):
                assert symmetry_order(f) == automorphisms(f), f.text


class TestGeneration:
    def test_order_two_trees(self):
        assert [f.text for f in generate(2, 1, 0)] == sorted(["b[b]", "<b> b"])

    def test_order_two_scalars(self):
        assert {f.text for f in generate(2, 0, 0)} == {"<b[b]>", "<b,b>", "<b> <b>"}

    def test_order_two_with_covertex(self):
        assert len(generate(2, 1, 1)) == 4

    def test_rooted_trees(self):
        assert [len(rooted_tree_codes(n)) for n in range(1, 8)] == [1, 1, 2, 4, 9, 20, 48]

    def test_scalars(self):
        assert [len(scalar_texts(n)) for n in range(1, 7)] == [1, 3, 7, 19, 47, 130]

    def test_matches_series(self):
        table = dimension_table(6)
        for row in table.solenoidal:
            assert len(generate(row.N, 1, 0)) == row.omega_1

    def test_divfree_drops_loops(self):
        assert all(not has_one_loop(f) for f in generate(4, 1, 0, divfree=True))
        assert [f.text for f in generate(2, 1, 0, divfree=True)] == ["b[b]"]

    def test_too_many_roots(self):
        assert generate(2, 3, 0) == ()

    def test_too_many_covertices(self):
        with pytest.raises(GradeError):
            generate(2, 1, 3)

    def test_labelled_count(self):
        # every node of a forest of order N may carry each of the p labels
        for f in generate(3, 1, 0):
            labelled = {canonicalize(replace_vertex(f, v, 1)) for v in range(3)}
            assert labelled <= set(generate(3, 1, 1))
        assert len(generate(3, 1, 3)) <= len(generate(3, 1, 0)) * factorial(3)


class TestEdits:
    def test_graft_onto_itself(self):
        f = F("b")
        assert canonicalize(graft(f, 0, 0)).text == "<b>"

    def test_graft_onto_child(self):
        f = F("b[b]")
        r = f.roots[0]
        child = next(v for v in range(2) if v != r)
        assert canonicalize(graft(f, r, child)).text == "<b,b>"

    def test_graft_onto_aroma(self):
        f = F("<b> b")
        r = f.roots[0]
        loop = one_loop_nodes(f)[0]
        assert canonicalize(graft(f, r, loop)).text == "<b[b]>"

    def test_graft_needs_root(self):
        f = F("b[b]")
        child = next(v for v in range(2) if v not in f.roots)
        with pytest.raises(PreconditionError):
            graft(f, child, child)

    def test_detach_one_loop(self):
        f = F("<b>")
        mf = detach_at(f, 0)
        assert mf.base.text == "b"
        assert mf.marked == 0
        assert mf.detached == (0,)

    def test_detach_root_of_cherry(self):
        f = F("b[b,b]")
        r = f.roots[0]
        mf = detach_at(f, r)
        assert mf.base.n_roots == 3
        assert len(mf.detached) == 2
        assert r not in mf.detached

    def test_replace_roundtrip(self):
        assert canonicalize(replace_vertex(F("b"), 0, 1)).text == "o1"
        assert canonicalize(replace_covertex(F("<b[o1]>"), 1)).text == "<b[b]>"
        f = F("b[b,b[b]]")
        for v in range(f.order):
            assert canonicalize(replace_covertex(replace_vertex(f, v, 1), 1)) == f

    def test_replace_vertex_rejects_covertex(self):
        f = F("o1")
        with pytest.raises(ForestLabelError):
            replace_vertex(f, 0, 2)

    def test_cut_edge(self):
        assert canonicalize(cut_edge(F("<b>"), 0)).text == "b"
        f = F("b[b]")
        child = next(v for v in range(2) if v not in f.roots)
        assert canonicalize(cut_edge(f, child)).text == "b b"

    def test_redirect(self):
        f = F("<b> <b>")
        assert canonicalize(redirect(f, 0, 1)).text == "<b[b]>"

    def test_components(self):
        assert len(components(F("<b> b[b] <b,b>"))) == 3


class TestStructure:
    def test_bamboo(self):
        assert [bamboo(N).text for N in (1, 2, 3)] == ["b", "b[b]", "b[b[b]]"]
        assert is_bamboo(F("b[b[b[b]]]"))
        assert not is_bamboo(F("b[b,b]"))

    def test_self_loop_types(self):
        types = self_loop_types(F("<b> <b> <b[b]>"))
        assert list(types) == ["b", "b[b]"]

    def test_orbit_key(self):
        assert orbit_key(F("b b[b]")) == orbit_key(F("b[b] b"))
        assert orbit_key(F("o1 b[o2]")) == orbit_key(F("o2 b[o1]"))
        assert orbit_key(F("b[b[b]]")) != orbit_key(F("b[b,b]"))
