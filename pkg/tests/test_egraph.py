import random

import pytest

from ctxsat.egraph import EGraph, term
from ctxsat.errors import ArityMismatch, DuplicateSymbol, UnknownSymbol
from ctxsat.lattice import BOTTOM, ContextLattice

from oracles import blocks_to_pairs, naive_contextual_congruence


def arith_graph():
    eg = EGraph()
    then = eg.declare_context("then", {BOTTOM})
    for name, arity in [("mul", 2), ("shift", 1), ("x", 0), ("y", 0), ("2", 0)]:
        eg.declare_function(name, arity)
    return eg, then


def test_declare_function_duplicate():
    eg = EGraph()
    eg.declare_function("mul", 2)
    eg.declare_function("true", 0)
    with pytest.raises(DuplicateSymbol):
        eg.declare_function("mul", 2)


def test_intern_is_idempotent():
    eg, then = arith_graph()
    t = term("mul", term("x"), term("y"))
    assert eg.intern(t) == eg.intern(t)


def test_intern_undeclared_symbol():
    eg, then = arith_graph()
    with pytest.raises(UnknownSymbol):
        eg.intern(term("f", term("x")))
    with pytest.raises(ArityMismatch):
        eg.intern(term("mul", term("x")))


def test_contextual_congruence_after_rebuild():
    eg, then = arith_graph()
    xy = eg.intern(term("mul", term("x"), term("y")))
    eg.merge(then, eg.intern(term("x")), eg.intern(term("2")))
    eg.rebuild()
    ty = eg.intern(term("mul", term("2"), term("y")))
    eg.rebuild()
    assert eg.equiv(then, xy, ty)
    assert not eg.equiv(BOTTOM, xy, ty)


def test_bottom_merge_equal_everywhere():
    eg = EGraph()
    c = eg.declare_context("c", {BOTTOM})
    eg.declare_function("plus", 2)
    for n in ("1", "2", "3"):
        eg.declare_function(n, 0)
    a = eg.intern(term("plus", term("2"), term("1")))
    b = eg.intern(term("3"))
    eg.merge(BOTTOM, a, b)
    eg.rebuild()
    assert eg.equiv(BOTTOM, a, b)
    assert eg.equiv(c, a, b)


def test_merge_same_class_noop():
    eg, then = arith_graph()
    a = eg.intern(term("x"))
    eg.rebuild()
    v = eg.version
    eg.merge(then, a, a)
    assert eg.version == v
    assert eg.rebuild() == 0


def test_rebuild_without_pending_is_free():
    eg, then = arith_graph()
    eg.intern(term("mul", term("x"), term("y")))
    assert eg.rebuild() > -1
    assert eg.rebuild() == 0


def test_congruence_cascades_upward():
    # equal children at bottom must collapse parents in every context
    eg = EGraph()
    c = eg.declare_context("c", {BOTTOM})
    eg.declare_function("f", 1)
    eg.declare_function("a", 0)
    eg.declare_function("b", 0)
    fa = eg.intern(term("f", term("a")))
    fb = eg.intern(term("f", term("b")))
    eg.merge(BOTTOM, eg.intern(term("a")), eg.intern(term("b")))
    eg.rebuild()
    assert eg.equiv(BOTTOM, fa, fb)
    assert eg.equiv(c, fa, fb)


def test_class_nodes_are_deduplicated():
    eg, then = arith_graph()
    xy = eg.intern(term("mul", term("x"), term("y")))
    ty = eg.intern(term("mul", term("2"), term("y")))
    eg.merge(then, eg.intern(term("x")), eg.intern(term("2")))
    eg.rebuild()
    # under then the two mul nodes canonicalize identically
    nodes = eg.class_nodes(then, xy)
    muls = [n for n in nodes if n.symbol.name == "mul"]
    assert len(muls) == 1
    leaf = eg.class_nodes(BOTTOM, eg.intern(term("x")))
    assert len(leaf) == 1


def test_stats_and_monotone_class_count():
    eg = EGraph()
    s = eg.declare_context("s", {BOTTOM})
    eg.declare_function("mj", 2)
    eg.declare_function("hj", 2)
    eg.declare_function("r1", 0)
    eg.declare_function("r2", 0)
    mj = eg.intern(term("mj", term("r1"), term("r2")))
    hj = eg.intern(term("hj", term("r1"), term("r2")))
    eg.merge(s, mj, hj)
    eg.rebuild()
    assert eg.stats(s)[0] <= eg.stats(BOTTOM)[0]
    classes, nodes = eg.stats(BOTTOM)
    assert classes == 4 and nodes == 4
    assert eg.stats(s) == (3, 4)


def test_stats_empty():
    eg = EGraph()
    assert eg.stats(BOTTOM) == (0, 0)


def test_stats_match_recount():
    eg, then = arith_graph()
    eg.intern(term("mul", term("x"), term("y")))
    eg.intern(term("mul", term("2"), term("y")))
    eg.merge(then, eg.intern(term("x")), eg.intern(term("2")))
    eg.rebuild()
    for ctx in eg.lattice.ids():
        classes = {eg.find(ctx, c) for c in eg.nodes().values()}
        nodes = {eg.canonical_node(ctx, n) for n in eg.nodes()}
        assert eg.stats(ctx) == (len(classes), len(nodes))


def test_term_in_class():
    eg, then = arith_graph()
    xy = eg.intern(term("mul", term("x"), term("y")))
    eg.merge(then, eg.intern(term("x")), eg.intern(term("2")))
    eg.rebuild()
    assert eg.term_in_class(BOTTOM, term("mul", term("x"), term("y")), xy)
    assert eg.term_in_class(then, term("mul", term("2"), term("y")), xy)
    assert not eg.term_in_class(BOTTOM, term("mul", term("2"), term("y")), xy)


# randomized congruence-closure oracle


def random_lattice(rng, max_ctx):
    from ctxsat.errors import NotALattice

    lat = ContextLattice()
    for i in range(rng.randint(0, max_ctx - 1)):
        existing = list(lat.ids())
        covers = set(rng.sample(existing, k=rng.randint(1, min(2, len(existing)))))
        try:
            lat.declare_context(f"c{i}", covers)
        except NotALattice:
            pass
    return lat


def random_egraph(seed, max_nodes=20, max_ctx=4):
    rng = random.Random(seed)
    lat = random_lattice(rng, max_ctx)
    eg = EGraph(lat)
    syms = []
    for i in range(rng.randint(2, 4)):
        syms.append(eg.declare_function(f"k{i}", 0))
    for i in range(rng.randint(1, 3)):
        syms.append(eg.declare_function(f"f{i}", rng.randint(1, 2)))
    classes = []
    for s in syms:
        if s.arity == 0:
            classes.append(eg.add_node(s, ()))
    while len(eg.nodes()) < rng.randint(4, max_nodes):
        s = rng.choice(syms)
        children = tuple(rng.choice(classes) for _ in range(s.arity))
        classes.append(eg.add_node(s, children))
    node_list = [
        (node.symbol.name, node.children, cls) for node, cls in eg.nodes().items()
    ]
    merges = []
    for _ in range(rng.randint(0, 6)):
        ctx = rng.randrange(len(lat))
        a, b = rng.choice(classes), rng.choice(classes)
        merges.append((ctx, a, b))
        eg.merge(ctx, a, b)
    return eg, merges, node_list


def test_congruence_matches_naive_fixpoint():
    for seed in range(220):
        eg, merges, node_list = random_egraph(seed)
        eg.rebuild()
        oracle = naive_contextual_congruence(
            eg.lattice, node_list, len(eg.uf), merges
        )
        for ctx in eg.lattice.ids():
            got = eg.uf.partition(ctx)
            assert got == oracle[ctx], f"seed={seed} ctx={ctx}"


def test_equalities_never_lost_by_rebuild():
    for seed in range(60):
        eg, merges, _ = random_egraph(seed + 5000)
        before = {
            ctx: blocks_to_pairs(eg.uf.partition(ctx)) for ctx in eg.lattice.ids()
        }
        eg.rebuild()
        for ctx in eg.lattice.ids():
            assert before[ctx] <= blocks_to_pairs(eg.uf.partition(ctx))
