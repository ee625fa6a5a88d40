import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxsat.errors import NotALattice, NotBelow, UnknownContext, UnknownNode
from ctxsat.lattice import BOTTOM, ContextLattice
from ctxsat.layered_uf import LayeredUnionFind

from oracles import NaiveLayered, blocks_to_pairs


def branch_setup(n_ids=4):
    lat = ContextLattice()
    then = lat.declare_context("then", {BOTTOM})
    els = lat.declare_context("else", {BOTTOM})
    uf = LayeredUnionFind(lat)
    ids = [uf.make_set() for _ in range(n_ids)]
    return lat, uf, then, els, ids


def test_make_set_ids_are_dense():
    lat = ContextLattice()
    uf = LayeredUnionFind(lat)
    assert uf.make_set() == 0
    assert uf.make_set() == 1
    assert uf.find(BOTTOM, 0) == 0


def test_fresh_id_is_singleton_in_every_context():
    lat, uf, then, els, ids = branch_setup()
    x = uf.make_set()
    for c in lat.ids():
        assert uf.find(c, x) == x
    assert len(uf.partition(BOTTOM)) == len(ids) + 1


def test_contextual_union_invisible_below():
    lat, uf, then, els, (a, b, *_) = branch_setup()
    uf.union(then, a, b)
    assert uf.find(then, a) == uf.find(then, b)
    assert uf.find(BOTTOM, a) != uf.find(BOTTOM, b)
    assert uf.find(els, a) != uf.find(els, b)


def test_bottom_union_visible_everywhere():
    lat, uf, then, els, (a, b, *_) = branch_setup()
    uf.union(BOTTOM, a, b)
    for c in lat.ids():
        assert uf.equiv(c, a, b)


def test_union_is_reflexive_noop():
    lat, uf, then, els, (a, *_) = branch_setup()
    before = uf.partition(then)
    uf.union(then, a, a)
    assert uf.partition(then) == before


def test_transitivity_chain():
    lat, uf, then, els, (a, b, c, d) = branch_setup()
    uf.union(then, a, b)
    uf.union(then, b, d)
    assert uf.equiv(then, a, d)
    assert not uf.equiv(BOTTOM, a, d)


def test_smaller_id_is_representative():
    lat, uf, then, els, (a, b, c, d) = branch_setup()
    assert uf.union(BOTTOM, d, b) == b
    assert uf.union(then, c, a) == a


def test_partition_counts_monotone_up_the_lattice():
    lat, uf, then, els, (a, b, c, d) = branch_setup()
    uf.union(then, a, b)
    uf.union(then, c, d)
    uf.union(BOTTOM, a, c)
    assert len(uf.partition(then)) <= len(uf.partition(BOTTOM))


def test_intersection_promotes_shared_equalities():
    # ternary-elimination shape: tern ~ body ~ true in both branches
    lat, uf, then, els, (tern, true, gt, le) = branch_setup()
    uf.union(then, tern, gt)
    uf.union(then, gt, true)
    uf.union(els, tern, le)
    uf.union(els, le, true)
    assert not uf.equiv(BOTTOM, tern, true)
    n = uf.intersect_into(BOTTOM, then, els)
    assert n == 1
    assert uf.equiv(BOTTOM, tern, true)
    assert not uf.equiv(BOTTOM, gt, true)
    assert not uf.equiv(BOTTOM, le, true)


def test_intersection_with_itself_promotes_everything():
    lat, uf, then, els, (a, b, c, d) = branch_setup()
    uf.union(then, a, b)
    uf.union(then, c, d)
    uf.intersect_into(BOTTOM, then, then)
    assert uf.partition(BOTTOM) == uf.partition(then)


def test_intersect_requires_lower_context():
    lat, uf, then, els, ids = branch_setup()
    with pytest.raises(NotBelow):
        uf.intersect_into(then, els, els)


def test_unknown_ids_and_contexts():
    lat, uf, then, els, ids = branch_setup()
    with pytest.raises(UnknownNode):
        uf.find(BOTTOM, 99)
    with pytest.raises(UnknownContext):
        uf.find(17, 0)


def test_late_context_sees_earlier_unions():
    lat = ContextLattice()
    s = lat.declare_context("s", {BOTTOM})
    uf = LayeredUnionFind(lat)
    a, b, c = (uf.make_set() for _ in range(3))
    uf.union(s, a, b)
    uf.union(BOTTOM, b, c)
    t = lat.declare_context("t", {s})
    uf.register_context(t)
    assert uf.equiv(t, a, b)
    assert uf.equiv(t, a, c)
    assert uf.equiv(s, a, c)
    assert not uf.equiv(BOTTOM, a, b)


def test_base_union_rekeys_overlay_entries():
    # overlay key loses its base-canonicity when a smaller id joins its class
    lat = ContextLattice()
    s = lat.declare_context("s", {BOTTOM})
    uf = LayeredUnionFind(lat)
    i0, i1, i2, i3, i4, i5 = (uf.make_set() for _ in range(6))
    uf.union(s, i5, i2)      # overlay entry keyed 5
    uf.union(BOTTOM, i3, i5)  # 5's base root becomes 3
    assert uf.equiv(s, i5, i2)
    assert uf.equiv(s, i3, i2)
    assert not uf.equiv(BOTTOM, i5, i2)
    uf.union(BOTTOM, i0, i3)  # and again down to 0
    assert uf.equiv(s, i0, i2)
    assert uf.find(s, i2) == 0


# randomized scripts against the naive set-based model


def run_random_script(seed: int, n_ops: int = 18, max_ids: int = 8, max_ctx: int = 5):
    rng = random.Random(seed)
    lat = ContextLattice()
    uf = LayeredUnionFind(lat)
    ref = NaiveLayered(lat)
    for _ in range(rng.randint(1, 3)):
        uf.make_set()
        ref.make_set()

    pair_history = []

    def snapshot():
        return {c: blocks_to_pairs(uf.partition(c)) for c in lat.ids()}

    for _ in range(n_ops):
        op = rng.random()
        if op < 0.15 and len(lat) < max_ctx:
            existing = list(lat.ids())
            covers = set(rng.sample(existing, k=rng.randint(1, min(2, len(existing)))))
            try:
                cid = lat.declare_context(f"c{len(lat)}", covers)
            except NotALattice:
                continue
            uf.register_context(cid)
        elif op < 0.3 and ref.n < max_ids:
            uf.make_set()
            ref.make_set()
        elif op < 0.8 and ref.n >= 2:
            ctx = rng.randrange(len(lat))
            a, b = rng.randrange(ref.n), rng.randrange(ref.n)
            uf.union(ctx, a, b)
            ref.union(ctx, a, b)
        elif ref.n >= 2:
            c1, c2 = rng.randrange(len(lat)), rng.randrange(len(lat))
            lowers = [c for c in lat.ids() if lat.leq(c, c1) and lat.leq(c, c2)]
            lo = rng.choice(lowers)
            before = len(uf.partition(lo))
            n_new = uf.intersect_into(lo, c1, c2)
            ref.intersect_into(lo, c1, c2)
            assert n_new == before - len(uf.partition(lo))
        pair_history.append(snapshot())

    for c in lat.ids():
        assert uf.partition(c) == ref.partition(c), f"seed={seed} ctx={c}"
    for prev, cur in zip(pair_history, pair_history[1:]):
        for c in prev:
            assert prev[c] <= cur[c], f"relation shrank, seed={seed}"
    return lat, uf


def test_thousand_random_scripts_match_oracle():
    for seed in range(1200):
        run_random_script(seed)


def test_order_preservation_and_quotient_properties():
    for seed in range(400):
        lat, uf = run_random_script(seed * 7919 + 13)
        parts = {c: uf.partition(c) for c in lat.ids()}
        for c1 in lat.ids():
            for c2 in lat.ids():
                if not lat.leq(c1, c2):
                    continue
                fine, coarse = parts[c1], parts[c2]
                assert blocks_to_pairs(fine) <= blocks_to_pairs(coarse)
                assert len(coarse) <= len(fine)
                # every coarse block is an exact union of fine blocks
                for block in coarse:
                    covered = [f for f in fine if f <= block]
                    assert frozenset().union(*covered) == block


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=150, deadline=None)
def test_random_scripts_hypothesis(seed):
    run_random_script(seed, n_ops=12, max_ids=6, max_ctx=4)
