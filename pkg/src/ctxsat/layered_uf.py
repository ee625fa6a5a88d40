"""Layered union-find: one equivalence relation per context.

The bottom context's relation lives in an ordinary parent forest. Every
non-bottom context holds a sparse overlay dict mapping a base-canonical id to
a smaller id it was merged with in that context. A find at context c chases
base links and c's overlay links alternately; since every link points to a
strictly smaller id and the base representative is the minimum of its class,
the chase terminates at the class minimum, which doubles as the deterministic
representative.

Two maintenance duties keep overlays coherent:

- a union recorded at context c is written into the overlay of every context
  above c, so order preservation (c1 <= c2 implies the relation at c1 is
  contained in the one at c2) holds by construction;
- a union at bottom can strand overlay keys that are no longer
  base-canonical, so base unions immediately re-key affected overlay entries
  (the relation itself is unchanged by the repair).

Contexts declared after unions have happened start from a copy of their
covers' overlays, which preserves order for late arrivals.

Single-writer; partitions are returned as frozen sets safe to share.
"""

from __future__ import annotations

from collections import defaultdict

from .errors import NotBelow, UnknownNode
from .lattice import BOTTOM, ContextId, ContextLattice

NodeId = int


class LayeredUnionFind:
    def __init__(self, lattice: ContextLattice):
        self.lattice = lattice
        self._parent: list[int] = []
        self._overlay: dict[ContextId, dict[int, int]] = {}
        # successful unions per recording context, for reports and strategy choice
        self.unions_at: dict[ContextId, int] = defaultdict(int)
        for c in lattice.ids():
            if c != BOTTOM:
                self.register_context(c)

    def __len__(self) -> int:
        return len(self._parent)

    def register_context(self, ctx: ContextId) -> None:
        """Initialize a freshly declared context from its covers' relations."""
        if ctx in self._overlay or ctx == BOTTOM:
            return
        self._overlay[ctx] = {}
        for cover in self.lattice.covers(ctx):
            if cover == BOTTOM:
                continue
            for k, v in list(self._overlay[cover].items()):
                self._link_in_layer(ctx, k, v)

    def make_set(self) -> NodeId:
        i = len(self._parent)
        self._parent.append(i)
        return i

    def find(self, ctx: ContextId, x: NodeId) -> NodeId:
        self._check_node(x)
        self.lattice.check(ctx)
        r = self._base_find(x)
        if ctx == BOTTOM:
            return r
        ov = self._overlay_for(ctx)
        chain = []
        while True:
            nxt = ov.get(r)
            if nxt is None:
                break
            chain.append(r)
            r = self._base_find(nxt)
        for k in chain:
            if k != r:
                ov[k] = r
        return r

    def equiv(self, ctx: ContextId, a: NodeId, b: NodeId) -> bool:
        return self.find(ctx, a) == self.find(ctx, b)

    def union(self, ctx: ContextId, a: NodeId, b: NodeId) -> NodeId:
        self._union(ctx, a, b)
        return self.find(ctx, a)

    def union_new(self, ctx: ContextId, a: NodeId, b: NodeId) -> bool:
        """Like union, but report whether anything actually merged at ctx."""
        return self._union(ctx, a, b)

    def partition(self, ctx: ContextId) -> frozenset[frozenset[NodeId]]:
        self.lattice.check(ctx)
        blocks: dict[int, list[int]] = defaultdict(list)
        for i in range(len(self._parent)):
            blocks[self.find(ctx, i)].append(i)
        return frozenset(frozenset(b) for b in blocks.values())

    def intersect_into(self, lo: ContextId, c1: ContextId, c2: ContextId) -> int:
        """Coarsen lo by every equality shared between c1 and c2.

        The new relation at lo is the transitive closure of the old one
        together with the intersection of the relations at c1 and c2. Ids are
        grouped on the pair of their representatives in c1 and c2; ids in one
        group are pairwise equal in both contexts, so they may be merged at
        lo. Returns the number of merges that were new at lo.
        """
        if not (self.lattice.leq(lo, c1) and self.lattice.leq(lo, c2)):
            raise NotBelow(
                f"intersect target {self.lattice.name(lo)!r} is not below both "
                f"{self.lattice.name(c1)!r} and {self.lattice.name(c2)!r}"
            )
        groups: dict[tuple[int, int], list[int]] = defaultdict(list)
        for i in range(len(self._parent)):
            groups[(self.find(c1, i), self.find(c2, i))].append(i)
        count = 0
        for members in groups.values():
            head = members[0]
            for other in members[1:]:
                if self._union(lo, head, other):
                    count += 1
        return count

    def delta_size(self, ctx: ContextId) -> int:
        """Number of contextual links recorded at or below ctx (bottom excluded)."""
        self.lattice.check(ctx)
        if ctx == BOTTOM:
            return 0
        return len(self._overlay_for(ctx))

    def total_unions(self) -> int:
        return sum(self.unions_at.values())

    # internal

    def _union(self, ctx: ContextId, a: NodeId, b: NodeId) -> bool:
        if ctx == BOTTOM:
            merged = self._base_union(a, b)
        else:
            if self.find(ctx, a) == self.find(ctx, b):
                return False
            merged = False
            for u in sorted(self.lattice.upset(ctx)):
                merged |= self._link_in_layer(u, a, b)
        if merged:
            self.unions_at[ctx] += 1
        return merged

    def _base_find(self, x: int) -> int:
        p = self._parent
        r = x
        while p[r] != r:
            r = p[r]
        while p[x] != r:
            p[x], x = r, p[x]
        return r

    def _base_union(self, a: int, b: int) -> bool:
        ra, rb = self._base_find(a), self._base_find(b)
        if ra == rb:
            return False
        winner, loser = min(ra, rb), max(ra, rb)
        self._parent[loser] = winner
        for ctx, ov in self._overlay.items():
            if loser in ov:
                p = ov.pop(loser)
                self._link_in_layer(ctx, winner, p)
        return True

    def _link_in_layer(self, ctx: ContextId, a: int, b: int) -> bool:
        ra, rb = self.find(ctx, a), self.find(ctx, b)
        if ra == rb:
            return False
        winner, loser = min(ra, rb), max(ra, rb)
        self._overlay[ctx][loser] = winner
        return True

    def _overlay_for(self, ctx: ContextId) -> dict[int, int]:
        self.lattice.check(ctx)
        try:
            return self._overlay[ctx]
        except KeyError:
            self.register_context(ctx)
            return self._overlay[ctx]

    def _check_node(self, x: NodeId) -> None:
        if not isinstance(x, int) or not 0 <= x < len(self._parent):
            raise UnknownNode(f"node id {x!r} was never created")
