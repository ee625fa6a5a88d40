"""Contextual e-graph: a global term store over per-context equivalences.

E-nodes are stored once, keyed by their symbol and bottom-canonical children.
Only the equivalence relation is contextual, so a merge at a context never
copies nodes; it just coarsens that context's partition (and, by order
preservation, every context above it).

rebuild() restores congruence separately in every context: after it returns,
any two stored nodes with the same symbol and children equal at context c
belong to classes equal at c. Contexts are processed bottom-up so that base
repairs feed contextual ones; congruence unions discovered at c are recorded
at c, the lowest context that justifies them.

Single-writer: all mutation goes through one engine thread. Reads between
mutations (stats, class_nodes, find) are safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    ArityMismatch,
    DuplicateSymbol,
    UnknownNode,
    UnknownSymbol,
)
from .lattice import BOTTOM, ContextId, ContextLattice
from .layered_uf import LayeredUnionFind, NodeId

ClassId = NodeId


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    arity: int

    def __repr__(self):
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class ENode:
    symbol: FunctionSymbol
    children: tuple[ClassId, ...]


@dataclass(frozen=True)
class Term:
    """A ground tree-shaped term, by symbol name (resolved at intern time)."""

    symbol: str
    children: tuple["Term", ...] = ()

    def __str__(self):
        if not self.children:
            return self.symbol
        return f"({self.symbol} {' '.join(map(str, self.children))})"


def term(symbol: str, *children: Term) -> Term:
    return Term(symbol, tuple(children))


class EGraph:
    def __init__(self, lattice: ContextLattice | None = None):
        self.lattice = lattice or ContextLattice()
        self.uf = LayeredUnionFind(self.lattice)
        self._symbols: dict[tuple[str, int], FunctionSymbol] = {}
        self._arities: dict[str, set[int]] = {}
        # node -> class holding it; keys use bottom-canonical children
        self._nodes: dict[ENode, ClassId] = {}
        # contexts touched since the last rebuild
        self.pending: set[ContextId] = set()
        # bumped on any mutation; lets views cache safely
        self.version = 0

    # symbols

    def declare_function(self, name: str, arity: int) -> FunctionSymbol:
        key = (name, arity)
        if key in self._symbols:
            raise DuplicateSymbol(f"function {name}/{arity} already declared")
        sym = FunctionSymbol(name, arity)
        self._symbols[key] = sym
        self._arities.setdefault(name, set()).add(arity)
        return sym

    def symbol(self, name: str, arity: int) -> FunctionSymbol:
        try:
            return self._symbols[(name, arity)]
        except KeyError:
            pass
        if name in self._arities:
            raise ArityMismatch(
                f"{name} is declared with arity {sorted(self._arities[name])}, not {arity}"
            )
        raise UnknownSymbol(f"function {name!r} is not declared")

    def symbols(self) -> list[FunctionSymbol]:
        return list(self._symbols.values())

    # contexts

    def declare_context(self, name: str, covers: set[ContextId]) -> ContextId:
        cid = self.lattice.declare_context(name, covers)
        self.uf.register_context(cid)
        self.version += 1
        return cid

    def context(self, name: str) -> ContextId:
        return self.lattice.id_of(name)

    # nodes and terms

    def find(self, ctx: ContextId, c: ClassId) -> ClassId:
        return self.uf.find(ctx, c)

    def canonical_node(self, ctx: ContextId, node: ENode) -> ENode:
        return ENode(node.symbol, tuple(self.uf.find(ctx, ch) for ch in node.children))

    def add_node(self, symbol: FunctionSymbol, children: tuple[ClassId, ...]) -> ClassId:
        """Hash-cons an e-node; fresh nodes start as singleton classes."""
        if len(children) != symbol.arity:
            raise ArityMismatch(
                f"{symbol!r} applied to {len(children)} children"
            )
        node = ENode(symbol, tuple(self.uf.find(BOTTOM, ch) for ch in children))
        existing = self._nodes.get(node)
        if existing is not None:
            return self.uf.find(BOTTOM, existing)
        cls = self.uf.make_set()
        self._nodes[node] = cls
        # a new node can collide with old ones under contextual equalities
        self.pending.add(BOTTOM)
        self.version += 1
        return cls

    def intern(self, t: Term) -> ClassId:
        """Add a term bottom-up; idempotent on structurally equal terms.

        Returns a bottom representative: apply find(ctx, .) before any
        context-sensitive comparison.
        """
        children = tuple(self.intern(c) for c in t.children)
        sym = self.symbol(t.symbol, len(t.children))
        return self.add_node(sym, children)

    def intern_lookup(self, t: Term) -> ClassId:
        """Class of an already present term; KeyError if any piece is missing."""
        children = tuple(self.intern_lookup(c) for c in t.children)
        sym = self.symbol(t.symbol, len(t.children))
        node = ENode(sym, tuple(self.uf.find(BOTTOM, ch) for ch in children))
        return self.uf.find(BOTTOM, self._nodes[node])

    def merge(self, ctx: ContextId, a: ClassId, b: ClassId) -> ClassId:
        """Union two classes at ctx (visible at every context above)."""
        if self.uf.union_new(ctx, a, b):
            for c in self.lattice.upset(ctx):
                self.pending.add(c)
            self.version += 1
        return self.uf.find(ctx, a)

    def equiv(self, ctx: ContextId, a: ClassId, b: ClassId) -> bool:
        return self.uf.equiv(ctx, a, b)

    def intersect_into(self, lo: ContextId, c1: ContextId, c2: ContextId) -> int:
        """Promote equalities shared by c1 and c2 down to lo."""
        n = self.uf.intersect_into(lo, c1, c2)
        if n:
            for c in self.lattice.upset(lo):
                self.pending.add(c)
            self.version += 1
        return n

    # congruence maintenance

    def rebuild(self) -> int:
        """Restore per-context congruence; returns the number of repairs."""
        if not self.pending:
            return 0
        repairs = 0
        changed = True
        while changed:
            changed = False
            r = self._rebuild_base()
            repairs += r
            changed |= r > 0
            for ctx in self.lattice.topo_order():
                if ctx == BOTTOM:
                    continue
                r = self._congruence_pass(ctx)
                repairs += r
                changed |= r > 0
        self.pending.clear()
        return repairs

    def _rebuild_base(self) -> int:
        repairs = 0
        while True:
            fresh: dict[ENode, ClassId] = {}
            merges: list[tuple[ClassId, ClassId]] = []
            for node, cls in self._nodes.items():
                canon = self.canonical_node(BOTTOM, node)
                root = self.uf.find(BOTTOM, cls)
                other = fresh.get(canon)
                if other is None:
                    fresh[canon] = root
                elif other != root:
                    merges.append((other, root))
            self._nodes = fresh
            if not merges:
                return repairs
            for a, b in merges:
                if self.uf.union_new(BOTTOM, a, b):
                    repairs += 1
            self.version += 1

    def _congruence_pass(self, ctx: ContextId) -> int:
        repairs = 0
        while True:
            sig: dict[ENode, ClassId] = {}
            merges: list[tuple[ClassId, ClassId]] = []
            for node, cls in self._nodes.items():
                canon = self.canonical_node(ctx, node)
                root = self.uf.find(ctx, cls)
                other = sig.get(canon)
                if other is None:
                    sig[canon] = root
                elif other != root:
                    merges.append((other, root))
            if not merges:
                return repairs
            for a, b in merges:
                if self.uf.union_new(ctx, a, b):
                    repairs += 1
            self.version += 1

    # views

    def class_ids(self, ctx: ContextId) -> list[ClassId]:
        """Canonical representatives of every class at ctx, ascending."""
        self.lattice.check(ctx)
        return sorted({self.uf.find(ctx, c) for c in self._nodes.values()})

    def class_of_node(self, node: ENode) -> ClassId:
        canon = self.canonical_node(BOTTOM, node)
        try:
            return self.uf.find(BOTTOM, self._nodes[canon])
        except KeyError:
            raise UnknownNode(f"node {node} is not stored") from None

    def nodes(self) -> dict[ENode, ClassId]:
        return self._nodes

    def class_nodes(self, ctx: ContextId, c: ClassId) -> set[ENode]:
        """Deduplicated ctx-canonical nodes of c's class at ctx."""
        root = self.uf.find(ctx, c)
        return {
            self.canonical_node(ctx, node)
            for node, cls in self._nodes.items()
            if self.uf.find(ctx, cls) == root
        }

    def stats(self, ctx: ContextId) -> tuple[int, int]:
        """(class count, canonical node count) over the ctx view."""
        classes = self.class_ids(ctx)
        canon = {self.canonical_node(ctx, node) for node in self._nodes}
        return len(classes), len(canon)

    def term_in_class(self, ctx: ContextId, t: Term, c: ClassId) -> bool:
        """Is t derivable from c's class over the ctx-canonical database?"""
        sym = self.symbol(t.symbol, len(t.children))
        for node in self.class_nodes(ctx, c):
            if node.symbol != sym:
                continue
            if all(
                self.term_in_class(ctx, sub, ch)
                for sub, ch in zip(t.children, node.children)
            ):
                return True
        return False
