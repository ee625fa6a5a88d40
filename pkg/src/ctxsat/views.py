"""Canonicalized per-context databases and maps between them.

A canonical view of a context replaces every child reference with the child's
representative in that context and deduplicates the resulting nodes. Views of
coarser contexts are never larger than views of finer ones, and the factoring
map between the two quotients is total and well defined.

E-matching can either run against a materialized (cached) view, trading space
for time, or canonicalize on the fly per query. Both yield identical match
sets; the choice is driven by how many contextual links a context carries.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass

from .egraph import ClassId, EGraph, ENode
from .errors import NotBelow
from .lattice import ContextId


@dataclass(frozen=True)
class CanonicalView:
    """Immutable snapshot of one context's canonicalized database."""

    context: ContextId
    classes: dict[ClassId, tuple[ENode, ...]]
    version: int

    def class_ids(self) -> list[ClassId]:
        return sorted(self.classes)

    def nodes_of(self, c: ClassId) -> tuple[ENode, ...]:
        return self.classes.get(c, ())

    def node_count(self) -> int:
        return sum(len(ns) for ns in self.classes.values())

    def class_count(self) -> int:
        return len(self.classes)


def build_view(eg: EGraph, ctx: ContextId) -> CanonicalView:
    eg.lattice.check(ctx)
    grouped: dict[ClassId, set[ENode]] = defaultdict(set)
    for node, cls in eg.nodes().items():
        grouped[eg.find(ctx, cls)].add(eg.canonical_node(ctx, node))
    classes = {
        c: tuple(sorted(ns, key=lambda n: (n.symbol.name, n.symbol.arity, n.children)))
        for c, ns in grouped.items()
    }
    return CanonicalView(ctx, classes, eg.version)


class ViewCache:
    """Materialized views keyed by context, invalidated by the graph version."""

    def __init__(self, eg: EGraph):
        self.eg = eg
        self._views: dict[ContextId, CanonicalView] = {}

    def get(self, ctx: ContextId) -> CanonicalView:
        view = self._views.get(ctx)
        if view is None or view.version != self.eg.version:
            view = build_view(self.eg, ctx)
            self._views[ctx] = view
        return view


@dataclass(frozen=True)
class QMap:
    """Factoring map from a finer context's classes onto a coarser one's."""

    fine: ContextId
    coarse: ContextId
    mapping: dict[ClassId, ClassId]

    def __call__(self, fine_class: ClassId) -> ClassId:
        return self.mapping[fine_class]


def qmap(eg: EGraph, fine: ContextId, coarse: ContextId) -> QMap:
    if not eg.lattice.leq(fine, coarse):
        raise NotBelow(
            f"{eg.lattice.name(fine)!r} is not below {eg.lattice.name(coarse)!r}"
        )
    mapping: dict[ClassId, ClassId] = {}
    for i in range(len(eg.uf)):
        mapping[eg.find(fine, i)] = eg.find(coarse, i)
    return QMap(fine, coarse, mapping)


class Strategy(enum.Enum):
    MATERIALIZED = "materialized"
    ON_THE_FLY = "on-the-fly"


DEFAULT_MATERIALIZE_THRESHOLD = 16


def choose_strategy(
    eg: EGraph, ctx: ContextId, threshold: int = DEFAULT_MATERIALIZE_THRESHOLD
) -> Strategy:
    """Materialize once a context carries at least `threshold` contextual links.

    Many contextual equalities make the on-the-fly join expensive, so the
    cached canonical copy pays off; a context with few extra equalities is
    cheaper to canonicalize per query. Threshold 0 always materializes.
    """
    if eg.uf.delta_size(ctx) >= threshold:
        return Strategy.MATERIALIZED
    return Strategy.ON_THE_FLY


class MaterializedProvider:
    """Serves e-matching from a cached snapshot."""

    def __init__(self, view: CanonicalView):
        self.view = view

    def class_ids(self) -> list[ClassId]:
        return self.view.class_ids()

    def nodes_of(self, c: ClassId) -> tuple[ENode, ...]:
        return self.view.nodes_of(c)


class OnTheFlyProvider:
    """Canonicalizes per query without retaining a snapshot.

    Work is done lazily per requested class and discarded with the provider.
    """

    def __init__(self, eg: EGraph, ctx: ContextId):
        self.eg = eg
        self.ctx = ctx
        self._memo: dict[ClassId, tuple[ENode, ...]] = {}

    def class_ids(self) -> list[ClassId]:
        return self.eg.class_ids(self.ctx)

    def nodes_of(self, c: ClassId) -> tuple[ENode, ...]:
        got = self._memo.get(c)
        if got is None:
            eg, ctx = self.eg, self.ctx
            found = {
                eg.canonical_node(ctx, node)
                for node, cls in eg.nodes().items()
                if eg.find(ctx, cls) == c
            }
            got = tuple(
                sorted(found, key=lambda n: (n.symbol.name, n.symbol.arity, n.children))
            )
            self._memo[c] = got
        return got


def provider_for(
    eg: EGraph,
    ctx: ContextId,
    views: ViewCache,
    strategy: Strategy | None = None,
    threshold: int = DEFAULT_MATERIALIZE_THRESHOLD,
):
    if strategy is None:
        strategy = choose_strategy(eg, ctx, threshold)
    if strategy is Strategy.MATERIALIZED:
        return MaterializedProvider(views.get(ctx))
    return OnTheFlyProvider(eg, ctx)
