"""Cost-based extraction of a concrete term from a class under a context.

Costs are summed over the term tree with a per-symbol model (default 1 per
node). Class costs are computed by bottom-up relaxation to a fixpoint;
classes whose every derivation is cyclic, or is blocked by the forbidden
symbol, keep infinite cost and raise NoFiniteTerm.

Choice among equal-cost nodes is deterministic: smaller symbol name first,
then lexicographically smaller canonical child ids. Extraction is a pure
function of a rebuilt graph and may run concurrently per class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .egraph import ClassId, EGraph, ENode, Term
from .errors import NoFiniteTerm
from .lattice import ContextId
from .views import CanonicalView, build_view


@dataclass
class CostModel:
    """Per-symbol-name costs; anything unlisted costs `default`."""

    costs: dict[str, float] = field(default_factory=dict)
    default: float = 1

    def __post_init__(self):
        if self.default < 0 or any(v < 0 for v in self.costs.values()):
            raise ValueError("costs must be non-negative")

    def of(self, name: str) -> float:
        return self.costs.get(name, self.default)

    def set(self, name: str, value: float) -> None:
        if value < 0:
            raise ValueError("costs must be non-negative")
        self.costs[name] = value

    def term_cost(self, t: Term) -> float:
        return self.of(t.symbol) + sum(self.term_cost(c) for c in t.children)


@dataclass(frozen=True)
class ExtractResult:
    term: Term
    cost: float


def _node_key(node: ENode):
    return (node.symbol.name, node.children)


def _forbidden(forbid) -> set[str]:
    if forbid is None:
        return set()
    if isinstance(forbid, str):
        return {forbid}
    return {getattr(f, "name", f) for f in forbid}


def extract_from_view(
    view: CanonicalView,
    root: ClassId,
    model: CostModel | None = None,
    forbid=None,
) -> ExtractResult:
    model = model or CostModel()
    banned = _forbidden(forbid)
    usable: dict[ClassId, list[ENode]] = {
        c: [n for n in nodes if n.symbol.name not in banned]
        for c, nodes in view.classes.items()
    }
    cost: dict[ClassId, float] = {c: math.inf for c in view.classes}

    changed = True
    while changed:
        changed = False
        for c, nodes in usable.items():
            best = cost[c]
            for node in nodes:
                k = model.of(node.symbol.name)
                for ch in node.children:
                    k += cost.get(ch, math.inf)
                    if k == math.inf:
                        break
                if k < best:
                    best = k
            if best < cost[c]:
                cost[c] = best
                changed = True

    if root not in cost or cost[root] == math.inf:
        raise NoFiniteTerm(
            f"class {root} has no finite-cost term"
            + (f" avoiding {forbid!r}" if forbid else "")
        )

    # candidates achieving the class optimum, in deterministic preference order
    candidates: dict[ClassId, list[ENode]] = {}
    for c, nodes in usable.items():
        if cost[c] == math.inf:
            continue
        achieving = []
        for node in nodes:
            k = model.of(node.symbol.name)
            for ch in node.children:
                k += cost.get(ch, math.inf)
                if k == math.inf:
                    break
            if k == cost[c]:
                achieving.append(node)
        candidates[c] = sorted(achieving, key=_node_key)

    memo: dict[ClassId, Term] = {}

    class _Cycle(Exception):
        pass

    def build(c: ClassId, stack: frozenset[ClassId]) -> Term:
        got = memo.get(c)
        if got is not None:
            return got
        if c in stack:
            raise _Cycle
        stack = stack | {c}
        for node in candidates[c]:
            try:
                children = tuple(build(ch, stack) for ch in node.children)
            except _Cycle:
                continue
            t = Term(node.symbol.name, children)
            memo[c] = t
            return t
        raise _Cycle

    t = build(root, frozenset())
    return ExtractResult(t, cost[root])


def extract(
    eg: EGraph,
    ctx: ContextId,
    c: ClassId,
    model: CostModel | None = None,
    forbid=None,
) -> ExtractResult:
    """Minimum-cost term of c's class over the ctx-canonical database."""
    view = build_view(eg, ctx)
    return extract_from_view(view, eg.find(ctx, c), model, forbid)
