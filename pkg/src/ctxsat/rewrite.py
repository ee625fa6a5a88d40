"""Rewrite rules, scoping constructs, and the saturation loop.

Rules are tree patterns with variables. A rule's scope decides which
contexts it fires in: everywhere (every declared context), a single named
context, or every context at or above a named one. A match found at context
c is merged at c, never below, so derived equalities live exactly where
their justification does.

Scoping constructs introduce contexts during the run:

- a conditional node seen at context g gets fresh branch contexts covering g
  in which the condition is equated with the true and false constants and
  the node with the respective branch body; the branch contexts of one
  conditional are later intersected back into g (proof by cases);
- a lambda application seen at g gets a body context covering g in which the
  bound variable is equated with the argument; once the body class contains
  a term that avoids the variable, a cheapest such term is extracted and
  equated with the application at g.

Where a conditional construct names an equality symbol, any class that a
context proves equal to true and that contains an equality node has that
equality's operands merged in the same context.

Constructs discover their nodes by occurrence: the engine walks the graph
from the root terms, descending into branch bodies under the branch context
and everywhere else under the current one, so nested conditionals land their
intersections at the enclosing branch context rather than at bottom.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field

from .egraph import ClassId, EGraph, ENode, FunctionSymbol, Term
from .errors import DuplicateRule, UnboundRhsVariable
from .extract import CostModel, extract
from .lattice import BOTTOM, ContextId
from .views import (
    DEFAULT_MATERIALIZE_THRESHOLD,
    Strategy,
    ViewCache,
    build_view,
    provider_for,
)


@dataclass(frozen=True)
class PatternVar:
    name: str

    def __str__(self):
        return f"?{self.name}"


@dataclass(frozen=True)
class PatternApp:
    symbol: FunctionSymbol
    args: tuple["Pattern", ...] = ()

    def __str__(self):
        if not self.args:
            return self.symbol.name
        return f"({self.symbol.name} {' '.join(map(str, self.args))})"


Pattern = PatternVar | PatternApp


def pattern_vars(p: Pattern) -> set[str]:
    if isinstance(p, PatternVar):
        return {p.name}
    out: set[str] = set()
    for a in p.args:
        out |= pattern_vars(a)
    return out


@dataclass(frozen=True)
class Everywhere:
    def __str__(self):
        return "everywhere"


@dataclass(frozen=True)
class AtContext:
    context: str

    def __str__(self):
        return self.context


@dataclass(frozen=True)
class AtOrAbove:
    context: str

    def __str__(self):
        return f"at-or-above {self.context}"


RuleScope = Everywhere | AtContext | AtOrAbove


@dataclass(frozen=True)
class Rule:
    name: str
    lhs: Pattern
    rhs: Pattern
    scope: RuleScope = Everywhere()


@dataclass(frozen=True)
class ConditionalScope:
    if_sym: FunctionSymbol
    true_sym: FunctionSymbol
    false_sym: FunctionSymbol
    eq_sym: FunctionSymbol | None = None


@dataclass(frozen=True)
class LambdaScope:
    app_sym: FunctionSymbol
    lam_sym: FunctionSymbol
    var_sym: FunctionSymbol


@dataclass
class _CondInstance:
    gamma: ContextId
    cond: ClassId
    then_ctx: ContextId
    else_ctx: ContextId
    construct: ConditionalScope
    # every (conditional class, then body, else body) sharing this condition
    branches: list[tuple[ClassId, ClassId, ClassId]] = field(default_factory=list)


@dataclass
class _LambdaInstance:
    gamma: ContextId
    app_class: ClassId
    fn_class: ClassId
    value_class: ClassId
    body_ctx: ContextId
    construct: LambdaScope


@dataclass
class SaturationReport:
    iterations: int = 0
    rule_applications: int = 0
    new_classes: int = 0
    new_unions_per_context: dict[str, int] = field(default_factory=dict)
    saturated: bool = False


class Engine:
    """One e-graph plus its rules, scope constructs, and saturation state."""

    def __init__(
        self,
        egraph: EGraph | None = None,
        cost_model: CostModel | None = None,
        materialize_threshold: int = DEFAULT_MATERIALIZE_THRESHOLD,
    ):
        self.eg = egraph or EGraph()
        self.views = ViewCache(self.eg)
        self.cost_model = cost_model or CostModel()
        self.materialize_threshold = materialize_threshold
        self.rules: list[Rule] = []
        self.conditionals: list[ConditionalScope] = []
        self.lambdas: list[LambdaScope] = []
        self.roots: list[ClassId] = []
        self._cond_instances: list[_CondInstance] = []
        self._lambda_instances: list[_LambdaInstance] = []

    # registration

    def add_rule(self, rule: Rule) -> None:
        if any(r.name == rule.name for r in self.rules):
            raise DuplicateRule(f"rule {rule.name!r} already registered")
        unbound = pattern_vars(rule.rhs) - pattern_vars(rule.lhs)
        if unbound:
            raise UnboundRhsVariable(
                f"rule {rule.name!r}: rhs variables {sorted(unbound)} "
                f"do not appear in the lhs"
            )
        self.rules.append(rule)

    def add_conditional_scope(
        self, if_name: str, true_name: str, false_name: str, eq_name: str | None = None
    ) -> ConditionalScope:
        sc = ConditionalScope(
            self.eg.symbol(if_name, 3),
            self.eg.symbol(true_name, 0),
            self.eg.symbol(false_name, 0),
            self.eg.symbol(eq_name, 2) if eq_name else None,
        )
        self.eg.add_node(sc.true_sym, ())
        self.eg.add_node(sc.false_sym, ())
        self.conditionals.append(sc)
        return sc

    def add_lambda_scope(self, app_name: str, lam_name: str, var_name: str) -> LambdaScope:
        sc = LambdaScope(
            self.eg.symbol(app_name, 2),
            self.eg.symbol(lam_name, 2),
            self.eg.symbol(var_name, 1),
        )
        self.lambdas.append(sc)
        return sc

    def add_root(self, t: Term) -> ClassId:
        cls = self.eg.intern(t)
        self.roots.append(cls)
        return cls

    # e-matching

    def ematch(
        self,
        ctx: ContextId,
        pattern: Pattern,
        strategy: Strategy | None = None,
    ) -> list[tuple[dict[str, ClassId], ClassId]]:
        """All (substitution, root class) pairs making the pattern present in
        the ctx-canonical database, deduplicated under find(ctx)."""
        self.eg.lattice.check(ctx)
        provider = provider_for(
            self.eg, ctx, self.views, strategy, self.materialize_threshold
        )
        results: dict = {}
        for root in provider.class_ids():
            for subst in _match(provider, pattern, root, {}):
                key = (root, tuple(sorted(subst.items())))
                results[key] = (subst, root)
        return [results[k] for k in sorted(results)]

    def _instantiate(self, pat: Pattern, subst: dict[str, ClassId]) -> ClassId:
        if isinstance(pat, PatternVar):
            return subst[pat.name]
        children = tuple(self._instantiate(a, subst) for a in pat.args)
        return self.eg.add_node(pat.symbol, children)

    def _admissible_contexts(self, scope: RuleScope) -> list[ContextId]:
        lat = self.eg.lattice
        if isinstance(scope, Everywhere):
            return lat.topo_order()
        if isinstance(scope, AtContext):
            return [lat.id_of(scope.context)]
        return sorted(lat.upset(lat.id_of(scope.context)))

    # scope discovery

    def apply_scopes(self) -> int:
        """Walk occurrences from the roots, instantiating scope constructs.

        Returns the number of new scope instances. Existing instances get
        their defining merges re-asserted (no-ops once established), which
        also picks up members that have joined the relevant classes since.
        """
        if not self.conditionals and not self.lambdas:
            return 0
        eg = self.eg
        members: dict[ClassId, list[ENode]] = defaultdict(list)
        for node, cls in eg.nodes().items():
            members[eg.find(BOTTOM, cls)].append(node)
        for lst in members.values():
            lst.sort(key=lambda n: (n.symbol.name, n.symbol.arity, n.children))

        if_syms = {sc.if_sym: sc for sc in self.conditionals}
        app_syms = {sc.app_sym: sc for sc in self.lambdas}
        lam_syms = {sc.lam_sym for sc in self.lambdas}

        cond_keys = {
            (inst.gamma, eg.find(BOTTOM, inst.cond)): inst
            for inst in self._cond_instances
        }
        lam_keys = {
            (inst.gamma, eg.find(BOTTOM, inst.app_class)): inst
            for inst in self._lambda_instances
        }

        new_instances = 0
        deferred_merges: list[tuple[ContextId, ClassId, ClassId]] = []
        seen: set[tuple[ContextId, ClassId]] = set()
        work = deque((BOTTOM, eg.find(BOTTOM, r)) for r in self.roots)

        while work:
            gamma, cls = work.popleft()
            cls = eg.find(BOTTOM, cls)
            if (gamma, cls) in seen:
                continue
            seen.add((gamma, cls))
            for node in members.get(cls, ()):
                sc = if_syms.get(node.symbol)
                if sc is not None:
                    cond, then_cls, else_cls = node.children
                    work.append((gamma, cond))
                    true_cls = eg.class_of_node(ENode(sc.true_sym, ()))
                    false_cls = eg.class_of_node(ENode(sc.false_sym, ()))
                    if eg.equiv(gamma, cond, true_cls):
                        deferred_merges.append((gamma, cls, then_cls))
                        work.append((gamma, then_cls))
                        continue
                    if eg.equiv(gamma, cond, false_cls):
                        deferred_merges.append((gamma, cls, else_cls))
                        work.append((gamma, else_cls))
                        continue
                    key = (gamma, eg.find(BOTTOM, cond))
                    inst = cond_keys.get(key)
                    if inst is None:
                        then_ctx = self._fresh_context(gamma, "then")
                        else_ctx = self._fresh_context(gamma, "else")
                        inst = _CondInstance(gamma, cond, then_ctx, else_ctx, sc)
                        cond_keys[key] = inst
                        self._cond_instances.append(inst)
                        new_instances += 1
                    branch = (cls, then_cls, else_cls)
                    if branch not in inst.branches:
                        inst.branches.append(branch)
                    work.append((inst.then_ctx, then_cls))
                    work.append((inst.else_ctx, else_cls))
                    continue
                sc = app_syms.get(node.symbol)
                if sc is not None and self._lambda_nodes(node.children[0], sc):
                    fn_cls, value_cls = node.children
                    work.append((gamma, fn_cls))
                    work.append((gamma, value_cls))
                    key = (gamma, cls)
                    inst = lam_keys.get(key)
                    if inst is None:
                        body_ctx = self._fresh_context(gamma, "body")
                        inst = _LambdaInstance(
                            gamma, cls, fn_cls, value_cls, body_ctx, sc
                        )
                        lam_keys[key] = inst
                        self._lambda_instances.append(inst)
                        new_instances += 1
                    for lam_node in self._lambda_nodes(fn_cls, sc):
                        work.append((inst.body_ctx, lam_node.children[1]))
                    continue
                if node.symbol in lam_syms:
                    # body is scoped through applications only
                    continue
                for ch in node.children:
                    work.append((gamma, ch))

        for gamma, a, b in deferred_merges:
            self.eg.merge(gamma, a, b)
        self._assert_scope_merges()
        self._reflect_equalities()
        return new_instances

    def _lambda_nodes(self, fn_cls: ClassId, sc: LambdaScope) -> list[ENode]:
        eg = self.eg
        root = eg.find(BOTTOM, fn_cls)
        return sorted(
            (
                node
                for node, cls in eg.nodes().items()
                if node.symbol == sc.lam_sym and eg.find(BOTTOM, cls) == root
            ),
            key=lambda n: n.children,
        )

    def _assert_scope_merges(self) -> None:
        eg = self.eg
        for inst in self._cond_instances:
            sc = inst.construct
            true_cls = eg.class_of_node(ENode(sc.true_sym, ()))
            false_cls = eg.class_of_node(ENode(sc.false_sym, ()))
            eg.merge(inst.then_ctx, inst.cond, true_cls)
            eg.merge(inst.else_ctx, inst.cond, false_cls)
            for if_cls, then_cls, else_cls in inst.branches:
                eg.merge(inst.then_ctx, if_cls, then_cls)
                eg.merge(inst.else_ctx, if_cls, else_cls)
        for inst in self._lambda_instances:
            sc = inst.construct
            for lam_node in self._lambda_nodes(inst.fn_class, sc):
                binder_cls = lam_node.children[0]
                var_cls = eg.add_node(sc.var_sym, (binder_cls,))
                eg.merge(inst.body_ctx, var_cls, inst.value_class)

    def _reflect_equalities(self) -> None:
        """In any context where an equality node is proven true, merge its
        operands there. Active only for constructs that declare an equality
        symbol."""
        eg = self.eg
        for sc in self.conditionals:
            if sc.eq_sym is None:
                continue
            true_cls = eg.class_of_node(ENode(sc.true_sym, ()))
            eq_nodes = sorted(
                (
                    (node, cls)
                    for node, cls in eg.nodes().items()
                    if node.symbol == sc.eq_sym
                ),
                key=lambda nc: nc[0].children,
            )
            for ctx in eg.lattice.topo_order():
                for node, cls in eq_nodes:
                    if eg.equiv(ctx, cls, true_cls):
                        eg.merge(ctx, node.children[0], node.children[1])

    def _fresh_context(self, gamma: ContextId, kind: str) -> ContextId:
        lat = self.eg.lattice
        prefix = "" if gamma == BOTTOM else f"{lat.name(gamma)}."
        base = f"{prefix}{kind}"
        name = base
        k = 1
        while lat.has_name(name):
            k += 1
            name = f"{base}#{k}"
        return self.eg.declare_context(name, {gamma})

    # promotion

    def apply_intersections(self) -> int:
        """Proof by cases: intersect each conditional's branch relations back
        into its enclosing context."""
        total = 0
        for inst in self._cond_instances:
            total += self.eg.intersect_into(inst.gamma, inst.then_ctx, inst.else_ctx)
        return total

    def avoidable(self, ctx: ContextId, c: ClassId, forbid) -> bool:
        """Does the class contain a derivable term with no forbidden symbol?

        Least fixpoint: a class qualifies once one of its canonical nodes is
        allowed and has only qualifying children.
        """
        forbidden = _forbid_names(forbid)
        view = build_view(self.eg, ctx)
        root = self.eg.find(ctx, c)
        good: set[ClassId] = set()
        changed = True
        while changed:
            changed = False
            for cls, nodes in view.classes.items():
                if cls in good:
                    continue
                for node in nodes:
                    if node.symbol.name in forbidden:
                        continue
                    if all(ch in good for ch in node.children):
                        good.add(cls)
                        changed = True
                        break
        return root in good

    def apply_lambda_lifts(self) -> int:
        """Equate each application with a cheapest binder-free body term."""
        count = 0
        eg = self.eg
        for inst in self._lambda_instances:
            for lam_node in self._lambda_nodes(inst.fn_class, inst.construct):
                binder_cls, body_cls = lam_node.children
                forbid = self._binder_names(binder_cls)
                if not forbid:
                    continue
                if not self.avoidable(inst.body_ctx, body_cls, forbid):
                    continue
                res = extract(eg, inst.body_ctx, body_cls, self.cost_model, forbid)
                lifted = eg.intern(res.term)
                if not eg.equiv(inst.gamma, inst.app_class, lifted):
                    eg.merge(inst.gamma, inst.app_class, lifted)
                    count += 1
        return count

    def _binder_names(self, binder_cls: ClassId) -> set[str]:
        eg = self.eg
        root = eg.find(BOTTOM, binder_cls)
        return {
            node.symbol.name
            for node, cls in eg.nodes().items()
            if node.symbol.arity == 0 and eg.find(BOTTOM, cls) == root
        }

    # saturation

    def run(self, max_iterations: int, iteration_hook=None) -> SaturationReport:
        """Iterate scope introduction, rules, repair, intersection, and
        lifting until nothing changes or the cap is hit."""
        report = SaturationReport()
        eg = self.eg
        start_classes = len(eg.uf)
        start_unions = dict(eg.uf.unions_at)
        for _ in range(max_iterations):
            before_ids = len(eg.uf)
            before_unions = eg.uf.total_unions()
            eg.rebuild()
            new_instances = self.apply_scopes()
            for rule in self.rules:
                for ctx in self._admissible_contexts(rule.scope):
                    for subst, root in self.ematch(ctx, rule.lhs):
                        rhs_cls = self._instantiate(rule.rhs, subst)
                        eg.merge(ctx, root, rhs_cls)
                        report.rule_applications += 1
            eg.rebuild()
            self.apply_intersections()
            self.apply_lambda_lifts()
            eg.rebuild()
            report.iterations += 1
            if iteration_hook is not None:
                iteration_hook(self)
            if (
                len(eg.uf) == before_ids
                and eg.uf.total_unions() == before_unions
                and new_instances == 0
            ):
                report.saturated = True
                break
        report.new_classes = len(eg.uf) - start_classes
        report.new_unions_per_context = {
            self.eg.lattice.name(c): eg.uf.unions_at[c] - start_unions.get(c, 0)
            for c in sorted(eg.uf.unions_at)
            if eg.uf.unions_at[c] != start_unions.get(c, 0)
        }
        return report


def _match(provider, pat: Pattern, cls: ClassId, subst: dict[str, ClassId]):
    if isinstance(pat, PatternVar):
        bound = subst.get(pat.name)
        if bound is None:
            extended = dict(subst)
            extended[pat.name] = cls
            yield extended
        elif bound == cls:
            yield subst
        return
    for node in provider.nodes_of(cls):
        if node.symbol != pat.symbol:
            continue
        partial = [subst]
        for sub_pat, child in zip(pat.args, node.children):
            partial = [
                s2 for s1 in partial for s2 in _match(provider, sub_pat, child, s1)
            ]
            if not partial:
                break
        yield from partial


def _forbid_names(forbid) -> set[str]:
    if forbid is None:
        return set()
    if isinstance(forbid, str):
        return {forbid}
    if isinstance(forbid, FunctionSymbol):
        return {forbid.name}
    return {f.name if isinstance(f, FunctionSymbol) else f for f in forbid}
