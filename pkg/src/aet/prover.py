"""Abductive Horn-clause inference under iterated-deepening A* search.

The engine proves goals from a compiled theory, the database store and a
conjunctive context whose variables are frozen.  Goals may be assumed at
a declared cost; the total cost of a proof is the number of clause
applications plus the sum of assumption costs.  Loop control: branches
are cut on goals alpha-identical to an ancestor (with look-ahead over
freshly introduced body goals), goals subsumed by a non-identical
ancestor pay a one-unit penalty, backward readings chain only through
further backward readings or premise lookups, and ground goals already
proved cheaply within an iteration are not re-proved.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from .arith import eval_ground
from .errors import BudgetExhausted, NoEquivalenceForTarget, UnsupportedGoalShape
from .formulas import (
    And,
    Atom,
    Equality,
    Exists,
    FalseF,
    Forall,
    Formula,
    Impl,
    Mismatch,
    TRUE,
    TrueF,
    alpha_equal,
    apply,
    canonical,
    conjoin,
    conjuncts,
    free_variables,
    rename_apart,
)
from .syntax import format_formula
from .terms import (
    Compound,
    DischargeConstant,
    Session,
    Substitution,
    Term,
    Variable,
    is_ground_term,
    subst_term,
    term_vars,
    unify_terms,
)
from .theory import AssumableDecl, CompiledTheory, HornClause, NegRule

NORMAL = "normal"
BACKWARD_ONLY = "backward_only"


@dataclass
class SearchConfig:
    initial_limit: int = 4
    increment: int = 4
    max_limit: int = 40
    memo_fraction: Fraction = Fraction(1, 3)
    extensional_implications: bool = True
    max_results: int = 16
    trace: Optional[Callable[[str], None]] = None


@dataclass(frozen=True)
class AssumptionInstance:
    goal: Formula
    cost: int
    justification: str
    kind: str
    context_at_use: Tuple[Formula, ...]


@dataclass
class ProofResult:
    binding: Substitution
    assumptions: Tuple[AssumptionInstance, ...]
    cost: int


@dataclass
class SearchStats:
    expansions: int = 0
    memo_hits: int = 0
    subsumption_penalties: int = 0
    iterations: int = 0
    found_at_limit: Optional[int] = None


def unify_atoms(a: Atom, b: Atom, s: Optional[Substitution] = None) -> Optional[Substitution]:
    if a.pred != b.pred or len(a.args) != len(b.args):
        return None
    s = dict(s) if s else {}
    for x, y in zip(a.args, b.args):
        s = unify_terms(x, y, s)
        if s is None:
            return None
    return s


def unify_formulas(f: Formula, g: Formula, s: Optional[Substitution] = None):
    """Unifier of two flat formulas (atoms or equalities)."""
    if isinstance(f, Atom) and isinstance(g, Atom):
        return unify_atoms(f, g, s)
    if isinstance(f, Equality) and isinstance(g, Equality):
        s = unify_terms(f.left, g.left, dict(s) if s else {})
        if s is None:
            return None
        return unify_terms(f.right, g.right, s)
    return None


def subsumes(general: Formula, specific: Formula) -> bool:
    """True when some substitution on `general` alone yields `specific`."""
    if isinstance(general, Atom) and isinstance(specific, Atom):
        if general.key != specific.key:
            return False
    elif not (isinstance(general, Equality) and isinstance(specific, Equality)):
        return False
    # One-sided matching: rename specific's variables to opaque constants.
    frozen = {
        v: DischargeConstant(-(i + 1), v)
        for i, v in enumerate(sorted(free_variables(specific)))
    }
    return unify_formulas(general, apply(frozen, specific)) is not None


def freeze_context(context, session: Session) -> Tuple[Formula, ...]:
    """Replace context variables by discharge constants (premises are fixed)."""
    names = set()
    for c in context:
        names |= free_variables(c)
    if not names:
        return tuple(context)
    sub = {v: session.fresh_discharge(v) for v in sorted(names)}
    return tuple(apply(sub, c) for c in context)


def semantically_ground(t) -> bool:
    if isinstance(t, (Atom,)):
        return all(is_ground_term(a, frozen_ground=False) for a in t.args)
    return is_ground_term(t, frozen_ground=False)


class _DeclAssumer:
    """Assumability per declared assumable/5 facts."""

    def __init__(self, theory: CompiledTheory):
        self.theory = theory

    def candidates(self, goal, licensing_context):
        if isinstance(goal, Equality):
            decls = self.theory.assumables.get(("=", 2), [])
        elif isinstance(goal, Atom):
            decls = self.theory.assumables.get(goal.key, [])
        else:
            return
        for decl in decls:
            sigma = unify_formulas(goal, decl.goal)
            if sigma is None:
                continue
            cond = apply(sigma, decl.condition)
            for member in licensing_context:
                s2 = unify_formulas(cond, member, sigma)
                if s2 is None:
                    continue
                inst = AssumptionInstance(
                    goal=apply(s2, goal),
                    cost=decl.cost,
                    justification=decl.justification,
                    kind=decl.kind,
                    context_at_use=tuple(licensing_context),
                )
                yield decl.cost, s2, inst
                break  # first licensing match per declaration


class _LemmaAssumer:
    """Assumability criterion used when compiling TRL lemmas.

    Arithmetic goals may always be assumed; otherwise at most two
    conceptual-predicate atoms (undeclared, non-auxiliary, not the
    target) may be assumed.
    """

    def __init__(self, theory: CompiledTheory, target_key):
        self.theory = theory
        self.target_key = target_key

    def candidates(self, goal, licensing_context):
        if not isinstance(goal, Atom) or goal.pred == "neg":
            return
        klass = self.theory.relation_class(goal.pred)
        if klass == "arithmetic":
            yield 1, None, AssumptionInstance(goal, 1, "lemma_premise", "arithmetic", ())
            return
        if klass is not None or goal.pred in self.theory.aux_preds:
            return
        if goal.key == self.target_key:
            return
        yield 1, None, AssumptionInstance(goal, 1, "lemma_premise", "conceptual", ())


class _Search:
    def __init__(self, theory, store, context, config, assumer, licensing_extra, session):
        self.theory = theory
        self.store = store
        self.config = config
        self.assumer = assumer
        self.session = session
        self.context = freeze_context(context, session)
        self.licensing = self.context + freeze_context(licensing_extra, session)
        self.limit = config.initial_limit
        self.memo: Dict[Tuple[str, str], Tuple[int, Tuple[AssumptionInstance, ...]]] = {}
        self.cut = False
        self.stats = SearchStats()

    def trace(self, depth, cost, kind, head):
        if self.config.trace:
            self.config.trace("%d %d %s %s" % (depth, cost, kind, format_formula(head)))

    # Each solution is (subst, cost, assumptions); goals thread as
    # (formula, mode, ancestors) triples and `pending` counts the goals
    # queued behind the current one for the cost estimate.
    def solve_conj(self, goals, subst, cost, assumptions, pending, depth) -> Iterator:
        if not goals:
            yield subst, cost, assumptions
            return
        (goal, mode, ancestors), rest = goals[0], goals[1:]
        rest_h = _estimate(g for g, _, _ in rest)
        for subst1, cost1, assume1 in self.solve_goal(
            goal, mode, ancestors, subst, cost, assumptions, pending + rest_h, depth
        ):
            yield from self.solve_conj(rest, subst1, cost1, assume1, pending, depth)

    def solve_goal(self, goal, mode, ancestors, subst, cost, assumptions, pending, depth):
        goal = apply(subst, goal)
        if isinstance(goal, TrueF):
            yield subst, cost, assumptions
            return
        if isinstance(goal, (FalseF, Mismatch)):
            return
        if isinstance(goal, And):
            parts = [(c, mode, ancestors) for c in conjuncts(goal)]
            if parts:
                # Only the first conjunct of a backward body stays restricted.
                parts = [parts[0]] + [(g, NORMAL, a) for g, _, a in parts[1:]]
            yield from self.solve_conj(parts, subst, cost, assumptions, pending, depth)
            return
        if isinstance(goal, Equality):
            s2 = unify_terms(goal.left, goal.right, subst)
            if s2 is not None:
                self.trace(depth, cost, "equality", goal)
                yield s2, cost, assumptions
            yield from self.try_assume(goal, subst, cost, assumptions, pending, depth)
            return
        if isinstance(goal, Exists):
            sub = {v: self.session.fresh_var(v) for v in goal.vars}
            yield from self.solve_goal(
                apply(sub, goal.body), mode, ancestors, subst, cost, assumptions,
                pending, depth,
            )
            return
        if isinstance(goal, (Forall, Impl)):
            yield from self.solve_implication(
                goal, ancestors, subst, cost, assumptions, pending, depth
            )
            return
        if not isinstance(goal, Atom):
            raise UnsupportedGoalShape("cannot prove %r" % type(goal).__name__)
        yield from self.solve_atom(
            goal, mode, ancestors, subst, cost, assumptions, pending, depth
        )

    def solve_atom(self, goal, mode, ancestors, subst, cost, assumptions, pending, depth):
        if goal.pred == "neg" and len(goal.args) == 1:
            yield from self.solve_neg(goal, ancestors, subst, cost, assumptions, pending, depth)
            return

        ground = semantically_ground(goal)
        memo_key = None
        if ground:
            memo_key = (format_formula(canonical(goal)), mode)
            hit = self.memo.get(memo_key)
            if hit is not None and hit[0] <= self.limit * self.config.memo_fraction:
                self.stats.memo_hits += 1
                self.trace(depth, cost, "memo", goal)
                yield subst, cost + hit[0], assumptions + hit[1]
                return

        produced_cost = None

        # Premise use: the conjunctive context, at no cost.
        for member in self.context:
            s2 = unify_formulas(goal, member, subst)
            if s2 is not None:
                self.trace(depth, cost, "context", goal)
                if memo_key is not None and produced_cost is None:
                    produced_cost = 0
                    self.memo.setdefault(memo_key, (0, ()))
                yield s2, cost, assumptions

        klass = self.theory.relation_class(goal.pred)
        if klass == "arithmetic" and ground:
            value = eval_ground(goal.pred, goal.args)
            if value is True:
                if cost + 1 + pending <= self.limit:
                    self.trace(depth, cost + 1, "eval", goal)
                    if memo_key is not None:
                        self.memo.setdefault(memo_key, (1, ()))
                    yield subst, cost + 1, assumptions
                else:
                    self.cut = True
                return
            if value is False:
                return

        if klass == "database" or goal.pred in self.store.tuples:
            for row in self.store.rows(goal.pred):
                s2 = subst
                for have, want in zip(goal.args, row):
                    s2 = unify_terms(have, want, s2)
                    if s2 is None:
                        break
                if s2 is None:
                    continue
                if cost + 1 + pending > self.limit:
                    self.cut = True
                    continue
                self.trace(depth, cost + 1, "unit", goal)
                if memo_key is not None:
                    self.memo.setdefault(memo_key, (1, ()))
                yield s2, cost + 1, assumptions

        identical_ancestor = any(alpha_equal(goal, a) for a in ancestors)
        if not identical_ancestor:
            penalty = 1 if any(
                subsumes(a, goal) for a in ancestors
            ) else 0
            if penalty:
                self.stats.subsumption_penalties += 1
            for clause in self.theory.clauses_for(goal.key):
                if mode == BACKWARD_ONLY and clause.origin != "backward-reading":
                    continue
                for result in self.expand_clause(
                    clause, goal, ancestors, subst, cost + penalty,
                    assumptions, pending, depth,
                ):
                    if memo_key is not None and produced_cost is None:
                        produced_cost = result[1] - cost
                        self.memo.setdefault(memo_key, (produced_cost, result[2][len(assumptions):]))
                    yield result

        yield from self.try_assume(goal, subst, cost, assumptions, pending, depth)

    def expand_clause(self, clause, goal, ancestors, subst, cost, assumptions, pending, depth):
        if cost + 1 + pending > self.limit:
            self.cut = True
            return
        renamed, _ = rename_apart(Impl(conjoin([clause.head]), clause.body), self.session)
        head = conjuncts(renamed.antecedent)[0]
        body = renamed.consequent
        s2 = unify_atoms(goal, head, subst)
        if s2 is None:
            return
        self.stats.expansions += 1
        body_goals = [apply(s2, g) for g in conjuncts(body)]
        ancestors2 = ancestors + (apply(s2, goal),)
        # Look-ahead: cut now if any fresh body goal repeats an ancestor.
        for g in body_goals:
            if any(alpha_equal(g, a) for a in ancestors2):
                return
        for g in body_goals:
            if isinstance(g, Atom) and self.quick_failure(g):
                return
        modes = [NORMAL] * len(body_goals)
        if clause.origin == "backward-reading" and body_goals:
            modes[0] = BACKWARD_ONLY
        entries = list(zip(body_goals, modes))
        entries.sort(key=lambda e: 0 if isinstance(e[0], Atom) and self.quick_determinism(e[0]) else 1)
        self.trace(depth, cost + 1, clause.origin, goal)
        goals = [(g, m, ancestors2) for g, m in entries]
        yield from self.solve_conj(goals, s2, cost + 1, assumptions, pending, depth + 1)

    def quick_failure(self, goal: Atom) -> bool:
        for test in self.theory.quick_fail.get(goal.key, []):
            if self.binding_conditions_hold(test, goal):
                return True
        return False

    def quick_determinism(self, goal: Atom) -> bool:
        for test in self.theory.quick_det.get(goal.key, []):
            if self.binding_conditions_hold(test, goal):
                return True
        return False

    @staticmethod
    def binding_conditions_hold(test, goal: Atom) -> bool:
        if unify_atoms(test.goal, goal) is None:
            return False
        for cond, arg in zip(test.bindings, goal.args):
            if cond == "any":
                continue
            if cond == "ground":
                if not is_ground_term(arg):
                    return False
            else:
                _, want = cond
                if unify_terms(arg, want) is None:
                    return False
        return True

    def try_assume(self, goal, subst, cost, assumptions, pending, depth):
        if self.assumer is None:
            return
        for extra, sigma, inst in self.assumer.candidates(goal, self.licensing):
            if cost + extra + pending > self.limit:
                self.cut = True
                continue
            s2 = dict(subst)
            if sigma:
                for v, t in sigma.items():
                    s2 = unify_terms(Variable(v), t, s2)
                    if s2 is None:
                        break
                if s2 is None:
                    continue
            self.trace(depth, cost + extra, "assume", goal)
            yield s2, cost + extra, assumptions + (inst,)

    def solve_neg(self, goal, ancestors, subst, cost, assumptions, pending, depth):
        arg = subst_term(subst, goal.args[0])
        inner = _term_to_flat(arg)
        if inner is None:
            return
        if isinstance(inner, Equality):
            if (
                semantically_ground(inner.left)
                and semantically_ground(inner.right)
                and unify_terms(inner.left, inner.right) is None
            ):
                if cost + 1 + pending <= self.limit:
                    self.trace(depth, cost + 1, "eval", goal)
                    yield subst, cost + 1, assumptions
                else:
                    self.cut = True
            return
        if (
            self.theory.relation_class(inner.pred) == "arithmetic"
            and semantically_ground(inner)
            and eval_ground(inner.pred, inner.args) is False
        ):
            if cost + 1 + pending <= self.limit:
                self.trace(depth, cost + 1, "eval", goal)
                yield subst, cost + 1, assumptions
            else:
                self.cut = True
            return
        for rule in self.theory.neg_rules.get(inner.key, []):
            if cost + 1 + pending > self.limit:
                self.cut = True
                return
            renamed, _ = rename_apart(Impl(rule.goal, rule.body), self.session)
            s2 = unify_atoms(inner, conjuncts(renamed.antecedent)[0], subst)
            if s2 is None:
                continue
            ancestors2 = ancestors + (apply(s2, goal),)
            goals = [(g, NORMAL, ancestors2) for g in conjuncts(renamed.consequent)]
            self.trace(depth, cost + 1, "neg-rule", goal)
            yield from self.solve_conj(goals, s2, cost + 1, assumptions, pending, depth + 1)

    def solve_implication(self, goal, ancestors, subst, cost, assumptions, pending, depth):
        if isinstance(goal, Impl):
            vars_, body = (), goal
        else:
            vars_, body = goal.vars, goal.body
        if not isinstance(body, Impl):
            raise UnsupportedGoalShape("forall goals take the forall/impl shape")
        if cost + 1 + pending > self.limit:
            self.cut = True
            return
        if self.config.extensional_implications and self._finite_antecedent(body.antecedent):
            yield from self.solve_extensional(
                vars_, body, ancestors, subst, cost, assumptions, pending, depth
            )
        else:
            yield from self.solve_intensional(
                vars_, body, ancestors, subst, cost, assumptions, pending, depth
            )

    def _finite_antecedent(self, antecedent) -> bool:
        from .planner import atom_potentially_finite

        state: set = set()
        for part in conjuncts(antecedent):
            if isinstance(part, Equality):
                continue
            if not isinstance(part, Atom):
                return False
            if not atom_potentially_finite(part, state, self.theory):
                return False
        return True

    def solve_extensional(self, vars_, body, ancestors, subst, cost, assumptions, pending, depth):
        sub = {v: self.session.fresh_var(v) for v in vars_}
        ant = apply(sub, apply(subst, body.antecedent))
        cons = apply(sub, apply(subst, body.consequent))
        goals = [(g, NORMAL, ancestors) for g in conjuncts(ant)]
        cases = list(self.solve_conj(goals, dict(subst), cost + 1, assumptions, pending, depth + 1))
        self.trace(depth, cost + 1, "forall-ext", ant)

        # One consequent proof per antecedent solution; assumption sets
        # union across cases, consequent costs accumulate.
        def run(idx, c, a):
            if idx == len(cases):
                yield subst, c, a
                return
            s_case, _, a_case = cases[idx]
            for s1, c1, a1 in self.solve_goal(
                cons, NORMAL, ancestors, dict(s_case), c, a, pending, depth + 1
            ):
                yield from run(idx + 1, c1, _merge_assumptions(a, a_case, a1))
                return

        yield from run(0, cost + 1, assumptions)

    def solve_intensional(self, vars_, body, ancestors, subst, cost, assumptions, pending, depth):
        sub = {v: self.session.fresh_discharge(v) for v in vars_}
        ant = apply(sub, apply(subst, body.antecedent))
        cons = apply(sub, apply(subst, body.consequent))
        premises = tuple(
            c for c in conjuncts(ant) if isinstance(c, (Atom, Equality))
        )
        saved = self.context
        self.context = self.context + premises
        self.trace(depth, cost + 1, "forall-int", ant)
        try:
            for s1, c1, a1 in self.solve_goal(
                cons, NORMAL, ancestors, subst, cost + 1, assumptions, pending, depth + 1
            ):
                yield s1, c1, a1
        finally:
            self.context = saved


def _merge_assumptions(base, left, right):
    out = list(base)
    for a in tuple(left) + tuple(right):
        if a not in out:
            out.append(a)
    return tuple(out)


def _estimate(goals) -> int:
    return sum(
        0 if isinstance(g, (Equality, TrueF)) else 1 for g in goals
    )


def _term_to_flat(t: Term):
    """Reify a term as an atom or equality (for neg/1 arguments)."""
    if isinstance(t, Compound):
        if t.functor == "=" and len(t.args) == 2:
            return Equality(t.args[0], t.args[1])
        return Atom(t.functor, t.args)
    from .terms import Constant

    if isinstance(t, Constant):
        return Atom(t.name, ())
    return None


def reify_goal(goal: Formula) -> Term:
    """Term form of an atom or equality, as used under neg/1."""
    if isinstance(goal, Equality):
        return Compound("=", (goal.left, goal.right))
    if goal.args:
        return Compound(goal.pred, goal.args)
    from .terms import Constant

    return Constant(goal.pred)


def _restrict_binding(subst: Substitution, goal_map: Substitution, wanted) -> Substitution:
    out = {}
    for v in wanted:
        image = goal_map.get(v)
        if image is None:
            continue
        t = subst_term(subst, image)
        if t != image:
            out[v] = t
    return out


def prove(
    goal: Formula,
    context,
    theory: CompiledTheory,
    store,
    config: Optional[SearchConfig] = None,
    allow_assumptions: bool = True,
    licensing_extra=(),
    stats: Optional[SearchStats] = None,
) -> List[ProofResult]:
    """Prove a goal, returning results ordered by nondecreasing cost.

    The search runs depth-limited passes at cost limits initial,
    +increment, ... up to max; the first limit producing any result
    supplies the result list.  Raises BudgetExhausted when the maximum
    limit is reached with branches still open and nothing proved.
    """
    config = config or SearchConfig()
    session = Session()
    wanted = sorted(free_variables(goal))
    renamed, goal_map = rename_apart(goal, session)
    assumer = _DeclAssumer(theory) if allow_assumptions else None
    search = _Search(theory, store, context, config, assumer, licensing_extra, session)
    if stats is None:
        stats = SearchStats()
    search.stats = stats

    limit = config.initial_limit
    while True:
        stats.iterations += 1
        search.limit = limit
        search.cut = False
        search.memo = {}
        raw = []
        for subst, cost, assumptions in search.solve_goal(
            renamed, NORMAL, (), {}, 0, (), 0, 0
        ):
            raw.append(ProofResult(_restrict_binding(subst, goal_map, wanted), assumptions, cost))
            if len(raw) >= config.max_results * 4:
                break
        if raw:
            stats.found_at_limit = limit
            return _finalize(raw, config.max_results)
        if not search.cut:
            return []
        if limit >= config.max_limit:
            raise BudgetExhausted(
                "no proof within cost limit %d; open branches remain" % limit
            )
        limit = min(limit + config.increment, config.max_limit)


def _signature(result: ProofResult) -> str:
    parts = [
        "%s=%s" % (v, format_formula(canonical(Equality(Variable(v), t))))
        for v, t in sorted(result.binding.items())
    ]
    parts += sorted(
        "%s@%s" % (a.justification, format_formula(canonical(a.goal)))
        for a in result.assumptions
    )
    return ";".join(parts)


def _finalize(raw: List[ProofResult], cap: int) -> List[ProofResult]:
    seen = {}
    for r in raw:
        key = _signature(r)
        if key not in seen or r.cost < seen[key].cost:
            seen[key] = r
    out = sorted(seen.values(), key=lambda r: r.cost)
    return out[:cap]


def refute_assumptions(
    assumptions, theory: CompiledTheory, store, config: Optional[SearchConfig] = None
) -> List[AssumptionInstance]:
    """Assumption instances whose negation is provable from their context.

    neg(goal) is provable through neg rules and Horn clauses only; no
    further assumptions may be made while refuting.
    """
    config = config or SearchConfig()
    violated = []
    for inst in assumptions:
        reified = Atom("neg", (reify_goal(inst.goal),))
        try:
            results = prove(
                reified,
                inst.context_at_use,
                theory,
                store,
                config,
                allow_assumptions=False,
            )
        except BudgetExhausted:
            results = []
        if results:
            violated.append(inst)
    return violated


def derive_lemmas(
    theory: CompiledTheory,
    store,
    target: Tuple[str, int],
    assumption_budget: int = 8,
    config: Optional[SearchConfig] = None,
) -> List[HornClause]:
    """Compile implicational TRL lemmas for a target predicate.

    Each lemma body -> target-atom is found abductively (assuming
    arithmetic goals freely plus at most two conceptual atoms, two only
    when they share a variable) and then verified by an assumption-free
    proof of the head from the body taken as context.
    """
    key = tuple(target)
    if key not in theory.equiv_by_lhs and key not in theory.exists_rules_by_lhs:
        raise NoEquivalenceForTarget("%s/%d heads no equivalence" % key)
    config = config or SearchConfig()
    session = Session()
    goal = Atom(key[0], tuple(Variable("X%d" % i) for i in range(key[1])))
    search = _Search(theory, store, (), config, _LemmaAssumer(theory, key), (), session)
    search.limit = assumption_budget
    lemmas = []
    seen = set()
    for subst, cost, assumptions in search.solve_goal(goal, NORMAL, (), {}, 0, (), 0, 0):
        if not assumptions:
            continue
        conceptual = [a for a in assumptions if a.kind == "conceptual"]
        if len(conceptual) > 2:
            continue
        if len(conceptual) == 2:
            shared = free_variables(apply(subst, conceptual[0].goal)) & free_variables(
                apply(subst, conceptual[1].goal)
            )
            if not shared:
                continue
        head = apply(subst, goal)
        body = conjoin([apply(subst, a.goal) for a in assumptions])
        lemma = HornClause(head, body, origin="lemma", rule_name="%s/%d" % key)
        sig = format_formula(canonical(Impl(body, head)))
        if sig in seen:
            continue
        # Soundness check: replay without abduction, body as premises.
        try:
            check = prove(
                head, conjuncts(body), theory, store, config, allow_assumptions=False
            )
        except BudgetExhausted:
            check = []
        if not check:
            continue
        seen.add(sig)
        lemmas.append(lemma)
    return lemmas
