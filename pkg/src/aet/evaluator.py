"""Execution of planner-accepted formulas against the store.

SelectGoals and database atoms scan relations, arithmetic atoms evaluate
on ground arguments, equalities unify, and executable atoms are
satisfied by causing them: display actions are emitted and the event and
time arguments bound to synthetic constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from .arith import FUTURE, eval_ground
from .errors import NonGroundArithmetic
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
    TrueF,
    free_variables,
)
from .sqlgen import ColumnRef, DateCmp, EqCol, EqConst, SelectGoal
from .store import DisplayAction, RelStore
from .terms import (
    Constant,
    Session,
    Substitution,
    Term,
    Variable,
    is_ground_term,
    subst_term,
    unify_terms,
)
from .theory import CompiledTheory


@dataclass
class Outcome:
    truth: bool
    actions: List[DisplayAction] = field(default_factory=list)
    solutions: List[Substitution] = field(default_factory=list)


class _Evaluator:
    def __init__(self, theory: CompiledTheory, store: RelStore, session: Optional[Session] = None):
        self.theory = theory
        self.store = store
        self.session = session or Session()
        self.ordinal = 0

    def eval(self, f: Formula, env: Substitution) -> Iterator[Tuple[Substitution, Tuple[DisplayAction, ...]]]:
        if isinstance(f, TrueF):
            yield env, ()
            return
        if isinstance(f, (FalseF, Mismatch)):
            return
        if isinstance(f, SelectGoal):
            yield from self._eval_select(f, env)
            return
        if isinstance(f, Atom):
            yield from self._eval_atom(f, env)
            return
        if isinstance(f, Equality):
            s2 = unify_terms(f.left, f.right, env)
            if s2 is not None:
                yield s2, ()
            return
        if isinstance(f, And):
            for env1, acts1 in self.eval(f.left, env):
                for env2, acts2 in self.eval(f.right, env1):
                    yield env2, acts1 + acts2
            return
        if isinstance(f, Exists):
            yield from self.eval(f.body, env)
            return
        if isinstance(f, (Forall, Impl)):
            body = f if isinstance(f, Impl) else f.body
            if not isinstance(body, Impl):
                # A bare universal must hold for every binding; nothing in
                # the planner-accepted fragment produces this shape.
                raise NonGroundArithmetic("bare forall outside the executable fragment")
            yield from self._eval_forall(body, env)
            return
        raise NonGroundArithmetic("cannot execute %r" % type(f).__name__)

    def _eval_forall(self, body: Impl, env):
        actions: Tuple[DisplayAction, ...] = ()
        for env1, _ in self.eval(body.antecedent, env):
            satisfied = False
            for env2, acts in self.eval(body.consequent, env1):
                actions += acts
                satisfied = True
                break
            if not satisfied:
                return
        yield env, actions

    def _eval_atom(self, atom: Atom, env):
        klass = self.theory.relation_class(atom.pred)
        args = tuple(subst_term(env, a) for a in atom.args)
        if klass == "database" or (klass is None and atom.pred in self.store.tuples):
            for row in self.store.rows(atom.pred):
                s2 = env
                for have, want in zip(args, row):
                    s2 = unify_terms(have, want, s2)
                    if s2 is None:
                        break
                if s2 is not None:
                    yield s2, ()
            return
        if klass == "arithmetic":
            if not all(is_ground_term(a) for a in args):
                raise NonGroundArithmetic(
                    "arithmetic goal %s reached with unbound arguments" % atom.pred
                )
            if eval_ground(atom.pred, args) is True:
                yield env, ()
            return
        if klass == "executable":
            yield from self._cause(atom, args, env)
            return
        raise NonGroundArithmetic("unevaluable predicate %s/%d" % atom.key)

    def _cause(self, atom: Atom, args, env):
        decl = self.theory.relations[atom.pred]
        s2 = dict(env)
        payload = None
        for col, arg in zip(decl.column_names or ("",) * len(args), args):
            if isinstance(arg, Variable):
                value = FUTURE if col == "time" else self.session.fresh_constant("ev")
                s2 = unify_terms(arg, value, s2)
                if s2 is None:
                    return
            elif col == "action":
                payload = arg
        if payload is None and len(args) >= 2:
            payload = subst_term(s2, args[1])
        actions = ()
        if payload is not None:
            from .terms import Compound

            if isinstance(payload, Compound) and payload.functor == "display":
                inner = payload.args[0]
                items = inner.args if isinstance(inner, Compound) and inner.functor == "list" else (inner,)
                self.ordinal += 1
                actions = (DisplayAction(tuple(items), self.ordinal),)
        yield s2, actions

    def _eval_select(self, goal: SelectGoal, env):
        select = goal.select
        col_index: Dict[ColumnRef, Tuple[str, int]] = {}
        for rel, alias in select.from_relations:
            decl = self.theory.relations[rel]
            for i, col in enumerate(decl.column_names):
                col_index[ColumnRef(alias, col)] = (alias, i)

        def lookup(ref: ColumnRef, bound) -> Term:
            alias, i = col_index[ref]
            return bound[alias][i]

        def where_ok(bound) -> bool:
            for cond in select.where:
                if isinstance(cond, EqConst):
                    if lookup(cond.column, bound) != cond.value:
                        return False
                elif isinstance(cond, EqCol):
                    if lookup(cond.left, bound) != lookup(cond.right, bound):
                        return False
                else:
                    left = lookup(cond.left, bound) if isinstance(cond.left, ColumnRef) else cond.left
                    right = lookup(cond.right, bound) if isinstance(cond.right, ColumnRef) else cond.right
                    if eval_ground("sql_date_leq", (left, right)) is not True:
                        return False
            return True

        seen = set()

        def scan(idx, bound: Dict[str, Tuple[Term, ...]]):
            if idx == len(select.from_relations):
                if not where_ok(bound):
                    return
                row = tuple(lookup(c, bound) for c in select.columns)
                if row in seen:
                    return
                seen.add(row)
                s2 = env
                for var, value in zip(goal.vars, row):
                    s2 = unify_terms(Variable(var), value, s2)
                    if s2 is None:
                        return
                yield s2, ()
                return
            rel, alias = select.from_relations[idx]
            for tup in self.store.rows(rel):
                bound[alias] = tup
                yield from scan(idx + 1, bound)
            bound.pop(alias, None)

        yield from scan(0, {})


def execute(
    f: Formula,
    store: RelStore,
    theory: CompiledTheory,
    session: Optional[Session] = None,
) -> Outcome:
    """Evaluate a planner-accepted formula; truth, actions and (for open
    formulas) the satisfying bindings of the free variables."""
    ev = _Evaluator(theory, store, session)
    free = sorted(free_variables(f))
    solutions: List[Substitution] = []
    seen = set()
    actions: List[DisplayAction] = []
    truth = False
    for env, acts in ev.eval(f, {}):
        if not truth:
            actions = list(acts)
        truth = True
        if not free:
            break
        binding = {v: subst_term(env, Variable(v)) for v in free}
        key = tuple(sorted((v, repr(t)) for v, t in binding.items()))
        if key not in seen:
            seen.add(key)
            solutions.append(binding)
    return Outcome(truth, actions, solutions)
