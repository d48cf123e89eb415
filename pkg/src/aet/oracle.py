"""Independent equivalence oracle: bottom-up Horn fixpoint plus
enumeration-based formula evaluation over a small universe.

This deliberately shares no code path with the translator or prover: it
grounds the compiled Horn readings over the store and assumptions and
compares formulas by brute-force evaluation, so the property suites can
check translations against it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from .arith import eval_ground
from .errors import UniverseTooLarge
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
    apply,
    conjuncts,
    formula_atoms,
    free_variables,
)
from .terms import (
    Compound,
    Constant,
    DateLiteral,
    DischargeConstant,
    NamedObject,
    Number,
    SkolemTerm,
    Term,
    Variable,
    is_ground_term,
    subst_term,
    term_vars,
    unify_terms,
)
from .theory import CompiledTheory

MAX_UNIVERSE = 6
MAX_FACTS = 5000
MAX_SKOLEM_DEPTH = 2
MAX_ROUNDS = 40


def _term_constants(t: Term, out: Set[Term]):
    if isinstance(t, (Constant, Number, DateLiteral, NamedObject, DischargeConstant)):
        out.add(t)
    elif isinstance(t, Compound):
        out.add(t) if is_ground_term(t) else None
        for a in t.args:
            _term_constants(a, out)
    elif isinstance(t, SkolemTerm) and is_ground_term(t):
        out.add(t)


def formula_constants(f: Formula) -> Set[Term]:
    out: Set[Term] = set()
    for a in formula_atoms(f):
        for t in a.args:
            _term_constants(t, out)

    def eqs(g):
        if isinstance(g, (Equality, Mismatch)):
            _term_constants(g.left, out)
            _term_constants(g.right, out)
        elif isinstance(g, And):
            eqs(g.left)
            eqs(g.right)
        elif isinstance(g, (Exists, Forall)):
            eqs(g.body)
        elif isinstance(g, Impl):
            eqs(g.antecedent)
            eqs(g.consequent)

    eqs(f)
    return out


def _skolem_depth(t: Term) -> int:
    if isinstance(t, SkolemTerm):
        return 1 + max((_skolem_depth(a) for a in t.args), default=0)
    if isinstance(t, Compound):
        return max((_skolem_depth(a) for a in t.args), default=0)
    if isinstance(t, NamedObject):
        return _skolem_depth(t.ident)
    return 0


@dataclass
class GroundModel:
    facts: Set[Tuple] = field(default_factory=set)
    universe: List[Term] = field(default_factory=list)
    theory: Optional[CompiledTheory] = None

    def holds(self, atom: Atom) -> bool:
        if self.theory is not None and self.theory.relation_class(atom.pred) == "arithmetic":
            value = eval_ground(atom.pred, atom.args)
            if value is not None:
                return value
        return (atom.pred, tuple(atom.args)) in self.facts


def _clause_rules(theory: CompiledTheory):
    rules = []
    for clause in theory.user_clauses + theory.normal_readings + theory.backward_readings:
        rules.append((clause.head, conjuncts(clause.body)))
    return rules


def _assumption_rules(assumptions):
    rules = []
    pre_subst: Dict[str, Term] = {}
    for inst in assumptions:
        goal = inst.goal
        if isinstance(goal, Equality):
            # An assumed equality on a discharge constant fixes that
            # constant's denotation.
            if isinstance(goal.left, DischargeConstant):
                pre_subst[goal.left] = goal.right
            elif isinstance(goal.right, DischargeConstant):
                pre_subst[goal.right] = goal.left
            continue
        body = [c for c in inst.context_at_use if isinstance(c, (Atom, Equality))]
        rules.append((goal, _generalize_discharges(goal, body)))
    return rules, pre_subst


def _generalize_discharges(goal, body):
    """Assumption instances quantify over their discharge constants: the
    premise holds for any objects matching the recorded context."""
    constants = set()

    def collect(t):
        if isinstance(t, DischargeConstant):
            constants.add(t)
        elif isinstance(t, Compound):
            for a in t.args:
                collect(a)
        elif isinstance(t, NamedObject):
            collect(t.ident)

    for f in [goal] + body:
        if isinstance(f, Atom):
            for a in f.args:
                collect(a)
        else:
            collect(f.left)
            collect(f.right)
    return body


def replace_discharge_terms(f: Formula, mapping: Dict[Term, Term]) -> Formula:
    if not mapping:
        return f

    def walk_t(t):
        if t in mapping:
            return mapping[t]
        if isinstance(t, Compound):
            return Compound(t.functor, tuple(walk_t(a) for a in t.args))
        if isinstance(t, NamedObject):
            return NamedObject(t.sort, walk_t(t.ident))
        if isinstance(t, SkolemTerm):
            return SkolemTerm(t.index, tuple(walk_t(a) for a in t.args))
        return t

    def walk(g):
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(walk_t(a) for a in g.args))
        if isinstance(g, Equality):
            return Equality(walk_t(g.left), walk_t(g.right))
        if isinstance(g, Mismatch):
            return Mismatch(walk_t(g.left), walk_t(g.right))
        if isinstance(g, And):
            return And(walk(g.left), walk(g.right))
        if isinstance(g, (Exists, Forall)):
            return type(g)(g.vars, walk(g.body))
        if isinstance(g, Impl):
            return Impl(walk(g.antecedent), walk(g.consequent))
        return g

    return walk(f)


def build_model(
    theory: CompiledTheory,
    store,
    assumptions=(),
    extra_constants: Set[Term] = frozenset(),
) -> GroundModel:
    """Least Horn model of the compiled readings plus store and assumptions."""
    model = GroundModel(theory=theory)
    universe: List[Term] = []

    def add_element(t: Term):
        if t not in universe:
            universe.append(t)

    for name, rows in store.tuples.items():
        for row in rows:
            model.facts.add((name, tuple(row)))
            for cell in row:
                add_element(cell)
    for t in sorted(extra_constants, key=repr):
        add_element(t)

    rules = _clause_rules(theory)
    assumption_rules, pre_subst = _assumption_rules(assumptions)
    for head, body in assumption_rules:
        rules.append((head, body))

    for _ in range(MAX_ROUNDS):
        before = len(model.facts), len(universe)
        for head, body in rules:
            for sigma in _solve_body(body, model, universe):
                h = apply(sigma, head)
                h = replace_discharge_terms(h, pre_subst)
                remaining = sorted(free_variables(h))
                for inst in _enumerate_assignments(remaining, universe):
                    g = apply(inst, h)
                    if not isinstance(g, Atom):
                        continue
                    if not all(is_ground_term(a) for a in g.args):
                        continue
                    if any(_skolem_depth(a) > MAX_SKOLEM_DEPTH for a in g.args):
                        continue
                    key = (g.pred, tuple(g.args))
                    if key not in model.facts:
                        model.facts.add(key)
                        for cell in g.args:
                            add_element(cell)
                        if len(model.facts) > MAX_FACTS:
                            raise UniverseTooLarge("fixpoint exceeded %d facts" % MAX_FACTS)
        if (len(model.facts), len(universe)) == before:
            break
    model.universe = universe
    return model


def _solve_body(body, model: GroundModel, universe) -> List[Dict[str, Term]]:
    solutions = [dict()]
    for goal in body:
        new: List[Dict[str, Term]] = []
        for sigma in solutions:
            g = apply(sigma, goal)
            if isinstance(g, TrueF):
                new.append(sigma)
            elif isinstance(g, Equality):
                s2 = unify_terms(g.left, g.right, dict(sigma))
                if s2 is not None:
                    new.append(s2)
            elif isinstance(g, Atom):
                if model.theory.relation_class(g.pred) == "arithmetic":
                    if all(is_ground_term(a) for a in g.args):
                        if eval_ground(g.pred, g.args) is True:
                            new.append(sigma)
                    continue
                for pred, args in model.facts:
                    if pred != g.pred or len(args) != len(g.args):
                        continue
                    s2 = dict(sigma)
                    for have, want in zip(g.args, args):
                        s2 = unify_terms(have, want, s2)
                        if s2 is None:
                            break
                    if s2 is not None:
                        new.append(s2)
        solutions = new
        if not solutions:
            break
    return solutions


def _enumerate_assignments(names, universe):
    if not names:
        yield {}
        return
    if not universe:
        return
    first, rest = names[0], names[1:]
    for value in universe:
        for tail in _enumerate_assignments(rest, universe):
            out = {first: value}
            out.update(tail)
            yield out


def eval_formula(f: Formula, model: GroundModel, env: Optional[Dict[str, Term]] = None) -> bool:
    env = env or {}

    def ev(g, env):
        if isinstance(g, TrueF):
            return True
        if isinstance(g, (FalseF, Mismatch)):
            if isinstance(g, Mismatch):
                return False
            return False
        if isinstance(g, Atom):
            inst = Atom(g.pred, tuple(subst_term(env, a) for a in g.args))
            return model.holds(inst)
        if isinstance(g, Equality):
            return subst_term(env, g.left) == subst_term(env, g.right)
        if isinstance(g, And):
            return ev(g.left, env) and ev(g.right, env)
        if isinstance(g, Impl):
            return (not ev(g.antecedent, env)) or ev(g.consequent, env)
        if isinstance(g, Exists):
            return any(
                ev(g.body, {**env, **inst})
                for inst in _enumerate_assignments(list(g.vars), model.universe)
            )
        if isinstance(g, Forall):
            return all(
                ev(g.body, {**env, **inst})
                for inst in _enumerate_assignments(list(g.vars), model.universe)
            )
        raise TypeError(type(g))

    return ev(f, env)


@dataclass
class Verdict:
    equal: bool
    witness: Optional[Dict[str, Term]] = None

    def __bool__(self):
        return self.equal


def check_equivalence(
    source: Formula,
    target: Formula,
    assumptions,
    theory: CompiledTheory,
    store,
    universe: Optional[Set[Term]] = None,
) -> Verdict:
    """Brute-force check of source == target over the canonical model.

    The Horn fixpoint of theory + store + assumptions is computed over
    the (small) universe and both formulas are evaluated under every
    assignment to their shared free variables.
    """
    constants = set(universe or ())
    constants |= formula_constants(source) | formula_constants(target)
    for rule in theory.equiv_rules:
        for a in list(rule.lhs_conjuncts) + conjuncts(rule.conds):
            if isinstance(a, (Atom,)):
                for t in a.args:
                    _term_constants(t, constants)
    base = {c for c in constants if not isinstance(c, (SkolemTerm, DischargeConstant))}
    if len(base) > MAX_UNIVERSE:
        raise UniverseTooLarge("universe of %d constants exceeds %d" % (len(base), MAX_UNIVERSE))

    model = build_model(theory, store, assumptions, extra_constants=constants)
    _, pre_subst = _assumption_rules(assumptions)
    src = replace_discharge_terms(source, pre_subst)
    tgt = replace_discharge_terms(target, pre_subst)

    shared = sorted(free_variables(src) | free_variables(tgt))
    for env in _enumerate_assignments(shared, model.universe or [Constant("u0")]):
        if eval_formula(src, model, env) != eval_formula(tgt, model, env):
            return Verdict(False, witness=env)
    return Verdict(True)
