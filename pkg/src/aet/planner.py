"""Finite-strategy search: conjunct reordering by abstract interpretation.

A left-to-right abstract pass tracks which variables are instantiated;
goals whose call patterns are unsatisfied freeze and thaw once enough
variables have been bound.  The output is a permutation of the input's
conjuncts per quantifier scope, so it is logically equivalent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from .errors import NoFiniteStrategy, UndeclaredPredicate
from .formulas import (
    And,
    Atom,
    Equality,
    Exists,
    Forall,
    Formula,
    Impl,
    Mismatch,
    TrueF,
    FalseF,
    conjoin,
    conjuncts,
)
from .syntax import format_formula
from .terms import Term, Variable, is_ground_term, term_vars
from .theory import CallPattern, CompiledTheory


class BindingState:
    """Instantiated-variable tracking with equality-linked aliases."""

    def __init__(self, instantiated: Optional[Set[str]] = None):
        self.instantiated: Set[str] = set(instantiated or ())
        self.links: Dict[str, str] = {}

    def _root(self, v: str) -> str:
        while self.links.get(v, v) != v:
            v = self.links[v]
        return v

    def is_instantiated(self, v: str) -> bool:
        return self._root(v) in self.instantiated

    def instantiate(self, names) -> None:
        for v in names:
            self.instantiated.add(self._root(v))

    def link(self, a: str, b: str) -> None:
        ra, rb = self._root(a), self._root(b)
        if ra == rb:
            return
        self.links[ra] = rb
        if ra in self.instantiated:
            self.instantiated.add(rb)

    def term_instantiated(self, t: Term) -> bool:
        return all(self.is_instantiated(v) for v in term_vars(t))

    def copy(self) -> "BindingState":
        out = BindingState()
        out.instantiated = set(self.instantiated)
        out.links = dict(self.links)
        return out


@dataclass
class FrozenGoal:
    goal: Formula
    original_position: int


def _default_patterns(atom: Atom, theory: CompiledTheory) -> List[CallPattern]:
    """Implicit call patterns derived from a relation's class."""
    decl = theory.relations.get(atom.pred)
    if decl is None:
        raise UndeclaredPredicate("%s/%d is not declared" % atom.key)
    n = decl.arity
    if decl.klass == "database":
        return [CallPattern(atom, (), tuple(range(n)))]
    if decl.klass == "arithmetic":
        return [CallPattern(atom, tuple(range(n)), ())]
    action = _action_position(decl)
    outs = tuple(i for i in range(n) if i != action)
    return [CallPattern(atom, (action,), outs)]


def _action_position(decl) -> int:
    if "action" in decl.column_names:
        return decl.column_names.index("action")
    return 1 if decl.arity >= 2 else 0


def _patterns_for(atom: Atom, theory: CompiledTheory) -> List[CallPattern]:
    declared = theory.call_patterns.get(atom.key, [])
    return list(declared) + _default_patterns(atom, theory)


def atom_potentially_finite(atom: Atom, state_names: Set[str], theory: CompiledTheory) -> bool:
    """Paper classification: database atoms are always finite, arithmetic
    atoms need all but at most one argument instantiated, executable
    atoms need their action argument instantiated."""
    decl = theory.relations.get(atom.pred)
    if decl is None:
        return False
    if decl.klass == "database":
        return True
    bound = [
        a for a in atom.args
        if is_ground_term(a) or term_vars(a) <= state_names
    ]
    if decl.klass == "arithmetic":
        return len(bound) >= atom.arity - 1
    action = atom.args[_action_position(decl)]
    return is_ground_term(action) or term_vars(action) <= state_names


def is_potentially_finite(
    atom: Atom, state: BindingState, theory: CompiledTheory
) -> Tuple[bool, BindingState]:
    """Verdict plus the post-state with newly instantiated arguments."""
    decl = theory.relations.get(atom.pred)
    if decl is None:
        raise UndeclaredPredicate("%s/%d is not declared" % atom.key)
    bound_names = {v for v in _all_vars(atom) if state.is_instantiated(v)}
    finite = atom_potentially_finite(atom, bound_names, theory)
    post = state.copy()
    if finite:
        post.instantiate(_all_vars(atom))
    return finite, post


def _all_vars(f: Formula) -> Set[str]:
    out: Set[str] = set()
    if isinstance(f, Atom):
        for a in f.args:
            out |= term_vars(a)
    elif isinstance(f, (Equality, Mismatch)):
        out = term_vars(f.left) | term_vars(f.right)
    return out


def _executable(goal: Formula, state: BindingState, theory: CompiledTheory) -> Optional[List[str]]:
    """Variables instantiated by executing the goal, or None if it must wait."""
    if isinstance(goal, Equality):
        lv, rv = term_vars(goal.left), term_vars(goal.right)
        l_in = state.term_instantiated(goal.left)
        r_in = state.term_instantiated(goal.right)
        if l_in or r_in:
            return list(lv | rv)
        # Two free sides execute and link their flags.
        if len(lv) == 1 and len(rv) == 1:
            state.link(next(iter(lv)), next(iter(rv)))
            return []
        return list(lv | rv) if not (lv or rv) else []
    if isinstance(goal, (TrueF, FalseF, Mismatch)):
        return []
    if not isinstance(goal, Atom):
        return None
    for pattern in _patterns_for(goal, theory):
        ok = True
        for pos in pattern.in_args:
            if not state.term_instantiated(goal.args[pos]):
                ok = False
                break
        if not ok:
            continue
        out_vars: List[str] = []
        for pos in pattern.out_args:
            out_vars.extend(term_vars(goal.args[pos]))
        return out_vars
    return None


def _plan_conjunction(parts: List[Formula], state: BindingState, theory, frozen_out: List[FrozenGoal]):
    ordered: List[Formula] = []
    frozen: List[FrozenGoal] = []

    def thaw():
        progress = True
        while progress:
            progress = False
            for fg in list(frozen):
                outs = _run(fg.goal)
                if outs is not None:
                    frozen.remove(fg)
                    ordered.append(fg.goal)
                    progress = True

    def _run(goal):
        if isinstance(goal, (Forall, Impl, Exists)):
            # Nested operators plan their own bodies; they freeze as a
            # whole until the surrounding bindings let them through.
            try:
                planned, post = _plan_formula(goal, state.copy(), theory)
            except NoFiniteStrategy:
                return None
            state.instantiated |= post.instantiated
            state.links.update(post.links)
            _replace(goal, planned)
            return []
        outs = _executable(goal, state, theory)
        if outs is None:
            return None
        state.instantiate(outs)
        return outs

    replacements: Dict[int, Formula] = {}

    def _replace(goal, planned):
        replacements[id(goal)] = planned

    for pos, goal in enumerate(parts):
        outs = _run(goal)
        if outs is None:
            frozen.append(FrozenGoal(goal, pos))
            continue
        ordered.append(goal)
        thaw()
    thaw()
    frozen_out.extend(frozen)
    return [replacements.get(id(g), g) for g in ordered]


def _plan_formula(f: Formula, state: BindingState, theory) -> Tuple[Formula, BindingState]:
    if isinstance(f, (Exists, Forall)):
        body, post = _plan_formula(f.body, state, theory)
        return type(f)(f.vars, body), post
    if isinstance(f, Impl):
        ant, mid = _plan_formula(f.antecedent, state, theory)
        cons, post = _plan_formula(f.consequent, mid, theory)
        return Impl(ant, cons), post
    if isinstance(f, And):
        frozen: List[FrozenGoal] = []
        ordered = _plan_conjunction(conjuncts(f), state, theory, frozen)
        if frozen:
            raise NoFiniteStrategy(
                "no finite evaluation order: %s"
                % ", ".join(format_formula(fg.goal) for fg in frozen),
                frozen_residue=[fg.goal for fg in frozen],
            )
        return conjoin(ordered), state
    if isinstance(f, (Atom, Equality)):
        frozen = []
        ordered = _plan_conjunction([f], state, theory, frozen)
        if frozen:
            raise NoFiniteStrategy(
                "no finite evaluation order: %s" % format_formula(f),
                frozen_residue=[f],
            )
        return ordered[0] if ordered else f, state
    return f, state


def rearrange(f: Formula, theory: CompiledTheory) -> Formula:
    """Reorder conjuncts so every atom is sufficiently instantiated when
    reached; raises NoFiniteStrategy listing goals that never thawed."""
    planned, _ = _plan_formula(f, BindingState(), theory)
    return planned
