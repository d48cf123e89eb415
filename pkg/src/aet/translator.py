"""Abductive equivalential translation.

A source formula is rewritten step by step: the walk descends through
conjunction (siblings join the conjunctive context), quantifiers (bound
variables become unique discharge constants) and implication (the
antecedent extends the context of the consequent only).  A base step
matches an atom against a left-hand-side conjunct of an equivalence,
proves the remaining conjuncts plus conditions in the context (abduction
allowed), splices in the bound right-hand side and simplifies.  An
existential-fold step rewrites a whole quantified atom through an
atomic-LHS existential rule.  Alternatives are explored best-first by
accumulated assumption cost, then step count.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import NoEffectiveTranslation, StepBudgetExceeded, UnsupportedShape
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
    canonical,
    conjoin,
    conjuncts,
    free_variables,
    rename_apart,
)
from .prover import AssumptionInstance, BudgetExhausted, ProofResult, SearchConfig, prove, unify_atoms
from .simplifier import simplify_full
from .syntax import format_formula
from .terms import (
    Compound,
    DischargeConstant,
    NamedObject,
    Session,
    SkolemTerm,
    Substitution,
    Term,
    Variable,
)
from .theory import CompiledTheory, EquivRule

PROOFS_PER_STEP = 4
CANDIDATES_PER_STATE = 16


@dataclass(frozen=True)
class StepRecord:
    path: Tuple[int, ...]
    rule: str
    kind: str  # base | exists-fold
    replaced: Formula
    replacement: Formula
    matcher: Tuple[Tuple[str, str], ...]
    context_used: Tuple[Formula, ...]
    conditions_proved: Formula
    assumptions_added: Tuple[AssumptionInstance, ...]


@dataclass
class Translation:
    source: Formula
    target: Formula
    assumptions: Tuple[AssumptionInstance, ...]
    steps: Tuple[StepRecord, ...]

    @property
    def assumption_cost(self) -> int:
        return sum(a.cost for a in self.assumptions)


def _replace_discharges(f: Formula, mapping: Dict[DischargeConstant, Term]) -> Formula:
    def walk_t(t: Term) -> Term:
        if isinstance(t, DischargeConstant):
            return mapping.get(t, t)
        if isinstance(t, Compound):
            return Compound(t.functor, tuple(walk_t(a) for a in t.args))
        if isinstance(t, SkolemTerm):
            return SkolemTerm(t.index, tuple(walk_t(a) for a in t.args))
        if isinstance(t, NamedObject):
            return NamedObject(t.sort, walk_t(t.ident))
        return t

    def walk(g: Formula) -> Formula:
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


def _children(f: Formula) -> List[Formula]:
    if isinstance(f, And):
        return [f.left, f.right]
    if isinstance(f, (Exists, Forall)):
        return [f.body]
    if isinstance(f, Impl):
        return [f.antecedent, f.consequent]
    return []


def _rebuild(f: Formula, children: List[Formula]) -> Formula:
    if isinstance(f, And):
        return And(children[0], children[1])
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.vars, children[0])
    if isinstance(f, Impl):
        return Impl(children[0], children[1])
    return f


def splice(f: Formula, path: Tuple[int, ...], replacement: Formula) -> Formula:
    if not path:
        return replacement
    kids = _children(f)
    kids[path[0]] = splice(kids[path[0]], path[1:], replacement)
    return _rebuild(f, kids)


def _premises(f: Formula) -> List[Formula]:
    """Sibling premises: conjunctions flatten, existential bodies count
    with their variables standing for fixed witnesses."""
    out: List[Formula] = []

    def walk(g):
        if isinstance(g, (Atom, Equality)):
            out.append(g)
        elif isinstance(g, And):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, Exists):
            walk(g.body)

    walk(f)
    return out


@dataclass(frozen=True)
class _Candidate:
    order: Tuple
    record: StepRecord
    formula: Formula
    new_assumptions: Tuple[AssumptionInstance, ...]


class _Translator:
    def __init__(self, theory, store, config, session):
        self.theory = theory
        self.store = store
        self.config = config
        self.session = session

    def untranslated_atoms(self, f: Formula) -> List[Atom]:
        out = []

        def walk(g):
            if isinstance(g, Atom):
                if not self.theory.is_declared(g.pred):
                    out.append(g)
            else:
                for c in _children(g):
                    walk(c)

        walk(f)
        return out

    def complete(self, f: Formula) -> bool:
        return not self.untranslated_atoms(f)

    def candidates(self, f: Formula) -> List[_Candidate]:
        found: List[_Candidate] = []
        top_free = sorted(free_variables(f))
        dmap = {v: self.session.fresh_discharge(v) for v in top_free}
        self._walk(f, (), [], dmap, found)
        found.sort(key=lambda c: c.order)
        return found[:CANDIDATES_PER_STATE]

    def _walk(self, f, path, context, dmap, found):
        if isinstance(f, Atom):
            self._base_steps(f, path, context, dmap, found)
            return
        if isinstance(f, And):
            left_prem = _premises(f.left)
            right_prem = _premises(f.right)
            self._walk(f.left, path + (0,), context + right_prem, dmap, found)
            self._walk(f.right, path + (1,), context + left_prem, dmap, found)
            return
        if isinstance(f, (Exists, Forall)):
            if isinstance(f, Exists):
                self._fold_steps(f, path, context, dmap, found)
            inner = dict(dmap)
            for v in f.vars:
                inner[v] = self.session.fresh_discharge(v)
            self._walk(f.body, path + (0,), context, inner, found)
            return
        if isinstance(f, Impl):
            ant_prem = _premises(f.antecedent)
            self._walk(f.antecedent, path + (0,), context, dmap, found)
            self._walk(f.consequent, path + (1,), context + ant_prem, dmap, found)
            return

    def _base_steps(self, atom, path, context, dmap, found):
        if self.theory.is_declared(atom.pred):
            return
        entries = self.theory.equiv_by_lhs.get(atom.key, [])
        if not entries:
            return
        atom_d = apply(dmap, atom)
        context_d = [apply(dmap, c) for c in context]
        # Variables of context members bound inside sibling existentials
        # stand for fixed witnesses; they may support a proof but must
        # not leak into the replaced position.
        witness_names = set()
        for c in context_d:
            witness_names |= free_variables(c)
        wmap = {v: self.session.fresh_discharge(v) for v in sorted(witness_names)}
        context_d = [apply(wmap, c) for c in context_d]
        reverse = {dc: Variable(v) for v, dc in dmap.items()}
        for rule_idx, conj_idx in entries:
            rule = self.theory.equiv_rules[rule_idx]
            renamed, conj, others, conds, rhs_evars, rhs_body = self._rename_rule(rule, conj_idx)
            sigma0 = unify_atoms(atom_d, conj)
            if sigma0 is None:
                continue
            goal = apply(sigma0, conjoin(others + conds))
            try:
                proofs = prove(
                    goal,
                    context_d,
                    self.theory,
                    self.store,
                    self.config,
                    allow_assumptions=True,
                    licensing_extra=[atom_d],
                )
            except BudgetExhausted:
                proofs = []
            for pn, proof in enumerate(proofs[:PROOFS_PER_STEP]):
                theta = dict(sigma0)
                theta.update(proof.binding)
                replacement = apply(theta, rhs_body)
                leftover = free_variables(replacement)
                evs = rhs_evars + tuple(v for v in sorted(leftover) if v not in rhs_evars)
                if evs:
                    replacement = Exists(evs, replacement)
                replacement = _replace_discharges(replacement, reverse)
                if _mentions_discharge(replacement):
                    continue  # out-of-scope witness reference
                record = StepRecord(
                    path=path,
                    rule=rule.name,
                    kind="base",
                    replaced=atom,
                    replacement=replacement,
                    matcher=tuple(
                        sorted((v, format_formula(Atom("t", (t,)))) for v, t in theta.items())
                    ),
                    context_used=tuple(context_d),
                    conditions_proved=apply(theta, conjoin(others + conds)),
                    assumptions_added=proof.assumptions,
                )
                found.append(
                    _Candidate(
                        order=(path, rule_idx, conj_idx, pn),
                        record=record,
                        formula=replacement,
                        new_assumptions=proof.assumptions,
                    )
                )

    def _fold_steps(self, f: Exists, path, context, dmap, found):
        body_parts = conjuncts(f.body)
        for i, part in enumerate(body_parts):
            if not isinstance(part, Atom):
                continue
            rules = self.theory.exists_rules_by_lhs.get(part.key, [])
            if not rules:
                continue
            part_d = apply(dmap, part)
            # Freeze the remaining variables for one-sided matching.
            fmap = {v: self.session.fresh_discharge(v) for v in sorted(free_variables(part_d))}
            part_f = apply(fmap, part_d)
            reverse = {dc: Variable(v) for v, dc in dmap.items()}
            reverse.update({dc: Variable(v) for v, dc in fmap.items()})
            frozen_of = {fmap[v]: v for v in fmap}
            others = [p for j, p in enumerate(body_parts) if j != i]
            others_free = set()
            for o in others:
                others_free |= free_variables(o)
            for rule_idx in rules:
                rule = self.theory.equiv_rules[rule_idx]
                renamed, conj, _, conds, rhs_evars, rhs_body = self._rename_rule(rule, 0)
                if conds:
                    continue
                sigma = unify_atoms(part_f, conj)
                if sigma is None:
                    continue
                evar_targets = {}
                ok = True
                for ev in renamed.lhs_exists:
                    t = sigma.get(ev)
                    name = frozen_of.get(t)
                    if name is None or name not in f.vars:
                        ok = False
                        break
                    if name in evar_targets.values() or name in others_free:
                        ok = False
                        break
                    evar_targets[ev] = name
                if not ok:
                    continue
                # The matched node variables must not leak through the
                # other bindings.
                matched = set(evar_targets.values())
                for v, t in sigma.items():
                    if v in evar_targets:
                        continue
                    if any(frozen_of.get(dc) in matched for dc in _discharges_in(t)):
                        ok = False
                        break
                if not ok:
                    continue
                replacement_atom = apply(sigma, rhs_body)
                if rhs_evars:
                    replacement_atom = Exists(rhs_evars, replacement_atom)
                replacement_atom = _replace_discharges(replacement_atom, reverse)
                if _mentions_discharge(replacement_atom):
                    continue
                remaining = [v for v in f.vars if v not in matched]
                new_parts = [p for j, p in enumerate(body_parts) if j != i]
                new_parts.insert(i, replacement_atom)
                new_body = conjoin(new_parts)
                new_node: Formula = Exists(tuple(remaining), new_body) if remaining else new_body
                record = StepRecord(
                    path=path,
                    rule=rule.name,
                    kind="exists-fold",
                    replaced=f,
                    replacement=new_node,
                    matcher=tuple(
                        sorted((v, format_formula(Atom("t", (t,)))) for v, t in sigma.items())
                    ),
                    context_used=tuple(apply(dmap, c) for c in context),
                    conditions_proved=conjoin([]),
                    assumptions_added=(),
                )
                found.append(
                    _Candidate(
                        order=(path, rule_idx, i, -1),
                        record=record,
                        formula=new_node,
                        new_assumptions=(),
                    )
                )

    def _rename_rule(self, rule: EquivRule, conj_idx: int):
        rhs_evars, rhs_conjs = rule.rhs_parts()
        packed = conjoin(
            list(rule.lhs_conjuncts)
            + conjuncts(rule.conds)
            + [Exists(rhs_evars, conjoin(rhs_conjs)) if rhs_evars else conjoin(rhs_conjs)]
        )
        renamed_packed, mapping = rename_apart(packed, self.session)
        parts = conjuncts(renamed_packed)
        n_lhs = len(rule.lhs_conjuncts)
        n_conds = len(conjuncts(rule.conds))
        lhs = parts[:n_lhs]
        conds = parts[n_lhs : n_lhs + n_conds]
        rhs = parts[n_lhs + n_conds :]
        rhs_f = rhs[0] if len(rhs) == 1 else conjoin(rhs)
        if isinstance(rhs_f, Exists):
            new_evars, rhs_body = rhs_f.vars, rhs_f.body
        else:
            new_evars, rhs_body = (), conjoin(rhs)
        renamed_rule = EquivRule(
            tuple(
                mapping[v].name if v in mapping else v for v in rule.lhs_exists
            ),
            tuple(lhs),
            rhs_f,
            conjoin(conds),
            name=rule.name,
        )
        conj = lhs[conj_idx]
        others = [p for k, p in enumerate(lhs) if k != conj_idx]
        return renamed_rule, conj, others, conds, new_evars, rhs_body


def translate(
    source: Formula,
    theory: CompiledTheory,
    store,
    config: Optional[SearchConfig] = None,
    step_budget: int = 50,
    max_results: int = 8,
    exploration_cap: int = 1500,
) -> List[Translation]:
    """Translate a source formula into database-level targets.

    Returns translations ordered by (assumption cost, step count); raises
    NoEffectiveTranslation when no complete target exists, with the stuck
    atoms and nearest-miss rules in the diagnostics.
    """
    _validate_source(source)
    config = config or SearchConfig()
    session = Session()
    tr = _Translator(theory, store, config, session)
    start = simplify_full(source, theory)

    counter = itertools.count()
    heap: List[Tuple[Tuple, int, Formula, Tuple, Tuple]] = []
    heapq.heappush(heap, ((0, 0, 0), next(counter), start, (), ()))
    visited = set()
    results: List[Translation] = []
    result_keys = set()
    best_incomplete: Optional[Tuple[int, Formula]] = None
    budget_hit = False
    expansions = 0

    while heap and expansions < exploration_cap:
        _, _, formula, assumptions, steps = heapq.heappop(heap)
        key = (format_formula(canonical(formula)), _assumption_sig(assumptions))
        if key in visited:
            continue
        visited.add(key)

        if tr.complete(formula):
            rkey = key
            if rkey not in result_keys:
                result_keys.add(rkey)
                results.append(Translation(source, formula, assumptions, steps))
                if len(results) >= max_results:
                    break
            continue

        if len(steps) >= step_budget:
            budget_hit = True
            continue

        expansions += 1
        cands = tr.candidates(formula)
        if not cands:
            stuck = tr.untranslated_atoms(formula)
            rank = len(stuck)
            if best_incomplete is None or rank < best_incomplete[0]:
                best_incomplete = (rank, formula)
            continue
        for cand in cands:
            new_formula = simplify_full(splice(formula, cand.record.path, cand.formula), theory)
            new_assumptions = assumptions + tuple(
                a for a in cand.new_assumptions if a not in assumptions
            )
            new_steps = steps + (cand.record,)
            cost = sum(a.cost for a in new_assumptions)
            prio = (cost, len(new_assumptions), len(new_steps))
            heapq.heappush(heap, (prio, next(counter), new_formula, new_assumptions, new_steps))

    if results:
        results.sort(key=lambda t: (t.assumption_cost, len(t.steps)))
        return results
    if best_incomplete is not None:
        stuck = tr.untranslated_atoms(best_incomplete[1])
        near = []
        for a in stuck:
            for idx, _ in theory.equiv_by_lhs.get(a.key, []):
                near.append(theory.equiv_rules[idx].name)
            for idx in theory.exists_rules_by_lhs.get(a.key, []):
                near.append(theory.equiv_rules[idx].name)
        raise NoEffectiveTranslation(
            "no effective translation; stuck on %s"
            % ", ".join(sorted({format_formula(a) for a in stuck})),
            stuck_atoms=stuck,
            near_misses=sorted(set(near)),
        )
    if budget_hit:
        raise StepBudgetExceeded("translation exceeded the step budget (%d)" % step_budget)
    raise NoEffectiveTranslation("no effective translation")


def _discharges_in(t: Term) -> List[DischargeConstant]:
    out: List[DischargeConstant] = []

    def walk_t(x):
        if isinstance(x, DischargeConstant):
            out.append(x)
        elif isinstance(x, Compound):
            for a in x.args:
                walk_t(a)
        elif isinstance(x, SkolemTerm):
            for a in x.args:
                walk_t(a)
        elif isinstance(x, NamedObject):
            walk_t(x.ident)

    walk_t(t)
    return out


def _mentions_discharge(f: Formula) -> bool:
    marker = []

    def walk_t(t):
        if isinstance(t, DischargeConstant):
            marker.append(t)
        elif isinstance(t, Compound):
            for a in t.args:
                walk_t(a)
        elif isinstance(t, SkolemTerm):
            for a in t.args:
                walk_t(a)
        elif isinstance(t, NamedObject):
            walk_t(t.ident)

    def walk(g):
        if marker:
            return
        if isinstance(g, Atom):
            for a in g.args:
                walk_t(a)
        elif isinstance(g, (Equality, Mismatch)):
            walk_t(g.left)
            walk_t(g.right)
        else:
            for c in _children(g):
                walk(c)

    walk(f)
    return bool(marker)


def _assumption_sig(assumptions) -> Tuple[str, ...]:
    return tuple(
        sorted(
            "%s@%s" % (a.justification, format_formula(canonical(a.goal)))
            for a in assumptions
        )
    )


def _validate_source(f: Formula):
    if isinstance(f, (Atom, Equality, TrueF)):
        return
    if isinstance(f, And):
        _validate_source(f.left)
        _validate_source(f.right)
        return
    if isinstance(f, (Exists, Forall)):
        _validate_source(f.body)
        return
    if isinstance(f, Impl):
        _validate_source(f.antecedent)
        _validate_source(f.consequent)
        return
    raise UnsupportedShape("%s is outside the translatable fragment" % type(f).__name__)


def replay_steps(translation: Translation, theory: CompiledTheory) -> Formula:
    """Re-apply the recorded steps to the source; reproduces the target."""
    f = simplify_full(translation.source, theory)
    for step in translation.steps:
        f = simplify_full(splice(f, step.path, step.replacement), theory)
    return f
