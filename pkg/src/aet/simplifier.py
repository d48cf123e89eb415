"""Formula simplification: canonical rewriting plus inference-based
conjunct removal and functional merging, and the assertion cache.

Non-inferential rewriting, applied to fixpoint in order: existentials
move outwards (turning into wide-scope universals over implication
antecedents), equalities are eliminated by unification where their
variables are locally quantified (non-unifiable ground equalities become
mismatch markers), true ground arithmetic atoms are substituted, and
vacuous structure is dropped.  Inferential passes then remove conjuncts
provable from their conjunctive context and merge atoms related by
function declarations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Set, Tuple

from .arith import eval_ground
from .errors import BudgetExhausted, PresuppositionFailure
from .formulas import (
    And,
    Atom,
    Equality,
    Exists,
    FALSE,
    FalseF,
    Forall,
    Formula,
    Impl,
    Mismatch,
    TRUE,
    TrueF,
    apply,
    conjoin,
    conjuncts,
    free_variables,
    skolemize,
    deskolemize,
)
from .prover import SearchConfig, prove
from .store import RelStore
from .terms import (
    Session,
    SkolemTerm,
    Term,
    Variable,
    is_ground_term,
    term_vars,
    unify_terms,
)
from .theory import CompiledTheory

_SESSION = Session()

REDUNDANCY_CONFIG = SearchConfig(initial_limit=6, increment=1, max_limit=6, max_results=1)


def _fresh_name(base: str) -> str:
    return _SESSION.fresh_var(base).name


# ---------------------------------------------------------------------------
# Quantifier motion


def _motion(f: Formula) -> Formula:
    if isinstance(f, And):
        left = _motion(f.left)
        right = _motion(f.right)
        evars: List[str] = []
        while isinstance(left, Exists) or isinstance(right, Exists):
            if isinstance(left, Exists):
                left, moved = _extract_exists(left, right, evars)
            else:
                right, moved = _extract_exists(right, left, evars)
        out: Formula = And(left, right)
        if evars:
            out = Exists(tuple(evars), out)
        return out
    if isinstance(f, Exists):
        body = _motion(f.body)
        if isinstance(body, Exists):
            return Exists(f.vars + body.vars, body.body)
        return Exists(f.vars, body)
    if isinstance(f, Forall):
        body = _motion(f.body)
        if isinstance(body, Forall):
            return _motion(Forall(f.vars + body.vars, body.body))
        return Forall(f.vars, body)
    if isinstance(f, Impl):
        ant = _motion(f.antecedent)
        cons = _motion(f.consequent)
        if isinstance(ant, Exists):
            # (exists x.P) -> Q  ==  forall x.(P -> Q)
            fresh = {}
            names = []
            blocked = free_variables(cons)
            for v in ant.vars:
                if v in blocked:
                    nv = _fresh_name(v)
                    fresh[v] = Variable(nv)
                    names.append(nv)
                else:
                    names.append(v)
            body = apply(fresh, ant.body) if fresh else ant.body
            return _motion(Forall(tuple(names), Impl(body, cons)))
        return Impl(ant, cons)
    return f


def _extract_exists(source: Exists, other: Formula, evars: List[str]):
    blocked = free_variables(other) | set(evars)
    fresh = {}
    for v in source.vars:
        if v in blocked:
            nv = _fresh_name(v)
            fresh[v] = Variable(nv)
            evars.append(nv)
        else:
            evars.append(v)
    body = apply(fresh, source.body) if fresh else source.body
    return body, True


# ---------------------------------------------------------------------------
# Equality elimination


def _sem_ground(t: Term) -> bool:
    return is_ground_term(t, frozen_ground=False)


def _eliminate_equalities(f: Formula) -> Formula:
    if isinstance(f, (Exists, Forall)):
        body = _eliminate_equalities(f.body)
        if isinstance(f, Forall) and isinstance(body, Impl):
            return _forall_impl_equalities(f.vars, body)
        return _quantifier_equalities(type(f), f.vars, body)
    if isinstance(f, And):
        parts = [_eliminate_equalities(c) for c in conjuncts(f)]
        return conjoin([_normalize_equality(c) for c in parts])
    if isinstance(f, Impl):
        return Impl(_eliminate_equalities(f.antecedent), _eliminate_equalities(f.consequent))
    return _normalize_equality(f)


def _normalize_equality(c: Formula) -> Formula:
    """Ground handling only: identical sides become true, provably
    distinct ground sides become a mismatch marker."""
    if not isinstance(c, Equality):
        return c
    if c.left == c.right:
        return TRUE
    if _sem_ground(c.left) and _sem_ground(c.right) and unify_terms(c.left, c.right) is None:
        return Mismatch(c.left, c.right)
    return c


def _quantifier_equalities(ctor, vars_, body: Formula) -> Formula:
    names = list(vars_)
    parts = conjuncts(body) if not isinstance(body, (Impl,)) else None
    if parts is None:
        return ctor(tuple(names), body)
    changed = True
    while changed:
        changed = False
        for i, c in enumerate(parts):
            if not isinstance(c, Equality):
                continue
            sigma = _elimination_subst(c, set(names))
            if sigma is None:
                continue
            parts = [apply(sigma, p) for j, p in enumerate(parts) if j != i]
            names = [n for n in names if n not in sigma]
            changed = True
            break
    body = conjoin([_normalize_equality(p) for p in parts])
    if not names:
        return body
    return ctor(tuple(names), body)


def _forall_impl_equalities(vars_, impl: Impl) -> Formula:
    """forall y.(P & y=t -> Q)  ==  (P -> Q)[y/t]."""
    names = list(vars_)
    ant = conjuncts(impl.antecedent)
    cons = impl.consequent
    changed = True
    while changed:
        changed = False
        for i, c in enumerate(ant):
            if not isinstance(c, Equality):
                continue
            sigma = _elimination_subst(c, set(names))
            if sigma is None:
                continue
            ant = [apply(sigma, p) for j, p in enumerate(ant) if j != i]
            cons = apply(sigma, cons)
            names = [n for n in names if n not in sigma]
            changed = True
            break
    out: Formula = Impl(conjoin([_normalize_equality(p) for p in ant]), cons)
    if names:
        out = Forall(tuple(names), out)
    return out


def _elimination_subst(eq: Equality, scope: Set[str]):
    """A unifier of the equality's sides whose domain lies in scope."""
    for l, r in ((eq.left, eq.right), (eq.right, eq.left)):
        sigma = unify_terms(l, r)
        if sigma and set(sigma) <= scope:
            return sigma
    return None


# ---------------------------------------------------------------------------
# Ground evaluation and cleanup


def _ground_eval(f: Formula, theory: CompiledTheory) -> Formula:
    def visit(g):
        if isinstance(g, Atom):
            klass = theory.relation_class(g.pred)
            if klass in ("arithmetic", "executable") and all(
                _sem_ground(a) for a in g.args
            ):
                # Only identically true ground atoms are substituted.
                if eval_ground(g.pred, g.args) is True:
                    return TRUE
            return g
        if isinstance(g, And):
            return And(visit(g.left), visit(g.right))
        if isinstance(g, (Exists, Forall)):
            return type(g)(g.vars, visit(g.body))
        if isinstance(g, Impl):
            return Impl(visit(g.antecedent), visit(g.consequent))
        return g

    return visit(f)


def _cleanup(f: Formula) -> Formula:
    if isinstance(f, And):
        parts = [_cleanup(c) for c in conjuncts(f)]
        if any(isinstance(p, FalseF) for p in parts):
            return FALSE
        return conjoin(parts)
    if isinstance(f, (Exists, Forall)):
        body = _cleanup(f.body)
        free = free_variables(body)
        seen = set()
        names = []
        for v in f.vars:
            if v in free and v not in seen:
                names.append(v)
            seen.add(v)
        if not names:
            return body
        return type(f)(tuple(names), body)
    if isinstance(f, Impl):
        ant = _cleanup(f.antecedent)
        cons = _cleanup(f.consequent)
        return Impl(ant, cons)
    return f


# ---------------------------------------------------------------------------
# Inferential simplification


def _collect_premises(f: Formula, session: Session) -> List[Formula]:
    """Premise atoms contributed by a sibling subformula: conjunctions
    flatten, existentials contribute their bodies (the quantified
    variables stand for fixed witnesses), universals contribute nothing."""
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


def _provable(goal: Formula, premises: List[Formula], theory: CompiledTheory) -> bool:
    frozen_names = free_variables(goal)
    for p in premises:
        frozen_names |= free_variables(p)
    freezer = Session()
    mapping = {v: freezer.fresh_discharge(v) for v in sorted(frozen_names)}
    goal_f = apply(mapping, goal)
    context = [apply(mapping, p) for p in premises]
    try:
        results = prove(
            goal_f, context, theory, RelStore(), REDUNDANCY_CONFIG,
            allow_assumptions=False,
        )
    except BudgetExhausted:
        return False
    return bool(results)


def _remove_redundant(f: Formula, theory: CompiledTheory) -> Formula:
    session = Session()

    def walk(g, outer: List[Formula]):
        if isinstance(g, And):
            parts = conjuncts(g)
            kept: List[Formula] = []
            remaining = list(parts)
            for i, c in enumerate(parts):
                others = kept + remaining[i + 1 :]
                if isinstance(c, (Atom, Equality)):
                    premises = outer + [
                        p for o in others for p in _collect_premises(o, session)
                    ]
                    if _provable(c, premises, theory):
                        continue
                    kept.append(c)
                else:
                    siblings = [
                        p for j, o in enumerate(parts) if j != i
                        for p in _collect_premises(o, session)
                    ]
                    kept.append(walk(c, outer + siblings))
            return conjoin(kept)
        if isinstance(g, (Exists, Forall)):
            return type(g)(g.vars, walk(g.body, outer))
        if isinstance(g, Impl):
            ant = walk(g.antecedent, outer)
            cons = walk(g.consequent, outer + _collect_premises(ant, session))
            return Impl(ant, cons)
        return g

    return walk(f, [])


def _visible_atoms(f: Formula) -> List[Atom]:
    """Atoms whose variables remain in scope for siblings (no descent
    into quantifiers: their variables would escape)."""
    return [c for c in conjuncts(f) if isinstance(c, Atom)]


def _merge_pass(f: Formula, theory: CompiledTheory):
    """Replace one functionally redundant atom by to-argument equalities.

    Returns (new-formula, changed).  Within a conjunction the later of
    two atoms agreeing on a declaration's from-arguments is replaced;
    an atom may also merge against a context atom from an enclosing
    scope or an implication antecedent.
    """
    changed = [False]

    def merge_against(atom: Atom, anchor: Atom, decl) -> Formula:
        eqs = []
        for pos in decl.to_positions():
            a, b = atom.args[pos], anchor.args[pos]
            if a != b:
                eqs.append(Equality(a, b))
        changed[0] = True
        return conjoin(eqs)

    def try_scope(parts: List[Formula], context: List[Atom]) -> List[Formula]:
        atoms = [(i, c) for i, c in enumerate(parts) if isinstance(c, Atom)]
        for j, (idx, atom) in enumerate(atoms):
            for decl in theory.functions.get(atom.key, []):
                froms = decl.from_positions()
                for _, earlier in atoms[:j]:
                    if earlier.key == atom.key and all(
                        earlier.args[p] == atom.args[p] for p in froms
                    ):
                        parts = list(parts)
                        parts[idx] = merge_against(atom, earlier, decl)
                        return parts
                for anchor in context:
                    if anchor.key == atom.key and all(
                        anchor.args[p] == atom.args[p] for p in froms
                    ):
                        parts = list(parts)
                        parts[idx] = merge_against(atom, anchor, decl)
                        return parts
        return parts

    def walk(g, context: List[Atom]):
        if changed[0]:
            return g
        if isinstance(g, And):
            parts = conjuncts(g)
            new_parts = try_scope(parts, context)
            if changed[0]:
                return conjoin(new_parts)
            out = []
            for i, c in enumerate(parts):
                siblings = [
                    a for j, o in enumerate(parts) if j != i for a in _visible_atoms(o)
                ]
                out.append(walk(c, context + siblings))
            return conjoin(out)
        if isinstance(g, (Exists, Forall)):
            return type(g)(g.vars, walk(g.body, context))
        if isinstance(g, Impl):
            ant = walk(g.antecedent, context)
            cons = walk(g.consequent, context + _visible_atoms(g.antecedent))
            return Impl(ant, cons)
        return g

    return walk(f, []), changed[0]


# ---------------------------------------------------------------------------
# Public operations


def _normalize(f: Formula, theory: CompiledTheory) -> Formula:
    prev = None
    while f != prev:
        prev = f
        f = _motion(f)
        f = _eliminate_equalities(f)
        f = _ground_eval(f, theory)
        f = _cleanup(f)
    return f


def simplify(f: Formula, theory: CompiledTheory) -> Formula:
    """Canonicalize a formula; idempotent."""
    prev = None
    while f != prev:
        prev = f
        f = _normalize(f, theory)
        f = _remove_redundant(f, theory)
        f = _cleanup(f)
    return f


def functional_merge(f: Formula, theory: CompiledTheory) -> Formula:
    """Merge atoms related by function declarations, to fixpoint,
    resimplifying the introduced equalities after each merge."""
    while True:
        f, changed = _merge_pass(f, theory)
        f = _normalize(f, theory)
        if not changed:
            return f


def simplify_full(f: Formula, theory: CompiledTheory) -> Formula:
    """Functional merging and simplification, jointly to fixpoint."""
    prev = None
    while f != prev:
        prev = f
        f = functional_merge(f, theory)
        f = simplify(f, theory)
    return f


def find_mismatch(f: Formula) -> Optional[Mismatch]:
    if isinstance(f, Mismatch):
        return f
    if isinstance(f, And):
        return find_mismatch(f.left) or find_mismatch(f.right)
    if isinstance(f, (Exists, Forall)):
        return find_mismatch(f.body)
    if isinstance(f, Impl):
        return find_mismatch(f.antecedent) or find_mismatch(f.consequent)
    return None


@dataclass
class AssertionCache:
    """Unit clauses still containing Skolem constants, awaiting merges."""

    clauses: List[Formula] = field(default_factory=list)
    pending_skolems: Set[int] = field(default_factory=set)


def _skolem_indices(f: Formula) -> Set[int]:
    out: Set[int] = set()

    def walk_t(t):
        if isinstance(t, SkolemTerm):
            out.add(t.index)
            for a in t.args:
                walk_t(a)
        else:
            from .terms import Compound, NamedObject

            if isinstance(t, Compound):
                for a in t.args:
                    walk_t(a)
            elif isinstance(t, NamedObject):
                walk_t(t.ident)

    def walk(g):
        if isinstance(g, Atom):
            for a in g.args:
                walk_t(a)
        elif isinstance(g, (Equality, Mismatch)):
            walk_t(g.left)
            walk_t(g.right)
        elif isinstance(g, And):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, (Exists, Forall)):
            walk(g.body)
        elif isinstance(g, Impl):
            walk(g.antecedent)
            walk(g.consequent)

    walk(f)
    return out


def assert_simplify(
    cache: AssertionCache,
    new: Formula,
    theory: CompiledTheory,
    store: RelStore,
    session: Optional[Session] = None,
) -> Tuple[AssertionCache, List[Atom]]:
    """Fold a processed assertion into the cache.

    The new assertion is Skolemized into the cache, the whole cache is
    de-Skolemized into one existential conjunction, functionally merged
    and simplified, then re-Skolemized into unit clauses.  Clauses free
    of Skolem constants graduate into the store; a merge that surfaces a
    mismatch raises PresuppositionFailure and leaves the cache unchanged.
    """
    session = session or _SESSION
    clauses = list(cache.clauses) + skolemize(new, session)
    combined = deskolemize(clauses, session)
    merged = simplify_full(combined, theory)
    mism = find_mismatch(merged)
    if mism is not None:
        raise PresuppositionFailure(mism.left, mism.right)
    units = skolemize(merged, session)
    new_cache = AssertionCache()
    graduated: List[Atom] = []
    for unit in units:
        pending = _skolem_indices(unit)
        if pending:
            new_cache.clauses.append(unit)
            new_cache.pending_skolems |= pending
        elif isinstance(unit, Atom):
            if store.add(unit.pred, unit.args):
                graduated.append(unit)
        else:
            new_cache.clauses.append(unit)
    return new_cache, graduated
