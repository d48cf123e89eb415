"""TRL formulas: conjunction, quantifiers, implication, equality.

The fragment deliberately has no disjunction and no negation constructor;
negative information enters only through neg/1 rules in a theory.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple, Union

from .errors import UnsupportedShape
from .terms import (
    Compound,
    Session,
    SkolemTerm,
    Substitution,
    Term,
    Variable,
    subst_term,
    term_vars,
)


@dataclass(frozen=True)
class Atom:
    pred: str
    args: Tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self):
        return len(self.args)

    @property
    def key(self):
        return (self.pred, len(self.args))


@dataclass(frozen=True)
class Equality:
    left: Term
    right: Term


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    vars: Tuple[str, ...]
    body: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))


@dataclass(frozen=True)
class Forall:
    vars: Tuple[str, ...]
    body: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))


@dataclass(frozen=True)
class Impl:
    antecedent: "Formula"
    consequent: "Formula"


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


@dataclass(frozen=True)
class Mismatch:
    left: Term
    right: Term


TRUE = TrueF()
FALSE = FalseF()

Formula = Union[Atom, Equality, And, Exists, Forall, Impl, TrueF, FalseF, Mismatch]


def conjoin(parts: Iterable[Formula]) -> Formula:
    """Right-nested conjunction of the given parts; TRUE when empty."""
    parts = [p for p in parts if not isinstance(p, TrueF)]
    if not parts:
        return TRUE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def conjuncts(f: Formula) -> List[Formula]:
    """Flatten a conjunction into its non-TRUE conjuncts."""
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    if isinstance(f, TrueF):
        return []
    return [f]


def free_variables(f: Formula) -> set:
    """Exactly the variable names with a free occurrence in f."""
    if isinstance(f, Atom):
        out = set()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, (Equality, Mismatch)):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, And):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_variables(f.body) - set(f.vars)
    if isinstance(f, Impl):
        return free_variables(f.antecedent) | free_variables(f.consequent)
    return set()


_RENAME_SESSION = Session()


def apply(s: Substitution, f):
    """Apply a substitution to a formula or term, capture-avoidingly.

    Bound variables are renamed apart whenever a range term would be
    captured or a bound name is itself in the substitution's domain.
    """
    if not isinstance(
        f, (Atom, Equality, And, Exists, Forall, Impl, TrueF, FalseF, Mismatch)
    ):
        return subst_term(s, f)
    return _apply_formula(s, f)


def _apply_formula(s: Substitution, f: Formula) -> Formula:
    if not s:
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(subst_term(s, a) for a in f.args))
    if isinstance(f, Equality):
        return Equality(subst_term(s, f.left), subst_term(s, f.right))
    if isinstance(f, Mismatch):
        return Mismatch(subst_term(s, f.left), subst_term(s, f.right))
    if isinstance(f, And):
        return And(_apply_formula(s, f.left), _apply_formula(s, f.right))
    if isinstance(f, Impl):
        return Impl(_apply_formula(s, f.antecedent), _apply_formula(s, f.consequent))
    if isinstance(f, (Exists, Forall)):
        inner = {v: t for v, t in s.items() if v not in f.vars}
        relevant = {v: t for v, t in inner.items() if v in free_variables(f.body)}
        if not relevant:
            return f
        range_vars = set()
        for t in relevant.values():
            range_vars |= term_vars(t)
        rename = {}
        new_vars = []
        for v in f.vars:
            if v in range_vars:
                nv = _RENAME_SESSION.fresh_var(v)
                rename[v] = nv
                new_vars.append(nv.name)
            else:
                new_vars.append(v)
        body = _apply_formula(rename, f.body) if rename else f.body
        body = _apply_formula(relevant, body)
        ctor = Exists if isinstance(f, Exists) else Forall
        return ctor(tuple(new_vars), body)
    return f


def formula_atoms(f: Formula) -> List[Atom]:
    out = []

    def walk(g):
        if isinstance(g, Atom):
            out.append(g)
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


def rename_apart(f: Formula, session: Session) -> Tuple[Formula, Substitution]:
    """Rename every free variable of f to a fresh one.

    Used to copy rules before matching, like copy_term in a Prolog engine.
    """
    mapping = {v: session.fresh_var(v) for v in sorted(free_variables(f))}
    return _apply_formula(mapping, f), mapping


def canonical(f: Formula) -> Formula:
    """Rename bound and free variables into a canonical numbering.

    Two formulas are alpha-equivalent (with corresponding free-variable
    layouts) iff their canonical forms are equal.
    """
    counter = [0]

    def fresh():
        counter[0] += 1
        return "V%d" % counter[0]

    def walk(g, env):
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(walk_t(a, env) for a in g.args))
        if isinstance(g, Equality):
            return Equality(walk_t(g.left, env), walk_t(g.right, env))
        if isinstance(g, Mismatch):
            return Mismatch(walk_t(g.left, env), walk_t(g.right, env))
        if isinstance(g, And):
            return And(walk(g.left, env), walk(g.right, env))
        if isinstance(g, Impl):
            return Impl(walk(g.antecedent, env), walk(g.consequent, env))
        if isinstance(g, (Exists, Forall)):
            env2 = dict(env)
            nv = []
            for v in g.vars:
                env2[v] = fresh()
                nv.append(env2[v])
            ctor = Exists if isinstance(g, Exists) else Forall
            return ctor(tuple(nv), walk(g.body, env2))
        return g

    def walk_t(t, env):
        if isinstance(t, Variable):
            if t.name not in env:
                env[t.name] = fresh()
            return Variable(env[t.name])
        if isinstance(t, Compound):
            return Compound(t.functor, tuple(walk_t(a, env) for a in t.args))
        if isinstance(t, SkolemTerm):
            return SkolemTerm(t.index, tuple(walk_t(a, env) for a in t.args))
        from .terms import NamedObject

        if isinstance(t, NamedObject):
            return NamedObject(t.sort, walk_t(t.ident, env))
        return t

    return walk(f, {})


def alpha_equal(f: Formula, g: Formula) -> bool:
    return canonical(f) == canonical(g)


def skolemize(f: Formula, session: Optional[Session] = None) -> List[Formula]:
    """Replace existentials by Skolem terms and split into clause bodies.

    Supported shapes: formulas built from And/Exists/Atom/Equality, plus a
    (possibly universally quantified) implication whose consequent
    existentials become Skolem functions of the antecedent universals.
    Each Skolem term's arguments are the universal variables governing it.
    """
    session = session or _RENAME_SESSION

    def walk(g, universals):
        if isinstance(g, Exists):
            sub = {v: session.fresh_skolem(tuple(Variable(u) for u in universals)) for v in g.vars}
            return walk(_apply_formula(sub, g.body), universals)
        if isinstance(g, And):
            return walk(g.left, universals) + walk(g.right, universals)
        if isinstance(g, (Atom, Equality, TrueF)):
            return [g]
        if isinstance(g, Forall):
            inner = walk_impl(g.body, universals + list(g.vars))
            return [Forall(g.vars, part) if g.vars else part for part in inner]
        if isinstance(g, Impl):
            return walk_impl(g, universals)
        raise UnsupportedShape("cannot skolemize %r" % type(g).__name__)

    def walk_impl(g, universals):
        if isinstance(g, Impl):
            parts = walk(g.consequent, universals)
            return [Impl(g.antecedent, conjoin(parts))]
        return walk(g, universals)

    return [c for c in walk(f, []) if not isinstance(c, TrueF)]


def deskolemize(clauses: List[Formula], session: Optional[Session] = None) -> Formula:
    """Inverse of skolemize for constant-level Skolems.

    Conjoins the clauses, replaces each distinct Skolem constant by a
    fresh variable and binds them all with one outer Exists.
    """
    session = session or _RENAME_SESSION
    indices = []

    def collect_t(t):
        if isinstance(t, SkolemTerm):
            if t.args:
                raise UnsupportedShape("deskolemize requires constant-level Skolems")
            if t.index not in indices:
                indices.append(t.index)
        elif isinstance(t, Compound):
            for a in t.args:
                collect_t(a)
        else:
            from .terms import NamedObject

            if isinstance(t, NamedObject):
                collect_t(t.ident)

    def collect(g):
        if isinstance(g, Atom):
            for a in g.args:
                collect_t(a)
        elif isinstance(g, (Equality, Mismatch)):
            collect_t(g.left)
            collect_t(g.right)
        elif isinstance(g, And):
            collect(g.left)
            collect(g.right)
        elif isinstance(g, (Exists, Forall)):
            collect(g.body)
        elif isinstance(g, Impl):
            collect(g.antecedent)
            collect(g.consequent)

    for c in clauses:
        collect(c)
    mapping = {i: session.fresh_var("X") for i in indices}

    def replace_t(t):
        if isinstance(t, SkolemTerm) and t.index in mapping:
            return mapping[t.index]
        if isinstance(t, Compound):
            return Compound(t.functor, tuple(replace_t(a) for a in t.args))
        from .terms import NamedObject

        if isinstance(t, NamedObject):
            return NamedObject(t.sort, replace_t(t.ident))
        return t

    def replace(g):
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(replace_t(a) for a in g.args))
        if isinstance(g, Equality):
            return Equality(replace_t(g.left), replace_t(g.right))
        if isinstance(g, Mismatch):
            return Mismatch(replace_t(g.left), replace_t(g.right))
        if isinstance(g, And):
            return And(replace(g.left), replace(g.right))
        if isinstance(g, (Exists, Forall)):
            ctor = Exists if isinstance(g, Exists) else Forall
            return ctor(g.vars, replace(g.body))
        if isinstance(g, Impl):
            return Impl(replace(g.antecedent), replace(g.consequent))
        return g

    body = conjoin([replace(c) for c in clauses])
    if mapping:
        return Exists(tuple(v.name for v in mapping.values()), body)
    return body
