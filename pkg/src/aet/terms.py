"""First-order terms, substitutions and unification.

Terms are immutable values. Variables are identified by name; the text
format distinguishes them by a leading uppercase letter or underscore.
Fresh-name counters live in a Session so that everything else stays pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union


@dataclass(frozen=True)
class Variable:
    name: str

    def __repr__(self):
        return "Variable(%r)" % self.name


@dataclass(frozen=True)
class Constant:
    name: str

    def __repr__(self):
        return "Constant(%r)" % self.name


@dataclass(frozen=True)
class Number:
    value: float

    def __repr__(self):
        return "Number(%r)" % (self.value,)


@dataclass(frozen=True)
class DateLiteral:
    year: int
    month: int
    day: int

    def key(self):
        return (self.year, self.month, self.day)

    def __repr__(self):
        return "DateLiteral(%d,%d,%d)" % (self.year, self.month, self.day)


@dataclass(frozen=True)
class Compound:
    functor: str
    args: Tuple["Term", ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("zero-arity symbols are Constants, not Compounds")
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class SkolemTerm:
    index: int
    args: Tuple["Term", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class NamedObject:
    sort: str
    ident: "Term"


@dataclass(frozen=True)
class DischargeConstant:
    index: int
    source: str


Term = Union[
    Variable,
    Constant,
    Number,
    DateLiteral,
    Compound,
    SkolemTerm,
    NamedObject,
    DischargeConstant,
]

# A substitution maps variable names to terms.  All substitutions built
# here are kept idempotent (no mapped variable occurs in any range term).
Substitution = Dict[str, Term]


class Session:
    """Single-writer source of fresh names and indices.

    Skolem and discharge-constant indices are monotone within a session;
    their printed forms (sk(N), c*(N)) are reserved output syntax.
    """

    def __init__(self):
        self._var = 0
        self._skolem = 0
        self._discharge = 0
        self._synthetic = 0

    def fresh_var(self, base="V") -> Variable:
        self._var += 1
        base = base.split("_")[0] if base and base[0].isupper() else "V"
        return Variable("%s_%d" % (base, self._var))

    def fresh_skolem(self, args=()) -> SkolemTerm:
        self._skolem += 1
        return SkolemTerm(self._skolem, tuple(args))

    def fresh_discharge(self, source: str) -> DischargeConstant:
        self._discharge += 1
        return DischargeConstant(self._discharge, source)

    def fresh_constant(self, base: str) -> Constant:
        self._synthetic += 1
        return Constant("%s_%d" % (base, self._synthetic))


def term_vars(t: Term):
    """Set of variable names occurring in a term."""
    out = set()
    _term_vars(t, out)
    return out


def _term_vars(t: Term, out):
    if isinstance(t, Variable):
        out.add(t.name)
    elif isinstance(t, Compound):
        for a in t.args:
            _term_vars(a, out)
    elif isinstance(t, SkolemTerm):
        for a in t.args:
            _term_vars(a, out)
    elif isinstance(t, NamedObject):
        _term_vars(t.ident, out)


def subst_term(s: Substitution, t: Term) -> Term:
    if not s:
        return t
    if isinstance(t, Variable):
        return s.get(t.name, t)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(subst_term(s, a) for a in t.args))
    if isinstance(t, SkolemTerm):
        return SkolemTerm(t.index, tuple(subst_term(s, a) for a in t.args))
    if isinstance(t, NamedObject):
        return NamedObject(t.sort, subst_term(s, t.ident))
    return t


def compose(s1: Substitution, s2: Substitution) -> Substitution:
    """Substitution such that applying it equals applying s1 then s2."""
    out = {v: subst_term(s2, t) for v, t in s1.items()}
    for v, t in s2.items():
        if v not in out:
            out[v] = t
    return {v: t for v, t in out.items() if not (isinstance(t, Variable) and t.name == v)}


def occurs_in(name: str, t: Term) -> bool:
    return name in term_vars(t)


def unify_terms(t1: Term, t2: Term, s: Optional[Substitution] = None) -> Optional[Substitution]:
    """Most general unifier of two terms, or None.

    The occurs-check is always on; DischargeConstants and the remaining
    ground term kinds unify only with themselves (or a variable).
    NamedObjects unify iff their sorts are equal and identifiers unify.
    """
    s = dict(s) if s else {}
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a = subst_term(s, a)
        b = subst_term(s, b)
        if a == b:
            continue
        if isinstance(a, Variable):
            if occurs_in(a.name, b):
                return None
            bind = {a.name: b}
            s = {v: subst_term(bind, t) for v, t in s.items()}
            s[a.name] = b
            continue
        if isinstance(b, Variable):
            stack.append((b, a))
            continue
        if isinstance(a, Compound) and isinstance(b, Compound):
            if a.functor != b.functor or len(a.args) != len(b.args):
                return None
            stack.extend(zip(a.args, b.args))
            continue
        if isinstance(a, SkolemTerm) and isinstance(b, SkolemTerm):
            if a.index != b.index or len(a.args) != len(b.args):
                return None
            stack.extend(zip(a.args, b.args))
            continue
        if isinstance(a, NamedObject) and isinstance(b, NamedObject):
            if a.sort != b.sort:
                return None
            stack.append((a.ident, b.ident))
            continue
        return None
    return s


def is_ground_term(t: Term, frozen_ground=True) -> bool:
    """True when the term has no variables.

    DischargeConstants are syntactically ground; pass frozen_ground=False
    to treat them as unknowns (useful when deciding semantic questions
    such as evaluability or provable distinctness).
    """
    if isinstance(t, Variable):
        return False
    if isinstance(t, DischargeConstant):
        return frozen_ground
    if isinstance(t, Compound):
        return all(is_ground_term(a, frozen_ground) for a in t.args)
    if isinstance(t, SkolemTerm):
        return all(is_ground_term(a, frozen_ground) for a in t.args)
    if isinstance(t, NamedObject):
        return is_ground_term(t.ident, frozen_ground)
    return True
