"""Linguistic domain theories: parsing and compilation.

A theory file holds conditional equivalences, Horn clauses, function
declarations, assumables, neg rules, call patterns, quick tests and
relation declarations.  compile() turns them into the indexed forms the
prover and translator consume: exists-LHS equivalences are split via a
fresh auxiliary predicate, and every equivalence yields normal and
backward Horn-clause readings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import (
    ArityMismatch,
    AuxNameCollision,
    DuplicateFunctionDecl,
    TheorySyntaxError,
)
from .formulas import (
    And,
    Atom,
    Equality,
    Exists,
    Forall,
    Formula,
    Impl,
    TRUE,
    TrueF,
    conjoin,
    conjuncts,
    formula_atoms,
    free_variables,
)
from .syntax import Parser, TokenStream, tokenize
from .terms import Session, SkolemTerm, Term, Variable, term_vars

AUX_PREFIX = "aux_"


@dataclass
class EquivRule:
    lhs_exists: Tuple[str, ...]
    lhs_conjuncts: Tuple[Atom, ...]
    rhs: Formula
    conds: Formula
    name: str = ""
    line: Optional[int] = None
    column: Optional[int] = None

    @property
    def is_atomic_exists(self) -> bool:
        return bool(self.lhs_exists)

    def rhs_parts(self) -> Tuple[Tuple[str, ...], List[Formula]]:
        """RHS existential variables and flattened conjuncts."""
        rhs = self.rhs
        evars: Tuple[str, ...] = ()
        while isinstance(rhs, Exists):
            evars = evars + rhs.vars
            rhs = rhs.body
        return evars, conjuncts(rhs)


@dataclass
class HornClause:
    head: Atom
    body: Formula
    origin: str = "user"  # user | normal-reading | backward-reading | function-expansion
    rule_name: str = ""
    line: Optional[int] = None
    column: Optional[int] = None


@dataclass
class FunctionDecl:
    template: Atom
    from_args: Tuple[str, ...]
    to_args: Tuple[str, ...]
    line: Optional[int] = None
    column: Optional[int] = None

    def from_positions(self) -> List[int]:
        return [i for i, a in enumerate(self.template.args)
                if isinstance(a, Variable) and a.name in self.from_args]

    def to_positions(self) -> List[int]:
        return [i for i, a in enumerate(self.template.args)
                if isinstance(a, Variable) and a.name in self.to_args]


@dataclass
class AssumableDecl:
    goal: Formula  # Atom or Equality
    cost: int
    justification: str
    kind: str  # specialization | limitation | approximation
    condition: Atom
    line: Optional[int] = None
    column: Optional[int] = None


@dataclass
class NegRule:
    goal: Atom
    body: Formula
    line: Optional[int] = None
    column: Optional[int] = None


@dataclass
class CallPattern:
    template: Atom
    in_args: Tuple[int, ...]  # zero-based positions
    out_args: Tuple[int, ...]
    line: Optional[int] = None
    column: Optional[int] = None


@dataclass
class QuickTest:
    kind: str  # failure | determinism
    goal: Atom
    bindings: Tuple[object, ...]  # 'ground' | 'any' | ('equals', Term)
    line: Optional[int] = None
    column: Optional[int] = None


@dataclass
class RelationDecl:
    name: str
    arity: int
    klass: str  # database | arithmetic | executable
    column_names: Tuple[str, ...] = ()
    line: Optional[int] = None
    column: Optional[int] = None


Decl = object
Theory = List[Decl]


def _goal_key(goal: Formula):
    if isinstance(goal, Equality):
        return ("=", 2)
    return (goal.pred, len(goal.args))


KINDS = ("specialization", "limitation", "approximation")
CLASSES = ("database", "arithmetic", "executable")


class _TheoryParser:
    def __init__(self, text: str):
        self.ts = TokenStream(tokenize(text))
        self.fp = Parser(self.ts, permissive=False)

    def parse(self) -> Theory:
        decls: Theory = []
        relations: Dict[str, RelationDecl] = {}
        functions = set()
        while self.ts.peek().kind != "eof":
            tok = self.ts.peek()
            handler = {
                "equiv": self._equiv,
                "hc": self._hc,
                "function": self._function,
                "assumable": self._assumable,
                "neg": self._neg,
                "call_pattern": self._call_pattern,
                "quick_fail": self._quick_test,
                "quick_det": self._quick_test,
                "relation": self._relation,
            }.get(tok.text)
            if handler is None:
                raise TheorySyntaxError(
                    "found %r" % tok.text, tok.line, tok.column, expected="declaration"
                )
            decl = handler()
            decl.line, decl.column = tok.line, tok.column
            self.ts.expect(".")
            self._check(decl, relations, functions, tok)
            decls.append(decl)
        return decls

    def _check(self, decl, relations, functions, tok):
        if isinstance(decl, RelationDecl):
            relations[decl.name] = decl
            return
        if isinstance(decl, FunctionDecl):
            key = (decl.template.pred, decl.template.arity, frozenset(decl.from_args))
            if key in functions:
                raise DuplicateFunctionDecl(
                    "duplicate function declaration for %s/%d"
                    % (decl.template.pred, decl.template.arity)
                )
            functions.add(key)
        for atom in _decl_atoms(decl):
            rel = relations.get(atom.pred)
            if rel is not None and rel.arity != atom.arity:
                raise ArityMismatch(
                    "%s used with arity %d but declared with arity %d (line %d)"
                    % (atom.pred, atom.arity, rel.arity, tok.line)
                )

    def _equiv(self) -> EquivRule:
        self.ts.next()
        lhs = self.fp.parse_formula()
        self.ts.expect("<->")
        rhs = self.fp.parse_formula()
        conds: Formula = TRUE
        if self.ts.at("<-"):
            self.ts.next()
            conds = self.fp.parse_formula()
        evars: Tuple[str, ...] = ()
        body = lhs
        if isinstance(body, Exists):
            evars, body = body.vars, body.body
        parts = conjuncts(body)
        tok = self.ts.peek()
        for p in parts:
            if not isinstance(p, Atom):
                raise TheorySyntaxError(
                    "equivalence left-hand sides are conjunctions of atoms",
                    tok.line, tok.column,
                )
        if not parts:
            raise TheorySyntaxError("empty equivalence left-hand side", tok.line, tok.column)
        lhs_vars = set()
        for p in parts:
            lhs_vars |= free_variables(p)
        for v in evars:
            if v not in lhs_vars:
                raise TheorySyntaxError(
                    "quantified variable %s does not occur on the left-hand side" % v,
                    tok.line, tok.column,
                )
        rhs_body = rhs
        while isinstance(rhs_body, Exists):
            rhs_body = rhs_body.body
        _validate_flat(rhs_body, "equivalence right-hand sides", tok)
        if set(evars) & free_variables(rhs):
            raise TheorySyntaxError(
                "left-hand-side existentials may not occur on the right-hand side",
                tok.line, tok.column,
            )
        _validate_flat(conds, "equivalence conditions", tok)
        return EquivRule(tuple(evars), tuple(parts), rhs, conds)

    def _hc(self) -> HornClause:
        self.ts.next()
        head = self._head_atom()
        body: Formula = TRUE
        if self.ts.at("<-"):
            self.ts.next()
            body = self.fp.parse_formula()
        return HornClause(head, body, origin="user")

    def _head_atom(self) -> Atom:
        tok = self.ts.peek()
        f = self.fp.parse_formula()
        if isinstance(f, Equality):
            raise TheorySyntaxError("clause heads may not be equalities", tok.line, tok.column)
        if not isinstance(f, Atom):
            raise TheorySyntaxError("expected an atom", tok.line, tok.column)
        return f

    def _function(self) -> FunctionDecl:
        self.ts.next()
        tok = self.ts.peek()
        template = self._head_atom()
        names = set()
        for a in template.args:
            if not isinstance(a, Variable) or a.name in names:
                raise TheorySyntaxError(
                    "function templates take all-distinct variable arguments",
                    tok.line, tok.column,
                )
            names.add(a.name)
        self.ts.expect(",")
        from_args = tuple(self.fp._var_list())
        self.ts.expect("->")
        to_args = tuple(self.fp._var_list())
        if not set(from_args) <= names or not set(to_args) <= names:
            raise TheorySyntaxError(
                "function from/to variables must come from the template", tok.line, tok.column
            )
        if set(from_args) & set(to_args):
            raise TheorySyntaxError(
                "function from and to variables must be disjoint", tok.line, tok.column
            )
        return FunctionDecl(template, from_args, to_args)

    def _assumable(self) -> AssumableDecl:
        self.ts.next()
        tok = self.ts.peek()
        goal = self.fp.parse_formula()
        if not isinstance(goal, (Atom, Equality)):
            raise TheorySyntaxError(
                "assumable goals are atoms or equalities", tok.line, tok.column
            )
        self.ts.expect(",")
        cost_tok = self.ts.next()
        if cost_tok.kind != "number" or "." in cost_tok.text or cost_tok.text.startswith("-"):
            raise TheorySyntaxError(
                "assumable costs are non-negative integers", cost_tok.line, cost_tok.column
            )
        self.ts.expect(",")
        just = self.ts.next()
        if just.kind != "ident":
            raise TheorySyntaxError("expected a justification tag", just.line, just.column)
        self.ts.expect(",")
        kind = self.ts.next()
        if kind.text not in KINDS:
            raise TheorySyntaxError(
                "found %r" % kind.text, kind.line, kind.column,
                expected="one of %s" % (KINDS,),
            )
        self.ts.expect(",")
        cond = self._head_atom()
        return AssumableDecl(goal, int(cost_tok.text), just.text, kind.text, cond)

    def _neg(self) -> NegRule:
        self.ts.next()
        goal = self._head_atom()
        self.ts.expect("<-")
        body = self.fp.parse_formula()
        return NegRule(goal, body)

    def _call_pattern(self) -> CallPattern:
        self.ts.next()
        tok = self.ts.peek()
        template = self._head_atom()
        self.ts.expect(",")
        ins = self._pos_list(template)
        self.ts.expect("->")
        outs = self._pos_list(template)
        if set(ins) & set(outs):
            raise TheorySyntaxError(
                "call pattern in and out positions must be disjoint", tok.line, tok.column
            )
        return CallPattern(template, tuple(ins), tuple(outs))

    def _pos_list(self, template: Atom) -> List[int]:
        self.ts.expect("[")
        out = []
        if not self.ts.at("]"):
            while True:
                tok = self.ts.next()
                if tok.kind != "number":
                    raise TheorySyntaxError(
                        "found %r" % tok.text, tok.line, tok.column, expected="position"
                    )
                pos = int(tok.text)
                if not 1 <= pos <= template.arity:
                    raise TheorySyntaxError(
                        "position %d outside arity %d" % (pos, template.arity),
                        tok.line, tok.column,
                    )
                out.append(pos - 1)
                if not self.ts.at(","):
                    break
                self.ts.next()
        self.ts.expect("]")
        return out

    def _quick_test(self) -> QuickTest:
        tok = self.ts.next()
        kind = "failure" if tok.text == "quick_fail" else "determinism"
        goal = self._head_atom()
        self.ts.expect("when")
        self.ts.expect("[")
        bindings = []
        if not self.ts.at("]"):
            while True:
                b = self.ts.peek()
                if b.text in ("ground", "any"):
                    self.ts.next()
                    bindings.append(b.text)
                elif b.text == "=":
                    self.ts.next()
                    bindings.append(("equals", self.fp.parse_term()))
                else:
                    raise TheorySyntaxError(
                        "found %r" % b.text, b.line, b.column,
                        expected="ground, any or =term",
                    )
                if not self.ts.at(","):
                    break
                self.ts.next()
        self.ts.expect("]")
        if len(bindings) != goal.arity:
            raise TheorySyntaxError(
                "binding conditions must cover all %d arguments" % goal.arity,
                tok.line, tok.column,
            )
        return QuickTest(kind, goal, tuple(bindings))

    def _relation(self) -> RelationDecl:
        self.ts.next()
        name = self.ts.next()
        if name.kind != "ident":
            raise TheorySyntaxError("expected a relation name", name.line, name.column)
        self.ts.expect("/")
        arity = self.ts.next()
        if arity.kind != "number":
            raise TheorySyntaxError("expected an arity", arity.line, arity.column)
        klass = self.ts.next()
        if klass.text not in CLASSES:
            raise TheorySyntaxError(
                "found %r" % klass.text, klass.line, klass.column,
                expected="one of %s" % (CLASSES,),
            )
        cols: Tuple[str, ...] = ()
        if self.ts.at("["):
            self.ts.next()
            names = []
            if not self.ts.at("]"):
                while True:
                    c = self.ts.next()
                    if c.kind != "ident":
                        raise TheorySyntaxError(
                            "expected a column name", c.line, c.column
                        )
                    names.append(c.text)
                    if not self.ts.at(","):
                        break
                    self.ts.next()
            self.ts.expect("]")
            cols = tuple(names)
        decl = RelationDecl(name.text, int(arity.text), klass.text, cols)
        if decl.klass == "database" and len(decl.column_names) != decl.arity:
            raise TheorySyntaxError(
                "database relations name one column per argument", name.line, name.column
            )
        return decl


def _validate_flat(f: Formula, what: str, tok):
    for c in conjuncts(f):
        if not isinstance(c, (Atom, Equality)):
            raise TheorySyntaxError(
                "%s are conjunctions of atoms and equalities" % what, tok.line, tok.column
            )


def _decl_atoms(decl) -> List[Atom]:
    if isinstance(decl, EquivRule):
        return list(decl.lhs_conjuncts) + formula_atoms(decl.rhs) + formula_atoms(decl.conds)
    if isinstance(decl, HornClause):
        return [decl.head] + formula_atoms(decl.body)
    if isinstance(decl, NegRule):
        return [decl.goal] + formula_atoms(decl.body)
    if isinstance(decl, AssumableDecl):
        out = [decl.condition]
        if isinstance(decl.goal, Atom):
            out.append(decl.goal)
        return out
    if isinstance(decl, FunctionDecl):
        return [decl.template]
    if isinstance(decl, (CallPattern, QuickTest)):
        return []
    return []


def parse_theory(text: str) -> Theory:
    """Parse one theory file into a list of typed declarations."""
    return _TheoryParser(text).parse()


@dataclass
class CompiledTheory:
    equiv_rules: List[EquivRule] = field(default_factory=list)
    equiv_by_lhs: Dict[Tuple[str, int], List[Tuple[int, int]]] = field(default_factory=dict)
    exists_rules_by_lhs: Dict[Tuple[str, int], List[int]] = field(default_factory=dict)
    clauses_by_head: Dict[Tuple[str, int], List[HornClause]] = field(default_factory=dict)
    normal_readings: List[HornClause] = field(default_factory=list)
    backward_readings: List[HornClause] = field(default_factory=list)
    user_clauses: List[HornClause] = field(default_factory=list)
    function_equivs: List[EquivRule] = field(default_factory=list)
    assumables: Dict[Tuple[str, int], List[AssumableDecl]] = field(default_factory=dict)
    neg_rules: Dict[Tuple[str, int], List[NegRule]] = field(default_factory=dict)
    call_patterns: Dict[Tuple[str, int], List[CallPattern]] = field(default_factory=dict)
    quick_fail: Dict[Tuple[str, int], List[QuickTest]] = field(default_factory=dict)
    quick_det: Dict[Tuple[str, int], List[QuickTest]] = field(default_factory=dict)
    relations: Dict[str, RelationDecl] = field(default_factory=dict)
    functions: Dict[Tuple[str, int], List[FunctionDecl]] = field(default_factory=dict)
    aux_preds: set = field(default_factory=set)

    def relation_class(self, pred: str) -> Optional[str]:
        decl = self.relations.get(pred)
        return decl.klass if decl else None

    def is_declared(self, pred: str) -> bool:
        return pred in self.relations

    def is_fixpoint_atom(self, atom: Atom) -> bool:
        """Atoms over declared predicates are translation fixpoints."""
        return self.is_declared(atom.pred) or isinstance(atom, Equality)

    def clauses_for(self, key: Tuple[str, int]) -> List[HornClause]:
        return self.clauses_by_head.get(key, [])


def compile_theory(decls: Theory, session: Optional[Session] = None) -> CompiledTheory:
    """Compile declarations into the indexed CompiledTheory.

    Equivalences with existentially quantified left-hand sides are split
    into a universal rule defining a fresh aux predicate plus an
    atomic-LHS existential rule; every rule then contributes one normal
    reading per LHS conjunct and one backward reading per RHS atom, with
    right-hand existentials Skolemized over the LHS universals.
    """
    session = session or Session()
    ct = CompiledTheory()

    for decl in decls:
        for atom in _decl_atoms(decl):
            if atom.pred.startswith(AUX_PREFIX):
                raise AuxNameCollision(
                    "predicate %r collides with the reserved aux_ prefix" % atom.pred
                )

    for decl in decls:
        if isinstance(decl, RelationDecl):
            ct.relations[decl.name] = decl
    for decl in decls:
        for atom in _decl_atoms(decl):
            rel = ct.relations.get(atom.pred)
            if rel is not None and rel.arity != atom.arity:
                raise ArityMismatch(
                    "%s used with arity %d but declared with arity %d"
                    % (atom.pred, atom.arity, rel.arity)
                )

    aux_ordinal = 0
    for decl in decls:
        if isinstance(decl, EquivRule):
            rules = [decl]
            needs_split = decl.lhs_exists and (
                len(decl.lhs_conjuncts) > 1 or not isinstance(decl.conds, TrueF)
            )
            if needs_split:
                aux_ordinal += 1
                rules = _split_exists_rule(decl, aux_ordinal, ct)
            for rule in rules:
                _add_equiv(ct, rule, session)
        elif isinstance(decl, HornClause):
            ct.user_clauses.append(decl)
        elif isinstance(decl, FunctionDecl):
            ct.functions.setdefault(decl.template.key, []).append(decl)
            ct.function_equivs.append(_function_equiv(decl, session))
        elif isinstance(decl, AssumableDecl):
            ct.assumables.setdefault(_goal_key(decl.goal), []).append(decl)
        elif isinstance(decl, NegRule):
            ct.neg_rules.setdefault(decl.goal.key, []).append(decl)
        elif isinstance(decl, CallPattern):
            ct.call_patterns.setdefault(decl.template.key, []).append(decl)
        elif isinstance(decl, QuickTest):
            target = ct.quick_fail if decl.kind == "failure" else ct.quick_det
            target.setdefault(decl.goal.key, []).append(decl)

    # Clause index ordered: user clauses, then normal, then backward
    # readings, each in declaration order (deterministic tie-breaking).
    for clause in ct.user_clauses + ct.normal_readings + ct.backward_readings:
        ct.clauses_by_head.setdefault(clause.head.key, []).append(clause)
    return ct


def _split_exists_rule(rule: EquivRule, ordinal: int, ct: CompiledTheory) -> List[EquivRule]:
    aux_name = "%s%s_%d" % (AUX_PREFIX, rule.lhs_conjuncts[0].pred, ordinal)
    ct.aux_preds.add(aux_name)
    ordered = list(rule.lhs_exists)
    for c in rule.lhs_conjuncts:
        for a in c.args:
            for v in _ordered_vars(a):
                if v not in ordered:
                    ordered.append(v)
    aux_atom = Atom(aux_name, tuple(Variable(v) for v in ordered))
    universal = EquivRule(
        (), rule.lhs_conjuncts, aux_atom, rule.conds,
        name=rule.name + ":def" if rule.name else aux_name + ":def",
        line=rule.line, column=rule.column,
    )
    atomic = EquivRule(
        rule.lhs_exists, (aux_atom,), rule.rhs, TRUE,
        name=rule.name + ":fold" if rule.name else aux_name + ":fold",
        line=rule.line, column=rule.column,
    )
    return [universal, atomic]


def _ordered_vars(t: Term) -> List[str]:
    out: List[str] = []

    def walk(x):
        from .terms import Compound, NamedObject, SkolemTerm as Sk

        if isinstance(x, Variable):
            if x.name not in out:
                out.append(x.name)
        elif isinstance(x, Compound):
            for a in x.args:
                walk(a)
        elif isinstance(x, Sk):
            for a in x.args:
                walk(a)
        elif isinstance(x, NamedObject):
            walk(x.ident)

    walk(t)
    return out


def _lhs_universal_vars(rule: EquivRule) -> List[str]:
    ordered: List[str] = []
    for c in rule.lhs_conjuncts:
        for a in c.args:
            for v in _ordered_vars(a):
                if v not in ordered and v not in rule.lhs_exists:
                    ordered.append(v)
    return ordered


def _add_equiv(ct: CompiledTheory, rule: EquivRule, session: Session):
    idx = len(ct.equiv_rules)
    if not rule.name:
        rule.name = "eq%d" % (idx + 1)
    ct.equiv_rules.append(rule)
    lhs_universals = _lhs_universal_vars(rule)
    rhs_evars, rhs_conjs = rule.rhs_parts()
    conds = conjuncts(rule.conds)

    if rule.is_atomic_exists:
        ct.exists_rules_by_lhs.setdefault(rule.lhs_conjuncts[0].key, []).append(idx)
    else:
        for k, conj in enumerate(rule.lhs_conjuncts):
            ct.equiv_by_lhs.setdefault(conj.key, []).append((idx, k))

    # Normal readings: one per LHS conjunct; LHS existentials in the head
    # become Skolem functions of the rule's universal variables.
    lhs_sk = {
        v: session.fresh_skolem(tuple(Variable(u) for u in lhs_universals))
        for v in rule.lhs_exists
    }
    from .formulas import apply as f_apply

    body = conjoin(list(rhs_conjs) + conds)
    for conj in rule.lhs_conjuncts:
        head = f_apply(lhs_sk, conj) if lhs_sk else conj
        ct.normal_readings.append(
            HornClause(head, body, origin="normal-reading", rule_name=rule.name)
        )

    # Backward readings: one per RHS atom; RHS existentials become Skolem
    # functions of the universally quantified LHS variables, in LHS
    # textual order.
    rhs_sk = {
        v: session.fresh_skolem(tuple(Variable(u) for u in lhs_universals))
        for v in rhs_evars
    }
    back_body = conjoin(list(rule.lhs_conjuncts) + conds)
    for q in rhs_conjs:
        if not isinstance(q, Atom):
            continue
        head = f_apply(rhs_sk, q) if rhs_sk else q
        ct.backward_readings.append(
            HornClause(head, back_body, origin="backward-reading", rule_name=rule.name)
        )


def _function_equiv(decl: FunctionDecl, session: Session) -> EquivRule:
    """The conditional-equivalence form of a function declaration.

    function(r(F,T1,T2),[F]->[T1,T2]) reads as
    (r(F,T1,T2) <-> and(T1=T1',T2=T2')) <- r(F,T1',T2').
    """
    template = decl.template
    renaming = {
        v.name: session.fresh_var(v.name)
        for v in template.args
        if isinstance(v, Variable) and v.name in decl.to_args
    }
    other = Atom(
        template.pred,
        tuple(renaming.get(a.name, a) if isinstance(a, Variable) else a for a in template.args),
    )
    eqs = [
        Equality(Variable(v), renaming[v])
        for v in (a.name for a in template.args if isinstance(a, Variable))
        if v in renaming
    ]
    return EquivRule((), (template,), conjoin(eqs), other, name="function:%s" % template.pred)
