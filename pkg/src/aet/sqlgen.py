"""Conversion of evaluable formulas into SELECT-bearing forms and
rendering of concrete SQL text.

Database atoms and where-convertible conditions inside one conjunction
group into a SelectGoal holding an abstract SELECT; unconvertible
conjuncts stay outside the goal.  Rendering produces uppercase keywords,
SELECT DISTINCT, single-quoted string constants and D-MON-YY dates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from .errors import UnconvertibleCondition
from .formulas import (
    And,
    Atom,
    Equality,
    Exists,
    Forall,
    Formula,
    Impl,
    conjoin,
    conjuncts,
)
from .prover import unify_atoms
from .syntax import format_term
from .terms import (
    Compound,
    Constant,
    DateLiteral,
    NamedObject,
    Number,
    Session,
    Term,
    Variable,
    is_ground_term,
)
from .theory import CompiledTheory

# Arithmetic predicates with a direct WHERE-clause rendering.
SQL_CONDITIONS = {"sql_date_leq": "<="}

MONTHS = ("JAN", "FEB", "MAR", "APR", "MAY", "JUN",
          "JUL", "AUG", "SEP", "OCT", "NOV", "DEC")


@dataclass(frozen=True)
class ColumnRef:
    alias: str
    column: str

    def __str__(self):
        return "%s.%s" % (self.alias, self.column)


@dataclass(frozen=True)
class EqConst:
    column: ColumnRef
    value: Term


@dataclass(frozen=True)
class EqCol:
    left: ColumnRef
    right: ColumnRef


@dataclass(frozen=True)
class DateCmp:
    op: str  # '<='
    left: Union[ColumnRef, Term]
    right: Union[ColumnRef, Term]


Condition = Union[EqConst, EqCol, DateCmp]


@dataclass(frozen=True)
class AbstractSelect:
    columns: Tuple[ColumnRef, ...]
    from_relations: Tuple[Tuple[str, str], ...]  # (relation, alias)
    where: Tuple[Condition, ...]


@dataclass(frozen=True)
class SelectGoal:
    vars: Tuple[str, ...]
    select: AbstractSelect

    def format(self) -> str:
        return "trl_select([%s],%s)" % (",".join(self.vars), format_term(select_to_term(self.select)))


def _backend_rules(theory: CompiledTheory):
    """Equivalences translating representation-independent arithmetic
    predicates into SQL-level ones: single arithmetic LHS atom,
    unconditional, flat arithmetic RHS."""
    out = []
    for rule in theory.equiv_rules:
        if rule.lhs_exists or len(rule.lhs_conjuncts) != 1:
            continue
        if conjuncts(rule.conds):
            continue
        lhs = rule.lhs_conjuncts[0]
        if theory.relation_class(lhs.pred) != "arithmetic":
            continue
        evars, rhs = rule.rhs_parts()
        if evars:
            continue
        if not all(
            isinstance(c, Atom) and theory.relation_class(c.pred) == "arithmetic"
            for c in rhs
        ):
            continue
        out.append(rule)
    return out


def _apply_backend(parts: List[Formula], theory, session) -> List[Formula]:
    rules = _backend_rules(theory)
    if not rules:
        return parts
    out: List[Formula] = []
    for part in parts:
        replaced = None
        if isinstance(part, Atom):
            for rule in rules:
                lhs = rule.lhs_conjuncts[0]
                if lhs.key != part.key:
                    continue
                fmap = {
                    v: session.fresh_discharge(v)
                    for v in sorted(
                        set().union(*(map(lambda a: _vars_of(a), part.args))) if part.args else set()
                    )
                }
                frozen = Atom(part.pred, tuple(_freeze_term(a, fmap) for a in part.args))
                sigma = unify_atoms(frozen, _rename_rule_atom(lhs, rule, session))
                if sigma is None:
                    continue
                _, rhs = rule.rhs_parts()
                new = [Atom(c.pred, tuple(_thaw(_sub(sigma, t), fmap) for t in c.args)) for c in rhs]
                replaced = new
                break
        if replaced is None:
            out.append(part)
        else:
            out.extend(replaced)
    return out


def _vars_of(t: Term):
    from .terms import term_vars

    return term_vars(t)


def _freeze_term(t: Term, fmap):
    from .terms import subst_term

    return subst_term(fmap, t)


def _rename_rule_atom(lhs: Atom, rule, session: Session) -> Atom:
    from .formulas import rename_apart

    renamed, _ = rename_apart(lhs, session)
    return renamed


def _sub(sigma, t: Term) -> Term:
    from .terms import subst_term

    return subst_term(sigma, t)


def _thaw(t: Term, fmap) -> Term:
    reverse = {dc: Variable(v) for v, dc in fmap.items()}

    def walk(x):
        if x in reverse:
            return reverse[x]
        if isinstance(x, Compound):
            return Compound(x.functor, tuple(walk(a) for a in x.args))
        if isinstance(x, NamedObject):
            return NamedObject(x.sort, walk(x.ident))
        return x

    return walk(t)


class _AliasCounter:
    def __init__(self):
        self.n = 0

    def next(self) -> str:
        self.n += 1
        return "t_%d" % self.n


def to_sql(f: Formula, theory: CompiledTheory) -> Formula:
    """Group database atoms and convertible conditions into SelectGoals."""
    counter = _AliasCounter()
    session = Session()

    def walk(g):
        if isinstance(g, And):
            parts = conjuncts(g)
            if any(_is_db_atom(p, theory) for p in parts):
                return _group(parts, theory, counter, session)
            return conjoin([walk(p) for p in parts])
        if isinstance(g, (Exists, Forall)):
            return type(g)(g.vars, walk(g.body))
        if isinstance(g, Impl):
            return Impl(walk(g.antecedent), walk(g.consequent))
        if isinstance(g, Atom) and _is_db_atom(g, theory):
            return _group([g], theory, counter, session)
        return g

    return walk(f)


def _is_db_atom(p: Formula, theory) -> bool:
    return isinstance(p, Atom) and theory.relation_class(p.pred) == "database"


def _group(parts: List[Formula], theory, counter, session) -> Formula:
    parts = _apply_backend(parts, theory, session)
    db_atoms = [(i, p) for i, p in enumerate(parts) if _is_db_atom(p, theory)]

    colmap: Dict[str, ColumnRef] = {}
    columns: List[ColumnRef] = []
    var_order: List[str] = []
    from_relations: List[Tuple[str, str]] = []
    eq_consts: List[EqConst] = []
    eq_cols: List[EqCol] = []

    for _, atom in db_atoms:
        decl = theory.relations[atom.pred]
        alias = counter.next()
        from_relations.append((atom.pred, alias))
        for col_name, arg in zip(decl.column_names, atom.args):
            ref = ColumnRef(alias, col_name)
            if isinstance(arg, Variable):
                if arg.name in colmap:
                    eq_cols.append(EqCol(colmap[arg.name], ref))
                else:
                    colmap[arg.name] = ref
                    var_order.append(arg.name)
                    columns.append(ref)
            elif isinstance(arg, (Constant, Number, DateLiteral)):
                eq_consts.append(EqConst(ref, arg))
            else:
                raise UnconvertibleCondition(
                    "database atom argument %s cannot fill column %s"
                    % (format_term(arg), ref)
                )

    converted: List[Condition] = []
    leftover: List[Formula] = []
    consumed = {i for i, _ in db_atoms}
    for i, part in enumerate(parts):
        if i in consumed:
            continue
        cond = _convert_condition(part, colmap)
        if cond is not None:
            converted.append(cond)
        else:
            leftover.append(part)

    where = tuple(eq_consts + eq_cols + converted)
    select = AbstractSelect(tuple(columns), tuple(from_relations), where)
    goal = SelectGoal(tuple(var_order), select)
    return conjoin([goal] + leftover)


def _convert_condition(part: Formula, colmap) -> Optional[Condition]:
    if isinstance(part, Atom) and part.pred in SQL_CONDITIONS and len(part.args) == 2:
        sides = []
        for arg in part.args:
            if isinstance(arg, Variable) and arg.name in colmap:
                sides.append(colmap[arg.name])
            elif isinstance(arg, DateLiteral):
                sides.append(arg)
            else:
                return None
        return DateCmp(SQL_CONDITIONS[part.pred], sides[0], sides[1])
    if isinstance(part, Equality):
        l, r = part.left, part.right
        for a, b in ((l, r), (r, l)):
            if (
                isinstance(a, Variable)
                and a.name in colmap
                and isinstance(b, (Constant, Number, DateLiteral))
            ):
                return EqConst(colmap[a.name], b)
    return None


# ---------------------------------------------------------------------------
# Rendering


def render_value(t: Term) -> str:
    if isinstance(t, Number):
        return format_term(t)
    if isinstance(t, DateLiteral):
        return "'%s'" % render_date(t)
    if isinstance(t, Constant):
        return "'%s'" % t.name
    return "'%s'" % format_term(t)


def render_date(d: DateLiteral) -> str:
    return "%d-%s-%02d" % (d.day, MONTHS[d.month - 1], d.year % 100)


def _render_side(side) -> str:
    if isinstance(side, ColumnRef):
        return str(side)
    return render_value(side)


def render_sql(s: AbstractSelect) -> str:
    lines = ["SELECT DISTINCT " + " , ".join(str(c) for c in s.columns)]
    lines.append("FROM " + " , ".join("%s %s" % (rel, alias) for rel, alias in s.from_relations))
    for i, cond in enumerate(s.where):
        prefix = "WHERE " if i == 0 else "AND "
        if isinstance(cond, EqConst):
            lines.append(prefix + "%s = %s" % (cond.column, render_value(cond.value)))
        elif isinstance(cond, EqCol):
            lines.append(prefix + "%s = %s" % (cond.left, cond.right))
        else:
            lines.append(prefix + "%s %s %s" % (_render_side(cond.left), cond.op, _render_side(cond.right)))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Term round trip for the abstract syntax


def select_to_term(s: AbstractSelect) -> Term:
    cols = Compound("list", tuple(_col_term(c) for c in s.columns)) if s.columns else Constant("no_columns")
    froms = Compound(
        "list",
        tuple(Compound("alias", (Constant(rel), Constant(alias))) for rel, alias in s.from_relations),
    ) if s.from_relations else Constant("no_relations")
    conds = tuple(_cond_term(c) for c in s.where)
    where = Compound("list", conds) if conds else Constant("no_conditions")
    return Compound("select", (cols, Compound("from", (froms,)), Compound("where", (where,))))


def _col_term(c: ColumnRef) -> Term:
    return Compound("col", (Constant(c.alias), Constant(c.column)))


def _cond_term(c: Condition) -> Term:
    if isinstance(c, EqConst):
        return Compound("=", (_col_term(c.column), c.value))
    if isinstance(c, EqCol):
        return Compound("=", (_col_term(c.left), _col_term(c.right)))
    return Compound(
        "sql_date_leq",
        (_side_term(c.left), _side_term(c.right)),
    )


def _side_term(side) -> Term:
    return _col_term(side) if isinstance(side, ColumnRef) else side


def select_from_term(t: Term) -> AbstractSelect:
    assert isinstance(t, Compound) and t.functor == "select"
    cols_t, from_t, where_t = t.args
    columns = tuple(_col_from(c) for c in _list_items(cols_t))
    froms = tuple(
        (c.args[0].name, c.args[1].name) for c in _list_items(from_t.args[0])
    )
    where = tuple(_cond_from(c) for c in _list_items(where_t.args[0]))
    return AbstractSelect(columns, froms, where)


def _list_items(t: Term):
    if isinstance(t, Compound) and t.functor == "list":
        return list(t.args)
    return []


def _col_from(t: Term) -> ColumnRef:
    return ColumnRef(t.args[0].name, t.args[1].name)


def _cond_from(t: Term) -> Condition:
    if t.functor == "=":
        left, right = t.args
        if isinstance(right, Compound) and right.functor == "col":
            return EqCol(_col_from(left), _col_from(right))
        return EqConst(_col_from(left), right)
    left, right = t.args
    def side(x):
        if isinstance(x, Compound) and x.functor == "col":
            return _col_from(x)
        return x
    return DateCmp("<=", side(left), side(right))
