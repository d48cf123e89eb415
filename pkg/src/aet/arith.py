"""Built-in evaluation for arithmetic and date-comparison predicates.

Evaluation is only attempted on semantically ground arguments: discharge
constants and Skolem terms stand for unknown objects and never evaluate.
"""

from __future__ import annotations

from typing import Optional

from .formulas import Atom
from .terms import Constant, DateLiteral, Number, Term

# Synthetic constants used by the execution module for caused events.
NOW = Constant("now")
FUTURE = Constant("t_future")


def _date_key(t: Term):
    if isinstance(t, DateLiteral):
        return (t.year, t.month, t.day)
    return None


def _comparable(t: Term) -> bool:
    return isinstance(t, (DateLiteral, Number)) or t in (NOW, FUTURE)


def eval_ground(pred: str, args) -> Optional[bool]:
    """Truth value of a built-in predicate on ground arguments.

    Returns None when the predicate has no built-in meaning or the
    arguments are not of evaluable kinds.
    """
    if pred in ("t_precedes", "sql_date_leq"):
        if len(args) != 2 or not all(_comparable(a) for a in args):
            return None
        a, b = args
        if b == FUTURE:
            return True
        if a == FUTURE:
            return False
        if a == NOW or b == NOW:
            return None
        ka, kb = _date_key(a), _date_key(b)
        if ka is not None and kb is not None:
            return ka <= kb
        if isinstance(a, Number) and isinstance(b, Number):
            return a.value <= b.value
        return None
    if pred in ("less", "greater"):
        if len(args) != 2:
            return None
        a, b = args
        ka, kb = _date_key(a), _date_key(b)
        if ka is not None and kb is not None:
            return ka < kb if pred == "less" else ka > kb
        if isinstance(a, Number) and isinstance(b, Number):
            return a.value < b.value if pred == "less" else a.value > b.value
        return None
    return None


def eval_atom(atom: Atom) -> Optional[bool]:
    return eval_ground(atom.pred, atom.args)
