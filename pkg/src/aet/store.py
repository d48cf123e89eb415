"""In-memory relational store and CSV loading."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .errors import HeaderMismatch, RaggedRow
from .terms import Constant, DateLiteral, Number, Term
from .theory import RelationDecl

_DATE_RE = re.compile(r"^(\d{4})-(\d{1,2})-(\d{1,2})$")
_NUM_RE = re.compile(r"^-?\d+(\.\d+)?$")


@dataclass
class RelStore:
    """Relation name -> duplicate-free list of tuples of ground terms."""

    tuples: Dict[str, List[Tuple[Term, ...]]] = field(default_factory=dict)
    schema: Dict[str, RelationDecl] = field(default_factory=dict)

    def rows(self, name: str) -> List[Tuple[Term, ...]]:
        return self.tuples.get(name, [])

    def add(self, name: str, row: Tuple[Term, ...]) -> bool:
        """Insert a row; returns False when it was already present."""
        decl = self.schema.get(name)
        if decl is not None and decl.arity != len(row):
            raise HeaderMismatch(
                "%s expects %d columns, got %d" % (name, decl.arity, len(row))
            )
        rows = self.tuples.setdefault(name, [])
        if row in rows:
            return False
        rows.append(row)
        return True

    def copy(self) -> "RelStore":
        return RelStore({k: list(v) for k, v in self.tuples.items()}, dict(self.schema))


@dataclass(frozen=True)
class DisplayAction:
    payload: Tuple[Term, ...]
    ordinal: int


def parse_cell(text: str) -> Term:
    text = text.strip()
    m = _DATE_RE.match(text)
    if m:
        return DateLiteral(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    if _NUM_RE.match(text):
        return Number(float(text) if "." in text else int(text))
    return Constant(text)


def load_csv(path, decl: RelationDecl, store: RelStore) -> int:
    """Load a CSV fixture into the store; returns the number of new rows.

    The header row must match the declared column names; cells parse as
    Number when numeric, DateLiteral when YYYY-MM-DD, else Constant.
    Duplicate rows are dropped.
    """
    store.schema.setdefault(decl.name, decl)
    added = 0
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise HeaderMismatch("%s: empty file" % path)
        header = tuple(h.strip() for h in header)
        if header != tuple(decl.column_names):
            raise HeaderMismatch(
                "%s: header %s does not match declared columns %s"
                % (path, list(header), list(decl.column_names))
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != decl.arity:
                raise RaggedRow("%s: row has %d cells" % (path, len(row)), lineno)
            if store.add(decl.name, tuple(parse_cell(c) for c in row)):
                added += 1
    return added
