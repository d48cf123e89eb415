"""Textual syntax for terms and formulas, shared by every module.

Forms: and(F,G), exists([X,Y],F), forall([X],F), impl(F,G), X=Y,
pred(arg,...), date([Y,M,D]), obj(sort,Id), [t1,...,tn] list terms.
Variables start with an uppercase letter or underscore, constants with a
lowercase letter.  parse(print(F)) is structurally the identity.

The printed forms sk(N) and c*(N) are reserved for Skolem terms and
discharge constants; user input is rejected unless parsing permissively.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

from .errors import TheorySyntaxError
from .formulas import (
    And,
    Atom,
    Equality,
    Exists,
    FALSE,
    Forall,
    Formula,
    Impl,
    Mismatch,
    TRUE,
    TrueF,
    FalseF,
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
)

FORMULA_KEYWORDS = {"and", "exists", "forall", "impl", "true", "false", "mismatch"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<discharge>c\*(?=\())
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>-?\d+(?:\.\d+)?)
  | (?P<arrow><->|<-|->)
  | (?P<punct>[()\[\],=./*])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise TheorySyntaxError("unexpected character %r" % text[pos], line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            tokens.append(Token(kind, tok, line, col))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class TokenStream:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text:
            raise TheorySyntaxError(
                "found %r" % (t.text or "end of input"), t.line, t.column, expected=text
            )
        return self.next()

    def at(self, text: str) -> bool:
        return self.peek().text == text


def _is_var_name(name: str) -> bool:
    return name[0].isupper() or name[0] == "_"


class Parser:
    """Recursive-descent parser over a token stream.

    permissive=True additionally accepts the reserved sk(N)/c*(N) forms,
    which is only appropriate when re-reading the package's own output.
    """

    def __init__(self, stream: TokenStream, permissive=False):
        self.ts = stream
        self.permissive = permissive
        self._anon = 0

    def parse_formula(self) -> Formula:
        tok = self.ts.peek()
        if tok.kind == "ident" and tok.text in FORMULA_KEYWORDS:
            return self._keyword_formula()
        term = self.parse_term()
        if self.ts.at("="):
            self.ts.next()
            right = self.parse_term()
            return Equality(term, right)
        if isinstance(term, Compound):
            return Atom(term.functor, term.args)
        if isinstance(term, Constant):
            return Atom(term.name, ())
        raise TheorySyntaxError(
            "cannot use %r as a formula" % type(term).__name__, tok.line, tok.column
        )

    def _keyword_formula(self) -> Formula:
        tok = self.ts.next()
        kw = tok.text
        if kw == "true":
            return TRUE
        if kw == "false":
            return FALSE
        self.ts.expect("(")
        if kw in ("and", "impl"):
            left = self.parse_formula()
            self.ts.expect(",")
            right = self.parse_formula()
            self.ts.expect(")")
            return And(left, right) if kw == "and" else Impl(left, right)
        if kw in ("exists", "forall"):
            names = self._var_list()
            self.ts.expect(",")
            body = self.parse_formula()
            self.ts.expect(")")
            ctor = Exists if kw == "exists" else Forall
            return ctor(tuple(names), body)
        if kw == "mismatch":
            left = self.parse_term()
            self.ts.expect(",")
            right = self.parse_term()
            self.ts.expect(")")
            return Mismatch(left, right)
        raise AssertionError(kw)

    def _var_list(self) -> List[str]:
        self.ts.expect("[")
        names = []
        if not self.ts.at("]"):
            while True:
                tok = self.ts.next()
                if tok.kind != "ident" or not _is_var_name(tok.text):
                    raise TheorySyntaxError(
                        "found %r" % tok.text, tok.line, tok.column, expected="variable"
                    )
                names.append(tok.text)
                if not self.ts.at(","):
                    break
                self.ts.next()
        self.ts.expect("]")
        return names

    def parse_term(self) -> Term:
        tok = self.ts.peek()
        if tok.kind == "number":
            self.ts.next()
            value = float(tok.text) if "." in tok.text else int(tok.text)
            return Number(value)
        if tok.text == "[":
            return self._list_term()
        if tok.kind == "discharge":
            if not self.permissive:
                raise TheorySyntaxError(
                    "c*(N) is reserved output syntax", tok.line, tok.column
                )
            self.ts.next()
            self.ts.expect("(")
            n = self.ts.next()
            self.ts.expect(")")
            return DischargeConstant(int(n.text), "")
        if tok.kind != "ident":
            raise TheorySyntaxError(
                "found %r" % (tok.text or "end of input"),
                tok.line,
                tok.column,
                expected="term",
            )
        self.ts.next()
        name = tok.text
        if name == "_":
            self._anon += 1
            return Variable("_Anon%d" % self._anon)
        if self.ts.at("("):
            self.ts.next()
            args = [self.parse_term()]
            while self.ts.at(","):
                self.ts.next()
                args.append(self.parse_term())
            self.ts.expect(")")
            return self._compound(name, args, tok)
        if _is_var_name(name):
            return Variable(name)
        return Constant(name)

    def _compound(self, name: str, args: List[Term], tok: Token) -> Term:
        if name == "date":
            if (
                len(args) == 1
                and isinstance(args[0], Compound)
                and args[0].functor == "list"
                and len(args[0].args) == 3
                and all(isinstance(a, Number) for a in args[0].args)
            ):
                y, m, d = (int(a.value) for a in args[0].args)
                return DateLiteral(y, m, d)
            raise TheorySyntaxError(
                "date takes the form date([Y,M,D])", tok.line, tok.column
            )
        if name == "obj":
            if len(args) == 2 and isinstance(args[0], Constant):
                return NamedObject(args[0].name, args[1])
            raise TheorySyntaxError(
                "obj takes the form obj(sort,Id)", tok.line, tok.column
            )
        if name == "sk":
            if not self.permissive:
                raise TheorySyntaxError(
                    "sk(N) is reserved output syntax", tok.line, tok.column
                )
            if args and isinstance(args[0], Number):
                return SkolemTerm(int(args[0].value), tuple(args[1:]))
        return Compound(name, tuple(args))

    def _list_term(self) -> Term:
        tok = self.ts.expect("[")
        args = []
        if not self.ts.at("]"):
            args.append(self.parse_term())
            while self.ts.at(","):
                self.ts.next()
                args.append(self.parse_term())
        self.ts.expect("]")
        if not args:
            raise TheorySyntaxError("empty list terms are not supported", tok.line, tok.column)
        return Compound("list", tuple(args))


def parse_formula(text: str, permissive=False) -> Formula:
    ts = TokenStream(tokenize(text))
    parser = Parser(ts, permissive=permissive)
    f = parser.parse_formula()
    tok = ts.peek()
    if tok.kind != "eof":
        raise TheorySyntaxError("trailing input %r" % tok.text, tok.line, tok.column)
    return f


def parse_term(text: str, permissive=False) -> Term:
    ts = TokenStream(tokenize(text))
    parser = Parser(ts, permissive=permissive)
    t = parser.parse_term()
    tok = ts.peek()
    if tok.kind != "eof":
        raise TheorySyntaxError("trailing input %r" % tok.text, tok.line, tok.column)
    return t


def format_term(t: Term) -> str:
    if isinstance(t, Variable):
        return t.name
    if isinstance(t, Constant):
        return t.name
    if isinstance(t, Number):
        v = t.value
        return str(int(v)) if float(v).is_integer() else str(v)
    if isinstance(t, DateLiteral):
        return "date([%d,%d,%d])" % (t.year, t.month, t.day)
    if isinstance(t, Compound):
        if t.functor == "list":
            return "[%s]" % ",".join(format_term(a) for a in t.args)
        return "%s(%s)" % (t.functor, ",".join(format_term(a) for a in t.args))
    if isinstance(t, SkolemTerm):
        if t.args:
            return "sk(%d,%s)" % (t.index, ",".join(format_term(a) for a in t.args))
        return "sk(%d)" % t.index
    if isinstance(t, NamedObject):
        return "obj(%s,%s)" % (t.sort, format_term(t.ident))
    if isinstance(t, DischargeConstant):
        return "c*(%d)" % t.index
    raise AssertionError(type(t))


def format_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        if not f.args:
            return f.pred
        return "%s(%s)" % (f.pred, ",".join(format_term(a) for a in f.args))
    if isinstance(f, Equality):
        return "%s=%s" % (format_term(f.left), format_term(f.right))
    if isinstance(f, Mismatch):
        return "mismatch(%s,%s)" % (format_term(f.left), format_term(f.right))
    if isinstance(f, And):
        return "and(%s,%s)" % (format_formula(f.left), format_formula(f.right))
    if isinstance(f, Exists):
        return "exists([%s],%s)" % (",".join(f.vars), format_formula(f.body))
    if isinstance(f, Forall):
        return "forall([%s],%s)" % (",".join(f.vars), format_formula(f.body))
    if isinstance(f, Impl):
        return "impl(%s,%s)" % (format_formula(f.antecedent), format_formula(f.consequent))
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    raise AssertionError(type(f))
