"""Answer semantics for questions, commands, meta-questions and
assertions, plus the session state they run against.

Yes/No questions follow the five-way verdict table: no effective
translation means don't-know; with an empty assumption set a provable
translation answers yes and an unprovable one no; with assumptions the
same verdicts hold conditionally and the assumptions are reported, a
violated assumption forcing don't-know-because.  Commands classify
completeness by assumption kind: specializations leave an answer
complete, limitations and approximations qualify it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .errors import (
    AetError,
    BudgetExhausted,
    NoEffectiveTranslation,
    NoFiniteStrategy,
    PresuppositionFailure,
    StepBudgetExceeded,
    UnsupportedShape,
)
from .evaluator import Outcome, execute
from .formulas import (
    And,
    Atom,
    Equality,
    Exists,
    Forall,
    Formula,
    Impl,
    conjoin,
    free_variables,
)
from .planner import rearrange
from .prover import AssumptionInstance, SearchConfig, refute_assumptions
from .simplifier import AssertionCache, assert_simplify, find_mismatch
from .store import DisplayAction, RelStore
from .syntax import (
    Parser,
    TheorySyntaxError,
    TokenStream,
    format_formula,
    format_term,
    tokenize,
)
from .terms import Compound, Constant, Session as TermSession, Variable
from .theory import CompiledTheory
from .translator import Translation, translate

VERDICTS = (
    "yes",
    "no",
    "dont_know",
    "done_complete",
    "done_qualified",
    "cannot_comply",
    "know",
    "dont_know_because",
)

QUALIFYING_KINDS = ("limitation", "approximation")


@dataclass
class Answer:
    verdict: str
    rows: List[DisplayAction] = field(default_factory=list)
    assumptions: List[AssumptionInstance] = field(default_factory=list)
    diagnostics: str = ""
    because: Optional[AssumptionInstance] = None

    @property
    def conditional(self) -> bool:
        return bool(self.assumptions) and self.verdict in ("yes", "no")

    def grouped_assumptions(self) -> Dict[str, List[AssumptionInstance]]:
        out: Dict[str, List[AssumptionInstance]] = {}
        for a in self.assumptions:
            out.setdefault(a.kind, []).append(a)
        return out


@dataclass
class LambdaForm:
    vars: Tuple[str, ...]
    body: Formula


class Session:
    """One interactive session: compiled theory, store, assertion cache,
    search configuration and the answer history."""

    def __init__(self, theory: CompiledTheory, store: Optional[RelStore] = None,
                 config: Optional[SearchConfig] = None, seed: int = 0):
        self.theory = theory
        self.store = store if store is not None else RelStore()
        self.cache = AssertionCache()
        self.config = config or SearchConfig()
        self.terms = TermSession()
        self.seed = seed
        self.history: List[Tuple[int, Answer]] = []
        self._ordinal = 0

    def record(self, answer: Answer) -> Answer:
        self._ordinal += 1
        self.history.append((self._ordinal, answer))
        return answer

    @property
    def last_answer(self) -> Optional[Answer]:
        return self.history[-1][1] if self.history else None


def parse_query(text: str) -> object:
    """Parse a query: either a formula or a lambda([X,...],F) surface form."""
    ts = TokenStream(tokenize(text))
    parser = Parser(ts)
    tok = ts.peek()
    if tok.kind == "ident" and tok.text == "lambda":
        ts.next()
        ts.expect("(")
        names = parser._var_list()
        ts.expect(",")
        body = parser.parse_formula()
        ts.expect(")")
        if ts.peek().kind != "eof":
            raise TheorySyntaxError("trailing input", ts.peek().line, ts.peek().column)
        return LambdaForm(tuple(names), body)
    f = parser.parse_formula()
    if ts.peek().kind != "eof":
        raise TheorySyntaxError("trailing input", ts.peek().line, ts.peek().column)
    return f


def wrap_lambda(q: LambdaForm) -> Formula:
    """The display-command form of a WH-question."""
    payload = Compound("list", tuple(Variable(v) for v in q.vars))
    consequent = Exists(
        ("WrapEv", "WrapT"),
        And(
            Atom("execute", (Variable("WrapEv"), Compound("display", (payload,)),
                             Constant("clare"), Variable("WrapT"))),
            Atom("t_precedes", (Constant("now"), Variable("WrapT"))),
        ),
    )
    return Forall(q.vars, Impl(q.body, consequent))


@dataclass
class _Pipeline:
    translation: Translation
    planned: Formula
    violated: List[AssumptionInstance]


def _run_pipeline(session: Session, f: Formula) -> List[_Pipeline]:
    """Translations that admit a finite evaluation order, best first."""
    translations = translate(
        f, session.theory, session.store, session.config
    )
    out = []
    for t in translations:
        try:
            planned = rearrange(t.target, session.theory)
        except NoFiniteStrategy:
            continue
        violated = refute_assumptions(
            list(t.assumptions), session.theory, session.store, session.config
        )
        out.append(_Pipeline(t, planned, violated))
    if not out:
        raise NoEffectiveTranslation("no finitely evaluable translation")
    return out


def answer_yn(f: Formula, session: Session) -> Answer:
    if free_variables(f):
        raise UnsupportedShape("yes/no questions must be closed formulas")
    try:
        pipelines = _run_pipeline(session, f)
    except (NoEffectiveTranslation, StepBudgetExceeded, BudgetExhausted) as err:
        return session.record(Answer("dont_know", diagnostics=str(err)))
    best = pipelines[0]
    if best.violated:
        return session.record(
            Answer(
                "dont_know_because",
                assumptions=list(best.translation.assumptions),
                because=best.violated[0],
                diagnostics="assumption contradicted by the question",
            )
        )
    outcome = execute(best.planned, session.store, session.theory, session.terms)
    verdict = "yes" if outcome.truth else "no"
    return session.record(
        Answer(verdict, assumptions=list(best.translation.assumptions))
    )


def answer_command(f: Formula, session: Session) -> Answer:
    try:
        pipelines = _run_pipeline(session, f)
    except (NoEffectiveTranslation, StepBudgetExceeded, BudgetExhausted) as err:
        return session.record(Answer("cannot_comply", diagnostics=str(err)))
    best = pipelines[0]
    if best.violated:
        return session.record(
            Answer(
                "dont_know_because",
                assumptions=list(best.translation.assumptions),
                because=best.violated[0],
                diagnostics="assumption contradicted by the command",
            )
        )
    outcome = execute(best.planned, session.store, session.theory, session.terms)
    kinds = {a.kind for a in best.translation.assumptions}
    if outcome.truth:
        verdict = "done_complete" if not (kinds & set(QUALIFYING_KINDS)) else "done_qualified"
    else:
        verdict = "cannot_comply"
    return session.record(
        Answer(verdict, rows=outcome.actions, assumptions=list(best.translation.assumptions))
    )


def answer_meta(embedded, session: Session) -> Answer:
    f = wrap_lambda(embedded) if isinstance(embedded, LambdaForm) else embedded
    try:
        pipelines = _run_pipeline(session, f)
    except (NoEffectiveTranslation, StepBudgetExceeded, BudgetExhausted) as err:
        return session.record(
            Answer("dont_know_because", diagnostics="no translation: %s" % err)
        )
    for p in pipelines:
        kinds = {a.kind for a in p.translation.assumptions}
        if not p.violated and not (kinds & set(QUALIFYING_KINDS)):
            return session.record(
                Answer("know", assumptions=list(p.translation.assumptions))
            )
    best = pipelines[0]
    offending = None
    if best.violated:
        offending = best.violated[0]
    else:
        for a in best.translation.assumptions:
            if a.kind in QUALIFYING_KINDS:
                offending = a
                break
    return session.record(
        Answer(
            "dont_know_because",
            assumptions=list(best.translation.assumptions),
            because=offending,
            diagnostics="translation depends on a non-specialization assumption",
        )
    )


def answer_assert(f: Formula, session: Session) -> Answer:
    try:
        pipelines = _run_pipeline(session, f)
    except (NoEffectiveTranslation, StepBudgetExceeded, BudgetExhausted) as err:
        return session.record(Answer("cannot_comply", diagnostics=str(err)))
    best = pipelines[0]
    target = best.translation.target
    mism = find_mismatch(target)
    if mism is not None:
        raise PresuppositionFailure(mism.left, mism.right)
    before = len(session.cache.clauses)
    new_cache, graduated = assert_simplify(
        session.cache, target, session.theory, session.store, session.terms
    )
    session.cache = new_cache
    parts = []
    if graduated:
        parts.append(
            "stored: "
            + "; ".join(format_formula(g) for g in graduated)
        )
    else:
        parts.append("no new tuples")
    parts.append("cache holds %d pending clause(s)" % len(new_cache.clauses))
    if before and not new_cache.clauses:
        parts.append("merged %d cached clause(s)" % before)
    kinds = {a.kind for a in best.translation.assumptions}
    verdict = "done_complete" if not (kinds & set(QUALIFYING_KINDS)) else "done_qualified"
    return session.record(
        Answer(
            verdict,
            assumptions=list(best.translation.assumptions),
            diagnostics="; ".join(parts),
        )
    )


def decide_yn_verdict(
    translation_exists: bool, assumptions_empty: bool, provable: bool
) -> Tuple[str, bool]:
    """The five-way verdict table for yes/no questions: (verdict, conditional)."""
    if not translation_exists:
        return "dont_know", False
    return ("yes" if provable else "no"), not assumptions_empty


VERDICT_TEXT = {
    "yes": "Yes",
    "no": "No",
    "dont_know": "Don't know",
    "done_complete": "Done; the response is complete",
    "done_qualified": "Done; completeness depends on the assumptions",
    "cannot_comply": "Cannot comply",
    "know": "Known",
    "dont_know_because": "Don't know",
}


def render_answer(answer: Answer) -> str:
    lines = []
    head = VERDICT_TEXT[answer.verdict]
    if answer.conditional:
        head += ", conditional on the validity of the assumptions"
    if answer.verdict == "dont_know_because":
        if answer.because is not None:
            head += ", because this violates or depends on: %s (%s)" % (
                answer.because.justification,
                answer.because.kind,
            )
        elif answer.diagnostics:
            head += ": %s" % answer.diagnostics
    lines.append(head)
    for kind in ("specialization", "limitation", "approximation"):
        for a in answer.grouped_assumptions().get(kind, []):
            lines.append("  [%s] %s: %s" % (kind, a.justification, format_formula(a.goal)))
    for row in answer.rows:
        lines.append("[%s]" % ",".join(format_term(t) for t in row.payload))
    if answer.diagnostics and answer.verdict not in ("dont_know_because",):
        lines.append("  (%s)" % answer.diagnostics)
    return "\n".join(lines)
