"""Exception types shared across the package."""


class AetError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedShape(AetError):
    """Formula falls outside the fragment an operation supports."""


class TheorySyntaxError(AetError):
    def __init__(self, message, line=None, column=None, expected=None):
        self.line = line
        self.column = column
        self.expected = expected
        loc = "" if line is None else " at line %d, column %d" % (line, column)
        super().__init__(message + loc)


class DuplicateFunctionDecl(AetError):
    pass


class ArityMismatch(AetError):
    pass


class AuxNameCollision(AetError):
    """User predicate clashes with the reserved aux_ prefix."""


class BudgetExhausted(AetError):
    """Search hit the maximum cost limit while branches were still open.

    Distinct from definite failure: with open branches a proof may exist
    just beyond the limit.
    """


class UnsupportedGoalShape(AetError):
    pass


class NoEffectiveTranslation(AetError):
    def __init__(self, message, stuck_atoms=(), near_misses=()):
        self.stuck_atoms = list(stuck_atoms)
        self.near_misses = list(near_misses)
        super().__init__(message)


class StepBudgetExceeded(AetError):
    pass


class UniverseTooLarge(AetError):
    pass


class NoFiniteStrategy(AetError):
    def __init__(self, message, frozen_residue=()):
        self.frozen_residue = list(frozen_residue)
        super().__init__(message)


class UndeclaredPredicate(AetError):
    pass


class UnconvertibleCondition(AetError):
    pass


class NonGroundArithmetic(AetError):
    """Internal error: the planner contract was violated."""


class HeaderMismatch(AetError):
    pass


class RaggedRow(AetError):
    def __init__(self, message, line):
        self.line = line
        super().__init__(message)


class PresuppositionFailure(AetError):
    """An assertion merged down to an identically false form."""

    def __init__(self, left, right):
        self.left = left
        self.right = right
        super().__init__("incompatible values: %s vs %s" % (left, right))


class NoEquivalenceForTarget(AetError):
    pass
