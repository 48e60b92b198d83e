"""Exception types raised across the solver."""


class TelegraphError(Exception):
    """Base class for all solver errors."""


class DegenerateShape(TelegraphError):
    """Spline constants cannot be evaluated directly for this (p, h)."""


class IndexOutOfRange(TelegraphError, IndexError):
    pass


class TooFewNodes(TelegraphError, ValueError):
    pass


class NotDominant(TelegraphError):
    """Thomas elimination hit a vanishing pivot."""


class CoincidentNodes(TelegraphError, ValueError):
    pass


class UnknownProblem(TelegraphError, KeyError):
    pass


class SingularClosure(TelegraphError):
    """Neumann boundary closure system is (numerically) singular."""


class NonFinite(TelegraphError, FloatingPointError):
    """Time stepping produced non-finite (or runaway) values.

    Attributes
    ----------
    t : float
        Time level of the step that failed.
    stage : int
        1-based stage index inside the step, 0 when detected on the
        combined update.
    """

    def __init__(self, message, t=None, stage=None):
        super().__init__(message)
        self.t = t
        self.stage = stage


class NoConvergence(TelegraphError):
    """Eigenvalue iteration exhausted its sweep budget."""


class NoExactSolution(TelegraphError, ValueError):
    pass
