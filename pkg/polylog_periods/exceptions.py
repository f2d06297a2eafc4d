"""
Exceptions raised by the period computations.

Argument errors (bad tolerances, mismatched sizes, ...) use
`nengo.exceptions.ValidationError` directly.
"""

from nengo.exceptions import NengoException, SimulationError


class PeriodDomainError(NengoException, ValueError):
    """
    A point, path or matrix lies outside the domain of an operation.

    Examples are evaluation on a branch cut without a branch choice, a path
    through a puncture, or a matrix outside the image of a parametrization.

    Parameters
    ----------
    msg : str
        Description of the problem.
    obj
        The offending object (optional).
    """

    def __init__(self, msg, obj=None):
        super().__init__(msg)
        self.obj = obj


class ConvergenceError(SimulationError):
    """
    A numerical procedure failed to reach its tolerance.

    Parameters
    ----------
    msg : str
        Description of the problem.
    diagnostics : dict
        Details for the caller (offending arc, residual sequence, ...).
    """

    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = dict(diagnostics or {})
