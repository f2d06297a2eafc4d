"""
Adaptive integration of linear ODEs along piecewise paths.

The stepper is the Cash-Karp 5(4) embedded Runge-Kutta pair. Each arc of a
`.PathSpec` is parametrized by ``s`` in ``[0, 1]`` and the equation
``dy/dz = f(z, y)`` is integrated as ``dy/ds = f(z(s), y) z'(s)``.
"""

import logging

import numpy as np
from nengo.exceptions import ValidationError

from polylog_periods.config import get_setting
from polylog_periods.exceptions import ConvergenceError
from polylog_periods.paths import PUNCTURES
from polylog_periods.utils import NullProgressBar

logger = logging.getLogger(__name__)

NODES = np.array([0.0, 1 / 5, 3 / 10, 3 / 5, 1.0, 7 / 8])
TABLEAU = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (3 / 10, -9 / 10, 6 / 5),
    (-11 / 54, 5 / 2, -70 / 27, 35 / 27),
    (1631 / 55296, 175 / 512, 575 / 13824, 44275 / 110592, 253 / 4096),
)
WEIGHTS = np.array([37 / 378, 0.0, 250 / 621, 125 / 594, 0.0, 512 / 1771])
ERROR_WEIGHTS = np.array(
    [-277 / 64512, 0.0, 6925 / 370944, -6925 / 202752, -277 / 14336, 277 / 7084]
)

MIN_STEP = 1e-14
SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


class IntegrationResult:
    """
    Output of `.integrate_path`.

    Attributes
    ----------
    y : `numpy.ndarray`
        State at the end of the path.
    arc_values : list of `numpy.ndarray`
        State at the end of each arc.
    est_error : float
        Sum of the accepted local error estimates.
    steps : int
        Number of accepted steps.
    rejected : int
        Number of rejected steps.
    """

    def __init__(self, y, arc_values, est_error, steps, rejected):
        self.y = y
        self.arc_values = arc_values
        self.est_error = est_error
        self.steps = steps
        self.rejected = rejected

    def __repr__(self):
        return "IntegrationResult(steps=%d, rejected=%d, est_error=%g)" % (
            self.steps,
            self.rejected,
            self.est_error,
        )


def cash_karp_step(func, s, y, h):
    """
    Single Cash-Karp step.

    Parameters
    ----------
    func : callable
        Right hand side ``func(s, y)``.
    s : float
        Current parameter.
    y : `numpy.ndarray`
        Current state.
    h : float
        Step size.

    Returns
    -------
    y_new : `numpy.ndarray`
        Fifth order solution at ``s + h``.
    error : `numpy.ndarray`
        Embedded error estimate (difference to the fourth order solution).
    """

    stages = []
    for node, row in zip(NODES, TABLEAU):
        y_stage = y
        for a, k in zip(row, stages):
            y_stage = y_stage + (h * a) * k
        stages.append(func(s + node * h, y_stage))

    y_new = y + h * sum(b * k for b, k in zip(WEIGHTS, stages) if b != 0)
    error = h * sum(e * k for e, k in zip(ERROR_WEIGHTS, stages) if e != 0)
    return y_new, error


def _puncture_distance(z, punctures):
    return min(abs(z - p) for p in punctures)


def integrate_arc(rhs, y0, arc, tol, punctures=PUNCTURES, max_steps=100000, index=0):
    """
    Integrate ``dy/dz = rhs(z, y)`` along a single arc.

    Returns
    -------
    y : `numpy.ndarray`
        State at the end of the arc.
    est_error : float
        Accumulated local error estimate.
    steps : int
        Accepted steps.
    rejected : int
        Rejected steps.
    """

    length = arc.length
    y = np.array(y0, dtype=np.complex128)
    if length == 0:
        return y, 0.0, 0, 0

    def func(s, y):
        return rhs(arc.point(s), y) * arc.derivative(s)

    s = 0.0
    d = _puncture_distance(arc.start, punctures)
    h = min(1.0, 0.1 * max(d, MIN_STEP) / length)
    est_error = 0.0
    steps = rejected = 0

    while s < 1.0:
        if steps + rejected >= max_steps:
            raise ConvergenceError(
                "Step budget of %d exhausted on arc %d (%r) at s=%g"
                % (max_steps, index, arc, s),
                diagnostics={"arc": index, "s": s, "h": h},
            )
        if h < MIN_STEP:
            raise ConvergenceError(
                "Step size underflow on arc %d (%r) at s=%g" % (index, arc, s),
                diagnostics={"arc": index, "s": s, "h": h},
            )

        h = min(h, 1.0 - s)
        y_new, error = cash_karp_step(func, s, y, h)
        err = np.max(np.abs(error) / (1.0 + np.abs(y_new)), initial=0.0)
        d = _puncture_distance(arc.point(s), punctures)
        allowed = tol * h * length * max(1.0, 1.0 / max(d, MIN_STEP))

        if not np.isfinite(err):
            rejected += 1
            h *= MIN_FACTOR
            continue

        if err <= allowed:
            s = 1.0 if s + h >= 1.0 - 1e-15 else s + h
            y = y_new
            est_error += err
            steps += 1
        else:
            rejected += 1

        factor = (
            MAX_FACTOR
            if err == 0
            else min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * (allowed / err) ** 0.2))
        )
        h *= factor

    return y, est_error, steps, rejected


def integrate_path(
    rhs, y0, path, tol=None, punctures=PUNCTURES, max_steps=100000, progress=None
):
    """
    Integrate ``dy/dz = rhs(z, y)`` along every arc of ``path``.

    Parameters
    ----------
    rhs : callable
        Right hand side ``rhs(z, y)`` returning an array shaped like ``y``.
    y0 : array_like
        Initial state at ``path.start``.
    path : `.PathSpec`
        The path.
    tol : float
        Local error tolerance per unit path length (defaults to the
        ``tolerance`` setting).
    punctures : tuple of complex
        Singular points of ``rhs``; the error control is relaxed in proportion
        to the inverse distance from them.
    max_steps : int
        Step budget (accepted plus rejected) per arc.
    progress : `.utils.ProgressBar`
        Progress bar advanced once per arc.

    Returns
    -------
    result : `.IntegrationResult`
        Final state, per-arc end states and step statistics.
    """

    if tol is None:
        tol = get_setting("tolerance")
    if tol <= 0:
        raise ValidationError("Must be positive (got %g)" % tol, attr="tol")
    if progress is None:
        progress = NullProgressBar()

    y = np.array(y0, dtype=np.complex128)
    arc_values = []
    est_error = 0.0
    steps = rejected = 0
    for i, arc in enumerate(path.arcs):
        y, arc_error, arc_steps, arc_rejected = integrate_arc(
            rhs, y, arc, tol, punctures=punctures, max_steps=max_steps, index=i
        )
        logger.debug(
            "Arc %d: %d steps (%d rejected), error estimate %g",
            i,
            arc_steps,
            arc_rejected,
            arc_error,
        )
        arc_values.append(y)
        est_error += arc_error
        steps += arc_steps
        rejected += arc_rejected
        progress.step()

    return IntegrationResult(y, arc_values, est_error, steps, rejected)
