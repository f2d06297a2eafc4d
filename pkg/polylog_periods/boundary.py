"""
Boundary charts near the three punctures and the nilpotent orbit limits.

Each boundary point ``p0``, ``p1``, ``pinf`` has a local parameter ``s``
(``x``, ``1 - x`` and ``xi = 1/x``), a cone generator (``N0``, ``N1``,
``Ninf``) and a residue ``R`` of the connection in ``s``. The limit of a
period matrix ``F`` is the constant ``exp(-log(s) R) P(s)^-1 F`` (``P`` the
local series), the flag of the limiting nilpotent orbit.
"""

from fractions import Fraction
import logging
import math

import numpy as np
from nengo.exceptions import ValidationError
from nengo.params import EnumParam, FrozenObject, IntParam

from polylog_periods.config import get_scale, get_setting
from polylog_periods.exceptions import ConvergenceError, PeriodDomainError
from polylog_periods.hodge_linear import (
    FiltrationParams,
    UnipotentMatrix,
    filtration_matrix,
    griffiths_check,
    unipotent_exp,
)
from polylog_periods.paths import PathSpec, on_real_axis
from polylog_periods.polylog import zeta_ref
from polylog_periods.transport import (
    ConnectionForm,
    closed_form_period,
    closed_form_period_xi,
    frobenius_series,
    transport,
)
from polylog_periods.utils import is_exact, to_jsonable

logger = logging.getLogger(__name__)

#: Chart data: (form chart, puncture position, cone generator).
CHARTS = {
    "p0": ("x", 0, "N0"),
    "p1": ("x", 1, "N1"),
    "pinf": ("xi", 0, "Ninf"),
}

#: Default radii of the local limit method.
LOCAL_RADII = (1e-1, 1e-2, 1e-3)

#: Default radii of the plain (extrapolating) limit method.
PLAIN_RADII = tuple(np.geomspace(1e-2, 1e-6, 9))

# the p1 approach starts from the closed form at this point
_P1_START = 0.5


class BoundaryChart(FrozenObject):
    """
    Local chart at one of the boundary points.

    Parameters
    ----------
    tag : "p0", "p1" or "pinf"
        The boundary point.
    level : int
        The level ``n`` (at least 2).
    """

    tag = EnumParam("tag", values=tuple(CHARTS))
    level = IntParam("level", low=2)

    def __init__(self, tag, level):
        super().__init__()
        self.tag = tag
        self.level = level

    @property
    def cone_tag(self):
        """Tag of the generator of the cone."""
        return CHARTS[self.tag][2]

    @property
    def form_chart(self):
        """Chart of the connection form ("x" or "xi")."""
        return CHARTS[self.tag][0]

    @property
    def position(self):
        """Chart position of the puncture."""
        return CHARTS[self.tag][1]

    def form(self, normalization=None):
        """The connection form in the chart of this boundary point."""
        return ConnectionForm(self.form_chart, self.level, normalization=normalization)

    def local_parameter(self, point):
        """Local parameter ``s`` of a chart point (``x``, ``1 - x`` or ``xi``)."""
        point = complex(point)
        return 1 - point if self.position == 1 else point

    def coordinate_names(self):
        """Names of the coordinates, ``q`` first."""
        lambdas = ["lambda_%d" % k for k in range(2, self.level + 1)]
        free = {"p0": "beta", "p1": "alpha", "pinf": "beta"}[self.tag]
        return ["q", free] + lambdas

    def constraint(self):
        """Description of the condition on the ``q = 0`` locus."""
        return {
            "p0": "beta = lambda_2 = ... = lambda_(n-1) = 0",
            "p1": "alpha = 0",
            "pinf": "beta' = -alpha', lambda'_k = (-alpha')^k / k! (2 <= k <= n-1)",
        }[self.tag]

    def to_json(self):
        """JSON-compatible description."""
        return {"tag": self.tag, "level": self.level, "constraint": self.constraint()}

    def __repr__(self):
        return "BoundaryChart(%r, level=%d)" % (self.tag, self.level)


def _chart(tag, n):
    if isinstance(tag, BoundaryChart):
        return tag
    return BoundaryChart(str(tag).lower(), n)


class ChartPoint:
    """
    Point of a boundary chart.

    Parameters
    ----------
    chart : `.BoundaryChart`
        The chart.
    coords : sequence of complex
        ``(q, free, lambda_2, ..., lambda_n)``; ``free`` is ``beta`` at p0 and
        pinf and ``alpha`` at p1.
    alpha : complex
        The coordinate ``alpha'`` entering the pinf constraint (unused at p0
        and p1).
    """

    def __init__(self, chart, coords, alpha=0):
        self.chart = chart
        self.coords = tuple(coords)
        self.alpha = alpha
        if len(self.coords) != chart.level + 1:
            raise ValidationError(
                "Expected %d coordinates (got %d)"
                % (chart.level + 1, len(self.coords)),
                attr="coords",
                obj=self,
            )

    @property
    def q(self):
        """The coordinate ``q``."""
        return self.coords[0]

    def to_json(self):
        """JSON-compatible description."""
        data = {
            "chart": self.chart.tag,
            "coords": dict(zip(self.chart.coordinate_names(), self.coords)),
        }
        if self.chart.tag == "pinf":
            data["alpha"] = self.alpha
        return to_jsonable(data)

    def __repr__(self):
        return "ChartPoint(%r, %r)" % (self.chart.tag, self.coords)


class NilpotentOrbitClass:
    """
    Limit of the period map at a boundary point.

    Parameters
    ----------
    chart : `.BoundaryChart`
        The boundary point.
    limit_params : `.FiltrationParams`
        Parameters of the limiting flag.
    est_error : float
        Error estimate of the limit.
    """

    def __init__(self, chart, limit_params, est_error=0.0):
        self.chart = chart
        self.limit_params = limit_params
        self.est_error = est_error

    @property
    def cone_tag(self):
        """Generator of the cone (``N0``, ``N1`` or ``Ninf``)."""
        return self.chart.cone_tag

    def flag(self):
        """The limiting flag matrix."""
        return filtration_matrix(self.limit_params)

    def is_valid(self, threshold=None):
        """True if the cone generator and the flag satisfy transversality."""
        return griffiths_check(self.cone_tag, self.flag(), threshold=threshold)

    def to_json(self):
        """JSON-compatible description."""
        return {
            "chart": self.chart.tag,
            "cone": self.cone_tag,
            "limit_params": self.limit_params,
            "flag": self.flag(),
            "est_error": self.est_error,
        }

    def __repr__(self):
        return "NilpotentOrbitClass(%r, %r)" % (self.chart.tag, self.limit_params)


def chart_coordinates(tag, x, period, n=None, normalization=None):
    """
    Coordinates of the period matrix ``period`` at the chart point ``x``.

    At p0 ``q = exp(a_(1,2) / kappa)`` (which is ``x``), ``beta = a_(n,n+1)``,
    ``lambda_k = a_(n+1-k,n+1)``. At p1 the roles of ``alpha = a_(1,2)`` and
    ``beta`` exchange: ``q = exp(a_(n,n+1) / kappa) = 1 - x``. At pinf
    ``alpha' = -a_(1,2)`` and ``q' = exp(alpha' / kappa) = xi``.

    Parameters
    ----------
    tag : str or `.BoundaryChart`
        Boundary point.
    x : complex
        Chart point (``xi`` at pinf), inside the punctured unit disk of the
        local parameter.
    period : `.UnipotentMatrix`
        Period matrix at ``x``.
    n : int
        Level (defaults to the level of ``period``).
    normalization : "paper" or "deligne"
        Normalization.

    Returns
    -------
    point : `.ChartPoint`
        The chart point.
    """

    if not isinstance(period, UnipotentMatrix):
        period = UnipotentMatrix(period)
    chart = _chart(tag, period.level if n is None else n)
    if chart.level != period.level:
        raise ValidationError(
            "Level mismatch (chart %d, period %d)" % (chart.level, period.level),
            attr="period",
        )
    s = chart.local_parameter(x)
    if not 0 < abs(s) <= 1:
        raise PeriodDomainError(
            "Point %r is outside the punctured disk of chart %s" % (x, chart.tag)
        )

    kappa = get_scale(normalization)
    n = chart.level
    lambdas = [period.entry(n + 1 - k, n + 1) for k in range(2, n + 1)]
    a12 = complex(period.entry(1, 2))
    last = complex(period.entry(n, n + 1))
    if chart.tag == "p0":
        return ChartPoint(chart, [np.exp(a12 / kappa), last] + lambdas)
    if chart.tag == "p1":
        return ChartPoint(chart, [np.exp(last / kappa), a12] + lambdas)
    alpha = -a12
    return ChartPoint(chart, [np.exp(alpha / kappa), last] + lambdas, alpha=alpha)


def _equal(a, b, threshold):
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(complex(a) - complex(b)) <= threshold


def chart_membership(point, threshold=None):
    """
    Whether ``point`` lies in its chart.

    Off the ``q = 0`` locus every point belongs; on it the chart constraint
    must hold (exactly for exact coordinates, within ``threshold`` otherwise;
    defaults to the ``rank_threshold`` setting).
    """

    if threshold is None:
        threshold = get_setting("rank_threshold")
    if not _equal(point.q, 0, threshold):
        return True

    tag = point.chart.tag
    n = point.chart.level
    free = point.coords[1]
    lambdas = point.coords[2:]
    if tag == "p0":
        return _equal(free, 0, threshold) and all(
            _equal(lam, 0, threshold) for lam in lambdas[: n - 2]
        )
    if tag == "p1":
        return _equal(free, 0, threshold)

    alpha = point.alpha
    if not _equal(free, -alpha, threshold):
        return False
    for k, lam in enumerate(lambdas[: n - 2], start=2):
        power = (-alpha) ** k
        if is_exact(power):
            target = Fraction(power, math.factorial(k))
        else:
            target = power / math.factorial(k)
        if not _equal(lam, target, threshold):
            return False
    return True


def limit_chart_point(orbit):
    """Chart point at ``q = 0`` of a nilpotent orbit class."""

    params = orbit.limit_params
    chart = orbit.chart
    if chart.tag == "p1":
        return ChartPoint(chart, [0, params.alpha] + params.lambdas)
    if chart.tag == "pinf":
        return ChartPoint(chart, [0, params.beta] + params.lambdas, alpha=-params.alpha)
    return ChartPoint(chart, [0, params.beta] + params.lambdas)


def _strip(chart, form, s, period, order):
    """``exp(-log(s) R) P(s)^-1 F``; ``order=0`` drops the local series."""

    residue, _ = form.local_data(chart.position)
    stripped = unipotent_exp(-np.log(s) * residue).to_complex()
    if order:
        local = UnipotentMatrix(frobenius_series(form, chart.position, s, order=order))
        stripped = stripped @ local.inverse().to_complex()
    return stripped @ period.to_complex()


def boundary_periods(
    tag, n, radii, tol=None, normalization=None, constant=None, route=None
):
    """
    Period matrices at the chart points with local parameter ``radii``.

    At p0 and pinf these are the closed forms at ``r``. At p1 the period at
    ``1 - r`` is transported from the closed form at 1/2 along the real axis
    (after the optional ``route``, a path from 1/2 to a point of (0, 1)).

    Returns
    -------
    periods : list of `.UnipotentMatrix`
        One matrix per radius.
    est_error : float
        Accumulated error estimate.
    """

    chart = _chart(tag, n)
    radii = [float(r) for r in radii]
    if chart.tag == "p0":
        return [
            closed_form_period(
                n, r, normalization=normalization, constant=constant, tol=tol
            )
            for r in radii
        ], 0.0
    if chart.tag == "pinf":
        return [
            closed_form_period_xi(
                n, r, normalization=normalization, constant=constant, tol=tol
            )
            for r in radii
        ], 0.0

    form = chart.form(normalization)
    current = closed_form_period(
        n, _P1_START, normalization=normalization, constant=constant, tol=tol
    )
    position = _P1_START
    est_error = 0.0
    if route is not None:
        if abs(route.start - _P1_START) > 1e-12 or not (
            on_real_axis(route.end) and 0 < route.end.real < 1
        ):
            raise ValidationError(
                "The approach route must run from 1/2 to a point of (0, 1)",
                attr="route",
            )
        step = transport(form, route, tol=tol)
        current = step.matrix @ current
        est_error += step.est_error
        position = route.end.real

    periods = []
    for r in radii:
        step = transport(form, PathSpec.segment(position, 1 - r), tol=tol)
        current = step.matrix @ current
        est_error += step.est_error
        position = 1 - r
        periods.append(current)
    return periods, est_error


def _orbit_class(chart, limit, est_error, threshold):
    params = FiltrationParams.from_matrix(UnipotentMatrix(limit), threshold=threshold)
    orbit = NilpotentOrbitClass(chart, params, est_error=est_error)
    if not orbit.is_valid(threshold=threshold):
        raise ConvergenceError(
            "Limit at %s does not satisfy transversality with %s"
            % (chart.tag, chart.cone_tag),
            diagnostics={"limit": limit},
        )
    return orbit


def boundary_limit(
    tag,
    n,
    approach=None,
    tol=None,
    method="local",
    normalization=None,
    constant=None,
    route=None,
):
    """
    Nilpotent orbit limit of the period map at a boundary point.

    Parameters
    ----------
    tag : "p0", "p1" or "pinf"
        Boundary point.
    n : int
        Level, at least 2.
    approach : sequence of float
        Strictly decreasing local parameters ``r`` (defaults to `.LOCAL_RADII`
        for the local method and `.PLAIN_RADII` for the plain method).
    tol : float
        Acceptance tolerance (default 1e-9 for the local method, 1e-6 for the
        plain method).
    method : "local" or "plain"
        ``local`` strips the local solution ``P(s) exp(log(s) R)`` and accepts
        when successive values differ by less than ``max(tol, 10 est)``.
        ``plain`` strips only ``exp(log(s) R)`` and extrapolates by least
        squares in the functions ``r^j log(r)^i``.
    normalization : "paper" or "deligne"
        Normalization.
    constant : complex
        The constant ``c`` (defaults to the ``polylog_constant`` setting).
    route : `.PathSpec`, optional
        Approach route prefix at p1 (see `.boundary_periods`).

    Returns
    -------
    orbit : `.NilpotentOrbitClass`
        The limit.
    """

    chart = _chart(tag, n)
    if method not in ("local", "plain"):
        raise ValidationError(
            "Method must be 'local' or 'plain' (got %r)" % (method,), attr="method"
        )
    if approach is None:
        approach = LOCAL_RADII if method == "local" else PLAIN_RADII
    approach = [float(r) for r in approach]
    if len(approach) < 2 or any(
        not 0 < b < a < 1 for a, b in zip(approach[:-1], approach[1:])
    ):
        raise ValidationError(
            "Approach must be a strictly decreasing sequence in (0, 1) "
            "with at least two values",
            attr="approach",
        )
    if tol is None:
        tol = 1e-9 if method == "local" else 1e-6
    threshold = max(get_setting("rank_threshold"), 10 * tol)
    integration_tol = min(get_setting("tolerance"), tol * 1e-2)

    form = chart.form(normalization)
    periods, est_error = boundary_periods(
        chart,
        n,
        approach,
        tol=integration_tol,
        normalization=normalization,
        constant=constant,
        route=route,
    )

    if method == "local":
        order = max(get_setting("frobenius_order"), 1)
        values = [
            _strip(chart, form, r, period, order)
            for r, period in zip(approach, periods)
        ]
        diffs = [float(np.max(np.abs(b - a))) for a, b in zip(values[:-1], values[1:])]
        accept = max(tol, 10 * est_error)
        logger.debug("Local limit at %s: differences %s", chart.tag, diffs)
        if diffs[-1] >= accept:
            raise ConvergenceError(
                "Boundary limit at %s did not converge (differences %s)"
                % (chart.tag, diffs),
                diagnostics={"differences": diffs, "radii": approach},
            )
        return _orbit_class(chart, values[-1], max(diffs[-1], est_error), threshold)

    values = np.array(
        [_strip(chart, form, r, period, 0) for r, period in zip(approach, periods)]
    )
    columns = len(approach) - 2
    degree = 2 * (n - 1)
    limit = _extrapolate(np.array(approach), values, degree, columns)
    check = _extrapolate(np.array(approach[1:]), values[1:], degree, columns)
    gap = float(np.max(np.abs(limit - check)))
    logger.debug("Plain limit at %s: extrapolation difference %g", chart.tag, gap)
    if gap >= max(tol, 10 * est_error):
        raise ConvergenceError(
            "Extrapolated boundary limit at %s did not converge (difference %g)"
            % (chart.tag, gap),
            diagnostics={"differences": [gap], "radii": approach},
        )
    size = n + 1
    clean = np.eye(size, dtype=np.complex128)
    upper = np.triu_indices(size, 1)
    clean[upper] = limit[upper]
    return _orbit_class(chart, clean, max(gap, est_error), threshold)


def _extrapolate(radii, values, degree, size):
    """
    Value at ``r = 0`` of a least squares fit.

    The basis is ``1`` and ``r^j log(r)^i`` (``j = 1, 2``, ``i <= degree``),
    truncated to ``size`` functions.
    """

    logs = np.log(radii)
    columns = [np.ones_like(radii)]
    for j in (1, 2):
        for i in range(degree + 1):
            if len(columns) < size:
                columns.append(radii ** j * logs ** i)
    basis = np.stack(columns, axis=1)
    scale = np.max(np.abs(basis), axis=0)
    flat = values.reshape(len(radii), -1)
    coefficients, _, _, _ = np.linalg.lstsq(basis / scale, flat, rcond=None)
    return (coefficients[0] / scale[0]).reshape(values.shape[1:])


def naive_orbit(tag, n, x, normalization=None, constant=None):
    """
    Nilpotent orbit approximation ``exp(log(s) R) L`` at the chart point ``x``.

    ``L`` is the known limiting flag: ``F(0, ..., 0, -kappa^n c)`` at p0,
    ``F(0, 0, -kappa^2 zeta(2), ..., -kappa^n (c + zeta(n)))`` at p1 and
    ``F(0, ..., 0, (-kappa)^n c)`` at pinf.
    """

    chart = _chart(tag, n)
    kappa = get_scale(normalization)
    if constant is None:
        constant = get_setting("polylog_constant")

    lambdas = [0j] * (n - 1)
    if chart.tag == "p0":
        lambdas[-1] = -(kappa ** n) * constant
    elif chart.tag == "p1":
        lambdas = [-(kappa ** k) * zeta_ref(k) for k in range(2, n + 1)]
        lambdas[-1] -= kappa ** n * constant
    else:
        lambdas[-1] = (-kappa) ** n * constant
    known = filtration_matrix(FiltrationParams(0j, 0j, lambdas)).to_complex()

    form = chart.form(normalization)
    residue, _ = form.local_data(chart.position)
    s = chart.local_parameter(x)
    return UnipotentMatrix(unipotent_exp(np.log(s) * residue).to_complex() @ known)


def asymptotic_gap(tag, n, points, normalization=None, constant=None, tol=None):
    """
    Distances between the period matrices and the naive nilpotent orbit.

    Parameters
    ----------
    tag : "p0", "p1" or "pinf"
        Boundary point.
    n : int
        Level.
    points : sequence of complex
        Chart points (``x`` at p0 and p1, ``xi`` at pinf) approaching the
        puncture; points with vanishing local parameter report 0.

    Returns
    -------
    gaps : list of float
        Largest absolute entry difference per point.
    """

    chart = _chart(tag, n)
    period_at = closed_form_period_xi if chart.tag == "pinf" else closed_form_period
    gaps = []
    for point in points:
        if chart.local_parameter(point) == 0:
            gaps.append(0.0)
            continue
        period = period_at(
            n, point, normalization=normalization, constant=constant, tol=tol
        )
        orbit = naive_orbit(chart, n, point, normalization, constant)
        gaps.append(period.max_abs_diff(orbit))
    logger.debug("Asymptotic gaps at %s: %s", chart.tag, gaps)
    return gaps
