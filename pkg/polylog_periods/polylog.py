"""
Classical polylogarithms ``l_n(z) = sum_k z^k / k^n`` and their continuation.

Inside the series radius (the ``series_radius`` setting) values come from the
truncated power series. Elsewhere they are continued along a path by
integrating the triangular system ``dl_1 = dz / (1 - z)``,
``dl_k = l_{k-1} dz / z``, which keeps track of the branch through the cut
``[1, inf)``.
"""

from fractions import Fraction
import logging
import math

import numpy as np
import sympy
from nengo.exceptions import ValidationError

from polylog_periods.config import get_setting
from polylog_periods.exceptions import PeriodDomainError
from polylog_periods.integrator import integrate_path
from polylog_periods.paths import Line, PathSpec
from polylog_periods.utils import finite_output

logger = logging.getLogger(__name__)

# paths starting at 0 are seeded from the series at this distance
_SEED_RADIUS = 0.5


class PolylogValue:
    """
    Value of a polylogarithm together with its provenance.

    Parameters
    ----------
    order : int
        The order ``n``.
    point : complex
        Evaluation point.
    value : complex
        The value (including any additive constant).
    branch_offset : int
        Signed number of crossings of the cut ``[1, inf)`` (anticlockwise
        around 1 counts +1) along the continuation path.
    est_error : float
        Error estimate of the continuation (0 for direct series values).
    tail_bound : float
        Truncation bound of the series part of the evaluation.
    vector : array_like, optional
        Values of all orders ``1, ..., order`` at the same point.
    """

    def __init__(
        self,
        order,
        point,
        value,
        branch_offset=0,
        est_error=0.0,
        tail_bound=0.0,
        vector=None,
    ):
        self.order = order
        self.point = complex(point)
        self.value = complex(value)
        self.branch_offset = int(branch_offset)
        self.est_error = est_error
        self.tail_bound = tail_bound
        self.vector = None if vector is None else np.array(vector, dtype=complex)

        if not np.isfinite(self.value):
            raise PeriodDomainError(
                "Polylogarithm value at %r is not finite" % (self.point,), obj=self
            )

    def to_json(self):
        """JSON-compatible description."""
        return {
            "order": self.order,
            "point": self.point,
            "value": self.value,
            "branch_offset": self.branch_offset,
            "est_error": self.est_error,
            "tail_bound": self.tail_bound,
        }

    def __repr__(self):
        return "PolylogValue(order=%d, point=%r, value=%r, branch_offset=%d)" % (
            self.order,
            self.point,
            self.value,
            self.branch_offset,
        )


def _check_order(n):
    if int(n) != n or n < 1:
        raise ValidationError(
            "Order must be a positive integer (got %r)" % (n,), attr="n"
        )
    return int(n)


def _check_tol(tol):
    if tol is None:
        tol = get_setting("tolerance")
    if not tol > 0:
        raise ValidationError("Must be positive (got %r)" % (tol,), attr="tol")
    return tol


def series_terms(n, r, tol):
    """
    Number of series terms needed at ``|z| = r``.

    Returns the smallest ``K`` with ``r^(K+1) / ((K+1)^n (1 - r)) < tol`` and
    that bound.
    """

    terms = 0
    bound = r / (1 - r)
    while bound >= tol:
        terms += 1
        bound = r ** (terms + 1) / ((terms + 1) ** n * (1 - r))
    return terms, bound


def polylog_series(n, z, tol=None, radius=None, return_terms=False):
    """
    Evaluate ``l_n(z)`` by its power series.

    Parameters
    ----------
    n : int
        Order, at least 1.
    z : complex
        Evaluation point with ``|z| <= radius``.
    tol : float
        Bound on the truncation tail (defaults to the ``tolerance`` setting).
    radius : float
        Largest admissible ``|z|`` (defaults to the ``series_radius`` setting).
    return_terms : bool
        If True, also return the number of terms and the tail bound.

    Returns
    -------
    value : complex
        The truncated series.
    terms : int
        Number of terms (only if ``return_terms=True``).
    tail_bound : float
        Bound on the neglected tail (only if ``return_terms=True``).
    """

    n = _check_order(n)
    tol = _check_tol(tol)
    if radius is None:
        radius = get_setting("series_radius")
    z = complex(z)
    if abs(z) > radius:
        raise PeriodDomainError(
            "|z| = %g exceeds the series radius %g; use polylog_continue"
            % (abs(z), radius)
        )

    terms, bound = series_terms(n, abs(z), tol)
    k = np.arange(1, terms + 1, dtype=np.float64)
    value = complex(np.sum(z ** k / k ** n)) if terms > 0 else 0j

    if return_terms:
        return value, terms, bound
    return value


def _series_vector(n, z, tol, radius):
    """``(l_1(z), ..., l_n(z))`` by the series, with the largest tail bound."""

    values = np.zeros(n, dtype=np.complex128)
    bound = 0.0
    for k in range(1, n + 1):
        values[k - 1], _, tail = polylog_series(
            k, z, tol=tol, radius=radius, return_terms=True
        )
        bound = max(bound, tail)
    return values, bound


def _continuation_rhs(z, y):
    dy = np.empty_like(y)
    dy[0] = 1 / (1 - z)
    dy[1:] = y[:-1] / z
    return dy


@finite_output
def polylog_vector(n, z=None, path=None, tol=None, constant=0):
    """
    Evaluate ``(l_1(z), ..., l_n(z))`` in one pass.

    Parameters
    ----------
    n : int
        Highest order.
    z : complex
        Evaluation point (ignored when ``path`` is given, in which case the
        end of the path is used).
    path : `.PathSpec`
        Continuation path. Defaults to the direct series inside the series
        radius and to the straight segment from 0 otherwise.
    tol : float
        Tolerance (defaults to the ``tolerance`` setting).
    constant : complex
        Constant added to the top order value ``l_n``.

    Returns
    -------
    values : `numpy.ndarray`
        The ``n`` polylogarithm values.
    branch_offset : int
        Crossings of the cut ``[1, inf)`` along the path.
    est_error : float
        Error estimate of the evaluation.
    """

    n = _check_order(n)
    tol = _check_tol(tol)
    radius = get_setting("series_radius")

    if path is None:
        z = complex(z)
        if abs(z) <= radius:
            values, bound = _series_vector(n, z, tol, radius)
            values[-1] += constant
            return values, 0, bound
        path = PathSpec.segment(0, z)

    value = polylog_continue(n, path, tol=tol)
    values = value.vector
    values[-1] += constant
    return values, value.branch_offset, value.est_error


def polylog_continue(n, path, tol=None, constant=0):
    """
    Analytically continue ``l_n`` along a path.

    Parameters
    ----------
    n : int
        Order, at least 1.
    path : `.PathSpec`
        Continuation path; must start at 0 (with a straight first arc) or at a
        point inside the series radius, and must keep away from 0 and 1
        elsewhere.
    tol : float
        Integration tolerance (defaults to the ``tolerance`` setting).
    constant : complex
        Constant added to the value.

    Returns
    -------
    value : `.PolylogValue`
        The continued value at the end of the path. The full vector
        ``(l_1, ..., l_n)`` is available as ``value.vector``.
    """

    n = _check_order(n)
    tol = _check_tol(tol)
    radius = get_setting("series_radius")

    start = path.start
    arcs = list(path.arcs)
    if start == 0:
        if not arcs:
            seed_point = 0j
        else:
            if not isinstance(arcs[0], Line):
                raise PeriodDomainError(
                    "A continuation path starting at 0 must begin with a straight "
                    "segment (got %r)" % (arcs[0],),
                    obj=path,
                )
            first = arcs.pop(0)
            split = min(1.0, min(_SEED_RADIUS, radius) / first.length)
            seed_point = first.point(split)
            if split < 1:
                arcs.insert(0, Line(seed_point, first.end))
    else:
        if abs(start) > radius:
            raise PeriodDomainError(
                "Continuation must start at 0 or inside the series radius "
                "(start %r has modulus %g > %g)" % (start, abs(start), radius),
                obj=path,
            )
        seed_point = start

    path.check_punctures(exempt_start=start == 0)
    seed, bound = _series_vector(n, seed_point, tol, radius)

    rest = PathSpec(arcs, chart=path.chart, start=seed_point)
    result = integrate_path(_continuation_rhs, seed, rest, tol=tol)
    branch_offset = rest.winding()[1]
    logger.debug(
        "Continued l_%d along %d arcs to %r (%d steps, branch offset %d)",
        n,
        len(arcs),
        path.end,
        result.steps,
        branch_offset,
    )

    value = PolylogValue(
        n,
        path.end,
        result.y[-1] + constant,
        branch_offset=branch_offset,
        est_error=result.est_error,
        tail_bound=bound,
        vector=result.y,
    )
    return value


def polylog_integral(n, z, tol=None):
    """
    Evaluate ``l_n(z)`` as the integral of ``l_(n-1)(t) / t`` from 0 to ``z``.

    The integrand is evaluated by `.polylog_series` and integrated along the
    straight segment by the adaptive integrator; this is an independent check
    of the series.

    Parameters
    ----------
    n : int
        Order, at least 2.
    z : complex
        Endpoint inside the series radius.
    tol : float
        Tolerance (defaults to the ``tolerance`` setting).
    """

    n = _check_order(n)
    tol = _check_tol(tol)
    if n < 2:
        raise ValidationError("Order must be at least 2 (got %d)" % n, attr="n")
    z = complex(z)
    radius = get_setting("series_radius")
    if abs(z) > radius:
        raise PeriodDomainError(
            "|z| = %g exceeds the series radius %g" % (abs(z), radius)
        )

    def integrand(t, y):
        if t == 0:
            return np.ones_like(y)
        return np.full_like(y, polylog_series(n - 1, t, tol=tol * 1e-2) / t)

    if z == 0:
        return 0j
    result = integrate_path(
        integrand, np.zeros(1), PathSpec.segment(0, z), tol=tol, punctures=(1.0,)
    )
    return complex(result.y[0])


def zeta_ref(n):
    """
    Riemann zeta value ``zeta(n) = sum_k 1 / k^n`` for integer ``n >= 2``.

    Computed by Euler-Maclaurin summation with ten explicit terms and ten
    Bernoulli corrections (exact Bernoulli numbers from sympy), which is
    accurate to double precision for every ``n >= 2``.
    """

    if int(n) != n or n < 2:
        raise ValidationError(
            "zeta_ref needs an integer n >= 2 (got %r)" % (n,), attr="n"
        )
    n = int(n)

    cutoff = 10
    terms = [1.0 / k ** n for k in range(1, cutoff)]
    terms.append(cutoff ** (1 - n) / (n - 1))
    terms.append(0.5 * cutoff ** -n)
    for j in range(1, 11):
        exact = sympy.bernoulli(2 * j)
        bernoulli = Fraction(int(exact.p), int(exact.q))
        rising = math.prod(range(n, n + 2 * j - 1))
        coefficient = bernoulli * rising / math.factorial(2 * j)
        terms.append(float(coefficient) * cutoff ** (-n - 2 * j + 1))
    return math.fsum(terms)
