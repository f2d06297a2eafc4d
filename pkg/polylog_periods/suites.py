"""
Verification suites, one per verified property of the package.

Every suite is a function registered in `.SUITES` under its dashed name; it
returns a record ``{"suite": name, "passed": bool, "checks": [...]}`` where
each check carries its own ``passed`` flag and the measured error.
"""

from fractions import Fraction
import logging
import math

import numpy as np
from nengo.exceptions import ValidationError

from polylog_periods import transport
from polylog_periods.boundary import (
    CHARTS,
    asymptotic_gap,
    boundary_limit,
    chart_membership,
    limit_chart_point,
)
from polylog_periods.config import get_scale
from polylog_periods.hodge_linear import (
    TAGS,
    commutator,
    generator_matrix,
    griffiths_check,
    power_identity_check,
    random_unipotent,
    to_complex,
    transversality_conditions,
    unipotent_exp,
)
from polylog_periods.paths import PathSpec, TangentialAnchor
from polylog_periods.polylog import (
    polylog_continue,
    polylog_integral,
    polylog_series,
    polylog_vector,
    zeta_ref,
)
from polylog_periods.tate_lie import (
    bracket,
    coordinates_from_unipotent,
    generators,
    nu,
    phi_is_isomorphism,
    rep_hom,
    tate_lattice_check,
    unipotent_from_coordinates,
)
from polylog_periods.transport import (
    BASE_POINT,
    ConnectionForm,
    chart_transition,
    closed_form_period,
    closed_form_period_xi,
    presentation_check,
    regularized_transport,
)
from polylog_periods.utils import NullProgressBar, function_name

logger = logging.getLogger(__name__)

SUITES = {}

SOLUTION_POINTS = (0.3, 0.5 * np.exp(1j * np.pi / 4), -0.7, 0.9)
XI_POINTS = tuple(0.4 * np.exp(1j * np.pi * (k + 0.5) / 5) for k in range(10))
TRANSITION_POINTS = (2.5 + 1j, -3 + 2j)
LEMMA_POINTS = (0.3, 0.5, -0.4)
GAP_EXPONENTS = (2, 3, 4, 5, 6)


def register(func):
    """Add ``func`` to `.SUITES` under its dashed name."""
    SUITES[function_name(func, dashes=True)] = func
    return func


def run_suite(name, **kwargs):
    """
    Run the suite ``name``.

    Raises
    ------
    `~nengo.exceptions.ValidationError`
        If there is no suite of that name.
    """

    if name not in SUITES:
        raise ValidationError(
            "Unknown suite %r; must be one of %s" % (name, sorted(SUITES)),
            attr="suite",
        )
    record = SUITES[name](**kwargs)
    logger.info(
        "Suite %s: %s (%d checks)",
        name,
        "passed" if record["passed"] else "FAILED",
        len(record["checks"]),
    )
    return record


def _levels(n, default):
    return list(default) if n is None else [n]


def _check(name, passed, **details):
    check = {"name": name, "passed": bool(passed)}
    check.update(details)
    if not passed:
        logger.debug("Check %s failed: %s", name, details)
    return check


def _record(name, checks):
    return {
        "suite": name,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }


@register
def power_identity(n=None, progress=None, **_):
    """Exact power identity of ``Ninf = -N0 + N1`` for levels 1 to 8."""

    progress = NullProgressBar() if progress is None else progress
    checks = []
    for level in _levels(n, range(1, 9)):
        checks.append(_check("level %d" % level, power_identity_check(level), n=level))
        progress.step()
    return _record("power-identity", checks)


@register
def transversality(n=None, seed=0, samples=1000, progress=None, **_):
    """
    Closed-form conditions against the direct transversality test.

    For each level and generator, ``samples`` seeded random rational flags
    (half satisfying the conditions, half with one condition broken) must be
    classified identically by both tests.
    """

    progress = NullProgressBar() if progress is None else progress
    rng = np.random.RandomState(seed)
    checks = []
    for level in _levels(n, range(2, 6)):
        for tag in TAGS:
            mismatches = 0
            wrong = 0
            for i in range(samples):
                constrained = i < samples // 2
                flag = random_unipotent(level, tag, rng, constrained=constrained)
                closed = transversality_conditions(tag, flag)
                direct = griffiths_check(tag, flag)
                mismatches += closed != direct
                wrong += closed != constrained
            checks.append(
                _check(
                    "%s level %d" % (tag, level),
                    mismatches == 0 and wrong == 0,
                    n=level,
                    mismatches=mismatches,
                    misclassified=wrong,
                    samples=samples,
                )
            )
            progress.step()
    return _record("transversality", checks)


@register
def solution_table(n=None, tol=None, progress=None, **_):
    """Regularized transport from ``b`` against the closed-form table."""

    progress = NullProgressBar() if progress is None else progress
    checks = []
    for level in _levels(n, range(2, 5)):
        form = ConnectionForm.x_chart(level)
        for point in SOLUTION_POINTS:
            result = regularized_transport(form, BASE_POINT, point, tol=tol)
            error = result.matrix.max_abs_diff(closed_form_period(level, point))
            checks.append(
                _check(
                    "level %d at %s" % (level, complex(point)),
                    error < 1e-9,
                    n=level,
                    point=complex(point),
                    error=error,
                    est_error=result.est_error,
                    oracle="closed_form_period",
                )
            )
            progress.step()
    return _record("solution-table", checks)


@register
def zeta_recovery(n=None, progress=None, **_):
    """Zeta values from the boundary limit at ``p1`` (constant 0)."""

    progress = NullProgressBar() if progress is None else progress
    kappa = get_scale(None)
    checks = []
    for level in _levels(n, range(2, 6)):
        orbit = boundary_limit("p1", level, constant=0)
        for k, slot in enumerate(orbit.limit_params.lambdas, start=2):
            recovered = complex(-slot / kappa ** k)
            reference = zeta_ref(k)
            error = abs(recovered - reference) / reference
            checks.append(
                _check(
                    "zeta(%d) at level %d" % (k, level),
                    error < 1e-6,
                    n=level,
                    value=recovered,
                    reference=reference,
                    error=error,
                    oracle="zeta_ref",
                )
            )
        progress.step()
    return _record("zeta-recovery", checks)


@register
def monodromy(n=None, tol=None, progress=None, **_):
    """Loop images and the relations of the nilpotent quotient."""

    progress = NullProgressBar() if progress is None else progress
    kappa = get_scale(None)
    checks = []
    for level in _levels(n, range(2, 5)):
        images = []
        for puncture, tag in (("0", "N0"), ("1", "N1")):
            result = transport.monodromy(level, puncture, tol=tol)
            expected = unipotent_exp(
                2j * np.pi * kappa * to_complex(generator_matrix(level, tag))
            )
            error = result.matrix.max_abs_diff(expected)
            checks.append(
                _check(
                    "gamma_%s level %d" % (puncture, level),
                    error < 1e-8,
                    n=level,
                    error=error,
                    est_error=result.est_error,
                )
            )
            images.append(result.matrix)
        checks.append(
            _check(
                "numerical relations level %d" % level,
                presentation_check(level, images=tuple(images), threshold=1e-8),
                n=level,
            )
        )
        checks.append(
            _check(
                "exact relations level %d" % level, presentation_check(level), n=level
            )
        )
        progress.step()
    return _record("monodromy", checks)


@register
def xi_chart(n=None, tol=None, progress=None, **_):
    """Transport in the ``xi`` chart and the change of chart."""

    progress = NullProgressBar() if progress is None else progress
    anchor = TangentialAnchor("inf", 1.0)
    checks = []
    for level in _levels(n, (2, 3)):
        form = ConnectionForm.xi_chart(level)
        for xi in XI_POINTS:
            result = regularized_transport(form, anchor, xi, tol=tol)
            error = result.matrix.max_abs_diff(closed_form_period_xi(level, xi))
            checks.append(
                _check(
                    "xi-chart level %d at %s" % (level, complex(xi)),
                    error < 1e-9,
                    n=level,
                    error=error,
                    oracle="closed_form_period_xi",
                )
            )
            progress.step()

        closed = [chart_transition(level, x) for x in TRANSITION_POINTS]
        error = closed[0].max_abs_diff(closed[1])
        checks.append(
            _check(
                "transition independence level %d" % level, error < 1e-8, error=error
            )
        )
        transported = chart_transition(
            level, TRANSITION_POINTS[0], method="transport", tol=tol
        )
        error = transported.max_abs_diff(closed[0])
        checks.append(
            _check(
                "transition by transport level %d" % level, error < 1e-8, error=error
            )
        )
        progress.step()
    return _record("xi-chart", checks)


def _random_fraction(rng):
    return Fraction(int(rng.randint(-9, 10)), int(rng.randint(1, 7)))


@register
def appendix(n=None, seed=0, tol=None, progress=None, **_):
    """Group ring lattice, the Lie representation and the ``(u, v)`` coordinates."""

    progress = NullProgressBar() if progress is None else progress
    checks = []
    for N in _levels(n, range(1, 9)):
        checks.append(_check("lattice N=%d" % N, tate_lattice_check(N), N=N))
        checks.append(_check("phi isomorphism N=%d" % N, phi_is_isomorphism(N), N=N))
        progress.step()

    for level in _levels(n, range(1, 7)):
        elements = [generators(level)[0]] + [nu(k, level) for k in range(1, level + 1)]
        preserved = True
        for x in elements:
            for y in elements:
                lhs = rep_hom(level, bracket(x, y))
                rhs = commutator(rep_hom(level, x), rep_hom(level, y))
                preserved &= bool(np.all(lhs == rhs))
        checks.append(_check("bracket preservation n=%d" % level, preserved, n=level))
        progress.step()

    rng = np.random.RandomState(seed)
    for level in _levels(n, range(2, 7)):
        u = _random_fraction(rng)
        v = tuple(_random_fraction(rng) for _ in range(level))
        matrix = unipotent_from_coordinates(u, v, scale=1)
        checks.append(
            _check(
                "round trip n=%d" % level,
                coordinates_from_unipotent(matrix, scale=1) == (u, v),
                n=level,
            )
        )

    for level in _levels(n, (2, 3, 4)):
        form = ConnectionForm.x_chart(level, normalization="deligne")
        for z in LEMMA_POINTS:
            result = regularized_transport(form, TangentialAnchor("0", z), z, tol=tol)
            u, v = coordinates_from_unipotent(result.matrix, scale=1)
            values, _, _ = polylog_vector(level, z, tol=tol)
            error = max([abs(u)] + [abs(a + b) for a, b in zip(v, values)])
            checks.append(
                _check(
                    "polylog coordinates n=%d at %s" % (level, z),
                    error < 1e-9,
                    n=level,
                    error=error,
                    oracle="polylog_vector",
                )
            )
            progress.step()
    return _record("appendix", checks)


def _gap_points(tag):
    radii = [10.0 ** -k for k in GAP_EXPONENTS]
    return [1 - r for r in radii] if tag == "p1" else radii


@register
def boundary_charts(n=None, progress=None, **_):
    """Orbit classes lie in their charts and the naive orbits are asymptotic."""

    progress = NullProgressBar() if progress is None else progress
    checks = []
    for level in _levels(n, (2, 3)):
        for tag in CHARTS:
            orbit = boundary_limit(tag, level)
            checks.append(
                _check(
                    "%s level %d membership" % (tag, level),
                    chart_membership(limit_chart_point(orbit)),
                    n=level,
                )
            )
            checks.append(
                _check(
                    "%s level %d transversality" % (tag, level),
                    orbit.is_valid(),
                    n=level,
                )
            )
            gaps = asymptotic_gap(tag, level, _gap_points(tag))
            decreasing = all(b < a for a, b in zip(gaps[:-1], gaps[1:]))
            checks.append(
                _check(
                    "%s level %d asymptotic gap" % (tag, level),
                    decreasing and gaps[-1] < 1e-6,
                    n=level,
                    gaps=gaps,
                )
            )
            progress.step()
    return _record("boundary-charts", checks)


@register
def polylog(n=None, tol=None, progress=None, **_):
    """Series, integral and continuation values of the polylogarithms agree."""

    progress = NullProgressBar() if progress is None else progress
    checks = []
    for order in _levels(n, (2, 3, 4)):
        for z in (0.3, 0.5j, -0.6 + 0.2j):
            error = abs(polylog_series(order, z, tol=tol) - polylog_integral(order, z))
            checks.append(
                _check(
                    "integral l_%d(%s)" % (order, z), error < 1e-9, n=order, error=error
                )
            )
        progress.step()

    # closed values: l_2(1/2) = pi^2/12 - log(2)^2/2, l_3(-1) = -3/4 zeta(3)
    value = polylog_continue(2, PathSpec.segment(0, 0.5), tol=tol).value
    error = abs(value - (math.pi ** 2 / 12 - math.log(2) ** 2 / 2))
    checks.append(_check("l_2(1/2)", error < 1e-10, error=error))
    value = polylog_continue(3, PathSpec.segment(0, -1), tol=tol).value
    error = abs(value + 0.75 * zeta_ref(3))
    checks.append(_check("l_3(-1)", error < 1e-10, error=error))

    # a loop around 1 changes l_1 by -2 pi i
    loop = PathSpec.segment(0, 0.5) + PathSpec.loop(1.0, 0.5, orientation="ccw")
    value = polylog_continue(1, loop, tol=tol)
    error = abs(value.value - (np.log(2) - 2j * np.pi))
    checks.append(
        _check(
            "l_1 around 1",
            error < 1e-9 and value.branch_offset == 1,
            error=error,
            branch_offset=value.branch_offset,
        )
    )
    progress.step()
    return _record("polylog", checks)
