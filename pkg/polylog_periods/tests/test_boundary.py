# pylint: disable=missing-docstring

from fractions import Fraction

from nengo.exceptions import ValidationError
import numpy as np
import pytest

from polylog_periods import boundary
from polylog_periods.boundary import BoundaryChart, ChartPoint, NilpotentOrbitClass
from polylog_periods.config import get_scale
from polylog_periods.exceptions import ConvergenceError, PeriodDomainError
from polylog_periods.hodge_linear import FiltrationParams
from polylog_periods.paths import PathSpec
from polylog_periods.polylog import polylog_series, zeta_ref
from polylog_periods.transport import closed_form_period, closed_form_period_xi


def test_boundary_chart():
    chart = BoundaryChart("p1", 3)
    assert chart.cone_tag == "N1"
    assert chart.form_chart == "x"
    assert chart.position == 1
    assert np.isclose(chart.local_parameter(0.9), 0.1)
    assert chart.coordinate_names() == ["q", "alpha", "lambda_2", "lambda_3"]
    assert chart.form().chart == "x"

    pinf = BoundaryChart("pinf", 2)
    assert pinf.cone_tag == "Ninf"
    assert pinf.form_chart == "xi"
    assert pinf.local_parameter(0.1) == 0.1
    assert pinf.coordinate_names() == ["q", "beta", "lambda_2"]
    assert pinf.to_json()["constraint"].startswith("beta'")

    with pytest.raises(ValidationError):
        BoundaryChart("p2", 3)
    with pytest.raises(ValidationError, match="level"):
        BoundaryChart("p0", 1)


def test_chart_point():
    chart = BoundaryChart("p0", 2)
    point = ChartPoint(chart, [0.5, 1, 2j])
    assert point.q == 0.5
    assert point.to_json()["coords"] == {"q": 0.5, "beta": 1, "lambda_2": [0.0, 2.0]}

    with pytest.raises(ValidationError, match="Expected 3 coordinates"):
        ChartPoint(chart, [0.5, 1])


@pytest.mark.parametrize("normalization", ["paper", "deligne"])
def test_chart_coordinates(normalization):
    kappa = get_scale(normalization)

    period = closed_form_period(3, 0.3, normalization=normalization)
    point = boundary.chart_coordinates("p0", 0.3, period, normalization=normalization)
    assert np.isclose(point.q, 0.3)
    assert np.isclose(point.coords[1], -kappa * polylog_series(1, 0.3))
    assert np.isclose(point.coords[2], -(kappa ** 2) * polylog_series(2, 0.3))
    assert np.isclose(point.coords[3], -(kappa ** 3) * polylog_series(3, 0.3))

    period = closed_form_period(3, 0.7, normalization=normalization)
    point = boundary.chart_coordinates("p1", 0.7, period, normalization=normalization)
    assert np.isclose(point.q, 0.3)
    assert np.isclose(point.coords[1], kappa * np.log(0.7))

    period = closed_form_period_xi(3, 0.2, normalization=normalization)
    point = boundary.chart_coordinates("pinf", 0.2, period, normalization=normalization)
    assert np.isclose(point.q, 0.2)
    assert np.isclose(point.alpha, kappa * np.log(0.2))


def test_chart_coordinates_errors():
    period = closed_form_period(2, 0.5)
    with pytest.raises(PeriodDomainError, match="punctured disk"):
        boundary.chart_coordinates("p0", 2.0, period)
    with pytest.raises(PeriodDomainError, match="punctured disk"):
        boundary.chart_coordinates("p1", 1.0, period)
    with pytest.raises(ValidationError, match="Level mismatch"):
        boundary.chart_coordinates("p0", 0.5, period, n=3)


def test_chart_membership():
    p0 = BoundaryChart("p0", 3)
    assert boundary.chart_membership(ChartPoint(p0, [0.5, 1, 1, 1]))
    assert boundary.chart_membership(ChartPoint(p0, [0, 0, 0, 7]))
    assert not boundary.chart_membership(ChartPoint(p0, [0, 1, 0, 0]))
    assert not boundary.chart_membership(ChartPoint(p0, [0, 0, 1, 0]))
    # the threshold only applies to floating coordinates
    assert boundary.chart_membership(ChartPoint(p0, [1e-12, 1e-12, 0, 0]))
    exact = ChartPoint(p0, [0, Fraction(1, 10 ** 12), 0, 0])
    assert not boundary.chart_membership(exact)

    p1 = BoundaryChart("p1", 3)
    assert boundary.chart_membership(ChartPoint(p1, [0, 0, 5, 5]))
    assert not boundary.chart_membership(ChartPoint(p1, [0, 0.1, 5, 5]))

    pinf = BoundaryChart("pinf", 3)
    alpha = Fraction(1, 2)
    inside = ChartPoint(pinf, [0, -alpha, Fraction(1, 8), 3], alpha=alpha)
    assert boundary.chart_membership(inside)
    outside = ChartPoint(pinf, [0, -alpha, Fraction(1, 4), 3], alpha=alpha)
    assert not boundary.chart_membership(outside)
    assert not boundary.chart_membership(
        ChartPoint(pinf, [0, alpha, Fraction(1, 8), 3], alpha=alpha)
    )
    floating = ChartPoint(pinf, [0, -0.5j, (0.5j) ** 2 / 2, 3], alpha=0.5j)
    assert boundary.chart_membership(floating)


def test_nilpotent_orbit_class():
    params = FiltrationParams(0, 0, [0, Fraction(1, 2)])
    for tag in boundary.CHARTS:
        orbit = NilpotentOrbitClass(BoundaryChart(tag, 3), params)
        assert orbit.flag().is_exact
        assert orbit.is_valid()

    orbit = NilpotentOrbitClass(BoundaryChart("p0", 3), FiltrationParams(0, 1, [0, 0]))
    assert orbit.cone_tag == "N0"
    assert not orbit.is_valid()

    data = orbit.to_json()
    assert data["cone"] == "N0"
    assert data["limit_params"].beta == 1


@pytest.mark.parametrize("normalization", ["paper", "deligne"])
@pytest.mark.parametrize("n", [2, 3])
def test_limit_at_zero(n, normalization, allclose):
    kappa = get_scale(normalization)
    orbit = boundary.boundary_limit("p0", n, normalization=normalization, constant=0.5)

    expected = [0] * (n - 1)
    expected[-1] = -(kappa ** n) * 0.5
    assert allclose(orbit.limit_params.values(), [0, 0] + expected, atol=1e-8)
    assert orbit.is_valid(threshold=1e-8)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_limit_at_one_recovers_zeta(n, allclose):
    orbit = boundary.boundary_limit("p1", n, normalization="deligne", constant=0)
    expected = [-zeta_ref(k) for k in range(2, n + 1)]

    assert allclose(orbit.limit_params.alpha, 0, atol=1e-8)
    assert allclose(orbit.limit_params.lambdas, expected, atol=1e-8)
    assert allclose(orbit.limit_params.lambdas, expected, rtol=1e-6, atol=0)
    assert orbit.est_error < 1e-8


def test_limit_at_infinity(allclose):
    kappa = get_scale("paper")
    orbit = boundary.boundary_limit("pinf", 3, constant=2)
    assert allclose(
        orbit.limit_params.values(), [0, 0, 0, (-kappa) ** 3 * 2], atol=1e-8
    )


@pytest.mark.parametrize("tag", sorted(boundary.CHARTS))
def test_limit_lies_in_chart(tag):
    orbit = boundary.boundary_limit(tag, 3)
    point = boundary.limit_chart_point(orbit)
    assert point.q == 0
    assert boundary.chart_membership(point, threshold=1e-7)

    naive = boundary.naive_orbit(tag, 3, 0.5)
    assert naive.level == 3


def test_plain_limit(allclose):
    local = boundary.boundary_limit("p0", 2, constant=1)
    plain = boundary.boundary_limit("p0", 2, method="plain", constant=1)
    assert allclose(plain.limit_params.values(), local.limit_params.values(), atol=1e-5)
    assert plain.est_error < 1e-6


def test_limit_with_route(allclose):
    route = PathSpec.polyline([0.5, 0.5 + 0.3j, 0.7])
    direct = boundary.boundary_limit("p1", 2)
    around = boundary.boundary_limit("p1", 2, route=route)
    assert around.flag().allclose(direct.flag(), atol=1e-8)

    with pytest.raises(ValidationError, match="approach route"):
        boundary.boundary_limit("p1", 2, route=PathSpec.segment(0.5, 0.5j))


def test_limit_errors():
    with pytest.raises(ValidationError, match="Method must be"):
        boundary.boundary_limit("p0", 2, method="guess")
    with pytest.raises(ValidationError, match="strictly decreasing"):
        boundary.boundary_limit("p0", 2, approach=[0.01, 0.1])
    with pytest.raises(ValidationError, match="strictly decreasing"):
        boundary.boundary_limit("p0", 2, approach=[0.01])
    with pytest.raises(ValidationError, match="level"):
        boundary.boundary_limit("p0", 1)

    with pytest.raises(ConvergenceError, match="did not converge") as e:
        boundary.boundary_limit("p0", 3, approach=[0.6, 0.5], tol=1e-12)
    assert len(e.value.diagnostics["differences"]) == 1


def test_boundary_periods():
    periods, est_error = boundary.boundary_periods("p0", 2, [0.1, 0.01])
    assert len(periods) == 2
    assert est_error == 0
    assert periods[1].allclose(closed_form_period(2, 0.01))

    periods, est_error = boundary.boundary_periods("p1", 2, [0.1, 0.01])
    assert periods[0].allclose(closed_form_period(2, 0.9), atol=1e-9)
    assert periods[1].allclose(closed_form_period(2, 0.99), atol=1e-9)
    assert est_error > 0


@pytest.mark.parametrize("tag", sorted(boundary.CHARTS))
def test_asymptotic_gap(tag):
    radii = [10.0 ** -k for k in range(2, 6)]
    points = [1 - r for r in radii] if tag == "p1" else radii
    gaps = boundary.asymptotic_gap(tag, 3, points)

    assert all(b < a for a, b in zip(gaps[:-1], gaps[1:]))
    assert gaps[-1] < 1e-3

    at_puncture = 1 if tag == "p1" else 0
    assert boundary.asymptotic_gap(tag, 3, [at_puncture]) == [0.0]


def test_naive_orbit_matches_limit():
    orbit = boundary.boundary_limit("p1", 3, normalization="deligne")
    naive = boundary.naive_orbit("p1", 3, 0.5, normalization="deligne")
    # the residue factor only touches the entry (n, n+1)
    assert np.isclose(naive.entry(1, 4), orbit.flag().entry(1, 4), atol=1e-8)
    assert np.isclose(naive.entry(2, 4), orbit.flag().entry(2, 4), atol=1e-8)
