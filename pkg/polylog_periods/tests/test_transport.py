# pylint: disable=missing-docstring

from nengo.exceptions import ValidationError
import numpy as np
import pytest

from polylog_periods import transport
from polylog_periods.config import configure_settings
from polylog_periods.exceptions import ConvergenceError, PeriodDomainError
from polylog_periods.hodge_linear import generator_matrix, to_complex, unipotent_exp
from polylog_periods.paths import PathSpec, TangentialAnchor
from polylog_periods.polylog import polylog_series, zeta_ref
from polylog_periods.transport import ConnectionForm

POINTS = [0.5, 0.3 + 0.4j, -0.5 + 0.2j, 2 + 1j, -1 - 1j]


def test_connection_form():
    form = ConnectionForm.x_chart(2)
    assert form.chart == "x"
    assert form.normalization == "paper"
    assert np.isclose(form.scale, 1 / (2j * np.pi))

    z = 0.3 + 0.1j
    expected = form.scale * (
        to_complex(generator_matrix(2, "N0")) / z
        + to_complex(generator_matrix(2, "N1")) / (1 - z)
    )
    assert np.allclose(form.matrix(z), expected)

    xi_form = ConnectionForm.xi_chart(2, normalization="deligne")
    assert xi_form.scale == 1
    assert np.all(xi_form.residue_at_0 == generator_matrix(2, "Ninf"))

    with pytest.raises(ValidationError, match="Chart must be"):
        ConnectionForm("y", 2)
    with pytest.raises(ValidationError, match="Puncture position"):
        form.local_data(2)


@pytest.mark.parametrize("chart", ["x", "xi"])
@pytest.mark.parametrize("position", [0, 1])
def test_frobenius_recursion(chart, position, allclose):
    form = ConnectionForm(chart, 3)
    residue, holomorphic = form.local_data(position)
    coefficients = form.frobenius_coefficients(position, 5)

    assert allclose(coefficients[0], np.eye(4))
    for m in range(1, 6):
        p = coefficients[m]
        lhs = m * p - (residue @ p - p @ residue)
        assert allclose(lhs, holomorphic @ sum(coefficients[:m]), atol=1e-14)

    # cached per puncture and order
    assert form.frobenius_coefficients(position, 5) is coefficients
    assert allclose(transport.frobenius_series(form, position, 0, order=5), np.eye(4))


def test_local_data_at_one():
    form = ConnectionForm.x_chart(2, normalization="deligne")
    residue, holomorphic = form.local_data(1)
    assert np.allclose(residue, -to_complex(generator_matrix(2, "N1")))
    assert np.allclose(holomorphic, -to_complex(generator_matrix(2, "N0")))


def test_closed_form_deligne():
    period = transport.closed_form_period(2, 0.5, normalization="deligne")
    assert np.isclose(period.entry(1, 2), np.log(0.5))
    assert np.isclose(period.entry(2, 3), -np.log(2))
    assert np.isclose(period.entry(1, 3), -polylog_series(2, 0.5))

    shifted = transport.closed_form_period(2, 0.5, normalization="deligne", constant=1)
    assert np.isclose(shifted.entry(1, 3), period.entry(1, 3) - 1)

    configure_settings(polylog_constant=1)
    assert transport.closed_form_period(2, 0.5, normalization="deligne").allclose(
        shifted
    )


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("x", POINTS)
def test_regularized_matches_closed_form(n, x):
    form = ConnectionForm.x_chart(n)
    result = transport.regularized_transport(form, transport.BASE_POINT, x)

    assert result.winding == (0, 0)
    assert result.diagnostics["scheme"] in ("raw", "richardson")
    assert result.matrix.allclose(transport.closed_form_period(n, x), atol=1e-8)


@pytest.mark.parametrize("normalization", ["paper", "deligne"])
def test_regularized_xi_chart(normalization):
    form = ConnectionForm.xi_chart(3, normalization=normalization)
    xi = 0.3 + 0.2j
    result = transport.regularized_transport(form, TangentialAnchor("inf"), xi)
    expected = transport.closed_form_period_xi(3, xi, normalization=normalization)
    assert result.matrix.allclose(expected, atol=1e-8)


def test_regularized_with_route():
    form = ConnectionForm.x_chart(2)
    route = PathSpec.polyline([0.25, 0.25 + 0.5j, 0.5 + 0.5j])
    result = transport.regularized_transport(
        form, transport.BASE_POINT, 0.5 + 0.5j, route=route
    )
    expected = transport.closed_form_period(2, 0.5 + 0.5j)
    assert result.matrix.allclose(expected, atol=1e-8)

    with pytest.raises(ValidationError, match="not at the target"):
        transport.regularized_transport(form, transport.BASE_POINT, 0.5, route=route)

    with pytest.raises(ValidationError, match="tangent ray"):
        transport.regularized_transport(
            form,
            transport.BASE_POINT,
            0.5 + 0.5j,
            route=PathSpec.segment(0.25j, 0.5 + 0.5j),
        )


def test_regularized_errors():
    form = ConnectionForm.x_chart(2)
    with pytest.raises(ValidationError, match="does not lie"):
        transport.regularized_transport(form, TangentialAnchor("inf"), 0.5)
    with pytest.raises(ValidationError, match="Must be positive"):
        transport.regularized_transport(form, transport.BASE_POINT, 0.5, tol=-1)

    with pytest.raises(ConvergenceError, match="did not converge") as e:
        transport.regularized_transport(
            form, transport.BASE_POINT, 0.5, epsilons=(1e-3,)
        )
    assert e.value.diagnostics["epsilons"] == [1e-3]


def test_transport_between_points():
    form = ConnectionForm.x_chart(3)
    path = PathSpec.polyline([0.5, 0.5 + 1j, -1 + 0.5j])
    result = transport.transport(form, path)

    start = transport.closed_form_period(3, 0.5)
    end = transport.closed_form_period(3, -1 + 0.5j)
    assert (result.matrix @ start).allclose(end, atol=1e-9)
    assert result.diagnostics["steps"] > 0

    data = result.to_json()
    assert data["winding"] == [0, 0]
    assert sorted(data) == ["diagnostics", "est_error", "matrix", "winding"]

    with pytest.raises(ValidationError, match="interior endpoints"):
        transport.transport(
            form, PathSpec(path.arcs, start_anchor=transport.BASE_POINT)
        )
    with pytest.raises(ValidationError, match="does not match form chart"):
        transport.transport(form, PathSpec.segment(0.5, 0.5j, chart="xi"))
    with pytest.raises(PeriodDomainError):
        transport.transport(form, PathSpec.segment(0.5, 1.5))


@pytest.mark.parametrize(
    "loop, crossings",
    [
        (PathSpec.loop(0, 0.5), [("0", 1)]),
        (PathSpec.loop(1, 0.5, orientation="cw"), [("1", -1)]),
        (PathSpec.loop(1, 0.5, turns=2), [("1", 1), ("1", 1)]),
    ],
)
def test_branch_matrix_continuation(loop, crossings):
    form = ConnectionForm.x_chart(3)
    around = transport.transport(form, loop)
    assert loop.crossings() == crossings

    start = transport.closed_form_period(3, 0.5)
    continued = transport.closed_form_period(3, 0.5, branch=crossings)
    assert (around.matrix @ start).allclose(continued, atol=1e-9)


def test_branch_pairs():
    form = ConnectionForm.x_chart(2, normalization="deligne")
    assert transport.branch_matrix(form, (0, 0)).allclose(np.eye(3))

    # one anticlockwise turn around 0 adds 2 pi i to log x
    g = transport.branch_matrix(form, (1, 0))
    assert np.isclose(g.entry(1, 2), 2j * np.pi)

    with pytest.raises(ValidationError, match="Invalid crossing"):
        transport.branch_matrix(form, [("2", 1)])


def test_closed_form_on_cut():
    with pytest.raises(PeriodDomainError, match="supply a branch"):
        transport.closed_form_period(2, 2.0)
    with pytest.raises(PeriodDomainError, match="puncture"):
        transport.closed_form_period(2, 1.0)

    # the cut takes the value from the upper side
    form = ConnectionForm.x_chart(2)
    above = transport.closed_form_period(2, 2.0 + 0.5j)
    down = transport.transport(form, PathSpec.segment(2.0 + 0.5j, 2.0))
    on_cut = transport.closed_form_period(2, 2.0, branch=(0, 0))
    assert on_cut.allclose(down.matrix @ above, atol=1e-9)

    negative = transport.closed_form_period(2, -2.0)
    assert np.isclose(negative.entry(1, 2), np.log(2) / (2j * np.pi) + 0.5)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("puncture", [0, 1])
def test_monodromy(n, puncture):
    result = transport.monodromy(n, puncture)
    expected = transport.exact_images(n)[puncture]
    assert result.matrix.allclose(expected, atol=1e-8)
    assert result.diagnostics["puncture"] == str(puncture)


def test_monodromy_deligne():
    result = transport.monodromy(2, 0, normalization="deligne")
    expected = unipotent_exp(2j * np.pi * to_complex(generator_matrix(2, "N0")))
    assert result.matrix.allclose(expected, atol=1e-8)

    with pytest.raises(ValidationError, match="Puncture must be"):
        transport.monodromy(2, 2)


@pytest.mark.parametrize("n", range(1, 5))
def test_presentation_exact(n):
    assert transport.presentation_check(n)


def test_presentation_numerical():
    images = (transport.monodromy(3, 0).matrix, transport.monodromy(3, 1).matrix)
    assert transport.presentation_check(3, images=images)


def test_presentation_fails_on_deeper_images():
    # images from a deeper level do not satisfy the shallower relations
    assert not transport.presentation_check(1, images=transport.exact_images(2))
    assert not transport.presentation_check(2, images=transport.exact_images(3))


def test_double_tangential():
    form = ConnectionForm.x_chart(2, normalization="deligne")
    result = transport.double_tangential_transport(
        form, transport.BASE_POINT, TangentialAnchor("1", -1.0)
    )
    # the path from 0 to 1 picks up zeta(2) in the corner
    assert np.isclose(result.matrix.entry(1, 3), -zeta_ref(2), atol=1e-8)
    assert np.isclose(result.matrix.entry(1, 2), 0, atol=1e-8)
    assert np.isclose(result.matrix.entry(2, 3), 0, atol=1e-8)
    assert result.diagnostics["midpoint"] == 0.5


def test_chart_transition():
    a = transport.chart_transition(3, 2.5 + 1j)
    b = transport.chart_transition(3, -3 + 2j)
    assert a.allclose(b, atol=1e-9)

    # the lower half plane has its own constant
    c = transport.chart_transition(3, 2.5 - 1j)
    d = transport.chart_transition(3, -3 - 2j)
    assert c.allclose(d, atol=1e-9)

    with pytest.raises(PeriodDomainError, match="off the real axis"):
        transport.chart_transition(3, 2.0)
    with pytest.raises(ValidationError, match="Method must be"):
        transport.chart_transition(3, 1j, method="guess")


def test_chart_transition_by_transport():
    closed = transport.chart_transition(2, 2.5 + 1j)
    numerical = transport.chart_transition(2, 2.5 + 1j, method="transport")
    assert numerical.allclose(closed, atol=1e-8)
