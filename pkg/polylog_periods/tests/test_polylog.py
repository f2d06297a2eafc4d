# pylint: disable=missing-docstring

from hypothesis import given, settings, strategies as st
import mpmath
from nengo.exceptions import ValidationError
import numpy as np
import pytest

from polylog_periods import polylog
from polylog_periods.config import configure_settings
from polylog_periods.exceptions import PeriodDomainError
from polylog_periods.paths import CircularArc, PathSpec


def reference(n, z):
    return complex(mpmath.polylog(n, z))


def test_series_terms():
    terms, bound = polylog.series_terms(2, 0.5, 1e-12)
    assert bound < 1e-12
    assert terms > 0

    # one fewer term would not meet the tolerance
    r = 0.5
    assert r ** terms / (terms ** 2 * (1 - r)) >= 1e-12

    assert polylog.series_terms(3, 0.0, 1e-12) == (0, 0.0)


def test_known_values():
    assert np.isclose(
        polylog.polylog_series(2, 0.5),
        np.pi ** 2 / 12 - np.log(2) ** 2 / 2,
        atol=1e-13,
        rtol=0,
    )
    assert np.isclose(polylog.polylog_series(2, 0.5), 0.5822405264650125, atol=1e-12)

    values, offset, _ = polylog.polylog_vector(3, -1)
    assert np.isclose(values[-1], -0.75 * polylog.zeta_ref(3), atol=1e-10, rtol=0)
    assert np.isclose(values[-1], -0.9015426773696957, atol=1e-10)
    assert offset == 0


@settings(deadline=None, max_examples=50)
@given(
    n=st.integers(min_value=1, max_value=6),
    radius=st.floats(min_value=0, max_value=0.89),
    angle=st.floats(min_value=-np.pi, max_value=np.pi),
)
def test_series_against_mpmath(n, radius, angle):
    z = radius * np.exp(1j * angle)
    value, _, bound = polylog.polylog_series(n, z, return_terms=True)
    assert bound < 1e-12
    assert abs(value - reference(n, z)) < 1e-11


@pytest.mark.parametrize("z", [-1, -2 + 1j, 0.95j, 3j, 0.5 - 1.5j, 2 + 0.5j])
@pytest.mark.parametrize("n", [1, 2, 4])
def test_continuation_against_mpmath(n, z, allclose):
    values, offset, est_error = polylog.polylog_vector(n, z)

    # the straight path from 0 never crosses [1, inf)
    assert offset == 0
    assert est_error < 1e-8
    assert allclose(values, [reference(k, z) for k in range(1, n + 1)], atol=1e-9)


def test_vector_matches_series(allclose):
    values, offset, bound = polylog.polylog_vector(4, 0.3 + 0.4j)
    assert offset == 0
    assert bound < 1e-12
    assert allclose(
        values, [polylog.polylog_series(k, 0.3 + 0.4j) for k in range(1, 5)]
    )


def test_constant():
    plain, _, _ = polylog.polylog_vector(2, 0.5)
    shifted, _, _ = polylog.polylog_vector(2, 0.5, constant=1 + 1j)
    assert np.isclose(shifted[0], plain[0])
    assert np.isclose(shifted[1], plain[1] + 1 + 1j)

    value = polylog.polylog_continue(2, PathSpec.segment(0, 2j), constant=-1)
    assert np.isclose(value.value, reference(2, 2j) - 1, atol=1e-9)
    assert np.isclose(value.vector[-1], reference(2, 2j), atol=1e-9)


def test_loop_around_one(allclose):
    path = PathSpec.segment(0, 0.5) + PathSpec.loop(1, 0.5)
    value = polylog.polylog_continue(2, path)

    # going once around 1 subtracts 2 pi i from l_1 and 2 pi i log z from l_2
    assert value.branch_offset == 1
    assert allclose(value.vector[0], np.log(2) - 2j * np.pi, atol=1e-9)
    assert allclose(
        value.value, reference(2, 0.5) - 2j * np.pi * np.log(0.5), atol=1e-9
    )

    values, offset, _ = polylog.polylog_vector(1, path=path)
    assert offset == 1
    assert allclose(values[0], np.log(2) - 2j * np.pi, atol=1e-9)


def test_loop_around_zero_is_trivial(allclose):
    # l_n is single valued around 0 on its principal sheet
    path = PathSpec.segment(0, 0.5) + PathSpec.loop(0, 0.5)
    value = polylog.polylog_continue(3, path)
    assert value.branch_offset == 0
    assert allclose(value.value, reference(3, 0.5), atol=1e-9)


def test_continue_from_inside_radius(allclose):
    value = polylog.polylog_continue(2, PathSpec.polyline([0.5j, -1 + 0.5j, -2]))
    assert allclose(value.value, reference(2, -2), atol=1e-9)
    assert value.point == -2


def test_polylog_integral():
    for n, z in [(2, 0.5), (3, 0.3 + 0.6j), (5, -0.8)]:
        assert np.isclose(
            polylog.polylog_integral(n, z),
            polylog.polylog_series(n, z),
            atol=1e-10,
            rtol=0,
        )
    assert polylog.polylog_integral(2, 0) == 0

    with pytest.raises(ValidationError, match="at least 2"):
        polylog.polylog_integral(1, 0.5)
    with pytest.raises(PeriodDomainError, match="series radius"):
        polylog.polylog_integral(2, 0.95)


@pytest.mark.parametrize("n", range(2, 11))
def test_zeta_ref(n):
    assert np.isclose(polylog.zeta_ref(n), float(mpmath.zeta(n)), atol=0, rtol=1e-14)


def test_argument_errors():
    with pytest.raises(ValidationError, match="positive integer"):
        polylog.polylog_series(0, 0.5)
    with pytest.raises(ValidationError, match="positive integer"):
        polylog.polylog_series(1.5, 0.5)
    with pytest.raises(ValidationError, match="Must be positive"):
        polylog.polylog_series(2, 0.5, tol=0)
    with pytest.raises(PeriodDomainError, match="exceeds the series radius"):
        polylog.polylog_series(2, 0.95)
    with pytest.raises(ValidationError, match="integer n >= 2"):
        polylog.zeta_ref(1)

    # the straight segment to a point of the cut runs through the puncture
    with pytest.raises(PeriodDomainError, match="puncture"):
        polylog.polylog_vector(2, 2)

    with pytest.raises(PeriodDomainError, match="inside the series radius"):
        polylog.polylog_continue(2, PathSpec.segment(2j, 3j))
    with pytest.raises(PeriodDomainError, match="straight segment"):
        polylog.polylog_continue(2, PathSpec([CircularArc(0, 0.5, 0.25)]))


def test_series_radius_setting():
    configure_settings(series_radius=0.5)
    with pytest.raises(PeriodDomainError):
        polylog.polylog_series(2, 0.6)

    values, _, _ = polylog.polylog_vector(2, 0.6)
    assert np.isclose(values[-1], reference(2, 0.6), atol=1e-9)


def test_polylog_value():
    value = polylog.PolylogValue(2, 0.5, 0.58, branch_offset=1, vector=[1, 2])
    data = value.to_json()
    assert data["order"] == 2
    assert data["branch_offset"] == 1
    assert value.vector.dtype == complex

    with pytest.raises(PeriodDomainError, match="not finite"):
        polylog.PolylogValue(2, 1, np.inf)
