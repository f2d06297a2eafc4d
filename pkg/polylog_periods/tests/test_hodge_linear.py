# pylint: disable=missing-docstring

from fractions import Fraction

from nengo.exceptions import ValidationError
import numpy as np
import pytest

from polylog_periods import hodge_linear
from polylog_periods.exceptions import PeriodDomainError
from polylog_periods.hodge_linear import (
    FiltrationParams,
    GradedSpace,
    UnipotentMatrix,
    filtration_matrix,
    generator_matrix,
    unipotent_exp,
)


@pytest.mark.parametrize(
    "tag, expected",
    [("N0", "N0"), ("n1", "N1"), ("Ninf", "Ninf"), ("inf", "Ninf"), ("0", "N0")],
)
def test_canonical_tag(tag, expected):
    assert hodge_linear.canonical_tag(tag) == expected


def test_canonical_tag_errors():
    for tag in ("x", "n", "N2"):
        with pytest.raises(ValidationError, match="Unknown generator tag"):
            hodge_linear.canonical_tag(tag)


def test_generators():
    n0 = generator_matrix(3, "N0")
    n1 = generator_matrix(3, "N1")
    ninf = generator_matrix(3, "Ninf")

    assert n0.dtype == n1.dtype == object
    assert n0.tolist() == [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
    assert n1.tolist() == [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, -1], [0, 0, 0, 0]]
    assert np.all(ninf == -n0 + n1)

    generators = hodge_linear.build_generators(3)
    assert [g.tag for g in generators] == ["N0", "N1", "Ninf"]
    assert all(g.level == 3 for g in generators)
    assert generators[1].to_json()["matrix"][2][3] == "-1/1"

    with pytest.raises(ValidationError, match="positive integer"):
        generator_matrix(0, "N0")


def test_graded_space():
    space = GradedSpace(3)
    assert space.dimension == 4
    assert space.weights() == [-6, -4, -2, 0]

    ranks = space.graded_ranks()
    assert sorted(ranks) == list(range(-7, 1))
    assert all(ranks[w] == (1 if w % 2 == 0 else 0) for w in ranks)
    assert space.pairing_flags() == {-6: 1, -4: 1, -2: 1, 0: 1}

    with pytest.raises(ValidationError, match="out of range"):
        space.weight_of(5)
    with pytest.raises(ValidationError):
        GradedSpace(0)


@pytest.mark.parametrize("n", range(1, 9))
def test_power_identity(n):
    assert hodge_linear.power_identity_check(n)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_ad_tower(n):
    tower = hodge_linear.ad_tower(n)
    assert len(tower) == n

    for k, matrix in enumerate(tower, start=1):
        column = np.zeros(n + 1, dtype=object)
        column[n - k] = -1
        assert np.all(matrix[:, n] == column)
        # only the last column is nonzero
        assert np.all(matrix[:, :n] == 0)

    for a in tower:
        for b in tower:
            assert np.all(hodge_linear.commutator(a, b) == 0)


def test_unipotent_matrix_validation():
    with pytest.raises(ValidationError, match="not upper unitriangular"):
        UnipotentMatrix([[1, 0], [1, 1]])
    with pytest.raises(ValidationError, match="not upper unitriangular"):
        UnipotentMatrix([[2, 0], [0, 1]])
    with pytest.raises(ValidationError, match="size at least 2"):
        UnipotentMatrix([[1]])

    # floating input is checked exactly as well
    with pytest.raises(ValidationError, match="not upper unitriangular"):
        UnipotentMatrix([[1, 0], [1e-300, 1]])


def test_unipotent_matrix():
    exact = UnipotentMatrix.identity(2)
    assert exact.is_exact
    assert exact.level == 2
    assert exact.entry(1, 1) == 1

    g = UnipotentMatrix.from_upper(2, [1, 2j, 3])
    assert not g.is_exact
    assert g.entry(1, 3) == 2j
    assert np.allclose(g.upper(), [1, 2j, 3])
    assert np.allclose(g.column(3), [2j, 3, 1])
    assert np.allclose(g.nilpotent_part(), g.to_complex() - np.eye(3))

    assert (exact @ g).allclose(g)
    assert (g @ g.inverse()).allclose(UnipotentMatrix.identity(2, exact=False))

    with pytest.raises(ValidationError, match="Level mismatch"):
        _ = g @ UnipotentMatrix.identity(3)


def test_exact_arithmetic():
    g = UnipotentMatrix(
        np.array([[1, Fraction(1, 2), 3], [0, 1, Fraction(-2, 3)], [0, 0, 1]], object)
    )
    inverse = g.inverse()

    assert inverse.is_exact
    assert np.all((g @ inverse).matrix == hodge_linear.identity_array(3))
    assert inverse.entry(1, 3) == Fraction(-10, 3)

    again = UnipotentMatrix.from_json(g.to_json())
    assert again.is_exact
    assert np.all(again.matrix == g.matrix)

    with pytest.raises(ValidationError, match="not exact"):
        hodge_linear.exact_array(np.array([0.5]))


def test_unipotent_exp():
    n0 = generator_matrix(3, "N0")
    g = unipotent_exp(n0 * Fraction(1, 2))

    assert g.is_exact
    assert g.entry(1, 2) == Fraction(1, 2)
    assert g.entry(1, 3) == Fraction(1, 8)
    assert g.entry(1, 4) == 0

    assert np.all((g @ unipotent_exp(-n0 * Fraction(1, 2))).matrix == np.eye(4))

    floating = unipotent_exp(hodge_linear.to_complex(n0) * 0.5j)
    assert not floating.is_exact
    assert np.isclose(floating.entry(1, 3), (0.5j) ** 2 / 2)

    with pytest.raises(ValidationError, match="strictly upper"):
        unipotent_exp(np.eye(2))
    with pytest.raises(ValidationError, match="square"):
        unipotent_exp(np.zeros((2, 3)))


def test_orbit_and_commutators():
    g = hodge_linear.orbit_matrix("N1", 2, Fraction(1, 2))
    assert g.is_exact
    assert g.entry(2, 3) == Fraction(-1, 2)

    a = hodge_linear.orbit_matrix("N0", 2, 1)
    b = hodge_linear.orbit_matrix("N1", 2, 1)
    c = hodge_linear.group_commutator(a, b)

    # at level 2 the group commutator is exp([N0, N1]) = I - E_13
    assert c.is_exact
    assert c.entry(1, 3) == -1
    assert c.entry(1, 2) == c.entry(2, 3) == 0


def test_filtration_matrix():
    params = FiltrationParams(2, 3, [5, 7])
    flag = filtration_matrix(params)

    assert flag.is_exact
    assert flag.level == 3
    assert flag.entry(1, 2) == flag.entry(2, 3) == 2
    assert flag.entry(1, 3) == 2
    assert flag.entry(3, 4) == 3
    assert flag.entry(2, 4) == 5
    assert flag.entry(1, 4) == 7

    again = FiltrationParams.from_matrix(flag)
    assert again.values() == [2, 3, 5, 7]
    assert again.is_exact

    with pytest.raises(ValidationError, match="Expected 3 lambda values"):
        filtration_matrix(params, n=4)

    broken = flag.matrix.copy()
    broken[0, 2] += 1
    with pytest.raises(PeriodDomainError, match="not those of exp"):
        FiltrationParams.from_matrix(broken)


def test_filtration_floating():
    params = FiltrationParams(0.5j, -1.0, [2.0, 0.25])
    flag = filtration_matrix(params)
    assert not flag.is_exact
    assert np.isclose(flag.entry(1, 3), (0.5j) ** 2 / 2)

    again = FiltrationParams.from_matrix(flag.to_complex() + 0)
    assert np.allclose(again.values(), params.values())

    noisy = flag.to_complex()
    noisy[0, 2] += 1e-12
    assert np.allclose(FiltrationParams.from_matrix(noisy).values(), params.values())
    noisy[0, 2] += 1e-6
    with pytest.raises(PeriodDomainError):
        FiltrationParams.from_matrix(noisy)


def test_identity_is_transversal():
    for n in (1, 2, 4):
        identity = UnipotentMatrix.identity(n)
        assert hodge_linear.mhs_action_check(identity)
        for tag in hodge_linear.TAGS:
            assert hodge_linear.griffiths_check(tag, identity)
            assert hodge_linear.transversality_conditions(tag, identity)


@pytest.mark.parametrize("tag", hodge_linear.TAGS)
@pytest.mark.parametrize("n", [2, 3, 4])
def test_transversality_agreement(tag, n, rng):
    for _ in range(20):
        flag = hodge_linear.random_unipotent(n, tag, rng)
        assert hodge_linear.transversality_conditions(tag, flag)
        assert hodge_linear.griffiths_check(tag, flag)

        flag = hodge_linear.random_unipotent(n, tag, rng, constrained=False)
        assert not hodge_linear.transversality_conditions(tag, flag)
        assert not hodge_linear.griffiths_check(tag, flag)

        # the same decisions in floating point
        floating = flag.to_complex()
        assert not hodge_linear.griffiths_check(tag, floating)


def test_griffiths_generators():
    flag = filtration_matrix(FiltrationParams(1, 0, [0]))
    generator = hodge_linear.build_generators(2)[0]
    assert hodge_linear.griffiths_check(generator, flag)
    assert hodge_linear.griffiths_check(generator.matrix, flag)

    with pytest.raises(ValidationError, match="does not match"):
        hodge_linear.griffiths_check(generator_matrix(3, "N0"), flag)


def test_random_unipotent_errors(rng):
    with pytest.raises(ValidationError, match="imposes no conditions"):
        hodge_linear.random_unipotent(1, "N1", rng, constrained=False)
