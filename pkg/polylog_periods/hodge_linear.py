"""
Linear algebra of the weight-filtered space ``V`` with basis ``e_1, ..., e_(n+1)``.

The nilpotent generators, unipotent exponentials and Hodge filtration flags all
work in two arithmetics: exact (numpy object arrays of ``int``/``Fraction``)
and floating (complex128). Exact input always produces exact output.

The Hodge filtration of a unipotent matrix ``F`` is indexed so that
``F^(-k)`` is spanned by the last ``k + 1`` columns of ``F`` and ``F^1 = 0``.
"""

from fractions import Fraction
import logging
import math

import numpy as np
from nengo.exceptions import ValidationError
from nengo.params import FrozenObject, IntParam

from polylog_periods.config import get_setting
from polylog_periods.exceptions import PeriodDomainError
from polylog_periods.utils import decode_matrix, encode_matrix, is_exact

logger = logging.getLogger(__name__)

#: Tags of the three nilpotent generators.
TAGS = ("N0", "N1", "Ninf")


def canonical_tag(tag):
    """Normalize a generator tag (accepts e.g. ``"n0"``, ``"Ninf"``, ``"inf"``)."""

    key = str(tag).lower()
    if key.startswith("n") and key != "n":
        key = key[1:]
    for name in TAGS:
        if name[1:].lower() == key:
            return name
    raise ValidationError(
        "Unknown generator tag %r; must be one of %s" % (tag, TAGS), attr="tag"
    )


def exact_array(matrix):
    """Copy of ``matrix`` as an object array of exact numbers."""

    matrix = np.asarray(matrix)
    out = np.empty(matrix.shape, dtype=object)
    for idx, x in np.ndenumerate(matrix):
        if isinstance(x, (int, np.integer)):
            out[idx] = int(x)
        elif is_exact(x):
            out[idx] = Fraction(x)
        else:
            raise ValidationError(
                "Entry %r at %s is not exact" % (x, idx), attr="matrix"
            )
    return out


def to_complex(matrix):
    """Copy of ``matrix`` as a complex128 array."""

    matrix = np.asarray(matrix)
    if matrix.dtype != object:
        return matrix.astype(np.complex128)
    out = np.empty(matrix.shape, dtype=np.complex128)
    for idx, x in np.ndenumerate(matrix):
        out[idx] = complex(x)
    return out


def array_is_exact(matrix):
    """True if ``matrix`` is an object array of exact numbers."""

    matrix = np.asarray(matrix)
    return matrix.dtype == object and all(is_exact(x) for x in matrix.flat)


def _scale(x, k):
    """``x / k!``, exact when ``x`` is exact."""
    if array_is_exact(x) if isinstance(x, np.ndarray) else is_exact(x):
        return x * Fraction(1, math.factorial(k))
    return x / math.factorial(k)


def _common(a, b):
    """Bring two arrays to a common arithmetic."""
    if array_is_exact(a) and array_is_exact(b):
        return a, b
    return to_complex(a), to_complex(b)


def identity_array(size, exact=True):
    """Identity matrix, exact (object) or complex128."""
    if exact:
        out = np.zeros((size, size), dtype=object)
        for i in range(size):
            out[i, i] = 1
        return out
    return np.eye(size, dtype=np.complex128)


def is_strictly_upper(matrix):
    """True if all entries on and below the diagonal are zero."""

    matrix = np.asarray(matrix)
    rows, cols = np.tril_indices(matrix.shape[0])
    return all(matrix[j, k] == 0 for j, k in zip(rows, cols))


class GradedSpace(FrozenObject):
    """
    The space ``V`` of level ``n`` with its weight filtration.

    ``e_j`` has weight ``-2 (n + 1 - j)``, so every graded piece of even weight
    in ``[-2n, 0]`` has rank 1 and carries the pairing ``<e, e> = 1``.

    Parameters
    ----------
    level : int
        The level ``n``.
    """

    level = IntParam("level", low=1)

    def __init__(self, level):
        super().__init__()
        self.level = level

    @property
    def dimension(self):
        """Dimension ``n + 1``."""
        return self.level + 1

    def weight_of(self, j):
        """Weight of the basis vector ``e_j`` (1-based)."""
        if not 1 <= j <= self.dimension:
            raise ValidationError(
                "Basis index %d out of range 1..%d" % (j, self.dimension), attr="j"
            )
        return -2 * (self.level + 1 - j)

    def weights(self):
        """Weights of ``e_1, ..., e_(n+1)``."""
        return [self.weight_of(j) for j in range(1, self.dimension + 1)]

    def graded_ranks(self):
        """Rank of ``gr^W_w`` for every ``w`` in ``[-2n - 1, 0]``."""
        weights = set(self.weights())
        return {w: int(w in weights) for w in range(-2 * self.level - 1, 1)}

    def pairing_flags(self):
        """The pairing on each rank-1 graded piece (``<e_w, e_w>_w = 1``)."""
        return {w: 1 for w in self.weights()}


class NilpotentGenerator:
    """
    One of the generators ``N0``, ``N1``, ``Ninf = -N0 + N1``.

    Parameters
    ----------
    tag : str
        Generator tag.
    matrix : `numpy.ndarray`
        Exact integer matrix.
    """

    def __init__(self, tag, matrix):
        self.tag = canonical_tag(tag)
        self.matrix = matrix

    @property
    def level(self):
        """The level ``n``."""
        return self.matrix.shape[0] - 1

    def to_json(self):
        """JSON-compatible description."""
        return {"tag": self.tag, "matrix": encode_matrix(self.matrix)}

    def __repr__(self):
        return "NilpotentGenerator(%r, level=%d)" % (self.tag, self.level)


def _check_level(n):
    if int(n) != n or n < 1:
        raise ValidationError(
            "Level must be a positive integer (got %r)" % (n,), attr="n"
        )
    return int(n)


def generator_matrix(n, tag):
    """Exact matrix of the generator ``tag`` at level ``n``."""

    n = _check_level(n)
    tag = canonical_tag(tag)
    size = n + 1
    n0 = np.zeros((size, size), dtype=object)
    for j in range(2, n + 1):
        # N0 e_j = e_(j-1)
        n0[j - 2, j - 1] = 1
    n1 = np.zeros((size, size), dtype=object)
    # N1 e_(n+1) = -e_n
    n1[n - 1, n] = -1

    if tag == "N0":
        return n0
    if tag == "N1":
        return n1
    return -n0 + n1


def build_generators(n):
    """
    The generators ``N0``, ``N1`` and ``Ninf`` at level ``n``.

    Returns
    -------
    generators : tuple of `.NilpotentGenerator`
        ``(N0, N1, Ninf)`` as exact integer matrices.
    """

    return tuple(NilpotentGenerator(tag, generator_matrix(n, tag)) for tag in TAGS)


class UnipotentMatrix:
    """
    Upper unitriangular ``(n + 1) x (n + 1)`` matrix.

    Used as group element, fundamental solution and Hodge filtration flag. The
    unit diagonal and zero lower part are checked exactly.

    Parameters
    ----------
    matrix : array_like
        The entries; object arrays of exact numbers stay exact, anything else
        is stored as complex128.
    """

    def __init__(self, matrix):
        matrix = np.asarray(matrix)
        if matrix.dtype == object and array_is_exact(matrix):
            matrix = exact_array(matrix)
        else:
            matrix = to_complex(matrix)

        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or len(matrix) < 2:
            raise ValidationError(
                "Must be a square matrix of size at least 2 (got shape %s)"
                % (matrix.shape,),
                attr="matrix",
                obj=self,
            )
        rows, cols = np.tril_indices(len(matrix), -1)
        if any(matrix[j, k] != 0 for j, k in zip(rows, cols)) or any(
            matrix[i, i] != 1 for i in range(len(matrix))
        ):
            raise ValidationError(
                "Matrix is not upper unitriangular", attr="matrix", obj=self
            )
        self.matrix = matrix

    @classmethod
    def identity(cls, n, exact=True):
        """Identity of level ``n``."""
        return cls(identity_array(_check_level(n) + 1, exact=exact))

    @classmethod
    def from_upper(cls, n, values):
        """Build from the strictly upper entries in ``numpy.triu_indices`` order."""
        matrix = np.eye(n + 1, dtype=np.complex128)
        matrix[np.triu_indices(n + 1, 1)] = values
        return cls(matrix)

    @property
    def level(self):
        """The level ``n``."""
        return len(self.matrix) - 1

    @property
    def is_exact(self):
        """True if the entries are exact rationals."""
        return self.matrix.dtype == object

    def upper(self):
        """Strictly upper entries in ``numpy.triu_indices`` order."""
        return to_complex(self.matrix)[np.triu_indices(self.level + 1, 1)]

    def entry(self, j, k):
        """Entry ``a_(j,k)`` (1-based)."""
        return self.matrix[j - 1, k - 1]

    def column(self, k):
        """Column ``k`` (1-based), i.e. the flag vector ``e_k + sum a_(j,k) e_j``."""
        return self.matrix[:, k - 1].copy()

    def to_complex(self):
        """Complex128 copy of the entries."""
        return to_complex(self.matrix)

    def nilpotent_part(self):
        """``self - I`` (strictly upper triangular)."""
        return self.matrix - identity_array(len(self.matrix), exact=self.is_exact)

    def inverse(self):
        """Inverse by the terminating series ``sum (-M)^k`` with ``M = self - I``."""

        m = -self.nilpotent_part()
        result = identity_array(len(m), exact=self.is_exact)
        power = result
        for _ in range(self.level):
            power = power @ m
            result = result + power
        return UnipotentMatrix(result)

    def __matmul__(self, other):
        if isinstance(other, UnipotentMatrix):
            a, b = _common(self.matrix, other.matrix)
            if a.shape != b.shape:
                raise ValidationError(
                    "Level mismatch (%d vs %d)" % (self.level, other.level),
                    attr="other",
                    obj=self,
                )
            return UnipotentMatrix(a @ b)
        return NotImplemented

    def max_abs_diff(self, other):
        """Largest absolute entry difference to another matrix."""
        other = other.matrix if isinstance(other, UnipotentMatrix) else other
        return float(np.max(np.abs(self.to_complex() - to_complex(other))))

    def allclose(self, other, atol=1e-9):
        """True if all entries agree within ``atol``."""
        return self.max_abs_diff(other) <= atol

    def to_json(self):
        """JSON-compatible description."""
        return {"level": self.level, "entries": encode_matrix(self.matrix)}

    @classmethod
    def from_json(cls, data):
        """Inverse of `.to_json` (also accepts a bare nested list)."""
        if isinstance(data, dict):
            data = data["entries"]
        return cls(decode_matrix(data))

    def __repr__(self):
        return "UnipotentMatrix(%r)" % (self.matrix.tolist(),)


def unipotent_exp(matrix):
    """
    Exponential of a strictly upper triangular matrix.

    Computed by the terminating series ``sum_(k <= n) M^k / k!``; exact when
    the input is exact.

    Parameters
    ----------
    matrix : array_like
        Strictly upper triangular square matrix.

    Returns
    -------
    exp : `.UnipotentMatrix`
        ``exp(matrix)``.
    """

    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError("Must be a square matrix", attr="matrix")
    if not is_strictly_upper(matrix):
        raise ValidationError("Matrix is not strictly upper triangular", attr="matrix")

    exact = array_is_exact(matrix)
    matrix = exact_array(matrix) if exact else to_complex(matrix)
    result = identity_array(len(matrix), exact=exact)
    power = result
    for k in range(1, len(matrix)):
        power = power @ matrix
        result = result + _scale(power, k)
    return UnipotentMatrix(result)


def commutator(a, b):
    """Matrix commutator ``[a, b] = ab - ba``."""
    a, b = _common(np.asarray(a), np.asarray(b))
    return a @ b - b @ a


def group_commutator(g, h):
    """Group commutator ``g h g^-1 h^-1`` of unipotent matrices."""
    return g @ h @ g.inverse() @ h.inverse()


def orbit_matrix(tag, n, t):
    """``exp(t N_tag)`` at level ``n``."""

    generator = generator_matrix(n, tag)
    if is_exact(t):
        return unipotent_exp(generator * t)
    return unipotent_exp(to_complex(generator) * t)


class FiltrationParams:
    """
    Coordinates ``(alpha, beta, lambda_2, ..., lambda_n)`` of a Hodge flag.

    The flag is the unipotent matrix whose columns ``2..n`` are those of
    ``exp(alpha N0)`` and whose last column carries ``beta`` in row ``n`` and
    ``lambda_k`` in row ``n + 1 - k``.

    Parameters
    ----------
    alpha : complex
        Coefficient of the ``N0`` part.
    beta : complex
        Entry ``a_(n, n+1)``.
    lambdas : list of complex
        ``(lambda_2, ..., lambda_n)``; its length fixes the level.
    """

    def __init__(self, alpha, beta, lambdas):
        self.alpha = alpha
        self.beta = beta
        self.lambdas = list(lambdas)

    @property
    def level(self):
        """The level ``n``."""
        return len(self.lambdas) + 1

    @property
    def is_exact(self):
        """True if all parameters are exact."""
        return all(is_exact(x) for x in [self.alpha, self.beta] + self.lambdas)

    def values(self):
        """``[alpha, beta, lambda_2, ..., lambda_n]``."""
        return [self.alpha, self.beta] + self.lambdas

    @classmethod
    def from_matrix(cls, flag, threshold=None):
        """
        Read the parameters off a flag matrix (inverse of `.filtration_matrix`).

        Raises
        ------
        `.PeriodDomainError`
            If columns ``2..n`` of ``flag`` are not those of ``exp(alpha N0)``.
        """

        if not isinstance(flag, UnipotentMatrix):
            flag = UnipotentMatrix(flag)
        n = flag.level
        alpha = flag.entry(1, 2) if n >= 2 else 0
        params = cls(
            alpha,
            flag.entry(n, n + 1),
            [flag.entry(n + 1 - k, n + 1) for k in range(2, n + 1)],
        )
        expected = filtration_matrix(params)
        if flag.is_exact and expected.is_exact:
            consistent = np.all(flag.matrix[:, :n] == expected.matrix[:, :n])
        else:
            if threshold is None:
                threshold = get_setting("rank_threshold")
            diff = flag.to_complex()[:, :n] - expected.to_complex()[:, :n]
            consistent = np.max(np.abs(diff), initial=0.0) <= threshold * max(
                1.0, abs(alpha) ** max(n - 1, 1)
            )
        if not consistent:
            raise PeriodDomainError(
                "Columns 2..%d are not those of exp(alpha N0)" % n, obj=flag
            )
        return params

    def to_json(self):
        """JSON-compatible description."""
        return {"alpha": self.alpha, "beta": self.beta, "lambda": self.lambdas}

    def __repr__(self):
        return "FiltrationParams(alpha=%r, beta=%r, lambdas=%r)" % (
            self.alpha,
            self.beta,
            self.lambdas,
        )


def filtration_matrix(params, n=None):
    """
    The flag matrix ``F(alpha, beta, lambda_2, ..., lambda_n)``.

    Parameters
    ----------
    params : `.FiltrationParams`
        The coordinates.
    n : int, optional
        Expected level; a mismatch with ``len(params.lambdas) + 1`` raises a
        `~nengo.exceptions.ValidationError`.
    """

    if n is not None and n != params.level:
        raise ValidationError(
            "Expected %d lambda values for level %d (got %d)"
            % (n - 1, n, len(params.lambdas)),
            attr="lambdas",
            obj=params,
        )
    n = params.level
    exact = params.is_exact
    size = n + 1
    matrix = identity_array(size, exact=exact)

    alpha = params.alpha
    for k in range(2, n + 1):
        for j in range(1, k):
            matrix[j - 1, k - 1] = _scale(alpha ** (k - j), k - j)

    matrix[n - 1, n] = params.beta
    for k, lam in enumerate(params.lambdas, start=2):
        matrix[n - k, n] = lam
    return UnipotentMatrix(matrix)


def _as_unipotent(matrix):
    return matrix if isinstance(matrix, UnipotentMatrix) else UnipotentMatrix(matrix)


def _in_column_span(vector, flag, first, threshold):
    """
    Whether ``vector`` lies in the span of columns ``first..n+1`` of ``flag``.

    Columns are eliminated from the bottom row upwards, using the unit
    diagonal; the residual left in rows ``1..first-1`` decides membership.
    """

    residual = vector.copy()
    size = len(residual)
    for k in range(size, first - 1, -1):
        coefficient = residual[k - 1]
        if coefficient != 0:
            residual = residual - coefficient * flag[:, k - 1]
    rest = residual[: first - 1]
    if threshold is None:
        return all(x == 0 for x in rest)
    scale = max(1.0, float(np.max(np.abs(to_complex(vector)), initial=0.0)))
    return float(np.max(np.abs(to_complex(rest)), initial=0.0)) <= threshold * scale


def griffiths_check(generator, flag, threshold=None):
    """
    Test the Griffiths transversality ``N F^p \\subset F^(p-1)``.

    Parameters
    ----------
    generator : `.NilpotentGenerator` or array_like or str
        The nilpotent operator (a tag selects the generator of the flag's
        level).
    flag : `.UnipotentMatrix` or array_like
        The flag.
    threshold : float
        Residual threshold for floating input (defaults to the
        ``rank_threshold`` setting); exact input is decided exactly.

    Returns
    -------
    holds : bool
        True if the condition holds for every ``p``.
    """

    flag = _as_unipotent(flag)
    if isinstance(generator, str):
        generator = generator_matrix(flag.level, generator)
    elif isinstance(generator, NilpotentGenerator):
        generator = generator.matrix
    generator = np.asarray(generator)
    if generator.shape != flag.matrix.shape:
        raise ValidationError(
            "Generator shape %s does not match flag shape %s"
            % (generator.shape, flag.matrix.shape),
            attr="generator",
        )

    n_mat, f_mat = _common(generator, flag.matrix)
    exact = f_mat.dtype == object
    if not exact and threshold is None:
        threshold = get_setting("rank_threshold")

    size = len(f_mat)
    for m in range(size, 1, -1):
        image = n_mat @ f_mat[:, m - 1]
        if not _in_column_span(image, f_mat, m - 1, None if exact else threshold):
            logger.debug("Transversality fails at column %d", m)
            return False
    return True


def _close(a, b, threshold):
    if threshold is None:
        return a == b
    return abs(complex(a) - complex(b)) <= threshold * max(1.0, abs(complex(b)))


def transversality_conditions(tag, flag, threshold=None):
    """
    Closed-form transversality conditions on the entries ``a_(j,k)``.

    For ``N0``: ``a_(k,n+1) = 0`` (``2 <= k <= n``) and
    ``a_(1,k) = a_(l-k+1,l)`` (``2 <= k < l <= n``). For ``N1``:
    ``a_(k,n) = 0`` (``1 <= k <= n-1``). For ``Ninf``:
    ``a_(1,k) = a_(l-k+1,l)`` (``2 <= k < l <= n+1``).

    Returns
    -------
    holds : bool
        True if every condition of the tag holds (exactly for exact input,
        within ``threshold`` otherwise).
    """

    flag = _as_unipotent(flag)
    if not flag.is_exact and threshold is None:
        threshold = get_setting("rank_threshold")
    if flag.is_exact:
        threshold = None

    for (j, k), target in _conditions(canonical_tag(tag), flag):
        if not _close(flag.entry(j, k), target, threshold):
            return False
    return True


def _conditions(tag, flag):
    """Pairs ``((j, k), required value)`` of the conditions of ``tag``."""

    n = flag.level
    if tag == "N0":
        conditions = [((k, n + 1), 0) for k in range(2, n + 1)]
        last = n
    elif tag == "N1":
        return [((k, n), 0) for k in range(1, n)]
    else:
        conditions = []
        last = n + 1

    for l in range(2, last + 1):
        for k in range(2, l):
            conditions.append(((l - k + 1, l), flag.entry(1, k)))
    return conditions


def mhs_action_check(flag, threshold=None):
    """Transversality for ``N0`` and ``N1`` simultaneously."""
    return griffiths_check("N0", flag, threshold) and griffiths_check(
        "N1", flag, threshold
    )


def ad_tower(n):
    """
    The matrices ``(Ad N0)^(k-1) N1`` for ``k = 1, ..., n``.

    They commute pairwise and ``(Ad N0)^(k-1) N1 e_(n+1) = -e_(n+1-k)``.
    """

    n0 = generator_matrix(n, "N0")
    tower = [generator_matrix(n, "N1")]
    for _ in range(1, n):
        tower.append(commutator(n0, tower[-1]))
    return tower


def power_identity_check(n):
    """
    Verify ``(-N0 + N1)^j = (-N0)^j + (-Ad N0)^(j-1) N1`` for ``1 <= j <= n+1``.

    The check is exact integer arithmetic.
    """

    n0 = generator_matrix(n, "N0")
    n1 = generator_matrix(n, "N1")
    ninf = -n0 + n1
    size = n + 1

    lhs = identity_array(size)
    neg_n0_power = identity_array(size)
    ad_term = n1
    for j in range(1, n + 2):
        lhs = lhs @ ninf
        neg_n0_power = neg_n0_power @ (-n0)
        if j > 1:
            ad_term = -commutator(n0, ad_term)
        if not np.all(lhs == neg_n0_power + ad_term):
            logger.debug("Power identity fails at level %d, j=%d", n, j)
            return False
    return True


def _random_rational(rng):
    return Fraction(int(rng.randint(-5, 6)), int(rng.randint(1, 5)))


def random_unipotent(n, tag, rng, constrained=True):
    """
    Random rational flag that satisfies or violates the conditions of ``tag``.

    Parameters
    ----------
    n : int
        Level.
    tag : str
        Generator tag.
    rng : `numpy.random.RandomState`
        Random number generator.
    constrained : bool
        If True all conditions of `.transversality_conditions` hold; otherwise
        exactly one randomly chosen condition is broken.

    Returns
    -------
    flag : `.UnipotentMatrix`
        Exact matrix with entries ``p/q``, ``-5 <= p <= 5``, ``1 <= q <= 4``.
    """

    n = _check_level(n)
    tag = canonical_tag(tag)
    matrix = identity_array(n + 1)
    for j, k in zip(*np.triu_indices(n + 1, 1)):
        matrix[j, k] = _random_rational(rng)

    # conditions only reference entries of the first row, so they can be
    # imposed one at a time
    flag = UnipotentMatrix(matrix)
    conditions = _conditions(tag, flag)
    for (j, k), target in conditions:
        matrix[j - 1, k - 1] = target

    if not constrained:
        if not conditions:
            raise ValidationError(
                "%s imposes no conditions at level %d" % (tag, n), attr="constrained"
            )
        (j, k), _ = conditions[rng.randint(len(conditions))]
        delta = 0
        while delta == 0:
            delta = _random_rational(rng)
        matrix[j - 1, k - 1] += delta

    return UnipotentMatrix(matrix)
