"""
Group ring model of the polylogarithmic quotient and its Tate coordinates.

The abelian group generated by the conjugates ``a0^k a1 a0^-k`` is modelled
as Laurent polynomials ``sum c_k u^k`` (`.LaurentPolyInt`); truncation modulo
``(u - 1)^N`` (`.TruncatedGroupRingElt`) gives its central series quotients,
and ``u = exp(v)`` maps them onto graded Tate coordinates
(`.GradedTateVector`). The Lie algebra side is ``Q(1) x prod Q(n)`` with the
shift action (`.SemidirectLieElt`), represented on the ``(n + 1)``-dimensional
space by ``N0`` and ``(Ad N0)^(k-1) N1``.
"""

from fractions import Fraction
from functools import reduce
import logging
import math
import re

import numpy as np
import sympy
from nengo.exceptions import ValidationError

from polylog_periods.config import get_scale
from polylog_periods.exceptions import PeriodDomainError
from polylog_periods.hodge_linear import (
    UnipotentMatrix,
    ad_tower,
    exact_array,
    generator_matrix,
    identity_array,
    to_complex,
    unipotent_exp,
)
from polylog_periods.utils import is_exact

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"a([01])(?:\^(-?\d+))?")


def _check_int(value, attr):
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValidationError("Must be an integer (got %r)" % (value,), attr=attr)
    return int(value)


def _check_truncation(N):
    N = _check_int(N, "N")
    if N < 1:
        raise ValidationError("Truncation level must be >= 1 (got %d)" % N, attr="N")
    return N


def _binomial(k, i):
    """Generalized binomial coefficient ``k choose i`` for any integer ``k``."""
    if k >= 0:
        return math.comb(k, i)
    return (-1) ** i * math.comb(-k + i - 1, i)


class LaurentPolyInt:
    """
    Integer Laurent polynomial ``sum_k c_k u^k``.

    ``u^k`` stands for the class of ``a0^k a1 a0^-k``; the group law of the
    conjugates becomes addition.

    Parameters
    ----------
    coefficients : dict
        Map exponent -> integer coefficient; zero coefficients are dropped.
    """

    def __init__(self, coefficients=None):
        self.coefficients = {}
        for k, c in (coefficients or {}).items():
            k = _check_int(k, "coefficients")
            c = _check_int(c, "coefficients")
            if c != 0:
                self.coefficients[k] = c

    @classmethod
    def monomial(cls, k, coefficient=1):
        """The element ``coefficient * u^k``."""
        return cls({k: coefficient})

    @classmethod
    def from_word(cls, word):
        """
        Translate a group word in ``a0``, ``a1`` into the group ring.

        Parameters
        ----------
        word : str
            Product of tokens ``a0``, ``a1``, ``a0^k``, ``a1^k`` (separators
            ``*``, ``.`` and whitespace are ignored). The total exponent of
            ``a0`` must be 0.

        Examples
        --------
        ``a0 a1 a0^-1 a1^-1`` is ``u - 1``.
        """

        compact = re.sub(r"[\s*.]", "", word)
        position = 0
        shift = 0
        coefficients = {}
        while position < len(compact):
            match = _TOKEN.match(compact, position)
            if match is None:
                raise ValidationError(
                    "Cannot parse %r at position %d" % (word, position), attr="word"
                )
            power = int(match.group(2)) if match.group(2) is not None else 1
            if match.group(1) == "0":
                shift += power
            else:
                coefficients[shift] = coefficients.get(shift, 0) + power
            position = match.end()
        if shift != 0:
            raise ValidationError(
                "Total a0 exponent of %r is %d, not 0" % (word, shift), attr="word"
            )
        return cls(coefficients)

    def is_zero(self):
        return not self.coefficients

    def __eq__(self, other):
        if isinstance(other, LaurentPolyInt):
            return self.coefficients == other.coefficients
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.coefficients.items())))

    def __neg__(self):
        return LaurentPolyInt({k: -c for k, c in self.coefficients.items()})

    def __add__(self, other):
        if not isinstance(other, LaurentPolyInt):
            return NotImplemented
        result = dict(self.coefficients)
        for k, c in other.coefficients.items():
            result[k] = result.get(k, 0) + c
        return LaurentPolyInt(result)

    def __sub__(self, other):
        if not isinstance(other, LaurentPolyInt):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return LaurentPolyInt({k: c * other for k, c in self.coefficients.items()})
        if not isinstance(other, LaurentPolyInt):
            return NotImplemented
        result = {}
        for j, a in self.coefficients.items():
            for k, b in other.coefficients.items():
                result[j + k] = result.get(j + k, 0) + a * b
        return LaurentPolyInt(result)

    __rmul__ = __mul__

    def __pow__(self, power):
        power = _check_int(power, "power")
        if power < 0:
            if len(self.coefficients) != 1 or abs(
                next(iter(self.coefficients.values()))
            ) != 1:
                raise ValidationError(
                    "Only units (+-u^k) can be raised to negative powers",
                    attr="power",
                )
            ((k, c),) = self.coefficients.items()
            return LaurentPolyInt({k * power: c ** abs(power)})
        result = LaurentPolyInt({0: 1})
        for _ in range(power):
            result = result * self
        return result

    def to_json(self):
        """Coefficients keyed by exponent."""
        return {"coefficients": dict(sorted(self.coefficients.items()))}

    def __repr__(self):
        return "LaurentPolyInt(%r)" % (dict(sorted(self.coefficients.items())),)


class TruncatedGroupRingElt:
    """
    Element of ``Z[u, u^-1] / (u - 1)^N``.

    Parameters
    ----------
    level : int
        The truncation level ``N``.
    residue : sequence of int
        Coefficients of ``(u - 1)^i``, ``i = 0, ..., N - 1``.
    """

    def __init__(self, level, residue):
        self.level = _check_truncation(level)
        residue = [_check_int(r, "residue") for r in residue]
        if len(residue) != self.level:
            raise ValidationError(
                "Expected %d residue coefficients (got %d)"
                % (self.level, len(residue)),
                attr="residue",
                obj=self,
            )
        self.residue = tuple(residue)

    def _check_level(self, other):
        if not isinstance(other, TruncatedGroupRingElt):
            return False
        if other.level != self.level:
            raise ValidationError(
                "Truncation levels differ (%d != %d)" % (self.level, other.level),
                attr="level",
            )
        return True

    def is_zero(self):
        return not any(self.residue)

    def __eq__(self, other):
        if isinstance(other, TruncatedGroupRingElt):
            return self.level == other.level and self.residue == other.residue
        return NotImplemented

    def __hash__(self):
        return hash((self.level, self.residue))

    def __add__(self, other):
        if not self._check_level(other):
            return NotImplemented
        return TruncatedGroupRingElt(
            self.level, [a + b for a, b in zip(self.residue, other.residue)]
        )

    def __sub__(self, other):
        if not self._check_level(other):
            return NotImplemented
        return TruncatedGroupRingElt(
            self.level, [a - b for a, b in zip(self.residue, other.residue)]
        )

    def __mul__(self, other):
        if not self._check_level(other):
            return NotImplemented
        result = [0] * self.level
        for i, a in enumerate(self.residue):
            for j, b in enumerate(other.residue[: self.level - i]):
                result[i + j] += a * b
        return TruncatedGroupRingElt(self.level, result)

    def monomial_coefficients(self):
        """Coefficients ``c_k`` of ``u^k``, ``k = 0, ..., N - 1``."""
        return [
            sum(
                r * math.comb(i, k) * (-1) ** (i - k)
                for i, r in enumerate(self.residue)
                if i >= k
            )
            for k in range(self.level)
        ]

    def to_json(self):
        return {"level": self.level, "residue": list(self.residue)}

    def __repr__(self):
        return "TruncatedGroupRingElt(%d, %r)" % (self.level, self.residue)


class GradedTateVector:
    """
    Coordinates ``(w_1, ..., w_N)`` in ``prod Q(n)``.

    ``w_n`` is the coordinate of ``u^(x n)``.
    """

    def __init__(self, level, coords):
        self.level = _check_truncation(level)
        self.coords = tuple(coords)
        if len(self.coords) != self.level:
            raise ValidationError(
                "Expected %d coordinates (got %d)" % (self.level, len(self.coords)),
                attr="coords",
                obj=self,
            )

    def __eq__(self, other):
        if isinstance(other, GradedTateVector):
            return self.level == other.level and self.coords == other.coords
        return NotImplemented

    def __hash__(self):
        return hash((self.level, self.coords))

    def to_json(self):
        return {"level": self.level, "coords": list(self.coords)}

    def __repr__(self):
        return "GradedTateVector(%d, %r)" % (self.level, self.coords)


def truncate(p, N):
    """
    Reduce a Laurent polynomial modulo ``(u - 1)^N``.

    Each ``u^k`` is re-expanded as ``((u - 1) + 1)^k`` with exact (generalized)
    binomial coefficients.

    Parameters
    ----------
    p : `.LaurentPolyInt`
        The element.
    N : int
        Truncation level, at least 1.

    Returns
    -------
    element : `.TruncatedGroupRingElt`
        The reduction.
    """

    N = _check_truncation(N)
    residue = [0] * N
    for k, c in p.coefficients.items():
        for i in range(N):
            residue[i] += c * _binomial(k, i)
    return TruncatedGroupRingElt(N, residue)


def central_depth(p, N=None):
    """
    Depth of an element in the central series filtration.

    Returns the largest ``d`` with ``p`` in ``((u - 1)^(d-1))`` modulo
    ``(u - 1)^N``; the zero element has depth ``N + 1``.

    Parameters
    ----------
    p : `.LaurentPolyInt` or `.TruncatedGroupRingElt`
        The element (Laurent polynomials are truncated at ``N`` first).
    N : int
        Truncation level (taken from ``p`` for truncated elements).
    """

    if isinstance(p, LaurentPolyInt):
        if N is None:
            raise ValidationError("N is required for Laurent polynomials", attr="N")
        p = truncate(p, N)
    elif N is not None and N != p.level:
        if N > p.level:
            raise ValidationError(
                "Cannot lift an element of level %d to level %d" % (p.level, N),
                attr="N",
            )
        # reducing further only drops the top residue coefficients
        p = TruncatedGroupRingElt(N, p.residue[:N])
    for i, r in enumerate(p.residue):
        if r != 0:
            return i + 1
    return p.level + 1


def phi(t):
    """
    The isomorphism onto graded Tate coordinates.

    Substituting ``u = exp(v)``, ``sum c_k u^k du/u`` becomes
    ``sum c_k exp(k v) dv``, and ``v^(n-1) dv`` maps to the ``n``-th
    coordinate: ``w_n = sum_k c_k k^(n-1) / (n-1)!``.

    Parameters
    ----------
    t : `.TruncatedGroupRingElt`
        The element.

    Returns
    -------
    vector : `.GradedTateVector`
        Exact rational coordinates.
    """

    coefficients = t.monomial_coefficients()
    coords = []
    for n in range(1, t.level + 1):
        total = sum(c * k ** (n - 1) for k, c in enumerate(coefficients))
        coords.append(Fraction(total, math.factorial(n - 1)))
    return GradedTateVector(t.level, coords)


def phi_matrix(N):
    """The matrix ``(k^(n-1) / (n-1)!)`` (rows ``n = 1..N``, columns ``k = 0..N-1``)."""

    N = _check_truncation(N)
    return sympy.Matrix(N, N, lambda n, k: sympy.Rational(k ** n, math.factorial(n)))


def phi_is_isomorphism(N):
    """True if `.phi_matrix` has nonzero (exact) determinant."""

    det = phi_matrix(N).det()
    logger.debug("det(phi_matrix(%d)) = %s", N, det)
    return det != 0


def tate_lattice_check(N):
    """
    Integrality of the scaled projections of the image of ``phi``.

    For every ``n <= N`` the images ``(n-1)! w_n`` of the basis ``u^k``
    (``k = 0, ..., N - 1``) are ``k^(n-1)``; they generate ``Z`` iff their
    gcd is 1.
    """

    N = _check_truncation(N)
    for n in range(1, N + 1):
        row = [k ** (n - 1) for k in range(N)]
        gcd = reduce(math.gcd, row)
        if gcd != 1:
            logger.debug("Row %d of the integral phi matrix has gcd %d", n, gcd)
            return False
    return True


class SemidirectLieElt:
    """
    Element ``(a, (b_1, ..., b_N))`` of ``Q(1) x prod_(n <= N) Q(n)``.

    Parameters
    ----------
    a : rational
        The ``Q(1)`` component.
    b : sequence of rational
        The graded components.
    """

    def __init__(self, a, b):
        self.a = a
        self.b = tuple(b)

    @property
    def level(self):
        return len(self.b)

    def _check_level(self, other):
        if other.level != self.level:
            raise ValidationError(
                "Levels differ (%d != %d)" % (self.level, other.level), attr="level"
            )

    def __eq__(self, other):
        if isinstance(other, SemidirectLieElt):
            return self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b))

    def __add__(self, other):
        self._check_level(other)
        return SemidirectLieElt(
            self.a + other.a, [x + y for x, y in zip(self.b, other.b)]
        )

    def __sub__(self, other):
        self._check_level(other)
        return SemidirectLieElt(
            self.a - other.a, [x - y for x, y in zip(self.b, other.b)]
        )

    def __rmul__(self, scalar):
        return SemidirectLieElt(scalar * self.a, [scalar * x for x in self.b])

    def is_zero(self):
        return self.a == 0 and not any(self.b)

    def to_json(self):
        return {"a": self.a, "b": list(self.b)}

    def __repr__(self):
        return "SemidirectLieElt(%r, %r)" % (self.a, self.b)


def _act(a, b):
    """The shift action ``a * (b_1, ..., b_N) = (0, a b_1, ..., a b_(N-1))``."""
    return [0] + [a * x for x in b[:-1]]


def bracket(x, y):
    """Lie bracket ``[(a, b), (a', b')] = (0, a * b' - a' * b)``."""

    x._check_level(y)  # pylint: disable=protected-access
    return SemidirectLieElt(0, [p - q for p, q in zip(_act(x.a, y.b), _act(y.a, x.b))])


def generators(N):
    """The generators ``e0 = (1, 0)`` and ``e1 = (0, (1, 0, ..., 0))``."""

    N = _check_truncation(N)
    e0 = SemidirectLieElt(1, [0] * N)
    e1 = SemidirectLieElt(0, [1] + [0] * (N - 1))
    return e0, e1


def nu(n, N):
    """``(ad e0)^(n-1) e1``, the unit vector of ``Q(n)``."""

    N = _check_truncation(N)
    if not 1 <= n <= N:
        raise ValidationError("Need 1 <= n <= N (got n=%r, N=%d)" % (n, N), attr="n")
    return SemidirectLieElt(0, [int(k == n) for k in range(1, N + 1)])


def rep_hom(n, x):
    """
    Representation ``(a, b) -> a N0 + sum_k b_k (Ad N0)^(k-1) N1``.

    Parameters
    ----------
    n : int
        Level of the representation; must equal ``x.level``.
    x : `.SemidirectLieElt`
        The element.

    Returns
    -------
    matrix : `numpy.ndarray`
        Exact ``(n + 1) x (n + 1)`` object matrix (complex for floating
        input).
    """

    if x.level != n:
        raise ValidationError(
            "Element level %d does not match representation level %d"
            % (x.level, n),
            attr="x",
        )
    tower = ad_tower(n)
    result = x.a * generator_matrix(n, "N0")
    for coefficient, matrix in zip(x.b, tower):
        result = result + coefficient * matrix
    if all(is_exact(v) for v in result.flat):
        return exact_array(result)
    return to_complex(result)


def _resolve_scale(scale):
    return get_scale(None) if scale is None else scale


def coordinates_from_unipotent(F, scale=None):
    """
    Factor ``F = exp(-sum_k v_k scale^k (Ad N0)^(k-1) N1) exp(u scale N0)``.

    Parameters
    ----------
    F : `.UnipotentMatrix` or array_like
        Matrix whose columns ``1..n`` are those of ``exp(u scale N0)``.
    scale : complex
        The normalization scale ``kappa`` (defaults to the ``normalization``
        setting).

    Returns
    -------
    u : complex
        The ``N0`` coordinate (0 at level 1).
    v : tuple
        The coordinates ``v_1, ..., v_n``; exact for exact input and scale.
    """

    if not isinstance(F, UnipotentMatrix):
        F = UnipotentMatrix(F)
    scale = _resolve_scale(scale)
    n = F.level
    exact = F.is_exact and is_exact(scale)

    a12 = F.entry(1, 2) if n >= 2 else 0
    n0 = generator_matrix(n, "N0")
    if exact:
        strip = unipotent_exp(-a12 * n0)
    else:
        strip = unipotent_exp(-complex(a12) * to_complex(n0))
    G = F @ strip

    head = G.matrix[:, :n]
    expected = identity_array(n + 1, exact=exact)[:, :n]
    if exact:
        consistent = bool(np.all(head == expected))
    else:
        residual = np.max(np.abs(G.to_complex()[:, :n] - to_complex(expected)))
        consistent = float(residual) <= 1e-10
    if not consistent:
        raise PeriodDomainError(
            "Matrix is not of the form exp(v) exp(u N0): columns 1..%d differ" % n,
            obj=F,
        )

    # N1 e_(n+1) = -e_n, so entry (n+1-k, n+1) is +v_k scale^k and exp(N1)
    # itself has v_1 = -1.
    last = [G.entry(n + 1 - k, n + 1) for k in range(1, n + 1)]
    if exact:
        u = Fraction(a12) / scale
        v = tuple(Fraction(x) / scale ** k for k, x in enumerate(last, start=1))
    else:
        scale = complex(scale)
        u = complex(a12) / scale
        v = tuple(complex(x) / scale ** k for k, x in enumerate(last, start=1))
    return u, v


def unipotent_from_coordinates(u, v, scale=None):
    """
    The matrix ``exp(-sum_k v_k scale^k (Ad N0)^(k-1) N1) exp(u scale N0)``.

    Inverse of `.coordinates_from_unipotent`; the level is ``len(v)``.
    """

    scale = _resolve_scale(scale)
    n = len(v)
    if n < 1:
        raise ValidationError("Need at least one v coordinate", attr="v")
    exact = all(is_exact(x) for x in (u, scale) + tuple(v))

    last = identity_array(n + 1, exact=exact)
    for k, value in enumerate(v, start=1):
        # (Ad N0)^(k-1) N1 e_(n+1) = -e_(n+1-k)
        last[n - k, n] = value * scale ** k
    n0 = generator_matrix(n, "N0")
    if exact:
        orbit = unipotent_exp(u * scale * n0)
    else:
        orbit = unipotent_exp(complex(u * scale) * to_complex(n0))
    return UnipotentMatrix(last) @ orbit
