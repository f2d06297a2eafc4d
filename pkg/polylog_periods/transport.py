"""
Parallel transport of the flat connection ``dF = omega F``.

In the ``x`` chart ``omega = kappa (dx/x N0 + dx/(1-x) N1)``; in the chart
``xi = 1/x`` it is ``kappa (dxi/xi (-N0 + N1) + dxi/(1-xi) N1)``. Both have the
generic shape ``kappa (dz/z A + dz/(1-z) B)`` with punctures at 0 and 1, which
is what the code works with.

Fundamental solutions are unitriangular, so only the strictly upper entries
are integrated.
"""

import itertools
import logging

import numpy as np
from nengo.exceptions import ValidationError

from polylog_periods.config import get_scale, get_setting
from polylog_periods.exceptions import ConvergenceError, PeriodDomainError
from polylog_periods.hodge_linear import (
    UnipotentMatrix,
    generator_matrix,
    identity_array,
    to_complex,
    unipotent_exp,
)
from polylog_periods.integrator import integrate_path
from polylog_periods.paths import (
    Line,
    PathSpec,
    TangentialAnchor,
    default_route,
    on_real_axis,
)
from polylog_periods.polylog import polylog_vector

logger = logging.getLogger(__name__)

#: Decreasing sequence of tangential offsets used by `.regularized_transport`.
EPSILONS = (1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)

#: The tangential base point ``b`` at 0 with tangent 1.
BASE_POINT = TangentialAnchor("0", 1.0)


class ConnectionForm:
    """
    The connection ``kappa (dz/z A + dz/(1-z) B)`` in one chart.

    Parameters
    ----------
    chart : "x" or "xi"
        Coordinate chart.
    n : int
        Level.
    normalization : "paper" or "deligne"
        Normalization of ``kappa`` (defaults to the ``normalization``
        setting).
    """

    def __init__(self, chart, n, normalization=None):
        self.chart = chart.lower()
        if self.chart not in ("x", "xi"):
            raise ValidationError(
                "Chart must be 'x' or 'xi' (got %r)" % (chart,),
                attr="chart",
                obj=self,
            )
        if normalization is None:
            normalization = get_setting("normalization")
        self.normalization = normalization
        self.scale = get_scale(normalization)
        self.level = n

        n0 = generator_matrix(n, "N0")
        n1 = generator_matrix(n, "N1")
        self.residue_at_0 = n0 if self.chart == "x" else -n0 + n1
        self.residue_at_1 = n1
        self.a_coefficient = to_complex(self.residue_at_0)
        self.b_coefficient = to_complex(self.residue_at_1)
        self._upper = np.triu_indices(n + 1, 1)
        self._frobenius = {}

    @classmethod
    def x_chart(cls, n, normalization=None):
        """Form in the ``x`` chart."""
        return cls("x", n, normalization=normalization)

    @classmethod
    def xi_chart(cls, n, normalization=None):
        """Form in the ``xi = 1/x`` chart."""
        return cls("xi", n, normalization=normalization)

    def matrix(self, z):
        """Coefficient matrix ``Omega(z)`` with ``omega = Omega(z) dz``."""
        return self.scale * (self.a_coefficient / z + self.b_coefficient / (1 - z))

    def rhs(self, z, y):
        """Right hand side of the transport equation on the upper entries."""
        state = np.eye(self.level + 1, dtype=np.complex128)
        state[self._upper] = y
        return (self.matrix(z) @ state)[self._upper]

    def local_data(self, position):
        """
        Residue ``R`` and holomorphic part ``H`` at a puncture.

        In the local parameter ``s`` (``z`` at 0, ``1 - z`` at 1) the form reads
        ``(R / s + H / (1 - s)) ds``.
        """

        a, b = self.scale * self.a_coefficient, self.scale * self.b_coefficient
        if position == 0:
            return a, b
        if position == 1:
            return -b, -a
        raise ValidationError(
            "Puncture position must be 0 or 1 (got %r)" % (position,),
            attr="position",
        )

    def frobenius_coefficients(self, position, order):
        """
        Coefficients ``P_0, ..., P_order`` of the local solution ``P(s) s^R``.

        They solve ``m P_m - [R, P_m] = H (P_0 + ... + P_(m-1))`` with
        ``P_0 = I``; results are cached per puncture and order.
        """

        key = (position, order)
        if key not in self._frobenius:
            residue, holomorphic = self.local_data(position)
            size = self.level + 1
            coefficients = [np.eye(size, dtype=np.complex128)]
            partial = coefficients[0].copy()
            for m in range(1, order + 1):
                rhs = holomorphic @ partial
                term = rhs / m
                coefficient = term.copy()
                for _ in range(size):
                    # (m - ad_R)^-1 = sum_i ad_R^i / m^(i+1), ad_R nilpotent
                    term = (residue @ term - term @ residue) / m
                    if not np.any(term):
                        break
                    coefficient = coefficient + term
                coefficients.append(coefficient)
                partial = partial + coefficient
            self._frobenius[key] = coefficients
        return self._frobenius[key]

    def __repr__(self):
        return "ConnectionForm(%r, n=%d, normalization=%r)" % (
            self.chart,
            self.level,
            self.normalization,
        )


def frobenius_series(form, position, s, order=None):
    """
    Normalized local solution ``P(s)`` at a puncture.

    ``P(s) exp(log(s) R)`` solves the transport equation near the puncture and
    ``P(0) = I``.

    Parameters
    ----------
    form : `.ConnectionForm`
        The connection.
    position : 0 or 1
        Chart position of the puncture.
    s : complex
        Local parameter.
    order : int
        Truncation order (defaults to the ``frobenius_order`` setting).
    """

    if order is None:
        order = get_setting("frobenius_order")
    coefficients = form.frobenius_coefficients(position, order)
    result = np.zeros_like(coefficients[0])
    for coefficient in reversed(coefficients):
        result = result * s + coefficient
    return result


class TransportResult:
    """
    Outcome of a transport computation.

    Parameters
    ----------
    matrix : `.UnipotentMatrix`
        The transported fundamental solution.
    winding : tuple of int
        Signed cut crossings ``(w0, w1)`` of the path.
    est_error : float
        Error estimate.
    diagnostics : dict
        Extra information (step counts, epsilon sequence, ...).
    """

    def __init__(self, matrix, winding=(0, 0), est_error=0.0, diagnostics=None):
        self.matrix = matrix
        self.winding = tuple(winding)
        self.est_error = est_error
        self.diagnostics = dict(diagnostics or {})

    def to_json(self):
        """JSON-compatible description."""
        return {
            "matrix": self.matrix,
            "winding": list(self.winding),
            "est_error": self.est_error,
            "diagnostics": self.diagnostics,
        }

    def __repr__(self):
        return "TransportResult(winding=%r, est_error=%g)" % (
            self.winding,
            self.est_error,
        )


def _check_tol(tol):
    if tol is None:
        tol = get_setting("tolerance")
    if not tol > 0:
        raise ValidationError("Must be positive (got %r)" % (tol,), attr="tol")
    return tol


def _integrate(form, initial, path, tol):
    initial = initial.matrix if isinstance(initial, UnipotentMatrix) else initial
    upper = np.triu_indices(form.level + 1, 1)
    result = integrate_path(form.rhs, to_complex(initial)[upper], path, tol=tol)
    return UnipotentMatrix.from_upper(form.level, result.y), result


def transport(form, path, tol=None):
    """
    Fundamental solution along ``path`` normalized to the identity at its start.

    Parameters
    ----------
    form : `.ConnectionForm`
        The connection.
    path : `.PathSpec`
        Path between interior points.
    tol : float
        Integration tolerance (defaults to the ``tolerance`` setting).

    Returns
    -------
    result : `.TransportResult`
        ``T`` with ``F(end) = T F(start)`` for every solution ``F``.
    """

    tol = _check_tol(tol)
    if path.start_anchor is not None or path.end_anchor is not None:
        raise ValidationError(
            "transport needs interior endpoints; use regularized_transport for "
            "tangential base points",
            attr="path",
        )
    if path.chart != form.chart:
        raise ValidationError(
            "Path chart %r does not match form chart %r" % (path.chart, form.chart),
            attr="path",
        )
    path.check_punctures()

    matrix, result = _integrate(
        form, identity_array(form.level + 1, exact=False), path, tol
    )
    return TransportResult(
        matrix,
        winding=path.winding(),
        est_error=result.est_error,
        diagnostics={"steps": result.steps, "rejected": result.rejected},
    )


def _unipotent_close(a, b):
    return float(np.max(np.abs(a - b)))


def regularized_transport(
    form, anchor, target, route=None, tol=None, epsilons=EPSILONS, order=None
):
    """
    Solution normalized at a tangential base point, evaluated at ``target``.

    The limit ``lim T(p + eps tau -> target) P(s_eps) exp(log(eps) R)`` (with
    ``P`` the local series, ``R`` the residue at the anchor puncture) is taken
    along the decreasing sequence ``epsilons``. A value is accepted when two
    consecutive raw values, or two consecutive Richardson extrapolants
    ``(10 G_j - G_(j-1)) / 9``, differ by less than
    ``max(tol, 10 * est_error)``.

    Parameters
    ----------
    form : `.ConnectionForm`
        The connection.
    anchor : `.TangentialAnchor`
        Base point.
    target : complex
        Interior point.
    route : `.PathSpec`, optional
        Path from a point on the tangent ray to ``target`` (defaults to
        `.default_route`).
    tol : float
        Tolerance (defaults to the ``tolerance`` setting).
    epsilons : sequence of float
        Tangential offsets.
    order : int
        Order of the local series (defaults to the ``frobenius_order``
        setting; 0 gives the plain regularization).

    Returns
    -------
    result : `.TransportResult`
        The regularized solution at ``target``.
    """

    tol = _check_tol(tol)
    if anchor.chart != form.chart:
        raise ValidationError(
            "Anchor %r does not lie in the %r chart" % (anchor, form.chart),
            attr="anchor",
        )
    target = complex(target)
    if route is None:
        route = default_route(anchor, target)
    else:
        if abs(route.end - target) > 1e-12 * max(1.0, abs(target)):
            raise ValidationError(
                "Route ends at %r, not at the target %r" % (route.end, target),
                attr="route",
            )
        route.check_punctures()

    p = anchor.position
    ray = (route.start - p) / anchor.tangent
    if ray.real <= 0 or abs(ray.imag) > 1e-9 * abs(ray):
        raise ValidationError(
            "Route must start on the tangent ray of %r (starts at %r)"
            % (anchor, route.start),
            attr="route",
        )

    residue, _ = form.local_data(p)
    tail, tail_result = _integrate(
        form, identity_array(form.level + 1, exact=False), route, tol
    )
    tail = tail.to_complex()

    values = []
    diffs = []
    est_error = tail_result.est_error
    accepted = None
    for eps in epsilons:
        s_eps = eps * anchor.local_tangent
        initial = frobenius_series(form, p, s_eps, order=order) @ (
            unipotent_exp(np.log(eps) * residue).to_complex()
        )
        head_path = PathSpec([Line(anchor.point(eps), route.start)], chart=form.chart)
        head, head_result = _integrate(form, initial, head_path, tol)
        values.append(tail @ head.to_complex())
        est_error = max(est_error, tail_result.est_error + head_result.est_error)

        if len(values) < 2:
            continue
        threshold = max(tol, 10 * est_error)
        raw = _unipotent_close(values[-1], values[-2])
        diffs.append(raw)
        logger.debug("eps=%g: consecutive difference %g", eps, raw)
        if raw < threshold:
            accepted = (values[-1], eps, "raw")
            break
        if len(values) >= 3:
            current = (10 * values[-1] - values[-2]) / 9
            previous = (10 * values[-2] - values[-3]) / 9
            extrapolated = _unipotent_close(current, previous)
            logger.debug("eps=%g: extrapolant difference %g", eps, extrapolated)
            if extrapolated < threshold:
                accepted = (current, eps, "richardson")
                break

    if accepted is None:
        raise ConvergenceError(
            "Regularized transport from %r to %r did not converge" % (anchor, target),
            diagnostics={"epsilons": list(epsilons), "differences": diffs},
        )

    value, eps, scheme = accepted
    matrix = np.eye(form.level + 1, dtype=np.complex128)
    upper = np.triu_indices(form.level + 1, 1)
    matrix[upper] = value[upper]
    return TransportResult(
        UnipotentMatrix(matrix),
        winding=route.winding(),
        est_error=max(est_error, diffs[-1] if diffs else 0.0),
        diagnostics={"epsilon": eps, "scheme": scheme, "differences": diffs},
    )


def _principal_log(z):
    z = complex(z)
    if on_real_axis(z):
        # points on the real axis take the upper side value
        z = complex(z.real, 0.0)
    return complex(np.log(z))


def _crossing_sequence(branch):
    """Normalize a winding pair or crossing list to a list of crossings."""

    if branch is None:
        return []
    branch = list(branch)
    if len(branch) == 2 and all(isinstance(w, (int, np.integer)) for w in branch):
        w0, w1 = (int(w) for w in branch)
        around_1 = [("1", int(np.sign(w1)))] * abs(w1)
        around_0 = [("0", int(np.sign(w0)))] * abs(w0)
        return around_1 + around_0
    crossings = []
    for item in branch:
        puncture, sign = item
        if str(puncture) not in ("0", "1") or sign not in (-1, 1):
            raise ValidationError(
                "Invalid crossing %r; must be ('0' or '1', +1 or -1)" % (item,),
                attr="branch",
            )
        crossings.append((str(puncture), int(sign)))
    return crossings


def branch_matrix(form, crossings):
    """
    Right factor continuing the principal closed form across cut crossings.

    An anticlockwise crossing around 0 contributes ``exp(2 pi i kappa A)``, one
    around 1 contributes ``exp(-2 pi i kappa B)``; later crossings multiply from
    the left.

    Parameters
    ----------
    form : `.ConnectionForm`
        The connection.
    crossings : list of tuple or tuple of int
        Crossing sequence ``[(puncture, sign), ...]`` or a winding pair
        ``(w0, w1)`` (``w1`` turns around 1 followed by ``w0`` turns around 0).
    """

    size = form.level + 1
    result = np.eye(size, dtype=np.complex128)
    for puncture, sign in _crossing_sequence(crossings):
        if puncture == "0":
            exponent = 2j * np.pi * form.scale * sign * form.a_coefficient
        else:
            exponent = -2j * np.pi * form.scale * sign * form.b_coefficient
        result = unipotent_exp(exponent).to_complex() @ result
    return UnipotentMatrix(result)


def _polylog_values(n, z, branch, tol, constant):
    """Polylogarithm values for the closed forms (upper side on the cut)."""

    z = complex(z)
    if z in (0, 1):
        raise PeriodDomainError("%r is a puncture" % (z,))
    on_cut = z.real > 1 and on_real_axis(z)
    if on_cut and branch is None:
        raise PeriodDomainError(
            "%r lies on the cut [1, inf); supply a branch (winding pair)" % (z,)
        )
    path = None
    if on_cut:
        path = PathSpec.polyline([0, 0.5 + 0.5j, complex(z.real, 0.0)])
    values, _, _ = polylog_vector(n, z, path=path, tol=tol, constant=constant)
    return values


def _resolve(normalization, constant, tol):
    if constant is None:
        constant = get_setting("polylog_constant")
    return get_scale(normalization), constant, _check_tol(tol)


def closed_form_period(n, x, branch=None, normalization=None, constant=None, tol=None):
    """
    Closed-form fundamental solution in the ``x`` chart normalized at ``b``.

    ``a_(j,k) = (kappa log x)^(k-j) / (k-j)!`` for ``k <= n`` and
    ``a_(j,n+1) = -kappa^m l_m(x)`` with ``m = n + 1 - j``; the constant ``c``
    is added to ``l_n``.

    Parameters
    ----------
    n : int
        Level.
    x : complex
        Evaluation point. On ``(-inf, 0)`` the upper side value is used; on
        ``[1, inf)`` a branch is required.
    branch : tuple of int or list of tuple
        Winding pair ``(w0, w1)`` or crossing sequence; the principal value is
        continued by the corresponding `.branch_matrix`.
    normalization : "paper" or "deligne"
        Normalization (defaults to the ``normalization`` setting).
    constant : complex
        The constant ``c`` (defaults to the ``polylog_constant`` setting).
    tol : float
        Tolerance of the polylogarithm evaluation.

    Returns
    -------
    period : `.UnipotentMatrix`
        The period matrix.
    """

    kappa, constant, tol = _resolve(normalization, constant, tol)
    values = _polylog_values(n, x, branch, tol, constant)
    log_term = kappa * _principal_log(x)

    matrix = np.eye(n + 1, dtype=np.complex128)
    factorials = np.cumprod([1.0] + list(range(1, n + 1)))
    for k in range(2, n + 1):
        for j in range(1, k):
            matrix[j - 1, k - 1] = log_term ** (k - j) / factorials[k - j]
    for j in range(1, n + 1):
        m = n + 1 - j
        matrix[j - 1, n] = -(kappa ** m) * values[m - 1]

    period = UnipotentMatrix(matrix)
    if branch is not None:
        form = ConnectionForm.x_chart(n, normalization=normalization)
        period = period @ branch_matrix(form, branch)
    return period


def closed_form_period_xi(
    n, xi, branch=None, normalization=None, constant=None, tol=None
):
    """
    Closed-form fundamental solution in the ``xi`` chart normalized at ``b'``.

    ``a_(j,k) = (-kappa log xi)^(k-j) / (k-j)!`` for ``k <= n`` and
    ``a_(j,n+1) = (-kappa log xi)^m / m! + (-kappa)^m l_m(xi)`` with
    ``m = n + 1 - j``. Arguments as in `.closed_form_period`.
    """

    kappa, constant, tol = _resolve(normalization, constant, tol)
    values = _polylog_values(n, xi, branch, tol, constant)
    log_term = -kappa * _principal_log(xi)

    matrix = np.eye(n + 1, dtype=np.complex128)
    factorials = np.cumprod([1.0] + list(range(1, n + 1)))
    for k in range(2, n + 2):
        for j in range(1, k):
            matrix[j - 1, k - 1] = log_term ** (k - j) / factorials[k - j]
    for j in range(1, n + 1):
        m = n + 1 - j
        matrix[j - 1, n] += (-kappa) ** m * values[m - 1]

    period = UnipotentMatrix(matrix)
    if branch is not None:
        form = ConnectionForm.xi_chart(n, normalization=normalization)
        period = period @ branch_matrix(form, branch)
    return period


def _loop(puncture):
    if puncture in ("0", 0):
        return PathSpec.loop(0.0, 0.5, orientation="ccw")
    if puncture in ("1", 1):
        return PathSpec.loop(1.0, 0.5, orientation="cw")
    raise ValidationError(
        "Puncture must be 0 or 1 (got %r)" % (puncture,), attr="puncture"
    )


def monodromy(n, puncture, anchor=BASE_POINT, tol=None, normalization=None):
    """
    Image of the loop ``gamma_0`` or ``gamma_1`` based at a tangential point.

    ``gamma_0`` runs anticlockwise around 0, ``gamma_1`` clockwise around 1,
    both as circles of radius 1/2 through ``x = 1/2``. The loop transport is
    conjugated back to the base point by the regularized solution ``F`` at
    1/2: the result is ``F^-1 T F``, which is ``exp(2 pi i kappa N0)`` and
    ``exp(2 pi i kappa N1)`` respectively.

    Parameters
    ----------
    n : int
        Level.
    puncture : 0 or 1
        Which loop.
    anchor : `.TangentialAnchor`
        Base point in the ``x`` chart (default ``b = (0, 1)``).
    tol : float
        Tolerance.
    normalization : "paper" or "deligne"
        Normalization.

    Returns
    -------
    result : `.TransportResult`
        The monodromy matrix.
    """

    tol = _check_tol(tol)
    form = ConnectionForm.x_chart(n, normalization=normalization)
    loop = _loop(str(puncture))
    base = regularized_transport(form, anchor, 0.5, tol=tol)
    around = transport(form, loop, tol=tol)
    matrix = base.matrix.inverse() @ around.matrix @ base.matrix
    return TransportResult(
        matrix,
        winding=loop.winding(),
        est_error=base.est_error + around.est_error,
        diagnostics={"puncture": str(puncture)},
    )


def exact_images(n):
    """Exact images ``exp(N0)``, ``exp(N1)`` of ``gamma_0``, ``gamma_1``."""
    return (
        unipotent_exp(generator_matrix(n, "N0")),
        unipotent_exp(generator_matrix(n, "N1")),
    )


def _is_identity(g, threshold):
    if g.is_exact:
        return bool(np.all(g.nilpotent_part() == 0))
    return float(np.max(np.abs(g.nilpotent_part()))) <= threshold


def _key(g):
    if g.is_exact:
        return tuple(g.matrix.flat)
    return tuple(np.round(g.to_complex().flat, 12))


def presentation_check(n, images=None, threshold=1e-8):
    """
    Check the relations of the depth-``n`` nilpotent quotient on two images.

    The conjugates ``g0^k g1 g0^-k`` (``0 <= k < n``) must commute pairwise and
    every left-normed ``(n+1)``-fold commutator of ``g0^(+-1)``, ``g1^(+-1)``
    must be the identity.

    Parameters
    ----------
    n : int
        Level.
    images : tuple of `.UnipotentMatrix`
        Images of ``gamma_0``, ``gamma_1`` (defaults to the exact
        `.exact_images`).
    threshold : float
        Entry threshold for floating images.

    Returns
    -------
    holds : bool
        True if all relations hold.
    """

    g0, g1 = exact_images(n) if images is None else images
    g0_inv = g0.inverse()

    conjugates = []
    power = power_inv = UnipotentMatrix.identity(g0.level, exact=g0.is_exact)
    for _ in range(n):
        conjugates.append(power @ g1 @ power_inv)
        power = power @ g0
        power_inv = g0_inv @ power_inv
    for a, b in itertools.combinations(conjugates, 2):
        if not _is_identity(a @ b @ a.inverse() @ b.inverse(), threshold):
            logger.debug("Conjugates do not commute at level %d", n)
            return False

    letters = [(g0, g0_inv), (g0_inv, g0), (g1, g1.inverse())]
    letters.append((letters[2][1], letters[2][0]))
    level = {_key(g): (g, g_inv) for g, g_inv in letters}
    for depth in range(2, n + 2):
        following = {}
        for c, c_inv in level.values():
            for s, s_inv in letters:
                commutator = c @ s @ c_inv @ s_inv
                if _is_identity(commutator, threshold):
                    continue
                # [c, s]^-1 = [s, c]
                following[_key(commutator)] = (commutator, s @ c @ s_inv @ c_inv)
        level = following
        logger.debug("%d nontrivial commutators of depth %d", len(level), depth)
        if not level:
            return True
    return False


def double_tangential_transport(
    form, start, end, midpoint=0.5, tol=None, start_route=None, end_route=None
):
    """
    Transport between two tangential base points.

    Realized as ``R_end(m)^-1 R_start(m)`` where ``R_a(m)`` is the regularized
    solution from the base point ``a`` evaluated at the midpoint ``m``.

    Returns
    -------
    result : `.TransportResult`
        The constant matrix relating the two normalizations.
    """

    left = regularized_transport(form, start, midpoint, route=start_route, tol=tol)
    right = regularized_transport(form, end, midpoint, route=end_route, tol=tol)
    matrix = right.matrix.inverse() @ left.matrix
    return TransportResult(
        matrix,
        winding=tuple(a - b for a, b in zip(left.winding, right.winding)),
        est_error=left.est_error + right.est_error,
        diagnostics={"midpoint": complex(midpoint)},
    )


def chart_transition(n, x, method="closed", tol=None, normalization=None):
    """
    Constant matrix ``C`` with ``F_b(x) = F_b'(1/x) C``.

    ``F_b`` is the ``x``-chart solution normalized at ``b = (0, 1)`` and
    ``F_b'`` the ``xi``-chart solution normalized at ``b' = (inf, 1)``. ``C``
    is the same for every ``x`` in the upper half plane (and, separately, in
    the lower half plane).

    Parameters
    ----------
    n : int
        Level.
    x : complex
        Point off the real axis.
    method : "closed" or "transport"
        Use the closed forms or regularized transport in both charts.
    tol : float
        Tolerance.
    normalization : "paper" or "deligne"
        Normalization.
    """

    x = complex(x)
    if on_real_axis(x):
        raise PeriodDomainError("Chart transition needs a point off the real axis")
    if method == "closed":
        near = closed_form_period(n, x, normalization=normalization, tol=tol)
        far = closed_form_period_xi(n, 1 / x, normalization=normalization, tol=tol)
    elif method == "transport":
        near = regularized_transport(
            ConnectionForm.x_chart(n, normalization), BASE_POINT, x, tol=tol
        ).matrix
        far = regularized_transport(
            ConnectionForm.xi_chart(n, normalization),
            TangentialAnchor("inf", 1.0),
            1 / x,
            tol=tol,
        ).matrix
    else:
        raise ValidationError(
            "Method must be 'closed' or 'transport' (got %r)" % (method,),
            attr="method",
        )
    return far.inverse() @ near
