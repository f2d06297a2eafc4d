"""
Piecewise paths in the punctured plane.

Paths live in one chart (the ``x`` coordinate or ``xi = 1/x``); in either chart
the punctures sit at ``0`` and ``1``. Branch cuts are ``(-inf, 0]`` for the
logarithm and ``[1, inf)`` for the polylogarithms; points on the real axis
count as lying on the upper side of a cut.
"""

import logging

import numpy as np
from nengo.exceptions import ValidationError
from nengo.params import EnumParam, FrozenObject

from polylog_periods.config import get_setting
from polylog_periods.exceptions import PeriodDomainError
from polylog_periods.utils import parse_complex, to_jsonable

logger = logging.getLogger(__name__)

#: Positions of the punctures in chart coordinates.
PUNCTURES = (0.0, 1.0)

# relative tolerance for "same point" and "on the real axis" decisions
_GEOMETRY_RTOL = 1e-12


def on_real_axis(z):
    """True if ``z`` lies on the real axis up to rounding."""
    return abs(z.imag) <= _GEOMETRY_RTOL * max(1.0, abs(z))


def _side(z):
    """+1 on the closed upper half plane, -1 below."""
    return 1 if z.imag >= 0 or on_real_axis(z) else -1


def _crossing(re, downward):
    """Classify an axis crossing at real part ``re`` as a cut crossing."""

    if re < 0:
        # anticlockwise around 0 crosses (-inf, 0] downwards
        return ("0", 1 if downward else -1)
    if re > 1:
        # anticlockwise around 1 crosses [1, inf) upwards
        return ("1", -1 if downward else 1)
    return None


class Line:
    """
    Straight segment from ``start`` to ``end``.

    Parameters
    ----------
    start : complex
        Initial point.
    end : complex
        Final point.
    """

    kind = "line"

    def __init__(self, start, end):
        self.start = complex(start)
        self.end = complex(end)

    @property
    def length(self):
        """Euclidean length of the segment."""
        return abs(self.end - self.start)

    def point(self, s):
        """Point at parameter ``s`` in ``[0, 1]``."""
        return self.start + s * (self.end - self.start)

    def derivative(self, s):
        """Derivative of `.point` with respect to ``s``."""
        return self.end - self.start

    def distance_to(self, p):
        """Distance from the point ``p`` to the segment."""

        d = self.end - self.start
        if d == 0:
            return abs(p - self.start)
        t = ((p - self.start) * d.conjugate()).real / abs(d) ** 2
        t = min(max(t, 0.0), 1.0)
        return abs(self.point(t) - p)

    def cut_crossings(self):
        """
        Ordered list of ``(puncture, sign)`` crossings of the branch cuts.

        ``sign`` is +1 when the crossing is anticlockwise around the puncture.
        """

        a, b = self.start, self.end
        if _side(a) == _side(b):
            return []
        t = a.imag / (a.imag - b.imag)
        crossing = _crossing(self.point(t).real, downward=_side(a) > _side(b))
        return [] if crossing is None else [crossing]

    def reversed(self):
        """The same segment traversed backwards."""
        return Line(self.end, self.start)

    def to_json(self):
        """JSON-compatible description (see `.PathSpec.from_json`)."""
        return {"type": "line", "from": self.start, "to": self.end}

    def __repr__(self):
        return "Line(%r, %r)" % (self.start, self.end)


class CircularArc:
    """
    Circular arc around ``center`` from ``start`` to ``end``.

    Parameters
    ----------
    start : complex
        Initial point.
    end : complex
        Final point; must have the same distance from ``center`` as ``start``.
        If ``end == start`` the arc is a full circle.
    center : complex
        Center of the circle.
    orientation : "ccw" or "cw"
        Anticlockwise or clockwise traversal.
    turns : int
        Number of additional full turns (minus one) added to the arc; a full
        circle with ``turns=2`` winds twice.
    """

    kind = "arc"

    def __init__(self, start, end, center, orientation="ccw", turns=1):
        self.start = complex(start)
        self.end = complex(end)
        self.center = complex(center)
        self.orientation = orientation.lower()
        self.turns = int(turns)

        if self.orientation not in ("ccw", "cw"):
            raise ValidationError(
                "Orientation must be 'ccw' or 'cw' (got %r)" % (orientation,),
                attr="orientation",
                obj=self,
            )
        if self.turns < 1:
            raise ValidationError("Must be at least 1", attr="turns", obj=self)

        self.radius = abs(self.start - self.center)
        if self.radius == 0:
            raise ValidationError("Arc has zero radius", attr="center", obj=self)
        if abs(abs(self.end - self.center) - self.radius) > 1e-9 * self.radius:
            raise ValidationError(
                "Start and end points are at different distances from the center",
                attr="end",
                obj=self,
            )

        self.theta0 = np.angle(self.start - self.center)
        gap = (np.angle(self.end - self.center) - self.theta0) % (2 * np.pi)
        if abs(self.end - self.start) <= _GEOMETRY_RTOL * max(1.0, self.radius):
            gap = 0.0
        sign = 1 if self.orientation == "ccw" else -1
        if sign < 0 and gap > 0:
            gap = 2 * np.pi - gap
        if gap == 0:
            gap = 2 * np.pi
        self.sweep = sign * (gap + 2 * np.pi * (self.turns - 1))

    @property
    def length(self):
        """Arc length."""
        return self.radius * abs(self.sweep)

    def point(self, s):
        """Point at parameter ``s`` in ``[0, 1]``."""
        if s == 1:
            return self.end
        return self.center + self.radius * np.exp(1j * (self.theta0 + s * self.sweep))

    def derivative(self, s):
        """Derivative of `.point` with respect to ``s``."""
        return (
            1j * self.sweep * self.radius * np.exp(1j * (self.theta0 + s * self.sweep))
        )

    def distance_to(self, p):
        """Distance from the point ``p`` to the arc."""

        offset = p - self.center
        if abs(self.sweep) >= 2 * np.pi:
            return abs(abs(offset) - self.radius)
        rel = (np.angle(offset) - self.theta0) * np.sign(self.sweep)
        if offset != 0 and rel % (2 * np.pi) <= abs(self.sweep):
            return abs(abs(offset) - self.radius)
        return min(abs(p - self.start), abs(p - self.end))

    def cut_crossings(self):
        """
        Ordered list of ``(puncture, sign)`` crossings of the branch cuts.

        ``sign`` is +1 when the crossing is anticlockwise around the puncture.
        """

        sin0 = -self.center.imag / self.radius
        if abs(sin0) >= 1:
            # tangent to the axis at most, no change of side
            return []

        base = np.arcsin(sin0)
        lo = min(self.theta0, self.theta0 + self.sweep)
        hi = max(self.theta0, self.theta0 + self.sweep)
        eps = 1e-12 * max(1.0, abs(hi))

        angles = []
        for root in (base, np.pi - base):
            k = np.ceil((lo - eps - root) / (2 * np.pi))
            theta = root + 2 * np.pi * k
            while theta <= hi + eps:
                angles.append(theta)
                theta += 2 * np.pi
        angles.sort(key=lambda theta: (theta - self.theta0) / self.sweep)

        crossings = []
        for theta in angles:
            s = (theta - self.theta0) / self.sweep
            upward = np.cos(theta) * self.sweep > 0
            if upward and s <= eps:
                # leaving the axis upwards stays on the upper side
                continue
            if not upward and s >= 1 - eps:
                # arriving at the axis from above stays on the upper side
                continue
            crossing = _crossing(
                self.center.real + self.radius * np.cos(theta), downward=not upward
            )
            if crossing is not None:
                crossings.append(crossing)
        return crossings

    def reversed(self):
        """The same arc traversed backwards."""
        arc = CircularArc(
            self.end,
            self.start,
            self.center,
            orientation="cw" if self.orientation == "ccw" else "ccw",
            turns=self.turns,
        )
        return arc

    def to_json(self):
        """JSON-compatible description (see `.PathSpec.from_json`)."""
        data = {
            "type": "arc",
            "from": self.start,
            "to": self.end,
            "center": self.center,
            "orientation": self.orientation,
        }
        if self.turns != 1:
            data["turns"] = self.turns
        return data

    def __repr__(self):
        return "CircularArc(%r, %r, center=%r, orientation=%r)" % (
            self.start,
            self.end,
            self.center,
            self.orientation,
        )


class TangentialAnchor(FrozenObject):
    """
    A base point at a puncture, specified by a nonzero tangent vector.

    Parameters
    ----------
    puncture : "0", "1" or "inf"
        The puncture; ``"inf"`` is the point ``xi = 0`` of the ``xi`` chart.
    tangent : complex
        Tangent vector, in the coordinate of the chart containing the puncture
        (``x`` for "0" and "1", ``xi`` for "inf").
    """

    puncture = EnumParam("puncture", values=("0", "1", "inf"))

    def __init__(self, puncture, tangent=1.0):
        super().__init__()
        self.puncture = str(puncture)
        tangent = complex(tangent)
        if tangent == 0:
            raise ValidationError("Tangent must be nonzero", attr="tangent", obj=self)
        self._tangent = tangent

    @property
    def tangent(self):
        """Tangent vector in chart coordinates."""
        return self._tangent

    @property
    def chart(self):
        """Chart containing the puncture ("x" or "xi")."""
        return "xi" if self.puncture == "inf" else "x"

    @property
    def position(self):
        """Position of the puncture in chart coordinates (0 or 1)."""
        return 1.0 if self.puncture == "1" else 0.0

    @property
    def local_tangent(self):
        """The tangent expressed in the local parameter (see `.local_parameter`)."""
        return -self.tangent if self.position == 1 else self.tangent

    def local_parameter(self, z):
        """Local parameter vanishing at the puncture (``z`` or ``1 - z``)."""
        return 1 - z if self.position == 1 else z

    def point(self, eps):
        """Chart point at parameter ``eps`` along the tangent."""
        return self.position + eps * self.tangent

    def to_json(self):
        """JSON-compatible description."""
        return {"puncture": self.puncture, "tangent": self.tangent}

    @classmethod
    def from_json(cls, data):
        """Inverse of `.to_json`."""
        return cls(str(data["puncture"]), parse_complex(data.get("tangent", 1)))

    def __repr__(self):
        return "TangentialAnchor(%r, %r)" % (self.puncture, self.tangent)


class PathSpec:
    """
    Piecewise path made of straight segments and circular arcs.

    Parameters
    ----------
    arcs : list of `.Line` or `.CircularArc`
        Consecutive arcs; each arc must start where the previous one ends.
    start_anchor : `.TangentialAnchor`, optional
        Tangential base point the path emanates from (the first arc then
        starts on the tangent ray).
    end_anchor : `.TangentialAnchor`, optional
        Tangential base point the path runs into.
    chart : "x" or "xi"
        Chart in which the points are expressed.
    start : complex, optional
        Initial point; required only when ``arcs`` is empty.
    """

    def __init__(self, arcs, start_anchor=None, end_anchor=None, chart="x", start=None):
        self.arcs = list(arcs)
        self.start_anchor = start_anchor
        self.end_anchor = end_anchor
        self.chart = chart.lower()

        if self.chart not in ("x", "xi"):
            raise ValidationError(
                "Chart must be 'x' or 'xi' (got %r)" % (chart,), attr="chart", obj=self
            )
        for anchor in (start_anchor, end_anchor):
            if anchor is not None and anchor.chart != self.chart:
                raise ValidationError(
                    "Anchor %r does not lie in the %r chart" % (anchor, self.chart),
                    attr="chart",
                    obj=self,
                )

        if len(self.arcs) == 0:
            if start is None:
                raise ValidationError(
                    "A path without arcs needs an explicit start point",
                    attr="start",
                    obj=self,
                )
            self._start = complex(start)
        else:
            self._start = self.arcs[0].start

        for i in range(1, len(self.arcs)):
            a, b = self.arcs[i - 1].end, self.arcs[i].start
            if abs(a - b) > _GEOMETRY_RTOL * max(1.0, abs(a)) * 1e3:
                raise ValidationError(
                    "Arc %d starts at %r but arc %d ends at %r" % (i, b, i - 1, a),
                    attr="arcs",
                    obj=self,
                )

    @property
    def start(self):
        """Initial point."""
        return self._start

    @property
    def end(self):
        """Final point."""
        return self.arcs[-1].end if self.arcs else self._start

    @property
    def length(self):
        """Total length."""
        return sum(arc.length for arc in self.arcs)

    def crossings(self):
        """Ordered list of ``(puncture, sign)`` branch cut crossings."""
        return [c for arc in self.arcs for c in arc.cut_crossings()]

    def winding(self):
        """
        Signed crossing counts ``(w0, w1)`` of the cuts at 0 and at 1.

        For a closed path these are the winding numbers around 0 and 1.
        """

        w0 = sum(sign for puncture, sign in self.crossings() if puncture == "0")
        w1 = sum(sign for puncture, sign in self.crossings() if puncture == "1")
        return w0, w1

    def check_punctures(self, min_distance=None, exempt_start=False):
        """
        Raise `.PeriodDomainError` if the path comes too close to a puncture.

        Parameters
        ----------
        min_distance : float
            Minimum allowed distance (defaults to the ``puncture_distance``
            setting).
        exempt_start : bool
            If True the puncture at the start of the path (a tangential start)
            is allowed on the first arc.
        """

        if min_distance is None:
            min_distance = get_setting("puncture_distance")

        for i, arc in enumerate(self.arcs):
            for p in PUNCTURES:
                if exempt_start and i == 0 and abs(arc.start - p) < min_distance:
                    continue
                if arc.distance_to(p) < min_distance:
                    raise PeriodDomainError(
                        "Arc %d (%r) passes within %g of the puncture at %g"
                        % (i, arc, min_distance, p),
                        obj=self,
                    )
        if not self.arcs:
            for p in PUNCTURES:
                if not exempt_start and abs(self._start - p) < min_distance:
                    raise PeriodDomainError(
                        "Point %r lies on the puncture at %g" % (self._start, p),
                        obj=self,
                    )

    def reversed(self):
        """The same path traversed backwards."""
        return PathSpec(
            [arc.reversed() for arc in reversed(self.arcs)],
            start_anchor=self.end_anchor,
            end_anchor=self.start_anchor,
            chart=self.chart,
            start=self.end,
        )

    def __add__(self, other):
        if self.chart != other.chart:
            raise ValidationError(
                "Cannot concatenate paths in different charts", attr="chart", obj=self
            )
        return PathSpec(
            self.arcs + other.arcs,
            start_anchor=self.start_anchor,
            end_anchor=other.end_anchor,
            chart=self.chart,
            start=self.start,
        )

    def __repr__(self):
        return "PathSpec(%r, chart=%r)" % (self.arcs, self.chart)

    def to_json(self):
        """JSON-compatible description (see `.from_json`)."""

        data = {"chart": self.chart, "arcs": [arc.to_json() for arc in self.arcs]}
        if not self.arcs:
            data["start"] = self._start
        if self.start_anchor is not None:
            data["start_anchor"] = self.start_anchor.to_json()
        if self.end_anchor is not None:
            data["end_anchor"] = self.end_anchor.to_json()
        return to_jsonable(data)

    @classmethod
    def from_json(cls, data):
        """
        Build a path from its JSON description.

        ``data`` is either a list of arcs or an object
        ``{"chart": "x", "start_anchor": {...}, "arcs": [...]}``. Each arc is
        ``{"type": "line", "from": a, "to": b}`` or ``{"type": "arc", "from": a,
        "to": b, "center": c, "orientation": "ccw" | "cw", "turns": 1}``; points
        are JSON numbers, ``[re, im]`` pairs or strings like ``"0.5+0.5j"``.
        Anchors are ``{"puncture": "0" | "1" | "inf", "tangent": t}``.
        """

        if isinstance(data, list):
            data = {"arcs": data}

        arcs = []
        for item in data.get("arcs", []):
            kind = item.get("type", "line")
            start = parse_complex(item["from"])
            end = parse_complex(item["to"])
            if kind == "line":
                arcs.append(Line(start, end))
            elif kind == "arc":
                if "center" not in item:
                    raise ValidationError(
                        "Circular arcs need a 'center'", attr="arcs", obj=cls
                    )
                arcs.append(
                    CircularArc(
                        start,
                        end,
                        parse_complex(item["center"]),
                        orientation=item.get("orientation", "ccw"),
                        turns=item.get("turns", 1),
                    )
                )
            else:
                raise ValidationError(
                    "Unknown arc type %r; must be 'line' or 'arc'" % (kind,),
                    attr="arcs",
                    obj=cls,
                )

        anchors = [
            None if data.get(key) is None else TangentialAnchor.from_json(data[key])
            for key in ("start_anchor", "end_anchor")
        ]
        chart = data.get("chart")
        if chart is None:
            charts = {a.chart for a in anchors if a is not None}
            chart = charts.pop() if len(charts) == 1 else "x"

        start = data.get("start")
        return cls(
            arcs,
            start_anchor=anchors[0],
            end_anchor=anchors[1],
            chart=chart,
            start=None if start is None else parse_complex(start),
        )

    @classmethod
    def segment(cls, a, b, chart="x"):
        """Straight path from ``a`` to ``b``."""
        return cls([Line(a, b)], chart=chart)

    @classmethod
    def polyline(cls, points, chart="x"):
        """Straight segments through the given points."""
        points = [complex(p) for p in points]
        if len(points) < 2:
            return cls([], chart=chart, start=points[0])
        return cls([Line(a, b) for a, b in zip(points[:-1], points[1:])], chart=chart)

    @classmethod
    def loop(cls, center, base, orientation="ccw", turns=1, chart="x"):
        """Closed circle around ``center`` starting and ending at ``base``."""
        return cls(
            [CircularArc(base, base, center, orientation=orientation, turns=turns)],
            chart=chart,
        )


def default_route(anchor, target, radius=0.25):
    """
    Standard route from a tangential base point to ``target``.

    The route leaves the puncture along the tangent ray up to ``radius``, turns
    around the puncture in the shorter direction (anticlockwise when the target
    is exactly opposite the tangent) and then runs radially to the target. This
    reaches the principal branch of the closed-form solutions.

    Parameters
    ----------
    anchor : `.TangentialAnchor`
        The base point.
    target : complex
        Endpoint, in the anchor's chart.
    radius : float
        Radius at which the route leaves the tangent ray.

    Returns
    -------
    route : `.PathSpec`
        Path starting on the tangent ray (its ``start_anchor`` is ``anchor``).
    """

    target = complex(target)
    p = anchor.position
    direction = anchor.tangent / abs(anchor.tangent)
    distance = abs(target - p)
    if distance == 0:
        raise PeriodDomainError("Target %r is the puncture itself" % (target,))

    rho = min(radius, distance)
    first = p + rho * direction
    turn = np.angle((target - p) / direction)
    arcs = []
    if abs(turn) > 1e-14:
        second = p + rho * (target - p) / distance
        arcs.append(
            CircularArc(first, second, p, orientation="ccw" if turn > 0 else "cw")
        )
    else:
        second = first
    if abs(target - second) > _GEOMETRY_RTOL * max(1.0, abs(target)):
        arcs.append(Line(second, target))

    route = PathSpec(arcs, start_anchor=anchor, chart=anchor.chart, start=first)
    route.check_punctures()
    logger.debug("Default route from %r to %r: %r", anchor, target, route)
    return route


def straight_route(anchor, target):
    """
    Route along the ray from the puncture through ``target``.

    Only valid when ``target`` lies on the tangent ray of ``anchor`` (as in the
    rescaled-tangent setting where the tangent is ``target`` itself).
    """

    target = complex(target)
    ratio = (target - anchor.position) / anchor.tangent
    if ratio.real <= 0 or abs(ratio.imag) > 1e-12 * abs(ratio):
        raise ValidationError(
            "Target %r is not on the tangent ray of %r" % (target, anchor),
            attr="target",
        )
    return PathSpec([], start_anchor=anchor, chart=anchor.chart, start=target)
