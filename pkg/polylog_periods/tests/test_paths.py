# pylint: disable=missing-docstring

from hypothesis import given, settings, strategies as st
from nengo.exceptions import ValidationError
import numpy as np
import pytest

from polylog_periods import paths
from polylog_periods.exceptions import PeriodDomainError
from polylog_periods.paths import CircularArc, Line, PathSpec, TangentialAnchor


def test_line():
    line = Line(0, 3 + 4j)
    assert line.length == 5
    assert line.point(0.5) == 1.5 + 2j
    assert np.isclose(line.distance_to(5j), 3)
    assert line.reversed().start == 3 + 4j


@pytest.mark.parametrize(
    "start, end, crossings",
    [
        (-1 + 1j, -1 - 1j, [("0", 1)]),
        (-1 - 1j, -1 + 1j, [("0", -1)]),
        (2 - 1j, 2 + 1j, [("1", 1)]),
        (2 + 1j, 2 - 1j, [("1", -1)]),
        (0.5 + 1j, 0.5 - 1j, []),
        (-1, -1 - 1j, [("0", 1)]),
        (-1 - 1j, -1, [("0", -1)]),
        (-2, -1, []),
    ],
)
def test_line_crossings(start, end, crossings):
    # points on the axis count as the upper side of the cut
    assert Line(start, end).cut_crossings() == crossings


def test_arc_validation():
    with pytest.raises(ValidationError, match="different distances"):
        CircularArc(1, 2j, 0)
    with pytest.raises(ValidationError, match="zero radius"):
        CircularArc(0, 0, 0)
    with pytest.raises(ValidationError, match="Orientation"):
        CircularArc(1, 1j, 0, orientation="up")
    with pytest.raises(ValidationError, match="at least 1"):
        CircularArc(1, 1, 0, turns=0)


def test_arc_geometry():
    half = CircularArc(1, -1, 0)
    assert np.isclose(half.sweep, np.pi)
    assert np.isclose(half.length, np.pi)
    assert np.isclose(half.point(0.5), 1j)
    assert np.isclose(half.distance_to(0), 1)
    assert np.isclose(half.distance_to(-2j), np.sqrt(5))

    clockwise = CircularArc(1, -1, 0, orientation="cw")
    assert np.isclose(clockwise.point(0.5), -1j)
    # arriving on the axis from below moves onto the upper side
    assert clockwise.cut_crossings() == [("0", -1)]

    full = CircularArc(1, 1, 0, turns=2)
    assert np.isclose(full.sweep, 4 * np.pi)


@pytest.mark.parametrize(
    "center, orientation, turns, winding",
    [
        (0, "ccw", 1, (1, 0)),
        (0, "cw", 1, (-1, 0)),
        (1, "ccw", 1, (0, 1)),
        (1, "cw", 1, (0, -1)),
        (0, "ccw", 3, (3, 0)),
    ],
)
def test_loop_winding(center, orientation, turns, winding):
    loop = PathSpec.loop(center, 0.5, orientation=orientation, turns=turns)
    assert loop.winding() == winding
    assert loop.reversed().winding() == (-winding[0], -winding[1])
    assert loop.start == loop.end == 0.5


@settings(deadline=None)
@given(
    radius=st.floats(min_value=0.1, max_value=0.9),
    angle=st.floats(min_value=-3.0, max_value=3.0),
)
def test_loop_winding_any_base(radius, angle):
    base = radius * np.exp(1j * angle)
    assert PathSpec.loop(0, base).winding() == (1, 0)
    assert PathSpec.loop(1, 1 - base).winding() == (0, 1)


def test_path_concatenation():
    a = PathSpec.segment(0.5, 0.5 + 1j)
    b = PathSpec.polyline([0.5 + 1j, -1 + 1j, -1 - 1j])
    path = a + b

    assert len(path.arcs) == 3
    assert path.start == 0.5
    assert path.end == -1 - 1j
    assert path.winding() == (1, 0)
    assert np.isclose(path.length, 1 + 1.5 + 2)

    with pytest.raises(ValidationError, match="different charts"):
        _ = a + PathSpec.segment(0.5, 1j, chart="xi")

    with pytest.raises(ValidationError, match="starts at"):
        PathSpec([Line(0.5, 1j), Line(2j, 3j)])


def test_check_punctures():
    PathSpec.segment(0.5, 0.5 + 1j).check_punctures()

    with pytest.raises(PeriodDomainError, match="puncture at 0"):
        PathSpec.segment(-1, 0.5).check_punctures()
    with pytest.raises(PeriodDomainError, match="puncture at 1"):
        PathSpec.loop(0, 1).check_punctures()

    # a tangential start may begin on the puncture itself
    PathSpec.segment(0, 0.5).check_punctures(exempt_start=True)

    with pytest.raises(PeriodDomainError, match="lies on the puncture"):
        PathSpec([], start=1).check_punctures()


def test_tangential_anchor():
    anchor = TangentialAnchor("1", 0.5)
    assert anchor.chart == "x"
    assert anchor.position == 1
    assert anchor.local_tangent == -0.5
    assert anchor.local_parameter(0.75) == 0.25
    assert np.isclose(anchor.point(0.1), 1.05)

    assert TangentialAnchor("inf").chart == "xi"
    assert TangentialAnchor.from_json(anchor.to_json()).tangent == 0.5

    with pytest.raises(ValidationError):
        TangentialAnchor("2")
    with pytest.raises(ValidationError, match="nonzero"):
        TangentialAnchor("0", 0)

    with pytest.raises(ValidationError, match="does not lie"):
        PathSpec([], start_anchor=TangentialAnchor("inf"), start=0.5)


def test_path_json():
    data = {
        "start_anchor": {"puncture": "0", "tangent": 1},
        "arcs": [
            {"type": "line", "from": 0.25, "to": "0.5"},
            {"type": "arc", "from": 0.5, "to": [-0.5, 0], "center": 0},
        ],
    }
    path = PathSpec.from_json(data)
    assert path.chart == "x"
    assert path.start_anchor.puncture == "0"
    assert isinstance(path.arcs[1], CircularArc)
    assert path.end == -0.5

    again = PathSpec.from_json(path.to_json())
    assert again.to_json() == path.to_json()

    # a bare list of arcs is accepted too
    assert len(PathSpec.from_json(data["arcs"]).arcs) == 2

    with pytest.raises(ValidationError, match="Unknown arc type"):
        PathSpec.from_json([{"type": "spline", "from": 0, "to": 1}])
    with pytest.raises(ValidationError, match="center"):
        PathSpec.from_json([{"type": "arc", "from": 0.5, "to": -0.5}])

    # the chart follows the anchors when not given
    path = PathSpec.from_json({"start_anchor": {"puncture": "inf"}, "start": 0.5})
    assert path.chart == "xi"


@pytest.mark.parametrize("target", [0.5, -0.5, 0.3j, -0.1 - 0.4j, 0.5 + 0.5j])
def test_default_route(target):
    anchor = TangentialAnchor("0", 1.0)
    route = paths.default_route(anchor, target)

    assert route.start_anchor is anchor
    assert np.isclose(route.start, min(0.25, abs(target)))
    assert np.isclose(route.end, target)
    # the principal branch is reached without crossing any cut
    assert route.winding() == (0, 0)


def test_default_route_at_one():
    anchor = TangentialAnchor("1", -1.0)
    route = paths.default_route(anchor, 0.5)
    assert np.isclose(route.start, 0.75)
    assert np.isclose(route.end, 0.5)

    with pytest.raises(PeriodDomainError, match="puncture itself"):
        paths.default_route(anchor, 1)


def test_straight_route():
    route = paths.straight_route(TangentialAnchor("0", 0.5j), 0.2j)
    assert route.arcs == []
    assert route.start == route.end == 0.2j

    with pytest.raises(ValidationError, match="tangent ray"):
        paths.straight_route(TangentialAnchor("0", 1.0), -0.5)
