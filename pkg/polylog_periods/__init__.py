# pylint: disable=wrong-import-order,wrong-import-position,missing-docstring,ungrouped-imports

__license__ = "MIT license; see LICENSE.rst"
from polylog_periods.version import version as __version__

# check python version
import sys

if sys.version_info < (3, 8):
    raise ImportError(
        """
You are running Python version %s with polylog-periods version %s.
polylog-periods requires at least Python 3.8.
"""
        % (sys.version, __version__)
    )
del sys

# import into top-level namespace
from polylog_periods import boundary, hodge_linear, polylog, tate_lie, transport
from polylog_periods.boundary import (
    BoundaryChart,
    ChartPoint,
    NilpotentOrbitClass,
    boundary_limit,
    chart_coordinates,
    chart_membership,
)
from polylog_periods.config import configure_settings, get_setting
from polylog_periods.exceptions import ConvergenceError, PeriodDomainError
from polylog_periods.hodge_linear import (
    FiltrationParams,
    GradedSpace,
    NilpotentGenerator,
    UnipotentMatrix,
)
from polylog_periods.paths import CircularArc, Line, PathSpec, TangentialAnchor
from polylog_periods.polylog import PolylogValue, polylog_vector, zeta_ref
from polylog_periods.tate_lie import (
    LaurentPolyInt,
    SemidirectLieElt,
    TruncatedGroupRingElt,
)
from polylog_periods.transport import (
    ConnectionForm,
    TransportResult,
    closed_form_period,
    monodromy,
    regularized_transport,
)
