"""
The configuration system is used to change the package-wide defaults
(series radius, tolerances, the normalization of the connection, ...).

Every operation that uses one of these values also accepts it as an explicit
argument; the settings only supply the default when that argument is ``None``.
"""

import numpy as np
from nengo.exceptions import ConfigError, ValidationError
from nengo.params import EnumParam, IntParam, NumberParam, Parameter

#: Normalization constants of the connection, keyed by normalization name.
SCALES = {"paper": 1 / (2j * np.pi), "deligne": 1}


class Settings:
    """
    Container for the package-wide defaults.

    Use `.configure_settings` / `.get_setting` rather than instantiating
    this directly.
    """

    series_radius = NumberParam(
        "series_radius", default=0.9, low=0, high=1, low_open=True, high_open=True
    )
    tolerance = NumberParam("tolerance", default=1e-12, low=1e-14, high=1e-3)
    normalization = EnumParam(
        "normalization", default="paper", values=("paper", "deligne")
    )
    polylog_constant = Parameter("polylog_constant", default=0)
    rank_threshold = NumberParam("rank_threshold", default=1e-10, low=0, low_open=True)
    puncture_distance = NumberParam(
        "puncture_distance", default=1e-6, low=0, low_open=True
    )
    frobenius_order = IntParam("frobenius_order", default=12, low=0)


_settings = Settings()


def configure_settings(**kwargs):
    """
    Change the package-wide default settings.

    The settings are passed as keyword arguments to ``configure_settings``;
    e.g., to use the Deligne normalization everywhere use
    ``configure_settings(normalization="deligne")``.

    Parameters
    ----------
    series_radius : float
        Largest ``|z|`` at which polylogarithms are evaluated by their defining
        power series; beyond it analytic continuation is used (default 0.9).
    tolerance : float
        Default local error tolerance of the path integrator, in
        ``[1e-14, 1e-3]`` (default 1e-12).
    normalization : "paper" or "deligne"
        Scale of the connection form, ``(2 pi i)^-1`` or ``1``
        (default "paper").
    polylog_constant : complex
        Additive constant on the top-order polylogarithm of the period
        matrices (default 0).
    rank_threshold : float
        Residual threshold used by rank and equality tests on floating point
        input (default 1e-10).
    puncture_distance : float
        Minimum distance between a path and a puncture (default 1e-6).
    frobenius_order : int
        Number of terms of the local series used to regularize at a tangential
        base point; 0 disables the local correction (default 12).
    """

    for attr, val in kwargs.items():
        if not isinstance(getattr(Settings, attr, None), Parameter):
            raise ConfigError("%s is not a valid config parameter" % attr)

        if attr == "polylog_constant":
            try:
                val = complex(val)
            except TypeError:
                raise ValidationError(
                    "Must be a complex number (got %r)" % (val,), attr=attr
                )

        setattr(_settings, attr, val)


def get_setting(setting, default=None):
    """
    Returns config settings (created by `.configure_settings`).

    Parameters
    ----------
    setting : str
        Name of the config option to return.
    default
        The default value to return if ``setting`` is not a known option.

    Returns
    -------
    config_val
        Value of ``setting`` if it is a known option, else ``default``.
    """

    if not isinstance(getattr(Settings, setting, None), Parameter):
        return default
    return getattr(_settings, setting)


def reset_settings():
    """Restore every setting to its default value."""

    global _settings  # pylint: disable=global-statement
    _settings = Settings()


def get_scale(normalization=None):
    """
    Normalization constant ``kappa`` of the connection form.

    Parameters
    ----------
    normalization : "paper" or "deligne" or None
        Name of the normalization (defaults to the ``normalization`` setting).

    Returns
    -------
    kappa : complex
        ``(2 pi i)^-1`` for "paper", ``1`` for "deligne".
    """

    if normalization is None:
        normalization = get_setting("normalization")
    try:
        return SCALES[normalization.lower()]
    except (KeyError, AttributeError):
        raise ValidationError(
            "Unknown normalization %r; must be one of %s"
            % (normalization, sorted(SCALES)),
            attr="normalization",
        )
