"""
Utility objects used throughout the code base.
"""

import csv
from fractions import Fraction
import functools
import io
import json
import logging
import numbers
import sys

import numpy as np
import progressbar

from polylog_periods.exceptions import ConvergenceError

logger = logging.getLogger(__name__)

#: Number of significant digits of floating point values in output records.
SIGNIFICANT_DIGITS = 15


def function_name(func, dashes=False):
    """
    Get the name of the callable object ``func``.

    Parameters
    ----------
    func : callable
        Callable object (e.g., function, callable class)
    dashes : bool
        If True, replace underscores with dashes (the command line spelling)

    Returns
    -------
    name : str
        Name of ``func``
    """

    name = getattr(func, "__name__", func.__class__.__name__)
    if dashes:
        name = name.replace("_", "-")

    return name


def finite_output(func):
    """
    Decorator that ensures the output of ``func`` is finite.

    Raises
    ------
    `.ConvergenceError`
        If the function returns ``None`` or a non-finite value.
    """

    @functools.wraps(func)
    def checked_func(*args, **kwargs):
        output = func(*args, **kwargs)

        if output is None:
            raise ConvergenceError("Function %r returned None" % function_name(func))

        values = output[0] if isinstance(output, tuple) else output
        try:
            finite = np.all(np.isfinite(np.asarray(values, dtype=complex)))
        except (TypeError, ValueError):
            raise ConvergenceError(
                "Function %r returned a value %r of invalid type %r"
                % (function_name(func), values, type(values))
            )
        if not finite:
            raise ConvergenceError(
                "Function %r returned invalid value %r" % (function_name(func), values)
            )

        return output

    return checked_func


def is_exact(value):
    """True if ``value`` is an exact (integer or rational) number."""

    return isinstance(value, (numbers.Rational, np.integer)) and not isinstance(
        value, (bool, np.bool_)
    )


def format_float(value):
    """Round ``value`` to `.SIGNIFICANT_DIGITS` significant digits."""

    value = float(value)
    if not np.isfinite(value):
        return value
    return float("%.*g" % (SIGNIFICANT_DIGITS, value))


def encode_exact(value):
    """Encode an exact rational as a ``"numerator/denominator"`` string."""

    value = Fraction(int(value)) if isinstance(value, np.integer) else Fraction(value)
    return "%d/%d" % (value.numerator, value.denominator)


def encode_matrix(matrix):
    """
    Encode a matrix as nested lists of JSON-compatible entries.

    Exact entries become ``"num/den"`` strings, floating entries become
    ``[re, im]`` pairs rounded to `.SIGNIFICANT_DIGITS` digits.
    """

    matrix = np.asarray(matrix)
    if matrix.dtype == object and all(is_exact(x) for x in matrix.flat):
        return [[encode_exact(x) for x in row] for row in matrix]
    return [[to_jsonable(complex(x)) for x in row] for row in matrix]


def decode_entry(value):
    """Inverse of the entry encoding used by `.encode_matrix`."""

    if isinstance(value, str) and "/" in value and "j" not in value:
        return Fraction(value)
    if isinstance(value, numbers.Integral) and not isinstance(value, bool):
        return int(value)
    return parse_complex(value)


def decode_matrix(data):
    """Inverse of `.encode_matrix`."""

    entries = [[decode_entry(x) for x in row] for row in data]
    if all(is_exact(x) for row in entries for x in row):
        return np.array(entries, dtype=object)
    return np.array([[complex(x) for x in row] for row in entries], dtype=complex)


def parse_complex(value):
    """
    Convert a JSON/command line value to a complex number.

    Accepts numbers, ``[re, im]`` pairs, and strings such as ``"0.5+0.5j"``,
    ``"1/2"`` or ``"-0.4"``.
    """

    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError("Complex pairs must have length 2 (got %r)" % (value,))
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        text = value.strip().replace(" ", "").replace("i", "j")
        if "/" in text and "j" not in text:
            return complex(Fraction(text))
        return complex(text)
    if isinstance(value, numbers.Number):
        return complex(value)
    raise ValueError("Cannot interpret %r as a complex number" % (value,))


def to_jsonable(value):
    """
    Convert ``value`` to plain JSON types.

    Rationals become ``"num/den"`` strings, complex numbers ``[re, im]``,
    floats are rounded to `.SIGNIFICANT_DIGITS` significant digits and arrays
    become (nested) lists.
    """

    if value is None or isinstance(value, (bool, str, np.bool_)):
        return bool(value) if isinstance(value, np.bool_) else value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return encode_exact(value)
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [format_float(value.real), format_float(value.imag)]
    if isinstance(value, np.ndarray):
        if value.ndim == 2:
            return encode_matrix(value)
        return [to_jsonable(x) for x in value.tolist()]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(x) for x in value]
    if hasattr(value, "to_json"):
        return to_jsonable(value.to_json())
    raise TypeError("Cannot serialize %r of type %r" % (value, type(value)))


def flatten_record(record, prefix=""):
    """
    Flatten a nested record into ``{dotted.key: scalar}`` (for CSV output).
    """

    flat = {}
    if isinstance(record, dict):
        for key in sorted(record):
            name = "%s.%s" % (prefix, key) if prefix else str(key)
            flat.update(flatten_record(record[key], name))
    elif isinstance(record, list):
        for i, item in enumerate(record):
            flat.update(flatten_record(item, "%s.%d" % (prefix, i)))
    else:
        flat[prefix] = record
    return flat


def format_record(record, output_format="json"):
    """
    Serialize an output record deterministically.

    Parameters
    ----------
    record : dict
        The record to serialize (any values accepted by `.to_jsonable`).
    output_format : "json" or "csv"
        JSON object with sorted keys, or a CSV header line plus one data line
        of flattened keys.

    Returns
    -------
    text : str
        The serialized record (without trailing newline).
    """

    record = to_jsonable(record)
    if output_format == "json":
        return json.dumps(record, sort_keys=True)

    flat = flatten_record(record)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(flat))
    writer.writerow(list(flat.values()))
    return buf.getvalue().rstrip("\n")


class CountingBar(progressbar.BouncingBar):
    """
    Bar widget labelled with the task name and the number of completed steps.

    The bar bounces while the total number of steps is unknown and fills up
    otherwise.

    Parameters
    ----------
    task : str
        Label drawn in the middle of the bar.
    done_msg : str
        Text shown in place of the bar once the task has finished.
    """

    def __init__(self, task="", done_msg="", **kwargs):
        super().__init__(**kwargs)
        self.task = task
        self.done_msg = done_msg

    def __call__(self, progress, data, width):
        if progress.end_time:
            return self.done_msg

        if progress.max_value is progressbar.UnknownLength:
            line = progressbar.BouncingBar.__call__(self, progress, data, width)
        else:
            line = progressbar.Bar.__call__(self, progress, data, width)

        label = "%s [%d]" % (self.task, data["value"] or 0)
        start = max(0, (width - len(label)) // 2)
        return line[:start] + label + line[start + len(label) :]


class ProgressBar(progressbar.ProgressBar):  # pylint: disable=too-many-ancestors
    """
    Progress display of a verification suite or a long integration.

    Drawn on ``stderr`` so that it never mixes with the output records.

    Parameters
    ----------
    task : str
        Description of the task (e.g., "Verifying monodromy").
    max_value : int or None
        Number of steps, or ``None`` if it is not known in advance.
    """

    def __init__(self, task="", max_value=None, **kwargs):
        self.task = task
        widgets = [CountingBar(task=task, done_msg="%s: done in" % task), " "]
        if max_value is None:
            widgets.append(progressbar.Timer(format="%(elapsed)s"))
            max_value = progressbar.UnknownLength
        else:
            widgets.append(
                progressbar.ETA(format="ETA: %(eta)s", format_finished="%(elapsed)s")
            )

        super().__init__(widgets=widgets, fd=sys.stderr, max_value=max_value, **kwargs)

    def __enter__(self):
        super().__enter__()
        return self.start()

    def step(self):
        """Mark one more step as completed."""

        if self.start_time is None:
            self.start()
        value = self.value + 1
        if self.max_value is not progressbar.UnknownLength:
            value = min(value, self.max_value)
        self.update(value)


class NullProgressBar(progressbar.NullBar):  # pylint: disable=too-many-ancestors
    """Stand-in for `.ProgressBar` that displays nothing."""

    def __init__(self, task="", max_value=None, **kwargs):
        super().__init__(max_value=max_value, **kwargs)

    def step(self):
        pass
