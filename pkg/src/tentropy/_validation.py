"""Small input-coercion helpers shared by every module."""

import math

import numpy as np

NEG_INF = float("-inf")


def as_vector(x, size=None, name="array"):
    """Return ``x`` as a 1-d float64 array, optionally checking its length."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if size is not None and arr.shape[0] != size:
        raise ValueError(f"{name} has length {arr.shape[0]}, expected {size}")
    return arr


def as_finite_vector(x, size=None, name="array"):
    arr = as_vector(x, size, name)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def frozen(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def safe_log(x):
    """Elementwise natural log with ``ln 0 = -inf`` and no warnings."""
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return np.log(x)


def xlog_ratio(c, num, den):
    """Sum of ``c * ln(num / den)`` under the t-entropy conventions.

    A summand with ``c == 0`` is zero whatever ``num`` is; a summand with
    ``c > 0`` and ``num == 0`` makes the total ``-inf``.
    """
    c = np.asarray(c, dtype=np.float64)
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    live = c > 0
    if not np.any(live):
        return 0.0
    if np.any(num[live] <= 0):
        return NEG_INF
    return float(np.sum(c[live] * np.log(num[live] / den[live])))


def ext_mean(values):
    """Mean of extended reals: any ``-inf`` makes the mean ``-inf``."""
    values = np.asarray(values, dtype=np.float64)
    if np.any(values == NEG_INF):
        return NEG_INF
    return float(np.mean(values))


def ext_sub(a, b):
    """``a - b`` where ``-inf - -inf`` counts as 0 (equal extended values)."""
    if a == NEG_INF and b == NEG_INF:
        return 0.0
    return a - b


def ext_close(a, b, tol):
    if a == NEG_INF or b == NEG_INF:
        return a == b
    return abs(a - b) <= tol


def format_ext(x):
    """JSON-friendly extended real: ``-inf`` becomes the string ``"-inf"``."""
    if x is None:
        return None
    x = float(x)
    if x == NEG_INF:
        return "-inf"
    if x == math.inf:
        return "inf"
    if math.isnan(x):
        return "nan"
    return x


def jsonable(obj):
    """Recursively replace non-finite floats by their string spelling."""
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return format_ext(obj)
    return obj
