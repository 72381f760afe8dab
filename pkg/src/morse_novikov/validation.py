"""Argument checks shared by the estimators and the command line."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import UsageError


def check_positive_int(value, name, minimum=1, maximum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise UsageError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise UsageError(f"{name} must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise UsageError(f"{name} must be <= {maximum}, got {value}")
    return value


def check_tolerance(value, name="tol"):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise UsageError(f"{name} must be a number, got {value!r}") from None
    if not np.isfinite(value) or value <= 0:
        raise UsageError(f"{name} must be positive and finite, got {value}")
    return value


def check_mode(mode):
    if mode not in ("symbolic", "specialized"):
        raise UsageError(f"mode must be 'symbolic' or 'specialized', got {mode!r}")
    return mode


def check_primes(primes):
    out = []
    for p in primes:
        p = check_positive_int(p, "prime", minimum=2)
        if any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise UsageError(f"{p} is not prime")
        out.append(p)
    return tuple(out)


def check_t_range(t_range):
    try:
        lo, hi = (float(v) for v in t_range)
    except (TypeError, ValueError):
        raise UsageError(f"t-range must be two numbers, got {t_range!r}") from None
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
        raise UsageError(f"t-range needs lo < hi, got ({lo}, {hi})")
    return lo, hi


def check_points(X, n):
    """Coerce ``X`` into an ``(m, n)`` float array of base points."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1) if n > 1 or X.size == 1 else X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[1] != n:
        raise UsageError(f"expected points of dimension {n}, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise UsageError("points must be finite")
    return X
