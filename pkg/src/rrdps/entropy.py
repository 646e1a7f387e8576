"""Entropy primitives shared by the leakage bound and the key-rate formulas.

Everything is evaluated with natural logarithms internally and scaled to
bits at the end, so all callers see a uniform precision floor. The
``0 * log(0) = 0`` convention is applied exactly (returns 0.0, never NaN),
which keeps simplex-boundary evaluations finite.
"""

from __future__ import annotations

import numpy as np

_LN2 = np.log(2.0)


def _xlogx(v: np.ndarray) -> np.ndarray:
    """x*ln(x) with the 0*ln(0)=0 convention, elementwise."""
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    nz = v > 0.0
    out[nz] = v[nz] * np.log(v[nz])
    return out


def binary_entropy(x):
    """Shannon entropy of a bit with bias ``x``, in bits.

    Accepts scalars or arrays. ``x`` must lie in [0, 1]; the endpoints
    return exactly 0.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"binary_entropy argument outside [0, 1]: {x}")
    h = -(_xlogx(arr) + _xlogx(1.0 - arr)) / _LN2
    if np.ndim(x) == 0:
        return float(h)
    return h


def mixing_entropy(x, y):
    """Entropy gained by merging two distinguishable weights, in bits.

    For nonnegative weights ``x`` and ``y`` this is
    ``(x + y) * binary_entropy(x / (x + y))``; it vanishes whenever either
    argument is zero and is jointly concave in ``(x, y)``. Accepts scalars
    or broadcastable arrays.
    """
    ax = np.asarray(x, dtype=float)
    ay = np.asarray(y, dtype=float)
    if np.any(ax < 0.0) or np.any(ay < 0.0):
        raise ValueError(f"mixing_entropy arguments must be nonnegative: {x}, {y}")
    ax, ay = np.broadcast_arrays(ax, ay)
    v = (_xlogx(ax + ay) - _xlogx(ax) - _xlogx(ay)) / _LN2
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        return float(v)
    return v
