"""Per-count leakage cap for N-photon trains: a concave maximization on a simplex.

The bound is the maximum, over nonnegative weights ``x_1..x_{N+1}`` summing
to one, of

    sum_{k=1}^{N} mixing_entropy((L-k) x_k, k x_{k+1}) / (L - 1)

The objective is concave (a sum of jointly concave kernels composed with
linear maps), so any stationary point certified on the simplex is the global
maximum. The production solver is projected-gradient ascent with a
backtracking line search and multiple deterministic starts; an enumerated
grid search over the same simplex serves as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .entropy import _LN2, _xlogx

#: zero-weight components get their boundary derivative capped at this value
#: (the true one-sided derivative is +inf; any finite surrogate preserves ascent)
_TINY = 1e-300

#: convergence certificate: tangent-cone projected-gradient 2-norm below this
GRADIENT_TOL = 1e-10

_MAX_ITER_PER_START = 5000


class GridTooLargeError(RuntimeError):
    """Grid enumeration would exceed the configured point budget."""


@dataclass(frozen=True)
class LeakageResult:
    """Certified maximum of the leakage objective.

    value is in bits per sifted count, weights is the maximizing simplex
    point, iterations counts gradient steps summed over all starts.
    """

    value: float
    weights: np.ndarray
    iterations: int
    gradient_norm: float


def _validate_domain(n_photons: int, train_len: int) -> None:
    if train_len < 2:
        raise ValueError(f"train length must be >= 2, got {train_len}")
    if not 1 <= n_photons <= train_len // 2:
        raise ValueError(
            f"photon number {n_photons} outside [1, {train_len // 2}] for L={train_len}"
        )


def objective_batch(x: np.ndarray, n_photons: int, train_len: int) -> np.ndarray:
    """Leakage objective (bits) for a batch of simplex points, shape (m, N+1)."""
    x = np.asarray(x, dtype=float)
    k = np.arange(1, n_photons + 1)
    a = (train_len - k) * x[..., :-1]
    b = k * x[..., 1:]
    val = _xlogx(a + b) - _xlogx(a) - _xlogx(b)
    return val.sum(axis=-1) / ((train_len - 1) * _LN2)


def _value_and_grad(x: np.ndarray, n_photons: int, train_len: int):
    """Objective value and gradient in bits; boundary derivatives capped finite."""
    L = train_len
    k = np.arange(1, n_photons + 1)
    a = (L - k) * x[:-1]
    b = k * x[1:]
    s = a + b
    val = (_xlogx(s) - _xlogx(a) - _xlogx(b)).sum() / ((L - 1) * _LN2)

    # d/da = ln(s/a), d/db = ln(s/b); both 0 when the whole term vanishes
    with np.errstate(divide="ignore", invalid="ignore"):
        da = np.where(s > 0.0, np.log(s / np.maximum(a, _TINY)), 0.0)
        db = np.where(s > 0.0, np.log(s / np.maximum(b, _TINY)), 0.0)
    g = np.zeros_like(x)
    g[:-1] += (L - k) * da
    g[1:] += k * db
    return val, g / ((L - 1) * _LN2)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    cond = u - css / idx > 0.0
    rho = idx[cond][-1]
    tau = css[rho - 1] / rho
    return np.maximum(v - tau, 0.0)


def _stationarity_residual(x: np.ndarray, g: np.ndarray) -> float:
    """2-norm of the gradient projected onto the simplex tangent cone at x.

    Interior coordinates must share a common multiplier; coordinates pinned
    at zero may only push inward.
    """
    support = x > 1e-15
    if not support.any():
        return float(np.linalg.norm(g))
    lam = g[support].mean()
    res = np.where(support, g - lam, np.maximum(g - lam, 0.0))
    return float(np.linalg.norm(res))


def _ascend(x0: np.ndarray, n_photons: int, train_len: int):
    """Projected-gradient ascent from one start; returns (value, x, iters, resid)."""
    x = project_simplex(np.asarray(x0, dtype=float))
    f, g = _value_and_grad(x, n_photons, train_len)
    step = 1.0
    x_prev = None
    g_prev = None
    for it in range(1, _MAX_ITER_PER_START + 1):
        resid = _stationarity_residual(x, g)
        if resid < GRADIENT_TOL:
            return f, x, it - 1, resid
        # Barzilai-Borwein initial step, falling back to the previous scale
        if x_prev is not None:
            dx = x - x_prev
            dg = g - g_prev
            denom = -float(dx @ dg)  # concave: curvature along dx is negative
            if denom > 0.0:
                step = float(dx @ dx) / denom
            step = min(max(step, 1e-12), 1e12)
        # backtracking Armijo line search along the projection arc
        accepted = False
        t = step
        for _ in range(80):
            x_new = project_simplex(x + t * g)
            f_new, g_new = _value_and_grad(x_new, n_photons, train_len)
            gain = f_new - f
            lin = float(g @ (x_new - x))
            if gain >= 1e-4 * lin or np.linalg.norm(x_new - x) == 0.0:
                accepted = True
                break
            t *= 0.5
        if not accepted or np.array_equal(x_new, x):
            # stalled: either at a stationary point or at numerical resolution
            resid = _stationarity_residual(x, g)
            return f, x, it, resid
        x_prev, g_prev = x, g
        x, f, g = x_new, f_new, g_new
    return f, x, _MAX_ITER_PER_START, _stationarity_residual(x, g)


def _starts(n_photons: int) -> list[np.ndarray]:
    dim = n_photons + 1
    uniform = np.full(dim, 1.0 / dim)
    starts = [uniform]
    for i in range(dim):
        biased = np.full(dim, 0.1 / dim)
        biased[i] += 0.9
        starts.append(biased)
    return starts


def max_leakage(n_photons: int, train_len: int) -> LeakageResult:
    """Maximize the leakage objective over the simplex, certified stationary.

    Runs every deterministic start to convergence and reduces by value
    (ties broken toward the lexicographically largest weight vector). Raises
    if no start reaches the gradient certificate.
    """
    _validate_domain(n_photons, train_len)
    best = None
    total_iters = 0
    for x0 in _starts(n_photons):
        f, x, iters, resid = _ascend(x0, n_photons, train_len)
        total_iters += iters
        if resid >= GRADIENT_TOL:
            continue
        key = (f, tuple(x))
        if best is None or key > best[0]:
            best = (key, x, resid)
    if best is None:
        raise RuntimeError(
            f"leakage maximization failed to certify stationarity for "
            f"N={n_photons}, L={train_len}"
        )
    (f, _), x, resid = best
    return LeakageResult(value=f, weights=x, iterations=total_iters, gradient_norm=resid)


@lru_cache(maxsize=None)
def max_leakage_value(n_photons: int, train_len: int) -> float:
    """Memoized leakage bound; the cache is shared across scans and sweeps."""
    return max_leakage(n_photons, train_len).value


def _compositions(total: int, parts: int):
    """Yield integer compositions of `total` into `parts` parts as arrays,
    chunked along the first coordinate to bound memory."""
    if parts == 1:
        yield np.array([[total]])
        return
    for first in range(total + 1):
        rest_chunks = _compositions(total - first, parts - 1)
        for rest in rest_chunks:
            block = np.empty((rest.shape[0], parts), dtype=np.int64)
            block[:, 0] = first
            block[:, 1:] = rest
            yield block


def _compositions_vectorized(total: int, parts: int):
    """Composition enumeration specialized for parts <= 4 (N <= 3)."""
    if parts == 1:
        yield np.array([[total]], dtype=np.int64)
    elif parts == 2:
        i = np.arange(total + 1, dtype=np.int64)
        yield np.stack([i, total - i], axis=1)
    elif parts == 3:
        for i in range(total + 1):
            j = np.arange(total - i + 1, dtype=np.int64)
            out = np.empty((j.size, 3), dtype=np.int64)
            out[:, 0] = i
            out[:, 1] = j
            out[:, 2] = total - i - j
            yield out
    elif parts == 4:
        for i in range(total + 1):
            for j in range(total - i + 1):
                kk = np.arange(total - i - j + 1, dtype=np.int64)
                out = np.empty((kk.size, 4), dtype=np.int64)
                out[:, 0] = i
                out[:, 1] = j
                out[:, 2] = kk
                out[:, 3] = total - i - j - kk
                yield out
    else:
        yield from _compositions(total, parts)


def max_leakage_grid(
    n_photons: int,
    train_len: int,
    step: float,
    max_points: float = 5e8,
) -> float:
    """Brute-force lower bound: objective maximum over a simplex lattice.

    The lattice has spacing ``step`` (weights are multiples of it), so the
    result can only undershoot the true maximum. Independent of the
    gradient solver by construction.
    """
    _validate_domain(n_photons, train_len)
    if not 0.0 < step <= 1.0:
        raise ValueError(f"grid step must be in (0, 1], got {step}")
    total = int(round(1.0 / step))
    n_points = comb(total + n_photons, n_photons)
    if n_points > max_points:
        raise GridTooLargeError(
            f"simplex grid has {n_points} points, budget is {max_points:.0f}"
        )
    best = 0.0
    for block in _compositions_vectorized(total, n_photons + 1):
        vals = objective_batch(block.astype(float) / total, n_photons, train_len)
        m = float(vals.max())
        if m > best:
            best = m
    return best
