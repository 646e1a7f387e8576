"""Analytic detection statistics for the interferometric train measurement.

The observables are per-train quantities, averaged over the uniformly random
interferometer delay r in [1, L-1]. For a delay r the overlap window holds
L - r slot pairs; each pair has a constructive-port cell (mean photon number
eta*mu/L plus darks) and a destructive-port cell (darks only). A count is a
train in which exactly one of the 2(L-r) cells clicked.

``gain_*`` is the total count probability, including single dark clicks on
either port. ``dark_error_*`` is the probability that the single click was a
dark on the destructive port, i.e. a wrong-detector count; by symmetry the
constructive port collects dark-only clicks at the same rate, so a fraction
2T/Q of counts is dark-caused.

Per-term factors are combined in log space so long trains at long distance
do not underflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .source import tagged_fraction

#: validation caps; beyond these the study's linear models are not trusted
MAX_TRAIN_LEN = 1024
MAX_MEAN_PHOTONS = 50.0


@dataclass(frozen=True)
class ChannelParams:
    """Detector and fiber constants plus the link length.

    eta_d: detector efficiency; p_d: dark-count probability per detector per
    gate; f: error-correction inefficiency; e_0: error rate of a vacuum
    (dark) count; alpha_f: fiber loss in dB/km; E_d: misalignment flip
    probability; distance_km: Alice-Bob fiber length.
    """

    eta_d: float = 0.4
    p_d: float = 1.0e-7
    f: float = 1.15
    e_0: float = 0.5
    alpha_f: float = 0.2
    E_d: float = 0.015
    distance_km: float = 100.0

    def __post_init__(self):
        for name in ("eta_d", "p_d", "e_0", "E_d"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.f < 1.0:
            raise ValueError(f"error-correction inefficiency must be >= 1, got {self.f}")
        if self.alpha_f < 0.0:
            raise ValueError(f"fiber loss must be >= 0, got {self.alpha_f}")
        if self.distance_km < 0.0:
            raise ValueError(f"distance must be >= 0, got {self.distance_km}")


@dataclass(frozen=True)
class ProtocolParams:
    """Train length L, mean photon number mu per train, tagging threshold n_th."""

    L: int
    mu: float
    n_th: int

    def __post_init__(self):
        if not 2 <= self.L <= MAX_TRAIN_LEN:
            raise ValueError(f"train length must be in [2, {MAX_TRAIN_LEN}], got {self.L}")
        # mu == 0 is admitted as the degenerate vacuum source (dark counts only)
        if not 0.0 <= self.mu <= MAX_MEAN_PHOTONS:
            raise ValueError(
                f"mean photon number must be in [0, {MAX_MEAN_PHOTONS}], got {self.mu}"
            )
        if not 1 <= self.n_th <= self.L // 2:
            raise ValueError(
                f"tagging threshold must be in [1, {self.L // 2}] for L={self.L}, "
                f"got {self.n_th}"
            )


@dataclass(frozen=True)
class RateObservables:
    """Counting rate Q, bit error rate E, and tagged-emission weight e_src."""

    Q: float
    E: float
    e_src: float

    def __post_init__(self):
        if not 0.0 <= self.Q <= 1.0:
            raise ValueError(f"counting rate must be in [0, 1], got {self.Q}")
        if not 0.0 <= self.E <= 1.0:
            raise ValueError(f"error rate must be in [0, 1], got {self.E}")
        if not 0.0 <= self.e_src <= 1.0:
            raise ValueError(f"tagged fraction must be in [0, 1], got {self.e_src}")


def transmittance(cp: ChannelParams) -> float:
    """Overall detection efficiency: detector times fiber transmission."""
    return cp.eta_d * 10.0 ** (-cp.alpha_f * cp.distance_km / 10.0)


def _delay_weights(L: int):
    r = np.arange(1, L)
    return r, (L - r) / (L - 1)


def gain_yesno(pp: ProtocolParams, eta: float, p_d: float):
    """Count probability per train for threshold detectors.

    Accepts a scalar or an array ``mu`` inside ``pp``-like usage via
    :func:`gain_yesno_mu`; this wrapper fixes mu from ``pp``.
    """
    return gain_yesno_mu(pp.L, pp.mu, eta, p_d)


def gain_yesno_mu(L: int, mu, eta: float, p_d: float):
    r, w = _delay_weights(L)
    mu = np.asarray(mu, dtype=float)
    x = eta * mu / L  # mean photons per constructive cell
    log_quiet = np.log1p(-p_d)
    # silent remainder: 2(L-r)-1 cells dark-free, L-r-1 constructive cells photon-free
    log_rest = (2 * L - 2 * r - 1)[:, None] * log_quiet - (L - r - 1)[:, None] * x[None, :]
    # the clicking pair: constructive cell clicks (light or dark), or the
    # destructive cell darks while the constructive one stays silent
    bracket = -np.expm1(log_quiet - x) + p_d * np.exp(-x)
    total = (w[:, None] * np.exp(log_rest) * bracket[None, :]).sum(axis=0)
    return float(total) if mu.ndim == 0 else total


def dark_error_yesno(pp: ProtocolParams, eta: float, p_d: float):
    """Wrong-detector dark-count probability per train (threshold detectors)."""
    return dark_error_yesno_mu(pp.L, pp.mu, eta, p_d)


def dark_error_yesno_mu(L: int, mu, eta: float, p_d: float):
    r, w = _delay_weights(L)
    mu = np.asarray(mu, dtype=float)
    x = eta * mu / L
    log_quiet = np.log1p(-p_d)
    log_terms = (2 * L - 2 * r - 1)[:, None] * log_quiet - (L - r)[:, None] * x[None, :]
    total = p_d * (w[:, None] * np.exp(log_terms)).sum(axis=0)
    return float(total) if mu.ndim == 0 else total


def gain_pnr(pp: ProtocolParams, eta: float, p_d: float):
    """Count probability per train for number-resolving detectors."""
    return gain_pnr_mu(pp.L, pp.mu, eta, p_d)


def gain_pnr_mu(L: int, mu, eta: float, p_d: float):
    r, w = _delay_weights(L)
    mu = np.asarray(mu, dtype=float)
    x = eta * mu / L
    log_quiet = np.log1p(-p_d)
    log_rest = (2 * L - 2 * r - 1)[:, None] * log_quiet - (L - r)[:, None] * x[None, :]
    total = (w[:, None] * np.exp(log_rest)).sum(axis=0) * (x + 2 * p_d)
    return float(total) if mu.ndim == 0 else total


def dark_error_pnr(pp: ProtocolParams, eta: float, p_d: float):
    return dark_error_pnr_mu(pp.L, pp.mu, eta, p_d)


def dark_error_pnr_mu(L: int, mu, eta: float, p_d: float):
    r, w = _delay_weights(L)
    mu = np.asarray(mu, dtype=float)
    x = eta * mu / L
    log_quiet = np.log1p(-p_d)
    log_rest = (2 * L - 2 * r - 1)[:, None] * log_quiet - (L - r)[:, None] * x[None, :]
    total = p_d * (w[:, None] * np.exp(log_rest)).sum(axis=0)
    return float(total) if mu.ndim == 0 else total


def error_rate(Q, T, E_d: float, e_0: float):
    """Bit error rate: dark-caused counts err at e_0, the rest at E_d.

    The 2T dark-caused counts split evenly between right and wrong port, so
    with e_0 = 1/2 this reduces to E = T/Q at E_d = 0.
    """
    Qa = np.asarray(Q, dtype=float)
    Ta = np.asarray(T, dtype=float)
    if np.any(Qa <= 0.0):
        raise ValueError("error rate undefined at zero counting rate")
    if np.any(2.0 * Ta > Qa * (1.0 + 1e-12)):
        raise ValueError("dark-error rate exceeds half the counting rate")
    e = (e_0 * 2.0 * Ta + E_d * (Qa - 2.0 * Ta)) / Qa
    return float(e) if np.ndim(Q) == 0 and np.ndim(T) == 0 else e


def observables(cp: ChannelParams, pp: ProtocolParams, detector: str = "yesno") -> RateObservables:
    """Analytic (Q, E, e_src) for the given detector model."""
    eta = transmittance(cp)
    if detector == "yesno":
        Q = gain_yesno(pp, eta, cp.p_d)
        T = dark_error_yesno(pp, eta, cp.p_d)
    elif detector == "pnr":
        Q = gain_pnr(pp, eta, cp.p_d)
        T = dark_error_pnr(pp, eta, cp.p_d)
    else:
        raise ValueError(f"unknown detector model: {detector!r}")
    E = error_rate(Q, T, cp.E_d, cp.e_0) if Q > 0.0 else 0.0
    return RateObservables(Q=Q, E=E, e_src=tagged_fraction(pp.mu, pp.n_th))
