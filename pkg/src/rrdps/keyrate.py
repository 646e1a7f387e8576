"""Secure key-rate formulas built on the leakage bounds.

Counts split into odd and even photon-number classes with fractions alpha
and 1 - alpha of the untagged counts. Error correction referenced to
Alice's string survives odd counts (leakage capped by the simplex bound);
error correction referenced to Bob's string survives even counts (those
leak nothing about the detector identity). The final rate is a max over
the split fraction gamma of a min over the adversarially chosen alpha,
constrained from below by the observed error rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .channel import ProtocolParams, RateObservables
from .entropy import binary_entropy


class TaggedDominatedError(ValueError):
    """All observed counts may originate from tagged emissions: no rate."""


@dataclass(frozen=True)
class KeyRateReport:
    """Key rate per train (LR) and per pulse (R = LR / L) with diagnostics."""

    LR: float
    R: float
    gamma_opt: float
    alpha_used: float
    alpha_min: float
    iae_bound: float
    ibe_bound: float
    R1: float
    R2: float
    flags: tuple[str, ...] = field(default=())


def alpha_min(Q: float, E: float, e_src: float) -> float:
    """Least odd-count fraction consistent with error rate E, clamped to [0, 1].

    Even counts carry bit error 1/2, so their weight cannot exceed 2EQ.
    """
    if Q - e_src <= 0.0:
        raise TaggedDominatedError(
            f"counting rate {Q} does not exceed tagged weight {e_src}"
        )
    return min(max(1.0 - 2.0 * E * Q / (Q - e_src), 0.0), 1.0)


def leakage_bounds(
    Q: float, E: float, e_src: float, phi_val: float, alpha: float
) -> tuple[float, float]:
    """Per-train upper bounds on (Alice-Eve, Bob-Eve) leakage at odd fraction alpha."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"odd-count fraction must be in [0, 1], got {alpha}")
    untagged = Q - e_src
    beta = 1.0 - alpha
    iae = alpha * untagged * phi_val + beta * untagged + e_src
    ibe = alpha * untagged + e_src
    return iae, ibe


def _cost(obs: RateObservables, f: float) -> float:
    return f * obs.Q * binary_entropy(obs.E)


def keyrate_maxmin(
    obs: RateObservables, pp: ProtocolParams, f: float, phi_val: float
) -> KeyRateReport:
    """Exact max-min key rate per train.

    For fixed gamma the objective is convex piecewise-affine in alpha, so
    the inner minimum is attained at an interval endpoint or at a kink where
    one clamped branch crosses zero; those candidates do not depend on
    gamma. The outer concave maximization over gamma runs a ternary search
    refined against the exact endpoints gamma = 1 and gamma = 0.
    """
    untagged = obs.Q - obs.e_src
    if untagged <= 0.0:
        raise TaggedDominatedError(
            f"counting rate {obs.Q} does not exceed tagged weight {obs.e_src}"
        )
    a_min = alpha_min(obs.Q, obs.E, obs.e_src)
    cost = _cost(obs, f)

    def r1(a: float) -> float:
        return a * untagged * (1.0 - phi_val) - cost

    def r2(a: float) -> float:
        return (1.0 - a) * untagged - cost

    candidates = {a_min, 1.0}
    slope1 = untagged * (1.0 - phi_val)
    if slope1 > 0.0:
        kink = cost / slope1  # r1 crosses zero
        if a_min < kink < 1.0:
            candidates.add(kink)
    if untagged > 0.0:
        kink = 1.0 - cost / untagged  # r2 crosses zero
        if a_min < kink < 1.0:
            candidates.add(kink)
    alphas = sorted(candidates)

    def inner(gamma: float) -> tuple[float, float]:
        best_v, best_a = None, None
        for a in alphas:
            v = gamma * max(r1(a), 0.0) + (1.0 - gamma) * max(r2(a), 0.0)
            if best_v is None or v < best_v:
                best_v, best_a = v, a
        return best_v, best_a

    lo, hi = 0.0, 1.0
    for _ in range(200):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if inner(m1)[0] < inner(m2)[0]:
            lo = m1
        else:
            hi = m2
    # snap to the exact endpoints; ties prefer gamma = 1 (the generic optimum)
    gamma_opt, (LR, alpha_used) = 1.0, inner(1.0)
    for g in (0.0, 0.5 * (lo + hi)):
        v, a = inner(g)
        if v > LR:
            gamma_opt, LR, alpha_used = g, v, a

    flags = []
    if LR <= 0.0:
        LR = 0.0
        flags.append("no-positive-rate")
    iae, ibe = leakage_bounds(obs.Q, obs.E, obs.e_src, phi_val, alpha_used)
    return KeyRateReport(
        LR=LR,
        R=LR / pp.L,
        gamma_opt=gamma_opt,
        alpha_used=alpha_used,
        alpha_min=a_min,
        iae_bound=iae,
        ibe_bound=ibe,
        R1=r1(alpha_used),
        R2=r2(alpha_used),
        flags=tuple(flags),
    )


def keyrate_simplified(
    obs: RateObservables, pp: ProtocolParams, f: float, phi_val: float
) -> float:
    """Closed-form key rate per train, clamped at zero.

    Algebraically identical to the max-min solution at gamma = 1 and the
    minimal admissible alpha.
    """
    LR = ((1.0 - 2.0 * obs.E) * obs.Q - obs.e_src) * (1.0 - phi_val) - _cost(obs, f)
    return max(LR, 0.0)


def keyrate_pnr(
    obs_pnr: RateObservables, pp: ProtocolParams, f: float, phi_val: float
) -> float:
    """Number-resolving-detector baseline rate per train, clamped at zero."""
    LR = (obs_pnr.Q - obs_pnr.e_src) * (1.0 - phi_val) - _cost(obs_pnr, f)
    return max(LR, 0.0)
