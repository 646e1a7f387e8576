"""Photon-number statistics of the phase-randomized weak coherent source.

A train of total intensity ``mu`` carries ``k`` photons with Poisson
probability; emissions above the tagging threshold are conceded entirely
to the adversary through the tail probability ``tagged_fraction``.
"""

from __future__ import annotations

import math

from scipy.special import gammainc


def poisson_pmf(k: int, mu: float) -> float:
    """P[train carries exactly k photons] for mean photon number mu.

    Evaluated in log space so large k / large mu stay finite.
    """
    if k < 0:
        raise ValueError(f"photon number must be >= 0, got {k}")
    if mu < 0:
        raise ValueError(f"mean photon number must be >= 0, got {mu}")
    if mu == 0.0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(mu) - mu - math.lgamma(k + 1))


def tagged_fraction(mu: float, n_th: int) -> float:
    """P[train carries more than n_th photons] (the tagged-emission weight).

    Computed through the regularized lower incomplete gamma function,
    which equals the Poisson upper tail exactly; monotone decreasing in
    n_th and confined to [0, 1].
    """
    if n_th < 0:
        raise ValueError(f"tagging threshold must be >= 0, got {n_th}")
    if mu < 0:
        raise ValueError(f"mean photon number must be >= 0, got {mu}")
    if mu == 0.0:
        return 0.0
    return float(gammainc(n_th + 1, mu))
