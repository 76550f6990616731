"""Two-mode down-conversion source: pair states and emission statistics.

The source emits n indistinguishable photon pairs with probability
p_n = (n+1) * tanh(tau)^(2n) / cosh(tau)^4, where tau is the interaction
parameter. The n-pair state is the twin-beam singlet analogue with n+1
alternating-sign terms; the mean pair number is 2*sinh(tau)^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationTooCoarse
from .fock import FockState, combine, make_state, normalize

_LOSS_LIMIT = 1e-6


@dataclass(frozen=True)
class SpdcParams:
    tau: float
    n_max: int

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("tau must be non-negative")
        if self.n_max < 0:
            raise ValueError("n_max must be non-negative")


def pair_state(n: int) -> FockState:
    """Normalized n-pair twin-beam state, (-1)^m / sqrt(n+1) amplitudes."""
    if n < 0:
        raise ValueError("pair count must be non-negative")
    inv = 1.0 / math.sqrt(n + 1)
    return make_state(
        ((n - m, m, m, n - m), (-inv if m & 1 else inv)) for m in range(n + 1)
    )


def pair_weight(tau: float, n: int) -> float:
    return (n + 1) * math.tanh(tau) ** (2 * n) / math.cosh(tau) ** 4


def pair_distribution(params: SpdcParams) -> list[tuple[int, float]]:
    """Raw (untruncated-weight) pair-number probabilities for n <= n_max."""
    return [(n, pair_weight(params.tau, n)) for n in range(params.n_max + 1)]


def truncation_loss(params: SpdcParams) -> float:
    """Probability mass beyond the truncation order."""
    kept = math.fsum(p for _, p in pair_distribution(params))
    return max(0.0, 1.0 - kept)


def mean_pairs(tau: float) -> float:
    return 2.0 * math.sinh(tau) ** 2


def sample_emissions(params: SpdcParams, shots: int, seed: int) -> np.ndarray:
    """Draw pair counts from the truncated distribution, renormalized.

    Raises TruncationTooCoarse unless truncation_loss < 1e-6; sampling is
    deterministic per seed.
    """
    loss = truncation_loss(params)
    if loss >= _LOSS_LIMIT:
        raise TruncationTooCoarse(
            f"truncation loss {loss:.3g} at n_max={params.n_max} exceeds {_LOSS_LIMIT}"
        )
    probs = np.array([p for _, p in pair_distribution(params)])
    rng = np.random.default_rng(seed)
    return rng.choice(params.n_max + 1, size=shots, p=probs / probs.sum())


def sample_emission(params: SpdcParams, seed: int) -> int:
    return int(sample_emissions(params, 1, seed)[0])


def adequate_n_max(tau: float, cap: int = 200) -> int:
    """Smallest truncation order with loss below the sampling limit."""
    for n in range(cap + 1):
        if truncation_loss(SpdcParams(tau, n)) < _LOSS_LIMIT:
            return n
    return cap


def truncated_state(params: SpdcParams) -> FockState:
    """Normalized superposition of pair sectors up to n_max.

    Sector amplitudes are sqrt(n+1)*tanh(tau)^n/cosh(tau)^2 before the
    truncation renormalization, so sector weights stay proportional to the
    emission probabilities.
    """
    amp = lambda n: math.sqrt(n + 1) * math.tanh(params.tau) ** n / math.cosh(params.tau) ** 2
    state = combine((amp(n), pair_state(n)) for n in range(params.n_max + 1))
    return normalize(state)
