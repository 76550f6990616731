"""X-quadrature homodyne readout of the coherent probe.

The probe is read in the quadrature x = a + a^+, whose eigenstate overlap
with a coherent state of complex amplitude beta is

    <x|beta> = (2*pi)^(-1/4) * exp[ -(Im beta)^2 - (x - 2*beta)^2 / 4 ].

|<x|beta>|^2 is a unit-variance Gaussian centred at 2*Re(beta), so a
hybrid state's outcome density is a Gaussian mixture over probe branches
(plus interference terms when branch signals overlap, which are kept
exactly here). Measuring x projects the signal register onto the
kernel-weighted superposition of branch signals.

Decision windows map an outcome x to a declared pair count m: the m-pair
branch sits at mean 2*alpha*cos((m-1)*theta), and adjacent classes split
at the midpoint alpha*[cos((m-1)*theta) + cos(m*theta)].
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .elements import HybridState, phase_shift
from .errors import InvalidGeometry, ZeroDensity
from .fock import FockState, Mode, combine, inner_product, normalize

TWO_PI = 2.0 * math.pi

# Class ids used by the two-outcome detector window table.
SYMMETRIC_CLASS = 1
ASYMMETRIC_CLASS = 0

# Branches whose Gaussian means differ by more than this many standard
# deviations are sampled as an orthogonal mixture (cross terms dropped);
# closer branches get exact treatment.
CLUSTER_WIDTH = 10.0

_DENSITY_FLOOR = 1e-300


def homodyne_kernel(x: float, label: complex) -> complex:
    """Overlap <x|label> of an x-quadrature eigenstate with a coherent state."""
    label = complex(label)
    exponent = -(label.imag ** 2) - (x - 2.0 * label) ** 2 / 4.0
    return (TWO_PI ** -0.25) * cmath.exp(exponent)


def _weighted_signal(hybrid: HybridState, x: float) -> FockState:
    return combine((homodyne_kernel(x, label), sig) for label, sig in hybrid.branches)


def outcome_pdf(hybrid: HybridState, x: float) -> float:
    """Probability density of measuring x; integrates to 1 over the line."""
    return _weighted_signal(hybrid, x).norm_sq()


@dataclass(frozen=True)
class Window:
    class_id: int
    lower: float
    upper: float

    def contains(self, x: float) -> bool:
        return self.lower < x <= self.upper


@dataclass(frozen=True)
class WindowTable:
    """Ordered homodyne decision thresholds, largest-x class first.

    Windows partition the real line as (lower, upper] intervals; the top
    window is open above. Boundaries decrease strictly with the class id.
    """

    windows: tuple[Window, ...]

    def classify(self, x: float) -> int:
        for w in self.windows:
            if w.contains(x):
                return w.class_id
        raise ValueError(f"x={x!r} not covered by the window table")

    def boundaries(self) -> list[float]:
        return [w.lower for w in self.windows[:-1]]

    def window_for(self, class_id: int) -> Window:
        for w in self.windows:
            if w.class_id == class_id:
                return w
        raise KeyError(class_id)

    def to_json_dict(self) -> dict:
        return {
            "windows": [
                {"class": w.class_id, "lower": w.lower, "upper": w.upper}
                for w in self.windows
            ]
        }


def build_windows(alpha: float, theta: float, n_max: int) -> WindowTable:
    """Decision windows for pair counts m = 1..n_max.

    Class 1 takes x > alpha*(1 + cos theta); class m sits between the
    midpoints of the adjacent branch means; class n_max extends to -inf.
    Requires alpha > 0 and theta*n_max < pi/2 so the boundaries are
    strictly decreasing (InvalidGeometry otherwise).
    """
    if n_max < 1:
        raise InvalidGeometry("n_max must be at least 1")
    if alpha <= 0:
        raise InvalidGeometry("alpha must be positive")
    if not (theta > 0 and theta * n_max < math.pi / 2):
        raise InvalidGeometry(
            f"need 0 < theta and theta*n_max < pi/2 for monotone windows, got theta={theta}, n_max={n_max}"
        )
    cuts = [alpha * (math.cos((m - 1) * theta) + math.cos(m * theta)) for m in range(1, n_max)]
    windows = []
    upper = math.inf
    for m in range(1, n_max + 1):
        lower = cuts[m - 1] if m <= len(cuts) else -math.inf
        windows.append(Window(class_id=m, lower=lower, upper=upper))
        upper = lower
    return WindowTable(windows=tuple(windows))


def detector_windows(alpha: float, theta: float) -> WindowTable:
    """Two-outcome table for the four-photon detector.

    SYMMETRIC_CLASS above alpha*(1 + cos theta) (probe undisturbed, mean
    2*alpha), ASYMMETRIC_CLASS below (bunched outcomes, mean 2*alpha*cos theta).
    """
    cut = alpha * (1.0 + math.cos(theta))
    return WindowTable(
        windows=(
            Window(class_id=SYMMETRIC_CLASS, lower=cut, upper=math.inf),
            Window(class_id=ASYMMETRIC_CLASS, lower=-math.inf, upper=cut),
        )
    )


@dataclass(frozen=True)
class HomodyneOutcome:
    x: float
    declared_class: int
    post_state: FockState
    correction_applied: bool


def feed_forward_phase(alpha: float, theta: float, x: float) -> float:
    """Outcome-dependent residual phase of the bunched superposition.

    The projected bunched state is correct up to this angle applied per
    photon of spatial mode b; project() removes it by shifting both b
    polarizations by its negative.
    """
    return (-alpha * math.sin(theta) * (x - 2.0 * alpha * math.cos(theta)) / 2.0) % TWO_PI


def project(
    hybrid: HybridState,
    x: float,
    windows: WindowTable,
    theta: Optional[float] = None,
    correct_phase: bool = False,
) -> HomodyneOutcome:
    """Collapse the signal register on homodyne outcome x.

    The post state is the normalized kernel-weighted superposition of all
    branch signals (interference between branches is kept exactly). The
    declared class comes from the window table. With correct_phase set and
    the asymmetric (bunched) class declared, the feed-forward phase is
    undone on both polarizations of spatial mode b, which makes every
    outcome in that window collapse to the same bunched superposition.

    Raises ZeroDensity when the outcome density vanishes numerically.
    """
    weighted = _weighted_signal(hybrid, x)
    if weighted.norm_sq() < _DENSITY_FLOOR:
        raise ZeroDensity(f"outcome density at x={x} is numerically zero")
    post = normalize(weighted)
    declared = windows.classify(x)
    applied = False
    if correct_phase and declared == ASYMMETRIC_CLASS:
        if theta is None:
            raise ValueError("theta is required to apply the feed-forward correction")
        phi = feed_forward_phase(hybrid.base_alpha, theta, x)
        post = phase_shift(post, Mode.B_H, -phi)
        post = phase_shift(post, Mode.B_V, -phi)
        applied = True
    return HomodyneOutcome(x=x, declared_class=declared, post_state=post, correction_applied=applied)


# -- sampling -------------------------------------------------------------


def derive_seed(base_seed: int, task_index: int) -> int:
    """Seed-splitting rule for parallel ensembles: base + task index."""
    return base_seed + task_index


def _kernel_cross_integral(beta: complex, beta_p: complex) -> complex:
    """Closed form of integral dx conj(<x|beta_p>) <x|beta>."""
    bp = beta_p.conjugate()
    return cmath.exp(
        bp * beta - bp * bp / 2.0 - beta * beta / 2.0
        - beta.imag ** 2 - beta_p.imag ** 2
    )


def _clusters(means: Sequence[float]) -> list[list[int]]:
    order = sorted(range(len(means)), key=lambda i: means[i])
    groups: list[list[int]] = []
    for i in order:
        if groups and means[i] - means[groups[-1][-1]] <= CLUSTER_WIDTH:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def sample_outcomes(hybrid: HybridState, shots: int, seed: int) -> np.ndarray:
    """Draw homodyne outcomes; deterministic for a given seed.

    Branches are grouped into clusters of means within CLUSTER_WIDTH
    standard deviations. Cross terms between clusters are dropped (their
    overlap is below exp(-CLUSTER_WIDTH^2/8)); within a cluster they are
    included exactly, via closed-form weights and a numeric inverse CDF
    when the branch signals are not orthogonal.
    """
    rng = np.random.default_rng(seed)
    branches = hybrid.branches
    means = [2.0 * label.real for label, _ in branches]
    weights = np.array([sig.norm_sq() for _, sig in branches])
    groups = _clusters(means)

    simple = True
    for g in groups:
        for i in range(len(g)):
            for j in range(i + 1, len(g)):
                if abs(inner_product(branches[g[i]][1], branches[g[j]][1])) > 1e-12:
                    simple = False
    if simple:
        # plain Gaussian mixture: branch signals are orthogonal, so branch
        # weights are exact component probabilities
        idx = rng.choice(len(branches), size=shots, p=weights / weights.sum())
        return rng.normal(np.asarray(means)[idx], 1.0)

    masses = []
    for g in groups:
        total = 0j
        for i in g:
            for j in g:
                ov = inner_product(branches[j][1], branches[i][1])
                if ov:
                    total += ov * _kernel_cross_integral(branches[i][0], branches[j][0])
        masses.append(max(total.real, 0.0))
    masses = np.array(masses)
    picks = rng.choice(len(groups), size=shots, p=masses / masses.sum())
    xs = np.empty(shots)
    for gi, g in enumerate(groups):
        sel = np.flatnonzero(picks == gi)
        if sel.size == 0:
            continue
        if len(g) == 1:
            xs[sel] = rng.normal(means[g[0]], 1.0, size=sel.size)
            continue
        sub = HybridState(branches=tuple(branches[i] for i in g), base_alpha=hybrid.base_alpha)
        lo = min(means[i] for i in g) - 12.0
        hi = max(means[i] for i in g) + 12.0
        grid = np.linspace(lo, hi, 20001)
        pdf = np.array([outcome_pdf(sub, float(v)) for v in grid])
        cdf = np.concatenate([[0.0], np.cumsum((pdf[1:] + pdf[:-1]) / 2.0 * np.diff(grid))])
        cdf /= cdf[-1]
        xs[sel] = np.interp(rng.uniform(size=sel.size), cdf, grid)
    return xs


def sample_outcome(hybrid: HybridState, rng_seed: int) -> float:
    """Draw one homodyne outcome (see sample_outcomes)."""
    return float(sample_outcomes(hybrid, 1, rng_seed)[0])
