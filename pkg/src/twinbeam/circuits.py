"""Detector circuits: single symmetry detection, cascaded purification,
and pair-number classification.

The symmetry detector sends a four-photon state (two photons in each
spatial mode) through the 50:50 splitter, entangles photon number with a
coherent probe using the "fig1" rates, and reads the probe's X quadrature:
outcomes above alpha*(1+cos theta) herald the symmetric output, outcomes
below herald the bunched (asymmetric) one. On the coefficient family

    N * (|2,0;0,2> + |0,2;2,0> - c |1,1;1,1>),   N^2 = 1/(2 + c^2),

the symmetric branch carries the next coefficient 2/(1+c) and success
probability 1/{1 + (1-c)^2/[2 + (1+c)^2]}, so cascading detectors and
keeping symmetric outcomes drives c to the fixed point 1.

The pair classifier runs the same circuit with the "npair" rates, under
which an m-pair input shifts the probe by (m-1)*theta, and reads the pair
count off a window table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .elements import (
    HybridState,
    attach_probe,
    beam_splitter,
    cross_kerr,
    pair_count_preset,
    symmetry_preset,
)
from .errors import BadInput, CascadeAborted, NotInFamily, PoleError
from .fock import (
    FockState,
    combine,
    fidelity,
    make_state,
    normalize,
    photons_in_a,
    photons_in_b,
    total_photons,
    vacuum,
)
from .homodyne import (
    ASYMMETRIC_CLASS,
    SYMMETRIC_CLASS,
    WindowTable,
    build_windows,
    detector_windows,
    homodyne_kernel,
    project,
    sample_outcomes,
)
from .spdc import pair_state

DEFAULT_ALPHA = 1e5
DEFAULT_THETA = 0.01
DEFAULT_SEED = 42

VACUUM_CLASS = 0

_FAMILY_SUPPORT = ((2, 0, 0, 2), (0, 2, 2, 0), (1, 1, 1, 1))


def four_photon_family(c: float) -> FockState:
    """Member of the detector's coefficient family for real c."""
    if isinstance(c, complex):
        raise TypeError("the family coefficient c must be real")
    c = float(c)
    n = 1.0 / math.sqrt(2.0 + c * c)
    return make_state(
        [((2, 0, 0, 2), n), ((0, 2, 2, 0), n), ((1, 1, 1, 1), -c * n)]
    )


def next_coefficient(c: float) -> float:
    """One purification step: c -> 2/(1+c)."""
    return 2.0 / (1.0 + c)


def symmetric_probability(c: float) -> float:
    """Probability of the symmetric outcome for family coefficient c."""
    return 1.0 / (1.0 + (1.0 - c) ** 2 / (2.0 + (1.0 + c) ** 2))


def extract_c(state: FockState, tol: float = 1e-9) -> float:
    """Invert the family parametrization: c = -amp(1,1,1,1)/amp(2,0,0,2).

    Raises NotInFamily when the support, the equal-amplitude condition, or
    the reality of the ratio fails beyond tol.
    """
    for occ, amp in state.items():
        if occ not in _FAMILY_SUPPORT and abs(amp) > tol:
            raise NotInFamily(f"unexpected occupation {occ} with amplitude {abs(amp):.3g}")
    a1 = state.amplitude((2, 0, 0, 2))
    a2 = state.amplitude((0, 2, 2, 0))
    b = state.amplitude((1, 1, 1, 1))
    if abs(a1 - a2) > tol:
        raise NotInFamily(f"pair amplitudes differ by {abs(a1 - a2):.3g}")
    if abs(a1) < tol:
        raise NotInFamily("vanishing pair amplitude; coefficient undefined")
    c = -b / a1
    if abs(c.imag) > tol:
        raise NotInFamily(f"coefficient has imaginary residue {abs(c.imag):.3g}")
    return c.real


@dataclass(frozen=True)
class DetectorBranch:
    kind: str
    probability: float
    state: Optional[FockState]
    c_out: Optional[float] = None


@dataclass(frozen=True)
class DetectionResult:
    """Both detector outcomes; x/declared are set in sampled mode only.

    Probabilities are always the analytic branch weights (they sum to 1).
    In sampled mode the declared branch's state is the projected post
    state at the drawn x; the other branch keeps its analytic state.
    """

    symmetric: DetectorBranch
    asymmetric: DetectorBranch
    x: Optional[float] = None
    declared: Optional[str] = None


def _check_detector_input(state: FockState) -> None:
    if state.is_zero():
        raise BadInput("detector input is the zero state")
    for occ in state.occupations():
        if total_photons(occ) != 4 or photons_in_a(occ) != 2 or photons_in_b(occ) != 2:
            raise BadInput(
                f"detector input must hold 2 photons per spatial mode in every term, got {occ}"
            )


def _detector_hybrid(state: FockState, alpha: float, theta: float) -> HybridState:
    _check_detector_input(state)
    return cross_kerr(attach_probe(beam_splitter(state), alpha), symmetry_preset(theta))


def _window_post(branches: list[tuple[complex, FockState]]) -> Optional[FockState]:
    # Analytic representative: evaluate the kernels at the window's own
    # weight-averaged mean, ignoring other windows' Gaussian tails.
    if not branches:
        return None
    if len(branches) == 1:
        return normalize(branches[0][1])
    weights = [sig.norm_sq() for _, sig in branches]
    x_rep = sum(w * 2.0 * lab.real for w, (lab, _) in zip(weights, branches)) / sum(weights)
    return normalize(combine((homodyne_kernel(x_rep, lab), sig) for lab, sig in branches))


def symmetry_detector(
    state: FockState,
    alpha: float = DEFAULT_ALPHA,
    theta: float = DEFAULT_THETA,
    mode: str = "analytic",
    seed=None,
) -> DetectionResult:
    """Run one symmetry detection.

    Analytic mode propagates exact branch weights through the circuit and
    returns both outcomes. Sampled mode additionally draws a homodyne
    value (deterministic per seed), projects at it with the feed-forward
    correction enabled, and reports which outcome was declared.
    """
    if mode not in ("analytic", "sampled"):
        raise ValueError(f"mode must be 'analytic' or 'sampled', got {mode!r}")
    hybrid = _detector_hybrid(state, alpha, theta)
    windows = detector_windows(alpha, theta)

    sym_parts: list[tuple[complex, FockState]] = []
    asym_parts: list[tuple[complex, FockState]] = []
    for label, signal in hybrid.branches:
        mean = 2.0 * label.real
        if windows.classify(mean) == SYMMETRIC_CLASS:
            sym_parts.append((label, signal))
        else:
            asym_parts.append((label, signal))
    p_sym = math.fsum(sig.norm_sq() for _, sig in sym_parts)
    p_asym = math.fsum(sig.norm_sq() for _, sig in asym_parts)
    sym_state = _window_post(sym_parts)
    asym_state = _window_post(asym_parts)

    x = None
    declared = None
    if mode == "sampled":
        x = float(sample_outcomes(hybrid, 1, seed if seed is not None else DEFAULT_SEED)[0])
        outcome = project(hybrid, x, windows, theta=theta, correct_phase=True)
        if outcome.declared_class == SYMMETRIC_CLASS:
            declared = "symmetric"
            sym_state = outcome.post_state
        else:
            declared = "asymmetric"
            asym_state = outcome.post_state

    c_out = None
    if sym_state is not None:
        try:
            c_out = extract_c(sym_state)
        except NotInFamily:
            c_out = None
    return DetectionResult(
        symmetric=DetectorBranch("symmetric", p_sym, sym_state, c_out),
        asymmetric=DetectorBranch("asymmetric", p_asym, asym_state),
        x=x,
        declared=declared,
    )


# -- purification cascade ---------------------------------------------------


@dataclass(frozen=True)
class IterationRecord:
    i: int
    c_i: float
    P_i: float
    cumulative_P: float


def iteration_records_csv(records: list[IterationRecord]) -> str:
    lines = ["i,c_i,P_i,cumP"]
    for r in records:
        lines.append(f"{r.i},{r.c_i:.14e},{r.P_i:.14e},{r.cumulative_P:.14e}")
    return "\n".join(lines) + "\n"


def iteration_records_json(records: list[IterationRecord]) -> list[dict]:
    return [
        {"i": r.i, "c_i": r.c_i, "P_i": r.P_i, "cumP": r.cumulative_P}
        for r in records
    ]


def _check_cascade_args(c0: float, k: int) -> None:
    if c0 <= -1.0:
        raise PoleError(f"c0 = {c0} is outside the recurrence basin (requires c0 > -1)")
    if k < 1:
        raise ValueError("cascade length k must be at least 1")


def cascade_closed_form(c0: float, k: int) -> list[IterationRecord]:
    """Iterate the coefficient and probability recurrences for k stages."""
    _check_cascade_args(c0, k)
    records = []
    c = float(c0)
    cum = 1.0
    for i in range(1, k + 1):
        p = symmetric_probability(c)
        c = next_coefficient(c)
        cum *= p
        records.append(IterationRecord(i=i, c_i=c, P_i=p, cumulative_P=cum))
    return records


@dataclass(frozen=True)
class CascadeResult:
    records: list[IterationRecord]
    final_state: FockState


def cascade_simulated(
    c0: float,
    k: int,
    alpha: float = DEFAULT_ALPHA,
    theta: float = DEFAULT_THETA,
    mode: str = "analytic",
    seed=None,
) -> CascadeResult:
    """Run k chained detectors on the family state, keeping symmetric outcomes.

    Analytic mode postselects the symmetric branch exactly at every stage.
    Sampled mode draws each stage's homodyne value and raises
    CascadeAborted (with the stage index) when an asymmetric outcome is
    hit; this mirrors discarding such runs. Stage coefficients are read
    back from the stage output amplitudes, not from the recurrence.
    """
    _check_cascade_args(c0, k)
    rng = np.random.default_rng(seed if seed is not None else DEFAULT_SEED)
    state = four_photon_family(c0)
    records = []
    cum = 1.0
    for i in range(1, k + 1):
        det = symmetry_detector(state, alpha, theta, mode=mode, seed=rng)
        if mode == "sampled" and det.declared == "asymmetric":
            raise CascadeAborted(i)
        state = det.symmetric.state
        if det.symmetric.c_out is None:
            raise NotInFamily(f"stage {i} output left the coefficient family")
        cum *= det.symmetric.probability
        records.append(
            IterationRecord(i=i, c_i=det.symmetric.c_out, P_i=det.symmetric.probability, cumulative_P=cum)
        )
    return CascadeResult(records=records, final_state=state)


# -- pair-number classification ---------------------------------------------


@dataclass(frozen=True)
class ClassificationResult:
    """Pair-count readout.

    Analytic mode: distribution holds the exact sector weights over
    classes (vacuum reported as class 0, never sent through the windows),
    post_states the per-class collapsed states, and leakage the Gaussian
    mass each class's branch places outside its own window. Sampled mode
    is one shot: distribution is a point mass on the declared class and x
    is the drawn homodyne value.
    """

    distribution: dict[int, float]
    post_states: dict[int, FockState]
    leakage: dict[int, float]
    windows: Optional[WindowTable]
    x: Optional[float] = None
    declared: Optional[int] = None


def _split_sectors(state: FockState) -> dict[int, FockState]:
    if state.is_zero():
        raise BadInput("classifier input is the zero state")
    buckets: dict[int, dict] = {}
    for occ, amp in state.items():
        n = total_photons(occ)
        if n % 2:
            raise BadInput(f"odd photon number {n} cannot come from pair emission")
        buckets.setdefault(n // 2, {})[occ] = amp
    sectors = {m: FockState(terms) for m, terms in buckets.items()}
    for m, sector in sectors.items():
        if m > 0 and fidelity(normalize(sector), pair_state(m)) < 1.0 - 1e-10:
            raise BadInput(f"the {2 * m}-photon sector is not an {m}-pair state")
    return sectors


def _classifier_hybrid(state: FockState, alpha: float, theta: float) -> HybridState:
    return cross_kerr(attach_probe(beam_splitter(state), alpha), pair_count_preset(theta))


def _branch_class(signal: FockState) -> int:
    occ = next(signal.occupations())
    return total_photons(occ) // 2


def _gaussian_mass_outside(mean: float, lower: float, upper: float) -> float:
    mass = 0.0
    if lower != -math.inf:
        mass += 0.5 * math.erfc((mean - lower) / math.sqrt(2.0))
    if upper != math.inf:
        mass += 0.5 * math.erfc((upper - mean) / math.sqrt(2.0))
    return mass


def classify_pairs(
    state: FockState,
    alpha: float = DEFAULT_ALPHA,
    theta: float = DEFAULT_THETA,
    n_max: Optional[int] = None,
    mode: str = "analytic",
    seed=None,
) -> ClassificationResult:
    """Read the pair count of a superposition of pair sectors.

    The input must be normalized and every 2m-photon sector must be the
    m-pair state (BadInput otherwise). A vacuum component is declared as
    class 0 without consulting the homodyne value: its probe branch lands
    at the same mean as the two-pair one, but an empty signal register is
    heralded by the absence of photons. Sampled-mode post states are
    conditioned on the non-vacuum subspace for the same reason.
    """
    if mode not in ("analytic", "sampled"):
        raise ValueError(f"mode must be 'analytic' or 'sampled', got {mode!r}")
    sectors = _split_sectors(state)
    top = max(sectors)
    if n_max is None:
        n_max = top
    elif top > n_max:
        raise BadInput(f"input holds a {top}-pair sector beyond n_max={n_max}")

    windows = build_windows(alpha, theta, n_max) if n_max >= 1 else None
    hybrid = _classifier_hybrid(state, alpha, theta)
    by_class = {_branch_class(sig): (lab, sig) for lab, sig in hybrid.branches}

    distribution = {m: sig.norm_sq() for m, (_, sig) in sorted(by_class.items())}
    post_states = {
        m: (vacuum() if m == VACUUM_CLASS else normalize(sig))
        for m, (_, sig) in sorted(by_class.items())
    }
    leakage = {}
    for m, (lab, _) in sorted(by_class.items()):
        if m == VACUUM_CLASS or windows is None:
            continue
        w = windows.window_for(m)
        leakage[m] = _gaussian_mass_outside(2.0 * lab.real, w.lower, w.upper)

    if mode == "analytic":
        return ClassificationResult(distribution, post_states, leakage, windows)

    rng = np.random.default_rng(seed if seed is not None else DEFAULT_SEED)
    classes = sorted(by_class)
    weights = np.array([distribution[m] for m in classes])
    pick = classes[rng.choice(len(classes), p=weights / weights.sum())]
    lab, _ = by_class[pick]
    x = float(rng.normal(2.0 * lab.real, 1.0))
    if pick == VACUUM_CLASS:
        declared = VACUUM_CLASS
        post = vacuum()
    else:
        rest = [(l, s) for m, (l, s) in by_class.items() if m != VACUUM_CLASS]
        w_rest = math.fsum(s.norm_sq() for _, s in rest)
        scale = 1.0 / math.sqrt(w_rest)
        cond = HybridState(
            branches=tuple((l, combine([(scale, s)])) for l, s in rest),
            base_alpha=hybrid.base_alpha,
        )
        declared = windows.classify(x)
        post = project(cond, x, windows).post_state
    return ClassificationResult(
        distribution={declared: 1.0},
        post_states={declared: post},
        leakage=leakage,
        windows=windows,
        x=x,
        declared=declared,
    )


def classify_shots(
    state: FockState,
    alpha: float,
    theta: float,
    n_max: int,
    shots: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized sampled classification: returns (x values, declared classes).

    Runs the circuit once and draws all homodyne values from the branch
    mixture. Unlike classify_pairs, sectors beyond n_max are allowed here;
    their outcomes fall into the outermost window, which is exactly how an
    undersized window table misreads a high-order emission.
    """
    sectors = _split_sectors(state)
    windows = build_windows(alpha, theta, n_max)
    hybrid = _classifier_hybrid(state, alpha, theta)
    labels = [lab for lab, _ in hybrid.branches]
    weights = np.array([sig.norm_sq() for _, sig in hybrid.branches])
    means = np.array([2.0 * lab.real for lab in labels])
    is_vac = np.array([_branch_class(sig) == VACUUM_CLASS for _, sig in hybrid.branches])

    rng = np.random.default_rng(seed)
    idx = rng.choice(len(labels), size=shots, p=weights / weights.sum())
    xs = rng.normal(means[idx], 1.0)
    cuts = np.array(windows.boundaries())
    declared = 1 + np.sum(cuts[None, :] >= xs[:, None], axis=1)
    declared = np.where(is_vac[idx], VACUUM_CLASS, declared)
    return xs, declared.astype(int)
