"""Unitary circuit elements: 50:50 beam splitter, phase shifters, cross-Kerr.

The beam splitter acts identically on both polarizations across the two
spatial modes. Its convention is fixed by the creation-operator map

    a_x^+ -> (a_x^+ + b_x^+) / sqrt(2),   b_x^+ -> (b_x^+ - a_x^+) / sqrt(2)

for x in {H, V}, i.e. the unitary generated by (pi/4)(a b^+ - a^+ b) per
polarization. Applying it to a sparse state expands each occupation term
as a polynomial in creation operators, substitutes, and re-collects; this
is exact up to floating point and conserves photon number per polarization.

The cross-Kerr element couples the signal register to a coherent probe:
a term with n_a photons in spatial mode a and n_b in b rotates the probe
label by n_a*rate_a + n_b*rate_b + probe_gate while leaving the signal
amplitudes untouched.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional

from .errors import NotNormalized
from .fock import NORM_TOL, FockState, Mode, Occupation

# Branches whose probe labels differ by at most this complex distance merge.
MERGE_TOL = 1e-12


@lru_cache(maxsize=None)
def _sqrt_fact(n: int) -> float:
    return math.sqrt(math.factorial(n))


def beam_splitter(state: FockState) -> FockState:
    """Apply the lossless polarization-preserving 50:50 beam splitter.

    Raises NotNormalized if the input does not have unit norm. The output
    is unitary: norm and photon number per polarization are preserved.
    """
    if not state.is_normalized():
        raise NotNormalized(f"beam splitter requires a normalized input, norm = {state.norm():.12g}")
    out: dict[Occupation, complex] = {}
    for (m, n, r, s), amp in state.items():
        base = amp / (_sqrt_fact(m) * _sqrt_fact(n) * _sqrt_fact(r) * _sqrt_fact(s))
        base *= 2.0 ** (-0.5 * (m + n + r + s))
        for j in range(m + 1):
            cj = math.comb(m, j)
            for k in range(r + 1):
                ch = cj * math.comb(r, k) * (-1 if (r - k) & 1 else 1)
                a_h = j + r - k
                b_h = m - j + k
                wh = base * ch * _sqrt_fact(a_h) * _sqrt_fact(b_h)
                for p in range(n + 1):
                    cp = math.comb(n, p)
                    for q in range(s + 1):
                        cv = cp * math.comb(s, q) * (-1 if (s - q) & 1 else 1)
                        a_v = p + s - q
                        b_v = n - p + q
                        occ = (a_h, a_v, b_h, b_v)
                        w = wh * cv * _sqrt_fact(a_v) * _sqrt_fact(b_v)
                        out[occ] = out.get(occ, 0j) + w
    return FockState(out)


def phase_shift(state: FockState, mode: Mode, phi: float) -> FockState:
    """Single-mode phase shifter: each term gains exp(i * n_mode * phi)."""
    if phi == 0.0:
        return state
    m = int(mode)
    return FockState({occ: amp * cmath.exp(1j * phi * occ[m]) for occ, amp in state.items()})


@dataclass(frozen=True)
class PhaseConfig:
    """Kerr phase rates per signal photon plus the probe's constant gate.

    rate_a applies per photon in spatial mode a (both polarizations),
    rate_b per photon in mode b, probe_gate once. Presets additionally
    carry integer step counts over an exact unit so that combinations that
    cancel algebraically (like the symmetric four-photon case) come out as
    exactly 0.0 in floating point.
    """

    rate_a: float
    rate_b: float
    probe_gate: float
    unit: Optional[float] = field(default=None, repr=False)
    steps: Optional[tuple[int, int, int]] = field(default=None, repr=False)

    def phase_for(self, n_a: int, n_b: int) -> float:
        if self.steps is not None and self.unit is not None:
            k = self.steps[0] * n_a + self.steps[1] * n_b + self.steps[2]
            return 0.0 if k == 0 else k * self.unit
        return n_a * self.rate_a + n_b * self.rate_b + self.probe_gate


def symmetry_preset(theta: float) -> PhaseConfig:
    """Four-photon detector rates: (3*theta/2, theta, -5*theta).

    The bunched outcomes land at probe phase +/- theta and every term with
    two photons per spatial mode lands at exactly 0.
    """
    u = theta / 2.0
    return PhaseConfig(rate_a=3 * u, rate_b=2 * u, probe_gate=-10 * u, unit=u, steps=(3, 2, -10))


def pair_count_preset(theta: float) -> PhaseConfig:
    """Pair-counting rates: (theta/3, 2*theta/3, -theta).

    An m-pair input (m photons in each spatial mode) shifts the probe by
    (m-1)*theta in total.
    """
    u = theta / 3.0
    return PhaseConfig(rate_a=u, rate_b=2 * u, probe_gate=-3 * u, unit=u, steps=(1, 2, -3))


PRESETS = {
    "fig1": symmetry_preset,
    "npair": pair_count_preset,
}


def preset(name: str, theta: float) -> PhaseConfig:
    """Look up a named preset ("fig1" or "npair")."""
    try:
        return PRESETS[name](theta)
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class HybridState:
    """Signal register entangled with a coherent probe.

    Each branch pairs a complex probe label (coherent amplitude) with a
    sub-normalized FockState whose squared norm is the branch weight.
    Branches produced by cross_kerr carry mutually orthogonal signals, so
    the joint norm is the plain sum of branch weights.
    """

    branches: tuple[tuple[complex, FockState], ...]
    base_alpha: float

    def joint_norm_sq(self) -> float:
        return math.fsum(sig.norm_sq() for _, sig in self.branches)

    def validate(self, tol: float = NORM_TOL) -> None:
        jn = self.joint_norm_sq()
        if abs(jn - 1.0) > tol:
            raise NotNormalized(f"hybrid joint norm^2 = {jn:.12g}, expected 1")
        labels = [lab for lab, _ in self.branches]
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                if abs(labels[i] - labels[j]) <= MERGE_TOL:
                    raise ValueError("probe labels not distinct beyond merge tolerance")


def attach_probe(signal: FockState, alpha: float) -> HybridState:
    """Pair a normalized signal with a fresh real coherent probe |alpha>."""
    if alpha <= 0:
        raise ValueError("probe amplitude alpha must be positive")
    if not signal.is_normalized():
        raise NotNormalized("probe attaches to a normalized signal state")
    return HybridState(branches=((complex(alpha), signal),), base_alpha=float(alpha))


def cross_kerr(hybrid: HybridState, config: PhaseConfig) -> HybridState:
    """Entangle signal photon numbers with the probe phase.

    Every occupation with (n_a, n_b) photons in the two spatial modes moves
    to a branch whose label is the old one times exp(i*phase_for(n_a, n_b));
    signal amplitudes are unchanged. Branches with labels equal within
    MERGE_TOL coalesce; candidates are sorted by label argument first so
    the merge is deterministic.
    """
    raw: list[tuple[complex, dict[Occupation, complex]]] = []
    for label, signal in hybrid.branches:
        groups: dict[float, dict[Occupation, complex]] = {}
        for occ, amp in signal.items():
            ph = config.phase_for(occ[0] + occ[1], occ[2] + occ[3])
            groups.setdefault(ph, {})[occ] = amp
        for ph, terms in groups.items():
            lab = label if ph == 0.0 else label * cmath.exp(1j * ph)
            raw.append((lab, terms))
    raw.sort(key=lambda t: (cmath.phase(t[0]), abs(t[0])))
    merged: list[tuple[complex, dict[Occupation, complex]]] = []
    for lab, terms in raw:
        if merged and abs(lab - merged[-1][0]) <= MERGE_TOL:
            tgt = merged[-1][1]
            for occ, amp in terms.items():
                tgt[occ] = tgt.get(occ, 0j) + amp
        else:
            merged.append((lab, dict(terms)))
    return HybridState(
        branches=tuple((lab, FockState(terms)) for lab, terms in merged),
        base_alpha=hybrid.base_alpha,
    )
