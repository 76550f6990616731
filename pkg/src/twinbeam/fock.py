"""Sparse exact states of four bosonic modes.

The signal register has four modes: horizontal/vertical polarization in
each of the two spatial modes a and b. A state is a sparse map from
occupation tuples (n_aH, n_aV, n_bH, n_bV) to complex amplitudes, kept in
double precision. States are immutable values; every operation returns a
new state, so they are safe to share across threads.
"""
from __future__ import annotations

import json
import math
from enum import IntEnum
from typing import Iterable, Iterator, Mapping, Union

from .errors import NotNormalized, ZeroState

# Amplitudes below this magnitude are dropped at construction; beam-splitter
# expansions produce exact cancellations that would otherwise accumulate as
# ~1e-16 noise terms.
PRUNE_THRESHOLD = 1e-14

# |norm - 1| tolerance for the "normalized" flag used by preconditions.
NORM_TOL = 1e-10

Occupation = tuple[int, int, int, int]


class Mode(IntEnum):
    """Signal mode index, ordered (a_H, a_V, b_H, b_V).

    The coherent probe is not a Mode; it is tracked separately as a branch
    label on a HybridState.
    """

    A_H = 0
    A_V = 1
    B_H = 2
    B_V = 3


def total_photons(occ: Occupation) -> int:
    return occ[0] + occ[1] + occ[2] + occ[3]


def photons_in_a(occ: Occupation) -> int:
    return occ[0] + occ[1]


def photons_in_b(occ: Occupation) -> int:
    return occ[2] + occ[3]


def _validate_occupation(occ) -> Occupation:
    t = tuple(occ)
    if len(t) != 4 or not all(isinstance(n, int) and n >= 0 for n in t):
        raise ValueError(f"occupation must be 4 non-negative integers, got {occ!r}")
    return t  # type: ignore[return-value]


class FockState:
    """Sparse superposition over four-mode occupation states.

    Duplicate occupations passed to the constructor have their amplitudes
    summed; amplitudes with magnitude below ``prune_threshold`` are dropped.
    """

    __slots__ = ("_terms", "prune_threshold")

    def __init__(
        self,
        terms: Union[Mapping[Occupation, complex], Iterable[tuple[Occupation, complex]]] = (),
        prune_threshold: float = PRUNE_THRESHOLD,
    ):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Occupation, complex] = {}
        for occ, amp in items:
            occ = _validate_occupation(occ)
            acc[occ] = acc.get(occ, 0j) + complex(amp)
        object.__setattr__(self, "_terms", {o: a for o, a in acc.items() if abs(a) >= prune_threshold})
        object.__setattr__(self, "prune_threshold", prune_threshold)

    def __setattr__(self, name, value):
        raise AttributeError("FockState is immutable")

    def items(self) -> Iterator[tuple[Occupation, complex]]:
        return iter(self._terms.items())

    def occupations(self) -> Iterator[Occupation]:
        return iter(self._terms)

    def amplitude(self, occ: Occupation) -> complex:
        return self._terms.get(_validate_occupation(occ), 0j)

    def norm_sq(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self._terms.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def is_zero(self) -> bool:
        return not self._terms

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def max_photons(self) -> int:
        return max((total_photons(o) for o in self._terms), default=0)

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        parts = ", ".join(f"{o}: {a:.6g}" for o, a in sorted(self._terms.items()))
        return f"FockState({{{parts}}})"

    # -- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        """JSON form: {"terms": [{"occ": [m,n,r,s], "re": ..., "im": ...}]}."""
        return {
            "terms": [
                {"occ": list(occ), "re": amp.real, "im": amp.imag}
                for occ, amp in sorted(self._terms.items())
            ]
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict) -> "FockState":
        return cls(
            [(tuple(t["occ"]), complex(t["re"], t["im"])) for t in data["terms"]]
        )

    @classmethod
    def loads(cls, text: str) -> "FockState":
        return cls.from_json_dict(json.loads(text))


def make_state(terms: Iterable[tuple[Occupation, complex]], prune_threshold: float = PRUNE_THRESHOLD) -> FockState:
    """Build a state from (occupation, amplitude) pairs, merging duplicates."""
    return FockState(terms, prune_threshold=prune_threshold)


def vacuum() -> FockState:
    return FockState([((0, 0, 0, 0), 1.0)])


def basis_state(occ: Occupation) -> FockState:
    return FockState([(occ, 1.0)])


def combine(weighted: Iterable[tuple[complex, FockState]]) -> FockState:
    """Linear combination sum_k coef_k * state_k (not normalized)."""
    acc: dict[Occupation, complex] = {}
    for coef, state in weighted:
        if coef == 0:
            continue
        for occ, amp in state.items():
            acc[occ] = acc.get(occ, 0j) + coef * amp
    return FockState(acc)


def normalize(state: FockState) -> FockState:
    """Scale to unit norm. Raises ZeroState on the zero state."""
    n = state.norm()
    if n == 0.0:
        raise ZeroState("cannot normalize a state with zero norm")
    inv = 1.0 / n
    return FockState({occ: amp * inv for occ, amp in state.items()})


def inner_product(s1: FockState, s2: FockState) -> complex:
    """<s1|s2>, conjugate-linear in the first argument."""
    if len(s1) > len(s2):
        return inner_product(s2, s1).conjugate()
    total = 0j
    for occ, amp in s1.items():
        other = s2.amplitude(occ)
        if other:
            total += amp.conjugate() * other
    return total


def fidelity(s1: FockState, s2: FockState) -> float:
    """|<s1|s2>|^2 for normalized states. Raises NotNormalized otherwise."""
    for s in (s1, s2):
        if not s.is_normalized():
            raise NotNormalized(f"fidelity requires unit-norm states, got norm {s.norm():.12g}")
    return abs(inner_product(s1, s2)) ** 2


def apply_creation(state: FockState, mode: Mode) -> FockState:
    """Ladder raise on one mode: |n> -> sqrt(n+1) |n+1>."""
    m = int(mode)
    out: dict[Occupation, complex] = {}
    for occ, amp in state.items():
        new = list(occ)
        new[m] += 1
        out[tuple(new)] = amp * math.sqrt(new[m])
    return FockState(out)


def apply_annihilation(state: FockState, mode: Mode) -> FockState:
    """Ladder lower on one mode: |n> -> sqrt(n) |n-1>, deleting n=0 terms."""
    m = int(mode)
    out: dict[Occupation, complex] = {}
    for occ, amp in state.items():
        n = occ[m]
        if n == 0:
            continue
        new = list(occ)
        new[m] -= 1
        out[tuple(new)] = amp * math.sqrt(n)
    return FockState(out)


def allclose(s1: FockState, s2: FockState, tol: float = 1e-12) -> bool:
    """Amplitude-wise comparison over the union of supports."""
    occs = set(s1.occupations()) | set(s2.occupations())
    return all(abs(s1.amplitude(o) - s2.amplitude(o)) <= tol for o in occs)
