"""Exact simulator for twin-beam symmetry detection and its applications.

Multimode Fock states pass a 50:50 beam splitter, pick up cross-Kerr phase
shifts on a shared coherent probe, and are projected by X-homodyne
measurement. On top of that core the package reproduces the cascaded
two-pair purification dynamics and the pair-number emission classifier.
"""

from .circuits import (
    DEFAULT_ALPHA,
    DEFAULT_SEED,
    DEFAULT_THETA,
    VACUUM_CLASS,
    CascadeResult,
    ClassificationResult,
    DetectionResult,
    DetectorBranch,
    IterationRecord,
    cascade_closed_form,
    cascade_simulated,
    classify_pairs,
    classify_shots,
    extract_c,
    four_photon_family,
    iteration_records_csv,
    iteration_records_json,
    next_coefficient,
    symmetric_probability,
    symmetry_detector,
)
from .elements import (
    MERGE_TOL,
    HybridState,
    PhaseConfig,
    attach_probe,
    beam_splitter,
    cross_kerr,
    pair_count_preset,
    preset,
    phase_shift,
    symmetry_preset,
)
from .errors import (
    BadInput,
    CascadeAborted,
    InvalidGeometry,
    NotInFamily,
    NotNormalized,
    PoleError,
    TruncationTooCoarse,
    TwinbeamError,
    ZeroDensity,
    ZeroState,
)
from .fock import (
    PRUNE_THRESHOLD,
    FockState,
    Mode,
    allclose,
    apply_annihilation,
    apply_creation,
    basis_state,
    combine,
    fidelity,
    inner_product,
    make_state,
    normalize,
    vacuum,
)
from .homodyne import (
    ASYMMETRIC_CLASS,
    SYMMETRIC_CLASS,
    HomodyneOutcome,
    Window,
    WindowTable,
    build_windows,
    derive_seed,
    detector_windows,
    feed_forward_phase,
    homodyne_kernel,
    outcome_pdf,
    project,
    sample_outcome,
    sample_outcomes,
)
from .spdc import (
    SpdcParams,
    adequate_n_max,
    mean_pairs,
    pair_distribution,
    pair_state,
    pair_weight,
    sample_emission,
    sample_emissions,
    truncated_state,
    truncation_loss,
)

__version__ = "0.1.0"
