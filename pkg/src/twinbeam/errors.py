"""Exception hierarchy for twinbeam.

Every domain error derives from TwinbeamError so callers (and the CLI)
can distinguish numeric-precondition failures from plain bugs.
"""


class TwinbeamError(Exception):
    """Base class for all twinbeam domain errors."""


class ZeroState(TwinbeamError):
    """Normalization of a state with zero norm was requested."""


class NotNormalized(TwinbeamError):
    """An operation requiring a normalized state received one that is not."""


class ZeroDensity(TwinbeamError):
    """Homodyne projection at an outcome with (numerically) zero density."""


class InvalidGeometry(TwinbeamError):
    """Window construction with non-monotone thresholds (theta*n_max too large)."""


class BadInput(TwinbeamError):
    """Circuit input violates a structural precondition (photon counts, sectors)."""


class PoleError(TwinbeamError):
    """The purification recurrence was started at or driven into its pole c = -1."""


class CascadeAborted(TwinbeamError):
    """A sampled cascade run hit an asymmetric outcome and was discarded."""

    def __init__(self, stage: int):
        super().__init__(f"cascade aborted: asymmetric outcome at stage {stage}")
        self.stage = stage


class NotInFamily(TwinbeamError):
    """State is not (numerically) in the two-pair coefficient family."""


class TruncationTooCoarse(TwinbeamError):
    """Sampling requested from a truncated distribution missing too much mass."""
