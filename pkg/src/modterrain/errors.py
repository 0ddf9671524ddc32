"""Exception hierarchy for the modterrain package.

Four broad categories exist so the command-line layer can map failures to
distinct exit codes: configuration, network, evaluation, and output I/O.
"""


class ModTerrainError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(ModTerrainError):
    """Invalid configuration, label, or argument."""


class NetworkError(ModTerrainError):
    """Remote fetch failed and no cached or bundled data could satisfy it."""


class EvaluationError(ModTerrainError):
    """Numerical evaluation could not meet its contract."""


class OutputError(ModTerrainError):
    """Writing or reading an artifact failed."""


# --- configuration / data ingest ---

class LabelParseError(ConfigError):
    """A newform label string does not have the expected shape."""

    def __init__(self, label, segment, reason):
        self.label = label
        self.segment = segment
        super().__init__(f"bad label {label!r}: segment {segment!r} {reason}")


class CoefficientFormatError(ConfigError):
    """A coefficient file or remote payload could not be decoded."""


class NormalizationError(ConfigError):
    """Coefficient data is not newform-normalized (first coefficient != 1)."""


class NotFoundError(NetworkError):
    """The remote endpoint reported that the label does not exist."""


# --- evaluation ---

class PrecisionEscalationError(EvaluationError):
    """The precision ladder was exhausted without two runs agreeing.

    Carries the last two disagreeing values so callers can inspect how far
    apart the ladder ended up.
    """

    def __init__(self, previous, last, max_bits):
        self.previous = previous
        self.last = last
        self.max_bits = max_bits
        super().__init__(
            f"no agreement at {max_bits} bits: {previous} vs {last}"
        )


class UpperHalfPlaneError(EvaluationError):
    """A point with Im(z) <= 0 was passed where Im(z) > 0 is required."""


class ReductionIterationError(EvaluationError):
    """Fundamental-domain reduction exceeded its iteration cap."""


class InsufficientCoefficientsError(EvaluationError):
    """More q-expansion coefficients are needed than are stored."""

    def __init__(self, needed, available):
        self.needed = needed
        self.available = available
        super().__init__(
            f"need {needed} coefficients but only {available} are stored"
        )


class TooCloseToBoundaryError(EvaluationError):
    """Truncation analysis demands more than 10^6 terms; reduce first."""


class BelowEvaluationFloorError(EvaluationError):
    """Im(z) is below the direct-evaluation floor for a level-N form."""


class EmptyFieldError(EvaluationError):
    """Every grid node fell below the evaluation floor."""
