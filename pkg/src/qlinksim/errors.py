"""Exception hierarchy shared across the package."""


class QLinkError(Exception):
    """Base class for all package errors."""


class ConfigError(QLinkError):
    """Invalid scenario configuration (bad value, unknown key, cross-field clash)."""


class DimensionError(QLinkError):
    """Mode/operator shape mismatch or an out-of-range mode index."""


class DimensionCapError(DimensionError):
    """Composite Hilbert-space dimension would exceed the configured cap."""


class ToleranceError(QLinkError):
    """A numerical invariant (hermiticity, positivity, trace) is violated
    beyond the hard tolerance."""


class TruncationError(ToleranceError):
    """Requested operation would push non-negligible population past the
    Fock truncation."""


class CalibrationInfeasibleError(QLinkError):
    """Heating-calibration targets cannot be met by the model."""
