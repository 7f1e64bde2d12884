"""Numeric policy: the tie band around zero used by every strict comparison.

Values inside [-band, +band] count as zero, so "strictly positive" means
value > band. This keeps decisions conservative when floating error could
otherwise manufacture a strict preference. The band defaults to 1e-12 and
can be overridden through the CREDAL_TIE_BAND environment variable.
"""
import os

DEFAULT_TIE_BAND = 1e-12
MASS_TOLERANCE = 1e-9

_ENV_VAR = "CREDAL_TIE_BAND"


def tie_band() -> float:
    """Current tie band; reads the environment on every call."""
    raw = os.environ.get(_ENV_VAR)
    if raw is None:
        return DEFAULT_TIE_BAND
    band = float(raw)
    if band < 0.0:
        raise ValueError(f"{_ENV_VAR} must be non-negative, got {raw}")
    return band


def strictly_positive(value: float) -> bool:
    """True iff value clears the tie band."""
    return value > tie_band()


def non_negative(value: float) -> bool:
    """True iff value is positive or indistinguishable from zero."""
    return value >= -tie_band()
