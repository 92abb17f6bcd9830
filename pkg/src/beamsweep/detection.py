"""Cell-averaging CFAR along range, range gating, and angular peak extraction."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError
from .ofdm import RangeAngleMap

__all__ = [
    "CfarConfig",
    "PeakEstimate",
    "cfar_threshold_factor",
    "ca_cfar",
    "gate_range",
    "extract_peaks",
]


@dataclass(frozen=True)
class CfarConfig:
    """Cell-averaging CFAR parameters.

    n_training is the TOTAL number of training cells, split evenly across
    the two sides of the cell under test; n_guard counts guard cells per
    side. Cells near the profile edges fall back to one-sided windows with
    the threshold factor recomputed for the cells actually available.
    """

    n_training: int = 16
    n_guard: int = 2
    p_fa: float = 1e-6

    def __post_init__(self):
        if self.n_training < 2 or self.n_training % 2 != 0:
            raise ConfigError("n_training must be a positive even total")
        if self.n_guard < 0:
            raise ConfigError("n_guard must be non-negative")
        if not 0 < self.p_fa < 1:
            raise ConfigError("p_fa must be in (0, 1)")


def cfar_threshold_factor(n_training: int, p_fa: float) -> float:
    """Scaling alpha = N * (p_fa**(-1/N) - 1) for exponentially distributed cells."""
    if n_training < 1:
        raise ConfigError("need at least one training cell")
    if not 0 < p_fa < 1:
        raise ConfigError("p_fa must be in (0, 1)")
    return n_training * (p_fa ** (-1.0 / n_training) - 1.0)


def ca_cfar(profile, config: CfarConfig) -> np.ndarray:
    """Detection mask over a power profile.

    Each cell is compared against alpha times the mean of its training
    cells (half per side beyond the guard cells). The profile must be
    longer than the full window, 2 * (n_training/2 + n_guard) + 1 cells.
    """
    profile = np.asarray(profile, dtype=float)
    if profile.ndim != 1:
        raise ConfigError("profile must be one-dimensional")
    if np.any(profile < 0) or not np.all(np.isfinite(profile)):
        raise ConfigError("profile must be finite and non-negative")
    t_side = config.n_training // 2
    g = config.n_guard
    n = profile.size
    if n <= 2 * (t_side + g):
        raise ConfigError(
            f"profile of {n} cells is too short for a {2 * (t_side + g) + 1}-cell window"
        )
    cs = np.concatenate(([0.0], np.cumsum(profile)))
    idx = np.arange(n)
    left_lo = np.maximum(idx - g - t_side, 0)
    left_hi = np.maximum(idx - g, 0)
    right_lo = np.minimum(idx + g + 1, n)
    right_hi = np.minimum(idx + g + 1 + t_side, n)
    train_sum = (cs[left_hi] - cs[left_lo]) + (cs[right_hi] - cs[right_lo])
    counts = (left_hi - left_lo) + (right_hi - right_lo)
    alpha = counts * (config.p_fa ** (-1.0 / counts) - 1.0)
    return profile > alpha * train_sum / counts


def gate_range(map_: RangeAngleMap, exclude: Tuple[float, float]) -> RangeAngleMap:
    """Drop the map rows whose range falls inside the closed exclusion interval.

    An empty interval (min > max) returns the map unchanged; removing every
    row is a configuration error.
    """
    lo, hi = exclude
    if lo > hi:
        return map_
    keep = ~((map_.range_axis >= lo) & (map_.range_axis <= hi))
    if not np.any(keep):
        raise ConfigError("range gate would remove every row")
    return RangeAngleMap(map_.power[keep], map_.range_axis[keep], map_.naf_axis)


@dataclass(frozen=True)
class PeakEstimate:
    """One detected target: NAF position, range, linear power."""

    naf: float
    range_m: float
    power: float

    def __post_init__(self):
        if not self.power > 0:
            raise ConfigError("peak power must be positive")


def _parabolic_offset(y_left: float, y_mid: float, y_right: float) -> float:
    """Sub-bin offset of the vertex through three points, clamped to half a bin."""
    denom = y_left - 2.0 * y_mid + y_right
    if denom == 0.0:
        return 0.0
    offset = 0.5 * (y_left - y_right) / denom
    return float(np.clip(offset, -0.5, 0.5))


def extract_peaks(
    spectrum,
    naf_axis,
    resolution: float,
    max_peaks: int = 2,
    detected: Optional[Sequence[bool]] = None,
    ranges_m: Optional[Sequence[float]] = None,
    refine: bool = True,
) -> list[PeakEstimate]:
    """Iteratively pick angular peaks, excluding +/- resolution around each.

    Only bins flagged in `detected` (all, when omitted) are eligible. Each
    pick takes the global argmax among the remaining eligible bins, refines
    its NAF with a three-point parabola (interior bins only, shift at most
    half a bin), then closes the interval of half-width `resolution` around
    it. Peaks come back in detection order, which is descending power.

    The spectrum is read as magnitude; reported peak power is its square.
    """
    spectrum = np.asarray(spectrum, dtype=float)
    naf_axis = np.asarray(naf_axis, dtype=float)
    if spectrum.size == 0 or spectrum.shape != naf_axis.shape:
        raise ConfigError("spectrum and NAF axis must be equal-length and non-empty")
    if not resolution > 0:
        raise ConfigError("resolution must be positive")
    if max_peaks < 1:
        raise ConfigError("max_peaks must be at least 1")
    eligible = (
        np.ones(spectrum.size, dtype=bool)
        if detected is None
        else np.array(detected, dtype=bool)
    )
    if eligible.shape != spectrum.shape:
        raise ConfigError("detection mask must match the spectrum length")
    ranges = None if ranges_m is None else np.asarray(ranges_m, dtype=float)

    peaks: list[PeakEstimate] = []
    for _ in range(max_peaks):
        if not np.any(eligible):
            break
        masked = np.where(eligible, spectrum, -np.inf)
        i = int(np.argmax(masked))
        value = spectrum[i]
        if not value > 0:
            break
        naf = float(naf_axis[i])
        if refine and 0 < i < spectrum.size - 1:
            step = 0.5 * (naf_axis[i + 1] - naf_axis[i - 1])
            naf += _parabolic_offset(spectrum[i - 1], value, spectrum[i + 1]) * step
        range_m = float(ranges[i]) if ranges is not None else math.nan
        # refinement promotes naf to a numpy scalar, whose repr is unprintable
        peaks.append(PeakEstimate(float(naf), range_m, float(value) ** 2))
        eligible &= np.abs(naf_axis - naf) > resolution
    return peaks
