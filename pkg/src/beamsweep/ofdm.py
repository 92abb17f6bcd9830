"""OFDM channel-state synthesis, range processing, and range-angle maps.

A static scene produces, per subcarrier n and symbol m, the sum over
scatterers of their beamformed complex gain times exp(-2j*pi*n*df*2r/c),
plus circular complex Gaussian noise. Range is recovered by an IDFT across
subcarriers (zero-padded so the display window tiles into the configured
bin count), Doppler by a DFT across symbols; the scene being static, all
signal energy sits in the zero-Doppler slice.
"""
from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .beams import BeamformingWeights, Scatterer, _pair_factor
from .errors import ConfigError
from .geometry import ArrayGeometry, NafAngle

C0 = 299_792_458.0  # speed of light (m/s)

_RAMP_MAGIC = b"RAMP"
_RAMP_VERSION = 1
# magic, version, n_range, n_angle, range min/max (m), NAF min/max
_RAMP_HEADER = struct.Struct("<4sIIIdddd")


@dataclass(frozen=True)
class RadioConfig:
    """FR2 OFDM numerology used for sensing.

    Defaults: 27.6 GHz carrier, 120 kHz subcarrier spacing, 792 subcarriers
    (95.04 MHz), one 14-symbol slot processed per 10 ms frame, display
    window [0, 25) m split into 42 range bins.
    """

    carrier_hz: float = 27.6e9
    subcarrier_spacing_hz: float = 120e3
    n_subcarriers: int = 792
    n_symbols: int = 14
    frame_duration_s: float = 0.010
    range_window_m: Tuple[float, float] = (0.0, 25.0)
    n_range_bins: int = 42

    def __post_init__(self):
        if min(self.carrier_hz, self.subcarrier_spacing_hz, self.frame_duration_s) <= 0:
            raise ConfigError("carrier, subcarrier spacing and frame duration must be positive")
        if self.n_subcarriers < 1 or self.n_symbols < 1 or self.n_range_bins < 1:
            raise ConfigError("subcarrier, symbol and range-bin counts must be positive")
        lo, hi = self.range_window_m
        if not 0 <= lo < hi:
            raise ConfigError("range window must satisfy 0 <= min < max")
        if hi > self.unambiguous_range_m:
            raise ConfigError("range window exceeds the unambiguous range")
        if self.range_fft_size < self.n_subcarriers:
            raise ConfigError("range window/bin combination requires fewer FFT bins than subcarriers")

    @property
    def bandwidth_hz(self) -> float:
        return self.n_subcarriers * self.subcarrier_spacing_hz

    @property
    def unambiguous_range_m(self) -> float:
        return C0 / (2 * self.subcarrier_spacing_hz)

    @property
    def range_fft_size(self) -> int:
        # pad so the display window tiles into n_range_bins equal bins
        lo, hi = self.range_window_m
        return round(C0 / (2 * self.subcarrier_spacing_hz * ((hi - lo) / self.n_range_bins)))

    @property
    def range_bin_width_m(self) -> float:
        return self.unambiguous_range_m / self.range_fft_size

    def range_axis(self, n_bins: int | None = None) -> np.ndarray:
        """Bin-center ranges of the zero-padded transform (first n_bins bins)."""
        n = self.range_fft_size if n_bins is None else n_bins
        return np.arange(n) * self.range_bin_width_m

    def window_bins(self) -> np.ndarray:
        """Indices of the n_range_bins display bins starting at the window floor."""
        start = int(round(self.range_window_m[0] / self.range_bin_width_m))
        return np.arange(start, start + self.n_range_bins)


@dataclass(frozen=True)
class FrameCsi:
    """One frame of channel state: (n_subcarriers, n_symbols) complex entries."""

    entries: np.ndarray
    config: RadioConfig

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.shape != (self.config.n_subcarriers, self.config.n_symbols):
            raise ConfigError("CSI shape must match (n_subcarriers, n_symbols)")
        e.flags.writeable = False
        object.__setattr__(self, "entries", e)


def scene_subcarrier_profile(
    config: RadioConfig,
    scatterers: Sequence[Scatterer],
    geom: ArrayGeometry,
    weights: BeamformingWeights,
    steer: NafAngle,
) -> np.ndarray:
    """Noise-free per-subcarrier response (constant across symbols)."""
    if not scatterers:
        return np.zeros(config.n_subcarriers, dtype=complex)
    weights.check_matches(geom)
    nafs = np.array([s.naf for s in scatterers])
    amps = np.array([s.amplitude for s in scatterers], dtype=complex)
    gains = amps * _pair_factor(geom, weights, steer - nafs)
    delays = np.array([2 * s.range_m / C0 for s in scatterers])
    n = np.arange(config.n_subcarriers)
    phases = np.exp(-2j * np.pi * config.subcarrier_spacing_hz * np.outer(n, delays))
    return phases @ gains


def noisy_csi_from_profile(
    profile: np.ndarray, config: RadioConfig, noise_power: float, rng
) -> np.ndarray:
    """Tile a per-subcarrier profile across symbols and add seeded noise.

    Shared by synthesize_csi and the sweep simulator so both produce
    bit-identical entries for the same stream.
    """
    if noise_power < 0:
        raise ConfigError("noise power must be non-negative")
    shape = (config.n_subcarriers, config.n_symbols)
    entries = np.empty(shape, dtype=complex)
    if noise_power > 0:
        rng.standard_normal(out=entries.view(np.float64))
        entries *= np.sqrt(noise_power / 2)
        entries += np.asarray(profile, dtype=complex)[:, None]
    else:
        entries[:] = np.asarray(profile, dtype=complex)[:, None]
    return entries


def synthesize_csi(
    config: RadioConfig,
    scatterers: Sequence[Scatterer],
    geom: ArrayGeometry,
    weights: BeamformingWeights,
    steer: NafAngle,
    noise_power: float,
    rng_seed,
) -> FrameCsi:
    """Synthesize one frame of CSI for a static scene at one steering NAF.

    Parameters
    ----------
    noise_power : float
        Per-entry variance of the circular complex Gaussian noise.
    rng_seed : int, sequence of ints, or numpy Generator
        Stream for the noise draw; identical seeds give bit-identical frames.
    """
    rng = (
        rng_seed
        if isinstance(rng_seed, np.random.Generator)
        else np.random.default_rng(rng_seed)
    )
    base = scene_subcarrier_profile(config, scatterers, geom, weights, steer)
    return FrameCsi(noisy_csi_from_profile(base, config, noise_power, rng), config)


@dataclass(frozen=True)
class Periodogram:
    """Squared-magnitude range-Doppler transform of one CSI frame."""

    power: np.ndarray  # (range_fft_size, n_symbols)
    config: RadioConfig

    def __post_init__(self):
        p = np.asarray(self.power, dtype=float)
        p.flags.writeable = False
        object.__setattr__(self, "power", p)

    @property
    def range_axis(self) -> np.ndarray:
        return self.config.range_axis()

    @property
    def zero_doppler(self) -> np.ndarray:
        return self.power[:, 0]


def range_doppler_periodogram(csi: FrameCsi) -> Periodogram:
    """IDFT across subcarriers (zero-padded), DFT across symbols, |.|^2.

    Total output power equals the CSI energy times n_symbols / range_fft_size
    (Parseval with this normalization).
    """
    cfg = csi.config
    ranged = np.fft.ifft(csi.entries, n=cfg.range_fft_size, axis=0)
    moved = np.fft.fft(ranged, axis=1)
    return Periodogram(np.abs(moved) ** 2, cfg)


def zero_doppler_profile(csi: FrameCsi) -> np.ndarray:
    """Complex zero-Doppler range profile: IDFT of the symbol-summed CSI.

    Equals the zero-Doppler column of the full transform (summing symbols
    first commutes with the subcarrier IDFT up to float rounding).
    """
    cfg = csi.config
    return np.fft.ifft(csi.entries.sum(axis=1), n=cfg.range_fft_size)


def collapse_to_angle_value(
    pg: Periodogram, range_gate: Tuple[float, float]
) -> Tuple[float, float]:
    """Max zero-Doppler power inside the gate and the range it occurs at.

    The gate (min_m, max_m) is the interval to KEEP; bins are compared by
    center. Returns (power, range_m).
    """
    lo, hi = range_gate
    bins = pg.config.window_bins()
    centers = pg.range_axis[bins]
    keep = (centers >= lo) & (centers <= hi)
    if not np.any(keep):
        raise ConfigError("range gate keeps no display bins")
    column = pg.zero_doppler[bins][keep]
    i = int(np.argmax(column))
    return float(column[i]), float(centers[keep][i])


def average_frames(values, count: int | None = None) -> float:
    """Arithmetic mean of the first `count` per-frame magnitudes."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ConfigError("cannot average zero frames")
    n = values.size if count is None else count
    if not 1 <= n <= values.size:
        raise ConfigError("count must be in [1, len(values)]")
    return float(np.mean(values[:n]))


@dataclass(frozen=True)
class RangeAngleMap:
    """Display intensity map over range (rows) and NAF (columns)."""

    power: np.ndarray  # (n_range, n_angle), non-negative
    range_axis: np.ndarray
    naf_axis: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.power, dtype=float)
        r = np.asarray(self.range_axis, dtype=float)
        a = np.asarray(self.naf_axis, dtype=float)
        if p.shape != (r.size, a.size):
            raise ConfigError("map shape must be (n_range, n_angle)")
        if r.size > 1 and not np.all(np.diff(r) > 0):
            raise ConfigError("range axis must be strictly increasing")
        if a.size > 1 and not np.all(np.diff(a) > 0):
            raise ConfigError("NAF axis must be strictly increasing")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise ConfigError("map power must be finite and non-negative")
        for name, arr in (("power", p), ("range_axis", r), ("naf_axis", a)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def dump_ramp(map_: RangeAngleMap, path) -> None:
    """Write the map in the little-endian RAMP v1 binary layout."""
    n_range, n_angle = map_.power.shape
    header = _RAMP_HEADER.pack(
        _RAMP_MAGIC,
        _RAMP_VERSION,
        n_range,
        n_angle,
        float(map_.range_axis[0]),
        float(map_.range_axis[-1]),
        float(map_.naf_axis[0]),
        float(map_.naf_axis[-1]),
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(map_.power, dtype="<f8").tobytes())


def load_ramp(path) -> RangeAngleMap:
    """Read a RAMP v1 file back into a map (axes rebuilt as linear spans)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _RAMP_HEADER.size or raw[:4] != _RAMP_MAGIC:
        raise ConfigError("not a RAMP file")
    _, version, n_range, n_angle, r0, r1, a0, a1 = _RAMP_HEADER.unpack_from(raw)
    if version != _RAMP_VERSION:
        raise ConfigError(f"unsupported RAMP version {version}")
    data = np.frombuffer(raw, dtype="<f8", count=n_range * n_angle, offset=_RAMP_HEADER.size)
    power = data.reshape(n_range, n_angle).copy()
    range_axis = np.linspace(r0, r1, n_range) if n_range > 1 else np.array([r0])
    naf_axis = np.linspace(a0, a1, n_angle) if n_angle > 1 else np.array([a0])
    return RangeAngleMap(power, range_axis, naf_axis)


def dump_csv(map_: RangeAngleMap, path) -> None:
    """CSV mirror of the RAMP grid: header row of NAFs, rows led by range."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["range_m"] + [repr(float(v)) for v in map_.naf_axis])
        for r, row in zip(map_.range_axis, map_.power):
            writer.writerow([repr(float(r))] + [repr(float(v)) for v in row])
