"""Parameter sweeps of the ensemble-averaged conversion response.

A :class:`Spectrum` is a sampled 1D curve (conversion intensity against one
swept variable), a :class:`DetuningMap` the 2D counterpart over the two Rydberg
level detunings.  Width estimators (:func:`fwhm`, :func:`integral_bandwidth`)
work on any :class:`Spectrum`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import thermal
from .config import ConverterConfig
from .ensemble import BeamGrid, VelocityGrid, average_many, default_grids


class NoPeak(ValueError):
    """The maximum of the curve sits on the boundary of the sampled axis."""


class MultiPeakWarning(UserWarning):
    """More than two half-maximum crossings; the widest pair was used."""


@dataclass(frozen=True)
class Spectrum:
    axis_name: str
    axis: np.ndarray
    values: np.ndarray
    normalization: str = "none"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if axis.ndim != 1 or axis.shape != values.shape:
            raise ValueError("axis and values must be 1D arrays of equal length")
        d = np.diff(axis)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("axis must be strictly monotone")
        if np.any(values < 0):
            raise ValueError("spectrum values must be non-negative")
        if self.normalization not in ("none", "max", "integral"):
            raise ValueError(f"unknown normalization {self.normalization!r}")
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "values", values)

    def normalized(self, how="max") -> "Spectrum":
        if how == "max":
            v = self.values / self.values.max()
        elif how == "integral":
            v = self.values / abs(np.trapezoid(self.values, self.axis))
        else:
            raise ValueError(f"unknown normalization {how!r}")
        return Spectrum(self.axis_name, self.axis, v, how, dict(self.metadata))


@dataclass(frozen=True)
class DetuningMap:
    axis_55d: np.ndarray
    axis_54f: np.ndarray
    values: np.ndarray  # shape (len(axis_55d), len(axis_54f))
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        a1 = np.asarray(self.axis_55d, dtype=float)
        a2 = np.asarray(self.axis_54f, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if v.shape != (a1.size, a2.size):
            raise ValueError("map values must have shape (n_55d, n_54f)")
        if np.any(v < 0):
            raise ValueError("map values must be non-negative")
        object.__setattr__(self, "axis_55d", a1)
        object.__setattr__(self, "axis_54f", a2)
        object.__setattr__(self, "values", v)

    def argmax(self):
        i, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.axis_55d[i]), float(self.axis_54f[j])


def _run(configs, vgrid, bgrid, threads):
    if vgrid is None or bgrid is None:
        dv, db = default_grids(configs[0])
        vgrid = vgrid or dv
        bgrid = bgrid or db
    return np.array([r["coherence_intensity"] for r in average_many(configs, vgrid, bgrid, threads=threads)])


def sweep_mw_detuning(config: ConverterConfig, detunings, vgrid: VelocityGrid | None = None,
                      bgrid: BeamGrid | None = None, threads=1) -> Spectrum:
    """Conversion intensity against ``detuning_mw`` (rad/s), other detunings fixed."""
    detunings = np.asarray(detunings, dtype=float)
    configs = [config.replace(detuning_mw=float(d)) for d in detunings]
    return Spectrum("detuning_mw", detunings, _run(configs, vgrid, bgrid, threads))


def mw_rabi_from_intensity(config: ConverterConfig, intensity):
    return thermal.rabi_from_field(thermal.field_from_intensity(intensity), config.dipole_mw)


def sweep_mw_power(config: ConverterConfig, intensities, vgrid: VelocityGrid | None = None,
                   bgrid: BeamGrid | None = None, threads=1) -> Spectrum:
    """Converted intensity against incident MW intensity (W/m^2)."""
    intensities = np.asarray(intensities, dtype=float)
    if np.any(intensities <= 0):
        raise ValueError("MW intensities must be positive")
    rabi = mw_rabi_from_intensity(config, intensities)
    configs = [config.replace(rabi_mw=float(o)) for o in rabi]
    return Spectrum("mw_intensity", intensities, _run(configs, vgrid, bgrid, threads))


def loglog_slope(spectrum: Spectrum, n_points=5) -> float:
    """Least-squares log-log slope over the first ``n_points`` samples."""
    x = np.log(spectrum.axis[:n_points])
    y = np.log(spectrum.values[:n_points])
    return float(np.polyfit(x, y, 1)[0])


def relative_efficiency(spectrum: Spectrum) -> np.ndarray:
    """Converted/incident ratio normalised to its low-intensity value."""
    ratio = spectrum.values / spectrum.axis
    return ratio / ratio[0]


def saturation_onset(spectrum: Spectrum, drop_db=3.0) -> float:
    """Intensity where the response falls ``drop_db`` below the linear extrapolation.

    Returns ``inf`` if the drop is never reached in the sampled range.
    """
    rel_db = 10 * np.log10(relative_efficiency(spectrum))
    below = np.flatnonzero(rel_db <= -drop_db)
    if below.size == 0:
        return float("inf")
    i = below[0]
    if i == 0:
        return float(spectrum.axis[0])
    # interpolate in log-intensity
    x0, x1 = np.log10(spectrum.axis[i - 1]), np.log10(spectrum.axis[i])
    y0, y1 = rel_db[i - 1], rel_db[i]
    return float(10 ** (x0 + (-drop_db - y0) * (x1 - x0) / (y1 - y0)))


def saturation_intensity(spectrum: Spectrum) -> float:
    """MW intensity at which the converted output peaks (parabola in log-intensity)."""
    v = spectrum.values
    i = int(np.argmax(v))
    if i == 0 or i == v.size - 1:
        raise NoPeak("converted output does not peak inside the sampled intensity range")
    x = np.log10(spectrum.axis[i - 1:i + 2])
    a, b, _ = np.polyfit(x, v[i - 1:i + 2], 2)
    return float(10 ** (-b / (2 * a)))


def linear_range_db(spectrum: Spectrum, threshold=0.5) -> float:
    """Span (dB) of the contiguous low-end range with relative efficiency >= threshold."""
    rel = relative_efficiency(spectrum)
    bad = np.flatnonzero(rel < threshold)
    last = (bad[0] - 1) if bad.size else rel.size - 1
    return float(10 * np.log10(spectrum.axis[last] / spectrum.axis[0]))


def level_to_field_detunings(d55, d54, mapping="wavevector", config: ConverterConfig | None = None):
    """Field detunings (probe, coupling, mw, decoupling) realising given level detunings.

    ``mapping="wavevector"`` shares ``d55`` between probe and coupling in
    proportion to their wavenumbers; ``mapping="coupling"`` puts all of it on
    the coupling field.  In both cases the MW supplies ``d54 - d55`` and the
    decoupling is detuned by ``d54`` so that the s level (and hence the
    signal frequency) stays on resonance.
    """
    if mapping == "wavevector":
        config = config or ConverterConfig()
        kp, kc = abs(config.wavevector_probe), abs(config.wavevector_coupling)
        dp, dc = d55 * kp / (kp + kc), d55 * kc / (kp + kc)
    elif mapping == "coupling":
        dp, dc = 0.0 * d55, d55
    else:
        raise ValueError(f"unknown mapping {mapping!r}")
    return dp, dc, d54 - d55, d54


def at_level_detunings(config: ConverterConfig, d55, d54, mapping="wavevector") -> ConverterConfig:
    dp, dc, dm, dd = level_to_field_detunings(d55, d54, mapping, config)
    return config.replace(detuning_probe=float(dp), detuning_coupling=float(dc),
                          detuning_mw=float(dm), detuning_decoupling=float(dd))


def sweep_level_detuning(config: ConverterConfig, d55_values, d54=0.0, mapping="wavevector",
                         vgrid=None, bgrid=None, threads=1) -> Spectrum:
    """1D cut of the level map along the 55D detuning at fixed 54F detuning."""
    d55_values = np.asarray(d55_values, dtype=float)
    configs = [at_level_detunings(config, d, d54, mapping) for d in d55_values]
    return Spectrum("level_detuning_55d", d55_values, _run(configs, vgrid, bgrid, threads),
                    metadata={"level_detuning_54f": float(d54), "mapping": mapping})


def sweep_level_map(config: ConverterConfig, d55_values, d54_values, mapping="wavevector",
                    vgrid=None, bgrid=None, threads=1) -> DetuningMap:
    d55_values = np.asarray(d55_values, dtype=float)
    d54_values = np.asarray(d54_values, dtype=float)
    configs = [at_level_detunings(config, a, b, mapping) for a in d55_values for b in d54_values]
    vals = _run(configs, vgrid, bgrid, threads).reshape(d55_values.size, d54_values.size)
    return DetuningMap(d55_values, d54_values, vals, {"mapping": mapping})


def sweep_probe_detuning(config: ConverterConfig, detunings, vgrid=None, bgrid=None, threads=1):
    """Conversion and EIT signal against probe detuning (other fields fixed).

    Returns ``(conversion, eit)`` spectra; the EIT spectrum holds probe
    absorption shifted to be non-negative.
    """
    detunings = np.asarray(detunings, dtype=float)
    if vgrid is None or bgrid is None:
        dv, db = default_grids(config)
        vgrid = vgrid or dv
        bgrid = bgrid or db
    configs = [config.replace(detuning_probe=float(d)) for d in detunings]
    res = average_many(configs, vgrid, bgrid, threads=threads)
    conv = np.array([r["coherence_intensity"] for r in res])
    eit = np.array([r["eit"] for r in res])
    return (Spectrum("detuning_probe", detunings, conv),
            Spectrum("detuning_probe", detunings, eit - min(eit.min(), 0.0)))


def local_maxima(spectrum: Spectrum, rel_height=0.05) -> np.ndarray:
    """Axis positions of interior local maxima (parabolic refinement)."""
    v = spectrum.values
    x = spectrum.axis
    idx = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:]) & (v[1:-1] >= rel_height * v.max())) + 1
    out = []
    for i in idx:
        y0, y1, y2 = v[i - 1], v[i], v[i + 1]
        denom = y0 - 2 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
        out.append(x[i] + shift * (x[i + 1] - x[i - 1]) / 2)
    return np.array(out)


def _crossing(x0, x1, y0, y1, level):
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0)


def fwhm(spectrum: Spectrum) -> float:
    """Full width at half maximum by linear interpolation between samples.

    Raises :class:`NoPeak` if the maximum sits on the axis boundary.  With
    more than two half-maximum crossings the widest pair is used and a
    :class:`MultiPeakWarning` is issued.
    """
    x, v = spectrum.axis, spectrum.values
    if x[0] > x[-1]:
        x, v = x[::-1], v[::-1]
    i = int(np.argmax(v))
    if i == 0 or i == v.size - 1:
        raise NoPeak("maximum at the boundary of the sampled range")
    half = 0.5 * v[i]
    above = v >= half
    edges = np.flatnonzero(above[1:] != above[:-1])
    if edges.size < 2:
        raise NoPeak("half maximum not reached on both sides of the peak")
    if edges.size > 2:
        warnings.warn(f"{edges.size} half-maximum crossings; using the widest pair", MultiPeakWarning)
    lo, hi = edges[0], edges[-1]
    left = _crossing(x[lo], x[lo + 1], v[lo], v[lo + 1], half)
    right = _crossing(x[hi], x[hi + 1], v[hi], v[hi + 1], half)
    return float(right - left)


def integral_bandwidth(spectrum: Spectrum) -> float:
    """Integral width ``(1/max S) * integral S d(axis)`` (trapezoid rule)."""
    v = spectrum.values
    if v.max() <= 0:
        raise ValueError("spectrum must have a positive maximum")
    return float(abs(np.trapezoid(v, spectrum.axis)) / v.max())


def bright_state_positions(rabi_probe, rabi_coupling):
    """Detunings ``(-W, +W)`` with ``W = sqrt(Op^2 + Oc^2)/2`` of the bright dressed states."""
    if rabi_probe < 0 or rabi_coupling < 0:
        raise ValueError("Rabi frequencies must be non-negative")
    if rabi_probe == 0 and rabi_coupling == 0:
        raise ValueError("at least one Rabi frequency must be non-zero")
    w = 0.5 * np.hypot(rabi_probe, rabi_coupling)
    return (-float(w), float(w))
