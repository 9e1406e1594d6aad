"""Converter parameters and their on-disk representation.

The on-disk format is a plain INI file (read with :mod:`configparser`).  Every
key carries its unit in the name, e.g. ``rabi.probe_MHz_2pi``, so a config
file can be read without consulting any documentation.  Internally all values
are SI with angular frequencies in rad/s.
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import io
import math
from dataclasses import dataclass, field

from . import constants as C


class ConfigError(ValueError):
    """Invalid or inconsistent converter configuration."""


@dataclass(frozen=True)
class ConverterConfig:
    """All physical parameters of the converter (SI, rad/s).

    Wavevectors are signed: a positive value propagates along +z.  The probe
    counter-propagates with respect to the coupling and decoupling beams.
    Decay and dephasing rates are not reported for the experiment; the
    defaults are literature-typical values for 85Rb, not measured ones.
    """

    rabi_probe: float = C.mhz(8.0)
    rabi_coupling: float = C.mhz(22.0)
    rabi_mw: float = C.mhz(0.01)
    rabi_decoupling: float = C.mhz(17.0)

    # Working point: 55D level detuned by +16, every other level on resonance.
    detuning_probe: float = 0.0
    detuning_coupling: float = C.mhz(16.0)
    detuning_mw: float = C.mhz(-16.0)
    detuning_decoupling: float = 0.0

    decay_e: float = C.mhz(6.07)
    decay_r1: float = C.KHZ_2PI * 2.0
    decay_r2: float = C.KHZ_2PI * 2.0
    decay_s: float = C.mhz(0.66)
    transit_rate: float = C.mhz(0.35)
    dephasing_rate: float = C.mhz(1.0)

    wavevector_probe: float = -C.wavenumber(C.WAVELENGTH_PROBE)
    wavevector_coupling: float = C.wavenumber(C.WAVELENGTH_COUPLING)
    wavevector_mw: float = C.wavenumber(C.WAVELENGTH_MW)
    wavevector_decoupling: float = C.wavenumber(C.WAVELENGTH_DECOUPLING)

    temperature_cell: float = 315.0
    atomic_mass: float = C.MASS_RB85
    beam_waist: float = 100e-6
    cell_length: float = 50e-3
    probe_absorption: float = 19.0
    dipole_mw: float = 2500 * C.a0 * C.e
    dipole_signal: float = 0.95 * C.a0 * C.e
    atomic_density: float = 7e16
    effective_length: float = 25e-3
    mw_frequency: float = C.TWO_PI * C.MW_FREQUENCY_HZ
    signal_frequency: float = C.TWO_PI * C.c / C.WAVELENGTH_SIGNAL
    environment_temperature: float = 300.0

    def __post_init__(self):
        validate(self)

    @property
    def level_detuning_55d(self) -> float:
        return self.detuning_probe + self.detuning_coupling

    @property
    def level_detuning_54f(self) -> float:
        return self.level_detuning_55d + self.detuning_mw

    def replace(self, **changes) -> "ConverterConfig":
        return dataclasses.replace(self, **changes)


_RATES = ("decay_e", "decay_r1", "decay_r2", "decay_s", "transit_rate", "dephasing_rate")
_POSITIVE = (
    "beam_waist",
    "cell_length",
    "atomic_mass",
    "atomic_density",
    "effective_length",
    "dipole_mw",
    "dipole_signal",
    "mw_frequency",
    "signal_frequency",
)


def validate(cfg: ConverterConfig) -> None:
    """Check the type invariants, raising :class:`ConfigError` naming the field."""
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if not math.isfinite(value):
            raise ConfigError(f"{f.name} must be finite, got {value!r}")
    for name in _RATES:
        if getattr(cfg, name) < 0:
            raise ConfigError(f"{name} must be non-negative, got {getattr(cfg, name)!r}")
    for name in _POSITIVE:
        if getattr(cfg, name) <= 0:
            raise ConfigError(f"{name} must be strictly positive, got {getattr(cfg, name)!r}")
    for name in ("temperature_cell", "environment_temperature", "probe_absorption"):
        if getattr(cfg, name) < 0:
            raise ConfigError(f"{name} must be >= 0, got {getattr(cfg, name)!r}")
    if cfg.decay_e + cfg.transit_rate <= 0:
        raise ConfigError("decay_e or transit_rate must be positive for a unique steady state")
    kp = cfg.wavevector_probe
    for name in ("wavevector_coupling", "wavevector_decoupling"):
        k = getattr(cfg, name)
        if kp == 0 or k == 0 or math.copysign(1.0, kp) == math.copysign(1.0, k):
            raise ConfigError(
                f"wavevector_probe must counter-propagate with {name} "
                f"(got {kp:.6g} and {k:.6g})"
            )


# ---------------------------------------------------------------------------
# INI representation
# ---------------------------------------------------------------------------

# field -> (dotted key, SI value per file unit)
_KEYS: dict[str, tuple[str, float]] = {
    "rabi_probe": ("rabi.probe_MHz_2pi", C.MHZ_2PI),
    "rabi_coupling": ("rabi.coupling_MHz_2pi", C.MHZ_2PI),
    "rabi_mw": ("rabi.mw_MHz_2pi", C.MHZ_2PI),
    "rabi_decoupling": ("rabi.decoupling_MHz_2pi", C.MHZ_2PI),
    "detuning_probe": ("detuning.probe_MHz_2pi", C.MHZ_2PI),
    "detuning_coupling": ("detuning.coupling_MHz_2pi", C.MHZ_2PI),
    "detuning_mw": ("detuning.mw_MHz_2pi", C.MHZ_2PI),
    "detuning_decoupling": ("detuning.decoupling_MHz_2pi", C.MHZ_2PI),
    "decay_e": ("decay.e_MHz_2pi", C.MHZ_2PI),
    "decay_r1": ("decay.r1_kHz_2pi", C.KHZ_2PI),
    "decay_r2": ("decay.r2_kHz_2pi", C.KHZ_2PI),
    "decay_s": ("decay.s_MHz_2pi", C.MHZ_2PI),
    "transit_rate": ("decay.transit_MHz_2pi", C.MHZ_2PI),
    "dephasing_rate": ("decay.dephasing_MHz_2pi", C.MHZ_2PI),
    "wavevector_probe": ("wavevector.probe_rad_per_um", 1e6),
    "wavevector_coupling": ("wavevector.coupling_rad_per_um", 1e6),
    "wavevector_mw": ("wavevector.mw_rad_per_m", 1.0),
    "wavevector_decoupling": ("wavevector.decoupling_rad_per_um", 1e6),
    "temperature_cell": ("atoms.cell_temperature_K", 1.0),
    "atomic_mass": ("atoms.mass_amu", C.amu),
    "atomic_density": ("atoms.density_per_m3", 1.0),
    "beam_waist": ("geometry.beam_waist_um", 1e-6),
    "cell_length": ("geometry.cell_length_mm", 1e-3),
    "effective_length": ("geometry.effective_length_mm", 1e-3),
    "probe_absorption": ("geometry.probe_absorption_per_m", 1.0),
    "dipole_mw": ("dipoles.mw_a0e", C.a0 * C.e),
    "dipole_signal": ("dipoles.signal_a0e", C.a0 * C.e),
    "mw_frequency": ("frequencies.mw_GHz_2pi", C.TWO_PI * 1e9),
    "signal_frequency": ("frequencies.signal_THz_2pi", C.TWO_PI * 1e12),
    "environment_temperature": ("environment.temperature_K", 1.0),
}
_BY_KEY = {key: (name, scale) for name, (key, scale) in _KEYS.items()}


def to_display(cfg: ConverterConfig) -> dict[str, float]:
    """Dotted-key dictionary in file units."""
    return {key: getattr(cfg, name) / scale for name, (key, scale) in _KEYS.items()}


def dumps(cfg: ConverterConfig) -> str:
    """Serialize to INI text.  The output is deterministic for a given config."""
    sections: dict[str, list[str]] = {}
    for key, value in to_display(cfg).items():
        section, opt = key.split(".", 1)
        sections.setdefault(section, []).append(f"{opt} = {value!r}")
    out = io.StringIO()
    for section, lines in sections.items():
        out.write(f"[{section}]\n")
        out.write("\n".join(lines))
        out.write("\n\n")
    return out.getvalue()


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as a number") from None


def from_mapping(values: dict[str, object], base: ConverterConfig | None = None) -> ConverterConfig:
    """Build a config from dotted keys in file units, on top of ``base``."""
    changes = {}
    for key, raw in values.items():
        if key not in _BY_KEY:
            raise ConfigError(f"unknown config key {key!r}")
        name, scale = _BY_KEY[key]
        changes[name] = _parse_float(key, str(raw)) * scale
    base = base if base is not None else ConverterConfig()
    return dataclasses.replace(base, **changes)


def loads(text: str, overrides: dict[str, object] | None = None) -> ConverterConfig:
    """Parse INI text (plus optional dotted-key overrides) into a config."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep unit capitalisation
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    values: dict[str, object] = {}
    for section in parser.sections():
        for opt, raw in parser.items(section):
            values[f"{section}.{opt}"] = raw
    values.update(overrides or {})
    return from_mapping(values)


def load(path, overrides: dict[str, object] | None = None) -> ConverterConfig:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), overrides)


def config_hash(cfg: ConverterConfig) -> str:
    return hashlib.sha256(dumps(cfg).encode()).hexdigest()[:16]


def diagnostics(cfg: ConverterConfig) -> list[str]:
    """Warnings for parameters more than 10x away from the defaults."""
    ref = ConverterConfig()
    out = []
    for name, (key, _) in _KEYS.items():
        a, b = abs(getattr(cfg, name)), abs(getattr(ref, name))
        if a == 0 or b == 0:
            continue
        if a > 10 * b or a < b / 10:
            out.append(f"warning: {key} deviates more than 10x from the default ({a:.4g} vs {b:.4g} SI)")
    return out


def validate_config(path) -> list[str]:
    """Load and validate a config file; return warnings, raise on errors."""
    return diagnostics(load(path))
