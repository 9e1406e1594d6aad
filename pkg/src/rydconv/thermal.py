"""Black-body coupling: Planck occupation, noise-equivalent fields and unit chains.

Field convention: ``E`` is the peak amplitude of the oscillating field and
``I = c eps0 E^2 / 2``.  Spectral field densities are in V m^-1 (rad/s)^-1/2,
so multiplying by the square root of an angular bandwidth gives a field.
"""

from __future__ import annotations

import numpy as np

from . import constants as C


def planck_energy(omega, T):
    """Mean thermal energy per mode, ``hbar w / (exp(hbar w / kT) - 1)`` (J)."""
    omega = np.asarray(omega, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("omega must be positive")
    with np.errstate(divide="ignore", over="ignore"):
        x = C.hbar * omega / (C.k_B * T)
        out = np.where(T > 0, C.hbar * omega / np.expm1(x), 0.0)
    return out[()] if out.ndim == 0 else out


def _acceptance(pattern_or_acceptance):
    """``(1/4pi) integral |eta|^2 dOmega`` from a pattern or a plain number."""
    if hasattr(pattern_or_acceptance, "acceptance"):
        return pattern_or_acceptance.acceptance()
    a = float(pattern_or_acceptance)
    if a < 0:
        raise ValueError("acceptance must be non-negative")
    return a


def effective_field_spectral_density(T, pattern, omega=C.TWO_PI * C.MW_FREQUENCY_HZ):
    """``sqrt(w^2 <E>/(pi^2 c^3 eps0) * (1/4pi) integral |eta|^2 dOmega)``.

    ``pattern`` is a :class:`~rydconv.phasematch.ReceptionPattern` or the
    angular acceptance integral itself (2 for full two-polarisation acceptance).
    """
    mode_term = omega**2 * planck_energy(omega, T) / (np.pi**2 * C.c**3 * C.epsilon_0)
    return np.sqrt(mode_term * _acceptance(pattern))


def total_field_fluctuations(T, omega=C.TWO_PI * C.MW_FREQUENCY_HZ):
    """Spectral field density with isotropic acceptance of both polarisations."""
    return effective_field_spectral_density(T, 2.0, omega)


def band_integrate_field(density, bandwidth):
    """Field amplitude (V/m) collected over an angular bandwidth (rad/s)."""
    if np.any(np.asarray(bandwidth) < 0):
        raise ValueError("bandwidth must be non-negative")
    return density * np.sqrt(bandwidth)


def intensity_from_field(E):
    return 0.5 * C.c * C.epsilon_0 * np.asarray(E) ** 2


def field_from_intensity(I):
    I = np.asarray(I, dtype=float)
    if np.any(I < 0):
        raise ValueError("intensity must be non-negative")
    return np.sqrt(2 * I / (C.c * C.epsilon_0))


def rabi_from_field(E, d):
    """Rabi frequency ``d E / hbar`` (rad/s)."""
    if d <= 0:
        raise ValueError("dipole moment must be positive")
    return d * np.asarray(E) / C.hbar


def field_from_rabi(rabi, d):
    if d <= 0:
        raise ValueError("dipole moment must be positive")
    return C.hbar * np.asarray(rabi) / d


def noise_equivalent_temperature(rate_noise, rate_thermal_ref, T_ref):
    """Black-body temperature whose converted rate equals ``rate_noise``.

    Uses the Rayleigh-Jeans proportionality of the thermal rate to temperature
    (accurate to ~0.2% at 13.9 GHz above a few kelvin).
    """
    if rate_thermal_ref <= 0:
        raise ValueError("reference thermal rate must be positive")
    return T_ref * rate_noise / rate_thermal_ref


def photon_flux(intensity, aperture, omega):
    """Photons per second carried by ``intensity`` through ``aperture``."""
    return np.asarray(intensity) * aperture / (C.hbar * omega)


def thermal_photon_rate(T, pattern, bandwidth, aperture, efficiency_chain, omega=C.TWO_PI * C.MW_FREQUENCY_HZ):
    """Predicted detected rate of converted thermal photons (1/s).

    Chains spectral density -> band-integrated field -> intensity -> MW photon
    flux through the aperture -> multiplied by the overall efficiency chain.
    """
    density = effective_field_spectral_density(T, pattern, omega)
    I = intensity_from_field(band_integrate_field(density, bandwidth))
    return photon_flux(I, aperture, omega) * efficiency_chain
