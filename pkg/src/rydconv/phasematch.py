"""Phase matching of the six-wave-mixing signal and the converter reception pattern.

All optical fields are focused Gaussian beams sharing the waist ``w0`` and the
focus ``z0`` at the cell centre.  Field convention is ``exp(+i k z)`` for a beam
travelling along +z, so the Gouy phase enters as ``-arctan(z/z_R)``.  The
cell spans ``[-L/2, L/2]``.

The signal wavenumber is fixed by energy conservation,
``k_s = k_c - k_d + k_MW`` (the probe enters as ``|E_p|^2`` and drops out),
so a collinear plane-wave geometry is perfectly matched and the remaining
mismatch comes from the MW angle and the Gouy phases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import constants as C
from .config import ConverterConfig


class QuadratureNotConverged(RuntimeError):
    pass


@dataclass(frozen=True)
class GaussianMode:
    wavelength: float
    waist: float
    z0: float = 0.0
    direction: int = 1

    def __post_init__(self):
        if self.wavelength <= 0 or self.waist <= 0:
            raise ValueError("wavelength and waist must be positive")
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")

    @property
    def k(self):
        return C.TWO_PI / self.wavelength

    @property
    def rayleigh_range(self):
        return np.pi * self.waist**2 / self.wavelength

    def width(self, z):
        return self.waist * np.sqrt(1 + ((np.asarray(z) - self.z0) / self.rayleigh_range) ** 2)


def gaussian_amplitude(mode: GaussianMode, rho, z):
    """Complex amplitude of a focused Gaussian beam, unit peak at the focus.

    Includes wavefront curvature and the Gouy phase through the complex beam
    parameter: ``u = exp(i s k dz) / (1 + i zeta) * exp(-rho^2 / (w0^2 (1 + i zeta)))``
    with ``zeta = s dz / z_R`` and ``s`` the propagation direction.
    """
    dz = np.asarray(z, dtype=float) - mode.z0
    zeta = mode.direction * dz / mode.rayleigh_range
    q = 1 + 1j * zeta
    return np.exp(1j * mode.direction * mode.k * dz) / q * np.exp(-np.asarray(rho) ** 2 / (mode.waist**2 * q))


def gouy_phase(mode: GaussianMode, z):
    """On-axis phase of ``gaussian_amplitude`` relative to the plane wave."""
    return -np.arctan(mode.direction * (np.asarray(z) - mode.z0) / mode.rayleigh_range)


@dataclass(frozen=True)
class MixingGeometry:
    """Beams, cell and MW wave entering the phase-matching integral."""

    probe: GaussianMode
    coupling: GaussianMode
    decoupling: GaussianMode
    signal: GaussianMode
    k_mw: float
    cell_length: float
    absorption: float = 0.0
    probe_factors: int = 2  # how many probe amplitudes carry exp(-alpha z)

    @classmethod
    def from_config(cls, config: ConverterConfig, absorption=None, probe_factors=2, k_mw=None,
                    signal_wavenumber=None):
        w0 = config.beam_waist

        def mode(k):
            return GaussianMode(C.TWO_PI / abs(k), w0, 0.0, int(np.sign(k)))

        k_mw = abs(config.wavevector_mw) if k_mw is None else k_mw
        if signal_wavenumber is None:
            signal_wavenumber = abs(config.wavevector_coupling) - abs(config.wavevector_decoupling) + k_mw
        return cls(
            probe=mode(config.wavevector_probe),
            coupling=mode(config.wavevector_coupling),
            decoupling=mode(config.wavevector_decoupling),
            signal=GaussianMode(C.TWO_PI / signal_wavenumber, w0, 0.0, 1),
            k_mw=k_mw,
            cell_length=config.cell_length,
            absorption=config.probe_absorption if absorption is None else absorption,
            probe_factors=probe_factors,
        )

    def probe_depth(self, z):
        """Distance travelled inside the cell by the probe at position z."""
        return self.probe.direction * np.asarray(z) + 0.5 * self.cell_length

    def rho_max(self, cutoff=3.0):
        zmax = 0.5 * self.cell_length
        return cutoff * max(m.width(zmax) for m in (self.probe, self.coupling, self.decoupling, self.signal))


def susceptibility(geom: MixingGeometry, theta, x, y, z):
    """Nonlinear source ``|E_p|^2 E_c E_d^* E_MW(theta)`` at Cartesian points."""
    rho = np.hypot(x, y)
    ep = np.abs(gaussian_amplitude(geom.probe, rho, z)) ** 2
    ep = ep * np.exp(-geom.probe_factors * geom.absorption * geom.probe_depth(z))
    ec = gaussian_amplitude(geom.coupling, rho, z)
    ed = np.conj(gaussian_amplitude(geom.decoupling, rho, z))
    emw = np.exp(1j * geom.k_mw * (np.sin(theta) * x + np.cos(theta) * z))
    return ep * ec * ed * emw


def _nodes(a, b, n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _eta_raw(geom: MixingGeometry, thetas, nz, nr, nphi):
    L = geom.cell_length
    z, wz = _nodes(-L / 2, L / 2, nz)
    r, wr = _nodes(0.0, geom.rho_max(), nr)
    phi, wphi = _nodes(0.0, C.TWO_PI, nphi)
    Z, R, P = np.meshgrid(z, r, phi, indexing="ij")
    W = wz[:, None, None] * (wr * r)[None, :, None] * wphi[None, None, :]
    X, Y = R * np.cos(P), R * np.sin(P)
    # theta-independent part of the integrand
    rho = R
    ep = np.abs(gaussian_amplitude(geom.probe, rho, Z)) ** 2 * np.exp(
        -geom.probe_factors * geom.absorption * geom.probe_depth(Z))
    base = W * ep * gaussian_amplitude(geom.coupling, rho, Z) * np.conj(gaussian_amplitude(geom.decoupling, rho, Z))
    base = base * np.conj(gaussian_amplitude(geom.signal, rho, Z))
    out = np.empty(len(thetas), dtype=complex)
    for i, th in enumerate(thetas):
        out[i] = np.sum(base * np.exp(1j * geom.k_mw * (np.sin(th) * X + np.cos(th) * Z)))
    return out


def eta_phm(geom: MixingGeometry, thetas, nz=64, nr=24, nphi=16, check=True, normalize=True, rtol=5e-3):
    """Phase-matching overlap ``integral chi_theta u_s^* dV`` at each angle.

    With ``normalize`` the result is divided by its largest modulus over the
    supplied angles.  ``check`` repeats the integral with doubled nodes and
    raises :class:`QuadratureNotConverged` if any |eta| moves by more than
    ``rtol`` of the maximum.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    eta = _eta_raw(geom, thetas, nz, nr, nphi)
    scale = np.abs(eta).max()
    if check:
        fine = _eta_raw(geom, thetas, 2 * nz, 2 * nr, 2 * nphi)
        err = np.max(np.abs(np.abs(fine) - np.abs(eta))) / np.abs(fine).max()
        if err > rtol:
            raise QuadratureNotConverged(f"phase-matching integral changed by {err:.2%} on doubling nodes")
    if normalize and scale > 0:
        eta = eta / scale
    return eta


def polarization_factors(theta):
    """(sigma+, sigma-) projection weights for a MW wave arriving at ``theta``."""
    c2 = np.cos(np.asarray(theta) / 2) ** 2
    s2 = np.sin(np.asarray(theta) / 2) ** 2
    return c2**2 + s2**2, 2 * c2 * s2


@dataclass(frozen=True)
class ReceptionPattern:
    theta: np.ndarray
    gain_sigma_plus: np.ndarray
    gain_sigma_minus: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float)
        gp = np.asarray(self.gain_sigma_plus, dtype=float)
        gm = np.asarray(self.gain_sigma_minus, dtype=float)
        if not (th.shape == gp.shape == gm.shape) or th.ndim != 1:
            raise ValueError("theta and gains must be 1D arrays of equal length")
        if np.any(gp < 0) or np.any(gm < 0):
            raise ValueError("gains must be non-negative")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "gain_sigma_plus", gp)
        object.__setattr__(self, "gain_sigma_minus", gm)

    @property
    def total(self):
        """Gain summed over both polarisations (isotropic full acceptance is 2)."""
        return self.gain_sigma_plus + self.gain_sigma_minus

    def acceptance(self) -> float:
        """``(1/4pi) integral |eta|^2 dOmega`` with both polarisations summed."""
        return 0.5 * float(np.trapezoid(self.total * np.sin(self.theta), self.theta))

    def to_db(self, floor=1e-12):
        return (10 * np.log10(np.maximum(self.gain_sigma_plus, floor)),
                10 * np.log10(np.maximum(self.gain_sigma_minus, floor)))


def reception_pattern(config: ConverterConfig | None = None, n_theta=181, geometry: MixingGeometry | None = None,
                      **quad) -> ReceptionPattern:
    """Polarisation-resolved reception pattern on ``n_theta`` angles over [0, pi]."""
    if n_theta < 91:
        raise ValueError("n_theta must be at least 91")
    geom = geometry or MixingGeometry.from_config(config or ConverterConfig())
    theta = np.linspace(0.0, np.pi, n_theta)
    eta2 = np.abs(eta_phm(geom, theta, **quad)) ** 2
    fp, fm = polarization_factors(theta)
    gp, gm = fp * eta2, fm * eta2
    peak = gp.max()
    return ReceptionPattern(theta, gp / peak, gm / peak)


def coupling_fraction(pattern: ReceptionPattern) -> float:
    """Fraction of isotropic, unpolarised radiation accepted (1 for |eta|^2 = 2)."""
    if pattern.theta[0] > 1e-9 or abs(pattern.theta[-1] - np.pi) > 1e-9:
        raise ValueError("pattern must cover [0, pi]")
    return pattern.acceptance() / 2.0
