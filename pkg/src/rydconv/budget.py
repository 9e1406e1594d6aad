"""Efficiency and noise bookkeeping.

Effective apertures of Gaussian products, output loss chains, measured and
theoretical conversion efficiencies, source decomposition of photon rates
measured with lasers switched on/off, and dynamic-range arithmetic.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import constants as C
from . import thermal

# Laser combinations in measurement order: empty, single fields, pairs, all three.
COMBINATIONS = ("none", "p", "c", "d", "p+c", "p+d", "c+d", "p+c+d")

_DESIGN = np.array(
    [
        [1, 0, 0, 0, 0, 0, 0, 0],
        [1, 1, 0, 0, 0, 0, 0, 0],
        [1, 0, 1, 0, 0, 0, 0, 0],
        [1, 0, 0, 1, 0, 0, 0, 0],
        [1, 1, 1, 0, 1, 0, 0, 0],
        [1, 1, 0, 1, 0, 1, 0, 0],
        [1, 0, 1, 1, 0, 0, 1, 0],
        [1, 1, 1, 1, 1, 1, 1, 1],
    ],
    dtype=np.int64,
)
_DESIGN_INV = np.array(
    [
        [1, 0, 0, 0, 0, 0, 0, 0],
        [-1, 1, 0, 0, 0, 0, 0, 0],
        [-1, 0, 1, 0, 0, 0, 0, 0],
        [-1, 0, 0, 1, 0, 0, 0, 0],
        [1, -1, -1, 0, 1, 0, 0, 0],
        [1, -1, 0, -1, 0, 1, 0, 0],
        [1, 0, -1, -1, 0, 0, 1, 0],
        [-1, 1, 1, 1, -1, -1, -1, 1],
    ],
    dtype=np.int64,
)


def design_matrix():
    """The fixed 8x8 on/off design matrix and its integer inverse (copies)."""
    return _DESIGN.copy(), _DESIGN_INV.copy()


def factorial_design(fields=("p", "c", "d")):
    """On/off design for any set of fields, ordered by subset size then position.

    Row ``i`` marks which interaction terms (columns, same ordering) are
    present when exactly the fields of combination ``i`` are on.  For the
    three fields ``p, c, d`` this reproduces :func:`design_matrix`.
    """
    combos = [frozenset()]
    for k in range(1, len(fields) + 1):
        combos += [frozenset(c) for c in itertools.combinations(fields, k)]
    M = np.array([[int(term <= on) for term in combos] for on in combos], dtype=np.int64)
    labels = ["none" if not c else "+".join(f for f in fields if f in c) for c in combos]
    return M, labels


def integer_inverse(M) -> np.ndarray:
    """Exact inverse of an integer matrix with unit determinant (Gauss-Jordan on fractions)."""
    n = len(M)
    A = [[Fraction(int(x)) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    inv = [[x for x in row[n:]] for row in A]
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix has no integer inverse")
    return np.array([[int(x) for x in row] for row in inv], dtype=np.int64)


class NegativeContributionWarning(UserWarning):
    pass


@dataclass
class SourceDecomposition:
    rates: np.ndarray
    contributions: np.ndarray
    labels: tuple = COMBINATIONS
    negative: list = field(default_factory=list)

    def percentages(self):
        """Contributions as a percentage of the all-fields-on rate."""
        return 100.0 * self.contributions / self.rates[-1]

    def as_dict(self):
        return dict(zip(self.labels, map(float, self.contributions)))


def decompose_sources(rates) -> SourceDecomposition:
    """Split on/off photon rates into per-field and interaction contributions.

    Negative contributions (measurement noise) are reported in ``negative``
    and as a :class:`NegativeContributionWarning`, not raised.
    """
    rates = np.asarray(rates)
    if rates.shape != (8,):
        raise ValueError("expected 8 rates ordered as " + ", ".join(COMBINATIONS))
    if np.any(rates < 0):
        raise ValueError("rates must be non-negative")
    if np.issubdtype(rates.dtype, np.integer):
        contrib = _DESIGN_INV @ rates
    else:
        contrib = _DESIGN_INV.astype(float) @ rates.astype(float)
    neg = [COMBINATIONS[i] for i in np.flatnonzero(contrib < 0)]
    if neg:
        warnings.warn(f"negative contributions for {neg}", NegativeContributionWarning)
    return SourceDecomposition(rates, contrib, COMBINATIONS, neg)


def compose_sources(contributions) -> np.ndarray:
    """Forward model: on/off rates produced by the given contributions."""
    contributions = np.asarray(contributions)
    M = _DESIGN if np.issubdtype(contributions.dtype, np.integer) else _DESIGN.astype(float)
    return M @ contributions


def effective_aperture(w0, power=4):
    """Area of ``exp(-2 r^2/w0^2)**power`` over the plane: ``pi w0^2 / (2 power)``."""
    if w0 <= 0:
        raise ValueError("w0 must be positive")
    if power not in (1, 4):
        raise ValueError("power must be 1 (single beam) or 4 (four-field product)")
    return np.pi * w0**2 / (2 * power)


@dataclass(frozen=True)
class LossChain:
    stages: tuple  # of (label, loss fraction)

    def __post_init__(self):
        for label, loss in self.stages:
            if not 0 <= loss < 1:
                raise ValueError(f"loss for {label!r} must be in [0, 1), got {loss}")

    @property
    def transmission(self) -> float:
        return float(np.prod([1 - loss for _, loss in self.stages]))

    @property
    def overall_loss(self) -> float:
        return 1 - self.transmission


#: Output losses of the converter setup.
DEFAULT_LOSS_CHAIN = LossChain((
    ("exit window of the vapor cell", 0.10),
    ("optical filtering setup", 0.19),
    ("fiber coupling", 0.16),
    ("fiber-fiber connector", 0.20),
    ("photon detector", 0.15),
))


def _flag_unphysical(eta):
    if eta > 1:
        warnings.warn(f"efficiency {eta:.3g} exceeds 1; inputs are inconsistent", RuntimeWarning)
    return eta


def measured_efficiency(photon_rate, mw_intensity, aperture, omega_mw=C.TWO_PI * C.MW_FREQUENCY_HZ,
                        loss_chain: LossChain | float | None = None):
    """Detected optical photons per incident MW photon through ``aperture``.

    Passing a loss chain (or a transmission value) divides out the output
    losses, giving the efficiency at the atoms.
    """
    if mw_intensity <= 0 or aperture <= 0:
        raise ValueError("intensity and aperture must be positive")
    eta = photon_rate / thermal.photon_flux(mw_intensity, aperture, omega_mw)
    if loss_chain is not None:
        t = loss_chain.transmission if isinstance(loss_chain, LossChain) else float(loss_chain)
        eta = eta / t
    return _flag_unphysical(float(eta))


def theoretical_efficiency(beta, d_mw, d_s, n, L_eff, k_s, omega_mw, omega_s, orientation="physical"):
    """Linear-regime intensity-to-intensity efficiency from the coherence slope.

    ``beta = d rho_s / d Omega_MW`` (s).  The generated optical field is
    ``E_s = k_s n L_eff d_s rho_s / (2 eps0)`` and ``Omega_MW = d_MW E_MW / hbar``,
    so ``eta = |k_s n L_eff d_s beta d_MW / (2 eps0 hbar)|^2 * omega_MW/omega_s``.

    ``orientation="printed"`` evaluates the reciprocal field ratio
    ``(hbar/d_MW)^2 / |k_s n L_eff d_s / (2 eps0)|^2 / beta^2 * omega_MW/omega_s``,
    kept for comparison with the commonly quoted form of this estimate.
    """
    for name, v in (("beta", beta), ("d_mw", d_mw), ("d_s", d_s), ("n", n), ("L_eff", L_eff),
                    ("k_s", k_s), ("omega_mw", omega_mw), ("omega_s", omega_s)):
        if v <= 0:
            raise ValueError(f"{name} must be positive")
    gain = k_s * n * L_eff * d_s * beta * d_mw / (2 * C.epsilon_0 * C.hbar)
    if orientation == "physical":
        return float(gain**2 * omega_mw / omega_s)
    if orientation == "printed":
        return float(gain**-2 * omega_mw / omega_s)
    raise ValueError(f"unknown orientation {orientation!r}")


def dynamic_range_db(floor_intensity, ceiling_intensity):
    if not ceiling_intensity > floor_intensity > 0:
        raise ValueError("need ceiling > floor > 0")
    return float(10 * np.log10(ceiling_intensity / floor_intensity))


def minimal_detectable_intensity(noise_rate, ref_rate, ref_intensity):
    """Intensity giving ``noise_rate`` when ``ref_intensity`` gives ``ref_rate`` (linear response)."""
    if ref_rate <= 0:
        raise ValueError("reference rate must be positive")
    return ref_intensity * noise_rate / ref_rate


def narrowband_floor(noise_rate=22.0, thermal_rate=1740.0, thermal_intensity=3.41e-10,
                     filter_bandwidth=C.TWO_PI * 20e3, conversion_bandwidth=C.mhz(17.8)):
    """Minimal detectable intensity behind a narrowband output filter.

    The thermal rate and its intensity shrink by the bandwidth ratio; the
    floor is reached where the signal rate equals the non-thermal noise rate.
    Returns ``(floor_intensity, filtered_thermal_rate, filtered_thermal_intensity)``.
    """
    ratio = filter_bandwidth / conversion_bandwidth
    rate_th, i_th = thermal_rate * ratio, thermal_intensity * ratio
    return minimal_detectable_intensity(noise_rate, rate_th, i_th), rate_th, i_th


def noise_table(rates: dict, thermal_key="thermal", thermal_intensity=3.41e-10, bandwidth=C.mhz(17.8),
                T_ref=300.0):
    """Rows of (photon rate, equivalent MW intensity, field, spectral density, NET, share).

    ``rates`` maps a source label to a photon rate; the first entry is taken
    as the overall rate used for the percentage column.  Intensities scale
    linearly with rate from the thermal reference; the spectral density is
    reported for the thermal row only.
    """
    labels = list(rates)
    overall = rates[labels[0]]
    ref = rates[thermal_key]
    rows = []
    for label in labels:
        r = rates[label]
        I = minimal_detectable_intensity(r, ref, thermal_intensity)
        E = float(thermal.field_from_intensity(I))
        rows.append({
            "source": label,
            "photon_rate_per_s": float(r),
            "intensity_W_per_m2": float(I),
            "field_V_per_m": E,
            "spectral_density_V_per_m_sqrt_rad_per_s": E / np.sqrt(bandwidth) if label == thermal_key else None,
            "net_K": float(thermal.noise_equivalent_temperature(r, ref, T_ref)),
            "share_percent": 100.0 * r / overall,
        })
    return rows
