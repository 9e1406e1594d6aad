"""Photon statistics of converted light: analytic g1/g2 and Monte-Carlo time tags.

Analytic side: the first-order coherence of the converted thermal field is the
Fourier transform of the conversion band (Wiener-Khinchin); the intensity
correlation of a mix of thermal, coherent and Poissonian noise photons follows
from Gaussian moment factorisation.

Simulation side: a thermal field is synthesised by FFT-filtering white
complex Gaussian noise with the band shape, its intensity drives an
inhomogeneous Poisson process (sampled by thinning), and :func:`estimate_g2`
builds the normalised coincidence histogram from the resulting time tags.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from .response import Spectrum


class EmptySpectrum(ValueError):
    pass


class AllZeroRates(ValueError):
    pass


class FitDiverged(RuntimeError):
    pass


class InsufficientCounts(ValueError):
    pass


@dataclass(frozen=True)
class CoherenceCurve:
    """First-order coherence g1(tau) (complex)."""

    tau: np.ndarray
    g1: np.ndarray


@dataclass(frozen=True)
class CorrelationCurve:
    tau: np.ndarray
    g2: np.ndarray
    counts: np.ndarray | None = None
    expected: np.ndarray | None = None
    source: str = "analytic"

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float)
        g2 = np.asarray(self.g2, dtype=float)
        if tau.shape != g2.shape or tau.ndim != 1:
            raise ValueError("tau and g2 must be 1D arrays of equal length")
        if np.any(g2 < -1e-12):
            raise ValueError("g2 must be non-negative")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "g2", g2)

    @property
    def stderr(self):
        """Poisson (sqrt N) standard error of each estimated bin."""
        if self.counts is None:
            return None
        return np.sqrt(np.maximum(self.counts, 1)) / self.expected


@dataclass(frozen=True)
class RateMix:
    n_th: float
    n_coh: float = 0.0
    n_noise: float = 0.0
    detuning: float = 0.0  # coherent-field detuning from the thermal band centre, rad/s

    def __post_init__(self):
        if min(self.n_th, self.n_coh, self.n_noise) < 0:
            raise ValueError("rates must be non-negative")

    @property
    def total(self):
        return self.n_th + self.n_coh + self.n_noise


def band_centroid(spectrum: Spectrum) -> float:
    w = spectrum.values
    return float(np.trapezoid(w * spectrum.axis, spectrum.axis) / np.trapezoid(w, spectrum.axis))


def g1_from_spectrum(spectrum: Spectrum, tau, center=None) -> CoherenceCurve:
    """``g1(tau) = integral S(w) exp(-i (w - w_c) tau) dw / integral S(w) dw``.

    ``spectrum.values`` is the power spectral density over the angular
    frequency axis; ``w_c`` defaults to the band centroid.  A single-sample
    spectrum is treated as monochromatic.
    """
    x, S = spectrum.axis, spectrum.values
    if x[0] > x[-1]:
        x, S = x[::-1], S[::-1]
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if S.size == 0 or not np.any(S > 0):
        raise EmptySpectrum("spectrum has no power")
    if np.count_nonzero(S) == 1:
        return CoherenceCurve(tau, np.ones_like(tau, dtype=complex))
    wc = band_centroid(Spectrum(spectrum.axis_name, x, S)) if center is None else center
    norm = np.trapezoid(S, x)
    g1 = np.empty(tau.size, dtype=complex)
    # chunk over tau to bound memory
    for s in range(0, tau.size, 256):
        ph = np.exp(-1j * np.outer(tau[s:s + 256], x - wc))
        g1[s:s + 256] = np.trapezoid(S * ph, x, axis=1) / norm
    # normalised by construction; pin it so rounding cannot leak into g2(0)
    g1[tau == 0] = 1.0
    return CoherenceCurve(tau, g1)


def g2_thermal(g1: CoherenceCurve) -> CorrelationCurve:
    return CorrelationCurve(g1.tau, 1.0 + np.abs(g1.g1) ** 2)


def g2_mixed(mix: RateMix, g1: CoherenceCurve) -> CorrelationCurve:
    """``1 + (|n_th g1 + n_coh exp(-i dw tau)|^2 - n_coh^2) / (n_th + n_coh + n_noise)^2``."""
    if mix.total == 0:
        raise AllZeroRates("at least one rate must be positive")
    # work with rate fractions so that pure thermal light gives 1 + |g1|^2 bit for bit
    p_th, p_coh = mix.n_th / mix.total, mix.n_coh / mix.total
    field_ = p_th * g1.g1 + p_coh * np.exp(-1j * mix.detuning * g1.tau)
    return CorrelationCurve(g1.tau, 1.0 + (np.abs(field_) ** 2 - p_coh**2))


def g2_beat_special(g1: CoherenceCurve, detuning) -> CorrelationCurve:
    """Equal thermal and coherent rates, no noise: ``1 + (|g1 + e^{-i dw tau}|^2 - 1)/4``."""
    return CorrelationCurve(g1.tau, 1.0 + 0.25 * (np.abs(g1.g1 + np.exp(-1j * detuning * g1.tau)) ** 2 - 1.0))


def _exp_model(tau, g0, tau0):
    return 1.0 + (g0 - 1.0) * np.exp(-2.0 * np.abs(tau) / tau0)


@dataclass(frozen=True)
class ExpFit:
    g2_0: float
    tau0: float
    stderr_g2_0: float
    stderr_tau0: float


def fit_exponential_g2(curve: CorrelationCurve, weighted=False, tau_min=None) -> ExpFit:
    """Least-squares fit of ``1 + (g2(0) - 1) exp(-2|tau|/tau0)``.

    Unweighted by default; ``weighted=True`` uses the per-bin Poisson errors
    of an estimated curve.  ``tau_min`` excludes bins with ``|tau| < tau_min``.
    """
    tau, g2 = curve.tau, curve.g2
    mask = np.ones(tau.size, dtype=bool) if tau_min is None else np.abs(tau) >= tau_min
    if mask.sum() < 10:
        raise ValueError("need at least 10 bins to fit")
    sigma = None
    if weighted:
        if curve.counts is None:
            raise ValueError("weighted fit needs an estimated curve with counts")
        sigma = curve.stderr[mask]
    excess = g2[mask] - 1.0
    g0_guess = 1.0 + excess[np.argmax(np.abs(excess))]
    tail = np.abs(excess) < abs(g0_guess - 1) / np.e
    tau0_guess = 2.0 * np.min(np.abs(tau[mask][tail])) if np.any(tail) else np.ptp(tau)
    try:
        # an undefined covariance is reported below as FitDiverged
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            p, cov = curve_fit(_exp_model, tau[mask], g2[mask], p0=(g0_guess, tau0_guess), sigma=sigma,
                               absolute_sigma=weighted, maxfev=10000)
    except (RuntimeError, ValueError) as exc:
        raise FitDiverged(str(exc)) from None
    err = np.sqrt(np.diag(cov)) if np.all(np.isfinite(cov)) else np.array([np.nan, np.nan])
    if not np.all(np.isfinite(p)) or p[1] <= 0 or not np.all(np.isfinite(err)):
        raise FitDiverged(f"fit did not converge to finite parameters: {p}")
    return ExpFit(float(p[0]), float(p[1]), float(err[0]), float(err[1]))


def coherence_limit(snr):
    """Largest coherence compatible with a signal-to-noise ratio, ``snr/(1+snr)``."""
    snr = np.asarray(snr, dtype=float)
    if np.any(snr < 0):
        raise ValueError("snr must be non-negative")
    with np.errstate(invalid="ignore"):
        out = np.where(np.isinf(snr), 1.0, snr / (1.0 + snr))
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# time tags
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TimeTagSeries:
    times: np.ndarray
    duration: float
    seed: int | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1:
            raise ValueError("times must be 1D")
        if t.size and (t[0] < 0 or t[-1] > self.duration):
            raise ValueError("times must lie within [0, duration]")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)

    def __len__(self):
        return self.times.size

    @property
    def rate(self):
        return self.times.size / self.duration


def _strict(times):
    """Sort and drop exact duplicates (vanishingly rare in double precision)."""
    t = np.sort(times)
    if t.size:
        t = t[np.concatenate(([True], np.diff(t) > 0))]
    return t


def merge_streams(*series: TimeTagSeries) -> TimeTagSeries:
    """Sorted union of independent streams over a common duration."""
    duration = max(s.duration for s in series)
    return TimeTagSeries(_strict(np.concatenate([s.times for s in series])), duration)


def split_stream(series: TimeTagSeries, fraction=0.5, seed=0):
    """Route every tag to detector A with probability ``fraction`` (beam splitter)."""
    rng = np.random.default_rng(seed)
    to_a = rng.random(series.times.size) < fraction
    return (TimeTagSeries(series.times[to_a], series.duration, series.seed),
            TimeTagSeries(series.times[~to_a], series.duration, series.seed))


def apply_dead_time(series: TimeTagSeries, dead_time) -> TimeTagSeries:
    """Paralyzable dead time: a tag is lost if any earlier arrival is closer than ``dead_time``."""
    t = series.times
    if t.size == 0 or dead_time <= 0:
        return series
    keep = np.concatenate(([True], np.diff(t) >= dead_time))
    return TimeTagSeries(t[keep], series.duration, series.seed)


def _chunk_rngs(seed, n_chunks):
    ss = np.random.SeedSequence(seed)
    return [np.random.default_rng(s) for s in ss.spawn(n_chunks)]


def simulate_poisson_stream(rate, duration, seed, chunk=1e-3) -> TimeTagSeries:
    """Homogeneous Poisson arrivals, generated per time chunk with spawned substreams."""
    if rate < 0 or duration <= 0:
        raise ValueError("need rate >= 0 and duration > 0")
    n_chunks = max(1, int(np.ceil(duration / chunk)))
    edges = np.linspace(0.0, duration, n_chunks + 1)
    parts = []
    for (a, b), rng in zip(zip(edges[:-1], edges[1:]), _chunk_rngs(seed, n_chunks)):
        n = rng.poisson(rate * (b - a))
        parts.append(np.sort(rng.uniform(a, b, n)))
    return TimeTagSeries(_strict(np.concatenate(parts)), duration, seed)


def _psd_on_grid(spectrum: Spectrum, omega, center):
    x, S = spectrum.axis, spectrum.values
    if x[0] > x[-1]:
        x, S = x[::-1], S[::-1]
    return np.interp(omega, x - center, S, left=0.0, right=0.0)


def simulate_thermal_stream(spectrum: Spectrum, mean_rate, duration, seed, dt=0.5e-9, chunk_samples=2**18,
                            coherent_rate=0.0, coherent_detuning=0.0) -> TimeTagSeries:
    """Photon arrivals from a chaotic field with the given power spectrum.

    The field is complex Gaussian noise filtered in the frequency domain by
    ``sqrt(S(w))`` (circulant approximation per chunk), optionally plus a
    coherent tone detuned by ``coherent_detuning`` from the band centroid.
    The instantaneous rate is proportional to ``|field|^2`` with means
    ``mean_rate`` (thermal part) and ``coherent_rate``; arrivals are drawn by
    thinning a homogeneous process at the chunk's peak rate.  Chunks use
    independent substreams spawned from ``seed``.
    """
    if mean_rate < 0 or coherent_rate < 0 or duration <= 0:
        raise ValueError("need non-negative rates and positive duration")
    center = band_centroid(spectrum)
    omega = 2 * np.pi * np.fft.fftfreq(chunk_samples, dt)
    amp = np.sqrt(_psd_on_grid(spectrum, omega, center))
    if not np.any(amp > 0):
        raise EmptySpectrum("spectrum has no power on the simulation grid")
    amp /= np.sqrt(np.mean(amp**2))  # unit mean intensity
    span = chunk_samples * dt
    n_chunks = max(1, int(np.ceil(duration / span)))
    a_coh = np.sqrt(coherent_rate)
    parts = []
    for i, rng in enumerate(_chunk_rngs(seed, n_chunks)):
        t0 = i * span
        n = min(chunk_samples, int(np.ceil((duration - t0) / dt)))
        white = (rng.standard_normal(chunk_samples) + 1j * rng.standard_normal(chunk_samples)) / np.sqrt(2)
        # unitary FFT pair keeps unit variance per sample
        fld = np.fft.ifft(amp * np.fft.fft(white, norm="ortho"), norm="ortho")[:n] * np.sqrt(mean_rate)
        if coherent_rate > 0:
            t_grid = t0 + dt * np.arange(n)
            fld = fld + a_coh * np.exp(-1j * coherent_detuning * t_grid)
        lam = np.abs(fld) ** 2
        lam_max = lam.max()
        if lam_max <= 0:
            continue
        t_end = min(t0 + n * dt, duration)
        m = rng.poisson(lam_max * (t_end - t0))
        cand = np.sort(rng.uniform(t0, t_end, m))
        k = np.minimum(((cand - t0) / dt).astype(np.int64), n - 1)
        keep = rng.random(m) * lam_max < lam[k]
        parts.append(cand[keep])
    return TimeTagSeries(_strict(np.concatenate(parts) if parts else np.empty(0)), duration, seed)


def _pair_delays(a, b, max_lag, same):
    """All delays ``t_b - t_a`` within ``[-max_lag, max_lag]`` (ordered pairs, i != j if ``same``)."""
    out = []
    if same:
        k = 1
        while True:
            d = a[k:] - a[:-k] if k < a.size else np.empty(0)
            d = d[d <= max_lag]
            if d.size == 0:
                break
            out += [d, -d]
            k += 1
    else:
        lo = np.searchsorted(b, a - max_lag, side="left")
        hi = np.searchsorted(b, a + max_lag, side="right")
        width = int((hi - lo).max()) if a.size else 0
        for k in range(width):
            idx = lo + k
            ok = idx < hi
            out.append(b[idx[ok]] - a[ok])
    return np.concatenate(out) if out else np.empty(0)


def estimate_g2(series_a: TimeTagSeries, series_b: TimeTagSeries | None = None, bin_width=2e-9, max_lag=200e-9,
                min_expected=10.0) -> CorrelationCurve:
    """Normalised coincidence histogram ``<n_A(t) n_B(t+tau)> / (<n_A><n_B>)``.

    Bins are centred on multiples of ``bin_width`` up to ``max_lag``.  With a
    single series the autocorrelation over ordered pairs ``i != j`` is used.
    The expected count of uncorrelated pairs accounts for the finite record
    (``T - |tau|`` overlap).
    """
    if not 0 < bin_width < max_lag:
        raise ValueError("need 0 < bin_width < max_lag")
    same = series_b is None
    b = series_a if same else series_b
    T = min(series_a.duration, b.duration)
    nk = int(np.floor(max_lag / bin_width + 0.5))
    centers = bin_width * np.arange(-nk, nk + 1)
    edges = np.concatenate((centers - bin_width / 2, [centers[-1] + bin_width / 2]))
    delays = _pair_delays(series_a.times, b.times, edges[-1], same)
    counts = np.histogram(delays, bins=edges)[0]
    na, nb = len(series_a), len(b)
    pairs = na * (na - 1) if same else na * nb
    expected = pairs * bin_width * (T - np.abs(centers)) / T**2
    if np.any(expected < min_expected):
        raise InsufficientCounts(f"only {expected.min():.3g} uncorrelated pairs expected per bin (need {min_expected})")
    return CorrelationCurve(centers, counts / expected, counts, expected, "estimated")


def bin_average(curve_fn, centers, bin_width, n_sub=21):
    """Average an analytic ``tau -> g2`` function over each bin (for comparison with estimates)."""
    offs = (np.arange(n_sub) + 0.5) / n_sub - 0.5
    taus = centers[:, None] + bin_width * offs[None, :]
    return curve_fn(taus.ravel()).reshape(taus.shape).mean(axis=1)


def beat_period(detuning):
    """Period of the thermal-coherent beat in the intensity correlation."""
    return 2 * np.pi / abs(detuning)
