import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rydconv import constants as C
from rydconv import response
from rydconv.config import ConverterConfig
from rydconv.ensemble import VelocityGrid, default_grids
from rydconv.response import MultiPeakWarning, NoPeak, Spectrum


def lorentzian(x, x0, g):
    return g / ((x - x0) ** 2 + g**2)


@pytest.fixture(scope="module")
def small_grids():
    return default_grids(ConverterConfig(), 201, 4)


# -- width estimators --------------------------------------------------------

def test_fwhm_lorentzian():
    x = np.linspace(-50, 50, 20001)
    assert response.fwhm(Spectrum("x", x, lorentzian(x, 1.3, 2.0))) == pytest.approx(4.0, rel=1e-3)


def test_fwhm_gaussian():
    x = np.linspace(-30, 30, 20001)
    s = 3.0
    sp = Spectrum("x", x, np.exp(-x**2 / (2 * s**2)))
    assert response.fwhm(sp) == pytest.approx(2 * np.sqrt(2 * np.log(2)) * s, rel=1e-3)
    assert response.fwhm(sp) == pytest.approx(2.3548 * s, rel=1e-3)


def test_fwhm_boundary_peak():
    x = np.linspace(0, 10, 101)
    with pytest.raises(NoPeak):
        response.fwhm(Spectrum("x", x, np.exp(-x)))


def test_fwhm_multipeak_warns_and_uses_widest_pair():
    x = np.linspace(-20, 20, 4001)
    y = lorentzian(x, -8, 1.0) + lorentzian(x, 8, 1.0)
    with pytest.warns(MultiPeakWarning):
        w = response.fwhm(Spectrum("x", x, y))
    assert w == pytest.approx(18.0, abs=0.05)


def test_fwhm_reversed_axis():
    x = np.linspace(-50, 50, 20001)
    y = lorentzian(x, 0, 2.0)
    assert response.fwhm(Spectrum("x", x[::-1], y[::-1])) == pytest.approx(4.0, rel=1e-3)


def test_integral_bandwidth_rectangle():
    x = np.linspace(-3, 3, 601)
    assert response.integral_bandwidth(Spectrum("x", x, np.full_like(x, 2.5))) == pytest.approx(6.0, rel=1e-14)


def test_integral_bandwidth_lorentzian():
    G = 2.0
    x = np.linspace(-4000, 4000, 800001)
    sp = Spectrum("x", x, lorentzian(x, 0, G / 2))
    assert response.integral_bandwidth(sp) == pytest.approx(np.pi / 2 * G, rel=5e-3)


@given(st.floats(0.5, 5.0), st.floats(0.1, 10.0))
def test_widths_scale_with_axis(g, scale):
    x = np.linspace(-40, 40, 4001)
    y = lorentzian(x, 0, g)
    a = Spectrum("x", x, y)
    b = Spectrum("x", scale * x, y)
    assert response.fwhm(b) == pytest.approx(scale * response.fwhm(a), rel=1e-9)
    assert response.integral_bandwidth(b) == pytest.approx(scale * response.integral_bandwidth(a), rel=1e-9)


def test_local_maxima_refined():
    x = np.linspace(-20, 20, 41)
    y = lorentzian(x, -7.3, 2.0) + lorentzian(x, 7.3, 2.0)
    pk = response.local_maxima(Spectrum("x", x, y))
    assert pk == pytest.approx([-7.3, 7.3], abs=0.15)


# -- bright states -----------------------------------------------------------

def test_bright_states_pure_coupling():
    assert response.bright_state_positions(0.0, 10.0) == (-5.0, 5.0)


def test_bright_states_symmetric():
    lo, hi = response.bright_state_positions(4.0, 4.0)
    assert hi == pytest.approx(4.0 / np.sqrt(2), rel=1e-15)


def test_bright_states_working_point():
    lo, hi = response.bright_state_positions(C.mhz(8), C.mhz(22))
    assert C.to_mhz(hi) == pytest.approx(11.70, abs=0.01)
    # eigenvalues of the dressed g-e-r1 block on two-photon resonance
    H = np.array([[0, 4, 0], [4, 0, 11], [0, 11, 0]], dtype=float)
    ev = np.sort(np.linalg.eigvalsh(H))
    assert [ev[0], ev[2]] == pytest.approx([C.to_mhz(lo), C.to_mhz(hi)], rel=1e-12)


# -- level mapping -----------------------------------------------------------

@given(st.floats(-100, 100), st.floats(-100, 100))
def test_level_mapping_reproduces_level_detunings(d55, d54):
    cfg = ConverterConfig()
    for mapping in ("wavevector", "coupling"):
        c = response.at_level_detunings(cfg, C.mhz(d55), C.mhz(d54), mapping)
        assert c.level_detuning_55d == pytest.approx(C.mhz(d55), abs=1e-6)
        assert c.level_detuning_54f == pytest.approx(C.mhz(d54), abs=1e-6)
        # decoupling keeps the s level, and hence the signal, on resonance
        assert c.level_detuning_54f - c.detuning_decoupling == pytest.approx(0.0, abs=1e-6)


def test_wavevector_mapping_has_no_residual_doppler_in_55d():
    cfg = ConverterConfig()
    dp, dc, _, _ = response.level_to_field_detunings(1.0, 0.0, "wavevector", cfg)
    assert dp / dc == pytest.approx(abs(cfg.wavevector_probe / cfg.wavevector_coupling), rel=1e-14)


# -- sweeps ------------------------------------------------------------------

def test_broken_loop_gives_no_signal(small_grids):
    cfg = ConverterConfig()
    det = cfg.detuning_mw + C.mhz(np.array([-10.0, 0.0, 10.0]))
    full = response.sweep_mw_detuning(cfg, det, *small_grids)
    khz = C.KHZ_2PI
    weak = response.sweep_mw_detuning(cfg.replace(rabi_probe=khz, rabi_coupling=khz, rabi_decoupling=khz), det,
                                      *small_grids)
    assert weak.values.max() < 1e-12 * full.values.max()


def test_sign_flip_symmetry(small_grids):
    cfg = ConverterConfig(detuning_probe=C.mhz(3.0), detuning_decoupling=C.mhz(-2.0))
    flipped = cfg.replace(detuning_probe=-cfg.detuning_probe, detuning_coupling=-cfg.detuning_coupling,
                          detuning_decoupling=-cfg.detuning_decoupling)
    det = C.mhz(np.linspace(-40, 10, 6))
    vg, bg = small_grids
    reflected = VelocityGrid(-vg.nodes, vg.weights)
    a = response.sweep_mw_detuning(cfg, det, vg, bg)
    b = response.sweep_mw_detuning(flipped, -det, reflected, bg)
    assert np.allclose(a.values, b.values, rtol=1e-9, atol=0)


def test_power_sweep_linear_then_saturating(small_grids):
    cfg = ConverterConfig()
    I = np.logspace(-12, -1, 23)
    sp = response.sweep_mw_power(cfg, I, *small_grids)
    assert response.loglog_slope(sp) == pytest.approx(1.0, abs=0.02)
    rel = response.relative_efficiency(sp)
    assert rel[-1] < 0.1
    assert np.isfinite(response.saturation_onset(sp))
    assert response.linear_range_db(sp) > 60


def test_power_sweep_rejects_nonpositive():
    with pytest.raises(ValueError):
        response.sweep_mw_power(ConverterConfig(), [0.0, 1e-9])


def test_saturation_helpers_on_model_curve():
    Is = 3e-4
    I = np.logspace(-10, 0, 401)
    sp = Spectrum("mw_intensity", I, I / (1 + I / Is))
    # relative efficiency 1/(1 + I/Is) reaches -3 dB at I = Is (1 - 10^-0.3) / 10^-0.3
    onset = Is * (10**0.3 - 1)
    assert response.saturation_onset(sp) == pytest.approx(onset, rel=1e-3)
    peaked = Spectrum("mw_intensity", I, I / (1 + I / Is) ** 2)
    assert response.saturation_intensity(peaked) == pytest.approx(Is, rel=2e-2)
    assert response.linear_range_db(sp) == pytest.approx(10 * np.log10(Is / 1e-10), abs=0.1)


def test_coupling_off_collapses_double_resonance():
    cfg = ConverterConfig(rabi_coupling=C.mhz(1.0))
    vg, bg = default_grids(cfg, 801, 8)
    x = C.mhz(np.linspace(-40, 40, 41))
    sp = response.sweep_level_detuning(cfg, x, 0.0, vgrid=vg, bgrid=bg)
    pk = response.local_maxima(sp)
    assert pk.size == 1
    assert abs(C.to_mhz(pk[0])) < 2.0


def test_probe_sweep_shapes(small_grids):
    cfg = ConverterConfig()
    conv, eit = response.sweep_probe_detuning(cfg, C.mhz(np.linspace(-20, 20, 5)), *small_grids)
    assert conv.axis_name == eit.axis_name == "detuning_probe"
    assert np.all(eit.values >= 0)


def test_spectrum_validation():
    with pytest.raises(ValueError):
        Spectrum("x", [0, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        Spectrum("x", [0, 1, 2], [1, -2, 3])
    sp = Spectrum("x", [0, 1, 2], [1, 4, 2]).normalized()
    assert sp.values.max() == 1 and sp.normalization == "max"


def test_level_map_argmax():
    v = np.zeros((3, 4))
    v[2, 1] = 1
    m = response.DetuningMap(np.arange(3.0), np.arange(4.0) * 10, v)
    assert m.argmax() == (2.0, 10.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        with pytest.raises(ValueError):
            response.DetuningMap(np.arange(3.0), np.arange(4.0), np.zeros((4, 3)))
