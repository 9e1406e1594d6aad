import numpy as np
import pytest
from hypothesis import given, strategies as st

from rydconv import constants as C
from rydconv import budget, phasematch, thermal
from rydconv.config import ConverterConfig

W_MW = C.TWO_PI * 13.9e9


def test_planck_zero_temperature():
    assert thermal.planck_energy(W_MW, 0.0) == 0.0


def test_planck_classical_limit():
    assert thermal.planck_energy(W_MW, 300.0) == pytest.approx(C.k_B * 300.0, rel=2e-3)


def test_planck_unit_ratio():
    T = C.hbar * W_MW / C.k_B
    assert thermal.planck_energy(W_MW, T) == pytest.approx(C.hbar * W_MW / (np.e - 1), rel=1e-14)


def test_planck_rejects_bad_omega():
    with pytest.raises(ValueError):
        thermal.planck_energy(0.0, 300.0)


def test_total_density_closed_form():
    # omega^2 kT / (pi^2 c^3 eps0) * 2 in the Rayleigh-Jeans limit
    rj = np.sqrt(2 * W_MW**2 * C.k_B * 300 / (np.pi**2 * C.c**3 * C.epsilon_0))
    assert thermal.total_field_fluctuations(300.0) == pytest.approx(rj, rel=2e-3)
    assert C.to_nv_per_cm(thermal.total_field_fluctuations(300.0)) == pytest.approx(1.64, rel=1e-2)


def test_zero_temperature_no_field():
    assert thermal.total_field_fluctuations(0.0) == 0.0


@given(st.floats(100.0, 400.0))
def test_rayleigh_jeans_sqrt_t(T):
    r = thermal.total_field_fluctuations(T) / thermal.total_field_fluctuations(100.0)
    assert r == pytest.approx(np.sqrt(T / 100.0), rel=5e-3)


def test_effective_density_consistency():
    p = phasematch.reception_pattern(ConverterConfig())
    eff = thermal.effective_field_spectral_density(300.0, p)
    tot = thermal.total_field_fluctuations(300.0)
    assert eff <= tot
    assert (eff / tot) ** 2 == pytest.approx(phasematch.coupling_fraction(p), rel=1e-6)


def test_band_integration_and_intensity():
    E = thermal.band_integrate_field(C.pv_per_cm(480.0), C.mhz(17.8))
    assert C.to_uv_per_cm(E) == pytest.approx(5.07, rel=1e-2)
    assert thermal.intensity_from_field(C.uv_per_cm(5.07)) == pytest.approx(3.41e-10, rel=1e-2)
    assert thermal.band_integrate_field(1.0, 0.0) == 0.0


@given(st.one_of(st.just(0.0), st.floats(1e-15, 1e4)))
def test_field_intensity_round_trip(E):
    assert thermal.field_from_intensity(thermal.intensity_from_field(E)) == pytest.approx(E, rel=1e-12, abs=1e-300)


@given(st.one_of(st.just(0.0), st.floats(1e-15, 1e3)))
def test_field_rabi_round_trip(E):
    d = 2500 * C.a0 * C.e
    assert thermal.field_from_rabi(thermal.rabi_from_field(E, d), d) == pytest.approx(E, rel=1e-12, abs=1e-300)


def test_rabi_to_field_scale():
    E = thermal.field_from_rabi(C.mhz(8.0), 2500 * C.a0 * C.e)
    assert E * 1e3 / 100 == pytest.approx(2.5, rel=1e-2)  # mV/cm
    assert thermal.rabi_from_field(0.0, 1.0) == 0.0


def test_net_examples():
    assert thermal.noise_equivalent_temperature(310, 1740, 300) == pytest.approx(53.4, rel=5e-2)
    assert thermal.noise_equivalent_temperature(4.2, 325, 295) == pytest.approx(3.8, rel=5e-2)
    assert thermal.noise_equivalent_temperature(0, 1740, 300) == 0
    with pytest.raises(ValueError):
        thermal.noise_equivalent_temperature(1, 0, 300)


def test_thermal_rate_chain():
    ap = budget.effective_aperture(100e-6, 4)
    # from the 3.41e-10 W/m2 floor through the aperture, 3.1 % and 42 % transmission
    flux = thermal.photon_flux(3.41e-10, ap, W_MW)
    rate = flux * 0.031 * 0.42
    assert 1740 / 2 < rate < 1740 * 2
    p = phasematch.reception_pattern(ConverterConfig())
    r1 = thermal.thermal_photon_rate(300.0, p, C.mhz(17.8), ap, 0.031 * 0.42)
    assert 1740 / 2 < r1 < 1740 * 2
    assert thermal.thermal_photon_rate(300.0, p, C.mhz(35.6), ap, 0.013) == pytest.approx(
        2 * thermal.thermal_photon_rate(300.0, p, C.mhz(17.8), ap, 0.013), rel=1e-12)
    assert thermal.thermal_photon_rate(300.0, p, C.mhz(17.8), 0.0, 0.013) == 0.0
