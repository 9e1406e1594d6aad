import numpy as np
import pytest
from scipy.integrate import quad

from rydconv import constants as C
from rydconv.config import ConverterConfig
from rydconv.core import SingularLiouvillian, signal_coherence, solve
from rydconv.ensemble import (
    BeamGrid,
    VelocityGrid,
    average_many,
    average_response,
    default_grids,
    maxwell_weight,
    thermal_speed,
)

M85 = 1.41e-25


def test_maxwell_peak():
    sigma = thermal_speed(315.0, M85)
    assert sigma == pytest.approx(175.5, abs=0.3)
    assert maxwell_weight(0.0, 315.0, M85) == pytest.approx(1 / (sigma * np.sqrt(2 * np.pi)), rel=1e-12)
    assert maxwell_weight(0.0, 315.0, M85) == pytest.approx(2.273e-3, rel=1e-3)


def test_maxwell_normalised():
    s = thermal_speed(315.0, M85)
    val, _ = quad(maxwell_weight, -6 * s, 6 * s, args=(315.0, M85), epsabs=1e-13)
    assert val == pytest.approx(1.0, abs=1e-8)


def test_maxwell_shape():
    s = thermal_speed(300.0, M85)
    assert maxwell_weight(s, 300.0, M85) / maxwell_weight(0.0, 300.0, M85) == pytest.approx(np.exp(-0.5), rel=1e-14)


def test_velocity_grid_properties():
    g = VelocityGrid.uniform(315.0, M85, 801)
    assert g.weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert 0.0 in g.nodes
    # second moment of the truncated Gaussian at 4 sigma
    s = thermal_speed(315.0, M85)
    assert np.sum(g.weights * g.nodes**2) == pytest.approx(s**2 * 0.99734, rel=2e-3)
    with pytest.raises(ValueError):
        VelocityGrid.uniform(315.0, M85, 800)


def test_beam_grid_integrates_area():
    w0 = 100e-6
    b = BeamGrid.gauss_legendre(w0, 16)
    # mean of the four-field intensity product over the 3 w0 disc
    f = lambda r: np.exp(-8 * r**2 / w0**2)
    exact = quad(lambda r: f(r) * r, 0, 3 * w0)[0] / quad(lambda r: r, 0, 3 * w0)[0]
    assert np.sum(b.weights * f(b.radii)) == pytest.approx(exact, rel=1e-6)
    assert b.amplitude()[0] == pytest.approx(np.exp(-(b.radii[0] / w0) ** 2))
    with pytest.raises(ValueError):
        BeamGrid.gauss_legendre(w0, 8, cutoff=2.0)


def test_single_node_equals_single_solve():
    cfg = ConverterConfig(rabi_mw=C.mhz(1.0))
    w0 = cfg.beam_waist
    avg = average_response(cfg, VelocityGrid.single(0.0), BeamGrid.on_axis(w0))
    rho = solve(cfg)
    assert avg["coherence"] == pytest.approx(complex(signal_coherence(rho)), rel=1e-12)
    assert avg["coherence_intensity"] == pytest.approx(abs(signal_coherence(rho)) ** 2, rel=1e-12)


def test_velocity_convergence():
    # the coherent average keeps sub-m/s velocity structure; 801 nodes is the converged default
    cfg = ConverterConfig()
    b = BeamGrid.gauss_legendre(cfg.beam_waist, 8)
    coarse = average_response(cfg, VelocityGrid.uniform(cfg.temperature_cell, cfg.atomic_mass, 801), b)
    fine = average_response(cfg, VelocityGrid.uniform(cfg.temperature_cell, cfg.atomic_mass, 1601), b)
    assert abs(coarse["coherence_intensity"] / fine["coherence_intensity"] - 1) < 0.01


def test_incoherent_bounds_coherent():
    cfg = ConverterConfig()
    vg, bg = default_grids(cfg, 201, 4)
    coh = average_response(cfg, vg, bg, coherent=True)["coherence_intensity"]
    inc = average_response(cfg, vg, bg, coherent=False)["coherence_intensity"]
    assert coh <= inc


def test_populations_sum_to_one():
    cfg = ConverterConfig()
    vg, bg = default_grids(cfg, 101, 4)
    pops = average_response(cfg, vg, bg)["populations"]
    assert pops.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(pops >= -1e-12)


def test_threads_do_not_change_results():
    cfg = ConverterConfig()
    vg, bg = default_grids(cfg, 101, 4)
    cfgs = [cfg.replace(detuning_mw=C.mhz(d)) for d in (-30.0, -16.0, 0.0)]
    a = average_many(cfgs, vg, bg, threads=1)
    b = average_many(cfgs, vg, bg, threads=3)
    assert [r["coherence"] for r in a] == [r["coherence"] for r in b]


def test_singular_node_reported():
    cfg = ConverterConfig(rabi_coupling=0.0, rabi_mw=0.0, rabi_decoupling=0.0, decay_r1=0.0, decay_r2=0.0,
                          decay_s=0.0, transit_rate=0.0, dephasing_rate=0.0)
    vg, bg = default_grids(cfg, 3, 2)
    with pytest.raises(SingularLiouvillian) as exc:
        average_response(cfg, vg, bg)
    r, v = exc.value.node
    assert r in bg.radii and v in vg.nodes
