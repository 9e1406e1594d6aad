"""Command-line scenario runner.

Every scenario writes its table(s) as CSV, a JSON file with derived numbers,
and a manifest holding the full config snapshot and options so that
``rydconv rerun <manifest>`` reproduces the outputs byte for byte.

Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import budget, config as cfgmod, constants as C, io, phasematch, photonstats, response, thermal
from .config import ConfigError, ConverterConfig
from .core import SingularLiouvillian, build_jump_operators, build_hamiltonian, signal_coherence, steady_state
from .ensemble import BeamGrid, VelocityGrid, average_response

# Published reference numbers used by the bookkeeping scenarios.
REFERENCE = {
    "thermal_rate": 1740.0,
    "overall_rate": 2050.0,
    "thermal_intensity": 3.41e-10,
    "integral_bandwidth": C.mhz(17.8),
    "peak_photon_rate": 4.44e5,
    "peak_mw_intensity": 8.1e-8,
    "beta_reference": 1.1e-4 / C.MHZ_2PI,
    "onoff_rates": (0, 0, 270, 0, 270, 40, 270, 2050),
}

DEFAULT_OPTIONS = {
    "points": 161,
    "map_points": 61,
    "velocity_nodes": 801,
    "radial_nodes": 16,
    "n_theta": 181,
    "rate": 1e7,
    "duration": 0.12,
    "bin": 2e-9,
    "max_lag": 200e-9,
    "beat_detuning_MHz": 64.0,
    "rates": ",".join(str(r) for r in REFERENCE["onoff_rates"]),
}


class Context:
    def __init__(self, cfg: ConverterConfig, options: dict, seed: int, threads: int):
        self.cfg = cfg
        self.opt = options
        self.seed = seed
        self.threads = threads

    def grids(self):
        return (VelocityGrid.uniform(self.cfg.temperature_cell, self.cfg.atomic_mass, int(self.opt["velocity_nodes"])),
                BeamGrid.gauss_legendre(self.cfg.beam_waist, int(self.opt["radial_nodes"])))


def _mhz(x):
    return float(C.to_mhz(x))


def _band(ctx: Context):
    n = int(ctx.opt["points"])
    d0 = ctx.cfg.detuning_mw
    det = d0 + C.mhz(np.linspace(-60.0, 60.0, n))
    vg, bg = ctx.grids()
    return response.sweep_mw_detuning(ctx.cfg, det, vg, bg, threads=ctx.threads)


# ---------------------------------------------------------------------------
# scenarios; each returns (tables, results)
# ---------------------------------------------------------------------------


def sc_steady_state(ctx):
    cfg = ctx.cfg
    rho = steady_state(build_hamiltonian(cfg), build_jump_operators(cfg))
    vg, bg = ctx.grids()
    avg = average_response(cfg, vg, bg)
    rows = [(i, j, float(rho[i, j].real), float(rho[i, j].imag)) for i in range(5) for j in range(5)]
    results = {
        "single_class_signal_coherence": [float(signal_coherence(rho).real), float(signal_coherence(rho).imag)],
        "ensemble_signal_intensity": avg["coherence_intensity"],
        "ensemble_eit": avg["eit"],
        "ensemble_populations": avg["populations"],
    }
    return {"density_matrix.csv": (["row", "col", "re", "im"], rows)}, results


def sc_eit_vs_conversion(ctx):
    n = int(ctx.opt["points"])
    det = C.mhz(np.linspace(-60.0, 60.0, n))
    vg, bg = ctx.grids()
    out = {}
    rows = []
    cases = {"resonant": (0.0, 0.0), "offresonant": (C.mhz(20.0), C.mhz(-20.0))}
    curves = {}
    for name, (dc, dm) in cases.items():
        cfg = ctx.cfg.replace(detuning_coupling=dc, detuning_mw=dm)
        conv, eit = response.sweep_probe_detuning(cfg, det, vg, bg, threads=ctx.threads)
        curves[name] = (conv, eit)
        out[f"{name}_conversion_peak_MHz_2pi"] = _mhz(det[np.argmax(conv.values)])
        # transparency shows up as a dip in the absorption signal
        out[f"{name}_eit_transparency_MHz_2pi"] = _mhz(det[np.argmin(eit.values)])
        out[f"{name}_conversion_max"] = float(conv.values.max())
    out["offresonant_to_resonant_ratio"] = out["offresonant_conversion_max"] / out["resonant_conversion_max"]
    for k, d in enumerate(det):
        rows.append((float(d),) + tuple(float(curves[c][i].values[k]) for c in cases for i in (0, 1)))
    header = ["detuning_probe_rad_s", "conv_resonant", "eit_resonant", "conv_offresonant", "eit_offresonant"]
    return {"eit_vs_conversion.csv": (header, rows)}, out


def sc_band(ctx):
    sp = _band(ctx)
    results = {
        "fwhm_MHz_2pi": _mhz(response.fwhm(sp)),
        "integral_bandwidth_MHz_2pi": _mhz(response.integral_bandwidth(sp)),
        "peak_detuning_mw_MHz_2pi": _mhz(sp.axis[np.argmax(sp.values)]),
    }
    rows = list(zip(sp.axis, sp.values))
    return {"band.csv": (["detuning_mw_rad_s", "intensity"], rows)}, results


def sc_power_sweep(ctx):
    n = max(int(ctx.opt["points"]) // 4, 11)
    I = np.logspace(-12, -1, n)
    vg, bg = ctx.grids()
    sp = response.sweep_mw_power(ctx.cfg, I, vg, bg, threads=ctx.threads)
    rel = response.relative_efficiency(sp)
    results = {
        "low_intensity_loglog_slope": response.loglog_slope(sp),
        "saturation_onset_W_m2": response.saturation_onset(sp),
        "saturation_intensity_W_m2": response.saturation_intensity(sp),
        "linear_range_dB": response.linear_range_db(sp),
    }
    rows = list(zip(sp.axis, sp.values, rel))
    return {"power_sweep.csv": (["mw_intensity_W_m2", "intensity", "relative_efficiency"], rows)}, results


def sc_level_map(ctx):
    n = int(ctx.opt["map_points"])
    ax = C.mhz(np.linspace(-40.0, 40.0, n))
    vg, bg = ctx.grids()
    m = response.sweep_level_map(ctx.cfg, ax, ax, vgrid=vg, bgrid=bg, threads=ctx.threads)
    i55, i54 = m.argmax()
    results = {"max_at_55d_MHz_2pi": _mhz(i55), "max_at_54f_MHz_2pi": _mhz(i54),
               "bright_states_MHz_2pi": [_mhz(x) for x in response.bright_state_positions(
                   ctx.cfg.rabi_probe, ctx.cfg.rabi_coupling)]}
    rows = [(float(a), float(b), float(m.values[i, j])) for i, a in enumerate(ax) for j, b in enumerate(ax)]
    return {"level_map.csv": (["level_detuning_55d_rad_s", "level_detuning_54f_rad_s", "intensity"], rows)}, results


def sc_pattern(ctx):
    p = phasematch.reception_pattern(ctx.cfg, int(ctx.opt["n_theta"]))
    gp, gm = p.to_db()
    rows = list(zip(np.degrees(p.theta), gp, gm))
    results = {"coupling_fraction": phasematch.coupling_fraction(p), "acceptance": p.acceptance(),
               "peak_theta_deg": float(np.degrees(p.theta[np.argmax(p.gain_sigma_plus)]))}
    return {"pattern.csv": (["theta_deg", "gain_sigma_plus_dB", "gain_sigma_minus_dB"], rows)}, results


def sc_thermal_budget(ctx):
    cfg = ctx.cfg
    T = cfg.environment_temperature
    p = phasematch.reception_pattern(cfg, int(ctx.opt["n_theta"]))
    total = float(thermal.total_field_fluctuations(T, cfg.mw_frequency))
    eff = float(thermal.effective_field_spectral_density(T, p, cfg.mw_frequency))
    E = float(thermal.band_integrate_field(eff, REFERENCE["integral_bandwidth"]))
    aperture = budget.effective_aperture(cfg.beam_waist, 4)
    rate = float(thermal.thermal_photon_rate(T, p, REFERENCE["integral_bandwidth"], aperture,
                                             0.031 * budget.DEFAULT_LOSS_CHAIN.transmission, cfg.mw_frequency))
    results = {
        "total_spectral_density": {"value": total, "unit": "V/m/sqrt(rad/s)",
                                   "display": C.to_nv_per_cm(total), "display_unit": "nV/cm/sqrt(rad/s)"},
        "effective_spectral_density": {"value": eff, "unit": "V/m/sqrt(rad/s)",
                                       "display": C.to_pv_per_cm(eff), "display_unit": "pV/cm/sqrt(rad/s)"},
        "coupling_fraction": phasematch.coupling_fraction(p),
        "band_field": {"value": E, "unit": "V/m", "display": C.to_uv_per_cm(E), "display_unit": "uV/cm"},
        "band_intensity": {"value": float(thermal.intensity_from_field(E)), "unit": "W/m2"},
        "predicted_detected_rate": {"value": rate, "unit": "1/s"},
    }
    table = budget.noise_table({
        "overall": REFERENCE["overall_rate"], "thermal": REFERENCE["thermal_rate"],
        "non-thermal": REFERENCE["overall_rate"] - REFERENCE["thermal_rate"], "fluorescence": 270.0, "other": 40.0,
    }, thermal_intensity=REFERENCE["thermal_intensity"], bandwidth=REFERENCE["integral_bandwidth"], T_ref=T)
    header = list(table[0])
    return {"noise_table.csv": (header, [[r[k] for k in header] for r in table])}, results


def _g1(ctx, sp, taus):
    return photonstats.g1_from_spectrum(sp, taus)


def sc_g2_theory(ctx):
    sp = _band(ctx)
    step = float(ctx.opt["bin"]) / 4
    taus = np.arange(-float(ctx.opt["max_lag"]), float(ctx.opt["max_lag"]) + step / 2, step)
    g1 = _g1(ctx, sp, taus)
    th = photonstats.g2_thermal(g1)
    dil = photonstats.g2_mixed(photonstats.RateMix(85.0, 0.0, 15.0), g1)
    beat_det = C.mhz(float(ctx.opt["beat_detuning_MHz"]))
    beat = photonstats.g2_beat_special(g1, beat_det)
    fit = photonstats.fit_exponential_g2(th)
    results = {"fit_g2_0": fit.g2_0, "fit_tau0_s": fit.tau0, "fit_tau0_stderr_s": fit.stderr_tau0,
               "diluted_peak": float(dil.g2.max()), "beat_detuning_MHz_2pi": _mhz(beat_det),
               "beat_period_s": photonstats.beat_period(beat_det)}
    rows = list(zip(taus, th.g2, dil.g2, beat.g2))
    return {"g2_theory.csv": (["tau_s", "g2_thermal", "g2_diluted", "g2_beat"], rows)}, results


def sc_g2_simulate(ctx):
    sp = _band(ctx)
    s = photonstats.simulate_thermal_stream(sp, float(ctx.opt["rate"]), float(ctx.opt["duration"]), ctx.seed)
    a, b = photonstats.split_stream(s, 0.5, seed=ctx.seed + 1)
    est = photonstats.estimate_g2(a, b, float(ctx.opt["bin"]), float(ctx.opt["max_lag"]))
    fit = photonstats.fit_exponential_g2(est)
    results = {"counts": len(s), "fit_g2_0": fit.g2_0, "fit_tau0_s": fit.tau0}
    rows = list(zip(est.tau, est.g2, est.counts))
    tables = {"g2_estimate.csv": (["tau_s", "g2", "counts"], rows)}
    return tables, results, {"timetags_a.bin": a.times, "timetags_b.bin": b.times}


def sc_decompose(ctx):
    try:
        rates = np.array([float(x) for x in str(ctx.opt["rates"]).split(",")])
    except ValueError:
        raise ConfigError("--rates must be 8 comma-separated numbers") from None
    if rates.size != 8:
        raise ConfigError("--rates must have exactly 8 entries")
    dec = budget.decompose_sources(rates)
    pct = dec.percentages()
    rows = list(zip(dec.labels, dec.rates, dec.contributions, pct))
    return {"decompose.csv": (["combination", "rate_per_s", "contribution_per_s", "percent_of_all_on"], rows)}, {
        "negative_contributions": dec.negative}


def sc_efficiency(ctx):
    cfg = ctx.cfg
    ap4 = budget.effective_aperture(cfg.beam_waist, 4)
    chain = budget.DEFAULT_LOSS_CHAIN
    k_s = cfg.signal_frequency / C.c
    common = dict(d_mw=cfg.dipole_mw, d_s=cfg.dipole_signal, n=cfg.atomic_density, L_eff=cfg.effective_length,
                  k_s=k_s, omega_mw=cfg.mw_frequency, omega_s=cfg.signal_frequency)
    vg, bg = ctx.grids()
    beta_model = abs(average_response(cfg, vg, bg)["coherence"]) / cfg.rabi_mw
    rows = [
        ("aperture_single_beam", budget.effective_aperture(cfg.beam_waist, 1), "m2"),
        ("aperture_four_field", ap4, "m2"),
        ("loss_chain_transmission", chain.transmission, "1"),
        ("measured_efficiency", budget.measured_efficiency(
            REFERENCE["peak_photon_rate"], REFERENCE["peak_mw_intensity"], ap4, cfg.mw_frequency), "1"),
        ("measured_efficiency_atomic", budget.measured_efficiency(
            REFERENCE["peak_photon_rate"], REFERENCE["peak_mw_intensity"], ap4, cfg.mw_frequency, chain), "1"),
        ("beta_reference", REFERENCE["beta_reference"], "s"),
        ("theoretical_efficiency_reference_beta", budget.theoretical_efficiency(REFERENCE["beta_reference"], **common), "1"),
        ("beta_model", beta_model, "s"),
        ("theoretical_efficiency_model_beta", budget.theoretical_efficiency(beta_model, **common), "1"),
    ]
    return {"efficiency.csv": (["quantity", "value", "unit"], rows)}, {r[0]: r[1] for r in rows}


def golden_numbers(cfg: ConverterConfig | None = None, n_theta=181) -> dict:
    """Closed-form and bookkeeping numbers (the quick acceptance inputs)."""
    cfg = cfg or ConverterConfig()
    p = phasematch.reception_pattern(cfg, n_theta)
    E = thermal.band_integrate_field(C.pv_per_cm(480.0), C.mhz(17.8))
    ap4 = budget.effective_aperture(cfg.beam_waist, 4)
    dec = budget.decompose_sources(np.array(REFERENCE["onoff_rates"]))
    floor, _, _ = budget.narrowband_floor()
    k_s = cfg.signal_frequency / C.c
    return {
        "total_density_nV_cm": float(C.to_nv_per_cm(thermal.total_field_fluctuations(300.0, cfg.mw_frequency))),
        "effective_density_pV_cm": float(C.to_pv_per_cm(thermal.effective_field_spectral_density(300.0, p, cfg.mw_frequency))),
        "coupling_fraction": phasematch.coupling_fraction(p),
        "band_field_uV_cm": float(C.to_uv_per_cm(E)),
        "band_intensity_W_m2": float(thermal.intensity_from_field(E)),
        "decomposition_percent": dict(zip(dec.labels, map(float, dec.percentages()))),
        "measured_efficiency": budget.measured_efficiency(4.44e5, 8.1e-8, ap4, cfg.mw_frequency),
        "measured_efficiency_atomic": budget.measured_efficiency(4.44e5, 8.1e-8, ap4, cfg.mw_frequency, 0.42),
        "theoretical_efficiency": budget.theoretical_efficiency(
            REFERENCE["beta_reference"], cfg.dipole_mw, cfg.dipole_signal, cfg.atomic_density, cfg.effective_length,
            k_s, cfg.mw_frequency, cfg.signal_frequency),
        "dynamic_range_dB": budget.dynamic_range_db(4.0e-10, 1.9e-4),
        "narrowband_dynamic_range_dB": budget.dynamic_range_db(8e-12, 2e-3),
        "derived_narrowband_floor_W_m2": floor,
        "net_nonthermal_K": thermal.noise_equivalent_temperature(310.0, 1740.0, 300.0),
        "net_cavity_K": thermal.noise_equivalent_temperature(4.2, 325.0, 295.0),
        "coherence_limit": float(photonstats.coherence_limit(8.2)),
        "g2_diluted_peak": 1 + (85 / 100) ** 2,
    }


def sc_report_all(ctx):
    g = golden_numbers(ctx.cfg, int(ctx.opt["n_theta"]))
    rows = []
    for k, v in g.items():
        if isinstance(v, dict):
            rows += [(f"{k}.{kk}", vv) for kk, vv in v.items()]
        else:
            rows.append((k, v))
    return {"report.csv": (["quantity", "value"], rows)}, g


SCENARIOS = {
    "steady-state": (sc_steady_state, "single-class density matrix and ensemble average at the working point"),
    "eit-vs-conversion": (sc_eit_vs_conversion, "EIT and conversion vs probe detuning, resonant and off-resonant"),
    "band": (sc_band, "conversion band vs MW detuning with FWHM and integral bandwidth"),
    "power-sweep": (sc_power_sweep, "converted intensity vs MW intensity: linear range and saturation"),
    "level-map": (sc_level_map, "2D conversion map over the two Rydberg level detunings"),
    "pattern": (sc_pattern, "polarisation-resolved reception pattern and coupling fraction"),
    "thermal-budget": (sc_thermal_budget, "black-body field densities and the noise-source table"),
    "g2-theory": (sc_g2_theory, "analytic g2 of converted thermal light: pure, diluted, beat"),
    "g2-simulate": (sc_g2_simulate, "Monte-Carlo time tags split 50:50 and their estimated g2"),
    "decompose": (sc_decompose, "laser on/off source decomposition with the design matrix"),
    "efficiency": (sc_efficiency, "effective apertures, loss chain, measured and theoretical efficiency"),
    "report-all": (sc_report_all, "golden-number table of closed-form and bookkeeping results"),
}


def _scenario_help():
    return "\n".join(f"  {name:<18} {h}" for name, (_, h) in SCENARIOS.items())


def build_parser():
    p = argparse.ArgumentParser(
        prog="rydconv",
        description="Rydberg microwave-to-optical converter simulator.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="scenarios:\n" + _scenario_help() + "\n\nalso: validate-config PATH, rerun MANIFEST",
    )
    sub = p.add_subparsers(dest="command", required=True, metavar="SCENARIO")
    for name, (_, h) in SCENARIOS.items():
        sp = sub.add_parser(name, help=h)
        sp.add_argument("--config", help="INI config file (defaults built in)")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key, e.g. rabi.probe_MHz_2pi=6")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--force", action="store_true", help="overwrite existing outputs")
        for key, val in DEFAULT_OPTIONS.items():
            sp.add_argument("--" + key.replace("_", "-"), dest=key, type=type(val), default=val)
    v = sub.add_parser("validate-config", help="check a config file")
    v.add_argument("path")
    r = sub.add_parser("rerun", help="re-run a scenario from its manifest")
    r.add_argument("manifest")
    r.add_argument("--out", help="output directory (defaults to the manifest's)")
    r.add_argument("--force", action="store_true")
    r.add_argument("--threads", type=int, default=1)
    return p


def _parse_overrides(items):
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not KEY=VALUE")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def execute(scenario, config_text, options, seed, out_dir, threads=1, force=False):
    """Run a scenario from a config snapshot; returns the manifest dict."""
    func = SCENARIOS[scenario][0]
    cfg = cfgmod.loads(config_text)
    out_dir = Path(out_dir)
    prefix = scenario.replace("-", "_")
    manifest_path = out_dir / f"{prefix}.manifest.json"
    if manifest_path.exists() and not force:
        raise FileExistsError(f"{manifest_path} exists; use --force to overwrite")
    t0 = time.perf_counter()
    res = func(Context(cfg, options, seed, threads))
    tables, results = res[0], res[1]
    blobs = res[2] if len(res) > 2 else {}
    names = [f"{prefix}.{n}" if not n.startswith(prefix) else n for n in tables] + \
            [f"{prefix}.{n}" for n in blobs] + [f"{prefix}.results.json"]
    for n in names:
        if (out_dir / n).exists() and not force:
            raise FileExistsError(f"{out_dir / n} exists; use --force to overwrite")
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for n, (header, rows) in tables.items():
        fn = n if n.startswith(prefix) else f"{prefix}.{n}"
        io.write_csv(out_dir / fn, header, rows)
        outputs.append(fn)
    for n, times in blobs.items():
        fn = f"{prefix}.{n}"
        io.write_timetags_binary(out_dir / fn, times)
        outputs.append(fn)
    io.write_json(out_dir / f"{prefix}.results.json", results)
    outputs.append(f"{prefix}.results.json")
    manifest = {
        "scenario": scenario,
        "config": config_text,
        "config_hash": cfgmod.config_hash(cfg),
        "options": options,
        "seed": seed,
        "outputs": outputs,
        "tool_version": __version__,
        "wall_clock_s": time.perf_counter() - t0,
        "results": results,
    }
    io.write_json(manifest_path, manifest)
    return manifest


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "validate-config":
            for line in cfgmod.validate_config(args.path):
                print(line)
            return 0
        if args.command == "rerun":
            m = io.read_json(args.manifest)
            if m.get("scenario") not in SCENARIOS:
                raise ConfigError(f"manifest names unknown scenario {m.get('scenario')!r}")
            out = args.out or str(Path(args.manifest).parent)
            execute(m["scenario"], m["config"], m["options"], m["seed"], out, args.threads, args.force)
            return 0
        base = cfgmod.load(args.config) if args.config else ConverterConfig()
        cfg = cfgmod.from_mapping(_parse_overrides(args.set), base)
        for line in cfgmod.diagnostics(cfg):
            print(line, file=sys.stderr)
        options = {k: getattr(args, k) for k in DEFAULT_OPTIONS}
        m = execute(args.command, cfgmod.dumps(cfg), options, args.seed, args.out, args.threads, args.force)
        print(f"{args.command}: wrote {', '.join(m['outputs'])} to {args.out}")
        return 0
    except (ConfigError, FileNotFoundError, FileExistsError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SingularLiouvillian, phasematch.QuadratureNotConverged, photonstats.FitDiverged,
            photonstats.InsufficientCounts, photonstats.EmptySpectrum, response.NoPeak,
            np.linalg.LinAlgError) as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
