"""Photon statistics of converted thermal light.

The band shape fixes g1 by Fourier transform and hence the bunching peak.
Uncorrelated noise dilutes the peak; a coherent tone adds a beat.  We also
simulate time tags, split them on a virtual beam splitter, and compare the
coincidence histogram with the analytic curve.
"""
import numpy as np

from rydconv import constants as C, photonstats as ps, response
from rydconv.config import ConverterConfig
from rydconv.ensemble import default_grids

cfg = ConverterConfig()
vg, bg = default_grids(cfg)  # coarser velocity grids alias the Doppler profile
band = response.sweep_mw_detuning(cfg, cfg.detuning_mw + C.mhz(np.linspace(-60, 60, 81)), vg, bg)

tau = 0.5e-9 * np.arange(-400, 401)
g1 = ps.g1_from_spectrum(band, tau)
g2 = ps.g2_thermal(g1)
fit = ps.fit_exponential_g2(g2)
print("g2(0) = %.3f, fitted coherence time %.1f ns" % (g2.g2[400], fit.tau0 * 1e9))
print("with 15 %% noise the peak drops to %.4f" % ps.g2_mixed(ps.RateMix(85, 0, 15), g1).g2.max())

beat = ps.g2_beat_special(g1, C.mhz(64.0))
print("beat with a 64 MHz tone: g2(0) = %.2f, period %.1f ns" % (beat.g2[400], ps.beat_period(C.mhz(64.0)) * 1e9))

stream = ps.simulate_thermal_stream(band, 2e6, 0.05, seed=1)
a, b = ps.split_stream(stream, 0.5, seed=2)
est = ps.estimate_g2(a, b, 2e-9, 100e-9)
model = ps.bin_average(lambda t: ps.g2_thermal(ps.g1_from_spectrum(band, t)).g2, est.tau, 2e-9)
z = (est.g2 - model) / est.stderr
print("%d simulated counts; estimate vs model: max |z| = %.2f over %d bins" % (len(stream), np.abs(z).max(), z.size))
for t, g, m in list(zip(est.tau, est.g2, model))[40:61:4]:
    print(f"  {t * 1e9:6.0f} ns  {g:.3f}  (model {m:.3f})")
