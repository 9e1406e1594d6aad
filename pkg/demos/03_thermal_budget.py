"""From black-body fluctuations to detected photons.

The receiver sees the room-temperature field through its reception
pattern.  This script follows the numbers from the free-space field
density, through the pattern, the band, and the measured efficiency, to the
noise table and the noise-equivalent temperature.
"""
import numpy as np

from rydconv import budget, constants as C, phasematch, thermal
from rydconv.config import ConverterConfig

cfg = ConverterConfig()
pattern = phasematch.reception_pattern(cfg)
print("sigma+ maximum at %.0f deg" % np.degrees(pattern.theta[np.argmax(pattern.gain_sigma_plus)]))
print("coupling fraction: %.4f" % phasematch.coupling_fraction(pattern))

tot = thermal.total_field_fluctuations(300.0)
eff = thermal.effective_field_spectral_density(300.0, pattern)
print("free-space field density: %.3f nV/cm/sqrt(rad/s)" % C.to_nv_per_cm(tot))
print("seen through the pattern: %.0f pV/cm/sqrt(rad/s)" % C.to_pv_per_cm(eff))

E = thermal.band_integrate_field(C.pv_per_cm(480.0), C.mhz(17.8))
print("in a 17.8 MHz band: %.2f uV/cm, %.3g W/m2" % (C.to_uv_per_cm(E), thermal.intensity_from_field(E)))

ap = budget.effective_aperture(cfg.beam_waist, 4)
eta = budget.measured_efficiency(4.44e5, 8.1e-8, ap, cfg.mw_frequency)
eta_at = budget.measured_efficiency(4.44e5, 8.1e-8, ap, cfg.mw_frequency, budget.DEFAULT_LOSS_CHAIN)
print("efficiency %.2f %% at the detector, %.2f %% at the atoms" % (100 * eta, 100 * eta_at))

dec = budget.decompose_sources(np.array([0, 0, 270, 0, 270, 40, 270, 2050]))
for lab, pct in zip(dec.labels, dec.percentages()):
    if pct:
        print(f"  {lab:6s} {pct:5.1f} %")

for row in budget.noise_table({"overall": 2050.0, "thermal": 1740.0, "non-thermal": 310.0}):
    print(f"  {row['source']:12s} NET {row['net_K']:.1f} K")
print("dynamic range: %.1f dB" % budget.dynamic_range_db(4.0e-10, 1.9e-4))
