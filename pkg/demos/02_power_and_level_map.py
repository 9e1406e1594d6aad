"""Linear range, saturation and the bright-state resonances.

The converted intensity grows linearly with MW intensity until the MW
Rabi frequency becomes comparable to the optical ones.  In the plane of the
two Rydberg level detunings the conversion peaks at the bright dressed
states of the probe-coupling pair, split by sqrt(Op^2 + Oc^2).
"""
import numpy as np

from rydconv import constants as C, response
from rydconv.config import ConverterConfig
from rydconv.ensemble import default_grids

cfg = ConverterConfig()
vg, bg = default_grids(cfg)  # coarser velocity grids alias the Doppler profile

I = np.logspace(-12, -1, 23)
sweep = response.sweep_mw_power(cfg, I, vg, bg)
print("log-log slope at low power: %.3f" % response.loglog_slope(sweep))
print("3 dB compression at %.2g W/m2" % response.saturation_onset(sweep))
print("linear range: %.0f dB" % response.linear_range_db(sweep))

d55 = C.mhz(np.linspace(-40, 40, 41))
cut = response.sweep_level_detuning(cfg, d55, d54=0.0, vgrid=vg, bgrid=bg)
peaks = response.local_maxima(cut)
print("peaks along the 55D axis (MHz):", np.round(C.to_mhz(peaks), 2))
print("expected bright states (MHz):  ",
      np.round(C.to_mhz(np.array(response.bright_state_positions(cfg.rabi_probe, cfg.rabi_coupling))), 2))

# a crude text rendering of the cut
top = cut.values.max()
for x, y in zip(C.to_mhz(cut.axis[::2]), cut.values[::2]):
    print(f"{x:7.1f} " + "#" * int(round(40 * y / top)))
