"""Walk through the converter at its working point.

We solve a single velocity class first, then average over the Doppler
profile and the beam cross section, and finally sweep the MW detuning to
see the conversion band.  The whole script takes well under a minute.
"""

import numpy as np

from rydconv import constants as C, response
from rydconv.config import ConverterConfig
from rydconv.core import build_hamiltonian, build_jump_operators, signal_coherence, steady_state
from rydconv.ensemble import average_response, default_grids

cfg = ConverterConfig()
vg, bg = default_grids(cfg)  # coarser velocity grids alias the Doppler profile

# one atom at rest
rho = steady_state(build_hamiltonian(cfg), build_jump_operators(cfg))
print("populations (g, e, r1, r2, s):", np.round(rho.diagonal().real, 4))
print("signal coherence, atom at rest:", signal_coherence(rho))

# the warm ensemble
avg = average_response(cfg, vg, bg)
print("ensemble signal coherence:", avg["coherence"])
print("beta = |rho_s| / Omega_MW = %.3g s" % (abs(avg["coherence"]) / cfg.rabi_mw))

# conversion band against MW detuning
det = cfg.detuning_mw + C.mhz(np.linspace(-60, 60, 61))
band = response.sweep_mw_detuning(cfg, det, vg, bg)
print("band peak at %.1f MHz, FWHM %.1f MHz, integral width %.1f MHz" % (
    C.to_mhz(band.axis[np.argmax(band.values)]), C.to_mhz(response.fwhm(band)),
    C.to_mhz(response.integral_bandwidth(band))))

# detuning the 55D level helps: compare the level-map cut at 0 and 20 MHz
cut = response.sweep_level_detuning(cfg, C.mhz(np.array([0.0, 20.0])), vgrid=vg, bgrid=bg)
print("conversion gain from a 20 MHz 55D detuning: x%.1f" % (cut.values[1] / cut.values[0]))
