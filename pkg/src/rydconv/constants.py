"""Physical constants and unit helpers.

Everything in the package is SI with angular frequencies in rad/s.  The
helpers below convert the display units used throughout the converter
literature (2*pi*MHz, uV/cm, nV cm^-1 (rad/s)^-1/2) to and from SI.
"""

import numpy as np
from scipy import constants as _c

hbar = _c.hbar
h = _c.h
c = _c.c
epsilon_0 = _c.epsilon_0
k_B = _c.k
e = _c.e
a0 = _c.physical_constants["Bohr radius"][0]
amu = _c.physical_constants["atomic mass constant"][0]

#: 85Rb atomic mass in kg.
MASS_RB85 = 84.911789738 * amu

TWO_PI = 2.0 * np.pi
#: One "2*pi*MHz" in rad/s.
MHZ_2PI = TWO_PI * 1e6
KHZ_2PI = TWO_PI * 1e3

# Vacuum wavelengths of the five-level scheme (m).
WAVELENGTH_PROBE = 780.241e-9
WAVELENGTH_COUPLING = 479.8e-9
WAVELENGTH_DECOUPLING = 1258.7e-9
WAVELENGTH_SIGNAL = 776.0e-9
MW_FREQUENCY_HZ = 13.9e9
WAVELENGTH_MW = c / MW_FREQUENCY_HZ


def wavenumber(wavelength):
    """Angular wavenumber 2*pi/lambda in 1/m."""
    return TWO_PI / wavelength


def mhz(x):
    """Convert a value in 2*pi*MHz to rad/s."""
    return x * MHZ_2PI


def to_mhz(x):
    """Convert rad/s to 2*pi*MHz."""
    return x / MHZ_2PI


# Field display units.  V/cm -> V/m is a factor of 100.
def uv_per_cm(x):
    return x * 1e-6 * 100.0


def to_uv_per_cm(x):
    return x / (1e-6 * 100.0)


def nv_per_cm(x):
    return x * 1e-9 * 100.0


def to_nv_per_cm(x):
    return x / (1e-9 * 100.0)


def pv_per_cm(x):
    return x * 1e-12 * 100.0


def to_pv_per_cm(x):
    return x / (1e-12 * 100.0)
