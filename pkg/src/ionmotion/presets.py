"""Experimental parameter sets behind the three reproduced figures.

Values are taken from the figure captions and surrounding text of the
experiment; each carries a note on where it comes from.  Frequencies are
stored in rad/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import TWO_PI
from .dynamics import DriveConfig
from .params import YB171, TrapEnvironment, splitting_from_gradient, two_ion_separation
from .spectroscopy import LineshapeModel

NU_Z = TWO_PI * 268e3  # axial COM frequency measured by sideband spectroscopy
GRADIENT = 23.3  # T/m, from the two-ion splitting
ETA_EFF = 0.013  # quoted effective Lamb-Dicke parameter at 268 kHz
SHOTS = 200  # measurements averaged per data point

TRAP = TrapEnvironment(nu_z=NU_Z, gradient=GRADIENT)
RAMAN_WAVELENGTH = 369.5e-9  # S1/2 - P1/2, counterpropagating Raman pair


@dataclass(frozen=True)
class Fig3:
    """Two-ion individual addressing scan (resonances ~2.71 MHz apart)."""

    rabi: float = TWO_PI * 40e3  # Rabi frequency used for the crosstalk estimate
    gradient: float = GRADIENT
    nu_z: float = NU_Z

    @property
    def separation(self):
        return two_ion_separation(YB171, self.nu_z)

    @property
    def splitting(self):
        return splitting_from_gradient(YB171, self.gradient, self.separation)

    @property
    def pulse_time(self):
        return math.pi / self.rabi  # resonant pi pulse

    def grid(self):
        # -200 kHz .. splitting + 200 kHz in 5 kHz steps
        hi = self.splitting / TWO_PI + 200e3
        return TWO_PI * np.arange(-200e3, hi + 1.0, 5e3)

    def model(self):
        return LineshapeModel(
            carrier_freqs=(0.0, self.splitting),
            rabi=self.rabi,
            pulse_time=self.pulse_time,
            include_sidebands=False,
        )


@dataclass(frozen=True)
class Fig4:
    """Carrier + sideband spectrum after Doppler cooling, 40 us pulse."""

    rabi: float = TWO_PI * 46e3  # carrier Rabi frequency
    nu_z: float = NU_Z
    pulse_time: float = 40e-6
    nbar: float = 290.0  # fitted thermal occupation
    eta_eff: float = ETA_EFF

    def grid(self):
        """Fine grid for the theory curve, 1 kHz steps over +-400 kHz."""
        return TWO_PI * np.arange(-400e3, 400e3 + 1.0, 1e3)

    def data_grid(self):
        """Synthetic measurement grid: +-400 kHz in 10 kHz steps."""
        return TWO_PI * np.arange(-400e3, 400e3 + 1.0, 10e3)

    def model(self):
        return LineshapeModel(
            rabi=self.rabi,
            pulse_time=self.pulse_time,
            nu_z=self.nu_z,
            eta_eff=self.eta_eff,
            nbar=self.nbar,
        )


@dataclass(frozen=True)
class Fig5:
    """Spin-dependent force detuning scan at fixed pulse length."""

    rabi: float = TWO_PI * 35e3
    duration: float = 180e-6
    nbar: float = 110.0  # thermal occupation used for the theory line
    eta_eff: float = ETA_EFF

    def drive(self, detuning=0.0):
        return DriveConfig(rabi=self.rabi, detuning=detuning, duration=self.duration)

    def grid(self):
        """Theory grid, +-25 kHz in 50 Hz steps."""
        return TWO_PI * np.arange(-25e3, 25e3 + 1.0, 50.0)

    def data_grid(self):
        return TWO_PI * np.arange(-25e3, 25e3 + 1.0, 1e3)

    def zeros(self, j_max=4):
        """Detunings 2 pi j / tau, j = +-1..j_max, where the phase-space loop closes."""
        j = np.concatenate([-np.arange(j_max, 0, -1), np.arange(1, j_max + 1)])
        return TWO_PI * j / self.duration


FIG3 = Fig3()
FIG4 = Fig4()
FIG5 = Fig5()
FIGURES = {"fig3": FIG3, "fig4": FIG4, "fig5": FIG5}
