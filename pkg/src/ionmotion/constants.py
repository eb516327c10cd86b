"""Physical constants (CODATA 2018), SI units.

Kept as literals rather than pulled from ``scipy.constants`` because recent
SciPy releases ship CODATA 2022 and every derived number here should come
from a single, fixed table.
"""

import math

hbar = 1.054571817e-34  # J s (exact: h / 2pi with h exact)
mu_B = 9.2740100783e-24  # J / T
e = 1.602176634e-19  # C (exact)
epsilon_0 = 8.8541878128e-12  # F / m
u = 1.66053906660e-27  # kg
m_e_u = 5.48579909065e-4  # electron mass in u

TWO_PI = 2.0 * math.pi


def hz_to_angular(f):
    """Cyclic frequency (Hz) to angular frequency (rad/s)."""
    return TWO_PI * f


def angular_to_hz(w):
    return w / TWO_PI
