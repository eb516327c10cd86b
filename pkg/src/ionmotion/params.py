"""Ion and trap configuration plus the closed-form quantities derived from them.

All frequencies are angular (rad/s), all lengths in metres, gradients in T/m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from . import constants as const
from .errors import DomainError, ParseError
from .validation import check_finite, check_nonnegative, check_positive


@dataclass(frozen=True)
class IonSpecies:
    """Mass and magnetic response of the addressed transition.

    ``zeeman_slope`` is d(omega)/dB of the transition in rad s^-1 T^-1, so the
    differential force in a gradient is ``hbar * zeeman_slope * gradient``.
    """

    mass_amu: float
    zeeman_slope: float
    label: str = ""

    def __post_init__(self):
        check_positive(self.mass_amu, "mass_amu")
        check_finite(self.zeeman_slope, "zeeman_slope")

    @property
    def mass(self):
        """Mass in kg."""
        return self.mass_amu * const.u


# 171Yb+ : neutral atomic mass minus one electron; |0> <-> |+-1> shift at mu_B/hbar.
YB171 = IonSpecies(
    mass_amu=170.936331517 - const.m_e_u,
    zeeman_slope=const.mu_B / const.hbar,
    label="171Yb+",
)

PRESETS = {"171Yb+": YB171, "yb171": YB171}


@dataclass(frozen=True)
class TrapEnvironment:
    nu_z: float
    gradient: float = 0.0
    bias_field: float = 0.0

    def __post_init__(self):
        check_positive(self.nu_z, "nu_z")
        check_nonnegative(self.gradient, "gradient")
        check_finite(self.bias_field, "bias_field")


@dataclass(frozen=True)
class DerivedQuantities:
    z0: float
    eta_eff: float
    ion_separation: float
    splitting: float
    eta_laser: float | None = None


def ground_state_extent(species: IonSpecies, nu_z: float) -> float:
    """Ground-state wavefunction extent sqrt(hbar / (2 m nu_z))."""
    nu_z = check_positive(nu_z, "nu_z")
    return math.sqrt(const.hbar / (2.0 * species.mass * nu_z))


def differential_force(species: IonSpecies, gradient: float) -> float:
    return const.hbar * species.zeeman_slope * gradient


def effective_lamb_dicke(species: IonSpecies, trap: TrapEnvironment) -> float:
    """Gradient-induced Lamb-Dicke parameter for long-wavelength radiation.

    Evaluated in the closed form dF / (sqrt(2 m hbar) nu_z^(3/2)), which is
    algebraically identical to z0 dF / (hbar nu_z).
    """
    nu_z = check_positive(trap.nu_z, "nu_z")
    dF = differential_force(species, trap.gradient)
    return abs(dF) / (math.sqrt(2.0 * species.mass * const.hbar) * nu_z**1.5)


def effective_lamb_dicke_z0_form(species: IonSpecies, trap: TrapEnvironment) -> float:
    """Same quantity as :func:`effective_lamb_dicke` written as z0 dF / (hbar nu_z)."""
    z0 = ground_state_extent(species, trap.nu_z)
    dF = differential_force(species, trap.gradient)
    return z0 * abs(dF) / (const.hbar * trap.nu_z)


def laser_lamb_dicke(species, trap, wavelength, counterpropagating=True):
    """Optical Lamb-Dicke parameter k_eff * z0.

    For a counterpropagating Raman pair the difference wave vector is twice the
    single-beam wave number.
    """
    wavelength = float(wavelength)
    if math.isnan(wavelength) or wavelength <= 0:
        raise DomainError(f"wavelength must be > 0, got {wavelength!r}")
    k = const.TWO_PI / wavelength
    if counterpropagating:
        k *= 2.0
    return k * ground_state_extent(species, trap.nu_z)


def two_ion_separation(species: IonSpecies, nu_z: float) -> float:
    """Equilibrium spacing of two identical singly-charged ions in a harmonic well.

    Balancing the trap force m nu_z^2 d/2 against the Coulomb repulsion gives
    d^3 = e^2 / (2 pi eps0 m nu_z^2).
    """
    nu_z = check_positive(nu_z, "nu_z")
    d3 = const.e**2 / (2.0 * math.pi * const.epsilon_0 * species.mass * nu_z**2)
    return d3 ** (1.0 / 3.0)


def splitting_from_gradient(species: IonSpecies, gradient: float, separation: float) -> float:
    """Transition-frequency difference (rad/s) of two ions ``separation`` apart."""
    return species.zeeman_slope * gradient * separation


def gradient_from_splitting(species: IonSpecies, splitting: float, separation: float) -> float:
    """Axial field gradient (T/m) implied by a measured two-ion frequency splitting.

    For 171Yb+ this is hbar * splitting / (mu_B * separation).  The interleaved
    measurement quoted as 23.6 T/m corresponds, at the 268 kHz separation, to a
    splitting of about 2 pi x 2.745 MHz (see README).
    """
    separation = check_finite(separation, "separation")
    if separation <= 0:
        raise DomainError(f"separation must be > 0, got {separation!r}")
    if species.zeeman_slope == 0:
        raise DomainError("species has zero Zeeman slope; gradient is unobservable")
    return abs(check_finite(splitting, "splitting")) / (abs(species.zeeman_slope) * separation)


def crosstalk_bound(rabi: float, splitting: float) -> float:
    """Upper bound (rabi / splitting)^2 on off-resonant excitation of a spectator ion.

    With 2 pi x 40 kHz and 2 pi x 2.71 MHz this evaluates to 2.18e-4, which the
    experiment rounds down to "less than 2e-4".
    """
    rabi = check_finite(rabi, "rabi")
    splitting = check_finite(splitting, "splitting")
    if splitting == 0:
        raise DomainError("splitting must be non-zero")
    return (rabi / splitting) ** 2


def derive(species, trap, wavelength=None, counterpropagating=True):
    """Bundle every derived quantity for a trap configuration."""
    d = two_ion_separation(species, trap.nu_z)
    eta_laser = None
    if wavelength is not None:
        eta_laser = laser_lamb_dicke(species, trap, wavelength, counterpropagating)
    return DerivedQuantities(
        z0=ground_state_extent(species, trap.nu_z),
        eta_eff=effective_lamb_dicke(species, trap),
        ion_separation=d,
        splitting=splitting_from_gradient(species, trap.gradient, d),
        eta_laser=eta_laser,
    )


_SPECIES_KEYS = {"label", "mass_amu", "zeeman_slope_rad_per_s_per_T"}


def parse_species_cfg(text, path=None):
    """Parse a ``species.cfg`` (flat ``key = value`` with ``#`` comments)."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw!r}", lineno, path)
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _SPECIES_KEYS:
            raise ParseError(f"unknown key {key!r}", lineno, path)
        values[key] = (val, lineno)
    missing = _SPECIES_KEYS - {"label"} - values.keys()
    if missing:
        raise ParseError(f"missing keys: {', '.join(sorted(missing))}", None, path)

    def num(key):
        val, lineno = values[key]
        try:
            return float(val)
        except ValueError:
            raise ParseError(f"{key} is not a number: {val!r}", lineno, path) from None

    try:
        return IonSpecies(
            mass_amu=num("mass_amu"),
            zeeman_slope=num("zeeman_slope_rad_per_s_per_T"),
            label=values.get("label", ("", 0))[0],
        )
    except DomainError as exc:
        raise ParseError(str(exc), None, path) from None


def load_species(ref):
    """Resolve a preset name or a path to a ``species.cfg`` file."""
    if isinstance(ref, IonSpecies):
        return ref
    if str(ref) in PRESETS:
        return PRESETS[str(ref)]
    path = Path(ref)
    if not path.exists():
        raise ParseError(f"unknown species preset or file: {ref!r}")
    return parse_species_cfg(path.read_text(encoding="utf-8"), path=str(path))


def format_species_cfg(species: IonSpecies) -> str:
    return (
        f"label = {species.label}\n"
        f"mass_amu = {species.mass_amu!r}\n"
        f"zeeman_slope_rad_per_s_per_T = {species.zeeman_slope!r}\n"
    )
