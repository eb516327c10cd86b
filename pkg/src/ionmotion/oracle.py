"""Self-check suite: closed forms against independent numerical routes.

Each check returns its largest deviation; a profile fixes the tolerances and
the Fock cutoff policy.  Run from the command line with ``ionmotion oracle-check``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import eval_laguerre

from . import constants as const
from .dynamics import (
    DriveConfig,
    alpha_of_t,
    cat_state_fidelity,
    evolve_numeric,
    max_alpha,
    p_up_fock,
    p_up_ground,
    p_up_thermal,
)
from .errors import IntegrationError, TruncationError
from .fock import SPIN_0, SpinMotionState, fock_vector, required_dim, thermal_ensemble
from .params import (
    YB171,
    IonSpecies,
    TrapEnvironment,
    effective_lamb_dicke,
    effective_lamb_dicke_z0_form,
    two_ion_separation,
)


@dataclass(frozen=True)
class Profile:
    name: str = "default"
    eq1_rtol: float = 1e-12
    separation_rtol: float = 1e-9
    laguerre_rtol: float = 1e-6
    integrator_atol: float = 1e-4
    cat_fidelity_atol: float = 1e-4
    dim_scale: float = 1.0
    n_drives: int = 12
    seed: int = 20130101


PROFILES = {
    "default": Profile(),
    "strict": Profile(name="strict", integrator_atol=1e-12),
    "undersized": Profile(name="undersized", dim_scale=0.5),
}


def golden_section_min(f, a, b, tol):
    """Golden-section search for the minimiser of a unimodal ``f`` on [a, b]."""
    invphi = (mpmath.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2


def separation_by_minimisation(species: IonSpecies, nu_z: float, dps=40):
    """Two-ion spacing by minimising the trap + Coulomb energy in extended precision.

    By symmetry z1 = -d/2, z2 = d/2, so the energy is
    m nu_z^2 d^2 / 4 + e^2 / (4 pi eps0 d).
    """
    with mpmath.workdps(dps):
        m = mpmath.mpf(species.mass_amu) * mpmath.mpf(const.u)
        k = mpmath.mpf(const.e) ** 2 / (4 * mpmath.pi * mpmath.mpf(const.epsilon_0))
        w2 = mpmath.mpf(nu_z) ** 2

        def energy(d):
            return m * w2 * d**2 / 4 + k / d

        d = golden_section_min(energy, mpmath.mpf("1e-9"), mpmath.mpf("1e-3"), mpmath.mpf("1e-22"))
        return float(d)


def check_eq1(profile, rng):
    worst = 0.0
    for _ in range(200):
        sp = IonSpecies(mass_amu=rng.uniform(1, 250), zeeman_slope=const.mu_B / const.hbar)
        trap = TrapEnvironment(nu_z=rng.uniform(1e4, 1e7), gradient=rng.uniform(0.1, 200))
        a = effective_lamb_dicke(sp, trap)
        b = effective_lamb_dicke_z0_form(sp, trap)
        worst = max(worst, abs(a - b) / abs(b))
    return worst, profile.eq1_rtol


def check_separation(profile, rng):
    worst = 0.0
    for _ in range(5):
        nu = const.TWO_PI * rng.uniform(50e3, 3e6)
        a = two_ion_separation(YB171, nu)
        b = separation_by_minimisation(YB171, nu)
        worst = max(worst, abs(a - b) / b)
    return worst, profile.separation_rtol


def check_laguerre(profile, rng):
    worst = 0.0
    for nbar in (0.0, 1.0, 5.0):
        ens = thermal_ensemble(nbar, tail=1e-14)
        n = np.arange(ens.dim)
        for a in np.linspace(0.0, 0.5, 11):
            lhs = float(np.dot(ens.weights, eval_laguerre(n, 4 * a * a))) * math.exp(-2 * a * a)
            rhs = math.exp(-2 * (2 * nbar + 1) * a * a)
            worst = max(worst, abs(lhs - rhs) / rhs)
    return worst, profile.laguerre_rtol


def _random_drive(rng):
    delta = const.TWO_PI * rng.uniform(2e3, 20e3) * rng.choice([-1, 1])
    eta = 0.013
    a0 = rng.uniform(0.02, 0.5)
    rabi = abs(2 * a0 * delta / eta)
    tau = rng.uniform(0.1, 2.5) * const.TWO_PI / abs(delta)
    return DriveConfig(rabi=rabi, detuning=delta, duration=tau, phase_sum=rng.uniform(0, 2 * math.pi)), eta


def _sized_dim(profile, drive, eta, n):
    return max(2, int(required_dim(max_alpha(drive, eta), n) * profile.dim_scale))


def check_integrator(profile, rng):
    worst = 0.0
    for i in range(profile.n_drives):
        drive, eta = _random_drive(rng)
        n = i % 3
        dim = _sized_dim(profile, drive, eta, n)
        psi = SpinMotionState.product(SPIN_0, fock_vector(n, dim))
        out = evolve_numeric(drive, eta, psi)
        worst = max(worst, abs(out.p_up - p_up_fock(drive, eta, n=n)))
    return worst, profile.integrator_atol


def check_cat_state(profile, rng):
    drive = DriveConfig(rabi=const.TWO_PI * 35e3, detuning=const.TWO_PI * 10e3, duration=100e-6)
    eta = 0.013
    dim = _sized_dim(profile, drive, eta, 0)
    worst = 0.0
    for t in np.linspace(0, const.TWO_PI / drive.detuning, 5):
        fid, _ = cat_state_fidelity(drive, eta, t=float(t), dim=dim)
        worst = max(worst, 1 - fid)
    return worst, profile.cat_fidelity_atol


def check_zeros(profile, rng):
    tau = 180e-6
    worst = 0.0
    for j in range(1, 6):
        drive = DriveConfig(rabi=const.TWO_PI * 35e3, detuning=const.TWO_PI * j / tau, duration=tau)
        worst = max(worst, p_up_ground(drive, 0.013), p_up_thermal(drive, 0.013, nbar=110))
        worst = max(worst, abs(alpha_of_t(drive, 0.013)))
    return worst, 1e-10


CHECKS = {
    "eq1_dual_form": check_eq1,
    "separation_vs_minimiser": check_separation,
    "thermal_laguerre_identity": check_laguerre,
    "integrator_vs_analytic": check_integrator,
    "cat_state_fidelity": check_cat_state,
    "loop_closure_zeros": check_zeros,
}


def run_checks(profile: Profile):
    """Run every check; returns (all_passed, report dict)."""
    rng = np.random.default_rng(profile.seed)
    report = {"profile": profile.name, "checks": {}}
    ok = True
    for name, check in CHECKS.items():
        try:
            dev, tol = check(profile, rng)
            passed = bool(dev <= tol)
            report["checks"][name] = {"max_deviation": float(dev), "tolerance": tol, "passed": passed}
        except (TruncationError, IntegrationError) as exc:
            passed = False
            report["checks"][name] = {"error": f"{type(exc).__name__}: {exc}", "passed": False}
        ok = ok and passed
    report["passed"] = ok
    report["failed"] = [k for k, v in report["checks"].items() if not v["passed"]]
    return ok, report
