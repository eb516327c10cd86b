"""Truncated spin (x) Fock state algebra.

Spin index 0 is |0> (F=0), index 1 is |+1>.  Motional states live on Fock
levels 0..N-1; population reaching the top ``ceil(N/10)`` levels is treated
as leakage out of the truncated space.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.special import eval_laguerre

from .errors import DomainError, TruncationError

LEAKAGE_BUDGET = 1e-8
THERMAL_TAIL = 1e-6
MIN_DIM = 8


def _top_levels(dim):
    return math.ceil(dim / 10)


def motional_leakage(vec):
    """Population in the top ``ceil(N/10)`` Fock levels of a motional vector (or stack of them)."""
    vec = np.asarray(vec)
    dim = vec.shape[-1]
    return float(np.sum(np.abs(vec[..., dim - _top_levels(dim):]) ** 2))


def required_dim(alpha_max, n_init=0):
    """Power-of-two Fock cutoff large enough to hold D(alpha)|n_init> within budget."""
    alpha_max = abs(alpha_max)
    n_init = int(n_init)
    if n_init < 0:
        raise DomainError("n_init must be >= 0")
    if alpha_max == 0:
        # No displacement: only |n_init> itself must stay clear of the leakage band.
        dim = MIN_DIM
        while n_init >= dim - _top_levels(dim):
            dim *= 2
        return dim
    target = (math.sqrt(n_init + 1) + alpha_max + 6.0) ** 2
    dim = MIN_DIM
    while dim < target:
        dim *= 2
    return dim


def coherent_vector(alpha, dim):
    """Fock amplitudes of |alpha> on levels 0..dim-1, renormalized after truncation."""
    if dim < 1:
        raise DomainError("dim must be >= 1")
    alpha = complex(alpha)
    c = np.empty(dim, dtype=complex)
    c[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, dim):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    c /= np.linalg.norm(c)
    leak = motional_leakage(c)
    if leak >= LEAKAGE_BUDGET:
        raise TruncationError(
            f"coherent state alpha={alpha} leaks {leak:.3g} at dim={dim}",
            leakage=leak,
            suggested_dim=required_dim(abs(alpha)),
        )
    return c


def fock_vector(n, dim):
    if not 0 <= n < dim:
        raise DomainError(f"Fock level {n} outside 0..{dim - 1}")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def annihilation(dim):
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def displacement_operator(alpha, dim):
    """exp(alpha a^dag - alpha* a) on the truncated space (Pade scaling-and-squaring)."""
    a = annihilation(dim)
    alpha = complex(alpha)
    return expm(alpha * a.conj().T - alpha.conjugate() * a)


def fock_displacement_expectation(n, beta):
    """<n|D(beta)|n> = exp(-|beta|^2/2) L_n(|beta|^2), real for any complex beta."""
    x = abs(beta) ** 2
    return math.exp(-x / 2) * float(eval_laguerre(n, x))


def ms_spin_basis(phi_sum=0.0):
    """Return (|->>, |<-) = (|0> +/- e^{i phi}|+1>) / sqrt(2) as length-2 arrays."""
    ph = np.exp(1j * phi_sum)
    s = 1 / math.sqrt(2)
    right = np.array([s, s * ph], dtype=complex)
    left = np.array([s, -s * ph], dtype=complex)
    return right, left


SPIN_0 = np.array([1.0, 0.0], dtype=complex)
SPIN_UP = np.array([0.0, 1.0], dtype=complex)


@dataclass(frozen=True)
class SpinMotionState:
    """Pure state over {|0>, |+1>} x {|n>, n < dim}; ``amplitudes`` has shape (2, dim)."""

    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 2 or amps.shape[0] != 2:
            raise DomainError(f"amplitudes must have shape (2, dim), got {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def product(cls, spin, motion):
        return cls(np.outer(np.asarray(spin, dtype=complex), np.asarray(motion, dtype=complex)))

    @classmethod
    def ground(cls, dim, spin=SPIN_0):
        return cls.product(spin, fock_vector(0, dim))

    @property
    def dim(self):
        return self.amplitudes.shape[1]

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    @property
    def leakage_estimate(self):
        return motional_leakage(self.amplitudes)

    @property
    def spin_populations(self):
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)

    @property
    def p_up(self):
        """Probability of finding the spin in |+1>."""
        return float(self.spin_populations[1])

    def fock_populations(self):
        return np.sum(np.abs(self.amplitudes) ** 2, axis=0)

    def max_fock_level(self, threshold=1e-12):
        pops = self.fock_populations()
        idx = np.nonzero(pops > threshold)[0]
        return int(idx[-1]) if idx.size else 0

    def spin_density(self):
        a = self.amplitudes
        return a @ a.conj().T

    def spin_entropy(self):
        """Von Neumann entropy of the reduced spin state, in bits."""
        w = np.linalg.eigvalsh(self.spin_density())
        w = w[w > 1e-300]
        return float(-np.sum(w * np.log2(w)))

    def overlap(self, other):
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other):
        """|<self|other>|^2; insensitive to global phase."""
        return abs(self.overlap(other)) ** 2

    def to_dict(self):
        rows = [
            [s, n, float(self.amplitudes[s, n].real), float(self.amplitudes[s, n].imag)]
            for s in range(2)
            for n in range(self.dim)
        ]
        return {"dim": self.dim, "leakage": self.leakage_estimate, "amplitudes": rows}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        amps = np.zeros((2, int(data["dim"])), dtype=complex)
        for s, n, re, im in data["amplitudes"]:
            amps[int(s), int(n)] = complex(re, im)
        return cls(amps)


def displace(state, alpha):
    """Apply D(alpha) to the motional part of ``state`` (SpinMotionState or motional vector)."""
    if isinstance(state, SpinMotionState):
        D = displacement_operator(alpha, state.dim)
        out = SpinMotionState(state.amplitudes @ D.T)
        leak = out.leakage_estimate
    else:
        vec = np.asarray(state, dtype=complex)
        out = displacement_operator(alpha, vec.shape[-1]) @ vec
        leak = motional_leakage(out)
    if leak >= LEAKAGE_BUDGET:
        dim = out.dim if isinstance(out, SpinMotionState) else out.shape[-1]
        raise TruncationError(
            f"displacement by {alpha} leaks {leak:.3g} at dim={dim}; try dim={2 * dim}",
            leakage=leak,
            suggested_dim=2 * dim,
        )
    return out


def coherent_state(alpha, dim, spin=None):
    """Coherent motional state; with ``spin`` given, the product spin (x) |alpha>."""
    vec = coherent_vector(alpha, dim)
    if spin is None:
        return vec
    return SpinMotionState.product(spin, vec)


def thermal_dim(nbar, tail=THERMAL_TAIL):
    """Smallest N whose thermal tail mass (nbar/(nbar+1))^N falls below ``tail``."""
    if nbar < 0 or not math.isfinite(nbar):
        raise DomainError(f"nbar must be finite and >= 0, got {nbar!r}")
    if nbar == 0:
        return 1
    r = nbar / (nbar + 1.0)
    n = max(1, math.ceil(math.log(tail) / math.log(r)))
    while r**n >= tail:
        n += 1
    return n


@dataclass(frozen=True)
class ThermalEnsemble:
    nbar: float
    dim: int
    weights: np.ndarray = field(repr=False)


def thermal_ensemble(nbar, dim=None, tail=THERMAL_TAIL):
    """Geometric Fock weights p_n = nbar^n / (nbar+1)^(n+1), renormalized over 0..dim-1."""
    need = thermal_dim(nbar, tail)
    if dim is None:
        dim = need
    elif dim < need:
        raise TruncationError(
            f"thermal tail for nbar={nbar} exceeds {tail:g} at dim={dim}",
            suggested_dim=need,
        )
    n = np.arange(dim)
    if nbar == 0:
        w = (n == 0).astype(float)
    else:
        w = np.exp(n * math.log(nbar / (nbar + 1.0))) / (nbar + 1.0)
    w = w / w.sum()
    w.setflags(write=False)
    return ThermalEnsemble(float(nbar), int(dim), w)
