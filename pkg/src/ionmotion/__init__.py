"""Gradient-mediated spin-motion coupling of a trapped ion: closed forms, a
Fock-space integrator, spectrum models and fitting."""

from .dynamics import (
    DriveConfig,
    alpha_of_t,
    cat_state_fidelity,
    detuning_scan,
    evolve_numeric,
    max_branch_distance,
    p_up_ground,
    p_up_thermal,
)
from .errors import DomainError, IntegrationError, ParseError, TruncationError
from .estimators import SidebandSpectrumRegressor, TwoIonSpectrumRegressor
from .fock import SpinMotionState, coherent_state, displace, ms_spin_basis, required_dim
from .params import (
    YB171,
    IonSpecies,
    TrapEnvironment,
    crosstalk_bound,
    effective_lamb_dicke,
    gradient_from_splitting,
    laser_lamb_dicke,
    splitting_from_gradient,
    two_ion_separation,
)
from .scan import ScanResult
from .spectroscopy import (
    FitResult,
    LineshapeModel,
    fit,
    rabi_line,
    sideband_spectrum,
    simulate_shots,
    two_ion_spectrum,
)

__version__ = "0.1.0"
