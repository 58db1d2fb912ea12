"""Adiabatic sweeps of the transverse-field Ising chain.

Quasiparticle mode dynamics, weak-bath excitation amplitudes with
scaling analysis, sweep schedules including the step-wise spatial
path, and dense-diagonalization ground truth for all of it.
"""

from .chain import (
    ChainSpec,
    CouplingConstant,
    ModeCoefficients,
    excitation_matrix_element,
    fundamental_gap,
    ground_energy,
    mode_coefficients,
    momentum_grid,
)
from .decoherence import (
    BathSpectrum,
    SaddlePointAmplitude,
    ScalingFit,
    SpectralAmplitude,
    TotalExcitationResult,
    amplitude_bound,
    amplitude_numeric,
    amplitude_saddle_point,
    amplitude_suppressed_estimate,
    evaluate_channel,
    scaling_fit,
    total_excitation_probability,
)
from .dynamics import (
    BogoliubovState,
    ModeTrajectory,
    adiabatic_overlap,
    adiabatic_solution,
    excitation_probability,
    integrate_modes,
)
from .quadrature import OscillatoryResult, QuadratureError, oscillatory_integral
from .schedules import (
    GapAdaptedSchedule,
    LinearSchedule,
    Schedule,
    StepWisePath,
    StepWiseSweep,
    make_schedule,
    runtime_for_adiabaticity,
    schedule_from_dict,
    stepwise_hamiltonian_weights,
)

__version__ = "0.1.0"
