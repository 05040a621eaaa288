"""Numerical laboratory for a viscous two-phase flow model on the half line:
stationary inflow boundary layers, their spectral classification and decay
laws, and nonlinear stability under direct time integration."""

__version__ = "0.1.0"

from .errors import (BlowUpError, ConfigError, GridMismatchError,
                     InsufficientDataError, InvalidParameterError,
                     NoProfileError, RegimeError, StructuralError,
                     TwoPhaseError)
from .model import (FarFieldData, ModelParams, RegimeLabel, classify_regime,
                    complete_far_field, far_field_from_plus, mach_number,
                    pressure, pressure_derivative, sonic_stability_margin,
                    sound_speed)
from .spectrum import (FarFieldJacobian, SpectrumReport, assemble_jacobian,
                       eigen_spectrum)
from .stationary import (CenterManifoldData, DecayReport, GridSpec,
                         StationaryProfile, SweepResult, boundary_slope_sweep,
                         center_manifold_coeff, decay_report, solve_stationary)
from .evolution import (EnergyReport, EvolutionState, PerturbationState,
                        RunResult, energy, init_state, perturbation, run, step)
from .analysis import (FitResult, WeightedInequalityReport, fit_algebraic_tail,
                       fit_exponential_tail, weighted_inequality_check)

__all__ = [name for name in dir() if not name.startswith("_")]
