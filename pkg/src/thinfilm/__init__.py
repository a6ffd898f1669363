"""Spectral toolkit for thin-film interface equations between rotating
cylinders: simulation, steady states, center-manifold asymptotics and
interface geometry."""

from .kernels import BACKEND
from .manifold import (AsymptoticFit, ReducedAmplitude, alpha, fit_asymptotics,
                       linear_L, nonlinear_R, q_map, psi2, reduced_closed_form,
                       reduced_phase_closed_form, reduced_rhs, slaving_defect)
from .models import (FrameTransform, ModelSpec, PhysicalParams,
                     apply_transform, canonical_transform, frame_speed,
                     invert_transform, linearized_symbol_for,
                     nondimensionalize, rhs)
from .evolution import (PositivityLost, SimulationState, SimulationTrace,
                        StepSizeUnderflow, min_height, simulate, step)
from .geometry import (InterfaceCurve, SpiralPrediction, curvature, dist_to_M0,
                       fit_circle, interface_curve, predicted_spiral)
from .spectral import (SpectralField, derivative, linear_symbol, multiply,
                       project_p0, project_p1, read_snapshot, sobolev_norm,
                       write_snapshot)
from .steady import (GivenJ, GivenMean, SteadyProblem, SteadySolution,
                     circular_family, constant_branch, flux, newton_solve,
                     travelling_wave_J, uniqueness_probe)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "SpectralField", "ModelSpec", "PhysicalParams",
    "FrameTransform", "SimulationState", "SimulationTrace", "SteadyProblem",
    "SteadySolution", "GivenJ", "GivenMean", "InterfaceCurve",
    "SpiralPrediction", "ReducedAmplitude", "AsymptoticFit",
    "PositivityLost", "StepSizeUnderflow",
    "alpha", "apply_transform", "canonical_transform", "circular_family",
    "constant_branch", "curvature", "derivative", "dist_to_M0",
    "fit_asymptotics", "fit_circle", "flux", "frame_speed", "interface_curve",
    "invert_transform", "linear_L", "linear_symbol", "linearized_symbol_for",
    "min_height", "multiply", "newton_solve", "nondimensionalize",
    "nonlinear_R", "predicted_spiral", "project_p0", "project_p1", "psi2",
    "q_map", "read_snapshot", "reduced_closed_form",
    "reduced_phase_closed_form", "reduced_rhs", "rhs", "simulate",
    "slaving_defect", "sobolev_norm", "step", "travelling_wave_J",
    "uniqueness_probe", "write_snapshot",
]
