"""Peakon dynamics for up to three peaks: metric, curvature, first integrals, collision prediction."""
from .core import (
    PeakonState,
    e_matrix,
    eom_rhs,
    hamiltonian,
    metric_matrix,
    momentum_from_velocity,
    peakon_field,
    velocity_from_momentum,
)
from .collision import Outcome, Verdict, predict, predict_2d, necessary_3d, collision_bound_2d
from .geometry import (
    curvature_eigenvalues,
    gauss_curvature_2d,
    riemann_3d,
    riemann_fd,
    sectional_curvature_3d,
)
from .integrator import IntegratorOptions, Status, Trajectory, exp_map, integrate
from .invariants import h0, h1, h2_threepeakon, hhat, invariant_drift

__all__ = [
    "PeakonState",
    "e_matrix",
    "eom_rhs",
    "hamiltonian",
    "metric_matrix",
    "momentum_from_velocity",
    "peakon_field",
    "velocity_from_momentum",
    "Outcome",
    "Verdict",
    "predict",
    "predict_2d",
    "necessary_3d",
    "collision_bound_2d",
    "curvature_eigenvalues",
    "gauss_curvature_2d",
    "riemann_3d",
    "riemann_fd",
    "sectional_curvature_3d",
    "IntegratorOptions",
    "Status",
    "Trajectory",
    "exp_map",
    "integrate",
    "h0",
    "h1",
    "h2_threepeakon",
    "hhat",
    "invariant_drift",
]
