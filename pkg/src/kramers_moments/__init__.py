"""Semi-analytical Knudsen-layer solutions of Kramers' problem.

Linearized moment closures of the shear half-space problem admit closed-form
velocity profiles: an affine far field plus one decaying exponential per
positive eigenvalue of the reduced transport matrix.  This package builds the
closure at arbitrary order, solves the accommodation wall conditions exactly,
evaluates the derived observables (slip coefficient, velocity defect,
effective viscosity), and cross-validates everything against an independent
discrete-ordinates solution of the linearized BGK equation.
"""

from .exceptions import NumericalError, ValidationError
from .hermite import (
    HermiteTransform,
    QuadratureRule,
    hermite_rule,
    hermite_transform,
    hermite_value,
    modified_hermite_roots,
    modified_hermite_value,
    rhat_matrix,
)
from .halfspace import (
    HalfSpaceTable,
    accommodation_moment_s,
    boundary_vectors_and_matrix,
    full_moment_k,
    half_moment_sstar,
    j_moment,
)
from .moment_system import (
    LayerWidths,
    ParityBlocks,
    ShearSystem,
    SpectralSplit,
    build_shear_system,
    layer_widths,
    parity_blocks,
    spectral_split,
)
from .solver import (
    BoundaryAssembly,
    KramersSolution,
    assemble_boundary_system,
    gu_r26_viscosity,
    lockerby_viscosity,
    solve_kramers,
)
from .bgk import (
    EquivalenceReport,
    OracleSolution,
    OrdinatesSystem,
    build_ordinates_system,
    equivalence_report,
    moment_to_ordinates,
    moment_vector,
    quadrature_halfspace_moment,
    solve_bvp_finite_difference,
    solve_ordinates_modes,
    wall_condition_residual,
    discrete_ode_residual,
)

__version__ = "0.1.0"

__all__ = [
    "NumericalError",
    "ValidationError",
    "QuadratureRule",
    "HermiteTransform",
    "hermite_value",
    "modified_hermite_value",
    "hermite_rule",
    "modified_hermite_roots",
    "hermite_transform",
    "rhat_matrix",
    "HalfSpaceTable",
    "j_moment",
    "full_moment_k",
    "half_moment_sstar",
    "accommodation_moment_s",
    "boundary_vectors_and_matrix",
    "ShearSystem",
    "SpectralSplit",
    "ParityBlocks",
    "LayerWidths",
    "build_shear_system",
    "spectral_split",
    "parity_blocks",
    "layer_widths",
    "BoundaryAssembly",
    "KramersSolution",
    "assemble_boundary_system",
    "solve_kramers",
    "gu_r26_viscosity",
    "lockerby_viscosity",
    "OrdinatesSystem",
    "OracleSolution",
    "EquivalenceReport",
    "build_ordinates_system",
    "quadrature_halfspace_moment",
    "solve_ordinates_modes",
    "moment_vector",
    "moment_to_ordinates",
    "wall_condition_residual",
    "discrete_ode_residual",
    "solve_bvp_finite_difference",
    "equivalence_report",
]
