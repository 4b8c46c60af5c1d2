"""Kramers' problem: boundary-system solve and the derived observables.

The bounded solution of the shear subsystem on the half-space is

    u1(y) = -sigma12*y/Kn - 2 sum_i c_i exp(-y/(Kn*l_i)) + c0,

with one decaying exponential per positive eigenvalue l_i of the reduced
transport matrix.  The floor(M/2) wall conditions close the system

    A (c0, c_1, ..., c_{floor(M/2)-1})^T = -sigma12 * b,

where A = (h | (S - 2 h e1^T) Rhat_plus) is assembled from the exact
half-space moments.  Everything downstream (slip coefficient, velocity
defect, effective viscosity) is an explicit function of the solved
coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, sqrt, pi

import numpy as np

from .exceptions import NumericalError, ValidationError
from .halfspace import BoundaryVectors, assemble_matrix, boundary_vectors_and_matrix
from .hermite import modified_hermite_roots

__all__ = [
    "BoundaryAssembly",
    "KramersSolution",
    "assemble_boundary_system",
    "solve_kramers",
    "gu_r26_viscosity",
    "lockerby_viscosity",
    "COND_LIMIT",
]

# Equilibrated condition number above which assembly is rejected; the worst
# value over the validated grid (M <= 40, chi in [0.05, 1]) is ~5.6e10.
COND_LIMIT = 1.0e12


@dataclass(frozen=True)
class BoundaryAssembly:
    """Wall boundary system for one (order, chi): A c = -sigma12 b.

    ``det_a`` is reported as (sign, log|det|) expanded to a float, which
    overflows to inf beyond order ~45; ``cond_a`` is the condition number of
    the row-scaled, column-equilibrated system actually handed to the solver.
    """

    order: int
    chi: float
    matrix_a: np.ndarray
    vector_b: np.ndarray
    vector_h: np.ndarray
    matrix_s: np.ndarray
    det_a: float
    log_abs_det_a: float
    cond_a: float
    _row_scale: np.ndarray
    _col_scale: np.ndarray
    _scaled_a: np.ndarray


def assemble_boundary_system(order: int, chi: float) -> BoundaryAssembly:
    """Assemble and factor-check the boundary system.

    Raises NumericalError for a near-singular system (equilibrated condition
    number above COND_LIMIT), which signals a parameter regime outside the
    validated range.
    """
    vectors = boundary_vectors_and_matrix(order, chi)
    a = assemble_matrix(vectors)
    # row scale by 1/h (exact reformulation), then power-of-two column
    # equilibration; the raw matrix mixes double-factorial rows with
    # factorially small mode columns and is not LU-friendly as is.
    row_scale = 1.0 / vectors.h
    a_scaled = a * row_scale[:, None]
    col_max = np.max(np.abs(a_scaled), axis=0)
    if np.any(col_max == 0.0) or not np.all(np.isfinite(col_max)):
        raise NumericalError(f"degenerate boundary matrix at order={order}, chi={chi}")
    col_scale = np.exp2(-np.round(np.log2(col_max)))
    a_scaled = a_scaled * col_scale[None, :]
    cond = float(np.linalg.cond(a_scaled))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericalError(
            f"near-singular boundary system at order={order}, chi={chi}: "
            f"equilibrated condition number {cond:.3e}"
        )
    sign, logdet_scaled = np.linalg.slogdet(a_scaled)
    log_abs_det = float(
        logdet_scaled - np.sum(np.log(row_scale)) - np.sum(np.log(col_scale))
    )
    with np.errstate(over="ignore"):
        det = float(sign) * float(np.exp(log_abs_det))
    return BoundaryAssembly(
        order=order,
        chi=chi,
        matrix_a=a,
        vector_b=vectors.b,
        vector_h=vectors.h,
        matrix_s=vectors.s_matrix,
        det_a=det,
        log_abs_det_a=log_abs_det,
        cond_a=cond,
        _row_scale=row_scale,
        _col_scale=col_scale,
        _scaled_a=a_scaled,
    )


@dataclass(frozen=True)
class KramersSolution:
    """Closed-form solution coefficients plus the observables built on them.

    ``c_hat`` and ``lambda_hat`` pair mode amplitudes with positive decay
    rates; both are empty at order 3 where the velocity is affine.
    ``residual`` is the max-norm backward residual of the boundary solve
    relative to the right-hand side.
    """

    order: int
    chi: float
    kn: float
    sigma12: float
    c0: float
    c_hat: np.ndarray
    lambda_hat: np.ndarray
    residual: float

    def velocity(self, y: float) -> float:
        """Dimensionless velocity u1 at wall distance y >= 0."""
        if y < 0:
            raise ValidationError(f"wall distance must be >= 0, got {y}")
        tail = 2.0 * np.sum(self.c_hat * np.exp(-y / (self.kn * self.lambda_hat)))
        return -self.sigma12 * y / self.kn - float(tail) + self.c0

    def normalized_velocity(self, y: float) -> float:
        """u_tilde(y) = -Kn * u1(y) / sigma12."""
        self._require_shear()
        return -self.kn * self.velocity(y) / self.sigma12

    def velocity_defect(self, y: float) -> float:
        """Deviation from the far-field asymptote: u_tilde = y + slip - defect."""
        self._require_shear()
        if y < 0:
            raise ValidationError(f"wall distance must be >= 0, got {y}")
        tail = np.sum(self.c_hat * np.exp(-y / (self.kn * self.lambda_hat)))
        return -2.0 * self.kn * float(tail) / self.sigma12

    def slip_coefficient(self) -> float:
        """slip = -Kn c0 / sigma12; Kn-proportional, sigma12-free."""
        self._require_shear()
        return -self.kn * self.c0 / self.sigma12

    def viscosity_mode_amplitudes(self) -> np.ndarray:
        """Amplitudes -2 c_i / (lambda_i sigma12) entering the viscosity ratio."""
        self._require_shear()
        return -2.0 * self.c_hat / (self.lambda_hat * self.sigma12)

    def effective_viscosity(self, y: float) -> float:
        """Ratio mu_eff/mu = 1 / (1 + sum_i amp_i exp(-y/(lambda_i Kn)))."""
        if y < 0:
            raise ValidationError(f"wall distance must be >= 0, got {y}")
        amps = self.viscosity_mode_amplitudes()
        denom = 1.0 + float(np.sum(amps * np.exp(-y / (self.lambda_hat * self.kn))))
        if denom == 0.0:
            raise NumericalError(
                f"velocity-gradient pole at y={y} for order={self.order}, chi={self.chi}"
            )
        return 1.0 / denom

    def _require_shear(self) -> None:
        if self.sigma12 == 0.0:
            raise ValidationError("normalization by sigma12 undefined at sigma12 = 0")


def _solve_assembly(assembly: BoundaryAssembly, sigma12: float) -> tuple[np.ndarray, float]:
    rhs = -sigma12 * assembly.vector_b * assembly._row_scale
    try:
        c = np.linalg.solve(assembly._scaled_a, rhs) * assembly._col_scale
        # one refinement step guards the mildly graded entries
        resid = rhs - (assembly.matrix_a * assembly._row_scale[:, None]) @ c
        c = c + np.linalg.solve(assembly._scaled_a, resid) * assembly._col_scale
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"boundary solve failed at order={assembly.order}, chi={assembly.chi}: {exc}"
        ) from exc
    raw_resid = assembly.matrix_a @ c + sigma12 * assembly.vector_b
    scale = np.max(np.abs(assembly.vector_b)) * max(abs(sigma12), 1.0)
    return c, float(np.max(np.abs(raw_resid)) / scale)


def solve_kramers(order: int, chi: float, kn: float, sigma12: float = 1.0) -> KramersSolution:
    """Solve the wall boundary system and return the full coefficient set."""
    if kn <= 0:
        raise ValidationError(f"Knudsen number must be positive, got {kn}")
    if not np.isfinite(sigma12):
        raise ValidationError(f"shear stress must be finite, got {sigma12}")
    assembly = assemble_boundary_system(order, chi)
    c, residual = _solve_assembly(assembly, sigma12)
    n_modes = order // 2 - 1
    lam = modified_hermite_roots(order)[:n_modes]
    c_hat = c[1:].copy()
    c_hat.setflags(write=False)
    return KramersSolution(
        order=order,
        chi=chi,
        kn=kn,
        sigma12=sigma12,
        c0=float(c[0]),
        c_hat=c_hat,
        lambda_hat=lam,
        residual=residual,
    )


# Comparison models for the effective-viscosity studies.

_GU_DENOM = (0.48517e-2, 0.64884, 8.0995)


def _gu_coefficients(chi: float) -> tuple[float, float]:
    denom = _GU_DENOM[0] * chi**2 + _GU_DENOM[1] * chi + _GU_DENOM[2]
    lead = (chi - 2.0) / chi
    c1 = lead * (0.81265e-1 * chi**2 + 1.2824 * chi) / denom
    c2 = lead * (0.8565e-3 * chi**2 + 0.362 * chi) / denom
    return c1, c2


def gu_r26_viscosity(chi: float, kn: float, y: float) -> float:
    """R26-based effective-viscosity ratio of Gu et al."""
    if not 0.0 < chi <= 1.0:
        raise ValidationError(f"accommodation coefficient must be in (0, 1], got {chi}")
    if kn <= 0:
        raise ValidationError(f"Knudsen number must be positive, got {kn}")
    c1, c2 = _gu_coefficients(chi)
    bracket = 1.3042 * c1 * exp(-1.265 * y / kn) + 1.6751 * c2 * exp(-0.5102 * y / kn)
    return 1.0 / (1.0 - bracket)


def lockerby_viscosity(y: float) -> float:
    """Empirical wall-function effective-viscosity ratio of Lockerby et al.

    Singular at the wall: the ratio tends to 0 as y -> 0+, so y = 0 is
    rejected rather than extrapolated.
    """
    if y <= 0:
        raise ValidationError(
            "wall distance must be positive: the power-law factor diverges and "
            "the viscosity ratio tends to 0 as y -> 0+"
        )
    return 1.0 / (1.0 + 0.1859 * y**-0.464 * exp(-0.7902 * y))
