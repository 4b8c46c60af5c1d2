"""The decoupled steady shear-flow moment system and its spectral structure.

For order M the state vector is (u1, sigma12, f_3, ..., f_M) where f_i are the
cross moments coupling one unit of streamwise velocity with increasing powers
of the wall-normal velocity.  The transport matrix is tridiagonal with
super-diagonal 1..M-1 and unit sub-diagonal; dropping the first two rows and
columns leaves the reduced matrix whose eigenvalues are the zeros of the
modified Hermite polynomial of degree M-2 and whose positive part carries the
boundary-layer modes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .hermite import modified_hermite_roots, rhat_matrix

__all__ = [
    "ShearSystem",
    "SpectralSplit",
    "ParityBlocks",
    "LayerWidths",
    "build_shear_system",
    "spectral_split",
    "parity_blocks",
    "layer_widths",
]


@dataclass(frozen=True)
class ShearSystem:
    order: int
    matrix_m: np.ndarray
    matrix_q: np.ndarray
    matrix_mhat: np.ndarray


def build_shear_system(order: int) -> ShearSystem:
    """Transport matrix, relaxation matrix and reduced transport matrix."""
    if order < 3:
        raise ValidationError(f"order must be >= 3, got {order}")
    m = np.zeros((order, order))
    for i in range(order - 1):
        m[i, i + 1] = i + 1
        m[i + 1, i] = 1.0
    q = np.eye(order)
    q[0, 0] = 0.0
    n = order - 2
    mhat = np.zeros((n, n))
    for i in range(n - 1):
        mhat[i, i + 1] = i + 3
        mhat[i + 1, i] = 1.0
    for arr in (m, q, mhat):
        arr.setflags(write=False)
    return ShearSystem(order=order, matrix_m=m, matrix_q=q, matrix_mhat=mhat)


@dataclass(frozen=True)
class SpectralSplit:
    """Eigenstructure of the reduced transport matrix, split by sign.

    ``lambda_plus`` holds the floor(M/2)-1 positive eigenvalues descending;
    the zero eigenvalue of odd orders lands in ``lambda_nonpos``.  ``rhat`` is
    normalized so its first row is all ones; ``rhat_plus`` are the columns of
    the decaying boundary-layer modes.
    """

    order: int
    lambda_plus: np.ndarray
    lambda_nonpos: np.ndarray
    rhat: np.ndarray
    rhat_plus: np.ndarray
    rhat_minus: np.ndarray


def spectral_split(system: ShearSystem) -> SpectralSplit:
    order = system.order
    roots = modified_hermite_roots(order)
    n_plus = order // 2 - 1
    rhat = rhat_matrix(order)
    split = SpectralSplit(
        order=order,
        lambda_plus=roots[:n_plus],
        lambda_nonpos=roots[n_plus:],
        rhat=rhat,
        rhat_plus=rhat[:, :n_plus],
        rhat_minus=rhat[:, n_plus:],
    )
    return split


@dataclass(frozen=True)
class ParityBlocks:
    """Row-parity blocks of the mode matrix and the even-first permutation.

    ``rhat_plus_even`` is square of size floor(M/2)-1 and invertible; its rows
    are the even-indexed (1-based) rows of the decaying-mode columns.
    """

    rhat_plus_even: np.ndarray
    rhat_plus_odd: np.ndarray
    rhat_minus_even: np.ndarray
    rhat_minus_odd: np.ndarray
    permutation: np.ndarray


def parity_blocks(split: SpectralSplit) -> ParityBlocks:
    n = split.order - 2
    # row order with the even 1-based rows ahead of the odd ones
    perm = np.concatenate([np.arange(1, n, 2), np.arange(0, n, 2)])
    return ParityBlocks(
        rhat_plus_even=split.rhat_plus[1::2, :],
        rhat_plus_odd=split.rhat_plus[0::2, :],
        rhat_minus_even=split.rhat_minus[1::2, :],
        rhat_minus_odd=split.rhat_minus[0::2, :],
        permutation=perm,
    )


@dataclass(frozen=True)
class LayerWidths:
    """Boundary-layer widths: all positive decay rates plus the smallest one.

    ``min_width`` is None at order 3, where the velocity is affine and no
    layer mode exists.
    """

    order: int
    lambda_plus: np.ndarray
    min_width: float | None


def layer_widths(split: SpectralSplit) -> LayerWidths:
    lp = split.lambda_plus
    return LayerWidths(
        order=split.order,
        lambda_plus=lp,
        min_width=float(lp.min()) if lp.size else None,
    )
