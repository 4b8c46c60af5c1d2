"""Probabilists' Hermite machinery.

Two polynomial families drive everything downstream:

* ``He_n``, orthogonal under the unit-mass Gaussian with norm ``n!``,
  via ``He_{n+1} = x He_n - n He_{n-1}``;
* the modified family ``MHe_n`` with ``MHe_{n+1} = x MHe_n - (n+2) MHe_{n-1}``,
  whose degree-(M-2) member is the characteristic polynomial of the reduced
  transport matrix of the shear subsystem.

Zeros of both families come from the symmetrized tridiagonal companion
(Golub-Welsch), which is stable in double precision well past order 60.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .exceptions import NumericalError, ValidationError

__all__ = [
    "QuadratureRule",
    "HermiteTransform",
    "hermite_value",
    "modified_hermite_value",
    "hermite_rule",
    "modified_hermite_roots",
    "hermite_transform",
    "rhat_matrix",
]


def hermite_value(n: int, x: float) -> float:
    """Evaluate He_n(x) (probabilists' normalization)."""
    if n < 0:
        raise ValidationError(f"Hermite degree must be >= 0, got {n}")
    if n == 0:
        return 1.0
    prev, cur = 1.0, float(x)
    for k in range(1, n):
        prev, cur = cur, x * cur - k * prev
    return cur


def modified_hermite_value(k: int, x: float) -> float:
    """Evaluate MHe_k(x): MHe_0 = 1, MHe_1 = x, MHe_{k+1} = x MHe_k - (k+2) MHe_{k-1}."""
    if k < 0:
        raise ValidationError(f"degree must be >= 0, got {k}")
    if k == 0:
        return 1.0
    prev, cur = 1.0, float(x)
    for j in range(1, k):
        prev, cur = cur, x * cur - (j + 2) * prev
    return cur


def hermite_at_zero(m: int) -> int:
    """He_m(0) as an exact integer: 0 for odd m, (-1)^(m/2) (m-1)!! for even m."""
    if m % 2:
        return 0
    v = 1
    for j in range(1, m, 2):
        v *= j
    return v if (m // 2) % 2 == 0 else -v


def _symmetrize(x: np.ndarray) -> np.ndarray:
    # roots of an even/odd polynomial come in +/- pairs; enforce it exactly
    return 0.5 * (x - x[::-1])


def _tridiagonal_eigs(offdiag: np.ndarray, need_vectors: bool):
    n = len(offdiag) + 1
    try:
        if need_vectors:
            return eigh_tridiagonal(np.zeros(n), offdiag)
        return eigh_tridiagonal(np.zeros(n), offdiag, eigvals_only=True), None
    except np.linalg.LinAlgError as exc:  # pragma: no cover - not seen for M <= 60
        raise NumericalError(f"tridiagonal eigensolve failed for size {n}: {exc}") from exc


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for the unit-mass Gaussian weight.

    ``nodes`` are the zeros of He_order sorted strictly descending; ``weights``
    are positive and sum to one.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=None)
def hermite_rule(order: int) -> QuadratureRule:
    """Nodes and weights of the order-point Gauss-Hermite rule, descending nodes."""
    if order < 1:
        raise ValidationError(f"quadrature order must be >= 1, got {order}")
    if order == 1:
        nodes = np.array([0.0])
        weights = np.array([1.0])
    else:
        lam, vec = _tridiagonal_eigs(np.sqrt(np.arange(1.0, order)), True)
        weights = vec[0] ** 2
        weights = weights / weights.sum()
        nodes = _symmetrize(lam)[::-1].copy()
        weights = (0.5 * (weights + weights[::-1]))[::-1].copy()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(order=order, nodes=nodes, weights=weights)


@lru_cache(maxsize=None)
def modified_hermite_roots(order: int) -> np.ndarray:
    """The M-2 zeros of MHe_{M-2}, descending.

    Contains 0 exactly when the order is odd; symmetric about 0.
    """
    if order < 3:
        raise ValidationError(f"order must be >= 3, got {order}")
    n = order - 2
    if n == 1:
        roots = np.array([0.0])
    else:
        lam, _ = _tridiagonal_eigs(np.sqrt(np.arange(3.0, order)), False)
        roots = _symmetrize(lam)[::-1].copy()
    roots.setflags(write=False)
    return roots


def _scaled_hermite_rows(points: np.ndarray, count: int) -> np.ndarray:
    """Rows He_{i-1}(points)/(i-1)! for i = 1..count, by incremental division.

    The in-recurrence division keeps every intermediate O(1)-bounded, which the
    separate polynomial/factorial route is not beyond order ~30.
    """
    rows = np.zeros((count, len(points)))
    rows[0] = 1.0
    if count > 1:
        prev, cur = np.ones(len(points)), points.astype(float).copy()
        rows[1] = cur
        for i in range(1, count - 1):
            prev, cur = cur, (points * cur - prev) / (i + 1)
            rows[i + 1] = cur
    return rows


def _raw_hermite_rows(points: np.ndarray, count: int) -> np.ndarray:
    """Rows He_{i-1}(points) for i = 1..count (no normalization)."""
    rows = np.zeros((count, len(points)))
    rows[0] = 1.0
    if count > 1:
        prev, cur = np.ones(len(points)), points.astype(float).copy()
        rows[1] = cur
        for i in range(1, count - 1):
            prev, cur = cur, points * cur - i * prev
            rows[i + 1] = cur
    return rows


def orthonormal_hermite_rows(points: np.ndarray, count: int) -> np.ndarray:
    """Rows He_{i-1}(points)/sqrt((i-1)!): the orthonormal family."""
    rows = np.zeros((count, len(points)))
    rows[0] = 1.0
    if count > 1:
        rows[1] = points
        for i in range(1, count - 1):
            rows[i + 1] = (points * rows[i] - np.sqrt(float(i)) * rows[i - 1]) / np.sqrt(i + 1.0)
    return rows


@dataclass(frozen=True)
class HermiteTransform:
    """Hermite transform matrices on the quadrature nodes of a given order.

    ``matrix_r`` holds He_{i-1}(node_j)/(i-1)!; its columns are the eigenvectors
    of the shear transport matrix. ``matrix_r_tilde`` is the unnormalized
    variant He_{i-1}(node_j), the inverse of matrix_r @ diag(weights).
    """

    order: int
    matrix_r: np.ndarray
    matrix_r_tilde: np.ndarray

    def orthonormal_defect(self) -> float:
        """Max-norm defect of the discrete orthonormality, in equilibrated form.

        The raw identity W R~^T R = I spans a factorial dynamic range and loses
        digits beyond order ~18 in doubles; conjugating by diag(sqrt(w)) gives
        the same statement about an orthogonal matrix and stays at roundoff.
        """
        rule = hermite_rule(self.order)
        p = orthonormal_hermite_rows(rule.nodes, self.order) * np.sqrt(rule.weights)
        return float(np.max(np.abs(p.T @ p - np.eye(self.order))))


@lru_cache(maxsize=None)
def hermite_transform(order: int) -> HermiteTransform:
    if order < 1:
        raise ValidationError(f"order must be >= 1, got {order}")
    nodes = hermite_rule(order).nodes
    r = _scaled_hermite_rows(nodes, order)
    rt = _raw_hermite_rows(nodes, order)
    r.setflags(write=False)
    rt.setflags(write=False)
    return HermiteTransform(order=order, matrix_r=r, matrix_r_tilde=rt)


def _scaled_modified_rows(points: np.ndarray, count: int) -> np.ndarray:
    # rows 2*MHe_{i-1}(points)/(i+1)!; first row is all ones
    rows = np.zeros((count, len(points)))
    rows[0] = 1.0
    if count > 1:
        prev, cur = np.ones(len(points)), points / 3.0
        rows[1] = cur
        for k in range(1, count - 1):
            prev, cur = cur, (points * cur - prev) / (k + 3)
            rows[k + 1] = cur
    return rows


@lru_cache(maxsize=None)
def rhat_matrix(order: int) -> np.ndarray:
    """Eigenvector matrix of the reduced transport matrix, shape (M-2, M-2).

    Column j evaluates the modified family at the j-th descending root,
    normalized so the first row is all ones (entry_ij = 2 MHe_{i-1}(root_j)/(i+1)!).
    That normalization is the one under which the mode amplitudes feed the
    velocity formula with coefficient -2.
    """
    roots = modified_hermite_roots(order)
    out = _scaled_modified_rows(roots, order - 2)
    out.setflags(write=False)
    return out
