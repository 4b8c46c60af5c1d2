"""Exact half-space Gaussian moments for the wall boundary conditions.

The central object is the table of half-range moments

    sstar(k, m) = integral_0^inf x^k He_m(x) exp(-x^2/2) dx.

Every entry is q*sqrt(2*pi) + r with rational q, r (one of the two always
vanishes, depending on the parity of k - m), so the table is built once in
exact Fraction arithmetic and rounded to float on readout.  The recursion

    sstar(k, m) = (k-1) sstar(k-2, m) + m sstar(k-1, m-1)

comes from integration by parts and is valid only for k >= 2; at k = 1 the
boundary term He_m(0) survives, so rows k = 0 and k = 1 are seeded directly:

    sstar(0, 0) = sqrt(pi/2),  sstar(0, m) = He_{m-1}(0)           (m >= 1)
    sstar(1, 0) = 1,           sstar(1, m) = He_m(0) + m sstar(0, m-1)

Running the bare recursion in floating point instead loses ~9 significant
digits by (k, m) ~ (20, 39) through cancellation, which is why the exact
path is the production path and not an option.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import sqrt, pi

import numpy as np

from .exceptions import ValidationError
from .hermite import hermite_at_zero, rhat_matrix

__all__ = [
    "HalfSpaceTable",
    "j_moment",
    "full_moment_k",
    "half_moment_sstar",
    "accommodation_moment_s",
    "boundary_vectors_and_matrix",
    "BoundaryVectors",
]

SQRT_2PI = sqrt(2.0 * pi)

_TABLE_STEP = 16  # exact tables are cached in size buckets to share work


def j_moment(k: int, u: float, theta: float) -> float:
    """Gaussian wall moment J_k(u, theta): J_0 = 1, J_1 = u, J_{k+1} = u J_k + k theta J_{k-1}."""
    if k < 0:
        raise ValidationError(f"moment index must be >= 0, got {k}")
    if theta <= 0:
        raise ValidationError(f"temperature must be positive, got {theta}")
    if k == 0:
        return 1.0
    prev, cur = 1.0, float(u)
    for j in range(1, k):
        prev, cur = cur, u * cur + j * theta * prev
    return cur


def full_moment_k(k: int, m: int) -> float:
    """Full-line moment of x^k He_m(x) against the unit Gaussian.

    Zero whenever k < m or k - m is odd; K(0, m) = delta_{0,m}.
    """
    if k < 0 or m < 0:
        raise ValidationError("indices must be >= 0")
    if k < m or (k - m) % 2:
        return 0.0
    # K(k, m) = (k-1) K(k-2, m) + m K(k-1, m-1), same parts integration on the
    # full line where no boundary term appears; run it on exact integers.
    table = {(0, 0): 1}

    def rec(kk: int, mm: int) -> int:
        if kk < 0 or mm < 0 or kk < mm or (kk - mm) % 2:
            return 0
        if (kk, mm) not in table:
            table[(kk, mm)] = (kk - 1) * rec(kk - 2, mm) + mm * rec(kk - 1, mm - 1)
        return table[(kk, mm)]

    return float(rec(k, m))


@lru_cache(maxsize=8)
def _sstar_exact(max_k: int, max_m: int) -> dict:
    """Exact table {(k, m): (q, r)} meaning q*sqrt(2*pi) + r, q and r Fractions."""
    table: dict = {}
    for m in range(max_m + 1):
        table[(0, m)] = (Fraction(1, 2), Fraction(0)) if m == 0 else (Fraction(0), Fraction(hermite_at_zero(m - 1)))
    if max_k >= 1:
        table[(1, 0)] = (Fraction(0), Fraction(1))
        for m in range(1, max_m + 1):
            q0, r0 = table[(0, m - 1)]
            table[(1, m)] = (m * q0, Fraction(hermite_at_zero(m)) + m * r0)
    for k in range(2, max_k + 1):
        for m in range(max_m + 1):
            q1, r1 = table[(k - 2, m)]
            q2, r2 = table[(k - 1, m - 1)] if m >= 1 else (Fraction(0), Fraction(0))
            table[(k, m)] = ((k - 1) * q1 + m * q2, (k - 1) * r1 + m * r2)
    return table


def _bucket(n: int) -> int:
    return _TABLE_STEP * ((n // _TABLE_STEP) + 1) - 1


def half_moment_sstar(k: int, m: int) -> float:
    """Half-space moment sstar(k, m), exact-rational table rounded to float."""
    if k < 0 or m < 0:
        raise ValidationError("indices must be >= 0")
    q, r = _sstar_exact(_bucket(k), _bucket(m))[(k, m)]
    return float(q) * SQRT_2PI + float(r)


def sstar_exact_parts(k: int, m: int) -> tuple[Fraction, Fraction]:
    """Exact (q, r) with sstar(k, m) = q*sqrt(2*pi) + r."""
    if k < 0 or m < 0:
        raise ValidationError("indices must be >= 0")
    return _sstar_exact(_bucket(k), _bucket(m))[(k, m)]


def _chi_factor(m: int, chi: float) -> float:
    return 1.0 if m % 2 == 0 else (2.0 - chi) / chi


def accommodation_moment_s(k: int, m: int, chi: float) -> float:
    """Accommodation-weighted moment S(k, m) = chi_hat * sstar(k, m)/sqrt(2*pi).

    chi_hat is 1 for even m and (2-chi)/chi for odd m; chi must lie in (0, 1].
    """
    if not 0.0 < chi <= 1.0:
        raise ValidationError(f"accommodation coefficient must be in (0, 1], got {chi}")
    return _chi_factor(m, chi) * half_moment_sstar(k, m) / SQRT_2PI


@dataclass(frozen=True)
class HalfSpaceTable:
    """Dense sstar table with an accommodation-weighted view at a fixed chi.

    The chi-independent core is shared across instances through the exact
    table cache, so sweeping chi costs only the scalar reweighting.
    """

    max_k: int
    max_m: int
    chi: float
    values: np.ndarray

    @classmethod
    def build(cls, max_k: int, max_m: int, chi: float) -> "HalfSpaceTable":
        if not 0.0 < chi <= 1.0:
            raise ValidationError(f"accommodation coefficient must be in (0, 1], got {chi}")
        exact = _sstar_exact(_bucket(max_k), _bucket(max_m))
        vals = np.empty((max_k + 1, max_m + 1))
        for k in range(max_k + 1):
            for m in range(max_m + 1):
                q, r = exact[(k, m)]
                vals[k, m] = float(q) * SQRT_2PI + float(r)
        vals.setflags(write=False)
        return cls(max_k=max_k, max_m=max_m, chi=chi, values=vals)

    def sstar(self, k: int, m: int) -> float:
        return float(self.values[k, m])

    def s(self, k: int, m: int) -> float:
        return _chi_factor(m, self.chi) * self.values[k, m] / SQRT_2PI


@dataclass(frozen=True)
class BoundaryVectors:
    """Ingredients of the wall boundary system for a given order and chi.

    ``h`` holds (beta2-1)!!/sqrt(2*pi) for odd beta2 = 1, 3, ...; ``b`` the
    S(beta2, 1) column; ``s_matrix`` the S(beta2, alpha2) block, alpha2 = 2..M-1.
    """

    order: int
    chi: float
    h: np.ndarray
    b: np.ndarray
    s_matrix: np.ndarray


def boundary_vectors_and_matrix(order: int, chi: float) -> BoundaryVectors:
    """Assemble h, b and the S block; rows indexed by odd beta2 up to 2*floor(M/2)-1."""
    if order < 3:
        raise ValidationError(f"order must be >= 3, got {order}")
    if not 0.0 < chi <= 1.0:
        raise ValidationError(f"accommodation coefficient must be in (0, 1], got {chi}")
    n_rows = order // 2
    table = HalfSpaceTable.build(2 * n_rows - 1, order - 1, chi)
    h = np.empty(n_rows)
    b = np.empty(n_rows)
    s = np.empty((n_rows, order - 2))
    for r in range(n_rows):
        beta2 = 2 * r + 1
        dfact = 1.0
        for j in range(2, beta2, 2):
            dfact *= j
        h[r] = dfact / SQRT_2PI
        b[r] = table.s(beta2, 1)
        for a2 in range(2, order):
            s[r, a2 - 2] = table.s(beta2, a2)
    for arr in (h, b, s):
        arr.setflags(write=False)
    return BoundaryVectors(order=order, chi=chi, h=h, b=b, s_matrix=s)


def assemble_matrix(vectors: BoundaryVectors) -> np.ndarray:
    """The square boundary matrix (h | (S - 2 h e1^T) Rhat_plus)."""
    order = vectors.order
    n_rows = order // 2
    n_modes = n_rows - 1
    if n_modes == 0:
        return vectors.h.reshape(1, 1).copy()
    rhat_plus = rhat_matrix(order)[:, :n_modes]
    shifted = vectors.s_matrix.copy()
    shifted[:, 0] -= 2.0 * vectors.h
    return np.hstack([vectors.h.reshape(-1, 1), shifted @ rhat_plus])
