"""Steady-state solvers: static, weak-probe first order and harmonic balance.

The periodic steady state is written ``R(t) = sum_k R_k exp(-i k delta t)``
with every probe factor absorbed into ``R_k``.  Matching harmonics in
``dR/dt = M(t) R - Lambda(t)`` gives the block-tridiagonal system

    (M0 + i k delta) R_k + omega_p M1 R_{k-1} + conj(omega_p) M-1 R_{k+1} = Lambda_k

with ``Lambda_k`` nonzero only for ``|k| <= 1``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from .errors import SingularMatrix, TruncationNotConverged
from .model import REDUCED_INDEX, RHO31, DensityVector, LiouvillianParts

logger = logging.getLogger(__name__)

PIVOT_RTOL = 1e-12
RESIDUAL_TOL = 1e-10
TRUNCATION_RTOL = 1e-8

# partner index of each reduced component under Hermitian conjugation
CONJ_PARTNER = tuple(REDUCED_INDEX.index((j, i)) for i, j in REDUCED_INDEX)


def solve_linear(a, b, pivot_rtol: float = PIVOT_RTOL, block: str | None = None) -> np.ndarray:
    """Solve ``a x = b`` by LU elimination with partial pivoting.

    Raises
    ------
    SingularMatrix
        If any selected pivot is smaller than ``pivot_rtol`` times the
        largest entry of ``a``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    scale = np.max(np.abs(a))
    if scale == 0:
        raise SingularMatrix("matrix is identically zero", block=block)
    with warnings.catch_warnings():
        # exact zero pivots are reported below with more context
        warnings.simplefilter("ignore", la.LinAlgWarning)
        lu, piv = la.lu_factor(a, check_finite=True)
    pivots = np.abs(np.diag(lu))
    smallest = int(np.argmin(pivots))
    if pivots[smallest] < pivot_rtol * scale:
        where = f" in block {block}" if block else ""
        raise SingularMatrix(
            f"pivot {pivots[smallest]:.3e} at column {smallest} below "
            f"{pivot_rtol:g} x max|a| = {pivot_rtol * scale:.3e}{where}",
            block=block,
        )
    return la.lu_solve((lu, piv), b)


def steady_state_static(m, l) -> DensityVector:
    """Solve ``m R = l`` and wrap the result; physical-state defects are logged."""
    state = DensityVector(solve_linear(m, l, block="static"))
    bad = state.violations()
    if bad:
        logger.warning("static steady state violates: %s", ", ".join(bad))
    return state


def weak_probe_first_order(parts: LiouvillianParts, delta: float):
    """Probe-independent coefficients ``(r0, r1, rm1)`` of the first-order solution."""
    eye = np.eye(8)
    r0 = solve_linear(parts.m0, parts.l0, block="M0")
    r1 = solve_linear(parts.m0 + 1j * delta * eye, parts.l1 - parts.m1 @ r0, block="M0 + i delta")
    rm1 = solve_linear(parts.m0 - 1j * delta * eye, parts.lm1 - parts.mm1 @ r0, block="M0 - i delta")
    return r0, r1, rm1


@dataclass
class HarmonicSolution:
    """Harmonic coefficients ``R_k`` for ``k = -K..K`` (probe factors included)."""

    k_max: int
    coefficients: dict[int, np.ndarray]
    residual_norm: float = 0.0
    delta: float | None = None
    meta: dict = field(default_factory=dict)

    def __getitem__(self, k: int) -> np.ndarray:
        if abs(k) > self.k_max:
            return np.zeros(8, dtype=complex)
        return self.coefficients[k]

    @property
    def ks(self) -> range:
        return range(-self.k_max, self.k_max + 1)

    def rho31(self, k: int = 1) -> complex:
        return complex(self[k][RHO31])

    def hermiticity_defect(self) -> float:
        """max over k of |rho_ij^(-k) - conj(rho_ji^(k))|."""
        worst = 0.0
        for k in self.ks:
            paired = np.conj(self[k][list(CONJ_PARTNER)])
            worst = max(worst, float(np.max(np.abs(self[-k] - paired))))
        return worst

    def matrix(self, k: int) -> np.ndarray:
        """3x3 harmonic matrix; rho33 by closure (1 - ... for k = 0, - ... otherwise)."""
        rho = np.zeros((3, 3), dtype=complex)
        r = self[k]
        for value, (i, j) in zip(r, REDUCED_INDEX):
            rho[i, j] = value
        rho[2, 2] = (1.0 if k == 0 else 0.0) - r[0] - r[1]
        return rho

    def trace_defect(self) -> float:
        """Trace error per harmonic plus the imaginary part of DC populations."""
        worst = float(np.max(np.abs(self[0][:2].imag)))
        for k in self.ks:
            worst = max(worst, abs(np.trace(self.matrix(k)) - (1.0 if k == 0 else 0.0)))
        return worst

    def evaluate(self, t) -> np.ndarray:
        """Reconstruct ``R(t)``; ``t`` may be a scalar or 1-d array."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((t.size, 8), dtype=complex)
        for k in self.ks:
            out += np.exp(-1j * k * self.delta * t)[:, None] * self[k][None, :]
        return out


def _block_system(parts: LiouvillianParts, delta: float, omega_p: complex, k_max: int):
    n = 8
    size = (2 * k_max + 1) * n
    a = np.zeros((size, size), dtype=complex)
    b = np.zeros(size, dtype=complex)
    up, down = omega_p * parts.m1, np.conj(omega_p) * parts.mm1
    eye = np.eye(n)
    for row, k in enumerate(range(-k_max, k_max + 1)):
        sl = slice(row * n, (row + 1) * n)
        a[sl, sl] = parts.m0 + 1j * k * delta * eye
        if row > 0:
            a[sl, (row - 1) * n:row * n] = up
        if row < 2 * k_max:
            a[sl, (row + 1) * n:(row + 2) * n] = down
    b[k_max * n:(k_max + 1) * n] = parts.l0
    b[(k_max + 1) * n:(k_max + 2) * n] = omega_p * parts.l1
    b[(k_max - 1) * n:k_max * n] = np.conj(omega_p) * parts.lm1
    return a, b


def harmonic_balance(parts: LiouvillianParts, delta: float, omega_p: complex, k_max: int = 6) -> HarmonicSolution:
    """Truncated harmonic balance for the periodic steady state.

    Harmonics beyond ``k_max`` are set to zero.  Two-photon resonance
    (``delta == 0``) is handled by the static solvers instead.
    """
    if delta == 0:
        raise ValueError("harmonic balance needs delta != 0; use the static solver at two-photon resonance")
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    omega_p = complex(omega_p)
    a, b = _block_system(parts, delta, omega_p, k_max)
    x = solve_linear(a, b, block=f"harmonic system (k_max={k_max})")
    blocks = x.reshape(2 * k_max + 1, 8)
    coeffs = {k: blocks[k + k_max].copy() for k in range(-k_max, k_max + 1)}
    resid = (a @ x - b).reshape(2 * k_max + 1, 8)
    sol = HarmonicSolution(k_max, coeffs, float(np.max(np.abs(resid))), delta)
    if sol.residual_norm > RESIDUAL_TOL:
        logger.warning("harmonic balance residual %.3e exceeds %.1e", sol.residual_norm, RESIDUAL_TOL)
    return sol


def truncation_change(parts: LiouvillianParts, delta: float, omega_p: complex, k_max: int) -> float:
    """Relative change of the k = 1 probe coherence when k_max is doubled."""
    coarse = harmonic_balance(parts, delta, omega_p, k_max).rho31(1)
    fine = harmonic_balance(parts, delta, omega_p, 2 * k_max).rho31(1)
    scale = max(abs(fine), np.finfo(float).tiny)
    return abs(fine - coarse) / scale


def check_truncation(parts, delta, omega_p, k_max, rtol: float = TRUNCATION_RTOL) -> float:
    change = truncation_change(parts, delta, omega_p, k_max)
    if change > rtol:
        raise TruncationNotConverged(
            f"doubling k_max={k_max} changed the k=1 rho31 coefficient by {change:.3e} (relative)",
            change,
        )
    return change
