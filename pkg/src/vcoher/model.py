"""Parameter space and generator assembly for the driven V-type atom.

Levels are indexed 0, 1, 2 for |1> (ground), |2> and |3> (excited).  The
coupling field drives 1-2, the probe drives 1-3, and the two excited levels
share a vacuum mode so that their decay channels interfere with strength
``eta``.  All rates are in units of a reference decay rate.

Two generators are provided:

* the single rotating frame at the coupling frequency, in which the probe
  carries an explicit ``exp(-i*delta*t)`` and the generator splits into three
  harmonic parts (``build_liouvillian_parts``);
* the conventional bichromatic frame in which both fields are static and the
  oscillation of the interference cross terms is dropped
  (``build_conventional``).

Both are assembled from one term table (``generator_terms``); the reduced
8-component form eliminates rho33 by trace closure.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

ORDER = ("rho11", "rho22", "rho12", "rho21", "rho31", "rho13", "rho23", "rho32")
REDUCED_INDEX = ((0, 0), (1, 1), (0, 1), (1, 0), (2, 0), (0, 2), (1, 2), (2, 1))
RHO31 = 4
RHO13 = 5

ETA_WARN = 0.999

Frame = Literal["single", "bichromatic"]


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters, all rates in units of the reference rate.

    ``delta`` is the pump-probe (two-photon) detuning; the probe detuning is
    derived as ``delta + delta_c`` and never stored.
    """

    gamma2: float = 1.0
    gamma3: float = 1.0
    eta: float = 0.0
    omega_c_mag: float = 2.0
    phi_c: float = 0.0
    omega_p_mag: float = 0.01
    phi_p: float = 0.0
    delta_c: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if not (self.gamma2 > 0 and self.gamma3 > 0):
            raise ValueError(f"decay rates must be positive, got gamma2={self.gamma2}, gamma3={self.gamma3}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if self.omega_c_mag < 0 or self.omega_p_mag < 0:
            raise ValueError("Rabi-frequency magnitudes must be non-negative")
        if self.eta >= ETA_WARN:
            warnings.warn(
                f"eta={self.eta} is close to 1; the steady state is nearly degenerate",
                RuntimeWarning,
                stacklevel=3,
            )

    @property
    def delta_p(self) -> float:
        return self.delta + self.delta_c

    @property
    def omega_c(self) -> complex:
        return self.omega_c_mag * np.exp(1j * self.phi_c)

    @property
    def omega_p(self) -> complex:
        return self.omega_p_mag * np.exp(1j * self.phi_p)

    @property
    def delta_phi(self) -> float:
        return self.phi_c - self.phi_p

    @property
    def interference(self) -> float:
        """Cross-decay rate eta*sqrt(gamma2*gamma3)."""
        return self.eta * np.sqrt(self.gamma2 * self.gamma3)

    def replace(self, **changes) -> "SystemParams":
        if "delta_p" in changes:
            raise TypeError("delta_p is derived (delta + delta_c); set delta or delta_c instead")
        return dataclasses.replace(self, **changes)

    def with_omega_p(self, omega_p: complex) -> "SystemParams":
        """Return a copy whose probe Rabi frequency equals ``omega_p``.

        A zero probe keeps the current phase.
        """
        omega_p = complex(omega_p)
        phase = float(np.angle(omega_p)) if omega_p != 0 else self.phi_p
        return self.replace(omega_p_mag=abs(omega_p), phi_p=phase)


@dataclass(frozen=True)
class Term:
    """One linear contribution ``coeff * rho[source]`` to ``d rho[target]/dt``.

    ``harmonic`` is 0 for static terms, +1 for terms multiplied by
    ``omega_p * exp(-i delta t)`` and -1 for ``conj(omega_p) * exp(+i delta t)``.
    """

    target: tuple[int, int]
    source: tuple[int, int]
    coeff: complex
    harmonic: int = 0


def _hamiltonian_entries(params: SystemParams, frame: Frame):
    # (row, col, value, harmonic) of H/hbar; probe entries exclude the omega_p factor
    oc = params.omega_c
    h33 = -params.delta_c if frame == "single" else -params.delta_p
    return [
        (1, 1, -params.delta_c, 0),
        (2, 2, h33, 0),
        (1, 0, -oc, 0),
        (0, 1, -np.conj(oc), 0),
        (2, 0, -1.0, 1),
        (0, 2, -1.0, -1),
    ]


def _dissipator_terms(params: SystemParams) -> list[Term]:
    g2, g3, s = params.gamma2, params.gamma3, params.interference
    t = []
    # populations
    t += [Term((0, 0), (1, 1), 2 * g2), Term((0, 0), (2, 2), 2 * g3)]
    t += [Term((0, 0), (1, 2), 2 * s), Term((0, 0), (2, 1), 2 * s)]
    t += [Term((1, 1), (1, 1), -2 * g2), Term((1, 1), (1, 2), -s), Term((1, 1), (2, 1), -s)]
    t += [Term((2, 2), (2, 2), -2 * g3), Term((2, 2), (1, 2), -s), Term((2, 2), (2, 1), -s)]
    # ground-excited coherences
    t += [Term((0, 1), (0, 1), -g2), Term((0, 1), (0, 2), -s)]
    t += [Term((1, 0), (1, 0), -g2), Term((1, 0), (2, 0), -s)]
    t += [Term((0, 2), (0, 2), -g3), Term((0, 2), (0, 1), -s)]
    t += [Term((2, 0), (2, 0), -g3), Term((2, 0), (1, 0), -s)]
    # excited-excited coherences
    for tgt in ((1, 2), (2, 1)):
        t += [Term(tgt, tgt, -(g2 + g3)), Term(tgt, (1, 1), -s), Term(tgt, (2, 2), -s)]
    return t


def generator_terms(params: SystemParams, frame: Frame = "single") -> list[Term]:
    """Term table of the full 3x3 equations of motion.

    The coherent part expands ``-i[H, rho]`` entry by entry; the dissipative
    part lists the radiative decays and the interference cross terms.
    """
    terms: list[Term] = []
    entries = _hamiltonian_entries(params, frame)
    for i in range(3):
        for j in range(3):
            for a, b, value, harm in entries:
                if a == i:  # (H rho)_ij picks H_ib rho_bj
                    terms.append(Term((i, j), (b, j), -1j * value, harm))
                if b == j:  # (rho H)_ij picks rho_ia H_aj
                    terms.append(Term((i, j), (i, a), 1j * value, harm))
    terms.extend(_dissipator_terms(params))
    return terms


def _flat(i: int, j: int) -> int:
    return 3 * i + j


def full_generators(params: SystemParams, frame: Frame = "single") -> dict[int, np.ndarray]:
    """9x9 generators ``{0: G0, 1: G+, -1: G-}`` acting on row-major vec(rho)."""
    gens = {h: np.zeros((9, 9), dtype=complex) for h in (0, 1, -1)}
    for term in generator_terms(params, frame):
        gens[term.harmonic][_flat(*term.target), _flat(*term.source)] += term.coeff
    return gens


def _closure_maps():
    select = np.zeros((8, 9))
    embed = np.zeros((9, 8))
    for n, (i, j) in enumerate(REDUCED_INDEX):
        select[n, _flat(i, j)] = 1.0
        embed[_flat(i, j), n] = 1.0
    embed[_flat(2, 2), 0] = -1.0
    embed[_flat(2, 2), 1] = -1.0
    offset = np.zeros(9)
    offset[_flat(2, 2)] = 1.0
    return select, embed, offset


_SELECT, _EMBED, _OFFSET = _closure_maps()


def reduce_generator(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eliminate rho33 = 1 - rho11 - rho22 from a 9x9 generator.

    Returns ``(M, Lambda)`` such that ``dR/dt = M R - Lambda``.
    """
    return _SELECT @ g @ _EMBED, -(_SELECT @ g @ _OFFSET)


@dataclass(frozen=True)
class LiouvillianParts:
    """Harmonic decomposition of the reduced generator.

    ``M(t) = m0 + omega_p m1 exp(-i delta t) + conj(omega_p) mm1 exp(i delta t)``
    and likewise for the inhomogeneous vector built from ``l0, l1, lm1``.
    """

    m0: np.ndarray
    m1: np.ndarray
    mm1: np.ndarray
    l0: np.ndarray
    l1: np.ndarray
    lm1: np.ndarray

    def at(self, t: float, omega_p: complex, delta: float) -> tuple[np.ndarray, np.ndarray]:
        up = omega_p * np.exp(-1j * delta * t)
        down = np.conj(omega_p) * np.exp(1j * delta * t)
        return (self.m0 + up * self.m1 + down * self.mm1,
                self.l0 + up * self.l1 + down * self.lm1)

    def derivative(self, r: np.ndarray, t: float, omega_p: complex, delta: float) -> np.ndarray:
        m, lam = self.at(t, omega_p, delta)
        return m @ r - lam


def build_liouvillian_parts(params: SystemParams) -> LiouvillianParts:
    gens = full_generators(params, "single")
    m0, l0 = reduce_generator(gens[0])
    m1, l1 = reduce_generator(gens[1])
    mm1, lm1 = reduce_generator(gens[-1])
    return LiouvillianParts(m0, m1, mm1, l0, l1, lm1)


def assemble_static(parts: LiouvillianParts, omega_p: complex) -> tuple[np.ndarray, np.ndarray]:
    """Time-independent generator at two-photon resonance."""
    return parts.at(0.0, omega_p, 0.0)


def build_conventional(params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """Static generator in the bichromatic frame with cross-term oscillations dropped."""
    gens = full_generators(params, "bichromatic")
    op = params.omega_p
    g = gens[0] + op * gens[1] + np.conj(op) * gens[-1]
    return reduce_generator(g)


@dataclass
class DensityVector:
    """Reduced state in ``ORDER``; rho33 follows from trace closure."""

    r: np.ndarray

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=complex)
        if self.r.shape != (8,):
            raise ValueError(f"expected 8 components, got shape {self.r.shape}")

    @property
    def rho31(self) -> complex:
        return complex(self.r[RHO31])

    @property
    def rho33(self) -> complex:
        return 1.0 - self.r[0] - self.r[1]

    def matrix(self) -> np.ndarray:
        return density_vector_to_matrix(self.r)[0]

    def hermiticity_defect(self) -> float:
        return density_vector_to_matrix(self.r)[1]

    def violations(self, herm_tol: float = 1e-10, pop_tol: float = 1e-8) -> list[str]:
        """Names of physical-state invariants this vector breaks."""
        rho = self.matrix()
        bad = []
        pops = np.diag(rho)
        if np.max(np.abs(pops.imag)) > herm_tol:
            bad.append("populations not real")
        if np.any(pops.real < -pop_tol) or np.any(pops.real > 1 + pop_tol):
            bad.append("population outside [0, 1]")
        if self.hermiticity_defect() > herm_tol:
            bad.append("coherences not Hermitian-paired")
        return bad


def density_vector_to_matrix(r) -> tuple[np.ndarray, float]:
    """Expand a reduced vector to the 3x3 matrix; also return the Hermiticity defect."""
    r = np.asarray(r, dtype=complex)
    rho = np.zeros((3, 3), dtype=complex)
    for value, (i, j) in zip(r, REDUCED_INDEX):
        rho[i, j] = value
    rho[2, 2] = 1.0 - r[0] - r[1]
    return rho, float(np.max(np.abs(rho - rho.conj().T)))


def matrix_to_density_vector(rho: np.ndarray) -> np.ndarray:
    return np.array([rho[i, j] for i, j in REDUCED_INDEX], dtype=complex)


def bloch_rhs(params: SystemParams, rho: np.ndarray, t: float) -> np.ndarray:
    """Right-hand side of the density-matrix equations written out longhand.

    Kept independent of the term table so the two can certify each other.
    The ground-state equation follows from trace conservation.
    """
    g2, g3, s = params.gamma2, params.gamma3, params.interference
    dc, d, dp = params.delta_c, params.delta, params.delta_p
    oc, op = params.omega_c, params.omega_p
    ocs = np.conj(oc)
    pu = op * np.exp(-1j * d * t)             # probe, absorption phase
    pd = np.conj(op) * np.exp(1j * d * t)     # probe, emission phase
    r = rho
    d22 = -2 * g2 * r[1, 1] + 1j * oc * r[0, 1] - 1j * ocs * r[1, 0] - s * (r[1, 2] + r[2, 1])
    d33 = -2 * g3 * r[2, 2] + 1j * pu * r[0, 2] - 1j * pd * r[2, 0] - s * (r[1, 2] + r[2, 1])
    d12 = -(g2 + 1j * dc) * r[0, 1] + 1j * ocs * (r[1, 1] - r[0, 0]) + 1j * pd * r[2, 1] - s * r[0, 2]
    d21 = -(g2 - 1j * dc) * r[1, 0] - 1j * oc * (r[1, 1] - r[0, 0]) - 1j * pu * r[1, 2] - s * r[2, 0]
    d13 = -(g3 - 1j * (d - dp)) * r[0, 2] + 1j * pd * (r[2, 2] - r[0, 0]) + 1j * ocs * r[1, 2] - s * r[0, 1]
    d31 = -(g3 + 1j * (d - dp)) * r[2, 0] - 1j * pu * (r[2, 2] - r[0, 0]) - 1j * oc * r[2, 1] - s * r[1, 0]
    d23 = (-((g3 + g2) - 1j * (dc - dp + d)) * r[1, 2] + 1j * oc * r[0, 2] - 1j * pd * r[1, 0]
           - s * (r[1, 1] + r[2, 2]))
    d32 = (-((g3 + g2) + 1j * (dc - dp + d)) * r[2, 1] - 1j * ocs * r[2, 0] + 1j * pu * r[0, 1]
           - s * (r[1, 1] + r[2, 2]))
    return np.array([
        [-(d22 + d33), d12, d13],
        [d21, d22, d23],
        [d31, d32, d33],
    ], dtype=complex)
