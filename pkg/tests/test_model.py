import warnings

import numpy as np
import pytest
from conftest import density_matrices, system_params
from hypothesis import given
from hypothesis import strategies as st

from vcoher.model import (
    ORDER,
    RHO31,
    DensityVector,
    SystemParams,
    assemble_static,
    bloch_rhs,
    build_conventional,
    build_liouvillian_parts,
    density_vector_to_matrix,
    full_generators,
    matrix_to_density_vector,
)
from vcoher.solver import solve_linear, weak_probe_first_order

I = {name: n for n, name in enumerate(ORDER)}


def static_state(p):
    m, lam = assemble_static(build_liouvillian_parts(p), p.omega_p)
    return density_vector_to_matrix(solve_linear(m, lam))[0]


# --- parameters -----------------------------------------------------------

def test_probe_detuning_is_derived():
    p = SystemParams(delta=1.25, delta_c=-4.0)
    assert p.delta_p == 1.25 + -4.0
    with pytest.raises(TypeError, match="derived"):
        p.replace(delta_p=0.0)
    with pytest.raises(TypeError):
        SystemParams(delta_p=1.0)


@pytest.mark.parametrize("bad", [dict(gamma2=0.0), dict(gamma3=-1.0), dict(eta=1.2), dict(eta=-0.1),
                                 dict(omega_c_mag=-1.0), dict(omega_p_mag=-0.1)])
def test_invalid_parameters_rejected(bad):
    with pytest.raises(ValueError):
        SystemParams(**bad)


def test_near_unit_interference_warns():
    with pytest.warns(RuntimeWarning, match="close to 1"):
        SystemParams(eta=0.9995)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        SystemParams(eta=0.99)


def test_complex_rabi_frequencies_and_phase_difference():
    p = SystemParams(omega_c_mag=2.0, phi_c=0.3, omega_p_mag=0.5, phi_p=1.0)
    assert p.omega_c == pytest.approx(2.0 * np.exp(0.3j))
    assert p.omega_p == pytest.approx(0.5 * np.exp(1.0j))
    assert p.delta_phi == pytest.approx(0.3 - 1.0)


# --- generator entries ----------------------------------------------------

def test_cross_decay_feeds_excited_population():
    m0 = build_liouvillian_parts(SystemParams(eta=0.5)).m0
    assert m0[I["rho22"], I["rho23"]] == pytest.approx(-0.5, abs=1e-15)
    assert m0[I["rho22"], I["rho32"]] == pytest.approx(-0.5, abs=1e-15)


def test_coupling_coherence_decay_and_detuning():
    m0 = build_liouvillian_parts(SystemParams(gamma2=1.0, delta_c=2.0)).m0
    assert m0[I["rho12"], I["rho12"]] == pytest.approx(-(1 + 2j), abs=1e-15)


def test_closure_constant_in_ground_row():
    parts = build_liouvillian_parts(SystemParams(gamma3=1.0))
    assert parts.l0[I["rho11"]] == pytest.approx(-2.0, abs=1e-15)
    parts = build_liouvillian_parts(SystemParams(gamma3=1.7))
    assert parts.l0[I["rho11"]] == pytest.approx(-3.4, abs=1e-15)


def test_undriven_without_interference_has_no_couplings():
    p = SystemParams(eta=0.0, omega_c_mag=0.0, omega_p_mag=0.0)
    parts = build_liouvillian_parts(p)
    m, lam = parts.at(0.7, p.omega_p, p.delta)
    # probe harmonics carry no contribution at zero probe
    np.testing.assert_array_equal(m, parts.m0)
    np.testing.assert_array_equal(lam, parts.l0)
    # populations never couple to coherences
    pops, cohs = [0, 1], list(range(2, 8))
    assert np.all(parts.m0[np.ix_(pops, cohs)] == 0)
    assert np.all(parts.m0[np.ix_(cohs, pops)] == 0)
    # coherences only decay and precess
    off = parts.m0[np.ix_(cohs, cohs)] - np.diag(np.diag(parts.m0[np.ix_(cohs, cohs)]))
    assert np.all(off == 0)


def test_probe_parts_are_free_of_probe_amplitude():
    a = build_liouvillian_parts(SystemParams(omega_p_mag=0.01, phi_p=0.4))
    b = build_liouvillian_parts(SystemParams(omega_p_mag=3.0, phi_p=2.0))
    for name in ("m1", "mm1", "l1", "lm1"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))
    assert np.any(a.m1 != 0) and np.any(a.mm1 != 0)


# --- static assembly ------------------------------------------------------

def test_assemble_static_zero_probe():
    parts = build_liouvillian_parts(SystemParams(eta=0.3))
    m, lam = assemble_static(parts, 0)
    np.testing.assert_array_equal(m, parts.m0)
    np.testing.assert_array_equal(lam, parts.l0)


def test_assemble_static_unit_probe_matches_direct_construction():
    p = SystemParams(eta=0.4, omega_c_mag=1.5, delta_c=0.7, delta=0.0, omega_p_mag=1.0)
    parts = build_liouvillian_parts(p)
    m, lam = assemble_static(parts, 1.0 + 0j)
    np.testing.assert_allclose(m, parts.m0 + parts.m1 + parts.mm1, atol=0)
    # direct route: reduced derivative of the longhand equations, probed on basis states
    rng = np.random.default_rng(3)
    for _ in range(5):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        want = matrix_to_density_vector(bloch_rhs(p, rho, 0.0))
        got = m @ matrix_to_density_vector(rho) - lam
        np.testing.assert_allclose(got, want, atol=1e-14)


def test_assemble_static_imaginary_probe():
    parts = build_liouvillian_parts(SystemParams(eta=0.2))
    m, _ = assemble_static(parts, 0.3j)
    np.testing.assert_allclose(m, parts.m0 + 0.3j * parts.m1 - 0.3j * parts.mm1, atol=1e-16)


# --- conventional frame ---------------------------------------------------

@given(system_params(delta=0.0))
def test_conventional_equals_static_at_resonance(p):
    m1, l1 = assemble_static(build_liouvillian_parts(p), p.omega_p)
    m2, l2 = build_conventional(p)
    assert np.max(np.abs(m1 - m2)) <= 1e-14
    assert np.max(np.abs(l1 - l2)) <= 1e-14


@pytest.mark.parametrize("delta", [-3.0, -0.7, 0.4, 2.5])
@pytest.mark.parametrize("delta_c", [0.0, 1.3])
def test_conventional_matches_floquet_without_interference(delta, delta_c):
    p = SystemParams(eta=0.0, omega_c_mag=2.0, delta_c=delta_c, delta=delta, omega_p_mag=1e-6)
    m, lam = build_conventional(p)
    s_conv = solve_linear(m, lam)[RHO31] / p.omega_p
    r1 = weak_probe_first_order(build_liouvillian_parts(p), delta)[1][RHO31]
    assert abs(s_conv - r1) <= 1e-8 * abs(r1)


def test_conventional_probe_detuning_slot():
    m, _ = build_conventional(SystemParams(gamma3=1.0, delta_c=1.0, delta=2.0))
    assert abs(m[I["rho13"], I["rho13"]].imag) == pytest.approx(3.0)
    assert abs(m[I["rho31"], I["rho31"]].imag) == pytest.approx(3.0)


# --- density vectors ------------------------------------------------------

def test_ground_state_vector_to_matrix():
    rho, defect = density_vector_to_matrix([1, 0, 0, 0, 0, 0, 0, 0])
    np.testing.assert_array_equal(rho, np.diag([1, 0, 0]))
    assert defect == 0


def test_hermiticity_defect_reported():
    r = np.zeros(8, dtype=complex)
    r[0] = 1
    r[I["rho12"]], r[I["rho21"]] = 0.1j, -0.1j
    assert density_vector_to_matrix(r)[1] == 0
    r[I["rho21"]] = 0.1j
    assert density_vector_to_matrix(r)[1] == pytest.approx(0.2)


def test_density_vector_flags_unphysical_state():
    assert DensityVector(np.array([1, 0, 0, 0, 0, 0, 0, 0])).violations() == []
    bad = DensityVector(np.array([1.5, 0, 0.1j, 0.1j, 0, 0, 0, 0]))
    v = bad.violations()
    assert "population outside [0, 1]" in v and "coherences not Hermitian-paired" in v
    with pytest.raises(ValueError):
        DensityVector(np.zeros(7))


# --- properties -----------------------------------------------------------

@given(system_params(), density_matrices(), st.floats(0.0, 10.0))
def test_decomposition_consistency(p, rho, t):
    parts = build_liouvillian_parts(p)
    got = parts.derivative(matrix_to_density_vector(rho), t, p.omega_p, p.delta)
    want = matrix_to_density_vector(bloch_rhs(p, rho, t))
    assert np.max(np.abs(got - want)) <= 1e-12 * max(1.0, np.max(np.abs(want)))


@given(system_params(), density_matrices(), st.floats(0.0, 10.0))
def test_trace_conservation(p, rho, t):
    g = full_generators(p)
    op = p.omega_p
    total = g[0] + op * np.exp(-1j * p.delta * t) * g[1] + np.conj(op) * np.exp(1j * p.delta * t) * g[-1]
    drho = (total @ rho.reshape(9)).reshape(3, 3)
    assert abs(np.trace(drho)) <= 1e-12


@given(system_params(delta=0.0), st.floats(-np.pi, np.pi))
def test_common_phase_shift_leaves_magnitudes(p, shift):
    a = static_state(p)
    b = static_state(p.replace(phi_c=p.phi_c + shift, phi_p=p.phi_p + shift))
    assert np.max(np.abs(np.abs(a) - np.abs(b))) <= 1e-12


@given(system_params(delta=0.0, eta=0.0), st.floats(0.0, 2 * np.pi))
def test_no_phase_dependence_without_interference(p, phi):
    # populations and the probe coherence ignore the coupling phase; the
    # coupling-transition coherences merely follow it
    a = static_state(p)
    b = static_state(p.replace(phi_c=phi))
    assert np.max(np.abs(np.diag(a) - np.diag(b))) <= 1e-12
    assert abs(a[2, 0] - b[2, 0]) <= 1e-12
    assert np.max(np.abs(np.abs(a) - np.abs(b))) <= 1e-12
