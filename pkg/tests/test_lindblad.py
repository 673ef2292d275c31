import math

import numpy as np
import pytest

from dqdengine import numkernel as nk
from dqdengine import lindblad as lb
from dqdengine.model import EngineParams, canonical_engine_params, dag, jw_ops, num

# stationary current at the benchmark point, Gamma = 0, from the closed-form
# solution of the stationary moment equations:
#   J = 4 t^2 df gH gC u / (gH gC (4 deps^2 + u^2) + 4 t^2 (gH+gC) u), u = gH+gC
J_BENCH = 1.7841049937625112e-04


def equilibrium_params():
    # f_H(eps1) = f_C(eps2): both reduced energies (eps-mu)/T equal 0.5
    return EngineParams(eps1=2.0, eps2=1.5, t_hop=0.2, gamma_H=0.3,
                        gamma_C=0.7, T_H=2.0, T_C=1.0, mu_H=1.0, mu_C=1.0)


def test_dissipator_of_identity_vanishes():
    assert np.allclose(lb.dissipator_superop(np.eye(3)), np.zeros((9, 9)),
                       atol=1e-15)


def test_dissipator_qubit_decay():
    # D[c] on a qubit, occupied-first: |1><1| decays, coherences halve
    c = np.array([[0, 0], [1, 0]], dtype=complex)
    d = lb.dissipator_superop(c)
    rho = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    out = nk.devectorize(d @ nk.vectorize(rho))
    expected = np.array([[-0.7, -0.5 * (0.2 - 0.1j)],
                         [-0.5 * (0.2 + 0.1j), 0.7]])
    assert np.allclose(out, expected, atol=1e-14)


def test_pure_dephasing_kills_only_coherence():
    n = np.diag([1.0, 0.0]).astype(complex)
    d = lb.dissipator_superop(n)
    diag = np.diag([0.4, 0.6]).astype(complex)
    assert np.allclose(nk.devectorize(d @ nk.vectorize(diag)),
                       np.zeros((2, 2)), atol=1e-15)
    coh = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    out = nk.devectorize(d @ nk.vectorize(coh))
    assert np.allclose(out, -0.5 * coh, atol=1e-15)


def test_hamiltonian_superop_commutator():
    rng = np.random.default_rng(21)
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = h + dag(h)
    rho = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    out = nk.devectorize(lb.hamiltonian_superop(h) @ nk.vectorize(rho))
    assert np.allclose(out, -1j * (h @ rho - rho @ h), atol=1e-13)


def test_liouvillian_preserves_trace_and_hermiticity():
    p = canonical_engine_params(Gamma=0.7)
    bundle = lb.build_liouvillian(p)
    one = nk.vectorize(np.eye(4))
    assert np.linalg.norm(one.conj() @ bundle.matrix) < 1e-13
    rng = np.random.default_rng(22)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a + dag(a)
    out = nk.devectorize(bundle.matrix @ nk.vectorize(rho))
    assert np.allclose(out, dag(out), atol=1e-13)


def test_liouvillian_jump_list_rebuilds_dissipative_part():
    p = canonical_engine_params(Gamma=1.3)
    bundle = lb.build_liouvillian(p)
    rebuilt = lb.hamiltonian_superop(bundle.h)
    for _, op, rate in bundle.jumps:
        rebuilt = rebuilt + rate * lb.dissipator_superop(op)
    assert np.array_equal(rebuilt, bundle.matrix)
    labels = [j[0] for j in bundle.jumps]
    assert labels == ["hot_in", "hot_out", "cold_in", "cold_out", "dephasing"]


def test_liouvillian_rates_follow_occupations():
    p = canonical_engine_params()
    rates = {label: rate for label, _, rate in lb.build_liouvillian(p).jumps}
    assert math.isclose(rates["hot_in"], p.gamma_H * p.f_H, rel_tol=1e-15)
    assert math.isclose(rates["hot_out"], p.gamma_H * (1 - p.f_H), rel_tol=1e-15)
    assert math.isclose(rates["cold_in"], p.gamma_C * p.f_C, rel_tol=1e-15)
    assert rates["dephasing"] == 0.0


def test_unique_zero_eigenvalue_across_dephasing():
    for g in (0.0, 0.3, 1.5, 10.0):
        m = lb.build_liouvillian(canonical_engine_params(Gamma=g)).matrix
        w = np.linalg.eigvals(m)
        assert int((np.abs(w) < 1e-10).sum()) == 1
        assert w.real.max() < 1e-10  # nothing grows


def test_ness_contract():
    p = canonical_engine_params(Gamma=0.4)
    bundle = lb.build_liouvillian(p)
    rho = lb.ness(bundle)
    assert np.allclose(rho, dag(rho), atol=1e-14)
    assert abs(np.trace(rho).real - 1.0) < 1e-13
    resid = np.linalg.norm(bundle.matrix @ nk.vectorize(rho))
    assert resid <= 1e-11 * np.linalg.norm(bundle.matrix, 2)
    assert np.linalg.eigvalsh(rho).min() > -1e-10


def test_ness_current_matches_frozen_closed_form():
    p = canonical_engine_params(Gamma=0.0)
    rho = lb.ness(lb.build_liouvillian(p))
    n1 = lb.expectation(num(jw_ops(2)[0]), rho)
    j = p.gamma_H * (p.f_H - n1)
    assert math.isclose(j, J_BENCH, rel_tol=1e-9)


def test_ness_decoupled_dots_thermalize_separately():
    p = EngineParams(eps1=1.0, eps2=2.0, t_hop=0.0, gamma_H=0.4, gamma_C=0.9,
                     T_H=3.0, T_C=1.0, mu_H=0.5, mu_C=0.2)
    rho = lb.ness(lb.build_liouvillian(p))
    n1, n2, s = lb.dot_moments(rho)
    assert abs(n1 - p.f_H) < 1e-12
    assert abs(n2 - p.f_C) < 1e-12
    assert abs(s) < 1e-12


def test_ness_equilibrium_carries_no_current():
    p = equilibrium_params()
    rho = lb.ness(lb.build_liouvillian(p))
    n1, _, s = lb.dot_moments(rho)
    assert abs(p.gamma_H * (p.f_H - n1)) < 1e-13
    assert abs(s.imag) < 1e-13


def test_ness_rejects_degenerate_kernel():
    with pytest.raises(nk.DegenerateSteadyStateError):
        lb.ness(np.diag([0.0, 0.0, -1.0, -1.0]))


def test_evolve_identity_at_zero_time():
    p = canonical_engine_params()
    bundle = lb.build_liouvillian(p)
    rho0 = np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex)
    assert np.allclose(lb.evolve(bundle, rho0, 0.0), rho0, atol=1e-14)
    with pytest.raises(ValueError):
        lb.evolve(bundle, rho0, -1.0)


def test_evolve_preserves_trace_and_positivity():
    p = canonical_engine_params(Gamma=0.9)
    bundle = lb.build_liouvillian(p)
    rng = np.random.default_rng(23)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho0 = a @ dag(a)
    rho0 /= np.trace(rho0).real
    for t in (0.3, 4.0, 60.0):
        rho = lb.evolve(bundle, rho0, t)
        assert abs(np.trace(rho).real - 1.0) < 1e-12
        assert np.linalg.eigvalsh(0.5 * (rho + dag(rho))).min() > -1e-11


def test_evolve_semigroup_property():
    p = canonical_engine_params(Gamma=0.2)
    bundle = lb.build_liouvillian(p)
    rho0 = np.eye(4, dtype=complex) / 4.0
    a = lb.evolve(bundle, rho0, 7.0)
    b = lb.evolve(bundle, lb.evolve(bundle, rho0, 3.0), 4.0)
    assert np.allclose(a, b, atol=1e-12)


def test_evolve_relaxes_to_stationary_state():
    p = canonical_engine_params(Gamma=0.5)
    bundle = lb.build_liouvillian(p)
    rho_inf = lb.ness(bundle)
    rho0 = np.diag([1.0, 0.0, 0.0, 0.0]).astype(complex)
    rho = lb.evolve(bundle, rho0, 2000.0)
    assert np.abs(rho - rho_inf).max() < 1e-12


def test_expectation_types():
    rho = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
    c1, c2 = jw_ops(2)
    assert isinstance(lb.expectation(num(c1), rho), float)
    assert isinstance(lb.expectation(dag(c1) @ c2, rho), complex)
    assert lb.expectation(np.eye(4), rho) == pytest.approx(1.0, abs=1e-14)


def test_moment_eom_vanishes_at_stationarity():
    for g in (0.0, 0.8):
        p = canonical_engine_params(Gamma=g)
        rho = lb.ness(lb.build_liouvillian(p))
        n1, n2, s = lb.dot_moments(rho)
        dn1, dn2, ds = lb.moment_eom_rhs(p, n1, n2, s)
        assert abs(dn1) < 1e-13
        assert abs(dn2) < 1e-13
        assert abs(ds) < 1e-13


def test_moment_eom_matches_generator_off_stationarity():
    # finite-difference the moments along the actual evolution
    p = canonical_engine_params(Gamma=0.35)
    bundle = lb.build_liouvillian(p)
    rho = lb.ness(lb.build_liouvillian(equilibrium_params()))  # generic state
    h = 1e-4
    plus = lb.dot_moments(lb.evolve(bundle, rho, h))
    minus = lb.dot_moments(lb.evolve(bundle, rho, 0.0))
    fd = [(a - b) / h for a, b in zip(plus, minus)]
    rhs = lb.moment_eom_rhs(p, *lb.dot_moments(rho))
    for f, r in zip(fd, rhs):
        assert abs(f - r) < 1e-4 * max(1.0, abs(r))
