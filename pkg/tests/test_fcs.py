import math
from dataclasses import replace

import numpy as np
import pytest

from dqdengine import fcs
from dqdengine.lindblad import build_liouvillian, ness
from dqdengine.model import EngineParams, canonical_engine_params, fermi
from dqdengine.thermo import particle_current_closed_form, steady_report

TURR_GAMMA0 = 2.0058126526454116  # both cumulant routes, benchmark, Gamma = 0


def random_params(rng):
    t_c = rng.uniform(0.5, 2.0)
    return EngineParams(
        eps1=rng.uniform(-2.0, 4.0), eps2=rng.uniform(-2.0, 4.0),
        t_hop=rng.uniform(0.1, 1.0),
        gamma_H=rng.uniform(0.2, 2.0), gamma_C=rng.uniform(0.2, 2.0),
        T_H=t_c * rng.uniform(1.5, 4.0), T_C=t_c,
        mu_H=rng.uniform(-2.0, 2.0), mu_C=rng.uniform(-2.0, 2.0),
        Gamma=float(rng.uniform(0.0, 3.0)),
    )


def test_counting_weights_validated():
    with pytest.raises(ValueError):
        fcs.CountingSpec(ops=((np.eye(4), 2),))


def test_spec_carries_generator_rates():
    p = canonical_engine_params(Gamma=0.4)
    spec = fcs.hot_counting_spec(p)
    assert [w for _, w in spec.ops] == [+1, -1]
    # squared norms carry the rates gamma_H f_H and gamma_H (1 - f_H)
    (op_in, _), (op_out, _) = spec.ops
    assert math.isclose(np.linalg.norm(op_in) ** 2, 2.0 * p.gamma_H * p.f_H,
                        rel_tol=1e-12)
    assert math.isclose(np.linalg.norm(op_out) ** 2,
                        2.0 * p.gamma_H * (1.0 - p.f_H), rel_tol=1e-12)


def test_mean_counted_current_is_particle_current():
    for g in (0.0, 0.3, 2.0):
        p = canonical_engine_params(Gamma=g)
        bundle = build_liouvillian(p)
        rho = ness(bundle)
        j = fcs.mean_current(fcs.hot_counting_spec(p), rho)
        assert math.isclose(j, particle_current_closed_form(p), rel_tol=1e-10)


def test_activity_at_equilibrium_is_detailed_balance_rate():
    # equal bias on both leads: no net current, activity 2 gamma f (1 - f)
    p = EngineParams(eps1=2.0, eps2=1.5, t_hop=0.2, gamma_H=0.3, gamma_C=0.7,
                     T_H=2.0, T_C=1.0, mu_H=1.0, mu_C=1.0)
    bundle = build_liouvillian(p)
    rho = ness(bundle)
    spec = fcs.hot_counting_spec(p)
    f = fermi(2.0, 1.0, 2.0)
    assert math.isclose(fcs.dynamical_activity(spec, rho),
                        2.0 * p.gamma_H * f * (1.0 - f), rel_tol=1e-10)
    assert abs(fcs.mean_current(spec, rho)) < 1e-14


def test_decoupled_dot_counts_nothing_in_the_long_run():
    # t_hop = 0 bounds the net count by one particle: J = 0 and D = 0
    p = EngineParams(eps1=4.0, eps2=4.2, t_hop=0.0, gamma_H=0.05,
                     gamma_C=0.05, T_H=3.0, T_C=1.0, mu_H=1.0, mu_C=3.0,
                     Gamma=0.2)
    bundle = build_liouvillian(p)
    rho = ness(bundle)
    spec = fcs.hot_counting_spec(p)
    j, d = fcs.diffusion_drazin(spec, bundle, rho)
    assert abs(j) < 1e-14
    assert abs(d) < 1e-10
    # the scaled-cumulant generating function vanishes identically
    for chi in (0.3, -0.7, 1.1):
        lam = fcs._dominant_eig(fcs.tilted_generator(spec, bundle, chi))
        assert abs(lam) < 1e-12


def test_tilted_first_derivative_matches_stationary_current():
    p = canonical_engine_params(Gamma=0.3)
    bundle = build_liouvillian(p)
    spec = fcs.hot_counting_spec(p)
    j_tilt, _ = fcs.diffusion_tilted(spec, bundle)
    j_stat = fcs.mean_current(spec, ness(bundle))
    assert math.isclose(j_tilt, j_stat, rel_tol=1e-8)


def test_cumulant_routes_agree_on_random_configs():
    rng = np.random.default_rng(83)
    for _ in range(10):
        p = random_params(rng)
        bundle = build_liouvillian(p)
        rho = ness(bundle)
        spec = fcs.hot_counting_spec(p)
        j_d, d_d = fcs.diffusion_drazin(spec, bundle, rho)
        j_t, d_t = fcs.diffusion_tilted(spec, bundle)
        assert math.isclose(j_d, j_t, rel_tol=1e-8, abs_tol=1e-12)
        assert math.isclose(d_d, d_t, rel_tol=1e-6, abs_tol=1e-12)
        assert d_d > 0


def test_cumulants_are_extensive_in_the_rates():
    # scaling every energy, rate and temperature by s scales J, M, D by s
    # and leaves the uncertainty ratio alone
    p = canonical_engine_params(Gamma=0.3)
    s = 2.7
    ps = EngineParams(eps1=s * p.eps1, eps2=s * p.eps2, t_hop=s * p.t_hop,
                      gamma_H=s * p.gamma_H, gamma_C=s * p.gamma_C,
                      T_H=s * p.T_H, T_C=s * p.T_C,
                      mu_H=s * p.mu_H, mu_C=s * p.mu_C, Gamma=s * p.Gamma)
    a = fcs.fcs_report(p)
    b = fcs.fcs_report(ps)
    assert math.isclose(b.J, s * a.J, rel_tol=1e-10)
    assert math.isclose(b.M, s * a.M, rel_tol=1e-10)
    assert math.isclose(b.D, s * a.D, rel_tol=1e-8)
    assert math.isclose(b.turr, a.turr, rel_tol=1e-8)


def test_turr_guard_at_zero_current():
    assert math.isnan(fcs.turr(1.0, 1.0, 0.0))
    assert fcs.turr(3.0, 2.0, 4.0) == pytest.approx(6.0 / 16.0)


def test_uncertainty_ratio_benchmark_and_dip():
    r0 = fcs.fcs_report(canonical_engine_params())
    assert math.isclose(r0.turr, TURR_GAMMA0, rel_tol=1e-6)
    r_dip = fcs.fcs_report(canonical_engine_params(Gamma=0.3838))
    r_far = fcs.fcs_report(canonical_engine_params(Gamma=1.5))
    for r in (r0, r_dip, r_far):
        assert r.turr >= 2.0 - 1e-9
    # monitoring at the right strength tightens the trade-off below the
    # unmonitored value
    assert r_dip.turr < r0.turr


def test_report_is_consistent_with_thermo():
    p = canonical_engine_params(Gamma=0.6)
    rep = fcs.fcs_report(p)
    thermo_rep = steady_report(p)
    assert math.isclose(rep.J, thermo_rep.J_N, rel_tol=1e-10)
    assert math.isclose(rep.turr,
                        rep.D * thermo_rep.sigma_DQD / rep.J ** 2,
                        rel_tol=1e-12)
    assert rep.M > abs(rep.J)
