"""Steady-state energy bookkeeping: heat and work rates per reservoir,
efficiency, and entropy production.

All rates are evaluated with the repeated-interaction functional

    D_alpha(A) = Tr[(v A v - 1/2 {v^2, A}) (rho (x) omega_alpha)],

the tau -> 0 limit of one collision with the unit of reservoir alpha.
Heat is the energy leaving the fresh unit, Q_alpha = -D_alpha(H_alpha);
work is the switching cost, W_alpha = D_alpha(H_sys + H_alpha).  Closed
forms (tight-coupling current, efficiency) are cross-checks, never the
source of the reported numbers.

Sign conventions: positive heat flows from reservoir to system, positive
work is done on the system, so engine operation has Wdot_tot < 0 and the
first law reads sum_alpha (Wdot_alpha + Qdot_alpha) = 0.
"""

from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .lindblad import build_liouvillian, dissipator_superop, dot_moments, ness
from .model import (QPCParams, build_h_dqd, build_interactions,
                    build_unit_states, chain_ops, dag, jw_ops, num,
                    unit_hamiltonian_c, unit_hamiltonian_h,
                    unit_hamiltonian_qpc)

# detector record with zero bias and no internal dynamics; used when no
# QPCParams are supplied so the detector terms reduce to pure dephasing
NEUTRAL_QPC = QPCParams(chi00=0.0, T00=0.0, Omega=0.0, mu_R=0.0, mu_L=0.0)


@dataclass(frozen=True)
class ThermoReport:
    """Every steady-state rate the engine exposes, one operating point."""
    n1: float
    n2: float
    coh_re: float
    coh_im: float
    J_N: float
    Qdot_H: float
    Qdot_C: float
    Qdot_QPC: float
    Wdot_H: float
    Wdot_C: float
    Wdot_QPC: float
    Wdot_QPC_dqd_part: float
    Wdot_QPC_watt_part: float
    Wdot_tot: float
    eta: float
    eta_carnot: float
    engine_regime: bool
    sigma_DQD: float
    sigma_QPC: float
    sigma_tot: float
    first_law_residual: float


def d_alpha(a, v, omega, rho, unit_first=False):
    """Repeated-interaction rate functional for one reservoir.

    Parameters
    ----------
    a : observable on the joint system-unit space
    v : coupling operator on the same joint space
    omega : fresh unit state
    rho : system state
    unit_first : bool
        Side of the tensor product the unit sits on.  True for the hot
        unit (it precedes the dots in the mode order), False otherwise.

    Returns the real rate; the imaginary part is a rounding check and must
    be negligible for Hermitian a.
    """
    a = np.asarray(a, dtype=complex)
    v = np.asarray(v, dtype=complex)
    joint = np.kron(omega, rho) if unit_first else np.kron(rho, omega)
    if a.shape != joint.shape or v.shape != joint.shape:
        raise ValueError(
            f"operator shapes {a.shape}, {v.shape} do not match joint space {joint.shape}"
        )
    v2 = v @ v
    x = v @ a @ v - 0.5 * (v2 @ a + a @ v2)
    val = complex(np.trace(x @ joint))
    scale = max(1.0, abs(val))
    if abs(val.imag) > 1e-9 * scale:
        raise ValueError(f"rate functional came out complex ({val.imag:.3e}); non-Hermitian input?")
    return val.real


def particle_current(p, rho):
    """Hot-lead particle current gamma_H (f_H - <n1>); positive into dot 1."""
    c1 = jw_ops(2)[0]
    n1 = np.trace(num(c1) @ rho).real
    return p.gamma_H * (p.f_H - n1)


def particle_current_closed_form(p):
    """Tight-coupling stationary current through the dots.

    Algebraic solution of the two-point moment equations; used as a
    cross-check oracle against the nullspace route.  Monotone decreasing
    in Gamma beyond its maximum at Gamma = 2|eps2 - eps1| - gamma_H - gamma_C.
    """
    gt = p.gamma_H + p.gamma_C
    deps = p.eps2 - p.eps1
    u = p.Gamma + gt
    df = p.f_H - p.f_C
    t2 = p.t_hop ** 2
    return (4.0 * t2 * df * p.gamma_H * p.gamma_C * u
            / (p.gamma_H * p.gamma_C * (4.0 * deps ** 2 + u ** 2) + 4.0 * t2 * gt * u))


def gamma_ext(p):
    """Dephasing rate extremizing the current: 2|eps2 - eps1| - gamma_H - gamma_C.

    Independent of t_hop.  A maximum only when positive; negative means the
    current is monotone in Gamma from zero.
    """
    return 2.0 * abs(p.eps2 - p.eps1) - (p.gamma_H + p.gamma_C)


def gamma_zero(p):
    """Dephasing rate where the current returns to its Gamma = 0 value:
    4 (eps2 - eps1)^2 / (gamma_H + gamma_C) - (gamma_H + gamma_C)."""
    gt = p.gamma_H + p.gamma_C
    return 4.0 * (p.eps2 - p.eps1) ** 2 / gt - gt


def efficiency(p):
    """Tight-coupling engine efficiency 1 - (eps2 - mu_C)/(eps1 - mu_H).

    Independent of Gamma: dephasing costs no work at the dots.  Returns nan
    when eps1 = mu_H (no heat absorbed per transferred particle).
    """
    if p.eps1 == p.mu_H:
        return float("nan")
    return 1.0 - (p.eps2 - p.mu_C) / (p.eps1 - p.mu_H)


def carnot(p):
    return 1.0 - p.T_C / p.T_H


def entropy_rates(p, qdot_h, qdot_c, qdot_qpc=0.0, T_QPC=1.0):
    """Clausius entropy production split into engine and detector parts.

    sigma_DQD = -Qdot_H/T_H - Qdot_C/T_C          (always >= 0)
    sigma_QPC = -Qdot_QPC/T_QPC                    (>= 0 for eV >= 0)
    """
    sigma_dqd = -qdot_h / p.T_H - qdot_c / p.T_C
    sigma_qpc = -qdot_qpc / T_QPC
    return sigma_dqd, sigma_qpc, sigma_dqd + sigma_qpc


def currents(p, rho, q=None):
    """Full steady-state rate report at state rho.

    Every heat and work rate comes from the D_alpha functional on the
    matching system-unit pair space; the detector work is additionally
    split into the dot-conditioned part and the Joule part eV Gamma <n1>
    that flows even for a frozen dot.
    """
    if q is None:
        q = NEUTRAL_QPC
    omegas = build_unit_states(p, q)
    n1, n2, s = dot_moments(rho)

    # hot pair: unit precedes the dots
    ops = chain_ops(("H", "d1", "d2"))
    v_h = build_interactions(p, ops)["H"]
    h_sys = build_h_dqd(p, ops["d1"], ops["d2"])
    h_unit = unit_hamiltonian_h(p, ops["H"])
    qdot_h = -d_alpha(h_unit, v_h, omegas["H"], rho, unit_first=True)
    wdot_h = d_alpha(h_sys + h_unit, v_h, omegas["H"], rho, unit_first=True)

    # cold pair: unit follows the dots
    ops = chain_ops(("d1", "d2", "C"))
    v_c = build_interactions(p, ops)["C"]
    h_sys = build_h_dqd(p, ops["d1"], ops["d2"])
    h_unit = unit_hamiltonian_c(p, ops["C"])
    qdot_c = -d_alpha(h_unit, v_c, omegas["C"], rho, unit_first=False)
    wdot_c = d_alpha(h_sys + h_unit, v_c, omegas["C"], rho, unit_first=False)

    # detector pair of leads, after the dots
    ops = chain_ops(("d1", "d2", "R", "L"))
    v_q = build_interactions(p, ops)["QPC"]
    h_sys = build_h_dqd(p, ops["d1"], ops["d2"])
    h_unit = unit_hamiltonian_qpc(q, ops["R"], ops["L"])
    omega_rl = np.kron(omegas["R"], omegas["L"])
    qdot_qpc = -d_alpha(h_unit, v_q, omega_rl, rho, unit_first=False)
    wdot_qpc = d_alpha(h_sys + h_unit, v_q, omega_rl, rho, unit_first=False)

    watt = q.eV * p.Gamma * n1
    wdot_qpc_dqd = wdot_qpc - watt
    wdot_tot = wdot_h + wdot_c + wdot_qpc_dqd

    first_law = (wdot_h + qdot_h) + (wdot_c + qdot_c) + (wdot_qpc + qdot_qpc)
    sigma_dqd, sigma_qpc, sigma_tot = entropy_rates(
        p, qdot_h, qdot_c, qdot_qpc, q.T_QPC)

    j_n = p.gamma_H * (p.f_H - n1)
    eta = efficiency(p)
    eta_c = carnot(p)
    regime = bool(j_n > 0 and (p.eps1 - p.mu_H) > 0 and wdot_tot < 0)

    return ThermoReport(
        n1=n1, n2=n2, coh_re=s.real, coh_im=s.imag, J_N=j_n,
        Qdot_H=qdot_h, Qdot_C=qdot_c, Qdot_QPC=qdot_qpc,
        Wdot_H=wdot_h, Wdot_C=wdot_c, Wdot_QPC=wdot_qpc,
        Wdot_QPC_dqd_part=wdot_qpc_dqd, Wdot_QPC_watt_part=watt,
        Wdot_tot=wdot_tot, eta=eta, eta_carnot=eta_c, engine_regime=regime,
        sigma_DQD=sigma_dqd, sigma_QPC=sigma_qpc, sigma_tot=sigma_tot,
        first_law_residual=first_law,
    )


def steady_report(p, q=None):
    """Solve for the stationary state and report all rates."""
    rho = ness(build_liouvillian(p))
    return currents(p, rho, q)


def naive_heat_current(p):
    """Heat current and entropy production under the bookkeeping that
    assigns Tr[H_sys L_H(rho)] as the hot heat flow.

    Only meaningful without chemical work, so mu_H = mu_C = 0 is required.
    Returns (qdot_naive, sigma_naive); sigma_naive goes negative in part
    of the parameter space, which is the point of computing it.
    """
    if p.mu_H != 0.0 or p.mu_C != 0.0:
        raise ValueError("naive bookkeeping needs mu_H = mu_C = 0")
    bundle = build_liouvillian(p)
    rho = ness(bundle)
    c1 = jw_ops(2)[0]
    l_hot = (p.gamma_H * p.f_H * dissipator_superop(dag(c1))
             + p.gamma_H * (1.0 - p.f_H) * dissipator_superop(c1))
    drho = nk.devectorize(l_hot @ nk.vectorize(rho))
    qdot = float(np.trace(bundle.h @ drho).real)
    sigma = (1.0 / p.T_C - 1.0 / p.T_H) * qdot
    return qdot, sigma
