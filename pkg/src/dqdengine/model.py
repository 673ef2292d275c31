"""Physical model: parameter records, Fermi functions, Jordan-Wigner mode
operators, the two-dot Hamiltonian, reservoir-unit states and Hamiltonians,
system-unit couplings, and the charge-detector dephasing rate.

Conventions
-----------
Single-mode basis is occupied-first, (|1>, |0>), so the annihilation
operator is [[0, 0], [1, 0]] and the number operator diag(1, 0).  Thermal
unit states are then literally diag(f, 1 - f).

Modes are ordered hot unit, dot 1, dot 2, cold unit, detector-R, detector-L
(MODE_ORDER).  Every coupling in the model ties adjacent modes of that
chain, so Jordan-Wigner strings cancel in all interaction terms and the
same expressions hold on any contiguous sub-chain.

k_B = hbar = e = 1 everywhere.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

MODE_ORDER = ("H", "d1", "d2", "C", "R", "L")


@dataclass(frozen=True)
class EngineParams:
    """Double-dot engine parameters, absolute units."""
    eps1: float
    eps2: float
    t_hop: float
    gamma_H: float
    gamma_C: float
    T_H: float
    T_C: float
    mu_H: float
    mu_C: float
    Gamma: float = 0.0  # dephasing rate on dot 1

    def __post_init__(self):
        if self.gamma_H <= 0 or self.gamma_C <= 0:
            raise ValueError("reservoir rates gamma_H, gamma_C must be positive")
        if self.T_H <= 0 or self.T_C <= 0:
            raise ValueError("temperatures must be positive")
        if self.Gamma < 0:
            raise ValueError("dephasing rate Gamma must be non-negative")

    @property
    def f_H(self):
        return fermi(self.eps1, self.mu_H, self.T_H)

    @property
    def f_C(self):
        return fermi(self.eps2, self.mu_C, self.T_C)


@dataclass(frozen=True)
class QPCParams:
    """Charge-detector (point-contact) parameters.

    The bias eV = mu_R - mu_L is derived, not stored.  T00 and Omega only
    enter the detector-unit Hamiltonian; the steady-state thermodynamics
    must come out independent of both.
    """
    chi00: float = 0.15
    g_L: float = 1.0
    g_R: float = 1.0
    T_QPC: float = 1.0
    T00: float = 0.5
    Omega: float = 0.0
    mu_R: float = 1.0
    mu_L: float = 0.0

    def __post_init__(self):
        if self.T_QPC <= 0:
            raise ValueError("detector temperature must be positive")
        if self.g_L <= 0 or self.g_R <= 0:
            raise ValueError("lead densities of states must be positive")
        if self.mu_R < self.mu_L:
            raise ValueError("bias convention requires mu_R >= mu_L")

    @property
    def eV(self):
        return self.mu_R - self.mu_L


def canonical_engine_params(Gamma=0.0):
    """Benchmark operating point (absolute units, T_H = 3, T_C = 1)."""
    return EngineParams(eps1=4.0, eps2=4.2, t_hop=0.05, gamma_H=0.05,
                        gamma_C=0.05, T_H=3.0, T_C=1.0, mu_H=1.0, mu_C=3.0,
                        Gamma=Gamma)


def canonical_qpc_params():
    """Detector operating point used alongside canonical_engine_params."""
    return QPCParams()


def fermi(eps, mu, T):
    """Fermi-Dirac occupation 1 / (1 + exp((eps - mu)/T)).

    Saturates cleanly to 0 or 1 for large arguments.  T must be positive.
    """
    if T <= 0:
        raise ValueError("temperature must be positive")
    return float(expit(-(eps - mu) / T))


def dag(a):
    return np.asarray(a).conj().T


def num(c):
    """Number operator c'c for an annihilation operator c."""
    return dag(c) @ c


def jw_ops(n_modes):
    """Jordan-Wigner annihilation operators for a chain of n_modes fermions.

    Mode 0 is the most significant Kronecker factor.  Local basis is
    occupied-first, so c = [[0, 0], [1, 0]] and the parity string is
    diag(-1, 1).  Entries are exact (0 or +-1); anticommutation relations
    {c_i, c_j'} = delta_ij, {c_i, c_j} = 0 hold to machine precision.
    """
    if n_modes < 1:
        raise ValueError("need at least one mode")
    c = np.array([[0, 0], [1, 0]], dtype=complex)
    ident = np.eye(2, dtype=complex)
    string = np.diag([-1.0, 1.0]).astype(complex)
    ops = []
    for j in range(n_modes):
        factors = [string] * j + [c] + [ident] * (n_modes - j - 1)
        m = factors[0]
        for f in factors[1:]:
            m = np.kron(m, f)
        ops.append(m)
    return ops


def chain_ops(modes):
    """Annihilation operators for the labeled contiguous sub-chain of
    MODE_ORDER, as a dict label -> operator on the joint space.

    Valid because all model couplings are adjacent in MODE_ORDER: the
    Jordan-Wigner strings of skipped outer modes never appear.
    """
    modes = tuple(modes)
    order = [m for m in MODE_ORDER if m in modes]
    if set(order) != set(modes):
        unknown = set(modes) - set(MODE_ORDER)
        raise ValueError(f"unknown mode labels {sorted(unknown)}")
    return dict(zip(order, jw_ops(len(order))))


def build_h_dqd(p, c1=None, c2=None):
    """Two-dot Hamiltonian eps1 n1 + eps2 n2 + t (c1'c2 + c2'c1).

    With no operators supplied, builds on the bare two-dot space (4x4).
    Pass embedded c1, c2 to build the same Hamiltonian on a joint space.
    """
    if c1 is None or c2 is None:
        c1, c2 = jw_ops(2)
    h = p.eps1 * num(c1) + p.eps2 * num(c2)
    h += p.t_hop * (dag(c1) @ c2 + dag(c2) @ c1)
    return h


def build_unit_states(p, q=None):
    """Fresh ancilla states, one per reservoir unit.

    Hot and cold units are thermal at their own (eps, mu, T):
    diag(f, 1 - f) in the occupied-first basis.  The detector lead pair is
    the pure state occupied-R, empty-L: omega_R = diag(1, 0),
    omega_L = diag(0, 1).
    """
    states = {
        "H": np.diag([p.f_H, 1.0 - p.f_H]).astype(complex),
        "C": np.diag([p.f_C, 1.0 - p.f_C]).astype(complex),
        "R": np.diag([1.0, 0.0]).astype(complex),
        "L": np.diag([0.0, 1.0]).astype(complex),
    }
    return states


def unit_hamiltonian_h(p, c=None):
    """Hot-unit Hamiltonian (eps1 - mu_H) n, in the hot reservoir's rotating
    frame where its chemical potential is absorbed."""
    if c is None:
        c = jw_ops(1)[0]
    return (p.eps1 - p.mu_H) * num(c)


def unit_hamiltonian_c(p, c=None):
    if c is None:
        c = jw_ops(1)[0]
    return (p.eps2 - p.mu_C) * num(c)


def unit_hamiltonian_qpc(q, cr=None, cl=None):
    """Detector-unit Hamiltonian on the R (x) L pair:
    (Omega - mu_R) n_R + (Omega - mu_L) n_L + T00 (r'l + l'r)."""
    if cr is None or cl is None:
        cr, cl = jw_ops(2)
    h = (q.Omega - q.mu_R) * num(cr) + (q.Omega - q.mu_L) * num(cl)
    h += q.T00 * (dag(cr) @ cl + dag(cl) @ cr)
    return h


def build_interactions(p, ops):
    """System-unit couplings on a joint space.

    Parameters
    ----------
    p : EngineParams
    ops : dict from chain_ops; must contain 'd1' and 'd2', plus any of
        'H', 'C', ('R' and 'L') for the couplings wanted.

    Returns a dict with keys among 'H', 'C', 'QPC':
        v_H   = sqrt(gamma_H) (cH' c1 + c1' cH)
        v_C   = sqrt(gamma_C) (cC' c2 + c2' cC)
        v_QPC = sqrt(Gamma) n1 (r'l + l'r)
    All are Hermitian and conserve total particle number; v_QPC commutes
    with n1, so the detector only reads the dot-1 charge.
    """
    c1 = ops["d1"]
    c2 = ops["d2"]
    out = {}
    if "H" in ops:
        ch = ops["H"]
        out["H"] = math.sqrt(p.gamma_H) * (dag(ch) @ c1 + dag(c1) @ ch)
    if "C" in ops:
        cc = ops["C"]
        out["C"] = math.sqrt(p.gamma_C) * (dag(cc) @ c2 + dag(c2) @ cc)
    if "R" in ops and "L" in ops:
        cr, cl = ops["R"], ops["L"]
        hop = dag(cr) @ cl + dag(cl) @ cr
        out["QPC"] = math.sqrt(p.Gamma) * (num(c1) @ hop)
    return out


def _xcothx(x):
    # x coth x, stable through x = 0
    if abs(x) < 1e-4:
        x2 = x * x
        return 1.0 + x2 / 3.0 - x2 * x2 / 45.0
    return x / math.tanh(x)


def dephasing_rate_from_qpc(q):
    """Dot-1 dephasing rate produced by a weakly transmitting biased
    point contact: 2 pi g_L g_R chi00^2 eV coth(eV / 2 T_QPC).

    Finite at zero bias, where it tends to 4 pi g_L g_R chi00^2 T_QPC.
    """
    x = q.eV / (2.0 * q.T_QPC)
    return 4.0 * math.pi * q.g_L * q.g_R * q.chi00 ** 2 * q.T_QPC * _xcothx(x)
