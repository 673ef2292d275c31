"""Repeated-interaction (collision) dynamics for the two-dot engine.

Each collision couples the dots for a time tau to fresh thermal units, one
per reservoir, through couplings scaled as v/sqrt(tau):

    U = exp(-i tau (H_sys + sum H_unit) - i sqrt(tau) sum v_alpha)
    rho' = Tr_units[ U (omega_H (x) rho (x) omega_C [(x) omega_R (x) omega_L]) U' ]

As tau -> 0 the map generator converges to the Lindblad generator, with
each jump operator produced by exactly one unit; the detector pair of
leads yields pure dephasing of dot 1.  The finite-tau map itself is
completely positive and trace preserving at any tau.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from . import numkernel as nk
from .lindblad import build_liouvillian, dissipator_superop
from .model import (build_h_dqd, build_interactions, build_unit_states,
                    chain_ops, dag, unit_hamiltonian_c, unit_hamiltonian_h,
                    unit_hamiltonian_qpc)

FIXED_POINT_TOL = 1e-10  # trace-norm residual of one extra collision


class ConvergenceError(Exception):
    """Iterated collision map failed to reach a fixed point."""


def _default_tau(p, q, include_qpc):
    scales = [p.gamma_H + p.gamma_C, p.Gamma, abs(p.t_hop),
              abs(p.eps1), abs(p.eps2),
              abs(p.eps1 - p.mu_H), abs(p.eps2 - p.mu_C)]
    if include_qpc and q is not None:
        scales += [abs(q.T00), abs(q.Omega - q.mu_R), abs(q.Omega - q.mu_L)]
    return 1e-3 / max(max(scales), 1e-12)


@dataclass(frozen=True)
class CollisionConfig:
    """One collision-model setup: parameters, optional detector, step size.

    tau defaults to 1e-3 over the largest rate or energy scale; n_steps
    defaults to enough collisions to cover several hundred reservoir
    relaxation times.
    """
    params: object
    qpc: object = None
    include_qpc: bool = False
    tau: float = None
    n_steps: int = None

    def __post_init__(self):
        p = self.params
        if self.tau is None:
            object.__setattr__(self, "tau", _default_tau(p, self.qpc, self.include_qpc))
        if self.tau <= 0:
            raise ValueError("collision duration tau must be positive")
        if self.n_steps is None:
            t_total = 400.0 / min(p.gamma_H, p.gamma_C)
            object.__setattr__(self, "n_steps", int(math.ceil(t_total / self.tau)))
        if self.n_steps < 1:
            raise ValueError("need at least one collision")


def _collision_kit(cfg):
    """Unitary, tensor-factor dims, and fresh-unit states for one setup."""
    p = cfg.params
    labels = ("H", "d1", "d2", "C") + (("R", "L") if cfg.include_qpc else ())
    ops = chain_ops(labels)
    h = build_h_dqd(p, ops["d1"], ops["d2"])
    h = h + unit_hamiltonian_h(p, ops["H"]) + unit_hamiltonian_c(p, ops["C"])
    v = build_interactions(p, ops)
    vsum = v["H"] + v["C"]
    if cfg.include_qpc:
        if cfg.qpc is None:
            raise ValueError("include_qpc requires detector parameters")
        h = h + unit_hamiltonian_qpc(cfg.qpc, ops["R"], ops["L"])
        vsum = vsum + v["QPC"]
    u = nk.matexp(-1j * cfg.tau * h - 1j * math.sqrt(cfg.tau) * vsum)
    omegas = build_unit_states(p, cfg.qpc)
    # the two dots count as one factor of dimension 4, flanked by units
    if cfg.include_qpc:
        dims = [2, 4, 2, 2, 2]
        fresh = (omegas["H"], None, omegas["C"], omegas["R"], omegas["L"])
    else:
        dims = [2, 4, 2]
        fresh = (omegas["H"], None, omegas["C"])
    return u, dims, fresh


def _embed(rho, fresh):
    factors = [rho if w is None else w for w in fresh]
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def collision_step(rho, cfg, _kit=None):
    """One collision: couple fresh units, evolve for tau, discard units."""
    u, dims, fresh = _kit if _kit is not None else _collision_kit(cfg)
    joint = _embed(np.asarray(rho, dtype=complex), fresh)
    out = u @ joint @ dag(u)
    return nk.partial_trace(out, dims, keep=[1])


def collision_map(cfg):
    """The collision map as a 16x16 matrix on column-stacked dot states."""
    kit = _collision_kit(cfg)
    d = 4
    phi = np.empty((d * d, d * d), dtype=complex)
    for j in range(d):
        for i in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            phi[:, i + d * j] = nk.vectorize(collision_step(e, cfg, _kit=kit))
    return phi


def collision_ness(cfg, rho0=None):
    """Fixed point of the collision map, the n -> infinity collision limit.

    Iterates by repeated squaring of the map matrix, so n_steps collisions
    cost log2(n_steps) matrix products.  The result must absorb one more
    collision within FIXED_POINT_TOL in trace norm, else ConvergenceError.
    """
    phi = collision_map(cfg)
    if rho0 is None:
        rho0 = np.eye(4, dtype=complex) / 4.0
    power = phi
    for _ in range(max(1, math.ceil(math.log2(cfg.n_steps)))):
        power = power @ power
    rho = nk.devectorize(power @ nk.vectorize(np.asarray(rho0, dtype=complex)))
    rho = 0.5 * (rho + dag(rho))
    rho = rho / np.trace(rho).real
    resid = nk.devectorize(phi @ nk.vectorize(rho)) - rho
    tnorm = np.abs(np.linalg.eigvalsh(0.5 * (resid + dag(resid)))).sum()
    if tnorm > FIXED_POINT_TOL:
        raise ConvergenceError(
            f"collision fixed point residual {tnorm:.3e} in trace norm "
            f"after {cfg.n_steps} collisions"
        )
    return rho


def ri_dissipator(v, omega, unit_first=False):
    """Exact unit-averaged dissipator of one coupling, as a map matrix:

        D(rho) = Tr_unit[ v (rho (x) omega) v - 1/2 {v^2, rho (x) omega} ]

    This is the tau -> 0 collision generator of a single unit and must
    reproduce the matching Lindblad dissipator terms entrywise.
    """
    v = np.asarray(v, dtype=complex)
    omega = np.asarray(omega, dtype=complex)
    du = omega.shape[0]
    ds = v.shape[0] // du
    if ds * du != v.shape[0]:
        raise ValueError(f"coupling dim {v.shape[0]} not divisible by unit dim {du}")
    dims = [du, ds] if unit_first else [ds, du]
    keep = [1] if unit_first else [0]
    v2 = v @ v
    out = np.empty((ds * ds, ds * ds), dtype=complex)
    for j in range(ds):
        for i in range(ds):
            e = np.zeros((ds, ds), dtype=complex)
            e[i, j] = 1.0
            joint = np.kron(omega, e) if unit_first else np.kron(e, omega)
            x = v @ joint @ v - 0.5 * (v2 @ joint + joint @ v2)
            out[:, i + ds * j] = nk.vectorize(nk.partial_trace(x, dims, keep))
    return out


def emergent_generator(cfg):
    """Finite-difference generator of one collision, (Phi - id)/tau."""
    phi = collision_map(cfg)
    return (phi - np.eye(phi.shape[0])) / cfg.tau


def generator_residual(cfg, rho):
    """Frobenius distance between one collision's finite difference and the
    Lindblad generator: || (step(rho) - rho)/tau - L(rho) ||_F.

    Without the detector units the comparison target has Gamma = 0.  The
    residual vanishes linearly in tau; the slope is the leading-order
    collision correction.
    """
    p = cfg.params
    p_eff = p if cfg.include_qpc else replace(p, Gamma=0.0)
    l = build_liouvillian(p_eff)
    rho = np.asarray(rho, dtype=complex)
    fd = (collision_step(rho, cfg) - rho) / cfg.tau
    target = nk.devectorize(l.matrix @ nk.vectorize(rho))
    return float(np.linalg.norm(fd - target))


def choi_matrix(phi):
    """Choi operator sum_ij Phi(E_ij) (x) E_ij of a map matrix.

    Positive semidefinite iff the map is completely positive.
    """
    phi = np.asarray(phi, dtype=complex)
    d = int(round(math.sqrt(phi.shape[0])))
    if d * d != phi.shape[0] or phi.shape[0] != phi.shape[1]:
        raise ValueError(f"map matrix shape {phi.shape} is not a square superoperator")
    c = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d):
        for i in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            c += np.kron(nk.devectorize(phi[:, i + d * j]), e)
    return c


def is_cptp(phi, pos_tol=-1e-10, trace_tol=1e-12):
    """Check complete positivity (Choi spectrum) and trace preservation."""
    phi = np.asarray(phi, dtype=complex)
    d = int(round(math.sqrt(phi.shape[0])))
    ident = nk.vectorize(np.eye(d, dtype=complex))
    tp = np.linalg.norm(dag(phi) @ ident - ident) <= trace_tol * d
    cp = np.linalg.eigvalsh(choi_matrix(phi)).min() >= pos_tol
    return bool(cp and tp)
