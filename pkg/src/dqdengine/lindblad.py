"""Local Lindblad description of the two-dot engine: superoperator
construction, stationary-state solver, and finite-time propagation.

The generator is

    L(rho) = -i[H, rho]
             + gamma_H f_H  D[c1'] + gamma_H (1 - f_H) D[c1]
             + gamma_C f_C  D[c2'] + gamma_C (1 - f_C) D[c2]
             + Gamma D[n1]

with D[A]rho = A rho A' - (1/2){A'A, rho}, on the 4-dimensional two-dot
space.  Superoperators are 16x16 matrices acting on column-stacked
operators (see numkernel).
"""

from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .model import build_h_dqd, dag, jw_ops, num

NESS_RESIDUAL_TOL = 1e-11   # relative to ||L||
NESS_POSITIVITY_TOL = -1e-10


class SolverError(Exception):
    """Stationary-state solve failed its residual or positivity contract."""


def spre(a):
    """Superoperator for left multiplication, rho -> a rho."""
    a = np.asarray(a, dtype=complex)
    return np.kron(np.eye(a.shape[0]), a)


def spost(a):
    """Superoperator for right multiplication, rho -> rho a."""
    a = np.asarray(a, dtype=complex)
    return np.kron(a.T, np.eye(a.shape[0]))


def hamiltonian_superop(h):
    """Coherent part -i[h, .] as a matrix."""
    return -1j * (spre(h) - spost(h))


def dissipator_superop(l):
    """D[l] as a matrix: l . l' - (1/2){l'l, .}."""
    l = np.asarray(l, dtype=complex)
    ll = dag(l) @ l
    return np.kron(l.conj(), l) - 0.5 * spre(ll) - 0.5 * spost(ll)


@dataclass(frozen=True)
class LiouvillianBundle:
    """Generator matrix plus the pieces it was assembled from.

    jumps holds (label, operator, rate) triples; rebuilding the dissipative
    part from them reproduces matrix minus the Hamiltonian part exactly.
    """
    h: np.ndarray
    jumps: tuple
    matrix: np.ndarray


def build_liouvillian(p):
    """Assemble the engine generator for the given parameters.

    Jump operators and rates:
        a1' at gamma_H f_H,  a1 at gamma_H (1 - f_H),
        a2' at gamma_C f_C,  a2 at gamma_C (1 - f_C),
        n1  at Gamma,
    where a1 = c (x) I and a2 = I (x) c are the string-free local lowering
    operators.  Tracing the reservoir units out of one collision produces
    exactly these jumps; the chain fermion operator for dot 2 differs by
    the dot-1 parity string, which only moves superselected single-fermion
    coherences and leaves every physical observable and the stationary
    state untouched.  Rates are evaluated from p at call time, so separate
    calls with equal parameters give identical matrices.
    """
    c = np.array([[0, 0], [1, 0]], dtype=complex)
    ident = np.eye(2, dtype=complex)
    a1 = np.kron(c, ident)
    a2 = np.kron(ident, c)
    h = build_h_dqd(p)
    jumps = (
        ("hot_in", dag(a1), p.gamma_H * p.f_H),
        ("hot_out", a1, p.gamma_H * (1.0 - p.f_H)),
        ("cold_in", dag(a2), p.gamma_C * p.f_C),
        ("cold_out", a2, p.gamma_C * (1.0 - p.f_C)),
        ("dephasing", num(a1), p.Gamma),
    )
    m = hamiltonian_superop(h)
    for _, op, rate in jumps:
        if rate != 0.0:
            m = m + rate * dissipator_superop(op)
    return LiouvillianBundle(h=h, jumps=jumps, matrix=m)


def _as_matrix(l):
    return l.matrix if isinstance(l, LiouvillianBundle) else np.asarray(l, dtype=complex)


def ness(l, zero_tol=nk.DRAZIN_ZERO_TOL):
    """Stationary state of a generator with a unique zero mode.

    Takes the eigenvector of the near-zero eigenvalue, Hermitizes it,
    normalizes the trace, then polishes with the spectral projector onto
    the kernel (one Drazin step, reusing the same eigendecomposition).

    Raises DegenerateSteadyStateError if the zero eigenvalue is not
    unique, SolverError if the residual ||L(rho)|| exceeds
    NESS_RESIDUAL_TOL * ||L|| or an eigenvalue of rho falls below
    NESS_POSITIVITY_TOL.
    """
    m = _as_matrix(l)
    w, vr, vl = nk.eig(m)
    radius = np.abs(w).max()
    small = np.abs(w) < zero_tol * radius
    nzero = int(small.sum())
    if nzero != 1:
        raise nk.DegenerateSteadyStateError(
            f"steady space dimension {nzero}, expected 1"
        )
    idx = int(np.argmax(small))
    rho = nk.devectorize(vr[:, idx])
    rho = 0.5 * (rho + dag(rho))
    tr = np.trace(rho).real
    if abs(tr) < 1e-12:
        raise SolverError("stationary eigenvector is traceless")
    rho = rho / tr

    # polish: rho <- rho - L+ L rho projects exactly onto the kernel in
    # exact arithmetic, and in floating point knocks the residual down to
    # the eigensolver's noise floor
    winv = np.where(small, 0.0, 1.0 / np.where(small, 1.0, w))
    lplus = (vr * winv) @ vl
    scale = np.linalg.norm(m, 2)
    for _ in range(2):
        resid_vec = m @ nk.vectorize(rho)
        if np.linalg.norm(resid_vec) <= NESS_RESIDUAL_TOL * scale:
            break
        rho = rho - nk.devectorize(lplus @ resid_vec)
        rho = 0.5 * (rho + dag(rho))
        rho = rho / np.trace(rho).real

    resid = np.linalg.norm(m @ nk.vectorize(rho))
    if resid > NESS_RESIDUAL_TOL * scale:
        raise SolverError(
            f"stationary residual {resid:.3e} exceeds {NESS_RESIDUAL_TOL:.0e} * ||L||"
        )
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < NESS_POSITIVITY_TOL:
        raise SolverError(f"stationary state not positive, min eigenvalue {evals.min():.3e}")
    return rho


def evolve(l, rho0, t):
    """Propagate rho0 for time t >= 0 under the generator."""
    if t < 0:
        raise ValueError("propagation time must be non-negative")
    m = _as_matrix(l)
    rho0 = np.asarray(rho0, dtype=complex)
    v = nk.matexp(t * m) @ nk.vectorize(rho0)
    return nk.devectorize(v)


def expectation(a, rho):
    """Tr[a rho]; returns a float when a is Hermitian, complex otherwise."""
    a = np.asarray(a, dtype=complex)
    val = complex(np.trace(a @ rho))
    if np.allclose(a, dag(a), atol=1e-13):
        return val.real
    return val


def dot_moments(rho):
    """Two-point moments (n1, n2, s) with s = <c1' c2>."""
    c1, c2 = jw_ops(2)
    n1 = expectation(num(c1), rho)
    n2 = expectation(num(c2), rho)
    s = expectation(dag(c1) @ c2, rho)
    return n1, n2, s


def moment_eom_rhs(p, n1, n2, s):
    """Adjoint-generator time derivatives of (n1, n2, s); all three vanish
    at the stationary state.

        dn1/dt = gamma_H (f_H - n1) + 2 t Im s
        dn2/dt = gamma_C (f_C - n2) - 2 t Im s
        ds/dt  = (-i (eps2 - eps1) - (gamma_H + gamma_C + Gamma)/2) s
                 - i t (n1 - n2)
    """
    deps = p.eps2 - p.eps1
    utot = p.gamma_H + p.gamma_C + p.Gamma
    dn1 = p.gamma_H * (p.f_H - n1) + 2.0 * p.t_hop * np.imag(s)
    dn2 = p.gamma_C * (p.f_C - n2) - 2.0 * p.t_hop * np.imag(s)
    ds = (-1j * deps - 0.5 * utot) * s - 1j * p.t_hop * (n1 - n2)
    return dn1, dn2, ds
