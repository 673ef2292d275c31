"""Full counting statistics of the particle exchange with the hot lead.

Counts +1 when a particle enters dot 1 from the hot reservoir and -1 when
one returns.  Long-time cumulants of the net count come from two
independent routes that must agree: the Drazin-inverse formula and
numerical differentiation of the tilted generator's dominant eigenvalue.
The ratio turr = D sigma / J^2 is bounded below by 2 for Markovian
dynamics; where it sinks with dephasing is one of the engine's more
counterintuitive outputs.
"""

from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .lindblad import build_liouvillian, ness
from .thermo import currents

TILT_STEP = 1e-2       # counting-field step for finite differences
TILT_CONSISTENCY = 0.05  # max relative drift between step sizes


class TiltConvergenceError(Exception):
    """Finite-difference cumulants failed to stabilize under step refinement."""


@dataclass(frozen=True)
class CountingSpec:
    """Monitored jump channels: tuples (jump_operator, weight).

    Jump operators carry their sqrt(rate) prefactor; weights are the
    counted charge per jump, +1 or -1.
    """
    ops: tuple

    def __post_init__(self):
        for op, w in self.ops:
            if w not in (+1, -1):
                raise ValueError(f"counting weight must be +1 or -1, got {w}")


@dataclass(frozen=True)
class FcsReport:
    J: float      # mean counted current
    M: float      # dynamical activity of the counted channels
    D: float      # long-time diffusion coefficient
    turr: float   # D sigma_DQD / J^2


def hot_counting_spec(p):
    """Counting channels for the hot lead, built from the generator's own
    jump list so rates cannot drift out of sync: +1 on hot injection, -1
    on hot extraction."""
    bundle = build_liouvillian(p)
    jumps = {label: (op, rate) for label, op, rate in bundle.jumps}
    op_in, r_in = jumps["hot_in"]
    op_out, r_out = jumps["hot_out"]
    return CountingSpec(ops=(
        (np.sqrt(r_in) * op_in, +1),
        (np.sqrt(r_out) * op_out, -1),
    ))


def jump_superop(spec):
    """Weighted jump superoperator sum_k w_k L_k . L_k' as a matrix."""
    total = 0.0
    for op, w in spec.ops:
        op = np.asarray(op, dtype=complex)
        total = total + w * np.kron(op.conj(), op)
    return total


def mean_current(spec, rho):
    """First moment <1| J1 |rho>: the mean counted current."""
    one = nk.vectorize(np.eye(rho.shape[0], dtype=complex))
    return float(np.real(one.conj() @ (jump_superop(spec) @ nk.vectorize(rho))))


def dynamical_activity(spec, rho):
    """Total rate of counted jumps regardless of sign,
    sum_k w_k^2 Tr[L_k rho L_k']."""
    m = 0.0
    for op, w in spec.ops:
        op = np.asarray(op, dtype=complex)
        m += (w * w) * np.trace(op @ rho @ op.conj().T).real
    return float(m)


def diffusion_drazin(spec, l, rho):
    """Long-time current cumulants via the Drazin inverse.

    D = M - 2 Re <1| J1 L+ J1 |rho>, with J1 the weighted jump
    superoperator and L+ the Drazin inverse of the generator.

    Returns (J, D).
    """
    m = l.matrix if hasattr(l, "matrix") else np.asarray(l, dtype=complex)
    j1 = jump_superop(spec)
    one = nk.vectorize(np.eye(rho.shape[0], dtype=complex))
    rv = nk.vectorize(rho)
    lplus = nk.drazin(m)
    j = float(np.real(one.conj() @ (j1 @ rv)))
    act = dynamical_activity(spec, rho)
    d = act - 2.0 * float(np.real(one.conj() @ (j1 @ (lplus @ (j1 @ rv)))))
    return j, d


def tilted_generator(spec, l, chi):
    """Generator with counting field chi on the monitored jumps:
    each counted channel L_k . L_k' picks up a factor exp(w_k chi)."""
    m = l.matrix if hasattr(l, "matrix") else np.asarray(l, dtype=complex)
    out = m.astype(complex).copy()
    for op, w in spec.ops:
        op = np.asarray(op, dtype=complex)
        out += (np.exp(w * chi) - 1.0) * np.kron(op.conj(), op)
    return out


def _dominant_eig(m):
    w = np.linalg.eigvals(m)
    return w[np.argmax(w.real)]


def diffusion_tilted(spec, l, chi_step=TILT_STEP):
    """Mean and diffusion from the dominant tilted eigenvalue.

    Central differences at chi_step and chi_step/2, Richardson combined.
    If the two step sizes disagree by more than TILT_CONSISTENCY the step
    shrinks tenfold, at most three times, before failing.

    Returns (J, D): J must match the Drazin route's first moment and the
    stationary current; D is the independent diffusion estimate.
    """
    lam0 = _dominant_eig(tilted_generator(spec, l, 0.0))
    h = float(chi_step)
    for _ in range(4):
        ests = []
        for step in (h, h / 2.0):
            lp = _dominant_eig(tilted_generator(spec, l, +step))
            lm = _dominant_eig(tilted_generator(spec, l, -step))
            j = (lp - lm).real / (2.0 * step)
            d = (lp - 2.0 * lam0 + lm).real / step ** 2
            ests.append((j, d))
        (j1, d1), (j2, d2) = ests
        scale = max(abs(d1), abs(d2), 1e-300)
        if abs(d1 - d2) <= TILT_CONSISTENCY * scale:
            # Richardson: cancel the h^2 truncation term
            return float((4.0 * j2 - j1) / 3.0), float((4.0 * d2 - d1) / 3.0)
        h /= 10.0
    raise TiltConvergenceError(
        f"tilted cumulants did not stabilize down to step {h:.1e}"
    )


def turr(d, sigma, j):
    """Uncertainty-ratio D sigma / J^2; nan when the current vanishes."""
    if j == 0.0:
        return float("nan")
    return d * sigma / (j * j)


def fcs_report(p, q=None):
    """Counting-statistics summary at the stationary state."""
    bundle = build_liouvillian(p)
    rho = ness(bundle)
    rep = currents(p, rho, q)
    spec = hot_counting_spec(p)
    j, d = diffusion_drazin(spec, bundle, rho)
    m = dynamical_activity(spec, rho)
    return FcsReport(J=j, M=m, D=d, turr=turr(d, rep.sigma_DQD, j))
