"""Dense linear-algebra kernel: Kronecker products, matrix exponentials,
spectral decompositions, the Drazin pseudoinverse, and the column-stacking
vectorization used to turn maps on operators into plain matrices.

All operators are plain complex ndarrays.  Vectorization is column-stacking
throughout: vec(A) = A.flatten(order='F'), so A rho B maps to
kron(B.T, A) @ vec(rho).  Every module downstream relies on this convention.
"""

import numpy as np
import scipy.linalg

EIG_RESIDUAL_TOL = 1e-10
DRAZIN_ZERO_TOL = 1e-9      # relative to the spectral radius
DRAZIN_IDENTITY_TOL = 1e-9  # relative to ||L||


class DefectiveMatrixError(Exception):
    """Eigendecomposition failed to produce a usable similarity transform."""


class DegenerateSteadyStateError(Exception):
    """More than one eigenvalue sits inside the zero tolerance band."""


def kron(*ops):
    """Kronecker product of one or more operators, folded left to right.

    The leftmost factor is the most significant one: basis states of the
    product are ordered with the first factor's index varying slowest.
    """
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def matexp(a):
    """Matrix exponential exp(a) via scaling-and-squaring.

    Raises ValueError if the result is not finite (overflow in the input).
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matexp needs a square matrix, got shape {a.shape}")
    out = scipy.linalg.expm(a)
    if not np.all(np.isfinite(out)):
        raise ValueError(
            "matexp produced non-finite entries; input norm %.3e" % np.linalg.norm(a)
        )
    return out


def eig(a):
    """Eigendecomposition with biorthonormal left and right eigenvectors.

    Returns
    -------
    w : (n,) complex eigenvalues
    vr : (n, n) right eigenvectors as columns, a @ vr[:, j] = w[j] * vr[:, j]
    vl : (n, n) left eigenvectors as rows, vl @ vr = identity

    The left eigenvectors are the rows of inv(vr), so biorthonormality is
    exact by construction.  Raises DefectiveMatrixError when the right
    eigenvector matrix is numerically singular or the residual
    max_j ||a v_j - w_j v_j|| exceeds EIG_RESIDUAL_TOL * ||a||.
    """
    a = np.asarray(a, dtype=complex)
    w, vr = np.linalg.eig(a)
    # residual check: a defective matrix can still return vectors, but they
    # stop resolving the action of the matrix
    scale = np.linalg.norm(a, 2)
    resid = np.linalg.norm(a @ vr - vr * w, axis=0).max()
    if scale > 0 and resid > EIG_RESIDUAL_TOL * scale:
        raise DefectiveMatrixError(
            f"eigenvector residual {resid:.3e} exceeds {EIG_RESIDUAL_TOL:.0e} * ||a||"
        )
    try:
        vl = np.linalg.inv(vr)
    except np.linalg.LinAlgError as exc:
        raise DefectiveMatrixError("right eigenvector matrix is singular") from exc
    if not np.all(np.isfinite(vl)):
        raise DefectiveMatrixError("left eigenvectors overflowed (near-defective input)")
    # a near-defective matrix passes the residual test with near-parallel
    # eigenvectors; demanding that the similarity transform reconstructs
    # the matrix rules that out
    recon = (vr * w) @ vl
    if scale > 0 and np.linalg.norm(recon - a, 2) > EIG_RESIDUAL_TOL * scale * 10:
        raise DefectiveMatrixError("eigenbasis does not reconstruct the matrix")
    return w, vr, vl


def drazin(l, zero_tol=DRAZIN_ZERO_TOL):
    """Drazin (group) inverse of a generator with a single zero mode.

    Inverts the generator on the complement of its kernel and annihilates
    the kernel itself: L+ = vr diag(1/w_j, 0 on the zero mode) vl.

    Parameters
    ----------
    l : (n, n) generator matrix
    zero_tol : float
        Eigenvalues with |w| < zero_tol * spectral_radius count as zero.
        Exactly one must qualify, otherwise DegenerateSteadyStateError.

    The defining identities L L+ L = L, L+ L L+ = L+, [L, L+] = 0 are
    verified to DRAZIN_IDENTITY_TOL * ||L|| before returning.
    """
    l = np.asarray(l, dtype=complex)
    w, vr, vl = eig(l)
    radius = np.abs(w).max()
    if radius == 0:
        raise DegenerateSteadyStateError("zero generator has no unique kernel")
    small = np.abs(w) < zero_tol * radius
    nzero = int(small.sum())
    if nzero != 1:
        raise DegenerateSteadyStateError(
            f"expected exactly one eigenvalue within {zero_tol:.0e} of zero, found {nzero}"
        )
    winv = np.where(small, 0.0, 1.0 / np.where(small, 1.0, w))
    lplus = (vr * winv) @ vl
    # cheap defensive check of the defining identities
    scale = np.linalg.norm(l, 2)
    tol = DRAZIN_IDENTITY_TOL * scale
    lp_l = lplus @ l
    l_lp = l @ lplus
    if (np.linalg.norm(l @ lp_l - l, 2) > tol
            or np.linalg.norm(lplus @ l_lp - lplus, 2) > tol * max(1.0, np.linalg.norm(lplus, 2) / scale)
            or np.linalg.norm(l_lp - lp_l, 2) > tol):
        raise DefectiveMatrixError("Drazin identities violated beyond tolerance")
    return lplus


def vectorize(a):
    """Column-stack an operator: vec(A)[i + n*j] = A[i, j]."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"vectorize needs a square matrix, got shape {a.shape}")
    return a.flatten(order="F")


def devectorize(v):
    """Inverse of vectorize.  Length must be a perfect square."""
    v = np.asarray(v, dtype=complex).ravel()
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ValueError(f"vector of length {v.size} is not a stacked square matrix")
    return v.reshape(d, d, order="F")


def partial_trace(a, dims, keep):
    """Trace out all tensor factors except those listed in `keep`.

    Parameters
    ----------
    a : (N, N) operator on a tensor-product space, N = prod(dims)
    dims : sequence of factor dimensions, most significant first
    keep : sequence of factor indices to retain, in ascending order

    Returns the reduced operator on the kept factors, ordered as in `dims`.
    """
    a = np.asarray(a, dtype=complex)
    dims = list(dims)
    n = int(np.prod(dims))
    if a.shape != (n, n):
        raise ValueError(f"operator shape {a.shape} does not match dims {dims}")
    keep = sorted(keep)
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} factors")
    t = a.reshape(dims + dims)
    # contract dropped factors pairwise; delete from the right so earlier
    # axis numbers stay valid
    for k in sorted(set(range(len(dims))) - set(keep), reverse=True):
        t = np.trace(t, axis1=k, axis2=k + t.ndim // 2)
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d, d)
