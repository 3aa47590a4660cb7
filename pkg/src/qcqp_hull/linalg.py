"""Dense symmetric linear algebra used by the hull machinery.

The eigensolver is a cyclic Jacobi iteration (deterministic, accurate at
the N <= 200 scale this package targets) living in ``_kernels`` with both
numba and numpy paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .core import Qcqp, lagrangian
from .errors import ConvergenceError, NotSimultaneouslyDiagonalizable

EIG_TOL = 1e-13
MAX_SWEEPS = 100
PSD_TOL = 1e-9
KERNEL_RTOL = 1e-9
COMMUTE_TOL = 1e-8
OFFDIAG_TOL = 1e-7
KRON_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues sorted ascending; eigenvectors[:, j] pairs with eigenvalues[j]."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class Definiteness(Enum):
    POSITIVE_DEFINITE = "positive_definite"
    PSD_SINGULAR = "psd_singular"
    INDEFINITE = "indefinite"


@dataclass(frozen=True, eq=False)
class DefinitenessStatus:
    tag: Definiteness
    # Orthonormal basis of the (near-)zero eigenspace; only for PSD_SINGULAR.
    nullspace: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class KroneckerStructure:
    """A_i = I_k (x) factors[i] for every quadratic of the problem."""

    k: int
    factors: tuple


@dataclass(frozen=True, eq=False)
class SimultaneousDiagonalization:
    """Congruence basis P with P' A_i P = diag(diagonals[i]) for i = 0..m."""

    basis: np.ndarray
    basis_inv: np.ndarray
    diagonals: np.ndarray  # shape (m + 1, N), row 0 is the objective


def _check_symmetric(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return 0.5 * (M + M.T)


def sym_eig(M, tol: float = EIG_TOL, max_sweeps: int = MAX_SWEEPS) -> Spectrum:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi."""
    M = _check_symmetric(M)
    w, V, sweeps = _kernels.jacobi_eigh(M, tol, max_sweeps)
    if sweeps < 0:
        raise ConvergenceError(f"Jacobi did not converge within {max_sweeps} sweeps")
    order = np.argsort(w, kind="stable")
    w = w[order]
    V = V[:, order]
    # Deterministic sign: the largest-magnitude entry of each vector is >= 0.
    for j in range(V.shape[1]):
        i = int(np.argmax(np.abs(V[:, j])))
        if V[i, j] < 0:
            V[:, j] = -V[:, j]
    return Spectrum(eigenvalues=w, eigenvectors=V)


def psd_status(M, tol: float = PSD_TOL) -> DefinitenessStatus:
    """Classify a symmetric matrix as PD, PSD-singular (with nullspace), or indefinite."""
    M = _check_symmetric(M)
    spec = sym_eig(M)
    scale = max(1.0, float(np.max(np.abs(M))) if M.size else 0.0)
    lo = spec.eigenvalues[0]
    if lo > tol * scale:
        return DefinitenessStatus(Definiteness.POSITIVE_DEFINITE)
    if lo < -tol * scale:
        return DefinitenessStatus(Definiteness.INDEFINITE)
    null_mask = np.abs(spec.eigenvalues) <= tol * scale
    basis = spec.eigenvectors[:, null_mask]
    return DefinitenessStatus(Definiteness.PSD_SINGULAR, nullspace=basis)


def solve_homogeneous(E, rtol: float = KERNEL_RTOL) -> np.ndarray | None:
    """A unit-norm kernel vector of E, or None when only x = 0 solves Ex = 0.

    Computed from the eigendecomposition of E'E; a direction counts as
    kernel when its singular value is below rtol * sigma_max.  The zero
    matrix returns the first canonical basis vector.
    """
    E = np.atleast_2d(np.asarray(E, dtype=float))
    q = E.shape[1]
    if q == 0:
        return None
    if E.shape[0] == 0:
        return np.eye(q)[:, 0]
    G = E.T @ E
    spec = sym_eig(G)
    smax = float(np.sqrt(max(spec.eigenvalues[-1], 0.0)))
    if smax == 0.0:
        return spec.eigenvectors[:, 0]  # zero matrix; sym_eig(0) keeps e_1 first
    # The Gram eigendecomposition gives the direction; the kernel test uses
    # ||E v|| directly to dodge the squared-condition noise floor.
    v = spec.eigenvectors[:, 0]
    if float(np.linalg.norm(E @ v)) <= rtol * smax:
        return v
    return None


def whiten_simdiag(
    p: Qcqp,
    gamma_star,
    commute_tol: float = COMMUTE_TOL,
    offdiag_tol: float = OFFDIAG_TOL,
) -> SimultaneousDiagonalization:
    """Whiten by A(gamma*)^(-1/2) and jointly diagonalize all quadratic forms.

    Requires A(gamma*) positive definite.  After whitening, the family is
    simultaneously diagonalizable by an orthogonal basis exactly when it
    commutes pairwise; raises NotSimultaneouslyDiagonalizable otherwise.
    """
    agg = lagrangian(p, gamma_star)
    spec = sym_eig(agg.A)
    scale0 = max(1.0, float(np.max(np.abs(agg.A))))
    if spec.eigenvalues[0] <= PSD_TOL * scale0:
        raise ValueError("aggregated Hessian at gamma_star is not positive definite")
    W = spec.eigenvectors @ np.diag(1.0 / np.sqrt(spec.eigenvalues)) @ spec.eigenvectors.T

    mats = [W @ q.A @ W for q in p.quadratics()]
    scale = max(1.0, max(float(np.max(np.abs(B))) for B in mats)) ** 2
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            comm = mats[i] @ mats[j] - mats[j] @ mats[i]
            if np.max(np.abs(comm)) > commute_tol * scale:
                raise NotSimultaneouslyDiagonalizable(
                    f"whitened forms {i} and {j} do not commute "
                    f"(max commutator entry {np.max(np.abs(comm)):.3e})"
                )

    Q = _common_eigenbasis(mats)
    P = W @ Q
    n = p.dim
    diags = np.empty((len(mats), n))
    for i, q in enumerate(p.quadratics()):
        D = P.T @ q.A @ P
        off = np.max(np.abs(D - np.diag(np.diag(D))))
        si = max(1.0, float(np.max(np.abs(D))))
        if off > offdiag_tol * si:
            raise NotSimultaneouslyDiagonalizable(
                f"residual off-diagonal {off:.3e} for form {i} after joint diagonalization"
            )
        diags[i] = np.diag(D)
    return SimultaneousDiagonalization(basis=P, basis_inv=np.linalg.inv(P), diagonals=diags)


def _common_eigenbasis(mats) -> np.ndarray:
    """Orthogonal basis diagonalizing a commuting symmetric family.

    Refines invariant blocks matrix by matrix, then reorders columns by
    their dominant row so already-diagonal families come back in the
    original coordinate order.
    """
    n = mats[0].shape[0]
    Q = np.eye(n)
    blocks = [np.arange(n)]
    for B in mats:
        new_blocks = []
        for blk in blocks:
            if len(blk) == 1:
                new_blocks.append(blk)
                continue
            Qb = Q[:, blk]
            R = Qb.T @ B @ Qb
            spec = sym_eig(R)
            Q[:, blk] = Qb @ spec.eigenvectors
            w = spec.eigenvalues
            split_tol = 1e-7 * max(1.0, float(np.max(np.abs(w))))
            start = 0
            for i in range(1, len(w) + 1):
                if i == len(w) or w[i] - w[i - 1] > split_tol:
                    new_blocks.append(blk[start:i])
                    start = i
        blocks = new_blocks
    dominant = [int(np.argmax(np.abs(Q[:, j]))) for j in range(n)]
    order = np.argsort(np.array(dominant), kind="stable")
    Q = Q[:, order]
    for j in range(n):
        i = int(np.argmax(np.abs(Q[:, j])))
        if Q[i, j] < 0:
            Q[:, j] = -Q[:, j]
    return Q


def _divisors_desc(n: int) -> list:
    return [d for d in range(n, 0, -1) if n % d == 0]


def kron_multiplicity(p: Qcqp, tol: float = KRON_TOL) -> KroneckerStructure:
    """Largest k with A_i = I_k (x) (leading n x n block) for every quadratic.

    Checked in the given basis only, in decreasing divisor order; k = 1
    always holds.
    """
    N = p.dim
    mats = [q.A for q in p.quadratics()]
    for k in _divisors_desc(N):
        n = N // k
        ok = True
        for A in mats:
            block = A[:n, :n]
            cand = np.kron(np.eye(k), block)
            if np.max(np.abs(A - cand)) > tol * max(1.0, float(np.max(np.abs(A)))):
                ok = False
                break
        if ok:
            factors = tuple(A[:n, :n].copy() for A in mats)
            return KroneckerStructure(k=k, factors=factors)
    raise AssertionError("unreachable: k = 1 always matches")
