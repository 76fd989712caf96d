"""Dense real symmetric linear algebra.

Everything here works on plain ``numpy`` arrays. Symmetric matrices are
validated at the boundary with :func:`as_symmetric`; results are fresh arrays
and inputs are never modified.
"""

from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np
from scipy.linalg import lapack

from .errors import CapacityError, DomainError, NotPositiveDefiniteError, SolverFailure

DEFAULT_MAX_DIM = 1024
DEFAULT_PSD_TOL = 1e-10

JACOBI_MAX_SWEEPS = 100
JACOBI_REL_TOL = 1e-12
# Cyclic Jacobi costs O(n^2) Python-level rotations per sweep; above this size
# the "auto" method hands over to LAPACK.
JACOBI_AUTO_LIMIT = 128


class EigDecomp(NamedTuple):
    eigenvalues: np.ndarray
    basis: np.ndarray


def max_dim() -> int:
    """Size guard for dense matrices, overridable via ``SEQDISC_MAX_DIM``."""
    raw = os.environ.get("SEQDISC_MAX_DIM")
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError as exc:
        raise DomainError(f"SEQDISC_MAX_DIM must be an integer, got {raw!r}") from exc
    if value < 1:
        raise DomainError("SEQDISC_MAX_DIM must be positive")
    return value


def check_size(dim: int) -> None:
    limit = max_dim()
    if dim > limit:
        raise CapacityError(f"dimension {dim} exceeds size guard {limit} (set SEQDISC_MAX_DIM)")


def as_symmetric(m, rtol: float = 1e-12) -> np.ndarray:
    """Return ``m`` as a float array after checking it is square and symmetric."""
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DomainError(f"expected a non-empty square matrix, got shape {a.shape}")
    scale = max(np.abs(a).max(), 1.0)
    if np.abs(a - a.T).max() > rtol * scale:
        raise DomainError("matrix is not symmetric")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product; entry ``(i*nb + x, j*mb + y)`` is ``a[i, j] * b[x, y]``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    ra, ca = a.shape
    rb, cb = b.shape
    out = a[:, None, :, None] * b[None, :, None, :]
    return out.reshape(ra * rb, ca * cb)


def kron_power(a, k: int) -> np.ndarray:
    if k < 1:
        raise DomainError("Kronecker power needs k >= 1")
    out = np.asarray(a, dtype=float)
    for _ in range(k - 1):
        out = kron(a, out)
    return out


def jacobi_eig(m, max_sweeps: int = JACOBI_MAX_SWEEPS, rtol: float = JACOBI_REL_TOL) -> EigDecomp:
    """Cyclic Jacobi eigensolver for a dense symmetric matrix.

    Sweeps the strict upper triangle row by row, annihilating each
    off-diagonal entry with a plane rotation, until the off-diagonal
    Frobenius norm falls below ``rtol * ||m||_F``.

    Raises
    ------
    SolverFailure
        If ``max_sweeps`` sweeps do not reach the threshold.
    """
    a = as_symmetric(m)
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    threshold = rtol * np.linalg.norm(a)
    # Entries this small cannot move the off-diagonal norm meaningfully.
    negligible = threshold / (4.0 * n)

    def off_norm() -> float:
        return float(np.linalg.norm(a - np.diag(np.diag(a))))

    for _ in range(max_sweeps + 1):
        if off_norm() <= threshold:
            order = np.argsort(np.diag(a), kind="stable")
            return EigDecomp(np.diag(a)[order].copy(), v[:, order].copy())
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= negligible:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                cp = a[:, p].copy()
                cq = a[:, q]
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :]
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    raise SolverFailure(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


def sym_eig(m, method: str = "auto") -> EigDecomp:
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending.

    ``method`` is ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi up to
    dimension ``JACOBI_AUTO_LIMIT``, LAPACK beyond).
    """
    a = as_symmetric(m)
    n = a.shape[0]
    check_size(n)
    if method == "auto":
        method = "jacobi" if n <= JACOBI_AUTO_LIMIT else "lapack"
    if method == "jacobi":
        return jacobi_eig(a)
    if method == "lapack":
        w, v = np.linalg.eigh(0.5 * (a + a.T))
        return EigDecomp(w, v)
    raise DomainError(f"unknown eigensolver method {method!r}")


def eigvalsh(m, method: str = "auto") -> np.ndarray:
    return sym_eig(m, method).eigenvalues


def min_eig(m, method: str = "auto") -> float:
    return float(sym_eig(m, method).eigenvalues[0])


def is_psd(m, tol: float = DEFAULT_PSD_TOL) -> bool:
    """True iff the smallest eigenvalue of ``m`` is at least ``-tol``."""
    if tol < 0:
        raise DomainError("tolerance must be non-negative")
    return min_eig(m) >= -tol


def chol(m, pivot_rtol: float | None = None) -> np.ndarray:
    """Lower-triangular Cholesky factor ``L`` with ``L @ L.T == m``.

    A pivot ``L[j, j]**2`` at or below ``pivot_rtol * max|m|`` counts as
    non-positive; the default ``n * eps`` rejects matrices that are singular
    up to rounding.

    Raises
    ------
    NotPositiveDefiniteError
        Carrying the index of the failing pivot.
    """
    a = as_symmetric(m)
    n = a.shape[0]
    if pivot_rtol is None:
        pivot_rtol = n * np.finfo(float).eps
    floor = pivot_rtol * np.abs(a).max()
    L, info = lapack.dpotrf(a, lower=1, clean=1)
    if info > 0:
        # LAPACK reports the 1-based order of the first non-positive minor.
        raise NotPositiveDefiniteError(info - 1, float("nan"))
    if info < 0:
        raise DomainError(f"dpotrf rejected argument {-info}")
    pivots = np.diag(L) ** 2
    bad = np.flatnonzero(~(pivots > floor))
    if bad.size:
        j = int(bad[0])
        raise NotPositiveDefiniteError(j, float(pivots[j]))
    return L


def chol_solve(L: np.ndarray, rhs) -> np.ndarray:
    """Solve ``L L^T x = rhs`` given a Cholesky factor."""
    rhs = np.asarray(rhs, dtype=float)
    x, info = lapack.dpotrs(L, rhs, lower=1)
    if info != 0:
        raise DomainError(f"dpotrs rejected argument {-info}")
    return x


def solve_spd(m, rhs) -> np.ndarray:
    """Solve ``m x = rhs`` for symmetric positive definite ``m``."""
    L = chol(m)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != L.shape[0]:
        raise DomainError(f"rhs has {rhs.shape[0]} rows, matrix has {L.shape[0]}")
    return chol_solve(L, rhs)


def inv_spd(m) -> np.ndarray:
    L = chol(m)
    x = chol_solve(L, np.eye(L.shape[0]))
    return 0.5 * (x + x.T)


def uniform_offdiag(n: int, r: float) -> np.ndarray:
    """The ``n x n`` matrix with unit diagonal and every off-diagonal entry ``r``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    out = np.full((n, n), float(r))
    np.fill_diagonal(out, 1.0)
    return out
