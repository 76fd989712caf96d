"""Closed-form optima and the primal/dual optimality certificate.

For equiprobable parents with equal real overlap ``s`` the best unambiguous
success probability for length-k sequences is the k-th power of the single
copy optimum. :func:`verify_optimality` checks this numerically by building
the diagonal primal point and the Kronecker-power dual matrix and measuring
every feasibility slack and the duality gap.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import corelinalg as la
from .errors import DomainError
from .gram import gram_structured
from .stateset import require_window

PSD_TOL = 1e-10
GAP_TOL = 1e-9


def two_state_error_bound(p1: float, p2: float, overlap: float) -> float:
    """Minimum-error probability for two pure states with the given priors."""
    return 0.5 * (1.0 - math.sqrt(max(1.0 - 4.0 * p1 * p2 * overlap**2, 0.0)))


def two_state_inconclusive_bound(p1: float, p2: float, overlap: float) -> float:
    """Minimum inconclusive probability for unambiguous discrimination of two states."""
    return 2.0 * math.sqrt(p1 * p2) * abs(overlap)


def optimal_single(N: int, s: float) -> float:
    require_window(N, s)
    if s >= 0:
        return 1.0 - s
    return 1.0 + (N - 1) * s


def optimal_sequence(N: int, k: int, s: float) -> float:
    if k < 1:
        raise DomainError("k must be >= 1")
    return optimal_single(N, s) ** k


def individual_strategy_bound(p_single: float, k: int) -> float:
    """Success probability of measuring each of k symbols separately."""
    if not 0.0 <= p_single <= 1.0:
        raise DomainError("p_single must lie in [0, 1]")
    return p_single**k


def primal_ansatz(N: int, k: int, s: float) -> np.ndarray:
    return optimal_sequence(N, k, s) * np.eye(N**k)


def dual_single(N: int, s: float) -> np.ndarray:
    # s = 0 takes the s >= 0 branch so outputs are reproducible.
    require_window(N, s)
    if s >= 0:
        return la.uniform_offdiag(N, -1.0 / (N - 1)) / N
    return np.full((N, N), 1.0 / N)


def dual_certificate(N: int, k: int, s: float) -> np.ndarray:
    la.check_size(N**k)
    return la.kron_power(dual_single(N, s), k)


@dataclass(frozen=True)
class OptimalityReport:
    N: int
    k: int
    s: float
    primal_value: float
    dual_value: float
    gap: float
    primal_feasible: bool
    dual_feasible: bool
    min_eig_slack: float
    min_eig_Z: float
    max_diag_violation: float
    min_p: float
    tol_psd: float
    tol_gap: float

    @property
    def passed(self) -> bool:
        return self.primal_feasible and self.dual_feasible and abs(self.gap) <= self.tol_gap

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def verify_optimality(
    N: int, k: int, s: float, tol_psd: float = PSD_TOL, tol_gap: float = GAP_TOL
) -> OptimalityReport:
    """Check the closed-form primal point and dual certificate against each other.

    Primal feasibility needs ``p >= 0`` and ``Gamma - P`` PSD. The dual uses
    ``z = 0`` so its equality constraint reduces to ``Z_ii = eta_i``.
    Failures are reported through the flags, never raised.
    """
    require_window(N, s)
    n = N**k
    gamma = gram_structured(N, k, s)
    P = primal_ansatz(N, k, s)
    Z = dual_certificate(N, k, s)
    eta = np.full(n, 1.0 / n)
    p = np.diag(P).copy()
    z = np.zeros(n)

    min_eig_slack = la.min_eig(gamma - P)
    min_eig_Z = la.min_eig(Z)
    # tr(F_i Z) = -Z_ii
    max_diag_violation = float(np.max(np.abs(z + eta - np.diag(Z))))

    primal_value = float(eta @ p)
    dual_value = float(np.sum(gamma * Z))
    return OptimalityReport(
        N=N,
        k=k,
        s=s,
        primal_value=primal_value,
        dual_value=dual_value,
        gap=dual_value - primal_value,
        primal_feasible=bool(p.min() >= 0 and min_eig_slack >= -tol_psd),
        dual_feasible=bool(min_eig_Z >= -tol_psd and max_diag_violation <= tol_gap and z.min() >= 0),
        min_eig_slack=min_eig_slack,
        min_eig_Z=min_eig_Z,
        max_diag_violation=max_diag_violation,
        min_p=float(p.min()),
        tol_psd=tol_psd,
        tol_gap=tol_gap,
    )
