"""Numerical solver for the unambiguous-discrimination semidefinite program.

Primal::

    maximize    eta . p
    subject to  Gamma - diag(p) >= 0,  p >= 0

Dual::

    minimize    tr(Gamma Z)
    subject to  Z_ii = eta_i + z_i,  Z >= 0,  z >= 0

Because the matrix constraint is affine in a diagonal, the primal is solved
directly in ``p`` by log-barrier path following. At barrier parameter ``mu``
the centering condition gives the dual pair ``Z = mu (Gamma - diag(p))^-1``
and ``z_i = mu / p_i`` for free.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import corelinalg as la
from .errors import DomainError, NotPositiveDefiniteError, PreconditionError

CONVERGED = "converged"
ITERATION_CAP = "iteration-cap"
INFEASIBLE_INPUT = "infeasible-input"

ARMIJO = 1e-4
BACKTRACK = 0.5
MIN_STEP = 1e-14
QUADRATIC_REGION = 0.25


@dataclass(frozen=True)
class SdpOptions:
    tol: float = 1e-10
    max_iter: int = 500
    mu0: float = 1.0
    mu_shrink: float = 0.2
    # Below ~1e-9 the dual Z = mu (Gamma - diag(p))^-1 is dominated by
    # rounding in the nearly singular slack matrix; the gap is already 2 n mu.
    mu_min: float = 1e-9
    newton_per_level: int = 50


@dataclass(frozen=True)
class SdpProblem:
    gram: np.ndarray
    priors: np.ndarray

    def __post_init__(self):
        gram = la.as_symmetric(self.gram)
        n = gram.shape[0]
        la.check_size(n)
        priors = np.asarray(self.priors, dtype=float).ravel()
        if priors.shape != (n,):
            raise DomainError(f"priors have length {priors.size}, Gram matrix is {n}x{n}")
        if priors.min() < 0 or abs(math.fsum(priors) - 1.0) > 1e-12:
            raise DomainError("priors must be non-negative and sum to 1")
        if np.abs(np.diag(gram) - 1.0).max() > 1e-10:
            raise DomainError("Gram matrix of pure states needs a unit diagonal")
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "priors", priors)

    @classmethod
    def uniform(cls, gram) -> SdpProblem:
        n = np.asarray(gram).shape[0]
        return cls(gram, np.full(n, 1.0 / n))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @classmethod
    def from_dict(cls, data: dict) -> SdpProblem:
        try:
            gram = data["gram"]
        except KeyError as exc:
            raise DomainError("problem needs a 'gram' field") from exc
        priors = data.get("priors")
        if priors is None:
            return cls.uniform(gram)
        return cls(gram, priors)

    @classmethod
    def from_json(cls, text: str) -> SdpProblem:
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {"gram": self.gram.tolist(), "priors": self.priors.tolist()}


@dataclass
class SdpSolution:
    p: np.ndarray
    value: float
    Z: np.ndarray
    z: np.ndarray
    gap: float
    iterations: int
    status: str
    mu: float
    history: list[float] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "value": self.value,
            "p": self.p.tolist(),
            "Z": self.Z.tolist(),
            "z": self.z.tolist(),
            "gap": self.gap,
            "iterations": self.iterations,
            "mu": self.mu,
            "history": list(self.history),
        }


def _barrier_value(gram, eta, p, mu):
    """Barrier objective divided by ``mu``, or None if ``p`` is not strictly feasible."""
    if p.min() <= 0:
        return None, None
    try:
        L = la.chol(gram - np.diag(p))
    except NotPositiveDefiniteError:
        return None, None
    logdet = 2.0 * np.sum(np.log(np.diag(L)))
    return float(eta @ p / mu + logdet + np.sum(np.log(p))), L


def _infeasible(problem: SdpProblem) -> SdpSolution:
    n = problem.dim
    return SdpSolution(
        p=np.zeros(n),
        value=float("nan"),
        Z=np.zeros((n, n)),
        z=np.zeros(n),
        gap=float("nan"),
        iterations=0,
        status=INFEASIBLE_INPUT,
        mu=float("nan"),
    )


def solve_primal(problem: SdpProblem, opts: SdpOptions | None = None) -> SdpSolution:
    """Maximize ``eta . p`` over ``Gamma - diag(p) >= 0`` by barrier path following.

    Each barrier level ``mu`` maximizes
    ``eta . p + mu [log det(Gamma - diag(p)) + sum log p]`` with damped Newton
    steps, then ``mu`` shrinks geometrically until it reaches ``opts.mu_min``.
    Deterministic for fixed inputs.
    """
    opts = opts or SdpOptions()
    gram, eta = problem.gram, problem.priors
    n = problem.dim
    try:
        la.chol(gram)
    except NotPositiveDefiniteError:
        return _infeasible(problem)

    p = np.full(n, 0.5 * la.min_eig(gram))
    mu = opts.mu0
    iterations = 0
    history: list[float] = []
    status = CONVERGED
    f, L = _barrier_value(gram, eta, p, mu)

    while True:
        level_steps = 0
        while level_steps < opts.newton_per_level:
            W = la.chol_solve(L, np.eye(n))
            W = 0.5 * (W + W.T)
            grad = eta - mu * np.diag(W) + mu / p
            hess = mu * (W * W + np.diag(1.0 / p**2))
            try:
                step = la.solve_spd(hess, grad)
            except NotPositiveDefiniteError:
                break
            decrement = float(grad @ step)
            # Newton decrement of the barrier function scaled by 1/mu.
            if decrement / (2.0 * mu) <= opts.tol:
                break
            if iterations >= opts.max_iter:
                status = ITERATION_CAP
                break
            iterations += 1
            level_steps += 1
            if decrement / mu < QUADRATIC_REGION:
                # Self-concordance guarantees the full step is feasible here;
                # skip Armijo, whose test would drown in rounding.
                f_trial, L_trial = _barrier_value(gram, eta, p + step, mu)
                if f_trial is not None:
                    p, f, L = p + step, f_trial, L_trial
                    continue
            t = 1.0
            while t >= MIN_STEP:
                trial = p + t * step
                f_trial, L_trial = _barrier_value(gram, eta, trial, mu)
                if f_trial is not None and f_trial >= f + ARMIJO * t * decrement / mu:
                    break
                t *= BACKTRACK
            if t < MIN_STEP:
                # Rounding noise dominates the model; the point is centred as
                # well as double precision allows.
                break
            p, f, L = trial, f_trial, L_trial
        history.append(float(eta @ p))
        if status == ITERATION_CAP or mu <= opts.mu_min:
            break
        mu *= opts.mu_shrink
        f, L = _barrier_value(gram, eta, p, mu)

    sol = SdpSolution(
        p=p,
        value=float(eta @ p),
        Z=np.zeros((n, n)),
        z=np.zeros(n),
        gap=float("nan"),
        iterations=iterations,
        status=status,
        mu=mu,
        history=history,
    )
    Z, z, dual_value = extract_dual(problem, sol, allow_unconverged=True)
    sol.Z, sol.z = Z, z
    sol.gap = dual_value - sol.value
    return sol


def extract_dual(problem: SdpProblem, solution: SdpSolution, allow_unconverged: bool = False):
    """Dual pair ``(Z, z, tr(Gamma Z))`` implied by the final barrier iterate."""
    if solution.status == INFEASIBLE_INPUT or (not allow_unconverged and not solution.converged):
        raise PreconditionError(f"cannot extract a dual from a {solution.status} solution")
    gram = problem.gram
    Z = solution.mu * la.inv_spd(gram - np.diag(solution.p))
    z = np.diag(Z) - problem.priors
    return Z, z, float(np.sum(gram * Z))


def duality_gap(problem: SdpProblem, p, Z) -> float:
    p = np.asarray(p, dtype=float)
    Z = np.asarray(Z, dtype=float)
    if p.shape != (problem.dim,) or Z.shape != problem.gram.shape:
        raise DomainError("dimension mismatch between problem and (p, Z)")
    return float(np.sum(problem.gram * Z) - problem.priors @ p)


def solve_gram(gram, priors=None, opts: SdpOptions | None = None) -> SdpSolution:
    problem = SdpProblem.uniform(gram) if priors is None else SdpProblem(gram, priors)
    return solve_primal(problem, opts)
