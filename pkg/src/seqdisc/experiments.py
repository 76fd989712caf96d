"""Exploratory numerics: random parent sets and sequences without repetition.

Nothing here asserts that joint measurements fail to help; the functions
report joint and product values side by side.
"""

from __future__ import annotations

import numpy as np

from . import corelinalg as la
from .gram import gram_structured
from .sdp import SdpOptions, SdpProblem, solve_primal
from .stateset import enumerate_sequences, gram_of, sequence_index, sequence_count
from .errors import DomainError

LAMBDA_MIN_FLOOR = 1e-4
FLAG_MARGIN = 1e-5
PRODUCT_SLACK = 1e-6
MAX_DRAWS_PER_INSTANCE = 10_000


def random_gram(rng: np.random.Generator, N: int, floor: float = LAMBDA_MIN_FLOOR):
    """Gram matrix of N random real unit vectors in dimension N.

    Columns are isotropic Gaussian draws normalized to the sphere. Draws
    whose Gram matrix has smallest eigenvalue at or below ``floor`` are
    rejected. Returns ``(gram, rejected_draws)``.
    """
    for rejected in range(MAX_DRAWS_PER_INSTANCE):
        v = rng.standard_normal((N, N))
        v /= np.linalg.norm(v, axis=0)
        g = gram_of(v)
        np.fill_diagonal(g, 1.0)
        if la.min_eig(g) > floor:
            return g, rejected
    raise DomainError(f"no random Gram matrix with lambda_min > {floor} in {MAX_DRAWS_PER_INSTANCE} draws")


def compare_joint_product(gram, k: int, opts: SdpOptions | None = None) -> dict:
    """Solve the single-copy and the k-fold sequence problem for one parent Gram matrix."""
    n = gram.shape[0]
    la.check_size(n**k)
    single = solve_primal(SdpProblem.uniform(gram), opts)
    joint = solve_primal(SdpProblem.uniform(la.kron_power(gram, k)), opts)
    product = single.value**k
    return {
        "single": single.value,
        "product": product,
        "joint": joint.value,
        "gap": joint.value - product,
        "product_bound_ok": bool(joint.value >= product - PRODUCT_SLACK),
        "single_status": single.status,
        "joint_status": joint.status,
        "joint_duality_gap": joint.gap,
    }


def random_experiment(N: int, k: int, count: int, seed: int, opts: SdpOptions | None = None,
                      grams=None) -> dict:
    """Joint-vs-product comparison over ``count`` seeded random parent sets.

    ``grams`` replaces the random draws with explicit Gram matrices.
    """
    la.check_size(N**k)
    rng = np.random.Generator(np.random.Philox(seed))
    rows = []
    rejected_total = 0
    instances = grams if grams is not None else [None] * count
    for index, fixed in enumerate(instances):
        if fixed is None:
            gram, rejected = random_gram(rng, N)
        else:
            gram, rejected = np.asarray(fixed, dtype=float), 0
        rejected_total += rejected
        row = {"index": index, "lambda_min": la.min_eig(gram), "rejected_draws": rejected}
        row.update(compare_joint_product(gram, k, opts))
        rows.append(row)
    gaps = np.array([r["gap"] for r in rows])
    summary = {
        "count": len(rows),
        "max_abs_gap": float(np.abs(gaps).max()) if rows else 0.0,
        "mean_gap": float(gaps.mean()) if rows else 0.0,
        "flagged": [r["index"] for r in rows if r["gap"] > FLAG_MARGIN],
        "product_bound_violations": [r["index"] for r in rows if not r["product_bound_ok"]],
        "rejected_draws": rejected_total,
        "lambda_min_floor": LAMBDA_MIN_FLOOR,
        "flag_margin": FLAG_MARGIN,
    }
    return {"summary": summary, "rows": rows}


def injective_gram(N: int, k: int, s: float) -> np.ndarray:
    """Gram matrix of the sequences in which no parent state repeats."""
    if k > N:
        raise DomainError(f"injective sequences need k <= N (k={k}, N={N})")
    rows = [sequence_index(idx, N) for idx in enumerate_sequences(N, k, injective=True)]
    return gram_structured(N, k, s)[np.ix_(rows, rows)]


def injective_experiment(N: int, k: int, s: float, opts: SdpOptions | None = None) -> dict:
    if s <= 0:
        raise DomainError("the no-repetition experiment is defined for positive overlap s > 0")
    if not s < 1:
        raise DomainError("s must be < 1")
    gram = injective_gram(N, k, s)
    sol = solve_primal(SdpProblem.uniform(gram), opts)
    reference = (1.0 - s) ** k
    return {
        "N": N,
        "k": k,
        "s": s,
        "sequences": sequence_count(N, k, injective=True),
        "value": sol.value,
        "reference": reference,
        "deviation": sol.value - reference,
        "status": sol.status,
        "duality_gap": sol.gap,
    }
