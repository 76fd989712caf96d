"""Unambiguous POVMs from the reciprocal basis and Monte Carlo measurement.

The equal-success measurement for linearly independent states ``psi_i`` is
``E_i = gamma |r_i><r_i|`` with ``r_i`` the reciprocal basis and ``gamma``
the smallest Gram eigenvalue, the largest weight that keeps
``E_0 = I - sum E_i`` positive semidefinite. Every state is then identified
with probability ``gamma`` and never misidentified.

Sampling uses numpy's Philox counter-based generator. Trials are processed
in fixed-size chunks whose streams derive from ``(seed, chunk index)``, so
results do not depend on how chunks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import corelinalg as la
from .errors import ConsistencyError, DomainError
from .optimum import optimal_sequence, optimal_single
from .stateset import (
    ParentSpec,
    build_parent_states,
    require_window,
    sequence_states,
)

INCONCLUSIVE = 0
CLIP_TOL = 1e-12
MASS_TOL = 1e-8
PSD_TOL = 1e-10
CHUNK = 50_000


@dataclass(frozen=True)
class Povm:
    """Rank-one success elements ``weights[i] * v_i v_i^T`` plus ``E_0``.

    ``vectors`` holds ``v_i`` as columns; outcome ``i + 1`` identifies state
    ``i + 1`` and outcome 0 is inconclusive.
    """

    vectors: np.ndarray
    weights: np.ndarray
    inconclusive_op: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def count(self) -> int:
        return self.vectors.shape[1]

    @property
    def success_ops(self) -> np.ndarray:
        """Stacked ``(m, d, d)`` array of the success operators."""
        v = self.vectors
        return self.weights[:, None, None] * np.einsum("ai,bi->iab", v, v)

    def success_sum(self) -> np.ndarray:
        return (self.vectors * self.weights) @ self.vectors.T


def build_unambiguous_povm(states) -> Povm:
    """Equal-success unambiguous POVM for linearly independent state columns.

    Built from the thin SVD ``states = U S V^T``: the reciprocal vectors are
    ``U S^-1 V^T`` and ``gamma = min S^2 = lambda_min(Gram)``, so
    ``E_0 = (I - U U^T) + U diag(1 - gamma / S^2) U^T`` is PSD by
    construction. Going through ``Gram^-1`` instead loses ``eps * cond(Gram)``
    and breaks positivity of ``E_0`` for nearly dependent sets.
    """
    states = np.asarray(states, dtype=float)
    d, m = states.shape
    la.check_size(d)
    if m > d:
        raise DomainError(f"{m} states in dimension {d} cannot be linearly independent")
    u, sv, vt = np.linalg.svd(states, full_matrices=False)
    if sv[-1] <= sv[0] * m * np.finfo(float).eps:
        raise DomainError("states are linearly dependent (singular Gram matrix)")
    gamma = float(sv[-1] ** 2)
    recip = (u / sv) @ vt
    e0 = (np.eye(d) - u @ u.T) + (u * (1.0 - gamma / sv**2)) @ u.T
    e0 = 0.5 * (e0 + e0.T)
    povm = Povm(recip, np.full(m, gamma), e0)
    if not la.is_psd(e0, PSD_TOL):
        raise ConsistencyError("inconclusive operator is not positive semidefinite")
    return povm


def outcome_table(povm: Povm, states) -> np.ndarray:
    """Born-rule probabilities, one row per state column: ``[p_0, p_1, ..., p_m]``.

    Entries within ``CLIP_TOL`` outside ``[0, 1]`` are clipped and the row
    renormalized; anything worse raises :class:`ConsistencyError`.
    """
    states = np.asarray(states, dtype=float)
    if states.ndim == 1:
        states = states[:, None]
    if states.shape[0] != povm.dim:
        raise DomainError(f"state dimension {states.shape[0]} != POVM dimension {povm.dim}")
    amp = povm.vectors.T @ states
    success = (povm.weights[:, None] * amp * amp).T
    p0 = np.einsum("ai,ab,bi->i", states, povm.inconclusive_op, states)
    table = np.column_stack([p0, success])
    if table.min() < -CLIP_TOL or table.max() > 1 + CLIP_TOL:
        raise ConsistencyError(f"outcome probability out of range: [{table.min()}, {table.max()}]")
    table = np.clip(table, 0.0, None)
    mass = table.sum(axis=1)
    if np.abs(mass - 1.0).max() > MASS_TOL:
        raise ConsistencyError(f"probabilities sum to {mass} instead of 1")
    return table / mass[:, None]


def _inverse_cdf(rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(rows, axis=-1)
    out = (cdf <= u[..., None]).sum(axis=-1)
    return np.minimum(out, rows.shape[-1] - 1)


def measure_once(povm: Povm, state, rng: np.random.Generator) -> int:
    """Sample one outcome: 0 for inconclusive, ``i`` (1-based) for state ``i``."""
    state = np.asarray(state, dtype=float)
    if abs(np.linalg.norm(state) - 1.0) > 1e-9:
        raise DomainError("state must have unit norm")
    row = outcome_table(povm, state)[0]
    return int(_inverse_cdf(row, np.asarray(rng.random()))[()])


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def _chunks(trials: int):
    for index, start in enumerate(range(0, trials, CHUNK)):
        yield index, min(CHUNK, trials - start)


@dataclass(frozen=True)
class SimReport:
    strategy: str
    N: int
    k: int
    s: float
    trials: int
    successes: int
    inconclusives: int
    errors: int
    frequency: float
    stderr: float
    seed: int
    target: float

    def to_dict(self) -> dict:
        return asdict(self)


def _report(strategy, spec, k, trials, successes, inconclusives, errors, seed, target) -> SimReport:
    if successes + inconclusives + errors != trials:
        raise ConsistencyError("trial outcomes do not add up")
    freq = successes / trials
    return SimReport(
        strategy=strategy,
        N=spec.N,
        k=k,
        s=spec.s,
        trials=trials,
        successes=successes,
        inconclusives=inconclusives,
        errors=errors,
        frequency=freq,
        stderr=math.sqrt(freq * (1.0 - freq) / trials),
        seed=seed,
        target=target,
    )


def _check_sim_args(spec: ParentSpec, k: int, trials: int) -> None:
    require_window(spec.N, spec.s)
    spec.require_uniform()
    if k < 1:
        raise DomainError("k must be >= 1")
    if trials < 1:
        raise DomainError("trials must be >= 1")


def _individual_counts(spec: ParentSpec, k: int, trials: int, seed: int):
    """Per-trial symbol outcomes of the symbol-by-symbol strategy, chunk by chunk."""
    states = build_parent_states(spec)
    table = outcome_table(build_unambiguous_povm(states), states)
    for index, size in _chunks(trials):
        rng = chunk_rng(seed, index)
        seq = rng.integers(0, spec.N, size=(size, k))
        u = rng.random((size, k))
        yield seq, _inverse_cdf(table[seq], u)


def simulate_individual(spec: ParentSpec, k: int, trials: int, seed: int) -> SimReport:
    """Measure each symbol with the single-copy POVM; keep the sequence if all are conclusive."""
    _check_sim_args(spec, k, trials)
    successes = inconclusives = errors = 0
    for seq, outcomes in _individual_counts(spec, k, trials, seed):
        wrong = ((outcomes != INCONCLUSIVE) & (outcomes != seq + 1)).any(axis=1)
        complete = (outcomes != INCONCLUSIVE).all(axis=1)
        errors += int(wrong.sum())
        successes += int((complete & ~wrong).sum())
        inconclusives += int((~complete & ~wrong).sum())
    target = optimal_sequence(spec.N, k, spec.s)
    return _report("individual", spec, k, trials, successes, inconclusives, errors, seed, target)


def simulate_collective(spec: ParentSpec, k: int, trials: int, seed: int) -> SimReport:
    """One joint measurement on the whole sequence, built from all ``N**k`` sequence states."""
    _check_sim_args(spec, k, trials)
    la.check_size(spec.N**k)
    seq_states = sequence_states(build_parent_states(spec), k)
    table = outcome_table(build_unambiguous_povm(seq_states), seq_states)
    m = seq_states.shape[1]
    successes = inconclusives = errors = 0
    for index, size in _chunks(trials):
        rng = chunk_rng(seed, index)
        sigma = rng.integers(0, m, size=size)
        outcome = _inverse_cdf(table[sigma], rng.random(size))
        successes += int((outcome == sigma + 1).sum())
        inconclusives += int((outcome == INCONCLUSIVE).sum())
    errors = trials - successes - inconclusives
    target = optimal_sequence(spec.N, k, spec.s)
    return _report("collective", spec, k, trials, successes, inconclusives, errors, seed, target)


@dataclass(frozen=True)
class SiftStats:
    per_symbol_conclusive_rate: float
    whole_sequence_keep_rate: float
    expected_per_symbol: float
    expected_keep: float
    trials: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def sift_statistics(spec: ParentSpec, k: int, trials: int, seed: int) -> SiftStats:
    """Conclusive rate per symbol and the fraction of sequences kept whole."""
    _check_sim_args(spec, k, trials)
    conclusive_symbols = kept = 0
    for _, outcomes in _individual_counts(spec, k, trials, seed):
        conclusive = outcomes != INCONCLUSIVE
        conclusive_symbols += int(conclusive.sum())
        kept += int(conclusive.all(axis=1).sum())
    p = optimal_single(spec.N, spec.s)
    return SiftStats(
        per_symbol_conclusive_rate=conclusive_symbols / (trials * k),
        whole_sequence_keep_rate=kept / trials,
        expected_per_symbol=p,
        expected_keep=p**k,
        trials=trials,
        seed=seed,
    )


@dataclass(frozen=True)
class PovmDiagnostics:
    max_cross_probability: float
    completeness_residual: float
    min_eig_inconclusive: float
    min_success: float
    max_success: float

    @property
    def success_spread(self) -> float:
        return self.max_success - self.min_success

    def to_dict(self) -> dict:
        out = asdict(self)
        out["success_spread"] = self.success_spread
        return out


def povm_diagnostics(povm: Povm, states) -> PovmDiagnostics:
    """Unambiguity, completeness and equal-success figures, before any clipping."""
    states = np.asarray(states, dtype=float)
    amp = povm.vectors.T @ states
    probs = povm.weights[:, None] * amp * amp
    diag = np.diag(probs).copy()
    off = probs - np.diag(diag)
    residual = np.eye(povm.dim) - povm.success_sum() - povm.inconclusive_op
    return PovmDiagnostics(
        max_cross_probability=float(np.abs(off).max()) if probs.size > 1 else 0.0,
        completeness_residual=float(np.abs(residual).max()),
        min_eig_inconclusive=la.min_eig(povm.inconclusive_op),
        min_success=float(diag.min()),
        max_success=float(diag.max()),
    )
