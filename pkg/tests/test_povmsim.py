import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seqdisc import povmsim
from seqdisc.errors import CapacityError, ConsistencyError, DomainError
from seqdisc.povmsim import (
    INCONCLUSIVE,
    Povm,
    build_unambiguous_povm,
    measure_once,
    outcome_table,
    povm_diagnostics,
    sift_statistics,
    simulate_collective,
    simulate_individual,
)
from seqdisc.stateset import ParentSpec, build_parent_states, sequence_states

from conftest import ACCEPTANCE_GRID


def within(report, sigmas=3.0):
    target = report.target
    se = math.sqrt(target * (1 - target) / report.trials)
    return abs(report.frequency - target) <= sigmas * se


def test_orthonormal_povm():
    povm = build_unambiguous_povm(np.eye(3))
    assert np.allclose(povm.success_ops, np.stack([np.diag(r) for r in np.eye(3)]))
    assert np.allclose(povm.inconclusive_op, 0.0)
    assert np.allclose(outcome_table(povm, np.eye(3))[:, 1:], np.eye(3))


@pytest.mark.parametrize("s", [0.5, -0.25])
def test_equal_success(s):
    states = build_parent_states(ParentSpec(3, s))
    diag = povm_diagnostics(build_unambiguous_povm(states), states)
    assert diag.min_success == pytest.approx(0.5, abs=1e-12)
    assert diag.success_spread <= 1e-12


def test_singular_states_rejected():
    with pytest.raises(DomainError):
        build_unambiguous_povm(np.array([[1.0, 1.0], [0.0, 0.0]]))


def test_povm_structure_on_grid():
    for N, k, s in ACCEPTANCE_GRID:
        states = sequence_states(build_parent_states(ParentSpec(N, s)), k)
        povm = build_unambiguous_povm(states)
        d = povm_diagnostics(povm, states)
        assert d.max_cross_probability <= 1e-10
        assert d.completeness_residual <= 1e-12
        assert d.min_eig_inconclusive >= -1e-10
        assert d.success_spread <= 1e-9


def test_measure_examples():
    rng = np.random.default_rng(0)
    povm = build_unambiguous_povm(np.eye(3))
    assert all(measure_once(povm, np.eye(3)[:, 1], rng) == 2 for _ in range(50))
    blind = Povm(np.zeros((2, 1)), np.zeros(1), np.eye(2))
    assert all(measure_once(blind, np.array([0.6, 0.8]), rng) == INCONCLUSIVE for _ in range(50))
    with pytest.raises(DomainError):
        measure_once(povm, np.array([1.0, 1.0, 0.0]), rng)


def test_measure_frequency_two_states():
    states = build_parent_states(ParentSpec(2, 0.6))
    povm = build_unambiguous_povm(states)
    rng = np.random.default_rng(5)
    n = 100_000
    rows = outcome_table(povm, states[:, 0])
    outcomes = povmsim._inverse_cdf(np.broadcast_to(rows[0], (n, 3)), rng.random(n))
    freq = np.mean(outcomes == 1)
    assert abs(freq - 0.4) <= 3 * math.sqrt(0.24 / n)
    assert not np.any(outcomes == 2)
    # the scalar path agrees on a small sample
    sample = [measure_once(povm, states[:, 0], rng) for _ in range(300)]
    assert set(sample) <= {0, 1}


def test_outcome_table_guards():
    states = build_parent_states(ParentSpec(2, 0.3))
    povm = build_unambiguous_povm(states)
    with pytest.raises(DomainError):
        outcome_table(povm, np.ones(3))
    broken = Povm(povm.vectors, povm.weights * 3.0, povm.inconclusive_op)
    with pytest.raises(ConsistencyError):
        outcome_table(broken, states)


@pytest.mark.parametrize("N,s,k,target", [(3, 0.5, 2, 0.25), (2, 0.6, 3, 0.064), (2, -0.5, 2, 0.25)])
def test_simulators_hit_target(N, s, k, target):
    spec = ParentSpec(N, s)
    ind = simulate_individual(spec, k, 100_000, 1)
    col = simulate_collective(spec, k, 100_000, 1)
    for rep in (ind, col):
        assert rep.target == pytest.approx(target)
        assert rep.errors == 0
        assert rep.successes + rep.inconclusives + rep.errors == rep.trials
        assert within(rep)
    pooled = math.sqrt(ind.stderr**2 + col.stderr**2)
    assert abs(ind.frequency - col.frequency) < 4 * pooled


@pytest.mark.parametrize("k", [1, 3])
def test_orthogonal_always_succeeds(k):
    spec = ParentSpec(3, 0.0)
    assert simulate_individual(spec, k, 5000, 3).frequency == 1.0
    assert simulate_collective(spec, k, 5000, 3).frequency == 1.0


def test_determinism_and_chunking(monkeypatch):
    spec = ParentSpec(2, 0.4)
    a = simulate_individual(spec, 2, 120_001, 9)
    assert a == simulate_individual(spec, 2, 120_001, 9)
    assert simulate_collective(spec, 2, 777, 4) == simulate_collective(spec, 2, 777, 4)
    assert a != simulate_individual(spec, 2, 120_001, 10)


def test_simulator_guards(monkeypatch):
    with pytest.raises(DomainError):
        simulate_individual(ParentSpec(3, -0.5), 2, 10, 0)
    with pytest.raises(DomainError):
        simulate_individual(ParentSpec(2, 0.3), 0, 10, 0)
    with pytest.raises(DomainError):
        simulate_collective(ParentSpec(2, 0.3), 2, 0, 0)
    with pytest.raises(DomainError):
        simulate_individual(ParentSpec(2, 0.3, (0.2, 0.8)), 2, 10, 0)
    with pytest.raises(CapacityError):
        simulate_collective(ParentSpec(2, 0.3), 11, 10, 0)
    monkeypatch.setenv("SEQDISC_MAX_DIM", "8")
    with pytest.raises(CapacityError):
        simulate_collective(ParentSpec(3, 0.3), 2, 10, 0)


def test_sift_statistics():
    stats = sift_statistics(ParentSpec(2, 0.6), 4, 100_000, 2)
    n = 100_000
    assert abs(stats.per_symbol_conclusive_rate - 0.4) <= 3 * math.sqrt(0.24 / (4 * n))
    assert abs(stats.whole_sequence_keep_rate - 0.0256) <= 3 * math.sqrt(0.0256 * 0.9744 / n)
    assert stats.expected_keep == pytest.approx(0.0256)
    ortho = sift_statistics(ParentSpec(3, 0.0), 3, 1000, 0)
    assert ortho.per_symbol_conclusive_rate == 1.0 and ortho.whole_sequence_keep_rate == 1.0
    single = sift_statistics(ParentSpec(3, 0.2), 1, 5000, 0)
    assert single.per_symbol_conclusive_rate == single.whole_sequence_keep_rate


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.floats(-0.3, 0.95), st.integers(1, 2))
def test_probabilities_in_range(N, s, k):
    if s <= -1.0 / (N - 1) + 1e-3:
        return
    states = sequence_states(build_parent_states(ParentSpec(N, s)), k)
    povm = build_unambiguous_povm(states)
    amp = povm.vectors.T @ states
    raw = np.column_stack([np.einsum("ai,ab,bi->i", states, povm.inconclusive_op, states),
                           (povm.weights[:, None] * amp * amp).T])
    assert raw.min() >= -1e-12 and raw.max() <= 1 + 1e-12
    table = outcome_table(povm, states)
    assert np.allclose(table.sum(axis=1), 1.0, atol=1e-14)
    assert np.allclose(table[:, 1:][~np.eye(N**k, dtype=bool)], 0.0, atol=1e-10)
