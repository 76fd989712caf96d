import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seqdisc import corelinalg as la
from seqdisc.errors import CapacityError, DomainError
from seqdisc.gram import (
    gram_recursive,
    gram_single,
    gram_structured,
    spectrum_crosscheck,
    structured_spectrum,
    uniform_offdiag_eigs,
)
from seqdisc.stateset import ParentSpec, build_parent_states, sequence_state

from conftest import ACCEPTANCE_GRID, gram_oracle, lam


def test_gram_examples():
    assert np.array_equal(gram_structured(2, 1, 0.6), [[1.0, 0.6], [0.6, 1.0]])
    assert np.array_equal(gram_structured(3, 2, 0.0), np.eye(9))
    g = gram_structured(2, 2, 0.5)
    assert g[0, 3] == pytest.approx(0.25)
    st = build_parent_states(ParentSpec(2, 0.5))
    assert sequence_state(st, (1, 1)) @ sequence_state(st, (2, 2)) == pytest.approx(g[0, 3], abs=1e-12)


def test_gram_size_guard():
    with pytest.raises(CapacityError):
        gram_structured(2, 11, 0.5)
    with pytest.raises(DomainError):
        gram_structured(2, 0, 0.5)


@pytest.mark.parametrize("N,k,s", [(2, 3, -0.7), (3, 2, 0.4), (4, 3, 0.25), (3, 3, -0.2)])
def test_gram_matches_hamming_oracle(N, k, s):
    assert np.allclose(gram_structured(N, k, s), gram_oracle(N, k, s), atol=1e-15)
    assert np.allclose(gram_recursive(N, k, s), gram_oracle(N, k, s), atol=1e-15)


@pytest.mark.parametrize("N,l,s", [(2, 1, 0.3), (3, 2, -0.4), (4, 1, 0.9)])
def test_recursion_step(N, l, s):
    assert np.array_equal(gram_structured(N, l + 1, s), la.kron(gram_single(N, s), gram_structured(N, l, s)))


def test_uniform_offdiag_eigs_examples():
    assert uniform_offdiag_eigs(3, 0.5) == [(0.5, 2), (2.0, 1)]
    assert uniform_offdiag_eigs(5, 0.0) == [(1.0, 5)]
    got = sorted(uniform_offdiag_eigs(4, -0.2))
    assert got[0][1] == 1 and got[0][0] == pytest.approx(0.4)
    assert got[1][1] == 3 and got[1][0] == pytest.approx(1.2)
    assert np.allclose(sorted(np.linalg.eigvalsh(lam(4, -0.2))), [0.4, 1.2, 1.2, 1.2])


def test_structured_spectrum_example():
    spec = structured_spectrum(3, 2, 0.5)
    table = {(e.a, e.b): (e.value, e.multiplicity) for e in spec.entries}
    assert table[(2, 0)] == (pytest.approx(0.25), 4)
    assert table[(1, 1)] == (pytest.approx(1.0), 4)
    assert table[(0, 2)] == (pytest.approx(4.0), 1)
    assert spec.weighted_sum == pytest.approx(9.0, abs=1e-12)
    assert np.allclose(spec.values(), np.linalg.eigvalsh(gram_oracle(3, 2, 0.5)), atol=1e-12)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_structured_spectrum_single_copy(N):
    s = 0.3
    spec = structured_spectrum(N, 1, s)
    pairs = sorted((e.value, e.multiplicity) for e in spec.entries)
    assert pairs[0][0] == pytest.approx(1 - s) and pairs[0][1] == N - 1
    assert pairs[1][0] == pytest.approx(1 + (N - 1) * s) and pairs[1][1] == 1


def test_structured_spectrum_zero_overlap():
    spec = structured_spectrum(3, 3, 0.0)
    assert len(spec.entries) == 1
    assert spec.entries[0].value == 1.0 and spec.entries[0].multiplicity == 27


def test_crosscheck_examples():
    assert spectrum_crosscheck(3, 2, 0.5, 1e-9).passed
    assert spectrum_crosscheck(2, 3, -0.9, 1e-9).passed
    exact = spectrum_crosscheck(3, 2, 0.0, 0.0)
    assert exact.passed and exact.worst_deviation == 0.0


def test_crosscheck_full_grid():
    for N, k, s in ACCEPTANCE_GRID:
        rep = spectrum_crosscheck(N, k, s)
        assert rep.passed, rep
        assert rep.trace_deviation <= 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(1, 3), st.floats(-0.999, 0.999))
def test_extreme_eigenvalues(N, k, s):
    lo = -1.0 / (N - 1)
    if s <= lo + 1e-3:
        return
    vals = la.eigvalsh(gram_structured(N, k, s))
    ends = sorted([(1 - s) ** k, (1 + (N - 1) * s) ** k])
    assert vals[0] == pytest.approx(ends[0], abs=1e-9)
    assert vals[-1] == pytest.approx(ends[1], abs=1e-9 * max(1.0, ends[1]))
    spec = structured_spectrum(N, k, s)
    assert spec.total_multiplicity == N**k


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("k", [1, 2])
def test_positive_definite_iff_window(N, k):
    lo = -1.0 / (N - 1)
    for s in (0.5 * (lo + 1), lo + 1e-4, 1 - 1e-4):
        la.chol(gram_structured(N, k, s))
    for s in (lo - 1e-3, lo):
        assert la.min_eig(gram_structured(N, k, s)) <= 1e-12


def test_spectrum_to_dict_roundtrip():
    d = structured_spectrum(2, 2, 0.3).to_dict()
    assert sum(e["multiplicity"] for e in d["entries"]) == 4
