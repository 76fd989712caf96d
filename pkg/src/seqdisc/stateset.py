"""Parent state sets with equal real overlaps and their sequence products.

States are stored column-wise in a ``(d, m)`` array. Sequence indices are
1-based tuples ``(sigma(1), ..., sigma(k))``, enumerated lexicographically with
the first symbol as the outermost (slowest varying) Kronecker factor.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import corelinalg as la
from .errors import DomainError

PRIOR_TOL = 1e-12


def window(N: int) -> tuple[float, float]:
    """Open interval of overlaps ``s`` for which N equal-overlap states are independent."""
    if N < 2:
        raise DomainError("N must be >= 2")
    return -1.0 / (N - 1), 1.0


def check_linear_independence(N: int, s: float) -> bool:
    lo, hi = window(N)
    if abs(s) > 1:
        raise DomainError(f"|s| must be <= 1, got {s}")
    return lo < s < hi


def require_window(N: int, s: float) -> None:
    if not check_linear_independence(N, s):
        lo, hi = window(N)
        raise DomainError(f"s={s} outside the linear-independence window ({lo:.6g}, {hi:.6g}) for N={N}")


@dataclass(frozen=True)
class ParentSpec:
    """N equally overlapping parent states with overlap ``s`` and prior weights."""

    N: int
    s: float
    priors: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.N < 2:
            raise DomainError("N must be >= 2")
        if abs(self.s) > 1:
            raise DomainError(f"|s| must be <= 1, got {self.s}")
        priors = self.priors or (1.0 / self.N,) * self.N
        priors = tuple(float(p) for p in priors)
        if len(priors) != self.N:
            raise DomainError(f"expected {self.N} priors, got {len(priors)}")
        if min(priors) < 0 or abs(math.fsum(priors) - 1.0) > PRIOR_TOL:
            raise DomainError("priors must be non-negative and sum to 1")
        object.__setattr__(self, "priors", priors)

    @property
    def is_uniform(self) -> bool:
        return all(abs(p - 1.0 / self.N) <= PRIOR_TOL for p in self.priors)

    def require_uniform(self) -> None:
        if not self.is_uniform:
            raise DomainError("closed-form results assume uniform priors")


def build_parent_states(spec: ParentSpec) -> np.ndarray:
    """Realize the parent set as the columns of ``L.T`` for ``Gamma(N,1) = L L.T``.

    The ambient dimension is N and the column Gram matrix reproduces the
    prescribed overlaps exactly up to rounding.
    """
    require_window(spec.N, spec.s)
    L = la.chol(la.uniform_offdiag(spec.N, spec.s))
    return L.T.copy()


def gram_of(states) -> np.ndarray:
    states = np.asarray(states, dtype=float)
    g = states.T @ states
    return 0.5 * (g + g.T)


def sequence_count(N: int, k: int, injective: bool = False) -> int:
    if injective:
        return math.perm(N, k)
    return N**k


def enumerate_sequences(N: int, k: int, injective: bool = False) -> list[tuple[int, ...]]:
    """All index tuples of length k over ``1..N`` in lexicographic order."""
    if N < 2 or k < 1:
        raise DomainError("need N >= 2 and k >= 1")
    if injective:
        if k > N:
            raise DomainError(f"injective sequences need k <= N (k={k}, N={N})")
        return list(itertools.permutations(range(1, N + 1), k))
    return list(itertools.product(range(1, N + 1), repeat=k))


def sequence_index(idx, N: int) -> int:
    """Row of ``idx`` in the lexicographic enumeration of all ``N**k`` sequences."""
    pos = 0
    for symbol in idx:
        if not 1 <= symbol <= N:
            raise DomainError(f"symbol {symbol} outside 1..{N}")
        pos = pos * N + (symbol - 1)
    return pos


def sequence_state(states, idx) -> np.ndarray:
    states = np.asarray(states, dtype=float)
    m = states.shape[1]
    if len(idx) == 0:
        raise DomainError("empty sequence")
    vec = None
    for symbol in idx:
        if not 1 <= symbol <= m:
            raise DomainError(f"symbol {symbol} outside 1..{m}")
        col = states[:, symbol - 1]
        vec = col.copy() if vec is None else np.kron(vec, col)
    return vec


def sequence_states(states, k: int, injective: bool = False) -> np.ndarray:
    """Columns are the sequence states in canonical order."""
    states = np.asarray(states, dtype=float)
    d, m = states.shape
    la.check_size(d**k)
    if not injective:
        la.check_size(m**k)
        out = states
        for _ in range(k - 1):
            out = la.kron(out, states)
        return out
    seqs = enumerate_sequences(m, k, injective=True)
    return np.column_stack([sequence_state(states, idx) for idx in seqs])


def reciprocal_basis(states) -> np.ndarray:
    """Dual vectors ``r_i`` in the span of the states with ``<r_i|psi_j> = delta_ij``."""
    states = np.asarray(states, dtype=float)
    g = gram_of(states)
    try:
        ginv = la.inv_spd(g)
    except DomainError as exc:
        raise DomainError("states are linearly dependent (singular Gram matrix)") from exc
    return states @ ginv
