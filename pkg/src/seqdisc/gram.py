"""Gram matrices of sequence sets and their closed-form spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import corelinalg as la
from .errors import DomainError


@dataclass(frozen=True)
class SpectrumEntry:
    a: int
    b: int
    value: float
    multiplicity: int


@dataclass(frozen=True)
class GramSpectrum:
    N: int
    k: int
    s: float
    entries: tuple[SpectrumEntry, ...]

    def values(self) -> np.ndarray:
        """All eigenvalues with multiplicity, ascending."""
        out = np.concatenate([np.full(e.multiplicity, e.value) for e in self.entries])
        return np.sort(out)

    @property
    def total_multiplicity(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    @property
    def weighted_sum(self) -> float:
        return math.fsum(e.multiplicity * e.value for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "k": self.k,
            "s": self.s,
            "entries": [
                {"a": e.a, "b": e.b, "value": e.value, "multiplicity": e.multiplicity}
                for e in self.entries
            ],
        }


def _check_nk(N: int, k: int) -> None:
    if N < 2 or k < 1:
        raise DomainError("need N >= 2 and k >= 1")
    la.check_size(N**k)


def gram_single(N: int, s: float) -> np.ndarray:
    return la.uniform_offdiag(N, s)


def gram_structured(N: int, k: int, s: float) -> np.ndarray:
    """``Gamma(N,k)``: entry ``(sigma, sigma')`` is ``s`` to the Hamming distance."""
    _check_nk(N, k)
    return la.kron_power(gram_single(N, s), k)


def gram_recursive(N: int, k: int, s: float) -> np.ndarray:
    """Same matrix grown by the block recursion ``Gamma(N,l+1) = Gamma(N,1) (x) Gamma(N,l)``."""
    _check_nk(N, k)
    g = gram_single(N, s)
    for _ in range(k - 1):
        g = np.block([[g if i == j else s * g for j in range(N)] for i in range(N)])
    return g


def uniform_offdiag_eigs(n: int, r: float) -> list[tuple[float, int]]:
    """Eigenvalues of the unit-diagonal, constant off-diagonal ``n x n`` matrix."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if r == 0:
        return [(1.0, n)]
    out = []
    if n > 1:
        out.append((1.0 - r, n - 1))
    out.append((1.0 + (n - 1) * r, 1))
    return out


def structured_spectrum(N: int, k: int, s: float) -> GramSpectrum:
    """Eigenvalues ``(1-s)^a (1+(N-1)s)^b`` with ``a + b = k``.

    The multiplicity of each value is ``C(k, a) (N-1)^a``, counting the ways
    to pick which tensor factors contribute the ``N-1``-fold eigenvalue.
    At ``s = 0`` every entry collapses into one.
    """
    _check_nk(N, k)
    if s == 0:
        return GramSpectrum(N, k, s, (SpectrumEntry(k, 0, 1.0, N**k),))
    lo, hi = 1.0 - s, 1.0 + (N - 1) * s
    entries = tuple(
        SpectrumEntry(a, k - a, lo**a * hi ** (k - a), math.comb(k, a) * (N - 1) ** a)
        for a in range(k, -1, -1)
    )
    return GramSpectrum(N, k, s, entries)


@dataclass(frozen=True)
class CrosscheckReport:
    N: int
    k: int
    s: float
    tol: float
    passed: bool
    worst_deviation: float
    worst_index: int
    trace_deviation: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def spectrum_crosscheck(N: int, k: int, s: float, tol: float = 1e-9) -> CrosscheckReport:
    """Compare the closed-form spectrum with the numeric eigensolver as multisets."""
    closed = structured_spectrum(N, k, s)
    numeric = la.eigvalsh(gram_structured(N, k, s))
    expected = closed.values()
    dev = np.abs(numeric - expected)
    worst = int(np.argmax(dev))
    trace_dev = abs(closed.weighted_sum - float(N**k))
    return CrosscheckReport(
        N=N,
        k=k,
        s=s,
        tol=tol,
        passed=bool(dev[worst] <= tol and closed.total_multiplicity == N**k),
        worst_deviation=float(dev[worst]),
        worst_index=worst,
        trace_deviation=trace_dev,
    )
