import numpy as np
import pytest


def window_grid(N: int, points: int = 9, margin: float = 1e-3) -> list[float]:
    lo = -1.0 / (N - 1)
    return [float(x) for x in np.linspace(lo + margin, 1.0 - margin, points)]


ACCEPTANCE_GRID = [(N, k, s) for N in (2, 3, 4) for k in (1, 2, 3) for s in window_grid(N)]


def lam(n: int, r: float) -> np.ndarray:
    """Unit diagonal, every off-diagonal entry r; built independently of the package."""
    return (1.0 - r) * np.eye(n) + r * np.ones((n, n))


def gram_oracle(N: int, k: int, s: float) -> np.ndarray:
    """Gram matrix of sequences by the product rule, entry by entry."""
    seqs = np.array(np.unravel_index(np.arange(N**k), (N,) * k)).T
    diff = (seqs[:, None, :] != seqs[None, :, :]).sum(axis=2)
    return s**diff


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion; printed in the terminal summary."""

    def record(label: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
