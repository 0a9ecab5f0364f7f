import numpy as np
import pytest
from scipy.stats import unitary_group

from polarschmidt.states import normalize

ACCEPTANCE_LINES = []


def haar_unitary(d, rng):
    return unitary_group.rvs(d, random_state=rng) if d > 1 else np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))


def random_hermitian(d, rng):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (z + z.conj().T) / 2


def random_matrix(rows, cols, rng):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def state_from_schmidt(weights, dl, dr, rng):
    """sum_i w_i u_i (x) v_i with Haar-random local bases; returns (state, U, V)."""
    u = haar_unitary(dl, rng)
    v = haar_unitary(dr, rng)
    k = len(weights)
    c = (u[:, :k] * np.asarray(weights)) @ v[:, :k].T
    return normalize(c.ravel(), (dl, dr)), u, v


def brute_partial_trace(amps, dims, keep):
    """Reduced density on parties ``keep`` by explicit sums over |psi><psi|."""
    n = len(dims)
    t = np.asarray(amps).reshape(dims)
    rho = np.einsum(t, list(range(n)), t.conj(), list(range(n, 2 * n)), list(range(2 * n)))
    for p in sorted(set(range(n)) - set(keep), reverse=True):
        m = rho.ndim // 2
        rho = np.trace(rho, axis1=p, axis2=p + m)
    d = int(np.prod([dims[p] for p in keep]))
    return rho.reshape(d, d)


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture
def record():
    def _record(number, ok, detail):
        ACCEPTANCE_LINES.append(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
