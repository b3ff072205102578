import itertools
import math

import numpy as np
import pytest

from qdarwin.models import BranchSpec

ACCEPTANCE_LINES: list[str] = []


def brute_force_branching(alpha, beta, overlaps):
    """Amplitudes of the branching state built one basis index at a time."""
    n = len(overlaps)
    psi = np.zeros(2 ** (n + 1), dtype=complex)
    psi[0] = alpha
    for env in range(2**n):
        amp = beta
        for k, c in enumerate(overlaps):
            bit = (env >> (n - 1 - k)) & 1
            amp *= math.sqrt(1 - c * c) if bit else c
        psi[(1 << n) | env] = amp
    return psi


def brute_force_reduce(psi, n_qubits, keep):
    """rho_K[i, j] = sum over traced bits of psi[i, e] psi*[j, e], by explicit loops."""
    keep = sorted(keep)
    traced = [q for q in range(n_qubits) if q not in keep]
    dk = 2 ** len(keep)
    rho = np.zeros((dk, dk), dtype=complex)

    def index(kbits, tbits):
        x = 0
        for q, b in zip(keep, kbits):
            x |= b << (n_qubits - 1 - q)
        for q, b in zip(traced, tbits):
            x |= b << (n_qubits - 1 - q)
        return x

    for tbits in itertools.product((0, 1), repeat=len(traced)):
        for i, ibits in enumerate(itertools.product((0, 1), repeat=len(keep))):
            for j, jbits in enumerate(itertools.product((0, 1), repeat=len(keep))):
                rho[i, j] += psi[index(ibits, tbits)] * np.conj(psi[index(jbits, tbits)])
    return rho


def random_spec(rng, n_env):
    p = rng.uniform(0.05, 0.95)
    phase = np.exp(2j * np.pi * rng.uniform())
    return BranchSpec(math.sqrt(p), phase * math.sqrt(1 - p), tuple(rng.uniform(0, 1, n_env)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
