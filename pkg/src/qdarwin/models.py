"""Scenario states: branching states, Haar-random states, hazy environments.

Environment qubit ``k`` records the system through a rotation conditioned on
the system being in ``|1>`` (the "down" pointer state)::

    |eps_up>   = |0>
    |eps_down> = cos(theta_k)|0> + sin(theta_k)|1>,   cos(theta_k) = c_k

so the only datum that enters any entropy is the record overlap ``c_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from qdarwin.errors import CapacityError, InputError
from qdarwin.qcore import DensityOperator, PureState, QubitRegister

# environment qubits for a dense pure state (2**21 amplitudes)
DENSE_LIMIT = 20
# environment qubits for a dense mixed state (2048 x 2048 matrix)
HAZY_LIMIT = 10


@dataclass(frozen=True)
class BranchSpec:
    alpha: complex
    beta: complex
    overlaps: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        overlaps = tuple(float(c) for c in self.overlaps)
        object.__setattr__(self, "overlaps", overlaps)
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise InputError(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")
        for c in overlaps:
            if not 0.0 <= c <= 1.0 or math.isnan(c):
                raise InputError(f"record overlap {c!r} outside [0, 1]")

    @classmethod
    def uniform(cls, n_env: int, overlap: float, alpha2: float = 0.5) -> "BranchSpec":
        """Real amplitudes sqrt(alpha2), sqrt(1 - alpha2) and a common overlap."""
        if not 0.0 <= alpha2 <= 1.0:
            raise InputError(f"alpha2 = {alpha2!r} outside [0, 1]")
        return cls(math.sqrt(alpha2), math.sqrt(1.0 - alpha2), (overlap,) * n_env)

    @property
    def n_env(self) -> int:
        return len(self.overlaps)

    @property
    def p(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def register(self) -> QubitRegister:
        return QubitRegister.with_environment(self.n_env)


@dataclass(frozen=True)
class ImprintSchedule:
    tau_d: float
    times: tuple[float, ...]
    n_env: int

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        if not self.tau_d > 0:
            raise InputError(f"decoherence time must be positive, got {self.tau_d!r}")
        if any(not t >= 0 for t in self.times):
            raise InputError(f"times must be >= 0, got {self.times}")
        if self.n_env < 1:
            raise InputError("schedule needs at least one environment qubit")


@dataclass(frozen=True)
class HazySpec:
    """Per-qubit haziness: 0 is a pure |0>, 1 is maximally mixed."""

    haziness: tuple[float, ...]

    def __post_init__(self):
        h = tuple(float(x) for x in self.haziness)
        object.__setattr__(self, "haziness", h)
        for x in h:
            if not 0.0 <= x <= 1.0:
                raise InputError(f"haziness {x!r} outside [0, 1]")

    @classmethod
    def uniform(cls, n_env: int, h: float) -> "HazySpec":
        return cls((h,) * n_env)


def _record_rotation(c: float) -> np.ndarray:
    s = math.sqrt(max(0.0, 1.0 - c * c))
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _check_dense(n_env: int, limit: int, what: str) -> None:
    if n_env > limit:
        raise CapacityError(
            f"{what} with {n_env} environment qubits exceeds the dense limit of {limit}; "
            "use the analytic engine (qdarwin.analytic) for pure two-branch states"
        )


def build_branching_state(spec: BranchSpec, dense_limit: int = DENSE_LIMIT) -> PureState:
    """alpha|0>|eps_up...> + beta|1>|eps_down...> as a dense amplitude vector."""
    _check_dense(spec.n_env, dense_limit, "branching state")
    up = np.zeros(2**spec.n_env, dtype=np.complex128)
    up[0] = 1.0
    down = np.ones(1, dtype=np.complex128)
    for c in spec.overlaps:
        down = np.kron(down, [c, math.sqrt(max(0.0, 1.0 - c * c))])
    psi = np.concatenate([spec.alpha * up, spec.beta * down])
    # the overlaps are exact, but sqrt(1 - c^2) rounding can move the norm by ~1e-16 per qubit
    psi /= np.linalg.norm(psi)
    return PureState(spec.register, psi)


def haar_random_state(
    n_qubits: int, seed: int | np.random.Generator, dense_limit: int = DENSE_LIMIT
) -> PureState:
    """Unitarily invariant random pure state on ``n_qubits`` (system first).

    Real parts of all amplitudes are drawn first, then imaginary parts.
    """
    if n_qubits < 1:
        raise InputError("need at least one qubit")
    _check_dense(n_qubits - 1, dense_limit, "Haar state")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    dim = 2**n_qubits
    re = rng.standard_normal(dim)
    im = rng.standard_normal(dim)
    psi = re + 1j * im
    psi /= np.linalg.norm(psi)
    return PureState(QubitRegister.with_environment(n_qubits - 1), psi)


def imprint_overlaps(schedule: ImprintSchedule, t: float) -> tuple[float, ...]:
    """Uniform per-qubit overlap exp(-t / (N tau_D)); the product over all N is exp(-t / tau_D)."""
    if not t >= 0:
        raise InputError(f"time must be >= 0, got {t!r}")
    c = math.exp(-t / (schedule.n_env * schedule.tau_d))
    return (c,) * schedule.n_env


def branch_spec_at(
    schedule: ImprintSchedule, t: float, alpha2: float = 0.5
) -> BranchSpec:
    return BranchSpec(
        math.sqrt(alpha2), math.sqrt(1.0 - alpha2), imprint_overlaps(schedule, t)
    )


def build_hazy_environment(
    spec: BranchSpec, hazy: HazySpec, hazy_limit: int = HAZY_LIMIT
) -> DensityOperator:
    """Global operator after imprinting onto partially mixed environment qubits.

    The initial operator is the system projector times the product of
    ``(1 - h)|0><0| + h I/2``. The imprint unitary is block diagonal in the
    system's pointer basis, ``diag(I, V)`` with ``V`` the tensor product of the
    record rotations, so only the blocks need transforming.
    """
    if len(hazy.haziness) != spec.n_env:
        raise InputError(
            f"{len(hazy.haziness)} haziness values for {spec.n_env} environment qubits"
        )
    _check_dense(spec.n_env, hazy_limit, "hazy environment")

    env = np.ones((1, 1), dtype=np.complex128)
    v = np.ones((1, 1), dtype=np.complex128)
    for h, c in zip(hazy.haziness, spec.overlaps):
        env = np.kron(env, np.array([[1.0 - h / 2, 0.0], [0.0, h / 2]]))
        v = np.kron(v, _record_rotation(c))

    a, b = spec.alpha, spec.beta
    top_right = a * np.conj(b) * (env @ v.conj().T)
    rho = np.block(
        [
            [abs(a) ** 2 * env, top_right],
            [top_right.conj().T, abs(b) ** 2 * (v @ env @ v.conj().T)],
        ]
    )
    return DensityOperator(spec.register.labels, rho)
