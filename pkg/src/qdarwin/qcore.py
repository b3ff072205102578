"""Dense qubit states, reduced density operators and von Neumann entropy.

Amplitudes are stored big-endian in register order: the system qubit is
label position 0 and the most significant bit of the basis index.
Entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from qdarwin.errors import InputError

SYSTEM_LABEL = "S"

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
NEGATIVE_EIG_TOL = 1e-10


@dataclass(frozen=True)
class QubitRegister:
    """Ordered qubit labels; position 0 is the system."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise InputError("register needs at least the system qubit")
        if len(set(labels)) != len(labels):
            raise InputError(f"duplicate labels in register: {labels}")

    @classmethod
    def with_environment(cls, n_env: int) -> "QubitRegister":
        """System ``S`` followed by environment qubits ``E1`` .. ``E{n_env}``."""
        if n_env < 0:
            raise InputError(f"environment size must be >= 0, got {n_env}")
        return cls((SYSTEM_LABEL,) + tuple(f"E{k}" for k in range(1, n_env + 1)))

    @property
    def system(self) -> str:
        return self.labels[0]

    @property
    def environment(self) -> tuple[str, ...]:
        return self.labels[1:]

    @property
    def n_env(self) -> int:
        return len(self.labels) - 1

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return 2 ** len(self.labels)

    def __len__(self):
        return len(self.labels)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    register: QubitRegister
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != self.register.dim:
            raise InputError(
                f"{amps.size} amplitudes for a {self.register.n_qubits}-qubit register"
            )
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InputError(f"state is not normalized (|psi|^2 = {norm2!r})")
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @property
    def labels(self) -> tuple[str, ...]:
        return self.register.labels

    def projector(self) -> "DensityOperator":
        psi = self.amplitudes
        return DensityOperator(self.labels, np.outer(psi, psi.conj()))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Density matrix over an ordered subset of register labels.

    Construction checks Hermiticity, unit trace and positivity. Positivity is
    tested with a Cholesky factorization of ``rho + tol * I``, which is much
    cheaper than a full eigendecomposition for the larger hazy states.
    """

    labels: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise InputError(f"duplicate labels: {labels}")
        m = np.array(self.matrix, dtype=np.complex128)
        dim = 2 ** len(labels)
        if m.shape != (dim, dim):
            raise InputError(f"matrix shape {m.shape} does not match {len(labels)} qubits")
        _check_hermitian(m)
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InputError(f"trace {tr!r} is not 1")
        try:
            np.linalg.cholesky(m + NEGATIVE_EIG_TOL * np.eye(dim))
        except np.linalg.LinAlgError:
            raise InputError("operator has eigenvalues below -1e-10") from None
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


State = Union[PureState, DensityOperator]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues sorted in descending order, optionally with eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    def __iter__(self):
        return iter(self.eigenvalues)

    def __len__(self):
        return len(self.eigenvalues)


def _check_hermitian(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > HERMITIAN_TOL:
        raise InputError(f"matrix is not Hermitian (max deviation {dev:.3g})")


def state_labels(state: State) -> tuple[str, ...]:
    if isinstance(state, PureState):
        return state.register.labels
    if isinstance(state, DensityOperator):
        return state.labels
    raise InputError(f"expected PureState or DensityOperator, got {type(state).__name__}")


def _split_axes(labels: Sequence[str], keep: Iterable[str]) -> tuple[list[int], list[int]]:
    keep = set(keep)
    if not keep:
        raise InputError("keep set is empty")
    unknown = keep.difference(labels)
    if unknown:
        raise InputError(f"unknown labels: {sorted(unknown)}")
    kept = [i for i, lab in enumerate(labels) if lab in keep]
    traced = [i for i, lab in enumerate(labels) if lab not in keep]
    return kept, traced


def _bipartite_matrix(psi: np.ndarray, n: int, kept: list[int], traced: list[int]) -> np.ndarray:
    """Amplitudes as a (dim_kept, dim_traced) matrix."""
    t = psi.reshape((2,) * n)
    if kept + traced != list(range(n)):
        t = t.transpose(kept + traced)
    return t.reshape(2 ** len(kept), 2 ** len(traced))


def partial_trace(state: State, keep: Iterable[str]) -> DensityOperator:
    """Reduced operator on ``keep``, ordered as in the input's labels."""
    labels = state_labels(state)
    kept, traced = _split_axes(labels, keep)
    kept_labels = tuple(labels[i] for i in kept)
    n = len(labels)

    if isinstance(state, PureState):
        m = _bipartite_matrix(state.amplitudes, n, kept, traced)
        return DensityOperator(kept_labels, m @ m.conj().T)

    if not traced:
        return state
    dk, dt = 2 ** len(kept), 2 ** len(traced)
    t = state.matrix.reshape((2,) * (2 * n))
    perm = kept + traced + [n + i for i in kept] + [n + i for i in traced]
    t = t.transpose(perm).reshape(dk, dt, dk, dt)
    return DensityOperator(kept_labels, np.einsum("ijkj->ik", t))


def _clamp_eigenvalues(evals: np.ndarray) -> np.ndarray:
    if evals.size and evals.min() < -NEGATIVE_EIG_TOL:
        raise InputError(f"eigenvalue {evals.min():.3g} is below -1e-10")
    return np.clip(evals, 0.0, 1.0)


def hermitian_spectrum(rho: DensityOperator | np.ndarray, vectors: bool = False) -> Spectrum:
    """Eigendecomposition of a density operator, eigenvalues descending.

    Raw arrays are accepted and checked for Hermiticity; the clamp to [0, 1]
    is applied after the -1e-10 negativity check.
    """
    if isinstance(rho, DensityOperator):
        m = rho.matrix
    else:
        m = np.asarray(rho, dtype=np.complex128)
        _check_hermitian(m)
    if vectors:
        w, v = np.linalg.eigh(m)
        order = np.argsort(w)[::-1]
        return Spectrum(_clamp_eigenvalues(w[order]), v[:, order])
    w = np.linalg.eigvalsh(m)[::-1]
    return Spectrum(_clamp_eigenvalues(w))


def entropy_bits(eigenvalues: Iterable[float]) -> float:
    """Shannon entropy in bits of a probability vector, with 0 lg 0 = 0."""
    p = np.asarray(eigenvalues, dtype=float)
    p = p[p > 0.0]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho: DensityOperator | np.ndarray) -> float:
    """H = -Tr rho lg rho, in bits."""
    return entropy_bits(hermitian_spectrum(rho).eigenvalues)


def reduced_spectrum(state: State, keep: Iterable[str], method: str = "auto") -> np.ndarray:
    """Eigenvalues (descending) of the reduction of ``state`` onto ``keep``.

    For pure states ``method="auto"`` diagonalizes the smaller of the two Gram
    matrices of the bipartite amplitude matrix; both share their nonzero
    spectrum, so padding with zeros gives the reduced spectrum exactly.
    ``method="direct"`` always forms the reduced operator on ``keep``.
    """
    if method not in ("auto", "direct"):
        raise InputError(f"unknown spectrum method {method!r}")
    if isinstance(state, DensityOperator) or method == "direct":
        return hermitian_spectrum(partial_trace(state, keep)).eigenvalues

    labels = state_labels(state)
    kept, traced = _split_axes(labels, keep)
    m = _bipartite_matrix(state.amplitudes, len(labels), kept, traced)
    dk, dt = m.shape
    if dk <= dt:
        w = np.linalg.eigvalsh(m @ m.conj().T)[::-1]
    else:
        w = np.zeros(dk)
        w[:dt] = np.linalg.eigvalsh(m.conj().T @ m)[::-1]
    return _clamp_eigenvalues(w)


def subsystem_entropy(state: State, keep: Iterable[str], method: str = "auto") -> float:
    return entropy_bits(reduced_spectrum(state, keep, method))


def embed_product(
    states: Sequence[np.ndarray], register: QubitRegister | None = None
) -> State:
    """Tensor product of single-qubit states in register order.

    Each entry is a length-2 amplitude vector or a 2x2 density matrix. The
    result is a PureState when every entry is a vector.
    """
    if register is None:
        register = QubitRegister.with_environment(len(states) - 1)
    if len(states) != register.n_qubits:
        raise InputError(f"{len(states)} factors for a {register.n_qubits}-qubit register")
    arrays = [np.asarray(s, dtype=np.complex128) for s in states]
    for a in arrays:
        if a.shape not in ((2,), (2, 2)):
            raise InputError(f"single-qubit factor has shape {a.shape}")

    if all(a.ndim == 1 for a in arrays):
        psi = np.ones(1, dtype=np.complex128)
        for a in arrays:
            psi = np.kron(psi, a)
        return PureState(register, psi)

    rho = np.ones((1, 1), dtype=np.complex128)
    for a in arrays:
        rho = np.kron(rho, np.outer(a, a.conj()) if a.ndim == 1 else a)
    return DensityOperator(register.labels, rho)
