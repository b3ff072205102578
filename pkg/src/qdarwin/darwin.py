"""Mutual information between the system and environment fragments.

A partial information plot (PIP) is the mean of I(S:F) over fragments F of
each size m, reported against f = m/N together with the standard error of
that mean. Redundancy is read off the smallest size whose information
reaches (1 - delta) H_S.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from qdarwin.errors import InputError
from qdarwin.qcore import (
    DensityOperator,
    PureState,
    State,
    entropy_bits,
    partial_trace,
    reduced_spectrum,
    state_labels,
)

MI_NEGATIVE_TOL = 1e-9
# below this H_S counts as "nothing to know"
H_S_FLOOR = 1e-12


@dataclass(frozen=True)
class Fragment:
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(set(self.labels)) != len(self.labels):
            raise InputError(f"duplicate labels in fragment: {self.labels}")

    @classmethod
    def from_indices(cls, state_or_labels, indices: Iterable[int]) -> "Fragment":
        """Fragment of environment qubits by 0-based position in the environment."""
        labels = (
            state_labels(state_or_labels)
            if isinstance(state_or_labels, (PureState, DensityOperator))
            else tuple(state_or_labels)
        )
        env = labels[1:]
        return cls(tuple(env[i] for i in sorted(indices)))

    @property
    def m(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class SamplingPolicy:
    """How fragments of each size are chosen.

    ``exhaustive`` enumerates all C(N, m) fragments when that count is at most
    ``max_enumeration`` and falls back to random sampling otherwise; ``random``
    always samples.
    """

    mode: str = "exhaustive"
    max_enumeration: int = 5000
    samples_per_size: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("exhaustive", "random"):
            raise InputError(f"sampling mode must be 'exhaustive' or 'random', got {self.mode!r}")
        if self.samples_per_size < 1:
            raise InputError("samples_per_size must be >= 1")
        if self.max_enumeration < 1:
            raise InputError("max_enumeration must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise InputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def fragments(self, n_env: int, m: int) -> list[tuple[int, ...]]:
        """Environment index tuples (sorted) evaluated at fragment size ``m``."""
        if not 0 <= m <= n_env:
            raise InputError(f"fragment size {m} outside 0..{n_env}")
        if self.mode == "exhaustive" and math.comb(n_env, m) <= self.max_enumeration:
            return list(itertools.combinations(range(n_env), m))
        # one independent stream per size keeps results independent of evaluation order
        rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(m,)))
        return [
            tuple(sorted(int(i) for i in rng.choice(n_env, size=m, replace=False)))
            for _ in range(self.samples_per_size)
        ]


@dataclass(frozen=True)
class PipCurve:
    n_env: int
    m: tuple[int, ...]
    f: tuple[float, ...]
    mean: tuple[float, ...]
    stderr: tuple[float, ...]
    n_fragments: tuple[int, ...]
    h_s: float
    # smallest I among the evaluated fragments of each size (used by strict redundancy)
    minimum: tuple[float, ...] = field(default=())

    def __post_init__(self):
        for name in ("m", "f", "mean", "stderr", "n_fragments", "minimum"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.minimum:
            object.__setattr__(self, "minimum", self.mean)
        n = len(self.m)
        if any(len(getattr(self, k)) != n for k in ("f", "mean", "stderr", "n_fragments", "minimum")):
            raise InputError("PIP columns have different lengths")
        f = np.asarray(self.f, dtype=float)
        if np.any(np.diff(f) <= 0):
            raise InputError("fragment fractions must be strictly increasing")
        mean = np.asarray(self.mean, dtype=float)
        if np.any(mean < 0) or np.any(mean > 2 * self.h_s + 1e-9):
            raise InputError("mean information outside [0, 2 H_S]")
        if n and self.m[0] == 0 and self.mean[0] != 0.0:
            raise InputError("information at m = 0 must be 0")

    def at(self, m: int) -> float:
        return self.mean[self.m.index(m)]

    def rows(self):
        return zip(self.m, self.f, self.mean, self.stderr, self.n_fragments)


@dataclass(frozen=True)
class RedundancyReport:
    delta: float
    h_s: float
    m_delta: int | None
    f_delta: float | None
    r_delta: float | None
    achieved: bool
    strict: bool = False
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "H_S": self.h_s,
            "m_delta": self.m_delta,
            "f_delta": self.f_delta,
            "R_delta": self.r_delta,
            "achieved": self.achieved,
            "strict": self.strict,
            "note": self.note,
        }


class _EntropyCache:
    """Memoized subsystem entropies of one global state, keyed by kept labels."""

    def __init__(self, state: State, method: str = "auto"):
        self.state = state
        self.method = method
        self.labels = state_labels(state)
        self._values: dict[frozenset, float] = {}

    def __call__(self, keep: Iterable[str]) -> float:
        key = frozenset(keep)
        if not key:
            return 0.0
        value = self._values.get(key)
        if value is None:
            value = entropy_bits(reduced_spectrum(self.state, key, self.method))
            self._values[key] = value
        return value


def _fragment_labels(labels: Sequence[str], fragment: Fragment | Iterable[str]) -> tuple[str, ...]:
    frag = fragment.labels if isinstance(fragment, Fragment) else tuple(fragment)
    if labels[0] in frag:
        raise InputError("a fragment cannot contain the system")
    unknown = set(frag).difference(labels[1:])
    if unknown:
        raise InputError(f"unknown environment labels: {sorted(unknown)}")
    return frag


def _clamp_information(value: float) -> float:
    if value < -MI_NEGATIVE_TOL:
        raise ArithmeticError(f"mutual information {value!r} is negative beyond round-off")
    return max(value, 0.0)


def _mi(entropy: _EntropyCache, frag: tuple[str, ...]) -> float:
    if not frag:
        return 0.0
    system = entropy.labels[0]
    value = entropy((system,)) + entropy(frag) - entropy((system,) + frag)
    return _clamp_information(value)


def mutual_information(
    state: State, fragment: Fragment | Iterable[str], method: str = "auto"
) -> float:
    """I(S:F) = H_S + H_F - H_SF in bits."""
    labels = state_labels(state)
    frag = _fragment_labels(labels, fragment)
    return _mi(_EntropyCache(state, method), frag)


def system_entropy(state: State, method: str = "auto") -> float:
    labels = state_labels(state)
    return entropy_bits(reduced_spectrum(state, (labels[0],), method))


def _summarize(values: Sequence[float]) -> tuple[float, float, float]:
    n = len(values)
    mean = math.fsum(values) / n
    if n > 1:
        var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
        stderr = math.sqrt(var / n)
    else:
        stderr = 0.0
    return mean, stderr, min(values)


def pip_curve(
    state: State,
    policy: SamplingPolicy | None = None,
    sizes: Iterable[int] | None = None,
    workers: int = 1,
    method: str = "auto",
) -> PipCurve:
    """Partial information plot of ``state`` over fragment sizes (default 0..N).

    Fragments are evaluated independently, optionally on a thread pool; the
    per-size reduction runs in fragment order, so the output does not depend
    on ``workers``.
    """
    policy = policy or SamplingPolicy()
    labels = state_labels(state)
    env = labels[1:]
    n_env = len(env)
    if n_env == 0:
        raise InputError("state has no environment")
    sizes = sorted(set(range(n_env + 1) if sizes is None else sizes))
    entropy = _EntropyCache(state, method)
    h_s = entropy((labels[0],))

    jobs = []
    for m in sizes:
        for idx in policy.fragments(n_env, m):
            jobs.append((m, tuple(env[i] for i in idx)))

    def evaluate(job):
        return _mi(entropy, job[1])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(evaluate, jobs))
    else:
        values = [evaluate(j) for j in jobs]

    per_size: dict[int, list[float]] = {m: [] for m in sizes}
    for (m, _), v in zip(jobs, values):
        per_size[m].append(v)

    means, errs, counts, mins = [], [], [], []
    for m in sizes:
        mean, err, lo = _summarize(per_size[m])
        means.append(mean)
        errs.append(err)
        counts.append(len(per_size[m]))
        mins.append(lo)
    return PipCurve(
        n_env=n_env,
        m=tuple(sizes),
        f=tuple(m / n_env for m in sizes),
        mean=tuple(means),
        stderr=tuple(errs),
        n_fragments=tuple(counts),
        h_s=h_s,
        minimum=tuple(mins),
    )


def redundancy(curve: PipCurve, delta: float, strict: bool = False) -> RedundancyReport:
    """Smallest fragment size with I >= (1 - delta) H_S, and R_delta = N / m_delta.

    The threshold is applied to the mean curve; ``strict=True`` requires every
    evaluated fragment of that size to meet it instead.
    """
    if not 0.0 < delta < 1.0:
        raise InputError(f"delta must lie in (0, 1), got {delta!r}")
    if curve.h_s <= H_S_FLOOR:
        return RedundancyReport(
            delta, curve.h_s, None, None, None, False, strict,
            note="H_S is zero: the system carries no information to record",
        )
    threshold = (1.0 - delta) * curve.h_s
    values = curve.minimum if strict else curve.mean
    for m, value in zip(curve.m, values):
        if m > 0 and value >= threshold:
            return RedundancyReport(
                delta, curve.h_s, m, m / curve.n_env, curve.n_env / m, True, strict
            )
    return RedundancyReport(
        delta, curve.h_s, None, None, None, False, strict,
        note="no evaluated fragment size reaches (1 - delta) H_S",
    )


def antisymmetry_residual(
    state: PureState, policy: SamplingPolicy | None = None, method: str = "auto"
) -> float:
    """max |I(S:F) + I(S:E minus F) - 2 H_S| over the policy's fragments.

    Only meaningful for pure global states; mixed input is refused.
    """
    if not isinstance(state, PureState):
        raise InputError("antisymmetry holds only for pure global states")
    policy = policy or SamplingPolicy()
    env = state.register.environment
    n_env = len(env)
    entropy = _EntropyCache(state, method)
    h_s = entropy((state.register.system,))
    worst = 0.0
    for m in range(n_env + 1):
        for idx in policy.fragments(n_env, m):
            chosen = set(idx)
            frag = tuple(env[i] for i in idx)
            comp = tuple(env[i] for i in range(n_env) if i not in chosen)
            worst = max(worst, abs(_mi(entropy, frag) + _mi(entropy, comp) - 2 * h_s))
    return worst


def classical_classical_check(state: State, fragment: Fragment | Iterable[str]) -> float:
    """Frobenius norm of the <0|rho_SF|1> block in the system's pointer basis.

    Zero means rho_SF has the branch-diagonal form with no system coherence
    surviving in S and F jointly.
    """
    labels = state_labels(state)
    frag = _fragment_labels(labels, fragment)
    rho = partial_trace(state, (labels[0],) + frag).matrix
    half = rho.shape[0] // 2
    return float(np.linalg.norm(rho[:half, half:]))
