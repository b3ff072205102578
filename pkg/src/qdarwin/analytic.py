"""Closed-form entropies for pure two-branch states.

For alpha|0>|up_1 up_2 ...> + beta|1>|down_1 down_2 ...> every reduction that
matters is a rank-two mixture of two branch states whose overlap is a product
of per-qubit record overlaps:

* rho_S has coherence |alpha beta| gamma_all,
* rho_F is p|F_up><F_up| + q|F_down><F_down| with <F_up|F_down> = gamma_F,
* rho_SF has the same spectrum as rho of the complement, i.e. overlap gamma_comp.

A rank-two mixture with weights p, 1 - p and overlap gamma has eigenvalues
(1 +/- sqrt((2p - 1)^2 + 4p(1 - p)gamma^2)) / 2, so no dense object is
needed and environments of millions of qubits are cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from qdarwin.darwin import PipCurve, SamplingPolicy
from qdarwin.errors import InputError
from qdarwin.models import BranchSpec


def _binary_entropy(x: np.ndarray) -> np.ndarray:
    """h(x) in bits for x in [0, 1/2] (the smaller eigenvalue)."""
    x = np.asarray(x, dtype=float)
    y = 1.0 - x
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -x * np.log2(x) - y * np.log2(y)
    return np.where(x <= 0.0, 0.0, out)


def two_branch_entropy(p, gamma):
    """Entropy in bits of p|u><u| + (1-p)|v><v| with |<u|v>| = gamma.

    Vectorized over numpy inputs; returns a float for scalar input.
    """
    p_arr = np.asarray(p, dtype=float)
    g_arr = np.asarray(gamma, dtype=float)
    if np.any((p_arr < 0) | (p_arr > 1)) or np.any((g_arr < 0) | (g_arr > 1)):
        raise InputError("p and gamma must lie in [0, 1]")
    pq = p_arr * (1.0 - p_arr)
    s = np.sqrt((2.0 * p_arr - 1.0) ** 2 + 4.0 * pq * g_arr**2)
    # (1 - s)/2 written to avoid cancellation when s -> 1
    small = 2.0 * pq * (1.0 - g_arr) * (1.0 + g_arr) / (1.0 + s)
    h = _binary_entropy(small)
    return float(h) if h.ndim == 0 else h


@dataclass(frozen=True)
class TwoBranchSummary:
    p: float
    gamma_f: float
    gamma_comp: float

    def __post_init__(self):
        for name in ("p", "gamma_f", "gamma_comp"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise InputError(f"{name} = {v!r} outside [0, 1]")
            object.__setattr__(self, name, v)

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def gamma_all(self) -> float:
        return self.gamma_f * self.gamma_comp

    @classmethod
    def from_spec(cls, spec: BranchSpec, fragment: Iterable[int]) -> "TwoBranchSummary":
        """Summary for the fragment given by 0-based environment indices."""
        chosen = set(fragment)
        if any(not 0 <= i < spec.n_env for i in chosen):
            raise InputError(f"fragment indices {sorted(chosen)} outside 0..{spec.n_env - 1}")
        # math.prod of an empty sequence is 1: the empty fragment has no records
        gamma_f = math.prod(spec.overlaps[i] for i in sorted(chosen))
        gamma_comp = math.prod(c for i, c in enumerate(spec.overlaps) if i not in chosen)
        return cls(spec.p, gamma_f, gamma_comp)


def analytic_mutual_information(summary: TwoBranchSummary) -> float:
    """I(S:F) = H(p, gamma_all) + H(p, gamma_F) - H(p, gamma_comp)."""
    p = summary.p
    value = (
        two_branch_entropy(p, summary.gamma_all)
        + two_branch_entropy(p, summary.gamma_f)
        - two_branch_entropy(p, summary.gamma_comp)
    )
    return max(value, 0.0)


def _stderr(values: np.ndarray) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def analytic_pip(
    spec: BranchSpec,
    sizes: Iterable[int] | None = None,
    policy: SamplingPolicy | None = None,
) -> PipCurve:
    """PIP of a pure two-branch state without building it.

    With uniform overlaps every fragment of a given size is equivalent, so
    one evaluation per size is exact and the standard error is zero. With
    non-uniform overlaps fragments are enumerated or sampled by ``policy``.
    """
    n_env = spec.n_env
    if n_env == 0:
        raise InputError("state has no environment")
    if sizes is None:
        m = np.arange(n_env + 1, dtype=np.int64)
    else:
        m = np.array(sorted(set(sizes)), dtype=np.int64)
    if m.size and (m[0] < 0 or m[-1] > n_env):
        raise InputError(f"fragment sizes must lie in 0..{n_env}")
    p = spec.p
    overlaps = np.asarray(spec.overlaps, dtype=float)
    gamma_all = float(np.prod(overlaps))
    h_s = two_branch_entropy(p, gamma_all)

    if np.all(overlaps == overlaps[0]):
        c = overlaps[0]
        gamma_f = c ** m.astype(float)
        gamma_comp = c ** (n_env - m).astype(float)
        info = h_s + two_branch_entropy(p, gamma_f) - two_branch_entropy(p, gamma_comp)
        info = np.maximum(np.atleast_1d(info), 0.0)
        info[m == 0] = 0.0
        means = info
        mins = info
        errs = np.zeros(m.size)
        counts = np.ones(m.size, dtype=np.int64)
    else:
        policy = policy or SamplingPolicy()
        means, mins, errs, counts = [], [], [], []
        for size in m:
            vals = []
            for idx in policy.fragments(n_env, int(size)):
                mask = np.zeros(n_env, dtype=bool)
                mask[list(idx)] = True
                gf = float(np.prod(overlaps[mask]))
                gc = float(np.prod(overlaps[~mask]))
                vals.append(0.0 if size == 0 else analytic_mutual_information(
                    TwoBranchSummary(p, gf, gc)))
            vals = np.asarray(vals)
            means.append(math.fsum(vals) / len(vals))
            mins.append(float(vals.min()))
            errs.append(_stderr(vals))
            counts.append(len(vals))

    return PipCurve(
        n_env=n_env,
        m=tuple(m.tolist()),
        f=tuple((m / n_env).tolist()),
        mean=tuple(np.asarray(means, dtype=float).tolist()),
        stderr=tuple(np.asarray(errs, dtype=float).tolist()),
        n_fragments=tuple(np.asarray(counts, dtype=np.int64).tolist()),
        h_s=float(h_s),
        minimum=tuple(np.asarray(mins, dtype=float).tolist()),
    )
