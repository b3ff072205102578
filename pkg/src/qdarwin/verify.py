"""Built-in verification suites: exact identities, analytic-vs-dense oracle, Haar statistics.

Each check returns a plain dict so the CLI can emit it as JSON unchanged.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from qdarwin import analytic, darwin, models, qcore
from qdarwin.errors import InputError

SUITES = ("identities", "oracle", "statistics", "all")


def _check(name, residual, tolerance, **detail):
    return {
        "name": name,
        "passed": bool(residual <= tolerance),
        "residual": float(residual),
        "tolerance": float(tolerance),
        **detail,
    }


def _random_spec(rng: np.random.Generator, n_env: int) -> models.BranchSpec:
    p = rng.uniform(0.05, 0.95)
    phase = np.exp(2j * np.pi * rng.uniform())
    return models.BranchSpec(math.sqrt(p), phase * math.sqrt(1 - p), tuple(rng.uniform(0, 1, n_env)))


def _pure_samples(seed: int):
    rng = np.random.default_rng(seed)
    for k in range(3):
        yield f"haar[{k}]", models.haar_random_state(7, rng)
    for k in range(3):
        yield f"branching[{k}]", models.build_branching_state(_random_spec(rng, 6))


def identities(seed: int = 0) -> list[dict]:
    checks = []
    policy = darwin.SamplingPolicy()

    worst_anti = worst_end = worst_mid = worst_mono = 0.0
    for _, state in _pure_samples(seed):
        worst_anti = max(worst_anti, darwin.antisymmetry_residual(state, policy))
        curve = darwin.pip_curve(state, policy)
        worst_end = max(worst_end, abs(curve.mean[-1] - 2 * curve.h_s))
        n_env = curve.n_env
        if n_env % 2 == 0:
            worst_mid = max(worst_mid, abs(curve.at(n_env // 2) - curve.h_s))
        # I(S:F') <= I(S:F) whenever F' is F with one qubit removed
        env = state.register.environment
        info = {
            frag: darwin.mutual_information(state, frag)
            for m in range(n_env + 1)
            for frag in itertools.combinations(env, m)
        }
        for frag, value in info.items():
            for i in range(len(frag)):
                smaller = frag[:i] + frag[i + 1:]
                worst_mono = max(worst_mono, info[smaller] - value)
    checks.append(_check("antisymmetry", worst_anti, 1e-9))
    checks.append(_check("endpoint_2H_S", worst_end, 1e-9))
    checks.append(_check("midpoint_H_S", worst_mid, 1e-9))
    checks.append(_check("monotonicity", max(worst_mono, 0.0), 1e-9))

    rng = np.random.default_rng(seed + 1)
    state = models.haar_random_state(6, rng)
    labels = state.register.labels
    worst_comp = 0.0
    for m in range(1, len(labels)):
        for keep in itertools.combinations(labels, m):
            rest = [x for x in labels if x not in keep]
            a = qcore.von_neumann_entropy(qcore.partial_trace(state, keep))
            b = qcore.von_neumann_entropy(qcore.partial_trace(state, rest))
            worst_comp = max(worst_comp, abs(a - b))
    checks.append(_check("complementarity", worst_comp, 1e-9))
    checks.append(_check("pure_entropy_zero", qcore.von_neumann_entropy(state.projector()), 1e-9))

    rho = state.projector()
    step = qcore.partial_trace(qcore.partial_trace(rho, labels[:4]), labels[:2])
    direct = qcore.partial_trace(rho, labels[:2])
    checks.append(
        _check("partial_trace_composition", np.max(np.abs(step.matrix - direct.matrix)), 1e-10)
    )
    return checks


def oracle(seed: int = 0, n_specs: int = 20, max_env: int = 8) -> list[dict]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    n_fragments = 0
    for _ in range(n_specs):
        n_env = int(rng.integers(1, max_env + 1))
        spec = _random_spec(rng, n_env)
        state = models.build_branching_state(spec)
        env = state.register.environment
        for m in range(n_env + 1):
            for idx in itertools.combinations(range(n_env), m):
                dense = darwin.mutual_information(state, [env[i] for i in idx])
                exact = analytic.analytic_mutual_information(
                    analytic.TwoBranchSummary.from_spec(spec, idx)
                )
                worst = max(worst, abs(dense - exact))
                n_fragments += 1
    checks = [_check("analytic_vs_dense_mi", worst, 1e-9, fragments=n_fragments)]

    worst_spec = 0.0
    for _ in range(200):
        p, gamma = rng.uniform(), rng.uniform()
        u = np.array([1.0, 0.0])
        v = np.array([gamma, math.sqrt(1 - gamma**2)])
        rho = p * np.outer(u, u) + (1 - p) * np.outer(v, v)
        dense = qcore.hermitian_spectrum(rho).eigenvalues
        s = math.sqrt((2 * p - 1) ** 2 + 4 * p * (1 - p) * gamma**2)
        worst_spec = max(worst_spec, float(np.max(np.abs(dense - [(1 + s) / 2, (1 - s) / 2]))))
    checks.append(_check("two_branch_spectrum", worst_spec, 1e-9))

    worst_prod = 0.0
    for n_env in (1, 4, 16, 1000):
        for t in (0.0, 0.25, 1.0, 10.0):
            sched = models.ImprintSchedule(1.0, (t,), n_env)
            prod = math.prod(models.imprint_overlaps(sched, t))
            worst_prod = max(worst_prod, abs(prod - math.exp(-t)))
    checks.append(_check("imprint_product_rule", worst_prod, 1e-12))
    return checks


def haar_mean_purity(n_qubits: int = 6, samples: int = 1000, seed: int = 0) -> dict:
    """Mean purity of the system qubit's reduction against (dA + dB)/(dA dB + 1)."""
    rng = np.random.default_rng(seed)
    purities = np.empty(samples)
    for k in range(samples):
        rho = qcore.partial_trace(models.haar_random_state(n_qubits, rng), ["S"]).matrix
        purities[k] = float(np.real(np.trace(rho @ rho)))
    d_a, d_b = 2, 2 ** (n_qubits - 1)
    expected = (d_a + d_b) / (d_a * d_b + 1)
    mean = float(purities.mean())
    se = float(purities.std(ddof=1) / math.sqrt(samples))
    return {"mean": mean, "expected": expected, "stderr": se, "z": abs(mean - expected) / se}


def statistics(seed: int = 0) -> list[dict]:
    r = haar_mean_purity(seed=seed)
    return [_check("haar_mean_purity", abs(r["mean"] - r["expected"]), 3 * r["stderr"], **r)]


def run_suite(name: str, seed: int = 0) -> dict:
    if name not in SUITES:
        raise InputError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    runners = {"identities": identities, "oracle": oracle, "statistics": statistics}
    selected = list(runners) if name == "all" else [name]
    checks = []
    for suite in selected:
        for check in runners[suite](seed=seed):
            checks.append({"suite": suite, **check})
    return {
        "suite": name,
        "seed": seed,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }
