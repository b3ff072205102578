"""Command-line harness.

    qdarwin pip --model branching --n 12 --alpha2 0.5 --overlap 0 --delta 0.1
    qdarwin pip --model haar --n 12 --seed 7 --out haar.csv
    qdarwin pip --model schedule --n 16 --t 0.25,1,3,10 --tau-d 1 --delta 0.1
    qdarwin pip --model hazy --n 6 --overlap 0 --haziness 0.5
    qdarwin redundancy haar.csv --delta 0.1,0.2
    qdarwin verify all

Exit codes: 0 success, 1 input error, 2 capacity error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from qdarwin import analytic, darwin, models, verify
from qdarwin.errors import CapacityError, InputError
from qdarwin.serialize import (
    curve_from_rows,
    curve_to_csv,
    dumps_json,
    format_float,
    read_csv,
)

MODELS = ("branching", "haar", "hazy", "schedule")
ENGINES = ("auto", "dense", "analytic")
# largest environment for which "auto" runs a dense PIP of a two-branch state;
# every fragment costs a Gram product on a 2**(N+1) amplitude vector
DENSE_PIP_LIMIT = 12

EXIT_OK, EXIT_INPUT, EXIT_CAPACITY, EXIT_VERIFY = 0, 1, 2, 3


@dataclass
class Scenario:
    model: str
    n: int
    alpha2: float = 0.5
    overlap: tuple[float, ...] | None = None
    t: tuple[float, ...] = ()
    tau_d: float = 1.0
    haziness: tuple[float, ...] = (0.0,)
    delta: tuple[float, ...] = (0.1,)
    mode: str = "exhaustive"
    max_enumeration: int = 5000
    samples_per_size: int = 64
    seed: int = 0
    engine: str = "auto"
    dense_limit: int = DENSE_PIP_LIMIT
    strict: bool = False
    out: str | None = None
    summary: str | None = None
    # not part of the echoed scenario: output must not depend on it
    workers: int = field(default=1, compare=False)

    def __post_init__(self):
        if self.model not in MODELS:
            raise InputError(f"model must be one of {', '.join(MODELS)}, got {self.model!r}")
        if self.engine not in ENGINES:
            raise InputError(f"engine must be one of {', '.join(ENGINES)}, got {self.engine!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise InputError(f"--n must be a positive integer, got {self.n!r}")
        if not 0.0 <= self.alpha2 <= 1.0:
            raise InputError(f"--alpha2 must lie in [0, 1], got {self.alpha2!r}")
        if self.overlap is not None and len(self.overlap) not in (1, self.n):
            raise InputError(f"--overlap needs 1 or {self.n} values, got {len(self.overlap)}")
        if len(self.haziness) not in (1, self.n):
            raise InputError(f"--haziness needs 1 or {self.n} values, got {len(self.haziness)}")
        if self.model in ("branching", "hazy") and self.overlap is None:
            raise InputError(f"model {self.model!r} needs --overlap")
        if self.model == "schedule" and not self.t:
            raise InputError("model 'schedule' needs --t")
        if self.workers < 1:
            raise InputError("--workers must be >= 1")
        for d in self.delta:
            if not 0.0 < d < 1.0:
                raise InputError(f"delta must lie in (0, 1), got {d!r}")
        self.policy()  # validates sampling fields and seed

    @classmethod
    def from_mapping(cls, data: dict) -> "Scenario":
        data = dict(data)
        data.update(data.pop("sampling", {}) or {})
        data = {k.replace("-", "_"): v for k, v in data.items()}
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise InputError(f"unknown scenario keys: {sorted(unknown)}")
        for key in ("overlap", "t", "haziness", "delta"):
            if key in data and data[key] is not None:
                data[key] = _as_tuple(data[key])
        missing = {"model", "n"} - set(data)
        if missing:
            raise InputError(f"scenario is missing {sorted(missing)}")
        return cls(**data)

    def policy(self) -> darwin.SamplingPolicy:
        return darwin.SamplingPolicy(
            self.mode, self.max_enumeration, self.samples_per_size, self.seed
        )

    def echo(self) -> dict:
        d = dataclasses.asdict(self)
        for key in ("workers", "out", "summary"):
            d.pop(key)
        if self.model != "schedule":
            d.pop("t")
            d.pop("tau_d")
        if self.model != "hazy":
            d.pop("haziness")
        if self.model == "haar":
            d.pop("alpha2")
            d.pop("overlap")
        return d

    def _overlaps(self) -> tuple[float, ...]:
        return self.overlap * self.n if len(self.overlap) == 1 else self.overlap

    def branch_specs(self) -> list[tuple[float | None, models.BranchSpec]]:
        """Labelled two-branch specs: one per time for schedules, one otherwise."""
        if self.model == "schedule":
            sched = models.ImprintSchedule(self.tau_d, self.t, self.n)
            return [(t, models.branch_spec_at(sched, t, self.alpha2)) for t in sched.times]
        spec = models.BranchSpec(
            self.alpha2**0.5, (1.0 - self.alpha2) ** 0.5, self._overlaps()
        )
        return [(None, spec)]

    def resolve_engine(self) -> str:
        if self.model in ("haar", "hazy"):
            if self.engine == "analytic":
                raise InputError(f"the analytic engine covers pure two-branch states, not {self.model!r}")
            return "dense"
        if self.engine == "auto":
            return "analytic" if self.n > self.dense_limit else "dense"
        return self.engine


def _as_tuple(value) -> tuple[float, ...]:
    if isinstance(value, (int, float)):
        return (float(value),)
    if isinstance(value, str):
        return _float_list(value)
    return tuple(float(v) for v in value)


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _curve_path(out: str, t: float | None, n_curves: int) -> str:
    if n_curves == 1:
        return out
    p = Path(out)
    return str(p.with_name(f"{p.stem}_t{format_float(t)}{p.suffix}"))


def compute_curves(scenario: Scenario) -> tuple[str, list[tuple[float | None, darwin.PipCurve]]]:
    engine = scenario.resolve_engine()
    policy = scenario.policy()
    curves = []
    if scenario.model == "haar":
        state = models.haar_random_state(scenario.n + 1, scenario.seed)
        curves.append((None, darwin.pip_curve(state, policy, workers=scenario.workers)))
    elif scenario.model == "hazy":
        (_, spec), = scenario.branch_specs()
        haze = scenario.haziness * scenario.n if len(scenario.haziness) == 1 else scenario.haziness
        rho = models.build_hazy_environment(spec, models.HazySpec(haze))
        curves.append((None, darwin.pip_curve(rho, policy, workers=scenario.workers)))
    else:
        for label, spec in scenario.branch_specs():
            if engine == "analytic":
                curve = analytic.analytic_pip(spec, policy=policy)
            else:
                state = models.build_branching_state(spec)
                curve = darwin.pip_curve(state, policy, workers=scenario.workers)
            curves.append((label, curve))
    return engine, curves


def run_pip(scenario: Scenario) -> tuple[list[tuple[str | None, str]], dict]:
    """Compute the scenario's curves; return (csv path or None, csv text) pairs and the summary."""
    engine, curves = compute_curves(scenario)
    outputs = []
    entries = []
    for label, curve in curves:
        path = _curve_path(scenario.out, label, len(curves)) if scenario.out else None
        outputs.append((path, curve_to_csv(curve)))
        entries.append(
            {
                "t": label,
                "csv": path,
                "H_S": curve.h_s,
                "redundancy": [
                    darwin.redundancy(curve, d, scenario.strict).to_dict() for d in scenario.delta
                ],
            }
        )
    summary = {
        "model": scenario.model,
        "scenario": scenario.echo(),
        "seed": scenario.seed,
        "engine": engine,
        "curves": entries,
    }
    if len(entries) == 1:
        summary["H_S"] = entries[0]["H_S"]
        summary["redundancy"] = entries[0]["redundancy"]
    return outputs, summary


def _summary_path(scenario: Scenario) -> str | None:
    if scenario.summary:
        return scenario.summary
    if scenario.out:
        return scenario.out + ".json"
    return None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdarwin", description="Partial information plots and redundancy of environmental records.")
    sub = parser.add_subparsers(dest="command", required=True)

    pip = sub.add_parser("pip", help="compute a partial information plot")
    pip.add_argument("--config", help="JSON scenario file; flags override its values")
    pip.add_argument("--model", choices=MODELS)
    pip.add_argument("--n", type=int, help="number of environment qubits")
    pip.add_argument("--alpha2", type=float, help="|alpha|^2 of the system state (default 0.5)")
    pip.add_argument("--overlap", type=_float_list, help="record overlap c, or one value per qubit")
    pip.add_argument("--t", type=_float_list, help="comma-separated times for --model schedule")
    pip.add_argument("--tau-d", dest="tau_d", type=float, help="decoherence time (default 1)")
    pip.add_argument("--haziness", type=_float_list, help="environment haziness h, or one per qubit")
    pip.add_argument("--delta", type=_float_list, help="information deficits (default 0.1)")
    pip.add_argument("--mode", choices=("exhaustive", "random"))
    pip.add_argument("--max-enumeration", dest="max_enumeration", type=int)
    pip.add_argument("--samples-per-size", dest="samples_per_size", type=int)
    pip.add_argument("--seed", type=_seed, help="64-bit unsigned seed (default 0)")
    pip.add_argument("--engine", choices=ENGINES)
    pip.add_argument("--dense-limit", dest="dense_limit", type=int,
                     help=f"'auto' uses the analytic engine above this N (default {DENSE_PIP_LIMIT})")
    pip.add_argument("--strict", action="store_true", default=None,
                     help="require every fragment of size m_delta to meet the threshold")
    pip.add_argument("--workers", type=int, help="threads for fragment evaluation")
    pip.add_argument("--out", help="CSV path (default stdout); the summary goes to <out>.json")
    pip.add_argument("--summary", help="summary JSON path (default <out>.json, or stderr)")

    red = sub.add_parser("redundancy", help="recompute R_delta from an existing PIP CSV")
    red.add_argument("csv")
    red.add_argument("--delta", type=_float_list, default=(0.1,))
    red.add_argument("--hs", type=float, help="H_S in bits (default: read from the summary JSON)")
    red.add_argument("--summary", help="summary JSON written by 'pip' (default <csv>.json)")

    ver = sub.add_parser("verify", help="run a built-in verification suite")
    ver.add_argument("suite", choices=verify.SUITES)
    ver.add_argument("--seed", type=_seed, default=0)
    ver.add_argument("--out", help="write the JSON report here instead of stdout")
    return parser


def _scenario_from_args(args) -> Scenario:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise InputError("config must be a JSON object")
    for key in ("model", "n", "alpha2", "overlap", "t", "tau_d", "haziness", "delta", "mode",
                "max_enumeration", "samples_per_size", "seed", "engine", "dense_limit", "strict", "workers",
                "out", "summary"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    return Scenario.from_mapping(data)


def _cmd_pip(args) -> int:
    scenario = _scenario_from_args(args)
    outputs, summary = run_pip(scenario)
    if scenario.out:
        for path, text in outputs:
            Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write("\n".join(text for _, text in outputs))
    summary_text = dumps_json(summary)
    target = _summary_path(scenario)
    if target:
        Path(target).write_text(summary_text, encoding="utf-8")
    else:
        sys.stderr.write(summary_text)
    return EXIT_OK


def _lookup_h_s(csv_path: str, summary_path: str | None) -> float:
    """H_S for a CSV written by ``pip``, read from its summary JSON.

    Without an explicit path, ``<csv>.json`` is tried first, then any JSON in
    the same directory whose curve list names this CSV (multi-time runs share
    one summary).
    """
    csv_file = Path(csv_path)
    if summary_path:
        candidates = [Path(summary_path)]
    else:
        candidates = [Path(csv_path + ".json")] + sorted(csv_file.parent.glob("*.json"))
    for path in candidates:
        if not path.is_file():
            continue
        try:
            summary = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            continue
        if not isinstance(summary, dict):
            continue
        for entry in summary.get("curves", []):
            if entry.get("csv") and Path(entry["csv"]).name == csv_file.name:
                return float(entry["H_S"])
        if path.name == csv_file.name + ".json" and "H_S" in summary:
            return float(summary["H_S"])
    raise InputError(f"no summary with H_S found for {csv_path}; pass --hs or --summary")


def _cmd_redundancy(args) -> int:
    try:
        rows = read_csv(args.csv)
    except OSError as exc:
        raise InputError(f"cannot read {args.csv}: {exc}") from None
    h_s = args.hs if args.hs is not None else _lookup_h_s(args.csv, args.summary)
    curve = curve_from_rows(rows, h_s)
    reports = [darwin.redundancy(curve, d).to_dict() for d in args.delta]
    sys.stdout.write(dumps_json({"csv": args.csv, "H_S": h_s, "redundancy": reports}))
    return EXIT_OK


def _cmd_verify(args) -> int:
    report = verify.run_suite(args.suite, seed=args.seed)
    text = dumps_json(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"pip": _cmd_pip, "redundancy": _cmd_redundancy, "verify": _cmd_verify}
    try:
        return handlers[args.command](args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InputError, TypeError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
