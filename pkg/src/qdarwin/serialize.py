"""CSV/JSON emission with byte-stable float formatting."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from qdarwin.darwin import PipCurve
from qdarwin.errors import InputError

CSV_HEADER = ("m", "f", "I_mean_bits", "I_stderr_bits", "n_fragments")


def round_float(x: float) -> float:
    """Round to 15 significant digits; ``repr`` of the result is the shortest round-trip form."""
    x = float(x)
    if not math.isfinite(x):
        raise InputError(f"cannot serialize non-finite value {x!r}")
    y = float(f"{x:.15g}")
    return 0.0 if y == 0.0 else y


def format_float(x: float) -> str:
    return repr(round_float(x))


def curve_to_csv(curve: PipCurve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for m, f, mean, err, n in curve.rows():
        writer.writerow([m, format_float(f), format_float(mean), format_float(err), n])
    return buf.getvalue()


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != CSV_HEADER:
            raise InputError(f"unexpected CSV header {header}, expected {','.join(CSV_HEADER)}")
        rows = []
        for line in reader:
            if not line:
                continue
            m, f, mean, err, n = line
            rows.append(
                {"m": int(m), "f": float(f), "mean": float(mean), "stderr": float(err), "n": int(n)}
            )
    return rows


def curve_from_rows(rows: list[dict], h_s: float, n_env: int | None = None) -> PipCurve:
    if not rows:
        raise InputError("CSV has no data rows")
    if n_env is None:
        # f = m / N on every row with m > 0
        nonzero = [r for r in rows if r["m"] > 0]
        if not nonzero:
            raise InputError("cannot infer N from a CSV without m > 0 rows")
        n_env = round(nonzero[-1]["m"] / nonzero[-1]["f"])
    return PipCurve(
        n_env=n_env,
        m=[r["m"] for r in rows],
        f=[r["f"] for r in rows],
        mean=[r["mean"] for r in rows],
        stderr=[r["stderr"] for r in rows],
        n_fragments=[r["n"] for r in rows],
        h_s=h_s,
    )


def _rounded(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return round_float(obj)
    if isinstance(obj, dict):
        return {str(k): _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _rounded(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    return json.dumps(_rounded(obj), indent=2, sort_keys=True) + "\n"
