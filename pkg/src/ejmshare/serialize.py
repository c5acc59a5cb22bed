"""CSV/JSON rendering with 12 significant digits and byte-stable round trips."""
from __future__ import annotations

import csv
import io
import json
from typing import Any, Iterable, Sequence

SCHEMA_VERSION = 1
SIG_DIGITS = 12


def fmt_float(x: float) -> str:
    return format(float(x), f".{SIG_DIGITS}g")


def round_sig(x):
    """Round floats (recursively) to 12 significant digits for JSON output."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return float(fmt_float(x))
    if isinstance(x, dict):
        return {k: round_sig(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [round_sig(v) for v in x]
    try:
        return float(fmt_float(float(x)))
    except (TypeError, ValueError):
        return x


def render_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def parse_cell(s: str) -> Any:
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def to_csv(columns: Sequence[str], records: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in records:
        w.writerow([render_cell(r[c]) for c in columns])
    return buf.getvalue()


def from_csv(text: str) -> tuple[list[str], list[dict]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return [], []
    columns = rows[0]
    return columns, [dict(zip(columns, (parse_cell(c) for c in row))) for row in rows[1:]]


def to_json(doc: dict) -> str:
    doc = dict(doc)
    doc.setdefault("schema_version", SCHEMA_VERSION)
    return json.dumps(round_sig(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def from_json(text: str) -> dict:
    doc = json.loads(text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
    return doc


# --- record layouts -------------------------------------------------------

PAIR_TAGS = ("11", "12", "21", "22")
SWEEP_COLUMNS = ["G", "F"] + [f"{q}_{t}" for t in PAIR_TAGS for q in ("B", "Z", "bound", "violated")] \
    + ["all_violated"]


def sweep_record(row) -> dict:
    rec = {"G": float(row.G), "F": float(row.F)}
    for (n, m), rep in sorted(row.reports.items()):
        t = f"{n}{m}"
        rec[f"B_{t}"] = float(rep.B)
        rec[f"Z_{t}"] = float(rep.Z)
        rec[f"bound_{t}"] = float(rep.bound)
        rec[f"violated_{t}"] = bool(rep.violated)
    rec["all_violated"] = bool(row.all_violated)
    return rec


THRESHOLD_COLUMNS = ["theta", "theta_label", "pointer", "mode", "z_onset", "g_low", "g_high",
                     "windows", "best_G", "best_min_B"]


def threshold_record(res, label: str) -> dict:
    w = res.g_window
    return {
        "theta": float(res.theta),
        "theta_label": label,
        "pointer": res.pointer.value,
        "mode": res.mode,
        "z_onset": None if res.z_onset is None else float(res.z_onset),
        "g_low": float(w[0][0]) if w else None,
        "g_high": float(w[-1][1]) if w else None,
        "windows": len(w),
        "best_G": None if res.best_G is None else float(res.best_G),
        "best_min_B": None if res.best_min_B is None else float(res.best_min_B),
    }


DISTRIBUTION_COLUMNS = ["x1", "x2", "z1", "z2", "a1", "a2", "b", "c1", "c2", "p"]


def distribution_records(probs) -> list[dict]:
    import numpy as np

    out = []
    for idx in np.ndindex(*probs.shape):
        x1, x2, z1, z2, a1, a2, b, c1, c2 = idx
        out.append({"x1": x1 + 1, "x2": x2 + 1, "z1": z1 + 1, "z2": z2 + 1,
                    "a1": a1, "a2": a2, "b": b + 1, "c1": c1, "c2": c2,
                    "p": float(probs[idx])})
    return out
