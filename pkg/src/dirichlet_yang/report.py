"""Deterministic CSV and JSON writers.

Rows carry raw Python values; floats are written in their shortest
round-trip form (``repr``), so output is stable across runs and parses back
bit-exactly.  Non-finite values become the strings ``inf``, ``-inf``,
``nan`` in both formats.
"""

import csv
import io
import json
import math

REPORT_COLUMNS = ["instance_id", "inequality", "k", "lhs", "rhs", "slack",
                  "hypothesis_ok", "constants", "passed"]


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in sorted(x.items())}
    if isinstance(x, float) and not math.isfinite(x):
        return fmt(x)
    if hasattr(x, "item"):  # numpy scalar
        return _plain(x.item())
    return x


def _cell(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, dict):
        return json.dumps(_plain(x), sort_keys=True)
    return fmt(x)


def report_rows(instance_id: str, reports):
    return [[instance_id, r.name, r.k, r.lhs, r.rhs, r.slack, r.hypothesis_ok, r.constants, r.passed]
            for r in reports]


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(c) for c in row])
    return buf.getvalue()


def to_json(header, rows) -> str:
    return json.dumps([{h: _plain(v) for h, v in zip(header, row)} for row in rows], indent=1) + "\n"


def render(header, rows, fmt_name: str) -> str:
    if fmt_name == "json":
        return to_json(header, rows)
    return to_csv(header, rows)
