"""Deterministic CSV/JSON serialization of profiles, time series, and reports.

Floats are rendered with 17 significant digits so values round-trip exactly
and identical runs produce identical bytes.
"""
from __future__ import annotations

import hashlib
import json

import numpy as np

FLOAT_FMT = "{:.17g}"


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT.format(float(v))
    if v is None:
        return ""
    s = str(v)
    if any(c in s for c in ",\"\n"):
        s = '"' + s.replace('"', '""') + '"'
    return s


def csv_lines(header, rows) -> str:
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(_fmt(v) for v in row))
    return "\n".join(out) + "\n"


def profile_csv(profile) -> str:
    rows = zip(profile.x, profile.rho, profile.u, profile.n, profile.v)
    return csv_lines(("x", "rho", "u", "n", "v"), rows)


def series_csv(reports) -> str:
    return csv_lines(("t", "e_total", "dissipation", "l2", "h1", "sup"),
                     (r.to_row() for r in reports))


def snapshot_csv(state) -> str:
    rows = ((state.time, x, r, u, n, v) for x, r, u, n, v in
            zip(state.x, state.rho, state.u, state.n, state.v))
    return csv_lines(("t", "x", "rho", "u", "n", "v"), rows)


def sweep_csv(result) -> str:
    rows = ((r.delta, r.ux0, r.vx0, r.error or "") for r in result.rows)
    return csv_lines(("delta", "ux0", "vx0", "errors"), rows)


def canonical_json(obj) -> str:
    """Stable rendering: sorted keys, no whitespace variance, \\n terminated."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      allow_nan=True) + "\n"


def config_hash(doc: dict) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def report_json(payload: dict, doc: dict | None = None) -> str:
    body = dict(payload)
    if doc is not None:
        body["config_sha256"] = config_hash(doc)
    return canonical_json(body)
