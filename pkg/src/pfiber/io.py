"""Tabular output and the StateVector file format.

Tables are written as CSV (``%.17g`` floats, mandatory header, ``\\n`` line
ends) or JSON. Every file starts with the resolved run configuration: a
``# config: {...}`` comment line in CSV, a ``"config"`` member in JSON.

A StateVector file is CSV with columns ``kx,ky,kz,weight,lambda,re,im``.
Rows with ``lambda = 1`` and ``lambda = 2`` list the same nodes in the same
order. The vacuum amplitude is stored as a single row with ``lambda = 0``,
``k = 0`` and ``weight = 1``.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from pfiber.errors import ContractError
from pfiber.grid import QuadratureGrid, StateVector

STATE_COLUMNS = ("kx", "ky", "kz", "weight", "lambda", "re", "im")


def format_value(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def config_line(config):
    return "# config: " + json.dumps(config, sort_keys=True)


def render_csv(columns, rows, config, comments=()):
    buf = io.StringIO()
    buf.write(config_line(config) + "\n")
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def render_json(columns, rows, config, extra=None):
    doc = {"config": config,
           "columns": list(columns),
           "rows": [{c: _json_value(row.get(c)) for c in columns} for row in rows]}
    if extra:
        doc.update({k: _json_value(v) for k, v in extra.items()})
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def read_config_line(text):
    """Config dict from the first line of a file written by :func:`render_csv`."""
    first = text.split("\n", 1)[0]
    if not first.startswith("# config: "):
        raise ContractError("missing '# config:' header line")
    return json.loads(first[len("# config: "):])


def state_rows(f: StateVector):
    yield (0.0, 0.0, 0.0, 1.0, 0, f.f0.real, f.f0.imag)
    for lam in (1, 2):
        vals = f.f1[lam - 1]
        for k, w, v in zip(f.grid.nodes, f.grid.weights, vals):
            yield (k[0], k[1], k[2], w, lam, v.real, v.imag)


def render_state(f: StateVector, config=None, comments=()):
    buf = io.StringIO()
    if config is not None:
        buf.write(config_line(config) + "\n")
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(STATE_COLUMNS)
    for row in state_rows(f):
        w.writerow([format_value(int(x)) if i == 4 else format_value(float(x))
                    for i, x in enumerate(row)])
    return buf.getvalue()


def write_state(path, f: StateVector, config=None, comments=()):
    with open(path, "w", newline="\n") as fh:
        fh.write(render_state(f, config, comments))


def parse_state(text, axis=None, R=None):
    """Parse a StateVector file. Raises :class:`ContractError` with a line number on bad input.

    The returned grid has ``counts = (M,)``; ``axis`` defaults to NaN
    (unknown), which makes the resolvent use its general 3x3 solve.
    """
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines())
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ContractError("state file is empty")
    lineno, header = lines[0]
    cols = [c.strip() for c in header.split(",")]
    if tuple(cols) != STATE_COLUMNS:
        raise ContractError(f"line {lineno}: expected header {','.join(STATE_COLUMNS)}, got {header!r}")
    f0 = None
    per_lam = {1: [], 2: []}
    for lineno, ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(STATE_COLUMNS):
            raise ContractError(f"line {lineno}: expected {len(STATE_COLUMNS)} fields, got {len(parts)}")
        try:
            kx, ky, kz, w = (float(x) for x in parts[:4])
            lam = int(parts[4])
            re, im = float(parts[5]), float(parts[6])
        except ValueError as exc:
            raise ContractError(f"line {lineno}: {exc}") from None
        vals = (kx, ky, kz, w, re, im)
        if not all(math.isfinite(v) for v in vals):
            raise ContractError(f"line {lineno}: non-finite value")
        if lam == 0:
            if f0 is not None:
                raise ContractError(f"line {lineno}: second lambda=0 row")
            f0 = complex(re, im)
        elif lam in (1, 2):
            if w <= 0:
                raise ContractError(f"line {lineno}: weight must be positive")
            if kx == ky == kz == 0.0:
                raise ContractError(f"line {lineno}: node at k = 0")
            per_lam[lam].append((kx, ky, kz, w, complex(re, im)))
        else:
            raise ContractError(f"line {lineno}: lambda must be 0, 1 or 2, got {lam}")
    if f0 is None:
        raise ContractError("missing lambda=0 row (vacuum amplitude)")
    a1, a2 = (np.array([r[:4] for r in per_lam[lam]]).reshape(-1, 4) for lam in (1, 2))
    if a1.shape[0] == 0:
        raise ContractError("no photon rows")
    if a1.shape != a2.shape or not np.array_equal(a1, a2):
        raise ContractError("lambda=1 and lambda=2 rows must list the same nodes and weights in the same order")
    nodes, weights = a1[:, :3], a1[:, 3]
    if R is None:
        R = float(np.max(np.linalg.norm(nodes, axis=-1)))
    axis = np.full(3, np.nan) if axis is None else np.asarray(axis, dtype=float)
    grid = QuadratureGrid(nodes, weights, (len(weights),), axis, float(R))
    f1 = np.array([[r[4] for r in per_lam[1]], [r[4] for r in per_lam[2]]])
    return StateVector(f0, f1, grid)


def read_state(path, axis=None, R=None):
    with open(path) as fh:
        return parse_state(fh.read(), axis, R)
