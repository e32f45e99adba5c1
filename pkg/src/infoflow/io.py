"""Plain-text serialization: field states and tabular reports.

Floats are written with 17 significant digits so every double survives a
write/read cycle bit for bit.  Every file ends with an explicit
end-of-report marker so truncated output is detectable.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import StructuralError
from .lattice import FieldState, LatticeParams, MassCoupling

END_MARKER = "# end-of-report"
STATE_MAGIC = "# infoflow-state v1"


def fmt(value) -> str:
    """17-significant-digit rendering used in every CSV cell."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def _json_safe(value):
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file so no partial file is left behind."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=path.parent or Path("."))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# field states
# ---------------------------------------------------------------------------

def dumps_state(state: FieldState, params: LatticeParams, mass: MassCoupling) -> str:
    if state.n_sites != params.n_sites:
        raise StructuralError("state and params disagree on n_sites")
    lines = [
        STATE_MAGIC,
        f"# n_sites={params.n_sites}",
        f"# chorus={fmt(params.chorus)}",
        f"# chronon={fmt(params.chronon)}",
        f"# mu={fmt(mass.mu)}",
        "x,re_plus,im_plus,re_minus,im_minus",
    ]
    for x in range(state.n_sites):
        p, m = state.plus[x], state.minus[x]
        lines.append(",".join([str(x), fmt(p.real), fmt(p.imag), fmt(m.real), fmt(m.imag)]))
    lines.append(END_MARKER)
    return "\n".join(lines) + "\n"


def loads_state(text: str):
    """Inverse of :func:`dumps_state`; returns ``(state, params, mass)``."""
    lines = text.splitlines()
    if not lines or lines[0] != STATE_MAGIC:
        raise StructuralError("not an infoflow state file")
    if lines[-1] != END_MARKER:
        raise StructuralError("state file is truncated (no end-of-report marker)")
    header = {}
    i = 1
    while lines[i].startswith("# "):
        key, _, value = lines[i][2:].partition("=")
        header[key] = value
        i += 1
    n = int(header["n_sites"])
    params = LatticeParams(n, float(header["chorus"]), float(header["chronon"]))
    mass = MassCoupling(float(header["mu"]))
    rows = lines[i + 1 : -1]
    if len(rows) != n:
        raise StructuralError(f"expected {n} rows, found {len(rows)}")
    data = np.array([[float(c) for c in row.split(",")] for row in rows])
    if not np.array_equal(data[:, 0], np.arange(n)):
        raise StructuralError("site column must run 0..n_sites-1")
    state = FieldState(data[:, 1] + 1j * data[:, 2], data[:, 3] + 1j * data[:, 4])
    return state, params, mass


def write_state(path, state, params, mass) -> None:
    atomic_write(path, dumps_state(state, params, mass))


def read_state(path):
    return loads_state(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# tabular reports
# ---------------------------------------------------------------------------

def render_table(columns, rows, metadata: dict, fmt_name: str = "csv") -> str:
    """Render a report as CSV (metadata in a leading comment) or JSON."""
    if fmt_name == "csv":
        lines = ["# metadata " + json.dumps(_json_safe(metadata), sort_keys=True)]
        lines.append(",".join(columns))
        lines.extend(",".join(fmt(v) for v in row) for row in rows)
        lines.append(END_MARKER)
        return "\n".join(lines) + "\n"
    if fmt_name == "json":
        body = json.dumps(
            {
                "metadata": _json_safe(metadata),
                "columns": list(columns),
                "rows": _json_safe([list(r) for r in rows]),
            },
            sort_keys=True,
            ensure_ascii=False,
        )
        # keep the marker as the final member on its own line
        return body[:-1] + ',\n"end_of_report": true\n}\n'
    raise ValueError(f"unknown output format {fmt_name!r}")


def parse_csv_report(text: str):
    """Read back a CSV report: ``(metadata, columns, rows)`` with float cells."""
    lines = text.splitlines()
    if lines[-1] != END_MARKER:
        raise StructuralError("report is truncated (no end-of-report marker)")
    metadata = json.loads(lines[0][len("# metadata ") :])
    columns = lines[1].split(",")
    rows = [[float(c) for c in line.split(",")] for line in lines[2:-1]]
    return metadata, columns, rows
