"""File formats and serialization.

Matrix files are JSON objects {"rows": n, "cols": m, "entries": [[re, im],
...]} in row-major order; CSV input with cells like "1.5+0.5i" is accepted,
writers emit JSON only.  Report scalars serialize as decimal strings with 17
significant digits (lossless for binary64), infinities as "inf".
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bounds import BoundReport
from .errors import InvalidMatrix
from .experiments import SweepResult
from .linalg import EigenDecomposition, as_matrix


def fmt17(x: float) -> str:
    """Decimal string with 17 significant digits; round-trips binary64."""
    x = float(x)
    if x == float("inf"):
        return "inf"
    if x == float("-inf"):
        return "-inf"
    return format(x, ".17g")


def complex_pair(z: complex) -> list[str]:
    return [fmt17(z.real), fmt17(z.imag)]


def matrix_to_obj(m: np.ndarray) -> dict:
    m = as_matrix(m, "matrix")
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def obj_to_matrix(obj: dict, name: str = "matrix") -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidMatrix(f"{name}: missing rows/cols/entries: {exc}") from exc
    if len(entries) != rows * cols:
        raise InvalidMatrix(
            f"{name}: expected {rows * cols} entries, got {len(entries)}")
    data = np.empty(rows * cols, dtype=np.complex128)
    for k, pair in enumerate(entries):
        try:
            re, im = float(pair[0]), float(pair[1])
        except (TypeError, ValueError, IndexError) as exc:
            raise InvalidMatrix(f"{name}: bad entry at index {k}: {pair!r}") from exc
        data[k] = complex(re, im)
    return as_matrix(data.reshape(rows, cols), name)


def _parse_complex_cell(cell: str, row: int, col: int) -> complex:
    text = cell.strip().replace(" ", "")
    if not text:
        raise InvalidMatrix(f"row {row}, column {col}: empty cell")
    try:
        return complex(text.replace("i", "j"))
    except ValueError as exc:
        raise InvalidMatrix(
            f"row {row}, column {col}: cannot parse {cell.strip()!r}") from exc


def parse_csv_matrix(text: str) -> np.ndarray:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise InvalidMatrix("CSV matrix: file is empty")
    rows = []
    width = None
    for rix, line in enumerate(lines, start=1):
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise InvalidMatrix(
                f"row {rix}: expected {width} cells, got {len(cells)}")
        rows.append([_parse_complex_cell(c, rix, cix)
                     for cix, c in enumerate(cells, start=1)])
    return as_matrix(np.array(rows, dtype=np.complex128), "matrix")


def load_matrix(path: str | Path) -> np.ndarray:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv" or not text.lstrip().startswith("{"):
        return parse_csv_matrix(text)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidMatrix(f"{path}: invalid JSON: {exc}") from exc
    return obj_to_matrix(obj, str(path))


def save_matrix(path: str | Path, m: np.ndarray) -> None:
    Path(path).write_text(json.dumps(matrix_to_obj(m)) + "\n")


def eig_to_obj(ed: EigenDecomposition) -> dict:
    return {
        "lambda": [[float(z.real), float(z.imag)] for z in ed.lam],
        "X": matrix_to_obj(ed.x),
        "V": matrix_to_obj(ed.v),
        "kappa_x": fmt17(ed.kappa_x),
    }


def report_to_obj(report: BoundReport) -> dict:
    """Flat JSON object; reals as 17-significant-digit decimal strings."""
    return {
        "delta0": fmt17(report.gap.delta0),
        "delta1": fmt17(report.gap.delta1),
        "delta_lambda": fmt17(report.gap.delta_lambda),
        "t0_star": complex_pair(report.gap.t0_star),
        "a": fmt17(report.a),
        "kappa_X1": fmt17(report.kappa_x1),
        "kappa_V2": fmt17(report.kappa_v2),
        "dA_spec": fmt17(report.da_spec),
        "dA_frob": fmt17(report.da_frob),
        "classical_value": fmt17(report.classical_value),
        "classical_valid": report.classical_valid,
        "new_value_perj": fmt17(report.new_value_perj),
        "new_value_dl": fmt17(report.new_value_dl),
        "sep_frob": fmt17(report.sep_frob),
        "sep_lower": fmt17(report.sep_lower),
        "stewart_condition_ok": report.stewart_condition_ok,
        "measured_sin": fmt17(report.measured_sin),
        "gap_ok": report.gap_ok,
        "dominance_ok": report.dominance_ok,
        "match_strategy": report.match_strategy,
    }


def _cell(value) -> str:
    if isinstance(value, float):
        return fmt17(value)
    return str(value)


def sweep_to_csv(result: SweepResult) -> str:
    lines = [",".join(result.columns)]
    for row in result.rows:
        lines.append(",".join(_cell(row[c]) for c in result.columns))
    return "\n".join(lines) + "\n"


def sweep_to_json(result: SweepResult) -> str:
    obj = {
        "columns": list(result.columns),
        "rows": [{c: (fmt17(row[c]) if isinstance(row[c], float) else row[c])
                  for c in result.columns} for row in result.rows],
        "notes": list(result.notes),
    }
    if result.summary:
        obj["summary"] = {k: fmt17(v) for k, v in result.summary}
    return json.dumps(obj, indent=2) + "\n"


def records_to_json(records: list[dict]) -> str:
    out = []
    for rec in records:
        out.append({k: (fmt17(v) if isinstance(v, float) else v)
                    for k, v in rec.items()})
    return json.dumps(out, indent=2) + "\n"
