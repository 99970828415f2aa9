"""Matrix files (CSV / JSON) and the JSON compression report."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .compression import CompressionReport
from .errors import InputError
from .verification import Verdict

REPORT_SCHEMA = 1
FORMATS = ("csv", "json")


def infer_format(path, fmt: str | None = None) -> str:
    if fmt:
        if fmt not in FORMATS:
            raise InputError(f"unknown format {fmt!r}")
        return fmt
    return "json" if Path(path).suffix.lower() == ".json" else "csv"


def _num(x: float) -> str:
    return format(float(x), ".17g")


def matrix_to_csv(M) -> str:
    M = np.asarray(M, dtype=np.float64)
    return "".join(",".join(_num(x) for x in row) + "\n" for row in M)


def matrix_from_csv(text: str) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise InputError(f"line {lineno}: {exc}") from exc
    if not rows:
        return np.zeros((0, 0))
    if len({len(r) for r in rows}) != 1:
        raise InputError("CSV matrix is not rectangular")
    return np.array(rows, dtype=np.float64)


def matrix_to_json_obj(M) -> dict:
    M = np.asarray(M, dtype=np.float64)
    return {"rows": int(M.shape[0]), "cols": int(M.shape[1]), "data": [float(x) for x in M.ravel()]}


def matrix_from_json_obj(obj) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"matrix JSON needs 'rows', 'cols' and 'data': {exc}") from exc
    if rows < 0 or cols < 0 or len(data) != rows * cols:
        raise InputError(f"matrix JSON data has length {len(data)}, expected {rows}x{cols}")
    try:
        return np.array(data, dtype=np.float64).reshape(rows, cols)
    except (TypeError, ValueError) as exc:
        raise InputError(f"matrix JSON data is not numeric: {exc}") from exc


def read_matrix(path, fmt: str | None = None) -> np.ndarray:
    path = Path(path)
    fmt = infer_format(path, fmt)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if fmt == "csv":
        M = matrix_from_csv(text)
    else:
        try:
            M = matrix_from_json_obj(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON: {exc}") from exc
    if not np.all(np.isfinite(M)):
        raise InputError(f"{path}: non-finite entries")
    return M


def write_matrix(M, path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = infer_format(path, fmt)
    if fmt == "csv":
        path.write_text(matrix_to_csv(M), encoding="utf-8")
    else:
        path.write_text(json.dumps(matrix_to_json_obj(M)) + "\n", encoding="utf-8")
    return path


def complex_list(values) -> list[dict]:
    return [{"re": float(z.real), "im": float(z.imag)} for z in np.asarray(values, dtype=complex)]


def complex_array(items) -> np.ndarray:
    return np.array([complex(d["re"], d["im"]) for d in items], dtype=complex)


def report_to_dict(report: CompressionReport) -> dict:
    """JSON-ready dict; all indices are 0-based."""
    return {
        "schema": REPORT_SCHEMA,
        "input_order": int(report.input_order),
        "output_order": int(report.output_order),
        "output": matrix_to_json_obj(report.output),
        "selected_rows": [int(i) for i in report.selected_rows],
        "alphas": [float(a) for a in report.alphas],
        "core_indices": [int(i) for i in report.core_indices],
        "k": int(report.k),
        "l": int(report.l),
        "bound": int(report.bound),
        "residual": float(report.residual),
        "noop": bool(report.noop),
        "warnings": list(report.warnings),
        "nonzero_spectrum": None if report.spectrum is None else complex_list(report.spectrum),
        "verification": None if report.verification is None else report.verification.to_dict(),
    }


def report_from_dict(d: dict) -> CompressionReport:
    if d.get("schema") != REPORT_SCHEMA:
        raise InputError(f"unsupported report schema {d.get('schema')!r}")
    spectrum = d.get("nonzero_spectrum")
    verification = d.get("verification")
    return CompressionReport(
        input_order=int(d["input_order"]),
        output=matrix_from_json_obj(d["output"]),
        selected_rows=[int(i) for i in d["selected_rows"]],
        alphas=np.array(d["alphas"], dtype=np.float64),
        core_indices=[int(i) for i in d["core_indices"]],
        k=int(d["k"]),
        l=int(d["l"]),
        bound=int(d["bound"]),
        residual=float(d["residual"]),
        noop=bool(d["noop"]),
        warnings=list(d["warnings"]),
        spectrum=None if spectrum is None else complex_array(spectrum),
        verification=None if verification is None else Verdict.from_dict(verification),
    )


def dumps_report(report: CompressionReport) -> str:
    return json.dumps(report_to_dict(report), indent=2)


def loads_report(text: str) -> CompressionReport:
    return report_from_dict(json.loads(text))
