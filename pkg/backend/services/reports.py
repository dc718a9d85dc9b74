# backend/services/reports.py
"""
Renderização humana (--pretty) dos documentos de saída.

Matrizes viram tabelas alinhadas do pandas; o resto vira pares chave: valor.
"""
from typing import Any, Dict, List

import pandas as pd


def _is_matrix(value: Any) -> bool:
    if not isinstance(value, list) or not value:
        return False
    if not all(isinstance(row, list) and row and all(isinstance(x, str) for x in row) for row in value):
        return False
    return len({len(row) for row in value}) == 1


def matrix_frame(rows: List[List[str]], basis: str = "e") -> pd.DataFrame:
    ncols = len(rows[0]) if rows else 0
    labels = [f"{basis}{j}" for j in range(ncols)]
    return pd.DataFrame(rows, columns=labels)


def _render(value: Any, path: str, out: List[str]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _render(value[key], f"{path}.{key}" if path else str(key), out)
        return
    if _is_matrix(value):
        out.append(f"{path}:")
        frame = matrix_frame(value)
        out.extend("    " + line for line in frame.to_string(index=False).splitlines())
        return
    if isinstance(value, list) and value and all(isinstance(x, dict) for x in value):
        frame = pd.DataFrame([{k: _cell(v) for k, v in item.items()} for item in value])
        out.append(f"{path}:")
        out.extend("    " + line for line in frame.to_string(index=False).splitlines())
        return
    out.append(f"{path}: {_cell(value)}")


def _cell(value: Any) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(_cell(x) for x in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_cell(v)}" for k, v in sorted(value.items())) + "}"
    if value is None:
        return "-"
    return str(value)


def render_pretty(doc: Dict[str, Any]) -> str:
    """Documento → texto com tabelas alinhadas (uma por matriz)."""
    lines: List[str] = []
    header = {k: doc[k] for k in ("command", "status", "exit_code") if k in doc}
    for key, value in header.items():
        lines.append(f"{key}: {value}")
    body = {k: v for k, v in doc.items() if k not in header}
    if body:
        lines.append("")
        _render(body, "", lines)
    return "\n".join(lines) + "\n"


def suite_frame(results: List[Dict[str, Any]]) -> pd.DataFrame:
    """Resumo de uma execução --suite: uma linha por arquivo."""
    rows = [
        {
            "file": item.get("file", ""),
            "command": item.get("command", ""),
            "status": item.get("status", ""),
            "exit_code": item.get("exit_code", 0),
        }
        for item in results
    ]
    return pd.DataFrame(rows, columns=["file", "command", "status", "exit_code"])
