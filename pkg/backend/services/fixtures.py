# backend/services/fixtures.py
"""
Corpus de arquivos-problema (FIX1–FIX7 e variantes) e leitura de goldens.

Os construtores abaixo geram exatamente os JSON versionados em fixtures/;
os parâmetros (ex.: a em FIX3) permitem famílias nos testes.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Callable, Dict, List

from ..errors import InputError

FIXTURE_DIR = Path(__file__).resolve().parents[2] / "fixtures"
GOLDEN_DIR = FIXTURE_DIR / "golden"

_TWO_STEP_W = {"kind": "increasing", "steps": {"-1": [["0", "1", "0"], ["0", "0", "1"]], "0": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]}}
_F_INF = {"kind": "decreasing", "steps": {"0": [["1", "0", "0"], ["0", "1", "0"]]}}
_STANDARD_3 = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]


def _rows3(e0: List[str], e1: List[str], e2: List[str]) -> List[List[str]]:
    # colunas = imagens de e0, e1, e2
    return [[e0[i], e1[i], e2[i]] for i in range(3)]


def fix1() -> Dict[str, Any]:
    return {
        "schema_version": 1,
        "name": "fix1",
        "description": "V = Q^2 (u = e0, v = e1); W_-2 = span v, W_0 = V; F^0 = span(u + iv)",
        "dim": 2,
        "filtrations": {
            "W": {"kind": "increasing", "steps": {"-2": [["0", "1"]], "0": [["1", "0"], ["0", "1"]]}},
            "F": {"kind": "decreasing", "steps": {"0": [["1", "i"]]}},
        },
    }


def fix2() -> Dict[str, Any]:
    return {
        "schema_version": 1,
        "name": "fix2",
        "description": "W pura de peso -1 em Q^2, N: e0 -> e1, F^0 = span e0",
        "dim": 2,
        "matrices": {"N": [["0", "0"], ["1", "0"]]},
        "filtrations": {
            "W": {"kind": "increasing", "steps": {"-1": [["1", "0"], ["0", "1"]]}},
            "F": {"kind": "decreasing", "steps": {"0": [["1", "0"]]}},
        },
        "orbit": {"W": "W", "F": "F", "logs": ["N"]},
    }


def fix3(a: str = "1") -> Dict[str, Any]:
    return {
        "schema_version": 1,
        "name": "fix3",
        "description": f"N: e0 -> a e2, e1 -> e2 (a = {a}); W_-1 = span(e1, e2); F^0 = span(e0, e1)",
        "dim": 3,
        "matrices": {"N": _rows3(["0", "0", a], ["0", "0", "1"], ["0", "0", "0"])},
        "filtrations": {"W": _TWO_STEP_W, "F": _F_INF},
        "lattices": {"L": _STANDARD_3},
        "orbit": {"W": "W", "F": "F", "logs": ["N"], "lattice": "L"},
        "anf": {"W": "W", "logs": ["N"], "lattice": "L"},
        "params": {"z": ["i"], "s": ["0"]},
    }


def fix3_twist(a: str = "1") -> Dict[str, Any]:
    doc = fix3(a)
    doc["name"] = "fix3_twist"
    doc["description"] = f"FIX3 (a = {a}) com F^0 = span(e0 + i e2, e1): (F, M) não cindida"
    doc["filtrations"] = {
        "W": _TWO_STEP_W,
        "F": {"kind": "decreasing", "steps": {"0": [["1", "0", "i"], ["0", "1", "0"]]}},
    }
    doc["params"] = {"z": ["i"], "s": ["0"], "pattern": "condition-1", "depth": 10}
    return doc


def fix4() -> Dict[str, Any]:
    return {
        "schema_version": 1,
        "name": "fix4",
        "description": "N: e0 -> e2, e1 -> 2 e2; torção Z/2",
        "dim": 3,
        "matrices": {"N": _rows3(["0", "0", "1"], ["0", "0", "2"], ["0", "0", "0"])},
        "filtrations": {"W": _TWO_STEP_W, "F": _F_INF},
        "lattices": {"L": _STANDARD_3},
        "orbit": {"W": "W", "F": "F", "logs": ["N"], "lattice": "L"},
        "anf": {"W": "W", "logs": ["N"], "lattice": "L"},
    }


def fix5() -> Dict[str, Any]:
    return {
        "schema_version": 1,
        "name": "fix5",
        "description": "N1 = FIX3 (a = 1), N2: e0 -> e2 apenas; M(N2, W) não existe",
        "dim": 3,
        "matrices": {
            "N1": _rows3(["0", "0", "1"], ["0", "0", "1"], ["0", "0", "0"]),
            "N2": _rows3(["0", "0", "1"], ["0", "0", "0"], ["0", "0", "0"]),
        },
        "filtrations": {"W": _TWO_STEP_W, "F": _F_INF},
        "orbit": {"W": "W", "F": "F", "logs": ["N1", "N2"]},
        "anf": {"W": "W", "logs": ["N1", "N2"]},
    }


def fix6() -> Dict[str, Any]:
    return {
        "schema_version": 1,
        "name": "fix6",
        "description": "r = 2, N1 = N2 = E (a -> b) em Q^2",
        "dim": 2,
        "matrices": {"N1": [["0", "0"], ["1", "0"]], "N2": [["0", "0"], ["1", "0"]]},
        "local_system": {"logs": ["N1", "N2"]},
    }


def fix7() -> Dict[str, Any]:
    return {
        "schema_version": 1,
        "name": "fix7",
        "description": "FIX3 com a = 0, r = 2, N2 = 0, Gamma = s2 L (L: e0 -> e2)",
        "dim": 3,
        "matrices": {
            "N1": _rows3(["0", "0", "0"], ["0", "0", "1"], ["0", "0", "0"]),
            "N2": [["0", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]],
        },
        "filtrations": {"W": _TWO_STEP_W, "F": _F_INF},
        "lattices": {"L": _STANDARD_3},
        "polynomials": {
            "Gamma": [{"monomial": [0, 1], "matrix": _rows3(["0", "0", "1"], ["0", "0", "0"], ["0", "0", "0"])}]
        },
        "orbit": {"W": "W", "F": "F", "logs": ["N1", "N2"], "lattice": "L", "gamma": "Gamma"},
        "params": {"z": ["i", "0"], "s": ["0", "1/2"], "s_slice": ["0"]},
    }


def sing_nonzero() -> Dict[str, Any]:
    return {
        "schema_version": 1,
        "name": "sing_nonzero",
        "description": "N1 = N2 = E em H (e1 -> e2), N1 e0 = e2, N2 e0 = 0: sing != 0",
        "dim": 3,
        "matrices": {
            "N1": _rows3(["0", "0", "1"], ["0", "0", "1"], ["0", "0", "0"]),
            "N2": _rows3(["0", "0", "0"], ["0", "0", "1"], ["0", "0", "0"]),
        },
        "filtrations": {"W": _TWO_STEP_W, "F": _F_INF},
        "orbit": {"W": "W", "F": "F", "logs": ["N1", "N2"]},
        "anf": {"W": "W", "logs": ["N1", "N2"]},
    }


BUILDERS: Dict[str, Callable[[], Dict[str, Any]]] = {
    "fix1": fix1,
    "fix2": fix2,
    "fix3": fix3,
    "fix3_twist": fix3_twist,
    "fix4": fix4,
    "fix5": fix5,
    "fix6": fix6,
    "fix7": fix7,
    "sing_nonzero": sing_nonzero,
}


def fixture_path(name: str) -> Path:
    return FIXTURE_DIR / f"{name}.json"


def load_fixture(name: str) -> Dict[str, Any]:
    path = fixture_path(name)
    if not path.exists():
        raise InputError(f"fixture desconhecida: {name}", {"available": sorted(BUILDERS)})
    return json.loads(path.read_text(encoding="utf-8"))


def list_fixtures() -> List[Dict[str, str]]:
    out = []
    for path in sorted(FIXTURE_DIR.glob("*.json")):
        doc = json.loads(path.read_text(encoding="utf-8"))
        out.append({"name": path.stem, "description": doc.get("description", "")})
    return out


def load_golden(name: str) -> Dict[str, Any]:
    return json.loads((GOLDEN_DIR / f"{name}.json").read_text(encoding="utf-8"))


def golden_cases() -> List[str]:
    return sorted(p.stem for p in GOLDEN_DIR.glob("*.json"))
