# tests/test_golden.py
from typing import Any

import pytest

from backend.services.commands import run
from backend.services.fixtures import golden_cases, load_fixture, load_golden


def assert_subset(expected: Any, actual: Any, path: str = "$") -> None:
    """Dicionários: só as chaves esperadas; listas: mesmo tamanho, elemento a elemento."""
    if isinstance(expected, dict):
        assert isinstance(actual, dict), path
        for key, value in expected.items():
            assert key in actual, f"{path}.{key} ausente"
            assert_subset(value, actual[key], f"{path}.{key}")
    elif isinstance(expected, list):
        assert isinstance(actual, list) and len(actual) == len(expected), path
        for i, (e, a) in enumerate(zip(expected, actual)):
            assert_subset(e, a, f"{path}[{i}]")
    else:
        assert actual == expected, f"{path}: {actual!r} != {expected!r}"


@pytest.mark.parametrize("case", golden_cases())
def test_golden(case):
    golden = load_golden(case)
    doc = load_fixture(golden["fixture"])
    doc.setdefault("params", {}).update(golden.get("params", {}))
    group, action = golden["command"]
    out, code = run(group, action, doc)
    assert code == golden["exit_code"], out
    assert out["exit_code"] == code
    assert_subset(golden["expect"], out)
