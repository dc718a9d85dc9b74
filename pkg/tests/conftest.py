# tests/conftest.py
from typing import Any, Callable, Dict

import pytest
from hypothesis import HealthCheck, settings

from backend.config import Settings
from backend.services.codec import Decoded, load_problem
from backend.services.fixtures import BUILDERS
from backend.services.generator import ProblemGenerator

# aritmética exata é lenta para o deadline padrão
settings.register_profile(
    "exact",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exact")


def decode(doc: Dict[str, Any], config: Settings = None) -> Decoded:
    return Decoded(load_problem(doc), config)


@pytest.fixture
def fixture_doc() -> Callable[..., Dict[str, Any]]:
    """fixture_doc("fix3", a="2", s=["1"]) → documento com params sobrescritos."""

    def build(name: str, a: str = None, **params: Any) -> Dict[str, Any]:
        builder = BUILDERS[name]
        doc = builder(a) if a is not None else builder()
        doc.setdefault("params", {}).update(params)
        return doc

    return build


@pytest.fixture
def decoded(fixture_doc) -> Callable[..., Decoded]:
    def build(name: str, a: str = None, **params: Any) -> Decoded:
        return decode(fixture_doc(name, a, **params))

    return build


@pytest.fixture
def generator() -> ProblemGenerator:
    return ProblemGenerator(seed=7)
