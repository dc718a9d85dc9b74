# tests/test_fixtures.py
import pytest

from backend.errors import InputError
from backend.services.fixtures import BUILDERS, golden_cases, list_fixtures, load_fixture, load_golden


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_versioned_fixture_matches_builder(name):
    assert load_fixture(name) == BUILDERS[name]()


def test_list_fixtures_has_descriptions():
    listed = list_fixtures()
    assert [item["name"] for item in listed] == sorted(BUILDERS)
    assert all(item["description"] for item in listed)


def test_unknown_fixture():
    with pytest.raises(InputError) as err:
        load_fixture("fix99")
    assert "fix1" in err.value.details["available"]


def test_goldens_point_to_known_fixtures():
    for case in golden_cases():
        golden = load_golden(case)
        assert golden["fixture"] in BUILDERS, case
        assert len(golden["command"]) == 2
