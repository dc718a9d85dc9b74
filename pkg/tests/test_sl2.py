# tests/test_sl2.py
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from backend.errors import InputError
from backend.models.filtrations import Grading, is_grading_of
from backend.models.linalg import Matrix
from backend.models.mhs import MixedHodgeStructure
from backend.models.sl2 import (
    Sl2Triple,
    ad_decompose,
    deligne_Y,
    highest_weight_check,
    orbit_grading_split,
    sl2_complete,
    uniqueness_probe,
    verify_deligne_conditions,
)
from backend.services.generator import ProblemGenerator

E = Matrix([[0, 0], [1, 0]])
H = Matrix.diagonal([1, -1])


def test_sl2_complete_elementary_pair():
    plus = sl2_complete(E, H)
    assert plus == Matrix([[0, 1], [0, 0]])
    assert Sl2Triple(n0=E, h=H, n0_plus=plus).verify()


def test_sl2_complete_rejects_non_pair():
    with pytest.raises(InputError):
        sl2_complete(E, Matrix.identity(2))


def test_ad_decompose_reassembles():
    y = Grading(Matrix.diagonal([0, -1, -2]))
    n = Matrix([[0, 0, 0], [1, 0, 0], [3, 1, 0]])
    dec = ad_decompose(n, y)
    assert dec.reassemble() == n
    assert set(dec.components) == {1, 2}


def test_ad_decompose_refuses_positive_weights():
    y = Grading(Matrix.diagonal([0, -1]))
    with pytest.raises(InputError):
        ad_decompose(Matrix([[0, 1], [0, 0]]), y)


def test_deligne_y_pure_weight_is_scalar(decoded):
    dec = decoded("fix2")
    n, w = dec.matrix("N"), dec.increasing("W")
    y_m = Grading(Matrix.diagonal([0, -2]))
    res = deligne_Y(n, y_m, w)
    assert res.grading.operator == Matrix.identity(2).scale(-1)
    assert res.method == "affine"
    assert res.triple.verify()
    assert highest_weight_check(res.decomposition, res.triple) == (True, {})


@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=3))
def test_deligne_y_on_split_orbits(seed, blocks):
    orbit = ProblemGenerator(seed).split_orbit(blocks)
    n = orbit.logs[0]
    y_m = orbit.limit_mhs.grading
    res = deligne_Y(n, y_m, orbit.W)
    ok, witness = verify_deligne_conditions(n, y_m, res.grading, orbit.W)
    assert ok, witness
    assert is_grading_of(res.grading, orbit.W)
    assert res.grading.commutes_with(n)
    assert res.triple.verify()
    assert highest_weight_check(res.decomposition, res.triple)[0]


@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=2))
def test_affine_and_iterative_methods_agree(seed, blocks):
    orbit = ProblemGenerator(seed).split_orbit(blocks)
    n = orbit.logs[0]
    y_m = orbit.limit_mhs.grading
    affine = deligne_Y(n, y_m, orbit.W, method="affine").grading
    iterative = deligne_Y(n, y_m, orbit.W, method="iterative").grading
    assert affine == iterative


@settings(max_examples=50)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=2))
def test_split_orbit_formula(seed, blocks):
    orbit = ProblemGenerator(seed).split_orbit(blocks)
    y, report = orbit_grading_split(orbit.F_inf, orbit.W, orbit.logs[0])
    assert report["constant"]
    assert len(report["points"]) == 10
    assert y == deligne_Y(orbit.logs[0], orbit.limit_mhs.grading, orbit.W).grading


def test_uniqueness_probe_on_fix3(decoded):
    dec = decoded("fix3")
    n, w = dec.matrix("N"), dec.increasing("W")
    y_m = MixedHodgeStructure(dec.decreasing("F"), dec.orbit().M).grading
    report = uniqueness_probe(n, y_m, w, box=1)
    assert report["unique"]


def test_deligne_y_requires_sl2_neutral_y_m(decoded):
    dec = decoded("fix2")
    with pytest.raises(InputError):
        deligne_Y(dec.matrix("N"), Grading.scalar(2, 0), dec.increasing("W"))


@pytest.mark.parametrize("a", [-2, 0, 1, 5])
def test_fix3_split_orbit_is_constant(decoded, a):
    dec = decoded("fix3", a=str(a))
    n = dec.matrix("N")
    y, report = orbit_grading_split(dec.decreasing("F"), dec.increasing("W"), n)
    assert report["constant"] and len(report["points"]) == 10
    assert y.eigenspace(0).contains((1, -a, 0))
    assert y.eigenspace(-1).dim == 2
    assert y.commutes_with(n)


def test_deligne_y_rejects_unknown_method(decoded):
    dec = decoded("fix2")
    with pytest.raises(InputError):
        deligne_Y(dec.matrix("N"), Grading(Matrix.diagonal([0, -2])), dec.increasing("W"), method="newton")
