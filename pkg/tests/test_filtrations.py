# tests/test_filtrations.py
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from backend.errors import InputError
from backend.models.filtrations import (
    DecreasingFiltration,
    Grading,
    IncreasingFiltration,
    is_grading_of,
    jordan_strings,
    monodromy_grading,
    monodromy_weight_filtration,
    relative_weight_filtration,
    two_step_image_condition,
    verify_relative_filtration,
)
from backend.models.linalg import Matrix, Scalar, Subspace, unit_vector
from backend.services.generator import ProblemGenerator

seeds = st.integers(min_value=0, max_value=10_000)

E = Matrix([[0, 0], [1, 0]])  # e0 -> e1


def test_gaps_repeat_the_step_below():
    v = unit_vector(2, 1)
    w = IncreasingFiltration(2, {-2: Subspace(2, [v]), 0: Subspace.full(2)})
    assert w.step(-1) == Subspace(2, [v])
    assert w.step(-3).is_zero()
    assert w.step(5).is_full()
    assert w.weights() == [-2, 0]
    assert w.gr_dim(-1) == 0


def test_decreasing_convention():
    f = DecreasingFiltration(2, {0: Subspace(2, [[1, Scalar(0, 1)]])})
    assert f.step(-1).is_full()
    assert f.step(1).is_zero()
    assert not f.is_real()


def test_non_nested_filtration_is_rejected():
    with pytest.raises(InputError):
        IncreasingFiltration(2, {0: Subspace(2, [unit_vector(2, 0)]), 1: Subspace(2, [unit_vector(2, 1)])})


def test_jordan_strings_of_elementary_nilpotent():
    strings = jordan_strings(E)
    assert len(strings) == 1
    assert strings[0].length == 2
    assert strings[0].top == (Scalar(1), Scalar(0))
    assert strings[0].vectors[1] == (Scalar(0), Scalar(1))


def test_monodromy_filtration_centered():
    m = monodromy_weight_filtration(E, center=0)
    assert m.step(-1) == Subspace(2, [unit_vector(2, 1)])
    assert m.weights() == [-1, 1]
    shifted = monodromy_weight_filtration(E, center=-1)
    assert shifted.weights() == [-2, 0]


@settings(max_examples=100)
@given(seeds, st.integers(min_value=1, max_value=8))
def test_monodromy_grading_is_sl2_neutral(seed, n):
    nil = ProblemGenerator(seed).nilpotent(n)
    y = monodromy_grading(nil)
    assert y.operator.bracket(nil) == nil.scale(-2)
    assert sorted(y.spectrum) == sorted(-k for k in y.spectrum)
    assert is_grading_of(y, monodromy_weight_filtration(nil))


@settings(max_examples=100)
@given(seeds, st.integers(min_value=1, max_value=8))
def test_monodromy_filtration_axioms_by_rank(seed, n):
    nil = ProblemGenerator(seed).nilpotent(n)
    m = monodromy_weight_filtration(nil)
    assert m.is_shifted_by(nil, -2)
    for l in range(n):
        # N^l: Gr_l -> Gr_-l isomorfismo, contado por dimensões
        image = m.step(l).apply(nil.power(l)) + m.step(-l - 1)
        assert image.dim - m.step(-l - 1).dim == m.gr_dim(l) == m.gr_dim(-l)


def test_grading_filtration_roundtrip():
    y = Grading(Matrix.diagonal([0, -1, -1]))
    w = y.filtration()
    assert w.weights() == [-1, 0]
    assert w.step(-1) == Subspace(3, [unit_vector(3, 1), unit_vector(3, 2)])
    assert is_grading_of(y, w)


def test_relative_filtration_exists_for_admissible_log(decoded):
    dec = decoded("fix3")
    n, w = dec.matrix("N"), dec.increasing("W")
    rel = relative_weight_filtration(n, w)
    assert rel.exists
    ok, witness = verify_relative_filtration(n, w, rel.filtration)
    assert ok and witness == {}
    # M_-2 = span e2 e o levantamento corrigido e0 - e1 tem peso 0
    assert rel.filtration.step(-2) == Subspace(3, [unit_vector(3, 2)])
    assert rel.grading.eigenspace(0).contains((Scalar(1), Scalar(-1), Scalar(0)))


def test_relative_filtration_nonexistence_has_witness(decoded):
    dec = decoded("fix5")
    rel = relative_weight_filtration(dec.matrix("N2"), dec.increasing("W"))
    assert rel.status == "does-not-exist"
    assert rel.filtration is None
    assert rel.witness["weight"] == 0
    # N2(V) = span e2, N2(W_-1) = 0
    assert rel.witness["image_condition"] is False


def test_two_step_image_condition_on_fixtures(decoded):
    dec = decoded("fix3")
    assert two_step_image_condition(dec.matrix("N"), dec.increasing("W")) is True
    assert two_step_image_condition(E, IncreasingFiltration.pure(2, -1)) is None


@settings(max_examples=100)
@given(seeds, st.integers(min_value=1, max_value=7))
def test_two_step_existence_matches_image_condition(seed, h_dim):
    gen = ProblemGenerator(seed, real_only=True)
    a = gen.lower_nilpotent(h_dim)
    col = [gen.scalar() for _ in range(h_dim)]
    n = h_dim + 1
    rows = [[0] * n] + [[col[i]] + list(a.rows[i]) for i in range(h_dim)]
    nil = Matrix(rows, n)
    w = IncreasingFiltration(n, {-1: Subspace(n, [unit_vector(n, i) for i in range(1, n)]), 0: Subspace.full(n)})
    rel = relative_weight_filtration(nil, w)
    condition = two_step_image_condition(nil, w)
    assert rel.status in ("exists", "does-not-exist")
    assert rel.exists == condition
    if not rel.exists:
        assert rel.witness["image_condition"] is False


def test_relative_filtration_of_pure_structure_is_shifted_monodromy():
    w = IncreasingFiltration.pure(2, -1)
    rel = relative_weight_filtration(E, w)
    assert rel.exists
    assert rel.filtration == monodromy_weight_filtration(E, center=-1)


def test_verifier_rejects_wrong_candidate(decoded):
    dec = decoded("fix3")
    n, w = dec.matrix("N"), dec.increasing("W")
    ok, witness = verify_relative_filtration(n, w, w)
    assert not ok
    assert "axiom" in witness
