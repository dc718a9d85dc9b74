# tests/test_mhs.py
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from backend.config import Settings
from backend.errors import NotAnMHSError, UnsupportedRegimeError
from backend.models.filtrations import DecreasingFiltration, IncreasingFiltration, is_grading_of
from backend.models.linalg import Matrix, Scalar, Subspace, nilpotent_exp, unit_vector
from backend.models.mhs import (
    MixedHodgeStructure,
    deligne_bigrading,
    delta_by_dense_solve,
    delta_splitting,
    gl_bigrading,
    hodge_numbers,
    is_mhs,
    is_split_R,
    lambda11,
    sl2_splitting,
    split_equiv_report,
    translate,
    verify_bigrading,
)
from backend.services.generator import ProblemGenerator

I = Scalar(0, 1)
seeds = st.integers(min_value=0, max_value=10_000)
dims = st.integers(min_value=1, max_value=6)


def _fix1(decoded):
    dec = decoded("fix1")
    return dec.decreasing("F"), dec.increasing("W")


def _tower():
    """Tipos (0,0), (-1,-1), (-2,-2) cindidos: Λ^{-1,-1} não abeliano."""
    e = [unit_vector(3, i) for i in range(3)]
    W = IncreasingFiltration(3, {-4: Subspace(3, [e[2]]), -2: Subspace(3, e[1:]), 0: Subspace.full(3)})
    F = DecreasingFiltration(3, {-2: Subspace.full(3), -1: Subspace(3, e[:2]), 0: Subspace(3, [e[0]])})
    return F, W


# --------------- FIX1 -----------------
def test_fix1_is_mhs_with_expected_types(decoded):
    F, W = _fix1(decoded)
    ok, diagnostic = is_mhs(F, W)
    assert ok and diagnostic == {}
    assert hodge_numbers(F, W) == {(0, 0): 1, (-1, -1): 1}


def test_fix1_delta_and_xi(decoded):
    F, W = _fix1(decoded)
    delta, F_tilde = delta_splitting(F, W)
    assert delta == Matrix([[0, 0], [1, 0]])
    assert is_split_R(F_tilde, W)
    assert delta_by_dense_solve(F, W) == delta
    assert translate(delta.scale(-I), F) == F_tilde
    split = sl2_splitting(F, W)
    assert split.xi == delta.scale(I)
    assert split.lambda_abelian and split.normalization == "abelian"
    assert split.zeta.is_zero()


def test_fix1_is_not_split(decoded):
    F, W = _fix1(decoded)
    report = split_equiv_report(F, W)
    assert report == {"a": False, "b": False, "c": False}


def test_non_mhs_reports_failing_weight():
    W = IncreasingFiltration.pure(2, 1)
    F = DecreasingFiltration(2, {1: Subspace(2, [unit_vector(2, 0)])})
    ok, diagnostic = is_mhs(F, W)
    assert not ok
    assert diagnostic["weight"] == 1
    with pytest.raises(NotAnMHSError):
        MixedHodgeStructure(F, W)


# --------------- regime não abeliano -----------------
def test_nonabelian_lambda_is_refused_by_default():
    F, W = _tower()
    assert not MixedHodgeStructure(F, W).is_lambda_abelian()
    with pytest.raises(UnsupportedRegimeError):
        sl2_splitting(F, W)


def test_nonabelian_lambda_with_flag_uses_imaginary_normalization():
    F, W = _tower()
    split = sl2_splitting(F, W, Settings(allow_nonabelian_xi=True))
    assert split.normalization == "imaginary"
    assert split.xi.is_zero() and split.delta.is_zero()


def test_fix3_limit_gl_bigrading_is_complete(decoded):
    orbit = decoded("fix3").orbit()
    F, M = orbit.F_inf, orbit.M
    gl = gl_bigrading(F, M)
    assert gl.total_dim() == 9
    assert sum(gl.dims().values()) == 9
    # Λ = gl^{-1,-1}: de I^{0,0} (dim 2) para I^{-1,-1} (dim 1)
    assert lambda11(F, M).dim == 2
    assert deligne_bigrading(F, M).hodge_numbers() == {(0, 0): 2, (-1, -1): 1}


# --------------- estruturas aleatórias -----------------
@settings(max_examples=200)
@given(seeds, dims)
def test_random_mhs_bigrading_axioms(seed, n):
    rand = ProblemGenerator(seed).mhs(n)
    ok, _ = is_mhs(rand.F, rand.W)
    assert ok
    mhs = MixedHodgeStructure(rand.F, rand.W)
    assert all(verify_bigrading(mhs.bigrading, rand.F, rand.W).values())
    assert mhs.bigrading.hodge_numbers() == rand.hodge_numbers()
    y = mhs.grading
    assert is_grading_of(y, rand.W)
    assert y.preserves(rand.F)


@given(seeds, dims)
def test_random_mhs_hodge_symmetry(seed, n):
    rand = ProblemGenerator(seed).mhs(n)
    h = hodge_numbers(rand.F, rand.W)
    assert all(h.get((q, p)) == d for (p, q), d in h.items())
    assert sum(h.values()) == n


@given(seeds, dims)
def test_untwisted_random_mhs_is_split(seed, n):
    rand = ProblemGenerator(seed).mhs(n, twist=False)
    assert split_equiv_report(rand.F, rand.W) == {"a": True, "b": True, "c": True}
    delta, _ = delta_splitting(rand.F, rand.W)
    assert delta.is_zero()


@given(seeds, dims)
def test_delta_is_real_and_solvers_agree(seed, n):
    rand = ProblemGenerator(seed, real_only=True).mhs(n)
    delta, F_tilde = delta_splitting(rand.F, rand.W)
    assert delta.is_real()
    assert MixedHodgeStructure(rand.F, rand.W).in_lambda(delta)
    assert is_split_R(F_tilde, rand.W)
    assert delta_by_dense_solve(rand.F, rand.W) == delta


@settings(max_examples=100)
@given(seeds, dims)
def test_bigrading_and_grading_move_with_lambda(seed, n):
    gen = ProblemGenerator(seed)
    rand = gen.mhs(n)
    mhs = MixedHodgeStructure(rand.F, rand.W)
    lam = Matrix.zero(n)
    for x in mhs.lambda_basis():
        lam = lam + x.scale(gen.scalar())
    g = nilpotent_exp(lam)
    moved = MixedHodgeStructure(translate(lam, rand.F), rand.W)
    assert moved.bigrading.pieces == mhs.bigrading.apply(g).pieces
    assert moved.grading.operator == g @ mhs.grading.operator @ g.inverse()
