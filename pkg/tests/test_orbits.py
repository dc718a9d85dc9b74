# tests/test_orbits.py
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from backend.errors import InputError, NonexistenceError
from backend.models.filtrations import conjugate_grading
from backend.models.linalg import Matrix, Scalar, nilpotent_exp
from backend.models.orbits import (
    LocalNormalForm,
    NilpotentOrbitData,
    admissibility_check,
    cone_independence,
    evaluate_F,
    gamma_deviation,
    horizontality_check,
    invariant_grading,
    limit_data,
    limit_grading_twisted,
    limit_grading_untwisted,
    limit_nf_value,
    multivariable_limit_probe,
)
from backend.models.polynomials import MatrixPolynomial
from backend.services.generator import ProblemGenerator

seeds = st.integers(min_value=0, max_value=10_000)
I = Scalar(0, 1)


# --------------- admissibilidade -----------------
def test_fix3_is_admissible(decoded):
    report = admissibility_check(decoded("fix3").orbit())
    assert report.passed
    assert report.checks["relative_filtration_N1"]
    assert report.checks["limit_mhs"]


def test_fix5_fails_on_second_log(decoded):
    report = admissibility_check(decoded("fix5").orbit())
    assert not report.passed
    assert report.checks["relative_filtration_N1"]
    assert not report.checks["relative_filtration_N2"]
    assert report.witnesses["relative_filtration_N2"]["log"] == 2


def test_log_must_preserve_w(decoded):
    orbit = decoded("fix3").orbit()
    # N^T: e2 -> e0 + e1 sai de W_-1
    with pytest.raises(InputError):
        NilpotentOrbitData(W=orbit.W, logs=[orbit.logs[0].transpose()], F_inf=orbit.F_inf)


@given(seeds, st.integers(min_value=1, max_value=2))
def test_generated_split_orbits_are_admissible(seed, blocks):
    orbit = ProblemGenerator(seed).split_orbit(blocks)
    report = admissibility_check(orbit)
    assert report.passed, report.witnesses
    inv = invariant_grading(orbit)
    assert all(inv.grading.commutes_with(nj) for nj in orbit.logs)


# --------------- forma normal local -----------------
def test_evaluate_at_origin_is_limit_filtration(decoded):
    lnf = decoded("fix3").normal_form()
    assert evaluate_F(lnf, [0], [0]) == lnf.orbit.F_inf


def test_trivial_normal_form_is_horizontal(decoded):
    lnf = LocalNormalForm.trivial(decoded("fix3").orbit())
    assert lnf.gamma.is_zero()
    assert horizontality_check(lnf).holds


def test_fix7_gamma_is_linear_in_s2(decoded):
    lnf = decoded("fix7").normal_form()
    lowering = Matrix([[0, 0, 0], [0, 0, 0], [1, 0, 0]])  # e0 -> e2
    assert lnf.gamma == MatrixPolynomial.variable(2, 1, lowering)


def test_fix7_is_horizontal(decoded):
    report = horizontality_check(decoded("fix7").normal_form())
    assert report.holds
    assert report.membership_failures == [] and report.slice_failures == []


def test_gamma_with_constant_term_is_rejected(decoded):
    lnf = decoded("fix7").normal_form()
    shifted = lnf.gamma + MatrixPolynomial.constant(2, Matrix([[0, 0, 0], [0, 0, 0], [1, 0, 0]]))
    with pytest.raises(InputError):
        LocalNormalForm(lnf.orbit, shifted)


# --------------- graduações limite -----------------
def test_fix3_invariant_grading(decoded):
    inv = invariant_grading(decoded("fix3").orbit())
    assert inv.e0 == (Scalar(1), Scalar(-1), Scalar(0))
    assert inv.grading.eigenspace(-1).dim == 2


def test_invariant_grading_refused_when_sing_nonzero(decoded):
    with pytest.raises(NonexistenceError):
        invariant_grading(decoded("sing_nonzero").orbit())


def test_fix3_limits_coincide(decoded):
    data = limit_data(decoded("fix3").normal_form())
    assert data.xi.is_zero() and data.delta.is_zero()
    assert data.untwisted == data.twisted
    assert all(data.checks.values())


def test_fix3_twist_limit_lies_in_ker_ad_n(decoded):
    lnf = decoded("fix3_twist").normal_form()
    data = limit_data(lnf)
    assert data.twisted.commutes_with(lnf.orbit.logs[0])
    assert data.checks["coordinate_independent"]


def test_limit_needs_single_branch(decoded):
    with pytest.raises(InputError):
        limit_data(decoded("sing_nonzero").normal_form())


def test_cone_independence_fix3(decoded):
    assert cone_independence(decoded("fix3").orbit())["independent"]


# --------------- sondas -----------------
def test_probe_table_shape(decoded):
    probe = multivariable_limit_probe(decoded("fix3_twist").normal_form(), depth=4)
    assert len(probe.table) == 4
    assert list(probe.table.columns) == ["k", "y", "y_min", "deviation", "exact_zero", "ratio"]
    assert probe.to_csv().startswith("k,y,y_min")


def test_fix3_twist_deviation_halves_with_each_doubling(decoded):
    probe = multivariable_limit_probe(decoded("fix3_twist").normal_form(), depth=10)
    table = probe.table
    assert table["y_min"].tolist() == [2 ** k for k in range(1, 11)]
    assert probe.monotone is True
    assert not table["exact_zero"].any()
    tail = table[table["y_min"] >= 4]
    assert (tail["ratio"] >= 1.8).all()
    assert table["deviation"].iloc[-1] < table["deviation"].iloc[0]


def test_fix3_twist_limits_agree_after_conjugation(decoded):
    lnf = decoded("fix3_twist").normal_form()
    data = limit_data(lnf)
    assert not data.delta.is_zero()
    g = nilpotent_exp(data.delta.scale(I)) @ nilpotent_exp(-data.zeta)
    assert conjugate_grading(g, data.untwisted) == data.twisted
    assert data.checks["conjugate_by_exp_i_delta_exp_minus_zeta"]
    assert limit_grading_twisted(lnf) == data.twisted
    assert limit_grading_untwisted(lnf) == data.untwisted


def test_probe_rejects_unknown_pattern(decoded):
    with pytest.raises(InputError):
        multivariable_limit_probe(decoded("fix3").normal_form(), pattern="spiral", depth=2)


@pytest.mark.parametrize("s2", [Fraction(1), Fraction(1, 3), Fraction(-2)])
def test_gamma_deviation_halves_with_s(decoded, s2):
    lnf = decoded("fix7").normal_form()
    z = [I, 0]
    assert gamma_deviation(lnf, z, [0, 0]) == 0.0
    full = gamma_deviation(lnf, z, [0, s2])
    half = gamma_deviation(lnf, z, [0, s2 / 2])
    assert full > 0
    assert half <= full / 2 * (1 + 1e-12)


# --------------- valor limite de ν -----------------
def test_fix3_nf_value_vanishes(decoded):
    value = limit_nf_value(decoded("fix3").orbit())
    assert value.zero
    assert all(x.is_zero() for x in value.representative)


def test_fix3_twist_nf_value_is_nonzero(decoded):
    value = limit_nf_value(decoded("fix3_twist").orbit())
    assert not value.zero
    assert value.representative == (Scalar(0), Scalar(0), Scalar(0, 1))


def test_nf_value_refused_under_torsion(decoded):
    with pytest.raises(NonexistenceError):
        limit_nf_value(decoded("fix4").orbit())
