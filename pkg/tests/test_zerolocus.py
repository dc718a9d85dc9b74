# tests/test_zerolocus.py
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from backend.errors import UnsupportedRegimeError
from backend.models.linalg import Scalar
from backend.models.zerolocus import (
    ACCUMULATION_EXCLUDED,
    CANDIDATE_LIMIT,
    IN_LOCUS,
    LIMIT_INTEGRAL,
    LOCUS_EQUATIONS,
    NOT_IN_LOCUS,
    accumulation_verdict,
    defining_equation,
    derivation_chain,
    limit_integrality,
    zero_test,
)
from backend.services.codec import Decoded, load_problem
from backend.services.fixtures import BUILDERS

small = st.fractions(min_value=-3, max_value=3, max_denominator=6)
heights = st.fractions(min_value=1, max_value=6, max_denominator=6)
unit_interval = st.fractions(min_value=Fraction(-5, 6), max_value=Fraction(5, 6), max_denominator=6)
FIX7 = Decoded(load_problem(BUILDERS["fix7"]()))


# --------------- teste pontual -----------------
@given(small, heights, small, unit_interval)
def test_fix7_locus_is_s2_integral(x, y, s1, s2):
    # Im z1 > 0: Y tem autovetor e0 + s2 e2 de peso 0
    lnf = FIX7.normal_form()
    cert = zero_test(lnf, [Scalar(x, y), 0], [s1, s2])
    assert cert.verdict == (IN_LOCUS if s2 == 0 else NOT_IN_LOCUS)
    assert cert.holds == (s2 == 0)


def test_fix7_origin_is_in_locus(decoded):
    cert = zero_test(decoded("fix7").normal_form(), [Scalar(0, 1), 0], [0, 0])
    assert cert.verdict == IN_LOCUS
    assert cert.grading.operator.is_integral()


def test_fix7_integer_s2_is_in_locus(decoded):
    cert = zero_test(decoded("fix7").normal_form(), [Scalar(0, 1), 0], [0, 2])
    assert cert.verdict == IN_LOCUS


# --------------- equação definidora -----------------
def test_fix7_defining_equation(decoded):
    system = defining_equation(decoded("fix7").normal_form())
    assert system.verdict == LOCUS_EQUATIONS
    assert system.variables == ["s1", "s2"]
    assert [(eq["entry"], eq["polynomial"]) for eq in system.equations] == [([2, 0], "-s2")]
    assert system.lam.is_zero()
    assert system.alpha_in_q and system.alpha_lowers_W
    assert system.vanishes_at([0, 0])
    assert not system.vanishes_at([0, Fraction(1, 2)])


def test_fix7_derivation_chain_at_origin(decoded):
    chain = derivation_chain(decoded("fix7").normal_form(), [Scalar(0, 1), 0], [0, 0])
    assert chain["in_locus"] and chain["equation_vanishes"]
    assert chain["f_in_isotropy"]


# --------------- limites e acumulação -----------------
@pytest.mark.parametrize("name", ["fix3", "fix7"])
def test_limit_is_integral(decoded, name):
    cert = limit_integrality(decoded(name).normal_form())
    assert cert.verdict == LIMIT_INTEGRAL
    assert all(cert.witness["properties"].values())


def test_limit_integrality_records_samples(decoded):
    samples = [([Scalar(0, 1), 0], [0, 0]), ([Scalar(0, 1), 0], [0, Fraction(1, 2)])]
    cert = limit_integrality(decoded("fix7").normal_form(), samples=samples)
    assert [row["in_locus"] for row in cert.witness["samples"]] == [True, False]


def test_fix4_accumulation_is_excluded(decoded):
    cert = accumulation_verdict(decoded("fix4").anf())
    assert cert.verdict == ACCUMULATION_EXCLUDED
    assert cert.witness["invariant_factors"] == [2]
    assert cert.witness["integral_lift"] is None
    assert not cert.holds


def test_fix3_accumulation_candidate(decoded):
    cert = accumulation_verdict(decoded("fix3").anf())
    assert cert.verdict == CANDIDATE_LIMIT
    assert cert.witness["integral_lift"] == ["1", "-1", "0"]
    assert cert.grading.operator.is_integral()


def test_accumulation_needs_one_log(decoded):
    with pytest.raises(UnsupportedRegimeError):
        accumulation_verdict(decoded("fix5").anf())
