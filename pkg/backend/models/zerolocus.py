# backend/models/zerolocus.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from ..errors import InputError, UnsupportedRegimeError, VerificationError
from .filtrations import Grading
from .ih import ANFData, sigma_integral_lift, sigma_torsion
from .linalg import Matrix, format_scalar, nilpotent_exp
from .mhs import MixedHodgeStructure, sl2_splitting
from .orbits import (
    LocalNormalForm,
    grading_at,
    grading_from_lift,
    invariant_grading,
    is_integral_grading,
    limit_data,
)
from .polynomials import MatrixPolynomial, render_entry

logger = logging.getLogger(__name__)

IN_LOCUS = "in-locus"
NOT_IN_LOCUS = "not-in-locus"
LIMIT_INTEGRAL = "limit-integral"
NO_INTEGRAL_LIMIT = "no-integral-limit"
ACCUMULATION_EXCLUDED = "accumulation-excluded"
CANDIDATE_LIMIT = "candidate-limit"
LOCUS_EQUATIONS = "locus-equations"


@dataclass
class ZeroLocusCertificate:
    """Veredito com testemunha verificável (graduação, λ, polinômios, classe σ)."""

    verdict: str
    point: Dict[str, Any] = field(default_factory=dict)
    witness: Dict[str, Any] = field(default_factory=dict)
    grading: Optional[Grading] = None

    @property
    def holds(self) -> bool:
        return self.verdict in (IN_LOCUS, LIMIT_INTEGRAL, CANDIDATE_LIMIT)


def _point(z: Sequence[Any], s: Sequence[Any]) -> Dict[str, Any]:
    return {"z": [str(x) for x in z], "s": [str(x) for x in s]}


def zero_test(lnf: LocalNormalForm, z: Sequence[Any], s: Sequence[Any]) -> ZeroLocusCertificate:
    """ν(z, s) = 0 sse Y_(F(z,s), W) é inteira na base do reticulado."""
    pg = grading_at(lnf, z, s)
    return ZeroLocusCertificate(
        verdict=IN_LOCUS if pg.integral else NOT_IN_LOCUS,
        point=_point(z, s),
        witness={"integral": pg.integral},
        grading=pg.grading,
    )


def limit_integrality(
    lnf: LocalNormalForm,
    samples: Optional[Sequence[Sequence[Sequence[Any]]]] = None,
    s_slice: Optional[Sequence[Any]] = None,
) -> ZeroLocusCertificate:
    """
    Y_ℤ = limite não torcido; veredito limit-integral sse é inteira. Confere
    (a) Y_ℤ ∈ ker ad N, (b) Y_ℤ preserva F̂_∞, (c) ξ ∈ ker ad N ∩ Λ^{-1,-1}.
    Amostras (z, s) fornecidas são testadas ponto a ponto.
    """
    data = limit_data(lnf, s_slice)
    n = lnf.orbit.logs[0]
    y = data.untwisted
    base = MixedHodgeStructure(data.F_base, lnf.orbit.M)
    properties = {
        "a_commutes_with_N": y.commutes_with(n),
        "b_preserves_F_hat": y.preserves(data.F_hat),
        "c_xi_in_ker_ad_N_and_lambda": data.xi.bracket(n).is_zero() and base.in_lambda(data.xi),
    }
    sampled = []
    for z, s in samples or []:
        cert = zero_test(lnf, z, s)
        sampled.append({**cert.point, "in_locus": cert.verdict == IN_LOCUS})
    integral = is_integral_grading(y, lnf.orbit.lattice)
    return ZeroLocusCertificate(
        verdict=LIMIT_INTEGRAL if integral else NO_INTEGRAL_LIMIT,
        point={"s_slice": [str(x) for x in (s_slice or [])]},
        witness={"properties": properties, "samples": sampled, "xi": data.xi.to_strings()},
        grading=y,
    )


@dataclass
class DefiningSystem:
    polynomial: MatrixPolynomial
    equations: List[Dict[str, Any]]
    variables: List[str]
    lam: Matrix
    y_inf: Grading
    alpha_in_q: bool
    alpha_lowers_W: bool
    verdict: str

    def vanishes_at(self, s: Sequence[Any]) -> bool:
        return self.polynomial.evaluate(s).is_zero()


def defining_equation(lnf: LocalNormalForm, y_inf: Optional[Grading] = None) -> DefiningSystem:
    """
    e^{-Γ(s)}·Y_∞·e^{Γ(s)} - Y_∞ expandido em monômios de s; o conjunto de
    zeros é o modelo local do lugar dos zeros. Também reporta
    λ = e^{-ξ}·Y_∞ - Y_∞.
    """
    orbit = lnf.orbit
    y = y_inf if y_inf is not None else invariant_grading(orbit).grading
    for j, nj in enumerate(orbit.logs, start=1):
        if not y.commutes_with(nj):
            raise InputError(f"Y_∞ não comuta com N_{j}")
    if not y.preserves(orbit.F_inf):
        raise InputError("Y_∞ não preserva F_∞")

    r = orbit.r
    names = [f"s{j + 1}" for j in range(r)]
    y_poly = MatrixPolynomial.constant(r, y.operator)
    p = (-lnf.gamma).exp() @ y_poly @ lnf.gamma.exp() - y_poly

    equations = []
    for i in range(orbit.n):
        for j in range(orbit.n):
            entry = p.entry(i, j)
            if entry:
                equations.append(
                    {
                        "entry": [i, j],
                        "polynomial": str(p.to_sympy_entry(i, j, names)),
                        "terms": render_entry(entry, names),
                    }
                )

    mhs = orbit.limit_mhs
    alpha_in_q = all(mhs.in_q(c) for _, c in p.coefficients())
    alpha_lowers = all(orbit.W.is_shifted_by(c, -1) for _, c in p.coefficients())

    split = sl2_splitting(orbit.F_inf, orbit.M, orbit.config)
    lam = nilpotent_exp(-split.xi) @ y.operator @ nilpotent_exp(split.xi) - y.operator
    verdict = LOCUS_EQUATIONS if lam.is_zero() else ACCUMULATION_EXCLUDED

    if not lam.is_zero() and r >= 1 and all(nj.is_zero() for nj in orbit.logs[1:]):
        limit = limit_data(lnf).untwisted
        if is_integral_grading(limit, orbit.lattice):
            raise VerificationError("limite inteiro com λ != 0")
    logger.debug("sistema definidor com %d equações", len(equations))
    return DefiningSystem(
        polynomial=p,
        equations=equations,
        variables=names,
        lam=lam,
        y_inf=y,
        alpha_in_q=alpha_in_q,
        alpha_lowers_W=alpha_lowers,
        verdict=verdict,
    )


def derivation_chain(
    lnf: LocalNormalForm, z: Sequence[Any], s: Sequence[Any], y_inf: Optional[Grading] = None
) -> Dict[str, Any]:
    """
    f = e^{-Γ(s)}e^{-zN}·Y_(F(z,s),W) - Y_∞ tem valores na álgebra de
    isotropia de F_∞; e no lugar dos zeros a equação e^{-Γ}·Y_∞ = Y_∞ vale.
    """
    orbit = lnf.orbit
    y = y_inf if y_inf is not None else invariant_grading(orbit).grading
    pg = grading_at(lnf, z, s)
    g = nilpotent_exp(orbit.cone_element(list(z))) @ nilpotent_exp(lnf.gamma.evaluate(list(s)))
    f = g.inverse() @ pg.grading.operator @ g - y.operator
    system = defining_equation(lnf, y)
    return {
        "f": f.to_strings(),
        "f_in_isotropy": orbit.F_inf.is_preserved_by(f),
        "in_locus": pg.integral,
        "equation_vanishes": system.vanishes_at(list(s)),
    }


def accumulation_verdict(anf: ANFData) -> ZeroLocusCertificate:
    """
    r = 1: σ != 0 exclui p como ponto de acumulação (não há graduação inteira
    T-invariante); σ = 0 devolve a graduação inteira candidata.
    """
    if anf.r != 1:
        raise UnsupportedRegimeError("veredito de acumulação só para r = 1", {"r": anf.r})
    if anf.lattice is None:
        raise InputError("veredito de acumulação exige reticulado")
    sigma = sigma_torsion(anf)
    lift = sigma_integral_lift(anf)
    if sigma.nonzero:
        if lift is not None:
            raise VerificationError("σ != 0 mas existe levantamento inteiro T-invariante")
        return ZeroLocusCertificate(
            verdict=ACCUMULATION_EXCLUDED,
            witness={
                "invariant_factors": sigma.invariant_factors,
                "sigma": sigma.components,
                "integral_lift": None,
            },
        )
    if lift is None:
        raise VerificationError("σ = 0 mas nenhum levantamento inteiro T-invariante foi encontrado")
    y = grading_from_lift(anf, lift)
    return ZeroLocusCertificate(
        verdict=CANDIDATE_LIMIT,
        witness={
            "invariant_factors": sigma.invariant_factors,
            "sigma": sigma.components,
            "integral_lift": [format_scalar(x) for x in lift],
        },
        grading=y,
    )
