# backend/models/orbits.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..config import Settings
from ..errors import (
    DimensionMismatchError,
    InputError,
    NonexistenceError,
    NotAnMHSError,
    NotIntegralError,
    NotNilpotentError,
    VerificationError,
)
from .filtrations import (
    DecreasingFiltration,
    Grading,
    IncreasingFiltration,
    conjugate_grading,
    graded_piece,
    is_grading_of,
    relative_weight_filtration,
)
from .ih import ANFData, sigma_integral_lift, sing_class
from .linalg import (
    I,
    IntegerLattice,
    Matrix,
    Scalar,
    Subspace,
    Vector,
    annihilator,
    as_scalar,
    format_scalar,
    integer_kernel,
    integer_solve,
    is_nilpotent,
    kernel,
    nilpotent_exp,
)
from .mhs import (
    MixedHodgeStructure,
    delta_splitting,
    deligne_grading,
    is_type_I,
    sl2_splitting,
)
from .polynomials import MatrixPolynomial
from .sl2 import deligne_Y

logger = logging.getLogger(__name__)

CONE_SAMPLES_MAX = 3


# --------------- ÓRBITAS NILPOTENTES -----------------
class NilpotentOrbitData:
    """
    Dados (W, N_1..N_r, F_∞) de uma órbita nilpotente. A validação estrutural
    (formatos, nilpotência, comutação, W preservada) acontece na construção;
    M e a EHM limite são calculadas sob demanda.
    """

    def __init__(
        self,
        W: IncreasingFiltration,
        logs: Sequence[Matrix],
        F_inf: DecreasingFiltration,
        lattice: Optional[IntegerLattice] = None,
        forms: Optional[Dict[int, Matrix]] = None,
        config: Optional[Settings] = None,
    ):
        self.W = W
        self.logs = list(logs)
        self.F_inf = F_inf
        self.lattice = lattice
        self.forms = forms or {}
        self.config = config or Settings()
        n = W.ambient_dim
        if F_inf.ambient_dim != n:
            raise DimensionMismatchError("F_∞ e W em ambientes diferentes")
        if not W.is_real():
            raise InputError("W deve ser definida sobre ℚ")
        for j, nj in enumerate(self.logs, start=1):
            if nj.shape != (n, n):
                raise DimensionMismatchError(f"N_{j} com formato {nj.shape}")
            if not is_nilpotent(nj):
                raise NotNilpotentError(f"N_{j} não é nilpotente")
            if not nj.is_real():
                raise InputError(f"N_{j} deve ser racional")
            if not W.is_preserved_by(nj):
                raise InputError(f"N_{j} não preserva W")
        for a in range(len(self.logs)):
            for b in range(a + 1, len(self.logs)):
                if not self.logs[a].bracket(self.logs[b]).is_zero():
                    raise InputError(f"N_{a + 1} e N_{b + 1} não comutam")

    @property
    def n(self) -> int:
        return self.W.ambient_dim

    @property
    def r(self) -> int:
        return len(self.logs)

    def cone_element(self, coeffs: Optional[Sequence[Any]] = None) -> Matrix:
        coeffs = coeffs if coeffs is not None else [1] * self.r
        acc = Matrix.zero(self.n)
        for c, nj in zip(coeffs, self.logs):
            acc = acc + nj.scale(c)
        return acc

    @cached_property
    def relative(self):
        return relative_weight_filtration(self.cone_element(), self.W)

    @property
    def M(self) -> IncreasingFiltration:
        if not self.relative.exists:
            raise NonexistenceError("M(ΣN_j, W) não existe", {"status": self.relative.status, **self.relative.witness})
        return self.relative.filtration

    @cached_property
    def limit_mhs(self) -> MixedHodgeStructure:
        return MixedHodgeStructure(self.F_inf, self.M)


@dataclass
class AdmissibilityReport:
    passed: bool
    checks: Dict[str, bool]
    witnesses: Dict[str, Any] = field(default_factory=dict)


def _cone_samples(r: int) -> List[List[int]]:
    samples = [[1] * r, list(range(1, r + 1)), list(range(r, 0, -1))]
    unique: List[List[int]] = []
    for s in samples:
        if s not in unique:
            unique.append(s)
    return unique[:CONE_SAMPLES_MAX]


def admissibility_check(orbit: NilpotentOrbitData) -> AdmissibilityReport:
    """
    Relatório (sem exceções de veredito): M(N_j, W) para cada j, M do cone
    independente da amostra, (F_∞, M) EHM, N_j morfismos (-1,-1), δ comutando
    com os N_j e, se houver formas, N_j isometria infinitesimal em Gr^W.
    """
    checks: Dict[str, bool] = {}
    witnesses: Dict[str, Any] = {}

    for j, nj in enumerate(orbit.logs, start=1):
        rel = relative_weight_filtration(nj, orbit.W)
        checks[f"relative_filtration_N{j}"] = rel.exists
        if not rel.exists:
            witnesses[f"relative_filtration_N{j}"] = {"log": j, "status": rel.status, **rel.witness}

    rel = orbit.relative
    checks["relative_filtration_cone"] = rel.exists
    if not rel.exists:
        witnesses["relative_filtration_cone"] = rel.witness
        return AdmissibilityReport(passed=False, checks=checks, witnesses=witnesses)

    m = rel.filtration
    same = True
    for coeffs in _cone_samples(orbit.r):
        other = relative_weight_filtration(orbit.cone_element(coeffs), orbit.W)
        if not other.exists or other.filtration != m:
            same = False
            witnesses["cone_independence"] = {"coefficients": coeffs}
            break
    checks["cone_independence"] = same

    try:
        mhs = orbit.limit_mhs
        checks["limit_mhs"] = True
    except NotAnMHSError as exc:
        checks["limit_mhs"] = False
        witnesses["limit_mhs"] = exc.details
        return AdmissibilityReport(passed=False, checks=checks, witnesses=witnesses)

    morphisms = True
    for j, nj in enumerate(orbit.logs, start=1):
        if not mhs.is_morphism(nj, -1, -1):
            morphisms = False
            witnesses["morphism"] = {"log": j, "types": [list(t) for t in mhs.hodge_components(nj)]}
            break
    checks["morphism_minus1_minus1"] = morphisms

    delta, _ = delta_splitting(orbit.F_inf, m)
    checks["delta_commutes"] = all(delta.bracket(nj).is_zero() for nj in orbit.logs)

    if orbit.forms:
        checks["polarization_isometry"] = _forms_isometry(orbit, witnesses)

    passed = all(checks.values())
    logger.info("admissibilidade: %s", "ok" if passed else "falhou")
    return AdmissibilityReport(passed=passed, checks=checks, witnesses=witnesses)


def _forms_isometry(orbit: NilpotentOrbitData, witnesses: Dict[str, Any]) -> bool:
    # Q_k(N u, v) + Q_k(u, N v) = 0 em Gr^W_k; positividade não é testada
    for k, q in sorted(orbit.forms.items()):
        piece = graded_piece(orbit.W, k)
        if q.shape != (piece.dim, piece.dim):
            raise DimensionMismatchError(f"Q_{k} deve ser {piece.dim}×{piece.dim}")
        for j, nj in enumerate(orbit.logs, start=1):
            gn = piece.induced(nj)
            if not (gn.transpose() @ q + q @ gn).is_zero():
                witnesses["polarization_isometry"] = {"weight": k, "log": j}
                return False
    return True


# --------------- FORMA NORMAL LOCAL -----------------
class LocalNormalForm:
    """F(z, s) = e^{Σ z_j N_j}·e^{Γ(s)}·F_∞ com Γ polinomial, Γ(0) = 0, valores em 𝔮."""

    def __init__(self, orbit: NilpotentOrbitData, gamma: Optional[MatrixPolynomial] = None, check: bool = True):
        self.orbit = orbit
        self.gamma = gamma if gamma is not None else MatrixPolynomial.zero(orbit.r, orbit.n)
        if self.gamma.nvars != orbit.r or self.gamma.dim != orbit.n:
            raise DimensionMismatchError("Γ deve ter r variáveis e matrizes n × n")
        if not self.gamma.constant_term().is_zero():
            raise InputError("Γ(0) deve ser 0")
        if check and not self.gamma.is_zero():
            mhs = orbit.limit_mhs
            for mono, c in self.gamma.coefficients():
                if not mhs.in_q(c):
                    raise InputError("coeficiente de Γ fora de 𝔮", {"monomial": list(mono)})

    @classmethod
    def trivial(cls, orbit: NilpotentOrbitData) -> "LocalNormalForm":
        return cls(orbit, check=False)

    @property
    def W(self) -> IncreasingFiltration:
        return self.orbit.W


def _scalars(values: Sequence[Any], r: int, name: str) -> List[Scalar]:
    if len(values) != r:
        raise DimensionMismatchError(f"{name} deve ter {r} coordenadas")
    return [as_scalar(v) for v in values]


def evaluate_F(lnf: LocalNormalForm, z: Sequence[Any], s: Sequence[Any]) -> DecreasingFiltration:
    orbit = lnf.orbit
    zs = _scalars(z, orbit.r, "z")
    ss = _scalars(s, orbit.r, "s")
    g = nilpotent_exp(orbit.cone_element(zs)) @ nilpotent_exp(lnf.gamma.evaluate(ss))
    return orbit.F_inf.apply(g)


@dataclass
class HorizontalityReport:
    holds: bool
    membership_failures: List[Dict[str, Any]]
    slice_failures: List[int]


def horizontality_check(lnf: LocalNormalForm) -> HorizontalityReport:
    """
    Expande Ad(e^{-Γ})N_j + τ·s_j·e^{-Γ}∂_jΓ-termo como polinômio em (s, τ),
    τ marcando o fator 2πi, e testa cada coeficiente em ℘_{-1}; depois
    [Γ|_{s_j=0}, N_j] = 0 em cada fatia.
    """
    orbit = lnf.orbit
    r = orbit.r
    mhs = orbit.limit_mhs
    gamma = lnf.gamma.extend(1)
    g = gamma.exp()
    g_inv = (-gamma).exp()
    failures: List[Dict[str, Any]] = []
    for j, nj in enumerate(orbit.logs):
        ad = g_inv @ MatrixPolynomial.constant(r + 1, nj) @ g
        drift = (g_inv @ g.derivative(j)).times_variable(j).times_variable(r)
        for mono, c in (ad + drift).coefficients():
            if not mhs.in_p(c, -1):
                failures.append({"log": j + 1, "monomial": list(mono[:r]), "tau": mono[r]})
    slices = []
    for j, nj in enumerate(orbit.logs):
        sliced = lnf.gamma.restrict(j)
        n_poly = MatrixPolynomial.constant(r, nj)
        if not (sliced @ n_poly - n_poly @ sliced).is_zero():
            slices.append(j + 1)
    return HorizontalityReport(holds=not failures and not slices, membership_failures=failures, slice_failures=slices)


@dataclass
class PointGrading:
    grading: Grading
    F: DecreasingFiltration
    integral: bool


def is_integral_grading(y: Grading, lattice: Optional[IntegerLattice]) -> bool:
    if lattice is None:
        return y.operator.is_integral()
    return lattice.is_integral_operator(y.operator)


def grading_at(lnf: LocalNormalForm, z: Sequence[Any], s: Sequence[Any]) -> PointGrading:
    """Y_(F(z,s), W); NotAnMHSError fora do domínio de definição."""
    F = evaluate_F(lnf, z, s)
    y = MixedHodgeStructure(F, lnf.W).grading
    return PointGrading(grading=y, F=F, integral=is_integral_grading(y, lnf.orbit.lattice))


# --------------- GRADUAÇÕES LIMITE -----------------
@dataclass
class LimitData:
    untwisted: Grading
    twisted: Grading
    xi: Matrix
    delta: Matrix
    zeta: Matrix
    F_hat: DecreasingFiltration
    F_base: DecreasingFiltration
    checks: Dict[str, bool] = field(default_factory=dict)


def _slice_base(lnf: LocalNormalForm, s_slice: Optional[Sequence[Any]]) -> Tuple[DecreasingFiltration, Matrix]:
    orbit = lnf.orbit
    if orbit.r == 0:
        raise InputError("limite exige ao menos um logaritmo")
    others = [j + 1 for j, nj in enumerate(orbit.logs[1:], start=1) if not nj.is_zero()]
    if others:
        raise InputError("limite de um ramo exige N_j = 0 para j > 1", {"nonzero_logs": others})
    rest = list(s_slice) if s_slice is not None else [0] * (orbit.r - 1)
    values = [0] + rest
    F_base = orbit.F_inf.apply(nilpotent_exp(lnf.gamma.evaluate(_scalars(values, orbit.r, "s"))))
    return F_base, orbit.logs[0]


def limit_data(
    lnf: LocalNormalForm, s_slice: Optional[Sequence[Any]] = None, config: Optional[Settings] = None
) -> LimitData:
    """
    Limites ao longo do ramo 1 na fatia (s_2, ..., s_r):
    - não torcido Y_1 = Y_(e^{iN}·F̂, W), F̂ = e^{-ξ}·F_base;
    - torcido Y(N, Y_(F_base, M)).
    Relação e^{iδ}e^{-ζ}, ker ad N e invariância por mudança de coordenada
    são verificadas.
    """
    config = config or lnf.orbit.config
    W = lnf.W
    if not is_type_I(W):
        raise InputError("limites exigem W de tipo (I)", {"weights": W.weights()})
    F_base, n = _slice_base(lnf, s_slice)
    M = lnf.orbit.M
    base = MixedHodgeStructure(F_base, M)
    split = sl2_splitting(F_base, M, config)

    untwisted = deligne_grading(split.F_hat.apply(nilpotent_exp(n.scale(I))), W)
    via_y = deligne_Y(n, deligne_grading(split.F_hat, M), W).grading
    if via_y != untwisted:
        raise VerificationError("Y_(e^{iN}F̂, W) difere de Y(N, Y_(F̂, M))")

    twisted = deligne_Y(n, base.grading, W).grading
    if not twisted.commutes_with(n):
        raise VerificationError("limite torcido fora de ker ad N")
    g = nilpotent_exp(split.delta.scale(I)) @ nilpotent_exp(-split.zeta)
    if conjugate_grading(g, untwisted) != twisted:
        raise VerificationError("limites não se relacionam por e^{iδ}e^{-ζ}")
    for t in (Fraction(1), Fraction(-1, 2)):
        moved = F_base.apply(nilpotent_exp(n.scale(t)))
        if deligne_Y(n, deligne_grading(moved, M), W).grading != twisted:
            raise VerificationError("limite torcido depende da coordenada local", {"t": str(t)})

    logger.debug("limites calculados (normalização %s)", split.normalization)
    return LimitData(
        untwisted=untwisted,
        twisted=twisted,
        xi=split.xi,
        delta=split.delta,
        zeta=split.zeta,
        F_hat=split.F_hat,
        F_base=F_base,
        checks={
            "untwisted_equals_deligne_Y": True,
            "twisted_in_ker_ad_N": True,
            "conjugate_by_exp_i_delta_exp_minus_zeta": True,
            "coordinate_independent": True,
            "commute_untwisted": untwisted.commutes_with(n),
        },
    )


def limit_grading_untwisted(lnf: LocalNormalForm, s_slice: Optional[Sequence[Any]] = None) -> Grading:
    return limit_data(lnf, s_slice).untwisted


def limit_grading_twisted(lnf: LocalNormalForm, s_slice: Optional[Sequence[Any]] = None) -> Grading:
    return limit_data(lnf, s_slice).twisted


# --------------- GRADUAÇÃO INVARIANTE -----------------
@dataclass
class InvariantGrading:
    grading: Grading
    e0: Vector
    sing_zero: bool = True


def _anf_of(orbit: NilpotentOrbitData) -> ANFData:
    return ANFData(W=orbit.W, logs=orbit.logs, lattice=orbit.lattice)


def invariant_grading(orbit: NilpotentOrbitData) -> InvariantGrading:
    """
    Y_∞ = Y(ΣN_j, Y_(F_∞, M)), conferida com e^{iδ}·Y_(e^{iN}F̃, W). Recusa
    quando sing ≠ 0.
    """
    if not is_type_I(orbit.W):
        raise InputError("graduação invariante exige W de tipo (I)")
    anf = _anf_of(orbit)
    sing = sing_class(anf)
    if not sing.is_zero:
        logger.warning("sing != 0: graduação invariante indefinida")
        raise NonexistenceError(
            "sing(ν) != 0: a graduação invariante não está definida",
            {"sing": [format_scalar(x) for x in sing.coords]},
        )
    n = orbit.cone_element()
    M = orbit.M
    y = deligne_Y(n, orbit.limit_mhs.grading, orbit.W).grading

    delta, F_tilde = delta_splitting(orbit.F_inf, M)
    split_value = deligne_grading(F_tilde.apply(nilpotent_exp(n.scale(I))), orbit.W)
    if conjugate_grading(nilpotent_exp(delta.scale(I)), split_value) != y:
        raise VerificationError("Y_∞ difere de e^{iδ}·Y_(e^{iN}F̃, W)")
    for j, nj in enumerate(orbit.logs, start=1):
        if not y.commutes_with(nj):
            raise VerificationError(f"Y_∞ não comuta com N_{j}")

    v = y.eigenspace(0).basis[0]
    e0 = tuple(x / anf.phi(v) for x in v)
    for j, nj in enumerate(orbit.logs, start=1):
        if any(not x.is_zero() for x in nj.apply(e0)):
            raise VerificationError(f"e0 fora de ker N_{j}")
    return InvariantGrading(grading=y, e0=e0)


def cone_independence(orbit: NilpotentOrbitData, samples: Optional[Sequence[Sequence[int]]] = None) -> Dict[str, Any]:
    """Ŷ = Y(N, Y_(F̂, M)) não depende de N no cone (amostras positivas)."""
    M = orbit.M
    split = sl2_splitting(orbit.F_inf, M, orbit.config)
    y_m = deligne_grading(split.F_hat, M)
    reference: Optional[Grading] = None
    checked = []
    for coeffs in samples or _cone_samples(orbit.r):
        if any(c <= 0 for c in coeffs):
            raise InputError("amostras do cone exigem coeficientes positivos")
        n = orbit.cone_element(coeffs)
        rel = relative_weight_filtration(n, orbit.W)
        if not rel.exists or rel.filtration != M:
            return {"independent": False, "coefficients": list(coeffs), "reason": "relative-filtration"}
        y = deligne_Y(n, y_m, orbit.W).grading
        if reference is None:
            reference = y
        elif y != reference:
            return {"independent": False, "coefficients": list(coeffs), "reason": "grading"}
        checked.append(list(coeffs))
    return {"independent": True, "samples": checked}


# --------------- SONDAS NUMÉRICAS -----------------
def to_numpy(m: Matrix) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in m.rows], dtype=complex).reshape(m.nrows, m.ncols)


def deviation(a: Matrix, b: Matrix) -> float:
    """Norma do máximo da diferença, em ponto flutuante."""
    diff = to_numpy(a) - to_numpy(b)
    return float(np.max(np.abs(diff))) if diff.size else 0.0


def _pattern_values(pattern: str, r: int, m: int, weights: Optional[Sequence[int]]) -> List[int]:
    if pattern == "condition-1":
        w = list(weights) if weights else [1] * r
        return [m * c for c in w]
    if pattern == "condition-2":
        p = list(weights) if weights else list(range(r, 0, -1))
        return [m ** e for e in p]
    raise InputError(f"padrão desconhecido: {pattern}", {"allowed": ["condition-1", "condition-2"]})


@dataclass
class ProbeResult:
    predicted: Grading
    table: pd.DataFrame
    monotone: bool
    pattern: str

    def to_csv(self) -> str:
        return self.table.to_csv(index=False)


def multivariable_limit_probe(
    lnf: LocalNormalForm,
    pattern: str = "condition-1",
    weights: Optional[Sequence[int]] = None,
    depth: Optional[int] = None,
    config: Optional[Settings] = None,
) -> ProbeResult:
    """
    Previsão Y(ΣN_j, Y_(F̂, M)) e desvios de Y_(F(iy), W) ao longo de
    y = padrão(2^k), k = 1..depth. Não afirma convergência: só registra.
    """
    orbit = lnf.orbit
    config = config or orbit.config
    depth = depth if depth is not None else config.probe_depth
    if not is_type_I(orbit.W):
        raise InputError("sonda exige W de tipo (I)")
    try:
        anf = _anf_of(orbit)
    except InputError:
        anf = None
    if anf is not None and not sing_class(anf).is_zero:
        raise NonexistenceError("sing(ν) != 0: sem limite previsto")
    if weights is not None and len(weights) != orbit.r:
        raise DimensionMismatchError(f"padrão deve ter {orbit.r} pesos")

    split = sl2_splitting(orbit.F_inf, orbit.M, config)
    predicted = deligne_Y(orbit.cone_element(), deligne_grading(split.F_hat, orbit.M), orbit.W).grading

    rows: List[Dict[str, Any]] = []
    zero_s = [0] * orbit.r
    for k in range(1, depth + 1):
        ys = _pattern_values(pattern, orbit.r, 2 ** k, weights)
        y = grading_at(lnf, [Scalar(0, v) for v in ys], zero_s).grading
        dev = deviation(y.operator, predicted.operator)
        rows.append({"k": k, "y": " ".join(str(v) for v in ys), "y_min": min(ys), "deviation": dev, "exact_zero": y == predicted})
    table = pd.DataFrame(rows, columns=["k", "y", "y_min", "deviation", "exact_zero"])
    table["ratio"] = table["deviation"].shift(1) / table["deviation"]
    tail = table[table["y_min"] >= 4]["deviation"].to_numpy()
    monotone = bool(np.all(np.diff(tail) <= 1e-12 * np.maximum(tail[:-1], 1.0))) if len(tail) > 1 else True
    return ProbeResult(predicted=predicted, table=table, monotone=monotone, pattern=pattern)


def gamma_deviation(lnf: LocalNormalForm, z: Sequence[Any], s: Sequence[Any]) -> float:
    """Parte do desvio atribuída a Γ: |Y(z, s) - Y(z, 0)|_max."""
    base = grading_at(lnf, z, [0] * lnf.orbit.r).grading
    return deviation(grading_at(lnf, z, s).grading.operator, base.operator)


# --------------- VALOR DA FUNÇÃO NORMAL NO LIMITE -----------------
@dataclass
class NFValue:
    representative: Vector
    zero: bool
    K: Subspace
    F0K: Subspace
    K_lattice: List[Vector]
    limit: Grading
    integral_grading: Grading


def _real_split(v: Sequence[Scalar]) -> Tuple[Scalar, ...]:
    return tuple(Scalar(x.re) for x in v) + tuple(Scalar(x.im) for x in v)


def in_hodge_plus_lattice(v: Vector, f_space: Subspace, lattice_vectors: Sequence[Vector]) -> bool:
    """v ∈ F + L com F subespaço complexo e L reticulado: teste em ℚ^{2n}."""
    n = len(v)
    real_gens = []
    for b in f_space.basis:
        real_gens.append(_real_split(b))
        real_gens.append(_real_split(tuple(x * I for x in b)))
    ann = annihilator(Subspace(2 * n, real_gens))
    target = ann.apply(_real_split(v))
    if not lattice_vectors:
        return all(x.is_zero() for x in target)
    cols = [ann.apply(_real_split(k)) for k in lattice_vectors]
    if ann.nrows == 0:
        return True
    return integer_solve(Matrix.from_columns(cols, ann.nrows), target) is not None


def grading_from_lift(anf: ANFData, lift: Vector) -> Grading:
    return Grading.from_eigenspaces([(0, [lift]), (-1, list(anf.H.basis))], anf.n)


def limit_nf_value(orbit: NilpotentOrbitData, y_z: Optional[Grading] = None) -> NFValue:
    """
    ν(p) = (Y(p) - Y_ℤ)(e0) em K = H ∩ ∩ker N_j, reduzido módulo F⁰K + K_ℤ.
    Sem Y_ℤ, procura a graduação inteira T-invariante (existe sse σ = 0).
    """
    if orbit.lattice is None:
        raise InputError("valor limite exige reticulado")
    anf = _anf_of(orbit)
    limit = invariant_grading(orbit).grading
    if y_z is None:
        if orbit.r != 1:
            raise InputError("Y_ℤ é obrigatória para r > 1")
        lift = sigma_integral_lift(anf)
        if lift is None:
            raise NonexistenceError("não existe graduação inteira T-invariante (σ != 0)")
        y_z = grading_from_lift(anf, lift)
    if not is_grading_of(y_z, orbit.W):
        raise InputError("Y_ℤ não gradua W")
    if not orbit.lattice.is_integral_operator(y_z.operator):
        raise NotIntegralError("Y_ℤ não é inteira no reticulado")
    for j, nj in enumerate(orbit.logs, start=1):
        if not y_z.commutes_with(nj):
            raise NonexistenceError(f"Y_ℤ não é T-invariante (não comuta com N_{j})", {"log": j})

    v = y_z.eigenspace(0).basis[0]
    e0 = tuple(x / anf.phi(v) for x in v)
    rep = (limit.operator - y_z.operator).apply(e0)

    K = anf.H
    for nj in orbit.logs:
        K = K & kernel(nj)
    if not K.contains(rep):
        raise VerificationError("representante fora de K")
    F0K = orbit.F_inf.step(0) & K
    ann_rows = annihilator(K)
    coords = [orbit.lattice.basis[i] for i in range(orbit.lattice.rank)]
    if ann_rows.nrows:
        images = Matrix.from_columns([ann_rows.apply(b) for b in coords], ann_rows.nrows)
        K_lat = [orbit.lattice.vector_from(c) for c in integer_kernel(images)]
    else:
        K_lat = list(coords)
    zero = in_hodge_plus_lattice(rep, F0K, K_lat)
    return NFValue(
        representative=rep,
        zero=zero,
        K=K,
        F0K=F0K,
        K_lattice=K_lat,
        limit=limit,
        integral_grading=y_z,
    )
