# backend/models/mhs.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Tuple

from ..config import Settings
from ..errors import (
    DimensionMismatchError,
    InputError,
    NotAnMHSError,
    UnsupportedRegimeError,
    VerificationError,
)
from .filtrations import DecreasingFiltration, Grading, IncreasingFiltration, is_grading_of
from .linalg import (
    I,
    Frame,
    Matrix,
    Subspace,
    Vector,
    nilpotent_exp,
    nilpotent_log,
    solve,
    sum_all,
)

logger = logging.getLogger(__name__)

HodgeType = Tuple[int, int]


# --------------- ESTRUTURA DE HODGE MISTA -----------------
def is_mhs(F: DecreasingFiltration, W: IncreasingFiltration) -> Tuple[bool, Dict[str, Any]]:
    """
    Verifica se (F, W) é uma estrutura de Hodge mista: em cada Gr^W_k,
    F^p ⊕ conj(F^{k-p+1}) = Gr^W_k ⊗ ℂ para todo p.

    Retorna (ok, diagnóstico); o diagnóstico aponta o peso e o p que falham.
    """
    if F.ambient_dim != W.ambient_dim:
        raise DimensionMismatchError("F e W em ambientes diferentes")
    if not W.is_real():
        raise InputError("W deve ser definida sobre ℚ")
    for k in W.weights():
        wk, wk1 = W.step(k), W.step(k - 1)

        def a(p: int) -> Subspace:
            return (F.step(p) & wk) + wk1

        p_lo = min(F.lo, k + 1 - F.hi)
        p_hi = max(F.hi, k + 1 - F.lo)
        for p in range(p_lo, p_hi + 1):
            ap = a(p)
            bp = a(k - p + 1).conj()
            total, meet = ap + bp, ap & bp
            if total != wk or meet != wk1:
                return False, {
                    "weight": k,
                    "p": p,
                    "graded_dim": wk.dim - wk1.dim,
                    "sum_dim": total.dim - wk1.dim,
                    "intersection_dim": meet.dim - wk1.dim,
                }
    return True, {}


@dataclass
class Bigrading:
    """Decomposição de Deligne V_ℂ = ⊕ I^{p,q} (só peças não nulas)."""

    pieces: Dict[HodgeType, Subspace]
    ambient_dim: int

    def piece(self, p: int, q: int) -> Subspace:
        return self.pieces.get((p, q), Subspace.zero(self.ambient_dim))

    def types(self) -> List[HodgeType]:
        return sorted(self.pieces, key=lambda t: (-(t[0] + t[1]), -t[0]))

    def hodge_numbers(self) -> Dict[HodgeType, int]:
        return {t: self.pieces[t].dim for t in self.types()}

    @cached_property
    def frame(self) -> Tuple[Frame, List[HodgeType]]:
        vectors: List[Vector] = []
        labels: List[HodgeType] = []
        for t in self.types():
            vectors.extend(self.pieces[t].basis)
            labels.extend([t] * self.pieces[t].dim)
        return Frame(vectors), labels

    def apply(self, g: Matrix) -> "Bigrading":
        return Bigrading({t: s.apply(g) for t, s in self.pieces.items()}, self.ambient_dim)


def _deligne_pieces(F: DecreasingFiltration, W: IncreasingFiltration) -> Dict[HodgeType, Subspace]:
    n = W.ambient_dim
    Fc = F.conj()
    pieces: Dict[HodgeType, Subspace] = {}
    for p in range(F.lo, F.hi):
        for q in range(F.lo, F.hi):
            k = p + q
            wk = W.step(k)
            if wk.is_zero():
                continue
            left = F.step(p) & wk
            if left.is_zero():
                continue
            parts = [Fc.step(q) & wk]
            j = 1
            while k - j - 1 >= W.lo:
                parts.append(Fc.step(q - j) & W.step(k - j - 1))
                j += 1
            piece = left & sum_all(parts, n)
            if not piece.is_zero():
                pieces[(p, q)] = piece
    return pieces


def verify_bigrading(bg: Bigrading, F: DecreasingFiltration, W: IncreasingFiltration) -> Dict[str, bool]:
    """Soma direta e propriedades (a), (b), (c) como identidades de subespaços."""
    n = bg.ambient_dim
    pieces = bg.pieces
    total = sum_all(pieces.values(), n)
    direct = total.is_full() and sum(s.dim for s in pieces.values()) == n

    def span_of(pred: Callable[[int, int], bool]) -> Subspace:
        return sum_all((s for (r, t), s in pieces.items() if pred(r, t)), n)

    prop_a = all(F.step(p) == span_of(lambda r, s, p=p: r >= p) for p in F.index_range())
    prop_b = all(W.step(k) == span_of(lambda r, s, k=k: r + s <= k) for k in W.index_range())
    prop_c = True
    for (p, q), s in pieces.items():
        allowed = bg.piece(q, p) + span_of(lambda r, t, p=p, q=q: r < q and t < p)
        if not s.conj() <= allowed:
            prop_c = False
            break
    return {"direct_sum": direct, "a": prop_a, "b": prop_b, "c": prop_c}


class MixedHodgeStructure:
    """
    Par (F, W) verificado, com os objetos de Deligne calculados sob demanda:
    bigraduação, graduação Y_(F,W), componentes de Hodge de endomorfismos.
    """

    def __init__(self, F: DecreasingFiltration, W: IncreasingFiltration, check: bool = True):
        self.F = F
        self.W = W
        self.n = W.ambient_dim
        if check:
            ok, diagnostic = is_mhs(F, W)
            if not ok:
                raise NotAnMHSError("(F, W) não é estrutura de Hodge mista", diagnostic)

    @cached_property
    def bigrading(self) -> Bigrading:
        bg = Bigrading(_deligne_pieces(self.F, self.W), self.n)
        report = verify_bigrading(bg, self.F, self.W)
        if not all(report.values()):
            raise VerificationError("bigraduação de Deligne falhou nos axiomas", report)
        return bg

    @cached_property
    def grading(self) -> Grading:
        by_weight: Dict[int, List[Vector]] = {}
        for (p, q), s in self.bigrading.pieces.items():
            by_weight.setdefault(p + q, []).extend(s.basis)
        y = Grading.from_eigenspaces(sorted(by_weight.items(), reverse=True), self.n)
        if not is_grading_of(y, self.W) or not y.preserves(self.F):
            raise VerificationError("Y_(F,W) não gradua W ou não preserva F")
        return y

    def hodge_components(self, x: Matrix) -> Dict[HodgeType, Matrix]:
        """x = Σ x^{a,b} com x^{a,b}·I^{p,q} ⊆ I^{p+a,q+b}."""
        frame, labels = self.bigrading.frame
        xf = frame.to_frame(x)
        buckets: Dict[HodgeType, List[List[Any]]] = {}
        for i in range(self.n):
            for j in range(self.n):
                entry = xf[i, j]
                if entry.is_zero():
                    continue
                t = (labels[i][0] - labels[j][0], labels[i][1] - labels[j][1])
                if t not in buckets:
                    buckets[t] = [[0] * self.n for _ in range(self.n)]
                buckets[t][i][j] = entry
        return {t: frame.from_frame(Matrix(rows, self.n)) for t, rows in sorted(buckets.items())}

    def in_types(self, x: Matrix, pred: Callable[[int, int], bool]) -> bool:
        return all(pred(a, b) for a, b in self.hodge_components(x))

    def is_morphism(self, x: Matrix, a: int, b: int) -> bool:
        """x é um (a,b)-morfismo: x·I^{p,q} ⊆ I^{p+a,q+b}."""
        return set(self.hodge_components(x)) <= {(a, b)}

    def in_lambda(self, x: Matrix) -> bool:
        return self.in_types(x, lambda a, b: a < 0 and b < 0)

    def in_q(self, x: Matrix) -> bool:
        """x ∈ 𝔮 = ⊕_{a<0} ℘_a."""
        return self.in_types(x, lambda a, b: a < 0)

    def in_p(self, x: Matrix, a0: int) -> bool:
        """x ∈ ℘_{a0} = ⊕_b gl^{a0,b}."""
        return self.in_types(x, lambda a, b: a == a0)

    @cached_property
    def gl_bigrading(self) -> "GlBigrading":
        frame, labels = self.bigrading.frame
        pieces: Dict[HodgeType, List[Matrix]] = {}
        for i in range(self.n):
            for j in range(self.n):
                t = (labels[i][0] - labels[j][0], labels[i][1] - labels[j][1])
                pieces.setdefault(t, []).append(frame.from_frame(Matrix.elementary(self.n, i, j)))
        return GlBigrading(pieces=dict(sorted(pieces.items())), dim=self.n)

    def lambda_basis(self) -> List[Matrix]:
        gl = self.gl_bigrading
        return [m for (a, b), ms in gl.pieces.items() if a < 0 and b < 0 for m in ms]

    def is_lambda_abelian(self) -> bool:
        basis = self.lambda_basis()
        return all(x.bracket(y).is_zero() for i, x in enumerate(basis) for y in basis[i + 1:])


@dataclass
class GlBigrading:
    """gl(V_ℂ) = ⊕ gl^{a,b}, cada peça dada por uma base de matrizes."""

    pieces: Dict[HodgeType, List[Matrix]]
    dim: int

    def subspace(self, a: int, b: int) -> Subspace:
        return Subspace(self.dim * self.dim, [m.vec() for m in self.pieces.get((a, b), [])])

    def dims(self) -> Dict[HodgeType, int]:
        return {t: len(ms) for t, ms in self.pieces.items()}

    def total_dim(self) -> int:
        return sum_all((self.subspace(a, b) for a, b in self.pieces), self.dim * self.dim).dim


# --------------- OPERAÇÕES -----------------
def deligne_bigrading(F: DecreasingFiltration, W: IncreasingFiltration) -> Bigrading:
    return MixedHodgeStructure(F, W).bigrading


def deligne_grading(F: DecreasingFiltration, W: IncreasingFiltration) -> Grading:
    return MixedHodgeStructure(F, W).grading


def gl_bigrading(F: DecreasingFiltration, W: IncreasingFiltration) -> GlBigrading:
    return MixedHodgeStructure(F, W).gl_bigrading


def lambda11(F: DecreasingFiltration, W: IncreasingFiltration) -> Subspace:
    """Λ^{-1,-1} = ⊕_{a,b<0} gl^{a,b}, como subespaço de gl(V) vetorizado."""
    mhs = MixedHodgeStructure(F, W)
    return Subspace(mhs.n * mhs.n, [m.vec() for m in mhs.lambda_basis()])


def hodge_numbers(F: DecreasingFiltration, W: IncreasingFiltration) -> Dict[HodgeType, int]:
    return MixedHodgeStructure(F, W).bigrading.hodge_numbers()


def split_equiv_report(F: DecreasingFiltration, W: IncreasingFiltration) -> Dict[str, bool]:
    """
    As três condições equivalentes de cisão sobre ℝ:
    (a) conj(I^{p,q}) = I^{q,p};
    (b) I^{p,q} = F^p ∩ conj(F^q) ∩ W_{p+q};
    (c) Y_(F,W) é real.
    """
    mhs = MixedHodgeStructure(F, W)
    bg = mhs.bigrading
    types = set(bg.pieces)
    types |= {(q, p) for p, q in types}
    cond_a = all(bg.piece(p, q).conj() == bg.piece(q, p) for p, q in types)
    Fc = F.conj()
    cond_b = True
    for p in range(F.lo, F.hi + 1):
        for q in range(F.lo, F.hi + 1):
            if (F.step(p) & Fc.step(q) & W.step(p + q)) != bg.piece(p, q):
                cond_b = False
                break
        if not cond_b:
            break
    cond_c = mhs.grading.is_real()
    report = {"a": cond_a, "b": cond_b, "c": cond_c}
    if len(set(report.values())) != 1:
        raise VerificationError("condições de cisão sobre ℝ discordam", report)
    return report


def is_split_R(F: DecreasingFiltration, W: IncreasingFiltration) -> bool:
    return split_equiv_report(F, W)["a"]


def is_type_I(W: IncreasingFiltration) -> bool:
    ws = W.weights()
    return len(ws) <= 1 or (len(ws) == 2 and ws[1] - ws[0] == 1)


def translate(lam: Matrix, F: DecreasingFiltration) -> DecreasingFiltration:
    """e^λ·F para λ nilpotente."""
    return F.apply(nilpotent_exp(lam))


# --------------- CISÕES δ E sl2 -----------------
def delta_splitting(F: DecreasingFiltration, W: IncreasingFiltration) -> Tuple[Matrix, DecreasingFiltration]:
    """
    δ real em Λ^{-1,-1} com conj(Y) = e^{-2iδ}·Y·e^{2iδ}, resolvido grau a grau
    em ad Y: δ_k = (conj(Y) - e^{-2i·ad δ_{>k}} Y)_k / (2ik), k = -2, -3, ...
    """
    mhs = MixedHodgeStructure(F, W)
    y = mhs.grading
    y_bar = y.operator.conj()
    n = mhs.n
    spread = max(y.spectrum) - min(y.spectrum)

    diff = y.ad_components(y_bar - y.operator)
    stray = [m for m in diff if m > -2]
    if stray:
        raise VerificationError("conj(Y) - Y tem componentes de peso > -2", {"weights": stray})

    delta = Matrix.zero(n)
    for k in range(-2, -spread - 1, -1):
        d = delta.scale(-2 * I)
        moved = nilpotent_exp(d) @ y.operator @ nilpotent_exp(-d)
        rhs = y.ad_component(y_bar - moved, k)
        if rhs.is_zero():
            continue
        delta_k = rhs.scale(1 / (2 * I * k))
        logger.debug("δ: componente de peso %s calculada", k)
        delta = delta + delta_k

    if not delta.is_real():
        raise VerificationError("δ não é real", {"delta": delta.to_strings()})
    if not mhs.in_lambda(delta):
        raise VerificationError("δ fora de Λ^{-1,-1}", {"delta": delta.to_strings()})
    d = delta.scale(-2 * I)
    if nilpotent_exp(d) @ y.operator @ nilpotent_exp(-d) != y_bar:
        raise VerificationError("δ não satisfaz conj(Y) = e^{-2iδ}Ye^{2iδ}")
    F_tilde = translate(delta.scale(-I), F)
    if not is_split_R(F_tilde, W):
        raise VerificationError("e^{-iδ}·F não é cindida sobre ℝ")
    return delta, F_tilde


def delta_by_dense_solve(F: DecreasingFiltration, W: IncreasingFiltration) -> Matrix:
    """
    Solução independente de δ por sistemas lineares densos sobre uma base de
    Λ^{-1,-1}: em cada grau k as incógnitas são δ_k ∈ ⊕_{a+b=k} gl^{a,b} e um
    resto em ⊕_{a+b<k} gl^{a,b}.
    """
    mhs = MixedHodgeStructure(F, W)
    y = mhs.grading.operator
    y_bar = y.conj()
    n = mhs.n
    gl = mhs.gl_bigrading.pieces
    weights = [a + b for a, b in gl]
    lowest = min(weights)
    delta = Matrix.zero(n)
    for k in range(-2, lowest - 1, -1):
        lam_k = [m for (a, b), ms in gl.items() if a < 0 and b < 0 and a + b == k for m in ms]
        rest = [m for (a, b), ms in gl.items() if a + b < k for m in ms]
        if not lam_k:
            continue
        d = delta.scale(-2 * I)
        target = y_bar - nilpotent_exp(d) @ y @ nilpotent_exp(-d)
        cols = [m.scale(2 * I * k).vec() for m in lam_k] + [m.vec() for m in rest]
        coeffs = solve(Matrix.from_columns(cols, n * n), target.vec())
        if coeffs is None:
            raise VerificationError("sistema denso para δ sem solução", {"weight": k})
        for c, m in zip(coeffs[: len(lam_k)], lam_k):
            delta = delta + m.scale(c)
    return delta


@dataclass
class SplittingResult:
    xi: Matrix
    F_hat: DecreasingFiltration
    delta: Matrix
    zeta: Matrix
    lambda_abelian: bool
    normalization: str = "abelian"
    details: Dict[str, Any] = field(default_factory=dict)


def cbh(x: Matrix, y: Matrix) -> Matrix:
    """H(x, y) = log(e^x e^y) para x, y nilpotentes num mesmo Λ."""
    return nilpotent_log(nilpotent_exp(x) @ nilpotent_exp(y))


def zeta_from(xi: Matrix, delta: Matrix) -> Matrix:
    """ζ = log(e^{-ξ}·e^{iδ})."""
    return nilpotent_log(nilpotent_exp(-xi) @ nilpotent_exp(delta.scale(I)))


def sl2_splitting(
    F: DecreasingFiltration, M: IncreasingFiltration, config: Optional[Settings] = None
) -> SplittingResult:
    """
    Cisão sl2: F̂ = e^{-ξ}·F.

    No regime abeliano (Λ^{-1,-1} comutativo) ξ = iδ exatamente. No caso
    não abeliano só respondemos com a flag ativada, devolvendo a normalização
    imaginária ξ = iδ depois de checar as duas pós-condições verificáveis.
    """
    config = config or Settings()
    mhs = MixedHodgeStructure(F, M)
    delta, _ = delta_splitting(F, M)
    abelian = mhs.is_lambda_abelian()
    if not abelian and not config.allow_nonabelian_xi:
        logger.warning("ξ: Λ^{-1,-1} não abeliano; regime não suportado")
        raise UnsupportedRegimeError(
            "ξ no caso Λ^{-1,-1} não abeliano não é suportado",
            {"lambda_dim": len(mhs.lambda_basis())},
        )
    xi = delta.scale(I)
    F_hat = F.apply(nilpotent_exp(-xi))
    if not is_split_R(F_hat, M):
        raise VerificationError("e^{-ξ}·F não é cindida sobre ℝ")
    recovered = cbh(xi, -xi.conj()).scale(1 / (2 * I))
    if recovered != delta:
        raise VerificationError("relação δ = H(ξ, -conj ξ)/2i falhou")
    zeta = zeta_from(xi, delta)
    if not zeta.is_real():
        raise VerificationError("ζ não é real", {"zeta": zeta.to_strings()})
    return SplittingResult(
        xi=xi,
        F_hat=F_hat,
        delta=delta,
        zeta=zeta,
        lambda_abelian=abelian,
        normalization="abelian" if abelian else "imaginary",
    )
