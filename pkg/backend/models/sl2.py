# backend/models/sl2.py
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..errors import InputError, NonexistenceError, VerificationError
from .filtrations import DecreasingFiltration, Grading, IncreasingFiltration, is_grading_of, relative_weight_filtration
from .linalg import Frame, Matrix, Scalar, Vector, kernel, nilpotent_exp, solve
from .mhs import deligne_grading, is_split_R, is_type_I

logger = logging.getLogger(__name__)


@dataclass
class Sl2Triple:
    n0: Matrix
    h: Matrix
    n0_plus: Matrix

    def verify(self) -> bool:
        return (
            self.h.bracket(self.n0) == self.n0.scale(-2)
            and self.h.bracket(self.n0_plus) == self.n0_plus.scale(2)
            and self.n0_plus.bracket(self.n0) == self.h
        )


@dataclass
class AdDecomposition:
    """N = Σ_j N_{-j} com [Y, N_{-j}] = -j·N_{-j}; chaves j >= 0."""

    components: Dict[int, Matrix]
    dim: int

    def component(self, j: int) -> Matrix:
        return self.components.get(j, Matrix.zero(self.dim))

    def reassemble(self) -> Matrix:
        acc = Matrix.zero(self.dim)
        for m in self.components.values():
            acc = acc + m
        return acc


def ad_decompose(n: Matrix, y: Grading, forbid_positive: bool = True) -> AdDecomposition:
    comps = y.ad_components(n)
    positive = [m for m in comps if m > 0]
    if positive and forbid_positive:
        raise InputError(
            "operador tem componentes de ad-peso positivo", {"weights": positive}
        )
    return AdDecomposition(components={-m: x for m, x in sorted(comps.items(), reverse=True)}, dim=n.nrows)


def _solve_linear_operator(
    basis: Sequence[Matrix], image_of: Any, target: Matrix, dim: int
) -> Optional[Tuple[Matrix, int]]:
    """
    Resolve L(X) = target com X = Σ c_i basis_i. Devolve (X, dim do núcleo de L
    restrito à base) ou None.
    """
    if not basis:
        return (Matrix.zero(dim), 0) if target.is_zero() else None
    images = [image_of(b) for b in basis]
    system = Matrix.from_columns([m.vec() for m in images], dim * dim)
    coeffs = solve(system, target.vec())
    if coeffs is None:
        return None
    x = Matrix.zero(dim)
    for c, b in zip(coeffs, basis):
        if not c.is_zero():
            x = x + b.scale(c)
    return x, kernel(system).dim


def sl2_complete(n0: Matrix, h: Matrix) -> Matrix:
    """N₀⁺ com [N₀⁺, N₀] = h e [h, N₀⁺] = 2N₀⁺, por solução linear exata."""
    if h.bracket(n0) != n0.scale(-2):
        raise InputError("(n0, h) não é um par sl2: [h, n0] != -2·n0")
    dim = n0.nrows
    eqs_rows = 2 * dim * dim
    cols = []
    basis = [Matrix.elementary(dim, i, j) for i in range(dim) for j in range(dim)]
    for b in basis:
        first = b.bracket(n0).vec()
        second = (h.bracket(b) - b.scale(2)).vec()
        cols.append(first + second)
    system = Matrix.from_columns(cols, eqs_rows)
    target = h.vec() + Matrix.zero(dim).vec()
    coeffs = solve(system, target)
    if coeffs is None:
        raise NonexistenceError("h não é elemento neutro de n0: o par não completa a um tripleto")
    return Matrix.from_vec(coeffs, dim, dim)


# --------------- GRADUAÇÃO Y(N, Y_M) -----------------
def _adapted_lift(y_m: Grading, w: IncreasingFiltration) -> Tuple[Frame, List[int], List[int]]:
    """
    Levantamento adaptado a Y_M: complementos de W_{k-1} ∩ E_m(Y_M) em W_k ∩ E_m(Y_M).
    Devolve a base conjunta e os rótulos (k de W, m de Y_M) por vetor.
    """
    vectors: List[Vector] = []
    ks: List[int] = []
    ms: List[int] = []
    for m, e in y_m.eigen_pairs:
        for k in w.weights():
            comp = (w.step(k) & e).extend_basis(w.step(k - 1) & e)
            vectors.extend(comp)
            ks.extend([k] * len(comp))
            ms.extend([m] * len(comp))
    if len(vectors) != w.ambient_dim:
        raise InputError("Y_M não preserva W: autoespaços não se adaptam a W")
    return Frame(vectors), ks, ms


def _grading_from_frame(frame: Frame, weights: List[int]) -> Grading:
    return Grading(frame.from_frame(Matrix.diagonal(weights)), set(weights))


def _check_preconditions(n: Matrix, y_m: Grading, w: IncreasingFiltration) -> None:
    if y_m.operator.bracket(n) != n.scale(-2):
        raise InputError("[Y_M, N] != -2N")
    if not w.is_preserved_by(n):
        raise InputError("N não preserva W")
    if not w.is_preserved_by(y_m.operator):
        raise InputError("Y_M não preserva W")


DELIGNE_METHODS = ("auto", "affine", "iterative")


@dataclass
class DeligneYResult:
    grading: Grading
    triple: Sl2Triple
    decomposition: AdDecomposition
    method: str
    unique: bool = True


def verify_deligne_conditions(n: Matrix, y_m: Grading, y: Grading, w: IncreasingFiltration) -> Tuple[bool, Dict[str, Any]]:
    """Condições (a) e (b): Y gradua W, [Y, Y_M] = 0, (N₀, H) completa e [N - N₀, N₀⁺] = 0."""
    if not is_grading_of(y, w):
        return False, {"condition": "grades-W"}
    if not y.commutes_with(y_m.operator):
        return False, {"condition": "commutes-with-Y_M"}
    dec = ad_decompose(n, y, forbid_positive=False)
    if any(j < 0 for j in dec.components):
        return False, {"condition": "non-positive-ad-weights"}
    n0 = dec.component(0)
    h = y_m.operator - y.operator
    try:
        n0_plus = sl2_complete(n0, h)
    except (InputError, NonexistenceError):
        return False, {"condition": "sl2-pair"}
    if not (n - n0).bracket(n0_plus).is_zero():
        return False, {"condition": "highest-weight"}
    return True, {}


def _affine_type_i(n: Matrix, y_m: Grading, y0: Grading, frame: Frame, ks: List[int], ms: List[int]) -> Optional[Tuple[Matrix, int]]:
    dim = n.nrows
    dec = ad_decompose(n, y0)
    n0, n_1 = dec.component(0), dec.component(1)
    basis = [
        frame.from_frame(Matrix.elementary(dim, i, j))
        for i in range(dim)
        for j in range(dim)
        if ks[i] - ks[j] == -1 and ms[i] == ms[j]
    ]
    return _solve_linear_operator(basis, lambda x: x.bracket(n0), n_1, dim)


def _iterative(n: Matrix, y_m: Grading, y0: Grading, frame: Frame, ks: List[int], ms: List[int]) -> Matrix:
    """Correção grau a grau: X_{-d} resolve [[X, N₀], N₀⁺] = [R_{-d}, N₀⁺]."""
    dim = n.nrows
    n0 = y0.ad_component(n, 0)
    h = y_m.operator - y0.operator
    n0_plus = sl2_complete(n0, h)
    spread = max(ks) - min(ks)
    x = Matrix.zero(dim)
    for d in range(1, spread + 1):
        r = nilpotent_exp(-x) @ n @ nilpotent_exp(x)
        target = y0.ad_component(r, -d).bracket(n0_plus)
        basis = [
            frame.from_frame(Matrix.elementary(dim, i, j))
            for i in range(dim)
            for j in range(dim)
            if ks[i] - ks[j] == -d and ms[i] == ms[j]
        ]
        solved = _solve_linear_operator(basis, lambda b: b.bracket(n0).bracket(n0_plus), target, dim)
        if solved is None or solved[1] != 0:
            raise VerificationError("correção de Y(N, Y_M) sem solução única", {"degree": d})
        logger.debug("Y(N, Y_M): correção de grau -%s", d)
        x = x + solved[0]
    return x


def deligne_Y(n: Matrix, y_m: Grading, w: IncreasingFiltration, method: str = "auto") -> DeligneYResult:
    """
    Graduação de Deligne Y = Y(N, Y_M).

    - tipo (I): solução afim de {Y gradua W, [Y, Y_M] = 0, [Y, N] = 0}, com
      certificado de unicidade (núcleo trivial);
    - caso geral: Y = e^X·Y₀·e^{-X} com X corrigido grau a grau.
    As pós-condições são sempre verificadas antes de devolver.
    """
    if method not in DELIGNE_METHODS:
        raise InputError(f"método desconhecido: {method}", {"allowed": list(DELIGNE_METHODS)})
    _check_preconditions(n, y_m, w)
    dim = n.nrows
    frame, ks, ms = _adapted_lift(y_m, w)
    y0 = _grading_from_frame(frame, ks)
    ws = w.weights()
    type_i = len(ws) <= 1 or (len(ws) == 2 and ws[1] - ws[0] == 1)

    y_op: Optional[Matrix] = None
    used = method
    if method in ("auto", "affine") and type_i:
        solved = _affine_type_i(n, y_m, y0, frame, ks, ms)
        if solved is not None and solved[1] == 0:
            y_op = y0.operator + solved[0]
            used = "affine"
        elif method == "affine":
            raise InputError("solução afim inexistente ou não única", {"kernel_dim": solved[1] if solved else None})
    if y_op is None:
        x = _iterative(n, y_m, y0, frame, ks, ms)
        y_op = nilpotent_exp(x) @ y0.operator @ nilpotent_exp(-x)
        used = "iterative"

    y = Grading(y_op, set(ks))
    ok, witness = verify_deligne_conditions(n, y_m, y, w)
    if not ok:
        raise VerificationError("Y(N, Y_M) falhou nas pós-condições", witness)
    dec = ad_decompose(n, y)
    n0 = dec.component(0)
    h = y_m.operator - y.operator
    triple = Sl2Triple(n0=n0, h=h, n0_plus=sl2_complete(n0, h))
    return DeligneYResult(grading=y, triple=triple, decomposition=dec, method=used)


def highest_weight_check(dec: AdDecomposition, triple: Sl2Triple) -> Tuple[bool, Dict[str, Any]]:
    """Para k > 0: [N₀⁺, N_{-k}] = 0, ad H(N_{-k}) = (k-2)·N_{-k}; e N_{-1} = 0."""
    if not dec.component(1).is_zero():
        return False, {"failed": "N_-1 != 0"}
    for k, comp in dec.components.items():
        if k <= 0:
            continue
        if not triple.n0_plus.bracket(comp).is_zero():
            return False, {"failed": "not-highest-weight", "k": k}
        if triple.h.bracket(comp) != comp.scale(k - 2):
            return False, {"failed": "H-weight", "k": k}
    return True, {}


# pontos racionais gaussianos no semiplano superior
DEFAULT_SAMPLE_POINTS: Tuple[Scalar, ...] = (
    Scalar(0, 1),
    Scalar(0, 2),
    Scalar(1, 1),
    Scalar(-1, 1),
    Scalar(Fraction(1, 2), 1),
    Scalar(-3, 2),
    Scalar(Fraction(1, 3), Fraction(1, 2)),
    Scalar(0, 5),
    Scalar(2, 3),
    Scalar(Fraction(-1, 4), Fraction(1, 7)),
)


def orbit_grading_split(
    F_hat: DecreasingFiltration,
    w: IncreasingFiltration,
    n: Matrix,
    points: Optional[Sequence[Scalar]] = None,
) -> Tuple[Grading, Dict[str, Any]]:
    """
    Fórmula da órbita cindida: Y(N, Y_M) = Y_(e^{zN}·F̂, W) para Im z > 0.
    Confere exatamente em pontos racionais gaussianos.
    """
    if not is_type_I(w):
        raise InputError("fórmula da órbita cindida exige W de tipo (I)")
    rel = relative_weight_filtration(n, w)
    if not rel.exists:
        raise NonexistenceError("M(N, W) não existe", rel.witness)
    m = rel.filtration
    if not is_split_R(F_hat, m):
        raise InputError("(F̂, M) não é cindida sobre ℝ")
    y_m = deligne_grading(F_hat, m)
    y = deligne_Y(n, y_m, w).grading
    checked = []
    for z in points or DEFAULT_SAMPLE_POINTS:
        if z.im <= 0:
            raise InputError("pontos de amostra exigem Im z > 0")
        y_z = deligne_grading(F_hat.apply(nilpotent_exp(n.scale(z))), w)
        if y_z != y:
            raise VerificationError("Y_(e^{zN}F̂, W) difere de Y(N, Y_M)", {"z": str(z)})
        checked.append(str(z))
    return y, {"points": checked, "constant": True}


def uniqueness_probe(n: Matrix, y_m: Grading, w: IncreasingFiltration, box: int = 1) -> Dict[str, Any]:
    """
    Parametrização afim de todas as graduações de W (tipo (I)) que comutam com
    Y_M: Y = Y₀ + X, X ∈ gl_{-1}(Y₀) ∩ ker ad Y_M. Testa (a)+(b) numa grade
    inteira [-box, box]^d e no ponto resolvido; conta as soluções distintas.
    """
    _check_preconditions(n, y_m, w)
    dim = n.nrows
    frame, ks, ms = _adapted_lift(y_m, w)
    y0 = _grading_from_frame(frame, ks)
    basis = [
        frame.from_frame(Matrix.elementary(dim, i, j))
        for i in range(dim)
        for j in range(dim)
        if ks[i] - ks[j] == -1 and ms[i] == ms[j]
    ]
    candidates: List[Matrix] = []
    for coeffs in itertools.product(range(-box, box + 1), repeat=len(basis)):
        x = Matrix.zero(dim)
        for c, b in zip(coeffs, basis):
            if c:
                x = x + b.scale(c)
        candidates.append(y0.operator + x)
    solved = _affine_type_i(n, y_m, y0, frame, ks, ms)
    if solved is not None:
        candidates.append(y0.operator + solved[0])
    passing = []
    for op in candidates:
        y = Grading(op, set(ks))
        if verify_deligne_conditions(n, y_m, y, w)[0] and op not in passing:
            passing.append(op)
    return {
        "parameters": len(basis),
        "grid_points": (2 * box + 1) ** len(basis),
        "kernel_dim": solved[1] if solved is not None else None,
        "solutions": [p.to_strings() for p in passing],
        "unique": len(passing) == 1 and (solved is not None and solved[1] == 0),
    }
