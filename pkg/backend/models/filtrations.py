# backend/models/filtrations.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from ..errors import DimensionMismatchError, InputError, NotAGradingError, NotNilpotentError
from .linalg import (
    Frame,
    Matrix,
    Subspace,
    Vector,
    ZERO,
    eigen_decompose,
    is_nilpotent,
    kernel,
    linear_combination,
    solve_in_span,
)

logger = logging.getLogger(__name__)


def _scan_bounds(
    raw: Callable[[int], Subspace], recorded: Sequence[int], n: int, increasing: bool
) -> Tuple[int, int]:
    zero_dim, full_dim = 0, n
    lo_rec, hi_rec = min(recorded), max(recorded)
    if increasing:
        lo = next(k for k in range(lo_rec - 1, hi_rec + 2) if raw(k).dim > zero_dim) if n else 0
        hi = next(k for k in range(lo_rec - 1, hi_rec + 2) if raw(k).dim == full_dim)
        return lo, hi
    lo = max(p for p in range(lo_rec - 1, hi_rec + 2) if raw(p).dim == full_dim)
    hi = min(p for p in range(lo_rec - 1, hi_rec + 2) if raw(p).dim == zero_dim)
    return lo, hi


class IncreasingFiltration:
    """
    Filtração crescente 0 = L_a ⊆ ... ⊆ L_b = V.

    Convenção de índices: abaixo do menor índice registrado vale 0, acima
    do maior vale V, e lacunas repetem o passo registrado imediatamente abaixo.
    Internamente guardamos a forma canônica em [lo, hi]: L_{lo} é o primeiro
    passo não nulo e L_{hi} o primeiro igual a V.
    """

    kind = "increasing"

    def __init__(self, ambient_dim: int, steps: Dict[int, Subspace]):
        if not steps:
            raise InputError("filtração sem passos")
        for k, s in steps.items():
            if s.ambient_dim != ambient_dim:
                raise DimensionMismatchError(f"passo {k} em ambiente de dimensão {s.ambient_dim}")
        recorded = sorted(steps)

        def raw(k: int) -> Subspace:
            if k < recorded[0]:
                return Subspace.zero(ambient_dim)
            if k > recorded[-1]:
                return Subspace.full(ambient_dim)
            return steps[max(r for r in recorded if r <= k)]

        for k in range(recorded[0], recorded[-1]):
            if not raw(k) <= raw(k + 1):
                raise InputError(f"filtração crescente não encaixada no índice {k}")

        self.ambient_dim = ambient_dim
        self.lo, self.hi = _scan_bounds(raw, recorded, ambient_dim, increasing=True)
        self._steps: Dict[int, Subspace] = {k: raw(k) for k in range(self.lo, self.hi + 1)}

    @classmethod
    def from_weighted_vectors(cls, weighted: Iterable[Tuple[int, Sequence[Any]]], n: int) -> "IncreasingFiltration":
        """L_k = span dos vetores de peso <= k."""
        items = list(weighted)
        if not items:
            return cls(n, {0: Subspace.full(n)})
        ws = sorted({w for w, _ in items})
        steps = {k: Subspace(n, [v for w, v in items if w <= k]) for k in range(ws[0], ws[-1] + 1)}
        return cls(n, steps)

    @classmethod
    def pure(cls, n: int, weight: int) -> "IncreasingFiltration":
        return cls(n, {weight: Subspace.full(n)})

    def step(self, k: int) -> Subspace:
        if k < self.lo:
            return Subspace.zero(self.ambient_dim)
        if k >= self.hi:
            return Subspace.full(self.ambient_dim)
        return self._steps[k]

    __getitem__ = step

    def steps(self) -> Dict[int, Subspace]:
        return dict(self._steps)

    def gr_dim(self, k: int) -> int:
        return self.step(k).dim - self.step(k - 1).dim

    def weights(self) -> List[int]:
        return [k for k in range(self.lo, self.hi + 1) if self.gr_dim(k) > 0]

    def index_range(self) -> range:
        return range(self.lo - 1, self.hi + 1)

    # --------------- operações derivadas -----------------
    def shift(self, m: int) -> "IncreasingFiltration":
        """L[m]_k = L_{k-m}: todos os pesos sobem m."""
        return IncreasingFiltration(self.ambient_dim, {k + m: s for k, s in self._steps.items()})

    def apply(self, g: Matrix) -> "IncreasingFiltration":
        return IncreasingFiltration(self.ambient_dim, {k: s.apply(g) for k, s in self._steps.items()})

    def conj(self) -> "IncreasingFiltration":
        return IncreasingFiltration(self.ambient_dim, {k: s.conj() for k, s in self._steps.items()})

    def is_real(self) -> bool:
        return all(s.is_real() for s in self._steps.values())

    def restrict(self, u: Subspace) -> Dict[int, Subspace]:
        return {k: s & u for k, s in self._steps.items()}

    def is_preserved_by(self, op: Matrix) -> bool:
        return all(s.apply(op) <= s for s in self._steps.values())

    def is_shifted_by(self, op: Matrix, shift: int) -> bool:
        """op·L_k ⊆ L_{k+shift} para todo k."""
        return all(self.step(k).apply(op) <= self.step(k + shift) for k in self.index_range())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IncreasingFiltration):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.lo == other.lo
            and self.hi == other.hi
            and self._steps == other._steps
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.ambient_dim, self.lo, tuple(self._steps.items())))

    def __repr__(self) -> str:
        dims = {k: s.dim for k, s in self._steps.items()}
        return f"IncreasingFiltration(dims={dims})"


class DecreasingFiltration:
    """
    Filtração decrescente V = F^a ⊇ ... ⊇ F^b = 0 sobre ℚ(i).
    Abaixo do menor índice registrado vale V, acima do maior vale 0;
    lacunas repetem o passo registrado imediatamente acima.
    """

    kind = "decreasing"

    def __init__(self, ambient_dim: int, steps: Dict[int, Subspace]):
        if not steps:
            raise InputError("filtração sem passos")
        for p, s in steps.items():
            if s.ambient_dim != ambient_dim:
                raise DimensionMismatchError(f"passo {p} em ambiente de dimensão {s.ambient_dim}")
        recorded = sorted(steps)

        def raw(p: int) -> Subspace:
            if p < recorded[0]:
                return Subspace.full(ambient_dim)
            if p > recorded[-1]:
                return Subspace.zero(ambient_dim)
            return steps[min(r for r in recorded if r >= p)]

        for p in range(recorded[0], recorded[-1]):
            if not raw(p + 1) <= raw(p):
                raise InputError(f"filtração decrescente não encaixada no índice {p}")

        self.ambient_dim = ambient_dim
        self.lo, self.hi = _scan_bounds(raw, recorded, ambient_dim, increasing=False)
        self._steps: Dict[int, Subspace] = {p: raw(p) for p in range(self.lo, self.hi + 1)}

    @classmethod
    def from_weighted_vectors(cls, weighted: Iterable[Tuple[int, Sequence[Any]]], n: int) -> "DecreasingFiltration":
        """F^p = span dos vetores de índice >= p."""
        items = list(weighted)
        if not items:
            return cls(n, {0: Subspace.full(n)})
        ps = sorted({p for p, _ in items})
        steps = {p: Subspace(n, [v for q, v in items if q >= p]) for p in range(ps[0], ps[-1] + 1)}
        return cls(n, steps)

    def step(self, p: int) -> Subspace:
        if p <= self.lo:
            return Subspace.full(self.ambient_dim)
        if p >= self.hi:
            return Subspace.zero(self.ambient_dim)
        return self._steps[p]

    __getitem__ = step

    def steps(self) -> Dict[int, Subspace]:
        return dict(self._steps)

    def index_range(self) -> range:
        return range(self.lo, self.hi + 1)

    def apply(self, g: Matrix) -> "DecreasingFiltration":
        return DecreasingFiltration(self.ambient_dim, {p: s.apply(g) for p, s in self._steps.items()})

    def conj(self) -> "DecreasingFiltration":
        return DecreasingFiltration(self.ambient_dim, {p: s.conj() for p, s in self._steps.items()})

    def is_real(self) -> bool:
        return all(s.is_real() for s in self._steps.values())

    def is_preserved_by(self, op: Matrix) -> bool:
        return all(s.apply(op) <= s for s in self._steps.values())

    def is_shifted_by(self, op: Matrix, shift: int) -> bool:
        """op·F^p ⊆ F^{p+shift}."""
        return all(self.step(p).apply(op) <= self.step(p + shift) for p in self.index_range())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DecreasingFiltration):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.lo == other.lo
            and self.hi == other.hi
            and self._steps == other._steps
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.ambient_dim, self.lo, tuple(self._steps.items())))

    def __repr__(self) -> str:
        dims = {p: s.dim for p, s in self._steps.items()}
        return f"DecreasingFiltration(dims={dims})"


# --------------- GRADUAÇÕES -----------------
class Grading:
    """Operador semissimples com espectro inteiro e seus autoespaços (ordem decrescente)."""

    def __init__(self, operator: Matrix, expected: Optional[Iterable[int]] = None):
        self.operator = operator
        self.ambient_dim = operator.nrows
        self.eigen_pairs: List[Tuple[int, Subspace]] = eigen_decompose(operator, expected)
        self._frame: Optional[Tuple[Frame, List[int]]] = None

    @classmethod
    def from_eigenspaces(cls, pairs: Iterable[Tuple[int, Sequence[Vector]]], n: int) -> "Grading":
        vectors: List[Vector] = []
        weights: List[int] = []
        for k, vecs in pairs:
            for v in vecs:
                vectors.append(tuple(v))
                weights.append(k)
        if len(vectors) != n:
            raise NotAGradingError("autoespaços não somam dim V", {"vectors": len(vectors), "dim": n})
        frame = Frame(vectors)
        op = frame.from_frame(Matrix.diagonal(weights))
        return cls(op, set(weights))

    @classmethod
    def scalar(cls, n: int, weight: int) -> "Grading":
        return cls(Matrix.identity(n).scale(weight), [weight])

    @property
    def spectrum(self) -> List[int]:
        return [k for k, _ in self.eigen_pairs]

    def eigenspace(self, k: int) -> Subspace:
        for lam, e in self.eigen_pairs:
            if lam == k:
                return e
        return Subspace.zero(self.ambient_dim)

    def frame(self) -> Tuple[Frame, List[int]]:
        """Base de autovetores (concatenada por autovalor) e os pesos de cada coluna."""
        if self._frame is None:
            vectors: List[Vector] = []
            weights: List[int] = []
            for k, e in self.eigen_pairs:
                vectors.extend(e.basis)
                weights.extend([k] * e.dim)
            self._frame = (Frame(vectors), weights)
        return self._frame

    def filtration(self) -> IncreasingFiltration:
        """W_k = ⊕_{i<=k} E_i."""
        frame, weights = self.frame()
        return IncreasingFiltration.from_weighted_vectors(zip(weights, frame.vectors), self.ambient_dim)

    def ad_components(self, x: Matrix) -> Dict[int, Matrix]:
        """Decomposição de x em autocomponentes de ad Y: [Y, X_m] = m·X_m."""
        frame, weights = self.frame()
        xf = frame.to_frame(x)
        n = self.ambient_dim
        buckets: Dict[int, List[List[Any]]] = {}
        for i in range(n):
            for j in range(n):
                entry = xf[i, j]
                if entry.is_zero():
                    continue
                m = weights[i] - weights[j]
                if m not in buckets:
                    buckets[m] = [[0] * n for _ in range(n)]
                buckets[m][i][j] = entry
        return {m: frame.from_frame(Matrix(rows, n)) for m, rows in sorted(buckets.items())}

    def ad_component(self, x: Matrix, m: int) -> Matrix:
        return self.ad_components(x).get(m, Matrix.zero(self.ambient_dim))

    def conj(self) -> "Grading":
        return Grading(self.operator.conj(), self.spectrum)

    def is_real(self) -> bool:
        return self.operator.is_real()

    def commutes_with(self, x: Matrix) -> bool:
        return self.operator.bracket(x).is_zero()

    def preserves(self, f: DecreasingFiltration) -> bool:
        return f.is_preserved_by(self.operator)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Grading):
            return NotImplemented
        return self.operator == other.operator

    def __hash__(self) -> int:
        return hash(self.operator)

    def __repr__(self) -> str:
        dims = {k: e.dim for k, e in self.eigen_pairs}
        return f"Grading(eigen_dims={dims})"


def is_grading_of(y: Grading, w: IncreasingFiltration) -> bool:
    """L_k = E_k(Y) ⊕ L_{k-1} para todo k."""
    if y.ambient_dim != w.ambient_dim:
        raise DimensionMismatchError("graduação e filtração em ambientes diferentes")
    ks = set(w.index_range()) | set(y.spectrum)
    for k in range(min(ks), max(ks) + 1):
        e = y.eigenspace(k)
        below = w.step(k - 1)
        if not (e & below).is_zero():
            return False
        if (e + below) != w.step(k):
            return False
    return True


def conjugate_grading(g: Matrix, y: Grading) -> Grading:
    """g.Y = g·Y·g⁻¹ (espectro preservado)."""
    return Grading(g @ y.operator @ g.inverse(), y.spectrum)


# --------------- PEDAÇOS GRADUADOS -----------------
@dataclass
class GradedPiece:
    """
    Gr_k = W_k / W_{k-1} realizado por um complemento escolhido.
    Coordenadas de uma classe são os coeficientes no complemento.
    """

    index: int
    dim: int
    complement: List[Vector]
    lower: Subspace
    ambient_dim: int

    def project(self, v: Sequence[Any]) -> Vector:
        coeffs = solve_in_span(self.complement + list(self.lower.basis), v, self.ambient_dim)
        if coeffs is None:
            raise InputError(f"vetor fora de W_{self.index}")
        return tuple(coeffs[: self.dim])

    def lift(self, coords: Sequence[Any]) -> Vector:
        return linear_combination(coords, self.complement, self.ambient_dim)

    def induced(self, op: Matrix) -> Matrix:
        """Matriz do operador induzido em Gr_k (op deve preservar W)."""
        cols = [self.project(op.apply(c)) for c in self.complement]
        return Matrix.from_columns(cols, self.dim) if self.dim else Matrix.zero(0)


def graded_piece(w: IncreasingFiltration, k: int) -> GradedPiece:
    lower = w.step(k - 1)
    comp = w.step(k).extend_basis(lower)
    return GradedPiece(index=k, dim=len(comp), complement=comp, lower=lower, ambient_dim=w.ambient_dim)


# --------------- CADEIAS DE JORDAN -----------------
@dataclass
class JordanString:
    top: Vector
    length: int
    vectors: List[Vector] = field(default_factory=list)  # top, n·top, ..., n^{len-1}·top


def jordan_strings(n: Matrix) -> List[JordanString]:
    """
    Cadeias de Jordan de um nilpotente via núcleos de potências.
    Ordem determinística: comprimento decrescente, depois pivô da base canônica.
    """
    if not is_nilpotent(n):
        raise NotNilpotentError("cadeias de Jordan exigem operador nilpotente")
    dim = n.nrows
    if dim == 0:
        return []
    kernels = [Subspace.zero(dim)]
    power = Matrix.identity(dim)
    while kernels[-1].dim < dim:
        power = power @ n
        kernels.append(kernel(power))
    top_level = len(kernels) - 1

    strings: List[JordanString] = []
    for level in range(top_level, 0, -1):
        # vetores das cadeias existentes que estão na altura `level`
        existing = [s.vectors[s.length - level] for s in strings if s.length >= level]
        base = Subspace(dim, list(kernels[level - 1].basis) + existing)
        for top in kernels[level].extend_basis(base):
            vecs = [top]
            for _ in range(level - 1):
                vecs.append(n.apply(vecs[-1]))
            strings.append(JordanString(top=top, length=level, vectors=vecs))
    return strings


def _string_weights(strings: List[JordanString], center: int) -> List[Tuple[int, Vector]]:
    out: List[Tuple[int, Vector]] = []
    for s in strings:
        for t, v in enumerate(s.vectors):
            out.append((center + s.length - 1 - 2 * t, v))
    return out


def monodromy_weight_filtration(n: Matrix, center: int = 0) -> IncreasingFiltration:
    """Filtração de monodromia de n centrada em `center` (peso center+ℓ-1-2t)."""
    strings = jordan_strings(n)
    if not strings:
        return IncreasingFiltration.pure(n.nrows, center)
    return IncreasingFiltration.from_weighted_vectors(_string_weights(strings, center), n.nrows)


def monodromy_grading(n: Matrix, center: int = 0) -> Grading:
    """Graduação das cadeias de Jordan: divide a filtração de monodromia e [Y, n] = -2n."""
    strings = jordan_strings(n)
    if not strings:
        return Grading.scalar(n.nrows, center)
    weighted = _string_weights(strings, center)
    by_weight: Dict[int, List[Vector]] = {}
    for w, v in weighted:
        by_weight.setdefault(w, []).append(v)
    return Grading.from_eigenspaces(sorted(by_weight.items(), reverse=True), n.nrows)


# --------------- FILTRAÇÃO RELATIVA -----------------
@dataclass
class RelativeFiltrationResult:
    status: str  # "exists" | "does-not-exist" | "candidate-not-found"
    filtration: Optional[IncreasingFiltration] = None
    grading: Optional[Grading] = None
    witness: Dict[str, Any] = field(default_factory=dict)

    @property
    def exists(self) -> bool:
        return self.status == "exists"


def verify_relative_filtration(n: Matrix, w: IncreasingFiltration, m: IncreasingFiltration) -> Tuple[bool, Dict[str, Any]]:
    """
    Verificador independente dos dois axiomas:
    (i) n·M_k ⊆ M_{k-2};
    (ii) em cada Gr^W_j, M induz a filtração de monodromia centrada em j
         (checado por dimensões e sobrejetividade de n^ℓ entre os pedaços).
    """
    for k in range(m.lo - 1, m.hi + 2):
        if not m.step(k).apply(n) <= m.step(k - 2):
            return False, {"axiom": "shift", "index": k}
    span_lo, span_hi = m.lo - 2, m.hi + 2
    for j in w.weights():
        wj, wj1 = w.step(j), w.step(j - 1)

        def a(k: int) -> Subspace:
            return (m.step(k) & wj) + wj1

        for k in range(span_lo, span_hi + 1):
            if not a(k).apply(n) <= a(k - 2):
                return False, {"axiom": "graded-shift", "weight": j, "index": k}
        for ell in range(1, max(span_hi - j, j - span_lo) + 1):
            up = a(j + ell).dim - a(j + ell - 1).dim
            down = a(j - ell).dim - a(j - ell - 1).dim
            if up != down:
                return False, {"axiom": "symmetry", "weight": j, "ell": ell, "dims": [up, down]}
            if up == 0:
                continue
            image_ = a(j + ell).apply(n.power(ell)) + a(j - ell - 1)
            if image_ != a(j - ell):
                return False, {"axiom": "hard-lefschetz", "weight": j, "ell": ell}
    return True, {}


def relative_weight_filtration(n: Matrix, w: IncreasingFiltration) -> RelativeFiltrationResult:
    """
    Filtração de peso relativa M(n, W), construída nível a nível de baixo para cima:
    cadeias de Jordan do induzido em Gr^W_j são levantadas com correção u ∈ W_{j-1}
    tal que n^{ℓ+1}(v + u) ∈ M_{j-ℓ-2}. Se a correção não existe, isso certifica
    a não existência (M ∩ W_{j-1} é a filtração relativa de W_{j-1}).
    """
    if not is_nilpotent(n):
        raise NotNilpotentError("filtração relativa exige n nilpotente")
    if n.nrows != w.ambient_dim:
        raise DimensionMismatchError("n e W em ambientes diferentes")
    if not w.is_preserved_by(n):
        raise InputError("n não preserva W")

    dim = w.ambient_dim
    weighted: List[Tuple[int, Vector]] = []

    def m_prime(k: int) -> Subspace:
        return Subspace(dim, [v for wt, v in weighted if wt <= k])

    for j in w.weights():
        piece = graded_piece(w, j)
        u = piece.lower
        strings = jordan_strings(piece.induced(n))
        level_vectors: List[Tuple[int, Vector]] = []
        for s in strings:
            ell = s.length - 1
            v = piece.lift(s.top)
            pw = n.power(ell + 1)
            target = pw.apply(v)
            generators = [pw.apply(b) for b in u.basis]
            lower = list(m_prime(j - ell - 2).basis)
            coeffs = solve_in_span(generators + lower, target, dim)
            if coeffs is None:
                logger.debug("filtração relativa: sem correção em Gr_%s, ℓ=%s", j, ell)
                witness = {
                    "weight": j,
                    "ell": ell,
                    "lift": [str(x) for x in v],
                    "obstruction": [str(x) for x in target],
                }
                image_condition = two_step_image_condition(n, w)
                if image_condition is not None:
                    witness["image_condition"] = image_condition
                return RelativeFiltrationResult(status="does-not-exist", witness=witness)
            correction = [ZERO] * dim
            for c, b in zip(coeffs[: len(generators)], u.basis):
                if c.is_zero():
                    continue
                correction = [x - c * y for x, y in zip(correction, b)]
            v_fixed = tuple(x + y for x, y in zip(v, correction))
            vec = v_fixed
            for t in range(ell + 1):
                level_vectors.append((j + ell - 2 * t, vec))
                vec = n.apply(vec)
        weighted.extend(level_vectors)

    m = IncreasingFiltration.from_weighted_vectors(weighted, dim)
    ok, witness = verify_relative_filtration(n, w, m)
    if not ok:
        logger.warning("filtração relativa: candidato rejeitado pelo verificador %s", witness)
        return RelativeFiltrationResult(status="candidate-not-found", witness=witness)
    by_weight: Dict[int, List[Vector]] = {}
    for wt, v in weighted:
        by_weight.setdefault(wt, []).append(v)
    grading = Grading.from_eigenspaces(sorted(by_weight.items(), reverse=True), dim)
    return RelativeFiltrationResult(status="exists", filtration=m, grading=grading)


def two_step_image_condition(n: Matrix, w: IncreasingFiltration) -> Optional[bool]:
    """
    Para W de pesos consecutivos k-1, k com Gr_k de posto 1: M(n, W) existe
    sse n(V) = n(W_{k-1}). None quando W não tem essa forma.
    """
    weights = w.weights()
    if len(weights) != 2 or weights[1] - weights[0] != 1 or w.gr_dim(weights[1]) != 1:
        return None
    low = w.step(weights[0])
    full = Subspace.full(w.ambient_dim)
    return full.apply(n) == low.apply(n)

