# backend/models/ih.py
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..errors import (
    DimensionMismatchError,
    InputError,
    NonexistenceError,
    NotIntegralError,
    NotNilpotentError,
    UnsupportedRegimeError,
    VerificationError,
)
from .filtrations import IncreasingFiltration, relative_weight_filtration
from .linalg import (
    IntegerLattice,
    Matrix,
    Subspace,
    Vector,
    ZERO,
    _as_int_rows,
    _snf_int,
    format_scalar,
    integer_solve,
    is_nilpotent,
    kernel,
    linear_combination,
    preimage,
    solve,
    solve_in_span,
)

logger = logging.getLogger(__name__)

IndexSet = Tuple[int, ...]


@dataclass
class LocalSystemData:
    """
    Sistema local unipotente num polidisco: logaritmos N_1..N_r comutando,
    agindo num subespaço A ⊆ ℚ(i)^n (por padrão tudo).
    """

    logs: List[Matrix]
    ambient_dim: int
    space: Optional[Subspace] = None
    lattice: Optional[IntegerLattice] = None

    def __post_init__(self) -> None:
        if self.space is None:
            self.space = Subspace.full(self.ambient_dim)
        for j, n in enumerate(self.logs, start=1):
            if n.shape != (self.ambient_dim, self.ambient_dim):
                raise DimensionMismatchError(f"N_{j} com formato {n.shape}")
            if not is_nilpotent(n):
                raise NotNilpotentError(f"N_{j} não é nilpotente")
            if not self.space.apply(n) <= self.space:
                raise InputError(f"N_{j} não preserva o subespaço A")
            if self.lattice is not None and not self.lattice.is_integral_operator(n):
                raise NotIntegralError(f"N_{j} não preserva o reticulado")
        for a, b in itertools.combinations(range(len(self.logs)), 2):
            if not self.logs[a].bracket(self.logs[b]).is_zero():
                raise InputError(f"N_{a + 1} e N_{b + 1} não comutam")

    @property
    def r(self) -> int:
        return len(self.logs)


@dataclass
class Summand:
    indices: IndexSet
    space: Subspace
    offset: int

    @property
    def dim(self) -> int:
        return self.space.dim

    def label(self) -> str:
        return "".join(f"N{j + 1}" for j in self.indices) or "A"


@dataclass
class IHGroup:
    degree: int
    dim: int
    representatives: List[Dict[IndexSet, Vector]] = field(default_factory=list)


class BComplex:
    """
    Complexo B^p = ⊕_{|J|=p} N_J(A) com diferencial
    (dx)_K = Σ_q (-1)^{q-1} N_{k_q} x_{K \\ k_q}.
    """

    def __init__(self, ls: LocalSystemData):
        self.ls = ls
        self.r = ls.r
        self.ambient_dim = ls.ambient_dim
        self.terms: Dict[int, List[Summand]] = {}
        for p in range(self.r + 1):
            offset = 0
            summands = []
            for J in itertools.combinations(range(self.r), p):
                space = ls.space
                for j in J:
                    space = space.apply(ls.logs[j])
                summands.append(Summand(indices=J, space=space, offset=offset))
                offset += space.dim
            self.terms[p] = summands
        self.differentials: Dict[int, Matrix] = {p: self._differential(p) for p in range(-1, self.r + 1)}
        for p in range(self.r):
            if not (self.differentials[p + 1] @ self.differentials[p]).is_zero():
                raise VerificationError("d∘d != 0", {"degree": p})

    def dim(self, p: int) -> int:
        return sum(s.dim for s in self.terms.get(p, []))

    def summand(self, p: int, indices: IndexSet) -> Summand:
        for s in self.terms[p]:
            if s.indices == indices:
                return s
        raise InputError(f"sem parcela {indices} em grau {p}")

    def _differential(self, p: int) -> Matrix:
        rows, cols = self.dim(p + 1), self.dim(p)
        if rows == 0 or cols == 0:
            return Matrix.zero(rows, cols)
        data = [[ZERO] * cols for _ in range(rows)]
        for src in self.terms[p]:
            for col_local, b in enumerate(src.space.basis):
                col = src.offset + col_local
                for dst in self.terms[p + 1]:
                    K = dst.indices
                    for q, k in enumerate(K):
                        if K[:q] + K[q + 1:] != src.indices:
                            continue
                        image = self.ls.logs[k].apply(b)
                        coords = dst.space.coordinates(image)
                        sign = 1 if q % 2 == 0 else -1
                        for i, c in enumerate(coords):
                            if not c.is_zero():
                                data[dst.offset + i][col] = data[dst.offset + i][col] + c * sign
        return Matrix(data, cols)

    def differential(self, p: int) -> Matrix:
        if p in self.differentials:
            return self.differentials[p]
        return Matrix.zero(self.dim(p + 1), self.dim(p))

    # --------------- coordenadas totais -----------------
    def to_coords(self, p: int, parts: Dict[IndexSet, Sequence[Any]]) -> Vector:
        out = [ZERO] * self.dim(p)
        for s in self.terms[p]:
            v = parts.get(s.indices)
            if v is None:
                continue
            for i, c in enumerate(s.space.coordinates(v)):
                out[s.offset + i] = c
        return tuple(out)

    def from_coords(self, p: int, coords: Sequence[Any]) -> Dict[IndexSet, Vector]:
        return {
            s.indices: linear_combination(coords[s.offset:s.offset + s.dim], s.space.basis, self.ambient_dim)
            for s in self.terms[p]
        }

    def cocycles(self, p: int) -> Subspace:
        return kernel(self.differential(p))

    def coboundaries(self, p: int) -> Subspace:
        d = self.differential(p - 1)
        return Subspace(self.dim(p), d.columns())

    def cohomology(self, p: int) -> IHGroup:
        z, b = self.cocycles(p), self.coboundaries(p)
        reps = [self.from_coords(p, v) for v in z.extend_basis(b)]
        return IHGroup(degree=p, dim=z.dim - b.dim, representatives=reps)

    def euler_characteristic(self) -> int:
        return sum((-1) ** p * self.dim(p) for p in range(self.r + 1))


def build_b_complex(ls: LocalSystemData) -> BComplex:
    return BComplex(ls)


def ih_dim(b: BComplex, p: int) -> IHGroup:
    """dim ker d_p / im d_{p-1} com representantes explícitos."""
    if p < 0 or p > b.r:
        return IHGroup(degree=p, dim=0)
    return b.cohomology(p)


# --------------- FUNÇÕES NORMAIS ADMISSÍVEIS -----------------
@dataclass
class ANFData:
    """
    Extensão de ℚ(0) por H = W_{-1}: W de pesos 0 e -1 com Gr^W_0 de posto 1,
    logaritmos com N_j(V) ⊆ W_{-1}, levantamento e0 do gerador de Gr^W_0.
    """

    W: IncreasingFiltration
    logs: List[Matrix]
    lattice: Optional[IntegerLattice] = None
    e0: Optional[Vector] = None

    def __post_init__(self) -> None:
        n = self.W.ambient_dim
        if not set(self.W.weights()) <= {-1, 0} or self.W.gr_dim(0) != 1:
            raise InputError("W deve ter pesos 0 e -1 com Gr^W_0 de posto 1", {"weights": self.W.weights()})
        h = self.H
        for j, nj in enumerate(self.logs, start=1):
            if not Subspace.full(n).apply(nj) <= h:
                raise InputError(f"N_{j}(V) não está contido em W_-1")
        if self.e0 is None:
            self.e0 = h.standard_complement()[0]
        elif h.contains(self.e0):
            raise InputError("e0 deve ser um levantamento de 1 em Gr^W_0")
        # valida comutação, nilpotência e reticulado
        LocalSystemData(self.logs, n, lattice=self.lattice)

    @property
    def n(self) -> int:
        return self.W.ambient_dim

    @property
    def H(self) -> Subspace:
        return self.W.step(-1)

    @property
    def r(self) -> int:
        return len(self.logs)

    def phi(self, v: Sequence[Any]) -> Any:
        """Projeção V → Gr^W_0 ≅ ℚ(0) normalizada por φ(e0) = 1."""
        coeffs = solve_in_span([self.e0] + list(self.H.basis), v, self.n)
        return coeffs[0]

    def sub_system(self) -> LocalSystemData:
        return LocalSystemData(self.logs, self.n, space=self.H)

    def total_system(self) -> LocalSystemData:
        return LocalSystemData(self.logs, self.n)

    def quotient_system(self) -> LocalSystemData:
        return LocalSystemData([Matrix.zero(1) for _ in self.logs], 1)


@dataclass
class ConnectingClass:
    vectors: List[Vector]  # (N_1 v, ..., N_r v)
    coords: Vector
    is_zero: bool
    lift: Vector


def _connecting_coords(anf: ANFData, cx_h: BComplex, lift: Vector) -> Vector:
    parts: Dict[IndexSet, Vector] = {}
    for j, nj in enumerate(anf.logs):
        image = nj.apply(lift)
        space = cx_h.summand(1, (j,)).space
        if not space.contains(image):
            raise NonexistenceError(
                f"N_{j + 1}(e0) fora de N_{j + 1}(H): o conector não está definido",
                {"log": j + 1, "image": [format_scalar(x) for x in image]},
            )
        parts[(j,)] = image
    return cx_h.to_coords(1, parts)


def connecting(anf: ANFData, lift: Optional[Vector] = None) -> ConnectingClass:
    """
    ∂[v] = (N_1 v, ..., N_r v) mod d B^0(H). A classe é conferida com um
    segundo levantamento v + h.
    """
    cx_h = build_b_complex(anf.sub_system())
    v = tuple(lift) if lift is not None else anf.e0
    coords = _connecting_coords(anf, cx_h, v)
    boundaries = cx_h.coboundaries(1)
    if anf.H.dim:
        other = tuple(x + y for x, y in zip(v, anf.H.basis[0]))
        other_coords = _connecting_coords(anf, cx_h, other)
        diff = tuple(x - y for x, y in zip(coords, other_coords))
        if not boundaries.contains(diff):
            raise VerificationError("classe do conector depende do levantamento")
    return ConnectingClass(
        vectors=[nj.apply(v) for nj in anf.logs],
        coords=coords,
        is_zero=boundaries.contains(coords),
        lift=v,
    )


def sing_class(anf: ANFData) -> ConnectingClass:
    """sing(ν) = ∂1 com o gerador canônico de IH^0(ℚ(0))."""
    return connecting(anf)


def invariant_lift(anf: ANFData) -> Optional[Vector]:
    """Levantamento v = e0 + h com N_j v = 0 para todo j, se existir."""
    basis = list(anf.H.basis)
    if not anf.logs:
        return anf.e0
    rows = anf.n * len(anf.logs)
    cols = [tuple(x for nj in anf.logs for x in nj.apply(h)) for h in basis]
    target = tuple(-x for nj in anf.logs for x in nj.apply(anf.e0))
    if not cols:
        return anf.e0 if all(x.is_zero() for x in target) else None
    coeffs = solve(Matrix.from_columns(cols, rows), target)
    if coeffs is None:
        return None
    return tuple(x + y for x, y in zip(anf.e0, linear_combination(coeffs, basis, anf.n)))


# --------------- TORÇÃO INTEIRA -----------------
@dataclass
class TorsionGroup:
    invariant_factors: List[int]
    diagonal: List[int]
    U: List[List[int]]
    order: int



def torsion_group(t_minus_1: Matrix, lattice: IntegerLattice) -> TorsionGroup:
    """
    G = (H_ℤ ∩ (T-1)H_ℚ) / (T-1)H_ℤ pela forma de Smith de T-1 na base do
    reticulado: G ≅ ⊕_{d_i ≠ 0} ℤ/d_i.
    """
    if not is_nilpotent(t_minus_1):
        raise NotNilpotentError("T - 1 deve ser nilpotente")
    a = lattice.operator_in_basis(t_minus_1)
    U, D, _ = _snf_int(_as_int_rows(a))
    diag = [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]
    factors = [d for d in diag if d > 1]
    order = 1
    for d in factors:
        order *= d
    return TorsionGroup(invariant_factors=factors, diagonal=diag, U=U, order=order)


@dataclass
class SigmaClass:
    components: List[int]  # z_i mod d_i, alinhado a invariant_factors
    invariant_factors: List[int]
    nonzero: bool
    lift: Vector


def _integral_h_basis(anf: ANFData) -> Tuple[List[Vector], Vector]:
    """Base de H_ℤ = V_ℤ ∩ H e levantamento inteiro e0 via Smith do funcional φ."""
    lat = anf.lattice
    assert lat is not None
    phi_row = [anf.phi(b) for b in lat.basis]
    den = 1
    for x in phi_row:
        den = math.lcm(den, x.re.denominator)
    f = [int(x.re * den) for x in phi_row]
    U, D, V = _snf_int([f])
    g = D[0][0]
    if g == 0 or Fraction(g, den) != 1:
        raise InputError("não existe levantamento inteiro de 1 ∈ Gr^W_0", {"phi_image_generator": f"{g}/{den}"})
    m = lat.rank
    sign = U[0][0]  # U = ±1
    first = [V[i][0] * sign for i in range(m)]
    h_basis = [lat.vector_from([V[i][k] for i in range(m)]) for k in range(1, m)]
    return h_basis, lat.vector_from(first)


def sigma_torsion(anf: ANFData, branch: int = 0) -> SigmaClass:
    """
    Classe de N(e0) em (H_ℤ ∩ N H_ℚ) / N H_ℤ, em coordenadas de fatores
    invariantes. Só r = 1.
    """
    if anf.r != 1:
        raise UnsupportedRegimeError("σ_ℤ só é calculada para r = 1", {"r": anf.r})
    if anf.lattice is None:
        raise InputError("σ_ℤ exige reticulado")
    if branch != 0:
        raise InputError("r = 1: só existe o ramo 0")
    n_op = anf.logs[0]
    h_basis, e0 = _integral_h_basis(anf)
    h_lat = IntegerLattice(h_basis) if h_basis else None

    def klass(lift: Vector) -> Tuple[List[int], List[int]]:
        image = n_op.apply(lift)
        if h_lat is None:
            return [], []
        a = h_lat.operator_in_basis(n_op)
        U, D, _ = _snf_int(_as_int_rows(a))
        c = [x.re for x in h_lat.coordinates(image)]
        if any(x.denominator != 1 for x in c):
            raise NotIntegralError("N(e0) fora de H_ℤ")
        ci = [int(x) for x in c]
        z = [sum(U[i][k] * ci[k] for k in range(len(ci))) for i in range(len(ci))]
        diag = [D[i][i] for i in range(len(ci))]
        for zi, d in zip(z, diag):
            if d == 0 and zi != 0:
                raise NonexistenceError("N(e0) fora de N(H_ℚ): M(N, W) não existe")
        comps = [zi % d for zi, d in zip(z, diag) if d > 1]
        return comps, [d for d in diag if d > 1]

    comps, factors = klass(e0)
    if h_basis:
        other = tuple(x + y for x, y in zip(e0, h_basis[0]))
        if klass(other)[0] != comps:
            raise VerificationError("σ_ℤ depende do levantamento inteiro")
    return SigmaClass(components=comps, invariant_factors=factors, nonzero=any(comps), lift=e0)


def sigma_integral_lift(anf: ANFData) -> Optional[Vector]:
    """h ∈ H_ℤ com N h = -N e0 (o levantamento T-invariante inteiro), ou None."""
    h_basis, e0 = _integral_h_basis(anf)
    n_op = anf.logs[0]
    if not h_basis:
        return e0 if n_op.apply(e0) == tuple([ZERO] * anf.n) else None
    cols = [n_op.apply(h) for h in h_basis]
    target = tuple(-x for x in n_op.apply(e0))
    sol = integer_solve(Matrix.from_columns(cols, anf.n), target)
    if sol is None:
        return None
    h = linear_combination(sol, h_basis, anf.n)
    return tuple(x + y for x, y in zip(e0, h))


# --------------- SEQUÊNCIA EXATA LONGA -----------------
@dataclass
class LESReport:
    exact: bool
    nodes: List[Dict[str, Any]]
    dims: Dict[str, List[int]]
    facts: Dict[str, bool]
    alternating_sum: int
    sing_zero: bool


def _image_of(m: Matrix, space: Subspace) -> Subspace:
    return Subspace(m.nrows, [m.apply(v) for v in space.basis])


def les_verify(anf: ANFData) -> LESReport:
    """
    Constrói B(H), B(V), B(ℚ(0)) com α (inclusão), β (φ em grau 0) e ∂,
    e verifica exatidão em cada nó como igualdade de subespaços.
    """
    for j, nj in enumerate(anf.logs, start=1):
        rel = relative_weight_filtration(nj, anf.W)
        if not rel.exists:
            raise NonexistenceError(
                f"M(N_{j}, W) não existe", {"log": j, "status": rel.status, **rel.witness}
            )

    cx_h = build_b_complex(anf.sub_system())
    cx_v = build_b_complex(anf.total_system())
    cx_q = build_b_complex(anf.quotient_system())
    r = anf.r

    def alpha(p: int) -> Matrix:
        cols: List[Vector] = []
        for s in cx_h.terms[p]:
            for b in s.space.basis:
                cols.append(cx_v.to_coords(p, {s.indices: b}))
        return Matrix.from_columns(cols, cx_v.dim(p))

    def beta(p: int) -> Matrix:
        if p == 0:
            return Matrix([[anf.phi(b) for s in cx_v.terms[0] for b in s.space.basis]], cx_v.dim(0))
        return Matrix.zero(cx_q.dim(p), cx_v.dim(p))

    def partial(p: int) -> Matrix:
        if p == 0:
            col = _connecting_coords(anf, cx_h, anf.e0)
            return Matrix.from_columns([col], cx_h.dim(1))
        return Matrix.zero(cx_h.dim(p + 1), cx_q.dim(p))

    nodes: List[Dict[str, Any]] = []

    def check(name: str, p: int, z: Subspace, b: Subspace, incoming: Subspace, outgoing: Optional[Matrix], target_b: Optional[Subspace]) -> None:
        ker = z & preimage(outgoing, target_b) if outgoing is not None else z
        im = incoming + b
        nodes.append({"node": f"IH^{p}({name})", "exact": ker == im, "kernel_dim": ker.dim - b.dim, "image_dim": im.dim - b.dim})

    dims: Dict[str, List[int]] = {"H": [], "V": [], "Q": []}
    for p in range(r + 1):
        zh, bh = cx_h.cocycles(p), cx_h.coboundaries(p)
        zv, bv = cx_v.cocycles(p), cx_v.coboundaries(p)
        zq, bq = cx_q.cocycles(p), cx_q.coboundaries(p)
        dims["H"].append(zh.dim - bh.dim)
        dims["V"].append(zv.dim - bv.dim)
        dims["Q"].append(zq.dim - bq.dim)

        incoming_h = _image_of(partial(p - 1), cx_q.cocycles(p - 1)) if p >= 1 else Subspace.zero(cx_h.dim(p))
        check("H", p, zh, bh, incoming_h, alpha(p), bv)
        check("V", p, zv, bv, _image_of(alpha(p), zh), beta(p), bq)
        out_q = partial(p) if p + 1 <= r else None
        target_q = cx_h.coboundaries(p + 1) if out_q is not None else None
        check("Q", p, zq, bq, _image_of(beta(p), zv), out_q, target_q)

    facts = {
        "IH0_Q_is_Q": dims["Q"][0] == 1,
        "IH_positive_Q_vanish": all(d == 0 for d in dims["Q"][1:]),
        "B_V_equals_B_H": all(
            sv.space == sh.space
            for p in range(1, r + 1)
            for sv, sh in zip(cx_v.terms[p], cx_h.terms[p])
        ),
    }
    alternating = 0
    sign = 1
    for p in range(r + 1):
        for key in ("H", "V", "Q"):
            alternating += sign * dims[key][p]
            sign = -sign
    exact = all(node["exact"] for node in nodes) and all(facts.values())
    sing = connecting(anf)
    return LESReport(
        exact=exact,
        nodes=nodes,
        dims=dims,
        facts=facts,
        alternating_sum=alternating,
        sing_zero=sing.is_zero,
    )
