# backend/models/linalg.py
from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from ..errors import (
    DimensionMismatchError,
    InputError,
    NotAGradingError,
    NotIntegralError,
    NotNilpotentError,
    SingularMatrixError,
)

logger = logging.getLogger(__name__)

Number = Union[int, Fraction, "Scalar"]


class Scalar:
    """
    Número racional gaussiano a + b·i com a, b em Fraction.

    A conjugação complexa é a estrutura real de todo o projeto:
    - is_real(): parte imaginária nula
    - is_integral(): real e inteiro
    Valores são imutáveis; toda a aritmética é exata.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: Union[int, Fraction, str] = 0, im: Union[int, Fraction, str] = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def _make(cls, re: Fraction, im: Fraction) -> "Scalar":
        s = object.__new__(cls)
        s.re = re
        s.im = im
        return s

    # --------------- aritmética -----------------
    def __add__(self, other: Number) -> "Scalar":
        o = as_scalar(other)
        return Scalar._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "Scalar":
        o = as_scalar(other)
        return Scalar._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: Number) -> "Scalar":
        return as_scalar(other) - self

    def __neg__(self) -> "Scalar":
        return Scalar._make(-self.re, -self.im)

    def __mul__(self, other: Number) -> "Scalar":
        o = as_scalar(other)
        if not self.im and not o.im:
            return Scalar._make(self.re * o.re, _ZERO_F)
        return Scalar._make(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "Scalar":
        o = as_scalar(other)
        if o.is_zero():
            raise ZeroDivisionError("divisão por zero em Scalar")
        if not o.im:
            return Scalar._make(self.re / o.re, self.im / o.re)
        norm = o.re * o.re + o.im * o.im
        return Scalar._make(
            (self.re * o.re + self.im * o.im) / norm,
            (self.im * o.re - self.re * o.im) / norm,
        )

    def __rtruediv__(self, other: Number) -> "Scalar":
        return as_scalar(other) / self

    def __pow__(self, k: int) -> "Scalar":
        result = ONE
        base = self if k >= 0 else ONE / self
        for _ in range(abs(k)):
            result = result * base
        return result

    # --------------- predicados -----------------
    def conj(self) -> "Scalar":
        return Scalar._make(self.re, -self.im)

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def is_integral(self) -> bool:
        return not self.im and self.re.denominator == 1

    def abs_bound(self) -> Fraction:
        # |re| + |im| >= |z|
        return abs(self.re) + abs(self.im)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        return format_scalar(self)

    def __repr__(self) -> str:
        return f"Scalar('{format_scalar(self)}')"


_ZERO_F = Fraction(0)
ZERO = Scalar._make(Fraction(0), Fraction(0))
ONE = Scalar._make(Fraction(1), Fraction(0))
I = Scalar._make(Fraction(0), Fraction(1))


def as_scalar(x: Number) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar._make(Fraction(x), _ZERO_F)
    raise InputError(f"valor não suportado como escalar: {x!r}")


def _format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(s: Scalar) -> str:
    """Gramática: rational | rational(+|-)rational'i' | rational'i' | 'i'."""
    if not s.im:
        return _format_rational(s.re)
    if s.im == 1:
        im_part = "i"
    elif s.im == -1:
        im_part = "-i"
    else:
        im_part = _format_rational(s.im) + "i"
    if not s.re:
        return im_part
    sign = "" if im_part.startswith("-") else "+"
    return _format_rational(s.re) + sign + im_part


# --------------- VETORES -----------------
Vector = Tuple[Scalar, ...]


def vector(values: Iterable[Number]) -> Vector:
    return tuple(as_scalar(v) for v in values)


def unit_vector(n: int, i: int) -> Vector:
    return tuple(ONE if j == i else ZERO for j in range(n))


def vec_conj(a: Vector) -> Vector:
    return tuple(x.conj() for x in a)


def is_zero_vector(a: Vector) -> bool:
    return all(x.is_zero() for x in a)


def linear_combination(coeffs: Sequence[Number], vectors: Sequence[Vector], n: int) -> Vector:
    acc = [ZERO] * n
    for c, v in zip(coeffs, vectors):
        c = as_scalar(c)
        if c.is_zero():
            continue
        for i in range(n):
            if not v[i].is_zero():
                acc[i] = acc[i] + c * v[i]
    return tuple(acc)


# --------------- ESCALONAMENTO -----------------
def _rref(rows: List[List[Scalar]], ncols: int) -> Tuple[List[List[Scalar]], List[int]]:
    """
    Forma escalonada reduzida com pivô mais à esquerda e líder 1.
    Retorna apenas as linhas não nulas e as colunas pivô.
    """
    m = [list(r) for r in rows]
    pivots: List[int] = []
    piv_r = 0
    n_rows = len(m)
    for c in range(ncols):
        if piv_r >= n_rows:
            break
        for i_row in range(piv_r, n_rows):
            if not m[i_row][c].is_zero():
                break
        else:
            continue
        if i_row != piv_r:
            m[piv_r], m[i_row] = m[i_row], m[piv_r]
        fp = m[piv_r][c]
        if fp != ONE:
            inv = ONE / fp
            m[piv_r] = [x * inv for x in m[piv_r]]
        prow = m[piv_r]
        for r in range(n_rows):
            if r == piv_r:
                continue
            fr = m[r][c]
            if fr.is_zero():
                continue
            row = m[r]
            for k in range(c, ncols):
                if not prow[k].is_zero():
                    row[k] = row[k] - fr * prow[k]
        pivots.append(c)
        piv_r += 1
    return m[:piv_r], pivots


class Subspace:
    """
    Subespaço de ℚ(i)^n guardado na forma escalonada reduzida canônica:
    dois subespaços iguais têm exatamente a mesma base.
    """

    __slots__ = ("ambient_dim", "basis", "pivots")

    def __init__(self, ambient_dim: int, vectors: Iterable[Sequence[Number]] = ()):
        rows = []
        for v in vectors:
            if len(v) != ambient_dim:
                raise DimensionMismatchError(
                    f"vetor de tamanho {len(v)} em espaço de dimensão {ambient_dim}"
                )
            rows.append([as_scalar(x) for x in v])
        reduced, pivots = _rref(rows, ambient_dim)
        self.ambient_dim = ambient_dim
        self.basis: Tuple[Vector, ...] = tuple(tuple(r) for r in reduced)
        self.pivots: Tuple[int, ...] = tuple(pivots)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, (unit_vector(n, i) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def _check(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatchError(
                "subespaços em ambientes diferentes",
                {"left": self.ambient_dim, "right": other.ambient_dim},
            )

    def reduce(self, v: Sequence[Scalar]) -> Vector:
        """Resto de v módulo o subespaço (zero se e só se v pertence)."""
        out = list(v)
        for row, p in zip(self.basis, self.pivots):
            c = out[p]
            if c.is_zero():
                continue
            for k in range(p, self.ambient_dim):
                if not row[k].is_zero():
                    out[k] = out[k] - c * row[k]
        return tuple(out)

    def contains(self, v: Sequence[Scalar]) -> bool:
        if len(v) != self.ambient_dim:
            raise DimensionMismatchError("vetor fora do ambiente do subespaço")
        return is_zero_vector(self.reduce(v))

    def coordinates(self, v: Sequence[Scalar]) -> Vector:
        """Coeficientes de v na base canônica (lidos nas colunas pivô)."""
        if not self.contains(v):
            raise InputError("vetor não pertence ao subespaço")
        return tuple(v[p] for p in self.pivots)

    def __le__(self, other: "Subspace") -> bool:
        self._check(other)
        return all(other.contains(v) for v in self.basis)

    def __ge__(self, other: "Subspace") -> bool:
        return other <= self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))

    def __add__(self, other: "Subspace") -> "Subspace":
        return sum_spaces(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersect(self, other)

    def conj(self) -> "Subspace":
        return Subspace(self.ambient_dim, (vec_conj(v) for v in self.basis))

    def is_real(self) -> bool:
        return all(x.is_real() for v in self.basis for x in v)

    def apply(self, m: "Matrix") -> "Subspace":
        """Imagem g(U) do subespaço por uma matriz."""
        if m.ncols != self.ambient_dim:
            raise DimensionMismatchError("matriz incompatível com o subespaço")
        return Subspace(m.nrows, (m.apply(v) for v in self.basis))

    def basis_matrix(self) -> "Matrix":
        return Matrix.from_columns(self.basis, self.ambient_dim)

    def extend_basis(self, sub: "Subspace") -> List[Vector]:
        """Vetores desta base que completam uma base de `sub` até este subespaço."""
        self._check(sub)
        current = sub
        extra: List[Vector] = []
        for v in self.basis:
            if not current.contains(v):
                extra.append(v)
                current = Subspace(self.ambient_dim, list(current.basis) + [v])
        return extra

    def standard_complement(self) -> List[Vector]:
        """Vetores canônicos e_j (j fora dos pivôs): complemento determinístico em V."""
        piv = set(self.pivots)
        return [unit_vector(self.ambient_dim, j) for j in range(self.ambient_dim) if j not in piv]

    def __repr__(self) -> str:
        rows = ", ".join("(" + ",".join(str(x) for x in v) + ")" for v in self.basis)
        return f"Subspace(dim={self.dim}/{self.ambient_dim}: {rows})"


def span(vectors: Iterable[Sequence[Number]], n: int) -> Subspace:
    return Subspace(n, vectors)


def sum_spaces(a: Subspace, b: Subspace) -> Subspace:
    a._check(b)
    return Subspace(a.ambient_dim, list(a.basis) + list(b.basis))


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Interseção pelo algoritmo de Zassenhaus: linhas [a|a] e [b|0]."""
    a._check(b)
    n = a.ambient_dim
    if a.is_zero() or b.is_zero():
        return Subspace.zero(n)
    if a.is_full():
        return b
    if b.is_full():
        return a
    rows = [list(v) + list(v) for v in a.basis] + [list(v) + [ZERO] * n for v in b.basis]
    reduced, pivots = _rref(rows, 2 * n)
    out = [r[n:] for r, p in zip(reduced, pivots) if p >= n]
    return Subspace(n, out)


def sum_all(spaces: Iterable[Subspace], n: int) -> Subspace:
    vecs: List[Vector] = []
    for s in spaces:
        vecs.extend(s.basis)
    return Subspace(n, vecs)


# --------------- MATRIZES -----------------
class Matrix:
    """Matriz em ordem de linhas; age em vetores coluna."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Sequence[Sequence[Number]], ncols: Optional[int] = None):
        data = tuple(tuple(as_scalar(x) for x in r) for r in rows)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        for r in data:
            if len(r) != ncols:
                raise DimensionMismatchError("linhas de tamanhos diferentes na matriz")
        self.rows: Tuple[Vector, ...] = data
        self.nrows = len(data)
        self.ncols = ncols

    @classmethod
    def _raw(cls, rows: Tuple[Vector, ...], ncols: int) -> "Matrix":
        m = object.__new__(cls)
        m.rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        return m

    @classmethod
    def zero(cls, n: int, m: Optional[int] = None) -> "Matrix":
        m = n if m is None else m
        return cls._raw(tuple((ZERO,) * m for _ in range(n)), m)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls._raw(tuple(unit_vector(n, i) for i in range(n)), n)

    @classmethod
    def diagonal(cls, values: Sequence[Number]) -> "Matrix":
        n = len(values)
        return cls(
            [[values[i] if i == j else 0 for j in range(n)] for i in range(n)], n
        )

    @classmethod
    def elementary(cls, n: int, i: int, j: int, value: Number = 1) -> "Matrix":
        """E_ij: leva e_j em value·e_i."""
        v = as_scalar(value)
        return cls._raw(
            tuple(tuple(v if (r == i and c == j) else ZERO for c in range(n)) for r in range(n)),
            n,
        )

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Number]], nrows: int) -> "Matrix":
        cols = [vector(c) for c in columns]
        return cls._raw(tuple(tuple(c[i] for c in cols) for i in range(nrows)), len(cols))

    @classmethod
    def from_vec(cls, v: Sequence[Number], nrows: int, ncols: int) -> "Matrix":
        vals = vector(v)
        return cls._raw(
            tuple(tuple(vals[i * ncols:(i + 1) * ncols]) for i in range(nrows)), ncols
        )

    # --------------- acesso -----------------
    def __getitem__(self, ij: Tuple[int, int]) -> Scalar:
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    def vec(self) -> Vector:
        return tuple(x for r in self.rows for x in r)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    # --------------- álgebra -----------------
    def _same_shape(self, other: "Matrix") -> None:
        if self.shape != other.shape:
            raise DimensionMismatchError(
                "matrizes de formatos diferentes", {"left": self.shape, "right": other.shape}
            )

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix._raw(
            tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.ncols,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix._raw(
            tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.ncols,
        )

    def __neg__(self) -> "Matrix":
        return Matrix._raw(tuple(tuple(-x for x in r) for r in self.rows), self.ncols)

    def scale(self, c: Number) -> "Matrix":
        c = as_scalar(c)
        return Matrix._raw(tuple(tuple(c * x for x in r) for r in self.rows), self.ncols)

    def __mul__(self, c: Number) -> "Matrix":
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise DimensionMismatchError(
                "produto de matrizes incompatível", {"left": self.shape, "right": other.shape}
            )
        cols = other.columns()
        out = []
        for r in self.rows:
            nz = [(k, x) for k, x in enumerate(r) if not x.is_zero()]
            row = []
            for c in cols:
                acc = ZERO
                for k, x in nz:
                    y = c[k]
                    if not y.is_zero():
                        acc = acc + x * y
                row.append(acc)
            out.append(tuple(row))
        return Matrix._raw(tuple(out), other.ncols)

    def apply(self, v: Sequence[Scalar]) -> Vector:
        if len(v) != self.ncols:
            raise DimensionMismatchError("vetor incompatível com a matriz")
        out = []
        for r in self.rows:
            acc = ZERO
            for x, y in zip(r, v):
                if not x.is_zero() and not y.is_zero():
                    acc = acc + x * y
            out.append(acc)
        return tuple(out)

    def transpose(self) -> "Matrix":
        return Matrix._raw(tuple(self.columns()), self.nrows)

    def conj(self) -> "Matrix":
        return Matrix._raw(tuple(tuple(x.conj() for x in r) for r in self.rows), self.ncols)

    def power(self, k: int) -> "Matrix":
        result = Matrix.identity(self.nrows)
        for _ in range(k):
            result = result @ self
        return result

    def bracket(self, other: "Matrix") -> "Matrix":
        return self @ other - other @ self

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def is_real(self) -> bool:
        return all(x.is_real() for r in self.rows for x in r)

    def is_integral(self) -> bool:
        return all(x.is_integral() for r in self.rows for x in r)

    def row_sum_bound(self) -> Fraction:
        return max((sum((x.abs_bound() for x in r), Fraction(0)) for r in self.rows), default=Fraction(0))

    def rank(self) -> int:
        return len(_rref([list(r) for r in self.rows], self.ncols)[1])

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise SingularMatrixError("inversa de matriz não quadrada")
        n = self.nrows
        aug = [list(r) + list(unit_vector(n, i)) for i, r in enumerate(self.rows)]
        reduced, pivots = _rref(aug, 2 * n)
        if len(pivots) < n or pivots[n - 1] >= n:
            raise SingularMatrixError("matriz singular")
        return Matrix._raw(tuple(tuple(r[n:]) for r in reduced[:n]), n)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.ncols, self.rows))

    def to_strings(self) -> List[List[str]]:
        return [[format_scalar(x) for x in r] for r in self.rows]

    def __repr__(self) -> str:
        return f"Matrix({self.to_strings()})"


def bracket(a: Matrix, b: Matrix) -> Matrix:
    return a.bracket(b)


# --------------- NÚCLEO / IMAGEM / SISTEMAS -----------------
def kernel(m: Matrix) -> Subspace:
    """{v : m·v = 0} na forma canônica."""
    n = m.ncols
    reduced, pivots = _rref([list(r) for r in m.rows], n)
    piv_set = set(pivots)
    basis = []
    for f in range(n):
        if f in piv_set:
            continue
        v = [ZERO] * n
        v[f] = ONE
        for row, p in zip(reduced, pivots):
            if not row[f].is_zero():
                v[p] = -row[f]
        basis.append(v)
    return Subspace(n, basis)


def image(m: Matrix) -> Subspace:
    """Espaço gerado pelas colunas."""
    return Subspace(m.nrows, m.columns())


def solve(m: Matrix, rhs: Sequence[Number]) -> Optional[Vector]:
    """Uma solução de m·x = rhs (variáveis livres nulas) ou None."""
    if len(rhs) != m.nrows:
        raise DimensionMismatchError("lado direito incompatível")
    n = m.ncols
    b = vector(rhs)
    aug = [list(r) + [b[i]] for i, r in enumerate(m.rows)]
    reduced, pivots = _rref(aug, n + 1)
    if pivots and pivots[-1] == n:
        return None
    x = [ZERO] * n
    for row, p in zip(reduced, pivots):
        x[p] = row[n]
    return tuple(x)


def annihilator(s: Subspace) -> Matrix:
    """Matriz cujas linhas geram {a : a·v = 0 para todo v em s}; seu núcleo é s."""
    n = s.ambient_dim
    return Matrix([list(v) for v in kernel(Matrix(s.basis, n)).basis], n)


def preimage(m: Matrix, s: Subspace) -> Subspace:
    """m⁻¹(s) = {v : m·v ∈ s}."""
    if s.ambient_dim != m.nrows:
        raise DimensionMismatchError("subespaço fora do contradomínio")
    q = annihilator(s)
    if q.nrows == 0:
        return Subspace.full(m.ncols)
    return kernel(q @ m)


def solve_in_span(vectors: Sequence[Vector], target: Sequence[Scalar], n: int) -> Optional[Vector]:
    """Coeficientes c com Σ c_i·vectors_i = target, ou None."""
    if not vectors:
        return () if is_zero_vector(tuple(target)) else None
    return solve(Matrix.from_columns(vectors, n), target)


class Frame:
    """Base completa de V (colunas) com a inversa já calculada."""

    def __init__(self, vectors: Sequence[Vector]):
        if not vectors:
            raise InputError("base vazia")
        n = len(vectors[0])
        if len(vectors) != n:
            raise SingularMatrixError("a base não tem dim V vetores")
        self.n = n
        self.vectors = [tuple(v) for v in vectors]
        self.matrix = Matrix.from_columns(self.vectors, n)
        self.inverse = self.matrix.inverse()

    def coordinates(self, v: Sequence[Scalar]) -> Vector:
        return self.inverse.apply(v)

    def to_frame(self, x: Matrix) -> Matrix:
        return self.inverse @ x @ self.matrix

    def from_frame(self, x: Matrix) -> Matrix:
        return self.matrix @ x @ self.inverse


# --------------- RETICULADOS INTEIROS -----------------
def _identity_int(n: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _snf_int(a: List[List[int]]) -> Tuple[List[List[int]], List[List[int]], List[List[int]]]:
    """
    Forma normal de Smith com transformações: D = U·A·V.
    Passos de Euclides por linha e coluna (pivô de menor valor absoluto),
    depois correção de divisibilidade; d_i >= 0 e d_1 | d_2 | ...
    """
    m = len(a)
    n = len(a[0]) if m else 0
    A = [row[:] for row in a]
    U = _identity_int(m)
    V = _identity_int(n)

    def swap_rows(i: int, j: int) -> None:
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int) -> None:
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, q: int) -> None:
        # linha dst += q·linha src
        A[dst] = [x + q * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst: int, src: int, q: int) -> None:
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] != 0 and (pivot is None or abs(A[i][j]) < abs(A[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        if pivot[0] != t:
            swap_rows(t, pivot[0])
        if pivot[1] != t:
            swap_cols(t, pivot[1])

        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                if A[i][t] != 0:
                    add_row(i, t, -(A[i][t] // A[t][t]))
                    if A[i][t] != 0:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if A[t][j] != 0:
                    add_col(j, t, -(A[t][j] // A[t][t]))
                    if A[t][j] != 0:
                        swap_cols(t, j)
                        done = False
            if done:
                d = A[t][t]
                for i in range(t + 1, m):
                    if any(A[i][j] % d != 0 for j in range(t + 1, n)):
                        add_row(t, i, 1)
                        done = False
                        break
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, A, V


def _as_int_rows(m: Matrix) -> List[List[int]]:
    if not m.is_integral():
        raise NotIntegralError("matriz com entrada não inteira")
    return [[x.re.numerator for x in r] for r in m.rows]


def smith_normal_form(m: Matrix) -> Tuple[Matrix, Matrix, Matrix]:
    """(U, D, V) com D = U·m·V diagonal, U e V unimodulares."""
    U, D, V = _snf_int(_as_int_rows(m))
    return (
        Matrix(U, m.nrows) if m.nrows else Matrix.zero(0),
        Matrix(D, m.ncols) if m.nrows else Matrix.zero(0, m.ncols),
        Matrix(V, m.ncols) if m.ncols else Matrix.zero(0),
    )


def invariant_factors(m: Matrix) -> List[int]:
    _, D, _ = _snf_int(_as_int_rows(m))
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i] != 0]


def integer_solve(a: Matrix, rhs: Sequence[Number]) -> Optional[Tuple[int, ...]]:
    """
    Solução inteira de a·x = rhs (a e rhs racionais reais) via forma de Smith,
    ou None quando só existem soluções racionais (ou nenhuma).
    """
    b = vector(rhs)
    if not a.is_real() or not all(x.is_real() for x in b):
        raise InputError("integer_solve exige dados reais")
    rows: List[List[int]] = []
    target: List[int] = []
    for r, bi in zip(a.rows, b):
        den = 1
        for x in list(r) + [bi]:
            den = math.lcm(den, x.re.denominator)
        rows.append([int(x.re * den) for x in r])
        target.append(int(bi.re * den))
    m, n = a.nrows, a.ncols
    if n == 0:
        return () if all(t == 0 for t in target) else None
    if m == 0:
        return tuple([0] * n)
    U, D, V = _snf_int(rows)
    c = [sum(U[i][k] * target[k] for k in range(m)) for i in range(m)]
    y = [0] * n
    for i in range(m):
        d = D[i][i] if i < n else 0
        if d == 0:
            if c[i] != 0:
                return None
            continue
        if c[i] % d != 0:
            return None
        y[i] = c[i] // d
    return tuple(sum(V[i][k] * y[k] for k in range(n)) for i in range(n))


def integer_kernel(a: Matrix) -> List[Tuple[int, ...]]:
    """Base de {x ∈ ℤ^n : a·x = 0} (a racional real), pelas colunas finais de V na forma de Smith."""
    if not a.is_real():
        raise InputError("integer_kernel exige matriz real")
    n = a.ncols
    if a.nrows == 0:
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    rows: List[List[int]] = []
    for r in a.rows:
        den = 1
        for x in r:
            den = math.lcm(den, x.re.denominator)
        rows.append([int(x.re * den) for x in r])
    _, D, V = _snf_int(rows)
    rank = sum(1 for i in range(min(a.nrows, n)) if D[i][i] != 0)
    return [tuple(V[i][k] for i in range(n)) for k in range(rank, n)]


class IntegerLattice:
    """Reticulado de posto cheio (sobre ℚ) dentro de ℚ^n, dado por uma base em linhas."""

    def __init__(self, basis: Sequence[Sequence[Number]]):
        self.basis: List[Vector] = [vector(v) for v in basis]
        if not self.basis:
            raise InputError("reticulado sem vetores")
        self.ambient_dim = len(self.basis[0])
        for v in self.basis:
            if not all(x.is_real() for x in v):
                raise InputError("base de reticulado deve ser racional")
        self.span = Subspace(self.ambient_dim, self.basis)
        if self.span.dim != len(self.basis):
            raise InputError("base de reticulado linearmente dependente")

    @classmethod
    def standard(cls, n: int) -> "IntegerLattice":
        return cls([unit_vector(n, i) for i in range(n)])

    @property
    def rank(self) -> int:
        return len(self.basis)

    def basis_matrix(self) -> Matrix:
        return Matrix.from_columns(self.basis, self.ambient_dim)

    def coordinates(self, v: Sequence[Scalar]) -> Vector:
        x = solve(self.basis_matrix(), v)
        if x is None:
            raise InputError("vetor fora do espaço gerado pelo reticulado")
        return x

    def contains(self, v: Sequence[Scalar]) -> bool:
        if not self.span.contains(v):
            return False
        return all(x.is_integral() for x in self.coordinates(v))

    def vector_from(self, coords: Sequence[Number]) -> Vector:
        return linear_combination(coords, self.basis, self.ambient_dim)

    def operator_in_basis(self, op: Matrix) -> Matrix:
        """Matriz inteira de op na base do reticulado; erro se op não preserva o reticulado."""
        cols = []
        for b in self.basis:
            image_b = op.apply(b)
            if not self.span.contains(image_b):
                raise NotIntegralError("operador não preserva o espaço do reticulado")
            c = self.coordinates(image_b)
            if not all(x.is_integral() for x in c):
                raise NotIntegralError("operador não preserva o reticulado")
            cols.append(c)
        return Matrix.from_columns(cols, self.rank)

    def is_integral_operator(self, op: Matrix) -> bool:
        try:
            self.operator_in_basis(op)
        except NotIntegralError:
            return False
        return True


# --------------- CÁLCULO NILPOTENTE -----------------
def is_nilpotent(m: Matrix) -> bool:
    if not m.is_square():
        return False
    p = m
    for _ in range(m.nrows):
        if p.is_zero():
            return True
        p = p @ m
    return p.is_zero()


def nilpotency_index(m: Matrix) -> int:
    """Menor k com m^k = 0."""
    if not is_nilpotent(m):
        raise NotNilpotentError("operador não é nilpotente")
    k = 0
    p = Matrix.identity(m.nrows)
    while not p.is_zero():
        p = p @ m
        k += 1
    return k


def nilpotent_exp(n: Matrix) -> Matrix:
    if not is_nilpotent(n):
        raise NotNilpotentError("exp exige operador nilpotente", {"matrix": n.to_strings()})
    dim = n.nrows
    result = Matrix.identity(dim)
    term = Matrix.identity(dim)
    for k in range(1, dim + 1):
        term = (term @ n).scale(Fraction(1, k))
        if term.is_zero():
            break
        result = result + term
    return result


def nilpotent_log(t: Matrix) -> Matrix:
    if not t.is_square():
        raise NotNilpotentError("log exige matriz quadrada")
    dim = t.nrows
    n = t - Matrix.identity(dim)
    if not is_nilpotent(n):
        raise NotNilpotentError("log exige operador unipotente", {"matrix": t.to_strings()})
    result = Matrix.zero(dim)
    power = Matrix.identity(dim)
    for k in range(1, dim + 1):
        power = power @ n
        if power.is_zero():
            break
        coeff = Fraction(1 if k % 2 else -1, k)
        result = result + power.scale(coeff)
    return result


# --------------- AUTOESPAÇOS -----------------
def spectrum_candidates(y: Matrix) -> List[int]:
    # limite de Gershgorin: |λ| <= max soma |re|+|im| por linha
    bound = int(y.row_sum_bound()) + 1
    return list(range(bound, -bound - 1, -1))


def eigen_decompose(y: Matrix, expected_eigenvalues: Optional[Iterable[int]] = None) -> List[Tuple[int, Subspace]]:
    """
    Decomposição de y em autoespaços com autovalores inteiros.

    Sucesso se e só se y é semissimples com espectro contido na lista;
    caso contrário levanta NotAGradingError. Ordem: autovalor decrescente.
    """
    if not y.is_square():
        raise NotAGradingError("graduação deve ser quadrada")
    n = y.nrows
    candidates = (
        sorted(set(int(k) for k in expected_eigenvalues), reverse=True)
        if expected_eigenvalues is not None
        else spectrum_candidates(y)
    )
    pairs: List[Tuple[int, Subspace]] = []
    total = 0
    for lam in candidates:
        e = kernel(y - Matrix.identity(n).scale(lam))
        if e.dim:
            pairs.append((lam, e))
            total += e.dim
        if total == n:
            break
    if total != n:
        raise NotAGradingError(
            "operador não é semissimples com espectro inteiro esperado",
            {"eigenspace_dims": {str(k): e.dim for k, e in pairs}, "dim": n},
        )
    return pairs
