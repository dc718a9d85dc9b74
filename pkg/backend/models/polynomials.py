# backend/models/polynomials.py
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import sympy

from ..errors import DimensionMismatchError, InputError
from .linalg import Matrix, Number, Scalar, as_scalar, format_scalar

Monomial = Tuple[int, ...]


class MatrixPolynomial:
    """
    Polinômio em s_1..s_r com coeficientes matriciais (n × n), guardado
    como dicionário monômio → Matrix sem termos nulos.
    """

    __slots__ = ("nvars", "dim", "terms")

    def __init__(self, nvars: int, dim: int, terms: Optional[Dict[Monomial, Matrix]] = None):
        self.nvars = nvars
        self.dim = dim
        clean: Dict[Monomial, Matrix] = {}
        for mono, coeff in (terms or {}).items():
            if len(mono) != nvars:
                raise InputError(f"monômio {mono} não tem {nvars} expoentes")
            if any(e < 0 for e in mono):
                raise InputError("expoente negativo: Γ deve ser polinomial")
            if coeff.shape != (dim, dim):
                raise DimensionMismatchError("coeficiente com formato errado")
            if coeff.is_zero():
                continue
            clean[tuple(mono)] = clean[tuple(mono)] + coeff if tuple(mono) in clean else coeff
        self.terms = {m: c for m, c in clean.items() if not c.is_zero()}

    @classmethod
    def zero(cls, nvars: int, dim: int) -> "MatrixPolynomial":
        return cls(nvars, dim)

    @classmethod
    def constant(cls, nvars: int, m: Matrix) -> "MatrixPolynomial":
        return cls(nvars, m.nrows, {(0,) * nvars: m})

    @classmethod
    def variable(cls, nvars: int, j: int, m: Matrix) -> "MatrixPolynomial":
        """s_j·m."""
        mono = tuple(1 if i == j else 0 for i in range(nvars))
        return cls(nvars, m.nrows, {mono: m})

    def _check(self, other: "MatrixPolynomial") -> None:
        if (self.nvars, self.dim) != (other.nvars, other.dim):
            raise DimensionMismatchError("polinômios incompatíveis")

    def __add__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms[m] + c if m in terms else c
        return MatrixPolynomial(self.nvars, self.dim, terms)

    def __neg__(self) -> "MatrixPolynomial":
        return MatrixPolynomial(self.nvars, self.dim, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        return self + (-other)

    def scale(self, c: Number) -> "MatrixPolynomial":
        return MatrixPolynomial(self.nvars, self.dim, {m: x.scale(c) for m, x in self.terms.items()})

    def __matmul__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        self._check(other)
        terms: Dict[Monomial, Matrix] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                prod = c1 @ c2
                terms[mono] = terms[mono] + prod if mono in terms else prod
        return MatrixPolynomial(self.nvars, self.dim, terms)

    def left(self, m: Matrix) -> "MatrixPolynomial":
        return MatrixPolynomial(self.nvars, self.dim, {k: m @ c for k, c in self.terms.items()})

    def right(self, m: Matrix) -> "MatrixPolynomial":
        return MatrixPolynomial(self.nvars, self.dim, {k: c @ m for k, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Matrix:
        return self.terms.get((0,) * self.nvars, Matrix.zero(self.dim))

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def coefficients(self) -> List[Tuple[Monomial, Matrix]]:
        return sorted(self.terms.items())

    def derivative(self, j: int) -> "MatrixPolynomial":
        terms: Dict[Monomial, Matrix] = {}
        for mono, c in self.terms.items():
            e = mono[j]
            if e == 0:
                continue
            new = tuple(x - 1 if i == j else x for i, x in enumerate(mono))
            terms[new] = c.scale(e)
        return MatrixPolynomial(self.nvars, self.dim, terms)

    def times_variable(self, j: int) -> "MatrixPolynomial":
        terms = {tuple(x + 1 if i == j else x for i, x in enumerate(m)): c for m, c in self.terms.items()}
        return MatrixPolynomial(self.nvars, self.dim, terms)

    def restrict(self, j: int) -> "MatrixPolynomial":
        """Fatia s_j = 0."""
        return MatrixPolynomial(self.nvars, self.dim, {m: c for m, c in self.terms.items() if m[j] == 0})

    def extend(self, extra: int = 1) -> "MatrixPolynomial":
        """Acrescenta variáveis formais no fim (expoente 0)."""
        return MatrixPolynomial(
            self.nvars + extra, self.dim, {m + (0,) * extra: c for m, c in self.terms.items()}
        )

    def evaluate(self, values: Sequence[Number]) -> Matrix:
        if len(values) != self.nvars:
            raise DimensionMismatchError(f"esperados {self.nvars} valores, recebidos {len(values)}")
        vals = [as_scalar(v) for v in values]
        acc = Matrix.zero(self.dim)
        for mono, c in self.terms.items():
            w = Scalar(1)
            for v, e in zip(vals, mono):
                w = w * v ** e
            if not w.is_zero():
                acc = acc + c.scale(w)
        return acc

    def exp(self) -> "MatrixPolynomial":
        """e^P para P com valores nilpotentes: a série termina em dim termos."""
        one = MatrixPolynomial.constant(self.nvars, Matrix.identity(self.dim))
        result = one
        term = one
        for k in range(1, self.dim + 1):
            term = (term @ self).scale(Fraction(1, k))
            if term.is_zero():
                break
            result = result + term
        return result

    def entry(self, i: int, j: int) -> Dict[Monomial, Scalar]:
        return {m: c[i, j] for m, c in self.terms.items() if not c[i, j].is_zero()}

    def to_sympy_entry(self, i: int, j: int, names: Sequence[str]) -> sympy.Expr:
        syms = sympy.symbols(list(names))
        if not isinstance(syms, (list, tuple)):
            syms = [syms]
        expr = sympy.Integer(0)
        for mono, c in self.entry(i, j).items():
            coeff = sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(
                c.im.numerator, c.im.denominator
            )
            term = coeff
            for s, e in zip(syms, mono):
                term = term * s ** e
            expr = expr + term
        return sympy.expand(expr)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatrixPolynomial):
            return NotImplemented
        return (self.nvars, self.dim) == (other.nvars, other.dim) and self.terms == other.terms

    def __repr__(self) -> str:
        parts = [f"{m}: {c.to_strings()}" for m, c in self.coefficients()]
        return f"MatrixPolynomial({', '.join(parts)})"


def polynomial_from_terms(nvars: int, dim: int, items: Iterable[Tuple[Sequence[int], Matrix]]) -> MatrixPolynomial:
    terms: Dict[Monomial, Matrix] = {}
    for mono, m in items:
        key = tuple(int(e) for e in mono)
        terms[key] = terms[key] + m if key in terms else m
    return MatrixPolynomial(nvars, dim, terms)


def format_monomial(mono: Monomial, names: Sequence[str]) -> str:
    parts = []
    for name, e in zip(names, mono):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) or "1"


def render_entry(entry: Dict[Monomial, Scalar], names: Sequence[str]) -> List[Dict[str, str]]:
    return [
        {"monomial": format_monomial(m, names), "coefficient": format_scalar(c)}
        for m, c in sorted(entry.items())
    ]
