# backend/services/codec.py
"""
Arquivo-problema JSON <-> objetos dos modelos.

Escalares são sempre strings (exatidão): rational := '-'? dígitos ('/' dígitos)?;
scalar := rational | rational ('+'|'-') rational 'i' | rational 'i' | 'i'.
Erros de leitura levam a posição JSON do valor problemático.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, Field, ValidationError

from ..config import Settings
from ..errors import InputError
from ..models.filtrations import DecreasingFiltration, Grading, IncreasingFiltration
from ..models.ih import ANFData, LocalSystemData
from ..models.linalg import IntegerLattice, Matrix, Scalar, Subspace, Vector, format_scalar
from ..models.orbits import LocalNormalForm, NilpotentOrbitData
from ..models.polynomials import MatrixPolynomial, polynomial_from_terms

SCHEMA_VERSION = 1

_RAT = r"-?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^(?P<re>{_RAT})$"
    rf"|^(?P<re2>{_RAT})(?P<sign>[+-])(?P<im2>\d+(?:/\d+)?)?i$"
    rf"|^(?P<im>-?(?:\d+(?:/\d+)?)?)i$"
)


# --------------- ESCALARES -----------------
def parse_scalar(text: Any, where: str = "$") -> Scalar:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise InputError(f"escalar deve ser string em {where}", {"position": where, "value": repr(text)})
    raw = str(text).replace(" ", "")
    m = _SCALAR_RE.match(raw)
    if not m:
        raise InputError(f"escalar inválido '{raw}' em {where}", {"position": where, "value": raw})
    try:
        if m.group("re") is not None:
            return Scalar(Fraction(m.group("re")))
        if m.group("re2") is not None:
            im = Fraction(m.group("im2") or "1")
            return Scalar(Fraction(m.group("re2")), im if m.group("sign") == "+" else -im)
        im_txt = m.group("im")
        if im_txt in ("", "-"):
            return Scalar(0, -1 if im_txt == "-" else 1)
        return Scalar(0, Fraction(im_txt))
    except ZeroDivisionError:
        raise InputError(f"denominador zero em {where}", {"position": where, "value": raw})


def parse_vector(values: Any, n: int, where: str) -> Vector:
    if not isinstance(values, list):
        raise InputError(f"vetor deve ser lista em {where}", {"position": where})
    if len(values) != n:
        raise InputError(f"vetor com {len(values)} entradas, esperado {n}, em {where}", {"position": where})
    return tuple(parse_scalar(x, f"{where}[{i}]") for i, x in enumerate(values))


def render_vector(v: Sequence[Scalar]) -> List[str]:
    return [format_scalar(x) for x in v]


def _basis_index(label: str, n: int, where: str) -> int:
    if not re.fullmatch(r"e\d+", label) or int(label[1:]) >= n:
        raise InputError(f"rótulo de base inválido '{label}' em {where}", {"position": where})
    return int(label[1:])


def parse_int(value: Any, where: str) -> int:
    """Inteiro JSON ou string de inteiro ("-1" vale como chave de passo)."""
    if isinstance(value, bool):
        raise InputError(f"inteiro esperado em {where}", {"position": where, "value": repr(value)})
    if isinstance(value, int):
        return value
    if isinstance(value, str) and re.fullmatch(r"\s*-?\d+\s*", value):
        return int(value)
    raise InputError(f"inteiro esperado em {where}", {"position": where, "value": repr(value)})


def parse_matrix(spec: Any, n: int, where: str) -> Matrix:
    """Linhas aninhadas ou {"maps": {"e0": [...]}} (imagens da base; ausentes vão a 0)."""
    if isinstance(spec, dict) and "maps" in spec:
        if not isinstance(spec["maps"], dict):
            raise InputError(f"maps deve ser um objeto em {where}.maps", {"position": f"{where}.maps"})
        cols = [[Scalar(0)] * n for _ in range(n)]
        for label, image in spec["maps"].items():
            j = _basis_index(label, n, f"{where}.maps")
            cols[j] = list(parse_vector(image, n, f"{where}.maps.{label}"))
        return Matrix.from_columns(cols, n)
    if isinstance(spec, dict) and "rows" in spec:
        spec = spec["rows"]
    if not isinstance(spec, list) or len(spec) != n:
        raise InputError(f"matriz deve ter {n} linhas em {where}", {"position": where})
    return Matrix([parse_vector(row, n, f"{where}[{i}]") for i, row in enumerate(spec)], n)


def render_matrix(m: Matrix) -> List[List[str]]:
    return m.to_strings()


def render_subspace(s: Subspace) -> List[List[str]]:
    return [render_vector(v) for v in s.basis]


# --------------- MODELOS Pydantic -----------------
class FiltrationSpec(BaseModel):
    kind: str
    steps: Dict[str, List[List[Union[str, int]]]]


class PolynomialTerm(BaseModel):
    monomial: List[int]
    matrix: Any


class OrbitSpec(BaseModel):
    W: str
    F: str
    logs: List[str]
    lattice: Optional[str] = None
    gamma: Optional[str] = None
    forms: Dict[str, Any] = Field(default_factory=dict)


class AnfSpec(BaseModel):
    W: str
    logs: List[str]
    lattice: Optional[str] = None
    e0: Optional[List[Union[str, int]]] = None


class LocalSystemSpec(BaseModel):
    logs: List[str]
    space: Optional[List[List[Union[str, int]]]] = None
    lattice: Optional[str] = None


class ProblemFile(BaseModel):
    schema_version: int = SCHEMA_VERSION
    name: Optional[str] = None
    description: Optional[str] = None
    dim: int
    matrices: Dict[str, Any] = Field(default_factory=dict)
    filtrations: Dict[str, FiltrationSpec] = Field(default_factory=dict)
    gradings: Dict[str, Any] = Field(default_factory=dict)
    lattices: Dict[str, List[List[Union[str, int]]]] = Field(default_factory=dict)
    polynomials: Dict[str, List[PolynomialTerm]] = Field(default_factory=dict)
    orbit: Optional[OrbitSpec] = None
    anf: Optional[AnfSpec] = None
    local_system: Optional[LocalSystemSpec] = None
    params: Dict[str, Any] = Field(default_factory=dict)


def load_problem(data: Union[str, bytes, Dict[str, Any]]) -> ProblemFile:
    """Valida o documento; erros com a posição JSON (ex.: $.filtrations.W.kind)."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InputError(f"JSON inválido: {exc.msg}", {"position": f"line {exc.lineno} column {exc.colno}"})
    try:
        problem = ProblemFile.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in first["loc"])
        raise InputError(f"arquivo-problema inválido em {where}: {first['msg']}", {"position": where})
    if problem.schema_version != SCHEMA_VERSION:
        raise InputError("schema_version não suportada", {"position": "$.schema_version"})
    if problem.dim < 1:
        raise InputError("dim deve ser positiva", {"position": "$.dim"})
    return problem


# --------------- DECODIFICAÇÃO -----------------
class Decoded:
    """Acesso tipado aos objetos nomeados de um ProblemFile."""

    def __init__(self, problem: ProblemFile, config: Optional[Settings] = None):
        self.problem = problem
        self.config = config or Settings()
        self.n = problem.dim

    def _missing(self, section: str, name: str) -> InputError:
        position = f"$.{name}" if section == "$" else f"$.{section}.{name}"
        return InputError(f"objeto '{name}' ausente em {section}", {"position": position})

    def matrix(self, name: str) -> Matrix:
        if name not in self.problem.matrices:
            raise self._missing("matrices", name)
        return parse_matrix(self.problem.matrices[name], self.n, f"$.matrices.{name}")

    def filtration(self, name: str) -> Union[IncreasingFiltration, DecreasingFiltration]:
        if name not in self.problem.filtrations:
            raise self._missing("filtrations", name)
        spec = self.problem.filtrations[name]
        where = f"$.filtrations.{name}"
        steps: Dict[int, Subspace] = {}
        for key, vectors in spec.steps.items():
            k = parse_int(key, f"{where}.steps.{key}")
            vecs = [parse_vector(v, self.n, f"{where}.steps.{key}[{i}]") for i, v in enumerate(vectors)]
            steps[k] = Subspace(self.n, vecs)
        if spec.kind == "increasing":
            return IncreasingFiltration(self.n, steps)
        if spec.kind == "decreasing":
            return DecreasingFiltration(self.n, steps)
        raise InputError(f"kind deve ser increasing|decreasing em {where}", {"position": f"{where}.kind"})

    def increasing(self, name: str) -> IncreasingFiltration:
        f = self.filtration(name)
        if not isinstance(f, IncreasingFiltration):
            raise InputError(f"'{name}' deve ser crescente", {"position": f"$.filtrations.{name}.kind"})
        return f

    def decreasing(self, name: str) -> DecreasingFiltration:
        f = self.filtration(name)
        if not isinstance(f, DecreasingFiltration):
            raise InputError(f"'{name}' deve ser decrescente", {"position": f"$.filtrations.{name}.kind"})
        return f

    def grading(self, name: str) -> Grading:
        if name not in self.problem.gradings:
            raise self._missing("gradings", name)
        spec = self.problem.gradings[name]
        where = f"$.gradings.{name}"
        if isinstance(spec, dict) and "eigenspaces" in spec:
            eigen = spec["eigenspaces"]
            if not isinstance(eigen, dict):
                raise InputError(f"eigenspaces deve ser um objeto em {where}", {"position": f"{where}.eigenspaces"})
            pairs = []
            for k, vs in eigen.items():
                at = f"{where}.eigenspaces.{k}"
                if not isinstance(vs, list):
                    raise InputError(f"lista de vetores esperada em {at}", {"position": at})
                pairs.append((parse_int(k, at), [parse_vector(v, self.n, f"{at}[{i}]") for i, v in enumerate(vs)]))
            return Grading.from_eigenspaces(sorted(pairs, reverse=True), self.n)
        return Grading(parse_matrix(spec, self.n, where))

    def lattice(self, name: str) -> IntegerLattice:
        if name not in self.problem.lattices:
            raise self._missing("lattices", name)
        where = f"$.lattices.{name}"
        return IntegerLattice([parse_vector(v, self.n, f"{where}[{i}]") for i, v in enumerate(self.problem.lattices[name])])

    def polynomial(self, name: str, nvars: int) -> MatrixPolynomial:
        if name not in self.problem.polynomials:
            raise self._missing("polynomials", name)
        where = f"$.polynomials.{name}"
        items = []
        for i, term in enumerate(self.problem.polynomials[name]):
            if len(term.monomial) != nvars:
                raise InputError(f"monômio com {len(term.monomial)} expoentes, esperado {nvars}", {"position": f"{where}[{i}].monomial"})
            items.append((term.monomial, parse_matrix(term.matrix, self.n, f"{where}[{i}].matrix")))
        return polynomial_from_terms(nvars, self.n, items)

    def int_param(self, key: str, default: Optional[int] = None) -> Optional[int]:
        if key not in self.problem.params:
            return default
        return parse_int(self.problem.params[key], f"$.params.{key}")

    def ints_param(self, key: str) -> Optional[List[int]]:
        values = self.problem.params.get(key)
        if values is None:
            return None
        if not isinstance(values, list):
            raise InputError(f"params.{key} deve ser lista", {"position": f"$.params.{key}"})
        return [parse_int(x, f"$.params.{key}[{i}]") for i, x in enumerate(values)]

    def name_param(self, key: str, default: Optional[str] = None) -> Optional[str]:
        """Nome de objeto (matriz, filtração, graduação) indicado em params."""
        value = self.problem.params.get(key, default)
        if value is not None and not isinstance(value, str):
            raise InputError(f"params.{key} deve ser um nome (string)", {"position": f"$.params.{key}"})
        return value

    def scalars_param(self, key: str, default: Optional[List[Any]] = None) -> List[Scalar]:
        values = self.problem.params.get(key, default)
        if values is None:
            raise self._missing("params", key)
        if not isinstance(values, list):
            raise InputError(f"params.{key} deve ser lista", {"position": f"$.params.{key}"})
        return [parse_scalar(x, f"$.params.{key}[{i}]") for i, x in enumerate(values)]

    def param(self, key: str, default: Any = None) -> Any:
        return self.problem.params.get(key, default)

    # --------------- objetos compostos -----------------
    def orbit(self) -> NilpotentOrbitData:
        spec = self.problem.orbit
        if spec is None:
            raise self._missing("$", "orbit")
        forms: Dict[int, Matrix] = {}
        for k, v in spec.forms.items():
            at = f"$.orbit.forms.{k}"
            if not isinstance(v, list) or not v:
                raise InputError(f"forma deve ser matriz quadrada (linhas) em {at}", {"position": at})
            forms[parse_int(k, at)] = parse_matrix(v, len(v), at)
        return NilpotentOrbitData(
            W=self.increasing(spec.W),
            logs=[self.matrix(name) for name in spec.logs],
            F_inf=self.decreasing(spec.F),
            lattice=self.lattice(spec.lattice) if spec.lattice else None,
            forms=forms,
            config=self.config,
        )

    def normal_form(self) -> LocalNormalForm:
        orbit = self.orbit()
        spec = self.problem.orbit
        gamma = self.polynomial(spec.gamma, orbit.r) if spec.gamma else None
        return LocalNormalForm(orbit, gamma)

    def anf(self) -> ANFData:
        spec = self.problem.anf
        if spec is None:
            raise self._missing("$", "anf")
        return ANFData(
            W=self.increasing(spec.W),
            logs=[self.matrix(name) for name in spec.logs],
            lattice=self.lattice(spec.lattice) if spec.lattice else None,
            e0=parse_vector(spec.e0, self.n, "$.anf.e0") if spec.e0 is not None else None,
        )

    def local_system(self) -> LocalSystemData:
        spec = self.problem.local_system
        if spec is None:
            raise self._missing("$", "local_system")
        space = None
        if spec.space is not None:
            space = Subspace(self.n, [parse_vector(v, self.n, f"$.local_system.space[{i}]") for i, v in enumerate(spec.space)])
        return LocalSystemData(
            logs=[self.matrix(name) for name in spec.logs],
            ambient_dim=self.n,
            space=space,
            lattice=self.lattice(spec.lattice) if spec.lattice else None,
        )


# --------------- RENDERIZAÇÃO -----------------
def render_increasing(f: IncreasingFiltration) -> Dict[str, Any]:
    return {"kind": "increasing", "steps": {str(k): render_subspace(s) for k, s in sorted(f.steps().items())}}


def render_decreasing(f: DecreasingFiltration) -> Dict[str, Any]:
    return {"kind": "decreasing", "steps": {str(k): render_subspace(s) for k, s in sorted(f.steps().items())}}


def render_grading(y: Grading) -> Dict[str, Any]:
    return {
        "matrix": render_matrix(y.operator),
        "eigenspaces": {str(k): render_subspace(e) for k, e in y.eigen_pairs},
    }


def dumps(doc: Dict[str, Any], pretty: bool = False) -> str:
    """Saída determinística: chaves ordenadas, sem espaços variáveis."""
    if pretty:
        return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
