# backend/services/generator.py
"""
Gerador de dados exatos aleatórios para as suítes de propriedades.

Tudo é reproduzível a partir da semente. Com real_only=True os escalares
ficam no subcorpo real de ℚ(i) (variante de coeficientes reais).
"""
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..errors import InputError
from ..models.filtrations import DecreasingFiltration, IncreasingFiltration
from ..models.ih import ANFData
from ..models.linalg import Frame, IntegerLattice, Matrix, Scalar, Subspace, Vector, nilpotent_exp, unit_vector
from ..models.orbits import NilpotentOrbitData

HodgeType = Tuple[int, int]


@dataclass
class RandomMHS:
    F: DecreasingFiltration
    W: IncreasingFiltration
    types: List[HodgeType]  # um tipo por vetor da base adaptada
    frame: List[Vector]
    twist: Matrix  # λ ∈ Λ^{-1,-1} aplicado à estrutura cindida

    def hodge_numbers(self) -> Dict[HodgeType, int]:
        out: Dict[HodgeType, int] = {}
        for t in self.types:
            out[t] = out.get(t, 0) + 1
        return out


@dataclass
class RandomANF:
    anf: ANFData
    square_zero: bool
    lifts: List[Vector] = field(default_factory=list)  # h_j com N_j e0 = N_j h_j


class ProblemGenerator:
    """
    Gera nilpotentes, EHM a partir de bigraduações, dados de funções normais
    admissíveis, pares (T-1, reticulado) e órbitas cindidas de tipo (I).
    """

    def __init__(self, seed: int = 0, real_only: bool = False, max_entry: int = 2):
        self.rng = random.Random(seed)
        self.real_only = real_only
        self.max_entry = max_entry

    # --------------- escalares e matrizes -----------------
    def _int(self, nonzero: bool = False) -> int:
        while True:
            x = self.rng.randint(-self.max_entry, self.max_entry)
            if x or not nonzero:
                return x

    def scalar(self) -> Scalar:
        re = self._int()
        im = 0 if self.real_only else self._int()
        return Scalar(re, im)

    def unimodular(self, n: int, steps: Optional[int] = None) -> Matrix:
        """Produto de transvecções inteiras: det = 1, inversa inteira."""
        g = Matrix.identity(n)
        if n < 2:
            return g
        for _ in range(steps if steps is not None else 2 * n):
            i, j = self.rng.sample(range(n), 2)
            g = (Matrix.identity(n) + Matrix.elementary(n, i, j, self._int(nonzero=True))) @ g
        return g

    def lower_nilpotent(self, n: int, density: float = 0.6) -> Matrix:
        rows = [[self._int() if j < i and self.rng.random() < density else 0 for j in range(n)] for i in range(n)]
        return Matrix(rows, n)

    def nilpotent(self, n: int) -> Matrix:
        """Estritamente triangular inferior a menos de conjugação inteira."""
        g = self.unimodular(n)
        return g @ self.lower_nilpotent(n) @ g.inverse()

    # --------------- EHM -----------------
    def _blocks(self, n: int, weights: Tuple[int, ...]) -> List[Tuple[HodgeType, ...]]:
        evens = [k for k in weights if k % 2 == 0]
        if n % 2 and not evens:
            raise InputError("dimensão ímpar exige ao menos um peso par", {"weights": list(weights)})
        blocks: List[Tuple[HodgeType, ...]] = []
        left = n
        while left > 0:
            k = self.rng.choice(evens if left == 1 else weights)
            if k % 2 == 0 and (left == 1 or self.rng.random() < 0.5):
                blocks.append(((k // 2, k // 2),))
                left -= 1
                continue
            # par (p, q) com p > q
            q = self.rng.randint(k // 2 - 2, (k - 1) // 2)
            p = k - q
            blocks.append(((p, q), (q, p)))
            left -= 2
        return blocks

    def mhs(self, n: int, weights: Tuple[int, ...] = (-2, -1, 0), twist: bool = True) -> RandomMHS:
        """
        Estrutura cindida sobre ℝ montada em blocos (tipo (p,p) real, ou pares
        e_a ± i e_b de tipos (p,q), (q,p)), torcida por e^λ com λ ∈ Λ^{-1,-1}
        e levada por g inteira unimodular.
        """
        blocks = self._blocks(n, weights)
        frame: List[Vector] = []
        types: List[HodgeType] = []
        pos = 0
        i_unit = Scalar(0, 1)
        for block in blocks:
            if len(block) == 1:
                frame.append(unit_vector(n, pos))
                types.append(block[0])
                pos += 1
                continue
            a, b = unit_vector(n, pos), unit_vector(n, pos + 1)
            frame.append(tuple(x + y * i_unit for x, y in zip(a, b)))
            frame.append(tuple(x - y * i_unit for x, y in zip(a, b)))
            types.extend(block)
            pos += 2

        lam = Matrix.zero(n)
        if twist:
            coords = Matrix.zero(n)
            for src, (p, q) in enumerate(types):
                for dst, (p2, q2) in enumerate(types):
                    if p2 < p and q2 < q and self.rng.random() < 0.5:
                        coords = coords + Matrix.elementary(n, dst, src, self.scalar())
            lam = Frame(frame).from_frame(coords)

        g = self.unimodular(n)
        moved = [g.apply(v) for v in frame]
        F_split = {
            p: Subspace(n, [v for v, t in zip(moved, types) if t[0] >= p])
            for p in sorted({t[0] for t in types})
        }
        W_steps = {
            k: Subspace(n, [v for v, t in zip(moved, types) if t[0] + t[1] <= k])
            for k in sorted({t[0] + t[1] for t in types})
        }
        lam_moved = g @ lam @ g.inverse()
        F = DecreasingFiltration(n, F_split).apply(nilpotent_exp(lam_moved))
        return RandomMHS(F=F, W=IncreasingFiltration(n, W_steps), types=types, frame=moved, twist=lam_moved)

    # --------------- funções normais admissíveis -----------------
    def anf(self, h_dim: int, r: int, square_zero: bool = False) -> RandomANF:
        """
        V = ℚe0 ⊕ H. Logs em H são polinômios num nilpotente A (comutam);
        N_j e0 = N_j h com h comum, o que garante M(N_j, W) e sing = 0.
        Com square_zero, A² = 0 e cada N_j usa seu próprio h_j (sing livre).
        """
        n = h_dim + 1
        if square_zero:
            half = h_dim // 2
            a_h = [[self._int() if i >= h_dim - half and j < h_dim - half else 0 for j in range(h_dim)] for i in range(h_dim)]
            a = Matrix(a_h, h_dim)
            polys = [a.scale(self._int(nonzero=True)) for _ in range(r)]
        else:
            a = self.lower_nilpotent(h_dim)
            a2 = a @ a
            polys = [a.scale(self._int(nonzero=True)) + a2.scale(self._int()) for _ in range(r)]
        shared = [self._int() for _ in range(h_dim)]
        lifts: List[Vector] = []
        logs: List[Matrix] = []
        for poly in polys:
            h = [self._int() for _ in range(h_dim)] if square_zero else shared
            col = poly.apply([Scalar(x) for x in h])
            rows = [[0] * n] + [[col[i]] + list(poly.rows[i]) for i in range(h_dim)]
            logs.append(Matrix(rows, n))
            lifts.append(tuple([Scalar(0)] + [Scalar(x) for x in h]))

        # g preserva W: bloco triangular inferior com 1 no canto
        g_h = self.unimodular(h_dim)
        rows = [[1] + [0] * h_dim] + [[self._int()] + list(g_h.rows[i]) for i in range(h_dim)]
        g = Matrix(rows, n)
        g_inv = g.inverse()
        W = IncreasingFiltration(n, {-1: Subspace(n, [unit_vector(n, i) for i in range(1, n)]), 0: Subspace.full(n)})
        data = ANFData(
            W=W,
            logs=[g @ nj @ g_inv for nj in logs],
            lattice=IntegerLattice([g.column(i) for i in range(n)]),
        )
        return RandomANF(anf=data, square_zero=square_zero, lifts=[g.apply(v) for v in lifts])

    # --------------- reticulados -----------------
    def lattice_pair(self, n: int, diagonal: bool = False) -> Tuple[Matrix, IntegerLattice, Matrix]:
        """(T - 1, reticulado, matriz de T - 1 na base do reticulado)."""
        if diagonal:
            basis = Matrix.diagonal([self.rng.randint(1, 3) for _ in range(n)])
        else:
            basis = self.unimodular(n)
        coords = self.lower_nilpotent(n, density=0.8)
        t_minus_1 = basis @ coords @ basis.inverse()
        return t_minus_1, IntegerLattice(basis.columns()), coords

    # --------------- órbitas -----------------
    def split_orbit(self, blocks: int, r: int = 1) -> NilpotentOrbitData:
        """
        Órbita admissível de tipo (I) cindida sobre ℝ: e0 de tipo (0,0) e
        blocos (u_t, v_t) com N u_t = v_t, N e0 = Σ a_t v_t, F^0 = ⟨e0, u_t⟩.
        Os logs são múltiplos positivos de N.
        """
        n = 1 + 2 * blocks
        cols: List[Vector] = [tuple(Scalar(0) for _ in range(n)) for _ in range(n)]
        e0_image = [Scalar(0)] * n
        for t in range(blocks):
            u, v = 1 + 2 * t, 2 + 2 * t
            cols[u] = unit_vector(n, v)
            e0_image[v] = Scalar(self._int())
        cols[0] = tuple(e0_image)
        base_n = Matrix.from_columns(cols, n)
        f0 = [unit_vector(n, 0)] + [unit_vector(n, 1 + 2 * t) for t in range(blocks)]
        g = self.unimodular(n)
        g_inv = g.inverse()
        h = [g.apply(unit_vector(n, i)) for i in range(1, n)]
        W = IncreasingFiltration(n, {-1: Subspace(n, h), 0: Subspace.full(n)})
        F = DecreasingFiltration(n, {0: Subspace(n, [g.apply(v) for v in f0])})
        logs = [g @ base_n.scale(self.rng.randint(1, 3)) @ g_inv for _ in range(r)]
        return NilpotentOrbitData(W=W, logs=logs, F_inf=F, lattice=IntegerLattice(g.columns()))
