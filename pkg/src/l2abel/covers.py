"""Finite abelian covers: sublattices of ``Z^n``, quotient groups, and the
integer chain complexes of the corresponding finite covers."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .complexes import GroupRingComplex
from .zlinalg import (
    SmithDecomposition,
    determinant,
    elementary_divisors,
    rank_mod_p,
    rank_rational,
    smith_normal_form,
)

__all__ = [
    "Lattice",
    "FiniteQuotient",
    "IntChainComplex",
    "TorsionOrder",
    "lattice_from_basis",
    "diagonal_lattice",
    "finite_cover_complex",
    "betti",
    "torsion_order",
]


@dataclass(frozen=True)
class Lattice:
    """Finite-index sublattice of ``Z^n`` spanned by the columns of ``basis``."""

    n: int
    basis: tuple
    smith: SmithDecomposition
    index: int
    min_norm: int

    @property
    def invariants(self) -> tuple:
        """Elementary divisors ``N_n | ... | N_1`` (as returned by Smith form)."""
        return tuple(self.smith.diagonal)

    def contains(self, v: Sequence[int]) -> bool:
        U, d = self.smith.U, self.invariants
        return all(sum(u * x for u, x in zip(row, v)) % di == 0 for row, di in zip(U, d))

    def __repr__(self):
        return f"Lattice(n={self.n}, invariants={self.invariants}, index={self.index}, min_norm={self.min_norm})"


def _min_norm(basis, U, d) -> int:
    n = len(basis)
    cols = list(zip(*basis))
    bound = min(sum(x * x for x in c) for c in cols)
    radius = math.isqrt(bound)
    if n == 0:
        return 0
    big = max(abs(x) for row in U for x in row) * radius * n >= 2 ** 62
    best = bound
    rng = np.arange(-radius, radius + 1, dtype=np.int64)
    # sweep the first coordinate to keep memory bounded
    rest = np.array(list(itertools.product(range(-radius, radius + 1), repeat=n - 1)), dtype=np.int64)
    if n == 1:
        rest = np.zeros((1, 0), dtype=np.int64)
    if big:
        for x in itertools.product(range(-radius, radius + 1), repeat=n):
            if any(x):
                q = sum(v * v for v in x)
                if q < best and all(sum(u * v for u, v in zip(row, x)) % di == 0 for row, di in zip(U, d)):
                    best = q
        return best
    Ua = np.array(U, dtype=np.int64)
    da = np.array(d, dtype=np.int64)
    for x0 in rng:
        pts = np.concatenate([np.full((len(rest), 1), x0, dtype=np.int64), rest], axis=1)
        norms = (pts * pts).sum(axis=1)
        cand = norms < best
        if not cand.any():
            continue
        pts = pts[cand]
        norms = norms[cand]
        img = pts @ Ua.T
        member = np.all(img % da == 0, axis=1) & (norms > 0)
        if member.any():
            best = int(norms[member].min())
    return best


def lattice_from_basis(B: Sequence[Sequence[int]]) -> Lattice:
    """Lattice whose basis vectors are the columns of the square matrix ``B``."""
    B = [list(map(int, row)) for row in B]
    n = len(B)
    if any(len(row) != n for row in B):
        raise ValueError("basis matrix must be square")
    det = determinant(B) if n else 1
    if det == 0:
        raise ValueError("basis matrix is singular")
    snf = smith_normal_form(B)
    diag = snf.diagonal
    return Lattice(n, tuple(map(tuple, B)), snf, abs(det), _min_norm(B, snf.U, diag))


def diagonal_lattice(Ns: Sequence[int]) -> Lattice:
    n = len(Ns)
    return lattice_from_basis([[Ns[i] if i == j else 0 for j in range(n)] for i in range(n)])


class FiniteQuotient:
    """``Q = Z^n / Gamma + T`` with elements numbered in mixed-radix order."""

    def __init__(self, lattice: Lattice, torsion_orders: Sequence[int] = ()):
        self.lattice = lattice
        self.torsion_orders = tuple(torsion_orders)
        self.orders = tuple(lattice.invariants) + self.torsion_orders
        self.order = math.prod(self.orders)
        self._radix = []
        acc = 1
        for d in reversed(self.orders):
            self._radix.append(acc)
            acc *= d
        self._radix.reverse()

    def __len__(self):
        return self.order

    def components(self, free: Sequence[int], torsion: Sequence[int] = ()) -> tuple:
        U = self.lattice.smith.U
        torsion = tuple(torsion) or (0,) * len(self.torsion_orders)
        if len(torsion) != len(self.torsion_orders):
            raise ValueError(f"expected {len(self.torsion_orders)} torsion components")
        comps = [sum(u * x for u, x in zip(row, free)) for row in U] + list(torsion)
        return tuple(c % d for c, d in zip(comps, self.orders))

    def index(self, comps: Sequence[int]) -> int:
        return sum(c * r for c, r in zip(comps, self._radix))

    def elements(self):
        return list(itertools.product(*(range(d) for d in self.orders)))

    def shift_table(self, comps: Sequence[int]) -> list[int]:
        """``q -> index(q + comps)`` for every element ``q``."""
        out = []
        for q in self.elements():
            out.append(self.index(tuple((a + b) % d for a, b, d in zip(q, comps, self.orders))))
        return out


@dataclass(frozen=True)
class TorsionOrder:
    """Order of a finite abelian group, kept as its invariant factors."""

    divisors: tuple

    @property
    def value(self) -> int:
        return math.prod(self.divisors)

    @property
    def log(self) -> float:
        return math.fsum(math.log(d) for d in self.divisors)

    def __repr__(self):
        return f"TorsionOrder({self.value}, divisors={self.divisors})"


class IntChainComplex:
    """Integer chain complex, same row convention as :class:`GroupRingComplex`."""

    def __init__(self, ranks: Sequence[int], boundaries: Sequence):
        self.ranks = tuple(ranks)
        self.boundaries = [[list(r) for r in M] for M in boundaries]
        self._rank_cache: dict = {}

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** i * r for i, r in enumerate(self.ranks))

    def rank(self, i: int) -> int:
        return self.ranks[i] if 0 <= i < len(self.ranks) else 0

    def boundary_rank(self, i: int, p: int = 0) -> int:
        """Rank of ``C_{i+1} -> C_i`` over ``Q`` (``p == 0``) or ``F_p``."""
        if not (0 <= i < len(self.boundaries)):
            return 0
        key = (i, p)
        if key not in self._rank_cache:
            M = self.boundaries[i]
            self._rank_cache[key] = rank_mod_p(M, p) if p else rank_rational(M)
        return self._rank_cache[key]

    def betti(self, i: int, p: int = 0) -> int:
        return betti(self, i, p)

    def torsion(self, i: int) -> TorsionOrder:
        return torsion_order(self, i)


def finite_cover_complex(C: GroupRingComplex, lattice: Lattice) -> IntChainComplex:
    """Chains of the finite cover with deck group ``Z^n / Gamma + T``."""
    if C.target.free_rank != lattice.n:
        raise ValueError(f"complex has free rank {C.target.free_rank}, lattice has rank {lattice.n}")
    Q = FiniteQuotient(lattice, C.target.torsion_orders)
    size = Q.order
    tables: dict = {}
    mats = []
    for M in C.boundaries:
        rows = len(M) * size
        cols = (len(M[0]) if M else 0) * size
        out = [[0] * cols for _ in range(rows)]
        for i, row in enumerate(M):
            for j, x in enumerate(row):
                for (a, tau), c in x.items():
                    key = (a, tau)
                    tab = tables.get(key)
                    if tab is None:
                        tab = tables[key] = Q.shift_table(Q.components(a, tau))
                    base_r, base_c = i * size, j * size
                    for q, target in enumerate(tab):
                        out[base_r + q][base_c + target] += c
        mats.append(out)
    return IntChainComplex(tuple(r * size for r in C.ranks), mats)


def betti(Cint: IntChainComplex, i: int, p: int = 0) -> int:
    """``dim H_i`` over ``Q`` (``p == 0``) or ``F_p``."""
    if not (0 <= i < len(Cint.ranks)):
        raise ValueError(f"degree {i} outside 0..{len(Cint.ranks) - 1}")
    return Cint.rank(i) - Cint.boundary_rank(i - 1, p) - Cint.boundary_rank(i, p)


def torsion_order(Cint: IntChainComplex, i: int) -> TorsionOrder:
    """Torsion subgroup of ``H_i(Z)``.

    ``ker / im`` and ``C_i / im`` have the same torsion because ``C_i / ker``
    embeds in the free module ``C_{i-1}``; so the answer is read off the
    elementary divisors of the incoming boundary alone.
    """
    if not (0 <= i < len(Cint.ranks)):
        raise ValueError(f"degree {i} outside 0..{len(Cint.ranks) - 1}")
    if i >= len(Cint.boundaries) or not Cint.boundaries[i] or not Cint.rank(i):
        return TorsionOrder(())
    return TorsionOrder(tuple(d for d in elementary_divisors(Cint.boundaries[i]) if d > 1))
