"""Exact linear algebra over Z, F_p and Laurent-polynomial rings.

Integer matrices are plain lists of lists of Python ints (arbitrary
precision).  Polynomial matrices are :class:`PolyMatrix` instances whose
entries are :class:`~l2abel.laurent.LaurentPoly` over a common ring.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Sequence

from .fields import ExtensionField, PrimeField, field_rank
from .laurent import DomainError, LaurentPoly, lp_gcd

__all__ = [
    "SmithDecomposition",
    "smith_normal_form",
    "elementary_divisors",
    "rank_mod_p",
    "rank_rational",
    "matmul",
    "identity",
    "determinant",
    "PolyMatrix",
    "rank_over_fractions",
    "poly_determinant",
    "gcd_of_minors",
    "split_units",
    "BudgetExceeded",
    "MinorsVanish",
    "LARGE_PRIMES",
]

# 2^61 - 1 and the largest prime below 2^62
LARGE_PRIMES = (2305843009213693951, 4611686018427387847)


class BudgetExceeded(RuntimeError):
    """Minor enumeration hit its budget before the gcd became a unit."""


class MinorsVanish(ValueError):
    """Every minor of the requested size is zero."""


# ---------------------------------------------------------------------------
# integer matrices


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B) -> list[list[int]]:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    if len(A[0]) != inner:
        raise ValueError(f"shape mismatch {len(A)}x{len(A[0])} @ {inner}x{cols}")
    Bt = list(zip(*B)) if B else [()] * cols
    return [[sum(a * b for a, b in zip(row, col) if a) for col in Bt] for row in A]


def determinant(A) -> int:
    """Bareiss determinant of a square integer matrix."""
    n = len(A)
    M = [list(r) for r in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[k][k] * M[i][j] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: list
    D: list
    V: list

    @property
    def diagonal(self) -> list[int]:
        k = min(len(self.D), len(self.D[0]) if self.D else 0)
        return [self.D[i][i] for i in range(k)]

    def verify(self, A) -> None:
        if matmul(matmul(self.U, A), self.V) != self.D:
            raise AssertionError("U A V != D")
        if abs(determinant(self.U)) != 1 or abs(determinant(self.V)) != 1:
            raise AssertionError("transform is not unimodular")
        d = self.diagonal
        rows, cols = len(self.D), len(self.D[0]) if self.D else 0
        for i in range(rows):
            for j in range(cols):
                if i != j and self.D[i][j]:
                    raise AssertionError("D is not diagonal")
        for a, b in zip(d, d[1:]):
            if a < 0 or (a == 0 and b) or (a and b % a):
                raise AssertionError(f"divisibility chain broken at {a}, {b}")
        if d and d[-1] < 0:
            raise AssertionError("negative elementary divisor")


def _xgcd(a: int, b: int):
    """``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b) >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def smith_normal_form(A: Sequence[Sequence[int]], transforms: bool = True) -> SmithDecomposition:
    """Smith normal form with unimodular transforms.

    Pivot: smallest nonzero absolute value in the trailing block; rows and
    columns are cleared with 2x2 unimodular (extended-gcd) operations.  With
    ``transforms=False`` the returned ``U`` and ``V`` are ``None``.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [[int(x) for x in row] for row in A]
    U = identity(m) if transforms else None
    V = identity(n) if transforms else None

    def row_combo(i, j, a, b, c, d):
        # (row_i, row_j) <- (a*row_i + b*row_j, c*row_i + d*row_j)
        for M in (D, U) if transforms else (D,):
            ri, rj = M[i], M[j]
            M[i] = [a * x + b * y for x, y in zip(ri, rj)]
            M[j] = [c * x + d * y for x, y in zip(ri, rj)]

    def col_combo(i, j, a, b, c, d):
        for M in (D, V) if transforms else (D,):
            for row in M:
                x, y = row[i], row[j]
                row[i] = a * x + b * y
                row[j] = c * x + d * y

    def swap_rows(i, j):
        for M in (D, U) if transforms else (D,):
            M[i], M[j] = M[j], M[i]

    def swap_cols(i, j):
        for M in (D, V) if transforms else (D,):
            for row in M:
                row[i], row[j] = row[j], row[i]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        while True:
            for i in range(t + 1, m):
                b = D[i][t]
                if not b:
                    continue
                a = D[t][t]
                if b % a == 0:
                    row_combo(t, i, 1, 0, -(b // a), 1)
                else:
                    g, s, u = _xgcd(a, b)
                    row_combo(t, i, s, u, -(b // g), a // g)
            for j in range(t + 1, n):
                b = D[t][j]
                if not b:
                    continue
                a = D[t][t]
                if b % a == 0:
                    col_combo(t, j, 1, 0, -(b // a), 1)
                else:
                    g, s, u = _xgcd(a, b)
                    col_combo(t, j, s, u, -(b // g), a // g)
            if any(D[i][t] for i in range(t + 1, m)):
                continue
            a = D[t][t]
            bad = None
            for i in range(t + 1, m):
                row = D[i]
                for j in range(t + 1, n):
                    if row[j] % a:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_combo(t, bad, 1, 1, 0, 1)
        if D[t][t] < 0:
            if transforms:
                U[t] = [-x for x in U[t]]
            D[t] = [-x for x in D[t]]
    return SmithDecomposition(U, D, V)


def elementary_divisors(A) -> list[int]:
    """Diagonal of the Smith form (length ``min(rows, cols)``, zeros included)."""
    if not A or not A[0]:
        return []
    return smith_normal_form(A, transforms=False).diagonal


def rank_mod_p(A, p: int) -> int:
    """Rank of an integer matrix over ``F_p``."""
    M = [[x % p for x in row] for row in A if any(x % p for x in row)]
    if not M:
        return 0
    ncols = len(M[0])
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][c]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        prow = M[rank]
        inv = pow(prow[c], -1, p)
        nz = [j for j in range(c, ncols) if prow[j]]
        for r in range(rank + 1, len(M)):
            row = M[r]
            x = row[c]
            if x:
                f = x * inv % p
                for j in nz:
                    row[j] = (row[j] - f * prow[j]) % p
        rank += 1
        if rank == len(M):
            break
    return rank


def rank_rational(A) -> int:
    """Exact rank over Q by fraction-free (Bareiss) echelon elimination."""
    M = [list(row) for row in A if any(row)]
    if not M:
        return 0
    ncols = len(M[0])
    rank, prev = 0, 1
    for c in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][c]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        prow = M[rank]
        a = prow[c]
        for r in range(rank + 1, len(M)):
            row = M[r]
            x = row[c]
            for j in range(c + 1, ncols):
                row[j] = (a * row[j] - x * prow[j]) // prev
            row[c] = 0
        prev = a
        rank += 1
        if rank == len(M):
            break
    return rank


# ---------------------------------------------------------------------------
# polynomial matrices


class PolyMatrix:
    """Dense matrix of Laurent polynomials sharing one ring."""

    def __init__(self, entries: Sequence[Sequence[LaurentPoly]], nvars: int | None = None,
                 p: int | None = None, cols: int | None = None):
        rows = [list(r) for r in entries]
        first = next((x for r in rows for x in r), None)
        if first is not None:
            nvars = first.nvars if nvars is None else nvars
            p = first.p if p is None else p
        if nvars is None:
            raise ValueError("cannot infer ring of an empty matrix; pass nvars")
        self.nvars = nvars
        self.p = p or 0
        self.rows = len(rows)
        self.cols = len(rows[0]) if rows else (cols or 0)
        for r in rows:
            if len(r) != self.cols:
                raise ValueError("ragged matrix")
            for x in r:
                if x.nvars != self.nvars or x.p != self.p:
                    raise DomainError("matrix entries from different rings")
        self.entries = rows

    @classmethod
    def from_ints(cls, rows, nvars: int, p: int = 0) -> "PolyMatrix":
        return cls([[LaurentPoly.constant(x, nvars, p) for x in r] for r in rows], nvars, p,
                   cols=len(rows[0]) if rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return (isinstance(other, PolyMatrix) and self.entries == other.entries
                and self.rows == other.rows and self.cols == other.cols)

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in r) for r in self.entries)
        return f"PolyMatrix({self.rows}x{self.cols}: [{body}])"

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.entries for x in r)

    def reduce_mod(self, p: int) -> "PolyMatrix":
        return PolyMatrix([[x.map_coefficients(p) for x in r] for r in self.entries],
                          self.nvars, p, cols=self.cols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix([[self.entries[i][j] for j in cols] for i in rows], self.nvars, self.p,
                          cols=len(cols))

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([list(c) for c in zip(*self.entries)], self.nvars, self.p, cols=self.rows)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        zero = LaurentPoly.zero(self.nvars, self.p)
        out = []
        for r in self.entries:
            row = []
            for j in range(other.cols):
                acc = zero
                for k, x in enumerate(r):
                    if x:
                        y = other.entries[k][j]
                        if y:
                            acc = acc + x * y
                row.append(acc)
            out.append(row)
        return PolyMatrix(out, self.nvars, self.p, cols=other.cols)

    def evaluate(self, field, point, inverses=None) -> list[list]:
        """Entries evaluated at ``point`` (elements of ``field``)."""
        if inverses is None:
            inverses = [field.inv(v) for v in point]
        cache: dict = {}

        def power(j, k):
            key = (j, k)
            v = cache.get(key)
            if v is None:
                base = point[j] if k > 0 else inverses[j]
                v = cache[key] = field.pow(base, abs(k))
            return v

        out = []
        for r in self.entries:
            row = []
            for h in r:
                acc = field.zero
                for e, c in h.items():
                    term = field.from_int(c)
                    for j, k in enumerate(e):
                        if k:
                            term = field.mul(term, power(j, k))
                    acc = field.add(acc, term)
                row.append(acc)
            out.append(row)
        return out


def _sample_fields(p: int):
    if p == 0:
        return [PrimeField(q) for q in LARGE_PRIMES]
    if p >= 2 ** 30:
        return [PrimeField(p)]
    return [ExtensionField.at_least(p, 30)]


def rank_over_fractions(M: PolyMatrix, mode: str = "montecarlo", seed: int = 0,
                        trials: int = 3) -> int:
    """Rank of ``M`` over the fraction field of its entry ring.

    ``mode="montecarlo"``: max rank over ``trials`` random evaluations (a
    specialisation can only lower the rank).  Over Z the evaluations happen
    in ``F_q`` for 61/62-bit primes ``q`` at points drawn from ``[1, 2^40]``,
    the second prime serving as a cross-check; over small ``F_p`` they happen
    in an extension field of order at least ``2^30``.

    ``mode="exact"``: fraction-free elimination with polynomial pivots.
    """
    if M.rows == 0 or M.cols == 0 or M.is_zero():
        return 0
    if mode == "exact":
        return _bareiss(M)[0]
    if mode != "montecarlo":
        raise ValueError(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    best = 0
    full = min(M.rows, M.cols)
    fields = _sample_fields(M.p)
    runs = [(fields[0], t) for t in range(trials)] + [(f, 0) for f in fields[1:]]
    for field, _ in runs:
        point = [field.random_nonzero(rng, 2 ** 40) for _ in range(M.nvars)]
        best = max(best, field_rank(field, M.evaluate(field, point)))
        if best == full:
            break
    return best


def _pick_pivot(A, k, n_rows, n_cols):
    best = None
    for i in range(k, n_rows):
        for j in range(k, n_cols):
            x = A[i][j]
            if x:
                size = len(x)
                if best is None or size < best[0]:
                    best = (size, i, j)
                    if size == 1:
                        return best
    return best


def _bareiss(M: PolyMatrix):
    """Fraction-free elimination with full pivoting; returns (rank, det-or-None)."""
    A = [list(r) for r in M.entries]
    n_rows, n_cols = M.rows, M.cols
    one = LaurentPoly.one(M.nvars, M.p)
    prev = one
    sign = 1
    k = 0
    while k < min(n_rows, n_cols):
        best = _pick_pivot(A, k, n_rows, n_cols)
        if best is None:
            break
        _, pi, pj = best
        if pi != k:
            A[k], A[pi] = A[pi], A[k]
            sign = -sign
        if pj != k:
            for row in A:
                row[k], row[pj] = row[pj], row[k]
            sign = -sign
        piv = A[k][k]
        for i in range(k + 1, n_rows):
            x = A[i][k]
            row = A[i]
            for j in range(k + 1, n_cols):
                num = piv * row[j] - x * A[k][j]
                row[j] = num // prev if num else num
            row[k] = LaurentPoly.zero(M.nvars, M.p)
        prev = piv
        k += 1
    det = None
    if n_rows == n_cols:
        if n_rows == 0:
            det = one
        elif k < n_rows:
            det = LaurentPoly.zero(M.nvars, M.p)
        else:
            det = A[-1][-1] * sign
    return k, det


def poly_determinant(M: PolyMatrix) -> LaurentPoly:
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    if M.rows == 1:
        return M.entries[0][0]
    if M.rows == 2:
        (a, b), (c, d) = M.entries
        return a * d - b * c
    return _bareiss(M)[1]


def split_units(M: PolyMatrix, r: int) -> tuple[PolyMatrix, int]:
    """Pivot away unit entries: returns ``(M', r')`` with the same ideal of
    ``r x r`` minors as ``M`` generated by the ``r' x r'`` minors of ``M'``.
    Zero rows and columns are dropped."""
    A = [list(row) for row in M.entries if any(row)]
    while r > 0 and A:
        cols = [j for j in range(len(A[0])) if any(row[j] for row in A)]
        A = [[row[j] for j in cols] for row in A]
        if not A or not A[0]:
            break
        hit = next(((i, j) for i, row in enumerate(A) for j, x in enumerate(row) if x.is_unit()), None)
        if hit is None:
            break
        pi, pj = hit
        inv = A[pi][pj] ** -1
        prow = A[pi]
        rest = []
        for i, row in enumerate(A):
            if i == pi:
                continue
            x = row[pj]
            if x:
                f = x * inv
                row = [a - f * b if b else a for a, b in zip(row, prow)]
            rest.append([a for j, a in enumerate(row) if j != pj])
        A = [row for row in rest if any(row)]
        r -= 1
    cols = len(A[0]) if A else 0
    return PolyMatrix(A, M.nvars, M.p, cols=cols), r


def gcd_of_minors(M: PolyMatrix, r: int, budget: int = 100_000, seed: int = 0) -> LaurentPoly:
    """Gcd of all nonzero ``r x r`` minors, in normal form.

    Unit entries are pivoted away first (this keeps the determinantal ideal);
    a constant remainder is finished off by its Smith form.  Otherwise random row/column subsets are tried, then every subset in order;
    enumeration stops as soon as the running gcd is a unit.
    """
    if M.p:
        raise DomainError("gcd of minors needs integer coefficients")
    if r < 1 or r > min(M.rows, M.cols):
        raise ValueError(f"minor size {r} outside 1..{min(M.rows, M.cols)}")
    M, r = split_units(M, r)
    if r == 0:
        return LaurentPoly.one(M.nvars)
    if r > min(M.rows, M.cols):
        raise MinorsVanish("all minors of the requested size vanish")
    if all(x.is_constant() for row in M.entries for x in row):
        # integer matrix: the gcd of r x r minors is d_1 * ... * d_r
        d = elementary_divisors([[x.constant_value() for x in row] for row in M.entries])
        if len(d) < r or not d[r - 1]:
            raise MinorsVanish("all minors of the requested size vanish")
        return LaurentPoly.constant(math.prod(d[:r]), M.nvars)
    row_sets = math.comb(M.rows, r)
    col_sets = math.comb(M.cols, r)
    total = row_sets * col_sets
    rng = random.Random(seed)
    seen = set()
    g = None
    count = 0

    def candidates():
        for _ in range(min(total, 16)):
            yield (tuple(sorted(rng.sample(range(M.rows), r))),
                   tuple(sorted(rng.sample(range(M.cols), r))))
        for rows in itertools.combinations(range(M.rows), r):
            for cols in itertools.combinations(range(M.cols), r):
                yield rows, cols

    for key in candidates():
        if key in seen:
            continue
        seen.add(key)
        if count >= budget:
            raise BudgetExceeded(
                f"budget of {budget} minors exhausted ({total} in total) before the gcd became a unit"
            )
        count += 1
        d = poly_determinant(M.submatrix(*key))
        if d.is_zero():
            continue
        g = d if g is None else lp_gcd(g, d)
        if g.is_unit():
            break
    if g is None:
        raise MinorsVanish(f"all {r}x{r} minors vanish")
    return g.normal_form()
