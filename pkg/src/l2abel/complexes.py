"""Chain complexes of free modules over the group ring ``Z[Z^n + T]``.

Matrices use the row convention: the boundary ``C_{i+1} -> C_i`` is a
``rank C_{i+1} x rank C_i`` matrix whose row ``k`` is the boundary of cell
``k``.  ``boundaries[i]`` is that map (so ``boundaries[0]`` lands in
``C_0``), and ``boundaries[i + 1] @ boundaries[i] == 0``.
"""

from __future__ import annotations

import re
from typing import Sequence

from .laurent import LaurentPoly
from .presentations import (
    AbelianTarget,
    ConstraintError,
    Epimorphism,
    GroupPresentation,
    ParseError,
    fox_derivative,
)
from .zlinalg import PolyMatrix

__all__ = [
    "GroupRingElem",
    "GroupRingComplex",
    "ComplexError",
    "presentation_complex",
    "raw_complex",
    "torsion_reduce",
    "circle_complex",
    "tensor_product",
    "parse_complex",
    "format_complex",
]


class ComplexError(ValueError):
    """Boundary maps do not compose to zero or have inconsistent shapes."""


class GroupRingElem:
    """Finite sum ``sum c * t^a * tau`` with ``a`` in ``Z^n`` and ``tau`` in ``T``."""

    __slots__ = ("target", "p", "_terms")

    def __init__(self, target: AbelianTarget, terms: dict | None = None, p: int = 0):
        self.target = target
        self.p = p
        clean: dict = {}
        for (a, tau), c in (terms or {}).items():
            key = (tuple(a), target.reduce(tau))
            clean[key] = clean.get(key, 0) + c
        if p:
            clean = {k: c % p for k, c in clean.items() if c % p}
        else:
            clean = {k: c for k, c in clean.items() if c}
        self._terms = clean

    @classmethod
    def _raw(cls, target, terms, p):
        obj = cls.__new__(cls)
        obj.target, obj.p, obj._terms = target, p, terms
        return obj

    @classmethod
    def constant(cls, target: AbelianTarget, c: int, p: int = 0) -> "GroupRingElem":
        return cls(target, {((0,) * target.free_rank, (0,) * len(target.torsion_orders)): c}, p)

    @classmethod
    def group_element(cls, target: AbelianTarget, free, torsion=None, p: int = 0):
        torsion = torsion if torsion is not None else (0,) * len(target.torsion_orders)
        return cls(target, {(tuple(free), tuple(torsion)): 1}, p)

    @classmethod
    def from_laurent(cls, h: LaurentPoly, target: AbelianTarget | None = None) -> "GroupRingElem":
        target = target or AbelianTarget(h.nvars)
        t0 = (0,) * len(target.torsion_orders)
        return cls._raw(target, {(e, t0): c for e, c in h.items()}, h.p)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def _coerce(self, other):
        if isinstance(other, int):
            return GroupRingElem.constant(self.target, other, self.p)
        if other.target != self.target or other.p != self.p:
            raise ValueError("group ring elements over different rings")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, 0) + c
            if self.p:
                v %= self.p
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return GroupRingElem._raw(self.target, out, self.p)

    __radd__ = __add__

    def __neg__(self):
        p = self.p
        return GroupRingElem._raw(
            self.target, {k: (-c) % p if p else -c for k, c in self._terms.items()}, p
        )

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        if isinstance(other, int):
            return GroupRingElem(self.target, {k: c * other for k, c in self._terms.items()}, self.p)
        other = self._coerce(other)
        orders = self.target.torsion_orders
        out: dict = {}
        for (a1, t1), c1 in self._terms.items():
            for (a2, t2), c2 in other._terms.items():
                key = (tuple(x + y for x, y in zip(a1, a2)),
                       tuple((x + y) % d for x, y, d in zip(t1, t2, orders)))
                out[key] = out.get(key, 0) + c1 * c2
        return GroupRingElem(self.target, out, self.p)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            other = GroupRingElem.constant(self.target, other, self.p)
        if not isinstance(other, GroupRingElem):
            return NotImplemented
        return self.target == other.target and self.p == other.p and self._terms == other._terms

    def __hash__(self):
        return hash((self.target, self.p, frozenset(self._terms.items())))

    def to_laurent(self) -> LaurentPoly:
        if self.target.torsion_orders:
            raise ValueError("element has a torsion part; apply torsion_reduce first")
        return LaurentPoly(self.target.free_rank, {a: c for (a, _), c in self._terms.items()}, self.p)

    def map_coefficients(self, p: int) -> "GroupRingElem":
        return GroupRingElem(self.target, self._terms, p)

    def __repr__(self):
        return f"GroupRingElem({format_elem(self)})"


def format_elem(x: GroupRingElem) -> str:
    if x.is_zero():
        return "0"
    parts = []
    for (a, tau), c in sorted(x.items()):
        parts.append(f"{c} ({','.join(map(str, a))}) [{','.join(map(str, tau))}]")
    return " ".join(parts)


def _zero_matrix(target, rows, cols, p=0):
    z = GroupRingElem(target, None, p)
    return [[z] * cols for _ in range(rows)]


def _matmul(A, B, target, p):
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        new = []
        for j in range(cols):
            acc = GroupRingElem(target, None, p)
            for k, x in enumerate(row):
                if x:
                    y = B[k][j]
                    if y:
                        acc = acc + x * y
            new.append(acc)
        out.append(new)
    return out


class GroupRingComplex:
    """Bounded chain complex ``C_top -> ... -> C_0`` of free ``Z[H]``-modules."""

    def __init__(self, target: AbelianTarget, ranks: Sequence[int], boundaries: Sequence, p: int = 0,
                 check: bool = True):
        self.target = target
        self.ranks = tuple(int(r) for r in ranks)
        self.p = p
        self.boundaries = [[list(row) for row in M] for M in boundaries]
        if len(self.boundaries) != max(len(self.ranks) - 1, 0):
            raise ComplexError(f"{len(self.ranks)} modules need {len(self.ranks) - 1} boundary maps")
        for i, M in enumerate(self.boundaries):
            if len(M) != self.ranks[i + 1] or any(len(r) != self.ranks[i] for r in M):
                raise ComplexError(
                    f"boundary C_{i + 1} -> C_{i} must be {self.ranks[i + 1]}x{self.ranks[i]}"
                )
            for row in M:
                for x in row:
                    if x.target != target or x.p != p:
                        raise ComplexError(f"boundary C_{i + 1} -> C_{i} has entries from another ring")
        if check:
            self.check()

    def check(self) -> None:
        for i in range(len(self.boundaries) - 1):
            prod = _matmul(self.boundaries[i + 1], self.boundaries[i], self.target, self.p)
            for r, row in enumerate(prod):
                for c, x in enumerate(row):
                    if x:
                        raise ComplexError(
                            f"boundary composite C_{i + 2} -> C_{i} nonzero at ({r}, {c}): {format_elem(x)}"
                        )

    @property
    def top_degree(self) -> int:
        return len(self.ranks) - 1

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** i * r for i, r in enumerate(self.ranks))

    def rank(self, i: int) -> int:
        return self.ranks[i] if 0 <= i < len(self.ranks) else 0

    def boundary(self, i: int):
        """Matrix of ``C_{i+1} -> C_i`` (empty list when out of range)."""
        if 0 <= i < len(self.boundaries):
            return self.boundaries[i]
        return None

    def poly_boundary(self, i: int) -> PolyMatrix:
        """Boundary ``C_{i+1} -> C_i`` as a Laurent-polynomial matrix (trivial torsion only)."""
        n = self.target.free_rank
        M = self.boundary(i)
        rows, cols = self.rank(i + 1), self.rank(i)
        if M is None:
            return PolyMatrix([[LaurentPoly.zero(n, self.p)] * cols for _ in range(rows)], n, self.p, cols=cols)
        return PolyMatrix([[x.to_laurent() for x in row] for row in M], n, self.p, cols=cols)

    def map_coefficients(self, p: int) -> "GroupRingComplex":
        bs = [[[x.map_coefficients(p) for x in row] for row in M] for M in self.boundaries]
        return GroupRingComplex(self.target, self.ranks, bs, p, check=False)

    def __eq__(self, other):
        return (isinstance(other, GroupRingComplex) and self.target == other.target
                and self.ranks == other.ranks and self.p == other.p
                and self.boundaries == other.boundaries)

    def __repr__(self):
        return f"GroupRingComplex(target={self.target}, ranks={self.ranks})"


def presentation_complex(P: GroupPresentation, nu: Epimorphism, H: AbelianTarget | None = None,
                         p: int = 0) -> GroupRingComplex:
    """Cellular chains of the ``nu``-cover of the presentation 2-complex."""
    H = H or nu.target
    if H != nu.target:
        raise ConstraintError("epimorphism target differs from H")
    nu.validate(P)
    k = P.generator_count
    one = GroupRingElem.constant(H, 1, p)
    d1 = []
    for j in range(k):
        g = GroupRingElem.group_element(H, nu.free_images[j], nu.torsion_images[j], p)
        d1.append([g - one])
    d2 = [[fox_derivative(r, j, nu, p) for j in range(k)] for r in P.relators]
    return GroupRingComplex(H, (1, k, len(P.relators)), [d1, d2], p)


def raw_complex(target: AbelianTarget, ranks: Sequence[int], boundaries: Sequence, p: int = 0):
    """Validated complex from explicit boundary matrices.

    Entries may be :class:`GroupRingElem`, :class:`LaurentPoly` (trivial
    torsion) or ints.
    """
    def coerce(x):
        if isinstance(x, GroupRingElem):
            return x
        if isinstance(x, LaurentPoly):
            return GroupRingElem.from_laurent(x, target)
        return GroupRingElem.constant(target, int(x), p)

    bs = [[[coerce(x) for x in row] for row in M] for M in boundaries]
    return GroupRingComplex(target, ranks, bs, p)


def torsion_reduce(C: GroupRingComplex) -> GroupRingComplex:
    """Pass to the ``T``-cover: a complex over ``Z[Z^n]`` with ranks times ``|T|``.

    A torsion element ``tau`` acts on ``Z[T]`` by the permutation
    ``sigma -> sigma + tau`` in the mixed-radix basis of ``T``.
    """
    H = C.target
    if not H.torsion_orders:
        return C
    elems = H.torsion_elements()
    size = len(elems)
    index = {t: i for i, t in enumerate(elems)}
    orders = H.torsion_orders
    F = H.free_part()
    zero_t = ()
    bs = []
    for M in C.boundaries:
        rows = len(M) * size
        cols = (len(M[0]) if M else 0) * size
        acc = [[{} for _ in range(cols)] for _ in range(rows)]
        for i, row in enumerate(M):
            for j, x in enumerate(row):
                for (a, tau), c in x.items():
                    for s, sigma in enumerate(elems):
                        target_idx = index[tuple((u + v) % d for u, v, d in zip(sigma, tau, orders))]
                        cell = acc[i * size + s][j * size + target_idx]
                        key = (a, zero_t)
                        cell[key] = cell.get(key, 0) + c
        bs.append([[GroupRingElem(F, cell, C.p) for cell in row] for row in acc])
    return GroupRingComplex(F, tuple(r * size for r in C.ranks), bs, C.p, check=False)


def circle_complex() -> GroupRingComplex:
    """The circle with its universal abelian cover: ``C_1 -> C_0`` is ``t - 1``."""
    H = AbelianTarget(1)
    t = GroupRingElem.group_element(H, (1,))
    return GroupRingComplex(H, (1, 1), [[[t - 1]]])


def tensor_product(C: GroupRingComplex, D: GroupRingComplex) -> GroupRingComplex:
    """Cellular chains of the product, over ``Z[Z^(a+b)]`` (free targets only)."""
    if C.target.torsion_orders or D.target.torsion_orders:
        raise ValueError("tensor_product supports free targets only")
    if C.p != D.p:
        raise ValueError("coefficient domains differ")
    a, b = C.target.free_rank, D.target.free_rank
    H = AbelianTarget(a + b)
    p = C.p

    def lift_left(x):
        return GroupRingElem(H, {(e + (0,) * b, ()): c for (e, _), c in x.items()}, p)

    def lift_right(x):
        return GroupRingElem(H, {((0,) * a + e, ()): c for (e, _), c in x.items()}, p)

    top = C.top_degree + D.top_degree
    basis = []
    for k in range(top + 1):
        cells = []
        for i in range(k + 1):
            j = k - i
            for u in range(C.rank(i)):
                for v in range(D.rank(j)):
                    cells.append((i, u, j, v))
        basis.append(cells)
    ranks = [len(c) for c in basis]
    zero = GroupRingElem(H, None, p)
    bs = []
    for k in range(1, top + 1):
        pos = {cell: idx for idx, cell in enumerate(basis[k - 1])}
        M = [[zero] * ranks[k - 1] for _ in range(ranks[k])]
        for r, (i, u, j, v) in enumerate(basis[k]):
            if i >= 1:
                for w, x in enumerate(C.boundaries[i - 1][u]):
                    if x:
                        col = pos[(i - 1, w, j, v)]
                        M[r][col] = M[r][col] + lift_left(x)
            if j >= 1:
                sign = -1 if i % 2 else 1
                for w, x in enumerate(D.boundaries[j - 1][v]):
                    if x:
                        col = pos[(i, u, j - 1, w)]
                        M[r][col] = M[r][col] + lift_right(x) * sign
        bs.append(M)
    return GroupRingComplex(H, ranks, bs, p)


# ---------------------------------------------------------------------------
# text format

_TERM = re.compile(r"\s*(-?\d+)\s*\(([^)]*)\)\s*\[([^\]]*)\]")


def _ints(s: str) -> tuple:
    s = s.strip()
    return tuple(int(x) for x in s.split(",")) if s else ()


def parse_complex(text: str) -> GroupRingComplex:
    """Read a raw complex file.

    ::

        free.rank = 2
        torsion.orders = 3        # optional
        ranks = 1 2 1
        boundary 1                # C_1 -> C_0, one row per cell of C_1
        entry 0 0 = 1 (1,0) [0] -1 (0,0) [0]
    """
    free_rank = None
    orders: tuple = ()
    ranks = None
    blocks: dict[int, dict] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        s = line.strip()
        if s.startswith("boundary"):
            parts = s.split()
            if len(parts) != 2 or not parts[1].lstrip("-").isdigit():
                raise ParseError("expected 'boundary <degree>'", lineno, 1)
            current = int(parts[1])
            if current < 1:
                raise ParseError("boundary degree must be >= 1", lineno, 10)
            blocks.setdefault(current, {})
            continue
        if s.startswith("entry"):
            if current is None:
                raise ParseError("entry before any 'boundary' header", lineno, 1)
            head, eq, body = s.partition("=")
            idx = head.split()[1:]
            if not eq or len(idx) != 2:
                raise ParseError("expected 'entry <row> <col> = <terms>'", lineno, 1)
            try:
                r, c = int(idx[0]), int(idx[1])
            except ValueError:
                raise ParseError("entry indices must be integers", lineno, 7) from None
            terms = {}
            pos = 0
            offset = raw.index("=") + 1
            while pos < len(body):
                if not body[pos:].strip():
                    break
                m = _TERM.match(body, pos)
                if not m:
                    raise ParseError("expected 'coef (e1,...,en) [r1,...,rk]'", lineno, offset + pos + 1)
                try:
                    key = (_ints(m.group(2)), _ints(m.group(3)))
                except ValueError:
                    raise ParseError("exponents must be integers", lineno, offset + pos + 1) from None
                terms[key] = terms.get(key, 0) + int(m.group(1))
                pos = m.end()
            blocks[current][(r, c)] = (terms, lineno)
            continue
        key, eq, value = s.partition("=")
        if not eq:
            raise ParseError("expected 'key = value'", lineno, 1)
        key = key.strip()
        try:
            ints = tuple(int(x) for x in value.split())
        except ValueError:
            raise ParseError(f"expected integers after {key}", lineno, raw.index("=") + 2) from None
        if key == "free.rank":
            free_rank = ints[0]
        elif key == "torsion.orders":
            orders = ints
        elif key == "ranks":
            ranks = ints
        else:
            raise ParseError(f"unknown key {key!r}", lineno, 1)
    if free_rank is None or ranks is None:
        raise ParseError("missing 'free.rank' or 'ranks'")
    H = AbelianTarget(free_rank, orders)
    bs = []
    for i in range(1, len(ranks)):
        M = _zero_matrix(H, ranks[i], ranks[i - 1])
        for (r, c), (terms, lineno) in blocks.get(i, {}).items():
            if not (0 <= r < ranks[i] and 0 <= c < ranks[i - 1]):
                raise ParseError(f"entry ({r}, {c}) outside a {ranks[i]}x{ranks[i - 1]} block", lineno)
            for a, tau in terms:
                if len(a) != free_rank or len(tau) != len(orders):
                    raise ParseError("exponent vector length does not match the target", lineno)
            M[r][c] = GroupRingElem(H, terms)
        bs.append(M)
    extra = [i for i in blocks if i >= len(ranks)]
    if extra:
        raise ParseError(f"boundary {extra[0]} exceeds the top degree {len(ranks) - 1}")
    return GroupRingComplex(H, ranks, bs)


def format_complex(C: GroupRingComplex) -> str:
    lines = [f"free.rank = {C.target.free_rank}"]
    if C.target.torsion_orders:
        lines.append("torsion.orders = " + " ".join(map(str, C.target.torsion_orders)))
    lines.append("ranks = " + " ".join(map(str, C.ranks)))
    for i, M in enumerate(C.boundaries, 1):
        lines.append(f"boundary {i}")
        for r, row in enumerate(M):
            for c, x in enumerate(row):
                if x:
                    lines.append(f"entry {r} {c} = {format_elem(x)}")
    return "\n".join(lines) + "\n"
