"""Finitely presented groups, abelian targets, epimorphisms and orbifold groups.

Words are tuples of nonzero ints: ``j + 1`` is generator ``j`` and
``-(j + 1)`` its inverse.  In text, generator ``j`` is written ``g{j+1}``
(``g3``, ``g3^-1``, ``g3^4``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence

from .zlinalg import smith_normal_form

__all__ = [
    "ParseError",
    "ConstraintError",
    "GroupPresentation",
    "AbelianTarget",
    "Epimorphism",
    "OrbifoldType",
    "parse_word",
    "format_word",
    "fox_derivative",
    "orbifold_presentation",
    "orbifold_epimorphism",
    "abelianization",
    "free_abelianization_epimorphism",
    "parse_presentation",
    "format_presentation",
]


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class ConstraintError(ValueError):
    """Input violates a mathematical constraint (e.g. ``m_j`` not dividing ``mu_j``)."""


# ---------------------------------------------------------------------------
# words

_TOKEN = re.compile(r"g(\d+)(?:\^(-?\d+))?$")


def parse_word(text: str, generator_count: int | None = None, line: int | None = None) -> tuple:
    """Parse whitespace-separated ``gK`` / ``gK^e`` tokens; ``1`` is the empty word."""
    letters: list[int] = []
    col = 0
    for tok in text.split():
        col = text.index(tok, col) + 1
        if tok == "1":
            continue
        m = _TOKEN.match(tok)
        if not m:
            raise ParseError(f"bad word token {tok!r}", line, col)
        j = int(m.group(1))
        if j < 1 or (generator_count is not None and j > generator_count):
            raise ParseError(f"generator g{j} out of range", line, col)
        e = int(m.group(2)) if m.group(2) is not None else 1
        letters.extend([j if e > 0 else -j] * abs(e))
        col += len(tok) - 1
    return tuple(letters)


def format_word(w: Sequence[int]) -> str:
    if not w:
        return "1"
    return " ".join(f"g{x}" if x > 0 else f"g{-x}^-1" for x in w)


def free_reduce(w: Sequence[int]) -> tuple:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


# ---------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class GroupPresentation:
    generator_count: int
    relators: tuple = ()
    names: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "relators", tuple(tuple(r) for r in self.relators))
        for r in self.relators:
            for x in r:
                if x == 0 or abs(x) > self.generator_count:
                    raise ValueError(f"relator letter {x} references no generator")
        if self.names is not None and len(self.names) != self.generator_count:
            raise ValueError("one name per generator required")

    def relation_matrix(self) -> list[list[int]]:
        """Exponent-sum matrix (relators x generators)."""
        rows = []
        for r in self.relators:
            row = [0] * self.generator_count
            for x in r:
                row[abs(x) - 1] += 1 if x > 0 else -1
            rows.append(row)
        return rows


@dataclass(frozen=True)
class AbelianTarget:
    """``H = Z^free_rank + Z/d_1 + ... + Z/d_k``."""

    free_rank: int
    torsion_orders: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion_orders", tuple(int(d) for d in self.torsion_orders))
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        for d in self.torsion_orders:
            if d < 2:
                raise ConstraintError(f"torsion order {d} must be >= 2")

    @property
    def torsion_size(self) -> int:
        return math.prod(self.torsion_orders)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.torsion_orders) if self.torsion_orders else 1

    def reduce(self, torsion: Sequence[int]) -> tuple:
        return tuple(x % d for x, d in zip(torsion, self.torsion_orders))

    def free_part(self) -> "AbelianTarget":
        return AbelianTarget(self.free_rank)

    def torsion_elements(self):
        """Torsion elements in mixed-radix order (last factor fastest)."""
        out = [()]
        for d in self.torsion_orders:
            out = [t + (k,) for t in out for k in range(d)]
        return out

    def order_of(self, torsion: Sequence[int]) -> int:
        o = 1
        for x, d in zip(torsion, self.torsion_orders):
            o = math.lcm(o, d // math.gcd(x % d, d))
        return o


@dataclass(frozen=True)
class Epimorphism:
    """Images of the generators in ``H`` (free part, torsion part)."""

    target: AbelianTarget
    free_images: tuple
    torsion_images: tuple = field(default=None)

    def __post_init__(self):
        fi = tuple(tuple(int(x) for x in v) for v in self.free_images)
        n, k = self.target.free_rank, len(self.target.torsion_orders)
        ti = self.torsion_images
        ti = tuple(((),) * len(fi)) if ti is None and k == 0 else ti
        if ti is None:
            raise ValueError("torsion images required for a target with torsion")
        ti = tuple(self.target.reduce(v) for v in ti)
        if len(ti) != len(fi):
            raise ValueError("free and torsion images disagree on generator count")
        for v in fi:
            if len(v) != n:
                raise ValueError(f"free image {v} should have length {n}")
        for v in ti:
            if len(v) != k:
                raise ValueError(f"torsion image {v} should have length {k}")
        object.__setattr__(self, "free_images", fi)
        object.__setattr__(self, "torsion_images", ti)

    @property
    def generator_count(self) -> int:
        return len(self.free_images)

    def image(self, w: Sequence[int]) -> tuple:
        """``nu(w)`` as ``(free vector, torsion vector)``."""
        n = self.target.free_rank
        free = [0] * n
        tors = [0] * len(self.target.torsion_orders)
        for x in w:
            s = 1 if x > 0 else -1
            j = abs(x) - 1
            for i in range(n):
                free[i] += s * self.free_images[j][i]
            for i, v in enumerate(self.torsion_images[j]):
                tors[i] += s * v
        return tuple(free), self.target.reduce(tors)

    def is_surjective(self) -> bool:
        n = self.target.free_rank
        orders = self.target.torsion_orders
        width = n + len(orders)
        if width == 0:
            return True
        rows = [list(f) + list(t) for f, t in zip(self.free_images, self.torsion_images)]
        for i, d in enumerate(orders):
            row = [0] * width
            row[n + i] = d
            rows.append(row)
        diag = smith_normal_form(rows, transforms=False).diagonal
        return len(diag) == width and all(d == 1 for d in diag)

    def validate(self, P: GroupPresentation) -> None:
        if self.generator_count != P.generator_count:
            raise ConstraintError(
                f"epimorphism covers {self.generator_count} generators, presentation has {P.generator_count}"
            )
        trivial = ((0,) * self.target.free_rank, (0,) * len(self.target.torsion_orders))
        for k, r in enumerate(P.relators):
            if self.image(r) != trivial:
                raise ConstraintError(f"relator {k + 1} ({format_word(r)}) does not map to the identity")
        if not self.is_surjective():
            raise ConstraintError("images do not generate the target group")


@dataclass(frozen=True)
class OrbifoldType:
    """Orbifold data ``(g, r, mu)`` with optional divisors ``m`` (``m_j | mu_j``)."""

    genus: int
    punctures: int
    mu: tuple = ()
    m: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "mu", tuple(int(x) for x in self.mu))
        if self.m is not None:
            object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        self.validate()

    def validate(self) -> None:
        if self.genus < 0 or self.punctures < 0:
            raise ConstraintError("genus and puncture count must be non-negative")
        if (self.genus, self.punctures) in ((0, 0), (0, 1)):
            raise ConstraintError("the base curve must not be the projective line or the affine line")
        for x in self.mu:
            if x < 2:
                raise ConstraintError(f"multiplicity {x} must be >= 2")
        if self.m is not None:
            if len(self.m) != len(self.mu):
                raise ConstraintError("need one divisor m_j per multiplicity mu_j")
            for j, (mj, uj) in enumerate(zip(self.m, self.mu)):
                if mj < 1 or uj % mj:
                    raise ConstraintError(f"m_{j + 1} = {mj} does not divide mu_{j + 1} = {uj}")

    @property
    def s(self) -> int:
        return len(self.mu)

    @property
    def free_generator_count(self) -> int:
        """Generators not of finite order: ``a_i, b_i, c_k``."""
        return 2 * self.genus + max(self.punctures - 1, 0)


# ---------------------------------------------------------------------------
# Fox calculus


def fox_derivative(w: Sequence[int], j: int, nu: Epimorphism, p: int = 0):
    """Image under ``nu`` of the Fox derivative of ``w`` by generator ``j`` (0-based)."""
    from .complexes import GroupRingElem

    target = nu.target
    n = target.free_rank
    k = len(target.torsion_orders)
    out: dict = {}
    free = [0] * n
    tors = [0] * k
    for x in w:
        g = abs(x) - 1
        fi, ti = nu.free_images[g], nu.torsion_images[g]
        if x > 0:
            if g == j:
                key = (tuple(free), target.reduce(tors))
                out[key] = out.get(key, 0) + 1
            for i in range(n):
                free[i] += fi[i]
            for i in range(k):
                tors[i] += ti[i]
        else:
            for i in range(n):
                free[i] -= fi[i]
            for i in range(k):
                tors[i] -= ti[i]
            if g == j:
                key = (tuple(free), target.reduce(tors))
                out[key] = out.get(key, 0) - 1
    return GroupRingElem(target, out, p)


# ---------------------------------------------------------------------------
# orbifold groups


def orbifold_presentation(tau: OrbifoldType) -> GroupPresentation:
    """Presentation of the orbifold fundamental group.

    Generators ``a_1, b_1, ..., a_g, b_g, c_1, ..., c_{r-1}, gamma_1, ...,
    gamma_s``; relators ``gamma_j^{mu_j}`` and, for ``r == 0``, the surface
    relation ``prod [a_i, b_i] * prod gamma_j``.
    """
    g, r = tau.genus, tau.punctures
    names = []
    for i in range(g):
        names += [f"a{i + 1}", f"b{i + 1}"]
    names += [f"c{k + 1}" for k in range(max(r - 1, 0))]
    names += [f"gamma{j + 1}" for j in range(tau.s)]
    offset = len(names) - tau.s
    relators = []
    if r == 0:
        rel = []
        for i in range(g):
            a, b = 2 * i + 1, 2 * i + 2
            rel += [a, b, -a, -b]
        rel += [offset + j + 1 for j in range(tau.s)]
        relators.append(tuple(rel))
    for j, mu in enumerate(tau.mu):
        relators.append((offset + j + 1,) * mu)
    return GroupPresentation(len(names), tuple(relators), tuple(names))


def orbifold_epimorphism(tau: OrbifoldType, H: AbelianTarget) -> Epimorphism:
    """A surjection from the orbifold group onto ``H`` of the given type.

    The first ``n`` non-torsion generators go to the standard basis of
    ``Z^n``; ``gamma_j`` goes to ``0`` or, when ``m`` is given, to an element
    of order exactly ``m_j`` in ``T``; leftover non-torsion generators are
    spent on the cyclic factors of ``T``.
    """
    n = H.free_rank
    orders = H.torsion_orders
    k = len(orders)
    free_gens = tau.free_generator_count
    if n > free_gens:
        raise ConstraintError(
            f"free rank {n} exceeds the {free_gens} generators of infinite order available"
        )
    if k and tau.m is None:
        raise ConstraintError("a target with torsion needs the divisors m_j")
    P = orbifold_presentation(tau)
    zero_f, zero_t = (0,) * n, (0,) * k
    free_images = []
    torsion_images = []
    spare = []
    for i in range(free_gens):
        if i < n:
            e = [0] * n
            e[i] = 1
            free_images.append(tuple(e))
        else:
            free_images.append(zero_f)
            spare.append(i)
        torsion_images.append(zero_t)
    exponent = H.exponent
    for j in range(tau.s):
        mj = tau.m[j] if tau.m is not None else 1
        if exponent % mj:
            raise ConstraintError(
                f"T has no element of order m_{j + 1} = {mj} (exponent of T is {exponent})"
            )
        elem = tuple(d // math.gcd(d, mj) for d in orders)
        if H.order_of(elem) != mj:
            raise ConstraintError(f"could not realise an element of order {mj} in T")
        free_images.append(zero_f)
        torsion_images.append(elem)
    # spend spare generators of infinite order on the torsion factors
    for i, idx in zip(range(k), spare):
        e = [0] * k
        e[i] = 1
        torsion_images[idx] = tuple(e)
    nu = Epimorphism(H, tuple(free_images), tuple(torsion_images))
    try:
        nu.validate(P)
    except ConstraintError as exc:
        raise ConstraintError(f"incompatible orbifold type and target: {exc}") from None
    return nu


# ---------------------------------------------------------------------------
# abelianization


def abelianization(P: GroupPresentation) -> tuple[int, tuple]:
    """``(free rank, torsion invariants > 1)`` of the abelianized group."""
    rel = P.relation_matrix()
    if not rel:
        return P.generator_count, ()
    diag = smith_normal_form(rel, transforms=False).diagonal
    nonzero = [d for d in diag if d]
    return P.generator_count - len(nonzero), tuple(d for d in nonzero if d > 1)


def free_abelianization_epimorphism(P: GroupPresentation) -> Epimorphism:
    """The map onto the free part of ``H_1`` (torsion discarded)."""
    rel = P.relation_matrix()
    k = P.generator_count
    if not rel:
        images = [tuple(int(i == j) for i in range(k)) for j in range(k)]
        return Epimorphism(AbelianTarget(k), tuple(images))
    snf = smith_normal_form(rel)
    rank = sum(1 for d in snf.diagonal if d)
    # row space of rel becomes the row space of D in coordinates x -> x V
    images = [tuple(snf.V[j][rank:]) for j in range(k)]
    return Epimorphism(AbelianTarget(k - rank), tuple(images))


# ---------------------------------------------------------------------------
# file format


def parse_presentation(text: str) -> tuple[GroupPresentation, Epimorphism]:
    """Read a presentation file.

    Keys: ``generators = k``, ``relator = <word>`` (repeatable),
    ``nu.free = <n ints>`` and ``nu.torsion = <k residues>`` (one line per
    generator, in order), ``torsion.orders = d1 ... dk``.  Without ``nu``
    lines the free abelianization is used.
    """
    gens = None
    relators: list[tuple] = []
    nu_free: list[tuple] = []
    nu_tors: list[tuple] = []
    orders: tuple = ()
    free_rank = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, 1)
        key, _, value = line.partition("=")
        key = key.strip()
        vcol = raw.index("=") + 2
        if key == "generators":
            try:
                gens = int(value)
            except ValueError:
                raise ParseError(f"bad generator count {value.strip()!r}", lineno, vcol) from None
        elif key == "relator":
            if gens is None:
                raise ParseError("'generators' must come before relators", lineno, 1)
            relators.append(parse_word(value, gens, lineno))
        elif key in ("nu.free", "nu.torsion", "torsion.orders", "free.rank"):
            try:
                ints = tuple(int(x) for x in value.split())
            except ValueError:
                raise ParseError(f"expected integers after {key}", lineno, vcol) from None
            if key == "nu.free":
                nu_free.append(ints)
            elif key == "nu.torsion":
                nu_tors.append(ints)
            elif key == "free.rank":
                free_rank = ints[0] if ints else 0
            else:
                orders = ints
        else:
            raise ParseError(f"unknown key {key!r}", lineno, 1)
    if gens is None:
        raise ParseError("missing 'generators = k'")
    P = GroupPresentation(gens, tuple(relators))
    if not nu_free and not nu_tors:
        if orders:
            raise ParseError("torsion.orders given without nu lines")
        return P, free_abelianization_epimorphism(P)
    if free_rank is None:
        free_rank = len(nu_free[0]) if nu_free else 0
    if not nu_free:
        nu_free = [()] * gens
    if len(nu_free) != gens:
        raise ParseError(f"{len(nu_free)} nu.free lines for {gens} generators")
    if orders and len(nu_tors) != gens:
        raise ParseError(f"{len(nu_tors)} nu.torsion lines for {gens} generators")
    H = AbelianTarget(free_rank, orders)
    nu = Epimorphism(H, tuple(nu_free), tuple(nu_tors) if orders else None)
    nu.validate(P)
    return P, nu


def format_presentation(P: GroupPresentation, nu: Epimorphism | None = None) -> str:
    lines = [f"generators = {P.generator_count}"]
    lines += [f"relator = {format_word(r)}" for r in P.relators]
    if nu is not None:
        if nu.target.torsion_orders:
            lines.append("torsion.orders = " + " ".join(map(str, nu.target.torsion_orders)))
        lines.append(f"free.rank = {nu.target.free_rank}")
        for v in nu.free_images:
            lines.append("nu.free = " + " ".join(map(str, v)))
        if nu.target.torsion_orders:
            for v in nu.torsion_images:
                lines.append("nu.torsion = " + " ".join(map(str, v)))
    return "\n".join(lines) + "\n"
