"""Sparse multivariate Laurent polynomials over the integers or a prime field.

A :class:`LaurentPoly` is an immutable mapping from exponent vectors (tuples
of ints, negative entries allowed) to nonzero coefficients.  ``p == 0`` means
integer coefficients, otherwise coefficients live in ``Z/pZ`` and are stored
as representatives in ``[0, p)``.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping, Sequence

__all__ = [
    "LaurentPoly",
    "GenCyclotomicFactor",
    "DomainError",
    "WeightCollisionError",
    "cyclotomic",
    "expand_gencyclotomic_product",
    "lp_gcd",
    "lp_substitute_power",
    "lp_leading_coefficient",
    "generic_weight",
    "parse_laurent",
]


class DomainError(ValueError):
    """Operands live in different rings (arity or coefficient domain)."""


class WeightCollisionError(ValueError):
    """Two exponent vectors share the same weight; draw a new weight."""


def _add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub_exp(a, b):
    return tuple(x - y for x, y in zip(a, b))


class LaurentPoly:
    __slots__ = ("nvars", "p", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple, int] | None = None, p: int = 0):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        self.nvars = nvars
        self.p = p
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(x) for x in e)
                if len(e) != nvars:
                    raise DomainError(f"exponent {e} has length {len(e)}, expected {nvars}")
                c = int(c) % p if p else int(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
            if p:
                clean = {e: c % p for e, c in clean.items() if c % p}
            else:
                clean = {e: c for e, c in clean.items() if c}
        self._terms = clean
        self._hash = None

    # -- constructors ---------------------------------------------------
    @classmethod
    def _raw(cls, nvars, terms, p):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.p = p
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, c: int, nvars: int, p: int = 0) -> "LaurentPoly":
        return cls(nvars, {(0,) * nvars: c}, p)

    @classmethod
    def zero(cls, nvars: int, p: int = 0) -> "LaurentPoly":
        return cls._raw(nvars, {}, p)

    @classmethod
    def one(cls, nvars: int, p: int = 0) -> "LaurentPoly":
        return cls.constant(1, nvars, p)

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff: int = 1, p: int = 0) -> "LaurentPoly":
        return cls(len(exponent), {tuple(exponent): coeff}, p)

    @classmethod
    def var(cls, j: int, nvars: int, p: int = 0) -> "LaurentPoly":
        e = [0] * nvars
        e[j] = 1
        return cls.monomial(e, 1, p)

    # -- basic access ---------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and (0,) * self.nvars in self._terms)

    def constant_value(self) -> int:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self._terms.get((0,) * self.nvars, 0)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_unit(self) -> bool:
        """Units of the Laurent ring: ``±t^e`` over Z, ``c·t^e`` over a field."""
        if len(self._terms) != 1:
            return False
        (c,) = self._terms.values()
        return True if self.p else c in (1, -1)

    def _signed(self, c):
        # centred representative, for printing and sign decisions over F_p
        if self.p and c > self.p // 2:
            return c - self.p
        return c

    def _check(self, other):
        if not isinstance(other, LaurentPoly):
            raise TypeError(f"expected LaurentPoly, got {type(other).__name__}")
        if other.nvars != self.nvars or other.p != self.p:
            raise DomainError(
                f"ring mismatch: ({self.nvars} vars, p={self.p}) vs ({other.nvars} vars, p={other.p})"
            )

    def _coerce(self, other):
        if isinstance(other, int):
            return LaurentPoly.constant(other, self.nvars, self.p)
        self._check(other)
        return other

    # -- ring operations ------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        p = self.p
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if p:
                v %= p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly._raw(self.nvars, out, p)

    __radd__ = __add__

    def __neg__(self):
        p = self.p
        if p:
            return LaurentPoly._raw(self.nvars, {e: (-c) % p for e, c in self._terms.items()}, p)
        return LaurentPoly._raw(self.nvars, {e: -c for e, c in self._terms.items()}, p)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        p = self.p
        for e1, c1 in b.items():
            for e2, c2 in a.items():
                e = _add_exp(e1, e2)
                out[e] = out.get(e, 0) + c1 * c2
        if p:
            out = {e: c % p for e, c in out.items() if c % p}
        else:
            out = {e: c for e, c in out.items() if c}
        return LaurentPoly._raw(self.nvars, out, p)

    __rmul__ = __mul__

    def scale(self, k: int) -> "LaurentPoly":
        return LaurentPoly(self.nvars, {e: c * k for e, c in self._terms.items()}, self.p)

    def shift(self, exponent: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial ``t^exponent``."""
        exponent = tuple(exponent)
        if len(exponent) != self.nvars:
            raise DomainError(f"shift {exponent} has length {len(exponent)}, expected {self.nvars}")
        return LaurentPoly._raw(
            self.nvars, {_add_exp(e, exponent): c for e, c in self._terms.items()}, self.p
        )

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise ValueError("negative powers only exist for monomials")
            ((e, c),) = self._terms.items()
            if self.p:
                inv = pow(c, -1, self.p)
            elif c in (1, -1):
                inv = c
            else:
                raise ValueError("non-unit monomial has no inverse over Z")
            return LaurentPoly.monomial(tuple(-x for x in e), inv, self.p) ** (-k)
        result = LaurentPoly.one(self.nvars, self.p)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(other, self.nvars, self.p)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.p == other.p and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self.p, frozenset(self._terms.items())))
        return self._hash

    # -- structure ------------------------------------------------------
    def min_exponents(self) -> tuple:
        if not self._terms:
            return (0,) * self.nvars
        return tuple(min(col) for col in zip(*self._terms))

    def max_exponents(self) -> tuple:
        if not self._terms:
            return (0,) * self.nvars
        return tuple(max(col) for col in zip(*self._terms))

    def degree_in(self, j: int) -> int:
        """Largest exponent of ``t_j`` (``-1`` for the zero polynomial)."""
        if not self._terms:
            return -1
        return max(e[j] for e in self._terms)

    def variables(self) -> list[int]:
        return [j for j in range(self.nvars) if any(e[j] for e in self._terms)]

    def content(self) -> int:
        """Gcd of the integer coefficients (0 for the zero polynomial)."""
        if self.p:
            return 1 if self._terms else 0
        return reduce(math.gcd, self._terms.values(), 0)

    def lead_term(self) -> tuple:
        """Lex-largest (exponent, coefficient)."""
        e = max(self._terms)
        return e, self._terms[e]

    def trail_term(self) -> tuple:
        e = min(self._terms)
        return e, self._terms[e]

    def normal_form(self) -> "LaurentPoly":
        """Unit-normalised representative: minimal exponent 0 in every variable,
        graded-lex leading coefficient positive (over F_p: monic)."""
        if not self._terms:
            return self
        h = self.shift(tuple(-x for x in self.min_exponents()))
        top = max(h._terms, key=lambda e: (sum(e), e))
        c = h._terms[top]
        if self.p:
            return h.scale(pow(c, -1, self.p))
        return -h if c < 0 else h

    def coefficients_in(self, j: int) -> dict[int, "LaurentPoly"]:
        """Split as ``sum_k c_k * t_j^k`` with ``c_k`` free of ``t_j``."""
        parts: dict[int, dict] = {}
        for e, c in self._terms.items():
            k = e[j]
            e0 = e[:j] + (0,) + e[j + 1:]
            parts.setdefault(k, {})[e0] = c
        return {k: LaurentPoly._raw(self.nvars, t, self.p) for k, t in parts.items()}

    def map_coefficients(self, p: int) -> "LaurentPoly":
        """Reduce integer coefficients into ``F_p``."""
        if self.p and self.p != p:
            raise DomainError("cannot change prime field")
        return LaurentPoly(self.nvars, self._terms, p)

    def lift(self) -> "LaurentPoly":
        """Centred integer lift of an ``F_p`` polynomial."""
        return LaurentPoly(self.nvars, {e: self._signed(c) for e, c in self._terms.items()}, 0)

    # -- evaluation -----------------------------------------------------
    def evaluate_mod(self, point: Sequence[int], q: int) -> int:
        """Value at ``point`` (nonzero residues) in ``F_q``."""
        total = 0
        cache: dict = {}
        for e, c in self._terms.items():
            v = c
            for j, k in enumerate(e):
                if k:
                    key = (j, k)
                    w = cache.get(key)
                    if w is None:
                        w = cache[key] = pow(point[j], k, q)
                    v = v * w % q
            total += v
        return total % q

    def evaluate_complex(self, point: Sequence[complex]) -> complex:
        total = 0j
        for e, c in self._terms.items():
            v = complex(self._signed(c))
            for z, k in zip(point, e):
                if k:
                    v *= z ** k
            total += v
        return total

    # -- division -------------------------------------------------------
    def divmod_exact(self, other: "LaurentPoly") -> "LaurentPoly | None":
        """Quotient ``q`` with ``self == q * other`` or ``None`` when not exact."""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return self
        p = self.p
        lb, lcb = other.lead_term()
        # Newton polytope of the quotient: per-variable exponent box
        lo = _sub_exp(self.min_exponents(), other.min_exponents())
        hi = _sub_exp(self.max_exponents(), other.max_exponents())
        inv = pow(lcb, -1, p) if p else None
        rem = dict(self._terms)
        quot: dict = {}
        while rem:
            le = max(rem)
            lc = rem[le]
            qe = _sub_exp(le, lb)
            if any(x < l or x > h for x, l, h in zip(qe, lo, hi)):
                return None
            if p:
                qc = lc * inv % p
            else:
                if lc % lcb:
                    return None
                qc = lc // lcb
            quot[qe] = qc
            for e, c in other._terms.items():
                k = _add_exp(e, qe)
                v = rem.get(k, 0) - qc * c
                if p:
                    v %= p
                if v:
                    rem[k] = v
                else:
                    rem.pop(k, None)
        return LaurentPoly._raw(self.nvars, quot, p)

    def __floordiv__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(other, self.nvars, self.p)
        q = self.divmod_exact(other)
        if q is None:
            raise ArithmeticError("inexact division")
        return q

    def divides(self, other: "LaurentPoly") -> bool:
        return other.divmod_exact(self) is not None

    # -- printing -------------------------------------------------------
    def __str__(self):
        return format_laurent(self)

    def __repr__(self):
        suffix = f", p={self.p}" if self.p else ""
        return f"LaurentPoly({self.nvars}, '{format_laurent(self)}'{suffix})"


# ---------------------------------------------------------------------------
# text form


def format_laurent(h: LaurentPoly, var: str = "t") -> str:
    if h.is_zero():
        return "0"
    pieces = []
    for e in sorted(h._terms, key=lambda e: (sum(e), e), reverse=True):
        c = h._signed(h._terms[e])
        mono = []
        for j, k in enumerate(e):
            if k == 1:
                mono.append(f"{var}{j + 1}")
            elif k:
                mono.append(f"{var}{j + 1}^{k}")
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = "*".join(mono)
        else:
            body = f"{mag}*" + "*".join(mono)
        pieces.append(("-" if c < 0 else "+", body))
    sign, body = pieces[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


_FACTOR = re.compile(r"\s*(?:(\d+)|([A-Za-z]+)(\d+)(?:\s*\^\s*(-?\d+))?)\s*")


def parse_laurent(text: str, nvars: int | None = None, p: int = 0) -> LaurentPoly:
    """Parse ``c * t1^e1 * t2^e2 + ...``; ``*`` between factors is optional.

    ``nvars`` defaults to the largest variable index that occurs.
    """
    src = text.strip()
    if not src:
        raise ValueError("empty polynomial")
    terms: list[tuple[int, dict]] = []
    pos = 0
    sign = 1
    expect_term = True
    if src[0] in "+-":
        sign = -1 if src[0] == "-" else 1
        pos = 1
    while pos < len(src):
        coeff = 1
        mono: dict[int, int] = {}
        seen = False
        while True:
            m = _FACTOR.match(src, pos)
            if not m or m.end() == pos:
                break
            seen = True
            if m.group(1) is not None:
                coeff *= int(m.group(1))
            else:
                j = int(m.group(3))
                if j < 1:
                    raise ValueError(f"variable index must be >= 1 at column {m.start() + 1}")
                mono[j] = mono.get(j, 0) + int(m.group(4) or 1)
            pos = m.end()
            if pos < len(src) and src[pos] == "*":
                pos += 1
                continue
        if not seen:
            raise ValueError(f"cannot parse polynomial near column {pos + 1}: {src[pos:pos + 10]!r}")
        terms.append((sign * coeff, mono))
        expect_term = False
        if pos < len(src):
            ch = src[pos]
            if ch not in "+-":
                raise ValueError(f"unexpected {ch!r} at column {pos + 1}")
            sign = -1 if ch == "-" else 1
            pos += 1
            expect_term = True
    if expect_term:
        raise ValueError("polynomial ends with an operator")
    top = max((j for _, mono in terms for j in mono), default=0)
    if nvars is None:
        nvars = top
    elif top > nvars:
        raise ValueError(f"variable t{top} exceeds declared {nvars} variables")
    out: dict = {}
    for c, mono in terms:
        e = tuple(mono.get(j + 1, 0) for j in range(nvars))
        out[e] = out.get(e, 0) + c
    return LaurentPoly(nvars, out, p)


# ---------------------------------------------------------------------------
# gcd


def _pseudo_rem(f: LaurentPoly, g: LaurentPoly, j: int) -> LaurentPoly:
    dg = g.degree_in(j)
    lcg = g.coefficients_in(j)[dg]
    r = f
    while not r.is_zero() and r.degree_in(j) >= dg:
        dr = r.degree_in(j)
        lcr = r.coefficients_in(j)[dr]
        e = [0] * f.nvars
        e[j] = dr - dg
        r = r * lcg - (lcr * g).shift(e)
    return r


def _content_in(f: LaurentPoly, j: int, level: int) -> LaurentPoly:
    coeffs = list(f.coefficients_in(j).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        # t_k is a unit in the Laurent ring but not among genuine polynomials
        if g.is_constant() and g.is_unit():
            break
        g = _poly_gcd(g, c, level + 1)
    return g


def _poly_gcd(f: LaurentPoly, g: LaurentPoly, level: int) -> LaurentPoly:
    """Gcd of genuine polynomials (non-negative exponents) that only involve
    variables ``level, level+1, ...``; result has positive integer content."""
    n = f.nvars
    if f.is_zero():
        return _positive(g)
    if g.is_zero():
        return _positive(f)
    # skip variables absent from both
    while level < n and f.degree_in(level) <= 0 and g.degree_in(level) <= 0:
        level += 1
    if level >= n:
        if f.p:
            return LaurentPoly.one(n, f.p)
        return LaurentPoly.constant(math.gcd(f.constant_value(), g.constant_value()), n)
    j = level
    cf = _content_in(f, j, j)
    cg = _content_in(g, j, j)
    c = _poly_gcd(cf, cg, j + 1)
    a = f // cf
    b = g // cg
    if a.degree_in(j) < b.degree_in(j):
        a, b = b, a
    while b.degree_in(j) > 0:
        r = _pseudo_rem(a, b, j)
        if r.is_zero():
            a = b
            break
        a, b = b, r // _content_in(r, j, j)
    else:
        # b is free of t_j (and primitive): the gcd of the primitive parts is 1
        a = LaurentPoly.one(n, f.p)
    a = a // _content_in(a, j, j)
    return _positive(a * c)


def _positive(h: LaurentPoly) -> LaurentPoly:
    if h.is_zero():
        return h
    top = max(h._terms, key=lambda e: (sum(e), e))
    c = h._terms[top]
    if h.p:
        return h.scale(pow(c, -1, h.p))
    return -h if c < 0 else h


def lp_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Gcd in the Laurent ring, returned in :meth:`LaurentPoly.normal_form`."""
    a._check(b)
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if a.is_zero():
        return b.normal_form()
    if b.is_zero():
        return a.normal_form()
    fa = a.shift(tuple(-x for x in a.min_exponents()))
    fb = b.shift(tuple(-x for x in b.min_exponents()))
    return _poly_gcd(fa, fb, 0).normal_form()


# ---------------------------------------------------------------------------
# substitution, leading coefficients


def lp_substitute_power(h: LaurentPoly, a: Sequence[int]) -> LaurentPoly:
    """``h(t^a1, ..., t^an)`` as a one-variable Laurent polynomial."""
    if len(a) != h.nvars:
        raise DomainError(f"expected {h.nvars} exponents, got {len(a)}")
    out: dict = {}
    for e, c in h.items():
        k = sum(x * y for x, y in zip(e, a))
        out[(k,)] = out.get((k,), 0) + c
    return LaurentPoly(1, out, h.p)


def generic_weight(nvars: int, rng: random.Random | None = None, bound: int = 10**6) -> tuple:
    rng = rng or random.Random()
    return tuple(rng.randint(-bound, bound) for _ in range(nvars))


def lp_leading_coefficient(h: LaurentPoly, weight: Sequence[int] | None = None,
                           rng: random.Random | None = None, retries: int = 20) -> int:
    """Coefficient of the weight-maximal term of ``h``.

    With ``weight=None`` generic weights are drawn until no two exponent
    vectors collide (at most ``retries`` draws).
    """
    if h.is_zero():
        raise ValueError("zero polynomial has no leading coefficient")
    if weight is not None:
        if len(weight) != h.nvars:
            raise DomainError("weight length differs from number of variables")
        return _leading_for(h, weight)
    rng = rng or random.Random(0)
    for _ in range(retries):
        try:
            return _leading_for(h, generic_weight(h.nvars, rng))
        except WeightCollisionError:
            continue
    raise WeightCollisionError("no generic weight found; polynomial too large for the weight box")


def _leading_for(h, weight):
    seen: dict[int, tuple] = {}
    for e in h._terms:
        w = sum(x * y for x, y in zip(e, weight))
        if w in seen:
            raise WeightCollisionError(
                f"weight {tuple(weight)} collides on exponents {seen[w]} and {e}; re-randomize"
            )
        seen[w] = e
    top = seen[max(seen)]
    return h._signed(h._terms[top])


# ---------------------------------------------------------------------------
# cyclotomic machinery


def cyclotomic(k: int) -> list[int]:
    """Integer coefficients of the k-th cyclotomic polynomial, constant term first."""
    if k < 1:
        raise ValueError("cyclotomic index must be positive")
    # x^k - 1 = prod_{d | k} Phi_d
    num = [-1] + [0] * (k - 1) + [1]
    for d in range(1, k):
        if k % d == 0:
            num = _poly_divexact(num, cyclotomic(d))
    return num


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        q = num[i + len(den) - 1] // den[-1]
        out[i] = q
        for j, c in enumerate(den):
            num[i + j] -= q * c
    if any(num):
        raise ArithmeticError("inexact univariate division")
    return out


@dataclass(frozen=True)
class GenCyclotomicFactor:
    """The factor ``t^shift * Phi_index(t^direction)``."""

    shift: tuple
    direction: tuple
    index: int

    def __post_init__(self):
        if not any(self.direction):
            raise ValueError("direction must be a nonzero vector")
        if len(self.shift) != len(self.direction):
            raise ValueError("shift and direction lengths differ")
        if self.index < 1:
            raise ValueError("cyclotomic index must be positive")

    def expand(self, p: int = 0) -> LaurentPoly:
        terms = {}
        for k, c in enumerate(cyclotomic(self.index)):
            if c:
                e = tuple(s + k * d for s, d in zip(self.shift, self.direction))
                terms[e] = c
        return LaurentPoly(len(self.direction), terms, p)


def expand_gencyclotomic_product(c: int, factors: Iterable[GenCyclotomicFactor],
                                 nvars: int | None = None) -> LaurentPoly:
    factors = list(factors)
    if nvars is None:
        if not factors:
            raise ValueError("nvars required for an empty product")
        nvars = len(factors[0].direction)
    out = LaurentPoly.constant(c, nvars)
    for f in factors:
        out = out * f.expand()
    return out
