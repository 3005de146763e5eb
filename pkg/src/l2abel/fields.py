"""Small exact fields used for rank computations.

Each field exposes the same duck-typed interface (``zero``, ``one``,
``add``, ``sub``, ``mul``, ``neg``, ``inv``, ``is_zero``, ``from_int``,
``random``) so that :func:`field_rank` can run Gaussian elimination over
any of them:

* :class:`PrimeField` -- ``F_p`` with elements stored as ints in ``[0, p)``;
* :class:`ExtensionField` -- ``F_{p^k}`` as ``F_p[x]/(f)``, used to sample
  "random points" when ``p`` itself is too small;
* :class:`CyclotomicField` -- ``Q(zeta_M)`` as ``Q[x]/(Phi_M)`` with
  :class:`fractions.Fraction` coefficients.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .laurent import cyclotomic


class PrimeField:
    def __init__(self, p: int):
        self.p = p
        self.order = p
        self.characteristic = p
        self.zero = 0
        self.one = 1

    def __repr__(self):
        return f"PrimeField({self.p})"

    def from_int(self, c: int) -> int:
        return c % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def is_zero(self, a) -> bool:
        return a == 0

    def pow(self, a, e: int):
        return pow(a, e, self.p)

    def random_nonzero(self, rng: random.Random, bound: int | None = None):
        hi = self.p - 1 if bound is None else min(bound, self.p - 1)
        return rng.randint(1, hi)


# -- F_p[x] helpers (coefficient lists, constant term first) ----------------


def _trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list, f: list, p: int) -> list:
    a = [c % p for c in a]
    _trim(a)
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    while len(a) - 1 >= df:
        q = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, c in enumerate(f):
            a[shift + i] = (a[shift + i] - q * c) % p
        _trim(a)
    return a


def _pmul(a: list, b: list, p: int) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return [c % p for c in out]


def _psub(a: list, b: list, p: int) -> list:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _pdivmod(a: list, b: list, p: int):
    a = _trim([c % p for c in a])
    q = [0] * max(len(a) - len(b) + 1, 0)
    inv_lead = pow(b[-1], -1, p)
    while len(a) >= len(b) and a:
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        q[shift] = c
        for i, y in enumerate(b):
            a[shift + i] = (a[shift + i] - c * y) % p
        _trim(a)
    return _trim(q), a


def _pgcd(a: list, b: list, p: int) -> list:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _pdivmod(a, b, p)
        a, b = b, r
    return a


def _ppowmod(base: list, e: int, f: list, p: int) -> list:
    result = [1]
    base = _pmod(base, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over ``F_p``."""
    f = list(f)
    k = len(f) - 1
    if k < 1:
        return False
    x = _pmod([0, 1], f, p)
    if _psub(_ppowmod(x, p ** k, f, p), x, p):
        return False
    for q in _prime_factors(k):
        h = _psub(_ppowmod(x, p ** (k // q), f, p), x, p)
        if len(_pgcd(f, h, p)) != 1:
            return False
    return True


def find_irreducible(p: int, k: int, rng: random.Random | None = None) -> list[int]:
    rng = rng or random.Random(p * 1000 + k)
    while True:
        f = [rng.randrange(p) for _ in range(k)] + [1]
        if f[0] and is_irreducible(f, p):
            return f


class ExtensionField:
    """``F_{p^k} = F_p[x]/(f)``; elements are coefficient tuples of length ``<= k``."""

    def __init__(self, p: int, k: int, modulus: Sequence[int] | None = None):
        self.p = p
        self.k = k
        self.characteristic = p
        self.order = p ** k
        self.modulus = list(modulus) if modulus is not None else find_irreducible(p, k)
        self.zero = ()
        self.one = (1,)

    @classmethod
    def at_least(cls, p: int, bits: int = 30) -> "ExtensionField":
        k = 1
        while p ** k < 2 ** bits:
            k += 1
        return cls(p, k)

    def __repr__(self):
        return f"ExtensionField({self.p}^{self.k})"

    def from_int(self, c: int):
        c %= self.p
        return (c,) if c else ()

    def add(self, a, b):
        n = max(len(a), len(b))
        p = self.p
        out = [((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)]
        return tuple(_trim(out))

    def sub(self, a, b):
        return tuple(_psub(list(a), list(b), self.p))

    def neg(self, a):
        return tuple((-c) % self.p for c in a)

    def mul(self, a, b):
        if not a or not b:
            return ()
        return tuple(_pmod(_pmul(a, b, self.p), self.modulus, self.p))

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        p = self.p
        # extended Euclid on (f, a)
        r0, r1 = list(self.modulus), list(a)
        s0, s1 = [], [1]
        while r1:
            q, r = _pdivmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _psub(s0, _pmul(q, s1, p), p)
        c = pow(r0[0], -1, p)
        return tuple(_trim([x * c % p for x in s0]))

    def is_zero(self, a) -> bool:
        return not a

    def pow(self, a, e: int):
        if e < 0:
            a, e = self.inv(a), -e
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def random_nonzero(self, rng: random.Random, bound: int | None = None):
        while True:
            a = tuple(_trim([rng.randrange(self.p) for _ in range(self.k)]))
            if a:
                return a


class CyclotomicField:
    """``Q(zeta_M)``; elements are tuples of Fractions of length ``< phi(M)``."""

    def __init__(self, order: int):
        self.M = order
        self.characteristic = 0
        self.modulus = [Fraction(c) for c in cyclotomic(order)]
        self.degree = len(self.modulus) - 1
        self.zero = ()
        self.one = (Fraction(1),)

    def __repr__(self):
        return f"CyclotomicField({self.M})"

    def _reduce(self, a: list):
        f = self.modulus
        d = self.degree
        a = list(a)
        while len(a) > d:
            c = a.pop()
            if c:
                shift = len(a) - d
                for i in range(d):
                    a[shift + i] -= c * f[i]
        while a and a[-1] == 0:
            a.pop()
        return tuple(a)

    def from_int(self, c):
        c = Fraction(c)
        return (c,) if c else ()

    def zeta_power(self, e: int):
        """``zeta_M^e``."""
        e %= self.M
        return self._reduce([Fraction(0)] * e + [Fraction(1)])

    def add(self, a, b):
        n = max(len(a), len(b))
        out = [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]
        while out and out[-1] == 0:
            out.pop()
        return tuple(out)

    def neg(self, a):
        return tuple(-c for c in a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if not a or not b:
            return ()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self._reduce(out)

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        # extended Euclid over Q[x]
        r0, r1 = list(self.modulus), list(a)
        s0, s1 = [], [Fraction(1)]
        while r1:
            q, r = _qdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _qsub(s0, _qmul(q, s1))
        c = 1 / r0[0]
        return self._reduce([x * c for x in s0])

    def is_zero(self, a) -> bool:
        return not a

    def pow(self, a, e: int):
        if e < 0:
            a, e = self.inv(a), -e
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result


def _qtrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _qmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _qtrim(out)


def _qsub(a, b):
    n = max(len(a), len(b))
    return _qtrim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def _qdivmod(a, b):
    a = _qtrim(list(a))
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        c = a[-1] / b[-1]
        shift = len(a) - len(b)
        q[shift] = c
        for i, y in enumerate(b):
            a[shift + i] -= c * y
        _qtrim(a)
    return _qtrim(q), a


def field_rank(field, rows: Sequence[Sequence]) -> int:
    """Rank of a matrix with entries already in ``field``."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if not field.is_zero(m[r][c])), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = field.inv(m[rank][c])
        prow = m[rank]
        for r in range(rank + 1, len(m)):
            x = m[r][c]
            if field.is_zero(x):
                continue
            f = field.mul(x, inv)
            row = m[r]
            for j in range(c, ncols):
                if not field.is_zero(prow[j]):
                    row[j] = field.sub(row[j], field.mul(f, prow[j]))
        rank += 1
        if rank == len(m):
            break
    return rank
