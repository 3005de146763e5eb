"""Asymptotic Betti numbers, Alexander polynomials, torsion growth and the
closed-form orbifold predictions."""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .complexes import GroupRingComplex, torsion_reduce
from .covers import Lattice, finite_cover_complex
from .fields import CyclotomicField, field_rank
from .laurent import LaurentPoly
from .mahler import MahlerResult, mahler
from .presentations import OrbifoldType
from .zlinalg import gcd_of_minors, rank_over_fractions

__all__ = [
    "AlphaResult",
    "LogSum",
    "alpha",
    "alpha_from_cover",
    "alexander_poly",
    "m_invariant",
    "predict_alpha1",
    "predict_m1",
    "component_dimension",
    "characters",
    "limit_table",
    "MahlerResult",
    "mahler",
]


@dataclass(frozen=True)
class AlphaResult:
    degree: int
    characteristic: int
    value: Fraction
    method: str


@dataclass(frozen=True)
class LogSum:
    """``sum w_k * log(a_k)`` kept symbolically."""

    terms: tuple = ()

    @property
    def value(self) -> float:
        return math.fsum(float(w) * math.log(a) for w, a in self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{w}*log({a})" for w, a in self.terms)


def _check_char(p: int) -> None:
    if p < 0 or (p and any(p % q == 0 for q in range(2, math.isqrt(p) + 1))) or p == 1:
        raise ValueError(f"characteristic must be 0 or a prime, got {p}")


def alpha(C: GroupRingComplex, i: int, p: int = 0, mode: str = "montecarlo", seed: int = 0,
          trials: int = 3) -> AlphaResult:
    """``alpha_i`` as the generic-fibre Betti number over ``Frac(K[Z^n])``.

    Torsion in the target is handled by passing to the ``T``-cover and
    dividing by ``|T|``.
    """
    _check_char(p)
    if not (0 <= i <= C.top_degree):
        raise ValueError(f"degree {i} outside 0..{C.top_degree}")
    size = C.target.torsion_size
    R = torsion_reduce(C)
    if p:
        R = R.map_coefficients(p)
    dim = R.rank(i)
    if i >= 1:
        dim -= rank_over_fractions(R.poly_boundary(i - 1), mode, seed, trials)
    dim -= rank_over_fractions(R.poly_boundary(i), mode, seed + 1, trials)
    return AlphaResult(i, p, Fraction(dim, size), "GenericRank")


def alpha_from_cover(C: GroupRingComplex, i: int, p: int, lattice: Lattice) -> AlphaResult:
    """``b_i / |H / Gamma|`` of one finite cover (a single term of the limit)."""
    X = finite_cover_complex(C, lattice)
    return AlphaResult(i, p, Fraction(X.betti(i, p), lattice.index * C.target.torsion_size),
                       "CoverLimit")


def alexander_poly(C: GroupRingComplex, i: int, budget: int = 100_000, seed: int = 0,
                   rank_mode: str = "montecarlo") -> LaurentPoly:
    """Gcd of the maximal nonvanishing minors of ``C_{i+1} -> C_i``, in normal form."""
    if C.target.torsion_orders:
        raise ValueError("Alexander polynomial needs a free target; apply torsion_reduce first")
    if C.p:
        raise ValueError("Alexander polynomial needs integer coefficients")
    n = C.target.free_rank
    M = C.poly_boundary(i)
    if M.rows == 0 or M.cols == 0 or M.is_zero():
        return LaurentPoly.one(n)
    r = rank_over_fractions(M, rank_mode, seed)
    return gcd_of_minors(M, r, budget, seed)


def m_invariant(C: GroupRingComplex, i: int, method: str = "auto", attest: bool = False,
                budget: int = 100_000, seed: int = 0, **params) -> MahlerResult:
    """Torsion growth: Mahler measure of the Alexander polynomial of the
    ``T``-reduced complex, divided by ``|T|``."""
    size = C.target.torsion_size
    delta = alexander_poly(torsion_reduce(C), i, budget, seed)
    res = mahler(delta, method, attest=attest, seed=seed, **params)
    return MahlerResult(res.value / size, res.error_estimate / size, res.method, res.attested)


# ---------------------------------------------------------------------------
# closed forms


def _divides(p: int, k: int) -> bool:
    return p != 0 and k % p == 0


def predict_alpha1(tau: OrbifoldType, p: int = 0, torsion_present: bool = False) -> Fraction:
    tau.validate()
    base = Fraction(2 * tau.genus + tau.punctures - 2)
    if not torsion_present:
        return base + sum(1 for mu in tau.mu if _divides(p, mu))
    if tau.m is None:
        raise ValueError("torsion case needs the divisors m_j")
    total = base
    for mu, m in zip(tau.mu, tau.m):
        total += 1 - Fraction(1, m)
        if _divides(p, mu // m):
            total += Fraction(1, m)
    return total


def predict_m1(tau: OrbifoldType, torsion_present: bool = False) -> LogSum:
    tau.validate()
    if not torsion_present:
        return LogSum(tuple((Fraction(1), mu) for mu in tau.mu))
    if tau.m is None:
        raise ValueError("torsion case needs the divisors m_j")
    return LogSum(tuple((Fraction(1, m), mu // m) for mu, m in zip(tau.mu, tau.m) if mu != m))


# ---------------------------------------------------------------------------
# characters of T


def characters(orders: Sequence[int]):
    """All characters of ``T``, as exponent vectors ``(c_1, ..., c_k)``."""
    out = [()]
    for d in orders:
        out = [c + (k,) for c in out for k in range(d)]
    return out


def component_dimension(C: GroupRingComplex, i: int, chi: Sequence[int], seed: int = 0,
                        trials: int = 3) -> int:
    """Generic ``dim H_i`` on the component of ``Hom(H, C^*)`` indexed by ``chi``.

    ``chi[k]`` sends the ``k``-th torsion generator to ``exp(2 pi i chi[k] / d_k)``.
    Entries are evaluated exactly in ``Q(zeta_M)``, ``M`` the exponent of ``T``,
    with the free variables at random integers; ranks are maxed over trials.
    """
    H = C.target
    orders = H.torsion_orders
    if len(chi) != len(orders):
        raise ValueError(f"character needs {len(orders)} exponents")
    M = H.exponent
    K = CyclotomicField(M)
    weights = [c * (M // d) for c, d in zip(chi, orders)]
    rng = random.Random(seed)
    n = H.free_rank
    ranks = []
    for j in (i - 1, i):
        B = C.boundary(j) if j >= 0 else None
        if not B or not B[0]:
            ranks.append(0)
            continue
        best = 0
        for _ in range(trials):
            point = [rng.randint(1, 2 ** 20) * rng.choice((1, -1)) for _ in range(n)]
            rows = []
            for row in B:
                new = []
                for x in row:
                    acc = K.zero
                    for (a, tau), c in x.items():
                        v = Fraction(c)
                        for t, e in zip(point, a):
                            v *= Fraction(t) ** e
                        z = K.zeta_power(sum(w * s for w, s in zip(weights, tau)))
                        acc = K.add(acc, K.mul(K.from_int(v), z))
                    new.append(acc)
                rows.append(new)
            best = max(best, field_rank(K, rows))
            if best == min(len(B), len(B[0])):
                break
        ranks.append(best)
    return C.rank(i) - ranks[0] - ranks[1]


# ---------------------------------------------------------------------------
# limit tables


@dataclass
class LimitRow:
    label: str
    min_norm: int
    index: int
    betti: dict = field(default_factory=dict)
    log_torsion: float | None = None
    torsion_divisors: tuple = ()
    predictions: dict = field(default_factory=dict)
    error: str | None = None

    def ratio(self, p: int) -> Fraction:
        return Fraction(self.betti[p], self.index)

    @property
    def log_torsion_ratio(self) -> float | None:
        return None if self.log_torsion is None else self.log_torsion / self.index


def _lattice_label(L: Lattice) -> str:
    return ";".join(",".join(map(str, row)) for row in L.basis)


def _limit_row(args) -> LimitRow:
    C, i, lattice, primes = args
    index = lattice.index * C.target.torsion_size
    row = LimitRow(_lattice_label(lattice), lattice.min_norm, index)
    try:
        X = finite_cover_complex(C, lattice)
        for p in primes:
            row.betti[p] = X.betti(i, p)
        tor = X.torsion(i)
        row.torsion_divisors = tor.divisors
        row.log_torsion = tor.log
    except Exception as exc:  # recorded per row; the table keeps going
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def limit_table(C: GroupRingComplex, i: int, lattices: Sequence[Lattice], primes: Sequence[int] = (0,),
                tau: OrbifoldType | None = None, torsion_present: bool = False,
                workers: int = 1) -> list[LimitRow]:
    """One row per lattice: normalised Betti numbers and log-torsion of the cover."""
    for p in primes:
        _check_char(p)
    jobs = [(C, i, L, tuple(primes)) for L in lattices]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_limit_row, jobs))
    else:
        rows = [_limit_row(j) for j in jobs]
    if tau is not None and i == 1:
        preds = {p: predict_alpha1(tau, p, torsion_present) for p in primes}
        m1 = predict_m1(tau, torsion_present)
        for row in rows:
            row.predictions = {"alpha": preds, "m1": m1}
    return rows
