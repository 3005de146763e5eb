"""Mahler measure of Laurent polynomials.

Three routes:

``jensen``
    one active variable; ``log|lead| + sum log max(1, |root|)`` with roots
    from :func:`mpmath.polyroots` and its error bound.
``torus``
    randomly shifted rank-1 lattice rule on ``(S^1)^n``; the spread of the
    shifted batches gives the error estimate.
``leading``
    ``log |leading coefficient|`` for a generic weight.  Only valid for
    polynomials known to be a constant times generalized cyclotomic
    factors, so the caller must attest to that.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import mpmath
import numpy as np

from .laurent import LaurentPoly, lp_gcd, lp_leading_coefficient

__all__ = ["MahlerResult", "MahlerFailure", "mahler", "jensen_mahler", "torus_mahler"]

HARD_FLOOR = 1e-300


class MahlerFailure(ArithmeticError):
    """Numerical integration hit too many (near-)zeros of the integrand."""


@dataclass(frozen=True)
class MahlerResult:
    value: float
    error_estimate: float
    method: str
    attested: bool = False


def _active(h: LaurentPoly) -> list[int]:
    return h.variables()


def jensen_mahler(h: LaurentPoly, dps: int = 40) -> MahlerResult:
    (j,) = _active(h) or [None]
    if j is None:
        return MahlerResult(math.log(abs(h.lift().constant_value())), 0.0, "Jensen1Var")
    h = h.lift()
    lo = min(e[j] for e, _ in h.items())
    hi = max(e[j] for e, _ in h.items())
    coeffs = [0] * (hi - lo + 1)
    for e, c in h.items():
        coeffs[e[j] - lo] = c
    value = mpmath.log(abs(coeffs[-1]))
    err = mpmath.mpf(0)
    # Durand-Kerner stalls on repeated roots, so only squarefree factors are solved
    for k, factor in _squarefree_parts(coeffs):
        if len(factor) > 1:
            v, e = _outer_roots(factor[::-1], dps)
            value += k * v
            err += k * e
    return MahlerResult(float(value), float(err) + 1e-15, "Jensen1Var")


def _derivative(f: LaurentPoly) -> LaurentPoly:
    return LaurentPoly(1, {(e - 1,): e * c for (e,), c in f.items() if e})


def _squarefree_parts(coeffs: list[int]) -> list[tuple[int, list[int]]]:
    """Yun's decomposition ``f = c * prod f_k^k`` of an integer polynomial
    (coefficients low degree first, nonzero constant term); returns ``(k, f_k)``."""
    f = LaurentPoly(1, {(e,): c for e, c in enumerate(coeffs) if c})
    df = _derivative(f)
    a = lp_gcd(f, df)
    b, c = f // a, df // a
    parts, k = [], 1
    while not b.is_constant():
        d = c - _derivative(b)
        a = lp_gcd(b, d)
        b_next = b // a
        if not a.is_constant():
            parts.append((k, a))
        b, c, k = b_next, d // a, k + 1
    out = []
    for k, g in parts:
        g = g.normal_form()
        hi = g.max_exponents()[0]
        out.append((k, [g.terms.get((e,), 0) for e in range(hi + 1)]))
    return out


def _outer_roots(desc: list[int], dps: int):
    """``sum log|root|`` over roots outside the unit circle, with an error bound."""
    with mpmath.workdps(dps):
        roots = None
        for steps, extra in ((100, 20), (400, 60), (2000, 200)):
            try:
                roots, err = mpmath.polyroots(desc, maxsteps=steps, extraprec=extra, error=True)
                break
            except mpmath.libmp.libhyper.NoConvergence:
                continue
        if roots is None:
            raise MahlerFailure("root finding did not converge")
        total = mpmath.mpf(0)
        bound = mpmath.mpf(0)
        for r in roots:
            a = abs(r)
            if a > 1:
                total += mpmath.log(a)
            if a + err >= 1:
                bound += err / max(a - err, mpmath.mpf(err) + mpmath.mpf(10) ** (-dps // 2))
        return total, bound


def _korobov(n_active: int, N: int, rng: random.Random) -> np.ndarray:
    a = rng.randrange(2, N - 1)
    z = [1]
    for _ in range(n_active - 1):
        z.append(z[-1] * a % N)
    return np.array(z, dtype=np.int64)


def torus_mahler(h: LaurentPoly, points: int = 100_003, shifts: int = 8, seed: int = 0,
                 chunk: int = 1 << 15) -> MahlerResult:
    """Randomly shifted rank-1 lattice rule for ``int log|h|`` over the torus."""
    active = _active(h)
    g = h.lift()
    if not active:
        return MahlerResult(math.log(abs(g.constant_value())), 0.0, "NumericTorus")
    if shifts < 2:
        raise ValueError("need at least two shifts for an error estimate")
    rng = random.Random(seed)
    z = _korobov(len(active), points, rng)
    E = np.array([[e[j] for j in active] for e, _ in g.items()], dtype=np.float64)
    C = np.array([float(c) for _, c in g.items()], dtype=np.float64)
    batch_means = []
    tiny = 0
    total = 0
    for _ in range(shifts):
        delta = np.array([rng.random() for _ in active])
        acc = 0.0
        for start in range(0, points, chunk):
            k = np.arange(start, min(start + chunk, points), dtype=np.int64)
            X = np.mod(np.outer(k, z) % points / points + delta, 1.0)
            phase = 2j * np.pi * (X @ E.T)
            vals = np.abs(np.exp(phase) @ C)
            bad = vals < HARD_FLOOR
            tiny += int(bad.sum())
            total += len(vals)
            vals = np.where(bad, HARD_FLOOR, vals)
            acc += float(np.log(vals).sum())
        batch_means.append(acc / points)
    if tiny > 1e-3 * total:
        raise MahlerFailure(f"{tiny} of {total} samples fell below {HARD_FLOOR:g}")
    mean = math.fsum(batch_means) / shifts
    var = math.fsum((b - mean) ** 2 for b in batch_means) / (shifts - 1)
    return MahlerResult(mean, math.sqrt(var / shifts), "NumericTorus")


def mahler(h: LaurentPoly, method: str = "auto", *, attest: bool = False, seed: int = 0,
           **params) -> MahlerResult:
    """Mahler measure of a nonzero ``h``.

    ``method`` is ``"auto"`` (Jensen for one variable, torus otherwise),
    ``"jensen"``, ``"torus"`` or ``"leading"``; the last one needs
    ``attest=True``.
    """
    if h.is_zero():
        raise ValueError("Mahler measure of the zero polynomial is undefined")
    active = _active(h)
    if method == "auto":
        method = "jensen" if len(active) <= 1 else "torus"
    if method == "jensen":
        if len(active) > 1:
            raise ValueError("Jensen route needs a polynomial in one variable")
        return jensen_mahler(h, **params)
    if method == "torus":
        return torus_mahler(h, seed=seed, **params)
    if method == "leading":
        if not attest:
            raise ValueError(
                "the leading-coefficient route is only valid for products of a constant and "
                "generalized cyclotomic polynomials; pass attest=True to assert this"
            )
        c = lp_leading_coefficient(h.lift(), rng=random.Random(seed))
        return MahlerResult(math.log(abs(c)), 0.0, "LeadingCoefficient", attested=True)
    raise ValueError(f"unknown Mahler method {method!r}")
