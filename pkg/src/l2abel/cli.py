"""Command-line front end.

One subcommand per quantity::

    l2abel predict   --orbifold g=0,r=2,mu=6 --m 2 --char 3
    l2abel alpha     --file group.pres --degree 1 --char 0,2
    l2abel alexander --file torus.pres --degree 1
    l2abel mahler    --poly "1 + t1 + t2"
    l2abel cover     --orbifold g=0,r=2,mu=6 --lattice 5 --char 0,2
    l2abel limits    --orbifold g=0,r=2,mu=6 --range 1..40 --char 0,2,3
    l2abel reduce    --complex example.cx

Exactly one input source is accepted: ``--file`` (presentation), ``--complex``
(raw chain complex) or ``--orbifold`` (with optional ``--m``, ``--rank``,
``--torsion``).

Exit codes: 0 success, 1 other computational error, 2 parse error,
3 constraint violation, 4 minor budget exhausted.

CSV columns for ``limits`` are, in order: ``lattice, min_norm, index``, then
``b/index[p=P]`` for each requested characteristic, ``log_tor/index``,
``pred_alpha[p=P]`` for each characteristic (empty without orbifold data),
``pred_m1``, ``error``.  Floats carry 9 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from fractions import Fraction
from typing import Sequence

from .complexes import ComplexError, format_complex, parse_complex, presentation_complex, torsion_reduce
from .covers import Lattice, diagonal_lattice, finite_cover_complex, lattice_from_basis
from .invariants import (
    alexander_poly,
    alpha,
    limit_table,
    m_invariant,
    predict_alpha1,
    predict_m1,
)
from .laurent import format_laurent, parse_laurent
from .mahler import MahlerFailure, mahler
from .presentations import (
    AbelianTarget,
    ConstraintError,
    OrbifoldType,
    ParseError,
    orbifold_epimorphism,
    orbifold_presentation,
    parse_presentation,
)
from .zlinalg import BudgetExceeded, MinorsVanish

EXIT_OK, EXIT_ERROR, EXIT_PARSE, EXIT_CONSTRAINT, EXIT_BUDGET = 0, 1, 2, 3, 4

_SAFE_INT = 2 ** 53


# ---------------------------------------------------------------------------
# output helpers


def _num(x: int):
    return x if abs(x) < _SAFE_INT else str(x)


def _jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        return {"num": _num(x.numerator), "den": _num(x.denominator)}
    if isinstance(x, int):
        return _num(x)
    if isinstance(x, float):
        return x
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return str(x)


def _g9(x: float | None) -> str:
    return "" if x is None else f"{x:.9g}"


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _emit(args, human: str, payload: dict, csv_rows: list | None = None) -> None:
    fmt = "json" if args.json else args.format
    if fmt == "json":
        print(json.dumps(_jsonable(payload), sort_keys=True))
    elif fmt == "csv" and csv_rows is not None:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(csv_rows)
        sys.stdout.write(buf.getvalue())
    else:
        print(human)


# ---------------------------------------------------------------------------
# argument parsing


def _int_list(text: str, what: str) -> tuple:
    try:
        return tuple(int(x) for x in text.replace(":", ",").split(",") if x.strip())
    except ValueError:
        raise ParseError(f"{what}: expected a comma-separated list of integers, got {text!r}") from None


def parse_orbifold(text: str, m: str | None = None) -> OrbifoldType:
    """``g=0,r=2,mu=4,6`` (bare numbers continue the previous key's list)."""
    fields: dict[str, list[int]] = {}
    key = None
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "=" in tok:
            key, _, val = tok.partition("=")
            key = key.strip()
            if key not in ("g", "r", "mu"):
                raise ParseError(f"unknown orbifold key {key!r} (expected g, r, mu)")
            fields[key] = []
            tok = val
            if not tok.strip():
                continue
        if key is None:
            raise ParseError(f"orbifold value {tok!r} has no key")
        try:
            fields[key].append(int(tok))
        except ValueError:
            raise ParseError(f"orbifold {key}: {tok!r} is not an integer") from None
    for k in ("g", "r"):
        if len(fields.get(k, ())) != 1:
            raise ParseError(f"orbifold needs exactly one value for {k}")
    mlist = _int_list(m, "--m") if m else None
    return OrbifoldType(fields["g"][0], fields["r"][0], tuple(fields.get("mu", ())), mlist)


def parse_range(text: str) -> range:
    a, sep, b = text.partition("..")
    try:
        lo, hi = int(a), int(b) if sep else int(a)
    except ValueError:
        raise ParseError(f"--range: expected 'A..B', got {text!r}") from None
    if lo < 1 or hi < lo:
        raise ConstraintError(f"--range {text}: need 1 <= A <= B")
    return range(lo, hi + 1)


def parse_lattice(text: str, n: int) -> Lattice:
    """Basis matrix rows separated by ``;`` and entries by ``,`` (columns are
    the basis vectors); a single integer ``N`` means ``N`` times the identity."""
    rows = [r for r in text.split(";") if r.strip()]
    try:
        B = [[int(x) for x in r.split(",")] for r in rows]
    except ValueError:
        raise ParseError(f"--lattice: bad matrix {text!r}") from None
    if len(B) == 1 and len(B[0]) == 1 and n != 1:
        return diagonal_lattice([B[0][0]] * n)
    if len(B) != n or any(len(r) != n for r in B):
        raise ConstraintError(f"--lattice {text!r}: need a {n}x{n} matrix for a rank-{n} target")
    try:
        return lattice_from_basis(B)
    except ValueError as exc:
        raise ConstraintError(f"--lattice {text!r}: {exc}") from None


def random_lattices(n: int, count: int, seed: int, size: int = 12) -> list[Lattice]:
    """Random Hermite-form lattices (upper triangular, ``0 <= b_ij < b_jj``)."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        diag = [rng.randint(1, size) for _ in range(n)]
        B = [[0] * n for _ in range(n)]
        for i in range(n):
            B[i][i] = diag[i]
            for j in range(i + 1, n):
                B[i][j] = rng.randrange(diag[i])
        out.append(lattice_from_basis(B))
    return out


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def load_input(args):
    """Returns ``(complex, orbifold type or None)`` from the chosen input source."""
    sources = [s for s in (args.file, args.complex, args.orbifold) if s]
    if len(sources) != 1:
        raise ParseError("give exactly one of --file, --complex, --orbifold")
    if args.file:
        P, nu = parse_presentation(_read(args.file))
        return presentation_complex(P, nu), None
    if args.complex:
        return parse_complex(_read(args.complex)), None
    tau = parse_orbifold(args.orbifold, args.m)
    if args.torsion:
        torsion = _int_list(args.torsion, "--torsion")
    elif tau.m:
        lcm = math.lcm(*tau.m)
        torsion = (lcm,) if lcm > 1 else ()
    else:
        torsion = ()
    H = AbelianTarget(args.rank, torsion)
    nu = orbifold_epimorphism(tau, H)
    return presentation_complex(orbifold_presentation(tau), nu), tau


def _chars(args) -> tuple:
    chars = _int_list(args.char, "--char")
    for p in chars:
        if p < 0 or p == 1 or (p > 1 and any(p % q == 0 for q in range(2, math.isqrt(p) + 1))):
            raise ConstraintError(f"--char {p}: characteristic must be 0 or a prime")
    return chars


# ---------------------------------------------------------------------------
# subcommands


def cmd_predict(args) -> int:
    if not args.orbifold:
        raise ParseError("predict needs --orbifold")
    tau = parse_orbifold(args.orbifold, args.m)
    torsion = tau.m is not None
    chars = _chars(args)
    alphas = {p: predict_alpha1(tau, p, torsion) for p in chars}
    m1 = predict_m1(tau, torsion)
    lines = [f"alpha1 = {_frac(a)}  (char {p})" for p, a in alphas.items()]
    lines.append(f"m1 = {_g9(m1.value)}  ({m1})")
    payload = {
        "orbifold": {"g": tau.genus, "r": tau.punctures, "mu": list(tau.mu), "m": tau.m},
        "alpha1": {str(p): a for p, a in alphas.items()},
        "m1": {"value": m1.value, "symbolic": str(m1),
               "terms": [{"weight": w, "arg": a} for w, a in m1.terms]},
    }
    rows = [["quantity", "char", "value"]]
    rows += [["alpha1", p, _frac(a)] for p, a in alphas.items()]
    rows.append(["m1", "", _g9(m1.value)])
    _emit(args, "\n".join(lines), payload, rows)
    return EXIT_OK


def cmd_alpha(args) -> int:
    C, _ = load_input(args)
    mode = "exact" if args.exact else "montecarlo"
    res = {p: alpha(C, args.degree, p, mode, args.seed) for p in _chars(args)}
    lines = [f"alpha{args.degree} = {_frac(r.value)}  (char {p})" for p, r in res.items()]
    payload = {"degree": args.degree, "alpha": {str(p): r.value for p, r in res.items()},
               "method": "Exact" if args.exact else "MonteCarlo"}
    rows = [["degree", "char", "alpha"]] + [[args.degree, p, _frac(r.value)] for p, r in res.items()]
    _emit(args, "\n".join(lines), payload, rows)
    return EXIT_OK


def cmd_alexander(args) -> int:
    C, _ = load_input(args)
    reduced = bool(C.target.torsion_orders)
    if reduced:
        C = torsion_reduce(C)
    mode = "exact" if args.exact else "montecarlo"
    delta = alexander_poly(C, args.degree, args.budget, args.seed, mode)
    text = format_laurent(delta)
    payload = {"degree": args.degree, "alexander": text, "torsion_reduced": reduced,
               "nvars": delta.nvars}
    _emit(args, text, payload, [["degree", "alexander"], [args.degree, text]])
    return EXIT_OK


def cmd_mahler(args) -> int:
    params = {}
    if args.points is not None:
        params["points"] = args.points
    if args.poly:
        if any((args.file, args.complex, args.orbifold)):
            raise ParseError("give either --poly or an input source, not both")
        try:
            h = parse_laurent(args.poly)
        except ValueError as exc:
            raise ParseError(f"--poly: {exc}") from None
        res = mahler(h, args.method, attest=args.attest, seed=args.seed, **params)
    else:
        C, _ = load_input(args)
        res = m_invariant(C, args.degree, args.method, args.attest, args.budget, args.seed, **params)
    human = f"M = {_g9(res.value)} +- {_g9(res.error_estimate)}  [{res.method}]"
    payload = {"value": res.value, "error_estimate": res.error_estimate, "method": res.method,
               "attested": res.attested}
    rows = [["value", "error_estimate", "method"], [_g9(res.value), _g9(res.error_estimate), res.method]]
    _emit(args, human, payload, rows)
    return EXIT_OK


def _lattices(args, n: int) -> list[Lattice]:
    if n == 0:
        raise ConstraintError("covers need a target with positive free rank")
    out = []
    if args.range:
        out += [diagonal_lattice([N] * n) for N in parse_range(args.range)]
    for spec in args.lattice or ():
        out.append(parse_lattice(spec, n))
    if args.random:
        out += random_lattices(n, args.random, args.seed)
    if not out:
        raise ParseError("give --range, --lattice or --random")
    return out


def cmd_cover(args) -> int:
    C, _ = load_input(args)
    chars = _chars(args)
    lattices = _lattices(args, C.target.free_rank)
    records = []
    for L in lattices:
        X = finite_cover_complex(C, L)
        tor = X.torsion(args.degree)
        records.append({
            "lattice": [list(r) for r in L.basis],
            "index": L.index * C.target.torsion_size,
            "betti": {str(p): X.betti(args.degree, p) for p in chars},
            "torsion_divisors": list(tor.divisors),
            "torsion_order": tor.value,
        })
    lines = []
    for rec in records:
        b = ", ".join(f"b{args.degree}(char {p}) = {v}" for p, v in rec["betti"].items())
        lines.append(f"lattice {rec['lattice']}  index {rec['index']}: {b}; "
                     f"torsion order {rec['torsion_order']} (divisors {rec['torsion_divisors']})")
    rows = [["lattice", "index"] + [f"b[p={p}]" for p in chars] + ["torsion_divisors"]]
    for rec in records:
        rows.append([";".join(",".join(map(str, r)) for r in rec["lattice"]), rec["index"]]
                    + [rec["betti"][str(p)] for p in chars] + [" ".join(map(str, rec["torsion_divisors"]))])
    _emit(args, "\n".join(lines), {"degree": args.degree, "covers": records}, rows)
    return EXIT_OK


def cmd_limits(args) -> int:
    C, tau = load_input(args)
    chars = _chars(args)
    lattices = _lattices(args, C.target.free_rank)
    torsion = bool(C.target.torsion_orders)
    table = limit_table(C, args.degree, lattices, chars, tau, torsion, args.workers)
    illustrative = torsion and C.target.free_rank >= 2
    header = (["lattice", "min_norm", "index"] + [f"b/index[p={p}]" for p in chars] + ["log_tor/index"]
              + [f"pred_alpha[p={p}]" for p in chars] + ["pred_m1", "error"])
    rows = [header]
    records = []
    for row in table:
        pa = row.predictions.get("alpha", {})
        pm = row.predictions.get("m1")
        ok = row.error is None
        rows.append([row.label, row.min_norm, row.index]
                    + [_g9(float(row.ratio(p))) if ok else "" for p in chars]
                    + [_g9(row.log_torsion_ratio)]
                    + [_frac(pa[p]) if p in pa else "" for p in chars]
                    + [_g9(pm.value) if pm is not None else "", row.error or ""])
        records.append({
            "lattice": row.label, "min_norm": row.min_norm, "index": row.index,
            "betti": {str(p): v for p, v in row.betti.items()},
            "betti_ratio": {str(p): row.ratio(p) for p in row.betti},
            "log_torsion": row.log_torsion, "log_torsion_ratio": row.log_torsion_ratio,
            "torsion_divisors": list(row.torsion_divisors),
            "predicted_alpha": {str(p): a for p, a in pa.items()},
            "predicted_m1": None if pm is None else pm.value,
            "error": row.error,
        })
    payload = {"degree": args.degree, "illustrative": illustrative, "rows": records}
    widths = [max(len(str(r[k])) for r in rows) for k in range(len(header))]
    human = "\n".join("  ".join(str(v).rjust(w) for v, w in zip(r, widths)).rstrip() for r in rows)
    if illustrative:
        human += "\n(illustrative: torsion growth over rank >= 2 targets is a limsup, not a certified limit)"
    _emit(args, human, payload, rows)
    return EXIT_OK


def cmd_reduce(args) -> int:
    C, _ = load_input(args)
    text = format_complex(torsion_reduce(C))
    _emit(args, text.rstrip("\n"), {"complex": text}, None)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="l2abel", description="L2-type invariants of abelian covers.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, inputs=True, char="0"):
        if inputs:
            sp.add_argument("--file", help="presentation file")
            sp.add_argument("--complex", help="raw chain complex file")
        sp.add_argument("--orbifold", help="orbifold type, e.g. g=0,r=2,mu=4,6")
        sp.add_argument("--m", help="orders m_j of the meridian images in the torsion part")
        sp.add_argument("--rank", type=int, default=1, help="free rank n of the orbifold target")
        sp.add_argument("--torsion", help="torsion orders of the orbifold target (default lcm of --m)")
        sp.add_argument("--char", default=char, help="comma-separated characteristics (0 or primes)")
        sp.add_argument("--degree", type=int, default=1)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--budget", type=int, default=100_000, help="maximum number of minors")
        sp.add_argument("--exact", action="store_true", help="exact ranks instead of Monte Carlo")
        sp.add_argument("--json", action="store_true", help="same as --format json")
        sp.add_argument("--format", choices=("human", "csv", "json"), default="human")

    for name, func, helptext in (
        ("predict", cmd_predict, "closed-form alpha_1 and M_1 of an orbifold type"),
        ("alpha", cmd_alpha, "alpha_i as a generic-fibre Betti number"),
        ("alexander", cmd_alexander, "Alexander polynomial Delta_i"),
        ("reduce", cmd_reduce, "dump the torsion-reduced complex"),
    ):
        sp = sub.add_parser(name, help=helptext)
        common(sp, inputs=name != "predict")
        sp.set_defaults(func=func)

    sp = sub.add_parser("mahler", help="Mahler measure of a polynomial, or M_i of an input")
    common(sp)
    sp.add_argument("--poly", help="Laurent polynomial, e.g. '1 + t1 + t2'")
    sp.add_argument("--method", choices=("auto", "jensen", "torus", "leading"), default="auto")
    sp.add_argument("--attest", action="store_true",
                    help="assert the polynomial is a constant times generalized cyclotomics")
    sp.add_argument("--points", type=int, help="lattice-rule points for the torus route")
    sp.set_defaults(func=cmd_mahler)

    for name, func, helptext in (
        ("cover", cmd_cover, "exact homology of finite covers"),
        ("limits", cmd_limits, "normalised Betti numbers and torsion along a lattice sequence"),
    ):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("--range", help="diagonal lattices N*I for N in A..B")
        sp.add_argument("--lattice", action="append", help="basis rows 'a,b;c,d' (repeatable)")
        sp.add_argument("--random", type=int, help="number of random lattices (uses --seed)")
        sp.add_argument("--workers", type=int, default=1)
        sp.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConstraintError, ComplexError) as exc:
        print(f"constraint violation: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (MinorsVanish, MahlerFailure, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
