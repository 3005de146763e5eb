import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from l2abel.complexes import circle_complex, presentation_complex, tensor_product, torsion_reduce
from l2abel.covers import diagonal_lattice
from l2abel.invariants import (
    LogSum,
    alexander_poly,
    alpha,
    alpha_from_cover,
    characters,
    component_dimension,
    limit_table,
    m_invariant,
    predict_alpha1,
    predict_m1,
)
from l2abel.laurent import LaurentPoly, lp_leading_coefficient, lp_substitute_power, parse_laurent
from l2abel.presentations import (
    AbelianTarget,
    Epimorphism,
    GroupPresentation,
    OrbifoldType,
    orbifold_epimorphism,
    orbifold_presentation,
)
from test_complexes import orbifold_complex

FREE_GRID = [(g, r, mu) for g in (0, 1) for r in range(4) if (g, r) not in ((0, 0), (0, 1))
             for mu in ((), (2,), (2, 3), (4, 6))]
EXAMPLE_GRID = [(4, 2), (6, 2), (6, 3), (9, 3)]


# -- closed forms -----------------------------------------------------------


def test_predictions_examples():
    tau = OrbifoldType(0, 2, (6,))
    assert predict_alpha1(tau) == 0
    assert predict_alpha1(tau, 2) == predict_alpha1(tau, 3) == 1
    assert predict_m1(tau).value == pytest.approx(math.log(6))
    tau_t = OrbifoldType(0, 2, (6,), (2,))
    assert predict_alpha1(tau_t, 0, True) == Fraction(1, 2)
    assert predict_alpha1(tau_t, 3, True) == 1
    assert predict_m1(tau_t, True).value == pytest.approx(0.5 * math.log(3))
    assert str(predict_m1(tau_t, True)) == "1/2*log(3)"
    assert predict_m1(OrbifoldType(1, 1)).value == 0
    assert str(LogSum()) == "0"
    with pytest.raises(ValueError):
        predict_alpha1(tau, 0, True)


# -- alpha and Delta on the free grid ---------------------------------------


@pytest.mark.parametrize("g,r,mu", FREE_GRID)
def test_free_case_matches_closed_form(g, r, mu):
    tau = OrbifoldType(g, r, mu)
    for n in range(1, min(2, tau.free_generator_count) + 1):
        C = orbifold_complex(g, r, mu, n=n)
        for p in (0, 2, 3, 5):
            a = alpha(C, 1, p).value
            assert a == predict_alpha1(tau, p)
            assert a.denominator == 1
        delta = alexander_poly(C, 1)
        assert abs(lp_leading_coefficient(delta)) == math.prod(mu)


def test_alpha_exact_and_montecarlo_agree():
    C = orbifold_complex(1, 2, (4, 6), n=2)
    for p in (0, 2, 3):
        assert alpha(C, 1, p, "exact") == alpha(C, 1, p)


def test_alpha_of_tori():
    S = circle_complex()
    T3 = tensor_product(tensor_product(S, S), S)
    assert [alpha(T3, i).value for i in range(4)] == [0, 0, 0, 0]
    assert alexander_poly(T3, 2) == 1
    with pytest.raises(ValueError):
        alpha(T3, 7)
    with pytest.raises(ValueError):
        alpha(T3, 1, p=4)


@pytest.mark.parametrize("g,r,mu", [c for c in FREE_GRID if OrbifoldType(*c).free_generator_count >= 2])
def test_substitution_compatibility(g, r, mu):
    """Delta of the composite Z-target is Delta(t^a1, t^a2); for closed bases
    (r = 0) only up to powers of (t - 1)."""
    tau = OrbifoldType(g, r, mu)
    P = orbifold_presentation(tau)
    nu = orbifold_epimorphism(tau, AbelianTarget(2))
    delta = alexander_poly(presentation_complex(P, nu), 1)
    rng = random.Random(hash((g, r, mu)) & 0xFFFF)
    t_minus_1 = parse_laurent("t1 - 1")
    for _ in range(3):
        while True:
            a = (rng.randint(-3, 3), rng.randint(-3, 3))
            if math.gcd(*a) == 1:
                break
        images = tuple((a[0] * v[0] + a[1] * v[1],) for v in nu.free_images)
        composed = alexander_poly(presentation_complex(P, Epimorphism(AbelianTarget(1), images)), 1)
        expected = lp_substitute_power(delta, a).normal_form()
        if r >= 1:
            assert composed == expected
        else:
            rest = composed
            while rest != expected and t_minus_1.divides(rest):
                rest = rest // t_minus_1
            assert rest == expected


# -- torsion case -----------------------------------------------------------


@pytest.mark.parametrize("mu,m", EXAMPLE_GRID)
def test_example_torsion_grid(mu, m):
    tau = OrbifoldType(0, 2, (mu,), (m,))
    C = orbifold_complex(0, 2, (mu,), (m,))
    for p in (0, 2, 3):
        expected = 1 if p and (mu // m) % p == 0 else 1 - Fraction(1, m)
        assert alpha(C, 1, p).value == expected == predict_alpha1(tau, p, True)
    target = math.log(mu // m) / m
    assert abs(m_invariant(C, 1).value - target) < 1e-2
    assert abs(m_invariant(C, 1, "leading", attest=True).value - target) < 1e-9
    assert abs(m_invariant(C, 1, "torus").value - target) < 1e-2
    dims = [component_dimension(C, 1, chi) for chi in characters((m,))]
    assert dims == [0] + [1] * (m - 1)
    assert Fraction(sum(dims), m) == alpha(C, 1).value


TORSION_GRID = [(g, r, mu, m, n) for g in (0, 1) for r in (1, 2, 3) if (g, r) != (0, 1)
                for mu, m in (((4,), (2,)), ((6,), (3,)), ((2, 3), (2, 3)), ((4, 6), (2, 3)),
                              ((4, 6), (2, 2)), ((9,), (3,)), ((4, 6), (4, 1)))
                for n in (1, 2) if n <= 2 * g + r - 1]


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(TORSION_GRID))
def test_torsion_case_matches_closed_form(case):
    g, r, mu, m, n = case
    tau = OrbifoldType(g, r, mu, m)
    C = orbifold_complex(g, r, mu, m, n)
    for p in (0, 2, 3):
        assert alpha(C, 1, p).value == predict_alpha1(tau, p, True)
    assert m_invariant(C, 1).value == pytest.approx(predict_m1(tau, True).value, abs=1e-9)
    assert alpha(C, 1).value == Fraction(alpha(torsion_reduce(C), 1).value, C.target.torsion_size)


def test_component_dimension_trivial_torsion():
    C = orbifold_complex(1, 1, (2, 3))
    assert component_dimension(C, 1, ()) == alpha(C, 1).value
    with pytest.raises(ValueError):
        component_dimension(C, 1, (1,))
    assert characters((2, 3)) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]


# -- finite covers and limits -----------------------------------------------


@pytest.mark.parametrize("p", [0, 2, 3])
def test_convergence_envelope(p):
    C = orbifold_complex(0, 2, (6,))
    a1 = alpha(C, 1, p).value
    for N in range(1, 31):
        ratio = alpha_from_cover(C, 1, p, diagonal_lattice([N])).value
        assert abs(ratio - a1) <= Fraction(2, N)


def test_limit_table_columns():
    C = orbifold_complex(0, 2, (6,))
    tau = OrbifoldType(0, 2, (6,))
    rows = limit_table(C, 1, [diagonal_lattice([N]) for N in range(1, 11)], (0, 2), tau)
    for N, row in enumerate(rows, 1):
        assert row.error is None
        assert row.index == N
        assert row.log_torsion_ratio == pytest.approx(math.log(6))
        assert row.ratio(0) == Fraction(1, N)
        assert row.ratio(2) == Fraction(N + 1, N)
        assert row.predictions["alpha"] == {0: 0, 2: 1}


def test_limit_table_wedge_and_torus():
    wedge = presentation_complex(GroupPresentation(2, ()), Epimorphism(AbelianTarget(2), ((1, 0), (0, 1))))
    S = circle_complex()
    T2 = tensor_product(S, S)
    lattices = [diagonal_lattice([N, N]) for N in (2, 3, 4)]
    for row, N in zip(limit_table(wedge, 1, lattices), (2, 3, 4)):
        assert row.ratio(0) == Fraction(N * N + 1, N * N)
    for row, N in zip(limit_table(T2, 1, lattices, workers=2), (2, 3, 4)):
        assert row.ratio(0) == Fraction(2, N * N)


def test_limit_table_records_row_errors():
    C = orbifold_complex(0, 2, (6,))
    rows = limit_table(C, 1, [diagonal_lattice([2]), diagonal_lattice([2, 2])])
    assert rows[0].error is None
    assert rows[1].error and "rank" in rows[1].error


def test_alexander_needs_free_integer_complex():
    C = orbifold_complex(0, 2, (6,), (2,))
    with pytest.raises(ValueError):
        alexander_poly(C, 1)
    assert alexander_poly(torsion_reduce(C), 1) == LaurentPoly.constant(3, 1)
    with pytest.raises(ValueError):
        alexander_poly(orbifold_complex(0, 2, (6,)).map_coefficients(2), 1)
