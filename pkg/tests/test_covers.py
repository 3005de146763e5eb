import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from l2abel.complexes import circle_complex, presentation_complex, tensor_product, torsion_reduce
from l2abel.covers import (
    FiniteQuotient,
    IntChainComplex,
    diagonal_lattice,
    finite_cover_complex,
    lattice_from_basis,
)
from l2abel.presentations import AbelianTarget, Epimorphism, GroupPresentation
from test_complexes import orbifold_complex, orbifold_complexes

bases = st.lists(st.lists(st.integers(-4, 4), min_size=2, max_size=2), min_size=2, max_size=2).filter(
    lambda B: B[0][0] * B[1][1] - B[0][1] * B[1][0] != 0)


def brute_min_norm(B):
    """Shortest nonzero lattice vector by enumerating small combinations of the columns."""
    cols = list(zip(*B))
    best = None
    for c in itertools.product(range(-12, 13), repeat=len(cols)):
        if any(c):
            v = [sum(ci * col[k] for ci, col in zip(c, cols)) for k in range(len(B))]
            q = sum(x * x for x in v)
            best = q if best is None else min(best, q)
    return best


@settings(max_examples=60, deadline=None)
@given(bases)
def test_lattice_invariants(B):
    L = lattice_from_basis(B)
    assert L.index == abs(B[0][0] * B[1][1] - B[0][1] * B[1][0]) == math.prod(L.invariants)
    assert L.min_norm == brute_min_norm(B)
    for col in zip(*B):
        assert L.contains(col)
    assert L.contains((0, 0))
    assert sum(L.contains(v) for v in itertools.product(range(L.index), repeat=2)) == L.index


def test_lattice_errors():
    with pytest.raises(ValueError):
        lattice_from_basis([[1, 2], [2, 4]])
    with pytest.raises(ValueError):
        lattice_from_basis([[1, 2]])


@settings(max_examples=40, deadline=None)
@given(bases, st.tuples(st.integers(-9, 9), st.integers(-9, 9)), st.tuples(st.integers(-9, 9), st.integers(-9, 9)))
def test_quotient_shifts_compose(B, a, b):
    Q = FiniteQuotient(lattice_from_basis(B), (3,))
    ca, cb = Q.components(a, (1,)), Q.components(b, (2,))
    cab = Q.components(tuple(x + y for x, y in zip(a, b)), (0,))
    sa, sb, sab = Q.shift_table(ca), Q.shift_table(cb), Q.shift_table(cab)
    assert sorted(sa) == list(range(len(Q)))
    assert [sb[sa[q]] for q in range(len(Q))] == sab
    # lattice vectors act trivially
    for col in zip(*B):
        assert Q.shift_table(Q.components(col)) == list(range(len(Q)))


# -- exact cover homology ---------------------------------------------------


def test_cyclic_cover_matrices():
    # <x, gamma | gamma^6> with x -> 1, gamma -> 0, cover N = 3
    C = orbifold_complex(0, 2, (6,))
    X = finite_cover_complex(C, diagonal_lattice([3]))
    d1, d2 = X.boundaries
    shift = [[1 if c == (r + 1) % 3 else 0 for c in range(3)] for r in range(3)]
    assert [row for row in d1[:3]] == [[shift[r][c] - (r == c) for c in range(3)] for r in range(3)]
    assert all(not any(row) for row in d1[3:])
    assert d2 == [[0, 0, 0] + [6 * (r == c) for c in range(3)] for r in range(3)]


@pytest.mark.parametrize("N", [1, 2, 5, 12])
def test_torus_and_wedge_covers(N):
    T2 = tensor_product(circle_complex(), circle_complex())
    X = finite_cover_complex(T2, diagonal_lattice([N, N]))
    assert [X.betti(i) for i in range(3)] == [1, 2, 1]
    assert X.torsion(1).value == 1
    wedge = presentation_complex(GroupPresentation(2, ()), Epimorphism(AbelianTarget(2), ((1, 0), (0, 1))))
    Y = finite_cover_complex(wedge, diagonal_lattice([N, N]))
    assert Y.betti(1) == N * N + 1


@settings(max_examples=25, deadline=None)
@given(orbifold_complexes, st.integers(1, 5), st.sampled_from([2, 3]))
def test_cover_homology_laws(spec, N, p):
    g, r, (mu, m), n = spec
    C = orbifold_complex(g, r, mu, m, n)
    L = diagonal_lattice([N] * n)
    X = finite_cover_complex(C, L)
    size = L.index * C.target.torsion_size
    assert X.euler_characteristic == size * C.euler_characteristic
    assert sum((-1) ** i * X.betti(i) for i in range(3)) == X.euler_characteristic
    assert sum((-1) ** i * X.betti(i, p) for i in range(3)) == X.euler_characteristic
    for i in range(3):
        assert X.betti(i) <= X.betti(i, p)
    # universal coefficients: the F_p excess in degree 1 comes from p-torsion in H_0 and H_1
    tors1 = sum(1 for d in X.torsion(1).divisors if d % p == 0)
    assert X.betti(1, p) - X.betti(1) == tors1 + sum(1 for d in X.torsion(0).divisors if d % p == 0)
    # a deeper cover has at least as much rational homology (transfer)
    Y = finite_cover_complex(C, diagonal_lattice([2 * N] * n))
    assert Y.betti(1) >= X.betti(1)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([((4,), (2,)), ((6,), (2,)), ((6,), (3,)), ((9,), (3,))]), st.integers(1, 6))
def test_torsion_reduction_commutes_with_covers(case, N):
    mu, m = case
    C = orbifold_complex(0, 2, mu, m)
    L = diagonal_lattice([N])
    X = finite_cover_complex(C, L)
    Y = finite_cover_complex(torsion_reduce(C), L)
    for i in range(3):
        for p in (0, 2, 3):
            assert X.betti(i, p) == Y.betti(i, p)
        assert X.torsion(i) == Y.torsion(i)


@pytest.mark.parametrize("mu", [2, 6])
def test_exact_torsion_law(mu):
    C = orbifold_complex(0, 2, (mu,))
    for N in range(1, 16):
        X = finite_cover_complex(C, diagonal_lattice([N]))
        assert X.torsion(1).value == mu ** N
        assert X.betti(1) == 1
        assert X.betti(1, 2) == (1 + N if mu % 2 == 0 else 1)
        assert X.torsion(1).log == pytest.approx(N * math.log(mu))


def test_int_chain_complex_direct():
    X = IntChainComplex((1, 1), [[[2]]])
    assert X.betti(0) == 0 and X.betti(0, 2) == 1 and X.betti(1, 2) == 1
    assert X.torsion(0).value == 2
    with pytest.raises(ValueError):
        X.betti(5)


def test_random_lattice_cover_of_torus():
    rng = random.Random(5)
    T2 = tensor_product(circle_complex(), circle_complex())
    for _ in range(5):
        B = [[rng.randint(1, 5), rng.randint(0, 4)], [0, rng.randint(1, 5)]]
        X = finite_cover_complex(T2, lattice_from_basis(B))
        assert [X.betti(i) for i in range(3)] == [1, 2, 1]
