import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from l2abel.complexes import (
    ComplexError,
    GroupRingComplex,
    GroupRingElem,
    circle_complex,
    format_complex,
    parse_complex,
    presentation_complex,
    raw_complex,
    tensor_product,
    torsion_reduce,
)
from l2abel.laurent import parse_laurent
from l2abel.presentations import (
    AbelianTarget,
    ConstraintError,
    OrbifoldType,
    ParseError,
    orbifold_epimorphism,
    orbifold_presentation,
    parse_presentation,
)

TORSION_CASES = [((4,), (2,)), ((6,), (3,)), ((6,), (2,)), ((4, 6), (2, 3)), ((9,), (3,))]


def orbifold_complex(g, r, mu, m=None, n=1):
    tau = OrbifoldType(g, r, mu, m)
    torsion = (math.lcm(*m),) if m and math.lcm(*m) > 1 else ()
    nu = orbifold_epimorphism(tau, AbelianTarget(n, torsion))
    return presentation_complex(orbifold_presentation(tau), nu)


orbifold_complexes = st.builds(
    lambda g, r, case, n: (g, r, case, n),
    st.integers(0, 1), st.integers(0, 3), st.sampled_from(TORSION_CASES), st.integers(1, 2),
).filter(lambda x: x[1] >= 1 and (x[0], x[1]) != (0, 1) and x[3] <= 2 * x[0] + x[1] - 1)
# (r = 0 forces prod gamma_j = 0 in T, which these single-orbit cases cannot meet)


# -- group ring -------------------------------------------------------------


def test_group_ring_arithmetic():
    H = AbelianTarget(1, (3,))
    t = GroupRingElem.group_element(H, (1,), (0,))
    s = GroupRingElem.group_element(H, (0,), (1,))
    one = GroupRingElem.constant(H, 1)
    assert s * s * s == one
    assert (t - one) * (t + one) == t * t - one
    assert (s * t) == (t * s)
    with pytest.raises(ValueError):
        s.to_laurent()
    F = AbelianTarget(1)
    h = parse_laurent("t1^2 - 3 t1^-1")
    assert GroupRingElem.from_laurent(h, F).to_laurent() == h


# -- complexes --------------------------------------------------------------


def test_presentation_complex_of_torus():
    P, nu = parse_presentation("generators = 2\nrelator = g1 g2 g1^-1 g2^-1\n")
    C = presentation_complex(P, nu)
    assert C.ranks == (1, 2, 1)
    assert C.euler_characteristic == 0
    assert C.poly_boundary(0).entries == [[parse_laurent("t1 - 1", 2)], [parse_laurent("t2 - 1", 2)]]
    assert C.poly_boundary(1).entries == [[parse_laurent("1 - t2", 2), parse_laurent("t1 - 1", 2)]]


@settings(max_examples=20, deadline=None)
@given(orbifold_complexes)
def test_orbifold_complexes_are_complexes(spec):
    g, r, (mu, m), n = spec
    C = orbifold_complex(g, r, mu, m, n)
    C.check()
    R = torsion_reduce(C)
    R.check()
    size = C.target.torsion_size
    assert R.ranks == tuple(x * size for x in C.ranks)
    assert R.euler_characteristic == size * C.euler_characteristic
    assert R.target == AbelianTarget(n)


def test_torsion_reduce_is_identity_on_free_targets():
    C = orbifold_complex(0, 2, (6,))
    assert torsion_reduce(C) is C


def test_torsion_reduce_regular_representation():
    # C_0 <- C_1 over Z[Z/3] with boundary (s - 1): becomes the 3x3 matrix P - I
    H = AbelianTarget(0, (3,))
    s = GroupRingElem.group_element(H, (), (1,))
    C = GroupRingComplex(H, (1, 1), [[[s - GroupRingElem.constant(H, 1)]]])
    R = torsion_reduce(C)
    M = [[x.to_laurent().constant_value() for x in row] for row in R.boundaries[0]]
    assert M == [[-1, 1, 0], [0, -1, 1], [1, 0, -1]]


def test_tensor_product_three_torus():
    S = circle_complex()
    C = tensor_product(tensor_product(S, S), S)
    assert C.ranks == (1, 3, 3, 1)
    assert C.target == AbelianTarget(3)
    C.check()
    assert C.euler_characteristic == 0


def test_bad_complexes_rejected():
    H = AbelianTarget(1)
    t = parse_laurent("t1")
    with pytest.raises(ComplexError):
        raw_complex(H, (1, 1, 1), [[[t - 1]], [[t + 1]]])
    with pytest.raises(ComplexError):
        raw_complex(H, (1, 2), [[[t - 1]]])
    P, _ = parse_presentation("generators = 1\nrelator = g1^2\n")
    nu = parse_presentation("generators = 1\nrelator = g1^2\ntorsion.orders = 2\nnu.torsion = 1\n")[1]
    with pytest.raises(ConstraintError):
        presentation_complex(P, nu, AbelianTarget(0, (3,)))


# -- file format ------------------------------------------------------------


@settings(max_examples=20, deadline=None)
@given(orbifold_complexes, st.booleans())
def test_complex_round_trip(spec, reduce):
    g, r, (mu, m), n = spec
    C = orbifold_complex(g, r, mu, m, n)
    if reduce:
        C = torsion_reduce(C)
    assert parse_complex(format_complex(C)) == C


def test_complex_file_example():
    text = """\
free.rank = 1
torsion.orders = 2
ranks = 1 1
boundary 1
entry 0 0 = 1 (1) [1] -1 (0) [0]   # t*s - 1
"""
    C = parse_complex(text)
    assert C.target == AbelianTarget(1, (2,))
    assert torsion_reduce(C).ranks == (2, 2)


@pytest.mark.parametrize("text,line", [
    ("free.rank = 1\nranks = 1 1\nentry 0 0 = 1 (0) []\n", 3),
    ("free.rank = 1\nranks = 1 1\nboundary 1\nentry 0 0 = 1 (0,1) []\n", 4),
    ("free.rank = 1\nranks = 1 1\nboundary 1\nentry 0 3 = 1 (0) []\n", 4),
    ("free.rank = 1\nranks = 1 1\nboundary 1\nentry 0 0 = 1 0\n", 4),
    ("free.rank = x\n", 1),
    ("free.rank = 1\nranks = 1 1\nboundary one\n", 3),
])
def test_complex_parse_errors(text, line):
    with pytest.raises(ParseError) as exc:
        parse_complex(text)
    assert exc.value.line == line


def test_complex_parse_rejects_nonzero_composite():
    text = """\
free.rank = 1
ranks = 1 1 1
boundary 1
entry 0 0 = 1 (1) [] -1 (0) []
boundary 2
entry 0 0 = 1 (0) []
"""
    with pytest.raises(ComplexError):
        parse_complex(text)
