"""L2-type invariants of abelian covers: asymptotic Betti numbers and torsion
growth of finite complexes with an epimorphism onto ``Z^n + T``, checked
against exact finite-cover homology and the closed forms for orbifold groups."""

from .complexes import (
    ComplexError,
    GroupRingComplex,
    GroupRingElem,
    format_complex,
    parse_complex,
    presentation_complex,
    raw_complex,
    torsion_reduce,
)
from .covers import (
    FiniteQuotient,
    IntChainComplex,
    Lattice,
    TorsionOrder,
    betti,
    diagonal_lattice,
    finite_cover_complex,
    lattice_from_basis,
    torsion_order,
)
from .invariants import (
    AlphaResult,
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
from .laurent import (
    DomainError,
    GenCyclotomicFactor,
    LaurentPoly,
    expand_gencyclotomic_product,
    format_laurent,
    lp_gcd,
    lp_leading_coefficient,
    lp_substitute_power,
    parse_laurent,
)
from .mahler import MahlerFailure, MahlerResult, mahler
from .presentations import (
    AbelianTarget,
    ConstraintError,
    Epimorphism,
    GroupPresentation,
    OrbifoldType,
    ParseError,
    fox_derivative,
    orbifold_epimorphism,
    orbifold_presentation,
    parse_presentation,
)
from .zlinalg import (
    BudgetExceeded,
    MinorsVanish,
    PolyMatrix,
    SmithDecomposition,
    elementary_divisors,
    gcd_of_minors,
    rank_over_fractions,
    smith_normal_form,
)

__version__ = "0.1.0"
