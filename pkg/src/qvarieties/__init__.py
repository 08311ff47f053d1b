"""Exact computer algebra for F_q-linear varieties and their module structures.

The layers, bottom to top:

* :mod:`qvarieties.fields` -- the four coefficient field backends and the
  operator ring A = F_q[T];
* :mod:`qvarieties.ore` -- twisted polynomials K{t} under composition;
* :mod:`qvarieties.linalg` -- matrices over K{t}, Hermite and diagonal
  forms, submodules of rows;
* :mod:`qvarieties.varieties` -- Zariski-closed F_q-subspaces of K^n and
  their morphisms;
* :mod:`qvarieties.amodules` -- F_q[T]-module structures on varieties,
  torsion, rank, Jacobians;
* :mod:`qvarieties.cli` -- the ``qvar`` script interpreter.
"""

from .amodules import (
    AdditivityReport,
    AModuleStructure,
    ExactnessReport,
    RankReport,
    TateReport,
    TorsionReport,
)
from .errors import (
    AlgebraError,
    CapabilityError,
    DivisionByZero,
    DomainError,
    InsufficientPrimes,
    MixedBackends,
    NoSplittingFound,
    NotAMorphismInto,
    NotASubmodule,
    NotASubvariety,
    ParseError,
)
from .fields import (
    APoly,
    FieldDescriptor,
    FieldElement,
    apoly_primes,
    base_field,
    extension_field,
    perfect_closure,
    rational_function_field,
)
from .linalg import (DiagForm, OreMatrix, TauSubmodule, diagonalize,
                     echelon_pivots, hermite)
from .ore import OrePoly
from .varieties import (
    Morphism,
    QVariety,
    annihilator_of_points,
    full_space,
    induced_on_quotient,
    intersect_varieties,
    origin,
    product_variety,
    quotient,
    sum_varieties,
    variety_from_points,
    zeros,
)

__all__ = [
    "AdditivityReport",
    "AlgebraError",
    "AModuleStructure",
    "APoly",
    "CapabilityError",
    "DiagForm",
    "DivisionByZero",
    "DomainError",
    "ExactnessReport",
    "FieldDescriptor",
    "FieldElement",
    "InsufficientPrimes",
    "MixedBackends",
    "Morphism",
    "NoSplittingFound",
    "NotAMorphismInto",
    "NotASubmodule",
    "NotASubvariety",
    "OreMatrix",
    "OrePoly",
    "ParseError",
    "QVariety",
    "RankReport",
    "TateReport",
    "TauSubmodule",
    "TorsionReport",
    "annihilator_of_points",
    "apoly_primes",
    "base_field",
    "diagonalize",
    "echelon_pivots",
    "extension_field",
    "full_space",
    "hermite",
    "induced_on_quotient",
    "intersect_varieties",
    "origin",
    "perfect_closure",
    "product_variety",
    "quotient",
    "rational_function_field",
    "sum_varieties",
    "variety_from_points",
    "zeros",
]
