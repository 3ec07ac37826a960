"""theorykit: executable combinatorics of multi-sorted algebraic theories.

Graded sets and their colimits, series (finitary functors) with the
composition and star products, labelled trees and free theories,
algebras and bimodules with relative composition, truncated degeneracy
diagrams with freeness certificates, and a verification harness that
checks the structural propositions by exhaustive enumeration at desk
scale.
"""

from .errors import CapabilityError, FunctorialityError, TruncationError
from .graded import (
    ArityMorphism,
    GradedMap,
    GradedSet,
    Profile,
    SortSet,
    enumerate_arity_morphisms,
    product,
    reflexive_coequalizer,
)
from .signature import Operation, Signature, signature, single_sorted
from .series import (
    FreeSeries,
    TabulatedSeries,
    UnitSeries,
    compose,
    delta,
    evaluate,
    free_series,
    star_product,
)
from .trees import (
    Leaf,
    Node,
    enumerate_essential,
    enumerate_trees,
    essential_subtree,
    graft,
    split_essential,
)
from .theory import (
    FiniteTheory,
    FreeTheory,
    Term,
    TheoryMorphism,
    collapse_theory,
    endomorphism_theory,
    free_theory,
    pointed_sets_theory,
    theory_coproduct_free,
    undercategory_theory,
)
from .algebra import (
    Algebra,
    AlgebraMap,
    BarComplex,
    Bimodule,
    algebra_coproduct,
    coproduct_with_free,
    enumerate_algebras,
    free_algebra,
    induct,
    is_effective_mono,
    is_mono,
    pushout,
    relative_composition,
    restrict,
)
from .simplicial import (
    FreenessCertificate,
    FreenessFailure,
    Surjection,
    TruncatedDegeneracyDiagram,
    enumerate_surjections,
    free_generators,
    is_closed_subdiagram,
    standard_resolution_levels,
)

__version__ = "0.1.0"
