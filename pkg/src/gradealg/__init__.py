"""Symbolic engine for graded algebraic theories.

Grade-annotated terms over preordered monoids, a bounded entailment
oracle, finite models, free models and their induced graded monads,
Lawvere-style hom data with roundtrip checks, and theory combinators
(sums, coequalizers, tensor products, regrading).
"""

from .errors import (
    GradealgError,
    MonoidMismatchError,
    ParseError,
    ResourceLimitError,
    SupportError,
    TermError,
)
from .grade import (
    Grade,
    GradeMonoid,
    LaxMonoidalMap,
    enumerate_grades,
    exception_monoid,
    leq,
    nat_monoid,
    powerset_monoid,
    product_monoid,
    tensor,
    trivial_monoid,
)
from .terms import (
    App,
    Coerce,
    Equation,
    OpDecl,
    Signature,
    Term,
    Theory,
    Var,
    infer_grade,
    normalize_coercions,
    rename,
    substitute,
)
from .logic import (
    PROVED,
    UNKNOWN,
    ClosureUniverse,
    Normalizer,
    derive_closure,
    entails,
    normalize,
)
from .models import (
    FiniteModel,
    ModelHom,
    check_model,
    hom_check,
    interpret,
    satisfies,
    terminal_model,
)
from .freemodel import (
    FreeModel,
    GradedMonad,
    KleisliHom,
    check_monad_laws,
    free_finite_model,
    free_model,
    induced_monad,
    kleisli_compose,
    kleisli_eta,
    kleisli_hom,
    universal_extension,
)
from .lawvere import (
    GradedLawvere,
    LawMorph,
    TheoryMorphism,
    apply_morphism,
    check_lawvere,
    identity_morphism,
    l_of,
    morphism_preserves_equations,
    roundtrip_check,
    th_of,
    theory_morphism,
)
from .combine import (
    coequalize,
    extend_theory,
    lfold_state_counts,
    lfold_state_oracle,
    sum_theories,
    sum_with_injections,
    tensor_theories,
)
from . import catalog

__version__ = "0.1.0"
