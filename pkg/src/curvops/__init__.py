"""curvops: exact symbolic calculus for free differential graded operads.

The package implements canonical tree bases for free planar and symmetric
operads over the rationals, derivations and square-zero checking, the
named curved homotopy presentations, the category of weight-graded
quadruples with its initial and terminal objects, the explicit twisting
morphisms and the inductive unit of the right adjoint, exact rational
homology of finite slices, and Maurer-Cartan twisting of concrete
finite-dimensional algebras.
"""

from .errors import (
    ConsistencyFailure,
    CurvopsError,
    DegreeError,
    ImageEscapesSlice,
    ModeMismatch,
    NameCollision,
    NilpotencyExceeded,
    NonMixedDifferential,
    NotAComplex,
    NotClosed,
    NotInImage,
    NotSolvable,
    ParseError,
    PositionError,
    TruncationExceeded,
    UnknownGenerator,
)
from .signs import (
    Permutation,
    Rational,
    enumerate_inverse_shuffles,
    enumerate_shuffles,
    factorial_inverse,
    koszul_sign,
)
from .trees import (
    NS,
    SYM,
    Generator,
    OperadElement,
    Tree,
    act,
    acted_by,
    alpha_filtration_split,
    canonicalize,
    compose,
    element,
    from_generator,
    kappa_weight_split,
    split_by_vertex_count,
    total_compose,
    truncate_by_count,
    zero,
)
from .derivations import (
    Derivation,
    Report,
    WeightSplitDerivation,
    apply_derivation,
    bracket,
    check_square_zero,
    split_by_weight,
)
from .presets import (
    OperadPresentation,
    build_preset,
    coproduct_with_T,
    d_p_only,
    d_t_only,
    free_presentation,
)
from .grammar import parse_element, render_element
from .morphisms import (
    OperadMorphism,
    TruncatedMorphism,
    apply_morphism,
    compose_morphisms,
    identity_morphism,
    verify_chain_map,
)
from .curv import (
    CurvMorphism,
    CurvObject,
    construct_initial_morphism,
    curv_object,
    solve_bracket_kappa,
    solve_compose_slot1,
    terminal_morphism,
    validate_curv,
)
from .twisting import (
    RBundle,
    apply_R,
    build_r_object,
    construct_unit,
    counit,
    eta_cAinf,
    eta_cLinf,
    eta_morphism,
    eta_value,
    section_sigma,
    solve_dT,
)
from .linalg import (
    BasisSlice,
    RationalMatrix,
    element_coordinates,
    enumerate_slice,
    homology_dimension,
    kernel_rank,
    matrix_of,
    solve_linear,
)
from .algebras import (
    AlgebraStructure,
    Element,
    GradedSpace,
    MultilinearMap,
    check_structure,
    curvature_of,
    element_as_map,
    endo_compose,
    is_maurer_cartan,
    realize,
    structure_from_json,
    structure_to_json,
    twist_algebra,
)

__version__ = "0.1.0"
