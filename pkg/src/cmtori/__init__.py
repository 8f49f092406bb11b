"""Exact class numbers, Tamagawa numbers and norm indices of CM algebraic
tori over Q, with counting applications for CM points, unitary Shimura
varieties and polarized abelian varieties over finite fields."""

from .apps import (
    IsogenyClassCounts,
    LevelData,
    ShimuraInput,
    cm_point_count,
    double_coset_cardinality,
    isogeny_class_counts,
    shimura_components,
)
from .padic import (
    LocalBase,
    LocalQuadExtension,
    TruncatedLocalElement,
    count_ramified_quadratic_by_norm,
    hilbert_symbol,
    hilbert_symbol_bruteforce,
    norm_one_square_index,
    norm_unit_image,
    unramified_square_structure,
    z2_in_norm_group,
)
from .quadratic import (
    BiquadraticCM,
    QuadraticField,
    ReducedForm,
    class_number_imaginary,
    class_number_real,
    fundamental_discriminant,
    kronecker_symbol,
    roots_of_unity_order,
    splitting_type,
)
from .torus import (
    CMAlgebraSpec,
    ClassNumberReport,
    Overrides,
    class_number,
    class_number_family_sqrt_p_j,
    class_number_norm_one,
    global_norm_index,
    hasse_unit_index,
    local_index_report,
    q_symbols,
    ramification_profile,
    tamagawa,
    verify_consistency,
)

__version__ = "0.1.0"
