"""cfdim: continued-fraction digit growth, exceptional sets and their Hausdorff dimension."""

from ._kernel import BACKEND
from .cf import (
    Cylinder,
    DigitWord,
    Expansion,
    QuotientStats,
    convergents,
    cylinder,
    cylinder_length,
    expand,
    khintchine_mc,
    stats,
)
from .compositions import (
    CompositionSumQuery,
    composition_sum,
    generalized_bound_constant,
    lemma_bound,
    verify_lemma,
)
from .constructions import (
    DigitStream,
    EMSpec,
    WindowSpec,
    check_B_assumptions,
    digit_window,
    membership_diagnostics,
    n_zero,
    sample_mu,
    stream_A,
    stream_B,
    stream_EM,
    stream_F,
)
from .dimension import (
    CoverScheme,
    ProfileQuery,
    cover_sum_terms,
    figure1_data,
    finite_depth_dimension,
    local_dimension_profile,
    solve_sL,
)
from .errors import (
    AmbiguousBoundary,
    CfdimError,
    DomainError,
    EmptyWindow,
    NoRoot,
    PrecisionExhausted,
    Unsupported,
)
from .ifs import (
    AffineGaussLike,
    DDecayingSystem,
    GaussSystem,
    build_affine,
    gauss_as_ddecaying,
    predicted_dimension,
    project,
    symbolic_expand,
)
from .numerics import BigReal, GrowthFunction, certified_floor, eval_growth, zeta

__version__ = "0.1.0"
