"""Riesz bases generated by the left regular representation of ``N x_sigma H``.

Exact group arithmetic, signals on the group, transfer-matrix analysis of
Bessel / Riesz / orthonormal systems, dual generators, and sampling in
spaces spanned by crystallographic orbits.
"""

from .dual import (
    BiorthogonalityResult,
    DualResult,
    biorthogonality_check,
    dual_exact_laurent,
    dual_generator,
    inverse_filter,
    laurent_det,
)
from .estimators import AverageSampler, PointwiseSampler, RieszAnalyzer
from .exceptions import (
    FormatError,
    GammaRieszError,
    GroupStructureError,
    InfeasibleSamplingError,
    InternalConsistencyError,
    InvalidActionError,
    NonMonomialDeterminantError,
    NotRieszBasisError,
    QuadratureOrderError,
    UnsupportedOperationError,
)
from .group import (
    AbelianGroupSpec,
    ActionSpec,
    FiniteGroupTable,
    GammaElement,
    SemidirectGroup,
    characters,
    enumerate_gamma,
    finite_dihedral,
    gamma_inv,
    gamma_mul,
    infinite_dihedral,
    trivial_extension,
    validate_action,
)
from .sampling import (
    CrystalGroupSpec,
    FunctionGenerator,
    GeneratorFn,
    OrbitExpansion,
    PiecewisePolynomial,
    SplineSamplingCase,
    TabulatedFunction,
    average_sample_signal,
    build_interpolator,
    coefficients_from_samples,
    dinf_crystal,
    dinf_spline_case,
    pointwise_sample_signal,
    quasi_regular_apply,
    reconstruct,
    rkhs_bound,
    sample_function,
    spline_generator,
)
from .signal import (
    GammaSignal,
    analyze_inner,
    block,
    convolve_gamma,
    convolve_n,
    delta,
    involution,
    left_translate,
)
from .spectral import (
    AnalysisReport,
    FrequencyGrid,
    Tolerance,
    TransferMatrix,
    apply_spectral,
    cstar_norm,
    dinf_closed_bounds,
    onb_check,
    riesz_analyze,
    t_gamma,
    transfer_matrix,
)

__version__ = "0.1.0"
