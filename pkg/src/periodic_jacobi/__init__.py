"""Spectral analysis of periodic Jacobi operators.

Discriminant and band structure, the quasimomentum map of the upper
half-strip, trace formulas, and numerical certificates for the gap and
width inequalities that follow from them.
"""
from .bounds import BoundRecord, BoundsReport, certify, harper_bound_demo, harper_lower_bound
from .core import (
    PeriodicJacobi,
    bloch_matrix,
    build_L,
    capacity,
    gershgorin_interval,
    harper,
    make_jacobi,
    random_jacobi,
    shift_diagonal,
    trace_powers,
)
from .discriminant import (
    DiscriminantRep,
    FundamentalPair,
    discriminant_and_derivative,
    discriminant_poly,
    discriminant_value,
    fundamental_pair,
    monic_phi_polys,
    reconstruct_from_monic_pair,
)
from .errors import (
    EdgeSingularityError,
    InconsistentPolynomialsError,
    JacobiError,
    NumericalError,
    ValidationError,
)
from .quasimomentum import (
    QuasimomentumModel,
    boundary_samples,
    build_model,
    dirichlet_integral_1,
    dirichlet_integral_2,
    gap_shape_checks,
    herglotz_k,
    k_complex,
    k_prime,
    q_coefficients,
    trace_moment_check,
    trace_moment_rhs,
    u_of_x,
    v_of_x,
    vertical_identity_check,
)
from .spectrum import (
    BandStructure,
    ZGapSet,
    band_edges,
    bloch_oracle,
    hausdorff_band_distance,
    normalize,
    x_of_lambda,
    z_coordinates,
)

__version__ = "0.1.0"
