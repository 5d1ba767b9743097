"""sphwave: Poisson random waves on the sphere.

A numerical laboratory for the superposition of Legendre waves centred on
Poisson-distributed points of the sphere: stable spherical harmonics, exact
Wigner/Clebsch-Gordan algebra, closed-form moments and fourth cumulants,
quantitative central-limit bound evaluators, and a seeded data-parallel
Monte Carlo engine that verifies the formulas against independent oracles.
"""

__version__ = "0.1.0"

from .errors import CapacityError, DomainError
from .sphfn import (
    FOUR_PI,
    Multipole,
    QuadratureRule,
    SpherePoint,
    assoc_legendre,
    gauss_legendre_rule,
    legendre,
    legendre_all,
    legendre_quartic_integral,
    real_sph_harm,
    sph_harm_row,
    sphere_quadrature,
)
from .wigner import (
    clebsch_gordan,
    gaunt_quartic,
    quartic_integral_via_wigner,
    wigner3j,
    wigner3j_exact,
    wigner3j_zero,
)
from .model import (
    HarmonicVector,
    PoissonRealization,
    evaluate_field,
    finite_dim_eval,
    harmonic_coefficients,
    parseval_check,
    sample_realization,
)
from .moments import (
    CumulantReport,
    cum4_bracket,
    cum4_coefficient,
    cum4_coefficient_sum,
    cum4_point,
    fourth_moment_point,
    norm_moments,
)
from .bounds import (
    BoundReport,
    SmoothnessBudget,
    bound_fdd_d3,
    bound_fdd_via_harmonics,
    bound_functional,
    bound_harmonic_d2,
    bound_harmonic_d3,
    bound_one_dim,
    bound_one_dim_kolmogorov,
)
from .mc import (
    ExperimentConfig,
    GaussianReference,
    SampleSet,
    calibrate_w1_floor,
    convergence_sweep,
    empirical_covariance,
    empirical_w1_to_standard_normal,
    k_statistics,
    run,
)
from .checks import RunManifest, run_verify
