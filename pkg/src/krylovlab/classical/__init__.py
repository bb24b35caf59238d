"""Classical phase-space side of the LMG and FP models."""

from .dynamics import (
    SaddlePoint,
    Trajectory,
    find_saddles_fp,
    find_saddles_lmg,
    fp_energy,
    fp_gamma_point,
    fp_jacobian,
    fp_saddle_exponent,
    integrate_fp,
    integrate_lmg,
    lmg_energy,
    lmg_jacobian,
    random_sphere_points,
)
from .semianalytic import (
    alpha_curve,
    alpha_of_E,
    elliptic_K,
    elliptic_parameter,
    energy_range,
    fp_coupling_map,
    fp_lower_bound_alpha,
    MicrocanonicalAlphaCurve,
    sigma_star,
    sup_alpha,
)
from .poly import SpherePolynomial, classical_lanczos, poisson_bracket, sphere_average
