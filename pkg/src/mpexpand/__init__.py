"""Meixner-Pollaczek expansions of completed L-functions in multiprecision."""

from .precision import Precision, workprec
from .special_functions import gamma, log_gamma, measure_weight, pochhammer
from .mp_basis import BasisSpec, clenshaw, mp_eval_all, mp_norm
from .coefficients import (
    CoeffSeries,
    FunctionSpec,
    chi1_coeffs,
    coeffs_by_quadrature,
    lhat_spec,
    mordell_F,
    xi_spec,
)
from .companion_spectrum import build_companion, eigenvalues, zeros_of_partial_sum
from .reference_values import dirichlet_beta, lhat_chi1, riemann_zeta, xi_completed
from .analysis import Region, convergence_study, partial_sum_eval, track_zero, zero_statistics

__version__ = "0.1.0"

__all__ = [
    "Precision", "workprec", "gamma", "log_gamma", "measure_weight", "pochhammer",
    "BasisSpec", "clenshaw", "mp_eval_all", "mp_norm",
    "CoeffSeries", "FunctionSpec", "chi1_coeffs", "coeffs_by_quadrature", "lhat_spec", "mordell_F", "xi_spec",
    "build_companion", "eigenvalues", "zeros_of_partial_sum",
    "dirichlet_beta", "lhat_chi1", "riemann_zeta", "xi_completed",
    "Region", "convergence_study", "partial_sum_eval", "track_zero", "zero_statistics",
]
