"""Gaussian embezzlement of entanglement for fermionic systems.

Passive covariances (:mod:`fermbezzle.covariance`), an exact Fock-space
oracle (:mod:`fermbezzle.fock`), covariance-level distance bounds
(:mod:`fermbezzle.bounds`), the self-dual / Majorana formalism
(:mod:`fermbezzle.selfdual`) and the embezzlement protocol
(:mod:`fermbezzle.embezzlement`).
"""

from .bounds import BoundReport, bittel_bound, entropy_lower_bound, eta, ps_trick_bound, sandwich
from .covariance import (
    Covariance,
    SpectralDensityReport,
    clip_spectrum,
    direct_sum,
    select_dense_subspace,
    spectral_density,
    validate,
)
from .embezzlement import (
    EmbezzlementPlan,
    construct_plan,
    covariance_distance_no_go,
    interleave_bound_check,
    kappa_exact_small,
    lift_to_bipartite,
    sorted_eigen_distance,
    verify_plan_exact,
)
from .errors import FermbezzleError
from .fock import gaussian_state, fock_unitary, trace_distance
from .spectra import ladder, random_covariance, xx_chain_half

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "bittel_bound", "entropy_lower_bound", "eta", "ps_trick_bound", "sandwich",
    "Covariance", "SpectralDensityReport", "clip_spectrum", "direct_sum", "select_dense_subspace",
    "spectral_density", "validate",
    "EmbezzlementPlan", "construct_plan", "covariance_distance_no_go", "interleave_bound_check",
    "kappa_exact_small", "lift_to_bipartite", "sorted_eigen_distance", "verify_plan_exact",
    "FermbezzleError", "gaussian_state", "fock_unitary", "trace_distance",
    "ladder", "random_covariance", "xx_chain_half",
]
