"""Exact mixed moments of real and complex noncentral Wishart matrices."""

from .closed_forms import (
    complex_2x2_moment,
    hermite_coeffs,
    kibble_moment,
    laguerre_coeffs,
    noncentral_chisq_moment,
    real_2x2_moment,
)
from .combinatorics import (
    analyze_directed_graph,
    analyze_real_graph,
    coeff_f,
    coeff_g,
    enumerate_pair_partitions,
    enumerate_partial_injections,
    noncentral_stirling,
    phi,
    psi,
)
from .engine import (
    MomentMonomial,
    MomentPolynomial,
    MomentSpec,
    WishartParams,
    evaluate,
    expand_complex_moment,
    expand_moment,
    expand_real_moment,
    group_by_shape,
)
from .polynomial import MultiPoly, NuPolynomial
from .validation import (
    SimulationConfig,
    cross_check,
    estimate_moment_mc,
    estimate_moments_mc,
    mgf_eval,
    mgf_moment_fd,
)

__version__ = "0.1.0"
