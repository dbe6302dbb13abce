"""Integration against a non-normalized density: simple Monte Carlo ratio
estimator, ball-walk Metropolis estimator, hard instance families, analytic
bounds and an exact small-state spectral laboratory."""

from .bounds import (
    classic_f1_error,
    conductance_lb_metropolis,
    error_const_metropolis,
    lower_bound_fc,
    lower_bound_nonadaptive,
    upper_bound_simple,
)
from .chains import ball_walk_step, metropolis_step, run_chain, run_chains
from .estimators import (
    EstimateReport,
    Metropolis,
    SimpleMC,
    delta_star,
    estimate_mh,
    estimate_simple,
    measure_rmse,
    worst_case_over_family,
)
from .geometry import ConvexBody, Packing, gamma_half_ratio, membership, packing_on_ball, uniform_sample, vol_unit_ball
from .instances import (
    FcHardInstance,
    IntegrandOracle,
    ProblemInstance,
    WeightOracle,
    make_fad_instance,
    make_fc_instance,
    make_smooth_instance,
    sample_fc_prior,
)
from .rng import ChainBudget, RngStream
from .spectral import (
    DiscreteChain,
    asymptotic_error_law,
    check_cheeger,
    conductance_exact,
    discretize_1d,
    local_conductance_mc,
    second_eigenvalue,
)

__version__ = "0.1.0"
