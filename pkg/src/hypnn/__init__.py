"""Extreme k-th nearest neighbour balls of a Poisson process in hyperbolic
space: simulation engine and verification harness."""

__version__ = "0.1.0"

from .backend import backend_name
from .geometry import (
    ThresholdSpec,
    ball_volume,
    ball_volume_quadrature,
    distance,
    hpoint,
    intersection_boundary_radius,
    inverse_ball_volume,
    minkowski_bilinear,
    origin,
    point_at,
    threshold,
    unit_sphere_area,
)
from .sampling import SampleBatch, SeedSpec, sample_ball_process
from .knn import CENSORED, MetricIndex, brute_force_kth
from .exceedance import (
    ExceedanceRecord,
    ExperimentConfig,
    ReplicationSummary,
    buffer_radius,
    run_experiment,
    run_replication,
)
from .analytics import (
    GofReport,
    IntensityCurve,
    build_intensity_curve,
    chen_stein_check,
    dkw_bound,
    exact_exceedance_mean,
    gumbel_cdf,
    intensity_density,
    ks_statistic,
    poisson_cdf,
    poisson_pmf,
    tv_empirical_poisson,
)
from .lemma_verify import (
    BallPairSpec,
    ball_difference_volume,
    ball_difference_volume_mc,
    ball_intersection_volume,
    check_difference_bounds,
    check_growth_bounds,
    check_volbou,
)
