"""Low-density linear cut estimators and their verification harness."""

__version__ = "0.1.0"

from .densities import (
    GaussianMixture,
    OracleResult,
    PiecewiseLinearDensity,
    adversarial_pair,
    from_spec,
    oracle_minimizer,
    two_blob_mixture,
    uniform_density,
    vee_density,
)
from .estimators import (
    BucketingCut,
    CutEstimate,
    HardMarginCut,
    Schedule,
    SoftMarginCut,
    WidestMarginCut,
    bucket_schedule,
    bucketing_cut,
    largest_gap_cut,
    soft_margin_cut,
    strip_count,
    widest_margin_cut,
    width_schedule,
)
from .geometry import (
    SphereGrid,
    angular_distance,
    canonical_direction,
    density_difference,
    halfspace_disagreement,
    interval_mass_distance,
    position_distance,
    sphere_grid,
)
from .experiments import (
    ExperimentConfig,
    ExperimentResult,
    TrialRecord,
    config_from_dict,
    coupon_tail_limit,
    derive_trial_seed,
    load_config,
    run_convergence,
    run_coupon_collector,
    run_experiment,
    run_failure_regime,
    run_indistinguishability,
    run_largest_gap,
)

__all__ = [name for name in dir() if not name.startswith("_")]
