"""Rates, element splits and placements for links aided by hybrid,
active and passive reflecting surfaces.

Three deployments are modelled: one hybrid surface (``bhu``), an active
surface near the BS followed by a passive one near the user (``bapu``),
and the reverse order (``bpau``). All quantities are linear (watts,
meters, squared amplitude gains); dBm only appears in scenario files.
"""
from .core_model import (
    ArrayLayout,
    DomainError,
    DoubleGains,
    DoubleIrsGeometry,
    ElementSplit,
    Exponents,
    HybridGains,
    PowerConfig,
    RelaxedSplit,
    Scheme,
    SingleIrsGeometry,
    db_to_linear,
    dbm_to_watts,
    gains_from_geometry,
    path_gain,
    steering_vector,
    watts_to_dbm,
)
from .snr_engine import (
    AmplificationLimitError,
    DerivedConstants,
    EvalResult,
    amp_factor,
    check_favorable_power,
    compare_pair,
    derived_constants,
    rate_from_snr,
    snr_closed_form,
    vector_snr_oracle,
)
from .allocation import (
    allocation_predicates,
    approx_snr_opt_allocation,
    best_scheme_by_allocation,
    exhaustive_split,
    optimal_split,
    round_split,
    rounded_optimal_split,
    solve_allocation_cubic,
)
from .placement import (
    PlacementSolution,
    check_placement_assumptions,
    compare_placed,
    grid_search_placement,
    place,
)
from .joint_optimizer import (
    JointResult,
    alternate_optimize,
    benchmark_bppu,
    benchmark_bpu,
    compare_all,
    joint_brute_force,
)
from .asymptotics import (
    AsymptoticQuery,
    asymptotic_snr,
    estimate_scaling_order,
    large_pi_rate_ratio,
)
from .config import ConfigError, ScenarioConfig, parse_config

__version__ = "0.1.0"
