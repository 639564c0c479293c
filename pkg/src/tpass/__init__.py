"""Simulation and optimization toolkit for transmit pinching-antenna systems.

A single dielectric waveguide feeds N pinching antennas serving K wireless
users in TDMA slots; the residual guided signal reaches a wired user through
a terminating coupler, paired with the scheduled wireless user by
power-domain NOMA. The package provides the propagation model, closed-form
single-antenna designs, block-coordinate solvers for four reconfiguration
protocols, brute-force oracles, and Monte Carlo experiment drivers.
"""

__version__ = "0.1.0"

from .channel import (
    EffectiveChannel,
    PaConfig,
    effective_wired,
    effective_wireless,
    freespace_coeff,
    pa_points,
    radiation_weights,
    ue_point,
    waveguide_coeff,
)
from .errors import (
    ConfigError,
    DegenerateGeometryError,
    InfeasibleError,
    InvalidParamsError,
    TpassError,
)
from .montecarlo import (
    EXPERIMENTS,
    AggregateStats,
    Scenario,
    SweepSpec,
    TrialRecord,
    run_protocol_sweep,
    run_two_user_sweep,
    seed_scenario,
)
from .multiuser import (
    ProtocolKind,
    ProtocolSolution,
    ProtocolStructure,
    bcd_optimize,
    protocol_structure,
    refine_positions_per_slot,
    time_allocation,
)
from .params import (
    DerivedConstants,
    SystemParams,
    config_snapshot,
    dbm_to_watts,
    derive_constants,
    load_config,
    two_user_defaults,
    watts_to_dbm,
)
from .rates import (
    SlotSolution,
    beta_bounds,
    optimal_beta,
    pair_rates,
    slot_rates,
    weighted_optimal_beta,
)
from .twouser import (
    GainRatioReport,
    SicOrder,
    TwoUserSolution,
    decide_sic_order,
    delta_upper_bound,
    gain_ratios,
    optimal_pa_position,
    optimize_delta,
    solve_two_user,
    wireless_only_rate,
)

__all__ = [
    "AggregateStats",
    "ConfigError",
    "DegenerateGeometryError",
    "DerivedConstants",
    "EffectiveChannel",
    "EXPERIMENTS",
    "GainRatioReport",
    "InfeasibleError",
    "InvalidParamsError",
    "PaConfig",
    "ProtocolKind",
    "ProtocolSolution",
    "ProtocolStructure",
    "Scenario",
    "SicOrder",
    "SlotSolution",
    "SweepSpec",
    "SystemParams",
    "TpassError",
    "TrialRecord",
    "TwoUserSolution",
    "bcd_optimize",
    "beta_bounds",
    "config_snapshot",
    "dbm_to_watts",
    "decide_sic_order",
    "delta_upper_bound",
    "derive_constants",
    "effective_wired",
    "effective_wireless",
    "freespace_coeff",
    "gain_ratios",
    "load_config",
    "optimal_beta",
    "optimal_pa_position",
    "optimize_delta",
    "pa_points",
    "pair_rates",
    "protocol_structure",
    "radiation_weights",
    "ue_point",
    "refine_positions_per_slot",
    "run_protocol_sweep",
    "run_two_user_sweep",
    "seed_scenario",
    "slot_rates",
    "solve_two_user",
    "time_allocation",
    "two_user_defaults",
    "watts_to_dbm",
    "waveguide_coeff",
    "weighted_optimal_beta",
    "wireless_only_rate",
]
