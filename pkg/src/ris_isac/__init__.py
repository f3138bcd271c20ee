"""Simulator and optimizer for a reflecting-surface-assisted joint
communication and sensing downlink over low-altitude UAV links.

A dual-function base station serves K UAV users with M antennas while
keeping the echo SNR toward an unauthorized UAV above a floor; an
N-element passive surface reshapes both links. The optimizer alternates
closed-form fractional-programming updates with two small convex
programs (transmit beams, reflect phases) until the sum rate is
stationary.
"""

from .scenario import (
    ConfigError,
    Position3D,
    ScenarioConfig,
    SlotGeometry,
    build_config,
    config_to_text,
    db_to_lin,
    dbm_to_watt,
    default_scenario,
    distance,
    geometry_at_slot,
    lin_to_db,
    link_angle,
    load_config,
    save_config,
    watt_to_dbm,
    with_overrides,
)
from .channel import (
    ChannelSet,
    EffectiveChannels,
    effective_comm_channel,
    make_effective,
    sample_channels,
    steering_vector,
    target_composite,
)
from .metrics import (
    BeamformerState,
    all_sinr,
    beam_gains,
    radar_snr,
    rate,
    sinr,
    sum_rate,
    total_power,
)
from .fp import dual_objective, quad_objective, update_c, update_r
from .sca import (
    AffineConstraint,
    linearized_modulus,
    linearized_sensing_v,
    linearized_sensing_w,
    quad_sensing_value,
    quartic_sensing_value,
    taylor_lb_quadratic,
    taylor_surrogate_quartic,
)
from .qsolver import ConvexQPInstance, SolveOptions, SolveReport, solve
from .ao import (
    AOOptions,
    InfeasibleError,
    SlotSolution,
    finalize,
    initialize,
    run_slot,
    solve_p3,
    solve_p4,
    solve_scenario,
)
from .bench import (
    RunRow,
    SCHEMES,
    SummaryRow,
    SweepSpec,
    run_scheme,
    run_sweep,
    summarize,
)

__version__ = "0.1.0"
