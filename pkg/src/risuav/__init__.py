"""Placement simulator for a RIS-mounted UAV serving cellular users and
D2D pairs in an obstructed mmWave environment.

Submodules: geometry/scenario (world model), channel (link budget and
fading), throughput (rate metrics), placement (optimizers), harness
(experiments and CLI).  Hot kernels run on a compiled core when available
(see risuav._kernels.backend_name).
"""

from ._kernels import backend_name
from .channel import (
    ChannelBuilder,
    ChannelMode,
    ChannelState,
    PathLossLaw,
    RadioConfig,
    build_channel_state,
    dbm_to_watt,
    path_loss_db,
    sample_fading_amp,
    watt_to_dbm,
)
from .geometry import (
    LinkClass,
    Obstacle,
    Position3,
    classify_link,
    distance3,
    segment_blocked,
)
from .placement import (
    OptimizerConfig,
    PlacementResult,
    SearchConfig,
    StopReason,
    grad_cu,
    grad_d2d,
    gradient_ascent,
    grid_oracle,
    joint_search,
    optimize_cu,
    optimize_d2d,
)
from .scenario import GenerationConfig, GenerationError, Scenario, generate_scenario
from .throughput import (
    RateReport,
    cu_rate,
    d2d_rate,
    jain_index,
    net_throughput,
    ratio_deviation,
    total_cu,
    total_d2d,
)

__version__ = "0.1.0"
