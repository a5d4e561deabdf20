"""AdaptNet: deterministic multi-UAV sensing and communication experiments.

Trajectory similarity (discrete Frechet), k-medoids clustering over
custom distances, radar-abstracted sensing with track maintenance,
AoI-aware transmit queues with adaptive waveforms, and two from-scratch
RL stacks (cooperative DQN, MADDPG) over the same simulated world.
"""

__version__ = "0.1.0"

from .clustering import (
    Clustering,
    DistanceMatrix,
    cluster_report,
    k_medoids,
    pairwise_frechet,
    silhouette_score,
)
from .comms import (
    AoiTracker,
    DirectLink,
    Discipline,
    GatedLink,
    Packet,
    TxQueue,
    Waveform,
    WaveformKind,
    default_waveforms,
    mm1_aoi,
    select_waveform,
    success_factor,
)
from .config import ConfigError, ScenarioConfig, config_dict, load_config, serialize
from .harness import (
    MetricsFrame,
    SchemaError,
    emit_plot_data,
    run_scenario,
    train_mode1,
    train_mode2,
)
from .learning import (
    DqnAgent,
    MaddpgAgent,
    Mlp,
    ReplayBuffer,
    dqn_update,
    epsilon_at,
    load_checkpoint,
    maddpg_update,
    save_checkpoint,
)
from .modes import (
    Mode1Env,
    Mode2Env,
    ModeController,
    ModeEmphasis,
    derive_seed,
    mode_switch,
)
from .sensing import (
    Detection,
    Track,
    TrackParams,
    plan_sensing_path,
    radar_scan,
    sensing_pipeline,
    update_tracks,
)
from .trajectory import (
    Point,
    RelevanceScore,
    Trajectory,
    discrete_frechet,
    load_trajectories_csv,
    relevance_score,
    resample_uniform,
    save_trajectories_csv,
)
from .world import (
    Target,
    TargetClass,
    Uav,
    World,
    init_world,
    make_paths,
    snapshot,
    step_targets,
    step_uav,
)

__all__ = [
    "AoiTracker",
    "Clustering",
    "ConfigError",
    "Detection",
    "DirectLink",
    "Discipline",
    "DistanceMatrix",
    "DqnAgent",
    "GatedLink",
    "MaddpgAgent",
    "MetricsFrame",
    "Mlp",
    "Mode1Env",
    "Mode2Env",
    "ModeController",
    "ModeEmphasis",
    "Packet",
    "Point",
    "RelevanceScore",
    "ReplayBuffer",
    "ScenarioConfig",
    "SchemaError",
    "Target",
    "TargetClass",
    "Track",
    "TrackParams",
    "Trajectory",
    "TxQueue",
    "Uav",
    "Waveform",
    "WaveformKind",
    "World",
    "cluster_report",
    "config_dict",
    "default_waveforms",
    "derive_seed",
    "discrete_frechet",
    "dqn_update",
    "emit_plot_data",
    "epsilon_at",
    "init_world",
    "k_medoids",
    "load_checkpoint",
    "load_config",
    "load_trajectories_csv",
    "maddpg_update",
    "make_paths",
    "mm1_aoi",
    "mode_switch",
    "pairwise_frechet",
    "plan_sensing_path",
    "radar_scan",
    "relevance_score",
    "resample_uniform",
    "run_scenario",
    "save_checkpoint",
    "save_trajectories_csv",
    "select_waveform",
    "sensing_pipeline",
    "serialize",
    "silhouette_score",
    "snapshot",
    "step_targets",
    "step_uav",
    "success_factor",
    "train_mode1",
    "train_mode2",
    "update_tracks",
]
