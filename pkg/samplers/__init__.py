from samplers.config import DEFAULT_A, DEFAULT_BURN_IN, DEFAULT_M, DEFAULT_TARGET_RATE, SamplerConfig
from samplers.ensemble import Ensemble, initialize_ensemble
from samplers.fes import aies_sweep, fes_iteration, fes_joint_iteration, pcn_iteration, pcn_sweep
from samplers.hybrid import AdaptState, hybrid_iteration, hybrid_sweep
from samplers.moves import (
    aies_block_update,
    joint_update,
    log_stretch_acceptance,
    pcn_baseline_update,
    pcn_complement_update,
    sample_stretch,
    stretch_from_uniform,
    stretch_proposal,
)
from samplers.runner import run_sampler
from samplers.streams import PermutedStreams, StreamFactory
from samplers.tuning import autotune_omega

__all__ = [
    "DEFAULT_A",
    "DEFAULT_BURN_IN",
    "DEFAULT_M",
    "DEFAULT_TARGET_RATE",
    "AdaptState",
    "Ensemble",
    "PermutedStreams",
    "SamplerConfig",
    "StreamFactory",
    "aies_block_update",
    "aies_sweep",
    "autotune_omega",
    "fes_iteration",
    "fes_joint_iteration",
    "hybrid_iteration",
    "hybrid_sweep",
    "initialize_ensemble",
    "joint_update",
    "log_stretch_acceptance",
    "pcn_baseline_update",
    "pcn_complement_update",
    "pcn_iteration",
    "pcn_sweep",
    "run_sampler",
    "sample_stretch",
    "stretch_from_uniform",
    "stretch_proposal",
]
