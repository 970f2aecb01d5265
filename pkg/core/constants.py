"""
core/constants.py — Name constants. Single source of truth.

Use these instead of raw strings ("fes", "advection", "pcn" stage, etc.) throughout
the codebase. Experiment files, chain headers and acceptance logs all spell names
exactly as below.

Usage:
    from core.constants import SamplerName, Stage

    if config.sampler == SamplerName.FES: ...
    flags[Stage.PCN]
"""


class ProblemName:
    ADVECTION = "advection"
    LANGEVIN  = "langevin"

    ALL: list[str] = [ADVECTION, LANGEVIN]


class SamplerName:
    PCN       = "pcn"
    FES       = "fes"
    FES_JOINT = "fes-joint"
    HYBRID    = "hybrid"

    ALL: list[str] = [PCN, FES, FES_JOINT, HYBRID]

    # Samplers whose walkers interact through stretch moves.
    ENSEMBLE: list[str] = [FES, FES_JOINT]


class Stage:
    """Accept/reject stages. Also the stream-counter stage index (see samplers/streams.py)."""
    INIT   = "init"
    AIES   = "aies"
    PCN    = "pcn"
    JOINT  = "joint"
    RW     = "rw"       # adaptive random walk of the hybrid baseline
    DATA   = "data"     # synthetic dataset generation
    POSTERIOR = "posterior"  # exact conditional draws beside a run

    ORDER: list[str] = [INIT, AIES, PCN, JOINT, RW, DATA, POSTERIOR]

    @classmethod
    def index(cls, stage: str) -> int:
        return cls.ORDER.index(stage)


class InitMode:
    PRIOR = "prior"
    BALL  = "ball"

    ALL: list[str] = [PRIOR, BALL]


# Stage whose acceptance drives omega autotuning, per sampler.
TUNED_STAGE: dict[str, str] = {
    SamplerName.PCN:       Stage.PCN,
    SamplerName.FES:       Stage.PCN,
    SamplerName.FES_JOINT: Stage.JOINT,
    SamplerName.HYBRID:    Stage.PCN,
}
