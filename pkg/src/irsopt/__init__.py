"""Joint precoder / reflecting-surface phase optimization for MIMO links."""

__version__ = "0.1.0"

from .config import ConfigError, SystemConfig
from .channel import (
    ChannelSet,
    RicianParams,
    UlaGeometry,
    generate_channel_set,
    path_loss,
    perturb_channel,
    perturb_channel_set,
    rician_channel,
    steering_vector,
)
from .solver import (
    SolveResult,
    SolverState,
    apg_step,
    baseline_no_irs,
    baseline_random_phase,
    effective_channel,
    gradient_theta,
    project_unit_modulus,
    solve,
    spectral_efficiency,
    update_auxiliary,
    update_dual,
    update_precoder,
    water_filling,
)
from .complexity import (
    CostQuery,
    admm_apg_per_iteration,
    cc_admm_apg,
    cc_ao,
    cc_ladmm,
    cc_pgm,
    cc_spgm,
    pgm_per_iteration,
)
from .harness import (
    ConvergenceResult,
    SweepResult,
    SweepRow,
    SweepSpec,
    run_convergence,
    run_sweep,
    single_run,
)

__all__ = [
    "__version__",
    "ConfigError",
    "SystemConfig",
    "ChannelSet",
    "RicianParams",
    "UlaGeometry",
    "generate_channel_set",
    "path_loss",
    "perturb_channel",
    "perturb_channel_set",
    "rician_channel",
    "steering_vector",
    "SolveResult",
    "SolverState",
    "apg_step",
    "baseline_no_irs",
    "baseline_random_phase",
    "effective_channel",
    "gradient_theta",
    "project_unit_modulus",
    "solve",
    "spectral_efficiency",
    "update_auxiliary",
    "update_dual",
    "update_precoder",
    "water_filling",
    "CostQuery",
    "admm_apg_per_iteration",
    "cc_admm_apg",
    "cc_ao",
    "cc_ladmm",
    "cc_pgm",
    "cc_spgm",
    "pgm_per_iteration",
    "ConvergenceResult",
    "SweepResult",
    "SweepRow",
    "SweepSpec",
    "run_convergence",
    "run_sweep",
    "single_run",
]
