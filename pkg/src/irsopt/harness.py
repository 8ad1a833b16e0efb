"""Monte-Carlo experiment harness: parameter sweeps and convergence traces.

Every trial owns a child seed derived from (master seed, value index, trial
index) through a splittable seed sequence, so results are independent of
execution order and worker count; aggregation uses compensated sums over
trial-indexed lists.  When channel knowledge is imperfect (csi_delta > 0) the
optimizer runs on perturbed channels and the reported rate is evaluated on
the true ones.
"""
from __future__ import annotations

import dataclasses
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__ as _version
from .channel import ChannelSet, generate_channel_set, perturb_channel_set
from .config import ConfigError, SystemConfig
from .solver import (
    SolveResult,
    baseline_no_irs,
    baseline_random_phase,
    effective_channel,
    solve,
    spectral_efficiency,
)

METHODS = ("admm_apg", "random_phase", "no_irs")

# swept parameter name -> SystemConfig field and whether values must be integers
_SWEEPABLE = {
    "power_db": ("power_db", False),
    "mi": ("mi", True),
    "mt": ("mt", True),
    "ms": ("ms", True),
    "delta": ("csi_delta", False),
    "iterations": ("k_max", True),
}


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: a parameter, its values, and the trial budget."""

    param: str
    values: Tuple[float, ...]
    trials: int
    base: SystemConfig = SystemConfig()
    methods: Tuple[str, ...] = METHODS
    workers: int = 1
    measure_time: bool = False   # off keeps outputs byte-reproducible

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "methods", tuple(self.methods))

    def validate(self) -> "SweepSpec":
        if self.param not in _SWEEPABLE:
            raise ConfigError(
                f"unknown sweep parameter {self.param!r}; "
                f"choose from {sorted(_SWEEPABLE)}"
            )
        if not self.values:
            raise ConfigError("sweep needs at least one value")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown methods {bad}; choose from {list(METHODS)}")
        if not self.methods:
            raise ConfigError("sweep needs at least one method")
        self.base.validate()
        for v in self.values:
            _apply_value(self.base, self.param, v).validate()
        return self


@dataclass(frozen=True)
class SweepRow:
    """Aggregated outcome for one (value, method) cell."""

    value: float
    method: str
    mean_rate_bps_hz: float
    stderr: float
    mean_converged_iter: float
    mean_wall_ms: float


@dataclass(frozen=True)
class SweepResult:
    rows: Tuple[SweepRow, ...]
    metadata: dict


@dataclass(frozen=True)
class ConvergenceResult:
    power_dbs: Tuple[float, ...]
    mean_rates: Tuple[Tuple[float, ...], ...]   # one trace per power level
    metadata: dict


def _apply_value(base: SystemConfig, param: str, value: float) -> SystemConfig:
    fieldname, integral = _SWEEPABLE[param]
    if integral:
        if value != int(value):
            raise ConfigError(f"{param} sweep values must be integers, got {value!r}")
        value = int(value)
    return dataclasses.replace(base, **{fieldname: value})


def _trial_rngs(master_seed: int, value_index: int, trial: int):
    """Independent child streams for one trial, stable under reordering."""
    ss = np.random.SeedSequence([master_seed, value_index, trial])
    ch_ss, solve_ss, rp_ss, pert_ss = ss.spawn(4)
    return (
        np.random.default_rng(ch_ss),
        int(solve_ss.generate_state(1)[0]),
        np.random.default_rng(rp_ss),
        np.random.default_rng(pert_ss),
    )


def _evaluate(res: SolveResult, true_ch: ChannelSet, cfg: SystemConfig) -> float:
    h = effective_channel(res.theta, true_ch)
    return spectral_efficiency(h, res.precoder, cfg.snr_per_stream)


def _run_trial(args: tuple) -> Dict[str, Tuple[float, float, float]]:
    cfg, master_seed, value_index, trial, methods, measure_time = args
    ch_rng, solve_seed, rp_rng, pert_rng = _trial_rngs(master_seed, value_index, trial)
    true_ch = generate_channel_set(cfg, ch_rng)
    if cfg.csi_delta > 0:
        work_ch = perturb_channel_set(true_ch, cfg.csi_delta, pert_rng)
    else:
        work_ch = true_ch
    out: Dict[str, Tuple[float, float, float]] = {}
    for method in methods:
        start = time.perf_counter()
        if method == "admm_apg":
            res = solve(dataclasses.replace(cfg, seed=solve_seed), work_ch)
            converged = float(res.converged_at if res.converged_at is not None
                              else cfg.k_max)
        elif method == "random_phase":
            res = baseline_random_phase(cfg, work_ch, rp_rng)
            converged = 1.0
        elif method == "no_irs":
            res = baseline_no_irs(cfg, work_ch)
            converged = 1.0
        else:
            raise ConfigError(f"unknown method {method!r}")
        wall_ms = (time.perf_counter() - start) * 1e3 if measure_time else 0.0
        out[method] = (_evaluate(res, true_ch, cfg), converged, wall_ms)
    return out


def single_run(cfg: SystemConfig) -> Tuple[SolveResult, float]:
    """One optimizer run with the same seed discipline as a 1-trial sweep.

    Returns the full solve result plus the rate evaluated on the true
    channels (these differ only when csi_delta > 0).
    """
    cfg.validate()
    ch_rng, solve_seed, _, pert_rng = _trial_rngs(cfg.seed, 0, 0)
    true_ch = generate_channel_set(cfg, ch_rng)
    if cfg.csi_delta > 0:
        work_ch = perturb_channel_set(true_ch, cfg.csi_delta, pert_rng)
    else:
        work_ch = true_ch
    res = solve(dataclasses.replace(cfg, seed=solve_seed), work_ch)
    return res, _evaluate(res, true_ch, cfg)


def _mean(xs: Sequence[float]) -> float:
    return math.fsum(xs) / len(xs)


def _stderr(xs: Sequence[float], mean: float) -> float:
    n = len(xs)
    if n < 2:
        return 0.0
    var = math.fsum((x - mean) ** 2 for x in xs) / (n - 1)
    return math.sqrt(var / n)


def _map_trials(spec: SweepSpec, tasks: List[tuple]) -> List[dict]:
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            return list(pool.map(_run_trial, tasks, chunksize=8))
    return [_run_trial(t) for t in tasks]


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Run the sweep and aggregate per (value, method)."""
    spec.validate()
    master_seed = spec.base.seed
    rows: List[SweepRow] = []
    for vi, value in enumerate(spec.values):
        cfg = _apply_value(spec.base, spec.param, value)
        tasks = [(cfg, master_seed, vi, t, spec.methods, spec.measure_time)
                 for t in range(spec.trials)]
        outcomes = _map_trials(spec, tasks)
        for method in spec.methods:
            rates = [o[method][0] for o in outcomes]
            convs = [o[method][1] for o in outcomes]
            walls = [o[method][2] for o in outcomes]
            mean_rate = _mean(rates)
            rows.append(SweepRow(
                value=value,
                method=method,
                mean_rate_bps_hz=mean_rate,
                stderr=_stderr(rates, mean_rate),
                mean_converged_iter=_mean(convs),
                mean_wall_ms=_mean(walls),
            ))
    metadata = {
        "version": f"irsopt-{_version}",
        "master_seed": master_seed,
        "config": {
            "system": spec.base.to_dict(),
            "sweep": {
                "param": spec.param,
                "values": list(spec.values),
                "trials": spec.trials,
                "methods": list(spec.methods),
                "workers": spec.workers,
                "measure_time": spec.measure_time,
            },
        },
    }
    return SweepResult(rows=tuple(rows), metadata=metadata)


def _convergence_trial(args: tuple) -> List[float]:
    cfg, master_seed, value_index, trial = args
    ch_rng, solve_seed, _, pert_rng = _trial_rngs(master_seed, value_index, trial)
    true_ch = generate_channel_set(cfg, ch_rng)
    if cfg.csi_delta > 0:
        work_ch = perturb_channel_set(true_ch, cfg.csi_delta, pert_rng)
    else:
        work_ch = true_ch
    res = solve(dataclasses.replace(cfg, seed=solve_seed), work_ch)
    return [float(r) for r in res.rates]


def run_convergence(cfg: SystemConfig, power_dbs: Sequence[float], trials: int,
                    workers: int = 1) -> ConvergenceResult:
    """Mean per-iteration rate trace at each power level.

    Traces are averaged position-wise over trials, so early stopping is
    disabled for these runs regardless of cfg.early_stop.
    """
    cfg.validate()
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    if not power_dbs:
        raise ConfigError("convergence needs at least one power level")
    cfg = dataclasses.replace(cfg, early_stop=False)
    traces: List[Tuple[float, ...]] = []
    for pi, p in enumerate(power_dbs):
        cfg_p = dataclasses.replace(cfg, power_db=float(p))
        tasks = [(cfg_p, cfg.seed, pi, t) for t in range(trials)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                per_trial = list(pool.map(_convergence_trial, tasks, chunksize=4))
        else:
            per_trial = [_convergence_trial(t) for t in tasks]
        mean_trace = tuple(
            math.fsum(tr[k] for tr in per_trial) / trials
            for k in range(cfg.k_max)
        )
        traces.append(mean_trace)
    metadata = {
        "version": f"irsopt-{_version}",
        "master_seed": cfg.seed,
        "config": {
            "system": cfg.to_dict(),
            "convergence": {
                "power_dbs": [float(p) for p in power_dbs],
                "trials": trials,
                "workers": workers,
            },
        },
    }
    return ConvergenceResult(
        power_dbs=tuple(float(p) for p in power_dbs),
        mean_rates=tuple(traces),
        metadata=metadata,
    )


def sweep_rows_as_dicts(result: SweepResult) -> List[dict]:
    return [dataclasses.asdict(r) for r in result.rows]
