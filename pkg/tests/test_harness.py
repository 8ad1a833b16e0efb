import dataclasses
import json
import os

import numpy as np
import pytest

from irsopt.config import ConfigError, SystemConfig
from irsopt.harness import (
    METHODS,
    ConvergenceResult,
    SweepSpec,
    run_convergence,
    run_sweep,
    single_run,
    sweep_rows_as_dicts,
)
from irsopt.output import (
    atomic_write_text,
    convergence_csv_text,
    json_text,
    sweep_csv_text,
)

SMALL = SystemConfig(mt=6, mr=3, mi=12, ms=3, k_max=15, seed=123)


def test_spec_validation():
    SweepSpec(param="power_db", values=[0.0], trials=1, base=SMALL).validate()
    with pytest.raises(ConfigError):
        SweepSpec(param="bogus", values=[0.0], trials=1, base=SMALL).validate()
    with pytest.raises(ConfigError):
        SweepSpec(param="power_db", values=[], trials=1, base=SMALL).validate()
    with pytest.raises(ConfigError):
        SweepSpec(param="power_db", values=[0.0], trials=0, base=SMALL).validate()
    with pytest.raises(ConfigError):
        SweepSpec(param="power_db", values=[0.0], trials=1, base=SMALL,
                  methods=("nope",)).validate()
    with pytest.raises(ConfigError):
        SweepSpec(param="mi", values=[2.5], trials=1, base=SMALL).validate()
    with pytest.raises(ConfigError):
        # swept value must leave the config valid
        SweepSpec(param="ms", values=[5], trials=1, base=SMALL).validate()


def test_sweep_row_layout_and_methods():
    spec = SweepSpec(param="power_db", values=[0.0, 10.0], trials=2, base=SMALL)
    result = run_sweep(spec)
    assert len(result.rows) == 2 * len(METHODS)
    assert [r.value for r in result.rows[:3]] == [0.0, 0.0, 0.0]
    assert [r.method for r in result.rows[:3]] == list(METHODS)
    for row in result.rows:
        assert row.mean_rate_bps_hz > 0
        assert row.stderr >= 0
        assert row.mean_wall_ms == 0.0      # timing off by default


def test_sweep_bitwise_reproducible():
    spec = SweepSpec(param="power_db", values=[5.0], trials=3, base=SMALL)
    a, b = run_sweep(spec), run_sweep(spec)
    assert a.rows == b.rows
    assert a.metadata == b.metadata


def test_sweep_parallel_matches_sequential():
    seq = SweepSpec(param="power_db", values=[5.0, 10.0], trials=4, base=SMALL)
    par = dataclasses.replace(seq, workers=2)
    a, b = run_sweep(seq), run_sweep(par)
    assert a.rows == b.rows


def test_sweep_different_master_seed_changes_results():
    a = run_sweep(SweepSpec(param="power_db", values=[5.0], trials=2, base=SMALL))
    other = dataclasses.replace(SMALL, seed=124)
    b = run_sweep(SweepSpec(param="power_db", values=[5.0], trials=2, base=other))
    assert a.rows[0].mean_rate_bps_hz != b.rows[0].mean_rate_bps_hz


def test_single_run_matches_one_trial_sweep():
    res, rate = single_run(SMALL)
    spec = SweepSpec(param="iterations", values=[SMALL.k_max], trials=1,
                     base=SMALL, methods=("admm_apg",))
    row = run_sweep(spec).rows[0]
    assert row.mean_rate_bps_hz == rate
    assert row.stderr == 0.0
    expected_conv = res.converged_at if res.converged_at is not None else SMALL.k_max
    assert row.mean_converged_iter == float(expected_conv)


def test_single_run_with_csi_error_evaluates_on_true_channels():
    noisy = dataclasses.replace(SMALL, csi_delta=0.4)
    res, rate = single_run(noisy)
    # the reported rate comes from the true channels, the solver state from
    # the perturbed ones, so they differ
    assert rate != res.final_rate
    exact_res, exact_rate = single_run(SMALL)
    assert exact_rate == exact_res.final_rate


def test_csi_error_reduces_mean_rate():
    spec = SweepSpec(param="delta", values=[0.0, 0.9], trials=8, base=SMALL,
                     methods=("admm_apg",))
    rows = run_sweep(spec).rows
    assert rows[0].mean_rate_bps_hz > rows[1].mean_rate_bps_hz


def test_mi_sweep_monotone_mean():
    spec = SweepSpec(param="mi", values=[4, 16], trials=8, base=SMALL,
                     methods=("admm_apg",))
    rows = run_sweep(spec).rows
    assert rows[1].mean_rate_bps_hz > rows[0].mean_rate_bps_hz


def test_metadata_config_round_trips():
    spec = SweepSpec(param="power_db", values=[5.0], trials=1, base=SMALL)
    meta = run_sweep(spec).metadata
    assert meta["master_seed"] == SMALL.seed
    assert meta["version"].startswith("irsopt-")
    again = SystemConfig.from_dict(meta["config"]["system"])
    assert again == SMALL
    assert meta["config"]["sweep"]["param"] == "power_db"


def test_convergence_result_shape():
    result = run_convergence(SMALL, power_dbs=[0.0, 10.0], trials=3)
    assert isinstance(result, ConvergenceResult)
    assert result.power_dbs == (0.0, 10.0)
    assert len(result.mean_rates) == 2
    assert all(len(tr) == SMALL.k_max for tr in result.mean_rates)
    # traces are full length even when the base config stops early
    stopper = dataclasses.replace(SMALL, early_stop=True)
    full = run_convergence(stopper, power_dbs=[10.0], trials=2)
    assert len(full.mean_rates[0]) == SMALL.k_max


def test_convergence_parallel_matches_sequential():
    a = run_convergence(SMALL, power_dbs=[10.0], trials=4)
    b = run_convergence(SMALL, power_dbs=[10.0], trials=4, workers=2)
    assert a.mean_rates == b.mean_rates


def test_convergence_rejects_empty_inputs():
    with pytest.raises(ConfigError):
        run_convergence(SMALL, power_dbs=[], trials=2)
    with pytest.raises(ConfigError):
        run_convergence(SMALL, power_dbs=[10.0], trials=0)


def test_sweep_csv_deterministic_text(tmp_path):
    spec = SweepSpec(param="power_db", values=[5.0], trials=2, base=SMALL)
    result = run_sweep(spec)
    rows = sweep_rows_as_dicts(result)
    text_a = sweep_csv_text(rows)
    text_b = sweep_csv_text(sweep_rows_as_dicts(run_sweep(spec)))
    assert text_a == text_b
    lines = text_a.splitlines()
    assert lines[0] == "value,method,mean_rate_bps_hz,stderr,mean_converged_iter,mean_wall_ms"
    assert len(lines) == 1 + len(result.rows)
    # floats survive the textual round trip exactly
    first = lines[1].split(",")
    assert float(first[2]) == result.rows[0].mean_rate_bps_hz


def test_convergence_csv_long_format():
    text = convergence_csv_text([0.0], [[1.5, 2.5]])
    assert text == ("power_db,iteration,mean_rate_bps_hz\n"
                    "0.0,1,1.5\n0.0,2,2.5\n")


def test_json_text_stable_and_parseable():
    payload = {"b": 1, "a": [1.5, None]}
    text = json_text(payload)
    assert text == json_text({"a": [1.5, None], "b": 1})
    assert text.endswith("\n")
    assert json.loads(text) == payload


def test_atomic_write(tmp_path):
    target = tmp_path / "out.csv"
    atomic_write_text(str(target), "hello\n")
    assert target.read_text() == "hello\n"
    atomic_write_text(str(target), "replaced\n")
    assert target.read_text() == "replaced\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]
