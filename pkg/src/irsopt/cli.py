"""Command-line client for the optimizer service.

By default requests are served in process (no daemon needed); --server sends
them to a running instance instead.  Result tables are CSV, metadata is JSON,
and every file is written atomically.  Exit codes: 0 success, 1 invalid
configuration or server-reported failure, 2 command-line usage error.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from dataclasses import dataclass
from typing import List, Optional

from .config import ConfigError, SystemConfig
from . import __version__
from .output import (
    atomic_write_text,
    complexity_csv_text,
    convergence_csv_text,
    json_text,
    solve_trace_csv_text,
    sweep_csv_text,
)

OUTPUT_DIR_ENV = "IRSOPT_OUT_DIR"

_SWEEP_KEYS = {"param", "values", "trials", "methods", "workers", "measure_time"}
_CONV_KEYS = {"power_dbs", "trials", "workers"}
_COMPLEXITY_KEYS = {"mt", "mr", "mi", "ms", "iterations", "inner_ladmm",
                    "inner_spgm", "inner_ao", "realizations_ao"}
_TOP_KEYS = {"system", "sweep", "convergence", "complexity", "output_dir"}


@dataclass
class CliConfig:
    """Fully resolved configuration for one invocation."""

    system: SystemConfig
    sweep: dict
    convergence: dict
    complexity: dict
    output_dir: Optional[str] = None


def parse_config_dict(data: dict) -> CliConfig:
    """Strict parse of the config-file structure; unknown keys are errors."""
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a mapping, got {type(data).__name__}")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    system = SystemConfig.from_dict(data.get("system", {}))
    sections = {}
    for name, allowed in (("sweep", _SWEEP_KEYS), ("convergence", _CONV_KEYS),
                          ("complexity", _COMPLEXITY_KEYS)):
        section = data.get(name, {})
        if not isinstance(section, dict):
            raise ConfigError(f"{name} section must be a mapping")
        bad = set(section) - allowed
        if bad:
            raise ConfigError(f"unknown {name} keys: {sorted(bad)}")
        sections[name] = dict(section)
    output_dir = data.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigError("output_dir must be a string")
    return CliConfig(system=system, sweep=sections["sweep"],
                     convergence=sections["convergence"],
                     complexity=sections["complexity"], output_dir=output_dir)


def load_config_file(path: str) -> CliConfig:
    import json

    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return parse_config_dict(data)


def parse_value_list(text: str) -> List[float]:
    """Comma list '0,10,20' or inclusive range 'start:step:stop'."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range syntax is start:step:stop, got {text!r}")
        try:
            start, step, stop = (float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"bad range {text!r}: {exc}") from exc
        if step == 0:
            raise ConfigError("range step must be non-zero")
        if (stop - start) * step < 0:
            raise ConfigError(f"range {text!r} never reaches its stop value")
        count = int((stop - start) / step + 1e-9) + 1
        return [start + k * step for k in range(count)]
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad value list {text!r}: {exc}") from exc


def _system_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("system overrides")
    g.add_argument("--mt", type=int)
    g.add_argument("--mr", type=int)
    g.add_argument("--mi", type=int)
    g.add_argument("--ms", type=int)
    g.add_argument("--power-db", type=float, dest="power_db")
    g.add_argument("--noise-power", type=float, dest="noise_power")
    g.add_argument("--rho", type=float)
    g.add_argument("--tau", type=float)
    g.add_argument("--k-max", type=int, dest="k_max")
    g.add_argument("--seed", type=int)
    g.add_argument("--rician-factor-db", type=float, dest="rician_factor_db")
    g.add_argument("--pathloss-ref-db", type=float, dest="pathloss_ref_db")
    g.add_argument("--pathloss-exponent", type=float, dest="pathloss_exponent")
    g.add_argument("--ref-distance", type=float, dest="ref_distance")
    g.add_argument("--link-distance", type=float, dest="link_distance")
    g.add_argument("--element-spacing", type=float, dest="element_spacing")
    g.add_argument("--delta", type=float, dest="csi_delta")
    g.add_argument("--convergence-tol", type=float, dest="convergence_tol")
    g.add_argument("--early-stop", action=argparse.BooleanOptionalAction,
                   default=None, dest="early_stop")
    g.add_argument("--validate-iterates", action=argparse.BooleanOptionalAction,
                   default=None, dest="validate_iterates")


_SYSTEM_FIELDS = tuple(f.name for f in dataclasses.fields(SystemConfig))


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--out", help=f"output directory (default ${OUTPUT_DIR_ENV} or .)")
    parser.add_argument("--server", help="base URL of a running service; "
                                         "default runs in process")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irsopt",
        description="Joint precoder / surface-phase optimization toolkit",
    )
    parser.add_argument("--version", action="version",
                        version=f"irsopt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="one optimization run")
    _common_flags(p_solve)
    _system_flags(p_solve)
    p_solve.add_argument("--measure-time", action=argparse.BooleanOptionalAction,
                         default=None, dest="measure_time")

    p_sweep = sub.add_parser("sweep", help="Monte-Carlo parameter sweep")
    _common_flags(p_sweep)
    _system_flags(p_sweep)
    p_sweep.add_argument("--param",
                         choices=["power_db", "mi", "mt", "ms", "delta",
                                  "iterations"])
    p_sweep.add_argument("--values", help="comma list or start:step:stop")
    p_sweep.add_argument("--trials", type=int)
    p_sweep.add_argument("--methods", help="comma list from "
                                           "admm_apg,random_phase,no_irs")
    p_sweep.add_argument("--workers", type=int)
    p_sweep.add_argument("--measure-time", action=argparse.BooleanOptionalAction,
                         default=None, dest="measure_time")

    p_conv = sub.add_parser("convergence", help="mean per-iteration rate traces")
    _common_flags(p_conv)
    _system_flags(p_conv)
    p_conv.add_argument("--powers", help="comma list or start:step:stop")
    p_conv.add_argument("--trials", type=int)
    p_conv.add_argument("--workers", type=int)

    p_cost = sub.add_parser("complexity", help="complex-multiplication cost table")
    _common_flags(p_cost)
    p_cost.add_argument("--mt", type=int)
    p_cost.add_argument("--mr", type=int)
    p_cost.add_argument("--mi", type=int)
    p_cost.add_argument("--ms", type=int)
    p_cost.add_argument("--iters", type=int, dest="iterations")
    p_cost.add_argument("--inner-ladmm", type=int, dest="inner_ladmm")
    p_cost.add_argument("--inner-spgm", type=int, dest="inner_spgm")
    p_cost.add_argument("--inner-ao", type=int, dest="inner_ao")
    p_cost.add_argument("--realizations-ao", type=int, dest="realizations_ao")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8321)

    return parser


def _resolve(args: argparse.Namespace) -> CliConfig:
    if getattr(args, "config", None):
        cli_cfg = load_config_file(args.config)
    else:
        cli_cfg = CliConfig(system=SystemConfig(), sweep={}, convergence={},
                            complexity={})
    overrides = {
        name: getattr(args, name)
        for name in _SYSTEM_FIELDS
        if getattr(args, name, None) is not None
    }
    if overrides:
        system = dataclasses.replace(cli_cfg.system, **overrides).validate()
        cli_cfg = dataclasses.replace(cli_cfg, system=system)
    if getattr(args, "out", None):
        cli_cfg.output_dir = args.out
    return cli_cfg


def _output_dir(cli_cfg: CliConfig) -> str:
    return cli_cfg.output_dir or os.environ.get(OUTPUT_DIR_ENV) or "."


class _ServiceClient:
    """Posts to a remote server when given, otherwise to the in-process app."""

    def __init__(self, server: Optional[str]):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            from fastapi.testclient import TestClient

            from .service.app import app

            self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> dict:
        resp = self._client.post(path, json=payload)
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise ConfigError(f"{path} failed ({resp.status_code}): {detail}")
        return resp.json()

    def close(self) -> None:
        self._client.close()


def _write(path: str, text: str) -> None:
    atomic_write_text(path, text)
    print(path)


def _cmd_solve(args: argparse.Namespace) -> int:
    cli_cfg = _resolve(args)
    payload = {
        "system": cli_cfg.system.to_dict(),
        "measure_time": bool(getattr(args, "measure_time", None)),
    }
    client = _ServiceClient(args.server)
    try:
        result = client.post("/solve", payload)
    finally:
        client.close()
    out = _output_dir(cli_cfg)
    os.makedirs(out, exist_ok=True)
    _write(os.path.join(out, "solve_trace.csv"),
           solve_trace_csv_text(result["rates"], result["lagrangian"],
                                result["primal_residual"]))
    _write(os.path.join(out, "solve_result.json"), json_text(result))
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    cli_cfg = _resolve(args)
    section = dict(cli_cfg.sweep)
    if args.param:
        section["param"] = args.param
    if args.values:
        section["values"] = parse_value_list(args.values)
    if args.trials is not None:
        section["trials"] = args.trials
    if args.methods:
        section["methods"] = [m.strip() for m in args.methods.split(",") if m.strip()]
    if args.workers is not None:
        section["workers"] = args.workers
    if args.measure_time is not None:
        section["measure_time"] = args.measure_time
    if "param" not in section:
        raise ConfigError("sweep needs --param or a sweep.param config entry")
    if "values" not in section or not section["values"]:
        raise ConfigError("sweep needs --values or a sweep.values config entry")
    payload = {"system": cli_cfg.system.to_dict(), **section}
    client = _ServiceClient(args.server)
    try:
        result = client.post("/sweep", payload)
    finally:
        client.close()
    out = _output_dir(cli_cfg)
    os.makedirs(out, exist_ok=True)
    _write(os.path.join(out, "sweep.csv"), sweep_csv_text(result["rows"]))
    _write(os.path.join(out, "sweep_meta.json"), json_text(result["metadata"]))
    return 0


def _cmd_convergence(args: argparse.Namespace) -> int:
    cli_cfg = _resolve(args)
    section = dict(cli_cfg.convergence)
    if args.powers:
        section["power_dbs"] = parse_value_list(args.powers)
    if args.trials is not None:
        section["trials"] = args.trials
    if args.workers is not None:
        section["workers"] = args.workers
    if "power_dbs" not in section or not section["power_dbs"]:
        raise ConfigError("convergence needs --powers or a convergence.power_dbs entry")
    payload = {"system": cli_cfg.system.to_dict(), **section}
    client = _ServiceClient(args.server)
    try:
        result = client.post("/convergence", payload)
    finally:
        client.close()
    out = _output_dir(cli_cfg)
    os.makedirs(out, exist_ok=True)
    _write(os.path.join(out, "convergence.csv"),
           convergence_csv_text(result["power_dbs"], result["mean_rates"]))
    _write(os.path.join(out, "convergence_meta.json"), json_text(result["metadata"]))
    return 0


def _cmd_complexity(args: argparse.Namespace) -> int:
    # cost queries have their own dimensions; system overrides do not apply
    if getattr(args, "config", None):
        cli_cfg = load_config_file(args.config)
    else:
        cli_cfg = CliConfig(system=SystemConfig(), sweep={}, convergence={},
                            complexity={})
    if getattr(args, "out", None):
        cli_cfg.output_dir = args.out
    section = dict(cli_cfg.complexity)
    for name in _COMPLEXITY_KEYS:
        v = getattr(args, name, None)
        if v is not None:
            section[name] = v
    payload = section
    client = _ServiceClient(args.server)
    try:
        result = client.post("/complexity", payload)
    finally:
        client.close()
    out = _output_dir(cli_cfg)
    os.makedirs(out, exist_ok=True)
    rows = [(r["method"], r["per_iteration"], r["total"]) for r in result["rows"]]
    _write(os.path.join(out, "complexity.csv"), complexity_csv_text(rows))
    _write(os.path.join(out, "complexity_meta.json"), json_text(result["metadata"]))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "sweep": _cmd_sweep,
        "convergence": _cmd_convergence,
        "complexity": _cmd_complexity,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
