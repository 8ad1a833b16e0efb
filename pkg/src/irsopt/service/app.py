"""FastAPI application exposing solve, sweep, convergence, and complexity."""
from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..complexity import CostQuery, cost_table
from ..config import ConfigError
from ..harness import SweepSpec, run_convergence, run_sweep, single_run, sweep_rows_as_dicts
from .schemas import (
    ComplexityRequest,
    ComplexityResponse,
    ComplexMatrixModel,
    ComplexVectorModel,
    ConvergenceRequest,
    ConvergenceResponse,
    HealthResponse,
    SolveRequest,
    SolveResponse,
    SweepRequest,
    SweepResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(title="irsopt", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/solve", response_model=SolveResponse)
    def solve_endpoint(req: SolveRequest) -> SolveResponse:
        cfg = req.system.to_config()
        res, evaluated = single_run(cfg)
        return SolveResponse(
            rates=[float(r) for r in res.rates],
            lagrangian=[float(v) for v in res.lagrangian],
            primal_residual=[float(v) for v in res.primal_residual],
            converged_at=res.converged_at,
            final_rate=res.final_rate,
            evaluated_rate=evaluated,
            theta=ComplexVectorModel(
                real=res.theta.real.tolist(),
                imag=res.theta.imag.tolist(),
            ),
            precoder=ComplexMatrixModel(
                real=res.precoder.real.tolist(),
                imag=res.precoder.imag.tolist(),
            ),
            wall_time_s=res.wall_time_s if req.measure_time else 0.0,
            cm_count=res.cm_count,
            metadata={
                "version": f"irsopt-{__version__}",
                "master_seed": cfg.seed,
                "config": {"system": cfg.to_dict()},
            },
        )

    @app.post("/sweep", response_model=SweepResponse)
    def sweep_endpoint(req: SweepRequest) -> SweepResponse:
        try:
            spec = SweepSpec(
                param=req.param,
                values=tuple(req.values),
                trials=req.trials,
                base=req.system.to_config(),
                methods=tuple(req.methods),
                workers=req.workers,
                measure_time=req.measure_time,
            ).validate()
        except ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        result = run_sweep(spec)
        return SweepResponse(rows=sweep_rows_as_dicts(result),
                             metadata=result.metadata)

    @app.post("/convergence", response_model=ConvergenceResponse)
    def convergence_endpoint(req: ConvergenceRequest) -> ConvergenceResponse:
        try:
            result = run_convergence(req.system.to_config(), req.power_dbs,
                                     req.trials, workers=req.workers)
        except ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return ConvergenceResponse(
            power_dbs=list(result.power_dbs),
            mean_rates=[list(t) for t in result.mean_rates],
            metadata=result.metadata,
        )

    @app.post("/complexity", response_model=ComplexityResponse)
    def complexity_endpoint(req: ComplexityRequest) -> ComplexityResponse:
        try:
            query = CostQuery(
                mt=req.mt, mr=req.mr, mi=req.mi, ms=req.ms,
                iterations=req.iterations,
                inner_ladmm=req.inner_ladmm,
                inner_spgm=req.inner_spgm,
                inner_ao=req.inner_ao,
                realizations_ao=req.realizations_ao,
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        rows = [
            {"method": m, "per_iteration": pi, "total": tot}
            for (m, pi, tot) in cost_table(query)
        ]
        return ComplexityResponse(
            rows=rows,
            metadata={
                "version": f"irsopt-{__version__}",
                "config": {"complexity": req.model_dump()},
            },
        )

    return app


app = create_app()
