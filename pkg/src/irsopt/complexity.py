"""Complex-multiplication cost models for the implemented method and peers.

Counts are evaluated exactly in rational arithmetic (the models carry 1/2 and
3/2 factors) and rounded to the nearest integer only at the end.  Two methods
are per-iteration models scaled by the outer iteration count; the other three
are closed totals with their own inner-loop counts.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional


@dataclass(frozen=True)
class CostQuery:
    """Dimensions and iteration counts a cost model is evaluated at.

    mt, mr, mi, ms are the transmit / receive / surface / stream counts.
    iterations applies to the per-iteration models; the remaining fields are
    method-specific inner-loop or realization counts and are required only by
    the methods that use them.
    """

    mt: int
    mr: int
    mi: int
    ms: int
    iterations: int = 10
    inner_ladmm: Optional[int] = None
    inner_spgm: Optional[int] = None
    inner_ao: Optional[int] = None
    realizations_ao: Optional[int] = None

    def __post_init__(self) -> None:
        for name in ("mt", "mr", "mi", "ms", "iterations"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        for name in ("inner_ladmm", "inner_spgm", "inner_ao", "realizations_ao"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or isinstance(v, bool)
                                  or v < 1):
                raise ValueError(f"{name} must be a positive integer, got {v!r}")

    @property
    def r(self) -> int:
        return min(self.mt, self.mr)


def _as_int(x: Fraction) -> int:
    return round(x)


def _require(value: Optional[int], name: str, method: str) -> int:
    if value is None:
        raise ValueError(f"{method} cost model needs {name}")
    return value


def admm_apg_per_iteration(q: CostQuery) -> int:
    """Cost of one outer pass of the implemented method."""
    mt, mr, mi, ms = q.mt, q.mr, q.mi, q.ms
    total = (
        Fraction(2 * mt * mr * mi)
        + mt * mr * q.r
        + mr * mr * mi
        + mt * mi * ms
        + mr * mi * ms
        + ms * mi
        + Fraction(3, 2) * mr * mr * ms
        + mt * mr * ms
        + Fraction(1, 2) * mr ** 3
    )
    return _as_int(total)


def cc_admm_apg(q: CostQuery) -> int:
    """Total cost: per-iteration model times the outer iteration count."""
    return _as_int(Fraction(admm_apg_per_iteration(q)) * q.iterations)


def cc_ladmm(q: CostQuery) -> int:
    """Linearized variant: one-time terms plus inner_ladmm surface-square terms."""
    il = _require(q.inner_ladmm, "inner_ladmm", "cc_ladmm")
    mt, mr, mi = q.mt, q.mr, q.mi
    total = (
        Fraction(mt * mr * q.r)
        + mi * mi * mt
        + mt * mr * mi
        + il * mi * mi
    )
    return _as_int(total)


def pgm_per_iteration(q: CostQuery) -> int:
    """Cost of one iteration of the projected-gradient peer."""
    mt, mr, mi = q.mt, q.mr, q.mi
    total = (
        Fraction(2 * mt * mr * mi)
        + 2 * mt * mt * mr
        + mr * mi
        + mt * mi
        + Fraction(3, 2) * mt ** 3
        + Fraction(3, 2) * mr * mr * mt
        + 3 * mi
        + mr ** 3
    )
    return _as_int(total)


def cc_pgm(q: CostQuery) -> int:
    """Total cost of the projected-gradient peer."""
    return _as_int(Fraction(pgm_per_iteration(q)) * q.iterations)


def cc_spgm(q: CostQuery) -> int:
    """Stochastic projected-gradient peer: closed total with inner_spgm cubes."""
    isp = _require(q.inner_spgm, "inner_spgm", "cc_spgm")
    mt, mr, mi = q.mt, q.mr, q.mi
    total = (
        Fraction(mt * mr * q.r)
        + mi * mi * mt
        + mt * mr * mi
        + isp * mi ** 3
    )
    return _as_int(total)


def cc_ao(q: CostQuery) -> int:
    """Alternating-optimization peer over realizations_ao candidate phases."""
    iao = _require(q.inner_ao, "inner_ao", "cc_ao")
    lao = _require(q.realizations_ao, "realizations_ao", "cc_ao")
    mt, mr, mi, r = q.mt, q.mr, q.mi, q.r
    inner = (
        Fraction(mt ** 3)
        + mt * mt * mi
        + 2 * mt * mr * mi
        + (2 * mt * mr * mr + 2 * mr ** 3) * mi
        + r ** 3
        + Fraction(1, 2) * mt * mt * r
    )
    total = (
        Fraction((lao + 1) * mt * mr * mi)
        + lao * (Fraction(r ** 3) + Fraction(1, 2) * mt * mt * r)
        + iao * inner
    )
    return _as_int(total)


_DEFAULT_EXTRAS = {
    "inner_ladmm": 20,
    "inner_spgm": 20,
    "inner_ao": 10,
    "realizations_ao": 100,
}


def cost_table(q: CostQuery) -> list:
    """Rows (method, per_iteration or None, total) for all five models."""
    return [
        ("admm_apg", admm_apg_per_iteration(q), cc_admm_apg(q)),
        ("ladmm", None, cc_ladmm(q)),
        ("ao", None, cc_ao(q)),
        ("pgm", pgm_per_iteration(q), cc_pgm(q)),
        ("spgm", None, cc_spgm(q)),
    ]
