"""Rician fading model for the direct, surface-incident, and reflected links."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import SystemConfig


@dataclass(frozen=True)
class UlaGeometry:
    """Uniform linear array described by element count and spacing.

    spacing is measured in carrier wavelengths; wavelength enters the array
    response only through the product spacing * wavelength * (2 pi / wavelength),
    so it cancels and is kept for completeness.
    """

    n_elements: int
    spacing: float = 0.5
    wavelength: float = 1.0

    def __post_init__(self) -> None:
        if self.n_elements < 1:
            raise ValueError(f"n_elements must be >= 1, got {self.n_elements}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")


@dataclass(frozen=True)
class RicianParams:
    """Scalar fading and link-budget parameters for one link."""

    rician_factor_db: float = 10.0   # -inf means pure scatter
    pathloss_ref_db: float = 0.0     # gain at ref_distance, dB
    pathloss_exponent: float = 2.0
    ref_distance: float = 1.0
    link_distance: float = 1.0
    aod: float = 0.0                 # departure angle, radians
    aoa: float = 0.0                 # arrival angle, radians

    @property
    def rician_factor(self) -> float:
        return 10.0 ** (self.rician_factor_db / 10.0)


@dataclass(frozen=True)
class ChannelSet:
    """One realization of the three links.

    h1: receiver <- surface   (mr x mi)
    h2: receiver <- transmitter, direct   (mr x mt)
    hm: surface  <- transmitter   (mi x mt)
    """

    h1: np.ndarray
    h2: np.ndarray
    hm: np.ndarray

    def __post_init__(self) -> None:
        if self.h1.ndim != 2 or self.h2.ndim != 2 or self.hm.ndim != 2:
            raise ValueError("channel matrices must be 2-D")
        if self.h1.shape[0] != self.h2.shape[0]:
            raise ValueError(
                f"receive dims disagree: h1 {self.h1.shape}, h2 {self.h2.shape}"
            )
        if self.h1.shape[1] != self.hm.shape[0]:
            raise ValueError(
                f"surface dims disagree: h1 {self.h1.shape}, hm {self.hm.shape}"
            )
        if self.h2.shape[1] != self.hm.shape[1]:
            raise ValueError(
                f"transmit dims disagree: h2 {self.h2.shape}, hm {self.hm.shape}"
            )
        for name in ("h1", "h2", "hm"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} contains non-finite entries")

    @property
    def mr(self) -> int:
        return self.h1.shape[0]

    @property
    def mi(self) -> int:
        return self.h1.shape[1]

    @property
    def mt(self) -> int:
        return self.h2.shape[1]


def steering_vector(geom: UlaGeometry, angle: float) -> np.ndarray:
    """Unit-norm array response of a ULA toward the given angle.

    Entry k is exp(j * 2 pi * spacing * k * sin(angle)) / sqrt(N); the 2 pi /
    wavelength propagation constant and the metric element distance
    spacing * wavelength combine into 2 pi * spacing.
    """
    idx = np.arange(geom.n_elements)
    phase = 2.0 * np.pi * geom.spacing * np.sin(angle)
    return np.exp(1j * phase * idx) / np.sqrt(geom.n_elements)


def path_loss(params: RicianParams) -> float:
    """Distance-power-law link gain: ref_gain * (d / d0) ** (-exponent)."""
    if not params.link_distance > 0:
        raise ValueError(f"link_distance must be positive, got {params.link_distance}")
    if not params.ref_distance > 0:
        raise ValueError(f"ref_distance must be positive, got {params.ref_distance}")
    ref_gain = 10.0 ** (params.pathloss_ref_db / 10.0)
    return float(ref_gain * (params.link_distance / params.ref_distance)
                 ** (-params.pathloss_exponent))


def rician_channel(rows: int, cols: int, params: RicianParams,
                   tx_geom: UlaGeometry, rx_geom: UlaGeometry,
                   rng: np.random.Generator) -> np.ndarray:
    """Draw one rows x cols Rician channel matrix.

    The deterministic part is the outer product of element-wise unit-amplitude
    array responses (sqrt(rows * cols) times the unit-norm responses), so the
    deterministic and scattered parts carry equal per-entry power and their
    mixture keeps per-entry power at the link gain for every factor split.
    Scattered entries are complex Gaussian with unit variance (1/2 per real
    component).
    """
    if rx_geom.n_elements != rows:
        raise ValueError(f"rx_geom has {rx_geom.n_elements} elements, need {rows}")
    if tx_geom.n_elements != cols:
        raise ValueError(f"tx_geom has {tx_geom.n_elements} elements, need {cols}")
    gamma = params.rician_factor
    if np.isinf(gamma):
        w_los, w_sc = 1.0, 0.0
    else:
        w_los = np.sqrt(gamma / (1.0 + gamma))
        w_sc = np.sqrt(1.0 / (1.0 + gamma))
    a_r = steering_vector(rx_geom, params.aoa)
    a_t = steering_vector(tx_geom, params.aod)
    los = np.sqrt(rows * cols) * np.outer(a_r, a_t.conj())
    w = (rng.standard_normal((rows, cols))
         + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)
    return np.sqrt(path_loss(params)) * (w_los * los + w_sc * w)


def _link_params(cfg: SystemConfig, aod: float, aoa: float) -> RicianParams:
    return RicianParams(
        rician_factor_db=cfg.rician_factor_db,
        pathloss_ref_db=cfg.pathloss_ref_db,
        pathloss_exponent=cfg.pathloss_exponent,
        ref_distance=cfg.ref_distance,
        link_distance=cfg.link_distance,
        aod=aod,
        aoa=aoa,
    )


def generate_channel_set(cfg: SystemConfig, rng: np.random.Generator) -> ChannelSet:
    """Draw the three links for one realization.

    Per link, departure and arrival angles come uniformly from [0, 2 pi)
    unless pinned through cfg.fixed_angles; the three links share the scalar
    fading parameters and are drawn in the fixed order h1, h2, hm (angles
    immediately before the matrix) so a given rng state maps to one set.
    """
    rx = UlaGeometry(cfg.mr, cfg.element_spacing)
    tx = UlaGeometry(cfg.mt, cfg.element_spacing)
    surf = UlaGeometry(cfg.mi, cfg.element_spacing)

    def draw(link: str, rows: int, cols: int,
             rxg: UlaGeometry, txg: UlaGeometry) -> np.ndarray:
        if cfg.fixed_angles is not None and link in cfg.fixed_angles:
            aod, aoa = cfg.fixed_angles[link]
        else:
            aod, aoa = rng.uniform(0.0, 2.0 * np.pi, size=2)
        return rician_channel(rows, cols, _link_params(cfg, aod, aoa), txg, rxg, rng)

    h1 = draw("h1", cfg.mr, cfg.mi, rx, surf)
    h2 = draw("h2", cfg.mr, cfg.mt, rx, tx)
    hm = draw("hm", cfg.mi, cfg.mt, surf, tx)
    return ChannelSet(h1=h1, h2=h2, hm=hm)


def perturb_channel(h: np.ndarray, delta: float, mt: int, mr: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Add estimation error with total energy delta * ||h||_F^2 / sqrt(mt * mr).

    The error budget is spread evenly over entries as i.i.d. complex Gaussian;
    (mt, mr) are the dimensions entering the normalization, by convention the
    matrix's own. delta = 0 returns the input unchanged (copy).
    """
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    if delta == 0:
        return h.copy()
    total = delta * float(np.linalg.norm(h) ** 2) / np.sqrt(mt * mr)
    per_entry = total / h.size
    err = (rng.standard_normal(h.shape)
           + 1j * rng.standard_normal(h.shape)) / np.sqrt(2.0)
    return h + np.sqrt(per_entry) * err


def perturb_channel_set(ch: ChannelSet, delta: float,
                        rng: np.random.Generator) -> ChannelSet:
    """Perturb all three links, each normalized by its own dimensions."""
    if delta == 0:
        return ChannelSet(h1=ch.h1.copy(), h2=ch.h2.copy(), hm=ch.hm.copy())
    h1 = perturb_channel(ch.h1, delta, ch.h1.shape[1], ch.h1.shape[0], rng)
    h2 = perturb_channel(ch.h2, delta, ch.h2.shape[1], ch.h2.shape[0], rng)
    hm = perturb_channel(ch.hm, delta, ch.hm.shape[1], ch.hm.shape[0], rng)
    return ChannelSet(h1=h1, h2=h2, hm=hm)
