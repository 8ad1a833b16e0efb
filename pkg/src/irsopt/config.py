"""System configuration shared by the channel model, solver, and harness."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional


class ConfigError(ValueError):
    """Raised when a configuration dictionary or field is invalid."""


_LINKS = ("h1", "h2", "hm")


@dataclass(frozen=True)
class SystemConfig:
    """All scalar system and algorithm parameters.

    Antenna counts: mt transmit, mr receive, mi reflecting elements, ms data
    streams.  Power quantities are in dB relative to the linear unit in which
    the noise power is expressed; conversion to linear happens exactly once,
    inside the ``power``/``rician_factor`` accessors.

    Link-budget defaults keep the per-link gain at 1 (reference gain 0 dB at
    the reference distance), so ``power_db`` acts as transmit power over noise
    on unit-gain channels.  Absolute-scale studies set ``pathloss_ref_db``,
    ``link_distance``, and ``pathloss_exponent`` explicitly.
    """

    mt: int = 16                      # transmit antennas
    mr: int = 4                       # receive antennas
    mi: int = 100                     # reflecting elements
    ms: int = 4                       # data streams, ms <= min(mt, mr)
    power_db: float = 10.0            # transmit power, dB over noise unit
    noise_power: float = 1.0          # linear noise power
    rho: float = 1.0                  # quadratic-penalty weight
    tau: float = 0.001                # phase-update step control
    k_max: int = 100                  # outer iteration cap
    seed: int = 0                     # PRNG seed, non-negative
    rician_factor_db: float = 10.0    # LoS-to-scatter power ratio, dB (-inf allowed)
    pathloss_ref_db: float = 0.0      # link gain at the reference distance, dB
    pathloss_exponent: float = 2.0
    ref_distance: float = 1.0         # m
    link_distance: float = 1.0        # m, identical for all three links
    element_spacing: float = 0.5      # array spacing in carrier wavelengths
    csi_delta: float = 0.0            # channel-knowledge error scale, 0 = perfect
    convergence_tol: float = 0.01     # rate-flatness threshold, bits/s/Hz
    early_stop: bool = False          # stop at first flat iteration instead of k_max
    validate_iterates: bool = True    # per-iteration internal-consistency checks
    fixed_angles: Optional[dict] = None  # {"h1"|"h2"|"hm": (departure, arrival)} radians

    def __post_init__(self) -> None:
        if self.fixed_angles is not None:
            norm = {k: (float(v[0]), float(v[1])) for k, v in self.fixed_angles.items()}
            object.__setattr__(self, "fixed_angles", norm)

    @property
    def power(self) -> float:
        """Linear transmit power."""
        return 10.0 ** (self.power_db / 10.0)

    @property
    def rician_factor(self) -> float:
        """Linear LoS-to-scatter ratio; -inf dB maps to exactly 0."""
        return 10.0 ** (self.rician_factor_db / 10.0)

    @property
    def snr_per_stream(self) -> float:
        """Coefficient P / (noise * ms) multiplying the channel Gram matrix."""
        return self.power / (self.noise_power * self.ms)

    def validate(self) -> "SystemConfig":
        for name in ("mt", "mr", "mi", "ms", "k_max"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if self.ms > min(self.mt, self.mr):
            raise ConfigError(
                f"ms={self.ms} exceeds min(mt, mr)={min(self.mt, self.mr)}"
            )
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        for name in ("noise_power", "rho", "tau", "ref_distance", "link_distance",
                     "element_spacing"):
            v = getattr(self, name)
            if not v > 0:
                raise ConfigError(f"{name} must be positive, got {v!r}")
        if self.csi_delta < 0:
            raise ConfigError(f"csi_delta must be non-negative, got {self.csi_delta!r}")
        if self.pathloss_exponent < 0:
            raise ConfigError(
                f"pathloss_exponent must be non-negative, got {self.pathloss_exponent!r}"
            )
        if not self.convergence_tol > 0:
            raise ConfigError(
                f"convergence_tol must be positive, got {self.convergence_tol!r}"
            )
        if self.fixed_angles is not None:
            bad = set(self.fixed_angles) - set(_LINKS)
            if bad:
                raise ConfigError(f"fixed_angles has unknown link keys {sorted(bad)}")
        return self

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if d["fixed_angles"] is not None:
            d["fixed_angles"] = {k: list(v) for k, v in d["fixed_angles"].items()}
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SystemConfig":
        if not isinstance(data, dict):
            raise ConfigError(f"system config must be a mapping, got {type(data).__name__}")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown system config keys: {sorted(unknown)}")
        try:
            cfg = cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        return cfg.validate()
