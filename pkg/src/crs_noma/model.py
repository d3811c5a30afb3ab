"""System configuration and the derived constants every closed form consumes.

All quantities are linear: mean-square channel gains, transmit SNR
``rho = P_t / sigma^2`` and SNR thresholds.  Conversion from dB happens once,
at the CLI boundary.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

DEFAULT_ANTENNA_CAP = 16


class Combiner(str, Enum):
    SC = "SC"
    MRC = "MRC"

    @classmethod
    def parse(cls, value) -> "Combiner":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown combiner {value!r}; expected SC or MRC") from None


class ConfigError(ValueError):
    """A configuration violates a hard constraint."""


class InfeasibleConfigError(ValueError):
    """``a1 <= eps1 * a2``: symbol s1 can never be decoded, Theta_1 is undefined."""


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(lin):
    return 10.0 * np.log10(np.asarray(lin, dtype=float))


def rate_to_threshold(rate: float) -> float:
    """SNR threshold ``2^{2R} - 1`` for a rate R delivered over two time slots."""
    return 2.0 ** (2.0 * rate) - 1.0


@dataclass(frozen=True)
class SystemConfig:
    """Cooperative relaying link parameters.

    ``a1`` defaults to ``1 - a2``.  The source-destination link being
    stronger than source-relay only triggers a warning; every formula stays
    valid in that case.
    """

    omega_sd: float = 1.0
    omega_sr: float = 10.0
    omega_rd: float = 2.5
    n_r: int = 1
    n_d: int = 1
    a2: float = 0.1
    a1: float | None = None
    r1: float = 1.0
    r2: float = 1.0
    antenna_cap: int = DEFAULT_ANTENNA_CAP

    def __post_init__(self):
        if self.a1 is None:
            object.__setattr__(self, "a1", 1.0 - self.a2)
        for name in ("omega_sd", "omega_sr", "omega_rd"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be a positive finite gain, got {v!r}")
        for name in ("n_r", "n_d"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
            if v > self.antenna_cap:
                raise ConfigError(f"{name}={v} exceeds the antenna cap {self.antenna_cap}")
            object.__setattr__(self, name, int(v))
        if not (0.0 < self.a2 < 1.0 and 0.0 < self.a1 < 1.0):
            raise ConfigError(f"power coefficients must lie in (0, 1), got a1={self.a1}, a2={self.a2}")
        if abs(self.a1 + self.a2 - 1.0) > 1e-12:
            raise ConfigError(f"a1 + a2 must equal 1, got {self.a1 + self.a2!r}")
        if not self.a1 > self.a2:
            raise ConfigError(f"a1 must exceed a2, got a1={self.a1}, a2={self.a2}")
        if not (self.r1 > 0.0 and self.r2 > 0.0):
            raise ConfigError(f"target rates must be positive, got r1={self.r1}, r2={self.r2}")
        if self.omega_sd >= self.omega_sr:
            warnings.warn(
                f"omega_sd={self.omega_sd} >= omega_sr={self.omega_sr}: the direct link is not weaker "
                "than the source-relay link",
                stacklevel=3,
            )

    @property
    def eps1(self) -> float:
        return rate_to_threshold(self.r1)

    @property
    def eps2(self) -> float:
        return rate_to_threshold(self.r2)

    def with_antennas(self, n_r: int, n_d: int) -> "SystemConfig":
        return self.replace(n_r=n_r, n_d=n_d)

    def replace(self, **changes) -> "SystemConfig":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        if "a2" in changes and "a1" not in changes:
            values["a1"] = None
        values.update(changes)
        return SystemConfig(**values)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def reference_config(n_r: int = 1, n_d: int = 1) -> SystemConfig:
    """Reference link: Omega_sd=1, Omega_sr=10, Omega_rd=2.5, a2=0.1, R1=R2=1."""
    return SystemConfig(omega_sd=1.0, omega_sr=10.0, omega_rd=2.5, n_r=n_r, n_d=n_d, a2=0.1, r1=1.0, r2=1.0)


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    margin: float  # a1 - eps1 * a2
    message: str


def validate_noma_feasibility(cfg: SystemConfig) -> FeasibilityReport:
    """Check ``a1 > eps1 * a2``; the boundary itself is infeasible."""
    margin = cfg.a1 - cfg.eps1 * cfg.a2
    if margin > 0.0:
        return FeasibilityReport(True, margin, f"feasible: a1={cfg.a1:g} > eps1*a2={cfg.eps1 * cfg.a2:g}")
    return FeasibilityReport(
        False,
        margin,
        f"infeasible: a1={cfg.a1:g} <= eps1*a2={cfg.eps1 * cfg.a2:g}; "
        "symbol s1 is in outage with probability 1 at every SNR and Theta_1 is undefined",
    )


@dataclass(frozen=True)
class DerivedConstants:
    """Thresholds at one transmit SNR plus the SNR-independent exponents."""

    cfg: SystemConfig
    rho: float
    eps1: float = field(init=False)
    eps2: float = field(init=False)
    phi: float = field(init=False)
    xi: float = field(init=False)

    def __post_init__(self):
        if not self.rho > 0.0:
            raise ValueError(f"rho must be positive, got {self.rho!r}")
        c = self.cfg
        object.__setattr__(self, "eps1", c.eps1)
        object.__setattr__(self, "eps2", c.eps2)
        object.__setattr__(self, "phi", 1.0 / c.omega_sr + 1.0 / c.omega_sd)
        object.__setattr__(self, "xi", 1.0 / (c.omega_sr * c.a2) + 1.0 / c.omega_rd)

    @property
    def feasible(self) -> bool:
        return self.cfg.a1 > self.eps1 * self.cfg.a2

    @property
    def theta1(self) -> float:
        denom = self.cfg.a1 - self.eps1 * self.cfg.a2
        if not denom > 0.0:
            raise InfeasibleConfigError(
                f"Theta_1 undefined: a1={self.cfg.a1} <= eps1*a2={self.eps1 * self.cfg.a2}"
            )
        return self.eps1 / (self.rho * denom)

    @property
    def theta2(self) -> float:
        return self.eps2 / (self.cfg.a2 * self.rho)

    @property
    def theta(self) -> float:
        return max(self.theta1, self.theta2)

    @property
    def rd_threshold(self) -> float:
        """Relay-destination gain threshold ``eps2 / rho``."""
        return self.eps2 / self.rho

    def chi(self, k: int, j: int) -> float:
        return k / self.cfg.omega_sr + j / self.cfg.omega_sd

    def theta_kj(self, k: int, j: int) -> float:
        return k / (self.cfg.omega_sr * self.cfg.a2) + j / self.cfg.omega_rd


def derive_constants(cfg: SystemConfig, rho: float) -> DerivedConstants:
    return DerivedConstants(cfg, float(rho))


class SnrGrid(Sequence):
    """Strictly increasing, positive transmit-SNR points (linear) with dB labels."""

    def __init__(self, points: Iterable[float]):
        pts = np.asarray(list(points), dtype=float)
        if pts.size == 0:
            raise ValueError("SNR grid is empty")
        if np.any(~np.isfinite(pts)) or np.any(pts <= 0.0):
            raise ValueError("SNR grid points must be positive and finite")
        if np.any(np.diff(pts) <= 0.0):
            raise ValueError("SNR grid must be strictly increasing")
        self.points = pts
        self.db = linear_to_db(pts)

    @classmethod
    def from_db(cls, db_values: Iterable[float]) -> "SnrGrid":
        db = np.asarray(list(db_values), dtype=float)
        grid = cls(db_to_linear(db))
        grid.db = db
        return grid

    @classmethod
    def from_range_db(cls, start: float, stop: float, step: float) -> "SnrGrid":
        """Inclusive ``start:stop:step`` range in dB."""
        if not step > 0:
            raise ValueError(f"SNR step must be positive, got {step}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count <= 0:
            raise ValueError(f"SNR range {start}:{stop}:{step} is empty")
        return cls.from_db(start + step * np.arange(count))

    def __len__(self):
        return self.points.size

    def __getitem__(self, i):
        return self.points[i]
