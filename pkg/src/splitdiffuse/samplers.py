"""Seeded synthetic 2-D point clouds for benchmarking.

Random bits come from PCG64 (PCG XSL-RR 128/64, O'Neill 2014) seeded through
``numpy.random.SeedSequence``. Each raw 64-bit output is turned into an open
unit-interval double as ``((bits >> 11) + 0.5) * 2**-53``. Normal variates
use the basic Box-Muller transform on consecutive uniform pairs. Nothing
here relies on numpy's distribution methods, so streams are fixed by the
seed alone.

Trial ``t`` of a benchmark with master seed ``s`` draws from
``SeedSequence(s, spawn_key=(t,))``, the same stream
``SeedSequence(s).spawn(...)[t]`` would give.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PointCloud, ValidationError

_INV_2_53 = 2.0 ** -53


def stream(seed: int, trial: int | None = None) -> np.random.PCG64:
    if trial is None:
        return np.random.PCG64(np.random.SeedSequence(seed))
    return np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,)))


def open_uniforms(bitgen: np.random.PCG64, size: int) -> np.ndarray:
    """``size`` doubles strictly inside (0, 1)."""
    raw = bitgen.random_raw(size)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53


def box_muller(bitgen: np.random.PCG64, n: int) -> np.ndarray:
    """(n, 2) standard normals; row i uses uniforms 2i (radius) and 2i+1 (angle)."""
    u = open_uniforms(bitgen, 2 * n).reshape(n, 2)
    r = np.sqrt(-2.0 * np.log(u[:, 0]))
    t = 2.0 * math.pi * u[:, 1]
    return np.column_stack([r * np.cos(t), r * np.sin(t)])


def uniform_coords(bitgen, n: int, rho: float) -> np.ndarray:
    u = open_uniforms(bitgen, 2 * n).reshape(n, 2) - 0.5
    u[:, 0] *= rho
    return u


def gaussian_coords(bitgen, n: int, theta: float, phi: float) -> np.ndarray:
    # row vector [X Y] times diag(phi, 1) times [[cos, sin], [-sin, cos]]
    z = box_muller(bitgen, n)
    z[:, 0] *= phi
    c, s = math.cos(theta), math.sin(theta)
    return z @ np.array([[c, s], [-s, c]])


@dataclass(frozen=True)
class SamplerSpec:
    """``uniform`` takes ``rho``; ``gaussian`` takes ``theta`` (radians) and ``phi``."""

    family: str
    rho: float = 1.0
    theta: float = 0.0
    phi: float = 1.0

    def __post_init__(self):
        if self.family not in ("uniform", "gaussian"):
            raise ValidationError(f"unknown sampler family {self.family!r}")
        if self.family == "uniform" and not self.rho > 0:
            raise ValidationError(f"rho must be positive, got {self.rho}")
        if self.family == "gaussian" and not self.phi > 0:
            raise ValidationError(f"phi must be positive, got {self.phi}")
        if not all(math.isfinite(v) for v in (self.rho, self.theta, self.phi)):
            raise ValidationError("sampler parameters must be finite")

    @classmethod
    def parse(cls, text: str) -> "SamplerSpec":
        """Parse ``uniform:rho=1`` or ``gaussian:theta=0.785,phi=2``."""
        family, _, rest = text.strip().partition(":")
        params = {}
        for item in filter(None, (p.strip() for p in rest.split(","))):
            key, eq, value = item.partition("=")
            if not eq or key.strip() not in ("rho", "theta", "phi"):
                raise ValidationError(f"bad sampler parameter {item!r} in {text!r}")
            try:
                params[key.strip()] = float(value)
            except ValueError:
                raise ValidationError(f"bad sampler value {value!r} in {text!r}") from None
        family = family.strip().lower()
        allowed = {"uniform": {"rho"}, "gaussian": {"theta", "phi"}}.get(family)
        if allowed is None:
            raise ValidationError(f"unknown sampler family {family!r}")
        if set(params) - allowed:
            raise ValidationError(f"{family} does not take {sorted(set(params) - allowed)}")
        return cls(family, **params)

    def __str__(self):
        if self.family == "uniform":
            return f"uniform:rho={self.rho!r}"
        return f"gaussian:theta={self.theta!r},phi={self.phi!r}"

    def draw(self, bitgen, n: int) -> np.ndarray:
        if n < 1:
            raise ValidationError("n must be >= 1")
        if self.family == "uniform":
            return uniform_coords(bitgen, n, self.rho)
        return gaussian_coords(bitgen, n, self.theta, self.phi)

    def sample(self, n: int, seed: int, trial: int | None = None) -> PointCloud:
        return PointCloud.from_array(self.draw(stream(seed, trial), n))


def sample_uniform(n: int, rho: float, seed: int) -> PointCloud:
    return SamplerSpec("uniform", rho=rho).sample(n, seed)


def sample_gaussian(n: int, theta: float, phi: float, seed: int) -> PointCloud:
    return SamplerSpec("gaussian", theta=theta, phi=phi).sample(n, seed)
