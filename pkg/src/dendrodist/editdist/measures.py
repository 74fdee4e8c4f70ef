"""Finite measures on the pruning threshold, supported on [0, 1]."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from ..errors import InvalidMeasureError

FAMILIES = ("beta", "uniform-grid", "point-mass-list")


@dataclass(frozen=True)
class PruningMeasure:
    family: str
    params: tuple

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidMeasureError(f"unknown measure family {self.family!r}")

    # -- atoms of the discrete families
    def atoms(self) -> tuple[tuple[float, float], ...]:
        if self.family == "point-mass-list":
            return self.params
        if self.family == "uniform-grid":
            (n,) = self.params
            return tuple((k / n, 1.0 / n) for k in range(n))
        raise InvalidMeasureError("beta measures have no atoms")

    @property
    def total_mass(self) -> float:
        if self.family == "beta":
            return 1.0
        return math.fsum(m for _, m in self.atoms())

    def cdf(self, x: float) -> float:
        """Mass of ``[0, x]``."""
        if self.family == "beta":
            a, b = self.params
            return float(special.betainc(a, b, min(max(x, 0.0), 1.0)))
        return math.fsum(m for p, m in self.atoms() if p <= x)

    def mass(self, lo: float, hi: float) -> float:
        """Mass of the half-open interval ``[lo, hi)``; ``hi`` may be inf."""
        if hi <= lo:
            return 0.0
        if self.family == "beta":
            a, b = self.params
            x0 = min(max(lo, 0.0), 1.0)
            x1 = min(max(hi, 0.0), 1.0)
            if x1 <= x0:
                return 0.0
            # upper tail form is more accurate for intervals near 1
            if x0 > 0.5:
                return float(special.betaincc(a, b, x0) - special.betaincc(a, b, x1))
            return float(special.betainc(a, b, x1) - special.betainc(a, b, x0))
        return math.fsum(m for p, m in self.atoms() if lo <= p < hi)

    def discretize(self, n_points: int) -> tuple[np.ndarray, np.ndarray]:
        """Points and masses of an ``n_points`` approximation.

        Beta measures use the quantile midpoints ``F^-1((i + 1/2) / n)`` with
        equal masses; discrete measures return their atoms unchanged.
        """
        if n_points < 1:
            raise ValueError("n_points must be >= 1")
        if self.family == "beta":
            a, b = self.params
            u = (np.arange(n_points) + 0.5) / n_points
            return stats.beta.ppf(u, a, b), np.full(n_points, 1.0 / n_points)
        pts = np.array([p for p, _ in self.atoms()], dtype=float)
        ms = np.array([m for _, m in self.atoms()], dtype=float)
        return pts, ms

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.family == "beta":
            a, b = self.params
            return rng.beta(a, b, size)
        pts, ms = self.discretize(1)
        return rng.choice(pts, size=size, p=ms / ms.sum())

    @property
    def positive_near_zero(self) -> bool:
        """Whether every interval ``[0, m]`` with small ``m > 0`` has positive
        mass, the condition under which the pruned distance is a metric."""
        if self.family == "beta":
            return True
        return any(p == 0.0 and m > 0 for p, m in self.atoms())

    @property
    def mean(self) -> float:
        if self.family == "beta":
            a, b = self.params
            return a / (a + b)
        return math.fsum(p * m for p, m in self.atoms()) / self.total_mass

    @property
    def mode(self) -> float:
        if self.family != "beta":
            raise InvalidMeasureError("mode is defined for beta measures only")
        a, b = self.params
        if a > 1 and b > 1:
            return (a - 1) / (a + b - 2)
        raise InvalidMeasureError("beta mode is interior only for alpha, beta > 1")

    def describe(self) -> dict:
        if self.family == "beta":
            return {"family": "beta", "alpha": self.params[0], "beta": self.params[1]}
        if self.family == "uniform-grid":
            return {"family": "uniform-grid", "n": self.params[0]}
        return {"family": "point-mass-list", "atoms": [list(a) for a in self.params]}


def beta_measure(alpha: float, beta: float) -> PruningMeasure:
    if not (alpha > 0 and beta > 0 and math.isfinite(alpha) and math.isfinite(beta)):
        raise InvalidMeasureError(f"beta parameters must be positive, got ({alpha}, {beta})")
    return PruningMeasure("beta", (float(alpha), float(beta)))


def point_masses(atoms) -> PruningMeasure:
    """Weighted atoms ``[(location, mass), ...]`` with locations in [0, 1]."""
    out = []
    for p, m in atoms:
        p, m = float(p), float(m)
        if not (0.0 <= p <= 1.0) or not m >= 0.0:
            raise InvalidMeasureError(f"bad atom ({p}, {m})")
        out.append((p, m))
    if not out or math.fsum(m for _, m in out) <= 0.0:
        raise InvalidMeasureError("measure must have positive total mass")
    return PruningMeasure("point-mass-list", tuple(sorted(out)))


def point_mass_at_zero() -> PruningMeasure:
    return point_masses([(0.0, 1.0)])


def uniform_grid(n: int) -> PruningMeasure:
    """Mass ``1/n`` at each of ``0, 1/n, ..., (n-1)/n``."""
    if int(n) < 1:
        raise InvalidMeasureError("grid size must be >= 1")
    return PruningMeasure("uniform-grid", (int(n),))


def measure_from_options(family: str = "beta", alpha: float = 2.0, beta: float = 8.0, grid: int = 64, atoms=None):
    if family == "beta":
        return beta_measure(alpha, beta)
    if family == "uniform-grid":
        return uniform_grid(grid)
    if family == "point-mass-list":
        return point_masses(atoms if atoms is not None else [(0.0, 1.0)])
    raise InvalidMeasureError(f"unknown measure family {family!r}")
