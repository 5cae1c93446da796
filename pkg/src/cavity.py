"""
Multi-pass bifurcation in a mirror cavity.

Each pass through the field region splits every beam into the two modes.
A beam at angle k * theta (k an integer lattice index) leaves the pass
with

    y' = y + L (k theta + s theta / 2),    k' = k + s,    s = +1 / -1

and weight multiplied by w_s (1 - axion_loss). Mirrors reverse only the
longitudinal direction and project back to photon polarization.

Positions are accumulated in units of theta * L, where every update is a
half-integer shift, and scaled to meters at the end. Results are therefore
exactly linear in theta.

Two engines:
  - enumerate_exact: all 2^N leaves (N <= 22)
  - propagate_moments: per-angle-index pooled (weight, sum y, sum y^2),
    O(N^2) total, exact for first and second moments at any N
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
import pandas as pd
from scipy.special import ndtr

from src.constants import CHECKPOINTS_PER_DECADE, MAX_ENUMERATION_PASSES
from src.errors import DomainError, EnumerationLimitError, FitError
from src.utils import fit_power_law

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class CavityConfig:
    pass_length: float
    passes: int
    theta_mode: float
    split_weights: tuple[float, float] = (0.5, 0.5)
    axion_loss: float = 0.0

    def __post_init__(self) -> None:
        errors = cavity_findings(self)
        if errors:
            raise DomainError("; ".join(errors))

    @property
    def survival(self) -> float:
        return 1.0 - self.axion_loss

    def with_passes(self, passes: int) -> "CavityConfig":
        return CavityConfig(self.pass_length, passes, self.theta_mode, self.split_weights, self.axion_loss)

    def with_theta(self, theta_mode: float) -> "CavityConfig":
        return CavityConfig(self.pass_length, self.passes, theta_mode, self.split_weights, self.axion_loss)


def cavity_findings(c: CavityConfig) -> list[str]:
    errors = []
    if not (math.isfinite(c.pass_length) and c.pass_length > 0):
        errors.append(f"CavityConfig.pass_length must be > 0, got {c.pass_length}")
    if isinstance(c.passes, bool) or not isinstance(c.passes, (int, np.integer)) or c.passes < 1:
        errors.append(f"CavityConfig.passes must be an integer >= 1, got {c.passes}")
    if not (math.isfinite(c.theta_mode) and c.theta_mode >= 0):
        errors.append(f"CavityConfig.theta_mode must be >= 0, got {c.theta_mode}")
    if len(c.split_weights) != 2:
        errors.append(f"CavityConfig.split_weights must have two entries, got {c.split_weights}")
    else:
        w_plus, w_minus = c.split_weights
        if w_plus < 0 or w_minus < 0:
            errors.append(f"CavityConfig.split_weights must be >= 0, got {c.split_weights}")
        if abs(w_plus + w_minus - 1.0) > 1e-12:
            errors.append(f"CavityConfig.split_weights must sum to 1, got {w_plus + w_minus}")
    if not (math.isfinite(c.axion_loss) and 0.0 <= c.axion_loss < 1.0):
        errors.append(f"CavityConfig.axion_loss must be in [0, 1), got {c.axion_loss}")
    return errors


# ---------------------------------------------------------------------------
# Exact enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BeamNode:
    y: float
    angle: float
    weight: float
    depth: int


@dataclass
class BeamLeaves:
    """All leaves of the split tree, stored column-wise. Iterates as BeamNode."""

    y: np.ndarray
    angle_index: np.ndarray
    weight: np.ndarray
    depth: int
    theta_mode: float

    def __len__(self) -> int:
        return len(self.y)

    def __iter__(self) -> Iterator[BeamNode]:
        for y, k, w in zip(self.y, self.angle_index, self.weight):
            yield BeamNode(float(y), float(k) * self.theta_mode, float(w), self.depth)

    def __getitem__(self, i: int) -> BeamNode:
        return BeamNode(
            float(self.y[i]), float(self.angle_index[i]) * self.theta_mode, float(self.weight[i]), self.depth
        )

    @property
    def angle(self) -> np.ndarray:
        return self.angle_index * self.theta_mode

    def to_nodes(self) -> list[BeamNode]:
        return list(self)


def enumerate_exact(config: CavityConfig, max_passes: int | None = None) -> BeamLeaves:
    """
    Expand the full 2^N tree.

    Parameters
    ----------
    config : CavityConfig
    max_passes : int, optional
        Depth to expand; defaults to config.passes.

    Raises
    ------
    EnumerationLimitError
        If the depth exceeds MAX_ENUMERATION_PASSES.
    """
    depth = config.passes if max_passes is None else max_passes
    if depth > MAX_ENUMERATION_PASSES:
        raise EnumerationLimitError(
            f"exact enumeration limited to {MAX_ENUMERATION_PASSES} passes, got {depth}"
        )
    if depth < 0:
        raise DomainError(f"max_passes must be >= 0, got {depth}")
    w_plus, w_minus = config.split_weights
    survival = config.survival
    k = np.zeros(1, dtype=np.int64)
    y_units = np.zeros(1)
    weight = np.ones(1)
    for _ in range(depth):
        y_units = np.concatenate([y_units + k + 0.5, y_units + k - 0.5])
        k = np.concatenate([k + 1, k - 1])
        weight = np.concatenate([weight * w_plus, weight * w_minus]) * survival
    scale = config.theta_mode * config.pass_length
    return BeamLeaves(y_units * scale, k, weight, depth, config.theta_mode)


# ---------------------------------------------------------------------------
# Angle-lattice dynamic programming
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AngleLatticeSummary:
    angle_index: int
    weight: float
    mean_y: float
    m2_y: float

    @property
    def var_y(self) -> float:
        return max(self.m2_y - self.mean_y**2, 0.0)


@dataclass
class AngleLattice:
    """Column-wise AngleLatticeSummary rows for the populated angle indices."""

    angle_index: np.ndarray
    weight: np.ndarray
    mean_y: np.ndarray
    m2_y: np.ndarray
    theta_mode: float
    depth: int

    def __len__(self) -> int:
        return len(self.angle_index)

    def __iter__(self) -> Iterator[AngleLatticeSummary]:
        for k, w, mu, m2 in zip(self.angle_index, self.weight, self.mean_y, self.m2_y):
            yield AngleLatticeSummary(int(k), float(w), float(mu), float(m2))

    @property
    def var_y(self) -> np.ndarray:
        return np.maximum(self.m2_y - self.mean_y**2, 0.0)

    @property
    def total_weight(self) -> float:
        return float(self.weight.sum())

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "angle_index": self.angle_index,
                "angle_rad": self.angle_index * self.theta_mode,
                "weight": self.weight,
                "mean_y_m": self.mean_y,
                "std_y_m": np.sqrt(self.var_y),
            }
        )


@dataclass
class GrowthFit:
    exponent: float
    prefactor: float
    residual: float


@dataclass
class SpreadReport:
    weighted_separation: float
    std_y: float
    fitted_exponent: float | None
    checkpoints: list[tuple[float, float]]
    passes: int = 0
    fit_residual: float | None = None
    separation_checkpoints: list[tuple[float, float]] = field(default_factory=list)
    analytic_std: float | None = None
    total_weight: float = 1.0

    def to_dict(self) -> dict:
        return {
            "passes": self.passes,
            "weighted_separation_m": self.weighted_separation,
            "std_y_m": self.std_y,
            "analytic_std_y_m": self.analytic_std,
            "fitted_exponent": self.fitted_exponent,
            "fit_residual": self.fit_residual,
            "total_weight": self.total_weight,
            "checkpoints": [{"z_total_m": z, "spread_m": s} for z, s in self.checkpoints],
            "separation_checkpoints": [
                {"z_total_m": z, "separation_m": s} for z, s in self.separation_checkpoints
            ],
        }


def checkpoint_passes(passes: int, per_decade: int = CHECKPOINTS_PER_DECADE) -> list[int]:
    """Log-spaced pass counts from 1 to passes, inclusive."""
    if passes < 1:
        raise DomainError(f"passes must be >= 1, got {passes}")
    count = max(int(math.ceil(math.log10(passes) * per_decade)) + 1, 2)
    grid = np.unique(np.rint(np.logspace(0.0, math.log10(passes), count)).astype(int))
    return [int(n) for n in grid if 1 <= n <= passes]


def _folded_mean(mu: np.ndarray, var: np.ndarray) -> np.ndarray:
    """E|Y| for Y ~ N(mu, var); |mu| where var = 0."""
    sigma = np.sqrt(var)
    safe = np.where(sigma > 0, sigma, 1.0)
    ratio = mu / safe
    folded = sigma * math.sqrt(2.0 / math.pi) * np.exp(-0.5 * ratio**2) + mu * (1.0 - 2.0 * ndtr(-ratio))
    return np.where(sigma > 0, folded, np.abs(mu))


def _window_stats(W: np.ndarray, S1: np.ndarray, S2: np.ndarray) -> tuple[float, float, float]:
    """(total weight, std, separation) in lattice units."""
    total = W.sum()
    mean = S1.sum() / total
    std = math.sqrt(max(S2.sum() / total - mean**2, 0.0))
    live = W > _TINY
    mu = S1[live] / W[live]
    var = np.maximum(S2[live] / W[live] - mu**2, 0.0)
    separation = float(np.sum(W[live] * _folded_mean(mu, var)))
    return float(total), std, separation


def propagate_moments(
    config: CavityConfig,
    checkpoints: list[int] | None = None,
) -> tuple[AngleLattice, SpreadReport]:
    """
    Exact first and second moments of the leaf distribution after N passes.

    Parameters
    ----------
    config : CavityConfig
    checkpoints : list[int], optional
        Pass counts at which the global spread is recorded for the
        exponent fit. Defaults to a log grid from 1 to N.

    Returns
    -------
    (AngleLattice, SpreadReport)
        Lattice rows with weight below the smallest normal float are dropped.
    """
    n_passes = config.passes
    checkpoints = sorted(set(checkpoints or checkpoint_passes(n_passes)))
    wanted = {n for n in checkpoints if 1 <= n <= n_passes}
    w_plus, w_minus = config.split_weights
    survival = config.survival
    scale = config.theta_mode * config.pass_length

    size = 2 * n_passes + 1
    W = np.zeros(size)
    S1 = np.zeros(size)
    S2 = np.zeros(size)
    W[n_passes] = 1.0

    spread_points: list[tuple[float, float]] = []
    separation_points: list[tuple[float, float]] = []
    for n in range(1, n_passes + 1):
        d = n - 1
        lo, hi = n_passes - d, n_passes + d + 1
        k = np.arange(-d, d + 1, dtype=float)
        w_old, s1_old, s2_old = W[lo:hi], S1[lo:hi], S2[lo:hi]
        W_new = np.zeros(size)
        S1_new = np.zeros(size)
        S2_new = np.zeros(size)
        for s, w_s in ((1, w_plus), (-1, w_minus)):
            if w_s == 0:
                continue
            c = k + 0.5 * s
            dst = slice(lo + s, hi + s)
            W_new[dst] += w_s * w_old
            S1_new[dst] += w_s * (s1_old + c * w_old)
            S2_new[dst] += w_s * (s2_old + 2.0 * c * s1_old + c * c * w_old)
        if survival != 1.0:
            W_new *= survival
            S1_new *= survival
            S2_new *= survival
        W, S1, S2 = W_new, S1_new, S2_new
        if n in wanted:
            _, std_u, sep_u = _window_stats(W, S1, S2)
            z_total = n * config.pass_length
            spread_points.append((z_total, std_u * scale))
            separation_points.append((z_total, sep_u * scale))

    total, std_u, sep_u = _window_stats(W, S1, S2)
    live = W > _TINY
    ks = np.arange(-n_passes, n_passes + 1)[live]
    mean_u = S1[live] / W[live]
    m2_u = S2[live] / W[live]
    lattice = AngleLattice(
        angle_index=ks,
        weight=W[live],
        mean_y=mean_u * scale,
        m2_y=m2_u * scale * scale,
        theta_mode=config.theta_mode,
        depth=n_passes,
    )

    exponent: float | None = None
    residual: float | None = None
    if config.theta_mode > 0 and len(spread_points) >= 2:
        try:
            growth = fit_growth_exponent(spread_points)
            exponent, residual = growth.exponent, growth.residual
        except FitError:
            exponent = None
    report = SpreadReport(
        weighted_separation=sep_u * scale,
        std_y=std_u * scale,
        fitted_exponent=exponent,
        checkpoints=spread_points,
        passes=n_passes,
        fit_residual=residual,
        separation_checkpoints=separation_points,
        analytic_std=analytic_spread(config, n_passes),
        total_weight=total,
    )
    return lattice, report


def analytic_spread(config: CavityConfig, passes: int | None = None) -> float:
    """
    Standard deviation of the leaf positions from the affine walk.

    y / (theta L) = sum_i s_i (N - i + 1/2), so with p = w+ - w-,
    var = (1 - p^2) (N^3/3 - N/12). Leading term theta L N^{3/2} / sqrt(3).
    """
    n = config.passes if passes is None else passes
    w_plus, w_minus = config.split_weights
    bias = (w_plus - w_minus) / (w_plus + w_minus)
    variance = (1.0 - bias**2) * (n**3 / 3.0 - n / 12.0)
    return config.theta_mode * config.pass_length * math.sqrt(max(variance, 0.0))


def linear_split_spread(config: CavityConfig, pass_counts: list[int] | None = None) -> SpreadReport:
    """
    Control case: two beams at fixed +/- theta_mode, never re-split.

    Each beam sits at theta_mode * z after z = N L, so the spread is a
    straight line in z.
    """
    pass_counts = sorted(set(pass_counts or checkpoint_passes(config.passes)))
    points = [(n * config.pass_length, config.theta_mode * n * config.pass_length) for n in pass_counts]
    final = config.theta_mode * config.passes * config.pass_length
    exponent = residual = None
    if config.theta_mode > 0 and len(points) >= 2:
        try:
            growth = fit_growth_exponent(points)
            exponent, residual = growth.exponent, growth.residual
        except FitError:
            exponent = None
    return SpreadReport(
        weighted_separation=final,
        std_y=final,
        fitted_exponent=exponent,
        checkpoints=points,
        passes=config.passes,
        fit_residual=residual,
        separation_checkpoints=list(points),
        analytic_std=final,
    )


def fit_growth_exponent(checkpoints: list[tuple[float, float]]) -> GrowthFit:
    """
    Slope of log(spread) against log(z_total).

    Raises
    ------
    FitError
        If the checkpoints span less than two decades of z or any spread is zero.
    """
    z = np.array([p[0] for p in checkpoints], dtype=float)
    spread = np.array([p[1] for p in checkpoints], dtype=float)
    exponent, prefactor, residual = fit_power_law(z, spread, min_decades=2.0)
    return GrowthFit(exponent=exponent, prefactor=prefactor, residual=residual)


def weighted_separation(distribution: AngleLattice | BeamLeaves) -> float:
    """
    Sum of weight * E|y| over the distribution.

    Exact for enumerated leaves; per-node normal approximation
    (folded-normal mean) for a lattice.
    """
    if len(distribution) == 0:
        raise DomainError("weighted_separation needs a non-empty distribution")
    if isinstance(distribution, BeamLeaves):
        return float(np.sum(distribution.weight * np.abs(distribution.y)))
    return float(np.sum(distribution.weight * _folded_mean(distribution.mean_y, distribution.var_y)))
