"""Random-walk engine for the spinal law.

Ladder heights, renewal-function estimation, survival probabilities of the
walk killed below zero, exact conditioned sampling by rejection, and the
meander functional that determines the Seneta-Heyde constant.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from ._rng import derive_seed
from . import _walk_kernels as _k
from .steplaw import StepLaw


class BudgetExceededError(RuntimeError):
    """Rejection sampling ran out of attempts."""


class DomainError(ValueError):
    """Argument outside the range an operation can serve."""


@dataclass(frozen=True)
class WalkPath:
    """A walk trajectory; positions[0] is the start."""

    start: float
    positions: np.ndarray

    @property
    def length(self) -> int:
        return len(self.positions) - 1

    def minimum(self) -> float:
        return float(self.positions.min())


@dataclass(frozen=True)
class LadderSample:
    """Absolute strictly-descending ladder heights plus censoring info."""

    heights: np.ndarray
    censored_count: int
    max_steps: int

    @property
    def total_epochs(self) -> int:
        return len(self.heights) + self.censored_count

    @property
    def censored_fraction(self) -> float:
        return self.censored_count / max(1, self.total_epochs)

    @property
    def censoring_warning(self) -> bool:
        return self.censored_fraction > 0.10


@dataclass(frozen=True)
class RenewalTable:
    """Monte Carlo estimate of the descending-ladder renewal function."""

    grid: np.ndarray
    r_hat: np.ndarray
    stderr: np.ndarray
    replicas: int
    c1: float
    alpha_rho_bar: float
    censored_epochs: int = 0
    total_epochs: int = 0

    def evaluate(self, x) -> np.ndarray:
        """Linear interpolation on the grid, growth asymptote c1*x^arb beyond."""
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.grid, self.r_hat)
        beyond = x > self.grid[-1]
        if np.any(beyond):
            out = np.where(beyond, self.c1 * np.abs(x) ** self.alpha_rho_bar, out)
        return out

    def stderr_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.grid, self.stderr)
        return np.where(x > self.grid[-1], self.stderr[-1], out)

    def to_csv(self, path_or_buf) -> None:
        buf = path_or_buf if hasattr(path_or_buf, "write") else open(path_or_buf, "w", newline="\n")
        try:
            buf.write("x,r_hat,stderr,replicas\n")
            for x, r, s in zip(self.grid, self.r_hat, self.stderr):
                buf.write(f"{x!r},{r!r},{s!r},{self.replicas}\n")
        finally:
            if buf is not path_or_buf:
                buf.close()

    @staticmethod
    def from_csv(path_or_buf, c1: float, alpha_rho_bar: float) -> "RenewalTable":
        buf = path_or_buf if hasattr(path_or_buf, "read") else open(path_or_buf)
        try:
            rows = [line.strip().split(",") for line in buf.readlines()[1:] if line.strip()]
        finally:
            if buf is not path_or_buf:
                buf.close()
        grid = np.array([float(r[0]) for r in rows])
        r_hat = np.array([float(r[1]) for r in rows])
        stderr = np.array([float(r[2]) for r in rows])
        return RenewalTable(grid, r_hat, stderr, int(rows[0][3]), c1, alpha_rho_bar)


@dataclass(frozen=True)
class SurvivalEstimate:
    """P_x(min_{k<=n} S_k >= 0) estimate and its scaled version."""

    x: float
    n: int
    p_hat: float
    stderr: float
    scaled: float
    reps: int
    reliable: bool

    def to_csv_row(self) -> str:
        return f"{self.x!r},{self.n},{self.p_hat!r},{self.stderr!r},{self.scaled!r}"


def simulate_walk(step: StepLaw, n: int, x0: float, rng: np.random.Generator) -> WalkPath:
    """Path of n i.i.d. increments started at x0."""
    if n < 0:
        raise DomainError(f"need n >= 0, got {n}")
    if n == 0:
        return WalkPath(x0, np.array([x0], dtype=float))
    pos = _k.walk_positions(derive_seed(rng), n, x0, step.code, step.params,
                            step.arr1, step.arr2)
    return WalkPath(x0, pos)


def descending_ladder_heights(step: StepLaw, count: int, max_steps: int,
                              rng: np.random.Generator,
                              ascending: bool = False) -> LadderSample:
    """i.i.d. absolute ladder heights; epochs beyond max_steps are censored.

    ascending=True returns the strictly ascending ladder heights (the walk
    is mirrored, so the step law must support mirror()).
    """
    law = step.mirror() if ascending else step
    heights, censored = _k.ladder_heights(derive_seed(rng), count, max_steps,
                                          law.code, law.params, law.arr1, law.arr2)
    return LadderSample(heights, int(censored), max_steps)


def heyde_functional(sample: LadderSample, s: float, alpha_rho_bar: float
                     ) -> tuple[float, float, float]:
    """s^{-arb} * (1 - E[exp(-s*H1)]) with a censoring bracket.

    Censored epochs are long excursions whose eventual ladder height is far
    beyond 1/s with overwhelming probability, so they are counted as
    exp(-s*H) = 0.  Returns (value, stderr, censor_bracket) where
    censor_bracket bounds the worst-case shift if every censored epoch in
    truth had exp(-s*H) = 1.
    """
    e = np.exp(-s * sample.heights)
    total = sample.total_epochs
    mean = e.sum() / total
    var = (np.sum((e - mean) ** 2) + sample.censored_count * mean**2) / total
    se = math.sqrt(var / total)
    scale = s ** (-alpha_rho_bar)
    return scale * (1.0 - mean), scale * se, scale * sample.censored_fraction


def ladder_tail_ratio(sample: LadderSample, x_grid, alpha_rho_bar: float) -> np.ndarray:
    """Empirical P(H1 >= x) * x^{arb} * Gamma(1 - arb) over x_grid (arb < 1)."""
    from scipy.special import gamma as _g

    if alpha_rho_bar >= 1.0:
        raise DomainError("tail ratio defined only for alpha*rho_bar < 1")
    x_grid = np.asarray(x_grid, dtype=float)
    h = np.sort(sample.heights)
    tail = 1.0 - np.searchsorted(h, x_grid, side="left") / sample.total_epochs
    return tail * x_grid**alpha_rho_bar * _g(1.0 - alpha_rho_bar)


def estimate_renewal_function(step: StepLaw, grid, replicas: int,
                              rng: np.random.Generator,
                              max_steps: int = 10**6) -> RenewalTable:
    """R_hat(x) = 1 + mean number of ladder points with cumulative height <= x."""
    grid = np.ascontiguousarray(grid, dtype=np.float64)
    if grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be increasing and start at 0")
    sums, sqs, censored, epochs = _k.renewal_counts(
        derive_seed(rng), replicas, grid, max_steps,
        step.code, step.params, step.arr1, step.arr2)
    mean = sums / replicas
    var = np.maximum(0.0, sqs / replicas - mean**2)
    stderr = np.sqrt(var / replicas)
    return RenewalTable(grid, 1.0 + mean, stderr, replicas,
                        step.c1, step.alpha_rho_bar, int(censored), int(epochs))


def harmonicity_residual(table: RenewalTable, step: StepLaw, x: float,
                         mc_n: int, rng: np.random.Generator
                         ) -> tuple[float, float]:
    """R_hat(x) - E[R_hat(x + S_1) 1_{x + S_1 >= 0}], with its combined SE.

    The expectation is Monte Carlo over mc_n fresh increments; R_hat is
    interpolated on the grid and continued by its growth asymptote beyond.
    """
    if x < 0 or x > table.grid[-1]:
        raise DomainError(f"x={x} outside the renewal grid [0, {table.grid[-1]}]")
    steps = step.draw(rng, mc_n)
    y = x + steps
    vals = np.where(y >= 0.0, table.evaluate(np.abs(y)), 0.0)
    mean = float(vals.mean())
    se_mc = float(vals.std(ddof=1) / math.sqrt(mc_n))
    # table error enters both sides; combine the point SE with the
    # hit-region average SE
    se_table_here = float(table.stderr_at(x))
    inside = (y >= 0.0) & (y <= table.grid[-1])
    se_table_hit = float(np.sqrt(np.mean(table.stderr_at(y[inside]) ** 2))) if inside.any() else 0.0
    residual = float(table.evaluate(x)) - mean
    se = math.sqrt(se_mc**2 + se_table_here**2 + se_table_hit**2)
    return residual, se


def survival_probability(step: StepLaw, x: float, n: int, reps: int,
                         rng: np.random.Generator) -> SurvivalEstimate:
    """Estimate P_x(min_{k<=n} S_k >= 0); scaled = a_n^{arb} * p_hat."""
    alive = int(_k.survival_count(derive_seed(rng), reps, n, x,
                                  step.code, step.params, step.arr1, step.arr2))
    p = alive / reps
    se = math.sqrt(max(p * (1.0 - p), 1e-300) / reps)
    scaled = step.a_n(n) ** step.alpha_rho_bar * p
    return SurvivalEstimate(x, n, p, se, scaled, reps, reliable=alive >= 100)


def conditioned_path(step: StepLaw, n: int, x0: float, rng: np.random.Generator,
                     max_attempts: int | None = None) -> tuple[WalkPath, int]:
    """Exact sample of the walk given min_{k<=n} S_k >= 0, by rejection.

    Expected cost is about a_n^{arb} / (K * R(x0)) attempts, each costing at
    most n steps. Raises BudgetExceededError when max_attempts runs out.
    """
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if max_attempts is None:
        max_attempts = max(10_000, int(200 * step.a_n(n) ** step.alpha_rho_bar))
    path, attempts = _k.conditioned_path(derive_seed(rng), n, x0, max_attempts,
                                         step.code, step.params, step.arr1, step.arr2)
    if attempts < 0:
        raise BudgetExceededError(
            f"no surviving path in {max_attempts} attempts (n={n}, x0={x0})")
    return WalkPath(x0, path), int(attempts)


def conditioned_endpoints(step: StepLaw, n: int, x0: float, want: int,
                          rng: np.random.Generator,
                          max_attempts: int | None = None
                          ) -> tuple[np.ndarray, int]:
    """Endpoints S_n of `want` conditioned walks; returns (endpoints, attempts)."""
    if max_attempts is None:
        max_attempts = max(100_000, int(40 * want * step.a_n(n) ** step.alpha_rho_bar))
    endpoints, attempts, got = _k.conditioned_endpoints(
        derive_seed(rng), want, n, x0, max_attempts,
        step.code, step.params, step.arr1, step.arr2)
    if got < want:
        raise BudgetExceededError(
            f"only {got}/{want} conditioned endpoints in {max_attempts} attempts")
    return endpoints, int(attempts)


@dataclass(frozen=True)
class MeanderEstimate:
    m_hat: float
    kappa_hat: float
    stderr_m: float
    stderr_kappa: float
    n: int
    reps: int
    attempts: int

    @property
    def acceptance_rate(self) -> float:
        return self.reps / self.attempts


def meander_moment(step: StepLaw, n: int, reps: int, rng: np.random.Generator,
                   x0: float = 0.0) -> MeanderEstimate:
    """m_hat = E[(S_n / a_n)^{arb} | min >= 0] and kappa_hat = 1 / m_hat."""
    endpoints, attempts = conditioned_endpoints(step, n, x0, reps, rng)
    arb = step.alpha_rho_bar
    vals = np.maximum(endpoints, 0.0) ** arb / step.a_n(n) ** arb
    m = float(vals.mean())
    se_m = float(vals.std(ddof=1) / math.sqrt(reps))
    return MeanderEstimate(m, 1.0 / m, se_m, se_m / m**2, n, reps, attempts)
