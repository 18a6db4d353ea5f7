"""Step-law handles: one immutable description of a random-walk increment law.

A StepLaw bundles (a) how to draw increments inside the compiled kernels and
(b) the attraction metadata (alpha, theta, lam) every scaling computation
needs: a_n = (lam*n)^(1/alpha), rho_bar, and the renewal growth constant c1.

Kernel dispatch codes:
    0  exactly stable, polar transform      params = (alpha, B, S, sigma)
    1  piecewise-uniform table              arr1 = cum masses, arr2 = x edges
    2  finite atoms                         arr1 = cum probs,  arr2 = values
    3  piecewise e^{-x}-tilted table        arr1 = cum masses, arr2 = x edges
    4  pareto-left / exponential-right mix  params = (w_left, gamma, alpha_jump)
    5  pure-pareto-left / exp-right mix     params = (mass_left, alpha_jump, rate_right)
    6  constant step                        params = (value,)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import stable_laws
from .stable_laws import StableParamsC

_EMPTY = np.empty(0, dtype=np.float64)

KIND_STABLE = 0
KIND_TABLE_UNIFORM = 1
KIND_ATOMS = 2
KIND_TABLE_TILTED = 3
KIND_PARETO_OFFSPRING = 4
KIND_PARETO_SPINE = 5
KIND_CONST = 6


@dataclass(frozen=True)
class StepLaw:
    """Immutable increment law plus its stable-attraction metadata."""

    code: int
    alpha: float
    theta: float
    lam: float
    exact: bool
    params: np.ndarray = field(default_factory=lambda: _EMPTY)
    arr1: np.ndarray = field(default_factory=lambda: _EMPTY)
    arr2: np.ndarray = field(default_factory=lambda: _EMPTY)

    @property
    def rho_bar(self) -> float:
        return (1.0 - self.theta) / 2.0

    @property
    def alpha_rho_bar(self) -> float:
        return self.alpha * self.rho_bar

    @property
    def c1(self) -> float:
        return stable_laws.c1_const(self.alpha, self.rho_bar)

    def a_n(self, n: int) -> float:
        return (self.lam * n) ** (1.0 / self.alpha)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw i.i.d. increments (same code path as the compiled kernels)."""
        from ._walk_kernels import step_array
        from ._rng import derive_seed

        return step_array(derive_seed(rng), size, self.code, self.params,
                          self.arr1, self.arr2)

    def mirror(self) -> "StepLaw":
        """Law of -X (used for ascending-ladder statistics)."""
        if self.code == KIND_STABLE:
            return stable_step_law(StableParamsC(self.alpha, -self.theta, self.lam))
        if self.code == KIND_ATOMS:
            order = np.argsort(-self.arr2)
            probs = np.diff(np.concatenate(([0.0], self.arr1)))[order]
            return atoms_step_law(-self.arr2[order], probs,
                                  alpha=self.alpha, lam=self.lam, theta=-self.theta)
        if self.code == KIND_CONST:
            return const_step_law(-self.params[0])
        raise NotImplementedError(f"mirror() unsupported for step code {self.code}")


def stable_step_law(p: StableParamsC) -> StepLaw:
    """Exactly stable increments in form (C)."""
    a = stable_laws.to_form_a(p)
    tan_half = math.tan(math.pi * a.alpha / 2.0)
    B = math.atan(a.beta * tan_half) / a.alpha
    S = (1.0 + (a.beta * tan_half) ** 2) ** (1.0 / (2.0 * a.alpha))
    sigma = a.lam_prime ** (1.0 / a.alpha)
    params = np.array([a.alpha, B, S, sigma], dtype=np.float64)
    return StepLaw(KIND_STABLE, p.alpha, p.theta, p.lam, True, params)


def atoms_step_law(values, probs, alpha: float = 2.0, lam: float | None = None,
                   theta: float = 0.0) -> StepLaw:
    """Finitely supported increments (test stubs; CLT attraction, alpha=2)."""
    values = np.asarray(values, dtype=np.float64)
    probs = np.asarray(probs, dtype=np.float64)
    if values.shape != probs.shape or np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
        raise ValueError("atoms need matching shapes and probs summing to 1")
    if lam is None:
        mean = float(values @ probs)
        lam = float(((values - mean) ** 2) @ probs) / 2.0  # CF exp(-lam t^2)
    cum = np.cumsum(probs)
    cum[-1] = 1.0
    return StepLaw(KIND_ATOMS, alpha, theta, lam, False, _EMPTY, cum, values.copy())


def const_step_law(value: float) -> StepLaw:
    """Degenerate step (unit-test stub only; no attraction metadata)."""
    return StepLaw(KIND_CONST, 2.0, 0.0, 1.0, False,
                   np.array([value], dtype=np.float64))


def table_uniform_step_law(cum_masses, x_edges, alpha, theta, lam,
                           exact=False) -> StepLaw:
    """Piecewise-uniform density over cells given by x_edges."""
    return StepLaw(KIND_TABLE_UNIFORM, alpha, theta, lam, exact, _EMPTY,
                   np.ascontiguousarray(cum_masses, dtype=np.float64),
                   np.ascontiguousarray(x_edges, dtype=np.float64))


def table_tilted_step_law(cum_masses, x_edges, alpha, theta, lam,
                          exact=False) -> StepLaw:
    """Piecewise density proportional to e^{-x} within each cell."""
    return StepLaw(KIND_TABLE_TILTED, alpha, theta, lam, exact, _EMPTY,
                   np.ascontiguousarray(cum_masses, dtype=np.float64),
                   np.ascontiguousarray(x_edges, dtype=np.float64))
