"""Strictly alpha-stable laws in the polar ("form C") parametrization.

A law here is described by (alpha, theta, lam) with characteristic function

    phi(t) = exp(-lam * |t|^alpha * exp(-i * pi * theta * alpha * sgn(t) / 2)),

alpha in (0,2) \\ {1}, |theta| <= min(1, 2/alpha - 1), |theta| != 1, lam > 0.
The classical skew parametrization ("form A")

    phi(t) = exp(-lam' * |t|^alpha * (1 - i * beta * sgn(t) * tan(pi*alpha/2)))

is supported through explicit conversions.  Note that some classical papers
on ladder heights and first-passage asymptotics use form A with beta
replaced by -beta; the conversions here implement the sign convention of
the characteristic functions written above, and callers comparing against
such references must flip beta themselves.

theta = 2/alpha - 1 (equivalently beta = -1 for alpha in (1,2)) gives the
spectrally negative case: no positive jumps, heavy left tail, and the
cumulant generating function psi(s) = log E[exp(s*X)] = lam * s^alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma


class InvalidParameterError(ValueError):
    """Raised when stable-law parameters violate their domain."""


def _validate_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 2.0 or alpha == 2.0):
        raise InvalidParameterError(f"alpha must lie in (0, 2], got {alpha}")
    if alpha == 1.0:
        raise InvalidParameterError("alpha=1 out of scope")


@dataclass(frozen=True)
class StableParamsC:
    """Stable-law parameters in the polar form (C)."""

    alpha: float
    theta: float
    lam: float = 1.0

    def __post_init__(self):
        _validate_alpha(self.alpha)
        bound = min(1.0, 2.0 / self.alpha - 1.0)
        if abs(self.theta) > bound + 1e-15:
            raise InvalidParameterError(
                f"|theta|={abs(self.theta)} exceeds min(1, 2/alpha-1)={bound}"
            )
        if abs(abs(self.theta) - 1.0) < 1e-15 and self.alpha < 1.0:
            raise InvalidParameterError("|theta|=1 excluded (drifting case)")
        if not self.lam > 0.0:
            raise InvalidParameterError(f"lam must be positive, got {self.lam}")

    @property
    def rho_bar(self) -> float:
        """Negativity parameter P(X < 0) = (1 - theta) / 2."""
        return (1.0 - self.theta) / 2.0

    @property
    def rho(self) -> float:
        return 1.0 - self.rho_bar

    @property
    def alpha_rho_bar(self) -> float:
        return self.alpha * self.rho_bar

    @property
    def alpha_rho(self) -> float:
        return self.alpha * self.rho

    def normalized(self) -> "StableParamsC":
        """Unit-scale version; callers absorb lam into the norming sequence."""
        return StableParamsC(self.alpha, self.theta, 1.0)


@dataclass(frozen=True)
class StableParamsA:
    """Stable-law parameters in the classical skew form (A)."""

    alpha: float
    beta: float
    lam_prime: float

    def __post_init__(self):
        _validate_alpha(self.alpha)
        if abs(self.beta) > 1.0 + 1e-15:
            raise InvalidParameterError(f"|beta| must be <= 1, got {self.beta}")
        if self.alpha < 1.0 and abs(self.beta) >= 1.0:
            raise InvalidParameterError("|beta|=1 not allowed for alpha < 1")
        if not self.lam_prime > 0.0:
            raise InvalidParameterError(f"lam_prime must be positive, got {self.lam_prime}")


def to_form_a(p: StableParamsC) -> StableParamsA:
    """Convert form (C) -> form (A)."""
    half = math.pi * p.alpha / 2.0
    beta = math.tan(math.pi * p.theta * p.alpha / 2.0) / math.tan(half)
    lam_prime = p.lam * math.cos(math.pi * p.theta * p.alpha / 2.0)
    # clamp roundoff at the spectrally one-sided corner
    beta = min(1.0, max(-1.0, beta))
    return StableParamsA(p.alpha, beta, lam_prime)


def to_form_c(a: StableParamsA) -> StableParamsC:
    """Convert form (A) -> form (C)."""
    half = math.pi * a.alpha / 2.0
    theta = 2.0 / (math.pi * a.alpha) * math.atan(a.beta * math.tan(half))
    lam = a.lam_prime / math.cos(math.pi * theta * a.alpha / 2.0)
    return StableParamsC(a.alpha, theta, lam)


def negativity_params(p: StableParamsC) -> tuple[float, float]:
    """(rho, rho_bar) with rho_bar = P(X < 0) = (1 - theta)/2."""
    return p.rho, p.rho_bar


def char_function(p: StableParamsC, t):
    """Characteristic function of the law, vectorized over t."""
    t = np.asarray(t, dtype=float)
    phase = np.exp(-1j * math.pi * p.theta * p.alpha / 2.0 * np.sign(t))
    return np.exp(-p.lam * np.abs(t) ** p.alpha * phase)


def sample_stable(p: StableParamsC, n: int, rng: np.random.Generator) -> np.ndarray:
    """Exact i.i.d. sampling by the two-uniform polar transform.

    The transform is native to form (A): with V uniform on (-pi/2, pi/2)
    and W standard exponential,

        X = S * sin(alpha(V+B)) / cos(V)^(1/alpha)
              * (cos(V - alpha(V+B)) / W)^((1-alpha)/alpha),
        B = atan(beta * tan(pi*alpha/2)) / alpha,
        S = (1 + beta^2 tan^2(pi*alpha/2))^(1/(2*alpha)),

    has the form-(A) law with lam' = 1; scaling by lam'^(1/alpha) gives the
    requested law.
    """
    if n < 1:
        raise InvalidParameterError(f"need n >= 1 samples, got {n}")
    a = to_form_a(p)
    alpha, beta = a.alpha, a.beta
    tan_half = math.tan(math.pi * alpha / 2.0)
    B = math.atan(beta * tan_half) / alpha
    S = (1.0 + (beta * tan_half) ** 2) ** (1.0 / (2.0 * alpha))
    V = rng.uniform(-math.pi / 2.0, math.pi / 2.0, n)
    W = rng.standard_exponential(n)
    x = (
        S
        * np.sin(alpha * (V + B))
        / np.cos(V) ** (1.0 / alpha)
        * (np.cos(V - alpha * (V + B)) / W) ** ((1.0 - alpha) / alpha)
    )
    return a.lam_prime ** (1.0 / alpha) * x


def kappa_exact(alpha: float) -> float:
    """1 / (Gamma(alpha) * Gamma(1/alpha)).

    Valid for the spectrally one-sided case alpha * rho = 1 (no positive
    jumps), alpha in (1, 2].
    """
    if not (1.0 < alpha <= 2.0):
        raise InvalidParameterError(f"kappa_exact needs alpha in (1, 2], got {alpha}")
    return 1.0 / (_gamma(alpha) * _gamma(1.0 / alpha))


def c1_const(alpha: float, rho_bar: float) -> float:
    """1 / Gamma(1 + alpha*rho_bar), the renewal-function growth constant."""
    arb = alpha * rho_bar
    if not (0.0 < arb <= 1.0):
        raise InvalidParameterError(f"alpha*rho_bar must lie in (0, 1], got {arb}")
    return 1.0 / _gamma(1.0 + arb)


def norming_sequence(p: StableParamsC, n: int) -> float:
    """a_n = (lam * n)^(1/alpha) for exactly-stable increments."""
    return (p.lam * n) ** (1.0 / p.alpha)


def scale_function(alpha: float, x) -> np.ndarray | float:
    """Scale function of the spectrally negative process, W(x) = x^(alpha-1)/Gamma(alpha).

    Characterized by the Laplace transform int_0^inf e^{-sx} W(x) dx = s^{-alpha}.
    """
    if not (1.0 < alpha <= 2.0):
        raise InvalidParameterError(f"scale_function needs alpha in (1, 2], got {alpha}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise InvalidParameterError("scale_function needs x >= 0")
    out = x ** (alpha - 1.0) / _gamma(alpha)
    return float(out) if out.ndim == 0 else out


def positive_part_mean_exact(alpha: float) -> float:
    """E[X 1_{X>0}] = 1/Gamma(1/alpha) for the spectrally negative unit law."""
    if not (1.0 < alpha <= 2.0):
        raise InvalidParameterError(
            f"positive_part_mean_exact needs alpha in (1, 2], got {alpha}"
        )
    return 1.0 / _gamma(1.0 / alpha)


def spectrally_negative_params(alpha: float, lam: float = 1.0) -> StableParamsC:
    """Parameters of the no-positive-jumps case: theta = 2/alpha - 1."""
    if not (1.0 < alpha <= 2.0):
        raise InvalidParameterError(f"need alpha in (1, 2], got {alpha}")
    return StableParamsC(alpha, 2.0 / alpha - 1.0, lam)
