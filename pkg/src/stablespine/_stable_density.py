"""Density tabulation for the spectrally negative strictly stable law.

The unit-scale law with theta = 2/alpha - 1 has characteristic function
exp(-|t|^alpha e^{-i c sgn(t)}) with c = pi (2 - alpha) / 2.  Its density is
computed by Fourier inversion on the bulk and by the convergent tail series
in the heavy (left) tail:

    f(-y) = (1/pi) * sum_{k>=1} (-1)^{k-1} Gamma(k alpha + 1)/k! *
            sin(k pi (alpha - 1)) * y^{-k alpha - 1}.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln


def _inversion_nodes(alpha: float, max_abs_x: float):
    """Gauss-Legendre composite nodes/weights for the CF integral."""
    c = math.pi * (2.0 - alpha) / 2.0
    cos_c = math.cos(c)
    t_max = (46.0 / cos_c) ** (1.0 / alpha)
    panel = min(0.15, math.pi / (4.0 * max(max_abs_x, 1.0)))
    n_panels = max(64, int(math.ceil(t_max / panel)))
    gl_x, gl_w = np.polynomial.legendre.leggauss(12)
    edges = np.linspace(0.0, t_max, n_panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    t = (mid[:, None] + half[:, None] * gl_x[None, :]).ravel()
    w = (half[:, None] * gl_w[None, :]).ravel()
    return t, w, cos_c, math.sin(c)


def density_by_inversion(alpha: float, x: np.ndarray) -> np.ndarray:
    """f(x) by quadrature of the inversion integral (bulk |x| not too large)."""
    x = np.asarray(x, dtype=float)
    t, w, cos_c, sin_c = _inversion_nodes(alpha, float(np.abs(x).max()))
    damp = np.exp(-(t**alpha) * cos_c) * w
    phase0 = t**alpha * sin_c
    out = np.empty_like(x)
    chunk = max(1, int(4e7) // len(t))
    for i in range(0, len(x), chunk):
        xs = x[i : i + chunk]
        out[i : i + chunk] = damp @ np.cos(phase0[:, None] - t[:, None] * xs[None, :])
    return out / math.pi


def density_left_series(alpha: float, y: np.ndarray, terms: int = 6) -> np.ndarray:
    """f(-y) for large y > 0 by the asymptotic (here convergent-enough) series."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    for k in range(1, terms + 1):
        coef = (
            (-1.0) ** (k - 1)
            * math.exp(gammaln(k * alpha + 1.0) - gammaln(k + 1.0))
            * math.sin(k * math.pi * (alpha - 1.0))
        )
        out += coef * y ** (-k * alpha - 1.0)
    return out / math.pi


def spectrally_negative_density(alpha: float, x: np.ndarray,
                                series_from: float = 20.0) -> np.ndarray:
    """Density of the unit spectrally negative law on an arbitrary grid."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    left = x < -series_from
    if left.any():
        out[left] = density_left_series(alpha, -x[left])
    if (~left).any():
        out[~left] = density_by_inversion(alpha, x[~left])
    return np.maximum(out, 0.0)


def default_cell_edges() -> np.ndarray:
    """Cell edges for tabulating the exponentially tilted child law.

    The left tail must reach far down: it is the e^{-x}-weighted region that
    controls the boundary-case integrals.  The right end is where the
    super-exponential tail of the tilted density dies.
    """
    parts = [
        np.arange(-300.0, -60.0, 0.1),
        np.arange(-60.0, -20.0, 0.02),
        np.arange(-20.0, -8.0, 0.01),
        np.arange(-8.0, 8.0, 0.0025),
        np.array([8.0]),
    ]
    return np.unique(np.concatenate(parts))


def tilted_child_cell_masses(alpha: float, edges: np.ndarray) -> np.ndarray:
    """Cell masses of q(x) = e^{x-1} f(x) by per-cell Simpson on the edges grid."""
    mids = (edges[:-1] + edges[1:]) / 2.0
    pts = np.unique(np.concatenate([edges, mids]))
    f = spectrally_negative_density(alpha, pts)
    q = np.exp(pts - 1.0) * f
    qe = np.interp(edges, pts, q)
    qm = np.interp(mids, pts, q)
    widths = np.diff(edges)
    masses = widths * (qe[:-1] + 4.0 * qm + qe[1:]) / 6.0
    return np.maximum(masses, 0.0)


def ideal_tail_weighted_moments(alpha: float, cut: float) -> tuple[float, float]:
    """Exact (int_{-inf}^{-cut} e^{-x} q dx, int_{-inf}^{-cut} x e^{-x} q dx).

    Uses e^{-x} q(x) = e^{-1} f(x) and the tail series of f; cut must be deep
    enough (>= ~15) for the series to have converged.
    """
    t0 = 0.0
    t1 = 0.0
    for k in range(1, 7):
        a_k = (
            (-1.0) ** (k - 1)
            * math.exp(gammaln(k * alpha + 1.0) - gammaln(k + 1.0))
            * math.sin(k * math.pi * (alpha - 1.0))
        )
        t0 += a_k * cut ** (-k * alpha) / (k * alpha)
        t1 += a_k * cut ** (1.0 - k * alpha) / (k * alpha - 1.0)
    return t0 / (math.pi * math.e), -t1 / (math.pi * math.e)


def match_left_tail(alpha: float, edges: np.ndarray, masses: np.ndarray,
                    cut: float = 20.0, split: float = 60.0) -> np.ndarray:
    """Reweight cells left of -cut so their e^{-x}- and x e^{-x}-weighted
    moments equal the ideal infinite tail's.

    The finite table must stop somewhere, but the removed tail still carries
    O(x^{-alpha*rho_bar}) weighted moments; two group multipliers (split at
    -split) restore them exactly.  The affected cells hold ~1e-11 of the
    plain probability mass, so the plain sampler is untouched.
    """
    a, b = edges[:-1], edges[1:]
    ea, eb = np.exp(-a), np.exp(-b)
    width = b - a
    e0 = (ea - eb) / width
    e1 = ((1.0 + a) * ea - (1.0 + b) * eb) / width
    g1 = b <= -split
    g2 = (b <= -cut) & (a >= -split)
    t0, t1 = ideal_tail_weighted_moments(alpha, cut)
    m = np.array([[masses[g1] @ e0[g1], masses[g2] @ e0[g2]],
                  [masses[g1] @ e1[g1], masses[g2] @ e1[g2]]])
    mult = np.linalg.solve(m, np.array([t0, t1]))
    if np.any(mult <= 0.0):
        raise ValueError(f"tail match produced nonpositive multipliers {mult}")
    out = masses.copy()
    out[g1] *= mult[0]
    out[g2] *= mult[1]
    return out
