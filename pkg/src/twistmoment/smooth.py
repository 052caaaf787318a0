"""Compactly supported smooth weights and their cosine+sine transform.

The four standard weights are built from the classic exp(-1/u) mollifier:

* step:      psi rises smoothly from 0 (x <= 3/4) to 1 (x >= 1)
* partition: G(x) = psi(x) - psi(x/2), one dyadic partition bump
* window:    V(x) = G(x/2) + G(x) + G(2x), equal to 1 on supp(G)
* bump:      J(x) = exp(-1/((x-1/2)(2-x))) on (1/2, 2)

The transform checked here is Fhat(xi) = int (cos + sin)(2 pi x xi) F(x) dx,
the self-dual combination that appears in Poisson summation for real
characters, plus a Mellin-line evaluation of the same quantity used as an
independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import loggamma

from .errors import QuadratureError


@lru_cache(maxsize=32)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def panel_quadrature(
    fn: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    panels: int,
    nodes: int = 16,
) -> float:
    """Composite Gauss-Legendre integral of fn over [lo, hi]."""
    x, w = _leggauss(nodes)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = fn(pts).reshape(panels, nodes)
    return float(np.sum(vals @ w * half))


def _converged_quadrature(
    fn: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    panels: int,
    nodes: int,
    rel_tol: float,
    what: str,
) -> float:
    """Panel-doubling loop: two successive counts must agree to rel_tol.

    The doubling sequence is fixed by the starting count, so results are
    deterministic; the glued mollifier transitions sometimes need a few
    rounds before the composite rule resolves them.
    """
    prev = panel_quadrature(fn, lo, hi, panels, nodes)
    for _ in range(8):
        panels *= 2
        cur = panel_quadrature(fn, lo, hi, panels, nodes)
        if abs(cur - prev) <= rel_tol * (1.0 + abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(f"{what} did not converge: {prev} vs {cur}")


@dataclass(frozen=True)
class TransformConfig:
    """Quadrature and truncation knobs for transform evaluations.

    nodes:            Gauss-Legendre nodes per panel.
    min_panels:       panel floor for slowly oscillating integrands.
    panels_per_cycle: panels allotted to each full oscillation period.
    rel_tol:          doubling-convergence tolerance for the quadrature.
    k_min / k_scale:  dual-sum truncation: |k| <= max(k_min, ceil(k_scale*n/Z)*k_scale).
    """

    nodes: int = 16
    min_panels: int = 8
    panels_per_cycle: float = 4.0
    rel_tol: float = 1e-9
    k_min: int = 32
    k_scale: int = 8


@dataclass(frozen=True)
class SmoothWeight:
    """A smooth compactly supported weight function on (0, infinity)."""

    kind: str
    support: tuple[float, float]
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x) -> np.ndarray | float:
        arr = np.asarray(x, dtype=np.float64)
        out = self.fn(arr)
        if np.ndim(x) == 0:
            return float(out)
        return out

    def integral(self, cfg: TransformConfig | None = None) -> float:
        """int_0^inf F(x) dx, with a doubling convergence check."""
        cfg = cfg or TransformConfig()
        lo, hi = self.support
        return _converged_quadrature(
            self.fn, lo, hi, max(cfg.min_panels, 32), cfg.nodes, cfg.rel_tol,
            f"integral of {self.kind}",
        )


def _mollifier(u: np.ndarray) -> np.ndarray:
    """h(u) = exp(-1/u) for u > 0, else 0; the C-infinity step ingredient."""
    out = np.zeros_like(u)
    pos = u > 0
    with np.errstate(over="ignore"):
        out[pos] = np.exp(-1.0 / u[pos])
    return out


def _sigma(u: np.ndarray) -> np.ndarray:
    """Smooth 0-to-1 ramp on [0, 1]: h(u) / (h(u) + h(1-u))."""
    u = np.asarray(u, dtype=np.float64)
    hu = _mollifier(u)
    hc = _mollifier(1.0 - u)
    out = np.zeros_like(u)
    inside = (u > 0) & (u < 1)
    out[inside] = hu[inside] / (hu[inside] + hc[inside])
    out[u >= 1] = 1.0
    return out


def make_step_psi() -> SmoothWeight:
    """Smooth step: 0 for x <= 3/4, 1 for x >= 1, strictly rising between."""

    def psi(x: np.ndarray) -> np.ndarray:
        return _sigma((np.asarray(x, dtype=np.float64) - 0.75) * 4.0)

    return SmoothWeight(kind="step", support=(0.75, 1.0), fn=psi)


def make_partition_G() -> SmoothWeight:
    """Dyadic partition bump G(x) = psi(x) - psi(x/2), supported on [3/4, 2]."""
    psi = make_step_psi().fn

    def g(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return psi(x) - psi(x / 2.0)

    return SmoothWeight(kind="partition", support=(0.75, 2.0), fn=g)


def make_window_V() -> SmoothWeight:
    """Window V(x) = G(x/2) + G(x) + G(2x); identically 1 on supp(G)."""
    g = make_partition_G().fn

    def v(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return g(x / 2.0) + g(x) + g(2.0 * x)

    return SmoothWeight(kind="window", support=(0.375, 4.0), fn=v)


def make_bump_J() -> SmoothWeight:
    """Flat-ended bump exp(-1/((x-1/2)(2-x))) on the open interval (1/2, 2)."""

    def j(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros_like(x)
        inside = (x > 0.5) & (x < 2.0)
        xi = x[inside]
        out[inside] = np.exp(-1.0 / ((xi - 0.5) * (2.0 - xi)))
        return out

    return SmoothWeight(kind="bump", support=(0.5, 2.0), fn=j)


WEIGHTS: dict[str, Callable[[], SmoothWeight]] = {
    "step": make_step_psi,
    "partition": make_partition_G,
    "window": make_window_V,
    "bump": make_bump_J,
}


def check_transform(
    weight: SmoothWeight, xi: float, cfg: TransformConfig | None = None
) -> float:
    """Evaluate Fhat(xi) = int (cos(2 pi x xi) + sin(2 pi x xi)) F(x) dx.

    Deterministic composite Gauss-Legendre rule; the panel count scales
    with the number of oscillation periods across the support and doubles
    until two successive counts agree to cfg.rel_tol (QuadratureError if
    they never do).
    """
    cfg = cfg or TransformConfig()
    lo, hi = weight.support
    cycles = abs(xi) * (hi - lo)
    panels = max(cfg.min_panels, int(math.ceil(cfg.panels_per_cycle * cycles)))

    def integrand(x: np.ndarray) -> np.ndarray:
        phase = 2.0 * math.pi * xi * x
        return (np.cos(phase) + np.sin(phase)) * weight.fn(x)

    return _converged_quadrature(
        integrand, lo, hi, panels, cfg.nodes, cfg.rel_tol,
        f"transform of {weight.kind} at xi={xi}",
    )


def mellin_transform(
    weight: SmoothWeight, s: complex, cfg: TransformConfig | None = None
) -> complex:
    """F~(s) = int F(x) x^(s-1) dx over the (positive) support."""
    cfg = cfg or TransformConfig()
    lo, hi = weight.support
    x, w = _leggauss(cfg.nodes)
    panels = 64
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = weight.fn(pts) * np.exp((s - 1.0) * np.log(pts))
    return complex(np.sum((vals.reshape(panels, -1) @ w) * half))


def transform_via_mellin_line(
    weight: SmoothWeight,
    xi: float,
    sigma: float = 0.5,
    t_max: float = 300.0,
    t_panels: int = 900,
    nodes: int = 16,
) -> float:
    """Independent Mellin-line evaluation of the cosine+sine transform.

    Fhat(xi) = (1/2 pi i) int_(sigma) F~(1-s) Gamma(s)
               (cos + sgn(xi) sin)(pi s / 2) (2 pi |xi|)^(-s) ds,  xi != 0.

    Used as an oracle against check_transform; quadrature along the
    vertical line s = sigma + i t truncated at |t| = t_max.  F~ of these
    mollifier-built weights decays only like exp(-c sqrt(t)), so the line
    must run this far before the integrand is negligible.
    """
    if xi == 0.0:
        raise ValueError("Mellin-line representation requires xi != 0")
    sgn = 1.0 if xi > 0 else -1.0
    lo, hi = weight.support

    # Precompute the x-quadrature once; F~(1-s) shares nodes across t.
    xg, wg = _leggauss(nodes)
    panels = 64
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    fw = (weight.fn(pts).reshape(panels, nodes) * wg[None, :]) * half[:, None]
    fw = fw.ravel()
    logx = np.log(pts)

    tg, tw = _leggauss(nodes)
    tedges = np.linspace(-t_max, t_max, t_panels + 1)
    thalf = 0.5 * (tedges[1:] - tedges[:-1])
    tmid = 0.5 * (tedges[1:] + tedges[:-1])
    tpts = (tmid[:, None] + thalf[:, None] * tg[None, :]).ravel()

    s = sigma + 1j * tpts
    # F~(1-s) in t-chunks: the full outer product would be t_panels*nodes
    # by 1024 complex entries, too large at this line length.
    mell = np.empty(len(s), dtype=np.complex128)
    chunk = 4096
    for i in range(0, len(s), chunk):
        mell[i : i + chunk] = np.exp(np.outer(-s[i : i + chunk], logx)) @ fw
    trig = np.cos(0.5 * np.pi * s) + sgn * np.sin(0.5 * np.pi * s)
    vals = mell * np.exp(loggamma(s)) * trig * np.exp(-s * math.log(2.0 * math.pi * abs(xi)))
    vals = vals.reshape(t_panels, nodes)
    line = np.sum((vals @ tw) * thalf)
    # ds = i dt and the 1/(2 pi i) prefactor leave a real 1/(2 pi).
    return float(np.real(line) / (2.0 * math.pi))
