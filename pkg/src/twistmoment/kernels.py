"""Smoothing kernels for approximate functional equations.

For a form of even weight kappa put a = kappa/2.  The two kernels are

    w1(x) = Q(a, 2 pi x)                 (value kernel)
    w2(y) = int_y^inf Q(a, 2 pi t) dt/t  (derivative kernel)

where Q is the regularized upper incomplete gamma function.  Both arise
as vertical-line integrals of Gamma(a + w) / Gamma(a) against dw/w and
dw/w^2 respectively; the contour forms are kept here as slow, independent
probes so the closed forms are never the only route to a value.

w2 is backed by a panelwise Chebyshev table in log y, built once per
(weight, tolerance) pair, because the moment harness evaluates it on
arrays of hundreds of thousands of points per twist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincc, loggamma

from .errors import DomainError, QuadratureError
from .smooth import _leggauss

_SQRT3 = math.sqrt(3.0)  # d(m) <= sqrt(3 m), sharp at m = 12


def gammainc_upper_reg(b: complex, x: np.ndarray) -> np.ndarray:
    """Regularized upper incomplete gamma Q(b, x) for complex b, real x >= 0.

    Series for the lower function when x < Re(b) + 1, modified Lentz
    continued fraction otherwise.  Matches scipy's gammaincc on the real
    axis; the complex capability is needed by the general-s functional
    equation, where the gamma shift picks up an imaginary part.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise DomainError("Q(b, x) requires x >= 0")
    if not isinstance(b, complex) and float(b) > 0:
        return gammaincc(float(b), x)

    out = np.empty(x.shape, dtype=np.complex128)
    out[x == 0] = 1.0
    small = (x > 0) & (x < b.real + 1.0)
    large = x >= max(b.real + 1.0, 0.0)

    lgb = complex(loggamma(b))
    if np.any(small):
        xs = x[small]
        # P(b, x) via the rising series, then Q = 1 - P.
        term = np.full(xs.shape, 1.0 / b, dtype=np.complex128)
        total = term.copy()
        n = 0
        while True:
            n += 1
            term = term * xs / (b + n)
            total += term
            if np.all(np.abs(term) <= 1e-17 * np.abs(total)) or n > 500:
                break
        p = total * np.exp(b * np.log(xs) - xs - lgb)
        out[small] = 1.0 - p
    if np.any(large):
        xl = x[large]
        tiny = 1e-300
        f = xl + 1.0 - b
        f = np.where(np.abs(f) < tiny, tiny, f).astype(np.complex128)
        c = f.copy()
        d = np.zeros_like(f)
        for i in range(1, 500):
            an = -i * (i - b)
            bn = xl + 2.0 * i + 1.0 - b
            d = bn + an * d
            d = np.where(np.abs(d) < tiny, tiny, d)
            c = bn + an / c
            c = np.where(np.abs(c) < tiny, tiny, c)
            d = 1.0 / d
            delta = c * d
            f = f * delta
            if np.all(np.abs(delta - 1.0) < 1e-16):
                break
        out[large] = np.exp(b * np.log(xl) - xl - lgb) / f
    return out


@dataclass
class KernelSuite:
    """Kernel evaluators bound to one even weight.

    tail_tolerance bounds the neglected mass in truncated kernel sums;
    w2_nodes and w2_panels control the direct quadrature used both for
    out-of-table arguments and for building the interpolation table.
    """

    weight: int
    tail_tolerance: float = 1e-10
    w2_nodes: int = 24
    w2_panels_per_unit: float = 2.0
    table_log_lo: float = math.log(1e-9)
    table_log_hi: float = math.log(32.0)
    table_panels: int = 96
    table_degree: int = 16
    _w2_coeffs: np.ndarray | None = field(default=None, repr=False)
    _w2_edges: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.weight < 2 or self.weight % 2:
            raise DomainError(f"weight must be a positive even integer, got {self.weight}")
        self.a = self.weight / 2.0

    # -- value kernel ---------------------------------------------------

    def w1(self, x) -> np.ndarray | float:
        """w1(x) = Q(a, 2 pi x); decreasing from 1 at x = 0+."""
        arr = np.asarray(x, dtype=np.float64)
        out = gammaincc(self.a, 2.0 * math.pi * arr)
        return float(out) if np.ndim(x) == 0 else out

    # -- derivative kernel ----------------------------------------------

    def _w2_upper_cutoff(self) -> float:
        """T with int_T^inf Q(a, 2 pi t) dt/t certified below 1e-18."""
        z = max(4.0 * self.a + 8.0, 20.0)
        while (self.a - 1.0) * math.log(z) - z - float(loggamma(self.a)) + math.log(
            4.0 / z
        ) > math.log(1e-18):
            z *= 1.25
        return z / (2.0 * math.pi)

    def _w2_direct(self, y: np.ndarray) -> np.ndarray:
        """Direct quadrature of int_y^inf Q(a, 2 pi t) dt/t per point."""
        y = np.atleast_1d(np.asarray(y, dtype=np.float64))
        if np.any(y <= 0):
            raise DomainError("w2 requires y > 0")
        t_hi = self._w2_upper_cutoff()
        out = np.zeros(y.shape)
        xg, wg = _leggauss(self.w2_nodes)
        for i, yi in enumerate(y):
            if yi >= t_hi:
                continue
            lo, hi = math.log(yi), math.log(t_hi)
            panels = max(16, int(math.ceil(self.w2_panels_per_unit * (hi - lo))))
            edges = np.linspace(lo, hi, panels + 1)
            half = 0.5 * (edges[1:] - edges[:-1])
            mid = 0.5 * (edges[1:] + edges[:-1])
            pts = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
            vals = gammaincc(self.a, 2.0 * math.pi * np.exp(pts))
            out[i] = float(np.sum(vals.reshape(panels, -1) @ wg * half))
        return out

    def _build_w2_table(self) -> None:
        edges = np.linspace(self.table_log_lo, self.table_log_hi, self.table_panels + 1)
        deg = self.table_degree
        # Chebyshev points of the first kind on each panel.
        theta = (2.0 * np.arange(deg + 1) + 1.0) * math.pi / (2.0 * (deg + 1))
        ref = np.cos(theta)
        coeffs = np.empty((self.table_panels, deg + 1))
        for k in range(self.table_panels):
            lo, hi = edges[k], edges[k + 1]
            u = 0.5 * (hi + lo) + 0.5 * (hi - lo) * ref
            vals = self._w2_direct(np.exp(u))
            # chebfit wants ascending sample order; ref is descending.
            coeffs[k] = np.polynomial.chebyshev.chebfit(ref[::-1], vals[::-1], deg)
        # Coeffs double as the lazy-init guard: assign it last so a
        # concurrent reader never sees coeffs without edges.
        self._w2_edges = edges
        self._w2_coeffs = coeffs

    def w2(self, y) -> np.ndarray | float:
        """w2(y) = int_y^inf Q(a, 2 pi t) dt/t, table-backed in the core range."""
        arr = np.atleast_1d(np.asarray(y, dtype=np.float64))
        if np.any(arr <= 0):
            raise DomainError("w2 requires y > 0")
        if self._w2_coeffs is None:
            self._build_w2_table()
        assert self._w2_edges is not None and self._w2_coeffs is not None
        out = np.empty(arr.shape)
        u = np.full(arr.shape, np.nan)
        inside = (arr >= math.exp(self.table_log_lo)) & (arr <= math.exp(self.table_log_hi))
        u[inside] = np.log(arr[inside])
        if np.any(~inside):
            out[~inside] = self._w2_direct(arr[~inside])
        if np.any(inside):
            idx = np.clip(
                np.searchsorted(self._w2_edges, u[inside], side="right") - 1,
                0,
                self.table_panels - 1,
            )
            ui = u[inside]
            res = np.empty(ui.shape)
            for k in np.unique(idx):
                sel = idx == k
                lo, hi = self._w2_edges[k], self._w2_edges[k + 1]
                ref = (2.0 * ui[sel] - (hi + lo)) / (hi - lo)
                res[sel] = np.polynomial.chebyshev.chebval(ref, self._w2_coeffs[k])
            # The fit noise floor (~1e-17) can dip below zero where the
            # true integral has already decayed past it; the kernel itself
            # is positive, so clamp.
            out[inside] = np.maximum(res, 0.0)
        return float(out[0]) if np.ndim(y) == 0 else out.reshape(np.shape(y))

    # -- gamma ratio and truncation lengths ------------------------------

    def gamma_ratio(self, s: complex) -> complex:
        """Gamma(a + s) / Gamma(a), via log-gamma for stability."""
        z = self.a + (s if isinstance(s, complex) else complex(s))
        if z.real <= 0 and abs(z.imag) < 1e-12 and abs(z.real - round(z.real)) < 1e-12:
            raise DomainError(f"gamma ratio pole at shift s={s} (a={self.a})")
        val = np.exp(loggamma(z) - loggamma(self.a))
        return complex(val)

    def _tail_bound(self, m: int, scale: float) -> float:
        """Upper bound for sum_{n>m} d(n) n^(-1/2) W(n/scale), both kernels.

        Uses d(n) n^(-1/2) <= sqrt(3) and Gamma(a, z) <= 2 z^(a-1) e^(-z)
        for z >= 2a; only valid once z0 = 2 pi m / scale clears 2a + 2.
        """
        z0 = 2.0 * math.pi * m / scale
        if z0 < 2.0 * self.a + 2.0:
            return math.inf
        logb = (
            math.log(4.0 * _SQRT3 * scale / (2.0 * math.pi))
            + (self.a - 1.0) * math.log(z0)
            - z0
            - float(loggamma(self.a))
        )
        return math.exp(min(logb, 700.0))

    def truncation_length(self, scale: float, tol: float | None = None) -> int:
        """Smallest m with the certified kernel-sum tail below tol."""
        if scale <= 0:
            raise DomainError("truncation scale must be positive")
        tol = self.tail_tolerance if tol is None else tol
        if tol <= 0:
            raise DomainError("tolerance must be positive")
        lo = max(1, int(math.ceil((2.0 * self.a + 2.0) * scale / (2.0 * math.pi))))
        hi = lo
        while self._tail_bound(hi, scale) >= tol:
            hi *= 2
            if hi > 1 << 40:
                raise QuadratureError("truncation search diverged")
        while lo < hi:
            mid = (lo + hi) // 2
            if self._tail_bound(mid, scale) < tol:
                hi = mid
            else:
                lo = mid + 1
        return hi

    def tail_bound(self, m: int, scale: float) -> float:
        """Public certified tail bound for a truncation at m."""
        return self._tail_bound(m, scale)


def _contour_integral(a: float, arg: float, power: int, t_max: float, panels: int, nodes: int) -> float:
    """(1/2 pi i) int_(3) (2 pi arg)^(-w) Gamma(a+w)/Gamma(a) dw / w^power."""
    xg, wg = _leggauss(nodes)
    edges = np.linspace(-t_max, t_max, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = 3.0 + 1j * t
    lg = loggamma(a + w) - loggamma(a)
    vals = np.exp(lg - w * math.log(2.0 * math.pi * arg)) / w**power
    vals = vals.reshape(panels, nodes)
    return float(np.real(np.sum((vals @ wg) * half)) / (2.0 * math.pi))


def w1_contour(weight: int, x: float, t_max: float = 80.0, panels: int = 200, nodes: int = 16) -> float:
    """Contour-integral evaluation of w1; slow oracle for the closed form."""
    return _contour_integral(weight / 2.0, x, 1, t_max, panels, nodes)


def w2_contour(weight: int, y: float, t_max: float = 80.0, panels: int = 200, nodes: int = 16) -> float:
    """Contour-integral evaluation of w2; slow oracle for the quadrature."""
    return _contour_integral(weight / 2.0, y, 2, t_max, panels, nodes)
