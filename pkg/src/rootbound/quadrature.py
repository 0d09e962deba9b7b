"""Adaptive Gauss-Kronrod quadrature for gamma-weighted integrals.

The central operation is

    integrate_gamma_weighted(f, alpha, cfg) = integral over (0, inf) of
        f(x) * x^(alpha-1) * e^(-x) dx

with complex alpha (re(alpha) > 0).  The domain is split at x = 1; both
pieces are integrated in u = log x, which turns the oscillation of
x^(i im(alpha)) into a constant-frequency phase im(alpha)*u and removes the
endpoint singularity of x^(alpha-1).  The right end is truncated where the
weight envelope (with headroom for polynomially growing f) drops below the
working tolerance, and for very small real alpha the left end is replaced by
a two-term analytic head so the log-domain stays bounded.

Error control per call succeeds when the summed Kronrod error estimate is
below max(abs_tol, rel_tol*|value|, cancellation floor); the floor is
4*eps*sum|panel| and matters only for strongly oscillatory integrands whose
value sits many orders below the integrand scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_genlaguerre

from .errors import DomainError, ToleranceNotMetError
from .numerics import log_gamma, regularized_incomplete_gamma_lower

__all__ = [
    "QuadratureConfig",
    "integrate_gamma_weighted",
    "integrate_gamma_weighted_laguerre",
    "gauss_laguerre_nodes",
]


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    laguerre_order: int = 200

    def __post_init__(self) -> None:
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise DomainError("tolerances must be positive")
        if self.max_subdivisions < 8 or self.laguerre_order < 8:
            raise DomainError("orders must be >= 8")


# 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15 constants).
_XGK = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG7 = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])
# Gauss weights spread onto the 15 Kronrod slots (odd indices).
_WG15 = np.zeros(15)
_WG15[1::2] = _WG7
_WDIFF = _WGK - _WG15

_EPS = np.finfo(float).eps
_MAX_ROUNDS = 64
# Below this real part the log-domain lower limit explodes; switch to the
# analytic two-term head on (0, _HEAD_X0].
_SMALL_ALPHA = 0.2
_HEAD_X0 = 3e-5


def gauss_laguerre_nodes(n: int, alpha_shift: float):
    """Nodes/weights for the weight x^alpha_shift * e^(-x) on (0, inf)."""
    if n < 8:
        raise DomainError("laguerre order must be >= 8")
    if alpha_shift <= -1.0:
        raise DomainError("alpha_shift must exceed -1")
    return roots_genlaguerre(n, alpha_shift)


def _vectorized(f):
    """Accept both vectorized and scalar integrands."""
    probe = np.array([0.5, 1.5])
    try:
        out = np.asarray(f(probe))
        if out.shape == probe.shape:
            return f
    except Exception:
        pass
    return np.vectorize(f)


def _right_cutoff(re_alpha: float, tol: float) -> float:
    # Solve x^(re_alpha + 5) * e^(-x) = tol; the +5 headroom admits
    # integrands growing up to ~x^6 (positive powers from exponent p < 0).
    power = re_alpha + 5.0
    x = max(2.0 * power, 20.0)
    target = math.log(tol)
    for _ in range(60):
        g = power * math.log(x) - x - target
        dg = power / x - 1.0
        step = g / dg
        x_new = x - step
        if x_new < power:
            x_new = 0.5 * (x + power)
        if abs(x_new - x) < 1e-9 * x:
            x = x_new
            break
        x = x_new
    return max(x, 2.0)


def _initial_edges(u_lo: float, u_hi: float, freq: float) -> np.ndarray:
    length = u_hi - u_lo
    n_smooth = int(math.ceil(length / 0.5))
    n_osc = int(math.ceil(length * freq / 6.0))
    n = max(n_smooth, n_osc, 1)
    return np.linspace(u_lo, u_hi, n + 1)


class _PanelSet:
    """Adaptive panel batch on a fixed u-interval for one integrand."""

    def __init__(self, edges: np.ndarray) -> None:
        self.lo = edges[:-1].copy()
        self.hi = edges[1:].copy()

    def __len__(self) -> int:
        return self.lo.size

    def evaluate(self, g):
        mid = 0.5 * (self.lo + self.hi)
        half = 0.5 * (self.hi - self.lo)
        us = mid[:, None] + half[:, None] * _XGK[None, :]
        vals = g(us.ravel()).reshape(us.shape)
        gk = vals @ _WGK
        self.integrals = gk * half
        self.l1 = (np.abs(vals) @ _WGK) * half
        raw = np.abs(vals @ _WDIFF) * half
        # QUADPACK-style damping: on resolved panels the raw GK difference
        # saturates at roundoff of the panel's L1 mass; scaling by the
        # integrand's variation (resasc) lets those panels report their true
        # tiny error instead of the roundoff plateau.
        asc = (np.abs(vals - 0.5 * gk[:, None]) @ _WGK) * half
        with np.errstate(divide="ignore", invalid="ignore"):
            damp = np.minimum(1.0, (200.0 * raw / asc) ** 1.5)
        self.errors = np.where(asc > 0.0, asc * np.where(np.isnan(damp), 1.0, damp), raw)

    def split_worst(self) -> None:
        # Bisect the smallest prefix of error-sorted panels holding half the
        # total error estimate; keeps rounds few without oversplitting.
        order = np.argsort(self.errors)[::-1]
        cum = np.cumsum(self.errors[order])
        k = int(np.searchsorted(cum, 0.5 * cum[-1])) + 1
        split_idx = order[:k]
        keep = np.ones(len(self), dtype=bool)
        keep[split_idx] = False
        lo_s, hi_s = self.lo[split_idx], self.hi[split_idx]
        mid_s = 0.5 * (lo_s + hi_s)
        self.lo = np.concatenate([self.lo[keep], lo_s, mid_s])
        self.hi = np.concatenate([self.hi[keep], mid_s, hi_s])

    def totals(self):
        # Fixed summation order (by left endpoint) so results do not depend
        # on refinement history bookkeeping.
        order = np.argsort(self.lo, kind="stable")
        value = complex(np.sum(self.integrals[order]))
        err = float(np.sum(self.errors))
        l1 = float(np.sum(self.l1))
        return value, err, l1


def integrate_gamma_weighted(f, alpha, cfg: QuadratureConfig | None = None):
    """Integral of f(x) * x^(alpha-1) * e^(-x) over (0, inf).

    f must accept numpy arrays of positive reals (scalar fallback is wrapped
    automatically) and be polynomially bounded at infinity and o(x^-re(alpha))
    at 0.  Returns a complex value for complex alpha, float for real alpha
    with real f values.

    Raises ToleranceNotMetError (carrying the best estimate and the achieved
    bound) if max_subdivisions panels cannot reach
    max(abs_tol, rel_tol*|result|).
    """
    if cfg is None:
        cfg = QuadratureConfig()
    alpha = complex(alpha)
    re_a = alpha.real
    if not (re_a > 0.0) or not math.isfinite(re_a) or not math.isfinite(alpha.imag):
        raise DomainError("integrate_gamma_weighted requires finite alpha with re(alpha) > 0")
    fv = _vectorized(f)

    trunc_tol = max(cfg.abs_tol * 1e-3, 1e-18)
    head = 0.0 + 0.0j
    alpha_is_real = alpha.imag == 0.0
    if alpha_is_real and re_a < _SMALL_ALPHA:
        # Two-term analytic head: f approximated linearly on (0, x0], the
        # remaining moments are lower incomplete gammas.
        x0 = _HEAD_X0
        f_x0 = complex(np.asarray(fv(np.array([x0])))[0])
        f_half = complex(np.asarray(fv(np.array([0.5 * x0])))[0])
        f0 = 2.0 * f_half - f_x0
        f1 = (f_x0 - f_half) / (0.5 * x0)
        g0 = regularized_incomplete_gamma_lower(re_a, x0) * math.exp(log_gamma(re_a))
        g1 = regularized_incomplete_gamma_lower(re_a + 1.0, x0) * math.exp(log_gamma(re_a + 1.0))
        head = f0 * g0 + f1 * g1
        u_lo = math.log(x0)
    else:
        u_lo = math.log(trunc_tol * re_a) / re_a
        u_lo = min(u_lo, -1.0)
    x_hi = _right_cutoff(re_a, trunc_tol)
    u_hi = math.log(x_hi)

    freq = abs(alpha.imag)

    def g(us: np.ndarray):
        xs = np.exp(us)
        return np.asarray(fv(xs)) * np.exp(alpha * us - xs)

    # Domain split at x = 1 (u = 0): panel edges never straddle the seam.
    edges = np.unique(np.concatenate([
        _initial_edges(u_lo, 0.0, freq),
        _initial_edges(0.0, u_hi, freq),
    ]))
    panels = _PanelSet(edges)
    panels.evaluate(g)
    for _ in range(_MAX_ROUNDS):
        value, err, l1 = panels.totals()
        # 4*eps*l1 is the cancellation floor: no refinement can push the
        # estimated error below roundoff of the integrand's L1 mass.
        target = max(cfg.abs_tol, cfg.rel_tol * abs(value + head), 4.0 * _EPS * l1)
        if err <= target:
            break
        if len(panels) >= cfg.max_subdivisions:
            raise ToleranceNotMetError(
                "gamma-weighted quadrature did not converge", value + head, err)
        panels.split_worst()
        panels.evaluate(g)
    else:
        value, err, l1 = panels.totals()
        if err > max(cfg.abs_tol, cfg.rel_tol * abs(value + head), 4.0 * _EPS * l1):
            raise ToleranceNotMetError(
                "gamma-weighted quadrature did not converge", value + head, err)

    total = value + head
    if alpha_is_real and not np.iscomplexobj(np.asarray(fv(np.array([1.0])))):
        return float(total.real)
    return total


def integrate_gamma_weighted_laguerre(f, alpha: float, cfg: QuadratureConfig | None = None):
    """Fixed-order generalized Gauss-Laguerre evaluation of the same
    integral, for real alpha only.

    This is the internal consistency path: a completely different
    discretization whose agreement with the adaptive result is asserted in
    the test suite rather than at call time (Laguerre converges slower for
    integrands with poles near the domain and would false-alarm).
    """
    if cfg is None:
        cfg = QuadratureConfig()
    alpha = float(alpha)
    if not alpha > 0.0:
        raise DomainError("laguerre path requires real alpha > 0")
    nodes, weights = gauss_laguerre_nodes(cfg.laguerre_order, alpha - 1.0)
    fv = _vectorized(f)
    vals = np.asarray(fv(nodes))
    total = np.sum(weights * vals)
    if np.iscomplexobj(vals):
        return complex(total)
    return float(total)
