"""Heat kernels of dressed potentials built from a causal initial kernel.

The N-fold dressing is the product of first-order factors
``A_k = d/dx - (ln phi_k[k-1])_x``.  Solving ``A_N ... A_1 rho0 = delta(x-y)``
with ``rho0 = 0`` for ``x < y`` gives the triangular initial kernel; its free
Gaussian propagation, dressed in x, is the heat kernel of ``u[N]``.

For ``x > y`` the initial kernel lies in the null space of the dressing
operator, which is spanned by the seeds, so
``rho0(x, y) = H(x - y) sum_k c_k(y) phi_k(x)`` with ``c(y)`` fixed by the
jump conditions (continuous derivatives up to order N-2, unit jump in the
(N-1)-th).  :func:`initial_condition` instead inverts the first-order
factors one by one with nested quadrature; the two must agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr

from . import _kernels
from .dressing import (
    COSH,
    DressingChain,
    _scaled_matrix,
    dress_derivatives,
    dressed_seed_log,
    logcosh,
)
from .errors import DomainError, QuadratureFailure
from .quadrature import integrate, panel_nodes

#: Marker for the delta initial condition in :func:`free_propagate`.
DELTA = "delta"

_NESTED_RTOL = 1e-10


def free_kernel(tau, x, y, order=0):
    """``d^order/dx^order`` of ``exp(-(x-y)^2 / 4 tau) / (2 sqrt(pi tau))``."""
    tau = _check_tau(tau)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    scale = 1.0 / (2.0 * math.sqrt(tau))
    s = (x - y) * scale
    g = np.exp(-s * s) * scale / math.sqrt(math.pi)
    # physicists' Hermite polynomial H_order(s)
    h_prev, h_cur = np.zeros_like(s), np.ones_like(s)
    for k in range(order):
        h_prev, h_cur = h_cur, 2.0 * s * h_cur - 2.0 * k * h_prev
    out = (-scale) ** order * h_cur * g
    return out if out.ndim else float(out)


def _check_tau(tau):
    tau = float(tau)
    if not tau > 0:
        raise DomainError(f"diffusion time must be positive, got {tau!r}")
    return tau


@dataclass(frozen=True)
class TriangularKernel:
    """``rho0(x, y) = H(x - y) K(x, y)``, the causal solution of the factor chain."""

    chain: DressingChain

    def __post_init__(self):
        if self.chain.size == 0:
            raise DomainError("the triangular kernel needs a chain with N >= 1")

    @property
    def size(self):
        return self.chain.size

    def coefficients(self, y):
        """Scaled coefficients ``c_k(y) cosh(b_k y)``, shape ``y.shape + (N,)``.

        With ``M(y)[j, k] = phi_k^(j)(y)`` they solve ``M c = e_{N-1}``.
        """
        y = np.asarray(y, dtype=float)
        n = self.size
        mat = _scaled_matrix(self.chain, y, range(n))
        rhs = np.zeros(y.shape + (n, 1))
        rhs[..., n - 1, 0] = 1.0
        return np.linalg.solve(mat, rhs)[..., 0]

    def smooth_factor(self, x, y, order=0, coef=None):
        """``d^order K / dx^order`` (no step), overflow-safe in x - y.

        ``coef`` may carry ``self.coefficients(y)`` already broadcast
        against ``x`` to skip the per-point solves.
        """
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        if coef is None:
            coef = self.coefficients(y)
        out = np.zeros(x.shape)
        for k, seed in enumerate(self.chain.seeds):
            ratio = np.exp(seed.log_scale(x) - seed.log_scale(y))
            out = out + coef[..., k] * seed.scaled(x, order) * ratio
        return out

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        out = np.where(x >= y, self.smooth_factor(x, y), 0.0)
        return out if out.ndim else float(out)

    def jump(self, y, order=None):
        """Jump of ``d^order rho0/dx^order`` across x = y (default order N-1)."""
        order = self.size - 1 if order is None else order
        out = self.smooth_factor(y, y, order)
        return out if np.ndim(out) else float(out)

    def growth_rate(self) -> float:
        return float(self.chain.seeds[-1].b)


def initial_condition(chain: DressingChain, x: float, y: float, *, rtol=_NESTED_RTOL) -> float:
    """``rho0(x, y)`` by backward inversion of the first-order factors.

    The last factor gives ``g_{N-1} = phi_N[N-1](x) H(x-y) / phi_N[N-1](y)``;
    each earlier one is inverted as
    ``g_{k-1}(x) = phi_k[k-1](x) H(x-y) int_y^x g_k(z) / phi_k[k-1](z) dz``.
    Integration constants are fixed by causality (``g_k = 0`` for x < y).
    """
    if chain.size == 0:
        raise DomainError("initial_condition needs a chain with N >= 1")
    x = float(x)
    y = float(y)
    if x < y:
        return 0.0
    n = chain.size

    def log_seed(k, pts):
        return dressed_seed_log(chain, k, pts)

    def g(k, pts):
        # g_k at the points ``pts`` (array, all >= y); 0 <= k <= N-1
        pts = np.asarray(pts, dtype=float)
        top = n - 1
        if k == top:
            return np.exp(log_seed(n, pts) - log_seed(n, y))
        out = np.empty(pts.shape)
        for i, p in enumerate(pts.ravel()):
            if p <= y:
                out.flat[i] = 0.0
                continue
            lp = log_seed(k + 1, p)

            def integrand(z, lp=lp):
                return g(k + 1, z) * np.exp(lp - log_seed(k + 1, z))

            res = integrate(integrand, y, p, rtol=rtol, order=16, raise_on_failure=False)
            if res.error > rtol * max(abs(res.value), 1e-300) and res.error > 1e-14:
                raise QuadratureFailure(
                    f"nested quadrature for g_{k} at x={p} did not reach rtol={rtol}",
                    value=res.value, error=res.error)
            out.flat[i] = res.value
        return out

    return float(g(0, np.array([x]))[0])


# ---------------------------------------------------------------------------
# free propagation
# ---------------------------------------------------------------------------

_SUPPORTS = ("causal", "anticausal", "auto")


def _sides(support, x, y):
    """+1 where the causal kernel is used, -1 for the anti-causal one."""
    if support not in _SUPPORTS:
        raise ValueError(f"support must be one of {_SUPPORTS}, got {support!r}")
    if support == "causal":
        return np.ones(x.shape)
    if support == "anticausal":
        return -np.ones(x.shape)
    return np.where(x <= y, 1.0, -1.0)


def _integration_window(kernel: TriangularKernel, tau, x, y, side):
    root = math.sqrt(tau)
    drift = 2.0 * kernel.growth_rate() * tau
    lo = x - drift - 12.0 * root
    hi = x + drift + 12.0 * root
    lower = np.where(side > 0, np.maximum(y, lo), lo)
    upper = np.where(side > 0, hi, np.minimum(y, hi))
    return lower, upper


def propagate_derivatives(kernel, tau, x, y, max_order, *, support="causal", rtol=1e-11,
                          order=16, max_doublings=8):
    """All x-derivatives ``0..max_order`` of the freely propagated kernel.

    Quadrature version of ``d^j/dx^j int G0(x - z) rho0(z, y) dz``; the
    derivatives act on the Gaussian (Hermite weights).  ``support`` picks
    the initial kernel: ``"causal"`` is ``H(x - y) K``, ``"anticausal"`` is
    ``-H(y - x) K`` and ``"auto"`` uses the causal one for ``x <= y`` and
    the anti-causal one otherwise.  Both solve the same factor chain and
    differ by a combination of seeds, which dressing annihilates; the
    choice only affects conditioning.

    Every target uses the same number of equal panels over its own
    window; the panel count doubles until all targets agree with the
    previous level to ``rtol`` relative to the sum of absolute terms.
    Returns ``(values, errors)`` of shape ``(max_order + 1,) + x.shape``.
    """
    tau = _check_tau(tau)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    xf = x.ravel().copy()
    yf = y.ravel().copy()
    if kernel == DELTA:
        vals = np.array([free_kernel(tau, xf, yf, k) for k in range(max_order + 1)])
        return vals.reshape((max_order + 1,) + shape), np.zeros((max_order + 1,) + shape)
    side = _sides(support, xf, yf)
    lower, upper = _integration_window(kernel, tau, xf, yf, side)
    span = float(np.max(upper - lower, initial=0.0))
    scale = min(math.sqrt(tau), 1.0 / kernel.growth_rate())
    panels = max(2, int(math.ceil(span / scale)))
    coef = kernel.coefficients(yf)[:, None, :] * side[:, None, None]
    prev = None
    for _ in range(max_doublings + 1):
        z, w = panel_nodes(lower, upper, panels, order)
        f = kernel.smooth_factor(z, yf[:, None], coef=coef)
        sums, abs_sums = _kernels.hermite_gaussian_sums(xf, z, w, f, tau, max_order)
        if prev is not None:
            err = np.abs(sums - prev)
            tol = rtol * np.maximum(abs_sums, np.abs(sums)) + 1e-300
            if np.all(err <= tol):
                return sums.reshape((max_order + 1,) + shape), err.reshape((max_order + 1,) + shape)
        prev = sums
        panels *= 2
    worst = float(np.max(err / (np.maximum(abs_sums, np.abs(sums)) + 1e-300)))
    raise QuadratureFailure(
        f"free propagation did not converge (relative error {worst:.2e} > {rtol:.0e})",
        value=sums, error=err)


def _propagate_exact(kernel: TriangularKernel, tau, x, y, max_order, support="causal"):
    """Closed-form propagation of the exponential-sum kernel (erfc form).

    ``int_y^inf G0(x-z) e^{c z} dz = e^{c x + c^2 tau} Phi((x - y + 2 c tau)/sqrt(2 tau))``
    with ``Phi`` the normal CDF (the anti-causal integral has ``-Phi(-.)``),
    and each x-derivative adds the boundary term ``e^{c y} d^j G0(x - y)``.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    side = _sides(support, x, y)
    coef = kernel.coefficients(y)
    out = np.zeros((max_order + 1,) + x.shape)
    g0 = [free_kernel(tau, x, y, j) for j in range(max_order)]
    for k, seed in enumerate(kernel.chain.seeds):
        b = seed.b
        sign_minus = 1.0 if seed.parity == COSH else -1.0
        lc_y = logcosh(b * y)
        for c, weight in ((b, 0.5), (-b, 0.5 * sign_minus)):
            arg = side * (x - y + 2.0 * c * tau) / math.sqrt(2.0 * tau)
            e_term = side * np.exp(c * x + c * c * tau + log_ndtr(arg) - lc_y)
            boundary = np.exp(c * y - lc_y)
            for order in range(max_order + 1):
                val = c ** order * e_term
                for j in range(order):
                    val = val + c ** (order - 1 - j) * boundary * g0[j]
                out[order] += weight * coef[..., k] * val
    return out


def free_propagate(rho0, tau, x, y, deriv_order=0, *, method="quadrature",
                   support="causal", rtol=1e-11):
    """``d^deriv_order/dx^deriv_order`` of the free evolution of ``rho0``.

    ``rho0`` is a :class:`TriangularKernel` or :data:`DELTA`, in which case
    the free kernel and its derivatives are returned exactly.  ``method``
    is ``"quadrature"`` (Gaussian-weighted panels) or ``"exact"`` (erfc
    closed form of the exponential-sum kernel).  ``support`` is passed to
    :func:`propagate_derivatives`.
    """
    tau = _check_tau(tau)
    if isinstance(rho0, TriangularKernel) and deriv_order > rho0.size:
        raise DomainError(f"derivative order {deriv_order} exceeds N = {rho0.size}")
    if rho0 == DELTA:
        return free_kernel(tau, x, y, deriv_order)
    if method == "exact":
        out = _propagate_exact(rho0, tau, x, y, deriv_order, support)[deriv_order]
    elif method == "quadrature":
        out = propagate_derivatives(rho0, tau, x, y, deriv_order, support=support,
                                    rtol=rtol)[0][deriv_order]
    else:
        raise ValueError(f"unknown propagation method {method!r}")
    return out if out.ndim else float(out)


def dressed_kernel(chain: DressingChain, tau, x, y, *, method="quadrature",
                   support="auto", rtol=1e-11):
    """Heat kernel of ``u[N]``: the free-propagated initial kernel, dressed in x.

    With ``support="causal"`` this is literally the dressing of the
    propagated triangular kernel; the default ``"auto"`` switches to the
    anti-causal kernel for ``x > y``, which yields the same function but
    avoids the ``exp(b_N (x - y))`` cancellation inside the dressing.
    """
    tau = _check_tau(tau)
    if chain.size == 0:
        return free_kernel(tau, x, y)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    kernel = TriangularKernel(chain)
    n = chain.size
    if method == "exact":
        derivs = _propagate_exact(kernel, tau, x, y, n, support)
    elif method == "quadrature":
        derivs = propagate_derivatives(kernel, tau, x, y, n, support=support, rtol=rtol)[0]
    else:
        raise ValueError(f"unknown propagation method {method!r}")
    out = dress_derivatives(chain, x, derivs)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class HeatKernel:
    """Evaluator ``rho(tau, x, y)`` of one of the supported constructions.

    ``kind`` is ``"free"``, ``"dressed-numeric"`` or ``"closed-form"``.
    """

    kind: str
    chain: DressingChain = DressingChain()
    m: float | None = None
    variant: str = "exp-corrected"
    method: str = "quadrature"
    support: str = "auto"

    @classmethod
    def free(cls):
        return cls("free")

    @classmethod
    def dressed(cls, chain: DressingChain, method="quadrature", support="auto"):
        return cls("dressed-numeric", chain=chain, method=method, support=support)

    @classmethod
    def closed_form(cls, m=1.0, variant="exp-corrected"):
        return cls("closed-form", chain=DressingChain.kink(m), m=m, variant=variant)

    def __call__(self, tau, x, y):
        if self.kind == "free":
            return free_kernel(tau, x, y)
        if self.kind == "dressed-numeric":
            return dressed_kernel(self.chain, tau, x, y, method=self.method,
                                  support=self.support)
        if self.kind == "closed-form":
            from .kink import kink_kernel
            return kink_kernel(tau, x, y, self.m, self.variant)
        raise ValueError(f"unknown kernel kind {self.kind!r}")

    def derivatives(self, tau, x, y, max_order=None):
        """x-derivatives of the propagated kernel before dressing (orders 0..N)."""
        max_order = self.chain.size if max_order is None else max_order
        if self.kind == "free" or self.chain.size == 0:
            return np.array([free_kernel(tau, x, y, k) for k in range(max_order + 1)])
        kernel = TriangularKernel(self.chain)
        if self.method == "exact":
            return _propagate_exact(kernel, _check_tau(tau), x, y, max_order, self.support)
        return propagate_derivatives(kernel, tau, x, y, max_order, support=self.support)[0]
