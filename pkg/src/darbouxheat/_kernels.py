"""Hot inner loops, each in a numba and a numpy/scipy flavour.

The public names at the bottom of the module point at one flavour, chosen
by :data:`darbouxheat._accel.USE_NUMBA`.  Both flavours are importable
under their private names so that tests and the benchmark can compare them.
"""
import math

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from ._accel import USE_NUMBA, njit

_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# Gaussian convolution with Hermite derivative weights
# ---------------------------------------------------------------------------

def _hermite_gaussian_sums_np(x, z, w, f, tau, kmax):
    """Weighted sums of ``d^k/dx^k G0(x - z) f`` over quadrature nodes.

    Parameters
    ----------
    x : (B,) array
        Evaluation points.
    z, w, f : (B, M) arrays
        Quadrature nodes, weights and integrand factor per evaluation point.
    tau : float
        Diffusion time, ``G0(r) = exp(-r^2 / 4 tau) / (2 sqrt(pi tau))``.
    kmax : int
        Highest derivative order.

    Returns
    -------
    sums, abs_sums : (kmax + 1, B) arrays
        The quadrature sums and the sums of absolute values of the terms.
    """
    scale = 1.0 / (2.0 * math.sqrt(tau))
    s = (x[:, None] - z) * scale
    base = w * f * np.exp(-s * s) * (scale * _INV_SQRT_PI)
    sums = np.empty((kmax + 1, x.shape[0]))
    abs_sums = np.empty_like(sums)
    h_prev = np.zeros_like(s)
    h_cur = np.ones_like(s)
    fac = 1.0
    for k in range(kmax + 1):
        term = base * h_cur
        sums[k] = fac * term.sum(axis=1)
        abs_sums[k] = abs(fac) * np.abs(term).sum(axis=1)
        h_prev, h_cur = h_cur, 2.0 * s * h_cur - 2.0 * k * h_prev
        fac *= -scale
    return sums, abs_sums


@njit
def _hermite_gaussian_sums_nb(x, z, w, f, tau, kmax):
    scale = 1.0 / (2.0 * math.sqrt(tau))
    nb, nm = z.shape
    sums = np.zeros((kmax + 1, nb))
    abs_sums = np.zeros((kmax + 1, nb))
    norm = scale * _INV_SQRT_PI
    for i in range(nb):
        for j in range(nm):
            s = (x[i] - z[i, j]) * scale
            base = w[i, j] * f[i, j] * math.exp(-s * s) * norm
            if base == 0.0:
                continue
            h_prev = 0.0
            h_cur = 1.0
            fac = 1.0
            for k in range(kmax + 1):
                term = fac * base * h_cur
                sums[k, i] += term
                abs_sums[k, i] += abs(term)
                h_next = 2.0 * s * h_cur - 2.0 * k * h_prev
                h_prev = h_cur
                h_cur = h_next
                fac *= -scale
    return sums, abs_sums


# ---------------------------------------------------------------------------
# Crank-Nicolson march with a constant symmetric tridiagonal system
# ---------------------------------------------------------------------------

def _cn_march_np(lhs_diag, lhs_off, rhs_diag, rhs_off, v, nsteps):
    """Advance ``v`` by ``nsteps`` solves of ``L v_new = R v_old``.

    ``L`` and ``R`` are symmetric tridiagonal (diagonals ``*_diag``, first
    off-diagonals ``*_off``); ``L`` must be positive definite.
    """
    ab = np.zeros((2, lhs_diag.shape[0]))
    ab[0, 1:] = lhs_off
    ab[1] = lhs_diag
    chol = cholesky_banded(ab)
    v = v.copy()
    for _ in range(nsteps):
        rhs = rhs_diag * v
        rhs[:-1] += rhs_off * v[1:]
        rhs[1:] += rhs_off * v[:-1]
        v = cho_solve_banded((chol, False), rhs, check_finite=False)
    return v


@njit
def _cn_march_nb(lhs_diag, lhs_off, rhs_diag, rhs_off, v, nsteps):
    n = lhs_diag.shape[0]
    cp = np.empty(n)
    den = np.empty(n)
    den[0] = lhs_diag[0]
    cp[0] = lhs_off[0] / den[0] if n > 1 else 0.0
    for i in range(1, n):
        den[i] = lhs_diag[i] - lhs_off[i - 1] * cp[i - 1]
        if i < n - 1:
            cp[i] = lhs_off[i] / den[i]
    cur = v.copy()
    rhs = np.empty(n)
    for _ in range(nsteps):
        for i in range(n):
            acc = rhs_diag[i] * cur[i]
            if i > 0:
                acc += rhs_off[i - 1] * cur[i - 1]
            if i < n - 1:
                acc += rhs_off[i] * cur[i + 1]
            rhs[i] = acc
        rhs[0] = rhs[0] / den[0]
        for i in range(1, n):
            rhs[i] = (rhs[i] - lhs_off[i - 1] * rhs[i - 1]) / den[i]
        cur[n - 1] = rhs[n - 1]
        for i in range(n - 2, -1, -1):
            cur[i] = rhs[i] - cp[i] * cur[i + 1]
    return cur


if USE_NUMBA:
    hermite_gaussian_sums = _hermite_gaussian_sums_nb
    cn_march = _cn_march_nb
else:
    hermite_gaussian_sums = _hermite_gaussian_sums_np
    cn_march = _cn_march_np

BACKEND = "numba" if USE_NUMBA else "numpy"
