"""Grid-based reference solutions for ``rho_tau = rho_xx + u(x) rho``.

Nothing here uses the dressing machinery: the potential enters only as
sampled values, so these routines serve as an independent check of the
closed-form and dressed kernels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import _kernels
from .errors import ConvergenceError, DomainError, StabilityError


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on ``[x_min, x_max]`` with Dirichlet-zero ends."""

    x_min: float = -30.0
    x_max: float = 30.0
    h: float = 0.005
    dtau: float = 0.0005

    def __post_init__(self):
        if not (self.h > 0 and self.dtau > 0):
            raise DomainError("grid spacing and time step must be positive")
        cells = (self.x_max - self.x_min) / self.h
        if not self.x_max > self.x_min or abs(cells - round(cells)) > 1e-8 * max(cells, 1.0):
            raise DomainError("(x_max - x_min) / h must be a positive integer")

    @property
    def cells(self) -> int:
        return int(round((self.x_max - self.x_min) / self.h))

    @property
    def x(self) -> np.ndarray:
        """All nodes including the two boundary nodes."""
        return np.linspace(self.x_min, self.x_max, self.cells + 1)

    @property
    def interior(self) -> np.ndarray:
        return self.x[1:-1]

    def refined(self, factor: int = 2) -> "Grid1D":
        return Grid1D(self.x_min, self.x_max, self.h / factor, self.dtau / factor)

    def widened(self, factor: float = 2.0) -> "Grid1D":
        mid = 0.5 * (self.x_min + self.x_max)
        half = 0.5 * (self.x_max - self.x_min) * factor
        return Grid1D(mid - half, mid + half, self.h, self.dtau)


def _sample_potential(potential, x):
    if potential is None:
        return np.zeros_like(x)
    if callable(potential):
        return np.asarray(potential(x), dtype=float) * np.ones_like(x)
    return np.asarray(potential, dtype=float) * np.ones_like(x)


def evolve(potential, initial, tau_final: float, grid: Grid1D = Grid1D()) -> np.ndarray:
    """Crank-Nicolson solution of ``rho_tau = rho_xx + u rho`` at ``tau_final``.

    ``potential`` is ``None`` (free), a callable ``u(x)`` or an array on the
    grid nodes; ``initial`` is a callable or an array on ``grid.x``.  The
    time step is shrunk slightly so that it divides ``tau_final``.  Returns
    the solution on ``grid.x`` (boundary values zero).
    """
    if not tau_final > 0:
        raise DomainError(f"tau_final must be positive, got {tau_final!r}")
    x = grid.x
    v0 = np.asarray(initial(x) if callable(initial) else initial, dtype=float)
    if v0.shape != x.shape:
        raise DomainError("initial data must be sampled on grid.x")
    u = _sample_potential(potential, x)[1:-1]
    steps = max(1, int(math.ceil(tau_final / grid.dtau - 1e-9)))
    dt = tau_final / steps
    r = dt / grid.h ** 2
    n = u.shape[0]
    lhs_diag = 1.0 + r - 0.5 * dt * u
    rhs_diag = 1.0 - r + 0.5 * dt * u
    lhs_off = np.full(n - 1, -0.5 * r)
    rhs_off = np.full(n - 1, 0.5 * r)
    if np.any(lhs_diag <= r):
        # diagonal dominance lost: Crank-Nicolson matrix no longer definite
        raise StabilityError("time step too large for the potential depth")
    inner = _kernels.cn_march(lhs_diag, lhs_off, rhs_diag, rhs_off, v0[1:-1].copy(), steps)
    bound = math.exp((max(float(np.max(u, initial=0.0)), 0.0) + 1.0) * tau_final)
    if np.linalg.norm(inner) > bound * np.linalg.norm(v0[1:-1]) or not np.all(np.isfinite(inner)):
        raise StabilityError("solution norm exceeded the exp((max u + 1) tau) bound")
    out = np.zeros_like(x)
    out[1:-1] = inner
    return out


def regularized_delta(grid: Grid1D, y: float = 0.0, sigma: float | None = None) -> np.ndarray:
    """Unit-mass Gaussian of width ``sigma`` (default ``2 h``) centred at ``y``."""
    sigma = 2.0 * grid.h if sigma is None else sigma
    x = grid.x
    return np.exp(-0.5 * ((x - y) / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))


def smeared_kernel(kernel, tau, x, y, sigma, nodes: int = 40):
    """``int kernel(tau, x, y') N(y'; y, sigma^2) dy'`` by Gauss-Hermite quadrature.

    Puts an analytic kernel on the same footing as a grid run started from
    :func:`regularized_delta`.
    """
    t, w = np.polynomial.hermite.hermgauss(nodes)
    ys = y + math.sqrt(2.0) * sigma * t
    vals = np.asarray(kernel(tau, np.full_like(ys, x), ys), dtype=float)
    return float(np.dot(w, vals) / math.sqrt(math.pi))


# fourth-order central stencils
_D1 = (np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0, np.arange(-2, 3))
_D2 = (np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0, np.arange(-2, 3))


def residuals(kernel, potential, samples, h: float = 1e-3, dtau: float = 1e-4) -> np.ndarray:
    """``-rho_tau + rho_xx + u(x) rho`` at each ``(tau, x, y)`` sample.

    Derivatives use fourth-order central differences with steps ``h`` in
    x and ``dtau`` in tau.  ``potential`` is ``None`` or a callable.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    tau, x, y = samples[:, 0], samples[:, 1], samples[:, 2]
    if np.any(tau - 2 * dtau <= 0):
        raise DomainError("samples too close to tau = 0 for the time stencil")
    c1, o1 = _D1
    c2, o2 = _D2
    xs = x[:, None] + h * o2[None, :]
    ts = tau[:, None] + dtau * o1[None, :]
    yy = np.broadcast_to(y[:, None], xs.shape)
    vx = np.array([kernel(float(t), xs[i], yy[i]) for i, t in enumerate(tau)])
    vt = np.array([[kernel(float(tt), x[i], y[i]) for tt in ts[i]] for i in range(len(tau))])
    rho_xx = vx @ c2 / h ** 2
    rho_t = vt @ c1 / dtau
    rho = vx[:, 2]
    u = _sample_potential(potential, x)
    return -rho_t + rho_xx + u * rho


def kernel_residual(kernel, potential, samples, h: float = 1e-3, dtau: float = 1e-4) -> float:
    """Largest absolute heat-equation residual of ``kernel`` over ``samples``."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if np.any(samples[:, 0] < 0.05):
        raise DomainError("residual samples need tau >= 0.05")
    return float(np.max(np.abs(residuals(kernel, potential, samples, h, dtau))))


@dataclass
class EigenSolution:
    """Lowest eigenpairs of ``-d^2/dx^2 - u`` on a grid.

    ``eigenvalues`` are Richardson-extrapolated in h; ``eigenvectors``
    (columns) belong to the finest grid and are orthonormal under
    ``h * sum``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    x: np.ndarray
    h: float
    raw: list = field(default_factory=list)

    def gram_residual(self) -> float:
        gram = self.h * self.eigenvectors.T @ self.eigenvectors
        return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))


def _tridiagonal_lowest(u_interior, h, count):
    diag = 2.0 / h ** 2 - u_interior
    off = np.full(u_interior.shape[0] - 1, -1.0 / h ** 2)
    vals, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))
    return vals, vecs / math.sqrt(h)


def bound_spectrum(potential, grid: Grid1D | None = None, count: int = 1,
                   levels: int = 3, rtol: float = 1e-3) -> EigenSolution:
    """Lowest ``count`` eigenvalues of ``-d^2/dx^2 - u`` with Richardson extrapolation.

    The three-point Laplacian has O(h^2) eigenvalue error, so pairs of
    successive halvings are combined as ``(4 E(h/2) - E(h)) / 3``.  Raises
    :class:`ConvergenceError` if successive raw levels differ by more than
    ``rtol`` relative.
    """
    if count < 1:
        raise DomainError("count must be at least 1")
    grid = Grid1D(-30.0, 30.0, 0.04, 1.0) if grid is None else grid
    raw = []
    vecs = None
    g = grid
    for level in range(levels):
        u = _sample_potential(potential, g.x)[1:-1]
        vals, vecs = _tridiagonal_lowest(u, g.h, count)
        raw.append(vals)
        if level + 1 < levels:
            g = g.refined(2)
    for a, b in zip(raw[:-1], raw[1:]):
        gap = np.abs(a - b) / np.maximum(np.abs(b), 1e-12)
        if np.any(gap > rtol):
            raise ConvergenceError(
                f"eigenvalues changed by {float(np.max(gap)):.2e} relative between refinements")
    extrap = (4.0 * raw[-1] - raw[-2]) / 3.0 if len(raw) > 1 else raw[-1]
    # normalise the sign: positive at the first local extremum from the left
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        idx = int(np.argmax(np.abs(col) > 1e-3 * np.max(np.abs(col))))
        if col[idx] < 0:
            vecs[:, j] = -col
    return EigenSolution(extrap, vecs, g.interior, g.h, raw)
