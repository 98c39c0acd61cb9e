"""Darboux dressing over the zero potential.

A chain of exponential-hyperbolic seeds ``cosh(b x) e^{b^2 tau}`` /
``sinh(b x) e^{b^2 tau}`` (each an exact solution of ``phi_tau = phi_xx``)
determines the Wronskian ``W = W[phi_1, ..., phi_N]``, the reflectionless
potential ``u[N] = 2 (ln W)_xx`` and the dressing map

    rho -> rho[N] = W[phi_1, ..., phi_N, rho] / W.

All determinants are evaluated on column-scaled matrices: column ``k`` is
divided by ``cosh(b_k x) e^{b_k^2 tau}``, so entries stay O(b^n) for any
``x`` and the exponential growth is carried separately as a logarithm.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateWronskian, DomainError, InvalidChain

COSH = "cosh"
SINH = "sinh"

#: Callable ``f(x, tau, order)`` returning the ``order``-th x-derivative.
DerivativeFunction = Callable[[np.ndarray, float, int], np.ndarray]


def logcosh(t):
    """``log(cosh(t))`` without overflow."""
    a = np.abs(t)
    return a + np.log1p(np.exp(-2.0 * a)) - math.log(2.0)


@dataclass(frozen=True)
class SeedFunction:
    """``cosh(b x) e^{b^2 tau}`` or ``sinh(b x) e^{b^2 tau}``."""

    parity: str
    b: float

    def __post_init__(self):
        if self.parity not in (COSH, SINH):
            raise InvalidChain(f"seed parity must be 'cosh' or 'sinh', got {self.parity!r}")
        if not (self.b > 0 and math.isfinite(self.b)):
            raise InvalidChain(f"seed wavenumber must be positive, got {self.b!r}")

    def __call__(self, x, tau=0.0, order=0):
        return seed_eval(self, x, tau, order)

    def _is_cosh_like(self, order):
        return (self.parity == COSH) == (order % 2 == 0)

    def scaled(self, x, order):
        """``d^order phi / (cosh(b x) e^{b^2 tau})``, bounded for all x."""
        x = np.asarray(x, dtype=float)
        base = np.ones_like(x) if self._is_cosh_like(order) else np.tanh(self.b * x)
        return self.b ** order * base

    def log_scale(self, x, tau=0.0):
        return logcosh(self.b * np.asarray(x, dtype=float)) + self.b ** 2 * tau

    def __str__(self):
        return f"{self.parity}:{self.b:g}"


def seed_eval(seed: SeedFunction, x, tau=0.0, order=0):
    """Closed-form ``order``-th x-derivative of a seed at ``(x, tau)``.

    Differentiating ``cosh`` gives ``b sinh`` and vice versa, so the order-n
    derivative is ``b**n`` times the seed's own hyperbolic function for even
    n and the other one for odd n.
    """
    if order < 0 or int(order) != order:
        raise DomainError(f"derivative order must be a non-negative integer, got {order!r}")
    x = np.asarray(x, dtype=float)
    func = np.cosh if seed._is_cosh_like(int(order)) else np.sinh
    out = seed.b ** order * func(seed.b * x) * math.exp(seed.b ** 2 * tau)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class DressingChain:
    """Ordered seeds ``phi_1, ..., phi_N`` of an N-fold Darboux transformation.

    Wavenumbers must increase strictly and parities must alternate
    ``cosh, sinh, cosh, ...``; together these keep the Wronskian positive.
    """

    seeds: tuple = ()

    def __post_init__(self):
        seeds = tuple(self.seeds)
        object.__setattr__(self, "seeds", seeds)
        for k, seed in enumerate(seeds):
            if not isinstance(seed, SeedFunction):
                raise InvalidChain(f"chain entry {k} is not a SeedFunction: {seed!r}")
            want = COSH if k % 2 == 0 else SINH
            if seed.parity != want:
                raise InvalidChain(
                    f"seed {k + 1} must be {want} (parities alternate starting with cosh)")
            if k and not seed.b > seeds[k - 1].b:
                raise InvalidChain("seed wavenumbers must be strictly increasing")
        if seeds:
            xs = np.linspace(-50.0 / seeds[0].b, 50.0 / seeds[0].b, 201)
            det = np.linalg.det(_scaled_matrix(self, xs, range(len(seeds))))
            if not np.all(det > 0):
                raise InvalidChain("Wronskian is not positive on the sample grid")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[str, float]]) -> "DressingChain":
        return cls(tuple(SeedFunction(p, float(b)) for p, b in pairs))

    @classmethod
    def parse(cls, text: str) -> "DressingChain":
        """Parse ``"cosh:1,sinh:2"``; an empty string gives the empty chain."""
        text = text.strip()
        if not text:
            return cls()
        pairs = []
        for item in text.split(","):
            try:
                parity, b = item.split(":")
                pairs.append((parity.strip(), float(b)))
            except ValueError as exc:
                raise InvalidChain(f"cannot parse chain entry {item!r}; expected parity:b") from exc
        return cls.from_pairs(pairs)

    @classmethod
    def reflectionless(cls, n: int, kappa: float = 1.0) -> "DressingChain":
        """Seeds with ``b_k = k kappa``; gives ``u = n(n+1) kappa^2 sech^2(kappa x)``."""
        return cls.from_pairs([(COSH if k % 2 else SINH, k * kappa) for k in range(1, n + 1)])

    @classmethod
    def kink(cls, m: float = 1.0) -> "DressingChain":
        """Two-fold chain with ``b_k = k m / sqrt(2)``."""
        if not m > 0:
            raise DomainError(f"mass scale must be positive, got {m!r}")
        return cls.reflectionless(2, m / math.sqrt(2.0))

    @property
    def size(self) -> int:
        return len(self.seeds)

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.array([s.b for s in self.seeds])

    def prefix(self, k: int) -> "DressingChain":
        return DressingChain(self.seeds[:k])

    def __len__(self):
        return len(self.seeds)

    def __str__(self):
        return ",".join(str(s) for s in self.seeds)


def _scaled_matrix(chain: DressingChain, x, rows) -> np.ndarray:
    """Column-scaled derivative matrix, shape ``x.shape + (len(rows), N)``."""
    x = np.asarray(x, dtype=float)
    rows = list(rows)
    out = np.empty(x.shape + (len(rows), chain.size))
    for k, seed in enumerate(chain.seeds):
        for i, r in enumerate(rows):
            out[..., i, k] = seed.scaled(x, r)
    return out


def _log_scale(chain: DressingChain, x, tau=0.0):
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape)
    for seed in chain.seeds:
        total = total + seed.log_scale(x, tau)
    return total


def _checked_det(mat: np.ndarray) -> np.ndarray:
    det = np.linalg.det(mat)
    bound = np.prod(np.linalg.norm(mat, axis=-1), axis=-1)
    if np.any(np.abs(det) <= 1e-13 * bound):
        raise DegenerateWronskian("Wronskian vanishes relative to its row norms")
    return det


def log_wronskian(chain: DressingChain, x, tau=0.0):
    """``ln W[phi_1, ..., phi_N](x, tau)``; W is positive for valid chains."""
    x = np.asarray(x, dtype=float)
    if chain.size == 0:
        return np.zeros(x.shape) if x.ndim else 0.0
    det = _checked_det(_scaled_matrix(chain, x, range(chain.size)))
    out = np.log(det) + _log_scale(chain, x, tau)
    return out if out.ndim else float(out)


def wronskian(chain: DressingChain, x, tau=0.0, extra: DerivativeFunction | None = None):
    """``W[phi_1, ..., phi_N]`` or, with ``extra``, ``W[phi_1, ..., phi_N, extra]``.

    ``extra`` is called as ``extra(x, tau, order)`` for orders ``0..N``.
    The empty chain has ``W = 1`` (and ``W[extra] = extra``).
    """
    x = np.asarray(x, dtype=float)
    n = chain.size
    if n:
        base = _scaled_matrix(chain, x, range(n))
        _checked_det(base)
    if extra is None:
        if n == 0:
            return np.ones(x.shape) if x.ndim else 1.0
        out = np.exp(np.log(np.linalg.det(base)) + _log_scale(chain, x, tau))
        return out if out.ndim else float(out)
    mat = np.empty(x.shape + (n + 1, n + 1))
    mat[..., :, :n] = _scaled_matrix(chain, x, range(n + 1))
    for r in range(n + 1):
        mat[..., r, n] = extra(x, tau, r)
    out = np.linalg.det(mat) * np.exp(_log_scale(chain, x, tau))
    return out if np.ndim(out) else float(out)


@lru_cache(maxsize=None)
def _wronskian_derivative_terms(n_funcs: int, order: int):
    """Expansion of ``d^order/dx^order det(rows 0..N-1)`` over row-order tuples.

    Differentiating a determinant differentiates one row at a time; a row
    stepping onto its neighbour's order gives a zero determinant, so the
    surviving tuples stay sorted.
    """
    terms = {tuple(range(n_funcs)): 1}
    for _ in range(order):
        nxt = defaultdict(int)
        for rows, coef in terms.items():
            for i in range(n_funcs):
                bumped = rows[i] + 1
                if i + 1 < n_funcs and rows[i + 1] == bumped:
                    continue
                nxt[rows[:i] + (bumped,) + rows[i + 1:]] += coef
        terms = dict(nxt)
    return tuple(terms.items())


def log_wronskian_derivatives(chain: DressingChain, x, nmax: int = 2) -> np.ndarray:
    """``[(ln W)', ..., (ln W)^(nmax)]`` from exact determinant derivatives.

    ``W^(n)/W`` comes from ratios of column-scaled determinants; the log
    derivatives then follow from ``W' = (ln W)' W`` by Leibniz' rule.
    Returns shape ``(nmax,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    n = chain.size
    if n == 0:
        return np.zeros((nmax,) + x.shape)
    full = _scaled_matrix(chain, x, range(n + nmax))
    base = _checked_det(full[..., :n, :])
    ratios = [np.ones(x.shape)]
    for order in range(1, nmax + 1):
        acc = np.zeros(x.shape)
        for rows, coef in _wronskian_derivative_terms(n, order):
            acc = acc + coef * np.linalg.det(full[..., list(rows), :])
        ratios.append(acc / base)
    logs = [None]
    for order in range(1, nmax + 1):
        val = ratios[order].copy()
        for k in range(order - 1):
            val -= math.comb(order - 1, k) * logs[k + 1] * ratios[order - 1 - k]
        logs.append(val)
    return np.array(logs[1:])


def dressed_potential(chain: DressingChain, x):
    """``u[N](x) = 2 (ln W)_xx`` (time independent)."""
    out = 2.0 * log_wronskian_derivatives(chain, x, 2)[1]
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PotentialField:
    """The dressed potential of a chain with its first two x-derivatives."""

    chain: DressingChain

    def __call__(self, x):
        return dressed_potential(self.chain, x)

    def derivative(self, x, order: int = 1):
        if order not in (0, 1, 2):
            raise DomainError("potential derivatives are available up to order 2")
        out = 2.0 * log_wronskian_derivatives(self.chain, x, order + 2)[order + 1]
        return out if out.ndim else float(out)

    def peak(self) -> float:
        """Maximum of ``u[N]`` sampled on a grid covering the well."""
        if self.chain.size == 0:
            return 0.0
        b1 = self.chain.seeds[0].b
        return float(np.max(self(np.linspace(-10.0 / b1, 10.0 / b1, 2001))))


def dress_coefficients(chain: DressingChain, x) -> np.ndarray:
    """Coefficients ``a_j(x)`` with ``rho[N] = rho^(N) - sum_j a_j rho^(j)``.

    They are fixed by requiring that every seed is annihilated, i.e. they
    solve ``sum_j a_j phi_k^(j) = phi_k^(N)`` for all k.  Shape
    ``x.shape + (N,)``; independent of tau.
    """
    x = np.asarray(x, dtype=float)
    n = chain.size
    full = _scaled_matrix(chain, x, range(n + 1))
    _checked_det(full[..., :n, :])
    mat_t = np.swapaxes(full[..., :n, :], -1, -2)
    return np.linalg.solve(mat_t, full[..., n, :][..., None])[..., 0]


def dress_derivatives(chain: DressingChain, x, derivs) -> np.ndarray:
    """Apply the N-fold dressing given ``derivs[j] = rho^(j)(x)``, ``j = 0..N``."""
    n = chain.size
    derivs = np.asarray(derivs, dtype=float)
    if n == 0:
        return derivs[0]
    coef = dress_coefficients(chain, x)
    out = derivs[n].copy()
    for j in range(n):
        out = out - coef[..., j] * derivs[j]
    return out


def dress_function(chain: DressingChain, rho: DerivativeFunction, x, tau=0.0):
    """``rho[N] = W[phi_1, ..., phi_N, rho] / W[phi_1, ..., phi_N]`` at ``(x, tau)``."""
    x = np.asarray(x, dtype=float)
    derivs = np.array([np.broadcast_to(rho(x, tau, j), x.shape) for j in range(chain.size + 1)])
    out = dress_derivatives(chain, x, derivs)
    return out if np.ndim(out) else float(out)


def dressed_seed_log(chain: DressingChain, k: int, x):
    """``ln phi_k[k-1](x)`` at tau = 0, i.e. ``ln W_k - ln W_{k-1}`` (1-based k)."""
    return log_wronskian(chain.prefix(k), x) - log_wronskian(chain.prefix(k - 1), x)


def dressed_seed_logderiv(chain: DressingChain, k: int, x):
    """``(ln phi_k[k-1])_x``, the coefficient in the k-th first-order factor."""
    return (log_wronskian_derivatives(chain.prefix(k), x, 1)[0]
            - log_wronskian_derivatives(chain.prefix(k - 1), x, 1)[0])
