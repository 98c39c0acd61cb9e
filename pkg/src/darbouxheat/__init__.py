"""Darboux-dressed heat kernels for reflectionless potentials.

The package builds the kernel of ``rho_tau = rho_xx + u(x) rho`` for
potentials produced by a chain of Darboux transformations of the free
problem, evaluates the closed form for the kink potential
``u = 6 kappa^2 sech^2(kappa x)``, and turns the subtracted heat trace into
the one-loop correction ``S_q = -zeta'(0)``.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .dressing import (
    COSH,
    SINH,
    DressingChain,
    PotentialField,
    SeedFunction,
    dress_function,
    dressed_potential,
    seed_eval,
    wronskian,
)
from .errors import (
    ConvergenceError,
    DarbouxHeatError,
    DegenerateWronskian,
    DomainError,
    InvalidChain,
    QuadratureFailure,
    StabilityError,
)
from .kink import (
    AS_PRINTED,
    EXP_CORRECTED,
    BoundState,
    ClosedFormKernel,
    bound_state,
    heat_trace_closed,
    kink_kernel,
)
from .pde_oracle import Grid1D, bound_spectrum, evolve, kernel_residual, regularized_delta
from .quadrature import integrate
from .transmutation import (
    HeatKernel,
    TriangularKernel,
    dressed_kernel,
    free_kernel,
    free_propagate,
    initial_condition,
)
from .zeta import (
    HeatTrace,
    ZetaResult,
    quantum_correction,
    trace_numeric,
    zeta_function,
    zeta_prime_closed,
)

__all__ = [
    "AS_PRINTED", "BACKEND", "COSH", "EXP_CORRECTED", "SINH",
    "BoundState", "ClosedFormKernel", "ConvergenceError", "DarbouxHeatError",
    "DegenerateWronskian", "DomainError", "DressingChain", "Grid1D", "HeatKernel",
    "HeatTrace", "InvalidChain", "PotentialField", "QuadratureFailure", "SeedFunction",
    "StabilityError", "TriangularKernel", "ZetaResult",
    "bound_spectrum", "bound_state", "dress_function", "dressed_kernel", "dressed_potential",
    "evolve", "free_kernel", "free_propagate", "heat_trace_closed", "initial_condition",
    "integrate", "kernel_residual", "kink_kernel", "quantum_correction", "regularized_delta",
    "seed_eval", "trace_numeric", "wronskian", "zeta_function", "zeta_prime_closed",
]
