import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darbouxheat import (
    DomainError,
    DressingChain,
    HeatKernel,
    PotentialField,
    TriangularKernel,
    dressed_kernel,
    free_kernel,
    free_propagate,
    initial_condition,
    kink_kernel,
)
from darbouxheat.pde_oracle import kernel_residual
from darbouxheat.transmutation import DELTA, propagate_derivatives


@pytest.mark.parametrize("order", [0, 1, 2, 3])
def test_free_kernel_derivatives_match_mpmath(order):
    mp.mp.dps = 30
    tau, x, y = 0.37, 0.8, -0.25
    g = lambda z: mp.exp(-(z - y) ** 2 / (4 * tau)) / (2 * mp.sqrt(mp.pi * tau))
    assert free_kernel(tau, x, y, order) == pytest.approx(float(mp.diff(g, x, order)), rel=1e-12)


def test_free_kernel_unit_mass():
    z = np.linspace(-20.0, 20.0, 40001)
    assert np.trapezoid(free_kernel(0.7, z, 0.3), z) == pytest.approx(1.0, abs=1e-12)


def test_free_kernel_rejects_nonpositive_tau():
    with pytest.raises(DomainError):
        free_kernel(0.0, 0.0, 0.0)


def test_initial_condition_two_seeds():
    chain = DressingChain.parse("cosh:1,sinh:2")
    val = initial_condition(chain, 1.0, 0.0)
    assert val == pytest.approx(1.813430203923509, rel=1e-9)
    assert TriangularKernel(chain)(1.0, 0.0) == pytest.approx(val, rel=1e-12)


def test_initial_condition_one_seed():
    chain = DressingChain.parse("cosh:1")
    # K(x, 0) = cosh(x) / cosh(0) for a single cosh seed
    assert initial_condition(chain, 1.0, 0.0) == pytest.approx(math.cosh(1.0), rel=1e-12)
    assert initial_condition(chain, -1.0, 0.0) == 0.0


@pytest.mark.parametrize("text", ["cosh:0.8", "cosh:1,sinh:2", "cosh:0.5,sinh:1.2,cosh:1.5"])
@pytest.mark.parametrize("x, y", [(0.7, 0.1), (1.5, -0.4), (2.0, 1.9)])
def test_nested_and_coefficient_routes_agree(text, x, y):
    chain = DressingChain.parse(text)
    assert initial_condition(chain, x, y) == pytest.approx(TriangularKernel(chain)(x, y), rel=1e-8)


@pytest.mark.parametrize("text", ["cosh:1", "cosh:1,sinh:2", "cosh:0.5,sinh:1.2,cosh:1.5"])
def test_triangular_kernel_jumps(text):
    chain = DressingChain.parse(text)
    kernel = TriangularKernel(chain)
    y = np.array([-1.0, 0.3])
    n = chain.size
    # only the (N-1)-th derivative jumps, by one
    np.testing.assert_allclose(kernel.jump(y), 1.0, rtol=1e-12)
    for order in range(n - 1):
        np.testing.assert_allclose(kernel.jump(y, order), 0.0, atol=1e-12)


def test_triangular_kernel_is_annihilated_by_dressing():
    chain = DressingChain.parse("cosh:1,sinh:2")
    from darbouxheat.dressing import dress_derivatives

    kernel = TriangularKernel(chain)
    x = np.linspace(0.5, 3.0, 6)
    derivs = np.array([kernel.smooth_factor(x, 0.0, k) for k in range(3)])
    np.testing.assert_allclose(dress_derivatives(chain, x, derivs), 0.0, atol=1e-11)


def test_triangular_kernel_needs_seeds():
    with pytest.raises(DomainError):
        TriangularKernel(DressingChain())


@pytest.mark.parametrize("order", [0, 1, 2])
def test_quadrature_and_exact_propagation_agree(order, kink_chain):
    kernel = TriangularKernel(kink_chain)
    x = np.array([-1.0, 0.0, 2.0])
    y = np.array([0.5, 0.0, -1.0])
    quad = free_propagate(kernel, 0.4, x, y, order)
    exact = free_propagate(kernel, 0.4, x, y, order, method="exact")
    np.testing.assert_allclose(quad, exact, rtol=1e-10)


def test_propagation_one_seed_closed_form():
    # int_y^inf G0(x-z) cosh(z) / cosh(y) dz in closed form
    chain = DressingChain.parse("cosh:1")
    tau, x, y = 0.3, 0.4, -0.2
    from scipy.special import ndtr

    s = math.sqrt(2 * tau)
    ref = 0.5 * math.exp(tau) * (math.exp(x) * ndtr((x - y + 2 * tau) / s)
                                 + math.exp(-x) * ndtr((x - y - 2 * tau) / s)) / math.cosh(y)
    val = free_propagate(TriangularKernel(chain), tau, x, y)
    assert val == pytest.approx(ref, rel=1e-11)


def test_propagation_error_estimates_are_small(kink_chain):
    vals, errs = propagate_derivatives(TriangularKernel(kink_chain), 0.5, np.array([0.0, 1.0]),
                                       np.array([0.0, -1.0]), 2)
    assert vals.shape == errs.shape == (3, 2)
    assert np.all(errs <= 1e-9 * (np.abs(vals) + 1.0))


def test_free_propagate_delta():
    assert free_propagate(DELTA, 0.5, 0.2, 0.0, 1) == free_kernel(0.5, 0.2, 0.0, 1)


def test_free_propagate_rejects_high_order(kink_chain):
    with pytest.raises(DomainError):
        free_propagate(TriangularKernel(kink_chain), 0.5, 0.0, 0.0, 3)


def test_dressed_kernel_matches_closed_form(kink_chain):
    tau = np.array([0.05, 0.2, 0.5, 1.0, 2.0])
    x = np.array([0.0, -2.0, 1.0, 3.0, -4.0])
    y = np.array([0.0, 1.0, 1.0, -2.0, -4.5])
    for t, a, b in zip(tau, x, y):
        assert dressed_kernel(kink_chain, t, a, b) == pytest.approx(kink_kernel(t, a, b), rel=1e-9)


def test_dressed_kernel_reference_value(kink_chain):
    assert dressed_kernel(kink_chain, 0.5, 0.0, 0.0) == pytest.approx(1.6137684812932772, rel=1e-11)


@pytest.mark.parametrize("support", ["causal", "anticausal", "auto"])
def test_supports_give_same_kernel(support):
    chain = DressingChain.parse("cosh:1")
    ref = dressed_kernel(chain, 0.4, 0.5, -0.3, method="exact")
    assert dressed_kernel(chain, 0.4, 0.5, -0.3, support=support) == pytest.approx(ref, rel=1e-8)


def test_auto_support_fixes_cancellation(kink_chain):
    # far to the right of y the causal route loses digits to exp(b (x - y))
    samples = [(0.3, 4.0, -3.0), (1.0, 5.0, -2.0)]
    for t, x, y in samples:
        ref = kink_kernel(t, x, y)
        auto = dressed_kernel(kink_chain, t, x, y)
        assert abs(auto - ref) < 1e-12 + 1e-9 * abs(ref)


def test_one_fold_kernel_solves_heat_equation():
    chain = DressingChain.parse("cosh:1")
    samples = [(0.2, 0.0, 0.0), (0.5, 1.0, -1.0), (1.0, -2.0, 0.5)]
    res = kernel_residual(lambda t, x, y: dressed_kernel(chain, t, x, y), PotentialField(chain),
                          samples, h=5e-3, dtau=5e-4)
    assert res < 1e-6


def test_three_fold_kernel_solves_heat_equation():
    chain = DressingChain.reflectionless(3, 0.7)
    samples = [(0.3, 0.0, 0.2), (0.8, 1.2, -0.5)]
    res = kernel_residual(lambda t, x, y: dressed_kernel(chain, t, x, y, method="exact"),
                          PotentialField(chain), samples, h=5e-3, dtau=5e-4)
    assert res < 1e-6


def test_heat_kernel_dispatch(kink_chain):
    args = (0.4, 0.3, -0.2)
    free = HeatKernel.free()(*args)
    assert free == free_kernel(*args)
    closed = HeatKernel.closed_form()(*args)
    dressed = HeatKernel.dressed(kink_chain)(*args)
    exact = HeatKernel.dressed(kink_chain, method="exact")(*args)
    assert dressed == pytest.approx(closed, rel=1e-10)
    assert exact == pytest.approx(closed, rel=1e-12)
    assert HeatKernel.dressed(kink_chain).derivatives(*args).shape == (3,)
    with pytest.raises(ValueError):
        HeatKernel("bogus")(*args)


def test_unknown_method_rejected(kink_chain):
    with pytest.raises(ValueError):
        dressed_kernel(kink_chain, 0.5, 0.0, 0.0, method="magic")


def test_empty_chain_is_free_kernel():
    assert dressed_kernel(DressingChain(), 0.5, 0.3, 0.1) == free_kernel(0.5, 0.3, 0.1)


@settings(max_examples=25, deadline=None)
@given(tau=st.floats(0.05, 1.5), x=st.floats(-3.0, 3.0), y=st.floats(-3.0, 3.0))
def test_dressed_kernel_symmetric(tau, x, y):
    chain = DressingChain.kink()
    a = dressed_kernel(chain, tau, x, y)
    b = dressed_kernel(chain, tau, y, x)
    assert a == pytest.approx(b, rel=1e-8, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(tau=st.floats(0.05, 1.5), x=st.floats(-3.0, 3.0), y=st.floats(-3.0, 3.0))
def test_one_fold_kernel_exact_vs_quadrature(tau, x, y):
    chain = DressingChain.parse("cosh:0.9")
    a = dressed_kernel(chain, tau, x, y)
    b = dressed_kernel(chain, tau, x, y, method="exact")
    assert a == pytest.approx(b, rel=1e-8, abs=1e-13)
