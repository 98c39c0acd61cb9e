import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darbouxheat import (
    DegenerateWronskian,
    DomainError,
    DressingChain,
    InvalidChain,
    PotentialField,
    SeedFunction,
    dress_function,
    dressed_potential,
    seed_eval,
    wronskian,
)
from darbouxheat.dressing import (
    dress_coefficients,
    dressed_seed_log,
    log_wronskian,
    log_wronskian_derivatives,
    logcosh,
)


def _mp_wronskian(pairs, x, tau=0.0):
    """Wronskian of hyperbolic seeds from mpmath derivatives."""
    mp.mp.dps = 40
    funcs = []
    for parity, b in pairs:
        base = mp.cosh if parity == "cosh" else mp.sinh
        funcs.append(lambda z, b=b, base=base: base(b * z) * mp.exp(b * b * tau))
    n = len(funcs)
    mat = mp.matrix(n, n)
    for j in range(n):
        for k, f in enumerate(funcs):
            mat[j, k] = mp.diff(f, mp.mpf(x), j)
    return float(mp.det(mat))


def test_seed_eval_closed_form():
    # b sinh(b x) e^{b^2 tau} at b=2, x=0.5, tau=0.1
    val = seed_eval(SeedFunction("cosh", 2.0), 0.5, 0.1, 1)
    assert val == pytest.approx(2.0 * math.sinh(1.0) * math.exp(0.4), rel=1e-15)
    assert val == pytest.approx(3.506388330750648, rel=1e-14)


@pytest.mark.parametrize("parity", ["cosh", "sinh"])
@pytest.mark.parametrize("order", [0, 1, 2, 3])
def test_seed_derivatives_match_mpmath(parity, order):
    seed = SeedFunction(parity, 1.7)
    base = mp.cosh if parity == "cosh" else mp.sinh
    ref = mp.diff(lambda z: base(1.7 * z) * mp.exp(1.7 ** 2 * 0.3), 0.4, order)
    assert seed(0.4, 0.3, order) == pytest.approx(float(ref), rel=1e-13)


def test_seed_rejects_negative_order():
    with pytest.raises(DomainError):
        seed_eval(SeedFunction("cosh", 1.0), 0.0, 0.0, -1)


def test_wronskian_two_seeds():
    chain = DressingChain.parse("cosh:1,sinh:2")
    w = wronskian(chain, 1.0)
    assert w == pytest.approx(2.0 * math.cosh(1.0) ** 3, rel=1e-14)
    assert w == pytest.approx(7.348451950111748, rel=1e-14)


@pytest.mark.parametrize("text", ["cosh:0.5", "cosh:1,sinh:2", "cosh:0.7,sinh:1.1,cosh:2.5"])
@pytest.mark.parametrize("x", [-1.3, 0.0, 0.9])
def test_wronskian_matches_mpmath(text, x):
    chain = DressingChain.parse(text)
    pairs = [(s.parity, s.b) for s in chain.seeds]
    assert wronskian(chain, x, 0.2) == pytest.approx(_mp_wronskian(pairs, x, 0.2), rel=1e-11)


def test_log_wronskian_stays_finite_far_out():
    chain = DressingChain.kink()
    vals = log_wronskian(chain, np.array([-800.0, 800.0]))
    assert np.all(np.isfinite(vals))
    with np.errstate(over="ignore"):
        assert not np.isfinite(wronskian(chain, 800.0))


def test_empty_chain_wronskian_is_one():
    assert wronskian(DressingChain(), 0.3) == 1.0
    assert dressed_potential(DressingChain(), 0.3) == 0.0


@pytest.mark.parametrize("b", [0.3, 1.0, 2.4])
def test_one_fold_potential(b):
    x = np.linspace(-10.0 / b, 10.0 / b, 801)
    u = dressed_potential(DressingChain.parse(f"cosh:{b}"), x)
    np.testing.assert_allclose(u, 2.0 * b * b / np.cosh(b * x) ** 2, atol=1e-12, rtol=0)


def test_kink_potential_and_peak(kink_chain):
    kappa = 1.0 / math.sqrt(2.0)
    x = np.linspace(-10.0 / kappa, 10.0 / kappa, 1001)
    np.testing.assert_allclose(dressed_potential(kink_chain, x),
                               6.0 * kappa ** 2 / np.cosh(kappa * x) ** 2, atol=1e-12, rtol=0)
    assert dressed_potential(kink_chain, 0.0) == pytest.approx(3.0, abs=1e-13)
    assert PotentialField(kink_chain).peak() == pytest.approx(3.0, abs=1e-12)


def test_two_seed_potential_at_origin(two_seed_chain):
    assert dressed_potential(two_seed_chain, 0.0) == pytest.approx(6.0, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_reflectionless_family(n):
    x = np.linspace(-8.0, 8.0, 401)
    u = dressed_potential(DressingChain.reflectionless(n, 0.8), x)
    np.testing.assert_allclose(u, n * (n + 1) * 0.64 / np.cosh(0.8 * x) ** 2, atol=1e-10, rtol=0)


def test_potential_derivatives(kink_chain):
    field = PotentialField(kink_chain)
    k = 1.0 / math.sqrt(2.0)
    x = np.linspace(-6.0, 6.0, 61)
    s, t = 1.0 / np.cosh(k * x), np.tanh(k * x)
    np.testing.assert_allclose(field.derivative(x, 1), -12.0 * k ** 3 * s * s * t, atol=1e-11)
    np.testing.assert_allclose(field.derivative(x, 2),
                               12.0 * k ** 4 * s * s * (3.0 * t * t - 1.0), atol=1e-11)
    with pytest.raises(DomainError):
        field.derivative(x, 3)


def test_log_wronskian_derivatives_against_finite_difference(two_seed_chain):
    x = np.array([-0.7, 0.2, 1.4])
    h = 1e-4
    first = log_wronskian_derivatives(two_seed_chain, x, 1)[0]
    fd = (log_wronskian(two_seed_chain, x + h) - log_wronskian(two_seed_chain, x - h)) / (2 * h)
    np.testing.assert_allclose(first, fd, rtol=1e-7)


def test_dress_constant_function(two_seed_chain):
    def one(x, tau, order):
        return np.ones_like(x) if order == 0 else np.zeros_like(x)

    # W[phi1, phi2, 1](0) = -2 and W[phi1, phi2](0) = 2
    assert dress_function(two_seed_chain, one, 0.0) == pytest.approx(-1.0, abs=1e-14)


@pytest.mark.parametrize("k", [0, 1])
def test_dressing_annihilates_seeds(two_seed_chain, k):
    seed = two_seed_chain.seeds[k]
    x = np.linspace(-3.0, 3.0, 13)
    out = dress_function(two_seed_chain, lambda z, t, j: seed(z, t, j), x, 0.4)
    scale = np.abs(seed(x, 0.4, 2)) + 1.0
    assert np.max(np.abs(out) / scale) < 1e-12


def test_dressed_function_solves_new_equation(two_seed_chain):
    # dressing a free solution yields a solution of rho_tau = rho_xx + u rho
    q = 0.6

    def wave(x, tau, order):
        return q ** order * np.exp(q * x + q * q * tau)

    def rho(x, tau):
        return dress_function(two_seed_chain, wave, x, tau)

    x, tau, h = 0.3, 0.2, 1e-3
    rho_t = (rho(x, tau + h) - rho(x, tau - h)) / (2 * h)
    rho_xx = (rho(x + h, tau) - 2 * rho(x, tau) + rho(x - h, tau)) / h ** 2
    res = -rho_t + rho_xx + dressed_potential(two_seed_chain, x) * rho(x, tau)
    assert abs(res) < 1e-5


def test_dress_coefficients_shape(kink_chain):
    assert dress_coefficients(kink_chain, np.zeros((3, 4))).shape == (3, 4, 2)


def test_dressed_seed_log_telescopes(kink_chain):
    x = np.linspace(-2.0, 2.0, 9)
    total = dressed_seed_log(kink_chain, 1, x) + dressed_seed_log(kink_chain, 2, x)
    np.testing.assert_allclose(total, log_wronskian(kink_chain, x), atol=1e-13)


def test_logcosh_large_arguments():
    t = np.array([0.0, 1.0, 900.0, -900.0])
    expect = np.array([0.0, math.log(math.cosh(1.0)), 900.0 - math.log(2.0), 900.0 - math.log(2.0)])
    np.testing.assert_allclose(logcosh(t), expect, rtol=1e-15, atol=1e-15)


@pytest.mark.parametrize("text, message", [
    ("sinh:1", "must be cosh"),
    ("cosh:1,cosh:2", "must be sinh"),
    ("cosh:2,sinh:1", "strictly increasing"),
    ("cosh:1,sinh:1", "strictly increasing"),
    ("cosh:-1", "positive"),
    ("cosh", "parity:b"),
    ("tanh:1", "parity"),
])
def test_invalid_chains(text, message):
    with pytest.raises(InvalidChain, match=message):
        DressingChain.parse(text)


def test_parse_round_trip_and_empty():
    chain = DressingChain.parse(" cosh:1 , sinh:2.5 ")
    assert str(chain) == "cosh:1,sinh:2.5"
    assert DressingChain.parse("").size == 0
    assert DressingChain.kink(2.0).wavenumbers.tolist() == pytest.approx([math.sqrt(2), 2 * math.sqrt(2)])


def test_degenerate_wronskian_detected():
    from darbouxheat.dressing import _checked_det

    mat = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(DegenerateWronskian):
        _checked_det(mat)


@settings(max_examples=40, deadline=None)
@given(b1=st.floats(0.2, 2.0), gap=st.floats(0.1, 2.0), x=st.floats(-5.0, 5.0))
def test_two_fold_potential_is_even_and_positive_wronskian(b1, gap, x):
    chain = DressingChain.from_pairs([("cosh", b1), ("sinh", b1 + gap)])
    assert dressed_potential(chain, x) == pytest.approx(dressed_potential(chain, -x), abs=1e-9)
    assert np.isfinite(log_wronskian(chain, x))


@settings(max_examples=30, deadline=None)
@given(b=st.floats(0.2, 3.0), x=st.floats(-4.0, 4.0), tau=st.floats(0.0, 1.0))
def test_potential_is_tau_independent(b, x, tau):
    chain = DressingChain.parse(f"cosh:{b!r}")
    # u = 2 (ln W)_xx; tau only rescales W by a constant
    assert log_wronskian(chain, x, tau) - log_wronskian(chain, x) == pytest.approx(b * b * tau, rel=1e-12)
