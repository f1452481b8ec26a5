import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rlsemigroup.rl_core import (
    ComplexOrder,
    GridSpec,
    SampledFunction,
    adjoint_apply,
    apply,
    apply_monomial,
    cyclicity_index,
    kernel,
    kernel_weight,
    l1_norm,
    lr_norm,
    power_coefficient,
)
from rlsemigroup.specfun import DomainError, gamma

NODE_FLOOR = 0.1


def test_order_rejects_left_half_plane():
    for xi in (0.0, -0.3, 2j, -1 + 1j):
        with pytest.raises(DomainError):
            ComplexOrder(xi)
    o = ComplexOrder(0.8 + 0.6j)
    assert o.tau == 0.8 and not o.is_real
    assert (o + ComplexOrder(0.2)).xi == 1.0 + 0.6j


def test_grid_nodes():
    g = GridSpec(4)
    np.testing.assert_allclose(g.nodes, [0.125, 0.375, 0.625, 0.875])
    np.testing.assert_allclose(g.edges, [0, 0.25, 0.5, 0.75, 1.0])
    assert g.h == 0.25
    with pytest.raises(ValueError):
        GridSpec(0)


def test_sampled_function_length_checked():
    with pytest.raises(ValueError):
        SampledFunction(GridSpec(4), np.ones(3))


def test_kernel_examples():
    assert kernel(1.0, 0.7, 0.2) == pytest.approx(1.0, rel=1e-15)
    assert kernel(0.5, 0.3, 0.3) == 0.0
    assert kernel(0.5, 0.3, 0.8) == 0.0
    assert abs(kernel(0.5, 0.75, 0.5) - 2 / math.sqrt(math.pi)) < 1e-14


def test_kernel_weight_examples():
    assert kernel_weight(1.0, 0.3) == pytest.approx(1.0, rel=1e-15)
    assert abs(kernel_weight(2.0, 0.5) - 0.5) < 1e-15
    assert l1_norm(1.0) == pytest.approx(1.0)
    assert l1_norm(0.5) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-14)


def test_lr_norm():
    # ||u^(xi-1)||_2 for xi = 1.5: (int u du)^(1/2) / Gamma(1.5)
    assert lr_norm(1.5, 2) == pytest.approx(math.sqrt(0.5) / math.gamma(1.5), rel=1e-13)
    assert lr_norm(1.0, 1) == pytest.approx(l1_norm(1.0))
    with pytest.raises(DomainError):
        lr_norm(0.4, 2)
    with pytest.raises(DomainError):
        lr_norm(0.9, math.inf)


def test_apply_monomial_examples():
    m = apply_monomial(1.0, 0)
    assert m.coefficient == pytest.approx(1.0) and m.exponent == 1.0
    m = apply_monomial(1.0, 1)
    assert m.coefficient == pytest.approx(0.5) and m.exponent == 2.0
    m = apply_monomial(0.5, 0)
    assert abs(m.coefficient - 2 / math.sqrt(math.pi)) < 1e-14
    assert m.exponent == 0.5
    assert m(0.0) == 0.0


def test_power_coefficient_is_gamma_ratio():
    xi, beta = 0.7 + 0.2j, 1.3
    ref = gamma(beta + 1) / gamma(beta + 1 + xi)
    assert abs(power_coefficient(xi, beta) - ref) < 1e-14 * abs(ref)


def _sup_rel_error(order, n, cells):
    g = GridSpec(cells)
    got = apply(order, SampledFunction(g, g.nodes ** n)).values
    want = apply_monomial(order, n)(g.nodes)
    keep = g.nodes >= NODE_FLOOR
    return np.max(np.abs(got[keep] - want[keep])) / np.max(np.abs(want[keep]))


def test_apply_constant_and_zero():
    g = GridSpec(64)
    out = apply(1.0, SampledFunction(g, np.ones(64)))
    np.testing.assert_allclose(out.values.real, g.nodes, atol=1e-14)
    assert not np.any(apply(0.3 + 1j, SampledFunction(g, np.zeros(64))).values)


def test_apply_square_complex_order():
    assert _sup_rel_error(0.7 + 0.2j, 2, 2048) <= 1e-3


@pytest.mark.slow
@pytest.mark.parametrize("xi", [0.3, 1.0, 0.8 + 0.6j, 2.5])
@pytest.mark.parametrize("n", [0, 1, 2, 3, 5])
def test_monomial_oracle_with_convergence(xi, n):
    coarse = _sup_rel_error(xi, n, 1024)
    fine = _sup_rel_error(xi, n, 2048)
    assert fine <= 1e-3
    if n == 0:
        # constants are integrated exactly
        assert fine < 1e-12
    else:
        assert fine <= 0.5 * coarse * 1.05


def test_linearity(rng):
    g = GridSpec(300)
    f = SampledFunction(g, rng.standard_normal(300) + 1j * rng.standard_normal(300))
    h = SampledFunction(g, rng.standard_normal(300))
    a, b = 1.5 - 0.5j, -2.0
    lhs = apply(0.6 + 0.4j, a * f + b * h).values
    rhs = a * apply(0.6 + 0.4j, f).values + b * apply(0.6 + 0.4j, h).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-13 * np.max(np.abs(lhs))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 3.0), st.integers(0, 2**32 - 1))
def test_positivity(tau, seed):
    rng = np.random.default_rng(seed)
    g = GridSpec(128)
    f = SampledFunction(g, rng.random(128) * (rng.random(128) < 0.5))
    assert np.all(apply(tau, f).values.real >= 0)
    assert np.all(np.abs(apply(tau, f).values.imag) == 0)


def test_adjoint_constant():
    g = GridSpec(64)
    out = adjoint_apply(1.0, SampledFunction(g, np.ones(64)))
    np.testing.assert_allclose(out.values.real, 1 - g.nodes, atol=1e-14)
    assert not np.any(adjoint_apply(0.5, SampledFunction(g, np.zeros(64))).values)


def test_adjoint_duality(rng):
    g = GridSpec(1024)
    for _ in range(50):
        xi = complex(rng.uniform(0.05, 2.5), rng.uniform(-2, 2))
        f = SampledFunction(g, rng.standard_normal(1024) + 1j * rng.standard_normal(1024))
        h = SampledFunction(g, rng.standard_normal(1024) + 1j * rng.standard_normal(1024))
        lhs = apply(xi, f).inner(h)
        rhs = f.inner(adjoint_apply(xi, h))
        assert abs(lhs - rhs) <= 1e-8 * abs(lhs)


def test_cyclicity_examples():
    g = GridSpec(1000)
    one = cyclicity_index(SampledFunction(g, np.ones(1000)))
    assert one.ell == 0 and one.cyclic
    half = cyclicity_index(SampledFunction(g, (g.nodes >= 0.5).astype(float)))
    assert half.ell == 0.5 and not half.cyclic
    f = g.nodes * (g.nodes >= 0.25)
    rep = cyclicity_index(SampledFunction(g, f), p=1.0)
    assert abs(rep.ell - 0.25) <= g.h
    assert cyclicity_index(SampledFunction(g, np.zeros(1000))).ell == 1.0


def test_cyclicity_noise_floor():
    g = GridSpec(10)
    v = np.ones(10)
    v[:3] = 1e-13
    assert cyclicity_index(SampledFunction(g, v)).ell == pytest.approx(0.3)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cyclicity_monotone_under_truncation(seed):
    rng = np.random.default_rng(seed)
    g = GridSpec(200)
    v = rng.standard_normal(200)
    ells = []
    for k in sorted(rng.integers(0, 200, size=6)):
        w = v.copy()
        w[:k] = 0
        ells.append(cyclicity_index(SampledFunction(g, w)).ell)
    assert all(a <= b for a, b in zip(ells, ells[1:]))
