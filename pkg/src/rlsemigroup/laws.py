"""Checkable consequences of the semigroup structure and of Young's inequality.

Norm bounds for ``V_xi: L^p -> L^q`` (``q = inf`` meaning C_0([0,1])) come
from ``||phi_xi||_r`` with ``1/r = 1/p' + 1/q``; conventions ``1/inf = 0``
and ``p' = p/(p-1)``.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .discretize import build_matrix, compose, fast_apply
from .rl_core import GridSpec, SampledFunction, apply_monomial, as_order, power_coefficient
from .spectral import singular_values
from .specfun import DomainError, cpow_real_base, gamma, rgamma_abs

__all__ = [
    "BoundReport",
    "SemigroupResidual",
    "conjugate",
    "bound_formula",
    "bound_case",
    "numeric_norm_lower",
    "check_bound",
    "bound_grid",
    "semigroup_residual",
    "strong_continuity_gap",
    "kernel_slice_norm",
    "kernel_slice_norm_numeric",
    "scaled_norm_trend",
    "write_bound_reports",
]

DEFAULT_BOUND_TOL = 0.02


def _inv(p):
    return 0.0 if math.isinf(p) else 1.0 / p


def conjugate(p):
    """Conjugate exponent ``p' = p / (p - 1)`` with ``1' = inf`` and ``inf' = 1``."""
    if p < 1:
        raise ValueError("exponent must be >= 1")
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def bound_case(p, q):
    if math.isinf(q):
        if p == 1:
            return "L1->C0"
        if math.isinf(p):
            return "Linf->C0"
        return "Lp->C0"
    return "Lp->Lp" if p == q else "Lp->Lq"


def _check_pq(p, q):
    if not (1 <= p <= q):
        raise ValueError(f"need 1 <= p <= q <= inf, got p={p}, q={q}")


def bound_formula(order, p, q):
    """Upper bound on ``||V_xi||_{L^p -> L^q}``::

        1/|Gamma(xi)| * ((1/p' + 1/q) / (tau - 1/p + 1/q))^(1/p' + 1/q)

    For ``p = q`` this is ``1/(tau |Gamma(xi)|)``; for ``q = inf`` (target
    C_0) it is ``1/(|Gamma(xi)| ((tau - 1) p' + 1)^(1/p'))``. Raises
    :class:`DomainError` when ``tau <= 1/p - 1/q``.
    """
    order = as_order(order)
    _check_pq(p, q)
    tau = order.tau
    gap = _inv(p) - _inv(q)
    if tau <= gap:
        raise DomainError(
            f"L^{p:g} -> L^{q:g} bound needs Re(xi) > 1/p - 1/q = {gap:g}; got {tau:g}"
        )
    expo = _inv(conjugate(p)) + _inv(q)
    base = rgamma_abs(order.xi)
    if expo == 0.0:
        return float(base)
    return float(base * (expo / (tau - gap)) ** expo)


def _trial_functions(grid, p, trials, rng):
    x = grid.nodes
    n = grid.n_cells
    yield np.ones(n)
    for beta in (1.0, 2.0, 5.0, -0.5 / p, -0.9 / p):
        yield x ** beta
    k = 1
    while k <= n // 4:
        spike = np.zeros(n)
        spike[:k] = 1.0
        yield spike
        k *= 4
    for _ in range(trials):
        blocks = rng.integers(1, 32)
        cuts = np.sort(rng.choice(np.arange(1, n), size=blocks - 1, replace=False)) if blocks > 1 else np.array([], int)
        levels = rng.standard_normal(blocks) + 1j * rng.standard_normal(blocks)
        if rng.random() < 0.5:
            levels = np.abs(levels)
        yield np.repeat(levels, np.diff(np.concatenate(([0], cuts, [n]))))


def numeric_norm_lower(order, p, q, trials=64, n=1024, seed=0):
    """Empirical lower bound on ``||V_xi||_{L^p -> L^q}``.

    ``max ||V f||_q / ||f||_p`` over monomials, initial-segment indicators and
    ``trials`` random piecewise-constant functions, with grid norms. For
    ``p = q = 2`` the largest singular value of the ``n``-cell matrix is used.
    """
    order = as_order(order)
    _check_pq(p, q)
    if p == 2 and q == 2:
        return float(singular_values(build_matrix(order, GridSpec(n))).values[0])
    grid = GridSpec(n)
    rng = np.random.default_rng(seed)
    best = 0.0
    for values in _trial_functions(grid, p, trials, rng):
        f = SampledFunction(grid, values, "piecewise-constant")
        denom = f.norm(p)
        if denom == 0:
            continue
        best = max(best, fast_apply(order, f).norm(q) / denom)
    return best


@dataclass(frozen=True)
class BoundReport:
    p: float
    q: float
    xi: complex
    theoretical: float | None
    numeric_lower: float | None
    passed: bool | None
    case: str = ""
    note: str = ""

    def record(self):
        return {
            "xi_re": self.xi.real,
            "xi_im": self.xi.imag,
            "p": _json_exponent(self.p),
            "q": _json_exponent(self.q),
            "case": self.case,
            "theoretical": self.theoretical,
            "numeric_lower": self.numeric_lower,
            "pass": self.passed,
            "note": self.note,
        }


def _json_exponent(p):
    return "inf" if math.isinf(p) else p


def check_bound(order, p, q, *, trials=64, n=1024, seed=0, tol=DEFAULT_BOUND_TOL):
    """Compare the numeric lower estimate with :func:`bound_formula`.

    Outside the boundedness region the report carries ``passed = None``.
    """
    order = as_order(order)
    try:
        theory = bound_formula(order, p, q)
    except DomainError as exc:
        return BoundReport(p, q, order.xi, None, None, None, bound_case(p, q),
                           f"outside domain: {exc}")
    lower = numeric_norm_lower(order, p, q, trials=trials, n=n, seed=seed)
    ok = lower <= theory * (1 + tol)
    note = "" if ok else "violates Young-inequality bound on ||V_xi||"
    return BoundReport(p, q, order.xi, theory, lower, ok, bound_case(p, q), note)


def bound_grid(orders, pq_pairs, **kwargs):
    return [check_bound(o, p, q, **kwargs) for o in orders for p, q in pq_pairs]


def write_bound_reports(path, reports):
    with open(path, "w") as fh:
        json.dump([r.record() for r in reports], fh, indent=2)
        fh.write("\n")


@dataclass(frozen=True)
class SemigroupResidual:
    matrix: float
    coefficient: float
    sampled: float


def semigroup_residual(xi1, xi2, n=1024, *, degrees=(0, 1, 2, 3, 5)):
    """How far the discretisation is from ``V_xi1 V_xi2 = V_(xi1 + xi2)``.

    ``matrix``: ``||compose(M1, M2) - M12||_F / ||M12||_F`` on ``n`` cells.
    ``coefficient``: worst relative gap between the composed and direct
    monomial coefficients, ``c(xi1, k + xi2) c(xi2, k)`` vs ``c(xi1 + xi2, k)``.
    ``sampled``: worst relative sup gap over nodes ``>= 0.1`` between
    ``V_xi1 V_xi2 x^k`` computed on the grid and the closed form.
    """
    o1, o2 = as_order(xi1), as_order(xi2)
    if n < 16:
        raise ValueError("need at least 16 cells")
    o12 = o1 + o2
    grid = GridSpec(n)
    m12 = build_matrix(o12, grid)
    diff = compose(build_matrix(o1, grid), build_matrix(o2, grid)).entries - m12.entries
    matrix = float(np.linalg.norm(diff) / np.linalg.norm(m12.entries))

    coef = 0.0
    for k in degrees:
        direct = power_coefficient(o12, k)
        chained = power_coefficient(o1, k + o2.xi) * power_coefficient(o2, k)
        coef = max(coef, abs(chained - direct) / abs(direct))

    keep = grid.nodes >= 0.1
    sampled = 0.0
    for k in degrees:
        f = SampledFunction(grid, grid.nodes ** k)
        got = fast_apply(o1, fast_apply(o2, f)).values[keep]
        want = apply_monomial(o12, k)(grid.nodes[keep])
        sampled = max(sampled, float(np.max(np.abs(got - want)) / np.max(np.abs(want))))
    return SemigroupResidual(matrix, coef, sampled)


def strong_continuity_gap(order, n, points=10_000):
    """``(sup_x |x^(n+xi) - x^n|, |xi| / (n + tau))`` with the sup over ``points`` grid nodes."""
    order = as_order(order)
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    x = np.linspace(0.0, 1.0, points)[1:]
    lhs = float(np.max(np.abs(x ** n * (cpow_real_base(x, order.xi) - 1.0))))
    rhs = abs(order.xi) / (n + order.tau)
    return lhs, rhs


def _check_slice_domain(tau, p):
    if tau < 1.0 / p or (tau == 1.0 / p and p > 1):
        raise DomainError(f"kernel slice is in L^p' iff Re(xi) > 1/p = {1 / p:g}; got {tau:g}")


def kernel_slice_norm(order, p, x):
    """``||(x - .)^(xi - 1) 1_(0,x)||_{p'}``, unnormalised kernel (no 1/Gamma).

    ``x^(tau - 1/p) / ((tau - 1) p' + 1)^(1/p')`` for ``1 < p < inf`` and
    ``x^(tau - 1)`` for ``p = 1``; finite iff ``tau > 1/p``, except that the
    sup norm used for ``p = 1`` is also finite at ``tau = 1``.
    """
    order = as_order(order)
    tau = order.tau
    if p < 1 or math.isinf(p):
        raise ValueError("p must lie in [1, inf)")
    if not 0 < x < 1:
        raise ValueError("x must lie in (0, 1)")
    _check_slice_domain(tau, p)
    if p == 1:
        return x ** (tau - 1.0)
    pc = conjugate(p)
    return x ** (tau - 1.0 / p) / ((tau - 1.0) * pc + 1.0) ** (1.0 / pc)


def kernel_slice_norm_numeric(order, p, x):
    """Quadrature counterpart of :func:`kernel_slice_norm` on the complex kernel."""
    order = as_order(order)
    _check_slice_domain(order.tau, p)
    xi = order.xi
    if p == 1:
        u = np.linspace(0.0, x, 20_001)[:-1]
        return float(np.max(np.abs(cpow_real_base(x - u, xi - 1.0))))
    pc = conjugate(p)
    val, _ = quad(lambda u: abs(complex(cpow_real_base(x - u, xi - 1.0))) ** pc,
                  0.0, x, epsabs=1e-13, epsrel=1e-11, limit=200)
    return val ** (1.0 / pc)


def scaled_norm_trend(p, q, ts=(2.0, 4.0, 8.0), **kwargs):
    """``Gamma(t + 1) * numeric_norm_lower(t, p, q)`` for real ``t``; informational only."""
    return [(t, float(gamma(t + 1.0).real) * numeric_norm_lower(t, p, q, **kwargs)) for t in ts]
