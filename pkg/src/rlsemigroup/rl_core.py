"""Riemann-Liouville fractional integration of complex order on (0, 1).

    (V_xi f)(x) = 1/Gamma(xi) * int_0^x f(u) (x - u)^(xi - 1) du,   Re(xi) > 0.

Functions live on a uniform grid of ``N`` cells with midpoint nodes. Sampled
values are treated as piecewise constant and the weakly singular factor
``(x - u)^(xi - 1)`` is integrated exactly over each cell (product
integration), so constants are reproduced to rounding error.
"""

from dataclasses import dataclass, field

import numpy as np

from .specfun import DomainError, cpow_real_base, gamma, log_gamma, rgamma_abs

__all__ = [
    "ComplexOrder",
    "GridSpec",
    "SampledFunction",
    "CyclicityReport",
    "as_order",
    "kernel",
    "kernel_weight",
    "l1_norm",
    "lr_norm",
    "power_coefficient",
    "apply_monomial",
    "Monomial",
    "apply",
    "adjoint_apply",
    "cyclicity_index",
]

ZERO_RTOL = 1e-12


@dataclass(frozen=True)
class ComplexOrder:
    """Semigroup parameter ``xi`` with ``tau = Re(xi) > 0``."""

    xi: complex

    def __post_init__(self):
        xi = complex(self.xi)
        if not (np.isfinite(xi.real) and np.isfinite(xi.imag)):
            raise DomainError(f"order {xi} is not finite")
        if xi.real <= 0:
            raise DomainError(f"order {xi} must satisfy Re(xi) > 0")
        object.__setattr__(self, "xi", xi)

    @property
    def tau(self):
        return self.xi.real

    @property
    def is_real(self):
        return self.xi.imag == 0.0

    def __add__(self, other):
        return ComplexOrder(self.xi + as_order(other).xi)

    def __str__(self):
        if self.is_real:
            return f"{self.tau:g}"
        return f"{self.xi.real:g}{self.xi.imag:+g}i"


def as_order(value):
    """Coerce a number (or an existing order) to :class:`ComplexOrder`."""
    if isinstance(value, ComplexOrder):
        return value
    return ComplexOrder(complex(value))


@dataclass(frozen=True)
class GridSpec:
    """Uniform partition of (0, 1) into ``n_cells`` cells with midpoint nodes."""

    n_cells: int

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise ValueError(f"n_cells must be a positive integer, got {self.n_cells}")
        object.__setattr__(self, "n_cells", int(self.n_cells))

    @property
    def h(self):
        return 1.0 / self.n_cells

    @property
    def edges(self):
        return np.arange(self.n_cells + 1) / self.n_cells

    @property
    def nodes(self):
        return (np.arange(self.n_cells) + 0.5) / self.n_cells


@dataclass(frozen=True)
class SampledFunction:
    """Values at the midpoint nodes of ``grid``.

    ``kind`` is ``"piecewise-constant"`` (cell values) or ``"point-samples"``;
    the operators treat both as piecewise constant.
    """

    grid: GridSpec
    values: np.ndarray
    kind: str = "point-samples"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n_cells,):
            raise ValueError(
                f"expected {self.grid.n_cells} values, got shape {values.shape}"
            )
        if self.kind not in ("piecewise-constant", "point-samples"):
            raise ValueError(f"unknown interpretation {self.kind!r}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, func, grid, kind="point-samples"):
        return cls(grid, func(grid.nodes), kind)

    @property
    def nodes(self):
        return self.grid.nodes

    def __add__(self, other):
        _same_grid(self, other)
        return SampledFunction(self.grid, self.values + other.values, self.kind)

    def __mul__(self, scalar):
        return SampledFunction(self.grid, scalar * self.values, self.kind)

    __rmul__ = __mul__

    def inner(self, other):
        """Discrete L2 inner product ``h * sum(f * conj(g))``."""
        _same_grid(self, other)
        return self.grid.h * np.vdot(other.values, self.values)

    def norm(self, p=2.0):
        """Grid L^p norm ``(h sum |v|^p)^(1/p)``; ``p = inf`` is the max over nodes."""
        a = np.abs(self.values)
        if np.isinf(p):
            return float(a.max(initial=0.0))
        return float((self.grid.h * np.sum(a ** p)) ** (1.0 / p))


def _same_grid(f, g):
    if f.grid != g.grid:
        raise ValueError(f"grid mismatch: {f.grid.n_cells} vs {g.grid.n_cells} cells")


@dataclass(frozen=True)
class CyclicityReport:
    ell: float
    p_exponent: float
    cyclic: bool
    resolution: float = field(default=0.0)


def kernel(order, x, u):
    """Kernel ``1_{u < x} (x - u)^(xi - 1) / Gamma(xi)``, vectorised over ``x, u``."""
    order = as_order(order)
    x, u = np.broadcast_arrays(np.asarray(x, float), np.asarray(u, float))
    out = np.zeros(x.shape, dtype=complex)
    live = u < x
    if np.any(live):
        out[live] = cpow_real_base(x[live] - u[live], order.xi - 1.0) / gamma(order.xi)
    return out[()] if out.ndim == 0 else out


def kernel_weight(order, u):
    """Convolution weight ``phi_xi(u) = u^(xi - 1) / Gamma(xi)`` on (0, 1)."""
    order = as_order(order)
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0) | (u >= 1)):
        raise DomainError("kernel_weight is defined for u in (0, 1)")
    return cpow_real_base(u, order.xi - 1.0) / gamma(order.xi)


def l1_norm(order):
    """``||phi_xi||_1 = 1 / (tau |Gamma(xi)|)``."""
    order = as_order(order)
    return float(rgamma_abs(order.xi) / order.tau)


def lr_norm(order, r):
    """``||phi_xi||_r`` for ``1 <= r <= inf``.

    Finite only when ``tau > 1 - 1/r``; raises :class:`DomainError` otherwise.
    """
    order = as_order(order)
    tau = order.tau
    if r < 1:
        raise DomainError("r must be >= 1")
    if np.isinf(r):
        if tau < 1:
            raise DomainError("phi_xi is unbounded unless Re(xi) >= 1")
        return float(rgamma_abs(order.xi))
    if tau <= 1.0 - 1.0 / r:
        raise DomainError(f"phi_xi is not in L^{r:g}: need Re(xi) > 1 - 1/r = {1 - 1 / r:g}")
    return float(rgamma_abs(order.xi) / ((tau - 1.0) * r + 1.0) ** (1.0 / r))


def power_coefficient(order, beta):
    """Coefficient ``c`` in ``V_xi(x^beta) = c x^(beta + xi)``, for ``Re(beta) > -1``.

    ``c = Gamma(beta + 1) / Gamma(beta + 1 + xi)``.
    """
    order = as_order(order)
    beta = complex(beta)
    if beta.real <= -1:
        raise DomainError("x^beta is not locally integrable at 0 unless Re(beta) > -1")
    return complex(np.exp(log_gamma(beta + 1.0) - log_gamma(beta + 1.0 + order.xi)))


@dataclass(frozen=True)
class Monomial:
    """Closed form ``coefficient * x^exponent``."""

    coefficient: complex
    exponent: complex

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        pos = x > 0
        out[pos] = self.coefficient * cpow_real_base(x[pos], self.exponent)
        if self.exponent == 0:
            out[~pos] = self.coefficient
        return out[()] if out.ndim == 0 else out


def apply_monomial(order, n):
    """Image of ``x^n`` under ``V_xi``: ``n!/Gamma(n + 1 + xi) x^(n + xi)``."""
    if int(n) != n or n < 0:
        raise ValueError("n must be a non-negative integer")
    order = as_order(order)
    return Monomial(power_coefficient(order, int(n)), int(n) + order.xi)


_ROW_BLOCK = 256


def _cell_moments(order, far, near):
    # int |x - u|^(xi - 1) du over a cell whose ends sit at distances near < far from x
    xi = order.xi
    hi = cpow_real_base(far, xi)
    lo = np.zeros(np.shape(near), dtype=complex)
    pos = near > 0
    lo[pos] = cpow_real_base(near[pos], xi)
    return (hi - lo) / xi


def apply(order, f):
    """Product-integration evaluation of ``V_xi f`` at the nodes of ``f``.

    Direct O(N^2) summation: every cell moment is computed from its own node
    and edge distances. :func:`rlsemigroup.discretize.fast_apply` is the
    O(N log N) route to the same numbers.
    """
    order = as_order(order)
    grid = f.grid
    n = grid.n_cells
    nodes, edges = grid.nodes, grid.edges
    vals = f.values
    out = np.empty(n, dtype=complex)
    for start in range(0, n, _ROW_BLOCK):
        stop = min(start + _ROW_BLOCK, n)
        x = nodes[start:stop, None]
        left = edges[None, :stop]
        right = np.minimum(edges[None, 1 : stop + 1], x)
        far = np.broadcast_to(x - left, (stop - start, stop))
        near = np.broadcast_to(x - right, far.shape)
        live = far > 0
        m = np.zeros(far.shape, dtype=complex)
        m[live] = _cell_moments(order, far[live], near[live])
        out[start:stop] = m @ vals[:stop]
    out /= gamma(order.xi)
    return SampledFunction(grid, out, "piecewise-constant")


def adjoint_apply(order, f):
    """Product-integration evaluation of the L2 adjoint

        (V_xi^* f)(x) = 1/conj(Gamma(xi)) int_x^1 f(u) (u - x)^(conj(xi) - 1) du.
    """
    order = as_order(order)
    conj = ComplexOrder(order.xi.conjugate())
    grid = f.grid
    n = grid.n_cells
    nodes, edges = grid.nodes, grid.edges
    vals = f.values
    out = np.empty(n, dtype=complex)
    for start in range(0, n, _ROW_BLOCK):
        stop = min(start + _ROW_BLOCK, n)
        x = nodes[start:stop, None]
        # moments over [max(a_j, x), a_{j+1}] in the reflected variable u - x
        far = np.broadcast_to(edges[None, start + 1 :] - x, (stop - start, n - start))
        near = np.maximum(edges[None, start:n] - x, 0.0)
        near = np.broadcast_to(near, far.shape)
        live = far > 0
        m = np.zeros(far.shape, dtype=complex)
        m[live] = _cell_moments(conj, far[live], near[live])
        out[start:stop] = m @ vals[start:]
    out /= gamma(conj.xi)
    return SampledFunction(grid, out, "piecewise-constant")


def cyclicity_index(f, p=2.0):
    """Left end ``ell_f`` of the essential support of ``f``, at grid resolution.

    ``f`` is cyclic for every ``V_xi`` iff ``ell_f = 0``; on the grid this is
    read as ``ell <= h``. Values below ``1e-12 * max|f|`` count as zero.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    a = np.abs(f.values)
    peak = a.max(initial=0.0)
    h = f.grid.h
    nonzero = np.flatnonzero(a > ZERO_RTOL * peak) if peak > 0 else np.array([], int)
    ell = 1.0 if nonzero.size == 0 else float(nonzero[0] * h)
    return CyclicityReport(ell=ell, p_exponent=float(p), cyclic=ell <= h, resolution=h)
