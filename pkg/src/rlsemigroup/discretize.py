"""Dense Nystrom matrices for ``V_xi`` on L2(0, 1).

Storage convention: ``entries[i, j]`` is the mean of the kernel over cell ``j``
seen from node ``x_i``, i.e. the product-integration weight divided by ``h``.
Hence

* ``h * entries @ f`` reproduces :func:`rlsemigroup.rl_core.apply`,
* ``h * ||entries||_F`` approximates the Hilbert-Schmidt norm,
* the singular values of ``h * entries`` (the matrix of the operator in the
  orthonormal basis ``1_cell / sqrt(h)``) approximate the operator's.

On a uniform grid every weight depends only on ``i - j``, so the matrix is
lower-triangular Toeplitz; ``fast_apply`` uses that to convolve by FFT.
"""

import struct
from dataclasses import dataclass

import numpy as np
import scipy.fft
import scipy.linalg

from .rl_core import GridSpec, SampledFunction, as_order
from .specfun import cpow_real_base, gamma

__all__ = [
    "OperatorMatrix",
    "GridMismatchError",
    "toeplitz_weights",
    "build_matrix",
    "compose",
    "fast_apply",
    "write_matrix",
    "read_matrix",
    "MAX_DENSE_N",
]

SCHEME = "product-integration-midpoint"
MAX_DENSE_N = 4096

MAGIC = b"RLSG"
FORMAT_VERSION = 1
# magic, version, N, 4 pad bytes, xi.real, xi.imag -> 32 bytes
_HEADER = struct.Struct("<4sII4xdd")


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    order: object
    grid: GridSpec
    entries: np.ndarray
    scheme: str = SCHEME

    def __post_init__(self):
        entries = np.asarray(self.entries)
        n = self.grid.n_cells
        if entries.shape != (n, n):
            raise ValueError(f"entries must be {n}x{n}, got {entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self):
        return self.grid.n_cells

    def scaled(self):
        """Matrix of the discretised operator in the orthonormal cell basis."""
        return self.grid.h * self.entries

    def matvec(self, f):
        if f.grid != self.grid:
            raise GridMismatchError("function and matrix live on different grids")
        return SampledFunction(self.grid, self.grid.h * (self.entries @ f.values),
                               "piecewise-constant")

    def frobenius_norm(self):
        """``||K||_{L2((0,1)^2)}`` estimate, ``h * ||entries||_F``."""
        return float(self.grid.h * np.linalg.norm(self.entries))


def toeplitz_weights(order, n_cells):
    """Product-integration weights ``w_k`` for ``i - j = k``, ``k = 0..N-1``.

    ``w_0 = (h/2)^xi / Gamma(xi + 1)`` (self cell, integrated up to the node)
    and ``w_k = [((k + 1/2) h)^xi - ((k - 1/2) h)^xi] / Gamma(xi + 1)``.
    """
    order = as_order(order)
    xi = order.xi
    h = 1.0 / n_cells
    k = np.arange(n_cells)
    far = cpow_real_base((k + 0.5) * h, xi)
    w = far.copy()
    w[1:] -= far[:-1]
    return w / gamma(xi + 1.0)


def build_matrix(order, grid):
    """Lower-triangular Toeplitz Nystrom matrix of ``V_xi`` on ``grid``."""
    order = as_order(order)
    if isinstance(grid, int):
        grid = GridSpec(grid)
    n = grid.n_cells
    if n < 2:
        raise ValueError("need at least two cells")
    if n > MAX_DENSE_N:
        raise ValueError(f"dense storage is capped at N = {MAX_DENSE_N}")
    col = toeplitz_weights(order, n) / grid.h
    if order.is_real:
        col = col.real
    entries = scipy.linalg.toeplitz(col, np.zeros(n, dtype=col.dtype))
    return OperatorMatrix(order, grid, entries)


def compose(a, b):
    """Discretisation of ``V_a V_b``: ``h * A @ B`` in the stored convention."""
    if a.grid != b.grid:
        raise GridMismatchError(f"cannot compose {a.n}-cell and {b.n}-cell matrices")
    order = None
    if a.order is not None and b.order is not None:
        order = as_order(a.order) + as_order(b.order)
    return OperatorMatrix(order, a.grid, a.grid.h * (a.entries @ b.entries))


def zero_matrix(grid):
    return OperatorMatrix(None, grid, np.zeros((grid.n_cells, grid.n_cells)))


def fast_apply(order, f):
    """``V_xi f`` at the nodes in O(N log N).

    Same numbers as :func:`rlsemigroup.rl_core.apply`: the off-diagonal
    weights form a causal convolution (zero-padded FFT), the self-cell weight
    is added as a diagonal term.
    """
    order = as_order(order)
    n = f.grid.n_cells
    w = toeplitz_weights(order, n)
    v = f.values
    tail = np.zeros(n, dtype=complex)
    tail[1:] = w[1:]
    size = scipy.fft.next_fast_len(2 * n - 1)
    conv = scipy.fft.ifft(scipy.fft.fft(tail, size) * scipy.fft.fft(v, size))[:n]
    return SampledFunction(f.grid, conv + w[0] * v, "piecewise-constant")


def write_matrix(path, m):
    """Write ``m.entries`` as little-endian complex128 rows behind a 32-byte header."""
    xi = complex(as_order(m.order).xi) if m.order is not None else 0j
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, m.n, xi.real, xi.imag))
        fh.write(np.ascontiguousarray(m.entries, dtype="<c16").tobytes())


def read_matrix(path):
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, n, re, im = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != n * n:
        raise ValueError(f"{path}: expected {n * n} entries, found {data.size}")
    order = as_order(complex(re, im)) if re > 0 else None
    return OperatorMatrix(order, GridSpec(n), data.reshape(n, n).astype(complex))
