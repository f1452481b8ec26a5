"""Singular spectra, Schatten norms and Schatten-class membership estimates."""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .discretize import build_matrix
from .rl_core import GridSpec, as_order
from .specfun import DomainError, gamma, rgamma_abs

__all__ = [
    "SingularSpectrum",
    "SchattenVerdict",
    "InterpolationSpec",
    "InterpolationReport",
    "SpectrumError",
    "WindowError",
    "singular_values",
    "schatten_norm",
    "hs_norm_exact",
    "decay_fit",
    "classify_schatten",
    "interpolation_family",
    "interpolation_check",
    "write_spectrum_csv",
    "verdict_record",
    "write_verdicts_json",
]

DEFAULT_DELTA = 0.05


class SpectrumError(RuntimeError):
    """SVD failed to converge; carries what we know about the input."""

    def __init__(self, message, diagnostics):
        super().__init__(f"{message} ({diagnostics})")
        self.diagnostics = diagnostics


class WindowError(ValueError):
    pass


@dataclass(frozen=True)
class SingularSpectrum:
    values: np.ndarray
    n: int
    xi: complex | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("singular values must be a 1-d array")
        if np.any(v < 0) or np.any(np.diff(v) > 1e-14 * max(v[0] if v.size else 0, 1e-300)):
            raise ValueError("singular values must be non-negative and non-increasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    @classmethod
    def from_values(cls, values, xi=None):
        v = np.sort(np.abs(np.asarray(values, dtype=float)))[::-1]
        return cls(v, v.size, xi)


def singular_values(m):
    """Singular values of the operator discretised by ``m``, descending.

    Takes an :class:`~rlsemigroup.discretize.OperatorMatrix` (uses its
    orthonormal-basis form ``h * entries``) or a plain square array.
    LAPACK divide-and-conquer, falling back to the QR-iteration driver.
    """
    if hasattr(m, "scaled"):
        a, xi = m.scaled(), (None if m.order is None else as_order(m.order).xi)
    else:
        a, xi = np.asarray(m), None
    if not np.all(np.isfinite(a)):
        raise SpectrumError("non-finite entries", {"n": a.shape[0], "xi": xi})
    if np.iscomplexobj(a) and not np.any(a.imag):
        a = a.real
    try:
        s = scipy.linalg.svd(a, compute_uv=False, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        try:
            s = scipy.linalg.svd(a, compute_uv=False, lapack_driver="gesvd")
        except np.linalg.LinAlgError as exc:
            diag = {"n": a.shape[0], "xi": xi, "max_abs": float(np.abs(a).max()),
                    "drivers": ["gesdd", "gesvd"], "lapack": str(exc)}
            raise SpectrumError("SVD did not converge", diag) from exc
    s = np.maximum(s, 0.0)
    return SingularSpectrum(np.minimum.accumulate(s), a.shape[0], xi)


def schatten_norm(s, r):
    """``(sum s_n^r)^(1/r)``; ``r = inf`` gives the operator norm ``s_1``."""
    v = s.values if isinstance(s, SingularSpectrum) else np.asarray(s, dtype=float)
    if r < 1:
        raise ValueError("Schatten exponent must be >= 1")
    if v.size == 0:
        return 0.0
    if math.isinf(r):
        return float(v.max())
    top = v.max()
    if top == 0:
        return 0.0
    # scale first to keep s^r in range for large r
    return float(top * np.sum((v / top) ** r) ** (1.0 / r))


def hs_norm_exact(order):
    """Closed-form Hilbert-Schmidt norm ``1 / (|Gamma(xi)| sqrt(2 tau (2 tau - 1)))``.

    Only defined for ``tau > 1/2``; ``V_xi`` is Hilbert-Schmidt iff ``Re(xi) > 1/2``.
    """
    order = as_order(order)
    tau = order.tau
    if tau <= 0.5:
        raise DomainError(
            f"Hilbert-Schmidt iff Re(xi) > 1/2; got Re(xi) = {tau:g}"
        )
    return float(rgamma_abs(order.xi) / math.sqrt(2 * tau * (2 * tau - 1)))


def decay_fit(s, window, *, n_total=None):
    """Least-squares fit ``log s_n = log C - slope * log n`` over ``n_min..n_max``.

    Returns ``(slope, residual)`` with the RMS residual of the log fit.
    ``n_max`` must stay below ``N / 8`` where ``N`` is the matrix size the
    spectrum came from.
    """
    slope, residual, _ = _fit(s, window, n_total)
    return slope, residual


def _fit(s, window, n_total=None):
    v = s.values if isinstance(s, SingularSpectrum) else np.asarray(s, dtype=float)
    if n_total is None:
        n_total = s.n if isinstance(s, SingularSpectrum) else v.size
    n_min, n_max = (int(w) for w in window)
    if n_min < 1 or n_max > v.size:
        raise WindowError(f"window {window} outside 1..{v.size}")
    if n_max > n_total / 8:
        raise WindowError(f"n_max = {n_max} exceeds N/8 = {n_total / 8:g}")
    if n_max - n_min < 10:
        raise WindowError("fit window needs n_max - n_min >= 10")
    n = np.arange(n_min, n_max + 1)
    y = v[n_min - 1 : n_max]
    if np.any(y <= 0):
        raise WindowError("zero singular values inside the fit window")
    x = np.log(n)
    coef, res, *_ = np.polyfit(x, np.log(y), 1, full=True)
    rms = math.sqrt(float(res[0]) / n.size) if res.size else 0.0
    return float(-coef[0]), rms, float(math.exp(coef[1]))


@dataclass(frozen=True)
class SchattenVerdict:
    r: float
    estimated_exponent: float
    threshold: float
    verdict: str
    fit_window: tuple
    fit_residual: float
    xi: complex = 0j
    constant: float = float("nan")
    delta: float = DEFAULT_DELTA
    exact_member: bool = False

    @property
    def consistent(self):
        """True unless the estimate lands on the wrong side of the exact threshold."""
        if self.verdict == "boundary":
            return True
        return (self.verdict == "member") == self.exact_member


def classify_schatten(order, r, n=2048, *, window=None, delta=DEFAULT_DELTA, spectrum=None):
    """Estimate whether ``V_xi`` lies in the Schatten class ``S^r`` on L2(0, 1).

    Builds the ``n``-cell matrix, fits ``s_n ~ C n^(-slope)`` and compares
    ``slope * r`` with 1 (member above ``1 + delta``, non-member below
    ``1 - delta``, boundary between). The exact answer is ``Re(xi) > 1/r``;
    it is stored alongside for comparison. Pass ``spectrum`` to reuse an SVD.
    """
    order = as_order(order)
    if r < 1:
        raise ValueError("Schatten exponent must be >= 1")
    if spectrum is None:
        spectrum = singular_values(build_matrix(order, GridSpec(n)))
    n = spectrum.n
    if window is None:
        window = (8, n // 8)
    slope, residual, const = _fit(spectrum, window)
    score = slope * r
    if score > 1 + delta:
        verdict = "member"
    elif score < 1 - delta:
        verdict = "non-member"
    else:
        verdict = "boundary"
    return SchattenVerdict(
        r=float(r),
        estimated_exponent=slope,
        threshold=1.0 / r,
        verdict=verdict,
        fit_window=tuple(int(w) for w in window),
        fit_residual=residual,
        xi=order.xi,
        constant=const,
        delta=delta,
        exact_member=order.tau > 1.0 / r,
    )


@dataclass(frozen=True)
class InterpolationSpec:
    """Strip ``alpha0 <= Re z <= alpha1`` with exponents ``p0`` (left edge) and ``p1`` (right)."""

    alpha0: float
    alpha1: float
    p0: float
    p1: float
    theta: float
    p: float = field(default=None)

    def __post_init__(self):
        if not self.alpha0 < self.alpha1:
            raise ValueError("need alpha0 < alpha1")
        if self.alpha0 <= 0:
            raise DomainError("the strip must lie in Re(z) > 0")
        if not 1 <= self.p1 < self.p0:
            raise ValueError("need 1 <= p1 < p0 <= inf")
        if not 0 <= self.theta <= 1:
            raise ValueError("theta must lie in [0, 1]")
        inv = self.theta / self.p1 + (1 - self.theta) / self.p0
        p = math.inf if inv == 0 else 1.0 / inv
        if self.p is not None and not math.isclose(self.p, p, rel_tol=1e-12):
            raise ValueError(f"p = {self.p} inconsistent with theta; expected {p}")
        object.__setattr__(self, "p", p)

    @property
    def alpha(self):
        return self.theta * self.alpha1 + (1 - self.theta) * self.alpha0


def interpolation_family(z, n):
    """Matrix of ``T_z = Gamma(z) Gamma(z/2)^2 V_z`` in the orthonormal cell basis."""
    z = complex(z)
    scale = complex(gamma(z) * gamma(z / 2) ** 2)
    return scale * build_matrix(z, GridSpec(n)).scaled()


@dataclass
class InterpolationReport:
    spec: InterpolationSpec
    n: int
    s0: float
    s1: float
    bound: float
    rows: list
    tolerance: float

    @property
    def violations(self):
        return [row for row in self.rows if row["violated"]]

    @property
    def passed(self):
        return not self.violations


def interpolation_check(spec, sigma_samples, n=512, *, edge_sigmas=None, tolerance=0.05):
    """Spot-check ``||T_(alpha + i sigma)||_{S^p} <= S0^(1-theta) S1^theta``.

    ``S0`` and ``S1`` are maxima of ``||T_z||_{S^p0}`` and ``||T_z||_{S^p1}``
    over ``edge_sigmas`` (default nine points in [-4, 4]) on the strip edges;
    ``|Gamma|`` decays fast enough in ``|Im z|`` for this to capture the sup.
    """
    if edge_sigmas is None:
        edge_sigmas = np.linspace(-4.0, 4.0, 9)

    def norm(z, p):
        return schatten_norm(singular_values(interpolation_family(z, n)), p)

    s0 = max(norm(spec.alpha0 + 1j * t, spec.p0) for t in edge_sigmas)
    s1 = max(norm(spec.alpha1 + 1j * t, spec.p1) for t in edge_sigmas)
    bound = s0 ** (1 - spec.theta) * s1 ** spec.theta
    rows = []
    for t in sigma_samples:
        value = norm(spec.alpha + 1j * t, spec.p)
        rows.append({
            "sigma": float(t),
            "norm": value,
            "bound": bound,
            "ratio": value / bound,
            "violated": value > bound * (1 + tolerance),
        })
    return InterpolationReport(spec, n, s0, s1, bound, rows, tolerance)


def write_spectrum_csv(path, spectrum):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "s_n"])
        for i, s in enumerate(spectrum.values, start=1):
            w.writerow([i, repr(float(s))])


def verdict_record(v):
    return {
        "xi_re": float(np.real(v.xi)),
        "xi_im": float(np.imag(v.xi)),
        "r": v.r,
        "slope": v.estimated_exponent,
        "residual": v.fit_residual,
        "verdict": v.verdict,
    }


def write_verdicts_json(path, verdicts):
    with open(path, "w") as fh:
        json.dump([verdict_record(v) for v in verdicts], fh, indent=2)
        fh.write("\n")
