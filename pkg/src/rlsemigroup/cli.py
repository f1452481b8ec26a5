"""Command-line front end: ``rlsg <subcommand> ...``.

Every subcommand writes a report (JSON array of flat records, or CSV) to
``--out`` (default stdout) and exits 0 iff all of its checks pass, 1 if a
check fails, 2 on bad usage.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics, discretize, laws, spectral
from .rl_core import ComplexOrder, GridSpec, SampledFunction, cyclicity_index
from .specfun import DomainError

DEFAULT_SEED = 0x5EED
MAX_N = discretize.MAX_DENSE_N

CLAIMS = {
    "schatten": "Schatten class S^r membership iff Re(xi) > 1/r",
    "hs": "Hilbert-Schmidt norm 1/(|Gamma(xi)| sqrt(2 tau (2 tau - 1))), finite iff Re(xi) > 1/2",
    "diag": "Fourier diagonal <V_xi e_n, e_n> ~ (2 i pi n)^-xi for 0 < Re(xi) <= 1",
    "semigroup": "semigroup law V_xi V_xi' = V_(xi + xi')",
    "bounds": "Young-inequality bound on ||V_xi||_{L^p -> L^q}, needs Re(xi) > 1/p - 1/q",
    "interp": "Schatten interpolation estimate sup ||T_z||_{S^p} <= S0^(1-theta) S1^theta",
}

DEFAULT_FORMAT = {
    "schatten": "json", "hs": "csv", "diag": "csv", "semigroup": "csv",
    "bounds": "json", "cyclic": "json", "interp": "json", "dump": "json",
}


class UsageError(Exception):
    pass


def parse_complex(text):
    s = text.strip().replace(" ", "").replace("I", "j").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise UsageError(f"cannot parse {text!r} as a complex number") from None


def parse_order(text):
    try:
        return ComplexOrder(parse_complex(text))
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def parse_real(text):
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return math.inf
    try:
        return float(t)
    except ValueError:
        raise UsageError(f"cannot parse {text!r} as a number") from None


def split_list(text):
    return [part for part in (text or "").split(",") if part.strip()]


def parse_pair(text, parse):
    parts = text.split(":")
    if len(parts) != 2:
        raise UsageError(f"expected A:B, got {text!r}")
    return parse(parts[0]), parse(parts[1])


@dataclass
class RunConfig:
    subcommand: str
    xi: list = field(default_factory=list)
    r: list = field(default_factory=list)
    pq: list = field(default_factory=list)
    pairs: list = field(default_factory=list)
    n: list = field(default_factory=list)
    modes: list = field(default_factory=list)
    window: tuple | None = None
    tol: float | None = None
    delta: float = spectral.DEFAULT_DELTA
    trials: int = 64
    seed: int = DEFAULT_SEED
    function: str | None = None
    p: float = 2.0
    interp: dict = field(default_factory=dict)
    sigma: list = field(default_factory=list)
    out: str | None = None
    format: str = "json"
    spectrum_dir: str | None = None

    def __post_init__(self):
        for n in self.n:
            if not 2 <= n <= MAX_N:
                raise UsageError(f"N must lie in [2, {MAX_N}], got {n}")


def _workers():
    env = os.environ.get("RLSG_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise UsageError(f"RLSG_THREADS must be an integer, got {env!r}") from None
    return cap


def _pmap(func, items):
    items = list(items)
    workers = min(_workers(), max(1, len(items)))
    if workers == 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def _xi_fields(order):
    return {"xi_re": order.xi.real, "xi_im": order.xi.imag}


def _failed(record, subcommand):
    record["claim"] = "" if record["pass"] else CLAIMS.get(subcommand, "")
    return record


def run_schatten(cfg):
    if not cfg.xi or not cfg.r:
        raise UsageError("schatten needs --xi and --r")
    n = cfg.n[-1] if cfg.n else 2048

    def spectrum(order):
        return spectral.singular_values(discretize.build_matrix(order, GridSpec(n)))

    spectra = _pmap(spectrum, cfg.xi)
    records = []
    for order, spec in zip(cfg.xi, spectra):
        if cfg.spectrum_dir:
            os.makedirs(cfg.spectrum_dir, exist_ok=True)
            name = f"spectrum_xi{order.xi.real:g}{order.xi.imag:+g}i_N{n}.csv"
            spectral.write_spectrum_csv(os.path.join(cfg.spectrum_dir, name), spec)
        for r in cfg.r:
            v = spectral.classify_schatten(order, r, window=cfg.window, delta=cfg.delta,
                                           spectrum=spec)
            rec = spectral.verdict_record(v)
            rec.update({"n": n, "tau": order.tau, "exact_member": v.exact_member,
                        "pass": v.consistent})
            records.append(_failed(rec, "schatten"))
    return records


def run_hs(cfg):
    if not cfg.xi:
        raise UsageError("hs needs --xi")
    ns = sorted(cfg.n or [256, 512, 1024])
    tol = 0.02 if cfg.tol is None else cfg.tol
    records = []
    for order in cfg.xi:
        try:
            exact = spectral.hs_norm_exact(order)
        except DomainError as exc:
            records.append(_failed({**_xi_fields(order), "n": None, "hs_numeric": None,
                                    "hs_exact": None, "rel_gap": None, "pass": False,
                                    "note": str(exc)}, "hs"))
            continue

        def numeric(n, order=order):
            m = discretize.build_matrix(order, GridSpec(n))
            return spectral.schatten_norm(spectral.singular_values(m), 2)

        values = _pmap(numeric, ns)
        gaps = [abs(v - exact) / exact for v in values]
        for i, (n, v, g) in enumerate(zip(ns, values, gaps)):
            last = i == len(ns) - 1
            ok = g <= tol if last else gaps[i + 1] < g
            records.append(_failed({**_xi_fields(order), "n": n, "hs_numeric": v, "hs_exact": exact,
                                    "rel_gap": g, "pass": ok, "note": ""}, "hs"))
    return records


def run_diag(cfg):
    if not cfg.xi:
        raise UsageError("diag needs --xi")
    modes = cfg.modes or [10, 100, 1000, 10_000]
    tol = 0.05 if cfg.tol is None else cfg.tol
    records = []
    for order in cfg.xi:
        try:
            reports = asymptotics.diagonal_report(order, modes)
        except DomainError as exc:
            records.append(_failed({**_xi_fields(order), "n": None, "pass": False,
                                    "note": str(exc)}, "diag"))
            continue
        top = max(r.n for r in reports)
        for rep in reports:
            ok = rep.ratio_gap <= tol if rep.n == top else True
            records.append(_failed({
                **_xi_fields(order), "n": rep.n,
                "exact_re": rep.exact.real, "exact_im": rep.exact.imag,
                "asymptote_re": rep.asymptote.real, "asymptote_im": rep.asymptote.imag,
                "ratio_abs": abs(rep.ratio), "ratio_gap": rep.ratio_gap, "pass": ok,
            }, "diag"))
    return records


def run_semigroup(cfg):
    if not cfg.pairs:
        raise UsageError("semigroup needs at least one --pair XI1:XI2")
    ns = sorted(cfg.n or [256, 512, 1024])
    tol = 2e-2 if cfg.tol is None else cfg.tol
    records = []
    for o1, o2 in cfg.pairs:
        res = _pmap(lambda n: laws.semigroup_residual(o1, o2, n), ns)
        for i, (n, r) in enumerate(zip(ns, res)):
            last = i == len(ns) - 1
            ok = (r.matrix <= tol if last else res[i + 1].matrix < r.matrix) and r.coefficient <= 1e-12
            records.append(_failed({
                "xi1_re": o1.xi.real, "xi1_im": o1.xi.imag,
                "xi2_re": o2.xi.real, "xi2_im": o2.xi.imag, "n": n,
                "matrix_residual": r.matrix, "coefficient_residual": r.coefficient,
                "sampled_residual": r.sampled, "pass": ok,
            }, "semigroup"))
    return records


def run_bounds(cfg):
    if not cfg.xi:
        raise UsageError("bounds needs --xi")
    pq = cfg.pq or [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (2.0, math.inf)]
    n = cfg.n[-1] if cfg.n else 1024
    tol = laws.DEFAULT_BOUND_TOL if cfg.tol is None else cfg.tol
    jobs = [(o, p, q) for o in cfg.xi for p, q in pq]
    reports = _pmap(lambda j: laws.check_bound(*j, trials=cfg.trials, n=n, seed=cfg.seed, tol=tol), jobs)
    records = []
    for rep in reports:
        rec = rep.record()
        rec["claim"] = CLAIMS["bounds"] if rep.passed is False else ""
        records.append(rec)
    return records


def load_function(source, grid):
    """Sample a function on ``grid`` from a built-in descriptor or an ``x,re,im`` CSV file.

    Built-ins: ``const:c``, ``monomial:n``, ``indicator:a,b``. CSV rows are
    resampled by giving each node the value of the nearest sample.
    """
    x = grid.nodes
    kind, _, arg = source.partition(":")
    if kind == "const" and arg:
        return SampledFunction(grid, np.full(grid.n_cells, parse_complex(arg)))
    if kind == "monomial" and arg:
        k = int(arg)
        if k < 0:
            raise UsageError("monomial degree must be >= 0")
        return SampledFunction(grid, x ** k)
    if kind == "indicator" and arg:
        a, b = (float(t) for t in arg.split(","))
        return SampledFunction(grid, ((x >= a) & (x <= b)).astype(float))
    return _load_csv_function(source, grid)


def _load_csv_function(path, grid):
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise UsageError(f"cannot read function file {path!r}: {exc.strerror}") from None
    xs, vals = [], []
    with fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].strip().startswith("#"):
                continue
            if lineno == 1 and row[0].strip().lower() == "x":
                continue
            if len(row) not in (2, 3):
                raise UsageError(f"{path}:{lineno}: expected x,re[,im]")
            try:
                xv = float(row[0])
                re = float(row[1])
                im = float(row[2]) if len(row) == 3 else 0.0
            except ValueError:
                raise UsageError(f"{path}:{lineno}: non-numeric field") from None
            xs.append(xv)
            vals.append(complex(re, im))
    if not xs:
        raise UsageError(f"{path}: no samples")
    xs = np.asarray(xs)
    order = np.argsort(xs, kind="stable")
    xs, vals = xs[order], np.asarray(vals)[order]
    idx = np.clip(np.searchsorted(xs, grid.nodes), 1, max(len(xs) - 1, 1))
    if len(xs) == 1:
        nearest = np.zeros(grid.n_cells, dtype=int)
    else:
        left_closer = grid.nodes - xs[idx - 1] <= xs[idx] - grid.nodes
        nearest = np.where(left_closer, idx - 1, idx)
    return SampledFunction(grid, vals[nearest])


def run_cyclic(cfg):
    if not cfg.function:
        raise UsageError("cyclic needs --function")
    n = cfg.n[-1] if cfg.n else 1000
    f = load_function(cfg.function, GridSpec(n))
    rep = cyclicity_index(f, cfg.p)
    return [{"function": cfg.function, "n": n, "ell": rep.ell, "p": rep.p_exponent,
             "cyclic": rep.cyclic, "resolution": rep.resolution, "pass": True}]


def run_interp(cfg):
    spec = spectral.InterpolationSpec(**cfg.interp)
    n = cfg.n[-1] if cfg.n else 512
    sig = cfg.sigma or [0.0, 0.5, 1.0]
    rep = spectral.interpolation_check(spec, sig, n, tolerance=0.05 if cfg.tol is None else cfg.tol)
    records = []
    for row in rep.rows:
        rec = {"alpha": spec.alpha, "p": _finite_or_str(spec.p), "theta": spec.theta, "n": n,
               "s0": rep.s0, "s1": rep.s1, **row, "pass": not row["violated"]}
        records.append(_failed(rec, "interp"))
    return records


def run_dump(cfg):
    if len(cfg.xi) != 1 or not cfg.out:
        raise UsageError("dump needs exactly one --xi and --out")
    n = cfg.n[-1] if cfg.n else 1024
    m = discretize.build_matrix(cfg.xi[0], GridSpec(n))
    discretize.write_matrix(cfg.out, m)
    return None


def _finite_or_str(v):
    return "inf" if isinstance(v, float) and math.isinf(v) else v


RUNNERS = {
    "schatten": run_schatten, "hs": run_hs, "diag": run_diag, "semigroup": run_semigroup,
    "bounds": run_bounds, "cyclic": run_cyclic, "interp": run_interp, "dump": run_dump,
}


def run(cfg):
    """Execute ``cfg``; returns ``(exit_status, records)``."""
    records = RUNNERS[cfg.subcommand](cfg)
    if records is None:
        return 0, []
    ok = all(rec.get("pass") is not False for rec in records)
    return (0 if ok else 1), records


def render(records, fmt):
    if fmt == "json":
        return json.dumps(records, indent=2, default=_finite_or_str) + "\n"
    buf = io.StringIO()
    if records:
        keys = list(records[0])
        for rec in records[1:]:
            keys += [k for k in rec if k not in keys]
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for rec in records:
            w.writerow({k: _csv_cell(rec.get(k)) for k in keys})
    return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "inf" if math.isinf(v) else repr(v)
    return v


def build_parser():
    parser = argparse.ArgumentParser(prog="rlsg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, default_n):
        p.add_argument("--n", default=default_n, help="grid size(s), comma separated")
        p.add_argument("--tol", type=float, help="override the contract tolerance")
        p.add_argument("--out", help="report path (default stdout)")
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        return p

    p = common(sub.add_parser("schatten", help="classify Schatten membership"), "2048")
    p.add_argument("--xi", required=True)
    p.add_argument("--r", required=True)
    p.add_argument("--window", help="fit window n_min,n_max (default 8,N/8)")
    p.add_argument("--delta", type=float, default=spectral.DEFAULT_DELTA)
    p.add_argument("--spectrum-dir", help="also write n,s_n CSV spectra here")

    p = common(sub.add_parser("hs", help="Hilbert-Schmidt convergence table"), "256,512,1024")
    p.add_argument("--xi", required=True)

    p = common(sub.add_parser("diag", help="Fourier diagonal vs asymptote"), "")
    p.add_argument("--xi", required=True)
    p.add_argument("--modes", default="10,100,1000,10000")

    p = common(sub.add_parser("semigroup", help="semigroup residual table"), "256,512,1024")
    p.add_argument("--pair", action="append", required=True, help="XI1:XI2, repeatable")

    p = common(sub.add_parser("bounds", help="operator-norm bound grid"), "1024")
    p.add_argument("--xi", required=True)
    p.add_argument("--pq", default="1:1,1:2,2:2,2:inf")
    p.add_argument("--trials", type=int, default=64)

    p = common(sub.add_parser("cyclic", help="cyclicity index of a function"), "1000")
    p.add_argument("--function", required=True, help="const:c | monomial:n | indicator:a,b | CSV path")
    p.add_argument("--p", type=float, default=2.0)

    p = common(sub.add_parser("interp", help="interpolation inequality spot check"), "512")
    p.add_argument("--alpha0", type=float, default=0.25)
    p.add_argument("--alpha1", type=float, default=1.25)
    p.add_argument("--p0", default="inf")
    p.add_argument("--p1", default="1")
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--sigma", default="0,0.5,1")

    p = common(sub.add_parser("dump", help="write the dense matrix in binary form"), "1024")
    p.add_argument("--xi", required=True)
    return parser


def config_from_args(args):
    sc = args.subcommand
    kw = {"subcommand": sc, "out": args.out, "seed": args.seed, "tol": args.tol,
          "format": args.format or DEFAULT_FORMAT[sc]}
    try:
        kw["n"] = [int(t) for t in split_list(args.n)]
    except ValueError:
        raise UsageError(f"bad --n {args.n!r}") from None
    if hasattr(args, "xi"):
        kw["xi"] = [parse_order(t) for t in split_list(args.xi)]
        if not kw["xi"]:
            raise UsageError("--xi list is empty")
    if sc == "schatten":
        kw["r"] = [parse_real(t) for t in split_list(args.r)]
        if not kw["r"] or any(r < 1 for r in kw["r"]):
            raise UsageError("--r needs values >= 1")
        if args.window:
            w = [int(t) for t in split_list(args.window)]
            if len(w) != 2:
                raise UsageError("--window takes n_min,n_max")
            kw["window"] = tuple(w)
        kw["delta"] = args.delta
        kw["spectrum_dir"] = args.spectrum_dir
    elif sc == "diag":
        try:
            kw["modes"] = [int(t) for t in split_list(args.modes)]
        except ValueError:
            raise UsageError(f"bad --modes {args.modes!r}") from None
        if not kw["modes"] or min(kw["modes"]) < 1:
            raise UsageError("--modes needs positive integers")
    elif sc == "semigroup":
        kw["pairs"] = [parse_pair(t, parse_order) for t in args.pair]
    elif sc == "bounds":
        pq = [parse_pair(t, parse_real) for t in split_list(args.pq)]
        if not pq or any(not 1 <= p <= q for p, q in pq):
            raise UsageError("--pq needs pairs p:q with 1 <= p <= q")
        kw["pq"] = pq
        kw["trials"] = args.trials
    elif sc == "cyclic":
        kw["function"] = args.function
        if args.p < 1:
            raise UsageError("--p must be >= 1")
        kw["p"] = args.p
    elif sc == "interp":
        kw["interp"] = {"alpha0": args.alpha0, "alpha1": args.alpha1,
                        "p0": parse_real(args.p0), "p1": parse_real(args.p1), "theta": args.theta}
        kw["sigma"] = [float(t) for t in split_list(args.sigma)]
    return RunConfig(**kw)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        status, records = run(cfg)
    except UsageError as exc:
        parser.error(str(exc))
    except (DomainError, ValueError) as exc:
        print(f"rlsg {args.subcommand}: {exc}", file=sys.stderr)
        return 1
    if cfg.subcommand == "dump":
        return status
    text = render(records, cfg.format)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failed = sum(rec.get("pass") is False for rec in records)
    print(f"rlsg {cfg.subcommand}: {len(records)} records, {failed} failed", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
