"""Command-line front end: every operation as a subcommand with CSV or JSON
output, suitable for shell pipelines and experiment scripts.

Order profiles are given with a small spec grammar (see --help of any
subcommand): const:<a>, ex1:<a0>,<lam>,<gamma>, ex2:..., ex3:...,
ex4:<gamma>, reclog, or csv:<path> for a tabulated profile.  Input functions
are the builtins one, ramp, cos3, or csv:<path>.  Exit codes: 0 success,
2 usage or validation failure, 3 numerical failure.  VARFRAC_THREADS caps
internal parallelism; a fixed --seed makes randomized suites byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .core import (
    GridFunction,
    K0,
    NumericalError,
    QuadratureConfig,
    _atomic_write_text,
    maximal_values,
    q_values,
    rl_values,
)
from .diagnostics import (
    classify_compactness,
    l1_criterion_integral,
    l1_operator_norm,
    lp_to_linf_norm,
    verify_scaling,
    verify_semigroup,
    witness_separation,
)
from .entropy import build_example_estimate, fit_rate
from .orders import (
    Constant,
    ExpOffset,
    LogPower,
    LogPowerOffset,
    OrderFunction,
    OrderFunctionError,
    PowerOffset,
    ReciprocalLog,
    Tabulated,
)
from .spectral import (
    approximation_numbers,
    assemble_matrix,
    singular_values,
    spectrum_to_csv,
)

__all__ = ["RunConfig", "main"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

DIAGNOSE_CHECKS = ("l1criterion", "l1norm", "lptolinf", "compact-zero", "compact-one")
VERIFY_SUITES = ("identities", "witness", "maxbound")


@dataclass(frozen=True)
class RunConfig:
    """Validated common parameters of one subcommand invocation.

    Subcommand-specific flags stay on the parsed namespace; this record holds
    the fields shared across subcommands, validated before any computation.
    A fixed seed makes the randomized suites byte-identical.
    """

    subcommand: str
    alpha_spec: str | None = None
    p: float = 2.0
    q: float = 2.0
    output: str | None = None
    fmt: str = "csv"
    seed: int = 0

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        p = float(getattr(args, "p", 2.0))
        q = float(getattr(args, "q", 2.0))
        if p < 1.0 or q < 1.0:
            raise ValueError(f"exponents must satisfy p, q >= 1, got p={p}, q={q}")
        seed = int(getattr(args, "seed", 0))
        if seed < 0:
            raise ValueError(f"seed must be nonnegative, got {seed}")
        json_out = args.subcommand in ("diagnose", "verify") or bool(
            getattr(args, "fit", None)
        )
        return cls(
            subcommand=args.subcommand,
            alpha_spec=getattr(args, "alpha", None),
            p=p,
            q=q,
            output=args.output,
            fmt="json" if json_out else "csv",
            seed=seed,
        )


# --------------------------------------------------------------------------
# spec parsing


def parse_alpha(spec: str) -> OrderFunction:
    """Build an order profile from its command-line spec string."""
    head, sep, tail = spec.partition(":")
    if head == "const":
        return Constant(_floats(tail, 1)[0])
    if head == "ex1":
        return PowerOffset(*_floats(tail, 3))
    if head == "ex2":
        return LogPowerOffset(*_floats(tail, 3))
    if head == "ex3":
        return ExpOffset(*_floats(tail, 3))
    if head == "ex4":
        return LogPower(_floats(tail, 1)[0])
    if spec == "reclog":
        return ReciprocalLog()
    if head == "csv":
        return Tabulated.from_csv(tail)
    raise ValueError(
        f"unknown alpha spec {spec!r}; expected const:<a>, ex1:<a0>,<lam>,<gamma>, "
        "ex2:..., ex3:..., ex4:<gamma>, reclog, or csv:<path>"
    )


def parse_family(spec: str) -> tuple[str, dict]:
    """Map an ex1..ex4 alpha spec to its entropy family name and parameters."""
    head, _, tail = spec.partition(":")
    if head == "ex4":
        return "Example4", {"gamma": _floats(tail, 1)[0]}
    if head in ("ex1", "ex2", "ex3"):
        a0, lam, gamma = _floats(tail, 3)
        return "Example" + head[2], {"alpha0": a0, "lam": lam, "gamma": gamma}
    raise ValueError(f"entropy needs a worked-family spec ex1..ex4, got {spec!r}")


def parse_f(spec: str) -> GridFunction:
    """Build an input function: builtin one/ramp/cos3 or csv:<path>."""
    if spec == "one":
        return GridFunction((0.0, 1.0), (1.0, 1.0))
    if spec == "ramp":
        return GridFunction((0.0, 1.0), (0.0, 1.0))
    if spec == "cos3":
        t = np.linspace(0.0, 1.0, 257)
        return GridFunction(t, np.cos(3.0 * t))
    head, _, tail = spec.partition(":")
    if head == "csv":
        nodes, values = _read_csv_columns(tail)
        return GridFunction(np.asarray(nodes), np.asarray(values))
    raise ValueError(f"unknown f spec {spec!r}; expected one, ramp, cos3, or csv:<path>")


def parse_targets(spec: str) -> np.ndarray:
    """Either a point count (uniform grid on [0,1]) or comma-separated points."""
    if "," in spec or "." in spec:
        pts = np.asarray([float(x) for x in spec.split(",")], dtype=float)
        if pts.size == 0:
            raise ValueError("empty target list")
        return pts
    count = int(spec)
    if count < 2:
        raise ValueError(f"target count must be >= 2, got {count}")
    return np.linspace(0.0, 1.0, count)


def parse_ngrid(spec: str) -> list[int]:
    """Index grid: '2^6..2^20' for powers of two, or comma-separated ints."""
    if ".." in spec:
        lo, _, hi = spec.partition("..")
        if not (lo.startswith("2^") and hi.startswith("2^")):
            raise ValueError(f"range grid must look like 2^6..2^20, got {spec!r}")
        a, b = int(lo[2:]), int(hi[2:])
        if not (0 < a <= b):
            raise ValueError(f"bad power range in {spec!r}")
        return [2**k for k in range(a, b + 1)]
    grid = [int(x) for x in spec.split(",")]
    if not grid or any(n < 3 for n in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("explicit grid must be increasing integers >= 3")
    return grid


def _floats(tail: str, count: int) -> list[float]:
    parts = [x for x in tail.split(",") if x != ""]
    if len(parts) != count:
        raise ValueError(f"expected {count} comma-separated numbers, got {tail!r}")
    return [float(x) for x in parts]


def _read_csv_columns(path: str) -> tuple[list[float], list[float]]:
    """First two columns of a CSV file, skipping '#' comments and a header row."""
    xs: list[float] = []
    ys: list[float] = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                x, y = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if not xs:  # header row
                    continue
                raise ValueError(f"bad CSV row {row!r} in {path}")
            xs.append(x)
            ys.append(y)
    if len(xs) < 2:
        raise ValueError(f"need at least two data rows in {path}")
    return xs, ys


# --------------------------------------------------------------------------
# output plumbing


def _emit(text: str, output: str | None) -> None:
    """Write the payload atomically to a file, or to stdout."""
    if not text.endswith("\n"):
        text += "\n"
    if output:
        _atomic_write_text(output, text)
    else:
        sys.stdout.write(text)


def _json_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _csv_table(header: str, rows) -> str:
    return "\n".join([header] + [",".join(repr(float(v)) for v in row) for row in rows])


# --------------------------------------------------------------------------
# subcommands


def cmd_apply(cfg: RunConfig, args) -> int:
    alpha = parse_alpha(cfg.alpha_spec)
    f = parse_f(args.f)
    targets = parse_targets(args.targets)
    quad = QuadratureConfig(n_cells=args.n_cells)
    values = (q_values if args.adjoint else rl_values)(alpha, f, targets, quad)
    _emit(_csv_table("t,value", zip(targets, values)), cfg.output)
    return EXIT_OK


def cmd_diagnose(cfg: RunConfig, args) -> int:
    alpha = parse_alpha(cfg.alpha_spec)
    check = args.check
    if check == "l1criterion":
        report = l1_criterion_integral(alpha).to_dict()
    elif check == "l1norm":
        report = l1_operator_norm(alpha).to_dict()
    elif check == "lptolinf":
        report = lp_to_linf_norm(alpha, cfg.p).to_dict()
    elif check in ("compact-zero", "compact-one"):
        report = classify_compactness(alpha, check.split("-")[1]).to_dict()
    else:
        raise ValueError(f"unknown check {check!r}; expected one of {DIAGNOSE_CHECKS}")
    _emit(_json_dumps({"alpha": cfg.alpha_spec, "check": check, "report": report}), cfg.output)
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig, args) -> int:
    if args.matrix:
        entries = _load_matrix(args.matrix)
        sv = np.linalg.svd(entries, compute_uv=False)
        _emit(_spectrum_text(sv), cfg.output)
        return EXIT_OK
    if not cfg.alpha_spec:
        raise ValueError("spectrum needs --alpha or --matrix")
    alpha = parse_alpha(cfg.alpha_spec)
    if args.fit:
        report = approximation_numbers(alpha, n_max=args.n_max, n_disc=args.n, r=args.r)
        ks = np.arange(args.fit_lo, min(args.fit_hi, args.n_max) + 1)
        slope, intercept = np.polyfit(np.log(ks), np.log(report.values[ks - 1]), 1)
        payload = {
            "alpha": cfg.alpha_spec,
            "converged": report.converged,
            "drift": report.drift,
            "fit_range": [int(ks[0]), int(ks[-1])],
            "intercept": float(intercept),
            "n_disc": report.n_disc,
            "slope": float(slope),
            "values": [float(v) for v in report.values],
        }
        _emit(_json_dumps(payload), cfg.output)
        return EXIT_OK
    m = assemble_matrix(alpha, n=args.n or 256, r=args.r, p=cfg.p, q=cfg.q)
    _emit(_spectrum_text(singular_values(m)), cfg.output)
    return EXIT_OK


def _spectrum_text(values: np.ndarray) -> str:
    lines = ["k,sigma_k"]
    lines += [f"{k},{repr(float(v))}" for k, v in enumerate(values, start=1)]
    return "\n".join(lines)


def _load_matrix(path: str) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            rows.append([float(x) for x in row])
    if not rows:
        raise ValueError(f"no matrix rows in {path}")
    entries = np.asarray(rows, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"matrix in {path} is not square: shape {entries.shape}")
    return entries


def cmd_entropy(cfg: RunConfig, args) -> int:
    family, params = parse_family(cfg.alpha_spec)
    grid = parse_ngrid(args.n_grid)
    est = build_example_estimate(family, params, grid, p=cfg.p, q=cfg.q)
    if cfg.output:
        est.to_csv(cfg.output)
    if args.fit:
        sides = ["upper", "predicted"] + (["lower"] if est.lower is not None else [])
        fits = {side: fit_rate(est, args.fit, side).to_dict() for side in sides}
        payload = {
            "alpha": cfg.alpha_spec,
            "family": family,
            "fits": fits,
            "model": args.fit,
            "params": params,
        }
        # the bracket CSV (if requested) went to the output path; the fit
        # summary is the stdout payload
        _emit(_json_dumps(payload), None)
        return EXIT_OK
    if not cfg.output:
        lines = ["n,lower,upper,predicted"]
        for i, n in enumerate(est.n_values):
            lo = repr(est.lower[i]) if est.lower is not None else ""
            lines.append(f"{n},{lo},{repr(est.upper[i])},{repr(est.predicted[i])}")
        _emit("\n".join(lines), None)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    alpha = parse_alpha(cfg.alpha_spec)
    if args.suite == "identities":
        table = _verify_identities(alpha, args.n_cells)
    elif args.suite == "witness":
        table = _verify_witness(alpha, cfg.p, args.n_max)
    elif args.suite == "maxbound":
        table = _verify_maxbound(alpha, cfg.seed, args.trials)
    else:
        raise ValueError(f"unknown suite {args.suite!r}; expected one of {VERIFY_SUITES}")
    _emit(_json_dumps(table), cfg.output)
    return EXIT_OK


def _verify_identities(alpha: OrderFunction, n_cells: int) -> dict:
    f = parse_f("cos3")
    coarse = QuadratureConfig(n_cells=n_cells)
    fine = QuadratureConfig(n_cells=2 * n_cells)
    sg1 = verify_semigroup(alpha, 0.5, f, coarse)
    sg2 = verify_semigroup(alpha, 0.5, f, fine)
    sc1 = verify_scaling(alpha, 0.5, 2.0, 2.0, f, coarse)
    sc2 = verify_scaling(alpha, 0.5, 2.0, 2.0, f, fine)
    # contraction under cell doubling certifies a resampling artifact, not an
    # identity violation; the absolute cap catches broken identities outright
    sg_pass = sg2 <= 0.05 and sg2 <= 0.75 * sg1 + 1e-12
    sc_pass = sc2 <= 0.05 and sc2 <= 0.75 * sc1 + 1e-12
    return {
        "pass": sg_pass and sc_pass,
        "scaling": {"coarse": sc1, "fine": sc2, "pass": sc_pass},
        "semigroup": {"coarse": sg1, "fine": sg2, "pass": sg_pass},
    }


def _verify_witness(alpha: OrderFunction, p: float, n_max: int) -> dict:
    values = witness_separation(alpha, p, n_max)
    tail = values[-min(10, len(values)) :]
    liminf_positive = bool(np.min(tail) >= 0.5 * np.max(tail) and np.min(tail) > 0.0)
    decays = bool(values[-1] < 0.1 * values[0])
    return {
        "decays": decays,
        "liminf_positive": liminf_positive,
        "values": [float(v) for v in values],
    }


def _verify_maxbound(alpha: OrderFunction, seed: int, trials: int) -> dict:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    targets = np.linspace(0.0, 1.0, 65)
    bound_factor = 2.0 / K0
    violations = 0
    worst = -math.inf
    for _ in range(trials):
        k = int(rng.integers(3, 12))
        inner = np.sort(rng.uniform(0.05, 0.95, size=k))
        nodes = np.unique(np.concatenate(([0.0], inner, [1.0])))
        values = rng.uniform(0.0, 2.0, size=nodes.size)
        f = GridFunction(nodes, values, "step")
        lhs = rl_values(alpha, f, targets)
        mf = maximal_values(f, targets)
        rhs = bound_factor * targets ** np.asarray(alpha.eval(targets)) * mf + 1e-9
        excess = float(np.max(lhs - rhs))
        worst = max(worst, excess)
        if excess > 0.0:
            violations += 1
    return {
        "pass": violations == 0,
        "seed": seed,
        "trials": trials,
        "violations": violations,
        "worst_excess": worst,
    }


# --------------------------------------------------------------------------
# argument parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="varfrac",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(sp, alpha_required=True):
        sp.add_argument(
            "--alpha",
            required=alpha_required,
            default=None if alpha_required else "const:0.5",
            help="order spec: const:<a>, ex1:<a0>,<lam>,<gamma>, ex2:..., ex3:..., "
            "ex4:<gamma>, reclog, csv:<path>",
        )
        sp.add_argument("--output", default=None, help="output path (default stdout)")

    sp = sub.add_parser("apply", help="evaluate the integration operator on a function")
    add_common(sp)
    sp.add_argument("--f", default="one", help="input: one, ramp, cos3, or csv:<path>")
    sp.add_argument("--targets", default="65", help="point count or comma-separated points")
    sp.add_argument("--n-cells", type=int, default=256, help="quadrature cells per target")
    sp.add_argument("--adjoint", action="store_true", help="apply the right-sided operator")
    sp.set_defaults(func=cmd_apply)

    sp = sub.add_parser("diagnose", help="boundedness and compactness diagnostics")
    add_common(sp)
    sp.add_argument("--check", required=True, choices=DIAGNOSE_CHECKS)
    sp.add_argument("--p", type=float, default=2.0, help="source exponent for lptolinf")
    sp.set_defaults(func=cmd_diagnose)

    sp = sub.add_parser("spectrum", help="singular values / approximation numbers")
    add_common(sp, alpha_required=False)
    sp.add_argument("--n", type=int, default=None, help="matrix size (or N_disc with --fit)")
    sp.add_argument("--r", type=float, default=1.0, help="right endpoint of the interval")
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--q", type=float, default=2.0)
    sp.add_argument("--fit", action="store_true", help="fit the approximation-number decay")
    sp.add_argument("--n-max", type=int, default=64, help="number of approximation numbers")
    sp.add_argument("--fit-lo", type=int, default=8, help="first index of the fit window")
    sp.add_argument("--fit-hi", type=int, default=64, help="last index of the fit window")
    sp.add_argument("--matrix", default=None, help="CSV matrix file: report its spectrum")
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("entropy", help="entropy-number brackets for the worked families")
    add_common(sp)
    sp.add_argument("--n-grid", default="2^6..2^20", help="2^a..2^b or comma-separated ints")
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--q", type=float, default=2.0)
    sp.add_argument(
        "--fit",
        default=None,
        choices=("power", "power_log", "power_loglog"),
        help="also fit the bracket columns and print the fit JSON",
    )
    sp.set_defaults(func=cmd_entropy)

    sp = sub.add_parser("verify", help="identity, witness, and maximal-bound suites")
    add_common(sp, alpha_required=False)
    sp.add_argument("--suite", required=True, choices=VERIFY_SUITES)
    sp.add_argument("--n-cells", type=int, default=512, help="coarse cell count (identities)")
    sp.add_argument("--p", type=float, default=2.0, help="witness exponent")
    sp.add_argument("--n-max", type=int, default=20, help="witness count")
    sp.add_argument("--seed", type=int, default=0, help="RNG seed (maxbound)")
    sp.add_argument("--trials", type=int, default=100, help="trial count (maxbound)")
    sp.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        return args.func(cfg, args)
    except (OrderFunctionError, ValueError, OSError) as exc:
        print(f"varfrac: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"varfrac: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
