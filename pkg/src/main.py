# src/main.py

import argparse
import json
import re
import sys

from src.capacity.christoffel import default_probe_grid
from src.capacity.profile import capacity_profile, export_profile_csv
from src.config import (
    BANDWIDTH,
    CHECK_GRID_SIZE,
    GRID_W,
    K_LIST,
    KERNEL_FAMILY,
    KERNEL_OFFSET,
    LAMBDA_0,
    M_SAMPLES,
    MU_P,
    MU_Q_LIST,
    N_SAMPLES,
    PROBE_SIZE,
    RATE_ETA,
    RATE_K,
    RATE_N_LIST,
    RATE_VARSIGMA,
    REPLICATIONS,
    RHO,
    SEED,
    STUDY_DIR,
    VAR_P,
    VAR_Q,
    load_config_file,
)
from src.estimator.model import evaluate_batch, load_model, save_model
from src.estimator.spectral import fit_model
from src.experiment.parallel import default_threads
from src.experiment.rates import export_rates_csv, run_rate_study
from src.experiment.study import SimConfig, compare_to_baseline, export_report, format_comparison, run_study
from src.io.exporter import export_csv, export_json
from src.io.samples import load_samples
from src.kernels.functions import KernelSpec, kappa0
from src.kernels.gram import assemble_gram
from src.kernels.samples import SampleSet
from src.regularization.constants import check_scheme_constants
from src.regularization.schemes import KINDS, RegScheme
from src.selection.balance import lambda_mn
from src.selection.grid import LambdaGrid
from src.selection.quasi_optimality import quasi_optimality
from src.utils.errors import InputError, NumericalError
from src.utils.logger import get_logger

logger = get_logger()

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

# path flags every command needs, checked after --config is merged
REQUIRED_FLAGS = {
    "fit": ("xp", "xq", "out"),
    "evaluate": ("model", "points", "out"),
    "rates": ("out",),
    "capacity": ("xp", "out"),
}


class CliParser(argparse.ArgumentParser):
    """Parse errors surface as InputError instead of SystemExit."""

    def error(self, message):
        match = re.match(r"argument (--[\w-]+)(?:/[^:]*)?: (.*)", message)
        if match:
            raise InputError(match.group(2), flag=match.group(1)[2:])
        raise InputError(message)


# ============================================================
# Shared flag groups
# ============================================================
def _add_kernel_flags(p):
    g = p.add_argument_group("kernel")
    g.add_argument("--kernel-family", choices=["gaussian_plus_one", "gaussian"], default=KERNEL_FAMILY,
                   help="kernel family (study default: gaussian_plus_one, 1 + exp(-(x-x')^2/2))")
    g.add_argument("--bandwidth", type=float, default=BANDWIDTH,
                   help="Gaussian scale (study default: 1)")
    g.add_argument("--offset", type=float, default=None,
                   help=f"additive constant (study default: {KERNEL_OFFSET:g}; 0 for gaussian)")


def _add_grid_flags(p):
    g = p.add_argument_group("lambda grid")
    g.add_argument("--lambda0", type=float, default=LAMBDA_0, help="grid start (study default: 0.9)")
    g.add_argument("--rho", type=float, default=RHO, help="grid ratio (study default: (1/9)^(1/9))")
    g.add_argument("--w", type=int, default=GRID_W, help="grid length (study default: 9)")


def _add_common_flags(p, default_format=None):
    p.add_argument("--config", default=None, help="YAML/JSON file supplying flag values; flags override it")
    if default_format:
        p.add_argument("--format", choices=["json", "csv"], default=default_format, help="output format")


def build_parser():
    parser = CliParser(
        prog="python -m src.main",
        description="Regularized Radon-Nikodym derivative (density ratio) estimation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter
    subparsers = {}

    # ---- fit ----
    p = sub.add_parser("fit", help="fit a ratio model from two sample files", formatter_class=fmt)
    _add_common_flags(p)
    p.add_argument("--xp", default=None, help="X_p samples (CSV or JSON) (required)")
    p.add_argument("--xq", default=None, help="X_q samples (CSV or JSON) (required)")
    _add_kernel_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="regularization parameter; omitted = quasi-optimality on the grid")
    p.add_argument("--k", type=int, default=1, help="Lavrentiev iterations")
    p.add_argument("--scheme", choices=KINDS, default="iterated_lavrentiev", help="filter family")
    _add_grid_flags(p)
    p.add_argument("--out", default=None, help="model JSON path (required)")
    subparsers["fit"] = p

    # ---- evaluate ----
    p = sub.add_parser("evaluate", help="evaluate a saved model at points", formatter_class=fmt)
    _add_common_flags(p, default_format="csv")
    p.add_argument("--model", default=None, help="model JSON from `fit` (required)")
    p.add_argument("--points", default=None, help="points CSV or JSON (required)")
    p.add_argument("--out", default=None, help="output path (required)")
    subparsers["evaluate"] = p

    # ---- simulate ----
    p = sub.add_parser("simulate", help="run the Gaussian simulation study", formatter_class=fmt)
    _add_common_flags(p)
    p.add_argument("--n", type=int, default=N_SAMPLES, help="|X_p| (study default: 100)")
    p.add_argument("--m", type=int, default=M_SAMPLES, help="|X_q| (study default: 100)")
    p.add_argument("--mu-p", type=float, default=MU_P, help="mean of p (study default: 2)")
    p.add_argument("--var-p", type=float, default=VAR_P, help="variance of p (study default: 5)")
    p.add_argument("--mu-q", type=float, nargs="+", default=list(MU_Q_LIST),
                   help="means of q (study default: 2 3 4)")
    p.add_argument("--var-q", type=float, default=VAR_Q, help="variance of q (study default: 0.5)")
    p.add_argument("--k-list", type=int, nargs="+", default=list(K_LIST),
                   help="Lavrentiev iterations (study default: 1 2 3 5 10)")
    p.add_argument("--replications", type=int, default=REPLICATIONS, help="simulations (study default: 20)")
    p.add_argument("--seed", type=int, default=SEED, help="base seed")
    p.add_argument("--keep-pointwise", action="store_true",
                   help="store pointwise error grids and per-point beta values (adds study_pointwise.csv)")
    _add_kernel_flags(p)
    _add_grid_flags(p)
    p.add_argument("--out-dir", default=str(STUDY_DIR), help="output directory")
    p.add_argument("--threads", type=int, default=default_threads(), help="worker threads")
    subparsers["simulate"] = p

    # ---- rates ----
    p = sub.add_parser("rates", help="empirical convergence rates at lambda_{n,n}", formatter_class=fmt)
    _add_common_flags(p, default_format="csv")
    p.add_argument("--n-list", type=int, nargs="+", default=list(RATE_N_LIST), help="increasing sample sizes, m = n")
    p.add_argument("--eta", type=float, default=RATE_ETA, help="smoothness exponent, phi(t) = t^eta")
    p.add_argument("--varsigma", type=float, default=RATE_VARSIGMA, help="kernel source exponent, xi(t) = t^varsigma")
    p.add_argument("--k", type=int, default=RATE_K, help="Lavrentiev iterations")
    p.add_argument("--replications", type=int, default=REPLICATIONS, help="replications per n")
    p.add_argument("--seed", type=int, default=SEED, help="base seed")
    p.add_argument("--mu-q", type=float, default=2.0, help="mean of q")
    p.add_argument("--probe", type=float, default=None, help="pointwise probe (default: mu_q)")
    _add_kernel_flags(p)
    p.add_argument("--out", default=None, help="output path (required)")
    p.add_argument("--threads", type=int, default=default_threads(), help="worker threads")
    subparsers["rates"] = p

    # ---- capacity ----
    p = sub.add_parser("capacity", help="effective dimension, N_inf and lambda_* curves", formatter_class=fmt)
    _add_common_flags(p, default_format="csv")
    p.add_argument("--xp", default=None, help="X_p samples (CSV or JSON) (required)")
    p.add_argument("--xq", default=None, help="X_q samples, only used for m in lambda_{m,n}")
    _add_kernel_flags(p)
    _add_grid_flags(p)
    p.add_argument("--probe-size", type=int, default=PROBE_SIZE, help="probe grid size for N_inf")
    p.add_argument("--bracket", type=float, nargs=2, default=None, metavar=("LO", "HI"),
                   help="lambda_* search bracket (default: 1e-8 to kappa_0^2)")
    p.add_argument("--eta", type=float, default=RATE_ETA, help="exponent for lambda_{m,n}")
    p.add_argument("--varsigma", type=float, default=RATE_VARSIGMA, help="exponent for lambda_{m,n}")
    p.add_argument("--out", default=None, help="profile output path (required)")
    subparsers["capacity"] = p

    # ---- check-schemes ----
    p = sub.add_parser("check-schemes", help="verify filter constants and qualification", formatter_class=fmt)
    _add_common_flags(p)
    p.add_argument("--scheme", choices=KINDS, default="iterated_lavrentiev", help="filter family")
    p.add_argument("--k", type=int, default=1, help="Lavrentiev iterations")
    p.add_argument("--lambda", dest="lam", type=float, default=0.1, help="regularization parameter")
    p.add_argument("--t-max", type=float, default=None, help="spectrum bound (default: kappa_0^2)")
    p.add_argument("--grid-size", type=int, default=CHECK_GRID_SIZE, help="log-grid size")
    p.add_argument("--s", type=float, default=None, help="qualification to check (default: the scheme's)")
    _add_kernel_flags(p)
    p.add_argument("--out", default=None, help="report path (default: stdout only)")
    subparsers["check-schemes"] = p

    return parser, subparsers


# ============================================================
# Helpers
# ============================================================
def _kernel(args) -> KernelSpec:
    offset = args.offset
    if offset is None:
        offset = 0.0 if args.kernel_family == "gaussian" else KERNEL_OFFSET
    return KernelSpec(family=args.kernel_family, bandwidth=args.bandwidth, offset=offset)


def _grid(args) -> LambdaGrid:
    return LambdaGrid(lambda_0=args.lambda0, rho=args.rho, w=args.w)


def _emit(payload):
    print(json.dumps(payload, indent=2, sort_keys=True))


# ============================================================
# Commands
# ============================================================
def cmd_fit(args) -> int:
    if args.lam is not None and not args.lam > 0:
        raise InputError(f"lambda must be > 0, got {args.lam}", flag="lambda")

    kernel = _kernel(args)
    xp = load_samples(args.xp, "p")
    xq = load_samples(args.xq, "q")
    gram = assemble_gram(kernel, xp, xq)

    k = 1 if args.scheme != "iterated_lavrentiev" else args.k
    if args.lam is None:
        if args.scheme == "spectral_cutoff":
            raise InputError("spectral_cutoff needs an explicit --lambda", flag="lambda")
        trace = quasi_optimality(gram, xp, xq, kernel, k, _grid(args))
        model = trace.chosen_model
        logger.info(f"[FIT] quasi-optimal lambda={trace.chosen_lambda:.6g}")
    else:
        model = fit_model(gram, xp, xq, kernel, RegScheme(args.scheme, args.lam, k))

    save_model(model, args.out)
    _emit({"model": str(args.out), "n": model.n, "m": model.m, "scheme": model.scheme.to_dict()})
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    points = load_samples(args.points, "p")
    values = evaluate_batch(model, points.points)

    if args.format == "csv":
        header = [f"x{j}" for j in range(points.dim)]
        rows = [
            {**dict(zip(header, (repr(float(v)) for v in p))), "beta": repr(float(b))}
            for p, b in zip(points.points, values)
        ]
        export_csv(rows, args.out, fieldnames=header + ["beta"])
    else:
        export_json({"points": points.points.tolist(), "beta": values.tolist()}, args.out)

    _emit({"evaluated": int(values.size), "out": str(args.out)})
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = SimConfig(
        n=args.n,
        m=args.m,
        mu_p=args.mu_p,
        var_p=args.var_p,
        mu_q_list=args.mu_q,
        var_q=args.var_q,
        k_list=args.k_list,
        replications=args.replications,
        grid=_grid(args),
        kernel=_kernel(args),
        seed=args.seed,
        keep_pointwise=args.keep_pointwise,
    )
    if args.threads < 1:
        raise InputError(f"threads must be >= 1, got {args.threads}", flag="threads")

    report = run_study(config, threads=args.threads)
    export_report(report, args.out_dir)

    print(format_comparison(compare_to_baseline(report)))
    return EXIT_OK


def cmd_rates(args) -> int:
    record = run_rate_study(
        n_list=args.n_list,
        eta=args.eta,
        varsigma=args.varsigma,
        k=args.k,
        replications=args.replications,
        seed=args.seed,
        mu_q=args.mu_q,
        probe=args.probe,
        kernel=_kernel(args),
        threads=max(1, args.threads),
    )

    if args.format == "csv":
        export_rates_csv(record, args.out)
    else:
        export_json(record.to_dict(), args.out)

    _emit({"pointwise_fit": record.pointwise_fit.to_dict(), "rn_fit": record.rn_fit.to_dict()})
    return EXIT_OK


def cmd_capacity(args) -> int:
    kernel = _kernel(args)
    xp = load_samples(args.xp, "p")
    xq = load_samples(args.xq, "q") if args.xq else SampleSet(xp.points, measure_tag="q")
    gram = assemble_gram(kernel, xp, xq)

    grid = _grid(args)
    profile = capacity_profile(
        gram, kernel, xp, grid.with_predecessor,
        probe_points=default_probe_grid(xp, size=args.probe_size),
        bracket=tuple(args.bracket) if args.bracket else None,
    )

    if args.format == "csv":
        export_profile_csv(profile, args.out)
    else:
        export_json(profile.to_dict(), args.out)

    summary = {
        "profile": str(args.out),
        "lambda_star": profile.lambda_star,
        "lambda_mn": lambda_mn(xq.size, xp.size, args.eta, args.varsigma),
    }
    if profile.lambda_star is None:
        summary["warning"] = "lambda_* could not be bracketed"
    _emit(summary)
    return EXIT_OK


def cmd_check_schemes(args) -> int:
    kernel = _kernel(args)
    scheme = RegScheme(args.scheme, args.lam, args.k if args.scheme == "iterated_lavrentiev" else 1)
    t_max = args.t_max if args.t_max is not None else kappa0(kernel) ** 2

    report = check_scheme_constants(scheme, t_max, args.grid_size, s=args.s)
    payload = report.to_dict()

    if args.out:
        export_json(payload, args.out)
    _emit(payload)

    if not report.holds:
        logger.warning(f"[CHECK] violated: {[c.name for c in report.checks if not c.holds]}")
        return EXIT_NUMERICAL
    return EXIT_OK


COMMANDS = {
    "fit": cmd_fit,
    "evaluate": cmd_evaluate,
    "simulate": cmd_simulate,
    "rates": cmd_rates,
    "capacity": cmd_capacity,
    "check-schemes": cmd_check_schemes,
}


def _fail(kind, message, code, flag=None) -> int:
    payload = {"error": kind, "message": message, "exit_code": code}
    if flag:
        payload["flag"] = f"--{flag}"
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def _parse(parser, subparsers, argv):
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args

    values = load_config_file(args.config)
    if "lambda" in values:
        values["lam"] = values.pop("lambda")
    unknown = sorted(set(values) - set(vars(args)))
    if unknown:
        raise InputError(f"Unknown keys in {args.config}: {unknown}", flag="config")

    subparsers[args.command].set_defaults(**values)
    return parser.parse_args(argv)


def _check_required(args):
    for name in REQUIRED_FLAGS.get(args.command, ()):
        if getattr(args, name) is None:
            raise InputError("missing value (give the flag or set it in --config)", flag=name)


# ============================================================
# Entry point
# ============================================================
def main(argv=None) -> int:
    parser, subparsers = build_parser()

    try:
        args = _parse(parser, subparsers, argv)
        _check_required(args)
        return COMMANDS[args.command](args)

    except InputError as e:
        message = f"--{e.flag}: {e}" if e.flag else str(e)
        return _fail("InputError", message, EXIT_VALIDATION, e.flag)
    except NumericalError as e:
        return _fail("NumericalError", str(e), EXIT_NUMERICAL)
    except ValueError as e:
        return _fail("ValueError", str(e), EXIT_VALIDATION)
    except OSError as e:
        return _fail(type(e).__name__, str(e), EXIT_IO)


if __name__ == "__main__":
    sys.exit(main())
