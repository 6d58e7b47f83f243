# src/cli/app.py
"""
Command-Line Front End
Subcommands for spectra, corrections, the collapse-rate bound, kernel and mode
tables, the collapse toy and the headline checks.
"""

import argparse
import json
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.core.cslsim import coherent_state, default_observables, three_way_comparison
from src.core.kernels import (
    energy_scale_comparison, kernel_effective, kernel_exact, kernel_leading, kernel_linear,
    kernel_symmetrized, kernel_transcribed,
)
from src.core.modes import log_grid, mode_grid_table
from src.core.reproduce import run_reproduce
from src.core.spectrum import (
    SpectrumResult, closed_form_spectrum, compare_kernels, delta_p_inflation_closed, delta_r2_numeric,
    lambda_bound, orders_above_state_of_art, standard_spectrum_table,
)
from src.utils.config_manager import DEFAULT_CONFIG_PATH, RunConfig, load_config
from src.utils.error_handler import EXIT_OK, ErrorHandler, NonConvergenceError, ReproductionError
from src.utils.logger import get_logger, setup_logging
from src.utils.result_writer import spectrum_frame, to_plain, write_result

logger = get_logger("CLI")

KERNEL_ROUTES = ("exact", "transcribed", "symmetrized", "leading", "effective", "linear", "linear-leading")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cslcosmo",
        description="Collapse-model corrections to the primordial curvature power spectrum.",
    )
    parser.add_argument("--config", help=f"JSON5 run file (default: {DEFAULT_CONFIG_PATH} if present)")
    parser.add_argument("--out", help="output file, .csv or .json; tables print to stdout otherwise")
    parser.add_argument("--threads", type=int, help="worker threads (overrides run.threads)")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    parser.add_argument("--log-file", default="logs/cslcosmo.log", help="log file, '' to disable")
    sub = parser.add_subparsers(dest="command", required=True)

    spectrum = sub.add_parser("spectrum", help="standard spectrum, corrections, bound or kernel comparison")
    spectrum.add_argument("what", choices=("standard", "correction", "bound", "compare-kernels"))
    _correction_options(spectrum)
    _bound_options(spectrum)
    spectrum.add_argument("--include-exact", action="store_true", help="add the exact kernel column")

    correction = sub.add_parser("correction", help="delta P per log q for one era")
    _correction_options(correction)

    bound = sub.add_parser("bound", help="largest collapse rate allowed by the observational error")
    _bound_options(bound)

    compare = sub.add_parser("compare-kernels", help="closed form against 2-, 4-term and exact kernels")
    compare.add_argument("--era", choices=("inflation", "radiation"))
    compare.add_argument("--include-exact", action="store_true")

    modes = sub.add_parser("modes", help="mode function tables")
    modes.add_argument("action", choices=("dump",))
    modes.add_argument("--era", choices=("inflation", "radiation"), default="inflation")
    modes.add_argument("--k", type=float, nargs="+", help="wavenumbers in M_P (replaces --k-min/--k-max/--nk)")
    modes.add_argument("--k-min", type=float, default=1e-62)
    modes.add_argument("--k-max", type=float, default=1e-58)
    modes.add_argument("--nk", type=int, default=5)
    modes.add_argument("--eta-grid", type=_eta_grid,
                       help="N (log grid over the era window), LO:HI:N (|eta| bounds) or a comma list of eta")
    modes.add_argument("--eta-min", type=float, help="smallest |eta| (default: the era window)")
    modes.add_argument("--eta-max", type=float, help="largest |eta| (default: the era window)")
    modes.add_argument("--neta", type=int, default=5)
    modes.add_argument("--normalization", choices=("matched", "canonical"))
    modes.add_argument("--dps", type=int, help="precision floor; each row already resolves its Wronskian")

    kernel = sub.add_parser("kernel", help="single kernel evaluation")
    kernel.add_argument("action", choices=("eval", "energy-scales"))
    kernel.add_argument("--era", choices=("inflation", "radiation"), default="inflation")
    kernel.add_argument("--variant", "--route", "--kernel", dest="route", choices=KERNEL_ROUTES,
                        default="symmetrized")
    kernel.add_argument("--p", type=float, default=1e-60)
    kernel.add_argument("--q", type=float, default=1e-60)
    kernel.add_argument("--costheta", type=float, default=0.5)
    kernel.add_argument("--eta", "--eta-prime", dest="eta_prime", type=float,
                        help="default: 10 eta_e (inflation) or eta_r/2")
    kernel.add_argument("--eta-end", type=float)
    kernel.add_argument("--terms", type=int, choices=(2, 4), default=4)
    kernel.add_argument("--dps", type=int)

    simulate = sub.add_parser("simulate", help="collapse toy: master equation, trajectories, second order")
    simulate.add_argument("--dim", type=int)
    simulate.add_argument("--omega", type=float)
    simulate.add_argument("--lambda-eff", type=float)
    simulate.add_argument("--collapse-op", choices=("number", "position-sq", "hamiltonian"))
    simulate.add_argument("--ntraj", type=int)
    simulate.add_argument("--seed", type=int)
    simulate.add_argument("--dt", type=float)
    simulate.add_argument("--t-final", type=float)

    reproduce = sub.add_parser("reproduce", help="headline numbers against their bands")
    reproduce.add_argument("--skip-quadrature", action="store_true", help="closed forms and bound only")
    return parser


def _eta_grid(text: str) -> Tuple[str, Any]:
    """Parse --eta-grid as N, LO:HI:N or a comma list of eta values"""
    try:
        if "," in text:
            return "values", [float(part) for part in text.split(",") if part.strip()]
        parts = text.split(":")
        if len(parts) == 1:
            return "window", int(parts[0])
        if len(parts) == 3:
            return "bounds", (float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected N, LO:HI:N or a comma list of eta values, got {text!r}")


def _correction_options(parser: argparse.ArgumentParser):
    parser.add_argument("--era", choices=("inflation", "radiation"))
    parser.add_argument("--method", choices=("closed", "quadrature"), default="closed")
    parser.add_argument("--kernel", "--variant", dest="variant", choices=("leading", "exact", "linear"))
    parser.add_argument("--terms", type=int, choices=(2, 4), help="leading-kernel terms")
    parser.add_argument("--lambda", dest="lambda_si", type=float, help="collapse rate, s^-1")
    parser.add_argument("--full-window", action="store_true", help="exact radiation kernel beyond |p eta'| < 1")
    parser.add_argument("--with-gaussian-factor", action="store_true", help="keep 135/4 in the linear closed form")


def _bound_options(parser: argparse.ArgumentParser):
    parser.add_argument("--observational-error", type=float)


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    path: Optional[Path] = Path(args.config) if args.config else None
    if path is None and DEFAULT_CONFIG_PATH.exists():
        path = DEFAULT_CONFIG_PATH
    config = load_config(path)
    run = {"threads": args.threads, "era": getattr(args, "era", None),
           "kernel_variant": getattr(args, "variant", None),
           "observational_error": getattr(args, "observational_error", None),
           "normalization": getattr(args, "normalization", None)}
    if getattr(args, "with_gaussian_factor", False):
        run["with_gaussian_factor"] = True
    config = config.with_overrides("run", **run)
    config = config.with_overrides("csl", lambda_si=getattr(args, "lambda_si", None))
    quad = {"leading_terms": getattr(args, "terms", None)}
    if getattr(args, "full_window", False):
        quad["full_window"] = True
    config = config.with_overrides("quad", **quad)
    if args.command == "simulate":
        config = config.with_overrides(
            "sim", dim=args.dim, omega=args.omega, lambda_eff=args.lambda_eff,
            collapse_op=args.collapse_op, ntraj=args.ntraj, seed=args.seed, dt=args.dt,
            t_final=args.t_final)
    return config


def _emit(result: Any, args: argparse.Namespace, config: RunConfig):
    if args.out:
        write_result(result, args.out, run_snapshot=config.snapshot())
        print(f"✅ Results written to {args.out}")
        return
    if isinstance(result, pd.DataFrame):
        print(result.to_string(index=False))
    elif isinstance(result, SpectrumResult):
        print(spectrum_frame(result).to_string(index=False))
        print(f"method={result.method.value} variant={result.kernel_variant} era={result.era} "
              f"error_estimate={result.error_estimate:.3e}")
    else:
        print(json.dumps(to_plain(result), indent=2, ensure_ascii=False))


# -- commands ----------------------------------------------------------------

def cmd_correction(args, config: RunConfig):
    params, csl, quad = config.cosmo_params(), config.csl_params(), config.quad_config()
    run = config.run
    if args.method == "closed":
        return closed_form_spectrum(run.era, params, csl, quad, run.kernel_variant, run.with_gaussian_factor)
    try:
        return delta_r2_numeric(run.era, run.kernel_variant, params, csl, quad, run.threads, run.linear_variant)
    except NonConvergenceError as error:
        if args.out and error.partial_result is not None:
            write_result(error.partial_result, args.out, run_snapshot=config.snapshot())
            print(f"⚠️ Partial result written to {args.out}")
        raise


def cmd_bound(args, config: RunConfig) -> Dict[str, Any]:
    params, csl = config.cosmo_params(), config.csl_params()
    reference = csl.with_lambda(csl.lambda_grw_si)
    per_grw = abs(delta_p_inflation_closed(params, reference))
    lambda_max = lambda_bound(per_grw, config.run.observational_error, csl.lambda_grw_si)
    return {
        "delta_p_per_lambda_grw": per_grw,
        "observational_error": config.run.observational_error,
        "lambda_max_si": lambda_max,
        "orders_above_laboratory_bound": orders_above_state_of_art(lambda_max),
    }


def cmd_compare(args, config: RunConfig) -> pd.DataFrame:
    return compare_kernels(config.cosmo_params(), config.csl_params(), config.quad_config(),
                           config.run.era, args.include_exact, config.run.threads)


def cmd_spectrum(args, config: RunConfig):
    if args.what == "standard":
        return standard_spectrum_table(config.cosmo_params(), config.quad_config(), config.run.era)
    if args.what == "correction":
        return cmd_correction(args, config)
    if args.what == "bound":
        return cmd_bound(args, config)
    return cmd_compare(args, config)


def cmd_modes(args, config: RunConfig) -> pd.DataFrame:
    params = config.cosmo_params()
    inflation = args.era == "inflation"
    lo, hi = (abs(params.eta0), abs(params.eta_e)) if inflation else (abs(params.eta_e), params.eta_r)
    kind, grid = args.eta_grid or ("bounds", (args.eta_min or lo, args.eta_max or hi, args.neta))
    if kind == "values":
        eta_values = np.asarray(grid, dtype=float)
    elif kind == "window":
        eta_values = log_grid(lo, hi, grid, negative=inflation)
    else:
        eta_values = log_grid(grid[0], grid[1], grid[2], negative=inflation)
    k_values = np.asarray(args.k, dtype=float) if args.k else log_grid(args.k_min, args.k_max, args.nk)
    return mode_grid_table(args.era, k_values, eta_values, params, config.run.normalization, args.dps)


def cmd_kernel(args, config: RunConfig) -> Dict[str, Any]:
    params = config.cosmo_params()
    if args.action == "energy-scales":
        return energy_scale_comparison(args.q, params)
    eta_prime = args.eta_prime
    if eta_prime is None:
        eta_prime = 10.0 * params.eta_e if args.era == "inflation" else 0.5 * params.eta_r
    evaluators: Dict[str, Callable[[], Any]] = {
        "exact": lambda: kernel_exact(args.era, args.p, args.q, args.costheta, eta_prime,
                                      args.eta_end, params, args.dps),
        "transcribed": lambda: kernel_transcribed(args.era, args.p, args.q, args.costheta, eta_prime,
                                                  args.eta_end, params, args.dps or 50),
        "symmetrized": lambda: kernel_symmetrized(args.era, args.p, args.q, args.costheta, eta_prime,
                                                  args.eta_end, params, args.dps),
        "leading": lambda: kernel_leading(args.era, args.p, args.q, eta_prime, params, args.terms),
        "effective": lambda: kernel_effective(args.era, args.q, eta_prime, params, args.terms),
        "linear": lambda: kernel_linear(args.q, eta_prime, params, "exact", args.dps),
        "linear-leading": lambda: kernel_linear(args.q, eta_prime, params, "leading"),
    }
    value = evaluators[args.route]()
    return {"route": args.route, "p": args.p, "q": args.q, "costheta": args.costheta,
            "eta_prime": eta_prime, **value.as_dict()}


def cmd_simulate(args, config: RunConfig) -> Dict[str, Any]:
    sim = config.sim
    system = sim.to_system()
    psi0 = coherent_state(sim.dim, sim.alpha)
    table = three_way_comparison(system, psi0, default_observables(system), sim.t_final, sim.dt,
                                 sim.ntraj, sim.seed, config.run.threads)
    return {"system": {"dim": sim.dim, "omega": sim.omega, "lambda_eff": sim.lambda_eff,
                       "collapse_op": sim.collapse_op, "alpha": sim.alpha},
            "t_final": sim.t_final, "dt": sim.dt, "ntraj": sim.ntraj, "seed": sim.seed,
            "comparison": table}


def cmd_reproduce(args, config: RunConfig) -> Dict[str, Any]:
    try:
        report = run_reproduce(config.cosmo_params(), config.csl_params(), config.quad_config(),
                               threads=config.run.threads,
                               observational_error=config.run.observational_error,
                               with_quadrature=not args.skip_quadrature)
    except ReproductionError as error:
        if error.report is not None:
            print(error.report.as_frame().to_string(index=False))
        raise
    print(report.as_frame().to_string(index=False))
    return report.as_dict()


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], Any]] = {
    "spectrum": cmd_spectrum,
    "correction": cmd_correction,
    "bound": cmd_bound,
    "compare-kernels": cmd_compare,
    "modes": cmd_modes,
    "kernel": cmd_kernel,
    "simulate": cmd_simulate,
    "reproduce": cmd_reproduce,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; returns the process exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose, args.log_file or None)
    handler = ErrorHandler()
    try:
        config = _resolve_config(args)
        result = COMMANDS[args.command](args, config)
        if not (args.command == "reproduce" and not args.out):
            _emit(result, args, config)
    except Exception as error:  # mapped to an exit code below
        issue = handler.handle_error(error, component=args.command)
        print(f"❌ {issue.message}")
        if issue.recovery_action:
            print(f"   ↳ {issue.recovery_action}")
        if args.verbose:
            logger.exception("Traceback")
        return issue.exit_code
    return EXIT_OK
