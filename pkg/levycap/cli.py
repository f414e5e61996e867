"""
Command-line front end: `levycap <subcommand> ...`.

Exit status 0 on success, 2 on configuration errors, 3 on unsupported
configurations or numerical failures, 4 when a casebook assertion fails.
"""

import argparse
import io
import logging
import math
import os
import sys
import tempfile
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np

from levycap import casebook, serialize
from levycap.criterion import condition_e_check, criterion_integral, fubini_check
from levycap.equilibrium import CapacityControls, SolverControls, capacity_estimate
from levycap.errors import ConfigurationError, LevycapError
from levycap.gauge import GaugeControls, GaugeQuery, Sign, g_gamma
from levycap.levy_model import LevyTriplet, evaluate_exponent
from levycap.measure_energy import (
    DiscreteMeasure,
    KernelMatrix,
    SetGrid,
    energy,
    gauge_kernel,
    riesz_kernel_for,
)
from levycap.montecarlo import McConfig, mc_chi_check, mc_chi_energy, mc_image_riesz_energy

logger = logging.getLogger(__name__)

SEED_VARIABLE = "LEVYCAP_SEED"
CASEBOOK_FAILURE = 4


def parse_range(text: str) -> np.ndarray:
    """
    "a:b:step" -> a, a + step, ... up to b inclusive; a bare number is a
    single point
    """
    parts = text.split(":")
    try:
        values = [float(i) for i in parts]
    except ValueError as error:
        raise ConfigurationError(f"cannot read {text!r}", "x") from error
    if len(values) == 1:
        return np.array(values)
    if len(values) != 3:
        raise ConfigurationError("expected a:b:step", "x")
    a, b, step = values
    if not step > 0 or b < a:
        raise ConfigurationError("need step > 0 and a <= b", "x")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return a + step * np.arange(count)


KernelFamily = Callable[[DiscreteMeasure], KernelMatrix]


def parse_kernel(text: str, spec: Optional[LevyTriplet], controls: GaugeControls) -> KernelFamily:
    """
    "riesz:beta" or "gauge:sign:gamma" (the latter needs a process spec)
    """
    parts = text.split(":")
    try:
        if parts[0] == "riesz" and len(parts) == 2:
            beta = float(parts[1])
            return lambda mu: riesz_kernel_for(beta, mu)
        if parts[0] == "gauge" and len(parts) == 3:
            sign, gamma = Sign(parts[1]), float(parts[2])
            if spec is None:
                raise ConfigurationError("gauge kernels need --spec", "kernel")
            return lambda mu: gauge_kernel(
                spec, gamma, sign, mu, controls, skip_if_diagonal_diverges=True
            )
    except ValueError as error:
        raise ConfigurationError(f"cannot read {text!r}", "kernel") from error
    raise ConfigurationError("expected riesz:beta or gauge:sign:gamma", "kernel")


def _gauge_controls(args: argparse.Namespace) -> GaugeControls:
    return GaugeControls(r_max=args.r_max, rel_tol=args.rel_tol, threshold=args.threshold)


def _seed(args: argparse.Namespace) -> int:
    override = os.environ.get(SEED_VARIABLE)
    if override is None:
        return args.seed
    try:
        return int(override)
    except ValueError as error:
        raise ConfigurationError(f"not an integer: {override!r}", SEED_VARIABLE) from error


def _spec(args: argparse.Namespace) -> Optional[LevyTriplet]:
    return LevyTriplet.load(args.spec) if getattr(args, "spec", None) else None


def _require(value: Any, name: str) -> Any:
    if value is None:
        raise ConfigurationError("is required for this subcommand", name)
    return value


Document = Tuple[Any, List[str], List[Sequence[Any]]]


def run_exponent(args: argparse.Namespace) -> Document:
    spec = _require(_spec(args), "--spec")
    points = [args.xi] if spec.d > 1 else [[i] for i in args.xi]
    values = [evaluate_exponent(spec, p) for p in points]
    rows = [(p[0] if spec.d == 1 else p, v.re, v.im) for p, v in zip(points, values)]
    document = values[0].to_dict() if len(values) == 1 else [
        {"xi": p, **v.to_dict()} for p, v in zip(points, values)
    ]
    return document, ["xi", "re", "im"], rows


def run_gauge(args: argparse.Namespace) -> Document:
    spec = _require(_spec(args), "--spec")
    controls = _gauge_controls(args)
    xs = parse_range(args.x)
    values = [g_gamma(GaugeQuery(spec, args.gamma, float(x), Sign(args.sign), controls)) for x in xs]
    rows = [(float(x), v.value) for x, v in zip(xs, values)]
    document = values[0] if len(values) == 1 else [{"x": float(x), **v.to_dict()} for x, v in zip(xs, values)]
    return document, ["x", "value"], rows


def run_energy(args: argparse.Namespace) -> Document:
    mu = DiscreteMeasure.load(_require(args.measure, "--measure"))
    family = parse_kernel(args.kernel, _spec(args), _gauge_controls(args))
    value = energy(family(mu), mu)
    return {"kernel": args.kernel, "atoms": mu.size, "energy": value}, ["atoms", "energy"], [(mu.size, value)]


def _schedule(args: argparse.Namespace) -> List[SetGrid]:
    sizes = [int(i) for i in args.schedule.split(",") if i]
    if args.grid == "cantor":
        return [SetGrid.cantor(depth) for depth in sizes]
    try:
        a, b = (float(i) for i in args.interval.split(":"))
    except ValueError as error:
        raise ConfigurationError(f"expected a:b, got {args.interval!r}", "interval") from error
    return [SetGrid.interval(a, b, n) for n in sizes]


def run_capacity(args: argparse.Namespace) -> Document:
    family = parse_kernel(args.kernel, _spec(args), _gauge_controls(args))
    controls = CapacityControls(solver=SolverControls(seed=_seed(args)))
    verdict = capacity_estimate(family, _schedule(args), controls)
    return verdict, ["grid_size", "min_energy"], list(verdict.trace)


def run_criterion(args: argparse.Namespace) -> Document:
    spec = _require(_spec(args), "--spec")
    mu = DiscreteMeasure.load(_require(args.measure, "--measure"))
    controls = _gauge_controls(args)
    if args.check == "fubini":
        gamma = args.gamma if args.gamma is not None else spec.d - args.beta
        report: Any = fubini_check(spec, mu, gamma, Sign(args.sign), controls)
        value = report.iterated
    elif args.check == "condition":
        report = condition_e_check(spec, mu, args.beta, controls)
        value = report.minus_integral
    else:
        report = criterion_integral(spec, mu, args.beta, controls)
        value = report.value
    witness = getattr(value, "witness", None) or [value.value]
    return report, ["ring", "partial_integral"], list(enumerate(witness))


def run_simulate(args: argparse.Namespace) -> Document:
    spec = _require(_spec(args), "--spec")
    config = McConfig(args.n_paths, _seed(args), args.antithetic, args.batch_size)
    if args.mode == "chi":
        result: Any = mc_chi_check(spec, args.xi, args.t, args.s, config)
        estimate = result.real
    elif args.mode == "energy":
        mu = DiscreteMeasure.load(_require(args.measure, "--measure"))
        result = mc_chi_energy(spec, args.xi, mu, config)
        estimate = result.estimate
    else:
        mu = DiscreteMeasure.load(_require(args.measure, "--measure"))
        result = mc_image_riesz_energy(spec, mu, _require(args.beta, "--beta"), config)
        estimate = result.estimate
    return result, ["batch", "mean"], estimate.batch_rows()


def run_casebook(args: argparse.Namespace) -> Document:
    controls = _gauge_controls(args)
    if args.case == "drift":
        reports = [casebook.drift_counterexample(args.beta, args.k_terms, controls)]
    elif args.case == "poisson":
        reports = [casebook.poisson_example(args.beta, controls=controls, samples=args.samples)]
    elif args.case == "symmetric":
        spec = _spec(args) or LevyTriplet.brownian()
        reports = [casebook.symmetric_reduction_check(spec, 1.0 - args.beta, controls=controls)]
    elif args.case == "audit":
        spec = _spec(args) or LevyTriplet.brownian()
        mu = DiscreteMeasure.load(args.measure) if args.measure else SetGrid.interval(0, 1, 8).measure()
        reports = [casebook.implication_audit(spec, mu, args.beta, controls)]
    else:
        reports = list(casebook.run_all(args.beta, controls).values())
    document = {
        "reports": reports,
        "summary": [list(row) for row in casebook.summary_rows(reports)],
    }
    return document, ["case", "beta", "assertions", "passed", "verdict"], casebook.summary_rows(reports)


def _gauge_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--r-max", type=float, default=GaugeControls.r_max, dest="r_max", help="outer radius of the xi integrals")
    parent.add_argument("--rel-tol", type=float, default=GaugeControls.rel_tol, dest="rel_tol", help="panel tolerance")
    parent.add_argument("--threshold", type=float, default=GaugeControls.threshold, help="divergence threshold")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="levycap", description="Capacities of images of Levy processes.")
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--output", help="write here instead of standard output")
    parser.add_argument("--verbose", "-v", action="count", default=0)
    commands = parser.add_subparsers(dest="command", required=True)
    gauge = _gauge_options()

    p = commands.add_parser("exponent", help="evaluate Psi")
    p.add_argument("--spec", required=True)
    p.add_argument("--xi", type=float, nargs="+", required=True)
    p.set_defaults(run=run_exponent)

    p = commands.add_parser("gauge", parents=[gauge], help="g_{gamma,sign}(x)")
    p.add_argument("--spec", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--sign", choices=[s.value for s in Sign], default="plus")
    p.add_argument("--x", required=True, help="x or a:b:step")
    p.set_defaults(run=run_gauge)

    p = commands.add_parser("energy", parents=[gauge], help="f-energy of a measure")
    p.add_argument("--measure", required=True)
    p.add_argument("--kernel", required=True, help="riesz:beta or gauge:sign:gamma")
    p.add_argument("--spec")
    p.set_defaults(run=run_energy)

    p = commands.add_parser("capacity", parents=[gauge], help="capacity estimate over refined grids")
    p.add_argument("--kernel", required=True, help="riesz:beta or gauge:sign:gamma")
    p.add_argument("--spec")
    p.add_argument("--grid", choices=["interval", "cantor"], default="interval")
    p.add_argument("--interval", default="0:1", help="a:b")
    p.add_argument("--schedule", default="64,128,256", help="cell counts, or depths for cantor")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=run_capacity)

    p = commands.add_parser("criterion", parents=[gauge], help="criterion integral and related checks")
    p.add_argument("--spec", required=True)
    p.add_argument("--measure", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--check", choices=["criterion", "fubini", "condition"], default="criterion")
    p.add_argument("--gamma", type=float)
    p.add_argument("--sign", choices=[s.value for s in Sign], default="plus")
    p.set_defaults(run=run_criterion)

    p = commands.add_parser("simulate", help="Monte Carlo checks")
    p.add_argument("--spec", required=True)
    p.add_argument("--mode", choices=["chi", "energy", "riesz"], default="chi")
    p.add_argument("--xi", type=float, nargs="+", default=[1.0])
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--measure")
    p.add_argument("--beta", type=float)
    p.add_argument("--n-paths", type=int, default=McConfig.n_paths, dest="n_paths")
    p.add_argument("--batch-size", type=int, default=McConfig.batch_size, dest="batch_size")
    p.add_argument("--antithetic", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=run_simulate)

    p = commands.add_parser("casebook", parents=[gauge], help="worked cases")
    p.add_argument("case", choices=["drift", "poisson", "symmetric", "audit", "all"])
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--k-terms", type=int, default=100, dest="k_terms")
    p.add_argument("--samples", type=int, default=10**5)
    p.add_argument("--spec")
    p.add_argument("--measure")
    p.set_defaults(run=run_casebook)
    return parser


def _render(document: Any, header: List[str], rows: List[Sequence[Any]], form: str) -> str:
    if form == "json":
        return serialize.dumps(document)
    buffer = io.StringIO()
    serialize.write_csv(buffer, header, rows)
    return buffer.getvalue()


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    handle, temporary = tempfile.mkstemp(dir=directory, prefix=".levycap-")
    with os.fdopen(handle, "w") as stream:
        stream.write(text)
    os.replace(temporary, path)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logging.basicConfig(
            level=logging.DEBUG if args.verbose > 1 else logging.INFO,
            format="%(asctime)s %(name)s %(levelname)s %(message)s",
        )
    try:
        document, header, rows = args.run(args)
        _emit(_render(document, header, rows, args.format), args.output)
    except LevycapError as error:
        print(f"levycap: error: {error}", file=sys.stderr)
        return error.exit_code
    except OSError as error:
        print(f"levycap: error: {error}", file=sys.stderr)
        return ConfigurationError.exit_code
    if args.command == "casebook" and not all(r.passed for r in document["reports"]):
        return CASEBOOK_FAILURE
    return 0


if __name__ == "__main__":
    sys.exit(main())
