"""Command-line front end: solve, check, compare, sweep, simulate.

Instances are JSON files with one entry per class::

    {
      "name": "optional label",
      "classes": [
        {"lambda": 1.0, "mu": 160.0, "weight": 0.571428571428571},
        {"lambda": 1.0, "mu": 14.0,  "weight": 0.285714285714286},
        {"lambda": 1.0, "mu": 1.2,   "weight": 0.142857142857143}
      ]
    }

Exit codes are stable: 0 ok, 1 not certified, 2 parse error, 3 unstable
instance, 4 certified comparison violated (library bug), 5 simulation
disagrees with the analytic solution, 6 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from .errors import InstanceFormatError, NumericError, StabilityError
from .model import SystemParams, WeightVector
from .monotonicity import (
    CONCLUSION_TOL,
    check_separation,
    coalesce_weights,
    compare_policies,
)
from .sim import SimConfig, simulate
from .solver import (
    cmu_sojourn,
    default_sweep_grid,
    ps_sojourn,
    solve_sojourn,
    sweep,
    weight_family,
)

EXIT_OK = 0
EXIT_UNCERTIFIED = 1
EXIT_PARSE = 2
EXIT_UNSTABLE = 3
EXIT_CERTIFIED_VIOLATION = 4
EXIT_SIM_MISMATCH = 5
EXIT_NUMERIC = 6

SIM_Z_LIMIT = 4.0


@dataclass(frozen=True)
class Instance:
    """A parsed instance file: system parameters, weights, display name."""

    params: SystemParams
    weights: WeightVector
    name: str


def _field(entry: dict, index: int, key: str) -> float:
    loc = f"classes[{index}].{key}"
    if key not in entry:
        raise InstanceFormatError(f"{loc}: missing field")
    value = entry[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceFormatError(f"{loc}: expected a number, got {value!r}")
    if not value > 0:
        raise InstanceFormatError(f"{loc}: must be strictly positive, got {value!r}")
    return float(value)


def load_instance(path: str | Path) -> Instance:
    """Parse and validate an instance file.

    Raises :class:`InstanceFormatError` with a line- or field-precise
    message on malformed input, and :class:`StabilityError` when the
    parameters describe an unstable queue.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceFormatError(f"{path}: cannot read file ({exc})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}"
        ) from exc

    if not isinstance(doc, dict):
        raise InstanceFormatError(f"{path}: top level must be an object")
    classes = doc.get("classes")
    if not isinstance(classes, list) or not classes:
        raise InstanceFormatError(f"{path}: 'classes' must be a non-empty array")
    name = doc.get("name", path.stem)
    if not isinstance(name, str):
        raise InstanceFormatError(f"{path}: 'name' must be a string")

    lam, mu, g = [], [], []
    for index, entry in enumerate(classes):
        if not isinstance(entry, dict):
            raise InstanceFormatError(f"{path}: classes[{index}] must be an object")
        lam.append(_field(entry, index, "lambda"))
        mu.append(_field(entry, index, "mu"))
        g.append(_field(entry, index, "weight"))

    try:
        params = SystemParams(lam=lam, mu=mu)
    except StabilityError:
        raise
    except ValueError as exc:
        raise InstanceFormatError(f"{path}: {exc}") from exc
    return Instance(params=params, weights=WeightVector(g), name=name)


def _parse_family(raw: str) -> float:
    """Parse '--family' values: either '5' or 'x=5'."""
    text = raw[2:] if raw.startswith("x=") else raw
    try:
        return float(text)
    except ValueError as exc:
        raise InstanceFormatError(f"bad family parameter {raw!r}") from exc


def _parse_weight_spec(spec: str, class_count: int) -> WeightVector:
    """Parse '--alpha/--beta' values: comma-separated weights or 'family:X'."""
    if spec.startswith("family:"):
        return weight_family(_parse_family(spec.split(":", 1)[1]), class_count)
    try:
        values = [float(part) for part in spec.split(",")]
    except ValueError as exc:
        raise InstanceFormatError(
            f"bad weight list {spec!r}; expected comma-separated numbers or 'family:X'"
        ) from exc
    if len(values) != class_count:
        raise InstanceFormatError(
            f"weight list has {len(values)} entries, instance has {class_count} classes"
        )
    return WeightVector(values)


def _parse_grid(spec: str | None) -> np.ndarray:
    """Parse '--grid': 'lo:hi:count' (log-spaced) or a comma list of points."""
    if spec is None:
        return default_sweep_grid()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise InstanceFormatError(f"bad grid {spec!r}; expected LO:HI:COUNT")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise InstanceFormatError(f"bad grid {spec!r}") from exc
        if count < 1 or not 1.0 < lo <= hi:
            raise InstanceFormatError(f"bad grid {spec!r}; need 1 < LO <= HI and COUNT >= 1")
        return np.geomspace(lo, hi, count)
    try:
        return np.array([float(part) for part in spec.split(",")])
    except ValueError as exc:
        raise InstanceFormatError(f"bad grid {spec!r}") from exc


def _fmt(value: float) -> str:
    """Locale-independent 12-significant-digit rendering for CSV output."""
    return format(float(value), ".12g")


def _pick_weights(instance: Instance, family: str | None) -> WeightVector:
    if family is None:
        return instance.weights
    return weight_family(_parse_family(family), instance.params.class_count)


def cmd_solve(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    weights = _pick_weights(instance, args.family)
    params = instance.params
    solution = solve_sojourn(params, weights)
    out = sys.stdout
    print(f"instance: {instance.name} (M={params.class_count}, rho={params.load:.6f})", file=out)
    print(f"{'class':>5} {'lambda':>12} {'mu':>12} {'weight':>12} {'T_k':>14}", file=out)
    for k in range(params.class_count):
        print(
            f"{k + 1:>5} {params.lam[k]:>12.6g} {params.mu[k]:>12.6g} "
            f"{weights.g[k]:>12.6g} {solution.per_class[k]:>14.8g}",
            file=out,
        )
    print(f"aggregate sojourn time (DPS): {solution.aggregate:.10g}", file=out)
    print(f"processor sharing reference : {ps_sojourn(params):.10g}", file=out)
    print(f"priority (c-mu) reference   : {cmu_sojourn(params):.10g}", file=out)
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    params = instance.params
    weights = _pick_weights(instance, args.family)
    in_g = weights.nonincreasing
    satisfied, violations = check_separation(params)
    print(f"instance: {instance.name} (M={params.class_count}, rho={params.load:.6f})")
    print(f"weights nonincreasing: {'yes' if in_g else 'NO'}")
    if satisfied:
        print("separation condition: satisfied (all mu_(j+1)/mu_j <= 1 - rho)")
    else:
        pairs = ", ".join(f"j={v.pair_index}" for v in violations)
        print(f"separation condition: violated at {pairs}")
        for v in violations:
            print(
                f"  pair {v.pair_index}: mu ratio {v.rate_ratio:.6g} "
                f"> 1 - rho = {v.stability_slack:.6g}"
            )
        if in_g:
            suggestion = coalesce_weights(params, weights)
            rendered = ", ".join(_fmt(w) for w in suggestion.g)
            print(f"suggested coalesced weights: {rendered}")
    return EXIT_OK if (in_g and satisfied) else EXIT_UNCERTIFIED


def cmd_compare(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    params = instance.params
    alpha = _parse_weight_spec(args.alpha, params.class_count)
    beta = _parse_weight_spec(args.beta, params.class_count)
    report = compare_policies(params, alpha, beta)
    print(f"instance: {instance.name} (M={params.class_count}, rho={params.load:.6f})")
    print(f"alpha nonincreasing : {report.alpha_in_G}")
    print(f"beta nonincreasing  : {report.beta_in_G}")
    print(f"ratio dominance     : {report.ratio_condition_holds}")
    print(f"separation condition: {report.separation_condition_holds}")
    for v in report.separation_violations:
        print(
            f"  pair {v.pair_index}: mu ratio {v.rate_ratio:.6g} "
            f"> 1 - rho = {v.stability_slack:.6g}"
        )
    print(f"T(alpha) = {report.t_alpha:.10g}")
    print(f"T(beta)  = {report.t_beta:.10g}")
    print(f"difference = {report.difference:.6e}")
    print(f"certified: {report.certified}")
    if report.diagnostics is not None:
        d = report.diagnostics
        print("supporting checks (unit-arrival reduction):")
        print(f"  contraction factor q       : {d.contraction_factor:.6f}")
        print(f"  mu_tilde nonincreasing     : {d.mu_tilde_nonincreasing}")
        print(f"  partial column sums ordered: {d.partial_column_sums_ordered}")
        print(f"  y nonincreasing            : {d.y_nonincreasing}")
        print(f"  fixed point matches direct : {d.fixed_point_matches_direct}")
        print(f"  expansion matches direct   : {d.expansion_matches_direct}")
    if not report.certified:
        return EXIT_UNCERTIFIED
    if report.difference > CONCLUSION_TOL:
        print(
            "certified comparison violated the expected ordering; "
            "this indicates a library bug",
            file=sys.stderr,
        )
        return EXIT_CERTIFIED_VIOLATION
    return EXIT_OK


def _write_sweep_csv(stream: IO[str], rows) -> None:
    class_count = len(rows[0].weights)
    header = ["x"] + [f"g_{k + 1}" for k in range(class_count)] + ["t_dps", "t_ps", "t_opt"]
    stream.write(",".join(header) + "\n")
    for row in rows:
        cells = [_fmt(row.x)]
        cells += [_fmt(w) for w in row.weights.g]
        cells += [_fmt(row.t_dps), _fmt(row.t_ps), _fmt(row.t_opt)]
        stream.write(",".join(cells) + "\n")


def cmd_sweep(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    xs = _parse_grid(args.grid)
    rows = sweep(instance.params, xs)
    if args.out is None:
        _write_sweep_csv(sys.stdout, rows)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as stream:
            _write_sweep_csv(stream, rows)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    params = instance.params
    weights = _pick_weights(instance, args.family)
    cfg = SimConfig(
        seed=args.seed,
        arrivals_target=args.target,
        warmup_fraction=args.warmup,
    )
    estimate = simulate(params, weights, cfg)
    analytic = solve_sojourn(params, weights)

    z_scores = np.zeros(params.class_count)
    for k in range(params.class_count):
        se = estimate.per_class_stderr[k]
        gap = estimate.per_class_mean[k] - analytic.per_class[k]
        z_scores[k] = gap / se if se > 0 else np.inf * np.sign(gap) if gap else 0.0

    lines = [
        f"instance: {instance.name} (M={params.class_count}, rho={params.load:.6f}, "
        f"seed={cfg.seed}, target={cfg.arrivals_target})",
        f"{'class':>5} {'sim_mean':>14} {'sim_stderr':>12} {'analytic':>14} {'z':>8}",
    ]
    for k in range(params.class_count):
        lines.append(
            f"{k + 1:>5} {estimate.per_class_mean[k]:>14.8g} "
            f"{estimate.per_class_stderr[k]:>12.4g} "
            f"{analytic.per_class[k]:>14.8g} {z_scores[k]:>8.3f}"
        )
    lines.append(f"aggregate (completion-weighted): {estimate.aggregate_mean:.8g}")
    lines.append(f"simulated time span: {estimate.sim_time:.8g}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)

    if args.out is not None:
        with open(args.out, "w", encoding="utf-8", newline="\n") as stream:
            stream.write("class,lambda,mu,weight,sim_mean,sim_stderr,analytic_mean,z\n")
            for k in range(params.class_count):
                cells = [
                    str(k + 1),
                    _fmt(params.lam[k]),
                    _fmt(params.mu[k]),
                    _fmt(weights.g[k]),
                    _fmt(estimate.per_class_mean[k]),
                    _fmt(estimate.per_class_stderr[k]),
                    _fmt(analytic.per_class[k]),
                    _fmt(z_scores[k]),
                ]
                stream.write(",".join(cells) + "\n")

    if np.any(np.abs(z_scores) > SIM_Z_LIMIT):
        print(
            f"simulation disagrees with the analytic solution (|z| > {SIM_Z_LIMIT})",
            file=sys.stderr,
        )
        return EXIT_SIM_MISMATCH
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpsq",
        description="Sojourn-time analysis and simulation for DPS queues.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve the sojourn-time linear system")
    solve.add_argument("instance", help="path to an instance file")
    solve.add_argument("--family", default=None, metavar="X", help="override weights with the geometric family, e.g. 5 or x=5")
    solve.set_defaults(handler=cmd_solve)

    check = sub.add_parser("check", help="evaluate certification conditions")
    check.add_argument("instance")
    check.add_argument("--family", default=None, metavar="X")
    check.set_defaults(handler=cmd_check)

    compare = sub.add_parser("compare", help="compare two weight policies")
    compare.add_argument("instance")
    compare.add_argument("--alpha", required=True, help="weights as 'w1,w2,...' or 'family:X'")
    compare.add_argument("--beta", required=True, help="weights as 'w1,w2,...' or 'family:X'")
    compare.set_defaults(handler=cmd_compare)

    sweep_cmd = sub.add_parser("sweep", help="sweep the geometric weight family, emit CSV")
    sweep_cmd.add_argument("instance")
    sweep_cmd.add_argument("--grid", default=None, help="'LO:HI:COUNT' log-spaced, or 'x1,x2,...'")
    sweep_cmd.add_argument("--out", default=None, help="output CSV path (default stdout)")
    sweep_cmd.set_defaults(handler=cmd_sweep)

    simulate_cmd = sub.add_parser("simulate", help="simulate and compare with the analytic solution")
    simulate_cmd.add_argument("instance")
    simulate_cmd.add_argument("--seed", type=int, default=12345)
    simulate_cmd.add_argument("--target", type=int, default=200_000, help="completions per class")
    simulate_cmd.add_argument("--warmup", type=float, default=0.1, help="fraction of completions discarded")
    simulate_cmd.add_argument("--family", default=None, metavar="X")
    simulate_cmd.add_argument("--out", default=None, help="also write per-class results as CSV")
    simulate_cmd.set_defaults(handler=cmd_simulate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except InstanceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except StabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


def entry() -> None:
    raise SystemExit(main())
