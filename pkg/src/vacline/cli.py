"""``vacline`` command-line front end.

Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure,
4 acceptance-check failure in ``--check`` mode.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import acceptance, analytic, sweep
from .errors import NumericalError, PreconditionError
from .model import CONFIG_KEYS, ConfigError, from_natural, load_config

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_CHECK = 0, 2, 3, 4


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="key = value or JSON config file")
    for key in CONFIG_KEYS:
        p.add_argument(f"--{key}", dest=key, metavar="VALUE", help=f"override {key}")


def _model(args):
    return load_config(args.config, {k: getattr(args, k) for k in CONFIG_KEYS})


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vacline", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one parameter set")
    _add_config_flags(p)
    p.add_argument("--scenario", choices=sweep.SCENARIOS, default="quadrature")
    p.add_argument("--dx", type=float, default=sweep.DEFAULT_DX, help="lattice spacing")
    p.add_argument("--json", action="store_true", help="print the row as JSON")

    p = sub.add_parser("sweep", help="sweep one parameter")
    _add_config_flags(p)
    p.add_argument("--axis", required=True, choices=sweep.AXES)
    p.add_argument("--min", type=float, required=True)
    p.add_argument("--max", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--scenario", choices=sweep.SCENARIOS, default="analytic")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--dx", type=float, default=sweep.DEFAULT_DX, help="lattice spacing for lattice rows")
    p.add_argument("--csv", metavar="PATH", help="write the table here instead of stdout")
    p.add_argument("--json", metavar="PATH", help="also write the rows as JSON")
    p.add_argument("--svg", metavar="PATH", help="render the variance curve")

    p = sub.add_parser("converge", help="lattice convergence ladder")
    _add_config_flags(p)
    p.add_argument("--dx", type=float, nargs="+", default=[0.04, 0.02, 0.01], help="halving ladder")
    p.add_argument("--cfl", type=float, default=sweep.DEFAULT_CFL, help="c*dt/dx")
    p.add_argument("--check", action="store_true", help="exit 4 unless the order is in [1.8, 2.2]")

    p = sub.add_parser("reproduce", help="run every acceptance check")
    p.add_argument("--check", action="store_true", help="exit 4 if any check fails")
    return parser


def cmd_eval(args) -> int:
    model = _model(args)
    row = sweep.evaluate_row(model, scenario=args.scenario, dx=args.dx)
    if args.json:
        print(json.dumps(asdict(row), indent=2))
        return EXIT_OK
    labels = [
        ("H_c", "quadrature" if args.scenario in ("quadrature", "all") else "analytic", "energy"),
        ("P_c", "quadrature" if args.scenario in ("quadrature", "all") else "analytic", "energy"),
        ("alpha", "analytic", None),
        ("var_analytic", "analytic", "energy_squared"),
        ("var_quadrature", "quadrature", "energy_squared"),
        ("var_P_quadrature", "quadrature", "energy_squared"),
        ("discrepancy", "analytic vs quadrature", None),
        ("lattice_A_re", "lattice", None),
        ("lattice_A_im", "lattice", None),
        ("lattice_rel_error", "lattice vs analytic", None),
    ]
    si = model.units.mode == "SI"
    for name, source, dim in labels:
        value = getattr(row, name)
        if value is None:
            continue
        line = f"{name:<18} {value:.12g}  [{source}]"
        if si and dim is not None:
            line += f"  ({from_natural(value, dim, model.units):.6g} SI)"
        print(line)
    print(f"{'peak_sigma':<18} {analytic.peak_sigma(model.mode, model.circuit.c):.12g}  [analytic]")
    return EXIT_OK


def cmd_sweep(args) -> int:
    model = _model(args)
    plan = sweep.SweepPlan.linspace(args.axis, args.min, args.max, args.points, args.scenario)
    if args.jobs < 1:
        raise ConfigError("--jobs", "jobs must be at least 1")
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    rows: list[sweep.ResultRow] = []

    def collected():
        for row in sweep.iter_sweep(plan, model, args.jobs, dx=args.dx):
            row.cells()  # rejects NaN before the row is written
            rows.append(row)
            yield row

    try:
        sweep.write_csv(collected(), out)
    except (NumericalError, PreconditionError) as exc:
        out.write(f"# ERROR after {len(rows)} rows: {exc}\n")
        out.flush()
        raise
    finally:
        if args.json:
            Path(args.json).write_text(sweep.rows_to_json(rows) + "\n")
        if out is not sys.stdout:
            out.close()

    marker = None
    if plan.axis == "sigma":
        rep = sweep.peak_report(rows, model)
        marker = rep["peak_sigma"]
        print(
            f"argmax sigma {rep['argmax_sigma']:.8g}, expected peak {rep['peak_sigma']:.8g}, "
            f"offset {rep['offset']:+.3g} (grid step {rep['grid_step']:.3g})",
            file=sys.stderr,
        )
    if args.svg:
        from .svg import line_chart

        series = {"analytic": [r.var_analytic for r in rows]}
        if any(r.var_quadrature is not None for r in rows):
            series["quadrature"] = [r.var_quadrature for r in rows]
        if plan.axis == "dx":
            series = {"lattice rel. error": [r.lattice_rel_error for r in rows]}
        Path(args.svg).write_text(
            line_chart(
                [r.value for r in rows],
                series,
                xlabel=f"{plan.axis} (natural units)",
                ylabel="mixed variance (natural units)" if plan.axis != "dx" else "relative error",
                title=f"{plan.axis} sweep",
                marker=marker,
            )
        )
    return EXIT_OK


def cmd_converge(args) -> int:
    model = _model(args)
    rep = sweep.converge(model, args.dx, args.cfl)
    for d, e in zip(rep.dx, rep.errors):
        print(f"dx {d:<10.6g} rel_error {e:.6e}")
    for p in rep.pair_orders:
        print(f"pair order {p:.4f}")
    print(f"observed order p = {rep.order:.4f}")
    if not rep.converged:
        print("NOT CONVERGED: error ladder is not monotone")
        return EXIT_NUMERICAL
    ok = rep.order_ok()
    print("order in [1.8, 2.2]" if ok else "FAIL: order outside [1.8, 2.2]")
    return EXIT_CHECK if (args.check and not ok) else EXIT_OK


def cmd_reproduce(args) -> int:
    results = acceptance.run_all(lambda line: print(line, flush=True))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_CHECK if (args.check and failed) else EXIT_OK


COMMANDS = {"eval": cmd_eval, "sweep": cmd_sweep, "converge": cmd_converge, "reproduce": cmd_reproduce}


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"vacline: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, PreconditionError) as exc:
        print(f"vacline: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
