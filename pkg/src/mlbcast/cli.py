"""Command-line interface.

Subcommands: ``gen`` (write a network file), ``solve`` (plan a broadcast
and write plan/report JSON), ``compare`` (objectives and oracle ratios as
CSV), ``sweep`` (line-network objective vs size as CSV), ``export-dot``
(Graphviz rendering of a plan). Exit codes: 2 usage error, 3 method and
network are incompatible, 4 solver failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import analytic1d, heuristic, model, oracle, wma
from .model import CostModel

EXIT_USAGE = 2
EXIT_INCOMPATIBLE = 3
EXIT_SOLVER = 4

SOLVE_METHODS = ("analytic", "oracle", "heuristic",
                 "wma-bidirectional", "wma-directional")


class CliError(Exception):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def fmt(value: float) -> str:
    """CSV/console number format: '.' decimal, 15 significant digits."""
    return f"{float(value):.15g}"


def _cost_model_from_args(args) -> CostModel:
    exponents = args.a or [2.0]
    if args.lam:
        if len(args.lam) != len(exponents):
            raise CliError("--lam and --a counts must match", EXIT_USAGE)
        lams = list(args.lam)
    else:
        lams = [1.0 / len(exponents)] * len(exponents)
    normalized = not args.no_normalize
    try:
        return CostModel(tuple(zip(lams, exponents)), normalized=normalized)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE)


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def cmd_gen(args) -> int:
    cost_model = _cost_model_from_args(args)
    try:
        if args.kind == "line":
            net = model.regular_line_network(args.n, cost_model)
        elif args.kind == "grid":
            net = model.grid_network(args.rows, args.cols, cost_model)
        else:
            net = model.random_network(args.n, args.seed, box=args.box,
                                       dim=args.dim, cost_model=cost_model)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE)
    model.save_network(net, args.output)
    print(f"wrote {net.n}-node {args.kind} network -> {args.output}")
    return 0


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def _load_network(path) -> model.Network:
    try:
        return model.load_network(path)
    except (OSError, ValueError, KeyError) as exc:
        raise CliError(f"cannot read network file {path}: {exc}", EXIT_USAGE)


def _sources(arg: str, n: int) -> list[int]:
    if arg == "all":
        return list(range(1, n + 1))
    try:
        k = int(arg)
    except ValueError:
        raise CliError(f"--k must be an integer or 'all', got {arg!r}", EXIT_USAGE)
    if not 1 <= k <= n:
        raise CliError(f"source {k} out of range 1..{n}", EXIT_USAGE)
    return [k]


def _solve_one(net: model.Network, k: int, method: str, args):
    """Returns (plan, report, stats-dict-or-None, antenna-tag-or-None)."""
    demand = args.q
    if method == "analytic":
        if not net.is_regular_line:
            raise CliError("analytic method needs a regular line network",
                           EXIT_INCOMPATIBLE)
        sol = analytic1d.solve_line(net.n, k, demand, net.cost_model)
        return sol.plan, sol.report, None, None
    if method == "oracle":
        if net.n > args.cap:
            raise CliError(
                f"oracle needs n <= {args.cap} (got {net.n}); raise --cap",
                EXIT_INCOMPATIBLE)
        sol = oracle.solve_exact(net, k, demand, cap=args.cap)
        return sol.plan, sol.report, sol.stats(), None
    if method == "heuristic":
        sol = heuristic.solve(net, k, demand, weights=args.weights)
        return sol.plan, sol.report, sol.stats, None
    if method == "wma-bidirectional":
        if not net.is_regular_line:
            raise CliError("WMA closed forms need a regular line network",
                           EXIT_INCOMPATIBLE)
        sol = wma.wma_bidirectional_solution(net.n, k, demand, net.cost_model)
        return sol.plan, sol.report, None, "bidirectional"
    if method == "wma-directional":
        if not net.is_regular_line:
            raise CliError("WMA closed forms need a regular line network",
                           EXIT_INCOMPATIBLE)
        try:
            sol = wma.wma_directional_solution(net.n, k, demand, net.cost_model)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_INCOMPATIBLE)
        return sol.plan, sol.report, None, "directional"
    raise CliError(f"unknown method {method!r}", EXIT_USAGE)


def cmd_solve(args) -> int:
    net = _load_network(args.input)
    sources = _sources(args.k, net.n)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    many = len(sources) > 1
    for k in sources:
        try:
            plan, report, stats, antenna = _solve_one(net, k, args.method, args)
        except CliError:
            raise
        except Exception as exc:
            raise CliError(f"solver failed for k={k}: {exc}", EXIT_SOLVER)
        suffix = f"_k{k}" if many else ""
        plan_path = out_dir / f"plan{suffix}.json"
        report_path = out_dir / f"report{suffix}.json"
        model.save_plan(plan, plan_path, antenna=antenna)
        report_data = {
            "per_node": list(report.per_node),
            "objective": report.objective,
            "bottleneck": report.bottleneck,
        }
        if args.battery is not None:
            cycles = model.lifetime_cycles(args.battery, report)
            report_data["cycles"] = cycles
        model.save_json(report_data, report_path)
        if stats is not None:
            model.save_json(stats, out_dir / f"stats{suffix}.json")
        line = (f"k={k} method={args.method} objective={fmt(report.objective)} "
                f"bottleneck={report.bottleneck}")
        if args.battery is not None:
            line += f" cycles={report_data['cycles']}"
        print(line)
        print(f"  plan -> {plan_path}")
        print(f"  report -> {report_path}")
    return 0


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

def cmd_compare(args) -> int:
    net = _load_network(args.input)
    sources = _sources(args.k, net.n)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for method in methods:
        if method not in SOLVE_METHODS:
            raise CliError(f"unknown method {method!r}", EXIT_USAGE)
    network_name = Path(args.input).stem

    rows = []
    for k in sources:
        oracle_objective = None
        if "oracle" in methods and net.n <= args.cap:
            try:
                sol = oracle.solve_exact(net, k, args.q, cap=args.cap)
            except Exception as exc:
                raise CliError(f"oracle failed for k={k}: {exc}", EXIT_SOLVER)
            oracle_objective = sol.report.objective
        for method in methods:
            if method == "oracle":
                if oracle_objective is None:
                    continue
                objective = oracle_objective
            else:
                try:
                    _, report, _, _ = _solve_one(net, k, method, args)
                except CliError as exc:
                    if exc.exit_code == EXIT_INCOMPATIBLE:
                        continue
                    raise
                except Exception as exc:
                    raise CliError(f"{method} failed for k={k}: {exc}",
                                   EXIT_SOLVER)
                objective = report.objective
            ratio = (objective / oracle_objective
                     if oracle_objective else None)
            rows.append({"network": network_name, "k": k, "method": method,
                         "objective": objective, "ratio_to_oracle": ratio})

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["network", "k", "method", "objective", "ratio_to_oracle"])
    for row in rows:
        ratio = "" if row["ratio_to_oracle"] is None else fmt(row["ratio_to_oracle"])
        writer.writerow([row["network"], row["k"], row["method"],
                         fmt(row["objective"]), ratio])
    _write_table(buffer.getvalue(), args)
    if args.output and args.plot and rows:
        from .plotting import render_compare_figure

        figure_path = Path(args.output).with_suffix(".png")
        render_compare_figure(rows, figure_path)
        print(f"figure -> {figure_path}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def cmd_sweep(args) -> int:
    if args.n_min < 3:
        raise CliError("--n-min must be at least 3", EXIT_USAGE)
    if args.n_max < args.n_min:
        raise CliError("--n-max must be >= --n-min", EXIT_USAGE)
    cost_model = CostModel(((1.0, args.a),), normalized=True)
    if args.k < 2:
        raise CliError("sweep needs an internal source (k >= 2)", EXIT_USAGE)
    try:
        limit_consistent = analytic1d.asymptotic_energy(args.k, cost_model,
                                                        "consistent")
        limit_as_printed = analytic1d.asymptotic_energy(args.k, cost_model,
                                                        "as_printed")
    except Exception as exc:
        raise CliError(f"limit computation failed: {exc}", EXIT_SOLVER)

    rows = []
    for n in range(args.n_min, args.n_max + 1):
        if args.k > n - 1:
            continue  # source must stay internal
        objective = analytic1d.internal_objective(n, args.k, 1.0, cost_model)
        rows.append({
            "N": n,
            "k": args.k,
            "a": args.a,
            "objective_per_Q": objective,
            "limit_consistent": limit_consistent,
            "limit_as_printed": limit_as_printed,
            "gap": objective - limit_consistent,
        })

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["N", "k", "a", "objective_per_Q",
                     "limit_consistent", "limit_as_printed", "gap"])
    for row in rows:
        writer.writerow([row["N"], row["k"], fmt(row["a"]),
                         fmt(row["objective_per_Q"]),
                         fmt(row["limit_consistent"]),
                         fmt(row["limit_as_printed"]),
                         fmt(row["gap"])])
    _write_table(buffer.getvalue(), args)
    if args.output and args.plot and rows:
        from .plotting import render_sweep_figure

        figure_path = Path(args.output).with_suffix(".png")
        render_sweep_figure(rows, figure_path)
        print(f"figure -> {figure_path}", file=sys.stderr)
    return 0


def _write_table(text: str, args) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"table -> {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# export-dot
# ---------------------------------------------------------------------------

def cmd_export_dot(args) -> int:
    try:
        data = model.load_json(args.input)
        plan = model.plan_from_json(data)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CliError(f"cannot read plan file {args.input}: {exc}", EXIT_USAGE)
    if not plan.parts:
        raise CliError("plan has no parts to export", EXIT_USAGE)
    lines = []
    for index, part in enumerate(plan.parts, start=1):
        nodes = sorted({v for edge in part.edges for v in edge} | {plan.source})
        lines.append(f"digraph part_{index} {{")
        lines.append(f'  label="part {index}, weight {fmt(part.weight)}";')
        for v in nodes:
            shape = ', shape=doublecircle' if v == plan.source else ''
            lines.append(f'  n{v} [label="{v}"{shape}];')
        for i, j in part.edges:
            lines.append(f'  n{i} -> n{j} [label="{fmt(part.weight)}"];')
        lines.append("}")
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"dot -> {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlbcast",
        description="Maximum-lifetime broadcast planning for sensor networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_cost_flags(p):
        p.add_argument("--a", type=float, action="append",
                       help="cost exponent (repeatable; default 2)")
        p.add_argument("--lam", type=float, action="append",
                       help="term weight (repeatable; default uniform)")
        p.add_argument("--no-normalize", action="store_true",
                       help="skip the unit-distance cost normalization check")

    gen = sub.add_parser("gen", help="generate a network file")
    gen_sub = gen.add_subparsers(dest="kind", required=True)
    gen_line = gen_sub.add_parser("line", help="regular line network")
    gen_line.add_argument("--n", type=int, required=True)
    gen_grid = gen_sub.add_parser("grid", help="regular grid network")
    gen_grid.add_argument("--rows", type=int, required=True)
    gen_grid.add_argument("--cols", type=int, required=True)
    gen_random = gen_sub.add_parser("random", help="uniform random network")
    gen_random.add_argument("--n", type=int, required=True)
    gen_random.add_argument("--seed", type=int, default=0)
    gen_random.add_argument("--box", type=float, default=10.0)
    gen_random.add_argument("--dim", type=int, default=2)
    for p in (gen_line, gen_grid, gen_random):
        add_cost_flags(p)
        p.add_argument("--output", default="network.json")
        p.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="compute a broadcast plan")
    solve.add_argument("--input", required=True, help="network JSON file")
    solve.add_argument("--k", default="all", help="source node index or 'all'")
    solve.add_argument("--method", choices=SOLVE_METHODS, required=True)
    solve.add_argument("--weights", choices=("lp", "equal-energy"), default="lp",
                       help="weight assignment for the heuristic")
    solve.add_argument("--Q", dest="q", type=float, default=1.0,
                       help="broadcast demand (default 1)")
    solve.add_argument("--battery", type=float, default=None,
                       help="battery budget; reports lifetime cycles")
    solve.add_argument("--cap", type=int, default=oracle.DEFAULT_TREE_CAP,
                       help="oracle tree-enumeration node cap")
    solve.add_argument("--output", default=".", help="output directory")
    solve.set_defaults(func=cmd_solve)

    compare = sub.add_parser("compare", help="objectives per method as CSV")
    compare.add_argument("--input", required=True)
    compare.add_argument("--k", default="all")
    compare.add_argument("--methods",
                         default="analytic,oracle,heuristic",
                         help="comma-separated method list")
    compare.add_argument("--weights", choices=("lp", "equal-energy"),
                         default="lp")
    compare.add_argument("--Q", dest="q", type=float, default=1.0)
    compare.add_argument("--cap", type=int, default=oracle.DEFAULT_TREE_CAP)
    compare.add_argument("--output", default=None,
                         help="CSV path (stdout when omitted)")
    compare.add_argument("--plot", action=argparse.BooleanOptionalAction,
                         default=True,
                         help="render a PNG next to the CSV output")
    compare.set_defaults(func=cmd_compare)

    sweep = sub.add_parser("sweep",
                           help="line-network objective vs size as CSV")
    sweep.add_argument("--k", type=int, required=True)
    sweep.add_argument("--a", type=float, default=2.0)
    sweep.add_argument("--n-min", type=int, default=3)
    sweep.add_argument("--n-max", type=int, required=True)
    sweep.add_argument("--output", default=None,
                       help="CSV path (stdout when omitted)")
    sweep.add_argument("--plot", action=argparse.BooleanOptionalAction,
                       default=True,
                       help="render a PNG next to the CSV output")
    sweep.set_defaults(func=cmd_sweep)

    export = sub.add_parser("export-dot", help="render a plan as DOT graphs")
    export.add_argument("--input", required=True, help="plan JSON file")
    export.add_argument("--output", default=None,
                        help="DOT path (stdout when omitted)")
    export.set_defaults(func=cmd_export_dot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
