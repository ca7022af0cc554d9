"""Command-line front end.

Seven subcommands: simulate, runtime, width, bounds, scaling, fit, figure.
Every run produces a SeriesFile whose header embeds the full RunConfig, so
any output file can be re-run exactly; see ``nlsearch <cmd> --help`` for the
fixed CSV columns of each command.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed

import numpy as np

from .analytics import (
    cq_runtime_closed,
    cubic_runtime,
    cubic_width_exact,
    general_width_leading,
    log_bound_integrands,
    log_runtime_bounds,
    log_width_bound,
    runtime_quadrature,
)
from .dynamics import integrate_reduced
from .errors import ConvergenceError, DomainError
from .model import NonlinearityKind, SearchProblem
from .scaling import ScalingQuery, cubic_scaling, cq_scaling, fit_power_law, log_scaling
from .series import (
    RunConfig,
    SeriesFile,
    eval_g_rule,
    eval_k_rule,
    parse_sweep,
    sweep_values,
    write_series,
)


def _rel_tol(config: RunConfig) -> float:
    return max(float(config.tol), 1e-13)


def _single_problem(config: RunConfig) -> SearchProblem:
    if config.N is None:
        raise DomainError(f"{config.command} needs --N")
    k = config.k if config.k is not None else eval_k_rule(config.k_rule, config.N)
    g = eval_g_rule(config.g_rule, config.N, k)
    return SearchProblem(config.N, k, g, NonlinearityKind(config.kind))


def _simulate_curve(problem: SearchProblem, config: RunConfig,
                    t_end: float | None = None):
    if t_end is None:
        t_end = config.t_end
    if t_end is None:
        t_end = 1.2 * runtime_quadrature(problem, rel_tol=_rel_tol(config))
    traj = integrate_reduced(problem, t_end, tol=config.tol)
    ts = np.linspace(0.0, t_end, config.samples)
    return ts, np.asarray(traj.x(ts))


def cmd_simulate(config: RunConfig) -> SeriesFile:
    """Columns: t, x  (with --figure: t_<kind>_<N>_<k>, x_<kind>_<N>_<k> per curve)."""
    if config.which == "grid":
        return _figure_grid(config)
    problem = _single_problem(config)
    ts, xs = _simulate_curve(problem, config)
    meta = {
        "t_end": ts[-1],
        "plot": {"pairs": [[0, 1, "x(t)"]], "xlabel": "t", "ylabel": "x(t)",
                 "title": f"{problem.nonlinearity.value}: N={problem.N} k={problem.k} g={problem.g:.6g}"},
    }
    return SeriesFile(config=config, columns=["t", "x"],
                      data=np.column_stack([ts, xs]), meta=meta)


def _figure_grid(config: RunConfig) -> SeriesFile:
    """Success-probability overlay: three kinds, N in {100, 1000}, k in {1, 2}.

    Couplings follow the strong-coupling menu: g = N for cubic and
    cubic-quintic, g = sqrt(N)/log N for loglinear.
    """
    columns, blocks, pairs = [], [], []
    for kind in ("cubic", "cq", "log"):
        for n in (100, 1000):
            for k in (1, 2):
                g = float(n) if kind != "log" else math.sqrt(n) / math.log(n)
                problem = SearchProblem(n, k, g, NonlinearityKind(kind))
                t_end = 1.2 * runtime_quadrature(problem, rel_tol=_rel_tol(config))
                ts, xs = _simulate_curve(problem, config, t_end)
                pairs.append([len(columns), len(columns) + 1, f"{kind} N={n} k={k}"])
                columns += [f"t_{kind}_{n}_{k}", f"x_{kind}_{n}_{k}"]
                blocks += [ts, xs]
    meta = {
        "g_choice": "cubic/cq: g = N; log: g = sqrt(N)/log N",
        "plot": {"pairs": pairs, "xlabel": "t", "ylabel": "x(t)",
                 "title": "success probability across kinds"},
    }
    return SeriesFile(config=config, columns=columns,
                      data=np.column_stack(blocks), meta=meta)


def _figure_cubic(config: RunConfig) -> SeriesFile:
    """Constant-runtime cubic curves: g = N - k puts every peak at pi/2."""
    columns, blocks, pairs = [], [], []
    for n in (100, 1000):
        problem = SearchProblem(n, 1, float(n - 1), NonlinearityKind.CUBIC)
        ts, xs = _simulate_curve(problem, config, 1.2 * cubic_runtime(problem))
        pairs.append([len(columns), len(columns) + 1, f"N={n}, g=N-k"])
        columns += [f"t_cubic_{n}_1", f"x_cubic_{n}_1"]
        blocks += [ts, xs]
    meta = {
        "g_choice": "g = N - k (exact constant-time coupling, t* = pi/2)",
        "plot": {"pairs": pairs, "xlabel": "t", "ylabel": "x(t)",
                 "title": "cubic at g = N - k: runtime independent of N"},
    }
    return SeriesFile(config=config, columns=columns,
                      data=np.column_stack(blocks), meta=meta)


def _fit_point(task):
    n, k_rule, g_rule, kind, rel_tol = task
    k = eval_k_rule(k_rule, n)
    g = eval_g_rule(g_rule, n, k)
    t = runtime_quadrature(SearchProblem(n, k, g, NonlinearityKind(kind)),
                           rel_tol=rel_tol)
    return n, k, g, t


def _fit_series(config: RunConfig) -> SeriesFile:
    if not config.sweep:
        raise DomainError("fit needs --sweep start:end:step")
    ns = sweep_values(config.sweep)
    tasks = [(n, config.k_rule, config.g_rule, config.kind, _rel_tol(config))
             for n in ns]
    jobs = config.jobs or os.cpu_count() or 1
    done = {}
    interrupted = False
    if jobs == 1 or len(tasks) == 1:
        try:
            for task in tasks:
                n, k, g, t = _fit_point(task)
                done[n] = (k, g, t)
        except KeyboardInterrupt:
            interrupted = True
    else:
        ex = ProcessPoolExecutor(max_workers=jobs)
        try:
            futures = {ex.submit(_fit_point, task): task for task in tasks}
            for fut in as_completed(futures):
                n, k, g, t = fut.result()
                done[n] = (k, g, t)
            ex.shutdown()
        except KeyboardInterrupt:
            interrupted = True
            ex.shutdown(wait=False, cancel_futures=True)
    # deterministic output order regardless of completion order
    rows = [[n, *done[n]] for n in sorted(done)]
    data = np.array(rows, dtype=float) if rows else np.empty((0, 4))
    meta = {"interrupted": interrupted} if interrupted else {}
    if len(rows) >= 2:
        fit = fit_power_law([(r[0], r[3]) for r in rows])
        meta.update(coefficient=fit.coefficient, exponent=fit.exponent,
                    r_squared=fit.r_squared)
        window = _exponent_window(config)
        if window is not None:
            meta["exponent_window_N"] = window
    meta["plot"] = {"pairs": [[0, 3, "t*"]], "loglog": True,
                    "xlabel": "N", "ylabel": "t*", "title": "runtime sweep"}
    return SeriesFile(config=config, columns=["N", "k", "g", "t_star"],
                      data=data, meta=meta)


def _exponent_window(config: RunConfig):
    """Predicted [low, high] N-exponent for loglinear sweeps.

    With k = N^lam the runtime interval R^(1/2-s)..R^(1/2-s/2) maps to
    N-exponents through R = N^(1-lam); s itself comes from the g rule:
    pow_over_logR:e gives s = e, pow_over_logNk:e gives s = e/(1-lam).
    """
    if config.kind != "log":
        return None
    name, _, arg = (config.g_rule or "").partition(":")
    lam = 0.0
    if config.k_rule:
        k_name, _, k_arg = config.k_rule.partition(":")
        if k_name == "pow":
            lam = float(k_arg)
        elif k_name != "const":
            return None
    if lam >= 1.0:
        return None
    try:
        e = float(arg)
    except ValueError:
        return None
    if name == "pow_over_logR":
        sigma = e
    elif name == "pow_over_logNk":
        sigma = e / (1.0 - lam)
    else:
        return None
    return [(0.5 - sigma) * (1.0 - lam), (0.5 - sigma / 2.0) * (1.0 - lam)]


def cmd_fit(config: RunConfig) -> SeriesFile:
    """Columns: N, k, g, t_star; meta carries (coefficient, exponent, r_squared)."""
    return _fit_series(config)


def _figure_regression(config: RunConfig) -> SeriesFile:
    sub = RunConfig(command="fit", kind="log", g_rule="pow_over_logNk:0.125",
                    k_rule="pow:0.25", sweep=[500000, 1000000, 10000],
                    tol=config.tol, jobs=config.jobs)
    sf = _fit_series(sub)
    c, e = sf.meta["coefficient"], sf.meta["exponent"]
    curve = c * sf.column("N") ** e
    data = np.column_stack([sf.data, curve])
    meta = dict(sf.meta)
    meta["plot"] = {"pairs": [[0, 3, "quadrature t*"], [0, 4, f"{c:.3f} N^{e:.3f}"]],
                    "loglog": True, "xlabel": "N", "ylabel": "t*",
                    "title": "loglinear runtime regression"}
    return SeriesFile(config=config, columns=sf.columns + ["t_fit"],
                      data=data, meta=meta)


def cmd_figure(config: RunConfig) -> SeriesFile:
    """--which cubic | grid | regression; default output <which>.svg + CSV twin."""
    which = config.which or "grid"
    if config.out is None:
        config.out = f"{which}.svg"
        config.format = "svg"
    if which == "cubic":
        return _figure_cubic(config)
    if which == "grid":
        return _figure_grid(config)
    if which == "regression":
        return _figure_regression(config)
    raise DomainError(f"unknown figure {which!r}")


def _runtime_closed(problem: SearchProblem) -> float:
    kind = problem.nonlinearity
    if kind is NonlinearityKind.CUBIC:
        return cubic_runtime(problem)
    if kind is NonlinearityKind.CUBIC_QUINTIC and problem.N > 2 * problem.k \
            and problem.g > 0.0:
        return cq_runtime_closed(problem)
    return math.nan


def _sweep_problems(config: RunConfig):
    if config.sweep:
        for n in sweep_values(config.sweep):
            k = eval_k_rule(config.k_rule, n) if (config.k_rule or config.k is None) \
                else config.k
            g = eval_g_rule(config.g_rule, n, k)
            yield SearchProblem(n, k, g, NonlinearityKind(config.kind))
    else:
        yield _single_problem(config)


def cmd_runtime(config: RunConfig) -> SeriesFile:
    """Columns: N, k, g, t_quadrature, t_closed (nan where no closed form)."""
    rows = []
    for problem in _sweep_problems(config):
        rows.append([problem.N, problem.k, problem.g,
                     runtime_quadrature(problem, rel_tol=_rel_tol(config)),
                     _runtime_closed(problem)])
    return SeriesFile(config=config,
                      columns=["N", "k", "g", "t_quadrature", "t_closed"],
                      data=np.array(rows, dtype=float), meta={})


def cmd_width(config: RunConfig) -> SeriesFile:
    """Columns: N, k, g, epsilon, width_leading, width_exact, width_bound.

    width_leading covers cubic and cubic-quintic; width_exact is cubic only;
    width_bound is the loglinear Taylor bound.  Inapplicable cells are nan.
    """
    eps = config.epsilon
    rows = []
    for problem in _sweep_problems(config):
        kind = problem.nonlinearity
        leading = exact = bound = math.nan
        if kind is NonlinearityKind.LOGLINEAR:
            if problem.g > 0.0:
                bound = log_width_bound(problem, eps)
        else:
            leading = general_width_leading(problem, eps)
            if kind is NonlinearityKind.CUBIC:
                exact = cubic_width_exact(problem, eps)
        rows.append([problem.N, problem.k, problem.g, eps, leading, exact, bound])
    return SeriesFile(config=config,
                      columns=["N", "k", "g", "epsilon", "width_leading",
                               "width_exact", "width_bound"],
                      data=np.array(rows, dtype=float), meta={})


def cmd_bounds(config: RunConfig) -> SeriesFile:
    """Columns: x, original, lower, upper_tight, upper_loose, log_original, log_bound.

    Loglinear only.  The x grid is open (endpoints excluded); scalar
    (lower, quadrature, upper, upper_loose) land in the meta block.
    """
    problem = _single_problem(config)
    if problem.nonlinearity is not NonlinearityKind.LOGLINEAR:
        raise DomainError("bounds applies to --kind log")
    n_pts = config.grid
    u = np.arange(1, n_pts + 1) / (n_pts + 1)
    xs = problem.k / problem.N + (1.0 - problem.k / problem.N) * u
    curves = log_bound_integrands(problem, xs)
    bounds = log_runtime_bounds(problem)
    quad = runtime_quadrature(problem, rel_tol=_rel_tol(config))
    columns = ["x", "original", "lower", "upper_tight", "upper_loose",
               "log_original", "log_bound"]
    data = np.column_stack([xs] + [curves[c] for c in columns[1:]])
    meta = {
        "lower": bounds.lower, "quadrature": quad,
        "upper": bounds.upper, "upper_loose": bounds.upper_loose,
        "plot": {"pairs": [[0, 1, "original"], [0, 2, "lower"],
                           [0, 3, "upper (tight)"], [0, 4, "upper (loose)"]],
                 "xlabel": "x", "ylabel": "integrand",
                 "title": f"runtime bound integrands: N={problem.N} k={problem.k} g={problem.g:.4g}"},
    }
    return SeriesFile(config=config, columns=columns, data=data, meta=meta)


def cmd_scaling(config: RunConfig) -> SeriesFile:
    """Prints the symbolic scaling report as JSON (kappa/lambda, or sigma for log)."""
    kind = NonlinearityKind(config.kind)
    if kind is NonlinearityKind.LOGLINEAR:
        if config.sigma is None:
            raise DomainError("loglinear scaling needs --sigma")
        report = log_scaling(config.sigma)
    else:
        query = ScalingQuery(kappa=config.kappa, lam=config.lam)
        report = cubic_scaling(query) if kind is NonlinearityKind.CUBIC \
            else cq_scaling(query)
    config.format = "json"
    return SeriesFile(config=config, columns=[], data=np.empty((0, 0)),
                      meta={"report": report.asdict()})


_COMMANDS = {
    "simulate": cmd_simulate,
    "runtime": cmd_runtime,
    "width": cmd_width,
    "bounds": cmd_bounds,
    "scaling": cmd_scaling,
    "fit": cmd_fit,
    "figure": cmd_figure,
}


def run(config: RunConfig) -> SeriesFile:
    """Execute a RunConfig and return its SeriesFile without touching disk."""
    try:
        fn = _COMMANDS[config.command]
    except KeyError:
        raise DomainError(f"unknown command {config.command!r}") from None
    return fn(config)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlsearch",
        description="Continuous-time search under nonlinear dynamics: "
                    "simulations, runtimes, widths, bounds, scaling, fits.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--N", type=int, help="database size")
        sp.add_argument("--k", type=int, help="number of marked states")
        sp.add_argument("--g", dest="g_rule", default="const:0", metavar="RULE",
                        help="const:<v> | pow:<e> | pow_over_logR:<e> | "
                             "pow_over_logNk:<e> (bare number = const)")
        sp.add_argument("--kind", choices=["cubic", "cq", "log"], default="cubic")
        sp.add_argument("--eps", dest="epsilon", type=float, default=0.01,
                        help="peak height threshold 1 - eps")
        sp.add_argument("--tol", type=float, default=1e-10,
                        help="norm-drift budget / quadrature relative tolerance")
        sp.add_argument("--sweep", metavar="A:B:S", help="N sweep start:end:step")
        sp.add_argument("--k-rule", dest="k_rule", metavar="RULE",
                        help="const:<v> | pow:<e> (k = ceil(N^e))")
        sp.add_argument("--out", help="output path (stdout if omitted)")
        sp.add_argument("--format", choices=["csv", "json", "svg"], default="csv")
        return sp

    sp = common(sub.add_parser("simulate", help="integrate and emit (t, x(t))",
                               description=cmd_simulate.__doc__))
    sp.add_argument("--t-end", dest="t_end", type=float,
                    help="integration horizon (default 1.2 * t_star)")
    sp.add_argument("--samples", type=int, default=1001)
    sp.add_argument("--figure", action="store_true",
                    help="emit the multi-kind overlay instead of one curve")

    common(sub.add_parser("runtime", help="closed-form and quadrature runtimes",
                          description=cmd_runtime.__doc__))
    common(sub.add_parser("width", help="peak-width formulas and bounds",
                          description=cmd_width.__doc__))

    sp = common(sub.add_parser("bounds", help="loglinear bound integrands + scalars",
                               description=cmd_bounds.__doc__))
    sp.add_argument("--grid", type=int, default=401, help="x-grid points (open)")

    sp = common(sub.add_parser("scaling", help="symbolic piecewise exponents",
                               description=cmd_scaling.__doc__))
    sp.add_argument("--kappa", help="g = O(N^kappa), exact fraction ok")
    sp.add_argument("--lam", help="k = O(N^lambda) in [0, 1]")
    sp.add_argument("--sigma", help="loglinear g = O(R^sigma/log R)")

    sp = common(sub.add_parser("fit", help="sweep runtimes and fit a power law",
                               description=cmd_fit.__doc__))
    sp.add_argument("--jobs", type=int, help="parallel workers (default: cores)")

    sp = common(sub.add_parser("figure", help="named plots with CSV twins",
                               description=cmd_figure.__doc__))
    sp.add_argument("--which", choices=["cubic", "grid", "regression"],
                    default="grid")
    sp.add_argument("--samples", type=int, default=1001)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    sweep = parse_sweep(args.sweep) if getattr(args, "sweep", None) else None
    config = RunConfig(command=args.command, kind=args.kind, N=args.N, k=args.k,
                       g_rule=args.g_rule, k_rule=args.k_rule,
                       epsilon=args.epsilon, tol=args.tol, sweep=sweep,
                       out=args.out, format=args.format)
    for name in ("t_end", "samples", "grid", "kappa", "lam", "sigma", "jobs"):
        if hasattr(args, name):
            setattr(config, name, getattr(args, name))
    if getattr(args, "figure", False):
        config.which = "grid"
    if args.command == "figure":
        config.which = args.which
    return config


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        series = run(config)
        written = write_series(series)
        for path in written:
            print(path, file=sys.stderr)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
