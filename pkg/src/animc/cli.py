"""``animc`` command line: generate | perturb | fit | eval | sweep.

Exit codes: 0 success, 1 usage error, 2 data or file error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import io
from .data import validate_dataset
from .errors import AnimcError, NumericError, SolverError
from .experiment import ALGOS, SWEEP_HEADER, FitParams, SweepGrid, labels_for, run_fit, run_sweep
from .metrics import evaluate
from .perturb import PerturbSpec, perturb, synth_generate

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("animc")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _names(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


# -------------------------------------------------------------- commands


def cmd_generate(a) -> int:
    if a.dims is not None and len(a.dims) != a.views:
        raise UsageError(f"--dims has {len(a.dims)} entries but --views is {a.views}")
    ds = synth_generate(n=a.n, m=a.views, c=a.clusters, dims=a.dims,
                        separation=a.separation, seed=a.seed, offset=a.offset)
    io.write_dataset(a.out, ds)
    return EXIT_OK


def cmd_perturb(a) -> int:
    ds = io.read_dataset(a.input)
    spec = PerturbSpec(per=a.per, noise_rate=a.noise_rate, noise_variance=a.noise_variance,
                       normalize_first=a.normalize, noise_mode=a.noise_mode, seed=a.seed)
    io.write_dataset(a.out, perturb(ds, spec))
    return EXIT_OK


def _fit_params(a) -> FitParams:
    return FitParams(alpha=a.alpha, beta=a.beta, r=a.r, theta_v=a.theta_v, theta_a=a.theta_a,
                     max_iter=a.max_iter, tol=a.tol, label_mode=a.label_mode,
                     soft_boundary=not a.no_soft_boundary, freeze_weights=a.freeze_weights)


def cmd_fit(a) -> int:
    ds = io.read_dataset(a.input)
    validate_dataset(ds)
    params = _fit_params(a)
    t0 = time.perf_counter()
    out = run_fit(ds, a.algo, params, a.seed)
    wall = time.perf_counter() - t0
    io.write_state(a.out_state, a.algo, out.V, out.U, out.A, out.w, a.label_mode, a.seed)
    if a.out_trace:
        header, rows = io.trace_rows(out.iterations, out.objective, out.r_objective,
                                     out.weights, ds.m)
        io.write_csv(a.out_trace, header, rows)
    metrics = None
    if ds.labels is not None:
        pred = labels_for(out.V, ds.c, a.label_mode, a.seed)
        metrics = evaluate(pred, ds.labels).as_dict()
    report = {
        "config": {"algo": a.algo, **params.__dict__, "seed": a.seed,
                   "dataset": str(a.input)},
        "metrics": metrics,
        "weights": None if out.w is None else [float(x) for x in out.w],
        "iterations": out.iterations_run,
        "wall_time": wall if a.timing else None,
        "state": str(a.out_state),
        "trace": None if not a.out_trace else str(a.out_trace),
    }
    text = io.dumps(report) + "\n"
    if a.report:
        Path(a.report).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_eval(a) -> int:
    ds = io.read_dataset(a.dataset)
    if ds.labels is None:
        raise AnimcError(f"{a.dataset} has no labels to evaluate against")
    st = io.read_state(a.state)
    if st["n"] != ds.n:
        raise AnimcError(f"state has n={st['n']} but dataset has n={ds.n}")
    modes = ["kmeans", "argmax"] if a.label_mode == "both" else [a.label_mode or st["label_mode"]]
    res = {m: evaluate(labels_for(st["V"], ds.c, m, st["seed"]), ds.labels).as_dict()
           for m in modes}
    sys.stdout.write(io.dumps(res if len(modes) > 1 else res[modes[0]]) + "\n")
    return EXIT_OK


def cmd_sweep(a) -> int:
    ds = io.read_dataset(a.input) if a.input else synth_generate(seed=a.seed)
    try:
        grid = SweepGrid(pers=a.per, algos=a.algos, alphas=a.alpha, betas=a.beta, rs=a.r,
                         noise_rates=a.noise_rate, noise_variance=a.noise_variance,
                         normalize=a.normalize, repeats=a.repeats)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    base = FitParams(theta_v=a.theta_v, theta_a=a.theta_a, max_iter=a.max_iter, tol=a.tol,
                     label_mode=a.label_mode)
    rows = run_sweep(ds, grid, base, seed=a.seed, timing=a.timing, jobs=a.jobs)
    io.write_csv(a.out, SWEEP_HEADER, rows)
    failed = sum(1 for r in rows if str(r[-1]).startswith("error"))
    if failed:
        log.warning("%d sweep row(s) failed; see the status column", failed)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_fit_flags(p, sweep: bool = False) -> None:
    num = _floats if sweep else float
    p.add_argument("--alpha", type=num, default=[0.1] if sweep else 0.1)
    p.add_argument("--beta", type=num, default=[10.0] if sweep else 10.0)
    p.add_argument("--r", type=num, default=[0.2] if sweep else 0.2)
    p.add_argument("--theta-v", type=float, default=0.01)
    p.add_argument("--theta-a", type=float, default=100.0)
    p.add_argument("--max-iter", type=int, default=40)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--label-mode", choices=["kmeans", "argmax"], default="kmeans")
    p.add_argument("--timing", action="store_true",
                   help="record wall-clock seconds (makes output run-dependent)")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="animc", description="Multi-view clustering with adaptive view weights and missing instances.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic multi-view dataset")
    g.add_argument("--n", type=int, default=200)
    g.add_argument("--views", type=int, default=2)
    g.add_argument("--clusters", type=int, default=4)
    g.add_argument("--dims", type=_ints, default=None, help="comma-separated, one per view")
    g.add_argument("--separation", type=float, default=5.0)
    g.add_argument("--offset", type=float, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    q = sub.add_parser("perturb", help="remove instances and/or add Gaussian noise")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--out", required=True)
    q.add_argument("--per", type=float, default=0.0)
    q.add_argument("--noise-rate", type=float, default=0.0)
    q.add_argument("--noise-variance", type=float, default=0.0)
    q.add_argument("--noise-mode", choices=["entry", "instance"], default="entry")
    q.add_argument("--normalize", action="store_true",
                   help="scale each view to unit max |entry| before adding noise")
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_perturb)

    f = sub.add_parser("fit", help="fit one algorithm and write state, trace and report")
    f.add_argument("--in", dest="input", required=True)
    f.add_argument("--algo", choices=ALGOS, default="animc")
    _add_fit_flags(f)
    f.add_argument("--no-soft-boundary", action="store_true")
    f.add_argument("--freeze-weights", action="store_true")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out-state", required=True)
    f.add_argument("--out-trace", default=None)
    f.add_argument("--report", default=None, help="also write the report to this file")
    f.set_defaults(func=cmd_fit)

    e = sub.add_parser("eval", help="score a saved state against dataset labels")
    e.add_argument("--state", required=True)
    e.add_argument("--dataset", required=True)
    e.add_argument("--label-mode", choices=["kmeans", "argmax", "both"], default=None,
                   help="defaults to the mode stored with the state")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("sweep", help="repeated fits over a grid; writes a results CSV")
    s.add_argument("--in", dest="input", default=None,
                   help="dataset file (default: synthetic data from --seed)")
    s.add_argument("--per", type=_floats, default=[0.1, 0.3, 0.5])
    s.add_argument("--algos", type=_names, default=["animc"])
    s.add_argument("--noise-rate", type=_floats, default=[0.0])
    s.add_argument("--noise-variance", type=float, default=0.0)
    s.add_argument("--normalize", action="store_true")
    _add_fit_flags(s, sweep=True)
    s.add_argument("--repeats", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"animc {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, NumericError) as exc:
        print(f"animc {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (AnimcError, ValueError, OSError) as exc:
        print(f"animc {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
