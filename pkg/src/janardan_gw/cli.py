"""Command-line interface: ``janardan-gw <command> ...``.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import branching, estimation, report
from .errors import ConsistencyError, ConvergenceError, ParameterDomainError, UnderflowClassError
from .frequency import read_frequency_csv, read_observations
from .offspring import Bernoulli, Janardan, Poisson, pmf_table, sample_observations

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERIC = 0, 1, 2, 3
OUTDIR_ENV = "JANARDAN_GW_OUTDIR"
DEFAULT_SEED = report.DEFAULT_SEED


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_model_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("offspring law (give exactly one of --lambda/--poisson/--bernoulli)")
    g.add_argument("--lambda", dest="lam", type=float, help="Janardan lambda (requires --mu)")
    g.add_argument("--mu", type=float, help="Janardan mu, 0 < mu < lambda")
    g.add_argument("--poisson", type=float, metavar="L", help="Poisson offspring with mean L")
    g.add_argument("--bernoulli", type=float, metavar="P", help="Bernoulli offspring with success probability P")


def _model(args):
    chosen = [name for name in ("lam", "poisson", "bernoulli") if getattr(args, name) is not None]
    if len(chosen) != 1:
        raise UsageError("give exactly one of --lambda, --poisson, --bernoulli")
    if chosen[0] == "lam":
        if args.mu is None:
            raise UsageError("--lambda requires --mu")
        return Janardan(args.lam, args.mu)
    if args.mu is not None:
        raise UsageError(f"--mu conflicts with --{chosen[0]}")
    if chosen[0] == "poisson":
        return Poisson(args.poisson)
    return Bernoulli(args.bernoulli)


def _add_output_args(p, formats=("text", "csv", "json")):
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--precision", type=int, default=7, help="decimals for text output (default 7)")


def _emit(args, text: str):
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _num(args, x: float) -> str:
    return f"{x:.{args.precision}f}"


def _records(args, columns, rows) -> str:
    """Render rows in the requested format; floats use --precision in text mode only."""
    spec = report.TableSpec(args.command, "", tuple(columns), tuple(tuple(r) for r in rows),
                            tuple("d" if isinstance(v, int) else f".{args.precision}f" for v in rows[0]))
    return spec.render(args.format)


def cmd_dist(args):
    model = _model(args)
    table = pmf_table(model, args.tail_eps)
    last = table.max_class if args.max_m is None else min(args.max_m, table.max_class)
    rows = [(m, float(table.probs[m]), float(table.cum[m])) for m in range(last + 1)]
    _emit(args, _records(args, ("m", "pmf", "cdf"), rows))


def cmd_classify(args):
    model = _model(args)
    c = branching.classify(model)
    doc = {"regime": c.regime.value, "mean_offspring": c.mean_offspring, "threshold_mu": c.threshold_mu}
    if args.format == "json":
        _emit(args, json.dumps(doc, indent=2) + "\n")
        return
    lines = [f"regime: {c.regime.value}", f"mean_offspring: {_num(args, c.mean_offspring)}"]
    if c.threshold_mu is not None:
        lines.append(f"threshold_mu: {_num(args, c.threshold_mu)}")
    _emit(args, "\n".join(lines) + "\n")


def cmd_extinction(args):
    model = _model(args)
    q = branching.extinction_probability(model, args.tol, method=args.solver)
    if args.format == "json":
        _emit(args, json.dumps({"extinction_probability": q, "solver": args.solver}) + "\n")
    else:
        _emit(args, _num(args, q) + "\n")


def cmd_curve(args):
    curve = branching.extinction_curve(_model(args), args.generations)
    rows = [(n, float(v)) for n, v in enumerate(curve.q, start=1)]
    _emit(args, _records(args, ("generation", "q"), rows))


def cmd_ext_time(args):
    dist = branching.extinction_time_pmf(_model(args), args.generations)
    rows = [(n, float(p), float(q)) for n, (p, q) in enumerate(zip(dist.pt, dist.cumulative), start=1)]
    _emit(args, _records(args, ("generation", "pr_T_eq_n", "q"), rows))


def cmd_simulate(args):
    model = _model(args)
    batch = branching.simulate_batch(model, args.traces, args.max_gen, args.seed, args.cap)
    extinct = int(batch.extinct_by(args.max_gen).sum())
    doc = {
        "model": model.label, "traces": args.traces, "max_generations": args.max_gen, "seed": args.seed,
        "extinct": extinct, "truncated": int(batch.truncated.sum()),
        "surviving": args.traces - extinct - int(batch.truncated.sum()),
        "extinct_fraction": extinct / args.traces,
        "analytic_extinction_probability": branching.extinction_probability(model),
    }
    if args.format == "json":
        _emit(args, json.dumps(doc, indent=2) + "\n")
    else:
        _emit(args, "".join(f"{k}: {_num(args, v) if isinstance(v, float) else v}\n" for k, v in doc.items()))


def cmd_sample(args):
    obs = sample_observations(_model(args), args.n, args.seed)
    _emit(args, "".join(f"{int(x)}\n" for x in obs))


def cmd_estimate(args):
    freq = read_frequency_csv(args.input) if args.from_freq else read_observations(args.input)
    est = estimation.repeated_moment_estimate(freq)
    doc = {"n": est.n, "zero_fraction": est.zero_fraction, "sample_mean": est.sample_mean,
           "lambda_hat": est.lambda_hat, "mu_hat": est.mu_hat, "admissible": est.admissible,
           "poisson_mle": estimation.poisson_mle(freq)}
    if args.format == "json":
        _emit(args, json.dumps(doc, indent=2) + "\n")
    else:
        _emit(args, "".join(f"{k}: {_num(args, v) if isinstance(v, float) else v}\n" for k, v in doc.items()))


def cmd_tables(args):
    if args.all:
        ids = report.TABLE_IDS
    elif args.id:
        ids = tuple(args.id)
    else:
        ids = ()
    if not ids and not args.figure:
        raise UsageError("tables: give --all, --id, or --figure")
    figure = args.figure or args.all
    outdir = args.out or os.environ.get(OUTDIR_ENV)
    if outdir:
        written = report.write_outputs(outdir, ids, args.format, figure=figure, svg=args.svg, seed=args.seed)
        for path in written:
            print(path)
        return
    chunks = [report.build_table(t, args.seed).render(args.format) for t in ids]
    if figure:
        fig = report.figure1()
        chunks.append(fig.to_json() if args.format == "json" else fig.to_csv())
    sys.stdout.write("\n".join(chunks))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="janardan-gw",
                     description="Galton-Watson processes with Janardan (perturbed Poisson) offspring.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dist", help="pmf table of the offspring law")
    _add_model_args(p)
    p.add_argument("--max-m", type=int)
    p.add_argument("--tail-eps", type=float, default=1e-12)
    _add_output_args(p)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("classify", help="criticality and the critical mu")
    _add_model_args(p)
    _add_output_args(p, ("text", "json"))
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("extinction", help="probability of eventual extinction")
    _add_model_args(p)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--solver", choices=("bisect", "uniroot"), default="bisect",
                   help="uniroot repeats R's uniroot.all with its default (loose) tolerance")
    _add_output_args(p, ("text", "json"))
    p.set_defaults(func=cmd_extinction)

    for name, func, helptext in (("curve", cmd_curve, "Pr(X_n = 0) for n = 1..N"),
                                 ("ext-time", cmd_ext_time, "Pr(T = n) for n = 1..N")):
        p = sub.add_parser(name, help=helptext)
        _add_model_args(p)
        p.add_argument("--generations", type=int, default=20)
        _add_output_args(p)
        p.set_defaults(func=func)

    p = sub.add_parser("simulate", help="Monte Carlo generation traces")
    _add_model_args(p)
    p.add_argument("--traces", type=int, default=10_000)
    p.add_argument("--max-gen", type=int, default=200)
    p.add_argument("--cap", type=int, default=branching.POPULATION_CAP)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_output_args(p, ("text", "json"))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sample", help="raw offspring observations, one per line")
    _add_model_args(p)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("estimate", help="repeated-moment estimates from data")
    p.add_argument("--input", required=True)
    p.add_argument("--from-freq", action="store_true", help="input is a class,count CSV")
    _add_output_args(p, ("text", "json"))
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("tables", help="regenerate tables T1-T5 and the figure data")
    p.add_argument("--all", action="store_true")
    p.add_argument("--id", action="append", choices=report.TABLE_IDS)
    p.add_argument("--figure", action="store_true")
    p.add_argument("--svg", action="store_true", help="also write figure1.svg (needs an output directory)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for the regenerated T5")
    p.add_argument("--format", choices=("csv", "json", "text"), default="csv")
    p.add_argument("--out", help=f"output directory (default: ${OUTDIR_ENV}, else stdout)")
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, ConsistencyError, UnderflowClassError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ParameterDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


run = main

if __name__ == "__main__":
    sys.exit(main())
