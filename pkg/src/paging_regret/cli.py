"""Command-line interface: ``paging-regret <command> [options]``.

Exit status is 0 on success, 2 when the input is invalid and 1 on an
internal error.
"""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .combiners import multiplexer_run, scs_run
from .core import NatTable, ValidationError, default_cache, make_cache
from .experiment import (ExperimentConfig, lower_bound_experiment, parse_seeds, results_csv,
                         run_experiment)
from .generators import TRACE_KINDS, TraceSpec, gen_trace
from .io import (atomic_write_text, csv_text, fmt_float, read_bundle, read_trace, write_bundle,
                 write_epoch_dump, write_round_dump, write_trace)
from .metrics import MetricsReport, compute_metrics
from .offline import dp_opt, fitf_run, lru_run
from .predictors import (BANDIT, FULL_INFORMATION, INJECTION_MODELS, MODEL_ALIASES, ErrorInjection, inject_errors,
                         perfect_nat)
from .sim import PROMOTE_EQ, PROMOTE_LE, sim_run

RUN_ALGOS = ("fitf", "dp-opt", "lru", "sim", "scs", "multiplexer")


def _global_flags(parser: argparse.ArgumentParser, suppress: bool):
    # Registered on the main parser and on every subcommand; subcommands use
    # SUPPRESS so a flag given before the command is not reset afterwards.
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS if suppress else 0,
                        help="random seed (default 0)")
    parser.add_argument("--out", default=d, help="output file or directory (default stdout)")
    parser.add_argument("--n", type=int, default=d, help="page-universe size")
    parser.add_argument("--k", type=int, default=d, help="cache size")
    parser.add_argument("--tau", type=int, default=d, help="S-C&S epoch length")
    parser.add_argument("--epsilon", type=float, default=d, help="multiplexer learning rate")
    parser.add_argument("--dump-rounds", default=d, metavar="FILE",
                        help="write Sim's per-round log as CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paging-regret",
                                     description="Online paging with multiple NAT predictors.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
        return p

    p = cmd("gen-trace", "generate a synthetic request trace")
    p.add_argument("--kind", choices=TRACE_KINDS, default="uniform")
    p.add_argument("--T", type=int, required=True, help="number of rounds")
    p.add_argument("--cycle", type=int)
    p.add_argument("--zipf-s", type=float, default=1.0)
    p.add_argument("--working-set", type=int)
    p.add_argument("--phase-len", type=int)

    p = cmd("gen-predictors", "write a bundle of NAT predictors for a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--M", type=int, default=1, help="number of predictors")
    p.add_argument("--good", type=int, default=1, help="index of the well-behaved predictor")
    p.add_argument("--good-model", choices=INJECTION_MODELS + tuple(MODEL_ALIASES), default="uniform")
    p.add_argument("--good-rate", type=float, default=0.0)
    p.add_argument("--noise-model", choices=INJECTION_MODELS + tuple(MODEL_ALIASES), default="uniform")
    p.add_argument("--noise-rate", type=float, default=1.0)
    p.add_argument("--shift", type=int, default=0, help="offset for the offset model")
    p.add_argument("--mode", choices=(FULL_INFORMATION, BANDIT), default=FULL_INFORMATION)

    p = cmd("metrics", "score every predictor of a bundle")
    p.add_argument("--trace", required=True)
    p.add_argument("--bundle", required=True)

    p = cmd("run", "run one algorithm on a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--algo", choices=RUN_ALGOS, required=True)
    p.add_argument("--bundle", help="predictor bundle (sim, scs, multiplexer)")
    p.add_argument("--predictor", type=int, default=1, help="bundle entry followed by sim")
    p.add_argument("--cache", help="initial cache as comma-separated pages (default 1..k)")
    p.add_argument("--learner", choices=("inf", "exp3"), default="inf")
    p.add_argument("--promotion", choices=(PROMOTE_LE, PROMOTE_EQ), default=PROMOTE_LE)
    p.add_argument("--dump-epochs", metavar="FILE", help="write S-C&S epoch records as CSV")

    p = cmd("lower-bound", "FitF versus LRU on uniform traces over k+1 pages")
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--seeds", default="0", help='e.g. "0-9" or "1,4,7"')

    p = cmd("experiment", "run a sweep described by a config file")
    p.add_argument("--config", required=True)
    return parser


def _emit(text: str, out: Optional[str]):
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _need(args, name: str):
    v = getattr(args, name, None)
    if v is None:
        raise ValidationError(f"--{name.replace('_', '-')} is required for {args.command}")
    return v


def _gen_trace(args):
    spec = TraceSpec(args.kind, _need(args, "n"), args.T, args.seed, args.cycle, args.zipf_s,
                     args.working_set, args.phase_len)
    trace = gen_trace(spec)
    if args.out:
        write_trace(trace, args.out)
    else:
        sys.stdout.write(csv_text(("t", "page"), enumerate(trace.body.tolist(), start=1),
                                  [f"n={trace.n}"]))


def _gen_predictors(args):
    trace = read_trace(args.trace, args.n)
    if not 1 <= args.good <= args.M:
        raise ValidationError(f"--good {args.good} outside [1, {args.M}]")
    clean = perfect_nat(trace)
    streams = []
    for j in range(1, args.M + 1):
        if j == args.good:
            inj = ErrorInjection(args.good_model, args.good_rate, args.seed, args.shift)
        else:
            inj = ErrorInjection(args.noise_model, args.noise_rate, args.seed, args.shift)
        streams.append(inject_errors(clean, inj, trace, f"predictor:{j}"))
    write_bundle(streams, _need(args, "out"), args.mode)


def _metrics(args):
    trace = read_trace(args.trace, args.n)
    streams, _ = read_bundle(args.bundle, trace.n)
    nat = NatTable(trace)
    rows = [(j,) + compute_metrics(trace, nat, s).as_tuple() for j, s in enumerate(streams, 1)]
    _emit(csv_text(("predictor",) + tuple(MetricsReport.columns()), rows), args.out)


def _run(args):
    trace = read_trace(args.trace, args.n)
    if args.cache:
        try:
            pages = [int(x) for x in args.cache.split(",") if x.strip()]
        except ValueError:
            raise ValidationError(f"--cache must list integer pages, got {args.cache!r}") from None
        cache = make_cache(pages, args.k, trace.n)
    else:
        cache = default_cache(_need(args, "k"), trace.n)
    algo = args.algo
    if args.dump_rounds and algo != "sim":
        raise ValidationError("--dump-rounds is only available with --algo sim")
    if args.dump_epochs and algo != "scs":
        raise ValidationError("--dump-epochs is only available with --algo scs")
    nat = NatTable(trace)
    streams = None
    if algo in ("sim", "scs", "multiplexer"):
        if not args.bundle:
            raise ValidationError(f"--bundle is required for --algo {algo}")
        streams, _ = read_bundle(args.bundle, trace.n)
    extra = ""
    if algo == "fitf":
        cost = fitf_run(trace, nat, initial_cache=cache).cost
    elif algo == "dp-opt":
        cost = dp_opt(trace, initial_cache=cache).cost
    elif algo == "lru":
        cost = lru_run(trace, initial_cache=cache).cost
    elif algo == "sim":
        if not 1 <= args.predictor <= len(streams):
            raise ValidationError(f"--predictor {args.predictor} outside [1, {len(streams)}]")
        dump = [] if args.dump_rounds else None
        cost = sim_run(trace, streams[args.predictor - 1], initial_cache=cache,
                       promotion=args.promotion, dump=dump).cost
        if dump is not None:
            write_round_dump(dump, args.dump_rounds)
    elif algo == "scs":
        rep, records = scs_run(trace, streams, initial_cache=cache, tau=args.tau, seed=args.seed,
                               learner=args.learner, promotion=args.promotion)
        cost = rep.cost
        if args.dump_epochs:
            write_epoch_dump(records, args.dump_epochs)
    else:
        rep = multiplexer_run(trace, streams, initial_cache=cache, epsilon=args.epsilon,
                              seed=args.seed, promotion=args.promotion)
        cost = rep.cost
        extra = fmt_float(rep.details["epsilon"])
    opt = fitf_run(trace, nat, initial_cache=cache).cost
    header = ("algorithm", "T", "k", "cost", "opt", "regret") + (("epsilon",) if extra else ())
    row = (algo, trace.T, cache.k, cost, opt, cost - opt) + ((extra,) if extra else ())
    _emit(csv_text(header, [row]), args.out)


def _lower_bound(args):
    s = lower_bound_experiment(_need(args, "k"), args.T, parse_seeds(args.seeds))
    header = ("seed", "phases", "mean_phase_length", "max_fitf_misses_per_phase", "fitf_cost",
              "lru_cost")
    rows = [(p.seed, p.phases, fmt_float(p.mean_phase_length), p.max_fitf_misses_per_phase,
             p.fitf_cost, p.lru_cost) for p in s.per_seed]
    text = csv_text(header, rows, [f"k={s.k} n={s.n} T={s.T}",
                                   f"expected_phase_length={fmt_float(s.expected_phase_length)}"])
    _emit(text, args.out)


def _experiment(args):
    cfg = ExperimentConfig.load(args.config)
    out = args.out or cfg.out
    rows = run_experiment(cfg, out)
    if not out:
        sys.stdout.write(results_csv(rows, cfg.record_wall_time))


COMMANDS = {
    "gen-trace": _gen_trace,
    "gen-predictors": _gen_predictors,
    "metrics": _metrics,
    "run": _run,
    "lower-bound": _lower_bound,
    "experiment": _experiment,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (ValidationError, FileNotFoundError, NotADirectoryError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - last-resort reporting
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
