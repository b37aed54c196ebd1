"""Command-line entry point: ``flowsum {gen,bench,error,elephants}``.

Exit codes: 0 success or audit pass, 1 usage or input error, 2 audit
violation.
"""

from __future__ import annotations

import argparse
import sys

from . import bench, traces
from .core import ParameterError, as_fraction

EXIT_OK, EXIT_USAGE, EXIT_AUDIT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _u64(s: str) -> int:
    v = int(s, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"{s} does not fit in 64 bits")
    return v


def _add_algo_flags(p: argparse.ArgumentParser, many: bool = False) -> None:
    nargs = "+" if many else None
    p.add_argument("--algo", required=True, nargs=nargs, choices=bench.ALGOS)
    p.add_argument("--epsilon-log2", type=int, required=True, nargs=nargs,
                   help="epsilon = 2**value; value must be negative")
    p.add_argument("--gamma", type=float, default=4.0)
    p.add_argument("--delta", type=float, default=2.0**-10, help="Count-Min failure probability")
    p.add_argument("--seed", type=_u64, default=0, help="Count-Min hash seed")
    p.add_argument("--trace", required=True)
    p.add_argument("--format", choices=("csv", "bin"), help="default: from the file extension")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="flowsum", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a synthetic Zipf trace")
    g.add_argument("--skew", type=float, required=True)
    g.add_argument("--universe", type=int, default=10**6)
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--seed", type=_u64, default=0)
    g.add_argument("--weights", choices=("unit", "uniform"), default="unit")
    g.add_argument("--lo", type=int, default=64, help="smallest uniform payload")
    g.add_argument("--hi", type=int, default=1500, help="largest uniform payload")
    g.add_argument("--out", required=True)
    g.add_argument("--format", choices=("csv", "bin"))

    b = sub.add_parser("bench", help="measure throughput and op counts")
    _add_algo_flags(b, many=True)
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--skew", type=float, help="skew label for the CSV row")
    b.add_argument("--output", help="CSV file to append rows to (default: stdout)")

    e = sub.add_parser("error", help="audit estimates against the exact oracle")
    _add_algo_flags(e)
    e.add_argument("--queries", choices=("all-distinct",), default="all-distinct")
    e.add_argument("--checkpoint", type=int, help="also audit every N records")
    e.add_argument("--output", help="per-flow CSV (id,f,estimate,error)")

    el = sub.add_parser("elephants", help="audit the elephant-flow set")
    _add_algo_flags(el)
    el.add_argument("--theta", type=float, required=True)
    return ap


def _load(args) -> tuple[list[int], list[int]]:
    try:
        return traces.load_trace(args.trace, args.format)
    except FileNotFoundError:
        raise UsageError(f"cannot read trace {args.trace}") from None
    except (OSError, traces.TraceFormatError) as exc:
        raise UsageError(f"{args.trace}: {exc}") from None


def _config(args, algo: str, e: int) -> bench.BenchConfig:
    if e >= 0:
        raise UsageError("--epsilon-log2 must be negative")
    return bench.BenchConfig(algo=algo, epsilon_log2=e, gamma=args.gamma, delta=args.delta,
                             repeats=getattr(args, "repeats", 1), seed=args.seed,
                             skew=getattr(args, "skew", None))


def cmd_gen(args) -> int:
    mode = traces.UniformPayload(args.lo, args.hi) if args.weights == "uniform" else traces.Unit()
    spec = traces.ZipfSpec(args.universe, args.skew, args.count, args.seed, mode)
    traces.save_trace(args.out, traces.zipf_arrays(spec), args.format)
    print(f"wrote {args.count} records to {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    ids, weights = _load(args)
    results = []
    for algo in args.algo:
        for e in args.epsilon_log2:
            results.append(bench.run_bench(_config(args, algo, e), ids, weights))
    if args.output:
        bench.append_results(args.output, results)
    else:
        print(",".join(bench.BENCH_HEADER))
        for r in results:
            print(",".join(str(v) for v in r.row()))
    return EXIT_OK


def cmd_error(args) -> int:
    cfg = _config(args, args.algo, args.epsilon_log2)
    if args.checkpoint is not None and args.checkpoint < 1:
        raise UsageError("--checkpoint must be positive")
    ids, weights = _load(args)
    audit = bench.error_audit(cfg, ids, weights, args.checkpoint)
    if args.output:
        bench.write_error_csv(args.output, audit)
    ok = audit.passed(cfg.delta)
    print(f"algo={cfg.algo} flows={len(audit.flows)} checks={audit.checks} total={audit.total} "
          f"bound={float(audit.bound):.6g} max_error={audit.max_error} violations={audit.violations} "
          f"underestimates={audit.under}")
    if cfg.algo == "cm":
        print(f"violation_fraction={audit.violation_fraction:.6g} "
              f"tolerance={audit.cm_tolerance(cfg.delta):.6g}")
    print("audit", "passed" if ok else "FAILED")
    return EXIT_OK if ok else EXIT_AUDIT


def cmd_elephants(args) -> int:
    cfg = _config(args, args.algo, args.epsilon_log2)
    if not (cfg.epsilon < as_fraction(args.theta) <= 1):
        raise UsageError(f"--theta must lie in (epsilon, 1] = ({float(cfg.epsilon)}, 1]")
    ids, weights = _load(args)
    audit = bench.elephant_audit(cfg, args.theta, ids, weights)
    print("elephants:", " ".join(str(x) for x in sorted(audit.reported)))
    print(f"reported={len(audit.reported)} scanned={audit.scanned} "
          f"missed={sorted(audit.missed)} false={sorted(audit.false)}")
    print("audit", "passed" if audit.passed else "FAILED")
    return EXIT_OK if audit.passed else EXIT_AUDIT


COMMANDS = {"gen": cmd_gen, "bench": cmd_bench, "error": cmd_error, "elephants": cmd_elephants}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.cmd](args)
    except (UsageError, ParameterError) as exc:
        print(f"flowsum {args.cmd}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"flowsum {args.cmd}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
