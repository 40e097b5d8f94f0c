"""
Command-line front end.

    python -m src enumerate --d 3 --n 3
    python -m src payoff --a 3,1,0 --b 2,2,0 --agg mto --check
    python -m src matrix --da 3 --db 3 --n 3 --agg mto -o m.game
    python -m src solve --da 3 --db 3 --n 3 --agg mto --method doa --heuristic
    python -m src bench --n-min 4 --n-max 8 --offset 5 --agg mto

Exit codes: 0 success, 2 usage, 3 computation error.
"""
import argparse
import json
import sys

from src.Components.benchmark import run_benchmark, write_benchmark
from src.Components.brute_oracle import BRUTE_COUNTS_MAX_N, naive_payoff
from src.Components.clash_engine import payoff
from src.Components.game_model import (
    AggregationKind,
    GameSpec,
    SymmetricStrategy,
    enumerate_symmetric_strategies,
)
from src.Components.matrix_builder import build_matrix, load_matrix, save_matrix
from src.Components.solvers.double_oracle import solve_doa
from src.Components.solvers.lp import BACKENDS, solve_lp
from src.Components.solvers.mwu import solve_mwu_game
from src.exception import ConvergenceError, CustomException, InvalidInputError
from src.logger import enable_console_logging, logging
from src.utils import format_fraction, get_settings, stopwatch, use_config

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_COMPUTATION = 3
AGGREGATIONS = [kind.value for kind in AggregationKind]


def parse_vector(text: str) -> tuple:
    """'3,1,0' -> (3, 1, 0)."""
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError as e:
        error_message = f"Strategy vector must be comma-separated integers, got '{text}'"
        logging.error(error_message)
        raise InvalidInputError(error_message) from e
    return values


def canonical_strategy(text: str, label: str) -> SymmetricStrategy:
    strategy, reordered = SymmetricStrategy.from_unsorted(parse_vector(text))
    if reordered:
        message = f"warning: --{label} {text} reordered to {strategy} (symmetric strategies are order-invariant)"
        logging.warning(message)
        print(message, file=sys.stderr)
    return strategy


def _spec_from_args(args) -> GameSpec:
    missing = [flag for flag in ("da", "db", "n", "agg") if getattr(args, flag, None) is None]
    if missing:
        error_message = "missing game flags: " + ", ".join(f"--{flag}" for flag in missing)
        logging.error(error_message)
        raise InvalidInputError(error_message)
    return GameSpec(args.da, args.db, args.n, AggregationKind.parse(args.agg))


def cmd_enumerate(args) -> int:
    strategies = enumerate_symmetric_strategies(args.d, args.n)
    if args.format == "json":
        print(json.dumps({
            "d": args.d,
            "n": args.n,
            "count": len(strategies),
            "strategies": [list(s.parts) for s in strategies],
        }))
    else:
        for strategy in strategies:
            print(strategy)
        print(f"count: {len(strategies)}")
    return EXIT_OK


def cmd_payoff(args) -> int:
    s_a = canonical_strategy(args.a, "a")
    s_b = canonical_strategy(args.b, "b")
    if s_a.n != s_b.n:
        error_message = f"--a has {s_a.n} battlefields but --b has {s_b.n}"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    agg = AggregationKind.parse(args.agg)
    value = payoff(s_a, s_b, agg)
    print(f"{format_fraction(value)} ({float(value)})")
    if args.check:
        if s_a.n > BRUTE_COUNTS_MAX_N:
            print(f"check: skipped (n > {BRUTE_COUNTS_MAX_N})")
            return EXIT_OK
        expected = naive_payoff(s_a, s_b, agg)
        if expected != value:
            print(f"check: MISMATCH (naive {format_fraction(expected)})")
            logging.error(f"Payoff check failed for {s_a} vs {s_b}: {value} != {expected}")
            return EXIT_COMPUTATION
        print("check: ok")
    return EXIT_OK


def cmd_matrix(args) -> int:
    spec = _spec_from_args(args)
    with stopwatch() as timing:
        matrix = build_matrix(spec, workers=args.workers, cap=args.cap, progress=args.progress)
    save_matrix(matrix, args.out)
    rows, cols = matrix.shape
    print(f"matrix: {rows}x{cols}")
    print(f"build_time_s: {timing['seconds']:.6f}")
    print(f"saved: {args.out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    if args.method == "mwu" and (args.phi is None or args.steps is None):
        error_message = "--method mwu requires --phi and --steps"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    if args.method == "mwu" and not (0.0 < args.phi <= 0.5):
        error_message = f"--phi must lie in (0, 0.5], got {args.phi}"
        logging.error(error_message)
        raise InvalidInputError(error_message)

    matrix = None
    if args.matrix:
        expected = _spec_from_args(args) if args.n is not None else None
        matrix = load_matrix(args.matrix, expected_spec=expected)
        spec = matrix.spec
    else:
        spec = _spec_from_args(args)

    try:
        if args.method == "doa":
            equilibrium = solve_doa(
                spec,
                use_heuristic=args.heuristic,
                tol=args.tol,
                max_iterations=args.max_iterations,
                audit_heuristic=args.audit,
                backend=args.backend,
                workers=args.workers or int(get_settings()["WORKERS"]),
            )
        else:
            matrix = matrix or build_matrix(spec, workers=args.workers, cap=args.cap)
            if args.method == "lp":
                equilibrium = solve_lp(matrix, tol=args.tol, backend=args.backend)
            else:
                equilibrium = solve_mwu_game(matrix, phi=args.phi, steps=args.steps)
    except ConvergenceError as e:
        report = e.equilibrium.to_report() if e.equilibrium else {"method": args.method}
        report["error"] = str(e)
        print(json.dumps(report, indent=2))
        return EXIT_COMPUTATION

    print(json.dumps(equilibrium.to_report(), indent=2))
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.n_min > args.n_max:
        error_message = f"Empty sweep: --n-min {args.n_min} > --n-max {args.n_max}"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    frame = run_benchmark(
        range(args.n_min, args.n_max + 1),
        offset=args.offset,
        agg=AggregationKind.parse(args.agg),
        timeout=args.timeout,
        naive_max_n=args.naive_max_n,
        progress=args.progress,
    )
    if args.out:
        write_benchmark(frame, args.out)
    else:
        frame.to_csv(sys.stdout, index=False)
    return EXIT_OK


def _add_game_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--da", type=int, required=required, help="resources of player A")
    parser.add_argument("--db", type=int, required=required, help="resources of player B")
    parser.add_argument("--n", type=int, required=required, help="number of battlefields")
    parser.add_argument("--agg", choices=AGGREGATIONS, required=required)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="python -m src", description="Symmetrized multi-battlefield conflicts")
    parser.add_argument("--config", help="path to a config.yaml")
    parser.add_argument("--verbose", action="store_true", help="mirror log records to stderr")
    parser.add_argument("--workers", "--threads", dest="workers", type=int, default=None, help="cap on worker processes")
    parser.add_argument("--progress", action="store_true", help="show progress bars")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="list symmetric strategies")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=["plain", "json"], default="plain")
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser("payoff", help="exact payoff of one strategy pair")
    p.add_argument("--a", required=True, help="A's allocation, e.g. 3,1,0")
    p.add_argument("--b", required=True, help="B's allocation, e.g. 2,2,0")
    p.add_argument("--agg", choices=AGGREGATIONS, required=True)
    p.add_argument("--check", action="store_true", help="compare with permutation enumeration (n <= 8)")
    p.set_defaults(handler=cmd_payoff)

    p = sub.add_parser("matrix", help="build and cache a full payoff matrix")
    _add_game_flags(p, required=True)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(handler=cmd_matrix)

    p = sub.add_parser("solve", help="compute an equilibrium")
    _add_game_flags(p, required=False)
    p.add_argument("--matrix", help="cached matrix file instead of game flags")
    p.add_argument("--method", choices=["lp", "doa", "mwu"], required=True)
    p.add_argument("--heuristic", action="store_true", help="maxass pruning in DOA best responses")
    p.add_argument("--audit", action="store_true", help="compare heuristic and exhaustive responses")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--backend", choices=list(BACKENDS), default=None)
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--phi", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("bench", help="timing sweep over n, CSV output")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--offset", type=int, default=5)
    p.add_argument("--agg", choices=AGGREGATIONS, default="mto")
    p.add_argument("--timeout", type=float, default=None, help="seconds per cell, 0 disables")
    p.add_argument("--naive-max-n", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    if args.verbose:
        enable_console_logging()
    try:
        if args.config:
            use_config(args.config)
            get_settings()
        return args.handler(args)
    except InvalidInputError as e:
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_USAGE
    except CustomException as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_COMPUTATION


if __name__ == "__main__":
    sys.exit(main())
