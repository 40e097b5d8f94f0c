"""
Desk-scale timing sweep over n with d = n + offset for both players: naive vs clash-matrix
payoff matrices, full matrix plus LP, and DOA with and without the maxass heuristic. Each row
also reports how much the symmetric strategy set shrinks the pure one.
"""
import math
import multiprocessing as mp
import time
from pathlib import Path

import pandas as pd
from tqdm import tqdm

from src.Components.game_model import AggregationKind, GameSpec, partition_count
from src.Components.matrix_builder import build_matrix
from src.Components.solvers.double_oracle import solve_doa
from src.Components.solvers.lp import solve_lp
from src.exception import CustomException, InvalidInputError
from src.logger import logging
from src.utils import active_config_path, get_settings, use_config

SIZE_COLUMNS = ["pure_strategies", "reduction_factor"]
COLUMNS = ["naive_matrix_s", "clash_matrix_s", "lp_s", "doa_s", "doa_heuristic_s"]
TIMEOUT = "timeout"
SKIPPED = "skipped"
FAILED = "error"


def pure_strategy_count(d: int, n: int) -> int:
    """Ordered allocations of d over n battlefields, C(n + d - 1, n - 1)."""
    return math.comb(n + d - 1, n - 1)


def _run_job(job: tuple) -> float:
    kind, spec, config_path = job
    # spawned workers start with a fresh src.utils
    if config_path is not None and active_config_path() != config_path:
        use_config(config_path)
    start = time.perf_counter()
    if kind == "naive_matrix_s":
        build_matrix(spec, workers=1, evaluator="naive")
    elif kind == "clash_matrix_s":
        build_matrix(spec, workers=1, evaluator="clash")
    elif kind == "lp_s":
        solve_lp(build_matrix(spec, workers=1))
    elif kind == "doa_s":
        solve_doa(spec, use_heuristic=False)
    else:
        solve_doa(spec, use_heuristic=True)
    return time.perf_counter() - start


def _timed(job: tuple, timeout: float):
    """Seconds taken by `job`, or TIMEOUT / FAILED. A timed-out worker is terminated."""
    if not timeout:
        try:
            return round(_run_job(job), 6)
        except CustomException as e:
            logging.error(f"Bench job {job[0]} failed for {job[1].to_dict()}: {str(e)}")
            return FAILED
    pool = mp.get_context("spawn").Pool(processes=1)
    try:
        return round(pool.apply_async(_run_job, (job,)).get(timeout=timeout), 6)
    except mp.TimeoutError:
        logging.warning(f"Bench job {job[0]} timed out after {timeout}s for {job[1].to_dict()}")
        return TIMEOUT
    except Exception as e:
        logging.error(f"Bench job {job[0]} failed for {job[1].to_dict()}: {str(e)}")
        return FAILED
    finally:
        pool.terminate()
        pool.join()


def run_benchmark(n_values, offset: int, agg: AggregationKind, timeout=None, naive_max_n=None,
                  progress: bool = False) -> pd.DataFrame:
    """
    Times every configuration of the sweep.

    Args:
        n_values (iterable of int): Battlefield counts; must not be empty.
        offset (int): Both budgets are n + offset.
        agg (AggregationKind): Aggregation function.
        timeout (float, optional): Per-cell limit in seconds; 0 runs in-process without one.
        naive_max_n (int, optional): Largest n for the naive matrix column.
        progress (bool): Show a tqdm progress bar.

    Raises:
        InvalidInputError: For an empty sweep or a negative budget.

    Returns:
        pd.DataFrame: One row per n with strategy-set sizes, then seconds or the
            "timeout" / "skipped" / "error" markers.
    """
    settings = get_settings()
    timeout = float(settings["BENCH_TIMEOUT_S"] if timeout is None else timeout)
    naive_max_n = int(settings["NAIVE_MAX_N"] if naive_max_n is None else naive_max_n)
    n_values = list(n_values)
    if not n_values:
        error_message = "Benchmark sweep is empty"
        logging.error(error_message)
        raise InvalidInputError(error_message)

    records = []
    for n in tqdm(n_values, disable=not progress, desc="bench"):
        spec = GameSpec(n + offset, n + offset, n, AggregationKind.parse(agg))
        symmetric = partition_count(spec.d_a, n)
        pure = pure_strategy_count(spec.d_a, n)
        record = {
            "n": n,
            "d": spec.d_a,
            "agg": spec.agg.value,
            "strategies": symmetric,
            "pure_strategies": pure,
            "reduction_factor": round(pure / symmetric, 6),
        }
        for column in COLUMNS:
            if column == "naive_matrix_s" and n > naive_max_n:
                record[column] = SKIPPED
                continue
            record[column] = _timed((column, spec, active_config_path()), timeout)
        logging.info(f"Bench row: {record}")
        records.append(record)
    return pd.DataFrame.from_records(records, columns=["n", "d", "agg", "strategies"] + SIZE_COLUMNS + COLUMNS)


def write_benchmark(frame: pd.DataFrame, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    logging.info(f"Benchmark written to {path}")


if __name__ == "__main__":
    settings = get_settings()
    frame = run_benchmark(range(4, 9), offset=5, agg=AggregationKind.MTO, progress=True)
    write_benchmark(frame, settings["BENCH_OUTPUT_PATH"])
    print(frame.to_string(index=False))
