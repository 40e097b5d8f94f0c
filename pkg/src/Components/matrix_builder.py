"""
Full payoff matrices of symmetrized games, with an exact on-disk cache.

Rows are A's symmetric strategies and columns B's, both in enumeration order. Entries are
exact rationals; the cache stores them as "numerator/denominator" strings in a JSON document.
"""
import json
import multiprocessing as mp
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np
from tqdm import tqdm

from src.Components.brute_oracle import naive_payoff
from src.Components.clash_engine import payoff
from src.Components.game_model import (
    AggregationKind,
    GameSpec,
    SymmetricStrategy,
    enumerate_symmetric_strategies,
    partition_count,
)
from src.exception import (
    CorruptMatrixFileError,
    InvalidInputError,
    MatrixFileError,
    MatrixSpecMismatchError,
    MatrixVersionError,
    SizeLimitError,
)
from src.logger import logging
from src.utils import format_fraction, get_settings, parse_fraction, stopwatch

FORMAT_VERSION = 1
EVALUATORS = {"clash": payoff, "naive": naive_payoff}


@dataclass(frozen=True)
class PayoffMatrix:
    spec: GameSpec
    row_strategies: tuple
    col_strategies: tuple
    entries: tuple

    @property
    def shape(self) -> tuple:
        return len(self.row_strategies), len(self.col_strategies)

    def entry(self, row: int, col: int) -> Fraction:
        return self.entries[row][col]

    def to_numpy(self) -> np.ndarray:
        """Row player's payoffs as float64."""
        return np.array([[float(x) for x in row] for row in self.entries], dtype=np.float64).reshape(self.shape)

    def column_player_payoffs(self) -> np.ndarray:
        """Column player's payoffs, same orientation (rows are still A's strategies)."""
        return -self.to_numpy()

    def is_skew_symmetric(self) -> bool:
        rows, cols = self.shape
        if rows != cols:
            return False
        return all(self.entries[r][c] == -self.entries[c][r] for r in range(rows) for c in range(r, cols))


def _row_payoffs(task: tuple) -> tuple:
    row, s_a, columns, agg, evaluator = task
    evaluate = EVALUATORS[evaluator]
    return row, [(col, evaluate(s_a, s_b, agg)) for col, s_b in columns]


def check_matrix_size(spec: GameSpec, cap: int) -> tuple:
    """
    Counts strategies of both players and enforces the cap.

    Raises:
        SizeLimitError: If either count exceeds `cap`.
    """
    rows = partition_count(spec.d_a, spec.n)
    cols = partition_count(spec.d_b, spec.n)
    if rows > cap or cols > cap:
        error_message = f"Payoff matrix {rows}x{cols} exceeds the strategy cap {cap}"
        logging.error(error_message)
        raise SizeLimitError(error_message, rows=rows, cols=cols, cap=cap)
    return rows, cols


def build_matrix(
    spec: GameSpec,
    workers: Optional[int] = None,
    cap: Optional[int] = None,
    evaluator: str = "clash",
    progress: bool = False,
) -> PayoffMatrix:
    """
    Evaluates every strategy pair of the game.

    For d_a = d_b only the lower triangle is computed; the upper one is its negation.

    Args:
        spec (GameSpec): Game to tabulate.
        workers (int, optional): Worker processes; 1 evaluates in-process. Defaults to WORKERS.
        cap (int, optional): Strategy-count cap per player. Defaults to MAX_STRATEGIES.
        evaluator (str): "clash" (knot dynamic program) or "naive" (permutation enumeration).
        progress (bool): Show a tqdm progress bar.

    Raises:
        SizeLimitError: If either strategy count exceeds the cap.
        InvalidInputError: For an unknown evaluator.

    Returns:
        PayoffMatrix: Exact payoffs to A.
    """
    settings = get_settings()
    workers = int(workers or settings["WORKERS"])
    cap = int(cap or settings["MAX_STRATEGIES"])
    if evaluator not in EVALUATORS:
        error_message = f"Unknown evaluator '{evaluator}', expected one of {sorted(EVALUATORS)}"
        logging.error(error_message)
        raise InvalidInputError(error_message)

    check_matrix_size(spec, cap)
    row_strategies = tuple(enumerate_symmetric_strategies(spec.d_a, spec.n))
    col_strategies = tuple(enumerate_symmetric_strategies(spec.d_b, spec.n))
    triangle = spec.is_symmetric

    tasks = []
    for row, s_a in enumerate(row_strategies):
        # diagonal of a symmetric game is zero, so the lower triangle stops before it
        limit = row if triangle else len(col_strategies)
        tasks.append((row, s_a, [(col, col_strategies[col]) for col in range(limit)], spec.agg, evaluator))

    logging.info(f"Building {len(row_strategies)}x{len(col_strategies)} {evaluator} matrix for {spec.to_dict()} with {workers} worker(s)")
    grid = [[Fraction(0)] * len(col_strategies) for _ in row_strategies]
    with stopwatch() as timing:
        if workers > 1 and len(tasks) > 1:
            with mp.get_context("spawn").Pool(processes=workers) as pool:
                results = pool.imap_unordered(_row_payoffs, tasks, chunksize=max(1, len(tasks) // (4 * workers)))
                for row, values in tqdm(results, total=len(tasks), disable=not progress, desc="matrix rows"):
                    for col, value in values:
                        grid[row][col] = value
        else:
            for task in tqdm(tasks, disable=not progress, desc="matrix rows"):
                row, values = _row_payoffs(task)
                for col, value in values:
                    grid[row][col] = value
    if triangle:
        for row in range(len(row_strategies)):
            for col in range(row + 1, len(col_strategies)):
                grid[row][col] = -grid[col][row]
    logging.info(f"Matrix built in {timing['seconds']:.3f}s")
    return PayoffMatrix(spec, row_strategies, col_strategies, tuple(tuple(row) for row in grid))


def save_matrix(m: PayoffMatrix, path) -> None:
    """
    Writes the matrix as a self-describing JSON document.

    Args:
        m (PayoffMatrix): Matrix to store.
        path (str | Path): Output file; parent folders are created.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {
        "format_version": FORMAT_VERSION,
        "spec": m.spec.to_dict(),
        "row_strategies": [list(s.parts) for s in m.row_strategies],
        "col_strategies": [list(s.parts) for s in m.col_strategies],
        "entries": [[format_fraction(x) for x in row] for row in m.entries],
    }
    try:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(document, f, indent=1)
        logging.info(f"Saved {m.shape[0]}x{m.shape[1]} matrix to {path}")
    except OSError as e:
        error_message = f"Error writing matrix to {path}: {str(e)}"
        logging.error(error_message)
        raise MatrixFileError(error_message) from e


def load_matrix(path, expected_spec: Optional[GameSpec] = None) -> PayoffMatrix:
    """
    Reads a matrix written by `save_matrix`.

    Args:
        path (str | Path): Cache file.
        expected_spec (GameSpec, optional): Spec the caller needs; checked against the file.

    Raises:
        MatrixVersionError: If the format version differs.
        CorruptMatrixFileError: If the file is missing, truncated or inconsistent.
        MatrixSpecMismatchError: If the stored spec differs from `expected_spec`.

    Returns:
        PayoffMatrix: The stored matrix.
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            document = json.load(f)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as e:
        error_message = f"Cannot read matrix file {path}: {str(e)}"
        logging.error(error_message)
        raise CorruptMatrixFileError(error_message) from e

    if not isinstance(document, dict) or "format_version" not in document:
        error_message = f"Matrix file {path} has no format_version"
        logging.error(error_message)
        raise CorruptMatrixFileError(error_message)
    if document["format_version"] != FORMAT_VERSION:
        error_message = f"Matrix file {path} has format_version {document['format_version']!r}, expected {FORMAT_VERSION}"
        logging.error(error_message)
        raise MatrixVersionError(error_message)

    try:
        spec = GameSpec.from_dict(document["spec"])
        rows = tuple(SymmetricStrategy(tuple(int(x) for x in s)) for s in document["row_strategies"])
        cols = tuple(SymmetricStrategy(tuple(int(x) for x in s)) for s in document["col_strategies"])
        entries = tuple(tuple(parse_fraction(x) for x in row) for row in document["entries"])
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        error_message = f"Matrix file {path} is corrupt: {str(e)}"
        logging.error(error_message)
        raise CorruptMatrixFileError(error_message) from e

    if len(entries) != len(rows) or any(len(row) != len(cols) for row in entries):
        error_message = f"Matrix file {path} entries do not match {len(rows)}x{len(cols)} strategies"
        logging.error(error_message)
        raise CorruptMatrixFileError(error_message)
    if rows != tuple(enumerate_symmetric_strategies(spec.d_a, spec.n)) or cols != tuple(enumerate_symmetric_strategies(spec.d_b, spec.n)):
        error_message = f"Matrix file {path} strategy lists do not match its spec {spec.to_dict()}"
        logging.error(error_message)
        raise CorruptMatrixFileError(error_message)
    if expected_spec is not None and spec != expected_spec:
        error_message = f"Matrix file {path} holds {spec.to_dict()}, expected {expected_spec.to_dict()}"
        logging.error(error_message)
        raise MatrixSpecMismatchError(error_message)

    logging.info(f"Loaded {len(rows)}x{len(cols)} matrix from {path}")
    return PayoffMatrix(spec, rows, cols, entries)


if __name__ == "__main__":
    settings = get_settings()
    spec = GameSpec(int(sys.argv[1]), int(sys.argv[2]), int(sys.argv[3]), AggregationKind.parse(sys.argv[4])) if len(sys.argv) > 4 else GameSpec(3, 3, 3, AggregationKind.MTO)
    matrix = build_matrix(spec, progress=True)
    output_path = Path(settings["MATRIX_CACHE_PATH"]) / f"{spec.agg.value}_{spec.d_a}_{spec.d_b}_{spec.n}.json"
    save_matrix(matrix, output_path)
    print(f"Saved {matrix.shape[0]}x{matrix.shape[1]} matrix to {output_path}")
