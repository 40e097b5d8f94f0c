"""
Minimax LP for zero-sum matrix games.

Two interchangeable backends solve "row player maximizes the worst column":
  - "highs": scipy.optimize.linprog with the HiGHS solver, one LP per player;
  - "simplex": a dense tableau simplex kept in the repo, used when scipy is missing.
Both are checked against the same certificate: max_r (A y)_r - min_c (x^T A)_c <= tol.
"""
import time
from typing import NamedTuple, Optional

import numpy as np

from src.Components.game_model import MixedStrategy
from src.Components.solvers.equilibrium import Equilibrium
from src.exception import InvalidInputError, SolverError
from src.logger import logging
from src.utils import get_settings

try:
    from scipy.optimize import linprog
except ImportError:  # pragma: no cover - exercised only without scipy
    linprog = None

BACKENDS = ("highs", "simplex")
PIVOT_TOLERANCE = 1e-12


class GameSolution(NamedTuple):
    x: np.ndarray
    y: np.ndarray
    value: float
    lower: float
    upper: float
    backend: str


def _normalize(weights: np.ndarray) -> np.ndarray:
    weights = np.clip(np.asarray(weights, dtype=np.float64), 0.0, None)
    total = weights.sum()
    if total <= 0.0:
        error_message = "LP backend returned an all-zero strategy"
        logging.error(error_message)
        raise SolverError(error_message)
    return weights / total


def _solve_highs(payoffs: np.ndarray) -> tuple:
    rows, cols = payoffs.shape
    # row player: max v  s.t.  v <= (x^T A)_c for all c,  sum x = 1,  x >= 0
    row_lp = linprog(
        c=np.r_[np.zeros(rows), -1.0],
        A_ub=np.c_[-payoffs.T, np.ones(cols)],
        b_ub=np.zeros(cols),
        A_eq=np.r_[np.ones(rows), 0.0].reshape(1, -1),
        b_eq=[1.0],
        bounds=[(0, None)] * rows + [(None, None)],
        method="highs",
    )
    # column player: min u  s.t.  (A y)_r <= u for all r,  sum y = 1,  y >= 0
    col_lp = linprog(
        c=np.r_[np.zeros(cols), 1.0],
        A_ub=np.c_[payoffs, -np.ones(rows)],
        b_ub=np.zeros(rows),
        A_eq=np.r_[np.ones(cols), 0.0].reshape(1, -1),
        b_eq=[1.0],
        bounds=[(0, None)] * cols + [(None, None)],
        method="highs",
    )
    for name, result in (("row", row_lp), ("column", col_lp)):
        if result.status != 0:
            error_message = f"HiGHS failed on the {name} player LP: {result.message}"
            logging.error(error_message)
            raise SolverError(error_message)
    return row_lp.x[:rows], col_lp.x[:cols]


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]


def _solve_simplex(payoffs: np.ndarray) -> tuple:
    """
    Shift the game so every entry is >= 1, then solve the column player's LP

        max sum(y)  s.t.  B y <= 1,  y >= 0

    from the all-slack basis (feasible since the right-hand side is positive). Bland's rule
    picks pivots. The game value is 1/sum(y), and the reduced costs of the slack columns are
    the row player's scaled strategy.
    """
    rows, cols = payoffs.shape
    shifted = payoffs - payoffs.min() + 1.0
    tableau = np.zeros((rows + 1, cols + rows + 1))
    tableau[:rows, :cols] = shifted
    tableau[:rows, cols:cols + rows] = np.eye(rows)
    tableau[:rows, -1] = 1.0
    tableau[rows, :cols] = -1.0
    basis = list(range(cols, cols + rows))

    max_pivots = 50 * (rows + cols) + 1000
    for _ in range(max_pivots):
        entering = np.flatnonzero(tableau[rows, :-1] < -PIVOT_TOLERANCE)
        if entering.size == 0:
            break
        col = int(entering[0])
        column = tableau[:rows, col]
        eligible = np.flatnonzero(column > PIVOT_TOLERANCE)
        if eligible.size == 0:
            error_message = "Simplex found an unbounded direction in a bounded game LP"
            logging.error(error_message)
            raise SolverError(error_message)
        ratios = tableau[eligible, -1] / column[eligible]
        tied = eligible[ratios <= ratios.min() + PIVOT_TOLERANCE]
        row = int(min(tied, key=lambda r: basis[r]))
        _pivot(tableau, row, col)
        basis[row] = col
    else:
        error_message = f"Simplex did not finish within {max_pivots} pivots"
        logging.error(error_message)
        raise SolverError(error_message)

    y = np.zeros(cols)
    for r, var in enumerate(basis):
        if var < cols:
            y[var] = tableau[r, -1]
    duals = tableau[rows, cols:cols + rows].copy()
    return duals, y


def solve_matrix_game(payoffs, tol: Optional[float] = None, backend: Optional[str] = None) -> GameSolution:
    """
    Minimax strategies of a zero-sum matrix game.

    Args:
        payoffs (array-like): Row player's payoffs, shape (rows, cols), finite.
        tol (float, optional): Certificate tolerance. Defaults to SOLVER_TOLERANCE.
        backend (str, optional): "highs" or "simplex". Defaults to LP_BACKEND.

    Raises:
        InvalidInputError: For an empty or non-finite matrix, or an unknown backend.
        SolverError: If the backend fails or its solution misses the certificate.

    Returns:
        GameSolution: strategies x (rows) and y (columns), value x^T A y and the certified
        bounds lower = min_c (x^T A)_c, upper = max_r (A y)_r.
    """
    settings = get_settings()
    tol = float(settings["SOLVER_TOLERANCE"] if tol is None else tol)
    backend = backend or settings["LP_BACKEND"]
    payoffs = np.atleast_2d(np.asarray(payoffs, dtype=np.float64))
    if payoffs.size == 0 or not np.isfinite(payoffs).all():
        error_message = f"Payoff matrix must be non-empty and finite, got shape {payoffs.shape}"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    if backend not in BACKENDS:
        error_message = f"Unknown LP backend '{backend}', expected one of {BACKENDS}"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    if backend == "highs" and linprog is None:
        logging.warning("scipy is not installed, falling back to the simplex backend")
        backend = "simplex"

    try:
        raw_x, raw_y = _solve_highs(payoffs) if backend == "highs" else _solve_simplex(payoffs)
    except SolverError:
        raise
    except Exception as e:
        error_message = f"LP backend '{backend}' crashed: {str(e)}"
        logging.error(error_message)
        raise SolverError(error_message) from e

    x, y = _normalize(raw_x), _normalize(raw_y)
    lower = float((x @ payoffs).min())
    upper = float((payoffs @ y).max())
    value = float(x @ payoffs @ y)
    if upper - lower > tol:
        error_message = f"LP certificate failed: upper {upper!r} - lower {lower!r} > {tol}"
        logging.error(error_message)
        raise SolverError(error_message)
    return GameSolution(x, y, value, lower, upper, backend)


def solve_lp(m, tol: Optional[float] = None, backend: Optional[str] = None) -> Equilibrium:
    """
    Solves a full payoff matrix by LP.

    Args:
        m (PayoffMatrix): Game to solve.
        tol (float, optional): Certificate tolerance.
        backend (str, optional): LP backend.

    Returns:
        Equilibrium: Exact up to tol; exploitability is the certificate gap.
    """
    start = time.perf_counter()
    solution = solve_matrix_game(m.to_numpy(), tol=tol, backend=backend)
    strategy_a = MixedStrategy.from_weights(m.row_strategies, solution.x)
    strategy_b = MixedStrategy.from_weights(m.col_strategies, solution.y)
    exploitability = max(0.0, solution.upper - solution.value, solution.value - solution.lower)
    logging.info(f"LP ({solution.backend}) solved {m.shape[0]}x{m.shape[1]} game: value {solution.value}")
    return Equilibrium(
        value=solution.value,
        strategy_a=strategy_a,
        strategy_b=strategy_b,
        method="lp",
        iterations=1,
        exploitability=exploitability,
        wall_time=time.perf_counter() - start,
        diagnostics={"backend": solution.backend, "lower": solution.lower, "upper": solution.upper},
    )
