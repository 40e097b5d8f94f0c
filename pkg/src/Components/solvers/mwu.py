"""
Multiplicative weights update for zero-sum matrix games.

The row player keeps weights p_t; each step the column player best-responds to p_t and its
payoff column becomes the row player's cost vector, p_t <- normalize((1 - phi * m_t) * p_t).
The returned row strategy is the iterate that held the best response lowest, the column
strategy is the empirical frequency of the best responses.
"""
import time
from typing import NamedTuple, Optional

import numpy as np

from src.Components.game_model import AggregationKind, MixedStrategy
from src.Components.solvers.equilibrium import Equilibrium
from src.exception import InvalidInputError
from src.logger import logging
from src.utils import get_settings

SCALE_SLACK = 1e-12


class MwuResult(NamedTuple):
    row_weights: np.ndarray
    column_weights: np.ndarray
    smallest_column_payoff: float
    steps: int


def normalize(x: np.ndarray) -> np.ndarray:
    return x / x.sum()


def solve_mwu(column_payoffs, phi: float, steps: int) -> MwuResult:
    """
    Runs MWU on the column player's payoff matrix.

    Args:
        column_payoffs (array-like): Column player's payoffs, rows = row player's strategies,
            entries in [-1, 1].
        phi (float): Multiplier in (0, 0.5].
        steps (int): Main-loop iterations, >= 1.

    Raises:
        InvalidInputError: If phi, steps or the entry range is invalid.

    Returns:
        MwuResult: (pBest, normalized best-response counts, smallest best-response payoff, steps).
    """
    matrix = np.atleast_2d(np.asarray(column_payoffs, dtype=np.float64))
    if not (0.0 < phi <= 0.5):
        error_message = f"phi must lie in (0, 0.5], got {phi}"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    if steps < 1:
        error_message = f"steps must be >= 1, got {steps}"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    if matrix.size == 0 or not np.isfinite(matrix).all() or np.abs(matrix).max() > 1.0 + SCALE_SLACK:
        error_message = "MWU needs finite payoffs scaled into [-1, 1]"
        logging.error(error_message)
        raise InvalidInputError(error_message)

    rows, cols = matrix.shape
    p_t = np.full(rows, 1.0 / rows)
    j_summed = np.zeros(cols)
    smallest_column_payoff = 1.0
    p_best = p_t.copy()
    for _ in range(steps):
        column_player_payoffs = p_t @ matrix
        best_response = int(np.argmax(column_player_payoffs))
        if column_player_payoffs[best_response] < smallest_column_payoff:
            smallest_column_payoff = float(column_player_payoffs[best_response])
            p_best = p_t.copy()
        j_summed[best_response] += 1
        m_t = matrix[:, best_response]
        p_t = normalize((1.0 - phi * m_t) * p_t)
    return MwuResult(p_best, normalize(j_summed), smallest_column_payoff, steps)


def solve_mwu_game(m, phi: Optional[float] = None, steps: Optional[int] = None) -> Equilibrium:
    """
    MWU on a full payoff matrix, returned as an epsilon-equilibrium.

    Blotto payoffs are divided by n before the run so costs stay in [-1, 1]; the value is
    reported on the original scale.

    Args:
        m (PayoffMatrix): Row player's payoff matrix.
        phi (float, optional): Defaults to MWU_PHI.
        steps (int, optional): Defaults to MWU_STEPS.

    Returns:
        Equilibrium: Exploitability measured exactly on the full matrix.
    """
    settings = get_settings()
    phi = float(settings["MWU_PHI"] if phi is None else phi)
    steps = int(settings["MWU_STEPS"] if steps is None else steps)
    start = time.perf_counter()

    payoffs = m.to_numpy()
    scale = float(m.spec.n) if m.spec.agg is AggregationKind.BLOTTO else 1.0
    logging.info(f"MWU start on {m.shape[0]}x{m.shape[1]} game (phi={phi}, steps={steps}, scale={scale})")
    result = solve_mwu(m.column_player_payoffs() / scale, phi, steps)

    x, y = result.row_weights, result.column_weights
    value = float(x @ payoffs @ y)
    gap_a = float((payoffs @ y).max()) - value
    gap_b = value - float((x @ payoffs).min())
    exploitability = max(0.0, gap_a, gap_b)
    logging.info(f"MWU finished: value {value}, exploitability {exploitability}")
    return Equilibrium(
        value=value,
        strategy_a=MixedStrategy.from_weights(m.row_strategies, x),
        strategy_b=MixedStrategy.from_weights(m.col_strategies, y),
        method="mwu",
        iterations=steps,
        exploitability=exploitability,
        wall_time=time.perf_counter() - start,
        diagnostics={
            "phi": phi,
            "scale": scale,
            "smallest_column_payoff": result.smallest_column_payoff * scale,
        },
    )
