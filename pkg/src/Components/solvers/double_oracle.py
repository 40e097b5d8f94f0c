"""
Double oracle for symmetrized games.

Grows restricted strategy sets X_A, X_B from the most even assignments, solving the
restricted game by LP and adding each player's best response to the other's restricted
equilibrium, until no best response improves on the restricted value.
"""
import time
from typing import Optional

import numpy as np

from src.Components.clash_engine import payoff
from src.Components.game_model import (
    GameSpec,
    MixedStrategy,
    Player,
    most_even_assignment,
    partition_count,
)
from src.Components.solvers.equilibrium import Equilibrium
from src.Components.solvers.lp import solve_matrix_game
from src.Components.solvers.oracle import best_response, exploitability_gaps
from src.exception import ConvergenceError
from src.logger import logging
from src.utils import get_settings


def iteration_cap(spec: GameSpec, settings: Optional[dict] = None) -> int:
    """min(factor * min(|S_A|, |S_B|), DOA_MAX_ITERATIONS), never below 2."""
    settings = settings or get_settings()
    smaller = min(partition_count(spec.d_a, spec.n), partition_count(spec.d_b, spec.n))
    return max(2, min(int(settings["DOA_ITERATION_FACTOR"]) * smaller, int(settings["DOA_MAX_ITERATIONS"])))


def _restricted_payoffs(rows: list, cols: list, spec: GameSpec, cache: dict) -> np.ndarray:
    values = np.empty((len(rows), len(cols)))
    for r, s_a in enumerate(rows):
        for c, s_b in enumerate(cols):
            key = (s_a, s_b)
            if key not in cache:
                cache[key] = payoff(s_a, s_b, spec.agg)
            values[r, c] = float(cache[key])
    return values


def solve_doa(
    spec: GameSpec,
    use_heuristic: bool = False,
    tol: Optional[float] = None,
    max_iterations: Optional[int] = None,
    audit_heuristic: bool = False,
    backend: Optional[str] = None,
    workers: int = 1,
) -> Equilibrium:
    """
    Equilibrium of a symmetrized game without building its full payoff matrix.

    Converges when both best responses are already in the restricted sets, or when neither
    improves its player's restricted value by more than tol.

    Args:
        spec (GameSpec): Game to solve.
        use_heuristic (bool): Restrict best-response scans with the maxass rule.
        tol (float, optional): Improvement tolerance. Defaults to SOLVER_TOLERANCE.
        max_iterations (int, optional): Iteration cap. Defaults to `iteration_cap(spec)`.
        audit_heuristic (bool): Also run the exhaustive oracle each iteration and record both
            values in diagnostics["heuristic_audit"].
        backend (str, optional): LP backend for the restricted games.
        workers (int): Worker processes for best-response scans.

    Raises:
        ConvergenceError: If the cap is reached; carries the last restricted equilibrium.

    Returns:
        Equilibrium: The final restricted equilibrium. Its exploitability comes from the oracle
            that was used; diagnostics["exact_exploitability"] always scans every strategy.
    """
    settings = get_settings()
    tol = float(settings["SOLVER_TOLERANCE"] if tol is None else tol)
    max_iterations = int(max_iterations or iteration_cap(spec, settings))
    start = time.perf_counter()

    cache = {}
    restricted = {
        Player.A: [most_even_assignment(spec.d_a, spec.n)],
        Player.B: [most_even_assignment(spec.d_b, spec.n)],
    }
    diagnostics = {
        "values": [],
        "lower_bounds": [],
        "upper_bounds": [],
        "gaps": [],
        "support_sizes": [],
        "heuristic_audit": [],
        "use_heuristic": use_heuristic,
    }
    lower, upper = -np.inf, np.inf
    equilibrium = None

    logging.info(f"DOA start for {spec.to_dict()} (heuristic={use_heuristic}, cap={max_iterations})")
    for iteration in range(1, max_iterations + 1):
        rows, cols = restricted[Player.A], restricted[Player.B]
        solution = solve_matrix_game(_restricted_payoffs(rows, cols, spec, cache), tol=tol, backend=backend)
        xi_a = MixedStrategy.from_weights(rows, solution.x)
        xi_b = MixedStrategy.from_weights(cols, solution.y)

        response_a, value_a = best_response(xi_b, spec, Player.A, use_heuristic, workers=workers, cache=cache)
        response_b, value_b = best_response(xi_a, spec, Player.B, use_heuristic, workers=workers, cache=cache)
        if use_heuristic and audit_heuristic:
            _, exact_a = best_response(xi_b, spec, Player.A, False, workers=workers, cache=cache)
            _, exact_b = best_response(xi_a, spec, Player.B, False, workers=workers, cache=cache)
            diagnostics["heuristic_audit"].append((iteration, value_a, exact_a, value_b, exact_b))
            if abs(exact_a - value_a) > tol or abs(exact_b - value_b) > tol:
                logging.warning(
                    f"DOA iteration {iteration}: heuristic best responses ({value_a}, {value_b}) "
                    f"differ from exhaustive ({exact_a}, {exact_b})"
                )

        gap_a = value_a - solution.value
        gap_b = value_b + solution.value
        upper = min(upper, value_a)
        lower = max(lower, -value_b)
        diagnostics["values"].append(solution.value)
        diagnostics["upper_bounds"].append(upper)
        diagnostics["lower_bounds"].append(lower)
        diagnostics["gaps"].append((gap_a, gap_b))
        diagnostics["support_sizes"].append((len(rows), len(cols)))
        logging.info(
            f"DOA iteration {iteration}: |X_A|={len(rows)} |X_B|={len(cols)} value={solution.value:.9f} "
            f"gaps=({gap_a:.3e}, {gap_b:.3e}) bounds=[{lower:.9f}, {upper:.9f}]"
        )

        equilibrium = Equilibrium(
            value=solution.value,
            strategy_a=xi_a,
            strategy_b=xi_b,
            method="doa+heuristic" if use_heuristic else "doa",
            iterations=iteration,
            exploitability=max(0.0, gap_a, gap_b),
            wall_time=time.perf_counter() - start,
            diagnostics=diagnostics,
        )
        known = response_a in rows and response_b in cols
        if known or (gap_a <= tol and gap_b <= tol):
            if use_heuristic:
                exact_gaps = exploitability_gaps(solution.value, xi_a, xi_b, spec, cache=cache)
                diagnostics["exact_exploitability"] = max(0.0, *exact_gaps)
            else:
                diagnostics["exact_exploitability"] = equilibrium.exploitability
            logging.info(f"DOA converged after {iteration} iterations, value {solution.value}")
            return equilibrium
        if response_a not in rows:
            rows.append(response_a)
        if response_b not in cols:
            cols.append(response_b)

    error_message = f"DOA did not converge within {max_iterations} iterations for {spec.to_dict()}"
    logging.error(error_message)
    raise ConvergenceError(error_message, equilibrium=equilibrium)
