"""
Best-response oracle over symmetric strategies.

Payoffs are antisymmetric (payoff(x, y) = -payoff(y, x)), so the responder's value of a
candidate c against a support strategy s is payoff(c, s) whichever side the responder plays.
"""
import math
import multiprocessing as mp
from typing import Optional

from src.Components.clash_engine import payoff
from src.Components.game_model import (
    GameSpec,
    MixedStrategy,
    Player,
    enumerate_symmetric_strategies,
    maxass,
    validate_strategy,
)
from src.exception import InvalidInputError
from src.logger import logging

TIE_MARGIN = 1e-12


def _candidate_payoffs(task: tuple) -> list:
    candidate, opponents, agg = task
    return [payoff(candidate, s, agg) for s in opponents]


def heuristic_candidates(xi: MixedStrategy, candidates: list) -> list:
    """Candidates whose largest assignment exceeds maxass(xi) by at most one."""
    limit = maxass(xi) + 1
    return [c for c in candidates if c.parts[0] <= limit]


def best_response(
    xi: MixedStrategy,
    spec: GameSpec,
    responder: Player,
    use_heuristic: bool = False,
    workers: int = 1,
    cache: Optional[dict] = None,
) -> tuple:
    """
    Pure symmetric strategy of `responder` maximizing its expected payoff against xi.

    Args:
        xi (MixedStrategy): The other player's mixed strategy.
        spec (GameSpec): Game; supplies the responder's budget, n and the aggregation.
        responder (Player): Who responds, A or B.
        use_heuristic (bool): Only scan candidates with maxass <= maxass(xi) + 1.
        workers (int): Worker processes for the candidate scan.
        cache (dict, optional): (candidate, opponent) -> exact payoff, shared across calls.

    Raises:
        InvalidInputError: If xi is empty, built for a different n, or spends other than the
            opponent's budget.

    Returns:
        tuple: (strategy, value); ties go to the first maximizer in enumeration order.
    """
    if xi is None or not getattr(xi, "support", None):
        error_message = "best_response needs a non-empty mixed strategy"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    if xi.n != spec.n:
        error_message = f"Mixed strategy is over {xi.n} battlefields, game has {spec.n}"
        logging.error(error_message)
        raise InvalidInputError(error_message)

    responder = Player(responder)
    for strategy in xi.strategies:
        validate_strategy(strategy, spec.opponent_budget(responder), spec.n)
    candidates = enumerate_symmetric_strategies(spec.budget(responder), spec.n)
    if use_heuristic:
        pruned = heuristic_candidates(xi, candidates)
        if pruned:
            candidates = pruned
        else:
            logging.warning(f"maxass pruning left no candidates for {responder.value}; scanning all {len(candidates)}")

    opponents = xi.strategies
    probabilities = [prob for _, prob in xi.support]
    cache = {} if cache is None else cache

    missing = [c for c in candidates if any((c, s) not in cache for s in opponents)]
    if missing:
        tasks = [(c, opponents, spec.agg) for c in missing]
        if workers > 1 and len(tasks) > 1:
            with mp.get_context("spawn").Pool(processes=workers) as pool:
                rows = pool.map(_candidate_payoffs, tasks)
        else:
            rows = [_candidate_payoffs(task) for task in tasks]
        for candidate, row in zip(missing, rows):
            for s, value in zip(opponents, row):
                cache[(candidate, s)] = value

    best, best_value = None, -math.inf
    for candidate in candidates:
        value = math.fsum(prob * float(cache[(candidate, s)]) for s, prob in zip(opponents, probabilities))
        if value > best_value + TIE_MARGIN:
            best, best_value = candidate, value
    return best, best_value


def exploitability_gaps(value: float, strategy_a: MixedStrategy, strategy_b: MixedStrategy, spec: GameSpec,
                        cache: Optional[dict] = None) -> tuple:
    """(gain of A's best response over value, gain of B's best response over -value), exact oracle."""
    _, value_a = best_response(strategy_b, spec, Player.A, cache=cache)
    _, value_b = best_response(strategy_a, spec, Player.B, cache=cache)
    return value_a - value, value_b + value


def measure_exploitability(eq, spec: GameSpec, cache: Optional[dict] = None) -> float:
    """
    Largest gain either player gets by deviating from `eq`, measured with the exhaustive oracle.

    Args:
        eq (Equilibrium): Candidate equilibrium; eq.value is A's payoff.
        spec (GameSpec): The game eq claims to solve.

    Returns:
        float: max(0, gap_A, gap_B).
    """
    gap_a, gap_b = exploitability_gaps(eq.value, eq.strategy_a, eq.strategy_b, spec, cache=cache)
    return max(0.0, gap_a, gap_b)
