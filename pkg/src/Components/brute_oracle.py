"""
Brute-force reference implementations.

Slow on purpose: each one enumerates permutations or compositions directly, so the clash
engine and the solvers can be checked against something that shares none of their code.
Guards are hard errors; nothing here ever approximates.
"""
import itertools
import math
from collections import Counter
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from src.Components.clash_engine import ClashMatrix, RookCountTable
from src.Components.game_model import AggregationKind, MixedStrategy, SymmetricStrategy, aggregate
from src.exception import InvalidInputError, OracleLimitError
from src.logger import logging

NAIVE_PAYOFF_MAX_N = 10
BRUTE_COUNTS_MAX_N = 8
MAX_COMPOSITIONS = 10 ** 6
TIE_MARGIN = 1e-12


def distinct_permutations(values: Sequence[int]) -> Iterator[tuple]:
    """
    Permutations of a multiset without repeats, in lexicographic order.

    Steps with the classic next-permutation rule, so (1, 1, 0) yields 3 tuples instead of 6.
    """
    items = sorted(values)
    size = len(items)
    while True:
        yield tuple(items)
        pivot = size - 2
        while pivot >= 0 and items[pivot] >= items[pivot + 1]:
            pivot -= 1
        if pivot < 0:
            return
        successor = size - 1
        while items[successor] <= items[pivot]:
            successor -= 1
        items[pivot], items[successor] = items[successor], items[pivot]
        items[pivot + 1:] = reversed(items[pivot + 1:])


def _outcome_payoff(mine: Sequence[int], theirs: Sequence[int], agg: AggregationKind) -> int:
    k_w = sum(1 for x, y in zip(mine, theirs) if x > y)
    k_l = sum(1 for x, y in zip(mine, theirs) if x < y)
    return aggregate(agg, len(mine), k_w, k_l)


def naive_payoff(s_a: SymmetricStrategy, s_b: SymmetricStrategy, agg: AggregationKind) -> Fraction:
    """
    Payoff to A averaged over every pairing of A's battlefields with B's.

    Each distinct arrangement of s_b stands for the same number of the n! permutations, so the
    plain average over distinct arrangements equals the average over all permutations.

    Raises:
        InvalidInputError: If the battlefield counts differ.
        OracleLimitError: If n exceeds 10.
    """
    if s_a.n != s_b.n:
        error_message = f"Strategies have different battlefield counts: {s_a.n} vs {s_b.n}"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    if s_a.n > NAIVE_PAYOFF_MAX_N:
        error_message = f"naive_payoff is limited to n <= {NAIVE_PAYOFF_MAX_N}, got n={s_a.n}"
        logging.error(error_message)
        raise OracleLimitError(error_message)
    agg = AggregationKind.parse(agg)
    total = 0
    arrangements = 0
    for arrangement in distinct_permutations(s_b.parts):
        total += _outcome_payoff(s_a.parts, arrangement, agg)
        arrangements += 1
    return Fraction(total, arrangements)


def brute_rook_counts(m: ClashMatrix) -> RookCountTable:
    """
    h(k_W, k_L) by walking all n! rook placements.

    Raises:
        OracleLimitError: If n exceeds 8.
    """
    n = m.n
    if n > BRUTE_COUNTS_MAX_N:
        error_message = f"brute_rook_counts is limited to n <= {BRUTE_COUNTS_MAX_N}, got n={n}"
        logging.error(error_message)
        raise OracleLimitError(error_message)
    rows = np.arange(n)
    counts = Counter()
    for permutation in itertools.permutations(range(n)):
        picked = m.cells[rows, permutation]
        counts[(int((picked == 1).sum()), int((picked == -1).sum()))] += 1
    return RookCountTable(n=n, counts=dict(counts))


def compositions(d: int, n: int) -> Iterator[tuple]:
    """Ordered ways to split d into n non-negative parts (stars and bars)."""
    for bars in itertools.combinations(range(d + n - 1), n - 1):
        previous = -1
        parts = []
        for bar in bars:
            parts.append(bar - previous - 1)
            previous = bar
        parts.append(d + n - 1 - previous - 1)
        yield tuple(parts)


def full_game_best_response(xi: MixedStrategy, d_opp: int, agg: AggregationKind) -> tuple:
    """
    Best ordered allocation against a symmetric mixed strategy in the unsymmetrized game.

    Every composition of d_opp is scored against every permutation of every support strategy,
    so this checks that no asymmetric deviation beats the symmetrized equilibrium.

    Args:
        xi (MixedStrategy): Player C's symmetric mixed strategy.
        d_opp (int): The responder's budget.
        agg (AggregationKind): Aggregation function.

    Raises:
        OracleLimitError: If there are more than 10^6 compositions.

    Returns:
        tuple: (composition, value) with the first maximizer in composition order.
    """
    agg = AggregationKind.parse(agg)
    n = xi.n
    count = math.comb(n + d_opp - 1, n - 1)
    if count > MAX_COMPOSITIONS:
        error_message = f"full_game_best_response would scan {count} compositions (limit {MAX_COMPOSITIONS})"
        logging.error(error_message)
        raise OracleLimitError(error_message)

    expanded = [(prob, list(distinct_permutations(strategy.parts))) for strategy, prob in xi.support]
    best, best_value = None, -math.inf
    for composition in compositions(d_opp, n):
        value = 0.0
        for prob, arrangements in expanded:
            total = sum(_outcome_payoff(composition, arrangement, agg) for arrangement in arrangements)
            value += prob * total / len(arrangements)
        if value > best_value + TIE_MARGIN:
            best, best_value = composition, value
    logging.info(f"Full-game best response over {count} compositions: {best} -> {best_value}")
    return best, best_value


def blotto_direct_payoff(s_a: SymmetricStrategy, s_b: SymmetricStrategy) -> Fraction:
    """Separable Blotto payoff: (1/n) * sum over all (i, j) of sign(s_a[i] - s_b[j])."""
    if s_a.n != s_b.n:
        error_message = f"Strategies have different battlefield counts: {s_a.n} vs {s_b.n}"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    a = np.asarray(s_a.parts, dtype=np.int64)
    b = np.asarray(s_b.parts, dtype=np.int64)
    return Fraction(int(np.sign(np.subtract.outer(a, b)).sum()), s_a.n)
