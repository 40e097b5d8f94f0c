"""
Game definitions for symmetrized conflicts on n identical battlefields.

A game is the quadruple (d_a, d_b, n, agg). Players split an integer budget over the
battlefields; because every aggregation here is permutation invariant, a pure strategy is
kept as its sorted (non-increasing) allocation, i.e. an integer partition padded to length n.
"""
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

from src.exception import InvalidInputError
from src.logger import logging

PROBABILITY_TOLERANCE = 1e-12


class AggregationKind(str, Enum):
    BLOTTO = "blotto"
    MTO = "mto"
    MAJORITARIAN = "majoritarian"

    @classmethod
    def parse(cls, name: Union[str, "AggregationKind"]) -> "AggregationKind":
        try:
            return cls(name)
        except ValueError as e:
            choices = ", ".join(kind.value for kind in cls)
            error_message = f"Unknown aggregation '{name}', expected one of: {choices}"
            logging.error(error_message)
            raise InvalidInputError(error_message) from e

    def evaluate(self, n: int, k_w: int, k_l: int) -> int:
        """f_n(k_W, k_L) for this aggregation; see `aggregate`."""
        return aggregate(self, n, k_w, k_l)

    def bound(self, n: int) -> int:
        """Largest |f_n| this aggregation can produce."""
        return n if self is AggregationKind.BLOTTO else 1


class Player(str, Enum):
    A = "A"
    B = "B"

    @property
    def opponent(self) -> "Player":
        return Player.B if self is Player.A else Player.A


@dataclass(frozen=True)
class GameSpec:
    d_a: int
    d_b: int
    n: int
    agg: AggregationKind

    def __post_init__(self):
        if isinstance(self.agg, str) and not isinstance(self.agg, AggregationKind):
            object.__setattr__(self, "agg", AggregationKind.parse(self.agg))
        for name in ("d_a", "d_b", "n"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                error_message = f"GameSpec.{name} must be an integer, got {value!r}"
                logging.error(error_message)
                raise InvalidInputError(error_message)
        if self.n < 2:
            error_message = f"GameSpec.n must be >= 2, got {self.n}"
            logging.error(error_message)
            raise InvalidInputError(error_message)
        if self.d_a < 0 or self.d_b < 0:
            error_message = f"Resource budgets must be non-negative, got d_a={self.d_a}, d_b={self.d_b}"
            logging.error(error_message)
            raise InvalidInputError(error_message)

    def budget(self, player: Player) -> int:
        return self.d_a if Player(player) is Player.A else self.d_b

    def opponent_budget(self, player: Player) -> int:
        return self.budget(Player(player).opponent)

    @property
    def is_symmetric(self) -> bool:
        return self.d_a == self.d_b

    def to_dict(self) -> dict:
        return {"d_a": self.d_a, "d_b": self.d_b, "n": self.n, "agg": self.agg.value}

    @classmethod
    def from_dict(cls, data: dict) -> "GameSpec":
        return cls(int(data["d_a"]), int(data["d_b"]), int(data["n"]), AggregationKind.parse(data["agg"]))


@dataclass(frozen=True, order=True)
class SymmetricStrategy:
    """Sorted allocation s_1 >= ... >= s_n standing for the uniform mix over its permutations."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        if any(isinstance(p, bool) or not isinstance(p, int) for p in parts):
            error_message = f"Strategy entries must be integers: {parts}"
            logging.error(error_message)
            raise InvalidInputError(error_message)
        if any(p < 0 for p in parts):
            error_message = f"Strategy entries must be non-negative: {parts}"
            logging.error(error_message)
            raise InvalidInputError(error_message)
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            error_message = f"Strategy must be non-increasing: {parts}"
            logging.error(error_message)
            raise InvalidInputError(error_message)

    @classmethod
    def from_unsorted(cls, values: Iterable[int]) -> tuple:
        """
        Canonicalizes an allocation given in any order.

        Returns:
            tuple: (SymmetricStrategy, reordered) where reordered tells whether sorting moved anything.
        """
        values = tuple(int(v) for v in values)
        ordered = tuple(sorted(values, reverse=True))
        return cls(ordered), ordered != values

    @property
    def n(self) -> int:
        return len(self.parts)

    @property
    def total(self) -> int:
        return sum(self.parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __getitem__(self, index):
        return self.parts[index]

    def __str__(self):
        return ",".join(str(p) for p in self.parts)


@dataclass(frozen=True)
class MixedStrategy:
    """Finite support of symmetric strategies with strictly positive probabilities."""

    support: tuple

    def __post_init__(self):
        support = tuple((strategy, float(prob)) for strategy, prob in self.support)
        object.__setattr__(self, "support", support)
        if not support:
            error_message = "Mixed strategy support is empty"
            logging.error(error_message)
            raise InvalidInputError(error_message)
        strategies = [strategy for strategy, _ in support]
        if len(set(strategies)) != len(strategies):
            error_message = "Mixed strategy support contains duplicate strategies"
            logging.error(error_message)
            raise InvalidInputError(error_message)
        if len({strategy.n for strategy in strategies}) != 1:
            error_message = "Mixed strategy support mixes battlefield counts"
            logging.error(error_message)
            raise InvalidInputError(error_message)
        probabilities = [prob for _, prob in support]
        if any(not (0.0 < prob <= 1.0) for prob in probabilities):
            error_message = f"Probabilities must lie in (0, 1]: {probabilities}"
            logging.error(error_message)
            raise InvalidInputError(error_message)
        if abs(math.fsum(probabilities) - 1.0) > PROBABILITY_TOLERANCE:
            error_message = f"Probabilities must sum to 1, got {math.fsum(probabilities)!r}"
            logging.error(error_message)
            raise InvalidInputError(error_message)

    @classmethod
    def pure(cls, strategy: SymmetricStrategy) -> "MixedStrategy":
        return cls(((strategy, 1.0),))

    @classmethod
    def from_weights(cls, strategies: Sequence[SymmetricStrategy], weights: Sequence[float]) -> "MixedStrategy":
        """
        Builds a mixed strategy from raw solver weights.

        Negative weights are clipped, weights at or below 1e-12 are dropped, repeated strategies
        are merged and the rest renormalized.

        Raises:
            InvalidInputError: If nothing positive is left.
        """
        merged = {}
        for strategy, weight in zip(strategies, weights):
            weight = max(float(weight), 0.0)
            if weight > PROBABILITY_TOLERANCE:
                merged[strategy] = merged.get(strategy, 0.0) + weight
        total = math.fsum(merged.values())
        if total <= 0.0:
            error_message = "Cannot build a mixed strategy from all-zero weights"
            logging.error(error_message)
            raise InvalidInputError(error_message)
        support = [(strategy, weight / total) for strategy, weight in merged.items()]
        # renormalize once more so fsum lands within tolerance after the division
        correction = 1.0 - math.fsum(prob for _, prob in support)
        strategy, prob = max(support, key=lambda item: item[1])
        support = [(s, p + correction if s == strategy else p) for s, p in support]
        return cls(tuple(support))

    @property
    def n(self) -> int:
        return self.support[0][0].n

    @property
    def strategies(self) -> list:
        return [strategy for strategy, _ in self.support]

    def probability(self, strategy: SymmetricStrategy) -> float:
        for candidate, prob in self.support:
            if candidate == strategy:
                return prob
        return 0.0

    def to_dict(self) -> list:
        return [{"strategy": list(strategy.parts), "probability": prob} for strategy, prob in self.support]


def aggregate(agg: AggregationKind, n: int, k_w: int, k_l: int) -> int:
    """
    Evaluates f_n(k_W, k_L): the payoff of an outcome with k_W won and k_L lost battlefields.

    Args:
        agg (AggregationKind): blotto (k_W - k_L), mto (sign(k_W - k_L)) or
            majoritarian ([k_W > n/2] - [k_L > n/2]).
        n (int): Number of battlefields.
        k_w (int): Battlefields won.
        k_l (int): Battlefields lost.

    Raises:
        InvalidInputError: If counts are negative or k_w + k_l > n.

    Returns:
        int: The aggregated payoff, exact.
    """
    if k_w < 0 or k_l < 0 or k_w + k_l > n:
        error_message = f"Invalid outcome counts k_w={k_w}, k_l={k_l} for n={n}"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    agg = AggregationKind.parse(agg)
    if agg is AggregationKind.BLOTTO:
        return k_w - k_l
    if agg is AggregationKind.MTO:
        return (k_w > k_l) - (k_w < k_l)
    # strict majority: 2k > n is k > n/2 without floats
    return int(2 * k_w > n) - int(2 * k_l > n)


def _partitions(d: int, slots: int, largest: int) -> Iterator[tuple]:
    if slots == 1:
        if d <= largest:
            yield (d,)
        return
    lowest = -(-d // slots)  # first part is at least ceil(d / slots)
    for first in range(min(d, largest), lowest - 1, -1):
        for rest in _partitions(d - first, slots - 1, first):
            yield (first,) + rest


@lru_cache(maxsize=256)
def _enumerate_cached(d: int, n: int) -> tuple:
    return tuple(SymmetricStrategy(parts) for parts in _partitions(d, n, d))


def enumerate_symmetric_strategies(d: int, n: int) -> list:
    """
    All partitions of d into at most n parts, zero padded to length n.

    Order is reverse lexicographic, e.g. (3, 3) gives (3,0,0), (2,1,0), (1,1,1); this order
    fixes the row and column indices of every payoff matrix.

    Raises:
        InvalidInputError: If d < 0 or n < 2.
    """
    if d < 0 or n < 2:
        error_message = f"Cannot enumerate strategies for d={d}, n={n}"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    return list(_enumerate_cached(d, n))


@lru_cache(maxsize=1024)
def partition_count(d: int, n: int) -> int:
    """Number of partitions of d into at most n parts, without enumerating them."""
    if d < 0 or n < 0:
        return 0
    # ways[t] = partitions of t into parts of size <= n (conjugate of "at most n parts")
    ways = [1] + [0] * d
    for part in range(1, n + 1):
        for t in range(part, d + 1):
            ways[t] += ways[t - part]
    return ways[d]


def most_even_assignment(d: int, n: int) -> SymmetricStrategy:
    """ceil(d/n) on (d mod n) battlefields and floor(d/n) on the rest, e.g. (7, 3) -> (3,2,2)."""
    base, extra = divmod(d, n)
    return SymmetricStrategy(tuple([base + 1] * extra + [base] * (n - extra)))


def maxass(x: Union[SymmetricStrategy, MixedStrategy]) -> int:
    """
    Largest single-battlefield assignment.

    For a mixed strategy this is the maximum over its support.

    Raises:
        InvalidInputError: For an empty support.
    """
    if isinstance(x, SymmetricStrategy):
        return x.parts[0] if x.parts else 0
    strategies = [strategy for strategy, _ in getattr(x, "support", ())]
    if not strategies:
        error_message = "maxass of an empty mixed strategy"
        logging.error(error_message)
        raise InvalidInputError(error_message)
    return max(maxass(strategy) for strategy in strategies)


def validate_strategy(strategy: SymmetricStrategy, d: int, n: int) -> None:
    """Raises InvalidInputError unless `strategy` is a length-n partition of d."""
    if strategy.n != n or strategy.total != d:
        error_message = f"Strategy {strategy} is not a partition of {d} over {n} battlefields"
        logging.error(error_message)
        raise InvalidInputError(error_message)


if __name__ == "__main__":
    for strategy in enumerate_symmetric_strategies(7, 3):
        print(strategy)
    print(f"count: {partition_count(7, 3)}")
