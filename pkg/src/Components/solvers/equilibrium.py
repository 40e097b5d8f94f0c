from dataclasses import dataclass, field

from src.Components.game_model import MixedStrategy


@dataclass
class Equilibrium:
    """
    A solved (or approximately solved) game.

    `value` is the payoff to player A; `wall_time` is in seconds. `exploitability` is measured,
    never assumed: the larger gain either player gets by best-responding to the other.
    """

    value: float
    strategy_a: MixedStrategy
    strategy_b: MixedStrategy
    method: str
    iterations: int
    exploitability: float
    wall_time: float
    diagnostics: dict = field(default_factory=dict)

    def to_report(self) -> dict:
        return {
            "method": self.method,
            "value": self.value,
            "strategy_a": self.strategy_a.to_dict(),
            "strategy_b": self.strategy_b.to_dict(),
            "iterations": self.iterations,
            "exploitability": self.exploitability,
            "wall_time_ms": round(self.wall_time * 1000.0, 3),
        }
