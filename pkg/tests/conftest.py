import numpy as np
import pytest

from src.Components.game_model import SymmetricStrategy


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def random_strategy(rng):
    """Draws a uniform composition of d into n parts and sorts it."""

    def draw(d: int, n: int) -> SymmetricStrategy:
        cuts = np.sort(rng.integers(0, d + 1, size=n - 1))
        parts = np.diff(np.concatenate(([0], cuts, [d])))
        return SymmetricStrategy.from_unsorted(int(p) for p in parts)[0]

    return draw


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Points get_settings() at a throwaway config so tests see the built-in defaults."""
    config = tmp_path / "config.yaml"
    config.write_text("WORKERS: 1\n", encoding="utf-8")
    monkeypatch.setattr("src.utils._active_config_path", str(config))
    return config
