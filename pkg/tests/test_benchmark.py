import pandas as pd
import pytest

from src.Components.benchmark import (
    COLUMNS,
    FAILED,
    SIZE_COLUMNS,
    SKIPPED,
    TIMEOUT,
    pure_strategy_count,
    run_benchmark,
    write_benchmark,
)
from src.Components.game_model import AggregationKind
from src.exception import InvalidInputError
from src.utils import use_config


class TestRunBenchmark:
    def test_small_sweep_in_process(self):
        frame = run_benchmark(range(2, 4), offset=1, agg=AggregationKind.MTO, timeout=0)
        assert list(frame.columns) == ["n", "d", "agg", "strategies"] + SIZE_COLUMNS + COLUMNS
        assert frame["n"].tolist() == [2, 3]
        assert frame["d"].tolist() == [3, 4]
        assert frame["strategies"].tolist() == [2, 4]
        for column in COLUMNS:
            assert all(isinstance(x, float) and x >= 0.0 for x in frame[column])

    def test_strategy_set_reduction(self):
        frame = run_benchmark(range(2, 4), offset=1, agg=AggregationKind.MTO, timeout=0)
        assert frame["pure_strategies"].tolist() == [4, 15]
        assert frame["reduction_factor"].tolist() == [2.0, 3.75]

    def test_lp_column_is_timed(self):
        frame = run_benchmark([3], offset=2, agg=AggregationKind.MAJORITARIAN, timeout=0)
        assert "lp_s" in COLUMNS
        assert isinstance(frame.loc[0, "lp_s"], float)

    def test_naive_column_is_skipped_past_its_limit(self):
        frame = run_benchmark([3], offset=0, agg="majoritarian", timeout=0, naive_max_n=2)
        assert frame.loc[0, "naive_matrix_s"] == SKIPPED
        assert isinstance(frame.loc[0, "clash_matrix_s"], float)

    def test_timeouts_are_recorded_and_the_run_continues(self):
        frame = run_benchmark([4], offset=5, agg=AggregationKind.MTO, timeout=1e-6)
        assert frame.loc[0, "clash_matrix_s"] == TIMEOUT
        assert len(frame) == 1

    @pytest.mark.parametrize("timeout", [0, 60])
    def test_worker_processes_use_the_active_config(self, tmp_path, timeout):
        config = tmp_path / "tight.yaml"
        config.write_text("MAX_STRATEGIES: 1\nWORKERS: 1\n", encoding="utf-8")
        use_config(str(config))
        frame = run_benchmark([2], offset=1, agg=AggregationKind.MTO, timeout=timeout)
        assert frame.loc[0, "clash_matrix_s"] == FAILED
        assert frame.loc[0, "lp_s"] == FAILED
        assert isinstance(frame.loc[0, "doa_s"], float)

    def test_empty_sweep(self):
        with pytest.raises(InvalidInputError, match="empty"):
            run_benchmark([], offset=5, agg=AggregationKind.MTO)


class TestPureStrategyCount:
    @pytest.mark.parametrize("d, n, expected", [(3, 2, 4), (4, 3, 15), (0, 5, 1), (10, 1, 1)])
    def test_examples(self, d, n, expected):
        assert pure_strategy_count(d, n) == expected


class TestWriteBenchmark:
    def test_csv_round_trip(self, tmp_path):
        frame = run_benchmark([2], offset=0, agg=AggregationKind.BLOTTO, timeout=0)
        path = tmp_path / "bench" / "bench.csv"
        write_benchmark(frame, path)
        loaded = pd.read_csv(path)
        assert loaded["n"].tolist() == [2]
        assert list(loaded.columns) == list(frame.columns)
