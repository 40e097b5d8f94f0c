import numpy as np
import pytest

from src.Components.brute_oracle import full_game_best_response
from src.Components.game_model import AggregationKind, GameSpec, MixedStrategy, Player, SymmetricStrategy
from src.Components.matrix_builder import build_matrix
from src.Components.solvers.double_oracle import iteration_cap, solve_doa
from src.Components.solvers.equilibrium import Equilibrium
from src.Components.solvers.lp import BACKENDS, solve_lp, solve_matrix_game
from src.Components.solvers.mwu import solve_mwu, solve_mwu_game
from src.Components.solvers.oracle import best_response, heuristic_candidates, measure_exploitability
from src.exception import ConvergenceError, InvalidInputError

S = SymmetricStrategy
MTO = AggregationKind.MTO
MAJ = AggregationKind.MAJORITARIAN
MTO_3 = GameSpec(3, 3, 3, MTO)
MATCHING_PENNIES = [[1.0, -1.0], [-1.0, 1.0]]
# the restricted LP is certified to SOLVER_TOLERANCE, so game values are compared at that scale
VALUE_TOL = 1e-7
# value checks on the symmetric acceptance grid
ACCEPTANCE_TOL = 1e-9


def exploitability_of(payoffs, x, y) -> float:
    payoffs = np.asarray(payoffs, dtype=float)
    value = x @ payoffs @ y
    return max(0.0, float((payoffs @ y).max() - value), float(value - (x @ payoffs).min()))


class TestSolveMatrixGame:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_matching_pennies(self, backend):
        solution = solve_matrix_game(MATCHING_PENNIES, backend=backend)
        assert solution.value == pytest.approx(0.0, abs=1e-9)
        np.testing.assert_allclose(solution.x, [0.5, 0.5], atol=1e-9)
        np.testing.assert_allclose(solution.y, [0.5, 0.5], atol=1e-9)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_weak_dominance(self, backend):
        solution = solve_matrix_game([[0.0, 1.0], [-1.0, 0.0]], backend=backend)
        assert solution.value == pytest.approx(0.0, abs=1e-9)
        np.testing.assert_allclose(solution.x, [1.0, 0.0], atol=1e-9)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_single_entry(self, backend):
        solution = solve_matrix_game([[0.25]], backend=backend)
        assert solution.value == pytest.approx(0.25)

    def test_backends_agree_on_random_games(self, rng):
        for _ in range(20):
            payoffs = rng.normal(size=(int(rng.integers(1, 8)), int(rng.integers(1, 8))))
            highs = solve_matrix_game(payoffs, backend="highs")
            simplex = solve_matrix_game(payoffs, backend="simplex")
            assert simplex.value == pytest.approx(highs.value, abs=1e-7)
            assert simplex.upper - simplex.lower <= 1e-7

    @pytest.mark.parametrize("payoffs, match", [
        (np.zeros((0, 2)), "non-empty and finite"),
        ([[0.0, np.nan]], "non-empty and finite"),
    ])
    def test_rejects_bad_matrices(self, payoffs, match):
        with pytest.raises(InvalidInputError, match=match):
            solve_matrix_game(payoffs)

    def test_unknown_backend(self):
        with pytest.raises(InvalidInputError, match="Unknown LP backend"):
            solve_matrix_game(MATCHING_PENNIES, backend="cplex")

    def test_missing_scipy_falls_back_to_simplex(self, monkeypatch):
        monkeypatch.setattr("src.Components.solvers.lp.linprog", None)
        assert solve_matrix_game(MATCHING_PENNIES, backend="highs").backend == "simplex"


class TestSolveLp:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_three_by_three_mto(self, backend):
        eq = solve_lp(build_matrix(MTO_3), backend=backend)
        assert isinstance(eq, Equilibrium)
        assert eq.method == "lp"
        assert eq.value == pytest.approx(0.0, abs=1e-9)
        assert eq.exploitability <= 1e-7
        assert measure_exploitability(eq, MTO_3) <= 1e-7

    def test_report_fields(self):
        report = solve_lp(build_matrix(MTO_3)).to_report()
        assert set(report) == {"method", "value", "strategy_a", "strategy_b", "iterations", "exploitability", "wall_time_ms"}
        assert abs(sum(entry["probability"] for entry in report["strategy_a"]) - 1.0) <= 1e-12


class TestBestResponse:
    def test_even_split_is_beaten(self):
        spec = GameSpec(4, 3, 3, MTO)
        assert best_response(MixedStrategy.pure(S((1, 1, 1))), spec, Player.A) == (S((2, 2, 0)), 1.0)

    def test_responder_b(self):
        assert best_response(MixedStrategy.pure(S((3, 0, 0))), MTO_3, Player.B) == (S((1, 1, 1)), 1.0)
        spec = GameSpec(3, 4, 3, MTO)
        assert best_response(MixedStrategy.pure(S((1, 1, 1))), spec, "B") == (S((2, 2, 0)), 1.0)

    def test_empty_budgets(self):
        spec = GameSpec(0, 0, 3, MTO)
        assert best_response(MixedStrategy.pure(S((0, 0, 0))), spec, Player.A) == (S((0, 0, 0)), 0.0)

    def test_ties_go_to_the_first_strategy(self):
        strategy, value = best_response(MixedStrategy.pure(S((1, 1, 1))), MTO_3, Player.A)
        assert (strategy, value) == (S((2, 1, 0)), 0.0)

    def test_heuristic_prunes_but_keeps_the_value(self):
        xi = MixedStrategy.pure(S((1, 1, 1)))
        spec = GameSpec(4, 3, 3, MTO)
        assert [c.parts for c in heuristic_candidates(xi, [S((4, 0, 0)), S((2, 2, 0)), S((2, 1, 1))])] == [(2, 2, 0), (2, 1, 1)]
        assert best_response(xi, spec, Player.A, use_heuristic=True) == (S((2, 2, 0)), 1.0)

    def test_heuristic_falls_back_when_nothing_is_left(self):
        spec = GameSpec(9, 0, 3, MTO)
        strategy, value = best_response(MixedStrategy.pure(S((0, 0, 0))), spec, Player.A, use_heuristic=True)
        assert (strategy, value) == (S((9, 0, 0)), 1.0)

    def test_mixed_opponent(self):
        xi = MixedStrategy(((S((3, 0, 0)), 0.5), (S((1, 1, 1)), 0.5)))
        strategy, value = best_response(xi, MTO_3, Player.A)
        # (2,1,0) scores 1/3 and 0, (1,1,1) scores 1 and 0
        assert (strategy, value) == (S((1, 1, 1)), pytest.approx(0.5))

    def test_shared_cache_is_filled(self):
        cache = {}
        best_response(MixedStrategy.pure(S((1, 1, 1))), MTO_3, Player.A, cache=cache)
        assert len(cache) == 3

    def test_rejects_empty_or_mismatched(self):
        with pytest.raises(InvalidInputError, match="non-empty"):
            best_response(None, MTO_3, Player.A)
        with pytest.raises(InvalidInputError, match="battlefields"):
            best_response(MixedStrategy.pure(S((1, 1))), MTO_3, Player.A)
        with pytest.raises(InvalidInputError, match="not a partition of 3"):
            best_response(MixedStrategy.pure(S((2, 1, 1))), MTO_3, Player.A)

    def test_checks_the_budget_of_the_other_player(self):
        spec = GameSpec(4, 3, 3, MTO)
        assert best_response(MixedStrategy.pure(S((2, 1, 1))), spec, Player.B)[0].total == 3
        with pytest.raises(InvalidInputError, match="not a partition of 3"):
            best_response(MixedStrategy.pure(S((2, 1, 1))), spec, Player.A)

    def test_exploitability_rejects_a_foreign_strategy(self):
        pure = MixedStrategy.pure(S((4, 0, 0)))
        eq = Equilibrium(0.0, pure, pure, "manual", 0, 0.0, 0.0)
        with pytest.raises(InvalidInputError, match="not a partition"):
            measure_exploitability(eq, MTO_3)


class TestMeasureExploitability:
    def test_pure_pair_is_exploitable(self):
        pure = MixedStrategy.pure(S((3, 0, 0)))
        eq = Equilibrium(0.0, pure, pure, "manual", 0, 0.0, 0.0)
        assert measure_exploitability(eq, MTO_3) == pytest.approx(1.0)

    def test_symmetric_game_gaps_match(self):
        eq = solve_lp(build_matrix(GameSpec(5, 5, 3, MTO)))
        assert measure_exploitability(eq, GameSpec(5, 5, 3, MTO)) == pytest.approx(0.0, abs=1e-7)


class TestDoubleOracle:
    def test_three_by_three(self):
        eq = solve_doa(MTO_3)
        assert eq.value == pytest.approx(0.0, abs=1e-9)
        assert eq.method == "doa"
        assert eq.exploitability <= VALUE_TOL

    def test_all_zero_game_converges_at_once(self):
        eq = solve_doa(GameSpec(2, 2, 2, MTO))
        assert eq.value == pytest.approx(0.0, abs=1e-12)
        assert eq.iterations <= 2

    @pytest.mark.parametrize("spec", [
        GameSpec(4, 3, 3, MTO),
        GameSpec(6, 5, 4, MAJ),
        GameSpec(7, 7, 4, AggregationKind.BLOTTO),
    ])
    def test_matches_full_lp(self, spec):
        assert solve_doa(spec).value == pytest.approx(solve_lp(build_matrix(spec)).value, abs=1e-6)

    def test_bounds_bracket_the_value(self):
        eq = solve_doa(GameSpec(7, 7, 5, MAJ))
        lower, upper = eq.diagnostics["lower_bounds"], eq.diagnostics["upper_bounds"]
        assert all(a <= b for a, b in zip(lower, lower[1:]))
        assert all(a >= b for a, b in zip(upper, upper[1:]))
        assert all(lo <= hi + VALUE_TOL for lo, hi in zip(lower, upper))
        assert lower[-1] - VALUE_TOL <= eq.value <= upper[-1] + VALUE_TOL
        assert len(eq.diagnostics["values"]) == eq.iterations

    def test_support_grows_from_the_most_even_assignment(self):
        eq = solve_doa(GameSpec(7, 7, 3, MTO))
        assert eq.diagnostics["support_sizes"][0] == (1, 1)

    def test_iteration_cap_raises_with_the_last_equilibrium(self):
        with pytest.raises(ConvergenceError, match="did not converge") as excinfo:
            solve_doa(GameSpec(4, 3, 3, MTO), max_iterations=1)
        assert excinfo.value.equilibrium is not None
        assert excinfo.value.equilibrium.iterations == 1

    def test_iteration_cap_formula(self):
        settings = {"DOA_ITERATION_FACTOR": 10, "DOA_MAX_ITERATIONS": 10_000}
        assert iteration_cap(MTO_3, settings) == 30
        assert iteration_cap(GameSpec(0, 0, 2, MTO), settings) == 10
        assert iteration_cap(GameSpec(60, 60, 30, MTO), settings) == 10_000

    @pytest.mark.parametrize("spec", [GameSpec(5, 5, 3, MTO), GameSpec(6, 5, 4, MAJ)])
    def test_heuristic_matches_exhaustive(self, spec):
        exact = solve_doa(spec)
        pruned = solve_doa(spec, use_heuristic=True, audit_heuristic=True)
        assert pruned.method == "doa+heuristic"
        assert pruned.value == pytest.approx(exact.value, abs=VALUE_TOL)
        for _, value_a, exact_a, value_b, exact_b in pruned.diagnostics["heuristic_audit"]:
            assert value_a == pytest.approx(exact_a, abs=1e-12)
            assert value_b == pytest.approx(exact_b, abs=1e-12)

    @pytest.mark.parametrize("use_heuristic", [False, True])
    def test_exact_exploitability_is_recorded(self, use_heuristic):
        spec = GameSpec(6, 5, 4, MAJ)
        eq = solve_doa(spec, use_heuristic=use_heuristic)
        exact = eq.diagnostics["exact_exploitability"]
        assert exact == pytest.approx(measure_exploitability(eq, spec), abs=1e-12)
        assert eq.exploitability <= exact + 1e-12
        assert exact <= VALUE_TOL

    @pytest.mark.parametrize("spec", [GameSpec(4, 4, 2, MTO), GameSpec(5, 5, 3, MTO), GameSpec(5, 4, 3, MAJ)])
    def test_no_asymmetric_deviation_pays(self, spec):
        eq = solve_doa(spec)
        _, gain_a = full_game_best_response(eq.strategy_b, spec.d_a, spec.agg)
        _, gain_b = full_game_best_response(eq.strategy_a, spec.d_b, spec.agg)
        assert gain_a <= eq.value + 1e-6
        assert gain_b <= -eq.value + 1e-6


@pytest.mark.slow
class TestSolverAcceptance:
    GRID = [GameSpec(n + 2, n + 2, n, agg) for n in range(3, 7) for agg in (MTO, MAJ)]
    ASYMMETRIC = [GameSpec(n + 3, n + 2, n, agg) for n in range(3, 7) for agg in (MTO, MAJ)]

    @pytest.mark.parametrize("spec", GRID, ids=str)
    def test_doa_matches_lp_and_value_is_zero(self, spec):
        doa = solve_doa(spec)
        lp = solve_lp(build_matrix(spec))
        assert lp.value == pytest.approx(0.0, abs=ACCEPTANCE_TOL)
        assert doa.value == pytest.approx(0.0, abs=ACCEPTANCE_TOL)
        assert doa.value == pytest.approx(lp.value, abs=ACCEPTANCE_TOL)

    @pytest.mark.parametrize("spec", GRID + ASYMMETRIC, ids=str)
    def test_heuristic_is_sound(self, spec):
        exact = solve_doa(spec)
        pruned = solve_doa(spec, use_heuristic=True, audit_heuristic=True)
        assert pruned.value == pytest.approx(exact.value, abs=ACCEPTANCE_TOL)
        for _, value_a, exact_a, value_b, exact_b in pruned.diagnostics["heuristic_audit"]:
            assert value_a == pytest.approx(exact_a, abs=1e-12)
            assert value_b == pytest.approx(exact_b, abs=1e-12)

    @pytest.mark.parametrize("spec", [
        GameSpec(d, d, n, agg) for n in range(2, 5) for d in range(0, 7) for agg in (MTO, MAJ)
    ], ids=str)
    def test_symmetric_equilibrium_solves_the_full_game(self, spec):
        eq = solve_doa(spec)
        _, gain_a = full_game_best_response(eq.strategy_b, spec.d_a, spec.agg)
        _, gain_b = full_game_best_response(eq.strategy_a, spec.d_b, spec.agg)
        assert gain_a <= eq.value + 1e-6
        assert gain_b <= -eq.value + 1e-6

    @pytest.mark.parametrize("agg", [MTO, MAJ])
    def test_mwu_on_five_battlefields(self, agg):
        m = build_matrix(GameSpec(7, 7, 5, agg))
        lp_value = solve_lp(m).value
        eq = solve_mwu_game(m, phi=0.1, steps=10_000)
        assert eq.exploitability <= 0.05
        assert abs(eq.value - lp_value) <= 0.05
        assert eq.exploitability <= solve_mwu_game(m, phi=0.1, steps=100).exploitability + 1e-9


class TestMwu:
    def test_single_strategy(self):
        result = solve_mwu([[0.0]], phi=0.1, steps=10)
        np.testing.assert_allclose(result.row_weights, [1.0])
        np.testing.assert_allclose(result.column_weights, [1.0])

    def test_single_strategy_game(self):
        eq = solve_mwu_game(build_matrix(GameSpec(0, 0, 2, MTO)), phi=0.1, steps=10)
        assert eq.value == 0.0
        assert eq.strategy_a.strategies == [S((0, 0))]
        assert eq.method == "mwu"

    def test_matching_pennies(self):
        column_payoffs = -np.asarray(MATCHING_PENNIES)
        result = solve_mwu(column_payoffs, phi=0.1, steps=10_000)
        assert exploitability_of(MATCHING_PENNIES, result.row_weights, result.column_weights) <= 0.05
        assert result.steps == 10_000

    def test_three_by_three_mto(self):
        m = build_matrix(MTO_3)
        eq = solve_mwu_game(m, phi=0.1, steps=10_000)
        assert abs(eq.value) <= 0.05
        assert eq.exploitability <= 0.05
        assert eq.exploitability <= solve_mwu_game(m, phi=0.1, steps=100).exploitability + 1e-9

    def test_exploitability_shrinks_with_steps(self):
        m = build_matrix(MTO_3)
        samples = [solve_mwu_game(m, phi=0.1, steps=steps).exploitability for steps in (100, 1_000, 10_000)]
        assert all(later <= 1.1 * earlier + 1e-12 for earlier, later in zip(samples, samples[1:]))

    def test_blotto_is_rescaled(self):
        m = build_matrix(GameSpec(4, 4, 3, AggregationKind.BLOTTO))
        eq = solve_mwu_game(m, phi=0.1, steps=2_000)
        assert eq.diagnostics["scale"] == 3.0
        # in a game of value 0 the distance to 0 is covered by one of the two gaps
        assert abs(eq.value) <= eq.exploitability + 1e-12

    @pytest.mark.parametrize("kwargs, match", [
        ({"phi": 0.6, "steps": 100}, "phi"),
        ({"phi": 0.0, "steps": 100}, "phi"),
        ({"phi": 0.1, "steps": 0}, "steps"),
    ])
    def test_rejects_bad_parameters(self, kwargs, match):
        with pytest.raises(InvalidInputError, match=match):
            solve_mwu(MATCHING_PENNIES, **kwargs)

    def test_rejects_unscaled_payoffs(self):
        with pytest.raises(InvalidInputError, match=r"\[-1, 1\]"):
            solve_mwu([[2.0, -1.0]], phi=0.1, steps=10)
