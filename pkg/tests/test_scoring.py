import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (game_forward, match_enumeration, set_chain, simulate_sets, simulate_tiebreaks,
                     tiebreak_forward)
from servesalience.scoring import (InvalidBestOf, PrizeLadder, expected_prize, game_prob, match_prob,
                                   score_chain, set_prob, tiebreak_prob)

GRID = [0.3, 0.45, 0.5, 0.62, 0.8]
probs = st.floats(0.01, 0.99)


# ---------------------------------------------------------------- game

class TestGame:
    def test_fixed_values(self):
        assert game_prob(0.5) == pytest.approx(0.5, abs=1e-15)
        assert game_prob(1.0) == 1.0
        assert game_prob(0.0) == 0.0
        assert game_prob(0.6) == pytest.approx(0.7357, abs=1e-4)

    @pytest.mark.parametrize("p", GRID)
    def test_matches_enumeration(self, p):
        assert abs(game_prob(p) - game_forward(p)) < 1e-12

    @given(probs)
    def test_complement(self, p):
        assert game_prob(p) + game_prob(1 - p) == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------- tiebreak

class TestTiebreak:
    @pytest.mark.parametrize("pa", GRID)
    @pytest.mark.parametrize("pb", GRID)
    def test_matches_enumeration(self, pa, pb):
        assert abs(tiebreak_prob(pa, pb) - tiebreak_forward(pa, pb)) < 1e-12

    @given(probs)
    def test_mirror_is_even(self, p):
        assert tiebreak_prob(p, 1 - p) == pytest.approx(0.5, abs=1e-12)

    def test_monte_carlo(self):
        n = 10**7
        est = simulate_tiebreaks(0.65, 0.40, n, np.random.default_rng(1))
        exact = tiebreak_prob(0.65, 0.40)
        se = math.sqrt(exact * (1 - exact) / n)
        assert abs(est - exact) < 3 * se


# ---------------------------------------------------------------- set

class TestSet:
    def test_fixed_values(self):
        assert set_prob(0.5, 0.5, 0.5, 0.5) == pytest.approx(0.5, abs=1e-15)
        assert set_prob(1.0, 0.0, 0.5, 0.5) == 1.0

    @pytest.mark.parametrize("ha", GRID)
    @pytest.mark.parametrize("hb", GRID)
    def test_matches_linear_system(self, ha, hb):
        tb = tiebreak_prob(0.6, 0.35)
        assert abs(set_prob(ha, hb, 0.6, 0.35) - set_chain(ha, hb, tb)) < 1e-12

    def test_monte_carlo(self):
        n = 10**7
        est = simulate_sets(0.8, 0.7, 0.65, 0.40, n, np.random.default_rng(7))
        exact = set_prob(0.8, 0.7, 0.65, 0.40)
        se = math.sqrt(exact * (1 - exact) / n)
        assert abs(est - exact) < 3 * se

    @given(probs)
    def test_identical_players_even(self, p):
        h = game_prob(p)
        assert set_prob(h, h, p, 1 - p) == pytest.approx(0.5, abs=1e-12)


# ---------------------------------------------------------------- match and prize

class TestMatch:
    def test_fixed_values(self):
        assert match_prob(0.5, 5) == pytest.approx(0.5, abs=1e-15)
        assert match_prob(0.6, 5) == pytest.approx(0.68256, abs=1e-12)

    @pytest.mark.parametrize("best_of", [1, 3, 5, 7])
    @pytest.mark.parametrize("p", GRID)
    def test_matches_enumeration(self, p, best_of):
        assert abs(match_prob(p, best_of) - match_enumeration(p, best_of)) < 1e-12

    @given(st.floats(0.5, 1.0))
    def test_longer_favours_better(self, p):
        assert match_prob(p, 5) >= match_prob(p, 3) - 1e-12

    @pytest.mark.parametrize("bad", [0, 2, 4, -1])
    def test_invalid_best_of(self, bad):
        with pytest.raises(InvalidBestOf):
            match_prob(0.5, bad)


class TestPrize:
    ladder = PrizeLadder(7, (110000, 154000, 237000, 400000, 660000, 1260000, 2500000, 5000000))

    def test_endpoints(self):
        assert expected_prize(0.0, self.ladder) == 110000
        assert expected_prize(1.0, self.ladder) == 5000000

    def test_exit_probabilities_sum_to_one(self):
        ones = PrizeLadder(7, (1.0,) * 8)
        assert expected_prize(0.37, ones) == pytest.approx(1.0, abs=1e-14)

    def test_ladder_validation(self):
        with pytest.raises(ValueError, match="non-decreasing"):
            PrizeLadder(2, (3, 2, 1))
        with pytest.raises(ValueError, match="expected 3"):
            PrizeLadder(2, (1, 2))


# ---------------------------------------------------------------- chain properties

class TestChain:
    @given(probs)
    def test_symmetric_opponent_is_even(self, p):
        c = score_chain(p, p)
        assert c.p_set == pytest.approx(0.5, abs=1e-12)
        assert c.p_match == pytest.approx(0.5, abs=1e-12)

    @settings(max_examples=50)
    @given(st.floats(0.3, 0.9), st.floats(0.0, 0.05), st.floats(0.3, 0.9))
    def test_monotone_in_own_serve(self, p, dp, opp):
        lo, hi = score_chain(p, opp), score_chain(min(p + dp, 1.0), opp)
        assert hi.p_game_hold >= lo.p_game_hold - 1e-12
        assert hi.p_set >= lo.p_set - 1e-12
        assert hi.p_match >= lo.p_match - 1e-12
