import math

import numpy as np
import pytest

from servesalience.estimation import ServeStats
from servesalience.fixtures import fixture_stats
from servesalience.robustness import (DoubleFaultFit, NoRoot, TooFewPoints, curvature_t_fit, double_fault_fit,
                                      gamma_diagnostic, lowess, softmax_fit)
from servesalience.structural import DivisionByZero, fit_player, optimal_strategy, solve_lambda
from synth import draw_truth

FIXTURES = fixture_stats()
FED = FIXTURES["Federer"]


# ---------------------------------------------------------------- softmax

class TestSoftmax:
    def test_federer(self):
        m = softmax_fit(FED)
        assert m.lam == pytest.approx(2.46, abs=0.05)
        assert m.delta == pytest.approx(0.38, abs=0.03)

    def test_djokovic(self):
        m = softmax_fit(FIXTURES["Djokovic"])
        assert m.lam == pytest.approx(3.54, abs=0.05)
        assert m.delta == pytest.approx(0.32, abs=0.03)

    @pytest.mark.parametrize("pid", sorted(FIXTURES))
    def test_curves_reproduce_observed_shares(self, pid):
        s = FIXTURES[pid]
        m = softmax_fit(s)
        assert abs(m.f(s.x1) - s.f1) < 1e-10 and abs(m.f(s.x2) - s.f2) < 1e-10
        assert abs(m.k(s.x1) - s.k1) < 1e-10 and abs(m.k(s.x2) - s.k2) < 1e-10

    @pytest.mark.parametrize("pid", sorted(FIXTURES))
    def test_first_order_conditions(self, pid):
        s = FIXTURES[pid]
        m = softmax_fit(s)
        lam, b = m.lam, m.beta

        def u(x):
            return m.f(x) + b * m.k(x)

        def du(x):
            return lam * math.exp(lam * x) * (m.tau_f + b * m.tau_k)

        foc2 = u(s.x2) + s.x2 * du(s.x2)
        foc1 = u(s.x1) + s.x1 * du(s.x1) - s.x2 * u(s.x2)
        assert abs(foc2) < 1e-10
        assert abs(foc1) < 1e-8

    def test_fixed_point_residual(self):
        s = FED
        m = softmax_fit(s, eps=1e-12)
        e1, e2 = math.exp(m.lam * s.x1), math.exp(m.lam * s.x2)
        rhs = (e2 - e1) / (s.x1 * e1 - s.x2 * (1 - s.x2) * e2)
        assert abs(rhs - m.lam) < 1e-9

    def test_equal_shares_rejected(self):
        with pytest.raises(DivisionByZero):
            softmax_fit(ServeStats(0.6, 0.9, 0.3, 0.3, 0.3, 0.2))

    def test_no_root(self):
        # nearly equal serve-in rates push the fixed point far beyond the scanned range
        with pytest.raises(NoRoot):
            softmax_fit(ServeStats(0.9, 0.9000001, 0.3, 0.2, 0.3, 0.35))


# ---------------------------------------------------------------- relative curvature

class TestCurvatureT:
    @pytest.mark.parametrize("pid", sorted(FIXTURES))
    def test_unit_t_is_main_model(self, pid):
        s = FIXTURES[pid]
        c = curvature_t_fit(s, 1.0)
        f = fit_player(s)
        sk = f.skills
        assert c.solved
        for got, want in ((c.lam, sk.lam), (c.a_f, sk.a_f), (c.tau_f, sk.tau_f), (c.a_k, sk.a_k),
                          (c.tau_k, sk.tau_k), (c.beta, f.prefs.beta)):
            assert got == pytest.approx(want, rel=1e-8)

    def test_federer_t_one_and_a_half(self):
        c = curvature_t_fit(FED, 1.5)
        assert c.solved
        assert c.delta == pytest.approx(0.30, abs=0.03)
        assert c.lam == pytest.approx(3.17, abs=0.08)

    @pytest.mark.parametrize("pid", ["Sampras", "Opelka"])
    def test_unsolved_at_half(self, pid):
        assert not curvature_t_fit(FIXTURES[pid], 0.5).solved

    def test_federer_solved_at_half(self):
        assert curvature_t_fit(FED, 0.5).solved

    @pytest.mark.parametrize("pid", sorted(FIXTURES))
    def test_delta_stable_near_unit_t(self, pid):
        d1 = curvature_t_fit(FIXTURES[pid], 1.0).delta
        for t in (0.75, 1.25):
            c = curvature_t_fit(FIXTURES[pid], t)
            assert c.solved
            assert abs(c.delta - d1) <= 0.05

    @pytest.mark.parametrize("t", [0.75, 1.25, 1.5, 2.0])
    def test_solved_fixed_point_satisfies_focs(self, t):
        s = FED
        c = curvature_t_fit(s, t)
        lam, b = c.lam, c.beta

        def f(x):
            return (c.a_f - x**lam) / c.tau_f

        def k(x):
            return (c.a_k - x ** (t * lam)) / c.tau_k

        def du(x):
            return -lam * x ** (lam - 1) / c.tau_f - b * t * lam * x ** (t * lam - 1) / c.tau_k

        assert abs(f(s.x1) - s.f1) < 1e-10 and abs(k(s.x2) - s.k2) < 1e-10
        foc2 = f(s.x2) + b * k(s.x2) + s.x2 * du(s.x2)
        foc1 = f(s.x1) + b * k(s.x1) + s.x1 * du(s.x1) - s.x2 * (f(s.x2) + b * k(s.x2))
        assert abs(foc2) < 1e-8
        assert abs(foc1) < 1e-6

    def test_bad_t(self):
        with pytest.raises(ValueError):
            curvature_t_fit(FED, 0.0)


# ---------------------------------------------------------------- double faults

class TestDoubleFault:
    def test_federer(self):
        d = double_fault_fit(FED)
        assert d.lam == pytest.approx(2.81, abs=0.02)
        assert d.gamma == pytest.approx(0.17, abs=0.01)

    def test_hand_evaluation(self):
        lam = solve_lambda(FED.x1, FED.x2)
        z1, z2 = FED.x1**lam, FED.x2**lam
        tau = (z2 - z1) / (FED.y1 - FED.y2)
        a = tau * FED.y2 + z2
        assert double_fault_fit(FED).gamma == pytest.approx((z2 * (lam + 1) - a) / tau, rel=1e-12)

    @pytest.mark.parametrize("pid", sorted(FIXTURES))
    def test_second_serve_condition(self, pid):
        d = double_fault_fit(FIXTURES[pid])
        x2 = FIXTURES[pid].x2
        assert abs(x2**d.lam - (d.a + d.tau * d.gamma) / (d.lam + 1)) < 1e-10

    @pytest.mark.parametrize("pid", sorted(FIXTURES))
    def test_shares_aggregates_with_main_model(self, pid):
        d = double_fault_fit(FIXTURES[pid])
        sk = fit_player(FIXTURES[pid]).skills
        assert d.lam == sk.lam
        assert d.a == pytest.approx(sk.a, rel=1e-9)
        assert d.tau == pytest.approx(sk.tau, rel=1e-9)

    def test_zero_at_unit_weight(self):
        rng = np.random.default_rng(6)
        checked = 0
        while checked < 30:
            sk = draw_truth(rng).skills
            try:
                x1, x2 = optimal_strategy(sk, 1.0)
                s = ServeStats(x1, x2, sk.f(x1), sk.f(x2), sk.k(x1), sk.k(x2))
                d = double_fault_fit(s)
            except ValueError:
                continue
            assert abs(d.gamma) < 1e-8
            checked += 1

    def test_invariant_to_rally_split(self):
        s = FED
        g0 = double_fault_fit(s).gamma
        for df1, df2 in ((0.05, -0.03), (-0.1, 0.1), (0.2, 0.0)):
            t = ServeStats(s.x1, s.x2, s.f1 + df1, s.f2 + df2, s.k1 - df1, s.k2 - df2)
            assert double_fault_fit(t).gamma == pytest.approx(g0, rel=1e-12)


# ---------------------------------------------------------------- smoothing

class TestLowess:
    def test_reproduces_lines(self):
        x = np.linspace(0, 3, 40)
        y = 2.5 * x - 1.0
        assert np.max(np.abs(lowess(x, y, 0.3) - y)) < 1e-10

    def test_reproduces_planes(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(0, 1, (60, 4))
        y = X @ np.array([1.0, -2.0, 0.5, 3.0]) + 0.7
        assert np.max(np.abs(lowess(X, y, 0.5) - y)) < 1e-10

    def test_constant(self):
        x = np.random.default_rng(1).uniform(0, 1, 30)
        assert np.allclose(lowess(x, np.full(30, 4.2), 0.4), 4.2, atol=1e-12)

    def test_noisy_sine_beats_raw_noise(self):
        rng = np.random.default_rng(2)
        x = np.sort(rng.uniform(0, 2 * math.pi, 400))
        truth = np.sin(x)
        y = truth + rng.normal(0, 0.3, x.size)
        fit = lowess(x, y, 0.3)
        raw = np.sqrt(np.mean((y - truth) ** 2))
        smooth = np.sqrt(np.mean((fit - truth) ** 2))
        assert smooth < 0.5 * raw

    def test_evaluation_points(self):
        x = np.linspace(0, 1, 20)
        out = lowess(x, 3 * x, 0.5, at=[0.25, 0.75])
        assert out == pytest.approx([0.75, 2.25], abs=1e-10)

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            lowess([1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 4.0])

    @pytest.mark.parametrize("span", [0.0, 1.5])
    def test_bad_span(self, span):
        with pytest.raises(ValueError):
            lowess(np.arange(10.0), np.arange(10.0), span)


# ---------------------------------------------------------------- gamma diagnostic

def null_population(seed, n=40):
    """Double-fault model with mean-zero gamma and one-shot shares unrelated to it."""
    rng = np.random.default_rng(seed)
    out = {}
    while len(out) < n:
        s = draw_truth(rng).stats
        f1 = rng.uniform(0.05, min(s.y1, 0.6))
        f2 = rng.uniform(0.02, min(s.y2, 0.4))
        st = ServeStats(s.x1, s.x2, f1, f2, s.y1 - f1, s.y2 - f2)
        d = double_fault_fit(st)
        out[f"p{len(out):02d}"] = (DoubleFaultFit(rng.normal(0, 0.2), d.lam, d.a, d.tau), st)
    return out


def process_population(seed, n=40):
    """Players who value long rallies, fitted as if they disliked double faults."""
    rng = np.random.default_rng(seed)
    out = {}
    while len(out) < n:
        t = draw_truth(rng)
        if t.beta < 1.1:
            continue
        out[f"p{len(out):02d}"] = (double_fault_fit(t.stats), t.stats)
    return out


class TestGammaDiagnostic:
    @pytest.mark.parametrize("seed", [0, 1])
    def test_null_rarely_significant(self, seed):
        d = gamma_diagnostic(null_population(seed), B=300, seed=seed)
        assert np.mean([x.significant for x in d]) <= 0.10

    @pytest.mark.parametrize("seed", [0, 1])
    def test_process_model_mostly_positive(self, seed):
        d = gamma_diagnostic(process_population(seed), B=300, seed=seed)
        assert np.mean([x.estimate > 0 for x in d]) > 0.9
        assert np.mean([x.significant for x in d]) > 0.5

    def test_deterministic(self):
        pop = {pid: (double_fault_fit(s), s) for pid, s in FIXTURES.items()}
        assert gamma_diagnostic(pop, B=100, seed=3) == gamma_diagnostic(pop, B=100, seed=3)

    def test_interval_brackets_estimate_shape(self):
        pop = {pid: (double_fault_fit(s), s) for pid, s in FIXTURES.items()}
        d = gamma_diagnostic(pop, B=200, seed=9)
        assert len(d) == 2 * len(FIXTURES)
        for x in d:
            assert x.lo <= x.hi
            assert x.significant == (x.lo > 0)

    def test_single_player(self):
        with pytest.raises(TooFewPoints):
            gamma_diagnostic({"Federer": (double_fault_fit(FED), FED)})

    def test_too_few_replications(self):
        pop = {pid: (double_fault_fit(s), s) for pid, s in FIXTURES.items()}
        with pytest.raises(ValueError):
            gamma_diagnostic(pop, B=50)
