import math

import numpy as np
import pytest

from nlsearch import (
    DomainError,
    NoPeakError,
    NonlinearityKind,
    SearchProblem,
    coupling_gap,
    cubic_runtime,
    cubic_width_exact,
    general_width_leading,
    integrate_full,
    integrate_reduced,
    measure_peak,
    runtime_quadrature,
)

CUBIC = NonlinearityKind.CUBIC
CQ = NonlinearityKind.CUBIC_QUINTIC
LOG = NonlinearityKind.LOGLINEAR


class TestReducedIntegration:
    def test_initial_state(self):
        problem = SearchProblem(100, 3, 2.0, CQ)
        traj = integrate_reduced(problem, 1.0)
        s0 = traj.states()[0]
        assert s0.t == 0.0
        assert s0.x == pytest.approx(0.03, abs=1e-15)
        assert s0.z == pytest.approx(0.0, abs=1e-15)
        assert s0.y == pytest.approx(math.sqrt(3 * 97) / 100, rel=1e-14)

    def test_linear_limit_reaches_one(self):
        problem = SearchProblem(100, 1, 0.0, CUBIC)
        t_end = math.pi * math.sqrt(100) / 2
        traj = integrate_reduced(problem, t_end)
        assert traj.x(t_end) == pytest.approx(1.0, abs=1e-8)

    def test_linear_limit_full_curve(self):
        # x(t) = k/N + (1 - k/N) sin^2(sqrt(k/N) t)
        N, k = 100, 2
        problem = SearchProblem(N, k, 0.0, CUBIC)
        t_end = math.pi * math.sqrt(N / k)
        traj = integrate_reduced(problem, t_end)
        ts = np.linspace(0.0, t_end, 101)
        w = math.sqrt(k / N)
        exact = k / N + (1 - k / N) * np.sin(w * ts) ** 2
        np.testing.assert_allclose(traj.x(ts), exact, atol=1e-8)

    @pytest.mark.parametrize("kind,g", [(CUBIC, 3.0), (CQ, 5.0), (LOG, 2.0)])
    def test_norm_drift_within_budget(self, kind, g):
        problem = SearchProblem(100, 1, g, kind)
        tol = 1e-10
        traj = integrate_reduced(problem, 12.0, tol=tol)
        assert traj.norm_drift() <= 10 * tol

    @pytest.mark.parametrize("kind,g", [(CUBIC, 3.0), (CQ, 5.0), (LOG, 2.0)])
    def test_y_linear_relation(self, kind, g):
        # y = -sqrt(k/(N-k)) (x - 1) along the whole trajectory
        N, k = 100, 2
        problem = SearchProblem(N, k, g, kind)
        t_end = runtime_quadrature(problem)
        traj = integrate_reduced(problem, t_end)
        ts = np.linspace(0.0, t_end, 400)
        y = traj.y(ts)
        x = traj.x(ts)
        np.testing.assert_allclose(y, -math.sqrt(k / (N - k)) * (x - 1.0), atol=1e-8)

    @pytest.mark.parametrize("kind,g", [(CUBIC, 0.0), (CUBIC, 3.0), (CQ, 5.0), (LOG, 2.0)])
    def test_velocity_law(self, kind, g):
        # (dx/dt)^2 = 4k(1-x)(Nx-k)[1+g(f_a-f_b)]^2 / N^2
        N, k = 100, 1
        problem = SearchProblem(N, k, g, kind)
        t_star = runtime_quadrature(problem)
        traj = integrate_reduced(problem, t_star, tol=1e-12)
        h = 1e-4 * t_star
        for frac in (0.3, 0.5, 0.7):
            t = frac * t_star
            fd = (traj.x(t + h) - traj.x(t - h)) / (2 * h)
            x = float(traj.x(t))
            rhs = 4 * k * (1 - x) * (N * x - k) \
                * (1.0 + g * coupling_gap(problem, x)) ** 2 / N**2
            assert fd**2 == pytest.approx(rhs, rel=1e-5)

    def test_cubic_periodicity(self):
        problem = SearchProblem(100, 1, 3.0, CUBIC)
        t_star = cubic_runtime(problem)
        traj = integrate_reduced(problem, 3.2 * t_star, tol=1e-12)
        ts = np.linspace(0.0, t_star, 64)
        np.testing.assert_allclose(traj.x(ts + 2 * t_star), traj.x(ts), atol=1e-6)

    def test_loglinear_cap_is_flagged(self):
        # g large enough to push x against the cap near the peak
        problem = SearchProblem(100, 1, 5.0, LOG)
        t_end = 1.05 * runtime_quadrature(problem)
        traj = integrate_reduced(problem, t_end, tol=1e-11)
        assert traj.norm_drift() <= 1e-9
        assert np.max(traj.x(np.linspace(0, t_end, 500))) <= 1.0 + 1e-12

    def test_rejects_bad_horizon(self):
        problem = SearchProblem(100, 1, 0.0, CUBIC)
        with pytest.raises(DomainError):
            integrate_reduced(problem, 0.0)
        with pytest.raises(DomainError):
            integrate_reduced(problem, 1.0, tol=0.0)


class TestPeakMeasurement:
    def test_cubic_strong_coupling_peak_at_half_pi(self):
        problem = SearchProblem(1000, 1, 999.0, CUBIC)
        traj = integrate_reduced(problem, 2.0, tol=1e-12)
        report = measure_peak(traj, 0.01)
        assert report.t_star == pytest.approx(math.pi / 2, abs=1e-6)
        assert report.x_max == pytest.approx(1.0, abs=1e-9)

    def test_width_matches_exact_formula(self):
        problem = SearchProblem(1000, 1, 0.0, CUBIC)
        traj = integrate_reduced(problem, 1.2 * cubic_runtime(problem), tol=1e-12)
        report = measure_peak(traj, 0.01)
        assert report.width == pytest.approx(cubic_width_exact(problem, 0.01), rel=1e-6)

    def test_width_matches_leading_order(self):
        # leading order 2N sqrt(eps/(k(N-k))) carries an O(eps^{3/2}) error
        problem = SearchProblem(1000, 1, 0.0, CUBIC)
        traj = integrate_reduced(problem, 1.2 * cubic_runtime(problem), tol=1e-12)
        eps = 0.01
        report = measure_peak(traj, eps)
        leading = general_width_leading(problem, eps)
        assert leading == pytest.approx(2 * 1000 * math.sqrt(eps / 999), rel=1e-12)
        assert abs(report.width - leading) < 2.0 * eps**1.5 * leading

    def test_peak_is_symmetric(self):
        problem = SearchProblem(200, 1, 10.0, CUBIC)
        traj = integrate_reduced(problem, 1.5 * cubic_runtime(problem), tol=1e-12)
        report = measure_peak(traj, 0.05)
        left = report.t_star - report.t_left
        right = report.t_right - report.t_star
        assert left == pytest.approx(right, rel=0.01)

    def test_crossings_bracket_peak(self):
        problem = SearchProblem(100, 2, 4.0, CQ)
        t_star = runtime_quadrature(problem)
        traj = integrate_reduced(problem, 1.4 * t_star, tol=1e-12)
        report = measure_peak(traj, 0.02)
        assert report.t_left < report.t_star < report.t_right
        # crossings sit at the absolute height 1 - epsilon
        assert traj.x(report.t_left) == pytest.approx(0.98, abs=1e-7)
        assert traj.x(report.t_right) == pytest.approx(0.98, abs=1e-7)

    def test_no_peak_when_horizon_too_short(self):
        problem = SearchProblem(100, 1, 0.0, CUBIC)
        traj = integrate_reduced(problem, 0.3 * cubic_runtime(problem))
        with pytest.raises(NoPeakError):
            measure_peak(traj, 0.01)

    def test_no_peak_when_threshold_unreachable(self):
        # with g = 0 the peak reaches exactly 1, so ask above it via epsilon range
        problem = SearchProblem(100, 1, 0.0, CUBIC)
        traj = integrate_reduced(problem, 1.2 * cubic_runtime(problem))
        with pytest.raises(DomainError):
            measure_peak(traj, 0.0)
        with pytest.raises(DomainError):
            measure_peak(traj, 0.995)  # >= 1 - k/N


class TestFullSpace:
    def test_initial_equal_superposition(self):
        problem = SearchProblem(16, 2, 0.0, CUBIC)
        states = integrate_full(problem, 0.5)
        t0, s0 = states[0]
        assert t0 == 0.0
        np.testing.assert_allclose(s0.amplitudes, np.full(16, 0.25), atol=1e-14)

    def test_linear_limit_marked_probability(self):
        problem = SearchProblem(16, 2, 0.0, CUBIC)
        t_hit = (math.pi / 2) * math.sqrt(16 / 2)
        states = integrate_full(problem, t_hit, t_eval=[t_hit])
        _, final = states[-1]
        assert final.marked_probability() == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("kind,g", [(CUBIC, 3.0), (CQ, 3.0), (LOG, 1.0)])
    def test_matches_reduced_dynamics(self, kind, g):
        problem = SearchProblem(16, 2, g, kind)
        t_star = runtime_quadrature(problem)
        t_end = (0.95 if kind is LOG else 1.2) * t_star
        traj = integrate_reduced(problem, t_end, tol=1e-12)
        ts = np.linspace(0.0, t_end, 60)
        states = integrate_full(problem, t_end, tol=1e-12, t_eval=ts)
        full_x = np.array([s.marked_probability() for _, s in states])
        np.testing.assert_allclose(full_x, traj.x(ts), atol=1e-8)

    def test_subspace_spread_stays_small(self):
        problem = SearchProblem(32, 4, 2.0, CQ)
        t_end = runtime_quadrature(problem)
        states = integrate_full(problem, t_end, tol=1e-12,
                                t_eval=np.linspace(0, t_end, 40))
        assert max(s.subspace_spread() for _, s in states) <= 1e-9

    def test_rejects_large_n(self):
        with pytest.raises(DomainError):
            integrate_full(SearchProblem(65, 1, 0.0, CUBIC), 1.0)
