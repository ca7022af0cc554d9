from fractions import Fraction

import pytest

from nlsearch import (
    DomainError,
    Growth,
    ScalingQuery,
    cq_scaling,
    cubic_scaling,
    fit_power_law,
    log_scaling,
)
from nlsearch.scaling import measured_cubic_fit, measured_loglinear_fit

HALF = Fraction(1, 2)


class TestGrowth:
    def test_formatting(self):
        assert str(Growth(Fraction(0))) == "1"
        assert str(Growth(HALF)) == "N^1/2"
        assert str(Growth(Fraction(1), -1)) == "N/log N"
        assert str(Growth(Fraction(1, 4), 1, "R")) == "R^1/4 log N"
        assert str(Growth(Fraction(0), 1)) == "log N"

    def test_multiplication(self):
        a = Growth(Fraction(1, 4)) * Growth(HALF, 1)
        assert a.exponent == Fraction(3, 4) and a.log_power == 1
        # a pure log factor adopts the other side's base
        b = Growth(Fraction(1, 4), 0, "R") * Growth(Fraction(0), 1)
        assert str(b) == "R^1/4 log N"


class TestScalingQuery:
    def test_accepts_exact_fractions_and_strings(self):
        q = ScalingQuery(kappa="1/2", lam="3/4")
        assert q.kappa == HALF and q.lam == Fraction(3, 4)

    def test_rejects_lambda_outside_range(self):
        with pytest.raises(DomainError):
            ScalingQuery(kappa=0, lam=2)


class TestCubicScaling:
    def test_constant_runtime_point(self):
        r = cubic_scaling(ScalingQuery(kappa=1, lam=0))
        assert r.t_exp == 0
        assert r.asdict()["n0"] == "Omega(N/log N)"
        assert r.log_factors["n0"] == -1

    def test_st_minimum_point(self):
        r = cubic_scaling(ScalingQuery(kappa=HALF, lam=0))
        assert r.st_exp == Fraction(1, 4)
        assert r.log_factors["st"] == 1
        assert r.asdict()["st"] == "N^1/4 log N"

    def test_linear_limit_point(self):
        r = cubic_scaling(ScalingQuery(kappa=0, lam=0))
        assert r.t_exp == HALF and r.dt_exp == HALF

    @pytest.mark.parametrize("lam", [0, Fraction(1, 3), HALF, 1])
    def test_branch_continuity_at_kappa_equals_lambda(self, lam):
        r = cubic_scaling(ScalingQuery(kappa=lam, lam=lam))
        assert r.t_exp == HALF - lam / 2          # both max() branches agree
        assert r.dt_exp == HALF - lam / 2         # both dt branches agree

    @pytest.mark.parametrize("lam", [0, HALF, Fraction(3, 4)])
    def test_space_goes_logarithmic_on_the_st_boundary(self, lam):
        # kappa = lambda/2 + 1/2 makes dt constant, so S collapses to log N
        r = cubic_scaling(ScalingQuery(kappa=lam / 2 + HALF, lam=lam))
        assert r.dt_exp == 0
        assert r.s_exp == 0 and r.log_factors["s"] == 1

    def test_exponents_are_exact_rationals(self):
        r = cubic_scaling(ScalingQuery(kappa=Fraction(1, 3), lam=Fraction(1, 7)))
        assert isinstance(r.t_exp, Fraction)
        assert r.t_exp == HALF - Fraction(1, 6)


class TestCubicQuinticScaling:
    def test_joint_optimum_point(self):
        r = cq_scaling(ScalingQuery(kappa=1, lam=0))
        assert r.t_exp == 0 and r.dt_exp == HALF
        assert any("O(1)" in n for n in r.notes)

    def test_large_lambda_branch(self):
        r = cq_scaling(ScalingQuery(kappa=HALF, lam=Fraction(3, 4)))
        assert r.t_exp == Fraction(1, 8)
        assert "lambda" in r.branch

    @pytest.mark.parametrize("v", [0, HALF, 1])
    def test_branch_continuity(self, v):
        r = cq_scaling(ScalingQuery(kappa=v, lam=v))
        assert r.t_exp == HALF - Fraction(v) / 2

    def test_nonzero_lambda_uses_cubic_width_table(self):
        r = cq_scaling(ScalingQuery(kappa=0, lam=HALF))
        assert r.dt_exp == cubic_scaling(ScalingQuery(kappa=0, lam=HALF)).dt_exp


class TestLoglinearScaling:
    def test_sigma_half(self):
        d = log_scaling(HALF).asdict()
        assert d["t_interval"] == ["1", "R^1/4"]
        assert d["st_interval"] == ["log N", "R^1/4 log N"]
        assert d["n0"] == "Omega(N log N)"

    def test_sigma_zero_recovers_linear(self):
        d = log_scaling(0).asdict()
        assert d["t_interval"] == ["R^1/2", "R^1/2"]

    def test_large_sigma_bound(self):
        d = log_scaling(Fraction(3, 4)).asdict()
        assert d["n0"] == "Omega(N R^1/2/log N)"

    def test_small_sigma_leaves_n0_unconstrained(self):
        assert log_scaling(Fraction(1, 4)).asdict()["n0"] is None


class TestPowerLawFit:
    def test_exact_power_law(self):
        points = [(n, 2.0 * n ** 0.5) for n in (10, 100, 1000, 10000)]
        fit = fit_power_law(points)
        assert fit.coefficient == pytest.approx(2.0, rel=1e-12)
        assert fit.exponent == pytest.approx(0.5, rel=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_two_points_fit_exactly(self):
        fit = fit_power_law([(100, 3.0), (400, 6.0)])
        assert fit.exponent == pytest.approx(0.5, rel=1e-12)
        assert fit.r_squared == 1.0

    def test_degenerate_inputs(self):
        with pytest.raises(DomainError):
            fit_power_law([(100, 1.0)])
        with pytest.raises(DomainError):
            fit_power_law([(100, 1.0), (100, 2.0)])
        with pytest.raises(DomainError):
            fit_power_law([(100, 1.0), (200, -2.0)])


class TestMeasuredScaling:
    @pytest.mark.parametrize("kappa,lam,expected", [
        (0, 0, HALF), (1, 0, Fraction(0)), (HALF, HALF, Fraction(1, 4)),
    ])
    def test_cubic_sweeps_match_symbolic_exponent(self, kappa, lam, expected):
        fit = measured_cubic_fit(kappa, lam)
        symbolic = cubic_scaling(ScalingQuery(kappa=kappa, lam=lam)).t_exp
        assert symbolic == expected
        assert fit.exponent == pytest.approx(float(expected), abs=0.03)

    @pytest.mark.parametrize("sigma", [Fraction(1, 4), HALF])
    def test_loglinear_sweeps_land_in_predicted_interval(self, sigma):
        fit = measured_loglinear_fit(sigma)
        lo, hi = float(HALF - sigma), float(HALF - sigma / 2)
        assert lo - 0.02 <= fit.exponent <= hi + 0.02
