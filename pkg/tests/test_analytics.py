import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import MATRIX_ONEMAX4, random_exact_kernel, random_problem_data
from elitist_chain import (
    UndefinedRateError,
    avg_rate_at,
    bitwise_level_chain,
    bound_violations,
    closed_form_report,
    coefficients,
    compute_power_factors,
    error_at,
    exact_error_via_matrix,
    fitness_at,
    from_explicit,
    onebit_level_chain,
    series,
)
from elitist_chain.analytics import format_scalar, iter_errors
from oracles import bitstring_error_series

F = Fraction


def model_for(family, n=4, exact=True, **kw):
    return coefficients(onebit_level_chain(family, n, exact=exact, **kw))


class TestCoefficients:
    def test_onemax(self):
        assert model_for("onemax").coefficients.tolist() == [F(3, 4), 0, 0, 0]

    def test_square(self):
        assert model_for("square").coefficients.tolist() == [F(21, 16), F(-3, 8), 0, 0]

    def test_log(self):
        # closed form from the factor tensors: c = e . p . q0 / ln 5
        ln = math.log
        e = [ln(5 / 4), ln(5 / 3), ln(5 / 2), ln(5)]
        p4 = [[3, -6, 3, 0], [0, 3, -3, 0], [0, 0, 1, 0], [0, 0, 0, 0]]
        expected = [sum(e[i] * p4[i][k] for i in range(4)) / ln(5) for k in range(4)]
        got = model_for("log", exact=False).coefficients
        np.testing.assert_allclose(got, expected, atol=1e-14)
        np.testing.assert_allclose(got, [0.416, 0.120, 0.033, 0], atol=5e-4)

    def test_factors_must_match_kernel(self, kernel4f):
        prob = onebit_level_chain("onemax", 3)
        with pytest.raises(ValueError, match="different kernel"):
            coefficients(prob, compute_power_factors(kernel4f))

    def test_coefficient_sum_is_first_error(self):
        model = model_for("square")
        assert sum(model.coefficients) == error_at(model, 1)


class TestTrajectory:
    def test_onemax_examples(self):
        m = model_for("onemax")
        assert error_at(m, 0) == 1
        assert error_at(m, 1) == F(3, 4)
        assert error_at(m, 2) == F(9, 16)
        assert fitness_at(m, 3) == 4 * (1 - F(27, 64))
        assert avg_rate_at(m, 10) == pytest.approx(0.25, abs=1e-12)

    def test_square_examples(self):
        m = model_for("square")
        assert error_at(m, 1) == F(15, 16)
        assert fitness_at(m, 2) == F(13, 4)

    def test_rate_needs_t_at_least_one(self):
        with pytest.raises(ValueError):
            avg_rate_at(model_for("onemax"), 0)
        with pytest.raises(ValueError):
            error_at(model_for("onemax"), -1)

    def test_start_at_optimum(self):
        prob = from_explicit(MATRIX_ONEMAX4, [1, 2, 3, 4], 4, q0=[0, 0, 0, 0])
        m = coefficients(prob)
        assert m.e0 == 0 and error_at(m, 5) == 0
        with pytest.raises(UndefinedRateError):
            avg_rate_at(m, 1)
        traj = series(m, 5)
        assert np.all(np.isnan(traj.rate))
        assert "undefined" in closed_form_report(m)

    def test_series_matches_pointwise(self):
        m = model_for("square")
        traj = series(m, 35)
        assert traj.t.tolist() == list(range(36))
        assert math.isnan(traj.rate[0])
        for t in range(36):
            assert traj.error[t] == error_at(m, t)
            assert traj.fitness[t] == fitness_at(m, t)
        for t in range(1, 36):
            assert traj.rate[t] == pytest.approx(avg_rate_at(m, t), abs=1e-15)

    def test_iter_errors(self):
        m = model_for("log", exact=False)
        gen = iter_errors(m)
        for t in range(1, 30):
            assert next(gen) == pytest.approx(error_at(m, t), rel=1e-13, abs=1e-15)

    @pytest.mark.parametrize("n", [2, 4, 7, 16])
    def test_onemax_rate_is_one_over_n(self, n):
        m = model_for("onemax", n=n, exact=False)
        traj = series(m, 40)
        np.testing.assert_allclose(traj.rate[1:], 1 / n, atol=1e-12)

    def test_rate_in_unit_interval(self):
        m = model_for("log", n=6, exact=False)
        r = series(m, 60).rate[1:]
        assert np.all((r >= 0) & (r <= 1))

    def test_error_decays_with_leading_eigenvalue(self):
        # consecutive error ratios tend to the largest eigenvalue with c_k != 0
        m = model_for("square", exact=False)
        e = series(m, 80).error
        assert e[80] / e[79] == pytest.approx(0.75, rel=1e-9)


class TestOracles:
    @pytest.mark.parametrize("family", ["onemax", "square", "log"])
    def test_matrix_iteration(self, family):
        exact = family != "log"
        prob = onebit_level_chain(family, 4, exact=exact)
        m = coefficients(prob)
        for t in range(0, 36):
            if exact:
                assert error_at(m, t) == exact_error_via_matrix(prob, t)
            else:
                assert error_at(m, t) == pytest.approx(exact_error_via_matrix(prob, t), abs=1e-12)

    @pytest.mark.parametrize("n,fn,family", [
        (4, lambda x: sum(x), "onemax"),
        (4, lambda x: sum(x) ** 2, "square"),
        (5, lambda x: sum(x) ** 2, "square"),
    ])
    def test_bitstring_distribution_onebit(self, n, fn, family):
        expected = bitstring_error_series(n, fn, 12)
        m = model_for(family, n=n)
        assert [error_at(m, t) for t in range(13)] == expected

    def test_bitstring_distribution_bitwise(self):
        fn = lambda x: sum(x)  # noqa: E731
        expected = bitstring_error_series(4, fn, 8, mutation="bitwise", p_mut=F(1, 4))
        m = coefficients(bitwise_level_chain("onemax", 4, "1/4", exact=True))
        assert [error_at(m, t) for t in range(9)] == expected

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1), st.integers(0, 20))
    def test_random_exact(self, L, seed, t):
        rng = np.random.default_rng(seed)
        K = random_exact_kernel(rng, L)
        prob = from_explicit(K, *random_problem_data(rng, L))
        assert error_at(coefficients(prob), t) == exact_error_via_matrix(prob, t)


class TestBound:
    @pytest.mark.parametrize("family", ["onemax", "square", "log"])
    def test_families(self, family):
        assert bound_violations(onebit_level_chain(family, 4)) == []

    def test_bitwise(self):
        assert bound_violations(bitwise_level_chain("onemax", 6, "1/6", exact=True)) == []

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
    def test_random(self, L, seed):
        rng = np.random.default_rng(seed)
        K = random_exact_kernel(rng, L)
        prob = from_explicit(K, *random_problem_data(rng, L))
        assert bound_violations(prob, horizon=30) == []


class TestReport:
    def test_onemax(self):
        text = closed_form_report(model_for("onemax"))
        assert text.splitlines() == [
            "E_t = 0.750×0.75^(t−1)",
            "F_t = 4×(1 − (0.750×0.75^(t−1)))",
            "R_t = 1 − (0.750×0.75^(t−1))^(1/t)",
        ]

    def test_square_rounds_half_up(self):
        text = closed_form_report(model_for("square"))
        assert text.splitlines()[0] == "E_t = 1.313×0.75^(t−1) − 0.375×0.50^(t−1)"

    def test_log(self):
        first = closed_form_report(model_for("log", exact=False)).splitlines()[0]
        assert first == "E_t = 0.416×0.75^(t−1) + 0.120×0.50^(t−1) + 0.033×0.25^(t−1)"

    def test_cutoff_note(self):
        text = closed_form_report(model_for("log", exact=False), cutoff=0.05)
        assert "0.033" not in text
        assert "1 term(s)" in text

    def test_non_unit_start_error(self):
        prob = onebit_level_chain("onemax", 4, q0=[0, "1/2", 0, 0], exact=True)
        text = closed_form_report(coefficients(prob))
        assert "/0.25)^(1/t)" in text

    def test_format_scalar(self):
        assert format_scalar(-0.375) == "−0.375"
        assert format_scalar(1e-7) == "1e-07"
        assert format_scalar(-2.5e-7) == "−2.5e-07"
        assert format_scalar(0.0) == "0"
