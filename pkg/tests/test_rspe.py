"""Tests for ptspectra.rspe — perturbation series and radius estimates."""

import math

import numpy as np
import pytest

from ptspectra.errors import DegenerateLevelError, InvalidInputError, SeriesError
from ptspectra.hamiltonians import ModelH2
from ptspectra.linalg import eigenvalues
from ptspectra.models import RspeSeries
from ptspectra.rspe import (
    h2_perturbation,
    partial_sum,
    radius_estimate,
    rspe_matrix,
    series_lambda_pm,
    series_quantum_level_r1s1,
    two_level_perturbation,
)


class TestRspeMatrix:

    def test_gain_low_orders(self):
        h0, w = two_level_perturbation(0.0, 2.0)
        s = rspe_matrix(h0, w, 0, 4)
        assert np.allclose(s.coefficients, [0, 0, 0.5, 0, 0.125], rtol=0, atol=1e-15)

    def test_gain_matches_binomial_series(self):
        from scipy.special import binom

        h0, w = two_level_perturbation(0.0, 2.0)
        c = rspe_matrix(h0, w, 0, 20).coefficients
        j = np.arange(1, 11)
        assert np.allclose(c[2::2], -binom(0.5, j) * (-1.0) ** j, rtol=1e-10, atol=0)

    def test_odd_orders_vanish(self):
        h0, w = two_level_perturbation(0.0, 2.0)
        s = rspe_matrix(h0, w, 1, 21)
        assert np.all(s.coefficients[1::2] == 0)

    def test_gain_radius_is_threshold(self):
        h0, w = two_level_perturbation(0.0, 2.0)
        s = rspe_matrix(h0, w, 0, 40)
        assert s.radius_estimate == pytest.approx(1.0, rel=0.05)

    def test_low_order_has_no_radius(self):
        h0, w = two_level_perturbation(0.0, 2.0)
        assert rspe_matrix(h0, w, 0, 4).radius_estimate is None

    def test_partial_sum_tracks_eigenvalue(self):
        h0, w = two_level_perturbation(0.0, 2.0)
        s = rspe_matrix(h0, w, 0, 16)
        exact = 1.0 - math.sqrt(1.0 - 0.25)
        assert partial_sum(s, 0.5) == pytest.approx(exact, abs=1e-6)

    def test_degenerate_level(self):
        w = np.ones((3, 3))
        with pytest.raises(DegenerateLevelError):
            rspe_matrix([1.0, 1.0, 3.0], w, 0, 4)

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            rspe_matrix([1.0, 2.0], np.eye(3), 0, 4)

    def test_level_out_of_range(self):
        h0, w = two_level_perturbation(0.0, 2.0)
        with pytest.raises(InvalidInputError):
            rspe_matrix(h0, w, 2, 4)

    def test_bad_order(self):
        h0, w = two_level_perturbation(0.0, 2.0)
        with pytest.raises(InvalidInputError):
            rspe_matrix(h0, w, 0, 0)

    def test_name_becomes_level(self):
        h0, w = two_level_perturbation(0.0, 2.0)
        assert rspe_matrix(h0, w, 0, 4, name="ground").level == "ground"


class TestH2Series:

    def test_ground_level_matches_closed_form(self):
        h0, w = h2_perturbation(ModelH2(1.0, 2.0), 16, 16)
        matrix = rspe_matrix(h0, w, 0, 8)
        closed = series_quantum_level_r1s1(1.0, 2.0, 0, 0, 8)
        assert matrix.coefficients[0] == pytest.approx(3.0)
        assert matrix.coefficients[2].real == pytest.approx(1.0 / 48.0, abs=1e-12)
        assert np.allclose(matrix.coefficients, closed.coefficients, rtol=0, atol=1e-9)

    def test_second_order_against_finite_differences(self):
        m = ModelH2(1.0, math.sqrt(3.0))
        h0, w = h2_perturbation(m, 8, 8)
        c2 = rspe_matrix(h0, w, 0, 2).coefficients[2]
        h = 1e-2
        e = [
            eigenvalues(np.diag(h0) + eps * w).eigenvalues[0]
            for eps in (-h, 0.0, h)
        ]
        fd = 0.5 * (e[0] - 2 * e[1] + e[2]) / h ** 2
        assert abs(c2 - fd) < 1e-4 * abs(c2)


class TestClosedFormSeries:

    def test_lambda_plus_coefficients(self):
        plus, minus = series_lambda_pm(1.0, 2.0, 4)
        assert np.allclose(plus.coefficients, [8, 0, -1 / 6, 0, -1 / 216], rtol=0, atol=1e-15)
        assert plus.level == "lambda+"
        assert minus.level == "lambda-"

    def test_trace_identity(self):
        plus, minus = series_lambda_pm(1.0, 2.0, 20)
        total = plus.coefficients + minus.coefficients
        assert total[0] == pytest.approx(10.0)
        assert np.all(total[1:] == 0)

    def test_lambda_radius_is_detuning(self):
        plus, minus = series_lambda_pm(1.0, 2.0, 40)
        assert plus.radius_estimate == pytest.approx(3.0, rel=0.05)
        assert minus.radius_estimate == pytest.approx(3.0, rel=0.05)

    def test_small_detuning_radius_below_one(self):
        plus, _ = series_lambda_pm(1.0, math.sqrt(1.5), 40)
        assert plus.radius_estimate == pytest.approx(0.5, rel=0.05)

    def test_equal_frequencies(self):
        with pytest.raises(SeriesError):
            series_lambda_pm(1.0, 1.0, 10)

    def test_quantum_level_radius_is_detuning(self):
        s = series_quantum_level_r1s1(1.0, 2.0, 1, 0, 40)
        assert s.radius_estimate == pytest.approx(3.0, rel=0.05)
        assert s.level == "1,0"

    def test_equal_quanta_radius_is_twice_frequency_product(self):
        # the detuning branch cancels between the two modes
        s = series_quantum_level_r1s1(1.0, 2.0, 0, 0, 40)
        assert s.radius_estimate == pytest.approx(4.0, rel=0.05)

    def test_quantum_level_partial_sum(self):
        from ptspectra.closed_forms import OscillatorPair, quantum_levels_r1s1

        s = series_quantum_level_r1s1(1.0, 2.0, 1, 0, 24)
        exact = quantum_levels_r1s1(OscillatorPair(1.0, 2.0, 1.0), 1, 0)
        assert partial_sum(s, 1.0) == pytest.approx(exact, abs=1e-6)

    def test_negative_quantum_number(self):
        with pytest.raises(InvalidInputError):
            series_quantum_level_r1s1(1.0, 2.0, -1, 0, 8)


class TestRadiusEstimate:

    def test_geometric_series(self):
        c = np.zeros(41)
        c[0::2] = 0.25 ** np.arange(21)
        assert radius_estimate(RspeSeries("geo", c)) == pytest.approx(2.0, rel=0.01)

    def test_too_few_coefficients(self):
        with pytest.raises(SeriesError):
            radius_estimate(RspeSeries("short", np.array([1.0, 0.0, 1.0, 0.0])))

    def test_partial_sum_order(self):
        s = RspeSeries("x", np.array([1.0, 2.0, 3.0]))
        assert partial_sum(s, 0.5, K=1) == pytest.approx(2.0)
        assert partial_sum(s, 0.5) == pytest.approx(2.75)

    def test_partial_sum_negative_order(self):
        with pytest.raises(InvalidInputError):
            partial_sum(RspeSeries("x", np.array([1.0])), 0.5, K=-1)

    def test_as_dict_real_coefficients(self):
        s = RspeSeries("x", np.array([1.0, 0.0, 0.5], dtype=complex), radius_estimate=math.inf)
        d = s.as_dict()
        assert d["coefficients"] == [1.0, 0.0, 0.5]
        assert d["radius_estimate"] == "inf"
        assert d["order"] == 2
