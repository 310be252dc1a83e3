"""Line fits, residuals, slope gates, and the slope decomposition identity."""

from __future__ import annotations

import pytest

from covadj import (DegenerateDesign, InsufficientData, RngStream,
                    UnsupportedDesign, covariate_adjusted_residuals,
                    fit_grouped, fit_line, generate_sample, get_case,
                    slope_decomposition, treatment_specific_residuals)
from covadj import test_slopes_equal as gate_slopes_equal
from covadj import test_slopes_zero as gate_slopes_zero
from covadj.rng import replicate_stream, case_hash

from conftest import make_dataset, random_dataset


class TestFitLine:
    def test_exact_line(self):
        fit = fit_line([(0, 1), (1, 3), (2, 5)])
        assert fit.slope == pytest.approx(2.0, abs=1e-12)
        assert fit.intercept == pytest.approx(1.0, abs=1e-12)
        assert fit.residual_variance == pytest.approx(0.0, abs=1e-12)
        assert fit.error_df == 1

    def test_hand_solved_normal_equations(self):
        # Sxy = 1, Sxx = 2 -> slope 1/2, intercept 2/3 - 1/2 = 1/6
        fit = fit_line([(0, 0), (1, 1), (2, 1)])
        assert fit.slope == pytest.approx(0.5, rel=1e-12)
        assert fit.intercept == pytest.approx(1 / 6, rel=1e-12)

    def test_shift_equivariance(self):
        pts = [(0.3, 1.1), (1.7, 0.2), (2.2, 3.3), (4.0, 2.8)]
        base = fit_line(pts)
        shifted = fit_line([(x, y + 11.5) for x, y in pts])
        assert shifted.slope == pytest.approx(base.slope, rel=1e-12)
        assert shifted.intercept == pytest.approx(base.intercept + 11.5, rel=1e-12)

    def test_errors(self):
        with pytest.raises(InsufficientData):
            fit_line([(0, 1), (1, 2)])
        with pytest.raises(DegenerateDesign):
            fit_line([(2, 1), (2, 2), (2, 3)])

    def test_residual_orthogonality(self):
        rng = RngStream(6, 0)
        pts = [(rng.uniform(0, 10), rng.normal()) for _ in range(25)]
        fit = fit_line(pts)
        scale = sum(abs(y) for _x, y in pts)
        r = [y - fit.predict(x) for x, y in pts]
        assert sum(r) == pytest.approx(0.0, abs=1e-9 * max(scale, 1.0))
        assert sum(x * ri for (x, _y), ri in zip(pts, r)) == pytest.approx(
            0.0, abs=1e-9 * 10 * max(scale, 1.0))


class TestFitGrouped:
    def test_parallel_exact_lines(self):
        ds = make_dataset([(1, x, 1 + 2 * x) for x in (0, 1, 2, 5)]
                          + [(2, x, 1 + 2 * x) for x in (0.5, 3, 4)])
        overall, fits = fit_grouped(ds)
        assert overall.slope == pytest.approx(2.0, abs=1e-12)
        assert all(f.slope == pytest.approx(2.0, abs=1e-12) for f in fits)

    def test_clustered_covariates_inflate_overall_slope(self):
        # parallel unit-slope lines, far-apart covariate clusters with a
        # between-group trend: the single overall line is steeper than 1
        ds = make_dataset([(1, x, x) for x in (0, 1, 2)]
                          + [(2, x, x + 10) for x in (10, 11, 12)])
        overall, fits = fit_grouped(ds)
        assert fits[0].slope == pytest.approx(1.0, abs=1e-12)
        assert fits[1].slope == pytest.approx(1.0, abs=1e-12)
        assert overall.slope > 1.5

    def test_error_names_offending_treatment(self):
        ds = make_dataset([(1, 0, 0), (1, 1, 1), (1, 2, 2),
                           (2, 4, 0), (2, 4, 1), (2, 4, 2)])
        with pytest.raises(DegenerateDesign, match="treatment 2"):
            fit_grouped(ds)


class TestResiduals:
    def test_direct_substitution(self):
        ds = make_dataset([(1, 3, 8), (1, 0, 1), (1, 1, 3), (2, 2, 5)])
        line = fit_line([(0, 1), (1, 3), (2, 5)])  # y = 1 + 2x
        rs = covariate_adjusted_residuals(ds, line)
        assert rs.rows[0][2] == pytest.approx(1.0, abs=1e-12)
        assert rs.source == "overall"

    def test_all_on_line_gives_zero(self):
        ds = make_dataset([(1, x, 1 + 2 * x) for x in (0, 1, 2)]
                          + [(2, x, 1 + 2 * x) for x in (3, 4, 5)])
        overall, _ = fit_grouped(ds)
        rs = covariate_adjusted_residuals(ds, overall)
        assert all(abs(r) < 1e-10 for r in rs.values())

    def test_overall_residuals_sum_to_zero(self):
        for stream in range(5):
            ds = random_dataset(stream)
            overall, _ = fit_grouped(ds)
            rs = covariate_adjusted_residuals(ds, overall)
            scale = sum(abs(y) for _t, _x, y in ds.rows)
            assert sum(rs.values()) == pytest.approx(0.0, abs=1e-9 * scale)

    def test_treatment_specific_residuals_zero_per_group(self):
        ds = random_dataset(17)
        _, fits = fit_grouped(ds)
        rs = treatment_specific_residuals(ds, fits)
        for _tid, vals in rs.by_treatment().items():
            assert sum(vals) == pytest.approx(0.0, abs=1e-9 * len(vals) * 10)


class TestSlopesZero:
    def test_flat_responses_give_zero_statistic(self):
        ds = make_dataset([(1, x, 5.0) for x in (0, 1, 2, 3)]
                          + [(2, x, 5.0) for x in (0, 1, 2, 3)])
        out = gate_slopes_zero(ds, 0.05)
        assert out.statistic == 0.0
        assert out.p_value == 1.0
        assert not out.reject

    def test_strong_slope_rejects(self):
        rng = RngStream(10, 0)
        rows = []
        for tid in (1, 2):
            for _ in range(10):
                x = rng.uniform(0, 10)
                rows.append((tid, x, 5 * x + 1e-3 * rng.normal()))
        out = gate_slopes_zero(make_dataset(rows), 0.05)
        assert out.reject

    def test_matches_brute_force_reduction(self):
        # 6-point dataset, SSEs summed directly from the definitions
        ds = make_dataset([(1, 0, 1.0), (1, 1, 2.2), (1, 2, 2.9),
                           (2, 0, 0.5), (2, 1, 2.6), (2, 2, 4.4)])
        out = gate_slopes_zero(ds, 0.05)
        sse_full = 0.0
        sse_red = 0.0
        for tid in (1, 2):
            pts = [(x, y) for t, x, y in ds.rows if t == tid]
            fit = fit_line(pts)
            sse_full += sum((y - fit.predict(x)) ** 2 for x, y in pts)
            ybar = sum(y for _x, y in pts) / len(pts)
            sse_red += sum((y - ybar) ** 2 for _x, y in pts)
        f = ((sse_red - sse_full) / 2) / (sse_full / (6 - 4))
        assert out.statistic == pytest.approx(f, rel=1e-10)
        assert (out.df_num, out.df_den) == (2, 2)


class TestSlopesEqual:
    def test_identical_treatments_give_zero(self):
        pts = [(0, 0.3), (1, 2.4), (2, 3.1), (3, 7.0)]
        ds = make_dataset([(1, x, y) for x, y in pts]
                          + [(2, x, y) for x, y in pts])
        out = gate_slopes_equal(ds, 0.05)
        # the two SSE routes round differently at ~1e-14; zero up to that
        assert out.statistic == pytest.approx(0.0, abs=1e-9)

    def test_very_different_slopes_reject_hard(self):
        rng = RngStream(11, 0)
        rows = []
        for tid, slope in ((1, 2.0), (2, 5.0)):
            for _ in range(20):
                x = rng.uniform(0, 10)
                rows.append((tid, x, 1 + slope * x + 0.1 * rng.normal()))
        out = gate_slopes_equal(make_dataset(rows), 0.05)
        assert out.reject
        assert out.p_value < 1e-6

    def test_null_rejection_rate_near_alpha(self):
        # parallel-lines truth: the gate should fire at about its level
        case = get_case("1a")
        chash = case_hash("gate-null")
        rejections = 0
        n = 10000
        for k in range(n):
            ds = generate_sample(case, 0, RngStream(606, replicate_stream(chash, 0, k)))
            if gate_slopes_equal(ds, 0.05).reject:
                rejections += 1
        assert rejections / n == pytest.approx(0.05, abs=0.007)


class TestSlopeDecomposition:
    def test_identity_on_1000_random_datasets(self):
        for stream in range(1000):
            ds = random_dataset(stream, n_per=6,
                                slopes=[1.5, 2.5], intercepts=[0.0, 3.0])
            dec = slope_decomposition(ds)
            for beta_i, int_term, res_term in dec.per_treatment:
                total = beta_i + int_term + res_term
                assert total == pytest.approx(dec.beta_star, rel=1e-9, abs=1e-9)

    def test_equal_covariate_means_kill_intercept_term(self):
        xs = [0.0, 1.0, 2.0, 3.0]
        ds = make_dataset([(1, x, 1 + 2 * x + d) for x, d in zip(xs, (0.1, -0.2, 0.3, -0.2))]
                          + [(2, x, 1 + 2 * x + d) for x, d in zip(xs, (-0.1, 0.0, 0.2, -0.1))])
        dec = slope_decomposition(ds)
        for _beta_i, int_term, _res in dec.per_treatment:
            assert int_term == pytest.approx(0.0, abs=1e-12)

    def test_clustered_covariates_with_offset_intercepts(self):
        rng = RngStream(12, 0)
        rows = [(1, rng.uniform(0, 6), None) for _ in range(12)]
        rows += [(2, rng.uniform(4, 10), None) for _ in range(12)]
        rows = [(t, x, (1.0 if t == 1 else 4.0) + 2 * x + 0.3 * rng.normal())
                for t, x, _ in rows]
        dec = slope_decomposition(make_dataset(rows))
        assert abs(dec.per_treatment[0][1]) > 0.01

    def test_three_treatments_unsupported(self):
        ds = random_dataset(3, t=3)
        with pytest.raises(UnsupportedDesign):
            slope_decomposition(ds)

    def test_identical_design_makes_overall_equal_each(self):
        xs = (0.5, 1.5, 2.5, 4.0)
        noise = (0.2, -0.1, 0.05, -0.15)
        rows = [(t, x, 1 + 2 * x + e) for t in (1, 2)
                for x, e in zip(xs, noise)]
        dec = slope_decomposition(make_dataset(rows))
        for beta_i, _it, _rt in dec.per_treatment:
            assert beta_i == pytest.approx(dec.beta_star, abs=1e-9)
