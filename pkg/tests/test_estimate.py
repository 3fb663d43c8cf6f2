"""Estimator: frequencies, per-week inversion, r^2, and the grid fit."""

import datetime as dt
import io
import math

import numpy as np
import pytest

from oscmarkets.errors import DataError, DomainError
from oscmarkets.estimate import (
    EstimationResult,
    GridSpec,
    ThresholdRow,
    as_record,
    fit_m_hat,
    format_report,
    m_week,
    r_squared,
    relative_frequency,
    write_grid_csv,
    write_table_csv,
)
from oscmarkets.ingest import DisplacementEntry, DisplacementSeries
from oscmarkets.model import Displacement, OscillatorParams, prob_at_least
from oscmarkets.specfun import erfc_inv
from oscmarkets.synth import SynthSpec, sample_displacements

# mpmath oracle, 40 dps: 2*(erfc_inv(sqrt(0.25))/0.03)^2
M_WEEK_QUARTER = 505.48491457730306


def series_from_ratios(ratios):
    day = dt.date(2001, 1, 5)
    entries = []
    for r in ratios:
        entries.append(DisplacementEntry(
            week_end=day,
            value=Displacement(x_a=100.0, x_b=100.0 * (1.0 + r), ratio=r),
        ))
        day += dt.timedelta(days=7)
    return DisplacementSeries(asset_id="test", entries=tuple(entries))


def ladder_series(m0, n, t=1.0):
    """Sample whose empirical survival equals the tail law at m0 exactly.

    The k-th magnitude is the (N-k+1)/N survival quantile, so at every
    distinct nonzero threshold rho coincides with pr(m0) up to erfc_inv
    round-trip error; k=1 contributes a zero displacement.
    """
    scale = math.sqrt(2.0 * t / m0)
    ratios = []
    for k in range(1, n + 1):
        u = (n - k + 1) / n
        mag = 0.0 if u == 1.0 else scale * erfc_inv(math.sqrt(u))
        ratios.append(mag if k % 2 else -mag)
    return series_from_ratios(ratios)


class TestRelativeFrequency:
    SAMPLE = series_from_ratios([0.01, -0.02, 0.03])

    def test_zero_threshold(self):
        assert relative_frequency(self.SAMPLE, 0.0) == 1.0

    def test_direct_count(self):
        assert relative_frequency(self.SAMPLE, 0.02) == pytest.approx(2 / 3)

    def test_above_max(self):
        assert relative_frequency(self.SAMPLE, 0.5) == 0.0

    def test_non_increasing(self):
        sample = series_from_ratios([0.01, -0.02, 0.03, 0.0, -0.015, 0.07])
        vals = [relative_frequency(sample, x)
                for x in np.linspace(0.0, 0.1, 40)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_negative_threshold_rejected(self):
        with pytest.raises(DomainError):
            relative_frequency(self.SAMPLE, -0.01)


class TestMWeek:
    def test_certainty_gives_zero(self):
        assert m_week(1.0, 0.05) == 0.0

    def test_round_trip_identity(self):
        rho = prob_at_least(OscillatorParams(m=500.0, t=1.0), 0.02)
        assert m_week(rho, 0.02, 1.0) == pytest.approx(500.0, rel=1e-8)

    def test_hand_value(self):
        assert m_week(0.25, 0.03, 1.0) == pytest.approx(M_WEEK_QUARTER,
                                                        rel=1e-12)

    def test_sign_of_displacement_irrelevant(self):
        assert m_week(0.25, -0.03) == m_week(0.25, 0.03)

    def test_inversion_identity_grid(self):
        for m in (10.0, 100.0, 1000.0):
            for x in (0.01, 0.05, 0.2):
                for t in (1.0, 2.0):
                    rho = prob_at_least(OscillatorParams(m=m, t=t), x)
                    assert abs(m_week(rho, x, t) - m) <= 1e-8 * m

    def test_zero_rho_rejected(self):
        with pytest.raises(DomainError, match="infinite"):
            m_week(0.0, 0.05)

    def test_zero_displacement_rejected(self):
        with pytest.raises(DomainError):
            m_week(0.5, 0.0)

    @pytest.mark.parametrize("rho", [-0.1, 1.1])
    def test_rho_out_of_range(self, rho):
        with pytest.raises(DomainError):
            m_week(rho, 0.05)

    def test_bad_time(self):
        with pytest.raises(DomainError):
            m_week(0.5, 0.05, t=0.0)


class TestRSquared:
    def test_perfect(self):
        assert r_squared([0.1, 0.2, 0.4], [0.1, 0.2, 0.4]) == pytest.approx(1.0)

    def test_affine_invariance(self):
        p = [0.1, 0.25, 0.4, 0.9]
        o = [3.0 * v + 0.7 for v in p]
        assert r_squared(p, o) == pytest.approx(1.0, abs=1e-12)

    def test_hand_pearson_value(self):
        assert r_squared([1, 2, 3], [1, 2, 2]) == pytest.approx(0.75,
                                                                rel=1e-12)

    def test_identity_variant(self):
        # 1 - SS_res/SS_tot = 1 - 1/(2/3) for the same hand example
        got = r_squared([1, 2, 3], [1, 2, 2], method="identity")
        assert got == pytest.approx(-0.5, rel=1e-12)
        assert r_squared([1, 2, 2], [1, 2, 2],
                         method="identity") == pytest.approx(1.0)

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            r_squared([1, 2, 3], [1, 2])

    def test_too_short(self):
        with pytest.raises(DataError):
            r_squared([1, 2], [1, 2])

    def test_constant_observed(self):
        with pytest.raises(DataError, match="identical"):
            r_squared([1, 2, 3], [5, 5, 5])

    def test_constant_predicted(self):
        with pytest.raises(DataError, match="identical"):
            r_squared([5, 5, 5], [1, 2, 3])

    def test_unknown_method(self):
        with pytest.raises(DataError, match="method"):
            r_squared([1, 2, 3], [1, 2, 2], method="spearman")


class TestGridSpec:
    def test_defaults(self):
        g = GridSpec()
        assert g.lo is None and g.hi is None and g.n == 2000

    @pytest.mark.parametrize("lo, hi, n", [(10.0, None, 100),
                                           (None, 10.0, 100),
                                           (10.0, 5.0, 100),
                                           (0.0, 5.0, 100),
                                           (1.0, 2.0, 1)])
    def test_invalid(self, lo, hi, n):
        with pytest.raises(DataError):
            GridSpec(lo=lo, hi=hi, n=n)


class TestFitMHat:
    def test_constructed_fixed_point(self):
        m0 = 900.0
        result = fit_m_hat(ladder_series(m0, 100))
        assert result.m_hat == pytest.approx(m0, rel=1e-4)
        assert result.r2 >= 1.0 - 1e-8
        assert result.sample_size == 100
        assert len(result.table) == 99  # the zero week carries no threshold

    def test_closed_loop_synthetic(self):
        sample = sample_displacements(SynthSpec(m=977.73, n=100, seed=42))
        result = fit_m_hat(sample)
        assert result.m_hat == pytest.approx(977.73, rel=0.25)
        assert result.r2 >= 0.98

    def test_table_matches_relative_frequency(self):
        sample = sample_displacements(SynthSpec(m=500.0, n=60, seed=7))
        result = fit_m_hat(sample)
        for row in result.table:
            assert row.rho == relative_frequency(sample, row.x)
            assert row.pr == pytest.approx(
                prob_at_least(OscillatorParams(m=result.m_hat), row.x),
                rel=1e-12)

    def test_table_sorted_and_r2_is_trace_max(self):
        result = fit_m_hat(sample_displacements(SynthSpec(m=800.0, n=50,
                                                          seed=3)))
        xs = [r.x for r in result.table]
        assert xs == sorted(xs)
        assert result.r2 == max(r for _, r in result.grid)

    def test_zero_displacements_kept_in_counts(self):
        ratios = [0.0, 0.0, 0.01, -0.02, 0.03, 0.04, -0.05, 0.06, 0.07, 0.08]
        result = fit_m_hat(series_from_ratios(ratios))
        assert result.table[0].x > 0.0
        assert result.table[0].rho == pytest.approx(0.8)

    def test_determinism_byte_for_byte(self):
        sample = sample_displacements(SynthSpec(m=977.73, n=80, seed=11))

        def render(res):
            g, t = io.StringIO(), io.StringIO()
            write_grid_csv(res, g)
            write_table_csv(res, t)
            return repr(res.m_hat), repr(res.r2), g.getvalue(), t.getvalue()

        assert render(fit_m_hat(sample)) == render(fit_m_hat(sample))

    def test_explicit_bounds_honored(self):
        sample = sample_displacements(SynthSpec(m=977.73, n=100, seed=42))
        result = fit_m_hat(sample, grid_spec=GridSpec(lo=100.0, hi=5000.0,
                                                      n=500))
        ms = [m for m, _ in result.grid]
        assert min(ms) >= 100.0 * (1.0 - 1e-12)
        assert max(ms) <= 5000.0 * (1.0 + 1e-12)
        assert result.m_hat == pytest.approx(977.73, rel=0.25)

    def test_refinement_points_in_trace(self):
        result = fit_m_hat(sample_displacements(SynthSpec(m=500.0, n=50,
                                                          seed=1)),
                           grid_spec=GridSpec(n=200))
        assert len(result.grid) > 200

    def test_too_few_weeks(self):
        with pytest.raises(DataError, match="at least 10"):
            fit_m_hat(series_from_ratios([0.01, -0.02, 0.03]))

    def test_degenerate_sample(self):
        with pytest.raises(DataError, match="degenerate"):
            fit_m_hat(series_from_ratios([0.01] * 12))
        with pytest.raises(DataError, match="degenerate"):
            fit_m_hat(series_from_ratios([0.0] * 12))

    def test_bad_time(self):
        with pytest.raises(DomainError):
            fit_m_hat(ladder_series(900.0, 20), t=-1.0)

    def test_identity_method_runs(self):
        sample = ladder_series(700.0, 60)
        res = fit_m_hat(sample, method="identity")
        assert res.m_hat == pytest.approx(700.0, rel=1e-3)

    def test_unknown_method(self):
        with pytest.raises(DataError, match="method"):
            fit_m_hat(ladder_series(700.0, 60), method="ols")


class TestResultSurface:
    def test_result_invariant_enforced(self):
        row = ThresholdRow(x=0.01, rho=0.5, pr=0.5)
        with pytest.raises(DomainError, match="best r2"):
            EstimationResult(m_hat=100.0, r2=0.5, table=(row,),
                             grid=((100.0, 0.9),), sample_size=10)

    def test_threshold_row_validation(self):
        with pytest.raises(DomainError):
            ThresholdRow(x=-0.01, rho=0.5, pr=0.5)
        with pytest.raises(DomainError):
            ThresholdRow(x=0.01, rho=1.5, pr=0.5)
        with pytest.raises(DomainError):
            ThresholdRow(x=0.01, rho=0.5, pr=0.0)

    def test_serializations(self):
        result = fit_m_hat(ladder_series(900.0, 30), grid_spec=GridSpec(n=50))
        text = format_report(result)
        assert text.startswith("m_hat: ")
        assert "r2: " in text and "X" in text

        g = io.StringIO()
        write_grid_csv(result, g)
        lines = g.getvalue().splitlines()
        assert lines[0] == "m_candidate,r2"
        assert len(lines) == len(result.grid) + 1

        t = io.StringIO()
        write_table_csv(result, t)
        assert t.getvalue().splitlines()[0] == "X,rho,pr"

        rec = as_record(result)
        assert rec["m_hat"] == result.m_hat
        assert len(rec["table"]) == len(result.table)
        assert rec["grid"][0]["m_candidate"] == result.grid[0][0]
