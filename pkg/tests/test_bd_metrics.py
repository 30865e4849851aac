import math

import numpy as np
import pytest

from ladderforge import bd_metrics, dataset, ladder
from ladderforge.bd_metrics import RqCurve
from ladderforge.errors import (
    DegenerateCurve,
    EmptyInput,
    NonMonotonicAbscissa,
    NoOverlap,
    OutOfRange,
    SchemaError,
)


def trapezoid_integral(xs, ys, lo, hi, n=100_001):
    """Dense-grid oracle for the interpolant's integral."""
    grid = np.linspace(lo, hi, n)
    vals = bd_metrics.pchip_interpolate(xs, ys, grid)
    dx = (hi - lo) / (n - 1)
    return dx * (vals[0] / 2 + vals[1:-1].sum() + vals[-1] / 2)


def monotone_curve(rng, n=8, q0=20.0):
    rates = np.cumsum(rng.uniform(0.3, 1.0, size=n)) + 19.0  # log2 bps
    quals = q0 + np.cumsum(rng.uniform(1.0, 8.0, size=n))
    return RqCurve(tuple(rates), tuple(quals))


def curve_from_bitrates(bitrates, qualities):
    return RqCurve.from_points(zip(bitrates, qualities))


# ---------------------------------------------------------------------------
# interpolation
# ---------------------------------------------------------------------------

def test_knots_reproduced_exactly():
    rng = np.random.default_rng(0)
    xs = np.sort(rng.uniform(0, 10, size=9))
    xs += np.arange(9) * 1e-3  # guard against duplicates
    ys = np.cumsum(rng.uniform(0.5, 2.0, size=9))
    for x, y in zip(xs, ys):
        assert bd_metrics.pchip_interpolate(xs, ys, x) == y


def test_linear_data_reproduced_everywhere():
    xs = np.array([0.0, 0.7, 1.1, 2.9, 4.0])
    ys = 3.25 * xs - 1.5
    grid = np.linspace(0, 4, 777)
    vals = bd_metrics.pchip_interpolate(xs, ys, grid)
    assert np.allclose(vals, 3.25 * grid - 1.5, atol=1e-12)


def test_monotone_data_gives_monotone_interpolant():
    rng = np.random.default_rng(3)
    for _ in range(10):
        xs = np.cumsum(rng.uniform(0.2, 1.5, size=7))
        ys = np.cumsum(rng.uniform(0.0, 3.0, size=7))
        grid = np.linspace(xs[0], xs[-1], 1000)
        vals = bd_metrics.pchip_interpolate(xs, ys, grid)
        assert np.all(np.diff(vals) >= -1e-12)


def test_interpolant_stays_between_knots_on_wiggly_data():
    xs = np.arange(6.0)
    ys = np.array([0.0, 5.0, 1.0, 1.0, 8.0, 2.0])
    for i in range(5):
        grid = np.linspace(xs[i], xs[i + 1], 200)
        vals = bd_metrics.pchip_interpolate(xs, ys, grid)
        lo, hi = min(ys[i], ys[i + 1]), max(ys[i], ys[i + 1])
        assert np.all(vals >= lo - 1e-12) and np.all(vals <= hi + 1e-12)


def test_query_outside_knots_rejected():
    with pytest.raises(OutOfRange):
        bd_metrics.pchip_interpolate([0.0, 1.0], [0.0, 1.0], 1.5)
    with pytest.raises(OutOfRange):
        bd_metrics.pchip_interpolate([0.0, 1.0], [0.0, 1.0], [-0.1, 0.5])


def test_unsorted_abscissa_rejected():
    with pytest.raises(NonMonotonicAbscissa):
        bd_metrics.pchip_interpolate([0.0, 2.0, 1.0], [0.0, 1.0, 2.0], 0.5)
    with pytest.raises(NonMonotonicAbscissa):
        bd_metrics.pchip_interpolate([0.0, 0.0, 1.0], [0.0, 1.0, 2.0], 0.5)


def test_single_point_rejected():
    with pytest.raises(DegenerateCurve):
        bd_metrics.pchip_interpolate([1.0], [1.0], 1.0)


def test_two_points_interpolate_linearly():
    val = bd_metrics.pchip_interpolate([0.0, 2.0], [10.0, 20.0], 0.5)
    assert val == pytest.approx(12.5, abs=1e-12)


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

def test_linear_integral_closed_form():
    xs = [0.0, 1.0, 3.0]
    ys = [2.0, 4.0, 8.0]  # y = 2x + 2
    got = bd_metrics.pchip_integrate(xs, ys, 0.5, 2.5)
    # integral of 2x + 2 over [0.5, 2.5]: (x^2 + 2x) evaluates to 11.25 - 1.25
    assert got == pytest.approx(10.0, abs=1e-12)


def test_integral_matches_dense_trapezoid_oracle():
    rng = np.random.default_rng(17)
    for _ in range(5):
        xs = np.cumsum(rng.uniform(0.3, 1.2, size=9))
        ys = np.cumsum(rng.uniform(0.5, 4.0, size=9))
        lo = xs[0] + 0.3 * (xs[-1] - xs[0])
        hi = xs[0] + 0.9 * (xs[-1] - xs[0])
        exact = bd_metrics.pchip_integrate(xs, ys, lo, hi)
        approx = trapezoid_integral(xs, ys, lo, hi)
        assert exact == pytest.approx(approx, abs=1e-6)


def test_integral_degenerate_and_bad_bounds():
    xs, ys = [0.0, 1.0, 2.0], [0.0, 1.0, 4.0]
    assert bd_metrics.pchip_integrate(xs, ys, 1.3, 1.3) == 0.0
    with pytest.raises(ValueError):
        bd_metrics.pchip_integrate(xs, ys, 1.5, 0.5)
    with pytest.raises(OutOfRange):
        bd_metrics.pchip_integrate(xs, ys, -0.5, 1.0)


def test_integral_spanning_many_knots_additive():
    rng = np.random.default_rng(21)
    xs = np.cumsum(rng.uniform(0.5, 1.0, size=6))
    ys = np.cumsum(rng.uniform(0.5, 2.0, size=6))
    whole = bd_metrics.pchip_integrate(xs, ys, xs[0], xs[-1])
    mid = float(xs[2] + 0.37)
    left = bd_metrics.pchip_integrate(xs, ys, xs[0], mid)
    right = bd_metrics.pchip_integrate(xs, ys, mid, xs[-1])
    assert whole == pytest.approx(left + right, abs=1e-10)


# ---------------------------------------------------------------------------
# RqCurve construction
# ---------------------------------------------------------------------------

def test_dominated_points_removed():
    curve = curve_from_bitrates(
        [1e6, 2e6, 3e6, 4e6],
        [50.0, 45.0, 60.0, 70.0],  # the 2 Mbps point is dominated
    )
    assert len(curve.log_rates) == 3
    assert curve.qualities == (50.0, 60.0, 70.0)


def test_equal_rate_keeps_higher_quality():
    curve = curve_from_bitrates([1e6, 1e6, 2e6], [40.0, 55.0, 60.0])
    assert curve.qualities == (55.0, 60.0)


def test_monotone_input_unchanged():
    bitrates = [1e6, 2e6, 4e6, 8e6]
    qualities = [40.0, 55.0, 70.0, 80.0]
    curve = curve_from_bitrates(bitrates, qualities)
    assert curve.qualities == tuple(qualities)
    assert curve.log_rates == tuple(math.log2(b) for b in bitrates)


def test_input_order_irrelevant():
    a = curve_from_bitrates([4e6, 1e6, 2e6], [70.0, 40.0, 55.0])
    b = curve_from_bitrates([1e6, 2e6, 4e6], [40.0, 55.0, 70.0])
    assert a == b


def test_all_dominated_is_degenerate():
    with pytest.raises(DegenerateCurve):
        curve_from_bitrates([1e6, 2e6, 3e6], [60.0, 50.0, 40.0])
    with pytest.raises(DegenerateCurve):
        curve_from_bitrates([1e6], [60.0])


def test_nonpositive_bitrate_rejected():
    with pytest.raises(DegenerateCurve):
        curve_from_bitrates([0.0, 1e6], [10.0, 20.0])


def test_curve_from_ladder():
    log = [
        dataset.EncodeRecord("v", 1280, 720, 32, 0.9e6, 55.0),
        dataset.EncodeRecord("v", 1920, 1080, 29, 2.1e6, 71.0),
    ]
    lad = ladder.realize_ladder(
        [(1280, 720), (1920, 1080)], [1e6, 2e6], log
    )
    curve = RqCurve.from_ladder(lad)
    assert curve.qualities == (55.0, 71.0)


# ---------------------------------------------------------------------------
# BD deltas
# ---------------------------------------------------------------------------

def test_identical_curves_zero_exactly():
    curve = monotone_curve(np.random.default_rng(5))
    assert bd_metrics.bd_rate(curve, curve) == 0.0
    assert bd_metrics.bd_quality(curve, curve) == 0.0


def test_double_rate_is_plus_hundred_percent():
    rng = np.random.default_rng(7)
    quals = 30.0 + np.cumsum(rng.uniform(2.0, 6.0, size=8))
    bitrates = np.exp2(np.cumsum(rng.uniform(0.3, 0.8, size=8)) + 19.0)
    anchor = curve_from_bitrates(bitrates, quals)
    test = curve_from_bitrates(2.0 * bitrates, quals)
    assert bd_metrics.bd_rate(test, anchor) == pytest.approx(100.0, abs=0.01)


def test_half_rate_is_minus_fifty_percent():
    rng = np.random.default_rng(9)
    quals = 30.0 + np.cumsum(rng.uniform(2.0, 6.0, size=8))
    bitrates = np.exp2(np.cumsum(rng.uniform(0.3, 0.8, size=8)) + 19.0)
    anchor = curve_from_bitrates(bitrates, quals)
    test = curve_from_bitrates(0.5 * bitrates, quals)
    assert bd_metrics.bd_rate(test, anchor) == pytest.approx(-50.0, abs=0.01)


def test_constant_quality_offset():
    rng = np.random.default_rng(11)
    quals = 30.0 + np.cumsum(rng.uniform(2.0, 6.0, size=8))
    bitrates = np.exp2(np.cumsum(rng.uniform(0.3, 0.8, size=8)) + 19.0)
    anchor = curve_from_bitrates(bitrates, quals)
    test = curve_from_bitrates(bitrates, quals + 5.0)
    assert bd_metrics.bd_quality(test, anchor) == pytest.approx(5.0, abs=1e-6)


def test_bd_quality_antisymmetric():
    rng = np.random.default_rng(13)
    a = monotone_curve(rng)
    b = monotone_curve(rng)
    assert bd_metrics.bd_quality(a, b) == pytest.approx(
        -bd_metrics.bd_quality(b, a), abs=1e-9
    )


def test_bd_rate_invariant_under_rate_scaling():
    rng = np.random.default_rng(15)
    quals_a = 30.0 + np.cumsum(rng.uniform(2.0, 5.0, size=8))
    quals_b = 28.0 + np.cumsum(rng.uniform(2.0, 5.0, size=8))
    rates_a = np.exp2(np.cumsum(rng.uniform(0.3, 0.8, size=8)) + 19.0)
    rates_b = np.exp2(np.cumsum(rng.uniform(0.3, 0.8, size=8)) + 19.3)
    base = bd_metrics.bd_rate(
        curve_from_bitrates(rates_a, quals_a), curve_from_bitrates(rates_b, quals_b)
    )
    for alpha in (0.125, 3.7, 1000.0):
        scaled = bd_metrics.bd_rate(
            curve_from_bitrates(alpha * rates_a, quals_a),
            curve_from_bitrates(alpha * rates_b, quals_b),
        )
        assert scaled == pytest.approx(base, abs=1e-9)


def test_bd_quality_matches_dense_numeric_oracle():
    # cubic-flavoured synthetic curves sampled on a ladder-like grid
    log_rates = np.linspace(18.0, 23.0, 11)
    u = (log_rates - 18.0) / 5.0
    qual_a = 30.0 + 55.0 * (3 * u**2 - 2 * u**3)
    qual_b = 25.0 + 60.0 * (3 * u**2 - 2 * u**3) * 0.9 + 4.0 * u
    test = RqCurve(tuple(log_rates), tuple(qual_a))
    anchor = RqCurve(tuple(log_rates), tuple(qual_b))
    got = bd_metrics.bd_quality(test, anchor)
    lo, hi = 18.0, 23.0
    oracle = (
        trapezoid_integral(log_rates, qual_a, lo, hi)
        - trapezoid_integral(log_rates, qual_b, lo, hi)
    ) / (hi - lo)
    assert got == pytest.approx(oracle, abs=1e-4)


def test_disjoint_quality_ranges_raise():
    a = curve_from_bitrates([1e6, 2e6], [10.0, 30.0])
    b = curve_from_bitrates([1e6, 2e6], [40.0, 80.0])
    with pytest.raises(NoOverlap):
        bd_metrics.bd_rate(a, b)
    with pytest.raises(NoOverlap):
        bd_metrics.compare_curves(a, b)


def test_compare_curves_bundles_both_metrics():
    rng = np.random.default_rng(19)
    quals = 30.0 + np.cumsum(rng.uniform(2.0, 6.0, size=8))
    bitrates = np.exp2(np.cumsum(rng.uniform(0.3, 0.8, size=8)) + 19.0)
    anchor = curve_from_bitrates(bitrates, quals)
    test = curve_from_bitrates(bitrates * 1.5, quals + 2.0)
    result = bd_metrics.compare_curves(test, anchor)
    assert result.bd_rate_percent == bd_metrics.bd_rate(test, anchor)
    assert result.bd_quality == bd_metrics.bd_quality(test, anchor)
    assert result.quality_overlap[0] < result.quality_overlap[1]
    assert result.warnings == ()


def test_narrow_overlap_flagged():
    test = curve_from_bitrates([1e6, 2e6, 4e6, 8e6], [20.0, 45.0, 70.0, 88.0])
    anchor = curve_from_bitrates([6e6, 8e6], [85.0, 95.0])
    result = bd_metrics.compare_curves(test, anchor)
    assert any("test" in w and "quality" in w for w in result.warnings)


# ---------------------------------------------------------------------------
# aggregation and report files
# ---------------------------------------------------------------------------

def result(rate, quality):
    return bd_metrics.BdResult(rate, quality, (0.0, 1.0), (0.0, 1.0))


def test_single_result_aggregate():
    stats = bd_metrics.aggregate([result(-12.5, 2.0)])
    assert stats.bd_rate_mean == -12.5 and stats.bd_rate_std == 0.0
    assert stats.bd_quality_mean == 2.0 and stats.bd_quality_std == 0.0


def test_two_point_aggregate_population_std():
    stats = bd_metrics.aggregate([result(-10.0, 1.0), result(-20.0, 3.0)])
    assert stats.bd_rate_mean == -15.0 and stats.bd_rate_std == 5.0
    assert stats.formatted()["bd_rate"] == "-15/5"
    assert stats.bd_quality_mean == 2.0 and stats.bd_quality_std == 1.0


def test_aggregate_matches_independent_recomputation():
    rng = np.random.default_rng(23)
    values = [result(float(r), float(q)) for r, q in rng.normal(0, 10, size=(40, 2))]
    stats = bd_metrics.aggregate(values)
    rates = np.array([v.bd_rate_percent for v in values])
    quals = np.array([v.bd_quality for v in values])
    assert stats.bd_rate_mean == pytest.approx(rates.mean(), abs=1e-12)
    assert stats.bd_rate_std == pytest.approx(rates.std(), abs=1e-12)
    assert stats.bd_quality_mean == pytest.approx(quals.mean(), abs=1e-12)
    assert stats.bd_quality_std == pytest.approx(quals.std(), abs=1e-12)


def test_empty_aggregate_rejected():
    with pytest.raises(EmptyInput):
        bd_metrics.aggregate([])


def test_report_csv_round_trip(tmp_path):
    rows = [
        bd_metrics.ReportRow("vid-a", "predicted-vs-fixed", result(-12.0, 3.0)),
        bd_metrics.ReportRow("vid-b", "predicted-vs-fixed", None, "curves share no quality interval"),
    ]
    path = tmp_path / "report.csv"
    path.write_text(bd_metrics.report_csv_text(rows))
    back = bd_metrics.parse_report_csv(path)
    assert back[0].result == rows[0].result
    assert back[1].result is None
    assert "no quality interval" in back[1].note


def test_report_rejects_unknown_header(tmp_path):
    path = tmp_path / "report.csv"
    path.write_text("foo,bar\n1,2\n")
    with pytest.raises(SchemaError):
        bd_metrics.parse_report_csv(path)
