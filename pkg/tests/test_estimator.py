import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rcthresh import (
    AllFailError,
    AllPassError,
    DegenerateError,
    DomainError,
    McConfig,
    MeasurementRecord,
    RngStream,
    build_correction_table,
    cdf,
    estimate_threshold,
    expected_max_field,
    max_field_cdf,
    max_field_quantile,
    rayleigh,
    sample_batch,
    unit_mean_spec,
)

ROUNDED_EULER = 0.5772


def test_worked_example():
    est = estimate_threshold(MeasurementRecord(n=10, n_low=9, mean_field=50.0))
    assert est.e_est_norm == pytest.approx(1.712, abs=1e-3)
    assert est.e_factor == pytest.approx(1.42, abs=0.01)
    assert est.e_thr_abs == pytest.approx(120.0, rel=0.05)
    assert est.e_thr_abs == pytest.approx(122.0, abs=0.1)
    assert est.rel_std == pytest.approx(0.035, abs=0.005)
    assert est.clamped
    assert "lower bound" in est.notes


def test_all_pass_and_all_fail():
    with pytest.raises(AllPassError, match="tune the input power up or increase N"):
        estimate_threshold(MeasurementRecord(10, 10, 50.0))
    with pytest.raises(AllFailError, match="lower the input power"):
        estimate_threshold(MeasurementRecord(10, 0, 50.0))
    with pytest.raises(DegenerateError):
        estimate_threshold(MeasurementRecord(2, 1, 50.0))


@pytest.mark.parametrize("kwargs", [dict(n=1, n_low=0), dict(n=5, n_low=6), dict(n=5, n_low=-1), dict(mean_field=0.0)])
def test_record_validation(kwargs):
    base = dict(n=10, n_low=5, mean_field=10.0)
    with pytest.raises(DomainError):
        MeasurementRecord(**{**base, **kwargs})


def test_table_path_equals_on_demand_oracle():
    table = build_correction_table(McConfig(spec=rayleigh(), n_values=(10, 20)), "oracle")
    for n, k in [(10, 3), (10, 7), (20, 15)]:
        rec = MeasurementRecord(n, k, 30.0)
        assert estimate_threshold(rec, table) == estimate_threshold(rec)


def test_missing_n_falls_back_with_note():
    table = build_correction_table(McConfig(spec=rayleigh(), n_values=(10,)), "oracle")
    est = estimate_threshold(MeasurementRecord(12, 6, 30.0), table)
    assert "not in table" in est.notes
    direct = estimate_threshold(MeasurementRecord(12, 6, 30.0))
    assert (est.e_factor, est.e_thr_abs, est.rel_std) == (direct.e_factor, direct.e_thr_abs, direct.rel_std)


def test_table_distribution_mismatch():
    table = build_correction_table(McConfig(spec=rayleigh(), n_values=(10,)), "oracle")
    with pytest.raises(DomainError, match="table is for"):
        estimate_threshold(MeasurementRecord(10, 5, 30.0, k_db=3.0), table)


def test_rice_record():
    est = estimate_threshold(MeasurementRecord(20, 12, 40.0, k_db=3.0))
    spec = unit_mean_spec("rice", 3.0)
    assert cdf(spec, est.e_est_norm) == pytest.approx(0.6, abs=1e-9)
    assert not est.clamped
    assert 0.8 < est.e_factor < 1.3


@settings(max_examples=30, deadline=None)
@given(
    n=st.integers(3, 60),
    frac=st.floats(0.05, 0.95),
    mean_field=st.floats(0.1, 1e4),
    c=st.floats(1e-3, 1e3),
)
def test_arithmetic_invariants_and_scaling(n, frac, mean_field, c):
    k = min(max(1, round(frac * n)), n - 1)
    try:
        est = estimate_threshold(MeasurementRecord(n, k, mean_field))
    except DomainError:
        return  # below the 1% grid edge
    assert abs(est.e_thr_norm - est.e_est_norm * est.e_factor) <= 1e-9
    assert abs(est.e_thr_abs - mean_field * est.e_thr_norm) <= 1e-9 * max(1.0, est.e_thr_abs)
    scaled = estimate_threshold(MeasurementRecord(n, k, mean_field * c))
    assert scaled.e_thr_abs == pytest.approx(c * est.e_thr_abs, rel=1e-15)
    assert (scaled.e_est_norm, scaled.e_factor, scaled.e_thr_norm, scaled.rel_std, scaled.clamped) == (
        est.e_est_norm,
        est.e_factor,
        est.e_thr_norm,
        est.rel_std,
        est.clamped,
    )


# ---------------------------------------------------------------- maximum field


def test_expected_max_field_examples():
    assert expected_max_field(10, ROUNDED_EULER) == pytest.approx(1.9314, abs=1e-3)
    assert expected_max_field(100, ROUNDED_EULER) == pytest.approx(2.5700, abs=1e-3)
    assert expected_max_field(1, ROUNDED_EULER) == pytest.approx(1.1398, abs=1e-3)
    assert expected_max_field(10) == pytest.approx(1.9314, abs=1e-3)
    with pytest.raises(DomainError):
        expected_max_field(0)


def test_max_field_cdf_examples(ray):
    assert max_field_cdf(10, 2.0) == pytest.approx(0.6429, abs=1e-4)
    assert max_field_cdf(10, 2.0) == pytest.approx((1 - math.exp(-math.pi)) ** 10, rel=1e-14)
    for x in np.linspace(0, 4, 17):
        assert max_field_cdf(1, x) == cdf(ray, x)
        assert max_field_cdf(7, x) == cdf(ray, x) ** 7
    assert abs(max_field_cdf(10, 10.0) - 1) <= 1e-9
    with pytest.raises(DomainError):
        max_field_cdf(10, -1.0)


def test_max_field_quantile_examples():
    assert max_field_quantile(10, 0.95) == pytest.approx(2.5917, abs=1e-3)
    assert max_field_quantile(1, 0.5) == pytest.approx(0.93944, abs=1e-5)
    assert max_field_quantile(33, 0.0) == 0.0
    with pytest.raises(DomainError):
        max_field_quantile(10, 1.0)


@pytest.mark.parametrize("n", [1, 10, 100])
@pytest.mark.parametrize("p", [0.05, 0.5, 0.95])
def test_max_field_round_trip(n, p):
    assert abs(max_field_cdf(n, max_field_quantile(n, p)) - p) <= 1e-9


def test_max_field_cdf_monte_carlo(ray):
    x = sample_batch(ray, 10 * 10**5, RngStream(31, (0,))).reshape(10**5, 10)
    assert abs(np.mean(x.max(axis=1) <= 2.0) - 0.6429) <= 0.005
