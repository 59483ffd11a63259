import numpy as np
import pytest

from src.metrics.statistics import (
    MetricError,
    PairedSeries,
    circular_error_deg,
    l1_spec,
    pearson,
    spearman,
)


@pytest.mark.parametrize(
    "a, b, expected",
    [(350.0, 10.0, 20.0), (0.0, 180.0, 180.0), (-170.0, 170.0, 20.0), (45.0, 45.0, 0.0)],
)
def test_circular_error(a, b, expected):
    assert circular_error_deg(a, b) == pytest.approx(expected)


def test_circular_error_is_vectorized():
    errors = circular_error_deg(np.array([0.0, 90.0]), np.array([720.0, -90.0]))
    np.testing.assert_allclose(errors, [0.0, 180.0])


def test_l1_modes():
    assert l1_spec(np.array([[1 + 1j, 0j]]), np.zeros((1, 2), dtype=complex)) == pytest.approx(1.0)
    assert l1_spec(np.array([1.0, -2.0]), np.zeros(2), mode="magnitude") == pytest.approx(1.5)
    with pytest.raises(MetricError):
        l1_spec(np.zeros(2), np.zeros(3))
    with pytest.raises(MetricError):
        l1_spec(np.zeros(0), np.zeros(0))


def test_correlations_are_invariant_to_monotone_maps(rng):
    x = rng.normal(size=50)
    assert pearson((x, 3.0 * x + 2.0)).value == pytest.approx(1.0)
    assert pearson((x, -x)).value == pytest.approx(-1.0)
    assert spearman((x, np.exp(x))).value == pytest.approx(1.0)


def test_zero_variance_is_undefined():
    result = pearson((np.ones(5), np.arange(5.0)))
    assert result.value is None
    assert not result.defined
    assert not spearman((np.arange(5.0), np.full(5, 2.0))).defined


def test_paired_series_validation():
    with pytest.raises(MetricError):
        PairedSeries(np.arange(3.0), np.arange(4.0))
    with pytest.raises(MetricError):
        PairedSeries(np.arange(2.0), np.arange(2.0))
    with pytest.raises(MetricError):
        PairedSeries(np.array([0.0, 1.0, np.nan]), np.arange(3.0))
