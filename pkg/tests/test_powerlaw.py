import numpy as np
import pytest
from scipy.special import zeta

from citynet import fit_power_law, sample_zipf
from citynet.powerlaw import MIN_SAMPLES


def test_too_few_samples_rejected():
    with pytest.raises(ValueError):
        fit_power_law([2] * (MIN_SAMPLES - 2) + [3])


def test_non_integer_and_non_positive_rejected():
    with pytest.raises(ValueError):
        fit_power_law([1.5] * 60)
    with pytest.raises(ValueError):
        fit_power_law([0] * 30 + [1] * 30)
    with pytest.raises(ValueError):
        fit_power_law([-1] * 30 + [2] * 30)


def test_degenerate_all_equal_rejected():
    with pytest.raises(ValueError):
        fit_power_law([7] * 100)


def test_fit_recovers_known_exponent():
    rng = np.random.default_rng(123)
    draws = sample_zipf(2.3, 20_000, rng)
    fit = fit_power_law(draws.tolist())
    assert fit.exponent == pytest.approx(2.3, abs=0.05)
    assert fit.xmin >= 1
    assert fit.n_tail > 0
    assert 0.0 <= fit.ks_statistic < 0.1


def test_fit_handles_noisy_head():
    # contaminate the head: the xmin scan should step past it
    rng = np.random.default_rng(5)
    tail = sample_zipf(2.5, 10_000, rng, xmin=4)
    head = rng.integers(1, 4, size=2_000)
    fit = fit_power_law(np.concatenate([tail, head]).tolist())
    assert fit.xmin >= 3
    assert fit.exponent == pytest.approx(2.5, abs=0.15)


def test_sample_zipf_pmf_matches_theory():
    rng = np.random.default_rng(42)
    n = 200_000
    draws = sample_zipf(2.0, n, rng)
    z = float(zeta(2.0, 1))
    for k in (1, 2, 3):
        p = k ** -2.0 / z
        observed = float(np.mean(draws == k))
        # 4 sigma of a binomial proportion
        assert abs(observed - p) < 4.0 * np.sqrt(p * (1 - p) / n)


def test_sample_zipf_bounds_respected():
    rng = np.random.default_rng(0)
    draws = sample_zipf(1.5, 5_000, rng, xmin=3, xmax=17)
    assert draws.min() >= 3 and draws.max() <= 17


def test_sample_zipf_bounded_allows_shallow_exponent():
    rng = np.random.default_rng(0)
    draws = sample_zipf(0.5, 1_000, rng, xmax=10)
    assert draws.min() >= 1 and draws.max() <= 10


def test_sample_zipf_unbounded_requires_normalizable():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        sample_zipf(1.0, 10, rng)
    with pytest.raises(ValueError):
        sample_zipf(0.8, 10, rng)


def test_sample_zipf_deterministic_per_seed():
    a = sample_zipf(2.0, 100, np.random.default_rng(9))
    b = sample_zipf(2.0, 100, np.random.default_rng(9))
    assert np.array_equal(a, b)


def test_sample_zipf_invalid_args():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        sample_zipf(2.0, 10, rng, xmin=0)
    with pytest.raises(ValueError):
        sample_zipf(2.0, 10, rng, xmin=5, xmax=4)
