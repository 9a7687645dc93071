"""Discrete power-law tools.

``fit_power_law`` follows the standard discrete MLE recipe with the lower
cutoff chosen by a Kolmogorov-Smirnov scan over observed values;
``sample_zipf`` draws exactly from a (optionally truncated) zeta law by
inverting the CDF.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

__all__ = ["MIN_SAMPLES", "PowerLawFit", "fit_power_law", "sample_zipf"]

MIN_SAMPLES = 50
_EXPONENT_BOUNDS = (1.0 + 1e-6, 12.0)
_TABLE_LIMIT = 1 << 17


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    xmin: int
    ks_statistic: float
    n_tail: int


def _mle_exponent(log_sum: float, n: int, xmin: int) -> float:
    def nll(a: float) -> float:
        return n * float(np.log(zeta(a, xmin))) + a * log_sum

    res = minimize_scalar(
        nll, bounds=_EXPONENT_BOUNDS, method="bounded", options={"xatol": 1e-7}
    )
    return float(res.x)


def _ks_statistic(uniq: np.ndarray, ecdf: np.ndarray, a: float, xmin: int) -> float:
    # sup_t |F(t) - S(t)| over integers t >= xmin. Both step functions only
    # change at observed values, so it suffices to compare at each observed
    # value and just below it.
    z = float(zeta(a, xmin))
    f_at = 1.0 - zeta(a, uniq + 1.0) / z  # F(u_i)
    f_before = 1.0 - zeta(a, uniq.astype(float)) / z  # F(u_i - 1)
    s_prev = np.concatenate(([0.0], ecdf[:-1]))
    return float(max(np.abs(f_at - ecdf).max(), np.abs(f_before - s_prev).max()))


def fit_power_law(samples) -> PowerLawFit:
    """Fit ``P(x) ~ x**-a`` for ``x >= xmin`` to positive integer samples.

    The exponent is the discrete MLE on the tail; ``xmin`` is scanned over
    observed values and the one minimizing the KS distance between the tail
    and the fitted law wins (ties: smaller xmin). Requires at least
    ``MIN_SAMPLES`` samples and at least two distinct values.
    """
    x = np.asarray(list(samples))
    if x.size < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {x.size}")
    xi = np.asarray(x, dtype=np.int64) if x.dtype.kind in "iu" else x.astype(np.int64)
    if not np.array_equal(xi, x):
        raise ValueError("samples must be positive integers")
    if (xi < 1).any():
        raise ValueError("samples must be positive integers")
    xs = np.sort(xi)
    uniq_all = np.unique(xs)
    if uniq_all.size == 1:
        raise ValueError("degenerate distribution: all samples are equal")

    logs = np.log(xs.astype(float))
    # suffix[i] = sum of logs[i:]
    suffix = np.concatenate((np.cumsum(logs[::-1])[::-1], [0.0]))
    best: PowerLawFit | None = None
    for xmin in uniq_all[:-1]:  # the tail must contain >= 2 distinct values
        i = int(np.searchsorted(xs, xmin, side="left"))
        n_tail = int(xs.size - i)
        a = _mle_exponent(float(suffix[i]), n_tail, int(xmin))
        uniq, counts = np.unique(xs[i:], return_counts=True)
        ecdf = np.cumsum(counts) / n_tail
        d = _ks_statistic(uniq, ecdf, a, int(xmin))
        if best is None or d < best.ks_statistic:
            best = PowerLawFit(exponent=a, xmin=int(xmin), ks_statistic=d, n_tail=n_tail)
    assert best is not None
    return best


def sample_zipf(
    exponent: float,
    size: int,
    rng: np.random.Generator,
    *,
    xmin: int = 1,
    xmax: int | None = None,
) -> np.ndarray:
    """Exact draws from ``P(X = k) ~ k**-exponent`` on ``k in [xmin, xmax]``.

    With ``xmax=None`` the support is unbounded, which requires
    ``exponent > 1``; bounded supports allow any positive exponent.
    """
    if xmin < 1:
        raise ValueError("xmin must be >= 1")
    if xmax is not None:
        if xmax < xmin:
            raise ValueError("xmax must be >= xmin")
        if exponent <= 0:
            raise ValueError("exponent must be positive")
    elif exponent <= 1.0:
        raise ValueError("exponent must exceed 1 for an unbounded power law")

    top = xmax if xmax is not None else xmin + _TABLE_LIMIT
    ks = np.arange(xmin, top + 1, dtype=float)
    cdf = np.cumsum(ks ** -float(exponent))
    total = float(cdf[-1]) if xmax is not None else float(zeta(exponent, xmin))
    u = rng.random(size) * total
    out = xmin + np.searchsorted(cdf, u, side="left")
    if xmax is not None:
        return np.minimum(out, xmax).astype(np.int64)
    # rare draws beyond the table: invert the zeta tail by bisection
    for idx in np.flatnonzero(out > top):
        target = total - float(u[idx])  # want smallest k with zeta(a, k+1) <= target
        lo = top + 1
        hi = lo
        while zeta(exponent, hi + 1) > target:
            lo = hi + 1
            hi *= 2
        while lo < hi:
            mid = (lo + hi) // 2
            if zeta(exponent, mid + 1) <= target:
                hi = mid
            else:
                lo = mid + 1
        out[idx] = lo
    return out.astype(np.int64)
