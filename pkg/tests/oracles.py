"""Step-by-step reference implementations written with plain loops.

These are deliberately naive and share no code with the package; numpy is
used only for the lagged dot products of the autocorrelation.
"""

from __future__ import annotations

import math
import statistics

import numpy as np


def shifting_reference(x, m=16):
    T = len(x)
    mu = sum(x) / T
    sd = math.sqrt(sum((v - mu) ** 2 for v in x) / T)
    z = [(v - mu) / sd for v in x]
    zmin, zmax = min(z), max(z)
    centers = []
    for i in range(1, m + 1):
        level = zmax if i == m else zmin + (i - 1) / (m - 1) * (zmax - zmin)
        active = [t for t in range(1, T + 1) if z[t - 1] > level]
        if active:
            centers.append(statistics.median(active))
    lo, hi = min(centers), max(centers)
    if hi - lo < 1e-9:
        return 0.0
    normed = [(c - lo) / (hi - lo) for c in centers]
    return abs(statistics.median(normed))


def acf_lag(xc, lag):
    """Direct lagged product sum (no FFT), normalized by the lag-0 sum."""
    return float(np.dot(xc[: len(xc) - lag], xc[lag:]) / np.dot(xc, xc))


def acf_reference(x, max_lag):
    xc = np.asarray(x, dtype=float) - sum(x) / len(x)
    return [acf_lag(xc, lag) for lag in range(max_lag + 1)]


def first_zero_reference(x):
    xc = np.asarray(x, dtype=float) - sum(x) / len(x)
    for lag in range(1, len(x) // 2 + 1):
        if acf_lag(xc, lag) <= 1e-10:
            return lag
    return 1


def transition_reference(x):
    tau = first_zero_reference(x)
    y = x[::tau]
    n = len(y)
    order = sorted(range(n), key=lambda j: (y[j], j))
    rank = [0] * n
    for r, j in enumerate(order):
        rank[j] = r
    z = [(3 * rank[j]) // n for j in range(n)]
    M = [[0.0] * 3 for _ in range(3)]
    for j in range(n - 1):
        M[z[j]][z[j + 1]] += 1.0
    Mp = [[M[a][b] / n for b in range(3)] for a in range(3)]
    # covariance of the three columns as variables, rows as observations
    trace = 0.0
    for col in range(3):
        vals = [Mp[row][col] for row in range(3)]
        mean = sum(vals) / 3
        trace += sum((v - mean) ** 2 for v in vals) / 2
    return trace


def _line_fit(values):
    n = len(values)
    if n == 1:
        return 0.0, values[0]
    xbar = (n - 1) / 2
    ybar = sum(values) / n
    sxx = sum((i - xbar) ** 2 for i in range(n))
    sxy = sum((i - xbar) * (values[i] - ybar) for i in range(n))
    slope = sxy / sxx
    return slope, ybar - slope * xbar


def decompose_reference(x, period):
    T = len(x)
    if period % 2:
        weights = [1.0 / period] * period
    else:
        weights = [0.5 / period] + [1.0 / period] * (period - 1) + [0.5 / period]
    half = len(weights) // 2
    core = []
    for t in range(half, T - half):
        core.append(sum(weights[k] * x[t - half + k] for k in range(len(weights))))
    n_fit = min(period, len(core))
    slope_l, icpt_l = _line_fit(core[:n_fit])
    slope_r, icpt_r = _line_fit(core[-n_fit:])
    left = [icpt_l + slope_l * (-(half - i)) for i in range(half)]
    right = [icpt_r + slope_r * (n_fit - 1 + i) for i in range(1, half + 1)]
    trend = left + core + right
    detr = [x[t] - trend[t] for t in range(T)]
    means = []
    for p in range(period):
        vals = [detr[t] for t in range(p, T, period)]
        means.append(sum(vals) / len(vals))
    avg = sum(means) / period
    means = [v - avg for v in means]
    seasonal = [means[t % period] for t in range(T)]
    resid = [x[t] - trend[t] - seasonal[t] for t in range(T)]
    return seasonal, trend, resid


def _var(v):
    mu = sum(v) / len(v)
    return sum((a - mu) ** 2 for a in v) / len(v)


def strength_reference(resid, comp, total_var):
    denom = _var([c + r for c, r in zip(comp, resid)])
    if denom <= 1e-20 * total_var:
        return 0.0
    return max(0.0, 1.0 - _var(resid) / denom)


def seasonality_reference(x, period):
    s, _, r = decompose_reference(x, period)
    return strength_reference(r, s, _var(x))


def trend_reference(x, period):
    _, tr, r = decompose_reference(x, period)
    return strength_reference(r, tr, _var(x))


def period_reference(x):
    T = len(x)
    max_p = min(max(T // 10, 3), T // 2)
    acf = acf_reference(x, max_p + 1)
    peaks = [lag for lag in range(3, max_p + 1) if acf[lag] > acf[lag - 1] and acf[lag] >= acf[lag + 1]]
    pool = peaks if peaks else list(range(3, max_p + 1))
    best = pool[0]
    for lag in pool:
        if acf[lag] > acf[best]:
            best = lag
    return best
