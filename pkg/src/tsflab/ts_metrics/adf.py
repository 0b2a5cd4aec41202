"""Augmented Dickey-Fuller test, constant-only regression."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..numkit import ols_fit
from ._mackinnon import TAU_PVALUE_TABLE

_TAUS = np.array([row[0] for row in TAU_PVALUE_TABLE])
_LOGP = np.log(np.array([row[1] for row in TAU_PVALUE_TABLE]))


@dataclass
class ADFResult:
    statistic: float
    p_value: float
    lags: int
    nobs: int


def schwert_lags(n: int) -> int:
    return int(math.floor(12.0 * (n / 100.0) ** 0.25))


def tau_pvalue(stat: float) -> float:
    """Log-linear interpolation over the embedded table, clamped at both ends."""
    if stat <= _TAUS[0]:
        return float(math.exp(_LOGP[0]))
    if stat >= _TAUS[-1]:
        return float(math.exp(_LOGP[-1]))
    return float(math.exp(np.interp(stat, _TAUS, _LOGP)))


def adf_test(series, lags: int | str = "auto") -> ADFResult:
    """Regress dy_t on [y_{t-1}, dy_{t-1..t-k}, 1]; t-stat of the level term."""
    x = np.asarray(series, dtype=np.float64).reshape(-1)
    n = x.size
    k = schwert_lags(n) if lags == "auto" else int(lags)
    if k < 0:
        raise ValueError("lags must be non-negative")
    dx = np.diff(x)
    nobs = dx.size - k
    n_reg = k + 2
    if nobs <= n_reg:
        raise ValueError(f"too few observations ({n}) for {k} lags")
    cols = [x[k : n - 1]]
    for i in range(1, k + 1):
        cols.append(dx[k - i : dx.size - i])
    cols.append(np.ones(nobs))
    design = np.column_stack(cols)
    fit = ols_fit(design, dx[k:])
    stat = float(fit.coef[0] / fit.stderr[0])
    return ADFResult(statistic=stat, p_value=tau_pvalue(stat), lags=k, nobs=nobs)
