"""Shifting, stationarity, transition, seasonality and trend of a series."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .adf import adf_test

ACF_ZERO_TOL = 1e-10
CENTER_SPAN_TOL = 1e-9
SIGNIFICANCE = 0.05
# variances below this fraction of var(X) are rounding noise
NUMERIC_ZERO_VAR = 1e-20


class DegenerateSeriesError(ValueError):
    """The metric is undefined for this input (constant, too short, ...)."""


def _as_1d(series) -> np.ndarray:
    x = np.asarray(series, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    return x


def _zscore(x: np.ndarray) -> np.ndarray:
    sd = x.std()
    if sd == 0.0 or not np.isfinite(sd):
        raise DegenerateSeriesError("constant series has no z-score")
    return (x - x.mean()) / sd


# ---------------------------------------------------------------------------
# shifting
# ---------------------------------------------------------------------------


def compute_shifting(series, m: int = 16) -> float:
    """Median min-max-normalized temporal center of m level sets."""
    x = _as_1d(series)
    if x.size < 16:
        raise DegenerateSeriesError("shifting needs at least 16 points")
    if m < 3:
        raise ValueError("m must be at least 3")
    z = _zscore(x)
    zmin, zmax = z.min(), z.max()
    t = np.arange(1, z.size + 1, dtype=np.float64)
    centers = []
    for i in range(m):
        # the top level is exactly zmax; rounding must not leave the maximum above it
        level = zmax if i == m - 1 else zmin + i / (m - 1) * (zmax - zmin)
        active = t[z > level]
        if active.size:
            centers.append(np.median(active))
    centers = np.asarray(centers)
    span = centers.max() - centers.min()
    if span < CENTER_SPAN_TOL:
        return 0.0
    normed = (centers - centers.min()) / span
    return float(abs(np.median(normed)))


# ---------------------------------------------------------------------------
# stationarity
# ---------------------------------------------------------------------------


def compute_stationarity(series, lags: int | str = "auto") -> int:
    """1 when the ADF p-value is at most 0.05 (unit root rejected)."""
    x = _as_1d(series)
    if x.size < 32:
        raise DegenerateSeriesError("stationarity needs at least 32 points")
    if x.std() == 0.0:
        raise DegenerateSeriesError("constant series")
    return int(adf_test(x, lags).p_value <= SIGNIFICANCE)


# ---------------------------------------------------------------------------
# transition
# ---------------------------------------------------------------------------


def autocorrelation(x: np.ndarray, max_lag: int | None = None) -> np.ndarray:
    """Sample ACF (biased, normalized by lag-0) via FFT."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    xc = x - x.mean()
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(xc, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:n]
    if acov[0] == 0.0:
        raise DegenerateSeriesError("constant series has no autocorrelation")
    acf = acov / acov[0]
    return acf if max_lag is None else acf[: max_lag + 1]


def first_zero_acf(series) -> tuple[int, bool]:
    """Smallest lag >= 1 with ACF <= 0 (within float noise).

    Returns ``(tau, flagged)``; with no crossing up to T/2 the lag falls back
    to 1 and ``flagged`` is True.
    """
    x = _as_1d(series)
    if x.size < 8:
        raise DegenerateSeriesError("ACF needs at least 8 points")
    acf = autocorrelation(x, x.size // 2)
    hits = np.nonzero(acf[1:] <= ACF_ZERO_TOL)[0]
    if hits.size == 0:
        return 1, True
    return int(hits[0]) + 1, False


def transition_matrix(symbols: np.ndarray, n_states: int = 3) -> np.ndarray:
    counts = np.zeros((n_states, n_states))
    np.add.at(counts, (symbols[:-1], symbols[1:]), 1.0)
    return counts


def compute_transition(series, return_details: bool = False):
    """Trace of the column covariance of the 3-symbol transition matrix."""
    x = _as_1d(series)
    if x.size < 64:
        raise DegenerateSeriesError("transition needs at least 64 points")
    tau, flagged = first_zero_acf(x)
    y = x[::tau]
    n = y.size
    if n < 12:
        raise DegenerateSeriesError(f"downsampled length {n} < 12")
    ranks = np.empty(n, dtype=np.int64)
    ranks[np.argsort(y, kind="stable")] = np.arange(n)
    symbols = (3 * ranks) // n
    mprime = transition_matrix(symbols) / n
    delta = float(np.trace(np.cov(mprime, rowvar=False)))
    if return_details:
        return delta, {"tau": tau, "acf_flagged": flagged, "downsampled_length": n}
    return delta


# ---------------------------------------------------------------------------
# additive decomposition, seasonality, trend
# ---------------------------------------------------------------------------


@dataclass
class DecompositionResult:
    seasonal: np.ndarray
    trend: np.ndarray
    residual: np.ndarray
    period: int


def _centered_moving_average(x: np.ndarray, period: int) -> tuple[np.ndarray, int]:
    if period % 2:
        w = np.full(period, 1.0 / period)
    else:
        w = np.full(period + 1, 1.0 / period)
        w[0] = w[-1] = 0.5 / period
    half = w.size // 2
    return np.convolve(x, w, mode="valid"), half


def _extend_linear(values: np.ndarray, n_fit: int, n_out: int, side: str) -> np.ndarray:
    seg = values[:n_fit] if side == "left" else values[-n_fit:]
    idx = np.arange(seg.size, dtype=np.float64)
    slope, intercept = np.polyfit(idx, seg, 1) if seg.size > 1 else (0.0, seg[0])
    if side == "left":
        pos = -np.arange(n_out, 0, -1, dtype=np.float64)
    else:
        pos = seg.size - 1 + np.arange(1, n_out + 1, dtype=np.float64)
    return intercept + slope * pos


def decompose(series, period: int) -> DecompositionResult:
    """Classical additive split: centered moving-average trend, cycle-mean seasonal.

    Trend ends are extended by a least-squares line over the nearest period
    of moving-average values; the residual closes the identity exactly.
    """
    x = _as_1d(series)
    period = int(period)
    if period < 2:
        raise ValueError("period must be at least 2")
    if x.size < 2 * period:
        raise DegenerateSeriesError(f"series of length {x.size} is shorter than two periods of {period}")
    core, half = _centered_moving_average(x, period)
    n_fit = min(period, core.size)
    trend = np.concatenate(
        [_extend_linear(core, n_fit, half, "left"), core, _extend_linear(core, n_fit, half, "right")]
    )
    detrended = x - trend
    phase = np.arange(x.size) % period
    sums = np.bincount(phase, weights=detrended, minlength=period)
    counts = np.bincount(phase, minlength=period)
    means = sums / counts
    means -= means.mean()
    seasonal = means[phase]
    residual = x - trend - seasonal
    return DecompositionResult(seasonal=seasonal, trend=trend, residual=residual, period=period)


def _strength(residual: np.ndarray, component: np.ndarray, scale: float) -> float:
    """max(0, 1 - var(R) / var(C + R)); 0 when var(C + R) is zero at rounding level."""
    denom = np.var(component + residual)
    if denom <= NUMERIC_ZERO_VAR * scale:
        return 0.0
    return float(max(0.0, 1.0 - np.var(residual) / denom))


def estimate_period(series, max_period: int | None = None) -> int:
    """Lag of the largest local ACF peak beyond lag 2.

    Candidates are capped at T // 10 so every period spans ten or more cycles.
    """
    x = _as_1d(series)
    if max_period is None:
        max_period = max(x.size // 10, 3)
    max_period = min(max_period, x.size // 2)
    if max_period < 3:
        raise DegenerateSeriesError("series too short to estimate a period")
    acf = autocorrelation(x, max_period + 1)
    lags = np.arange(3, max_period + 1)
    peaks = lags[(acf[lags] > acf[lags - 1]) & (acf[lags] >= acf[lags + 1])]
    if peaks.size == 0:
        return int(lags[np.argmax(acf[lags])])
    return int(peaks[np.argmax(acf[peaks])])


def compute_seasonality(series, period: int | None = None) -> float:
    x = _as_1d(series)
    dec = decompose(x, period if period is not None else estimate_period(x))
    return _strength(dec.residual, dec.seasonal, float(np.var(x)))


def compute_trend(series, period: int | None = None) -> float:
    x = _as_1d(series)
    dec = decompose(x, period if period is not None else estimate_period(x))
    return _strength(dec.residual, dec.trend, float(np.var(x)))


# ---------------------------------------------------------------------------
# profile
# ---------------------------------------------------------------------------


@dataclass
class ProfileConfig:
    m: int = 16
    period: int | None = None
    adf_lags: int | str = "auto"


@dataclass
class PropertyProfile:
    shifting: float | None = None
    stationarity: float | None = None
    transition: float | None = None
    seasonality: float | None = None
    trend: float | None = None
    period_used: int | None = None
    flags: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def nonstationarity(self) -> float | None:
        """1 - stationarity; larger means a poorer-stationary series."""
        return None if self.stationarity is None else 1.0 - self.stationarity


def _profile_channel(x: np.ndarray, cfg: ProfileConfig) -> PropertyProfile:
    prof = PropertyProfile()
    if x.std() == 0.0:
        for name in ("shifting", "stationarity", "transition", "seasonality", "trend"):
            prof.flags[name] = "degenerate: constant series"
        return prof

    def attempt(name, fn):
        try:
            return fn()
        except (DegenerateSeriesError, ValueError, np.linalg.LinAlgError) as exc:
            prof.flags[name] = f"degenerate: {exc}"
            return None

    prof.shifting = attempt("shifting", lambda: compute_shifting(x, cfg.m))
    stat = attempt("stationarity", lambda: compute_stationarity(x, cfg.adf_lags))
    prof.stationarity = None if stat is None else float(stat)
    details = attempt("transition", lambda: compute_transition(x, return_details=True))
    if details is not None:
        prof.transition = details[0]
        if details[1]["acf_flagged"]:
            prof.flags["transition"] = "acf has no zero crossing; tau=1"
    period = cfg.period
    if period is None:
        period = attempt("period", lambda: estimate_period(x))
    if period is not None:
        dec = attempt("decomposition", lambda: decompose(x, period))
        if dec is not None:
            prof.period_used = int(period)
            prof.seasonality = _strength(dec.residual, dec.seasonal, float(np.var(x)))
            prof.trend = _strength(dec.residual, dec.trend, float(np.var(x)))
    return prof


def _mean_or_none(values):
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else None


def profile(series, config: ProfileConfig | None = None, return_channels: bool = False):
    """Profile a length-T or T x d series; channels are averaged.

    Stationarity is averaged as a fraction of stationary channels and then
    thresholded at 0.5.
    """
    cfg = config or ProfileConfig()
    x = np.asarray(series, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    channels = [_profile_channel(x[:, j], cfg) for j in range(x.shape[1])]
    if len(channels) == 1:
        agg = channels[0]
    else:
        agg = PropertyProfile()
        for name in ("shifting", "transition", "seasonality", "trend"):
            setattr(agg, name, _mean_or_none(getattr(c, name) for c in channels))
        frac = _mean_or_none(c.stationarity for c in channels)
        agg.stationarity = None if frac is None else float(frac >= 0.5)
        periods = [c.period_used for c in channels if c.period_used is not None]
        agg.period_used = periods[0] if periods and len(set(periods)) == 1 else None
        for j, c in enumerate(channels):
            for k, v in c.flags.items():
                agg.flags[f"channel{j}.{k}"] = v
        for name in ("shifting", "stationarity", "transition", "seasonality", "trend"):
            if getattr(agg, name) is None:
                agg.flags.setdefault(name, "degenerate in every channel")
    return (agg, channels) if return_channels else agg


def profile_windows(series, window: int = 512, stride: int | None = None, config: ProfileConfig | None = None) -> PropertyProfile:
    """Average of per-window profiles (univariate); labelled windowed in flags."""
    x = np.asarray(series, dtype=np.float64).reshape(-1)
    stride = stride or window
    profiles = [profile(x[s : s + window], config) for s in range(0, x.size - window + 1, stride)]
    if not profiles:
        raise DegenerateSeriesError("series shorter than one window")
    agg = PropertyProfile(flags={"scope": f"windowed:{window}/{stride}", "n_windows": len(profiles)})
    for name in ("shifting", "stationarity", "transition", "seasonality", "trend"):
        setattr(agg, name, _mean_or_none(getattr(p, name) for p in profiles))
    return agg
