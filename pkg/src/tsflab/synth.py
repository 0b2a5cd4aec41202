"""Property-controlled synthetic suites with one strength knob per attribute.

Each generator maps a strength s in [0, 1] to a univariate series whose
matching property metric grows with s while the other four stay roughly put.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .data_io import MultivariateSeries, SplitResult, split
from .numkit import DEFAULT_SEED, RngStream, stream_id_for

ATTRIBUTES = ("shifting", "stationarity", "transition", "seasonality", "trend")
MAX_REGIMES = 8
NOISE_STD = 0.1
ENVELOPE_SLOPE = 0.25

# transition: expected switch count over a full series is SWITCH_RATE * s
SWITCH_RATE = 6.0
BASE_PERIOD = 24.0
PERIOD_JITTER = 0.15
PHASE_DIFFUSION = 0.002

# shifting: phase wander of the latent sinusoids, keeps the measured seasonality flat
LATENT_DIFFUSION = 0.005

# stationarity: random-walk step, drift total and AR(1) noise coefficient
RW_STEP = 0.11
DRIFT_TOTAL = 60.0
AR_COEF = 0.95
SCALE_DEPTH = 0.5

# trend: plateau height and knee position
TREND_HEIGHT = 10.0


@dataclass(frozen=True)
class GeneratorSpec:
    attribute: str
    strength: float = 0.5
    length: int = 20000
    n_series: int = 100
    seed: int = DEFAULT_SEED
    regimes: int = 4

    def __post_init__(self):
        if self.attribute not in ATTRIBUTES:
            raise ValueError(f"unknown attribute {self.attribute!r}; expected one of {ATTRIBUTES}")
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError(f"strength must lie in [0, 1], got {self.strength}")
        if self.length < 1024:
            raise ValueError(f"length must be >= 1024, got {self.length}")
        if self.n_series < 1:
            raise ValueError("n_series must be >= 1")
        if self.regimes < 2:
            raise ValueError("transition needs at least 2 regimes")
        if self.regimes > MAX_REGIMES:
            raise ValueError(f"at most {MAX_REGIMES} regime templates are available, got {self.regimes}")


def series_stream(spec: GeneratorSpec, index: int) -> RngStream:
    return RngStream(spec.seed, stream_id_for("synth", spec.attribute, float(spec.strength), int(index)))


def _envelope(n: int, slope: float = ENVELOPE_SLOPE) -> np.ndarray:
    return 1.0 + slope * np.arange(n) / n


def _smooth_noise(rng: np.random.Generator, n: int, knots: int = 10) -> np.ndarray:
    """Piecewise-linear interpolation of standard normals on a coarse grid."""
    e = rng.normal(size=knots + 3)
    return np.interp(np.arange(n) * knots / n, np.arange(e.size), e)


def _ar1(rng: np.random.Generator, n: int, coef: float) -> np.ndarray:
    e = rng.normal(size=n)
    out = np.empty(n)
    acc = 0.0
    for i in range(n):
        acc = coef * acc + e[i]
        out[i] = acc
    return out / out.std()


def _oscillation(rng: np.random.Generator, n: int, diffusion: float = PHASE_DIFFUSION, pmin: float = 16, pmax: float = 128) -> np.ndarray:
    """2-4 unit-normalized sinusoids whose phases wander slowly."""
    x = np.zeros(n)
    for _ in range(int(rng.integers(2, 5))):
        phase = rng.uniform() + np.cumsum(1.0 / rng.uniform(pmin, pmax) + diffusion * rng.normal(size=n))
        x += rng.uniform(0.5, 1.0) * np.sin(2 * np.pi * phase)
    return x / x.std()


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def latent_oscillation(spec: GeneratorSpec, index: int = 0, phase_drift: np.ndarray | None = None):
    """Unit-RMS sum of phase-diffusing sinusoids and its noise draw.

    This is the drift-free part of ``gen_shifting``; ``phase_drift`` is in radians.
    """
    rng = series_stream(spec, index).generator()
    n = spec.length
    v = np.zeros(n)
    for _ in range(int(rng.integers(2, 5))):
        cycles = rng.uniform() + np.cumsum(1.0 / rng.uniform(16, 128) + LATENT_DIFFUSION * rng.normal(size=n))
        arg = 2 * np.pi * cycles
        if phase_drift is not None:
            arg = arg + phase_drift
        v += rng.uniform(0.5, 1.0) * np.sin(arg)
    v /= np.sqrt(np.mean(v * v))
    return v, rng.normal(size=n)


def gen_shifting(spec: GeneratorSpec, index: int = 0) -> np.ndarray:
    u = np.arange(spec.length) / spec.length
    v, noise = latent_oscillation(spec, index, phase_drift=spec.strength * np.pi * u)
    # one factor carries both the amplitude drift and the noise-scale drift
    return (1.0 + spec.strength * u) * (v + NOISE_STD * noise)


def gen_stationarity(spec: GeneratorSpec, index: int = 0, return_scale: bool = False):
    rng = series_stream(spec, index).generator()
    n, s = spec.length, spec.strength
    t = np.arange(n)
    u = t / n
    v = np.zeros(n)
    for _ in range(2):
        period = rng.uniform(0.125, 0.3) * n
        v += rng.uniform(0.5, 1.0) * np.sin(2 * np.pi * t / period + rng.uniform(0, 2 * np.pi))
    v /= v.std()
    v = v + _ar1(rng, n, AR_COEF)
    scale = np.exp(s * SCALE_DEPTH * _smooth_noise(rng, n))
    mean = s * (RW_STEP * np.cumsum(rng.normal(size=n)) + DRIFT_TOTAL * u)
    x = scale * v + mean
    return (x, scale) if return_scale else x


def _regime_path(stream: RngStream, rng: np.random.Generator, n: int, K: int, s: float) -> np.ndarray:
    """Regime index per step; successor laws are keyed by a hash of the recent context."""
    order = int(math.ceil(1 + 4 * s))
    z = np.zeros(n, dtype=np.int64)
    switches = np.flatnonzero(rng.random(n) < SWITCH_RATE * s / n)
    draws = rng.random(switches.size)
    history = [0]
    cur, last = 0, 0
    for i, r in zip(switches, draws):
        if i == 0:
            continue
        ctx = tuple(history[-order:])
        w = stream.child("successor", ctx).generator().dirichlet(np.full(K, 0.5))
        # the base regime is never re-entered and a switch always changes regime
        w[0] = 0.0
        w[cur] = 0.0
        if w.sum() <= 0.0:
            continue
        z[last:i] = cur
        cur = min(int(np.searchsorted(np.cumsum(w) / w.sum(), r)), K - 1)
        history.append(cur)
        last = i
    z[last:] = cur
    return z


def gen_transition(spec: GeneratorSpec, index: int = 0, return_regimes: bool = False):
    """Base sine regime, then rising ramp templates with distinct periods."""
    stream = series_stream(spec, index)
    rng = stream.generator()
    n, K = spec.length, spec.regimes
    periods = BASE_PERIOD * np.exp(rng.uniform(-PERIOD_JITTER, PERIOD_JITTER, size=K))
    z = _regime_path(stream, rng, n, K, spec.strength)
    phase = rng.uniform() + np.cumsum(1.0 / periods[z] + PHASE_DIFFUSION * rng.normal(size=n))
    # both templates have unit variance
    x = np.where(z == 0, np.sqrt(2.0) * np.sin(2 * np.pi * phase), np.sqrt(3.0) * (2.0 * (phase % 1.0) - 1.0))
    x = _envelope(n) * (x + NOISE_STD * rng.normal(size=n))
    return (x, z) if return_regimes else x


def gen_seasonality(spec: GeneratorSpec, index: int = 0) -> np.ndarray:
    rng = series_stream(spec, index).generator()
    n, s = spec.length, spec.strength
    t = np.arange(n)
    u = t / n
    period = int(rng.choice([12, 24, 48, 96]))
    bank = np.zeros(n)
    for h in range(1, 4):
        bank += rng.uniform(0.3, 1.0) / h * np.sin(2 * np.pi * h * t / period + rng.uniform(0, 2 * np.pi))
    bank /= bank.std()
    depth = s * (1.0 + 0.1 * np.sin(2 * np.pi * u * rng.uniform(1, 3)))
    return _envelope(n) * (depth * bank + NOISE_STD * rng.normal(size=n))


def trend_curve(s: float, n: int) -> np.ndarray:
    """Linear ramp up to a knee, flat afterwards; the knee moves earlier as s grows."""
    u = np.arange(n) / n
    knee = 1.0 - 0.9 * s**0.25
    if knee >= 1.0:
        return s * TREND_HEIGHT * u
    return s * TREND_HEIGHT * np.where(u < knee, u / knee, 1.0)


def gen_trend(spec: GeneratorSpec, index: int = 0, return_parts: bool = False):
    rng = series_stream(spec, index).generator()
    n = spec.length
    v = _oscillation(rng, n)
    v = _envelope(n) * (v + NOISE_STD * rng.normal(size=n))
    g = trend_curve(spec.strength, n)
    return (v + g, v, g) if return_parts else v + g


GENERATORS = {
    "shifting": gen_shifting,
    "stationarity": gen_stationarity,
    "transition": gen_transition,
    "seasonality": gen_seasonality,
    "trend": gen_trend,
}


def generate(spec: GeneratorSpec, index: int = 0) -> np.ndarray:
    x = GENERATORS[spec.attribute](spec, index)
    if not np.all(np.isfinite(x)):
        raise FloatingPointError(f"{spec.attribute} generator produced non-finite values")
    return x


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


@dataclass
class SyntheticSuite:
    spec: GeneratorSpec
    series: list[MultivariateSeries]
    strength_levels: list[float]
    splits: list[SplitResult] = field(default_factory=list)

    def at_level(self, level: float) -> list[MultivariateSeries]:
        return [m for m in self.series if m.tags["strength"] == float(level)]

    def splits_at_level(self, level: float) -> list[SplitResult]:
        return [sp for m, sp in zip(self.series, self.splits) if m.tags["strength"] == float(level)]


def series_name(attribute: str, level: float, index: int) -> str:
    return f"{attribute}-s{level:.2f}-{index:03d}"


def gen_suite(attribute: str, strength_levels, spec: GeneratorSpec | None = None) -> SyntheticSuite:
    """n_series series per level, each split 7:1:2 chronologically."""
    levels = [float(s) for s in strength_levels]
    if not levels:
        raise ValueError("strength_levels must be non-empty")
    if len(set(levels)) != len(levels):
        raise ValueError(f"duplicate strength levels in {levels}")
    base = spec or GeneratorSpec(attribute)
    base = replace(base, attribute=attribute)
    series, splits = [], []
    for level in levels:
        lvl_spec = replace(base, strength=level)
        for i in range(base.n_series):
            x = generate(lvl_spec, i)
            m = MultivariateSeries(
                name=series_name(attribute, level, i),
                values=x[:, None],
                frequency="synthetic",
                tags={
                    "attribute": attribute,
                    "strength": level,
                    "index": i,
                    "stream_id": series_stream(lvl_spec, i).stream_id,
                },
            )
            series.append(m)
            splits.append(split(m, "standard"))
    return SyntheticSuite(spec=base, series=series, strength_levels=levels, splits=splits)
