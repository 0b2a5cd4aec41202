"""Dataset ingestion, splitting, windowing, prompt rendering and a word tokenizer."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

PAD_ID = 0
UNK_ID = 1
PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"

SPLIT_RATIOS = {"ett": (6, 2, 2), "standard": (7, 1, 2)}

_MISSING = {"", "nan", "na", "null"}
_TIME_HEADERS = {"date", "time", "timestamp", "datetime"}


class DataError(ValueError):
    """Unreadable, malformed or too-short data."""


@dataclass
class MultivariateSeries:
    name: str
    values: np.ndarray  # (T, d)
    timestamps: list | None = None
    missing_mask: np.ndarray | None = None
    frequency: str = ""
    tags: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2:
            raise DataError(f"{self.name}: values must be T x d, got shape {v.shape}")
        self.values = v
        if self.missing_mask is None:
            self.missing_mask = ~np.isfinite(v)
        else:
            self.missing_mask = np.asarray(self.missing_mask, dtype=bool).reshape(v.shape)

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def channels(self) -> int:
        return self.values.shape[1]

    def slice(self, start: int, stop: int, suffix: str = "") -> "MultivariateSeries":
        ts = None if self.timestamps is None else self.timestamps[start:stop]
        return MultivariateSeries(
            name=self.name + suffix,
            values=self.values[start:stop].copy(),
            timestamps=ts,
            missing_mask=self.missing_mask[start:stop].copy(),
            frequency=self.frequency,
            tags=dict(self.tags),
        )


@dataclass
class WindowSample:
    input: np.ndarray  # (L,)
    target: np.ndarray  # (H,)
    stats: tuple[float, float, float]  # min, max, median of input
    dataset_name: str
    channel_index: int
    start: int = 0

    @property
    def window_id(self) -> str:
        return f"{self.dataset_name}:{self.channel_index}:{self.start}"


# ---------------------------------------------------------------------------
# CSV loading and cleaning
# ---------------------------------------------------------------------------


def _parse_cell(cell: str) -> float | None:
    text = cell.strip()
    if text.lower() in _MISSING:
        return None
    return float(text)


def _is_number(cell: str) -> bool:
    text = cell.strip()
    if text.lower() in _MISSING:
        return True
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_csv(path, name: str | None = None, frequency: str = "") -> MultivariateSeries:
    """Read a CSV with a header row.

    The first column becomes timestamps when it is non-numeric or its header
    is date, time, timestamp or datetime.
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if len(rows) < 2:
        raise DataError(f"{path}: needs a header and at least one data row")
    header, body = rows[0], rows[1:]
    width = len(header)
    for i, r in enumerate(body):
        if len(r) != width:
            raise DataError(f"{path}: ragged row {i + 2} ({len(r)} cells, header has {width})")
    first_numeric = header[0].strip().lower() not in _TIME_HEADERS and all(_is_number(r[0]) for r in body)
    start = 0 if first_numeric else 1
    if width - start < 1:
        raise DataError(f"{path}: no numeric columns")
    values = np.empty((len(body), width - start))
    for i, r in enumerate(body):
        for j, cell in enumerate(r[start:]):
            try:
                v = _parse_cell(cell)
            except ValueError as exc:
                raise DataError(f"{path}: non-numeric cell {cell!r} in row {i + 2}") from exc
            values[i, j] = np.nan if v is None else v
    timestamps = None if first_numeric else [r[0] for r in body]
    return MultivariateSeries(
        name=name or path.stem,
        values=values,
        timestamps=timestamps,
        missing_mask=np.isnan(values),
        frequency=frequency,
    )


def save_csv(series: MultivariateSeries, path) -> None:
    path = Path(path)
    cols = [f"c{j}" for j in range(series.channels)]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        if series.timestamps is not None:
            w.writerow(["timestamp"] + cols)
            for ts, row in zip(series.timestamps, series.values):
                w.writerow([ts] + [repr(float(v)) for v in row])
        else:
            w.writerow(cols)
            for row in series.values:
                w.writerow([repr(float(v)) for v in row])


def interpolate_missing(series: MultivariateSeries) -> MultivariateSeries:
    """Linear fill of interior gaps, nearest-value fill at the edges."""
    values = series.values.copy()
    mask = series.missing_mask | ~np.isfinite(values)
    t = np.arange(series.length)
    for j in range(series.channels):
        obs = ~mask[:, j]
        if not obs.any():
            raise DataError(f"{series.name}: channel {j} is entirely missing")
        if obs.all():
            continue
        # np.interp holds the end values constant outside the observed range
        values[~obs, j] = np.interp(t[~obs], t[obs], values[obs, j])
    return MultivariateSeries(
        name=series.name,
        values=values,
        timestamps=series.timestamps,
        missing_mask=np.zeros_like(mask),
        frequency=series.frequency,
        tags=dict(series.tags),
    )


# ---------------------------------------------------------------------------
# Splits and windows
# ---------------------------------------------------------------------------


@dataclass
class SplitResult:
    train: MultivariateSeries
    val: MultivariateSeries
    test: MultivariateSeries
    bounds: tuple[int, int, int]
    short: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter((self.train, self.val, self.test))


def split_bounds(T: int, kind: str = "standard") -> tuple[int, int]:
    if kind not in SPLIT_RATIOS:
        raise ValueError(f"unknown split kind {kind!r}")
    a, b, c = SPLIT_RATIOS[kind]
    total = a + b + c
    n_train = T * a // total
    n_val = T * b // total
    return n_train, n_train + n_val


def split(series: MultivariateSeries, kind: str = "standard", min_length: int | None = None) -> SplitResult:
    """Chronological train/val/test split; floor-rounded, remainder to test."""
    T = series.length
    if T < 10:
        raise DataError(f"{series.name}: series of length {T} is too short to split")
    i, j = split_bounds(T, kind)
    parts = SplitResult(
        train=series.slice(0, i, ":train"),
        val=series.slice(i, j, ":val"),
        test=series.slice(j, T, ":test"),
        bounds=(i, j - i, T - j),
    )
    if min_length is not None:
        for label, part in zip(("train", "val", "test"), parts):
            if part.length < min_length:
                parts.short.append(label)
    return parts


def window_count(length: int, L: int, H: int, stride: int = 1) -> int:
    return max(0, (length - L - H) // stride + 1)


def make_windows(
    series: MultivariateSeries, L: int = 512, H: int = 96, stride: int = 1, name: str | None = None
) -> Iterator[WindowSample]:
    """Channel-independent sliding windows; stats come from the input slice only."""
    if series.length < L + H:
        raise DataError(f"{series.name}: length {series.length} < L+H = {L + H}")
    name = name or series.name
    n = window_count(series.length, L, H, stride)
    for c in range(series.channels):
        col = series.values[:, c]
        for k in range(n):
            s = k * stride
            x = col[s : s + L].copy()
            y = col[s + L : s + L + H].copy()
            yield WindowSample(x, y, window_stats(x), name, c, s)


def window_stats(x: np.ndarray) -> tuple[float, float, float]:
    return float(np.min(x)), float(np.max(x)), float(np.median(x))


# ---------------------------------------------------------------------------
# Prompts and tokenizer
# ---------------------------------------------------------------------------

PROMPT_BODY = (
    "Given the past {input length} observations, predict the next {prediction length} time steps. "
    "The input window includes a minimum value of {min value}, a maximum value of {max value}, "
    "and a median value of {median value}."
)

TEMPLATES = {
    "ETTh1": 'The ETTh1 designed for time-series forecasting at 1-hour intervals, contains data points with the '
    'target variable "oil temperature" and six power load features. ' + PROMPT_BODY,
    "generic": "The {dataset} dataset is a univariate synthetic series. " + PROMPT_BODY,
}

_SLOT = re.compile(r"\{([^{}]+)\}")
_TOKEN = re.compile(r"-?\d+(?:\.\d+)?(?:e[-+]?\d+)?|\w+|[^\w\s]", re.IGNORECASE)


class PromptError(ValueError):
    """Template slot without a value, or an empty corpus."""


@dataclass
class PromptTemplate:
    template: str

    @property
    def slots(self) -> list[str]:
        return _SLOT.findall(self.template)


@dataclass
class TokenSequence:
    ids: list[int]
    text: str = ""

    @property
    def C(self) -> int:
        return len(self.ids)


def format_value(v: float, digits: int = 4) -> str:
    return f"{v:.{digits}g}"


def prompt_values(sample: WindowSample, H: int | None = None, dataset: str | None = None) -> dict[str, str]:
    lo, hi, med = sample.stats
    return {
        "min value": format_value(lo),
        "max value": format_value(hi),
        "median value": format_value(med),
        "input length": str(sample.input.size),
        "prediction length": str(sample.target.size if H is None else H),
        "dataset": dataset or sample.dataset_name.split(":")[0],
    }


def render_prompt(template: PromptTemplate | str, sample: WindowSample, H: int | None = None, extra: dict | None = None) -> str:
    text = template.template if isinstance(template, PromptTemplate) else template
    values = prompt_values(sample, H)
    values.update(extra or {})

    def fill(m: re.Match) -> str:
        key = m.group(1)
        if key not in values:
            raise PromptError(f"unresolved template slot {{{key}}}")
        return values[key]

    return _SLOT.sub(fill, text)


def split_words(text: str) -> list[str]:
    return [t.lower() for t in _TOKEN.findall(text)]


def split_digits(words: Iterable[str]) -> list[str]:
    """Spell numbers one character at a time so the vocabulary stays closed."""
    out: list[str] = []
    for w in words:
        if w[0].isdigit() or (w[0] == "-" and len(w) > 1):
            out.extend(w)
        else:
            out.append(w)
    return out


def build_vocab(corpus: Iterable[str], max_size: int = 2048) -> dict[str, int]:
    """Most frequent tokens first (ties alphabetical); PAD=0, UNK=1."""
    counts: dict[str, int] = {}
    any_text = False
    for line in corpus:
        any_text = True
        for tok in split_digits(split_words(line)):
            counts[tok] = counts.get(tok, 0) + 1
    if not any_text or not counts:
        raise PromptError("cannot build a vocabulary from an empty corpus")
    vocab = {PAD_TOKEN: PAD_ID, UNK_TOKEN: UNK_ID}
    for tok, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        if len(vocab) >= max_size:
            break
        if tok not in vocab:
            vocab[tok] = len(vocab)
    return vocab


def tokenize(text: str, vocab: dict[str, int]) -> TokenSequence:
    ids = [vocab.get(tok, UNK_ID) for tok in split_digits(split_words(text))]
    return TokenSequence(ids=ids, text=text)


def save_vocab(vocab: dict[str, int], path) -> None:
    items = sorted(vocab.items(), key=lambda kv: kv[1])
    if [i for _, i in items] != list(range(len(items))):
        raise ValueError("vocabulary ids must be contiguous from 0")
    Path(path).write_text("\n".join(tok for tok, _ in items) + "\n", encoding="utf-8")


def load_vocab(path) -> dict[str, int]:
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return {tok: i for i, tok in enumerate(lines)}
