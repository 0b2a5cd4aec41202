"""CSV ingestion, interpolation, splits, windows, prompts and tokenizer."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tsflab.data_io import (
    PAD_ID,
    TEMPLATES,
    UNK_ID,
    DataError,
    MultivariateSeries,
    PromptError,
    PromptTemplate,
    WindowSample,
    build_vocab,
    interpolate_missing,
    load_csv,
    load_vocab,
    make_windows,
    render_prompt,
    save_csv,
    save_vocab,
    split,
    split_bounds,
    tokenize,
    window_count,
    window_stats,
)


def _write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_csv_shape_and_missing(tmp_path):
    p = _write(tmp_path, "date,a,b\n2020-01-01,1,2\n2020-01-02,NaN,4\n2020-01-03,5,\n")
    s = load_csv(p)
    assert (s.length, s.channels) == (3, 2)
    assert s.timestamps == ["2020-01-01", "2020-01-02", "2020-01-03"]
    assert s.missing_mask[1, 0] and s.missing_mask[2, 1] and s.missing_mask.sum() == 2
    assert s.name == "d"


def test_load_csv_numeric_first_column_is_data(tmp_path):
    s = load_csv(_write(tmp_path, "a,b\n1,2\n3,4\n"))
    assert s.timestamps is None and s.values.tolist() == [[1, 2], [3, 4]]


def test_load_csv_etth1_shape(tmp_path):
    rows = ["date,HUFL,HULL,MUFL,MULL,LUFL,LULL,OT"]
    rows += [f"2016-07-01 {h:02d}:00:00," + ",".join(str(h + j) for j in range(7)) for h in range(24)]
    s = load_csv(_write(tmp_path, "\n".join(rows) + "\n"))
    assert s.channels == 7 and s.length == 24


@pytest.mark.parametrize(
    "text",
    ["a,b\n1,2\n3\n", "a\n", "date\n2020\n", "label\nx\n", "date,a\nx,1\ny,oops\n"],
)
def test_load_csv_errors(tmp_path, text):
    with pytest.raises(DataError):
        load_csv(_write(tmp_path, text))


def test_load_csv_missing_file(tmp_path):
    with pytest.raises(DataError):
        load_csv(tmp_path / "absent.csv")


def test_save_load_round_trip(tmp_path):
    s = MultivariateSeries("x", np.random.default_rng(0).normal(size=(20, 3)), timestamps=[str(i) for i in range(20)])
    save_csv(s, tmp_path / "x.csv")
    back = load_csv(tmp_path / "x.csv")
    np.testing.assert_array_equal(back.values, s.values)
    assert back.timestamps == s.timestamps


def test_interpolation_examples():
    s = MultivariateSeries("x", np.array([[1.0, np.nan], [np.nan, 5.0], [3.0, 7.0]]))
    out = interpolate_missing(s).values
    assert out[:, 0].tolist() == [1.0, 2.0, 3.0]
    assert out[:, 1].tolist() == [5.0, 5.0, 7.0]
    clean = MultivariateSeries("y", np.arange(6.0).reshape(3, 2))
    np.testing.assert_array_equal(interpolate_missing(clean).values, clean.values)
    with pytest.raises(DataError):
        interpolate_missing(MultivariateSeries("z", np.array([np.nan, np.nan])))


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.integers(3, 60), elements=st.floats(-1e6, 1e6)), st.integers(0, 2**31))
def test_interpolation_preserves_observed(values, seed):
    rng = np.random.default_rng(seed)
    drop = rng.random(values.size) < 0.4
    drop[rng.integers(values.size)] = False
    x = values.copy()
    x[drop] = np.nan
    out = interpolate_missing(MultivariateSeries("p", x)).values[:, 0]
    np.testing.assert_array_equal(out[~drop], values[~drop])
    assert np.all(np.isfinite(out))


@pytest.mark.parametrize(
    "T,kind,expected",
    [(10, "ett", (6, 2, 2)), (10, "standard", (7, 1, 2)), (14400, "ett", (8640, 2880, 2880))],
)
def test_split_ratios(T, kind, expected):
    parts = split(MultivariateSeries("s", np.arange(float(T))), kind)
    assert parts.bounds == expected
    assert tuple(p.length for p in parts) == expected


@settings(max_examples=100, deadline=None)
@given(st.integers(10, 5000), st.sampled_from(["ett", "standard"]))
def test_split_disjoint_contiguous_exhaustive(T, kind):
    x = np.arange(float(T))
    tr, va, te = split(MultivariateSeries("s", x), kind)
    joined = np.concatenate([tr.values[:, 0], va.values[:, 0], te.values[:, 0]])
    np.testing.assert_array_equal(joined, x)
    i, j = split_bounds(T, kind)
    assert tr.length == i and va.length == j - i


def test_split_too_short_and_short_flags():
    with pytest.raises(DataError):
        split(MultivariateSeries("s", np.arange(9.0)))
    parts = split(MultivariateSeries("s", np.arange(100.0)), min_length=15)
    assert parts.short == ["val"]


def test_window_counts():
    s = MultivariateSeries("w", np.random.default_rng(0).normal(size=(800, 1)))
    assert len(list(make_windows(s, 512, 96))) == 193 == window_count(800, 512, 96)
    s7 = MultivariateSeries("w", np.random.default_rng(0).normal(size=(800, 7)))
    assert len(list(make_windows(s7, 512, 96))) == 7 * 193
    assert len(list(make_windows(s, 512, 96, stride=10))) == window_count(800, 512, 96, 10) == 20
    with pytest.raises(DataError):
        list(make_windows(s, 700, 200))


def test_window_contents_and_ids():
    x = np.arange(50.0)
    w = list(make_windows(MultivariateSeries("w", x), 10, 5, stride=7))
    assert w[1].start == 7
    np.testing.assert_array_equal(w[1].input, x[7:17])
    np.testing.assert_array_equal(w[1].target, x[17:22])
    assert w[1].stats == (7.0, 16.0, 11.5)
    assert w[1].window_id == "w:0:7"


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, 20, elements=st.floats(-1e3, 1e3)), arrays(np.float64, 5, elements=st.floats(-1e3, 1e3)))
def test_stats_never_see_target(x, y):
    series = MultivariateSeries("p", np.concatenate([x, y]))
    sample = next(make_windows(series, 20, 5))
    series2 = MultivariateSeries("p", np.concatenate([x, y * -3.0 + 7.0]))
    sample2 = next(make_windows(series2, 20, 5))
    assert sample.stats == sample2.stats == window_stats(x)


def _sample(stats=(-1.2, 3.4, 0.7), L=512):
    return WindowSample(np.zeros(L), np.zeros(96), stats, "ETTh1", 0)


def test_render_etth1_prompt():
    text = render_prompt(TEMPLATES["ETTh1"], _sample(), 96)
    assert "a minimum value of -1.2" in text
    assert "a maximum value of 3.4" in text and "a median value of 0.7" in text
    assert "Given the past 512 observations, predict the next 96 time steps." in text


def test_render_unresolved_slot_raises():
    with pytest.raises(PromptError):
        render_prompt(PromptTemplate("value {mystery}"), _sample())
    assert PromptTemplate("a {x} b {y}").slots == ["x", "y"]


def test_tokenize_and_vocab():
    vocab = build_vocab(["the cat sat", "the dog sat on 12.5"])
    assert vocab["<pad>"] == PAD_ID and vocab["<unk>"] == UNK_ID
    assert tokenize("", vocab).ids == []
    ids = tokenize("The cat -1.2 zebra", vocab).ids
    assert ids == tokenize("The cat -1.2 zebra", vocab).ids
    assert UNK_ID in ids and vocab["cat"] in ids
    assert tokenize("12", vocab).ids == [vocab["1"], vocab["2"]]
    with pytest.raises(PromptError):
        build_vocab([])


def test_vocab_order_and_cap():
    vocab = build_vocab(["b b a c c c"], max_size=4)
    assert list(vocab) == ["<pad>", "<unk>", "c", "b"]


def test_vocab_round_trip(tmp_path):
    vocab = build_vocab(["alpha beta gamma 1 2 3"])
    save_vocab(vocab, tmp_path / "v.txt")
    assert load_vocab(tmp_path / "v.txt") == vocab


@settings(max_examples=100, deadline=None)
@given(st.text(max_size=80))
def test_tokenize_total(text):
    vocab = build_vocab(["some words here 0 1 2"])
    ids = tokenize(text, vocab).ids
    assert all(0 <= i < len(vocab) for i in ids)
