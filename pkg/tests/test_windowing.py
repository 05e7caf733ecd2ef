import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eonplan.errors import DatasetSizeError, NormalizationError
from eonplan.traces import TrafficTrace
from eonplan.windowing import (
    Normalizer,
    build_dataset,
    dataset_header,
    export_dataset_csv,
    fit_normalizer,
    interval_max,
    load_dataset_csv,
    normalize_samples,
    samples_for_patterns,
    split,
    window_count,
)


def trace_of(n, start=1.0):
    return TrafficTrace("T", np.arange(start, start + n), 5.0)


class TestBuildDataset:
    def test_hand_computed_example(self):
        # trace 1..12, r=1, k=2, u=1: chi spans intervals 0..1, psi = max of interval 2
        ds = build_dataset(trace_of(12), r=1, k=2, u=1)
        assert len(ds) == 4
        assert list(ds[0].chi) == [1, 2, 3, 4]
        assert list(ds[0].psi) == [6]
        assert ds[0].t_index == 1

    def test_paper_shape(self):
        ds = build_dataset(trace_of(4842), r=3, k=6, u=4)
        assert len(ds) == 800
        assert all(len(s.chi) == 24 and len(s.psi) == 4 for s in ds)

    def test_window_steps_by_one_interval(self):
        ds = build_dataset(trace_of(20), r=1, k=2, u=1)
        assert [s.t_index for s in ds] == list(range(1, 9))
        assert list(ds[1].chi) == [3, 4, 5, 6]

    def test_too_short_raises(self):
        # k*(r+u) samples leave no room for the present interval
        with pytest.raises(DatasetSizeError):
            build_dataset(trace_of(2 * (1 + 1)), r=1, k=2, u=1)

    def test_tail_leftover_dropped(self):
        full = build_dataset(trace_of(12), r=1, k=2, u=1)
        ragged = build_dataset(trace_of(13), r=1, k=2, u=1)
        assert len(ragged) == len(full)

    def test_psi_is_interval_max(self):
        rng = np.random.default_rng(5)
        trace = TrafficTrace("T", rng.uniform(0, 9, size=60), 5.0)
        for s in build_dataset(trace, r=2, k=3, u=2):
            for j in range(2):
                flucts = trace.samples[(s.t_index + 1 + j) * 3 : (s.t_index + 2 + j) * 3]
                assert s.psi[j] == flucts.max()
                assert all(s.psi[j] >= f for f in flucts)

    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(8, 400), r=st.integers(1, 4), k=st.integers(1, 6), u=st.integers(1, 4))
    def test_count_formula(self, n, r, k, u):
        expected = window_count(n, r, k, u)
        if k * (r + 1 + u) > n:
            with pytest.raises(DatasetSizeError):
                build_dataset(trace_of(n), r, k, u)
        else:
            assert len(build_dataset(trace_of(n), r, k, u)) == expected == n // k - r - u

    def test_samples_for_patterns_inverts_count(self):
        assert samples_for_patterns(800, 3, 6, 4) == 4842
        ds = build_dataset(trace_of(samples_for_patterns(800, 3, 6, 4)), 3, 6, 4)
        assert len(ds) == 800


class TestSplit:
    def test_paper_split(self):
        ds = build_dataset(trace_of(4842), 3, 6, 4)
        train, test = split(ds, 0.8)
        assert (len(train), len(test)) == (640, 160)

    def test_even_split(self):
        ds = build_dataset(trace_of(26), r=1, k=2, u=1)[:10]
        train, test = split(ds, 0.5)
        assert (len(train), len(test)) == (5, 5)

    def test_chronological(self):
        ds = build_dataset(trace_of(40), r=1, k=2, u=1)
        train, test = split(ds, 0.61)
        assert max(s.t_index for s in train) < min(s.t_index for s in test)

    def test_empty_raises(self):
        with pytest.raises(DatasetSizeError):
            split([], 0.8)

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(2, 80), frac=st.floats(0.05, 0.95))
    def test_partition(self, n, frac):
        ds = build_dataset(trace_of((n + 2) * 2), r=1, k=2, u=1)[:n]
        train, test = split(ds, frac)
        assert len(train) + len(test) == n
        assert [s.t_index for s in train] + [s.t_index for s in test] == [s.t_index for s in ds]


class TestNormalizer:
    def test_midpoint(self):
        norm = Normalizer(0.0, 10.0)
        assert norm.apply(5.0) == 0.5

    def test_fit_uses_chi_and_psi(self):
        ds = build_dataset(trace_of(12), r=1, k=2, u=1)
        norm = fit_normalizer(ds[:1])
        assert norm.min == 1.0 and norm.max == 6.0

    def test_round_trip(self):
        rng = np.random.default_rng(1)
        trace = TrafficTrace("T", rng.uniform(0.1, 8, size=120), 5.0)
        ds = build_dataset(trace, 2, 3, 2)
        train, _ = split(ds, 0.8)
        norm = fit_normalizer(train)
        for s in train:
            assert np.allclose(norm.invert(norm.apply(s.chi)), s.chi, atol=1e-9)

    def test_training_values_in_unit_interval(self):
        ds = build_dataset(trace_of(60), 1, 2, 1)
        train, _ = split(ds, 0.7)
        norm = fit_normalizer(train)
        for s in normalize_samples(train, norm):
            assert s.chi.min() >= 0 and s.chi.max() <= 1

    def test_test_values_may_exceed_unit_no_clamping(self):
        ds = build_dataset(trace_of(60), 1, 2, 1)
        train, test = split(ds, 0.7)
        norm = fit_normalizer(train)
        top = max(s.psi.max() for s in normalize_samples(test, norm))
        assert top > 1.0  # rising ramp: later values exceed the training range

    def test_constant_series_errors(self):
        with pytest.raises(NormalizationError):
            Normalizer(3.0, 3.0)
        flat = TrafficTrace("T", np.full(24, 2.0), 5.0)
        with pytest.raises(NormalizationError):
            fit_normalizer(build_dataset(flat, 1, 2, 1))


class TestExport:
    def test_header_shape(self):
        assert dataset_header(3, 6, 4)[:2] == ["t_index", "chi_0"]
        assert len(dataset_header(3, 6, 4)) == 1 + 24 + 4

    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(9)
        trace = TrafficTrace("T", rng.uniform(0, 5, size=90), 5.0)
        ds = build_dataset(trace, 2, 3, 2)
        path = str(tmp_path / "d.csv")
        export_dataset_csv(ds, path, 2, 3, 2, config_note={"r": 2})
        back = load_dataset_csv(path)
        assert len(back) == len(ds)
        for a, b in zip(ds, back):
            assert a.t_index == b.t_index
            assert np.array_equal(a.chi, b.chi)
            assert np.array_equal(a.psi, b.psi)

    def test_interval_max_helper(self):
        trace = TrafficTrace("T", np.array([2.0, 7, 5, 1, 3, 4], dtype=float), 5.0)
        assert interval_max(trace, 0, 6) == 7.0
