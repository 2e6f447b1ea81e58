import numpy as np
import pytest
from hypothesis import given, strategies as st

from qsimbench.errors import TimerResolutionTooCoarse
from qsimbench.membench import (
    aggregate_trials,
    percent_of_peak,
    stream_probe,
    trial_bandwidth_gbs,
)


class FakeClock:
    """Deterministic clock: each timed pass takes the next preset duration."""

    def __init__(self, durations):
        self.durations = list(durations)
        self.now = 0.0
        self.starts = True

    def __call__(self):
        if self.starts:
            self.starts = False
            return self.now
        self.now += self.durations.pop(0)
        self.starts = True
        return self.now


def test_formula_one_gib_in_ten_ms():
    # 2 x 2^30 bytes / 0.01 s / 1e9 = 214.7483648 GB/s
    assert trial_bandwidth_gbs(2 ** 30, 0.01) == (2 * 2 ** 30) / 0.01 / 1e9
    assert trial_bandwidth_gbs(2 ** 30, 0.01) == pytest.approx(214.7483648)


def test_probe_with_injected_clock_matches_formula_exactly():
    buffer_bytes = 4 * 2 ** 20
    # dyadic durations: the fake clock accumulates, so differences stay exact
    durations = [0.0078125, 0.00390625, 0.00390625, 0.00390625]
    report = stream_probe(buffer_bytes=buffer_bytes, warmup=1, trials=4,
                          clock=FakeClock(durations), tick_seconds=0)
    for got, dur in zip(report.trial_gbs, durations):
        assert got == (2 * buffer_bytes) / dur / 1e9


def test_sigma_zero_when_trials_equal():
    _, mean, sigma = aggregate_trials(1 << 20, [0.01, 0.01, 0.01])
    assert sigma == 0.0
    assert mean == trial_bandwidth_gbs(1 << 20, 0.01)


def test_exclusion_removes_exactly_that_trial():
    times = [0.02, 0.01, 0.01, 0.01, 0.01]
    gbs_all, mean_all, _ = aggregate_trials(1 << 30, times)
    gbs_ex, mean_ex, sigma_ex = aggregate_trials(1 << 30, times, exclude=[1])
    assert gbs_ex == gbs_all  # raw per-trial values unchanged
    assert mean_ex == pytest.approx(np.mean(gbs_all[1:]))
    assert sigma_ex == 0.0


def test_first_trial_excluded_aggregation_shape():
    # frequency ramp on trial 1; aggregate over the remaining N=4
    report = stream_probe(buffer_bytes=1 << 20, warmup=2, trials=5, exclude=[1],
                          clock=FakeClock([0.0078125, 0.00390625, 0.00390625,
                                           0.00390625, 0.00390625]),
                          tick_seconds=0)
    assert report.timed_passes == 5
    assert report.kept_trials == 4
    assert report.excluded_trials == (1,)
    assert report.mean_gbs == pytest.approx(trial_bandwidth_gbs(1 << 20, 0.00390625))
    assert report.sigma_gbs == 0.0


def test_percent_of_peak_arithmetic():
    assert percent_of_peak(224.7, 273.0) == pytest.approx(82.3, abs=0.05)
    assert percent_of_peak(221.9, 273.0) == pytest.approx(81.3, abs=0.05)


def test_exclusion_validation():
    with pytest.raises(ValueError):
        aggregate_trials(1 << 20, [0.01, 0.01], exclude=[3])
    with pytest.raises(ValueError):
        aggregate_trials(1 << 20, [0.01], exclude=[1])


def test_copy_pass_actually_copies():
    report = stream_probe(buffer_bytes=1 << 20, warmup=0, trials=1)
    assert report.dst_checksum == report.src_checksum
    assert report.src_checksum > 0


def test_parallel_copy_matches():
    report = stream_probe(buffer_bytes=1 << 20, warmup=0, trials=1, parallel=True)
    assert report.dst_checksum == report.src_checksum


def test_timer_resolution_guard():
    with pytest.raises(TimerResolutionTooCoarse):
        stream_probe(buffer_bytes=1 << 16, warmup=0, trials=1,
                     clock=FakeClock([1e-7]), tick_seconds=1e-6)


def test_trials_validation():
    with pytest.raises(ValueError):
        stream_probe(buffer_bytes=1 << 16, trials=0)


@given(st.lists(st.floats(1e-4, 10.0), min_size=1, max_size=8))
def test_bandwidth_formula_property(times):
    buffer_bytes = 64 * 2 ** 20
    gbs, mean, sigma = aggregate_trials(buffer_bytes, times)
    for g, t in zip(gbs, times):
        assert g == (2 * buffer_bytes) / t / 1e9
    assert min(gbs) - 1e-9 <= mean <= max(gbs) + 1e-9
    assert sigma >= 0
