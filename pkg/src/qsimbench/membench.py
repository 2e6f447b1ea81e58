"""Sustained memory-bandwidth probe (STREAM-style copy kernel).

Protocol: allocate two float32 buffers, run warm-up copy passes, then
independently time N copy passes dst[i] = src[i].  Each pass moves the
buffer twice over the bus (read + write), so

    GB/s = 2 * buffer_bytes / elapsed_seconds / 1e9.

Trials are numbered from 1.  An exclusion list drops trials from the
aggregate (e.g. a first-trial frequency ramp) while keeping their raw
values in the report.  Checksums of both buffers are folded into the
report so the copy cannot be elided.  Hardware numbers are report output,
never test oracles; tests drive the math through an injected clock.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor, wait
from dataclasses import dataclass

import numpy as np

from .errors import AllocationFailure, TimerResolutionTooCoarse

DEFAULT_BUFFER_BYTES = 512 * 2 ** 20
MIN_TIMER_TICKS = 100


@dataclass(frozen=True)
class BandwidthReport:
    buffer_bytes: int
    warmup_passes: int
    timed_passes: int
    trial_seconds: tuple[float, ...]
    trial_gbs: tuple[float, ...]
    excluded_trials: tuple[int, ...]      # 1-based trial numbers
    mean_gbs: float
    sigma_gbs: float
    percent_of_peak: float | None = None
    src_checksum: float = 0.0
    dst_checksum: float = 0.0

    @property
    def kept_trials(self) -> int:
        return self.timed_passes - len(self.excluded_trials)


def trial_bandwidth_gbs(buffer_bytes: int, elapsed_seconds: float) -> float:
    """Read+write GB/s of one copy pass."""
    return (2.0 * buffer_bytes) / elapsed_seconds / 1e9


def aggregate_trials(buffer_bytes: int, trial_seconds, exclude=()) -> tuple[list[float], float, float]:
    """Per-trial GB/s plus mean/sigma over the non-excluded trials.

    `exclude` holds 1-based trial numbers.  Sigma is the population standard
    deviation, zero when all kept trials are equal.
    """
    exclude = set(int(i) for i in exclude)
    bad = [i for i in exclude if not 1 <= i <= len(trial_seconds)]
    if bad:
        raise ValueError(f"excluded trial numbers out of range: {bad}")
    gbs = [trial_bandwidth_gbs(buffer_bytes, t) for t in trial_seconds]
    kept = [g for i, g in enumerate(gbs, start=1) if i not in exclude]
    if not kept:
        raise ValueError("all trials excluded")
    mean = float(np.mean(kept))
    sigma = float(np.std(kept))
    return gbs, mean, sigma


def percent_of_peak(mean_gbs: float, peak_gbs: float) -> float:
    return 100.0 * mean_gbs / peak_gbs


def _copy_pass(dst: np.ndarray, src: np.ndarray, parallel: bool, workers: int = 4) -> None:
    if not parallel:
        np.copyto(dst, src)
        return
    step = -(-dst.size // workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(np.copyto, dst[lo:lo + step], src[lo:lo + step])
                   for lo in range(0, dst.size, step)]
        wait(futures)
        for f in futures:
            f.result()


def stream_probe(
    buffer_bytes: int = DEFAULT_BUFFER_BYTES,
    warmup: int = 10,
    trials: int = 5,
    exclude=(),
    *,
    peak_gbs: float | None = None,
    parallel: bool = False,
    clock=None,
    tick_seconds: float | None = None,
) -> BandwidthReport:
    """Run the copy-bandwidth probe and return the aggregated report.

    `clock` defaults to time.perf_counter and is injectable for tests; with
    the default clock, trials shorter than 100 timer ticks raise
    TimerResolutionTooCoarse.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if clock is None:
        clock = time.perf_counter
        if tick_seconds is None:
            tick_seconds = time.get_clock_info("perf_counter").resolution
    n_elem = buffer_bytes // 4
    if n_elem < 1:
        raise ValueError("buffer too small for float32 elements")
    try:
        src = np.arange(n_elem, dtype=np.float32)
        dst = np.zeros(n_elem, dtype=np.float32)
    except MemoryError as e:
        raise AllocationFailure(f"could not allocate 2 x {buffer_bytes} byte buffers") from e

    for _ in range(warmup):
        _copy_pass(dst, src, parallel)

    times: list[float] = []
    for _ in range(trials):
        t0 = clock()
        _copy_pass(dst, src, parallel)
        elapsed = clock() - t0
        if tick_seconds and elapsed < MIN_TIMER_TICKS * tick_seconds:
            raise TimerResolutionTooCoarse(
                f"pass took {elapsed:.3g} s, below {MIN_TIMER_TICKS} ticks of "
                f"a {tick_seconds:.3g} s resolution timer; use a larger buffer")
        times.append(elapsed)

    gbs, mean, sigma = aggregate_trials(n_elem * 4, times, exclude)
    return BandwidthReport(
        buffer_bytes=n_elem * 4,
        warmup_passes=warmup,
        timed_passes=trials,
        trial_seconds=tuple(times),
        trial_gbs=tuple(gbs),
        excluded_trials=tuple(sorted(set(int(i) for i in exclude))),
        mean_gbs=mean,
        sigma_gbs=sigma,
        percent_of_peak=None if peak_gbs is None else percent_of_peak(mean, peak_gbs),
        src_checksum=float(np.sum(src, dtype=np.float64)),
        dst_checksum=float(np.sum(dst, dtype=np.float64)),
    )
