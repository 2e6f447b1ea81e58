"""Benchmark harness: timed simulation sweeps plus step-ratio analysis.

A sweep runs one strategy at a time to completion, qubit counts ascending,
with an idle recovery sleep between strategies so heat from one strategy
cannot inflate the next one's timings.  Each (strategy, n) cell runs
warm-up trials (discarded) followed by N timed trials; the timer wraps the
circuit execution only, never state allocation.  Cells that fail (memory
budget, kernel errors) are recorded and the sweep continues.

The analysis half is pure arithmetic over per-cell mean times: step ratios
t(q)/t(q-1), cliff detection (ratio >= threshold), and per-qubit speedup
between two strategies.  It accepts mean timings directly, so bundled
reference fixtures that carry means only feed the same code path as live
sweep output.

Results interchange formats:
  CSV   one row per (strategy, n, trial): strategy,n,trial_index,seconds
  JSON  list of cell summaries: strategy, n, mean_s, sigma_s, cov, state_bytes

QSIM_RECOVERY_SECONDS in the environment overrides the plan's recovery
value (useful in CI).
"""
from __future__ import annotations

import csv
import json
import multiprocessing
import os
import time
from dataclasses import dataclass

import numpy as np

from .circuits import build_ghz, build_qft
from .errors import MissingQubitCount, QsimError
from .kernels import as_strategy, run_circuit
from .state import DEFAULT_MAX_QUBITS, init_zero_state, reset_zero_state

RECOVERY_ENV_VAR = "QSIM_RECOVERY_SECONDS"
DEFAULT_CLIFF_THRESHOLD = 3.0

CIRCUIT_BUILDERS = {"ghz": build_ghz, "qft": build_qft}

RESULTS_CSV_FIELDS = ("strategy", "n", "trial_index", "seconds")


@dataclass(frozen=True)
class ExperimentPlan:
    circuit: str = "ghz"
    strategies: tuple[str, ...] = ("direct_index",)
    qubit_min: int = 3
    qubit_max: int = 10
    trials: int = 3
    warmup_trials: int = 1
    recovery_seconds: float = 90.0
    isolation: str = "in_process"           # or "subprocess"

    def validate(self) -> None:
        if self.circuit not in CIRCUIT_BUILDERS:
            raise ValueError(f"unknown circuit {self.circuit!r}; choose from {sorted(CIRCUIT_BUILDERS)}")
        if not self.strategies:
            raise ValueError("plan needs at least one strategy")
        for s in self.strategies:
            as_strategy(s)  # raises on unknown id/dispatch
        if not 1 <= self.qubit_min <= self.qubit_max <= DEFAULT_MAX_QUBITS:
            raise ValueError(f"qubit range {self.qubit_min}..{self.qubit_max} out of bounds")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.warmup_trials < 0:
            raise ValueError("warmup_trials must be >= 0")
        if self.recovery_seconds < 0:
            raise ValueError("recovery_seconds must be >= 0")
        if self.isolation not in ("in_process", "subprocess"):
            raise ValueError(f"unknown isolation {self.isolation!r}")


@dataclass(frozen=True)
class TrialStats:
    """Timing record for one (strategy, qubit count) cell."""

    strategy: str
    n: int
    trial_seconds: tuple[float, ...]
    mean_s: float
    sigma_s: float
    cov: float
    state_bytes: int
    error: str | None = None

    @classmethod
    def from_times(cls, strategy: str, n: int, times, state_bytes: int) -> "TrialStats":
        times = tuple(float(t) for t in times)
        mean = float(np.mean(times))
        sigma = float(np.std(times))
        return cls(strategy=strategy, n=n, trial_seconds=times, mean_s=mean,
                   sigma_s=sigma, cov=sigma / mean if mean > 0 else 0.0,
                   state_bytes=state_bytes)

    @classmethod
    def failed(cls, strategy: str, n: int, error: str) -> "TrialStats":
        return cls(strategy=strategy, n=n, trial_seconds=(), mean_s=float("nan"),
                   sigma_s=float("nan"), cov=float("nan"),
                   state_bytes=(1 << n) * 8, error=error)


def _time_cell(circuit_name: str, n: int, strategy: str, trials: int,
               warmup: int, memory_budget_bytes) -> tuple[list[float], int]:
    circuit = CIRCUIT_BUILDERS[circuit_name](n)
    state = init_zero_state(n, memory_budget_bytes=memory_budget_bytes)
    strat = as_strategy(strategy)
    for _ in range(warmup):
        reset_zero_state(state)
        run_circuit(state, circuit, strat)
    times = []
    for _ in range(trials):
        reset_zero_state(state)
        t0 = time.perf_counter()
        run_circuit(state, circuit, strat)
        times.append(time.perf_counter() - t0)
    return times, state.size_bytes


def _time_cell_subprocess(args):
    # module-level so the spawn context can import it
    return _time_cell(*args)


def _run_cell(plan: ExperimentPlan, n: int, strategy: str, memory_budget_bytes):
    args = (plan.circuit, n, strategy, plan.trials, plan.warmup_trials, memory_budget_bytes)
    if plan.isolation == "subprocess":
        ctx = multiprocessing.get_context("spawn")
        with ctx.Pool(processes=1, maxtasksperchild=1) as pool:
            return pool.apply(_time_cell_subprocess, (args,))
    return _time_cell(*args)


def effective_recovery_seconds(plan: ExperimentPlan) -> float:
    env = os.environ.get(RECOVERY_ENV_VAR)
    if env is not None:
        return float(env)
    return plan.recovery_seconds


def run_experiment(plan: ExperimentPlan, *, sink=None,
                   memory_budget_bytes=None) -> list[TrialStats]:
    """Execute the sweep; results stream to `sink` as cells complete.

    Each strategy finishes all its qubit counts (ascending) before the next
    strategy starts, separated by the recovery sleep.  Failed cells are
    recorded with their error and do not abort the sweep.
    """
    plan.validate()
    recovery = effective_recovery_seconds(plan)
    results: list[TrialStats] = []
    for i, strategy in enumerate(plan.strategies):
        if i > 0 and recovery > 0:
            time.sleep(recovery)
        for n in range(plan.qubit_min, plan.qubit_max + 1):
            try:
                times, state_bytes = _run_cell(plan, n, strategy, memory_budget_bytes)
                stats = TrialStats.from_times(strategy, n, times, state_bytes)
            except QsimError as e:
                stats = TrialStats.failed(strategy, n, f"{type(e).__name__}: {e}")
            results.append(stats)
            if sink is not None:
                sink(stats)
    return results


# ---------------------------------------------------------------------------
# analysis over mean timings

def means_by_strategy(stats) -> dict[str, dict[int, float]]:
    """Group successful cells as {strategy: {n: mean_seconds}}."""
    out: dict[str, dict[int, float]] = {}
    for s in stats:
        if s.error is None:
            out.setdefault(s.strategy, {})[s.n] = s.mean_s
    return out


def step_ratios(means: dict[int, float]) -> list[tuple[int, float]]:
    """Per-qubit runtime growth: (q, t(q)/t(q-1)) for consecutive q.

    Requires a gap-free qubit range; raises MissingQubitCount otherwise.
    """
    ns = sorted(means)
    for prev, cur in zip(ns, ns[1:]):
        if cur != prev + 1:
            raise MissingQubitCount(f"qubit counts not consecutive: gap between {prev} and {cur}")
    return [(cur, means[cur] / means[cur - 1]) for cur in ns[1:]]


def detect_cliff(ratios, threshold: float = DEFAULT_CLIFF_THRESHOLD) -> list[tuple[int, float]]:
    """Transitions whose ratio meets the threshold; empty list = no cliff.

    The default sits between the ideal 2x doubling and observed cliff
    magnitudes, so ordinary scaling never triggers it.
    """
    return [(n, r) for n, r in ratios if r >= threshold]


def speedup_table(means_a: dict[int, float], means_b: dict[int, float]) -> list[tuple[int, float]]:
    """Per-qubit ratio mean_a / mean_b; values > 1 mean b is faster."""
    if set(means_a) != set(means_b):
        missing = set(means_a) ^ set(means_b)
        raise MissingQubitCount(f"qubit counts differ between the two series: {sorted(missing)}")
    return [(n, means_a[n] / means_b[n]) for n in sorted(means_a)]


# ---------------------------------------------------------------------------
# results and plan files

def write_results_csv(stats, fileobj) -> None:
    writer = csv.writer(fileobj)
    writer.writerow(RESULTS_CSV_FIELDS)
    for s in stats:
        if s.error is not None:
            continue
        for i, sec in enumerate(s.trial_seconds, start=1):
            writer.writerow([s.strategy, s.n, i, repr(sec)])


def save_results_csv(stats, path) -> None:
    with open(path, "w", newline="") as f:
        write_results_csv(stats, f)


def summary_records(stats) -> list[dict]:
    records = []
    for s in stats:
        rec = {"strategy": s.strategy, "n": s.n}
        if s.error is None:
            rec.update(mean_s=s.mean_s, sigma_s=s.sigma_s, cov=s.cov,
                       state_bytes=s.state_bytes)
        else:
            rec.update(mean_s=None, sigma_s=None, cov=None,
                       state_bytes=s.state_bytes, error=s.error)
        records.append(rec)
    return records


def save_summary_json(stats, path) -> None:
    with open(path, "w") as f:
        json.dump(summary_records(stats), f, indent=2)
        f.write("\n")


def load_results_csv(path) -> dict[str, dict[int, list[float]]]:
    """Read a results CSV into {strategy: {n: [seconds by trial]}}."""
    out: dict[str, dict[int, list[float]]] = {}
    opened = open(path) if isinstance(path, (str, os.PathLike)) else path
    try:
        reader = csv.DictReader(opened)
        for row in reader:
            out.setdefault(row["strategy"], {}).setdefault(int(row["n"]), []).append(
                float(row["seconds"]))
    finally:
        if opened is not path:
            opened.close()
    return out


def means_from_results(results: dict[str, dict[int, list[float]]]) -> dict[str, dict[int, float]]:
    return {s: {n: float(np.mean(ts)) for n, ts in cells.items()}
            for s, cells in results.items()}


_PLAN_KEYS = {"circuit", "strategies", "qubits", "trials", "warmup",
              "recovery_seconds", "isolation"}


def parse_plan(text: str) -> ExperimentPlan:
    """key=value plan format: circuit, strategies (comma list), qubits
    (``a..b`` or single), trials, warmup, recovery_seconds, isolation."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"plan line {lineno} is not key=value: {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _PLAN_KEYS:
            raise ValueError(f"unknown plan key {key!r} (line {lineno})")
        values[key] = val.strip()

    kwargs: dict = {}
    if "circuit" in values:
        kwargs["circuit"] = values["circuit"].lower()
    if "strategies" in values:
        kwargs["strategies"] = tuple(s.strip() for s in values["strategies"].split(",") if s.strip())
    if "qubits" in values:
        kwargs["qubit_min"], kwargs["qubit_max"] = parse_qubit_range(values["qubits"])
    if "trials" in values:
        kwargs["trials"] = int(values["trials"])
    if "warmup" in values:
        kwargs["warmup_trials"] = int(values["warmup"])
    if "recovery_seconds" in values:
        kwargs["recovery_seconds"] = float(values["recovery_seconds"])
    if "isolation" in values:
        kwargs["isolation"] = values["isolation"]
    plan = ExperimentPlan(**kwargs)
    plan.validate()
    return plan


def load_plan(path) -> ExperimentPlan:
    with open(path) as f:
        return parse_plan(f.read())


def parse_qubit_range(text: str) -> tuple[int, int]:
    """'16..22' -> (16, 22); a single integer means a one-point range."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        return int(lo), int(hi)
    val = int(text)
    return val, val
