"""Command-line entry point.

Subcommands: simulate, verify, bench, stream, roofline, analyze, plot.
Reporting commands accept --format {table,csv,json}; `plot` (and the
report bundles written by `analyze --out-dir` / `bench --plot`) emit SVG
figures next to the delimited output.

Exit codes: 0 success, 1 verification/operational failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import fixtures
from .circuits import build_ghz, build_qft, gate_count, load_circuit
from .errors import QsimError
from .harness import (
    DEFAULT_CLIFF_THRESHOLD,
    ExperimentPlan,
    detect_cliff,
    load_plan,
    load_results_csv,
    means_by_strategy,
    means_from_results,
    parse_qubit_range,
    run_experiment,
    save_results_csv,
    save_summary_json,
    speedup_table,
    step_ratios,
    summary_records,
)
from .kernels import STRATEGY_IDS, as_strategy, run_circuit
from .membench import stream_probe
from .roofline import GATE_COSTS, circuit_ai_profile, gate_ai, roofline_eval
from .state import init_zero_state, state_norm
from .svgplot import PlotSpec, RefLine, Series, emit_plot
from .verify import verify_strategy

CIRCUITS = {"ghz": build_ghz, "qft": build_qft}


# ---------------------------------------------------------------------------
# output helpers

def _print_table(headers, rows, out=None):
    out = out or sys.stdout
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(str(h))
              for i, h in enumerate(headers)]
    line = "  ".join(f"{h:>{w}}" for h, w in zip(headers, widths))
    print(line, file=out)
    print("-" * len(line), file=out)
    for r in rows:
        print("  ".join(f"{str(v):>{w}}" for v, w in zip(r, widths)), file=out)


def _emit_rows(headers, rows, fmt, out=None):
    out = out or sys.stdout
    if fmt == "csv":
        w = csv.writer(out)
        w.writerow(headers)
        w.writerows(rows)
    elif fmt == "json":
        json.dump([dict(zip(headers, r)) for r in rows], out, indent=2)
        out.write("\n")
    else:
        _print_table(headers, rows, out)


def _add_format(p):
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")


def _results_arg(text):
    """A results CSV path; `fixture:NAME` pulls a bundled fixture."""
    if text.startswith("fixture:"):
        return str(fixtures.fixture_path(text.split(":", 1)[1]))
    return text


# ---------------------------------------------------------------------------
# simulate

def _cmd_simulate(args) -> int:
    if args.circuit_file:
        circuit = load_circuit(args.circuit_file, n=args.qubits)
    else:
        if args.qubits is None:
            raise QsimError("simulate needs --qubits (or --circuit-file)")
        circuit = CIRCUITS[args.circuit](args.qubits)
    strategy = as_strategy(f"{args.strategy}:{args.dispatch}")
    budget = None if args.memory_budget_gb is None else int(args.memory_budget_gb * 1e9)
    state = init_zero_state(circuit.n, memory_budget_bytes=budget)
    t0 = time.perf_counter()
    run_circuit(state, circuit, strategy)
    elapsed = time.perf_counter() - t0
    total, hist = gate_count(circuit)

    amps = state.amps
    mags = np.abs(amps)
    nonzero = int(np.count_nonzero(mags > 1e-7))
    print(f"circuit   : {circuit.label} (n={circuit.n}, {total} gates: "
          + ", ".join(f"{k}:{v}" for k, v in sorted(hist.items())) + ")")
    print(f"strategy  : {strategy.label}")
    print(f"elapsed   : {elapsed:.6f} s")
    print(f"norm      : {state_norm(state):.8f}")
    print(f"nonzero   : {nonzero} amplitudes above 1e-7")
    top = np.argsort(mags)[::-1][: args.top]
    rows = [(f"|{idx:0{circuit.n}b}>", f"{amps[idx].real:+.6f}", f"{amps[idx].imag:+.6f}",
             f"{mags[idx]:.6f}") for idx in top if mags[idx] > 0]
    _print_table(("basis", "re", "im", "|amp|"), rows)
    return 0


# ---------------------------------------------------------------------------
# verify

def _cmd_verify(args) -> int:
    lo, hi = parse_qubit_range(args.qubits)
    strategies = STRATEGY_IDS if args.strategies == "all" else \
        tuple(s.strip() for s in args.strategies.split(","))
    circuit_names = ("ghz", "qft") if args.circuit == "both" else (args.circuit,)
    rows = []
    all_pass = True
    for name in circuit_names:
        for n in range(lo, hi + 1):
            circuit = CIRCUITS[name](n)
            for s in strategies:
                rep = verify_strategy(circuit, s, args.reference)
                all_pass &= rep.passed
                rows.append((name, n, rep.strategy, f"{rep.max_abs_deviation:.2e}",
                             "PASS" if rep.passed else "FAIL"))
    _emit_rows(("circuit", "n", "strategy", "max_deviation", "result"), rows, args.format)
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# bench

def _cmd_bench(args) -> int:
    if args.plan:
        plan = load_plan(args.plan)
    else:
        lo, hi = parse_qubit_range(args.qubits)
        plan = ExperimentPlan(
            circuit=args.circuit,
            strategies=tuple(s.strip() for s in args.strategies.split(",")),
            qubit_min=lo,
            qubit_max=hi,
            trials=args.trials,
            warmup_trials=args.warmup,
            recovery_seconds=args.recovery_seconds,
            isolation=args.isolation,
        )

    def sink(stats):
        if stats.error:
            print(f"  {stats.strategy} n={stats.n}: SKIPPED ({stats.error})", file=sys.stderr)
        elif args.verbose:
            print(f"  {stats.strategy} n={stats.n}: mean={stats.mean_s:.6f}s "
                  f"cov={stats.cov:.3f}", file=sys.stderr)

    results = run_experiment(plan, sink=sink)
    if args.out_csv:
        save_results_csv(results, args.out_csv)
    if args.out_json:
        save_summary_json(results, args.out_json)
    if args.plot:
        spec = _time_plot_spec(means_by_strategy(results), log_y=True,
                               title=f"{plan.circuit.upper()} wall-clock time")
        with open(args.plot, "w") as f:
            f.write(emit_plot(spec))

    rows = [(r["strategy"], r["n"],
             "-" if r["mean_s"] is None else f"{r['mean_s']:.6f}",
             "-" if r["sigma_s"] is None else f"{r['sigma_s']:.6f}",
             "-" if r["cov"] is None else f"{r['cov']:.4f}",
             r["state_bytes"], r.get("error", ""))
            for r in summary_records(results)]
    _emit_rows(("strategy", "n", "mean_s", "sigma_s", "cov", "state_bytes", "error"),
               rows, args.format)
    return 0


# ---------------------------------------------------------------------------
# stream

def _cmd_stream(args) -> int:
    exclude = tuple(int(x) for x in args.exclude.split(",") if x.strip()) if args.exclude else ()
    report = stream_probe(
        buffer_bytes=args.mb * 2 ** 20,
        warmup=args.warmup,
        trials=args.trials,
        exclude=exclude,
        peak_gbs=args.peak_gbs,
        parallel=args.parallel,
    )
    if args.format == "json":
        payload = {
            "buffer_bytes": report.buffer_bytes,
            "warmup_passes": report.warmup_passes,
            "timed_passes": report.timed_passes,
            "trial_seconds": list(report.trial_seconds),
            "trial_gbs": list(report.trial_gbs),
            "excluded_trials": list(report.excluded_trials),
            "kept_trials": report.kept_trials,
            "mean_gbs": report.mean_gbs,
            "sigma_gbs": report.sigma_gbs,
            "percent_of_peak": report.percent_of_peak,
            "dst_checksum": report.dst_checksum,
        }
        json.dump(payload, sys.stdout, indent=2)
        print()
        return 0
    rows = [(i, f"{t:.6f}", f"{g:.1f}", "excluded" if i in report.excluded_trials else "")
            for i, (t, g) in enumerate(zip(report.trial_seconds, report.trial_gbs), start=1)]
    _emit_rows(("trial", "seconds", "GB/s", "note"), rows, args.format)
    print(f"\nbuffer        : {report.buffer_bytes / 2**20:.0f} MiB x 2 "
          f"({report.warmup_passes} warm-up, {report.timed_passes} timed)")
    print(f"mean bandwidth: {report.mean_gbs:.1f} +- {report.sigma_gbs:.1f} GB/s "
          f"(N={report.kept_trials})")
    if report.percent_of_peak is not None:
        print(f"percent peak  : {report.percent_of_peak:.1f}% of {args.peak_gbs:g} GB/s")
    return 0


# ---------------------------------------------------------------------------
# roofline

def _cmd_roofline(args) -> int:
    have_machine = args.p_peak is not None and args.b_peak is not None
    if args.gate:
        cost = gate_ai(args.gate)
        rows = [[cost.row, cost.gate_type, cost.flops_per_unit, cost.bytes_per_unit,
                 f"{cost.ai:.3f}"]]
    else:
        rows = [[c.row, c.gate_type, c.flops_per_unit, c.bytes_per_unit, f"{c.ai:.3f}"]
                for c in GATE_COSTS.values()]
    headers = ["gate", "type", "flops", "bytes", "ai"]
    if have_machine:
        headers += ["predicted_gflops", "regime"]
        for r in rows:
            pt = roofline_eval(float(r[4]), args.p_peak, args.b_peak)
            r += [f"{pt.predicted:.3f}", pt.regime]
    _emit_rows(headers, rows, args.format)
    if have_machine:
        print(f"\nridge point AI* = {args.p_peak / args.b_peak:.4f} FLOP/byte "
              f"(P_peak={args.p_peak:g} GFLOP/s, B_peak={args.b_peak:g} GB/s)")
    if args.circuit:
        if args.qubits is None:
            raise QsimError("--circuit needs --qubits for the profile")
        profile = circuit_ai_profile(CIRCUITS[args.circuit](args.qubits))
        print(f"\n{args.circuit.upper()}({args.qubits}) profile: "
              f"{profile.total_flops} FLOP / {profile.total_bytes} bytes "
              f"= {profile.ai:.5f} FLOP/byte")
    return 0


# ---------------------------------------------------------------------------
# analyze

def _cmd_analyze(args) -> int:
    means = means_from_results(load_results_csv(_results_arg(args.results)))
    want_ratios = args.step_ratios or not (args.cliff or args.speedup)
    want_cliff = args.cliff or not (args.step_ratios or args.speedup)

    ratio_rows = []
    cliff_rows = []
    if want_ratios or want_cliff:
        for strategy in sorted(means):
            ratios = step_ratios(means[strategy])
            ratio_rows += [(strategy, n, f"{r:.2f}") for n, r in ratios]
            cliff_rows += [(strategy, n, f"{r:.2f}")
                           for n, r in detect_cliff(ratios, args.threshold)]

    out = sys.stdout
    if want_ratios:
        print("step ratios t(q)/t(q-1):", file=out)
        _emit_rows(("strategy", "q", "ratio"), ratio_rows, args.format)
    if want_cliff:
        print(f"\ncliff transitions (ratio >= {args.threshold:g}):", file=out)
        if cliff_rows:
            _emit_rows(("strategy", "q", "ratio"), cliff_rows, args.format)
        else:
            print("  none", file=out)

    speedup_rows = []
    for pair in args.speedup or ():
        cpu, gpu = _split_pair(pair)
        speedup_rows += [(f"{cpu}/{gpu}", n, f"{r:.2f}")
                         for n, r in speedup_table(_pick(means, cpu), _pick(means, gpu))]
    if speedup_rows:
        print("\nspeedup (first/second; >1 means the second is faster):", file=out)
        _emit_rows(("pair", "n", "speedup"), speedup_rows, args.format)

    if args.out_dir:
        _write_report_bundle(args, means, ratio_rows, cliff_rows, speedup_rows)
    return 0


def _split_pair(pair: str) -> tuple[str, str]:
    # '/' and not ':' because strategy labels may carry a ':parallel' suffix
    if "/" not in pair:
        raise QsimError(f"expected CPU_LABEL/GPU_LABEL, got {pair!r}")
    cpu, gpu = pair.split("/", 1)
    return cpu.strip(), gpu.strip()


def _pick(means: dict, label: str) -> dict:
    if label not in means:
        raise QsimError(f"no strategy {label!r} in the results file; "
                        f"available: {', '.join(sorted(means))}")
    return means[label]


def _write_report_bundle(args, means, ratio_rows, cliff_rows, speedup_rows) -> None:
    """Write delimited tables and their figures side by side."""
    import os
    os.makedirs(args.out_dir, exist_ok=True)

    def dump(name, headers, rows):
        with open(os.path.join(args.out_dir, name), "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(headers)
            w.writerows(rows)

    dump("step_ratios.csv", ("strategy", "q", "ratio"), ratio_rows)
    dump("cliffs.csv", ("strategy", "q", "ratio"), cliff_rows)
    if speedup_rows:
        dump("speedups.csv", ("pair", "n", "speedup"), speedup_rows)

    with open(os.path.join(args.out_dir, "time_vs_qubits.svg"), "w") as f:
        f.write(emit_plot(_time_plot_spec(means, log_y=True, title="wall-clock time")))
    ratios = {s: step_ratios(m) for s, m in means.items()}
    with open(os.path.join(args.out_dir, "cliff_bars.svg"), "w") as f:
        f.write(emit_plot(_cliff_bars_spec(ratios, transition=None, label="step ratio")))
    if speedup_rows:
        pairs = [_split_pair(p) for p in args.speedup]
        with open(os.path.join(args.out_dir, "speedup_vs_qubits.svg"), "w") as f:
            f.write(emit_plot(_speedup_plot_spec(means, pairs, ref_lines=())))


# ---------------------------------------------------------------------------
# plot

def _time_plot_spec(means, *, log_y, title="", band=None, ref_lines=()) -> PlotSpec:
    series = []
    for strategy in sorted(means):
        cells = means[strategy]
        ns = sorted(cells)
        series.append(Series(strategy, ns, [cells[n] for n in ns]))
    return PlotSpec(kind="time_vs_qubits_log", series=tuple(series), title=title,
                    x_label="qubits", y_label="seconds", log_y=log_y, band=band,
                    ref_lines=tuple(ref_lines))


def _speedup_plot_spec(means, pairs, *, band=None, ref_lines=(), title="") -> PlotSpec:
    series = []
    for cpu, gpu in pairs:
        table = speedup_table(_pick(means, cpu), _pick(means, gpu))
        series.append(Series(f"{cpu}/{gpu}", [n for n, _ in table], [r for _, r in table]))
    return PlotSpec(kind="speedup_vs_qubits", series=tuple(series), title=title,
                    x_label="qubits", y_label="speedup", band=band,
                    ref_lines=tuple(ref_lines))


def _cliff_bars_spec(ratios_by_strategy, *, transition, label, title="") -> PlotSpec:
    if transition is None:
        # default to the transition with the largest ratio anywhere
        transition = max(((r, n) for rs in ratios_by_strategy.values() for n, r in rs))[1]
    labels = sorted(s for s, rs in ratios_by_strategy.items()
                    if any(n == transition for n, _ in rs))
    xs = list(range(len(labels)))
    ys = [dict(ratios_by_strategy[s])[transition] for s in labels]
    series = (Series(f"{label} {transition}q/{transition - 1}q", xs, ys),)
    return PlotSpec(kind="cliff_bars", series=series, title=title,
                    x_label="strategy", y_label=f"t({transition})/t({transition - 1})",
                    x_tick_labels=tuple(labels),
                    ref_lines=(RefLine(2.0, "ideal 2x"),))


def _cmd_plot(args) -> int:
    means = means_from_results(load_results_csv(_results_arg(args.results)))
    band = None
    if args.band:
        lo, _, hi = args.band.partition(":")
        band = (float(lo), float(hi))
    refs = tuple(RefLine(y=float(v)) for v in args.ref_line or ())

    if args.kind == "time_vs_qubits_log":
        spec = _time_plot_spec(means, log_y=not args.linear, band=band,
                               ref_lines=refs, title=args.title)
    elif args.kind == "speedup_vs_qubits":
        if not args.pair:
            raise QsimError("speedup_vs_qubits needs at least one --pair CPU_LABEL/GPU_LABEL")
        pairs = [_split_pair(p) for p in args.pair]
        spec = _speedup_plot_spec(means, pairs, band=band, ref_lines=refs, title=args.title)
    else:
        ratios = {s: step_ratios(m) for s, m in means.items()}
        spec = _cliff_bars_spec(ratios, transition=args.transition,
                                label="step ratio", title=args.title)

    svg = emit_plot(spec)
    if args.out in (None, "-"):
        sys.stdout.write(svg)
    else:
        with open(args.out, "w") as f:
            f.write(svg)
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsimbench",
        description="State-vector simulation kernels plus bandwidth/cliff measurement tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one circuit and print a final-state summary")
    p.add_argument("--circuit", choices=sorted(CIRCUITS), default="ghz")
    p.add_argument("--circuit-file", help="line-format circuit file (overrides --circuit)")
    p.add_argument("--qubits", type=int)
    p.add_argument("--strategy", choices=STRATEGY_IDS, default="direct_index")
    p.add_argument("--dispatch", choices=("sequential", "parallel"), default="sequential")
    p.add_argument("--top", type=int, default=8, help="amplitudes to print")
    p.add_argument("--memory-budget-gb", type=float)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("verify", help="PASS/FAIL table of strategies vs the dense oracle")
    p.add_argument("--circuit", choices=("ghz", "qft", "both"), default="both")
    p.add_argument("--qubits", default="3..6", help="range a..b")
    p.add_argument("--strategies", default="all", help="comma list or 'all'")
    p.add_argument("--reference", default="kron_dense")
    _add_format(p)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("bench", help="run a timed sweep (ExperimentPlan)")
    p.add_argument("--plan", help="key=value plan file; overrides the inline flags")
    p.add_argument("--circuit", choices=sorted(CIRCUITS), default="ghz")
    p.add_argument("--strategies", default="direct_index", help="comma list; ':parallel' suffix allowed")
    p.add_argument("--qubits", default="3..10", help="range a..b")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--recovery-seconds", type=float, default=90.0)
    p.add_argument("--isolation", choices=("in_process", "subprocess"), default="in_process")
    p.add_argument("--out-csv", help="write per-trial results CSV")
    p.add_argument("--out-json", help="write per-cell summary JSON")
    p.add_argument("--plot", help="write a time-vs-qubits SVG next to the data")
    p.add_argument("--verbose", action="store_true")
    _add_format(p)
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("stream", help="sustained-bandwidth copy probe")
    p.add_argument("--mb", type=int, default=512, help="buffer size in MiB (x2 buffers)")
    p.add_argument("--warmup", type=int, default=10)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--exclude", default="", help="comma list of 1-based trial numbers")
    p.add_argument("--peak-gbs", type=float, help="theoretical peak for %% of peak")
    p.add_argument("--parallel", action="store_true", help="data-parallel copy pass")
    _add_format(p)
    p.set_defaults(fn=_cmd_stream)

    p = sub.add_parser("roofline", help="per-gate arithmetic intensity and roofline bound")
    p.add_argument("--gate", help="one row (kind or row name) instead of the full table")
    p.add_argument("--p-peak", type=float, help="peak compute, GFLOP/s")
    p.add_argument("--b-peak", type=float, help="peak bandwidth, GB/s")
    p.add_argument("--circuit", choices=sorted(CIRCUITS))
    p.add_argument("--qubits", type=int)
    _add_format(p)
    p.set_defaults(fn=_cmd_roofline)

    p = sub.add_parser("analyze", help="step ratios / cliffs / speedups from a results CSV")
    p.add_argument("--results", required=True,
                   help="results CSV path, or fixture:NAME for a bundled fixture")
    p.add_argument("--step-ratios", action="store_true")
    p.add_argument("--cliff", action="store_true")
    p.add_argument("--threshold", type=float, default=DEFAULT_CLIFF_THRESHOLD)
    p.add_argument("--speedup", action="append", metavar="CPU_LABEL/GPU_LABEL")
    p.add_argument("--out-dir", help="also write CSV tables plus SVG figures here")
    _add_format(p)
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("plot", help="render an SVG figure from a results CSV")
    p.add_argument("--results", required=True)
    p.add_argument("--kind", choices=("time_vs_qubits_log", "speedup_vs_qubits", "cliff_bars"),
                   default="time_vs_qubits_log")
    p.add_argument("--out", help="output path; '-' or omitted = stdout")
    p.add_argument("--band", help="shaded qubit interval LO:HI")
    p.add_argument("--ref-line", action="append", metavar="Y")
    p.add_argument("--pair", action="append", metavar="CPU_LABEL/GPU_LABEL")
    p.add_argument("--transition", type=int, help="qubit count q for cliff bars t(q)/t(q-1)")
    p.add_argument("--linear", action="store_true", help="linear y axis for time plots")
    p.add_argument("--title", default="")
    p.set_defaults(fn=_cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except QsimError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


cli_main = main

if __name__ == "__main__":
    sys.exit(main())
