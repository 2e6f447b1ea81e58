import json
import xml.etree.ElementTree as ET

from qsimbench.cli import main
from qsimbench.fixtures import GHZ_MEANS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_usage_error_exits_2(capsys):
    assert main(["bogus-command"]) == 2
    assert main([]) == 2


def test_simulate_ghz(capsys):
    code, out, _ = run(capsys, "simulate", "--circuit", "ghz", "--qubits", "5")
    assert code == 0
    assert "ghz" in out and "nonzero   : 2" in out
    assert "|00000>" in out and "|11111>" in out


def test_simulate_respects_budget(capsys):
    code, _, err = run(capsys, "simulate", "--circuit", "ghz", "--qubits", "20",
                       "--memory-budget-gb", "0.000001")
    assert code == 1
    assert "budget" in err


def test_simulate_circuit_file(tmp_path, capsys):
    path = tmp_path / "bell.txt"
    path.write_text("H 0\nCNOT 1 0\n")
    code, out, _ = run(capsys, "simulate", "--circuit-file", str(path), "--top", "4")
    assert code == 0
    assert "nonzero   : 2" in out


def test_verify_ghz_five_counts_all_pass(capsys):
    code, out, _ = run(capsys, "verify", "--circuit", "ghz", "--qubits", "3..7")
    assert code == 0
    assert "FAIL" not in out
    assert out.count("PASS") == 5 * 5


def test_verify_qft_3_4_all_strategies_pass(capsys):
    code, out, _ = run(capsys, "verify", "--circuit", "qft", "--qubits", "3..4",
                       "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 10
    assert all(r["result"] == "PASS" for r in rows)


def test_roofline_single_gate(capsys):
    code, out, _ = run(capsys, "roofline", "--gate", "hadamard")
    assert code == 0
    assert "0.250" in out


def test_roofline_table_with_machine_params(capsys):
    code, out, _ = run(capsys, "roofline", "--p-peak", "1000", "--b-peak", "224.7")
    assert code == 0
    assert "general_2x2" in out and "0.875" in out
    assert "memory_bound" in out
    assert "ridge point" in out
    assert "56.175" in out  # hadamard: 0.25 * 224.7


def test_roofline_circuit_profile(capsys):
    code, out, _ = run(capsys, "roofline", "--circuit", "ghz", "--qubits", "30")
    assert code == 0
    assert "0.00833" in out


def test_stream_small_probe_json(capsys):
    code, out, _ = run(capsys, "stream", "--mb", "4", "--warmup", "1", "--trials", "2",
                       "--peak-gbs", "273", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["timed_passes"] == 2
    assert payload["dst_checksum"] > 0  # copy was not elided
    assert payload["mean_gbs"] > 0
    assert payload["percent_of_peak"] > 0


def test_analyze_fixture_step_ratios(capsys):
    code, out, _ = run(capsys, "analyze", "--results", f"fixture:{GHZ_MEANS}",
                       "--step-ratios", "--cliff")
    assert code == 0
    assert "4.46" in out
    assert "3.45" in out
    assert "direct_index_gpu" not in out.split("cliff transitions")[1]


def test_analyze_speedup_pair(capsys):
    code, out, _ = run(capsys, "analyze", "--results", f"fixture:{GHZ_MEANS}",
                       "--speedup", "direct_index_cpu/direct_index_gpu")
    assert code == 0
    assert "10.08" in out


def test_bench_roundtrip_analyze_and_plot(tmp_path, capsys):
    csv_path = tmp_path / "results.csv"
    json_path = tmp_path / "summary.json"
    svg_path = tmp_path / "time.svg"
    code, out, _ = run(capsys, "bench", "--circuit", "ghz", "--strategies",
                       "direct_index,flat_index", "--qubits", "3..5", "--trials", "2",
                       "--recovery-seconds", "0", "--out-csv", str(csv_path),
                       "--out-json", str(json_path), "--plot", str(svg_path))
    assert code == 0
    assert csv_path.read_text().startswith("strategy,n,trial_index,seconds")
    summary = json.loads(json_path.read_text())
    assert {r["strategy"] for r in summary} == {"direct_index", "flat_index"}
    ET.fromstring(svg_path.read_text())

    # bench output feeds analyze unchanged
    code, out, _ = run(capsys, "analyze", "--results", str(csv_path), "--step-ratios")
    assert code == 0
    assert "direct_index" in out

    # and plot
    code, _, _ = run(capsys, "plot", "--results", str(csv_path),
                     "--kind", "time_vs_qubits_log", "--out", str(tmp_path / "p.svg"))
    assert code == 0
    ET.fromstring((tmp_path / "p.svg").read_text())


def test_bench_plan_file(tmp_path, capsys):
    plan = tmp_path / "plan.txt"
    plan.write_text("circuit=ghz\nstrategies=direct_index\nqubits=3..4\n"
                    "trials=1\nwarmup=0\nrecovery_seconds=0\n")
    code, out, _ = run(capsys, "bench", "--plan", str(plan), "--format", "csv")
    assert code == 0
    assert "direct_index,3" in out


def test_plot_speedup_with_reference_line(tmp_path, capsys):
    out_path = tmp_path / "speedup.svg"
    code, _, _ = run(capsys, "plot", "--results", f"fixture:{GHZ_MEANS}",
                     "--kind", "speedup_vs_qubits",
                     "--pair", "direct_index_cpu/direct_index_gpu",
                     "--ref-line", "1.85", "--out", str(out_path))
    assert code == 0
    svg = out_path.read_text()
    assert "1.85" in svg
    ET.fromstring(svg)


def test_plot_cliff_bars_defaults_to_biggest_transition(tmp_path, capsys):
    out_path = tmp_path / "bars.svg"
    code, _, _ = run(capsys, "plot", "--results", f"fixture:{GHZ_MEANS}",
                     "--kind", "cliff_bars", "--out", str(out_path))
    assert code == 0
    svg = out_path.read_text()
    assert 'class="bar"' in svg
    assert "t(29)/t(28)" in svg  # 4.46 at 29q is the largest ratio
    ET.fromstring(svg)


def test_plot_band_annotation(tmp_path, capsys):
    out_path = tmp_path / "band.svg"
    code, _, _ = run(capsys, "plot", "--results", f"fixture:{GHZ_MEANS}",
                     "--band", "28:29", "--out", str(out_path))
    assert code == 0
    assert 'class="band"' in out_path.read_text()


def test_analyze_out_dir_writes_tables_and_figures(tmp_path, capsys):
    out_dir = tmp_path / "report"
    code, _, _ = run(capsys, "analyze", "--results", f"fixture:{GHZ_MEANS}",
                     "--step-ratios", "--cliff",
                     "--speedup", "direct_index_cpu/direct_index_gpu",
                     "--out-dir", str(out_dir))
    assert code == 0
    names = {p.name for p in out_dir.iterdir()}
    assert {"step_ratios.csv", "cliffs.csv", "speedups.csv",
            "time_vs_qubits.svg", "cliff_bars.svg", "speedup_vs_qubits.svg"} <= names
    for svg in out_dir.glob("*.svg"):
        ET.fromstring(svg.read_text())


def test_missing_results_file(capsys):
    code, _, err = run(capsys, "analyze", "--results", "/nonexistent/file.csv")
    assert code == 1
    assert "error" in err
