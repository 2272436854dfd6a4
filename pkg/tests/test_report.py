from msckit.eval import run
from msckit.harness import size_scaling_report
from msckit.report import write_coloring_report, write_scaling_report, write_trace_report
from msckit.syntax import parse_program
from msckit.model import graph_to_kripke


def test_scaling_report_files(tmp_path):
    rep = size_scaling_report("demo", [(10, 20), (30, 70), (90, 200)], 3.0)
    paths = write_scaling_report(rep, tmp_path)
    assert all(p.exists() and p.stat().st_size > 0 for p in paths)
    csv_text = paths[0].read_text()
    assert csv_text.splitlines()[0] == "input_size,output_size,ratio"
    assert len(csv_text.splitlines()) == 4


def test_coloring_report_files(tmp_path):
    outputs = {0: "100", 1: "010", 2: "100"}
    colors = {0: 0, 1: 1, 2: 0}
    paths = write_coloring_report(3, [(1, 2), (2, 3)], outputs, colors, tmp_path)
    assert all(p.exists() and p.stat().st_size > 0 for p in paths)
    assert "node_id,output_bits,color_index" in paths[0].read_text()


def test_trace_report_files(tmp_path):
    p = parse_program("msc { X(0) := p1; X := <> X; attention X; print X; }")
    m = graph_to_kripke(2, [(1, 2)])
    t = run(p, m, 5)
    paths = write_trace_report(t, tmp_path)
    assert all(p.exists() and p.stat().st_size > 0 for p in paths)
    assert paths[0].read_text().startswith("round,node,state,appointed,broadcast")
