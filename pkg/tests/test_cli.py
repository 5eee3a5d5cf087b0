import json
import random
import subprocess
import sys

import pytest

from ricciweights.cli import main, render, resolve_record, run_batch
from ricciweights.metric import MetricSpec, verify_ricci_flat
from ricciweights.records import load_fixture, parse_records


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_command(capsys):
    code, out, _ = run(["parse", "0,0,e^{12},e^{13},e^{23},e^{25}+e^{14}"], capsys)
    assert code == 0
    assert "nice" in out


def test_parse_command_reports_jacobi(capsys):
    code, out, err = run(["parse", "0,0,0,e^{12},e^{13},e^{45}"], capsys)
    assert code != 0
    assert "jacobi: fails" in out


def test_parse_error_exit_code(capsys):
    code, _, err = run(["parse", "0,e^{13}"], capsys)
    assert code == 2 and "parse error" in err


def test_derivations_command(capsys):
    code, out, _ = run(["derivations", "0,0,e^{12},e^{13},e^{23},e^{25}+e^{14}"], capsys)
    assert code == 0 and "10" in out


def test_grading_command(capsys):
    code, out, _ = run(["grading", "0,0,0,e^{12},e^{14},e^{15}+e^{23}+e^{24}"], capsys)
    assert code == 0
    assert "weights: 1,2,3,3,4,5" in out and "ricci-flat: yes" in out


def test_grading_from_weights(capsys):
    code, out, _ = run(["grading", "0,0,e^{12}", "--torus", "from-file", "--weights", "l1,l2,l1+l2"], capsys)
    assert code == 0


def test_filtration_command(capsys):
    code, out, _ = run(["filtration", "0,0,0,e^{12},e^{14},e^{15}+e^{23}+e^{24}"], capsys)
    assert code == 0 and "1,2,3,3,4,5" in out
    code, out, _ = run(["filtration", "0,0,-e^{12},e^{13},e^{14},e^{25}+e^{34}"], capsys)
    assert code == 1 and "no adapted filtration in this basis" in out


def test_ricci_command(capsys):
    # exit status 1 signals a nonzero Ricci tensor
    code, out, _ = run(["ricci", "0,0,e^{12}", "--metric", "e^1⊗e^1+e^2⊗e^2+e^3⊗e^3"], capsys)
    assert code == 1
    assert "[-1/2, 0, 0]" in out and "[0, 0, 1/2]" in out
    code, out, _ = run(["ricci", "0,0,e^{12}", "--metric", '[["0","0","1"],["0","1","0"],["1","0","0"]]'], capsys)
    assert code == 0 and "ricci-flat: yes" in out


def test_verify_sigma_command(capsys):
    alg = "0,0,-e^{12},-e^{13},e^{14},e^{15},e^{16}+e^{23},e^{27}+e^{36}+e^{45}"
    code, out, _ = run(["verify-sigma", alg, "--sigma", "17 28 35", "--samples", "2"], capsys)
    assert code == 0
    code, out, _ = run(["verify-sigma", alg, "--sigma", "18", "--samples", "2"], capsys)
    assert code == 1


def test_batch_empty_file(tmp_path, capsys):
    f = tmp_path / "empty.txt"
    f.write_text("")
    code, out, _ = run(["batch", str(f), "--report", "json"], capsys)
    assert code == 0 and json.loads(out) == []


def test_batch_parse_error_line(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("A: 0,0\n\nB: 0,0,e^{1y}\n")
    code, _, err = run(["batch", str(f)], capsys)
    assert code == 2 and "bad.txt:3" in err


def test_jacobi_failure_is_a_record_error():
    (rec,) = parse_records("J: 0,0,0,e^{12},e^{13},e^{45}\n")
    res = resolve_record(rec)
    assert res.outcome == "error"
    assert "Jacobi" in res.diagnostics[0]


def _outcomes(results):
    return [(r.name, r.outcome, json.dumps(r.to_json())) for r in results]


def test_batch_deterministic_across_jobs_and_order():
    recs = load_fixture("small.txt") + load_fixture("unique_grading.txt")
    one = run_batch(recs, jobs=1)
    many = run_batch(recs, jobs=3)
    assert _outcomes(one) == _outcomes(many)
    shuffled = recs[:]
    random.Random(5).shuffle(shuffled)
    by_name = {r[0]: r for r in _outcomes(one)}
    for r in _outcomes(run_batch(shuffled, jobs=2)):
        assert by_name[r[0]] == r


def test_json_round_trip_reverifies():
    recs = load_fixture("small.txt")[:8] + load_fixture("exceptions.txt")[2:4]
    results = run_batch(recs)
    data = json.loads(render(results, "json"))
    for rec, entry in zip(recs, data):
        assert set(entry) >= {"name", "outcome", "metric", "certificate"}
        if entry["outcome"] == "unresolved":
            assert entry["metric"] is None
            continue
        assert entry["certificate"] == {"formula_zero": True, "koszul_zero": True}
        g = MetricSpec.from_json(entry["metric"])
        assert verify_ricci_flat(rec.algebra, g).flat


def test_exception_file_resolution():
    recs = load_fixture("exceptions.txt")
    only_f = run_batch(recs, strategy="f")
    assert all(r.outcome == "unresolved" for r in only_f)
    assert all("no adapted filtration" in r.diagnostics[0] for r in only_f)
    full = run_batch(recs)
    assert {r.name: r.outcome for r in full} == {r.name: r.expect for r in recs}
    assert [r.name for r in full if r.outcome == "sigma"] == ["X-1", "X-2", "X-3", "X-4", "X-5", "X-6", "X-7"]


def test_table1_batch_all_grading():
    for mode in ("diagonal", "from-file"):
        res = run_batch(load_fixture("table1.txt"), torus_mode=mode)
        assert all(r.outcome == "grading" for r in res), mode


def test_latex_and_text_reports():
    res = run_batch(load_fixture("examples.txt")[:2])
    tex = render(res, "latex-table")
    assert tex.count("\\\\") == 2
    text = render(res, "text")
    assert text.splitlines()[-1] == "total: grading 2"


def test_batch_expect_mismatch_exit(tmp_path, capsys):
    f = tmp_path / "m.txt"
    f.write_text("!expect unresolved\nH: 0,0,e^{12}\n")
    code, out, _ = run(["batch", str(f)], capsys)
    assert code == 1 and "expected unresolved" in out


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "ricciweights", "parse", "0,0,e^{12}"],
                       capture_output=True, text=True, check=False)
    assert p.returncode == 0


@pytest.mark.parametrize("report", ["text", "json", "latex-table"])
def test_batch_stdin(report, monkeypatch, capsys):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO("H: 0,0,e^{12}\n"))
    code, out, _ = run(["batch", "-", "--report", report], capsys)
    assert code == 0 and out.strip()
