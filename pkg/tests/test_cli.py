from __future__ import annotations

import json
import subprocess
import sys
from importlib import resources

import pytest

from sva_equiv.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, build_parser, main, resolve_eval_options

SAMPLE = str(resources.files("sva_equiv") / "data" / "sample_eval.jsonl")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--sva", "a |-> ##[1:2] b")
    assert code == EXIT_OK and out.split("\t")[1].strip() == "C2"


def test_classify_histogram(capsys, tmp_path):
    src = tmp_path / "svas.txt"
    src.write_text("a && b\na |-> b\ns_eventually c\n\n")
    code, out, _ = run(capsys, "classify", "--input", str(src), "--histogram")
    lines = out.strip().splitlines()
    assert code == EXIT_OK and [l.split("\t")[1] for l in lines[:3]] == ["C1", "C2", "C3"]
    assert json.loads(lines[-1]) == {"counts": {"C1": 1, "C2": 1, "C3": 1}, "errors": 0}


def test_normalize(capsys, tmp_path):
    report = tmp_path / "norm.json"
    code, out, _ = run(capsys, "normalize", "--sva", "`A |-> top.b // c", "--profile", "pec", "--report", str(report))
    assert code == EXIT_OK and out.strip() == "A |-> top_b"
    (entry,) = json.loads(report.read_text())
    assert {r for r, _ in entry["fired"]} == {"R1", "R2", "R11"}


def test_normalize_collapse(capsys):
    code, out, _ = run(capsys, "normalize", "--sva", "a ##[1:3] b", "--collapse", "upper")
    assert out.strip() == "a ##3 b"


def test_wrap(capsys, tmp_path):
    src = tmp_path / "rows.jsonl"
    src.write_text(json.dumps({"id": "r1", "reference_sva": "@(posedge ACLK) req |-> ##[1:WIDTH] ack"}) + "\n")
    code, _, _ = run(capsys, "wrap", "--input", str(src), "--out-dir", str(tmp_path / "sv"))
    text = (tmp_path / "sv" / "r1.sv").read_text()
    assert code == EXIT_OK and "parameter logic [31:0] WIDTH" in text and "endmodule" in text


def test_wrap_failure(capsys):
    code, _, err = run(capsys, "wrap", "--sva", "a |-> |-> b")
    assert code == EXIT_CONFIG and err


def test_check(capsys):
    code, out, _ = run(capsys, "check", "--ref", "a |=> b", "--cand", "a |-> ##1 b", "--depth", "4")
    assert code == EXIT_OK and json.loads(out)["verdict"] == "EQUIVALENT"


def test_check_syntax_error(capsys):
    code, out, _ = run(capsys, "check", "--ref", "a", "--cand", "###", "--depth", "3")
    assert code == EXIT_CONFIG
    assert json.loads(out)["side"] == "candidate"


def test_check_bad_config(capsys):
    code, _, err = run(capsys, "check", "--ref", "a", "--cand", "a", "--depth", "0")
    assert code == EXIT_CONFIG and "error" in err


def test_metrics(capsys, tmp_path):
    src = tmp_path / "tasks.jsonl"
    src.write_text('{"task_id": "t1", "n": 4, "c": 1}\n{"task_id": "t2", "n": 4, "c": 0}\n')
    code, out, _ = run(capsys, "metrics", "--input", str(src), "--k", "1", "2", "--replicates", "200")
    d = json.loads(out)
    assert code == EXIT_OK and d["tasks"] == 2
    assert d["pass_at_k"]["pass@2"]["estimate"] == pytest.approx(0.25)


def test_metrics_bad_row(capsys, tmp_path):
    src = tmp_path / "tasks.jsonl"
    src.write_text('{"task_id": "t1", "n": 2, "c": 3}\n')
    assert run(capsys, "metrics", "--input", str(src))[0] == EXIT_IO


def test_eval_outputs(capsys, tmp_path):
    rep, dump = tmp_path / "rep.json", tmp_path / "rows.csv"
    code, out, err = run(
        capsys, "eval", "--input", SAMPLE, "--depth", "4", "--report", str(rep), "--dump", str(dump), "--replicates", "200"
    )
    assert code == EXIT_OK
    assert "Func@1 all" in out and "candidates in" in err
    d = json.loads(rep.read_text())
    assert d["rows"] == 20 and d["schema_version"] == 1
    assert len(dump.read_text().strip().splitlines()) == 41
    assert (tmp_path / "rows_verdicts.png").stat().st_size > 0
    assert (tmp_path / "rows_per_class.png").stat().st_size > 0


def test_eval_no_figures(capsys, tmp_path):
    rep = tmp_path / "rep.json"
    run(capsys, "eval", "--input", SAMPLE, "--depth", "3", "--report", str(rep), "--replicates", "50", "--no-figures")
    assert rep.exists() and not list(tmp_path.glob("*.png"))


def test_eval_missing_input(capsys, tmp_path):
    assert run(capsys, "eval", "--input", str(tmp_path / "none.jsonl"))[0] == EXIT_IO
    assert run(capsys, "eval")[0] == EXIT_CONFIG


def test_eval_empty_input(capsys, tmp_path):
    src = tmp_path / "bad.jsonl"
    src.write_text('{"id": "x"}\n')
    code, _, err = run(capsys, "eval", "--input", str(src))
    assert code == EXIT_IO and "line 1" in err


class TestConfig:
    def parse(self, *argv):
        return resolve_eval_options(build_parser().parse_args(["eval", *argv]))

    def test_precedence(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# run settings\ninput = rows.jsonl\ndepth = 7\nworkers = 3\nself_check = true\n")
        opts = self.parse("--config", str(cfg), "--depth", "5")
        assert opts["depth"] == 5 and opts["workers"] == 3 and opts["self_check"] is True
        assert opts["input"] == "rows.jsonl" and opts["timeout"] == 60.0

    def test_unknown_key(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("depht = 3\n")
        code, _, err = run(capsys, "eval", "--input", SAMPLE, "--config", str(cfg))
        assert code == EXIT_CONFIG and "depht" in err

    def test_bad_value(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("workers = many\n")
        assert run(capsys, "eval", "--input", SAMPLE, "--config", str(cfg))[0] == EXIT_CONFIG

    def test_bad_backend_in_config(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("backend = magic\n")
        assert run(capsys, "eval", "--input", SAMPLE, "--config", str(cfg))[0] == EXIT_CONFIG


def test_console_script_module():
    proc = subprocess.run(
        [sys.executable, "-m", "sva_equiv.cli", "check", "--ref", "a", "--cand", "a", "--depth", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["verdict"] == "EQUIVALENT"
