import json

import pytest

import brickrank.cli as cli
from brickrank.archetypes import FactViolation
from brickrank.witness import verify_witness, witness_from_json


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_minimal_set_inline(capsys):
    code, out, _ = run(capsys, "minimal-set", "25x3", "9x8", "16x5")
    assert code == 0
    assert out == "1x1\nrank 1\n"


def test_minimal_set_rotation(capsys):
    code, out, _ = run(capsys, "minimal-set", "2x3x7", "3x7x2", "7x2x3")
    assert code == 0
    lines = out.splitlines()
    assert lines[-1] == "rank 15"
    assert len(lines) == 16


def test_minimal_set_singleton(capsys):
    code, out, _ = run(capsys, "minimal-set", "5x5")
    assert code == 0
    assert out == "5x5\nrank 1\n"


def test_minimal_set_json(capsys):
    code, out, _ = run(capsys, "minimal-set", "25x3", "9x8", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["rank"] == len(doc["minimal"])


def test_minimal_set_input_file_lines(capsys, tmp_path):
    f = tmp_path / "protos.txt"
    f.write_text("25x3\n9x8\n16x5\n")
    code, out, _ = run(capsys, "minimal-set", "--input", str(f))
    assert code == 0
    assert out == "1x1\nrank 1\n"


def test_minimal_set_input_file_json(capsys, tmp_path):
    f = tmp_path / "protos.json"
    f.write_text('["25x3", "9x8", "16x5"]')
    code, out, _ = run(capsys, "minimal-set", "--input", str(f))
    assert code == 0
    assert out == "1x1\nrank 1\n"


def test_minimal_set_symbolic(capsys):
    code, out, _ = run(capsys, "minimal-set", "(w)x(w)", "(x)x(x)")
    assert code == 0
    assert "(wx)x(w+x)" in out.splitlines()


def test_minimal_set_no_prune_same_answer(capsys):
    code1, out1, _ = run(capsys, "minimal-set", "6x10", "15x4")
    code2, out2, _ = run(capsys, "minimal-set", "6x10", "15x4", "--no-prune")
    assert (code1, out1) == (code2, out2)


def test_minimal_set_parse_error(capsys):
    code, _, err = run(capsys, "minimal-set", "25y3")
    assert code == 2
    assert "error" in err


def test_minimal_set_empty(capsys):
    code, _, err = run(capsys, "minimal-set")
    assert code == 2


def test_tilable_yes_no(capsys):
    code, out, _ = run(capsys, "tilable", "3x1", "3x8", "4x5", "7x3")
    assert (code, out) == (0, "yes\n")
    code, out, _ = run(capsys, "tilable", "3x3", "2x2")
    assert (code, out) == (1, "no\n")


def test_tilable_json(capsys):
    code, out, _ = run(capsys, "tilable", "34x11", "25x3", "9x8", "16x5",
                       "--format", "json")
    assert code == 0
    assert json.loads(out) == {"tilable": True}


def test_tilable_witness_output(capsys):
    code, out, _ = run(capsys, "tilable", "3x1", "3x8", "4x5", "7x3",
                       "--witness")
    assert code == 0
    w = witness_from_json(out)
    assert verify_witness(w)


def test_tilable_witness_negative(capsys):
    code, out, _ = run(capsys, "tilable", "3x3", "2x2", "--witness")
    assert code == 1
    assert out == "no\n"


def test_tilable_witness_symbolic_rejected(capsys):
    code, _, err = run(capsys, "tilable", "(w)x(w)", "(w)x(w)", "--witness")
    assert code == 2


def test_maxrank_single(capsys):
    code, out, _ = run(capsys, "maxrank", "3", "2")
    assert (code, out) == (0, "18\n")
    code, out, _ = run(capsys, "maxrank", "1", "5")
    assert (code, out) == (0, "1\n")


def test_maxrank_single_json(capsys):
    code, out, _ = run(capsys, "maxrank", "2", "3", "--format", "json")
    assert code == 0
    assert json.loads(out) == {"n": 2, "d": 3, "maxrank": 5}


def test_maxrank_table_csv(capsys):
    code, out, _ = run(capsys, "maxrank", "--table", "--n-max", "2",
                       "--d-max", "4", "--format", "csv")
    assert code == 0
    assert out == "n,d=2,d=3,d=4\n1,1,1,1\n2,4,5,6\n"


def test_maxrank_table_text_and_json(capsys):
    code, out, _ = run(capsys, "maxrank", "--table", "--n-max", "2",
                       "--d-max", "3")
    assert code == 0
    assert out.splitlines()[0].split() == ["n", "d=2", "d=3"]
    code, out, _ = run(capsys, "maxrank", "--table", "--n-max", "2",
                       "--d-max", "3", "--format", "json")
    assert json.loads(out)["rows"][1]["values"] == [4, 5]


def test_maxrank_missing_args(capsys):
    code, _, err = run(capsys, "maxrank")
    assert code == 2


def test_maxrank_guard(capsys):
    code, _, err = run(capsys, "maxrank", "5", "3")
    assert code == 3
    assert "guard" in err


def test_guard_override_env(monkeypatch):
    class Args:
        allow_big = False

    monkeypatch.delenv("BRICKRANK_GUARD_OVERRIDE", raising=False)
    assert not cli._allow_big(Args())
    monkeypatch.setenv("BRICKRANK_GUARD_OVERRIDE", "1")
    assert cli._allow_big(Args())
    monkeypatch.setenv("BRICKRANK_GUARD_OVERRIDE", "off")
    assert not cli._allow_big(Args())
    Args.allow_big = True
    assert cli._allow_big(Args())


def test_dedekind_count(capsys):
    code, out, _ = run(capsys, "dedekind", "3")
    assert (code, out) == (0, "18\n")
    code, out, _ = run(capsys, "dedekind", "3", "--count", "--format", "json")
    assert json.loads(out) == {"n": 3, "count": 18}


def test_dedekind_enumerate(capsys):
    code, out, _ = run(capsys, "dedekind", "1", "--enumerate")
    assert (code, out) == (0, "w\n")
    code, out, _ = run(capsys, "dedekind", "2", "--enumerate")
    assert out.splitlines() == ["w", "x", "wx", "w+x"]


def test_dedekind_dual(capsys):
    code, out, _ = run(capsys, "dedekind", "4", "--dual", "w+xy")
    assert (code, out) == (0, "wx+wy\n")


def test_dedekind_dual_parse_error(capsys):
    code, _, err = run(capsys, "dedekind", "4", "--dual", "w+")
    assert code == 2


def test_dedekind_guard(capsys):
    code, _, err = run(capsys, "dedekind", "7")
    assert code == 3


def test_certificate_text_and_files(capsys, tmp_path):
    out_path = tmp_path / "n3.jsonl"
    code, out, err = run(capsys, "certificate", "3", "--output", str(out_path))
    assert code == 0
    lines = out.splitlines()
    assert "max true dimension 2" in lines
    assert "levels 3 7 18 36" in lines
    docs = [json.loads(line) for line in out_path.read_text().splitlines()]
    assert docs[-1]["complete"] is True
    # level-by-level progress goes to stderr, stdout stays machine-clean
    assert "level" in err


def test_certificate_resume(capsys, tmp_path):
    out_path = tmp_path / "n2.jsonl"
    code, out, _ = run(capsys, "certificate", "2", "--output", str(out_path))
    assert code == 0
    partial = tmp_path / "partial.jsonl"
    partial.write_text(out_path.read_text().splitlines()[0] + "\n")
    code, out, err = run(capsys, "certificate", "2", "--resume", str(partial))
    assert code == 0
    assert "resumed" in err
    assert "max true dimension 1" in out.splitlines()


def test_certificate_json_matches_polynomial(capsys, tmp_path):
    code, out, _ = run(capsys, "certificate", "4", "--output",
                       str(tmp_path / "n4.jsonl"), "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["max_true_dim"] == 3
    assert doc["levels"] == [4, 15, 166, 578, 1372]
    assert doc["polynomial"] == "4 + 1/6*(-112*d + 57*d^2 + 121*d^3)"


def test_certificate_guard(capsys, tmp_path):
    code, _, err = run(capsys, "certificate", "5", "--output",
                       str(tmp_path / "n5.jsonl"))
    assert code == 3


def test_poly_text(capsys):
    code, out, _ = run(capsys, "poly", "3")
    assert code == 0
    assert out.splitlines() == [
        "3 + 1/2*(d + 7*d^2)",
        "3 7 18 36 61 93 132 178 231 291 358 432",
    ]


def test_poly_n1_and_eval(capsys):
    code, out, _ = run(capsys, "poly", "1")
    assert out.splitlines()[0] == "1"
    code, out, _ = run(capsys, "poly", "2", "--d-max", "7")
    assert out.splitlines()[1].split()[-1] == "9"


def test_poly_csv_and_json(capsys):
    code, out, _ = run(capsys, "poly", "2", "--d-max", "3", "--format", "csv")
    assert out == "d,0,1,2,3\np_2,2,3,4,5\n"
    code, out, _ = run(capsys, "poly", "4", "--format", "json")
    doc = json.loads(out)
    assert doc["values"]["11"] == "27790"


def test_fact_violation_maps_to_exit_4(capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise FactViolation("forced for the exit-code test")

    monkeypatch.setattr(cli, "certificate", boom)
    code, _, err = run(capsys, "certificate", "2")
    assert code == 4
    assert "consistency" in err
