import json
import subprocess
import sys

from hfsat.cli import EXIT_ERROR, EXIT_NO_MODEL, EXIT_OK, EXIT_RESOURCE, EXIT_SAT, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_sat_model(capsys):
    code, out, _ = run(capsys, "check-sat", "x in y", "--level", "2")
    assert code == EXIT_SAT
    assert out.splitlines() == ["pairing: kuratowski", "x = {}", "y = {{}}"]


def test_check_sat_no_model_wording(capsys):
    code, out, _ = run(capsys, "check-sat", "x in y and y in x", "--level", "2")
    assert code == EXIT_NO_MODEL
    assert out.startswith("no model within bound <level=2")
    assert "UNSAT" not in out.upper().replace("UNSATISFIABILITY", "")


def test_check_sat_all_models(capsys):
    code, out, _ = run(capsys, "check-sat", "x = x", "--level", "2", "--all-models")
    assert code == EXIT_SAT and out.count("# model") == 2


def test_resource_exit(capsys):
    code, _, err = run(capsys, "check-sat", "[a,b] in @f and @f != @g", "--cap", "10")
    assert code == EXIT_RESOURCE and "blow-up" in err


def test_parse_error_exit(capsys):
    code, _, err = run(capsys, "parse", "x in")
    assert code == EXIT_ERROR and "column" in err


def test_validate(capsys):
    assert run(capsys, "validate", "forall [x,y] in @f . x in y")[0] == EXIT_OK
    code, out, _ = run(capsys, "validate", "forall x in y . forall z in x . z = z")
    assert code == EXIT_ERROR and out.startswith("non-simple")
    assert run(capsys, "validate", "x sub dom(@f)", "--extensions")[0] == EXIT_OK


def test_json_roundtrip_through_eval(capsys, tmp_path):
    code, out, _ = run(capsys, "--json", "check-sat", "[a,b] in @f and a in b", "--level", "2", "--breadth", "1")
    doc = json.loads(out)
    assert code == EXIT_SAT and doc["result"] == "sat" and doc["exit_code"] == EXIT_SAT
    assert {"parse", "validate", "normalize", "search", "total"} <= set(doc["timings"])
    assert doc["stats"]["candidate_space"] > 0
    model = tmp_path / "m.txt"
    model.write_text(doc["model"])
    code, out, _ = run(capsys, "eval", str(model), "[a,b] in @f and a in b")
    assert code == EXIT_OK and out.strip() == "true"


def test_eval_pairs(capsys, tmp_path):
    model = tmp_path / "m.txt"
    model.write_text("pairing: kuratowski\n@f = {{{{}}}}\n")
    assert run(capsys, "eval", str(model), "forall [a,b] in @f . a = b")[1].strip() == "true"


def test_normalize_blocks(capsys):
    code, out, _ = run(capsys, "normalize", "not (forall x in z . x != x)")
    assert code == EXIT_OK
    assert out.splitlines() == ["# skeleton: not p1", "# conjunction 1", "x#1 in z", "x#1 = x#1"]


def test_reduce_display(capsys):
    text = "(forall x' in x . [x,x] in @f) and (forall [x',y'] in @f . x'=y' and x' in x)"
    code, out, _ = run(capsys, "reduce", "--tau-only", text)
    assert out.splitlines()[0] == (
        "(forall x' in nonpairs(x) . [x,x] in p$f) and (forall [x',y'] in p$f . x' = y' and x' in nonpairs(x))"
    )
    code, out, _ = run(capsys, "reduce", text)
    assert "forall x$2 in nonpairs(p$f) . x$2 != x$2" in out and "# @f -> p$f" in out


def test_expand(capsys):
    code, out, _ = run(capsys, "expand", "union", "x", "y", "z")
    assert code == EXIT_OK and out.startswith("(forall x' in y . x' in x)")
    code, out, _ = run(capsys, "expand", "empty_set", "x", "--check-oracle")
    assert code == EXIT_OK and "0 mismatches" in out
    assert run(capsys, "expand", "union", "x", "y")[0] == EXIT_ERROR


def test_encoders(capsys, tmp_path):
    assert run(capsys, "encode-prop", "p & ~p")[1].strip() == "x_p in X and x_p notin X"
    system = tmp_path / "d.txt"
    system.write_text("types: d1\nH d1: d1\nV d1: d1\n")
    code, out, _ = run(capsys, "encode-domino", str(system))
    assert code == EXIT_OK and out.count("sub dom(") == 2


def test_check_peano(capsys, tmp_path):
    model = tmp_path / "p.txt"
    model.write_text("pairing: kuratowski\nN = {{}}\nZ = {}\nS = {}\n")
    code, out, _ = run(capsys, "check-peano", str(model))
    assert code == EXIT_OK and out.startswith("fail P2")
    model.write_text("pairing: kuratowski\nN = {}\nZ = {}\n@S = {}\n")
    assert run(capsys, "check-peano", str(model))[1].startswith("fail P1")


def test_stdin_and_file_inputs(monkeypatch, capsys, tmp_path):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO("x in y\n"))
    assert run(capsys, "parse", "-")[1].strip() == "x in y"
    src = tmp_path / "f.txt"
    src.write_text("x = x")
    assert run(capsys, "parse", "--file", str(src))[1].strip() == "x = x"


def test_missing_file(capsys):
    assert run(capsys, "eval", "/nonexistent/model", "x = x")[0] == EXIT_ERROR


def test_help_lists_flags():
    out = subprocess.run(
        [sys.executable, "-m", "hfsat", "check-sat", "--help"], capture_output=True, text=True, check=True
    ).stdout
    for flag in ("--level", "--breadth", "--cap", "--all-models", "--jobs"):
        assert flag in out


def test_module_entry_exit_code():
    r = subprocess.run([sys.executable, "-m", "hfsat", "check-sat", "x in y", "--level", "2"], capture_output=True)
    assert r.returncode == EXIT_SAT
