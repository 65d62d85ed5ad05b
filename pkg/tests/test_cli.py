"""The command-line front end, driven through main()."""
import json
import re

import pytest

from zetaforms.cli import main


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv("ZF_CACHE_DIR", str(d))
    return d


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_forms_ndjson(capsys, cache_dir):
    code, out, _ = run(capsys, "forms", "--n-max", "2")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert [r["n"] for r in rows] == [0, 1, 2]
    assert (rows[0]["q"], rows[0]["p_num"], rows[0]["phat_num"]) == ("1", "0", "0")
    assert rows[2]["q"] == "5669931265185834471825"
    assert (rows[1]["p_num"], rows[1]["p_den"]) == ("199536684432021", "9856")
    assert rows[1]["log_abs_r"] < -20


def test_forms_rerun_is_byte_identical(capsys, cache_dir):
    _, first, _ = run(capsys, "forms", "--n-max", "4")
    assert any(cache_dir.rglob("*.json"))
    _, cached, _ = run(capsys, "forms", "--n-max", "4")
    _, fresh, _ = run(capsys, "forms", "--n-max", "4", "--no-cache")
    assert first == cached == fresh


def test_forms_csv_and_out(capsys, cache_dir, tmp_path):
    target = tmp_path / "forms.csv"
    code, out, _ = run(capsys, "forms", "--n-max", "1", "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    lines = target.read_text().splitlines()
    assert lines[0].split(",")[:3] == ["n", "q", "p_num"]
    assert lines[2].startswith("1,12307605345,")


def test_forms_other_constructions(capsys, cache_dir):
    code, out, _ = run(capsys, "forms", "--construction", "z3-ex", "--n-max", "1")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert rows[1]["q"] == "12307605345" and rows[1]["p_num"] is None


def test_forms_custom_params(capsys, cache_dir, tmp_path):
    # the example generators given as a parameter file reproduce the built-in q_n
    gens = tmp_path / "gens.json"
    gens.write_text(json.dumps({"alphas": [8, 7, 10, 9], "betas": [0, 1, 2, 15]}))
    code, out, err = run(capsys, "forms", "--params", str(gens), "--kind", "z2", "--n-max", "2")
    assert code == 0, err
    assert [json.loads(line)["q"] for line in out.splitlines()] == \
        ["1", "12307605345", "5669931265185834471825"]
    single = tmp_path / "one.json"
    single.write_text(json.dumps({"a": [9, 8, 11, 10], "b": [1, 2, 3, 17]}))
    code, out, _ = run(capsys, "forms", "--params", str(single), "--kind", "z2", "--n-max", "0")
    assert code == 0 and json.loads(out)["q"] == "12307605345"


def test_input_errors(capsys, cache_dir):
    assert run(capsys, "forms", "--n-max", "1", "--precision-bits", "8")[0] == 2
    assert run(capsys, "forms", "--n-max", "-1")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["forms"])
    assert info.value.code == 2
    assert run(capsys, "certify", "--m", "10", "--encode", "z5:1/2")[0] == 2


def test_precision_error(capsys, cache_dir):
    code, _, err = run(capsys, "forms", "--n-max", "20", "--precision-bits", "64", "--no-cache")
    assert code == 3 and "precision" in err


def test_verify_divisibility(capsys, cache_dir):
    code, out, _ = run(capsys, "verify", "--suite", "divisibility", "--n-max", "10")
    assert code == 0 and "PASS" in out


def test_verify_whipple_json(capsys, cache_dir):
    code, out, _ = run(capsys, "verify", "--suite", "whipple", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] and doc["suites"][0]["suite"] == "whipple"


def test_corrupt_cache_names_the_entry(capsys, cache_dir):
    run(capsys, "forms", "--n-max", "3")
    victim = next(p for p in cache_dir.rglob("n00002.json"))
    victim.write_text(victim.read_text().replace('"q"', '"Q"', 1))
    code, out, err = run(capsys, "verify", "--suite", "divisibility", "--n-max", "3")
    assert code == 1
    assert "n=2" in out + err
    # forms recomputes instead and still agrees with a fresh run
    _, recomputed, err = run(capsys, "forms", "--n-max", "3")
    _, fresh, _ = run(capsys, "forms", "--n-max", "3", "--no-cache")
    assert recomputed == fresh and "warning" in err


def test_constants(capsys):
    code, out, _ = run(capsys, "constants")
    assert code == 0
    m = re.search(r"^s_0 = .*?(-?\d+\.\d+)\s*$", out, re.M)
    assert m and abs(float(m.group(1)) - 6.770732145) < 1e-8
    code, out, _ = run(capsys, "constants", "--json")
    doc = json.loads(out)
    assert abs(float(doc["24 - vphi"]) - 18.29830398) < 1e-8


def test_exponents(capsys):
    code, out, _ = run(capsys, "exponents")
    assert code == 0
    assert "6 - tau0" in out
    assert "discrepancy" in out and "1.92357696" in out
    assert "Minkowski witness n=4" in out


def test_certify_encoding(capsys):
    code, out, _ = run(capsys, "certify", "--m", "100", "--encode", "z2:5/3")
    assert code == 0
    assert out.startswith("hypotheses met, nonzero form found")


def test_certify_zero_triple(capsys):
    code, _, err = run(capsys, "certify", "--m", "10", "--a0", "0", "--a1", "0", "--a2", "0")
    assert code == 2 and err
