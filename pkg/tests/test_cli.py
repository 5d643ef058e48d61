from __future__ import annotations

import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from iknap import bench
from iknap.cli import main
from iknap.generate import generate
from iknap.model import CONTINUOUS, Solution, parse_instance, serialize_instance, validate
from iknap.report import RunReport, finish

from conftest import make


@pytest.fixture
def two_items(tmp_path):
    path = tmp_path / "two.json"
    path.write_bytes(serialize_instance(make([(3, 4, [(2, 1)]), (2, 3, [])], 5, 1)))
    return path


def run_json(capsys, argv):
    assert main(argv) == 0
    return json.loads(capsys.readouterr().out)


def test_solve_dp(capsys, two_items):
    doc = run_json(capsys, ["solve", str(two_items), "--algo", "dp"])
    assert doc["objective"]["exact"] == "5"
    assert doc["instance_id"] == "two"
    assert doc["bound"]["exact"] == "1"


def test_solve_with_oracle_and_out(tmp_path, two_items):
    out = tmp_path / "report.json"
    assert main(["solve", str(two_items), "--algo", "lp3", "--with-oracle", "--out", str(out)]) == 0
    report = RunReport.from_dict(json.loads(out.read_text()))
    assert report.oracle == 5 and not report.violations()


def test_solve_variant_mismatch(two_items, tmp_path, capsys):
    inst = make([(3, 4, [(2, 2)])], 5, 2)
    path = tmp_path / "costly.json"
    path.write_bytes(serialize_instance(inst))
    assert main(["solve", str(path), "--algo", "ckp3"]) == 2
    assert "unit" in capsys.readouterr().err
    assert main(["solve", str(two_items), "--algo", "cs-ptas"]) == 2


def test_solve_cs_ptas_bound(tmp_path, capsys):
    path = tmp_path / "cont.json"
    path.write_bytes(serialize_instance(generate(6, 1, "uniform", 1, CONTINUOUS)))
    doc = run_json(capsys, ["solve", str(path), "--algo", "cs-ptas", "--eps", "0.2"])
    assert doc["bound"]["exact"] == "0.8"
    assert doc["extras"]["max_fractional"] <= 2


@pytest.mark.parametrize("content", [b"{not json", b'{"C": "1", "items": []}',
                                     b'{"B": "1", "C": "1", "items": [{"p": "1", "w": "2", '
                                     b'"levels": [{"w": "3", "c": "1"}]}]}'])
def test_solve_bad_input(tmp_path, content, capsys):
    path = tmp_path / "bad.json"
    path.write_bytes(content)
    assert main(["solve", str(path), "--algo", "dp"]) == 3
    assert "error" in capsys.readouterr().err
    assert main(["solve", str(tmp_path / "missing.json"), "--algo", "dp"]) == 3


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["gen", "--n", "7", "--levels", "2", "--seed", "11", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    inst = parse_instance(a.read_bytes())
    assert inst.n == 7 and not validate(inst)


def test_gen_families(capsysbinary):
    assert main(["gen", "--n", "5", "--family", "unit-cost"]) == 0
    assert parse_instance(capsysbinary.readouterr().out).unit_costs()
    assert main(["gen", "--n", "0"]) == 0
    empty = parse_instance(capsysbinary.readouterr().out)
    assert empty.n == 0 and not validate(empty)
    assert main(["gen", "--n", "4", "--mode", "continuous", "--levels", "3"]) == 0
    cont = parse_instance(capsysbinary.readouterr().out)
    assert cont.continuous and cont.single_level()
    assert main(["gen", "--n", "-1"]) == 2


def test_generator_ranges():
    inst = generate(30, 4, "correlated", 3)
    total = sum(it.base_weight for it in inst.items)
    assert 0.3 * total - 1 <= inst.B <= 0.6 * total
    for it in inst.items:
        assert 1 <= it.base_weight <= 100
        assert abs(it.profit - it.base_weight) <= 10 or it.profit == 1
        assert 1 <= it.depth <= 3
    with pytest.raises(ValueError):
        generate(3, 0, "nope")


def test_bench_lp2_unit_cost(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code = main(["bench", "--family", "unit-cost", "--count", "100", "--algos", "lp2,ckp3",
                 "--max-n", "8", "--csv", str(out)])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert list(rows[0]) == list(bench.COLUMNS)
    body = [r for r in rows if r["seed"] != "summary"]
    assert len(body) == 200
    assert [(r["seed"], r["algo"]) for r in body] == sorted(
        ((r["seed"], r["algo"]) for r in body), key=lambda t: (int(t[0]), t[1]))
    assert all(float(r["ratio"]) >= 0.5 for r in body if r["algo"] == "lp2")
    assert "worst ratio" in capsys.readouterr().err


def test_bench_dp_is_exact():
    result = bench.bench("uniform", 40, ["dp"], levels=2)
    assert result.ok
    assert all(r["ratio"] == "1.000000" for r in result.rows if r["ratio"])


def test_bench_marks_variant_and_oracle_refusals():
    result = bench.bench("uniform", 5, ["ckp3", "oracle"], max_n=6, limit=10)
    assert result.ok
    assert {r["value"] for r in result.rows if r["algo"] == "ckp3"} == {"n/a"}
    assert all((r["oracle"] == "no-oracle") == (3 ** int(r["n"]) > 10) for r in result.rows)


def test_bench_catches_corrupted_solver(monkeypatch, capsys):
    exact = bench.ALGORITHMS["dp"]

    def halved(inst, eps):
        # keeps only every other chosen item of the exact answer
        good = exact(inst, eps)
        keep = good.solution.chosen()[::2]
        sol = Solution.from_levels(inst.n, {i: good.solution.improvement[i] for i in keep})
        return finish("broken", inst, sol, 1, 0.0)

    registry = dict(bench.ALGORITHMS, broken=halved)
    assert not bench.bench("uniform", 10, ["broken"], registry=registry).ok
    monkeypatch.setitem(bench.ALGORITHMS, "dp", halved)
    assert main(["bench", "--count", "10", "--algos", "dp"]) == 1
    assert "violation" in capsys.readouterr().err


def test_bench_unknown_algo():
    assert main(["bench", "--algos", "magic"]) == 2


def test_report_json_round_trip():
    inst = make([(3, 4, [(2, 1)]), (2, 3, [])], 5, 1)
    report = bench.run("six", inst).with_oracle(5)
    back = RunReport.from_dict(json.loads(report.to_json()))
    assert back == report
    assert report.ratio == Fraction(report.objective, 5)


def test_module_entry_point(two_items):
    proc = subprocess.run([sys.executable, "-m", "iknap", "solve", str(two_items), "--algo", "oracle"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["objective"]["exact"] == "5"
