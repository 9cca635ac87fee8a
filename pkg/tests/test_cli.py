import json

import pytest

from primalcurv import adaptive as ad
from primalcurv.cli import EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, main
from primalcurv.objectives import CoverageInstance, save_instance, square_cardinality
from primalcurv.validate import replay


@pytest.fixture
def square_file(tmp_path):
    p = tmp_path / "square.json"
    save_instance(square_cardinality(4), p)
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_bound_text(capsys, square_file):
    code, out = run(capsys, "bound", "--instance", square_file, "--k", 2)
    assert code == EXIT_OK
    assert "primal_ratio" in out.out and "0.25" in out.out


def test_bound_json_keys(capsys, square_file, tmp_path):
    out_file = tmp_path / "rep.json"
    code, _ = run(capsys, "bound", "--instance", square_file, "--k", 2, "--format", "json", "--out", out_file)
    assert code == EXIT_OK
    d = json.loads(out_file.read_text())
    assert d["primal_ratio"] == pytest.approx(0.25)
    assert d["wang_ratio"] == 0.4375


def test_bound_bad_k(capsys, square_file):
    code, out = run(capsys, "bound", "--instance", square_file, "--k", 9)
    assert code == EXIT_INPUT and "--k" in out.err


def test_bound_schema_error(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"type": "coverage", "n": 2, "sets": [[1]]}))
    code, out = run(capsys, "bound", "--instance", p, "--k", 1)
    assert code == EXIT_INPUT and "sets" in out.err


def test_bound_missing_file(capsys, tmp_path):
    code, _ = run(capsys, "bound", "--instance", tmp_path / "nope.json", "--k", 1)
    assert code == EXIT_INPUT


def test_bound_cap_exceeded(capsys, tmp_path):
    p = tmp_path / "big.json"
    save_instance(square_cardinality(10), p)
    code, out = run(capsys, "bound", "--instance", p, "--k", 3, "--cap", 50)
    assert code == EXIT_INFEASIBLE
    assert "infeasible" in out.out


def test_sweep_csv_format(capsys):
    code, out = run(capsys, "sweep", "--formula", "wang", "--param", "1.3", "--k", 25)
    assert code == EXIT_OK
    assert out.out == "formula,k,parameter,ratio\nwang,25,1.3,0.0105895\n"


def test_sweep_gamma_equals_k(capsys):
    code, out = run(capsys, "sweep", "--formula", "fixed_gamma", "--param", "k", "--k", 1, 2)
    assert out.out.splitlines()[1:] == ["fixed_gamma,1,1,1", "fixed_gamma,2,2,0.75"]


def test_sweep_byte_stable(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        run(capsys, "sweep", "--formula", "adaptive", "--param", "1", "1.5", "2", "--k-min", 1, "--k-max", 12, "--out", p)
    assert a.read_bytes() == b.read_bytes()


def test_sweep_json(capsys):
    code, out = run(capsys, "sweep", "--formula", "classic", "--k", 2, "--format", "json")
    assert json.loads(out.out) == [{"formula": "classic", "k": 2, "parameter": 2.0, "ratio": 0.75}]


def test_validate_pass_and_stable(capsys):
    code1, out1 = run(capsys, "validate", "--count", 40, "--adaptive-count", 5, "--seed", 3)
    code2, out2 = run(capsys, "validate", "--count", 40, "--adaptive-count", 5, "--seed", 3)
    assert code1 == code2 == EXIT_OK
    assert out1.out == out2.out
    assert json.loads(out1.out)["status"] == "pass"


def test_validate_parallel_matches_serial(capsys):
    _, serial = run(capsys, "validate", "--count", 30, "--adaptive-count", 4)
    _, par = run(capsys, "validate", "--count", 30, "--adaptive-count", 4, "--jobs", 2)
    assert serial.out == par.out


def test_validate_catches_injected_bug(capsys, tmp_path):
    code, out = run(
        capsys, "validate", "--count", 20, "--adaptive-count", 0, "--inject", "off-by-one-k", "--out", tmp_path
    )
    assert code == EXIT_VIOLATION
    summary = json.loads(out.out)
    assert summary["violations_by_check"] == {"wang_bound": 1}
    payload = json.loads((tmp_path / summary["replay_files"][0]).read_text())
    rep = replay(tmp_path / summary["replay_files"][0])
    assert rep.wang_ratio * rep.optimum_value > rep.greedy_value
    assert payload["mutation"] == "off-by-one-k"


def test_adaptive_command(capsys, tmp_path):
    items = (ad.StochasticItem(("on", "off"), (0.5, 0.5)),)
    p = tmp_path / "one.json"
    ad.save_adaptive(ad.AdaptiveInstance(items, ad.StateModular(((1.0, 0.0),))), p)
    code, out = run(capsys, "adaptive", "--instance", p, "--k", 1, "--format", "json")
    assert code == EXIT_OK
    d = json.loads(out.out)
    assert d["f_avg"] == [0.0, 0.5] and d["bound_holds"] is True


def test_adaptive_deterministic_matches_bound(capsys, tmp_path):
    cov = CoverageInstance(((1, 2), (2, 3), (3, 4)))
    items = tuple(ad.StochasticItem(("x",), (1.0,)) for _ in range(3))
    inst = ad.AdaptiveInstance(items, ad.StateCoverage(tuple((s,) for s in cov.sets)))
    pa, pb = tmp_path / "a.json", tmp_path / "b.json"
    ad.save_adaptive(inst, pa)
    save_instance(cov, pb)
    _, a = run(capsys, "adaptive", "--instance", pa, "--k", 2, "--format", "json")
    _, b = run(capsys, "bound", "--instance", pb, "--k", 2, "--format", "json")
    a, b = json.loads(a.out), json.loads(b.out)
    assert a["f_avg"] == b["chain_values"]
    assert a["greedy_picks_first_branch"] == b["picks"]
    assert a["optimal_value"] == b["optimum_value"]


def test_adaptive_cap(capsys, tmp_path):
    items = tuple(ad.StochasticItem(("on", "off"), (0.5, 0.5)) for _ in range(6))
    p = tmp_path / "six.json"
    ad.save_adaptive(ad.AdaptiveInstance(items, ad.StateModular(((1.0, 0.0),) * 6)), p)
    code, _ = run(capsys, "adaptive", "--instance", p, "--k", 3, "--cap", 10)
    assert code == EXIT_INFEASIBLE
