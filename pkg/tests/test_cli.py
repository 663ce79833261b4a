import csv
import json

import pytest

from udua import ChannelParams, GridRegion, build_gain_table, exhaustive_search, load_user_sets
from udua.cli import main

TINY = """
region: {n_y: 3, n_x: 3, delta_d: 10.0}
channel: {Phi: 6, J: 2}
experiment:
  methods: [to, knn-W6-k3, sa+km, sa+greedy, rand+greedy]
  mu: [-0.6]
  sigma: [0.6]
  n_test: 2
  sa: {iterations_per_temperature: 1, min_temperature_ratio: 0.1}
"""


@pytest.fixture
def tiny(tmp_path):
    cfg = tmp_path / "tiny.yaml"
    cfg.write_text(TINY)
    return cfg


def run(capsys, *argv):
    assert main([str(a) for a in argv]) == 0
    return capsys.readouterr().out


def test_gen_and_oracle(tmp_path, tiny, capsys):
    scen = tmp_path / "s.json"
    run(capsys, "gen", "--mu", -0.6, "--sigma", 0.6, "--seed", 4, "--config", tiny, "--out", scen)
    users = load_user_sets(scen)[0]
    assert users.region == GridRegion(3, 3, 10.0)
    out = json.loads(run(capsys, "oracle", "--scenario", scen, "--deployment", "[[2,2],[1,1]]", "--config", tiny))
    assert out["feasible"] and len(out["association"]) == len(users)
    dep = tmp_path / "d.json"
    dep.write_text("[[2,2],[1,1]]")
    again = json.loads(run(capsys, "oracle", "--scenario", scen, "--deployment", dep, "--config", tiny))
    assert again == out


def test_solve_all_methods(tmp_path, tiny, capsys):
    sdir = tmp_path / "scen"
    sdir.mkdir()
    run(capsys, "gen", "--mu", -0.6, "--sigma", 0.6, "--count", 6, "--config", tiny, "--out", sdir / "db.json")
    kb = tmp_path / "kb.json"
    run(capsys, "build-kb", "--scenarios", sdir, "--out", kb, "--config", tiny)
    scen = tmp_path / "q.json"
    run(capsys, "gen", "--mu", -0.6, "--sigma", 0.6, "--seed", 77, "--config", tiny, "--out", scen)

    params = ChannelParams(phi=6)
    users = load_user_sets(scen)[0]
    best = exhaustive_search(users, build_gain_table(params, users.region), params).f
    results = {}
    for method, extra in [("to", []), ("sa", ["--seed", 1]), ("rand", ["--assoc", "km"]), ("knn", ["--kb", kb, "--k", 3])]:
        results[method] = json.loads(run(capsys, "solve", "--method", method, "--scenario", scen, "--config", tiny, *extra))
    assert results["to"]["f"] == pytest.approx(best)
    for doc in results.values():
        assert set(doc) == {"deployment", "f", "feasible", "wall_time_ms"}
        assert doc["f"] <= best * (1 + 1e-12)
    out = tmp_path / "sol.json"
    run(capsys, "solve", "--method", "to", "--scenario", scen, "--config", tiny, "--out", out)
    assert json.loads(out.read_text())["deployment"] == results["to"]["deployment"]


def test_knn_requires_kb(tmp_path, tiny, capsys):
    scen = tmp_path / "q.json"
    run(capsys, "gen", "--mu", -0.6, "--sigma", 0.6, "--config", tiny, "--out", scen)
    with pytest.raises(SystemExit):
        main(["solve", "--method", "knn", "--scenario", str(scen), "--config", str(tiny)])


def test_bench_writes_results(tmp_path, tiny, capsys):
    out = tmp_path / "bench"
    run(capsys, "bench", "--config", tiny, "--out", out)
    with open(out / "results.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 5
    assert {r["method"] for r in rows} == {"to", "knn-W6-k3", "sa+km", "sa+greedy", "rand+greedy"}
    assert json.loads((out / "results.json").read_text())["results"]
    assert len((out / "runs.jsonl").read_text().splitlines()) == 10


def test_bench_refuses_large(tmp_path, capsys):
    cfg = tmp_path / "big.yaml"
    cfg.write_text("region: {n_y: 9, n_x: 9}\nexperiment: {methods: [to], n_test: 200}\n")
    with pytest.raises(SystemExit, match="allow-large"):
        main(["bench", "--config", str(cfg), "--out", str(tmp_path / "o")])


def test_errors_return_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"id": "x", "region": {"n_y": 2, "n_x": 2, "delta_d": 10.0}, "gen_params": {}, "users": [[1, 1]]}))
    assert main(["oracle", "--scenario", str(bad), "--deployment", "[[9,9],[1,1]]"]) == 1
