import json
import random
import subprocess
import sys
from fractions import Fraction as F

import pytest

from markovhull import generators as gen
from markovhull.cli import ExperimentConfig, main
from markovhull.errors import ContractError, FormatError, GroupTableError
from markovhull.io import (
    dumps_measure,
    load_group,
    loads_measure,
    parse_space_spec,
    save_group,
    save_measure,
    load_measure,
    space_from_json,
    space_to_json,
)
from markovhull.groups import FiniteGroup
from markovhull.measures import PathMeasure
from markovhull.paths import PathSpace, StateSpace, TimeGrid


def test_measure_text_form(eta):
    data = json.loads(dumps_measure(eta))
    assert data["mode"] == "exact"
    assert data["atoms"] == [{"path": ["0", "0", "0"], "weight": "1/2"}, {"path": ["1", "0", "1"], "weight": "1/2"}]
    assert data["space"] == {"cyclic": False, "grid": ["0/1", "1/1", "2/1"], "states": ["0", "1"]}


def test_round_trip_rich_space():
    space = PathSpace(TimeGrid((0, F(1, 2), 2)), StateSpace.cycle(4), step_bound=2)
    m = PathMeasure(space, {(0, 1, 3): F(2, 7), (3, 3, 0): F(5, 7)})
    text = dumps_measure(m)
    assert loads_measure(text) == m
    assert dumps_measure(loads_measure(text)) == text
    assert space_from_json(space_to_json(space)) == space


def test_float_round_trip():
    f = gen.random_mu_invariant(PathSpace.simple(3, 3), random.Random(0)).to_mode("float")
    text = dumps_measure(f)
    assert loads_measure(text) == f and dumps_measure(loads_measure(text)) == text


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d["atoms"][0].update(weight="-1/2"),
        lambda d: d["atoms"][0].update(weight=0.5),
        lambda d: d["atoms"][0].update(path=["0", "7", "0"]),
        lambda d: d.update(mode="fuzzy"),
        lambda d: d["space"].update(grid=["1/1", "0/1"]),
        lambda d: d.pop("atoms"),
    ],
)
def test_parse_rejects(eta, mutate):
    data = json.loads(dumps_measure(eta))
    mutate(data)
    with pytest.raises(FormatError):
        loads_measure(json.dumps(data))


def test_not_json():
    with pytest.raises(FormatError):
        loads_measure("{")


def test_save_load(tmp_path, eta):
    p = tmp_path / "m.json"
    save_measure(eta, p)
    assert load_measure(p) == eta
    assert [f.name for f in tmp_path.iterdir()] == ["m.json"]


def test_group_file(tmp_path):
    p = tmp_path / "g.json"
    save_group(FiniteGroup.symmetric3(), p)
    assert load_group(p) == FiniteGroup.symmetric3()
    p.write_text(json.dumps({"order": 2, "table": [[0, 1], [0, 1]], "labels": ["a", "b"]}))
    with pytest.raises(GroupTableError):
        load_group(p)


def test_space_spec(tmp_path):
    assert parse_space_spec("3x4") == PathSpace.simple(3, 4)
    assert parse_space_spec("2x5:cyclic").cyclic
    p = tmp_path / "s.json"
    p.write_text(json.dumps(space_to_json(PathSpace.simple(2, 2))))
    assert parse_space_spec(str(p)) == PathSpace.simple(2, 2)
    for bad in ("3x", "2x3:loop", "nowhere.json"):
        with pytest.raises(FormatError):
            parse_space_spec(bad)


def test_config_validation():
    assert ExperimentConfig(mode="exact", tol=0.5).tol == 0
    assert ExperimentConfig(mode="float", tol=1e-9).tol == 1e-9
    for kwargs in ({"tol": -1.0, "mode": "float"}, {"seed": -1}, {"seed": 2**64}, {"mode": "int"}, {"max_steps": -1}):
        with pytest.raises(ContractError):
            ExperimentConfig(**kwargs)


# -- commands --------------------------------------------------------------


def run(*argv):
    return main([str(a) for a in argv])


def test_generate_dirac(tmp_path):
    out = tmp_path / "d.json"
    assert run("generate", "--kind", "dirac", "--space", "2x3", "--path", "0,1,0", "--output", out) == 0
    m = load_measure(out)
    assert m == PathMeasure.dirac(PathSpace.simple(2, 3), (0, 1, 0))
    assert run("generate", "--kind", "dirac", "--space", "2x3", "--path", "0,2,0") == 1


def test_generate_fixture_and_determinism(tmp_path, eta):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("generate", "--kind", "correlated-pair", "--output", a) == 0
    assert load_measure(a) == eta
    for kind in ("random-mu-invariant", "chain", "random", "group-invariant"):
        run("generate", "--kind", kind, "--space", "3x4", "--seed", 42, "--output", a)
        run("generate", "--kind", kind, "--space", "3x4", "--seed", 42, "--output", b)
        assert a.read_bytes() == b.read_bytes()


def test_generate_group_invariant(tmp_path):
    out = tmp_path / "g.json"
    assert run("generate", "--kind", "group-invariant", "--group", "Z3", "--seed", 42, "--output", out) == 0
    from markovhull.groups import GroupAction, is_translation_invariant

    assert is_translation_invariant(load_measure(out), GroupAction(FiniteGroup.cyclic(3)))
    gfile = tmp_path / "grp.json"
    save_group(FiniteGroup.symmetric3(), gfile)
    assert run("generate", "--kind", "group-invariant", "--group", gfile, "--side", "right", "--output", out) == 0


def test_markovianise(tmp_path, eta, eta_markov, capsys):
    src, out, out2 = tmp_path / "in.json", tmp_path / "out.json", tmp_path / "out2.json"
    save_measure(eta, src)
    assert run("markovianise", "--input", src, "--pins", "", "--output", out) == 0
    assert out.read_bytes() == src.read_bytes()
    assert run("markovianise", "--input", src, "--pins", "1", "--output", out) == 0
    assert load_measure(out) == eta_markov
    assert "pin 1: defect 1/2 -> 0/1" in capsys.readouterr().err
    assert run("markovianise", "--input", src, "--pins", "1,1", "--output", out2) == 0
    assert out.read_bytes() == out2.read_bytes()
    assert run("markovianise", "--input", src, "--pins", "4") == 1


def test_hull_command(tmp_path, eta, eta_markov):
    src = tmp_path / "in.json"
    save_measure(eta, src)
    lim, trace, rep = tmp_path / "lim.json", tmp_path / "t.csv", tmp_path / "r.json"
    assert run("hull", "--input", src, "--output", lim, "--trace", trace, "--report", rep) == 0
    assert load_measure(lim) == eta_markov
    report = json.loads(rep.read_text())
    assert report["converged"] and report["strong_markov"] and report["passes"]
    assert trace.read_text().splitlines()[0] == "step,pin_index,aggregate_metric_to_prev,max_markov_defect,converged"
    assert run("hull", "--input", src, "--max-steps", 0, "--output", lim) == 2
    save_measure(eta_markov, src)
    assert run("hull", "--input", src, "--trace", trace, "--output", lim) == 0
    assert len(trace.read_text().splitlines()) == 2  # header + step 0


def test_hull_traces_are_reproducible(tmp_path):
    src = tmp_path / "in.json"
    run("generate", "--kind", "random", "--space", "3x5", "--seed", 5, "--output", src)
    t1, t2 = tmp_path / "t1.csv", tmp_path / "t2.csv"
    for t in (t1, t2):
        assert run("hull", "--input", src, "--ordering", "random:9", "--trace", t, "--output", tmp_path / "l.json") == 0
    assert t1.read_bytes() == t2.read_bytes()


def test_hull_float_mode(tmp_path, eta):
    src = tmp_path / "in.json"
    save_measure(eta.to_mode("float"), src)
    assert run("hull", "--input", src, "--tol", "1e-12", "--output", tmp_path / "l.json") == 0
    assert load_measure(tmp_path / "l.json").mode == "float"


def test_check_command(tmp_path, eta):
    rep = tmp_path / "r.json"
    assert run("check", "--suite", "tensor", "--cases", 10, "--seed", 1, "--report", rep) == 0
    data = json.loads(rep.read_text())
    assert data["passed"] and set(data["properties"]) >= {"characterization", "bilinearity"}
    bad = tmp_path / "bad.json"
    data = json.loads(dumps_measure(eta))
    data["atoms"][0]["weight"] = "-1/2"
    bad.write_text(json.dumps(data))
    assert run("check", "--input", bad, "--cases", 1) == 1
    assert run("check", "--cases", 0) == 1


def test_check_in_parallel_matches_serial(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("check", "--suite", "markov", "--cases", 3, "--report", a)
    run("check", "--suite", "markov", "--cases", 3, "--workers", 2, "--report", b)
    assert a.read_bytes() == b.read_bytes()


def test_info(tmp_path, eta, capsys):
    assert run("info", "--space", "2x3:cyclic") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["raw_paths"] == 8 and out["cyclic"]
    src = tmp_path / "in.json"
    save_measure(eta, src)
    assert run("info", "--input", src) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["defects"] == ["0/1", "1/2", "0/1"] and out["strong_markov"] is False
    assert run("info") == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "markovhull", "generate", "--kind", "correlated-pair"],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(proc.stdout)["atoms"][0]["weight"] == "1/2"
