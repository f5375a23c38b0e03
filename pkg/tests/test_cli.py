import json

import pytest

from cechnet import commands
from cechnet.cli import main
from cechnet.scenario import BUILTIN, ScenarioError, load_scenario, parse_scenario


def test_builtins_load():
    for name in BUILTIN:
        sc = load_scenario(name)
        assert sc.deployment()


def test_fig2_scenario_contents():
    sc = load_scenario("fig2")
    assert [(c.id, c.x, c.y, c.r) for c in sc.deployment()][6] == (6, 0.9, 0.9, 0.8)


@pytest.mark.parametrize("doc, fragment", [
    ({"cells": []}, "seed is required"),
    ({"seed": 0, "colour": 1}, "unknown field"),
    ({"seed": 0, "cells": [{"id": 0, "x": 0, "y": 0, "r": 1, "z": 2}]}, "unknown field"),
    ({"seed": 0, "cells": [{"id": 0, "x": 0, "y": 0}]}, "missing"),
    ({"seed": 0, "cells": [{"id": 0, "x": 0, "y": 0, "r": -1}]}, "must be > 0"),
    ({"seed": 0, "cells": [{"id": 0, "x": 0, "y": 0, "r": 1}, {"id": 0, "x": 1, "y": 0, "r": 1}]}, "duplicate"),
    ({"seed": 0, "t_ack": 1}, "t_ack"),
    ({"seed": -1}, "seed"),
    ({"seed": 0, "random": {"count": 3, "box": [0, 0, -1, 5]}}, "random.box"),
])
def test_parse_rejects(doc, fragment):
    with pytest.raises(ScenarioError, match=fragment):
        parse_scenario(doc)


def test_random_deployment_is_seeded():
    doc = {"seed": 4, "cells": [{"id": 0, "x": 0, "y": 0, "r": 1}], "random": {"count": 5}}
    a, b = parse_scenario(doc), parse_scenario(doc)
    assert a.deployment() == b.deployment()
    assert [c.id for c in a.deployment()] == list(range(6))
    assert parse_scenario({**doc, "seed": 5}).deployment() != a.deployment()


def test_json_round_trip():
    sc = load_scenario("dumbbell")
    assert parse_scenario(json.loads(sc.to_json())) == sc


def test_build_writes_outputs(tmp_path):
    assert main(["build", "--scenario", "fig2", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "complex.txt").read_text()
    assert "0 1 2 6\n" in text and "2 3 6\n" in text
    m = json.loads((tmp_path / "metrics.json").read_text())
    assert (m["beta0"], m["beta1"], m["oracle_check"]) == (1, 1, "pass")
    trace = (tmp_path / "trace.log").read_text().splitlines()
    for kind, n in m["message_counts"].items():
        assert n == sum(1 for line in trace if line.split()[1] == kind)


def test_holes_reports_interior_cycle(tmp_path):
    assert main(["holes", "--scenario", "fig2", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "cycles.txt").read_text().splitlines()
    assert [ln for ln in lines if ln.startswith("interior")] == ["interior 3 4 5 6"]


def test_dumbbell_has_two_holes(tmp_path):
    assert main(["holes", "--scenario", "dumbbell", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "cycles.txt").read_text().splitlines()
    assert [ln for ln in lines if ln.startswith("interior")] == ["interior 0 1 2 3", "interior 4 5 6 7"]


def test_optimize_and_render(tmp_path):
    opt, ren = tmp_path / "opt", tmp_path / "ren"
    assert main(["optimize", "--scenario", "redundant5", "--out", str(opt)]) == 0
    m = json.loads((opt / "metrics.json").read_text())
    assert m["violations"] == []
    assert m["final_power"] < m["initial_power"]
    radii = (opt / "radii.csv").read_text().splitlines()
    assert radii[0] == "id,x,y,r_initial,r_final,state"
    assert radii[5].endswith(",0.0,off")
    steps = (opt / "steps.csv").read_text().splitlines()
    assert len(steps) - 1 == m["committed"]
    assert (opt / "power.svg").read_text().startswith("<?xml")
    assert main(["render", "--scenario", "redundant5", "--result", str(opt), "--out", str(ren)]) == 0
    svg = (ren / "render.svg").read_text()
    assert 'id="disk-0"' in svg and 'id="disk-4"' not in svg


def test_render_fig2(tmp_path):
    assert main(["render", "--scenario", "fig2", "--out", str(tmp_path)]) == 0
    svg = (tmp_path / "render.svg").read_text()
    for gid in ("disk-6", "simplex-2-3-6", "cycle-3-4-5-6"):
        assert f'id="{gid}"' in svg


def test_bad_input_exit_code(tmp_path, capsys):
    assert main(["build", "--scenario", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 4
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["build", "--scenario", str(bad), "--out", str(tmp_path)]) == 4
    assert main(["build", "--scenario", "fig2", "--seed", "-3", "--out", str(tmp_path)]) == 4
    assert main(["build", "--scenario", "fig2", "--dim-max", "0", "--out", str(tmp_path)]) == 4
    assert "error:" in capsys.readouterr().err


def test_no_quiescence_exit_code(monkeypatch, tmp_path):
    monkeypatch.setattr(commands, "MAX_TICKS", 5)
    assert main(["build", "--scenario", "fig2", "--out", str(tmp_path)]) == 3
    assert (tmp_path / "trace.log").exists()


def test_oracle_check_skip_and_dim_max(tmp_path):
    assert main(["build", "--scenario", "fig2", "--no-oracle-check", "--dim-max", "2", "--out", str(tmp_path)]) == 0
    m = json.loads((tmp_path / "metrics.json").read_text())
    assert m["oracle_check"] == "skipped"
    assert "0 1 2 6" not in (tmp_path / "complex.txt").read_text()
