"""Command-line surface: exit codes, output formats, cache and the invariant suite."""

import json

import pytest

from app.main import main
from app.services.cache_service import cache_service
from app.services.property_service import property_service
from app.utils.finite_functions import Staircase

EXAMPLE_POINTS = {"n": 2, "points": [[0, 0], [1, 1], [2, 1], [2, 2], [3, 2], [4, 2], [2, 3]]}
EXAMPLE_POLYGON = {"vertices": [[0, 0], [4, 2], [2, 3]]}
EXAMPLE_WITNESS = {
    "n": 2,
    "terms": [
        {"p": [0, 0], "c": "-1"}, {"p": [1, 1], "c": "4"}, {"p": [2, 1], "c": "-1"},
        {"p": [2, 2], "c": "-6"}, {"p": [3, 2], "c": "4"}, {"p": [4, 2], "c": "-1"},
        {"p": [2, 3], "c": "1"},
    ],
}


@pytest.fixture
def write_json(tmp_path):
    def write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)
    return write


@pytest.fixture
def isolated_cache(tmp_path):
    cache_service.configure(str(tmp_path / "cache"), enabled=True)
    yield
    cache_service.configure(enabled=False)


# ===== STAIRCASE =====

def test_staircase_command(write_json, capsys):
    path = write_json("points.json", EXAMPLE_POINTS)
    assert main(["--no-cache", "staircase", path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["E"][-1] == [2, 1]
    assert (out["r"], out["s"]) == (3, 3)


def test_staircase_lex_with_svg(write_json, tmp_path, capsys):
    path = write_json("box.json", {"n": 2, "points": [[0, 0], [1, 0], [0, 2], [1, 2], [0, 5], [1, 5]]})
    svg = tmp_path / "box.svg"
    assert main(["staircase", path, "--order", "lex:x1<x2", "--svg", str(svg), "--no-cache"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert sorted(map(tuple, out["E"])) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]
    assert svg.read_text(encoding="utf-8").lstrip().startswith("<?xml")


def test_malformed_json_exits_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    assert main(["--no-cache", "staircase", str(path)]) == 2


def test_schema_violations_exit_2(write_json):
    duplicate = write_json("dup.json", {"n": 2, "points": [[0, 0], [0, 0]]})
    assert main(["--no-cache", "staircase", duplicate]) == 2
    floats = write_json("poly.json", {"vertices": [[0.5, 0], [1, 0], [0, 1]]})
    assert main(["--no-cache", "spoly", floats]) == 2
    assert main(["--no-cache", "staircase", "/nonexistent/points.json"]) == 2
    assert main(["--no-cache", "--format", "csv", "staircase", duplicate]) == 2


# ===== S_P AND SESHADRI =====

def test_spoly_with_witness(write_json, tmp_path, capsys):
    polygon = write_json("triangle.json", EXAMPLE_POLYGON)
    witness = write_json("witness.json", EXAMPLE_WITNESS)
    svg = tmp_path / "sp.svg"
    code = main(["--no-cache", "spoly", polygon, "--witness", witness, "--d-schedule", "1,2", "--svg", str(svg)])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert [row["d"] for row in out["schedule"]] == ["1", "2"]
    assert out["exact"]["vertices"] == [["0", "0"], ["8/3", "0"], ["2", "1"], ["0", "8/3"]]
    assert out["witness_verdict"] == "irreducible"
    assert svg.exists()


def test_spoly_csv(write_json, capsys):
    square = write_json("square.json", {"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]})
    assert main(["--no-cache", "--format", "csv", "spoly", square, "--d-schedule", "2,3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("d;points;r;s;v_est;w_est")
    assert lines[1].split(";")[:6] == ["2", "9", "3", "4", "1", "2"]


def test_seshadri(capsys):
    assert main(["--no-cache", "seshadri", "1", "1", "1", "--d-schedule", "1,2"]) == 0
    assert capsys.readouterr().out.strip() == "[1, 1]"
    assert main(["--no-cache", "seshadri", "2", "4", "6"]) == 2


# ===== ATLAS AND P_r =====

def test_atlas_csv(capsys):
    assert main(["--no-cache", "atlas", "--max-2vol", "3", "--strict"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "corners;sm;two_vol"
    assert len(lines) == 3


def test_verify_pr(capsys):
    assert main(["verify-pr", "1", "2", "3"]) == 0
    assert capsys.readouterr().out.splitlines()[1] == "P_2: m=3 two_vol=8 ok"
    assert main(["verify-pr", "0"]) == 2


# ===== CACHE =====

def test_cache_hit_is_identical(write_json, capsys, isolated_cache):
    polygon = write_json("triangle.json", EXAMPLE_POLYGON)
    args = ["spoly", polygon, "--d-schedule", "1,2"]
    assert main(args) == 0
    cold = capsys.readouterr().out
    assert main(args) == 0
    warm = capsys.readouterr().out
    assert cold == warm


def test_cache_key_depends_on_inputs():
    a = cache_service.make_key("spoly", {"vertices": [["0", "0"]]}, "deglex:x1<x2", {"schedule": "1,2"})
    b = cache_service.make_key("spoly", {"vertices": [["0", "0"]]}, "deglex:x1<x2", {"schedule": "1,2,4"})
    assert a != b
    assert a == cache_service.make_key("spoly", {"vertices": [["0", "0"]]}, "deglex:x1<x2", {"schedule": "1,2"})


# ===== INVARIANT SUITE =====

def test_check_passes(capsys):
    assert main(["check", "--seed", "0", "--cases", "2"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert "doubling_chain" in out and "witness_sm" in out


def test_tampered_staircase_is_reported():
    def drop_last(E):
        return Staircase(E.order, E.elements[:-1])

    report = property_service.run(seed=0, cases=2, tamper=drop_last)
    assert not report.passed
    assert "staircase_size" in [r.name for r in report.failures]


def test_check_is_deterministic():
    first = property_service.run(seed=5, cases=2)
    second = property_service.run(seed=5, cases=2)
    assert [(r.name, r.passed, r.detail) for r in first.results] == [
        (r.name, r.passed, r.detail) for r in second.results
    ]
