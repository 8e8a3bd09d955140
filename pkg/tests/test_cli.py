import csv
import io
import json

import pytest

from conftest import run_cli
from flaggrowth.cli import ResultCache, main
from flaggrowth.complexes import builtin, save


def test_betti_octahedron_f2():
    code, out = run_cli(["betti", "--complex", "builtin:octahedron", "--field", "f:2"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["betti"]) for r in rows] == [0, 0, 1]


def test_cover_scan_csv():
    code, out = run_cli(["cover-scan", "--complex", "builtin:cycle_4", "--field", "q", "--n", "1,2,3"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "complex,index,n,field,degree,betti,normalized,target"
    rows = list(csv.DictReader(io.StringIO(out)))
    top = [r["normalized"] for r in rows if r["degree"] == "2"]
    assert top == ["4 (4.000000)", "25/16 (1.562500)", "100/81 (1.234568)"]
    assert {r["target"] for r in rows if r["degree"] == "2"} == {"1"}


def test_json_output_and_file_input(tmp_path):
    path = tmp_path / "sq.txt"
    save(builtin("cycle_4"), path)
    code, out = run_cli(["davis", "--complex", str(path), "--out", "json"])
    assert code == 0
    data = json.loads(out)
    assert [d["betti"] for d in data] == [1, 2, 1]
    assert data[0]["index"] == 16 and data[0]["target"] == ""


def test_torsion_and_nerve_and_mv():
    code, out = run_cli(["torsion", "--complex", "cycle_4", "--field", "f:2", "--n", "2", "--out", "json"])
    assert code == 0 and json.loads(out)["torsion_ranks"] == [0, 0, 0]
    code, out = run_cli(["nerve-check", "--complex", "cycle_5", "--n", "2", "--out", "json"])
    data = json.loads(out)
    assert code == 0 and data["coefficient_homology"] == data["expected"]
    code, out = run_cli(["mv-check", "--complex", "path_3", "--out", "json"])
    assert code == 0 and all(r["exact"] for r in json.loads(out))


def test_library_lists_builtins():
    code, out = run_cli(["library", "--out", "json"])
    assert code == 0
    assert "rp2_flag" in {r["name"] for r in json.loads(out)}


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["betti", "--complex", "builtin:nothing"],
    ["betti", "--complex", "octahedron", "--field", "f:4"],
    ["betti", "--complex", "octahedron", "--field", "r"],
    ["cover-scan", "--complex", "cycle_4", "--n", "0"],
    ["cover-scan", "--complex", "cycle_4", "--budget", "-1"],
    ["torsion", "--complex", "cycle_4", "--field", "q"],
    ["mv-check", "--complex", "path_3", "--vertex", "zz"],
    ["repro", "other"],
])
def test_usage_errors_exit_1(argv, capsys):
    assert main(argv) == 1


def test_budget_exit_2():
    assert main(["cover-scan", "--complex", "rp2_flag", "--n", "3", "--budget", "1000"]) == 2
    assert main(["davis", "--complex", "rp2_flag", "--budget", "1000"]) == 2


def test_inconsistency_exit_3(monkeypatch):
    import flaggrowth.cli as cli

    def broken(*a, **k):
        raise cli.InconsistencyError("negative torsion rank")
    monkeypatch.setattr(cli, "torsion_rank_profile", broken)
    assert main(["torsion", "--complex", "cycle_4", "--n", "2"]) == 3


def test_cache_hits_and_corrupt_entries(tmp_path):
    argv = ["cover-scan", "--complex", "cycle_5", "--n", "2,3", "--cache-dir", str(tmp_path)]
    code, first = run_cli(argv)
    files = sorted(tmp_path.glob("*.json"))
    assert code == 0 and len(files) == 2
    code, second = run_cli(argv)
    assert second == first
    files[0].write_text("{not json")
    files[1].write_text('{"key": "elsewhere", "value": [1, 2]}')
    code, third = run_cli(argv)
    assert third == first
    assert not list(tmp_path.glob("*.tmp"))


def test_cache_key_depends_on_inputs():
    c = ResultCache(None)
    L = builtin("cycle_4")
    k = c.key("cover", L, field=0, seed=0)
    assert k == c.key("cover", L, field=0, seed=0)
    assert k != c.key("cover", L, field=2, seed=0)
    assert k != c.key("cover", L, field=0, seed=1)
    assert k != c.key("cover", builtin("cycle_5"), field=0, seed=0)


def test_cache_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("FLAGGROWTH_CACHE_DIR", str(tmp_path))
    assert main(["betti", "--complex", "cycle_4"]) == 0
    assert list(tmp_path.glob("*.json"))


def test_threads_do_not_change_output():
    a = run_cli(["cover-scan", "--complex", "octahedron", "--n", "2", "--threads", "1"])
    b = run_cli(["cover-scan", "--complex", "octahedron", "--n", "2", "--threads", "4"])
    assert a == b
