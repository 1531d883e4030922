import json
import subprocess
import sys
from importlib import resources

import pytest

from tmpkit import cli, formats
from tmpkit.moments import build_moment_matrix, check_p_pure

DATA = resources.files("tmpkit").joinpath("data")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "name, code, conclusion",
    [("example-1150", 2, "no-rank-3n-measure"), ("example-1046", 0, "unique"), ("example-2031", 2, "no-rank-3n-measure")],
)
def test_analyze_fixtures_match_expected_reports(capsys, name, code, conclusion):
    got, out, _ = run(capsys, "analyze", str(DATA / f"{name}.json"))
    assert got == code
    assert out == formats.fixture_text(name, "report")
    rep = json.loads(out)
    assert rep["conclusion"] == conclusion
    if name == "example-1046":
        assert rep["measures"][0]["atoms_count"] == 9
    if name == "example-2031":
        assert rep["R"]["R0"] == "-16257024"
    if name == "example-1150":
        assert rep["roots"] == [] and rep["root_kind"] == "no-root"


@pytest.mark.parametrize("name", formats.SYMMETRIC_FIXTURES)
def test_symmetric_fixtures_match_expected_reports(capsys, name):
    code, out, _ = run(capsys, "symmetric", str(DATA / f"{name}.json"))
    assert code == 0
    assert out == formats.fixture_text(name, "report")
    rep = json.loads(out)
    assert rep["status"] == "measure-exists"
    assert rep["univariate"]["solution"]["status"] == "measure-exists"


def test_halfline_fixture_reports_the_halfline_branch(capsys):
    _, out, _ = run(capsys, "symmetric", str(DATA / "symmetric-halfline.json"))
    assert json.loads(out)["univariate"]["support"]["kind"] == "halfline"


def test_non_symmetric_input_is_rejected(capsys):
    code, out, err = run(capsys, "symmetric", str(DATA / "example-1046.json"))
    assert code == 3
    assert "not symmetric" in json.loads(out)["error"]


def test_generate_is_deterministic_and_pure(capsys):
    code, first, _ = run(capsys, "generate", "--curve", "0,0", "--atoms", "9", "--seed", "7")
    assert code == 0
    _, second, _ = run(capsys, "generate", "--curve", "0,0", "--atoms", "9", "--seed", "7")
    assert first == second
    beta, curve, obj = formats.parse_moments(first)
    rep = check_p_pure(build_moment_matrix(beta), curve)
    assert rep.is_pure and rep.rank == 9
    assert len(obj["generator"]["atoms"]) == 9
    assert "." not in "".join(obj["moments"].values())


def test_one_atom_is_not_pure(tmp_path, capsys):
    _, text, _ = run(capsys, "generate", "--atoms", "1", "--seed", "7")
    path = tmp_path / "one.json"
    path.write_text(text)
    code, out, _ = run(capsys, "analyze", str(path))
    assert code == 3
    rep = json.loads(out)
    assert rep["pure"] is False and rep["rank"] == 1


def test_reports_are_byte_identical(capsys):
    path = str(DATA / "example-1046.json")
    outs = {run(capsys, "analyze", path)[1] for _ in range(2)}
    assert len(outs) == 1


def test_both_branches(tmp_path, capsys):
    for seed in range(20):
        _, text, _ = run(capsys, "generate", "--atoms", "9", "--seed", str(seed))
        path = tmp_path / f"g{seed}.json"
        path.write_text(text)
        code, out, _ = run(capsys, "analyze", str(path), "--root-branch", "both")
        rep = json.loads(out)
        if rep["conclusion"] == "two-measures":
            break
    else:
        pytest.skip("no two-root instance")
    assert code == 0
    assert [m["branch"] for m in rep["measures"]] == ["minus", "plus"]
    code, out, _ = run(capsys, "analyze", str(path), "--root-branch", "plus")
    assert [m["branch"] for m in json.loads(out)["measures"]] == ["plus"]


def test_timing_flag(capsys):
    _, out, _ = run(capsys, "analyze", str(DATA / "example-2031.json"), "--timing")
    assert "seconds" in json.loads(out)["timing"]


@pytest.mark.parametrize(
    "text, fragment",
    [
        ('{"n": 3, "a": "0",\n "b": 0,, }', "line 2"),
        ('{"n": 1, "a": "0", "b": "0", "moments": {"0,0": "1"}}', "missing entries"),
        ('{"n": 1, "a": "0", "b": "0", "moments": {"0,0": 1.5}}', "moments['0,0']"),
        ('{"n": 1, "a": "x", "b": "0", "moments": {}}', "field 'a'"),
        ('{"a": "0", "b": "0", "moments": {}}', "'n'"),
    ],
)
def test_parse_errors_name_the_problem(tmp_path, capsys, text, fragment):
    path = tmp_path / "bad.json"
    path.write_text(text)
    code, _, err = run(capsys, "analyze", str(path))
    assert code == 3
    assert fragment in err


def test_console_entry_point_via_module(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "tmpkit.cli", "analyze", str(DATA / "example-2031.json")],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 2
    assert json.loads(res.stdout)["R"]["R0"] == "-16257024"
