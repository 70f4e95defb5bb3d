import json

import pytest
from click.testing import CliRunner

from snowlab.cli import main


@pytest.fixture
def run(tmp_path):
    def _run(*args):
        r = CliRunner().invoke(main, ["--out", str(tmp_path), *args])
        return r, tmp_path
    return _run


def test_presentation(run):
    r, out = run("presentation", "S")
    assert r.exit_code == 0, r.output
    data = json.loads((out / "presentation_S.json").read_text())
    assert data["meta"]["kind"] == "S" and len(data["relators"]) == 22


def test_snowflake_and_corridors(run):
    r, out = run("snowflake", "x", "-d", "1")
    assert r.exit_code == 0 and "area=70" in r.output
    r2, _ = run("corridors", "--diagram", str(out / "snowflake_d1.json"), "--scheme", "all-r")
    assert r2.exit_code == 0, r2.output
    r3, _ = run("corridors", "--word", "xyx", "--kind", "doubled")
    assert r3.exit_code == 0 and "certificate 54 vs area 54" in r3.output


def test_snowflake_too_large_fails(run):
    r, _ = run("--tree", '{"edges": [[0, 1]]}', "-n", "2", "snowflake", "x", "-d", "4")
    assert r.exit_code == 1 and "cap" in r.output


def test_fold_nf_and_fits(run):
    assert run("fold", "aB")[0].exit_code == 0
    r, _ = run("nf", "r1a0R1", "--group", "S")
    assert r.exit_code == 0 and "X1Y1X1x2y2x2" in r.output
    assert run("dehn-fit", "--depth", "12")[0].exit_code == 0
    assert run("distortion", "--depth", "6", "--fuzz", "5")[0].exit_code == 0
    assert run("balancing-fuzz", "--samples", "40")[0].exit_code == 0
    assert run("embed-check", "--samples", "20")[0].exit_code == 0


def test_bad_scheme(run):
    r, _ = run("corridors", "--word", "x", "--scheme", "nope")
    assert r.exit_code != 0
