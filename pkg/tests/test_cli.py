import glob
import io
import json
import os
import random

import pytest
from hypothesis import given, strategies as st

from lazlie.cli import FormatError, main, parse_bilinear, parse_lla, read_lla, serialize_bilinear, serialize_lla
from lazlie.lla import Lla
from lazlie.randgen import random_lla
from conftest import FIXTURES, fixture_path


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


@pytest.mark.parametrize("path", sorted(glob.glob(os.path.join(FIXTURES, "*.lla"))))
def test_fixture_round_trip(path):
    text = open(path).read()
    f = parse_lla(text)
    again = parse_lla(serialize_lla(f))
    assert again.algebra == f.algebra
    assert again.comments == f.comments


def test_random_round_trip():
    rng = random.Random(3)
    for _ in range(30):
        L = random_lla(rng, rng.choice([5, 7]), rng.randint(1, 4), 7)
        assert parse_lla(serialize_lla(L)).algebra == L


def test_non_basis_flag_round_trip():
    # P_2 spanned by e1 + e2, not by basis vectors
    L = Lla(5, 2, 2, {}, [[(1, 0), (0, 1)], [(1, 1)], []])
    text = serialize_lla(L)
    assert "flag 2" in text
    assert parse_lla(text).algebra == L


@pytest.mark.parametrize("text,line", [
    ("", 0),
    ("lie p=5 c=2 dim=1\n", 1),
    ("lla p=6 c=2 dim=1\n", 1),
    ("lla p=5 c=2 dim=2\nlevels 1\n", 2),
    ("lla p=5 c=2 dim=2\nbracket 2 1 -> 1:1\n", 2),
    ("lla p=5 c=2 dim=2\nbracket 1 2 -> 3:1\n", 2),
    ("lla p=5 c=2 dim=2\nfrobnicate\n", 2),
])
def test_format_errors(text, line):
    with pytest.raises(FormatError) as err:
        parse_lla(text)
    assert err.value.lineno == line


def test_bilinear_round_trip():
    B = parse_bilinear(open(fixture_path("sym.bil")).read())
    assert parse_bilinear(serialize_bilinear(B)) == B


def test_free_command(tmp_path):
    out = tmp_path / "f.lla"
    code, _ = run("free", "2", "1,1", "3", "5", "-o", str(out))
    assert code == 0
    assert parse_lla(out.read_text()).algebra == read_lla(fixture_path("free_2_11_3_5.lla")).algebra
    code, text = run("free", "2", "1,2", "3", "5")
    assert code == 0 and "dim=3" in text


def test_verify_exit_codes():
    assert run("verify", "suite", fixture_path("heisenberg.lla"))[0] == 0
    code, text = run("verify", "suite", fixture_path("broken_jacobi.lla"))
    assert code == 1 and "jacobi" in text


def test_amalgamate_command(tmp_path):
    code, text = run("amalgamate", fixture_path("abelian2.lla"), fixture_path("abelian2.lla"),
                     "--over", fixture_path("line.lla"), "--trace")
    assert code == 0 and "dim=4" in text


def test_lazard_commands():
    code, text = run("lazard", "bch", "2", "5")
    assert code == 0 and "[Y,X]" in text
    assert run("lazard", "round-trip", fixture_path("heisenberg.lla"))[0] == 0


def test_witness_commands():
    assert run("witness", "sop3", "--n", "2", "--p", "5")[0] == 0
    assert run("witness", "ip", "--c", "2", "--m", "2", "--p", "5", "--X", "0;1")[0] == 0
    assert run("witness", "heisenberg", "--i", "1", "--j", "1", "--c", "2")[0] == 0
    assert run("witness", "raiser", "--n", "1", "--c", "3", "--p", "7")[0] == 0


def test_generic_command_and_refusal(tmp_path):
    report = tmp_path / "r.json"
    code, _ = run("generic", "--rounds", "1", "--budget", "2", "--report", str(report))
    assert code == 0 and json.loads(report.read_text())["status"] == "ok"
    assert run("generic", "--budget", "9")[0] == 3


def test_nil2_commands():
    assert run("nil2", "roundtrip", fixture_path("sym.bil"))[0] == 0
    assert run("nil2", "functor", fixture_path("heisenberg.lla"))[0] == 0


def test_usage_errors(tmp_path):
    assert run("frobnicate")[0] == 2
    assert run("verify", "suite", str(tmp_path / "missing.lla"))[0] == 2
    bad = tmp_path / "bad.lla"
    bad.write_text("lla p=5 c=2 dim=1\nlevels 7\n")
    assert run("verify", "suite", str(bad))[0] == 2


def test_deterministic_output():
    a = run("free", "3", "1,1,2", "4", "7")[1]
    b = run("free", "3", "1,1,2", "4", "7")[1]
    assert a == b
