import subprocess
import sys
from fractions import Fraction as F

import pytest

from conftest import EX1, EX2
from purecircuit import textio as tio
from purecircuit.cli import EXIT_CODES, main, run
from purecircuit.core import Value
from purecircuit.gcircuit import encode_pc_witness_gc
from purecircuit.solvers import enumerate_solutions
from purecircuit.sperner import SpernerInstance, labeling_circuit
from purecircuit.threshold import encode_pc_witness_threshold

HEADER = "pure-circuit v1\n"


@pytest.fixture
def files(tmp_path):
    (tmp_path / "ex1.pc").write_text(HEADER + EX1)
    (tmp_path / "ex2.pc").write_text(HEADER + EX2)
    return tmp_path


def go(*argv):
    return run([str(a) for a in argv])


def test_exit_codes():
    assert EXIT_CODES == {"OK": 0, "VIOLATED": 1, "INCONCLUSIVE": 2, "ERROR": 3}


def test_validate(files):
    res = go("validate", files / "ex1.pc")
    assert res.status == "OK"
    assert "nodes 3" in res.payload


def test_verify_nor_purify_example(files):
    (files / "a.txt").write_text("u = bot\nv = 0\nw = bot\n")
    assert go("verify", files / "ex2.pc", files / "a.txt").status == "OK"
    (files / "b.txt").write_text("u = 1\nv = 0\nw = bot\n")
    res = go("verify", files / "ex2.pc", files / "b.txt")
    assert res.status == "VIOLATED" and res.exit_code == 1


def test_verify_missing_entry_is_an_error(files):
    (files / "a.txt").write_text("u = bot\nv = 0\n")
    res = go("verify", files / "ex2.pc", files / "a.txt")
    assert res.status == "ERROR" and "w" in res.payload[0]


def test_solve_methods(files):
    res = go("solve", files / "ex1.pc", "--method", "brute")
    assert res.payload == ["u = bot", "v = bot", "w = 0"]
    assert go("solve", files / "ex1.pc", "--method", "relax").status == "OK"
    assert go("solve", files / "ex1.pc", "--method", "non-robust").status == "ERROR"
    (files / "nr.pc").write_text(HEADER + "semantics nonrobust\n" + EX1)
    assert go("solve", files / "nr.pc", "--method", "non-robust").status == "OK"


def test_wsne_pipeline(files):
    prefix = files / "g"
    assert go("reduce", files / "ex1.pc", "--to", "wsne", "--out", prefix).status == "OK"
    res = go("oracle", f"{prefix}.poly", "--mode", "wsne", "--eps", "3/10", "--step", "1/100")
    assert res.status == "OK"
    (files / "s.txt").write_text("\n".join(res.payload) + "\n")
    dec = go("decode", files / "s.txt", "--map", f"{prefix}.map")
    assert dec.status == "OK" and dec.payload[:3] == ["u = bot", "v = bot", "w = 0"]


def test_gadget_check_wsne_and_violated():
    res = go("gadget-check", "--kind", "wsne-and", "--eps", "34/100")
    assert res.status == "VIOLATED" and res.exit_code == 1
    assert any("inputs (1, 1)" in line and "gap 1/3" in line for line in res.payload)
    assert go("gadget-check", "--kind", "wsne-and", "--eps", "33/100").status == "OK"


def test_errors_are_reported(files):
    assert go("frobnicate").status == "ERROR"
    (files / "bad.pc").write_text(HEADER + "gate NOT u -> v w\n")
    res = go("validate", files / "bad.pc")
    assert res.status == "ERROR" and "line 2" in res.payload[0]
    assert go("reduce", files / "ex2.pc", "--to", "wsne").status == "ERROR"


def test_output_is_deterministic(files):
    argv = ["reduce", files / "ex2.pc", "--to", "ne", "--eps", "8/100", "--prepare"]
    assert go(*argv).render() == go(*argv).render()
    s1 = subprocess.run([sys.executable, "-m", "purecircuit", "solve", str(files / "ex2.pc")], capture_output=True)
    s2 = subprocess.run([sys.executable, "-m", "purecircuit", "solve", str(files / "ex2.pc")], capture_output=True)
    assert s1.stdout == s2.stdout and s1.returncode == 0


def test_main_returns_exit_code(files, capsys):
    assert main(["validate", str(files / "ex1.pc")]) == 0
    assert capsys.readouterr().out.startswith("status OK\n")


def test_reduce_stdout_carries_both_documents(files):
    res = go("reduce", files / "ex1.pc", "--to", "threshold")
    assert res.payload[0] == "begin target" and "begin map" in res.payload


# Every reduce target writes a map that suffices to decode.

def _profile_text(values: dict[str, Value], players) -> str:
    mix = {Value.ZERO: "1 0", Value.ONE: "0 1", Value.BOT: "1/2 1/2"}
    return "".join(f"player {p}: {mix[values.get(p, Value.BOT)]}\n" for p in players)


@pytest.mark.parametrize("target", ["ne", "winlose"])
def test_polymatrix_maps_decode(files, target):
    prefix = files / target
    extra = ["--eps", "8/100"] if target == "ne" else []
    assert go("reduce", files / "ex1.pc", "--to", target, "--out", prefix, *extra).status == "OK"
    game = tio.parse_polymatrix((files / f"{target}.poly").read_text())
    sol = {"u": Value.BOT, "v": Value.BOT, "w": Value.ZERO}
    (files / "s.txt").write_text(_profile_text(sol, game.players))
    dec = go("decode", files / "s.txt", "--map", f"{prefix}.map")
    assert dec.status == "OK" and dec.payload[:3] == ["u = bot", "v = bot", "w = 0"]


@pytest.mark.parametrize("target", ["gcircuit", "threshold"])
def test_prepared_maps_decode(files, target):
    prefix = files / target
    assert go("reduce", files / "ex1.pc", "--to", target, "--prepare", "--out", prefix).status == "OK"
    doc = tio.parse_map((files / f"{target}.map").read_text())
    rmap = tio.reduction_map_from_doc(doc)
    eps = F(1, 20)
    ext = ".gc" if target == "gcircuit" else ".th"
    text = (files / f"{target}{ext}").read_text()
    if target == "gcircuit":
        encode, parse = encode_pc_witness_gc, tio.parse_gcircuit
    else:
        encode, parse = encode_pc_witness_threshold, tio.parse_threshold
    target_game = parse(text)
    x = None
    for a in enumerate_solutions(rmap.source):
        x = encode(target_game, rmap, a, eps)
        if x is not None:
            break
    assert x is not None
    (files / "x.txt").write_text(tio.write_values(x))
    assert go("verify", f"{prefix}{ext}", files / "x.txt", "--eps", "1/20").status == "OK"
    dec = go("decode", files / "x.txt", "--map", f"{prefix}.map", "--eps", "1/20")
    assert dec.status == "OK" and len([l for l in dec.payload if " = " in l]) == 3


def test_bimatrix_map_decodes(files):
    prefix = files / "b"
    assert go("reduce", files / "ex1.pc", "--to", "bimatrix", "--out", prefix).status == "OK"
    res = go("oracle", f"{prefix}.bim", "--mode", "relwsne", "--eps", "1/10", "--step", "1/20")
    assert res.status == "OK"
    (files / "s.txt").write_text("\n".join(res.payload) + "\n")
    assert go("verify", f"{prefix}.bim", files / "s.txt", "--eps", "1/10").status == "OK"
    assert go("decode", files / "s.txt", "--map", f"{prefix}.map").status == "OK"


def test_sperner_map_decodes(files):
    inst = SpernerInstance(1, 2, labeling_circuit(1, 2, lambda p: [1 if p[0] < 2 else -1]))
    (files / "s.sp").write_text(tio.write_sperner(inst))
    prefix = files / "sp"
    assert go("reduce-sperner", files / "s.sp", "--out", prefix).status == "OK"
    res = go("solve", f"{prefix}.pc", "--method", "relax")
    assert res.status == "OK"
    (files / "a.txt").write_text("\n".join(res.payload) + "\n")
    dec = go("decode", files / "a.txt", "--map", f"{prefix}.map")
    assert dec.status == "OK"


def test_oracle_reports_inconclusive(files):
    prefix = files / "b"
    go("reduce", files / "ex1.pc", "--to", "bimatrix", "--out", prefix)
    res = go("oracle", f"{prefix}.bim", "--mode", "relwsne", "--eps", "1/57", "--step", "1/10")
    assert res.status == "INCONCLUSIVE" and res.exit_code == 2


def test_command_output_feeds_back_in(files):
    prefix = files / "g"
    go("reduce", files / "ex1.pc", "--to", "wsne", "--out", prefix)
    res = go("oracle", f"{prefix}.poly", "--mode", "wsne", "--eps", "3/10", "--step", "1/100")
    (files / "s.txt").write_text(res.render())
    assert go("decode", files / "s.txt", "--map", f"{prefix}.map").status == "OK"
    (files / "a.txt").write_text(go("solve", files / "ex1.pc").render())
    assert go("verify", files / "ex1.pc", files / "a.txt").status == "OK"
    (files / "bad.txt").write_text("status OK\nu = 7\n")
    res = go("verify", files / "ex1.pc", files / "bad.txt")
    assert res.status == "ERROR" and "line 2, token '7'" in res.payload[0]
