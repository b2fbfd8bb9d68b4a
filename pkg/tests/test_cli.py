import io
import json
import subprocess
import sys

import pytest

from elrc.cli import run

from conftest import kb_path


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


BC = kb_path("bloodcells.dkb")


def test_query_rc_entailed():
    code, out, _ = call("query", BC, "BRBC <~ NotN", "--closure", "rc")
    assert code == 0 and "entailed" in out and "not entailed" not in out


def test_query_rc_not_entailed():
    code, out, _ = call("query", BC, "BRBC <~ some hasN. top")
    assert code == 1 and "not entailed" in out


def test_query_inherit():
    code, _, _ = call("query", BC, "MRBC <~ some hasCM. top", "--closure", "inherit")
    assert code == 0


def test_query_strict():
    code, out, _ = call("query", BC, "BRBC <= VRBC")
    assert code == 0 and "(classical)" in out


def test_rank_exinfty():
    code, out, _ = call("rank", kb_path("exinfty.dkb"))
    assert code == 0
    assert out == (
        "D0:\n  B <~ C\n"
        "infinite rank:\n  A <~ D\n  E <~ some r. A\n"
        "T* additions:\n  A <= bot\n  E <= bot\n"
    )


def test_rank_bloodcells():
    _, out, _ = call("rank", BC)
    assert out.index("D0:") < out.index("VRBC <~ some hasCM. top") < out.index("D1:") < out.index("MRBC <~ NotN")


def test_explain():
    _, out, _ = call("query", BC, "BRBC <~ NotN", "--explain")
    assert "rank of BRBC: 1" in out and "D1" in out and "subsumption tests:" in out


@pytest.mark.parametrize(
    "argv",
    [
        ("query", BC, "BRBC <~ NotN"),
        ("query", BC, "BRBC <~ some hasN. top"),
        ("query", BC, "MRBC <~ some hasCM. top", "--closure", "inherit"),
        ("query", kb_path("abox_nominals.dkb"), "<a> <~ D"),
        ("query", BC, "BRBC <= VRBC"),
    ],
)
def test_machine_record(argv):
    code_h, human, _ = call(*argv)
    code_m, machine, _ = call(*argv, "--machine")
    assert code_h == code_m
    rec = json.loads(machine)
    assert list(rec) == ["entailed", "closure", "rank", "tests", "ms"]
    assert rec["entailed"] == ("not entailed" not in human)
    assert machine.count("\n") == 1


def test_deterministic():
    argv = ("query", BC, "MRBC <~ some hasCM. top", "--closure", "inherit", "--explain")
    assert call(*argv) == call(*argv)
    for cmd in ("rank", "normalize", "net", "check", "safety"):
        assert call(cmd, BC) == call(cmd, BC)
    m1, m2 = (json.loads(call("query", BC, "BRBC <~ NotN", "--machine")[1]) for _ in range(2))
    m1.pop("ms"), m2.pop("ms")
    assert m1 == m2


def test_check():
    code, out, _ = call("check", kb_path("bloodcells_individuals.dkb"))
    assert code == 0 and "rank-satisfiable: yes" in out


def test_check_unsatisfiable(tmp_path):
    p = tmp_path / "bad.dkb"
    p.write_text("tbox:\n {a} <= A\n A <= bot\ndbox:\n top <~ bot\n")
    code, out, _ = call("check", p)
    assert code == 1 and "rank-satisfiable: no" in out and "unsatisfiable individuals: a" in out


def test_safety():
    code, out, _ = call("safety", kb_path("nosafe.dkb"))
    assert code == 1 and "unsafe: A <= {a}" in out
    assert call("safety", BC)[0] == 0


def test_normalize_prints_names():
    code, out, _ = call("normalize", BC)
    assert code == 0 and "# __rc.defn.0 == some hasN. top" in out


def test_net_dot():
    code, out, _ = call("net", kb_path("penguin.dkb"))
    assert code == 0 and out.startswith("digraph net {")


def test_parse_error_position(tmp_path):
    p = tmp_path / "broken.dkb"
    p.write_text("tbox:\n  A <= & B\n")
    code, _, err = call("rank", p)
    assert code == 2 and f"{p}:2:8:" in err


def test_query_parse_error():
    code, _, err = call("query", BC, "A <= ")
    assert code == 2 and "error:" in err


def test_missing_file(tmp_path):
    code, _, err = call("rank", tmp_path / "nope.dkb")
    assert code == 2 and "error:" in err


def test_classical_nominal_in_defeasible_query():
    code, _, err = call("query", kb_path("abox_nominals.dkb"), "{a} <~ C")
    assert code == 2 and "<a>" in err


def test_unsafe_kb_is_input_error():
    code, _, err = call("query", kb_path("nosafe.dkb"), "A <= B")
    assert code == 2 and "nominal-safe" in err


def test_usage_error():
    with pytest.raises(SystemExit) as e:
        call("query")
    assert e.value.code == 2


def test_hidden_debug_oracle():
    code, out, _ = call("debug-oracle", BC)
    assert code == 0 and "ok MRBC: delta-test=True oracle=True" in out
    help_text = subprocess.run(
        [sys.executable, "-m", "elrc", "--help"], capture_output=True, text=True, check=True
    ).stdout
    assert "debug-oracle" not in help_text and "query" in help_text


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "elrc", "query", str(BC), "BRBC <~ NotN"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "entailed" in proc.stdout
