import json

import pytest

from tracesynth.automata import enumerate_language
from tracesynth.cli import main
from tracesynth.instances import load_instance
from tracesynth.harness import run_pipeline
from tracesynth.asyncauto import bounded_language

from conftest import I1_doc, I2_doc


@pytest.fixture
def files(tmp_path):
    def put(name, doc):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(path)
    return put


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate(files, capsys):
    code, out, _ = run(capsys, "validate", files("i1.json", I1_doc()))
    assert code == 0 and "1 states" in out and "holds" in out


def test_unfold(files, capsys, tmp_path):
    out_path = tmp_path / "u.json"
    code, out, _ = run(capsys, "unfold", files("i1.json", I1_doc()), "-o", str(out_path))
    assert code == 0 and "unfolding states: 6" in out
    doc = json.loads(out_path.read_text())
    assert len(doc["unfolding"]["states"]) == 6
    assert doc["unfolding"]["morphism"] == ["q0"] * 6
    bare = I1_doc()
    bare["automaton"]["transitions"] = []
    code, out, _ = run(capsys, "unfold", files("bare.json", bare), "-o", str(tmp_path / "b.json"))
    assert code == 0 and "unfolding states: 1" in out


def test_corrupt_file(files, capsys):
    code, _, err = run(capsys, "unfold", files("bad.json", "{oops"), "-o", "-")
    assert code == 2 and "error" in err


def test_synthesize(files, capsys, tmp_path):
    out_path = tmp_path / "s.json"
    code, out, _ = run(capsys, "synthesize", files("i1.json", I1_doc()), "-o", str(out_path))
    assert code == 0
    assert "process 1: 6 local states" in out and "process 2: 6 local states" in out
    assert "bound" in out
    doc = json.loads(out_path.read_text())
    assert set(doc["reach"]) == {"1", "2"}
    bad = I1_doc()
    bad["distribution"] = [["a", "b"]]
    code, _, _ = run(capsys, "synthesize", files("bad.json", bad), "-o", str(out_path))
    assert code == 2


def test_single_process_language(files):
    inst = load_instance(files("i2.json", I2_doc()))
    p = run_pipeline(inst)
    assert bounded_language(p.bundle.async_automaton, 6) == enumerate_language(p.unfolding.automaton, 6)


def test_check(files, capsys):
    code, out, _ = run(capsys, "check", files("i1.json", I1_doc()), "--maxlen", "6")
    assert code == 0 and "all checks passed" in out
    code, out, _ = run(capsys, "check", files("i2.json", I2_doc()))
    assert code == 0
    code, out, _ = run(capsys, "check", files("i1b.json", I1_doc()), "--full", "--maxlen", "4")
    assert code == 0 and "consecutive ranks" in out


def test_check_skips_without_diamond(files, capsys):
    doc = I1_doc()
    doc["automaton"] = {"states": ["p", "r", "s"], "initial": "p", "finals": ["s"],
                        "transitions": [["p", "a", "r"], ["r", "b", "s"]]}
    code, out, _ = run(capsys, "check", files("x.json", doc))
    assert code == 2 and "check skipped" in out


def test_check_bad_maxlen(files, capsys):
    code, _, _ = run(capsys, "check", files("i1.json", I1_doc()), "--maxlen", "9")
    assert code == 2


def test_cap_exit_code(files, capsys, tmp_path):
    out_path = tmp_path / "g.json"
    run(capsys, "generate", "--seed", "0", "-o", str(out_path))
    code, _, err = run(capsys, "unfold", str(out_path), "--piece-cap", "20", "-o", "-")
    assert code == 3 and "cap" in err
    code, _, _ = run(capsys, "check", files("i1.json", I1_doc()), "--cap", "3")
    assert code == 3


def test_stats(files, capsys):
    code, out, _ = run(capsys, "stats", files("i1.json", I1_doc()))
    assert code == 0
    assert any(line.startswith("β̂_0 = 1") and line.rstrip().endswith("ok") for line in out.splitlines())
    row = next(line for line in out.splitlines() if line.startswith("β̂_2 ≤ closed-form"))
    assert row.split()[-3] == "6" and row.rstrip().endswith("ok")
    one = {"alphabet": {"actions": ["a"]},
           "automaton": {"states": ["p"], "initial": "p", "finals": ["p"], "transitions": [["p", "a", "p"]]}}
    code, out, _ = run(capsys, "stats", files("one.json", one))
    assert code == 0 and any(line.startswith("τ̂_1 = 1") for line in out.splitlines())


def test_generate_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "generate", "--seed", "5", "--alphabet", "2", "-o", str(a))[0] == 0
    assert run(capsys, "generate", "--seed", "5", "--alphabet", "2", "-o", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("command", ["unfold", "synthesize"])
def test_outputs_byte_identical(files, capsys, tmp_path, command):
    src = files("i.json", I1_doc())
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, command, src, "-o", str(a))
    run(capsys, command, src, "-o", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_export_dot(files, capsys, tmp_path):
    src = files("i1.json", I1_doc())
    for what, nodes in (("source", 1), ("unfolding", 6)):
        out_path = tmp_path / f"{what}.dot"
        assert run(capsys, "export-dot", src, "--what", what, "-o", str(out_path))[0] == 0
        text = out_path.read_text()
        assert text.startswith("digraph") and text.count("circle, label=") == nodes
    code, out, _ = run(capsys, "export-dot", src, "--what", "synthesized")
    assert code == 0 and "digraph synthesized" in out


def test_backends_write_identical_bundles(files, capsys, tmp_path):
    import os
    import subprocess
    import sys

    src = files("g.json", I1_doc())
    here, pure = tmp_path / "here.json", tmp_path / "pure.json"
    run(capsys, "synthesize", src, "-o", str(here))
    env = dict(os.environ, TRACESYNTH_PURE="1")
    subprocess.run([sys.executable, "-m", "tracesynth.cli", "synthesize", src, "-o", str(pure)],
                   env=env, check=True, capture_output=True)
    assert here.read_bytes() == pure.read_bytes()
