import json
import logging

import pytest

from tracesynth.automata import check_id
from tracesynth.errors import ValidationError
from tracesynth.instances import generate_instance, instance_to_json, load_instance, parse_instance

from conftest import I1_doc


def write(tmp_path, doc, name="inst.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return path


def test_load_I1(tmp_path):
    inst = load_instance(write(tmp_path, I1_doc()))
    assert inst.distribution.as_lists() == [["a"], ["b"]]
    assert inst.satisfies_id


def test_reflexive_pair_rejected(tmp_path):
    doc = I1_doc()
    doc["alphabet"]["independence"] = [["a", "a"]]
    with pytest.raises(ValidationError):
        load_instance(write(tmp_path, doc))


def test_bad_files(tmp_path):
    with pytest.raises(ValidationError):
        load_instance(write(tmp_path, "{not json"))
    with pytest.raises(ValidationError):
        load_instance(tmp_path / "missing.json")
    with pytest.raises(ValidationError):
        parse_instance({"alphabet": {"actions": ["a"]}})
    doc = I1_doc()
    doc["distribution"] = [["a", "b"]]
    with pytest.raises(ValidationError):
        parse_instance(doc)


def test_id_violation_warns(tmp_path, caplog):
    doc = I1_doc()
    doc["automaton"] = {"states": ["p", "r", "s"], "initial": "p", "finals": ["s"],
                        "transitions": [["p", "a", "r"], ["r", "b", "s"]]}
    with caplog.at_level(logging.WARNING):
        inst = load_instance(write(tmp_path, doc))
    assert not inst.satisfies_id
    assert "diamond" in caplog.text


def test_generate_deterministic_and_id():
    for seed in range(10):
        a, b = generate_instance(seed), generate_instance(seed)
        assert instance_to_json(a) == instance_to_json(b)
        assert check_id(a.automaton, a.alphabet) == []
        assert len(a.automaton.states) <= 6


def test_roundtrip(tmp_path):
    inst = generate_instance(3, alphabet=2)
    again = load_instance(write(tmp_path, instance_to_json(inst)))
    assert instance_to_json(again) == instance_to_json(inst)
    assert again.automaton == inst.automaton


def test_generate_params():
    with pytest.raises(ValueError):
        generate_instance(0, alphabet=0)
    inst = generate_instance(1, alphabet=2, states=4)
    assert len(inst.alphabet) == 2 and len(inst.automaton.states) <= 4
