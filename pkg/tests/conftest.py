import pytest

from tracesynth.automata import Automaton
from tracesynth.instances import parse_instance
from tracesynth.traces import validate_alphabet
from tracesynth.unfold import Base, Marked


def I1_doc():
    return {
        "alphabet": {"actions": ["a", "b"], "independence": [["a", "b"]]},
        "automaton": {
            "states": ["q0"], "initial": "q0", "finals": ["q0"],
            "transitions": [["q0", "a", "q0"], ["q0", "b", "q0"]],
        },
    }


def I2_doc():
    return {
        "alphabet": {"actions": ["a", "b"], "independence": []},
        "automaton": {
            "states": ["q0", "q1"], "initial": "q0", "finals": ["q0"],
            "transitions": [["q0", "a", "q1"], ["q1", "b", "q0"]],
        },
        "distribution": [["a", "b"]],
    }


@pytest.fixture
def I1():
    return parse_instance(I1_doc())


@pytest.fixture
def I2():
    return parse_instance(I2_doc())


@pytest.fixture
def ab_indep():
    return validate_alphabet(["a", "b"], [("a", "b")])


@pytest.fixture
def ab_dep():
    return validate_alphabet(["a", "b"], [])


def words(*texts):
    return {tuple(t) for t in texts}


def plain(label):
    """Library marked state as the oracle's nested tuple."""
    if isinstance(label, Base):
        return label.state
    assert isinstance(label, Marked)
    return (plain(label.inner), label.actions, label.anchor, label.rank)


def automaton(states, initial, actions, transitions, finals):
    return Automaton(tuple(states), initial, frozenset(actions), tuple(transitions), frozenset(finals))
