"""Instance files: loading, validation, serialisation and generation.

An instance is a JSON document::

    {"alphabet": {"actions": ["a", "b"], "independence": [["a", "b"]]},
     "automaton": {"states": ["q0"], "initial": "q0", "finals": ["q0"],
                   "transitions": [["q0", "a", "q0"], ["q0", "b", "q0"]]},
     "distribution": [["a"], ["b"]]}

``distribution`` is optional.  Array order is significant: the order of
``actions`` is the tie-breaking order of the construction and the order
of ``states`` fixes every iteration over states.
"""

from __future__ import annotations

import itertools
import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .asyncauto import (
    AsyncAutomaton,
    Distribution,
    default_distribution,
    global_automaton_bounded,
    validate_distribution,
)
from .automata import Automaton, check_id
from .errors import CapExceeded, ValidationError
from .traces import IndependenceAlphabet, validate_alphabet

log = logging.getLogger(__name__)


@dataclass
class Instance:
    alphabet: IndependenceAlphabet
    automaton: Automaton
    distribution: Distribution
    id_violations: list

    @property
    def satisfies_id(self) -> bool:
        return not self.id_violations


def _require(doc: dict, key: str, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise ValidationError(f"{where}: missing field {key!r}")
    return doc[key]


def parse_instance(doc: Any) -> Instance:
    alph_doc = _require(doc, "alphabet", "instance")
    alphabet = validate_alphabet(
        _require(alph_doc, "actions", "alphabet"), alph_doc.get("independence", [])
    )
    aut_doc = _require(doc, "automaton", "instance")
    states = [_state(q) for q in _require(aut_doc, "states", "automaton")]
    transitions = []
    for t in aut_doc.get("transitions", []):
        if not isinstance(t, list) or len(t) != 3:
            raise ValidationError(f"automaton.transitions: entry {t!r} is not [q, a, q']")
        transitions.append((_state(t[0]), t[1], _state(t[2])))
    for _, a, _ in transitions:
        if a not in alphabet.position:
            raise ValidationError(f"automaton.transitions: unknown action {a!r}")
    automaton = Automaton(
        states,
        _state(_require(aut_doc, "initial", "automaton")),
        frozenset(alphabet.actions),
        transitions,
        frozenset(_state(q) for q in aut_doc.get("finals", [])),
    )
    if doc.get("distribution") is None:
        distribution = default_distribution(alphabet)
    else:
        distribution = validate_distribution(alphabet, doc["distribution"])
    return Instance(alphabet, automaton, distribution, check_id(automaton, alphabet))


def _state(q) -> str:
    if not isinstance(q, str):
        raise ValidationError(f"state identifiers must be strings, got {q!r}")
    return q


def load_instance(path) -> Instance:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from None
    inst = parse_instance(doc)
    if inst.id_violations:
        log.warning(
            "%s: automaton violates the independent diamond property (%d witnesses, e.g. %s); "
            "the language-equality guarantee does not apply",
            path, len(inst.id_violations), inst.id_violations[0],
        )
    return inst


def instance_document(alphabet: IndependenceAlphabet, A: Automaton, dist: Distribution | None) -> dict:
    idx = A.index
    doc = {
        "alphabet": {
            "actions": list(alphabet.actions),
            "independence": sorted(
                (alphabet.ordered(p) for p in alphabet.independence),
                key=lambda p: [alphabet.position[x] for x in p],
            ),
        },
        "automaton": {
            "states": list(A.states),
            "initial": A.initial,
            "finals": [q for q in A.states if q in A.finals],
            "transitions": [
                list(t)
                for t in sorted(set(A.transitions), key=lambda t: (idx[t[0]], alphabet.position[t[1]], idx[t[2]]))
            ],
        },
    }
    if dist is not None:
        doc["distribution"] = dist.as_lists()
    return doc


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def instance_to_json(inst: Instance) -> str:
    return dumps(instance_document(inst.alphabet, inst.automaton, inst.distribution))


# -- generation ---------------------------------------------------------------

ACTION_NAMES = "abcdefgh"


def _random_async(rng: random.Random, dist: Distribution, local: int) -> AsyncAutomaton:
    K = len(dist)
    local_states = [list(range(rng.randint(1, local))) for _ in range(K)]
    relations = {}
    for a in dist.alphabet.actions:
        loc = dist.loc(a)
        pairs = []
        for src in itertools.product(*(local_states[k - 1] for k in loc)):
            if rng.random() < 0.6:
                for _ in range(rng.choice((1, 1, 2))):
                    dst = tuple(rng.choice(local_states[k - 1]) for k in loc)
                    pairs.append((src, dst))
        relations[a] = pairs
    finals = [
        g for g in itertools.product(*local_states) if rng.random() < 0.4
    ]
    return AsyncAutomaton.from_tables(dist, local_states, [0] * K, relations, finals)


def generate_instance(
    seed: int,
    states: int = 6,
    alphabet: int = 3,
    local: int = 3,
    cap: int = 10_000,
    attempts: int = 500,
) -> Instance:
    """Random instance satisfying the independent diamond property.

    A random asynchronous automaton over a random independence alphabet is
    expanded into its reachable global automaton, which is the returned
    source automaton; draws whose global automaton has more than
    ``states`` states, or no transitions, are rejected.  Deterministic in
    every argument.
    """
    if not 1 <= alphabet <= len(ACTION_NAMES):
        raise ValueError(f"alphabet size must be between 1 and {len(ACTION_NAMES)}")
    if states < 1 or local < 1:
        raise ValueError("states and local must be positive")
    rng = random.Random(seed)
    for _ in range(attempts):
        acts = list(ACTION_NAMES[:alphabet])
        pairs = [p for p in itertools.combinations(acts, 2) if rng.random() < 0.5]
        alph = validate_alphabet(acts, pairs)
        dist = default_distribution(alph)
        AA = _random_async(rng, dist, local)
        try:
            G = global_automaton_bounded(AA, cap)
        except CapExceeded:
            continue
        if len(G.states) > states or not G.transitions:
            continue
        names = {g: f"q{i}" for i, g in enumerate(G.states)}
        A = Automaton(
            [names[g] for g in G.states],
            names[G.initial],
            frozenset(acts),
            [(names[g], a, names[r]) for g, a, r in G.transitions],
            frozenset(names[g] for g in G.finals),
        )
        return Instance(alph, A, dist, check_id(A, alph))
    raise CapExceeded(attempts, "rejected draws")
