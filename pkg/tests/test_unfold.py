import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from tracesynth.automata import check_morphism, enumerate_language, restrict
from tracesynth.errors import CapExceeded, ValidationError
from tracesynth.instances import generate_instance, parse_instance
from tracesynth.unfold import BOX, Base, Marked, Unfolder, min_rank, unfolding

from conftest import I2_doc, automaton, plain
from oracle import Oracle


def oracle_for(inst):
    A = inst.automaton
    return Oracle(inst.alphabet.actions, inst.alphabet.independence, A.states, A.initial,
                  A.transitions, A.finals)


def same_piece(piece, ref):
    states, init, trans, image = ref
    assert [plain(v) for v in piece.labels] == states
    assert plain(piece.initial) == init
    assert {(plain(s), a, plain(t)) for s, a, t in piece.automaton.transitions} == trans
    assert {plain(v): q for v, q in piece.morphism.items()} == image


def test_base_box(I2):
    U = Unfolder(I2.alphabet, I2.automaton)
    b = U.base_box("q0")
    assert len(b) == 1 and b.final_indices == {0}
    assert enumerate_language(b.automaton, 3) == {()}
    assert U.base_box("q1").final_indices == set()
    assert b.labels == [Base("q0")]


def test_triangle_sizes(I1, I2):
    U = Unfolder(I1.alphabet, I1.automaton)
    assert len(U.build_triangle({"a"}, "q0")) == 1
    assert len(U.build_triangle({"a", "b"}, "q0")) == 5
    lonely = automaton(["p", "r"], "p", "ab", [("r", "a", "p")], [])
    alph = I1.alphabet
    assert len(Unfolder(alph, lonely).build_triangle({"a", "b"}, "p")) == 1
    with pytest.raises(ValidationError):
        U.build_triangle(set(), "q0")


def test_missing(I1, I2):
    U = Unfolder(I1.alphabet, I1.automaton)
    (pair,) = U.missing({"b"}, "q0", "q0")
    assert pair == (Marked(Base("q0"), frozenset(), "q0", 1), "b")
    no_in = automaton(["p", "r"], "p", "ab", [("p", "a", "p")], [])
    assert Unfolder(I1.alphabet, no_in).missing({"a"}, "p", "r") == []
    # I2: the height-1 state of the {a,b} triangle at q0 is the copy of the
    # a-box reaching q1, whose b-move goes back to q0
    V = Unfolder(I2.alphabet, I2.automaton)
    assert [a for _, a in V.missing({"a", "b"}, "q0", "q0")] == ["b"]
    assert oracle_for(I2).missing(frozenset("ab"), "q0", "q0") == [
        (plain(w), a) for w, a in V.missing({"a", "b"}, "q0", "q0")
    ]


def test_min_rank():
    T = frozenset("a")
    assert min_rank(T, "q", [], 7) == 8
    labels = [Marked(Base("q"), T, "q", r) for r in (3, 4, 5)]
    assert min_rank(T, "q", labels, 7) == 3
    assert min_rank(T, "q", [Marked(Base("q"), T, "q", 1)], 1) == 1


def test_max_out_degree(I1):
    assert Unfolder(I1.alphabet, I1.automaton).max_out_degree({"b"}) == 1
    bare = automaton(["p"], "p", "ab", [], ["p"])
    assert Unfolder(I1.alphabet, bare).max_out_degree({"a", "b"}) == 0


def test_boxes_on_I1(I1):
    U = Unfolder(I1.alphabet, I1.automaton)
    assert len(U.build_box(set(), "q0")) == 1
    bbox = U.build_box({"b"}, "q0")
    assert bbox.copies == 2 and len(bbox) == 2
    ranks = sorted(v.rank for v in bbox.labels)
    assert ranks == [1, 2]
    # one b-move each way between the two copies
    assert sorted((bbox.labels[s].rank, a, bbox.labels[t].rank) for s, a, t in bbox.edges) == [
        (1, "b", 2), (2, "b", 1)
    ]
    full = U.build_box({"a", "b"}, "q0")
    assert len(full) == 6
    outer = [v.actions for v in full.labels]
    assert outer.count(frozenset("b")) == 2 and outer.count(frozenset("a")) == 4


def test_unfolding_I1(I1):
    unf = unfolding(I1.alphabet, I1.automaton)
    assert len(unf) == 6
    assert set(unf.morphism.values()) == {"q0"}
    assert unf.final_indices == set(range(6))
    assert enumerate_language(unf.automaton, 3) == {
        ("b",) * m + ("a",) * n for m in range(4) for n in range(4 - m)
    }


def test_unfolding_without_transitions(I1):
    bare = automaton(["p"], "p", "ab", [], [])
    assert len(unfolding(I1.alphabet, bare)) == 1


def test_cap():
    inst = generate_instance(0)
    with pytest.raises(CapExceeded):
        unfolding(inst.alphabet, inst.automaton, cap=50)


def test_unknown_action(I1):
    A = automaton(["p"], "p", "az", [("p", "z", "p")], [])
    with pytest.raises(ValidationError):
        Unfolder(I1.alphabet, A)


def test_marked_nesting_discipline(I1):
    U = Unfolder(I1.alphabet, I1.automaton)
    unf = U.unfolding()
    for v in unf.labels:
        assert v.rank >= 1
        depth = 0
        while isinstance(v, Marked):
            v = v.inner
            depth += 1
        assert isinstance(v, Base) and depth >= 1


def test_every_piece_is_a_morphism(I1, I2):
    for inst in (I1, I2, generate_instance(7)):
        U = Unfolder(inst.alphabet, inst.automaton)
        U.unfolding()
        for (T, q), piece in list(U.boxes().items()) + list(U.triangles().items()):
            assert piece.morphism[piece.initial] == q
            assert check_morphism(piece.morphism, piece.automaton, restrict(inst.automaton, T, q))


@pytest.mark.parametrize("make", [lambda: parse_instance(I2_doc()), lambda: generate_instance(7),
                                  lambda: generate_instance(14), lambda: generate_instance(4)])
def test_matches_oracle(make, I1):
    for inst in (I1, make()):
        U = Unfolder(inst.alphabet, inst.automaton)
        O = oracle_for(inst)
        same_piece(U.unfolding(), O.unfolding())
        for T in O.all_subsets():
            for q in inst.automaton.states:
                same_piece(U.build_box(T, q), O.box(T, q))
                if T:
                    same_piece(U.build_triangle(T, q), O.triangle(T, q))
                    assert U.max_out_degree(T) == O.max_out_degree(T)


@st.composite
def tiny_instances(draw):
    acts = draw(st.sampled_from(["ab", "abc"]))
    pairs = [[x, y] for i, x in enumerate(acts) for y in acts[i + 1:] if draw(st.booleans())]
    n = draw(st.integers(1, 3))
    states = [f"q{i}" for i in range(n)]
    trans = draw(st.lists(st.tuples(st.sampled_from(states), st.sampled_from(acts),
                                    st.sampled_from(states)), max_size=5, unique=True))
    finals = draw(st.lists(st.sampled_from(states), unique=True))
    return parse_instance({
        "alphabet": {"actions": list(acts), "independence": pairs},
        "automaton": {"states": states, "initial": "q0", "finals": finals,
                      "transitions": [list(t) for t in trans]},
    })


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(tiny_instances())
def test_matches_oracle_on_random_automata(inst):
    U = Unfolder(inst.alphabet, inst.automaton, cap=400)
    try:
        unf = U.unfolding()
    except CapExceeded:
        return
    same_piece(unf, oracle_for(inst).unfolding())
    assert unf.kind == BOX
