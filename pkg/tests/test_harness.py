
from tracesynth import harness
from tracesynth.harness import (
    check_box_paths,
    check_copy_structure,
    check_language_equality,
    complexity_report,
    box_size_bound,
    lift_into_extended,
    run_pipeline,
    verify,
)
from tracesynth.instances import generate_instance, parse_instance
from tracesynth.synthesis import Internal, build_extended, project_rho, extend_alphabet


def test_verify_I1_and_I2(I1, I2):
    for inst in (I1, I2):
        results = verify(run_pipeline(inst))
        assert all(r.ok for r in results), [r.line() for r in results if not r.ok]


def test_report_I1(I1):
    p = run_pipeline(I1)
    rep = complexity_report(p.unfolder, p.unfolding, p.bundle)
    assert rep.box_max[0] == 1 and rep.triangle_max[1] == 1
    assert rep.box_max[2] == 6 and rep.triangle_max[2] == 5
    assert rep.copies == {("a",): 2, ("b",): 2}
    assert rep.exponent == 216
    assert rep.ok
    assert rep.local_states == {1: 6, 2: 6}
    assert rep.table() == complexity_report(p.unfolder, p.unfolding, p.bundle).table()


def test_report_one_action():
    inst = parse_instance({
        "alphabet": {"actions": ["a"]},
        "automaton": {"states": ["p", "r"], "initial": "p", "finals": ["r"],
                      "transitions": [["p", "a", "r"], ["r", "a", "p"]]},
    })
    p = run_pipeline(inst)
    rep = complexity_report(p.unfolder, p.unfolding, p.bundle)
    assert rep.triangle_max[1] == 1 and rep.box_max[0] == 1 and rep.ok


def test_box_size_bound_small_values():
    assert box_size_bound(1, 1) == 2 * (3 * 2 * 1 * 1) ** 4
    assert box_size_bound(2, 1) == 4 * (3 * 2 * 1 * 4) ** 4


def test_language_check_reports_counterexample(I1, I2):
    # synthesized automaton of a different source: the check must fail
    wrong = run_pipeline(I2).bundle
    r = check_language_equality(I1, wrong, 3, 1000)
    assert not r.ok and r.counterexample == ("a",)
    assert "FAIL" in r.line()


def test_lift_witness_projects_back(I1):
    p = run_pipeline(I1)
    E = build_extended(p.unfolding, I1.distribution)
    ext = extend_alphabet(I1.alphabet, I1.distribution)
    v = lift_into_extended(E, ("b", "a"), 6)
    assert v is not None and project_rho(ext, v) == ("b", "a")
    assert any(isinstance(x, Internal) for x in v)


def test_structure_checks_on_generated():
    p = run_pipeline(generate_instance(7))
    assert all(r.ok for r in check_copy_structure(p.unfolder))
    assert check_box_paths(p.unfolder).ok


def test_documents_are_stable(I1):
    a = harness.bundle_document(run_pipeline(I1).bundle, I1.alphabet)
    b = harness.bundle_document(run_pipeline(I1).bundle, I1.alphabet)
    assert a == b
    assert a["local_states"] == {"1": 6, "2": 6}
    assert len(a["unfolding"]["states"]) == 6
