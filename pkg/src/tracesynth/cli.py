"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 resource
cap exceeded.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .asyncauto import global_automaton_bounded
from .automata import export_dot
from .errors import CapExceeded, ValidationError
from .instances import dumps, generate_instance, instance_to_json, load_instance
from .unfold import Unfolder

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3

log = logging.getLogger("tracesynth")


def _write(out: str | None, text: str) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _pipeline(args) -> harness.Pipeline:
    inst = load_instance(args.file)
    return harness.run_pipeline(inst, args.piece_cap)


def cmd_validate(args) -> int:
    inst = load_instance(args.file)
    A = inst.automaton
    print(
        f"{args.file}: {len(A.states)} states, {len(A.transition_set)} transitions, "
        f"{len(inst.alphabet)} actions, {len(inst.distribution)} processes"
    )
    print("independent diamond property: " + ("holds" if inst.satisfies_id else
          f"violated ({len(inst.id_violations)} witnesses)"))
    return EXIT_OK


def cmd_unfold(args) -> int:
    p = _pipeline(args)
    report = harness.complexity_report(p.unfolder, p.unfolding)
    doc = {
        "unfolding": harness.piece_document(p.unfolding, p.inst.alphabet),
        "report": report.as_dict(),
    }
    _write(args.output, dumps(doc))
    print(f"unfolding states: {len(p.unfolding)}", file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_synthesize(args) -> int:
    p = _pipeline(args)
    _write(args.output, dumps(harness.bundle_document(p.bundle, p.inst.alphabet)))
    bound = harness.box_size_bound(len(p.inst.automaton.states), len(p.inst.alphabet))
    stream = sys.stderr if args.output in (None, "-") else sys.stdout
    for k, n in sorted(p.bundle.local_state_counts.items()):
        print(f"process {k}: {n} local states (bound {harness.magnitude(bound)})", file=stream)
    return EXIT_OK


def cmd_check(args) -> int:
    if not 0 <= args.maxlen <= 8:
        raise ValidationError("--maxlen must be between 0 and 8")
    inst = load_instance(args.file)
    if not inst.satisfies_id:
        print(
            "check skipped: the automaton violates the independent diamond property "
            f"(e.g. {inst.id_violations[0]}), so its language need not be trace-closed "
            "and language equality is not guaranteed"
        )
        return EXIT_INPUT
    p = harness.run_pipeline(inst, args.piece_cap)
    if args.full:
        results = harness.verify(p, args.maxlen, args.cap)
    else:
        results = [harness.check_language_equality(inst, p.bundle, args.maxlen, args.cap)]
        results += harness.check_unfolding_lifting(inst, p.unfolding, args.maxlen)
        results += harness.check_rho_identities(inst, p.unfolding, p.bundle, args.maxlen, args.cap)
    for r in results:
        print(r.line())
    ok = all(r.ok for r in results)
    print("all checks passed" if ok else "verification FAILED")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_stats(args) -> int:
    p = _pipeline(args)
    report = harness.complexity_report(p.unfolder, p.unfolding, p.bundle)
    sys.stdout.write(report.table())
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_generate(args) -> int:
    inst = generate_instance(args.seed, states=args.states, alphabet=args.alphabet, local=args.local)
    _write(args.output, instance_to_json(inst))
    return EXIT_OK


def cmd_export_dot(args) -> int:
    inst = load_instance(args.file)
    if args.what == "source":
        text = export_dot(inst.automaton, "source")
    elif args.what == "unfolding":
        unf = Unfolder(inst.alphabet, inst.automaton, args.piece_cap).unfolding()
        text = export_dot(unf.automaton, "unfolding", {v: str(i) for i, v in enumerate(unf.labels)})
    else:
        p = harness.run_pipeline(inst, args.piece_cap)
        G = global_automaton_bounded(p.bundle.async_automaton, args.cap)
        text = export_dot(G, "synthesized", {g: ",".join(map(str, g)) for g in G.states})
    _write(args.output, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracesynth",
        description="Unfold automata over independence alphabets and synthesize asynchronous automata.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_file(name, help_text, func):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="instance file (JSON)")
        p.add_argument("--piece-cap", type=int, default=None,
                       help="abort when a single box or triangle exceeds this many states")
        p.set_defaults(func=func)
        return p

    with_file("validate", "parse and validate an instance", cmd_validate)
    p = with_file("unfold", "build the unfolding and its complexity report", cmd_unfold)
    p.add_argument("-o", "--output", default=None)
    p = with_file("synthesize", "build the asynchronous automaton", cmd_synthesize)
    p.add_argument("-o", "--output", default=None)
    p = with_file("check", "bounded language checks", cmd_check)
    p.add_argument("--maxlen", type=int, default=harness.DEFAULT_MAXLEN)
    p.add_argument("--cap", type=int, default=harness.DEFAULT_CAP, help="global state cap")
    p.add_argument("--full", action="store_true", help="also run structural and complexity checks")
    with_file("stats", "observed sizes against the complexity bounds", cmd_stats)
    p = with_file("export-dot", "write an automaton in DOT", cmd_export_dot)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--what", choices=("source", "unfolding", "synthesized"), default="source")
    p.add_argument("--cap", type=int, default=harness.DEFAULT_CAP)

    p = sub.add_parser("generate", help="random instance satisfying the diamond property")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--states", type=int, default=6, help="maximum number of states")
    p.add_argument("--alphabet", type=int, default=3, help="number of actions")
    p.add_argument("--local", type=int, default=3, help="maximum local states per process")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
