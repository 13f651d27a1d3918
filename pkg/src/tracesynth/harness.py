"""Verification suites, complexity reports and output documents.

Each check returns a :class:`CheckResult`; ``ok`` is exact, there are no
tolerances anywhere.  Language checks work on words up to a length bound
and compare sets exactly.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any

from .asyncauto import bounded_language, global_automaton_bounded
from .automata import (
    check_id,
    check_morphism,
    enumerate_language,
    restrict,
)
from .instances import Instance
from .errors import CapExceeded
from .synthesis import (
    Internal,
    SynthesisBundle,
    build_extended,
    projected_extended_language,
    synthesize,
)
from .traces import ActionSet, is_connected, normal_form, trace_closure_bounded
from .unfold import Marked, UnfoldingPiece, Unfolder

DEFAULT_MAXLEN = 6
DEFAULT_CAP = 100_000


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""
    counterexample: Any = None

    def line(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        text = f"{verdict}  {self.name}"
        if self.detail:
            text += f": {self.detail}"
        if self.counterexample is not None:
            text += f" (counterexample {fmt_word(self.counterexample)})"
        return text


def fmt_word(u) -> str:
    if isinstance(u, tuple) and all(isinstance(x, (str, Internal)) for x in u):
        return " ".join(str(x) for x in u) if u else "ε"
    return repr(u)


def _first(words) -> tuple | None:
    return min(words, key=lambda w: (len(w), w)) if words else None


# -- language checks ------------------------------------------------------------


def check_language_equality(inst: Instance, bundle: SynthesisBundle, maxlen: int, cap: int) -> CheckResult:
    """Trace closure of the source language equals the synthesized language."""
    expected = trace_closure_bounded(inst.alphabet, enumerate_language(inst.automaton, maxlen))
    got = bounded_language(bundle.async_automaton, maxlen, cap)
    diff = expected ^ got
    return CheckResult(
        f"language equality up to length {maxlen}",
        not diff,
        f"{len(expected)} words in the trace closure, {len(got)} accepted by the asynchronous automaton",
        _first(diff),
    )


def check_unfolding_lifting(inst: Instance, unf: UnfoldingPiece, maxlen: int) -> list[CheckResult]:
    A = inst.automaton
    morph = check_morphism(unf.morphism, unf.automaton, A)
    source_words = enumerate_language(A, maxlen)
    unf_words = enumerate_language(unf.automaton, maxlen)
    nf_unf = {normal_form(inst.alphabet, v) for v in unf_words}
    unlifted = {u for u in source_words if normal_form(inst.alphabet, u) not in nf_unf}
    extra = unf_words - source_words
    return [
        CheckResult("unfolding morphism into the source", morph),
        CheckResult(
            f"every source word up to length {maxlen} has an equivalent unfolding word",
            not unlifted,
            f"{len(source_words)} source words",
            _first(unlifted),
        ),
        CheckResult(
            f"unfolding language included in source language up to length {maxlen}",
            not extra,
            counterexample=_first(extra),
        ),
    ]


def _global_moves(AA, g: tuple, x) -> list[tuple]:
    loc = AA.distribution.loc(x)
    out = []
    for r_loc in AA.successors(x, tuple(g[k - 1] for k in loc)):
        r = list(g)
        for k, y in zip(loc, r_loc):
            r[k - 1] = y
        out.append(tuple(r))
    return out


def lift_into_extended(ext, u: tuple, budget: int) -> tuple | None:
    """An accepted word ``v`` of the extended automaton with ``ρ(v) = u``
    and ``|v| ≤ budget``, or None.

    The search only lets processes replay the letter about to be read, as
    in a run where every process follows one unfolding path; any word it
    returns is a genuine accepted word.
    """
    dist = ext.distribution
    internal = {
        a: [x for x in dist.alphabet.actions if isinstance(x, Internal) and x.action == a]
        for a in set(u)
    }
    start = (ext.initial, 0)
    parent = {start: None}
    queue = deque([(start, 0)])
    while queue:
        (g, i), length = queue.popleft()
        if i == len(u) and ext.is_final(g):
            word = []
            node = (g, i)
            while parent[node] is not None:
                node, x = parent[node]
                word.append(x)
            return tuple(reversed(word))
        if length == budget or i == len(u):
            continue
        moves = [(x, (r, i)) for x in internal[u[i]] for r in _global_moves(ext, g, x)]
        moves += [(u[i], (r, i + 1)) for r in _global_moves(ext, g, u[i])]
        for x, nxt in moves:
            if nxt not in parent:
                parent[nxt] = ((g, i), x)
                queue.append((nxt, length + 1))
    return None


def check_rho_identities(
    inst: Instance, unf: UnfoldingPiece, bundle: SynthesisBundle, maxlen: int, cap: int,
    lift_len: int = 5,
) -> list[CheckResult]:
    dist = inst.distribution
    ext = build_extended(unf, dist)
    projected = projected_extended_language(ext, maxlen)
    hat = bounded_language(bundle.async_automaton, maxlen, cap)
    diff = projected ^ hat
    out = [
        CheckResult(
            f"projection of extended language equals synthesized language up to length {maxlen}",
            not diff,
            f"{len(projected)} words",
            _first(diff),
        )
    ]
    try:
        explicit = bounded_language(ext, maxlen, cap, silent=lambda x: isinstance(x, Internal))
    except CapExceeded:
        out.append(CheckResult(
            "explicit extended global automaton agrees with the componentwise projection", True,
            f"skipped, more than {cap} global states",
        ))
    else:
        mismatch = explicit ^ projected
        out.append(CheckResult(
            "explicit extended global automaton agrees with the componentwise projection",
            not mismatch, counterexample=_first(mismatch),
        ))
    unf_full = enumerate_language(unf.automaton, maxlen)
    missing = unf_full - projected
    out.append(
        CheckResult(
            f"unfolding language within the projected extended language up to length {maxlen}",
            not missing,
            f"{len(unf_full)} words",
            _first(missing),
        )
    )
    K = len(dist)
    unlifted = []
    unf_words = enumerate_language(unf.automaton, min(lift_len, maxlen))
    for u in sorted(unf_words, key=lambda w: (len(w), w)):
        if lift_into_extended(ext, u, len(u) * (1 + K)) is None:
            unlifted.append(u)
    out.append(
        CheckResult(
            f"unfolding words up to length {min(lift_len, maxlen)} lift to extended words "
            f"of length at most {1 + K} times theirs",
            not unlifted,
            f"{len(unf_words)} words",
            _first(unlifted),
        )
    )
    nf_unf = {normal_form(inst.alphabet, v) for v in unf_full}
    outside = {u for u in projected if normal_form(inst.alphabet, u) not in nf_unf}
    out.append(
        CheckResult(
            f"projected extended language within the trace closure of the unfolding up to length {maxlen}",
            not outside,
            counterexample=_first(outside),
        )
    )
    return out


def check_output_id(inst: Instance, bundle: SynthesisBundle, cap: int) -> CheckResult:
    G = global_automaton_bounded(bundle.async_automaton, cap)
    violations = check_id(G, inst.alphabet)
    return CheckResult(
        "global automaton of the synthesized automaton has the independent diamond property",
        not violations,
        f"{len(G.states)} reachable global states",
        violations[0] if violations else None,
    )


# -- structural checks ----------------------------------------------------------


def _initial_of_triangle(unfolder: Unfolder, T: ActionSet, anchor) -> Any:
    return unfolder.build_triangle(T, anchor).labels[0]


def check_morphisms(unfolder: Unfolder) -> CheckResult:
    bad = []
    pieces = list(unfolder.boxes().values()) + list(unfolder.triangles().values())
    for piece in pieces:
        target = restrict(unfolder.source, piece.over, piece.anchor)
        if not check_morphism(piece.morphism, piece.automaton, target):
            bad.append((piece.kind, sorted(piece.over), piece.anchor))
    return CheckResult(
        "every box and triangle maps into the restricted source by a morphism",
        not bad,
        f"{len(pieces)} pieces",
        bad[0] if bad else None,
    )


def _path_violations(piece: UnfoldingPiece, starts, depth: int, accept) -> list:
    """Explore ``(state, actions used)`` pairs along paths of length at most
    ``depth`` from each start; ``accept(start, state, used, length)`` returns
    False on a violation."""
    succ = piece.graph.succ
    bad = []
    for s in starts:
        seen = {(s, frozenset())}
        queue = deque([(s, frozenset(), 0)])
        while queue:
            v, used, length = queue.popleft()
            if not accept(s, v, used, length):
                bad.append((piece.labels[s], piece.labels[v], sorted(used)))
            if length == depth:
                continue
            for a, targets in succ[v].items():
                nu = used | {a}
                for t in targets:
                    if (t, nu) not in seen:
                        seen.add((t, nu))
                        queue.append((t, nu, length + 1))
    return bad


def check_triangle_paths(unfolder: Unfolder, depth: int = 8) -> CheckResult:
    """Every path from a triangle's initial state to a state inserted within
    a box over T uses every action of T."""
    bad = []
    triangles = unfolder.triangles()
    for piece in triangles.values():
        bad += _path_violations(
            piece, [0], depth, lambda s, v, used, _: piece.labels[v].actions <= used
        )
    return CheckResult(
        f"triangle paths up to length {depth} use every action of the box they end in",
        not bad,
        f"{len(triangles)} triangles",
        bad[0] if bad else None,
    )


def check_box_paths(unfolder: Unfolder, depth: int = 8) -> CheckResult:
    """Non-empty paths between triangle initial states inside a connected box
    use every action of the box."""
    bad = []
    count = 0
    for (T, q), piece in unfolder.boxes().items():
        if not T or not is_connected(unfolder.alphabet, T):
            continue
        count += 1
        heads = {
            i for i, v in enumerate(piece.labels)
            if v.inner == _initial_of_triangle(unfolder, T, v.anchor)
        }
        bad += _path_violations(
            piece, sorted(heads), depth,
            lambda s, v, used, length: length == 0 or v not in heads or used == T,
        )
    return CheckResult(
        f"connected-box paths up to length {depth} between triangle initials use every action",
        not bad,
        f"{count} connected boxes",
        bad[0] if bad else None,
    )


def check_copy_structure(unfolder: Unfolder) -> list[CheckResult]:
    """No added transition stays in one copy; at most one added transition
    between two copies; copies of a triangle have consecutive ranks."""
    p1, p2, ranks = [], [], []
    count = 0
    for (T, q), piece in unfolder.boxes().items():
        if not T or not is_connected(unfolder.alphabet, T):
            continue
        count += 1
        links: dict = {}
        for s, a, t in piece.added:
            src = (s.anchor, s.rank)
            dst = (t.anchor, t.rank)
            if src == dst:
                p1.append((s, a, t))
            links[src, dst] = links.get((src, dst), 0) + 1
        p2 += [(sorted(T), pair) for pair, n in links.items() if n > 1]
        for anchor, rs in piece.ranks.items():
            if rs != list(range(rs[0], rs[0] + piece.copies)):
                ranks.append((sorted(T), anchor, rs))
        survivors = {(v.anchor, v.rank) for v in piece.labels}
        ranks += [
            (sorted(T), anchor, r) for anchor, r in survivors
            if r not in piece.ranks.get(anchor, ())
        ]
    return [
        CheckResult("no added transition connects two states of one copy", not p1,
                    f"{count} connected boxes", p1[0] if p1 else None),
        CheckResult("at most one added transition between two copies", not p2,
                    counterexample=p2[0] if p2 else None),
        CheckResult("copies of one triangle have consecutive ranks", not ranks,
                    counterexample=ranks[0] if ranks else None),
    ]


def check_base_sizes(unfolder: Unfolder) -> list[CheckResult]:
    bad_box = [q for q in unfolder.source.states if len(unfolder.base_box(q)) != 1]
    bad_tri = [
        (a, q) for a in unfolder.alphabet.actions for q in unfolder.source.states
        if len(unfolder.build_triangle({a}, q)) != 1
    ]
    return [
        CheckResult("height-0 boxes have one state", not bad_box,
                    counterexample=bad_box[0] if bad_box else None),
        CheckResult("height-1 triangles have one state", not bad_tri,
                    counterexample=bad_tri[0] if bad_tri else None),
    ]


# -- complexity ---------------------------------------------------------------


def magnitude(x: int) -> str:
    if x < 10**15:
        return str(x)
    return f"~10^{math.log10(x) if x.bit_length() < 1000 else x.bit_length() * math.log10(2):.1f}"


@dataclass
class ComplexityReport:
    source_states: int
    actions: int
    triangle_max: dict[int, int]
    box_max: dict[int, int]
    copies: dict[tuple, int]
    unfolding_states: int
    local_states: dict[int, int] = field(default_factory=dict)
    rows: list[dict] = field(default_factory=list)

    @property
    def exponent(self) -> int:
        return (2 * self.actions + 2) ** (self.actions + 1)

    @property
    def ok(self) -> bool:
        return all(r["ok"] for r in self.rows)

    def as_dict(self) -> dict:
        return {
            "source_states": self.source_states,
            "actions": self.actions,
            "exponent_d": magnitude(self.exponent),
            "triangle_max": {str(n): v for n, v in sorted(self.triangle_max.items())},
            "box_max": {str(n): v for n, v in sorted(self.box_max.items())},
            "copies": [
                {"actions": list(T), "copies": m} for T, m in sorted(self.copies.items())
            ],
            "unfolding_states": self.unfolding_states,
            "local_states": {str(k): v for k, v in sorted(self.local_states.items())},
            "checks": [
                {"check": r["check"], "observed": r["observed"], "bound": magnitude(r["bound"]),
                 "ok": r["ok"]}
                for r in self.rows
            ],
        }

    def table(self) -> str:
        lines = [
            f"source states |Q| = {self.source_states}, actions |Σ| = {self.actions}, "
            f"exponent d = {magnitude(self.exponent)}",
            f"unfolding states = {self.unfolding_states}",
        ]
        if self.local_states:
            lines.append(
                "local states per process: "
                + ", ".join(f"{k}: {v}" for k, v in sorted(self.local_states.items()))
            )
        width = max((len(r["check"]) for r in self.rows), default=10)
        lines.append(f"{'check':<{width}}  {'observed':>10}  {'bound':>16}  verdict")
        for r in self.rows:
            verdict = "ok" if r["ok"] else "FAIL"
            lines.append(
                f"{r['check']:<{width}}  {r['observed']:>10}  {magnitude(r['bound']):>16}  {verdict}"
            )
        return "\n".join(lines) + "\n"


def box_size_bound(Q: int, S: int) -> int:
    """Closed-form bound on the states of a box over the whole alphabet."""
    return 2 * Q * (3 * 2**S * S**S * Q ** (2 * S)) ** ((2 * S + 2) ** S)


def complexity_report(unfolder: Unfolder, unf: UnfoldingPiece, bundle: SynthesisBundle | None = None) -> ComplexityReport:
    """Observed piece sizes over every action subset and source state,
    against the recurrence and closed-form bounds."""
    alphabet = unfolder.alphabet
    S = len(alphabet)
    Q = len(unfolder.source.states)
    tri = {n: 0 for n in range(1, S + 1)}
    box = {n: 0 for n in range(0, S + 1)}
    copies = {}
    for n in range(0, S + 1):
        for T in combinations(alphabet.actions, n):
            Tset = frozenset(T)
            for q in unfolder.source.states:
                box[n] = max(box[n], len(unfolder.build_box(Tset, q)))
                if n:
                    tri[n] = max(tri[n], len(unfolder.build_triangle(Tset, q)))
            if n and is_connected(alphabet, Tset):
                copies[T] = unfolder.max_out_degree(Tset) + 1
    rows = [
        {"check": "β̂_0 = 1", "observed": box[0], "bound": 1, "ok": box[0] == 1},
    ]
    if S >= 1:
        rows.append({"check": "τ̂_1 = 1", "observed": tri[1], "bound": 1, "ok": tri[1] == 1})
    for n in range(2, S + 1):
        bound = n * tri[n - 1] * (1 + 2 * Q * box[n - 1])
        rows.append({"check": f"τ̂_{n} ≤ n·τ̂_{n-1}·(1+2|Q|β̂_{n-1})", "observed": tri[n],
                     "bound": bound, "ok": tri[n] <= bound})
    for T, m in sorted(copies.items()):
        bound = tri[len(T)] + 1
        rows.append({"check": f"copies over {{{','.join(T)}}} ≤ τ̂_{len(T)}+1", "observed": m,
                     "bound": bound, "ok": m <= bound})
    for n in range(1, S + 1):
        bound = 2**S * S ** (S - 1) * Q ** (2 * S - 1) * tri[n] ** (2 * S)
        rows.append({"check": f"β̂_{n} ≤ 2^|Σ|·|Σ|^(|Σ|-1)·|Q|^(2|Σ|-1)·τ̂_{n}^(2|Σ|)",
                     "observed": box[n], "bound": bound, "ok": box[n] <= bound})
    if S >= 1:
        bound = box_size_bound(Q, S)
        rows.append({"check": f"β̂_{S} ≤ closed-form bound", "observed": box[S], "bound": bound,
                     "ok": box[S] <= bound})
    local = bundle.local_state_counts if bundle is not None else {}
    if local and S >= 1:
        bound = box_size_bound(Q, S)
        for k, v in sorted(local.items()):
            rows.append({"check": f"|Q_{k}| = |Q_Unf| ≤ closed-form bound", "observed": v,
                         "bound": bound, "ok": v == len(unf) and v <= bound})
    return ComplexityReport(Q, S, tri, box, copies, len(unf), local, rows)


# -- documents ----------------------------------------------------------------


def piece_document(piece: UnfoldingPiece, alphabet) -> dict:
    states = piece.source.states
    return {
        "kind": piece.kind,
        "over": alphabet.ordered(piece.over),
        "anchor": piece.anchor,
        "states": [_ordered_marked(v, alphabet) for v in piece.labels],
        "initial": 0,
        "finals": sorted(piece.final_indices),
        "transitions": [[s, a, t] for s, a, t in piece.edges],
        "morphism": [states[p] for p in piece.image],
    }


def _ordered_marked(label, alphabet) -> Any:
    if isinstance(label, Marked):
        return [_ordered_marked(label.inner, alphabet), alphabet.ordered(label.actions),
                label.anchor, label.rank]
    return label.state


def bundle_document(bundle: SynthesisBundle, alphabet) -> dict:
    dist = bundle.distribution
    idx = bundle.index
    return {
        "distribution": dist.as_lists(),
        "local_states": {str(k): idx.n for k in dist.processes},
        "unfolding": piece_document(bundle.unfolding, alphabet),
        "transitions_by_action": {
            a: sorted([s, t] for s, targets in idx.moves.get(a, {}).items() for t in targets)
            for a in alphabet.actions
        },
        "reach": {
            str(k): [[x, q] for x in range(idx.n) for q in _bit_list(bundle.reach_mask(k, x))]
            for k in dist.processes
        },
    }


def _bit_list(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


# -- whole-instance runs --------------------------------------------------------


@dataclass
class Pipeline:
    inst: Instance
    unfolder: Unfolder
    unfolding: UnfoldingPiece
    bundle: SynthesisBundle


def run_pipeline(inst: Instance, piece_cap: int | None = None) -> Pipeline:
    unfolder = Unfolder(inst.alphabet, inst.automaton, piece_cap)
    unf = unfolder.unfolding()
    return Pipeline(inst, unfolder, unf, synthesize(unf, inst.distribution))


def verify(p: Pipeline, maxlen: int = DEFAULT_MAXLEN, cap: int = DEFAULT_CAP,
           path_depth: int = 8) -> list[CheckResult]:
    """Every check on one instance: languages, paths, structure, complexity."""
    results = [check_language_equality(p.inst, p.bundle, maxlen, cap)]
    results += check_unfolding_lifting(p.inst, p.unfolding, maxlen)
    results += check_rho_identities(p.inst, p.unfolding, p.bundle, maxlen, cap)
    results.append(check_output_id(p.inst, p.bundle, cap))
    results += check_base_sizes(p.unfolder)
    report = complexity_report(p.unfolder, p.unfolding, p.bundle)
    results.append(CheckResult("complexity bounds", report.ok,
                               "; ".join(r["check"] for r in report.rows if not r["ok"])))
    results.append(check_morphisms(p.unfolder))
    results.append(check_triangle_paths(p.unfolder, path_depth))
    results.append(check_box_paths(p.unfolder, path_depth))
    results += check_copy_structure(p.unfolder)
    return results
