"""Command-line interface: ``rcg <command> ...``.

Exit codes: 0 success, 1 verification mismatch, 2 parse or usage error,
3 resource cap hit, 4 interactive session aborted.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from rcg.errors import FormatError, RefereeViolation, ReplayError, ResourceLimitError, StructuralError
from rcg.game import (
    GameState,
    Round,
    Transcript,
    Winner,
    check_announcement,
    delay_candidates,
    initial_state,
    is_terminal,
    legal_moves,
    parse_transcript,
    remaining_budget,
    replay,
    serialize_transcript,
    step,
)
from rcg.temporal import RcgInstance, arrival, parse_instance, serialize_instance

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_FORMAT = 2
EXIT_RESOURCE = 3
EXIT_ABORTED = 4


class UsageError(Exception):
    """Flags that cannot be honoured together."""


def _err(msg: str) -> None:
    print(f"rcg: {msg}", file=sys.stderr)


def _read_text(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}", None, "io") from None


def _write_text(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def _load_instance(path: str) -> RcgInstance:
    return parse_instance(_read_text(path))


# --- solve ------------------------------------------------------------------


def cmd_solve(args: argparse.Namespace) -> int:
    from rcg.solver import Mode, Solver, solver_playout

    inst = _load_instance(args.instance)
    solver = Solver(inst, Mode(args.mode), args.max_states, implementation=args.kernel)
    verdict = solver.solve()
    print(verdict.winner)
    print(verdict.stats_line())
    if args.policy:
        if solver.mode is not Mode.MEMO:
            solver = Solver(inst, Mode.MEMO, args.max_states, implementation=args.kernel)
        outcome, transcript = solver_playout(inst, solver)
        replay(inst, transcript)
        if outcome.winner is not verdict.winner:
            _err(f"playout ended {outcome.winner}, solver said {verdict.winner}")
            return EXIT_MISMATCH
        _write_text(args.policy, serialize_transcript(transcript))
        print(f"transcript: {args.policy} ({len(transcript)} rounds)")
    return EXIT_OK


# --- reduce -----------------------------------------------------------------


def cmd_reduce(args: argparse.Namespace) -> int:
    from rcg.qbf import parse_qdimacs, reduce, serialize_gadget_map

    qbf = parse_qdimacs(_read_text(args.qdimacs))
    inst, gm = reduce(qbf, budget_rule="literal" if args.paper_budget else "derived")
    if args.output:
        _write_text(args.output, serialize_instance(inst, [f"reduction of {os.path.basename(args.qdimacs)}"]))
    if args.map:
        _write_text(args.map, serialize_gadget_map(gm))
    print(
        f"n={qbf.n} m={qbf.m} forall={qbf.universal_count} budget={inst.budget} "
        f"vertices={inst.graph.vertex_count} arcs={inst.graph.arc_count}"
    )
    return EXIT_OK


# --- verify -----------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance)
    transcript = parse_transcript(_read_text(args.transcript))
    try:
        outcome = replay(inst, transcript)
    except ReplayError as exc:
        print(f"MISMATCH round {exc.round_index}: {exc}")
        return EXIT_MISMATCH
    except StructuralError as exc:
        print(f"MISMATCH: {exc}")
        return EXIT_MISMATCH
    print(f"OK {outcome.winner} rounds={len(transcript)}")
    return EXIT_OK


# --- check (oracle cross-check) ---------------------------------------------


def cmd_check(args: argparse.Namespace) -> int:
    from rcg.oracle import minimax, qbf_eval
    from rcg.solver import solve

    if args.qdimacs:
        from rcg.qbf import parse_qdimacs, reduce

        qbf = parse_qdimacs(_read_text(args.qdimacs))
        truth = qbf_eval(qbf)
        inst, _ = reduce(qbf, budget_rule="literal" if args.paper_budget else "derived")
        verdict = solve(inst, max_states=args.max_states)
        agree = truth == (verdict.winner is Winner.TRAVELER)
        print(f"{'AGREE' if agree else 'DISAGREE'} formula={'true' if truth else 'false'} game={verdict.winner}")
        return EXIT_OK if agree else EXIT_MISMATCH
    if not args.instance:
        raise UsageError("check needs an instance path or --qdimacs")
    inst = _load_instance(args.instance)
    truth = minimax(inst)
    memo = solve(inst, "memo", max_states=args.max_states).winner
    dfs = solve(inst, "dfs").winner
    agree = truth is memo is dfs
    print(f"{'AGREE' if agree else 'DISAGREE'} minimax={truth} memo={memo} dfs={dfs}")
    return EXIT_OK if agree else EXIT_MISMATCH


# --- play -------------------------------------------------------------------


class _Aborted(Exception):
    pass


def _ask(prompt: str) -> str:
    print(prompt, end="", flush=True)
    line = sys.stdin.readline()
    if not line:
        raise _Aborted
    return line.strip()


def _describe(inst: RcgInstance, state: GameState, ann: frozenset[int]) -> list[str]:
    delays = state.delays.union(ann)
    out = []
    for arc_id in legal_moves(inst, state, ann):
        a = inst.graph.arc(arc_id)
        tag = " delayed" if arc_id in delays else ""
        out.append(f"  arc {arc_id}: {a.tail}->{a.head} departs {a.label}{tag}, arrives {arrival(a, delays)}")
    return out


def _human_move(inst: RcgInstance, state: GameState, ann: frozenset[int]) -> int:
    moves = legal_moves(inst, state, ann)
    while True:
        reply = _ask(f"move (one of {' '.join(map(str, moves))})> ")
        try:
            choice = int(reply)
        except ValueError:
            print(f"not an arc id: {reply!r}")
            continue
        if choice in moves:
            return choice
        print(f"illegal: arc {choice} is not available; choose from {moves}")


def _human_announcement(inst: RcgInstance, state: GameState) -> frozenset[int]:
    cands = delay_candidates(inst, state)
    while True:
        reply = _ask(
            f"delay (space-separated ids from {cands}, up to {remaining_budget(inst, state)}; empty for none)> "
        )
        try:
            ids = [int(t) for t in reply.replace(",", " ").split()]
        except ValueError:
            print(f"not a list of arc ids: {reply!r}")
            continue
        try:
            return check_announcement(inst, state, ids)
        except RefereeViolation as exc:
            print(f"illegal: {exc}")


def cmd_play(args: argparse.Namespace) -> int:
    from rcg.solver import Solver, adversary_policy, traveler_policy

    inst = _load_instance(args.instance)
    solver = Solver(inst, max_states=args.max_states)
    engine_traveler = traveler_policy(inst, strict=False, solver=solver)
    engine_adversary = adversary_policy(inst, strict=False, solver=solver)
    human_is_traveler = args.side == "traveler"
    print(f"you play the {args.side}; start {inst.start}, target {inst.target}, budget {inst.budget}")
    state = initial_state(inst)
    transcript = Transcript()
    k = 0
    try:
        while (outcome := is_terminal(inst, state)) is None:
            k += 1
            print(f"round {k}: at vertex {state.position}, time {state.clock}, delayed so far {sorted(state.delayed)}")
            if human_is_traveler:
                ann = frozenset(engine_adversary(state))
                print(f"adversary announces {sorted(ann) if ann else 'no delays'}")
                print("\n".join(_describe(inst, state, ann)))
                move = _human_move(inst, state, ann)
            else:
                ann = _human_announcement(inst, state)
                print("\n".join(_describe(inst, state, ann)))
                move = engine_traveler(state, ann)
                print(f"traveler takes arc {move}")
            state = step(inst, state, ann, move, k)
            transcript.rounds.append(Round(tuple(sorted(ann)), move))
    except _Aborted:
        print()
        _err("input closed; session aborted")
        return EXIT_ABORTED
    transcript.winner = outcome.winner
    print(f"game over: {outcome.winner}")
    save = args.save or os.path.splitext(args.instance)[0] + ".rcgt"
    _write_text(save, serialize_transcript(transcript))
    print(f"transcript saved to {save}")
    return EXIT_OK


# --- gen --------------------------------------------------------------------

_GEN_FLAGS = {
    "chain": {"length", "width", "budget", "delta"},
    "random": {"seed", "vertices", "arcs", "max_label", "max_traversal", "budget", "delta"},
    "layered": {"seed", "layers", "width", "budget", "delta"},
    "qbf-family": {"seed", "vars", "clauses", "paper_budget"},
}
_ALL_GEN_FLAGS = set().union(*_GEN_FLAGS.values())


def _given(args: argparse.Namespace, names) -> dict:
    return {n: getattr(args, n) for n in names if getattr(args, n) not in (None, False)}


def cmd_gen(args: argparse.Namespace) -> int:
    from rcg import generate

    given = _given(args, _ALL_GEN_FLAGS)
    stray = sorted(set(given) - _GEN_FLAGS[args.model])
    if stray:
        flags = ", ".join("--" + s.replace("_", "-") for s in stray)
        raise UsageError(f"{flags} not applicable to --model {args.model}")
    seed = given.pop("seed", 0)
    try:
        if args.model == "chain":
            inst = generate.chain(**given)
        elif args.model == "random":
            inst = generate.random_instance(seed, **given)
        elif args.model == "layered":
            inst = generate.layered(seed, **given)
        else:
            inst = generate.qbf_family(
                seed, given.get("vars", 2), given.get("clauses", 2), bool(given.get("paper_budget"))
            )
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None
    text = serialize_instance(inst)
    parse_instance(text)
    sys.stdout.write(text)
    return EXIT_OK


# --- bench ------------------------------------------------------------------


def _budget_range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        a, b = int(lo), int(hi if sep else lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}") from None
    if a < 0 or b < a:
        raise argparse.ArgumentTypeError(f"empty or negative budget range {text!r}")
    return range(a, b + 1)


def cmd_bench(args: argparse.Namespace) -> int:
    from rcg import generate
    from rcg.sweep import format_table, log_slope, sweep

    if args.family == "chain":
        if args.vars is not None or args.clauses is not None:
            raise UsageError("--vars/--clauses apply to --family qbf-family only")
        base = generate.chain(args.length or 4, 0, 1, args.width or 3)
    else:
        if args.length is not None or args.width is not None:
            raise UsageError("--length/--width apply to --family chain only")
        base = generate.qbf_family(args.seed, args.vars or 1, args.clauses or 1)
    budgets = args.budget_sweep
    if budgets[-1] > base.graph.arc_count:
        raise UsageError(f"budget {budgets[-1]} exceeds the family's {base.graph.arc_count} arcs")
    rows = sweep(base, budgets, args.max_states, args.kernel)
    print(f"family={args.family} vertices={base.graph.vertex_count} arcs={base.graph.arc_count}")
    print(format_table(rows))
    print(f"log-slope={log_slope(rows):.4f}")
    return EXIT_OK


# --- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    from rcg.kernel import available_implementations

    p = argparse.ArgumentParser(prog="rcg", description="Robust connection game toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def caps(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--max-states", type=int, default=None, help="memo cap (default: $RCG_MAX_STATES or 50M)")
        sp.add_argument("--kernel", choices=available_implementations(), default=None)

    sp = sub.add_parser("solve", help="decide the winner of an .rcg instance")
    sp.add_argument("instance")
    sp.add_argument("--mode", choices=("memo", "dfs"), default="memo")
    sp.add_argument("--policy", metavar="OUT", help="write a certified solver-vs-solver transcript")
    caps(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("reduce", help="build a game instance from a QDIMACS formula")
    sp.add_argument("qdimacs")
    sp.add_argument("-o", "--output", metavar="OUT.rcg")
    sp.add_argument("--map", metavar="OUT.map")
    sp.add_argument("--paper-budget", action="store_true", help="use budget n(m+k)+1 instead of n*m+k+1")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("verify", help="replay a transcript against an instance")
    sp.add_argument("instance")
    sp.add_argument("transcript")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("check", help="cross-check the solver against the brute-force oracles")
    sp.add_argument("instance", nargs="?")
    sp.add_argument("--qdimacs", metavar="FILE", help="compare formula truth with the reduced game instead")
    sp.add_argument("--paper-budget", action="store_true")
    sp.add_argument("--max-states", type=int, default=None)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("play", help="play one side interactively against the solver")
    sp.add_argument("instance")
    sp.add_argument("--as", dest="side", choices=("traveler", "adversary"), default="traveler")
    sp.add_argument("--save", metavar="OUT.rcgt", help="transcript path (default: next to the instance)")
    sp.add_argument("--max-states", type=int, default=None)
    sp.set_defaults(func=cmd_play)

    sp = sub.add_parser("gen", help="print a generated instance")
    sp.add_argument("--model", choices=tuple(_GEN_FLAGS), required=True)
    sp.add_argument("--seed", type=int)
    for flag in ("length", "width", "budget", "delta", "vertices", "arcs", "max-label", "max-traversal",
                 "layers", "vars", "clauses"):
        sp.add_argument(f"--{flag}", type=int)
    sp.add_argument("--paper-budget", action="store_true")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("bench", help="states and depth across a budget sweep")
    sp.add_argument("--family", choices=("chain", "qbf-family"), default="chain")
    sp.add_argument("--budget-sweep", type=_budget_range, default=range(0, 4), metavar="A..B")
    sp.add_argument("--seed", type=int, default=0)
    for flag in ("length", "width", "vars", "clauses"):
        sp.add_argument(f"--{flag}", type=int)
    caps(sp)
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        _err(str(exc))
        return EXIT_FORMAT
    except UsageError as exc:
        _err(str(exc))
        return EXIT_FORMAT
    except ResourceLimitError as exc:
        _err(f"resource limit: {exc}")
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
