"""Command-line front end.

Every command prints ``status <STATUS>`` followed by payload lines and exits
with 0 exactly when the status is OK (1 VIOLATED, 2 INCONCLUSIVE, 3 ERROR).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from . import textio as tio
from .bimatrix import (
    decode_bimatrix,
    grid_search_relative_wsne,
    reduce_polymatrix_to_bimatrix,
    verify_relative_wsne,
)
from .core import PCInstance, PureCircuitError, check_restrictions, validate_instance, verify_assignment
from .gcircuit import decode_gc_solution, gc_gadget_case_check, reduce_pc_to_gcircuit, verify_gcircuit
from .polymatrix import (
    CASE_KINDS,
    decode_ne_profile,
    decode_winlose_profile,
    decode_wsne_profile,
    gadget_case_check,
    grid_search_equilibrium,
    ne_params,
    reduce_pc_to_ne,
    reduce_pc_to_winlose,
    reduce_pc_to_wsne,
    verify_ne,
    verify_wsne,
)
from .polymatrix.reductions import DELTA_STRATEGIES, choose_delta
from .reduction import ReductionMap
from .solvers import (
    Inconclusive,
    SolveBudget,
    brute_force_solve,
    relaxation_iterate,
    solve_monotone,
    solve_no_purify,
    solve_non_robust,
)
from .sperner import extract_solution, reduce_to_pure_circuit, verify_sperner_solution
from .threshold import THRESHOLD_KINDS, decode_threshold, reduce_pc_to_threshold, threshold_case_check, verify_threshold_eq
from .transforms import rewrite_gateset

OK, VIOLATED, INCONCLUSIVE, ERROR = "OK", "VIOLATED", "INCONCLUSIVE", "ERROR"
EXIT_CODES = {OK: 0, VIOLATED: 1, INCONCLUSIVE: 2, ERROR: 3}

METHODS = ("brute", "no-purify", "monotone", "non-robust", "relax")
TARGETS = ("gcircuit", "wsne", "ne", "winlose", "threshold", "bimatrix")
GC_KINDS = ("gc-nor", "gc-purify")
GADGET_KINDS = CASE_KINDS + GC_KINDS + tuple(f"threshold-{k}" for k in THRESHOLD_KINDS)
EXTENSIONS = {"gcircuit": ".gc", "polymatrix": ".poly", "threshold": ".th", "bimatrix": ".bim", "pure-circuit": ".pc"}


@dataclass
class CommandResult:
    status: str
    payload: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def render(self) -> str:
        return "".join(f"{line}\n" for line in [f"status {self.status}", *self.payload])


class CLIError(PureCircuitError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise CLIError(message)


def rational(tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational p/q, got {tok!r}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise CLIError(f"cannot read {path}: {e.strerror}") from None


def _read_solution(path: str) -> str:
    """Solution text; a leading ``status`` line from this CLI is blanked so
    command output can be fed back in with line numbers intact."""
    text = _read(path)
    first, sep, rest = text.partition("\n")
    return sep + rest if first.startswith("status ") else text


def _need(value, flag: str):
    if value is None:
        raise CLIError(f"{flag} is required here")
    return value


def _violations(v) -> list[str]:
    return [f"violated {i}" for i in v.violated]


def _assignment_lines(a, order: Sequence[str]) -> list[str]:
    return tio.write_assignment(a, order).splitlines()


def _load_pc(path: str) -> PCInstance:
    inst = tio.parse_pc(_read(path))
    report = validate_instance(inst)
    if not report.valid:
        raise CLIError("invalid instance: " + "; ".join(report.problems()))
    return inst


# Commands.


def cmd_validate(args) -> CommandResult:
    inst = tio.parse_pc(_read(args.file))
    report = validate_instance(inst)
    flags = check_restrictions(inst)
    lines = [
        f"nodes {len(inst.nodes)}",
        f"gates {len(inst.gates)}",
        f"semantics {inst.semantics.value}",
        f"single-use {'yes' if flags.single_use else 'no'}",
        f"degree-profile {'yes' if flags.degree_profile else 'no'}",
        f"bipartite {'yes' if flags.bipartite else 'no'}",
    ]
    lines += [f"problem {p}" for p in report.problems()]
    return CommandResult(OK if report.valid else VIOLATED, lines)


def _verdict(ok: bool, lines: list[str]) -> CommandResult:
    return CommandResult(OK if ok else VIOLATED, lines)


def cmd_verify(args) -> CommandResult:
    text = _read(args.file)
    kind = tio.sniff(text)
    sol = _read_solution(args.solution)
    if kind == "pure-circuit":
        inst = tio.parse_pc(text)
        v = verify_assignment(inst, tio.parse_assignment(sol))
        return _verdict(v.ok, _violations(v))
    if kind == "sperner":
        inst = tio.parse_sperner(text)
        verdict = verify_sperner_solution(inst, tio.parse_points(sol))
        return _verdict(bool(verdict), [f"reason {verdict.reason}"] if not verdict else [])
    eps = _need(args.eps, "--eps")
    if kind == "gcircuit":
        v = verify_gcircuit(tio.parse_gcircuit(text), tio.parse_values(sol), eps)
        return _verdict(v.ok, _violations(v))
    if kind == "threshold":
        v = verify_threshold_eq(tio.parse_threshold(text), tio.parse_values(sol), eps)
        return _verdict(v.ok, [f"violated {n}" for n in v.violated])
    if kind == "polymatrix":
        g = tio.parse_polymatrix(text)
        check = verify_ne if args.mode == "ne" else verify_wsne
        v = check(g, tio.parse_profile(sol), eps)
        return _verdict(v.ok, [f"violated {p} regret {tio.fmt(v.regrets[p])}" for p in v.violated])
    if kind == "bimatrix":
        v = verify_relative_wsne(tio.parse_bimatrix(text), tio.parse_biprofile(sol), eps)
        return _verdict(v.ok, [f"row {'ok' if v.row_ok else 'violated'}", f"col {'ok' if v.col_ok else 'violated'}"])
    raise CLIError(f"cannot verify files of format {kind!r}")


SOLVERS: dict[str, Callable] = {
    "no-purify": solve_no_purify,
    "monotone": solve_monotone,
    "non-robust": solve_non_robust,
}


def cmd_solve(args) -> CommandResult:
    inst = _load_pc(args.file)
    budget = SolveBudget(seed=args.seed, **({"max_assignments": args.budget} if args.budget else {}))
    if args.method == "brute":
        x = brute_force_solve(inst, budget)
        if x is None:
            return CommandResult(VIOLATED, ["no solution exists"])
    elif args.method == "relax":
        x = relaxation_iterate(inst, budget)
        if x is None:
            return CommandResult(INCONCLUSIVE, ["relaxation did not reach a verified point"])
    else:
        x = SOLVERS[args.method](inst)
    v = verify_assignment(inst, x)
    return _verdict(v.ok, _assignment_lines(x, inst.nodes) + _violations(v))


def _prepared(inst: PCInstance, basis: str, prepare: bool) -> tuple[PCInstance, PCInstance | None]:
    if not prepare:
        return inst, None
    out, _ = rewrite_gateset(inst, basis)
    return out, (inst if out is not inst else None)


def _with_original(rmap: ReductionMap, original: PCInstance | None) -> ReductionMap:
    if original is None:
        return rmap
    return ReductionMap(rmap.kind, rmap.nodes, rmap.params, rmap.gadgets, rmap.source, original)


def _ne_reduction(inst, args):
    eps = _need(args.eps, "--eps")
    params = ne_params(eps, args.delta) if args.delta is not None else choose_delta(eps, args.delta_strategy)
    return reduce_pc_to_ne(inst, eps, params, prepare=args.prepare)


def cmd_reduce(args) -> CommandResult:
    inst = _load_pc(args.file)
    to = args.to
    if to == "gcircuit":
        src, orig = _prepared(inst, "purify-nor", args.prepare)
        target, rmap = reduce_pc_to_gcircuit(src)
        docs = ("gcircuit", tio.write_gcircuit(target), tio.write_reduction_map(_with_original(rmap, orig)))
    elif to == "threshold":
        src, orig = _prepared(inst, "purify-nor", args.prepare)
        target, rmap = reduce_pc_to_threshold(src)
        docs = ("threshold", tio.write_threshold(target), tio.write_reduction_map(_with_original(rmap, orig)))
    elif to in ("wsne", "winlose", "ne"):
        if to == "ne":
            game, rmap = _ne_reduction(inst, args)
        else:
            reducer = reduce_pc_to_wsne if to == "wsne" else reduce_pc_to_winlose
            game, rmap = reducer(inst, prepare=args.prepare)
        docs = ("polymatrix", tio.write_polymatrix(game), tio.write_reduction_map(rmap))
    else:
        game, inner = reduce_pc_to_wsne(inst, prepare=args.prepare)
        bim, bmap = reduce_polymatrix_to_bimatrix(game, args.lam)
        docs = ("bimatrix", tio.write_bimatrix(bim), tio.write_bimatrix_map(bmap, inner))
    return _emit(args.out, *docs)


def _emit(out: str | None, fmt_name: str, target: str, mapping: str) -> CommandResult:
    if out is None:
        return CommandResult(OK, ["begin target", *target.splitlines(), "end target", "begin map", *mapping.splitlines(), "end map"])
    tpath = out + EXTENSIONS[fmt_name]
    mpath = out + ".map"
    Path(tpath).write_text(target)
    Path(mpath).write_text(mapping)
    return CommandResult(OK, [f"wrote {tpath}", f"wrote {mpath}"])


def cmd_reduce_sperner(args) -> CommandResult:
    inst = tio.parse_sperner(_read(args.file))
    pc, emap = reduce_to_pure_circuit(inst)
    lines = [f"nodes {len(pc.nodes)}", f"gates {len(pc.gates)}", f"copies {emap.k}"]
    res = _emit(args.out, "pure-circuit", tio.write_pc(pc), tio.write_sperner_map(emap))
    return CommandResult(OK, lines + res.payload)


def _check_decoded(rmap: ReductionMap, a) -> CommandResult:
    inst = rmap.original or rmap.source
    if inst is None:
        raise CLIError("map carries no source instance to verify against")
    a = {v: a[v] for v in inst.nodes}
    v = verify_assignment(inst, a)
    return _verdict(v.ok, _assignment_lines(a, inst.nodes) + _violations(v))


def cmd_decode(args) -> CommandResult:
    doc = tio.parse_map(_read(args.map))
    sol = _read_solution(args.solution)
    kind = doc.kind
    if kind == "sperner":
        emap = tio.sperner_map_from_doc(doc)
        points = extract_solution(emap, tio.parse_assignment(sol))
        lines = tio.write_points(points).splitlines()
        if emap.source is None:
            return CommandResult(OK, lines)
        verdict = verify_sperner_solution(emap.source, points)
        return _verdict(bool(verdict), lines + ([] if verdict else [f"reason {verdict.reason}"]))
    if kind == "bimatrix":
        bmap, inner = tio.bimatrix_map_from_doc(doc)
        marg = decode_bimatrix(bmap, tio.parse_biprofile(sol))
        lines = [f"player {p}: {tio.fmt(a)} {tio.fmt(b)}" for p, (a, b) in marg.items()]
        if inner is None:
            return CommandResult(OK, lines)
        res = _check_decoded(inner, decode_wsne_profile(inner, marg))
        return CommandResult(res.status, lines + res.payload)
    rmap = tio.reduction_map_from_doc(doc)
    if kind == "gcircuit":
        a = decode_gc_solution(rmap, tio.parse_values(sol), _need(args.eps, "--eps"))
    elif kind == "threshold":
        a = decode_threshold(rmap, tio.parse_values(sol), _need(args.eps, "--eps"))
    elif kind == "wsne":
        a = decode_wsne_profile(rmap, tio.parse_profile(sol))
    elif kind == "ne":
        a = decode_ne_profile(rmap, tio.parse_profile(sol))
    elif kind == "winlose":
        a = decode_winlose_profile(rmap, tio.parse_profile(sol))
    else:
        raise CLIError(f"unknown map kind {kind!r}")
    return _check_decoded(rmap, a)


def cmd_oracle(args) -> CommandResult:
    text = _read(args.file)
    kind = tio.sniff(text)
    budget = {"budget": args.budget} if args.budget else {}
    if args.mode == "relwsne":
        if kind != "bimatrix":
            raise CLIError("relwsne needs a bimatrix game")
        s = grid_search_relative_wsne(tio.parse_bimatrix(text), args.eps, args.step, **budget)
        if s is None:
            return CommandResult(INCONCLUSIVE, ["no grid profile qualifies"])
        return CommandResult(OK, tio.write_biprofile(s).splitlines())
    if kind != "polymatrix":
        raise CLIError(f"{args.mode} needs a polymatrix game")
    g = tio.parse_polymatrix(text)
    s = grid_search_equilibrium(g, args.eps, args.step, args.mode.upper(), **budget)
    if s is None:
        return CommandResult(INCONCLUSIVE, ["no grid profile qualifies"])
    return CommandResult(OK, tio.write_profile(s, g.players).splitlines())


def cmd_gadget_check(args) -> CommandResult:
    kind, eps, step = args.kind, args.eps, args.step
    if kind in GC_KINDS:
        rep = gc_gadget_case_check(kind[3:], eps, step)
    elif kind.startswith("threshold-"):
        rep = threshold_case_check(kind[len("threshold-"):], eps, step)
    else:
        params = ne_params(eps, args.delta) if args.delta is not None and kind.startswith("ne-") else None
        rep = gadget_case_check(kind, eps, step, params)
    lines = [f"kind {kind}", f"eps {tio.fmt(eps)}", f"step {tio.fmt(step)}", f"cells {rep.cells}"]
    lines += [f"counterexample {c}" for c in rep.counterexamples]
    return _verdict(rep.ok, lines)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="purecircuit", description="Pure-Circuit instances, solvers, reductions and checks.")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="structural checks and restriction flags")
    s.add_argument("file")
    s.set_defaults(run=cmd_validate)

    s = sub.add_parser("verify", help="check a solution against any supported instance or game")
    s.add_argument("file")
    s.add_argument("solution")
    s.add_argument("--eps", type=rational)
    s.add_argument("--mode", choices=("wsne", "ne"), default="wsne", help="polymatrix notion (default wsne)")
    s.set_defaults(run=cmd_verify)

    s = sub.add_parser("solve", help="solve a Pure-Circuit instance")
    s.add_argument("file")
    s.add_argument("--method", choices=METHODS, default="brute")
    s.add_argument("--budget", type=int, help="assignment budget for brute force")
    s.set_defaults(run=cmd_solve)

    s = sub.add_parser("reduce", help="reduce a Pure-Circuit instance to a target problem")
    s.add_argument("file")
    s.add_argument("--to", choices=TARGETS, required=True)
    s.add_argument("--eps", type=rational, help="target eps (required for ne)")
    s.add_argument("--delta", type=rational, help="explicit cutoff for ne")
    s.add_argument("--delta-strategy", choices=DELTA_STRATEGIES, default="smallest")
    s.add_argument("--lam", type=rational, default=Fraction(1383, 10000), help="bimatrix lambda")
    s.add_argument("--prepare", action="store_true", help="rewrite the gate set (and normalize) first")
    s.add_argument("--out", help="path prefix for the target and .map files; stdout if omitted")
    s.set_defaults(run=cmd_reduce)

    s = sub.add_parser("reduce-sperner", help="reduce a Sperner instance to Pure-Circuit")
    s.add_argument("file")
    s.add_argument("--out")
    s.set_defaults(run=cmd_reduce_sperner)

    s = sub.add_parser("decode", help="decode a target solution through a map file")
    s.add_argument("solution")
    s.add_argument("--map", required=True)
    s.add_argument("--eps", type=rational)
    s.set_defaults(run=cmd_decode)

    s = sub.add_parser("oracle", help="grid search for an approximate equilibrium")
    s.add_argument("file")
    s.add_argument("--mode", choices=("ne", "wsne", "relwsne"), required=True)
    s.add_argument("--eps", type=rational, required=True)
    s.add_argument("--step", type=rational, required=True)
    s.add_argument("--budget", type=int)
    s.set_defaults(run=cmd_oracle)

    s = sub.add_parser("gadget-check", help="grid case analysis of a single gadget")
    s.add_argument("--kind", choices=GADGET_KINDS, required=True)
    s.add_argument("--eps", type=rational, required=True)
    s.add_argument("--step", type=rational, default=Fraction(1, 100))
    s.add_argument("--delta", type=rational, help="explicit cutoff for ne kinds")
    s.set_defaults(run=cmd_gadget_check)
    return p


def run(argv: Sequence[str] | None = None) -> CommandResult:
    try:
        args = build_parser().parse_args(argv)
        return args.run(args)
    except Inconclusive as e:
        return CommandResult(INCONCLUSIVE, [str(e)])
    except KeyError as e:
        return CommandResult(ERROR, [f"error solution file has no entry for {e.args[0]}"])
    except (PureCircuitError, ValueError) as e:
        return CommandResult(ERROR, [f"error {e}"])


def main(argv: Sequence[str] | None = None) -> int:
    res = run(argv)
    sys.stdout.write(res.render())
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
