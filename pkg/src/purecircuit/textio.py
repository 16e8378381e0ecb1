"""Line-oriented text formats for every object the command line handles.

Every format starts with a ``<name> v1`` header.  Blank lines and text after
``#`` are ignored.  Parse errors name the line number and the offending
token.  Writers emit canonical text, so write(parse(write(x))) is stable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .bimatrix import BimatrixGame, BimatrixMap, BiProfile
from .core import Gate, GateType, PCInstance, PureCircuitError, Semantics, Value
from .gcircuit import GCGate, GCInstance, GCType
from .polymatrix.game import PolymatrixGame
from .reduction import Gadget, ReductionMap
from .sperner import BooleanCircuit, ExtractionMap, SpernerInstance, Wire
from .threshold import ThresholdGame

ID = re.compile(r"[A-Za-z0-9_/.\-]+")


class FormatError(PureCircuitError):
    pass


@dataclass(frozen=True)
class Line:
    no: int
    tokens: tuple[str, ...]

    def fail(self, token: str | None, why: str) -> FormatError:
        where = f"line {self.no}" + (f", token {token!r}" if token is not None else "")
        return FormatError(f"{where}: {why}")


def lines_of(text: str, first_line: int = 1) -> list[Line]:
    out = []
    for k, raw in enumerate(text.splitlines()):
        body = raw.split("#", 1)[0].strip()
        if body:
            out.append(Line(first_line + k, tuple(body.split())))
    return out


def _header(lines: list[Line], name: str) -> list[Line]:
    if not lines:
        raise FormatError(f"empty input; expected header '{name} v1'")
    h = lines[0]
    if h.tokens != (name, "v1"):
        raise h.fail(h.tokens[0], f"expected header '{name} v1'")
    return lines[1:]


def _ident(line: Line, tok: str) -> str:
    if not ID.fullmatch(tok):
        raise line.fail(tok, "bad identifier")
    return tok


def _rational(line: Line, tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise line.fail(tok, "expected a rational p/q") from None


def _int(line: Line, tok: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise line.fail(tok, "expected an integer") from None


def _arity(line: Line, want: int) -> None:
    if len(line.tokens) != want:
        tok = line.tokens[want] if len(line.tokens) > want else None
        raise line.fail(tok, f"expected {want} tokens")


def fmt(q: Fraction) -> str:
    return str(Fraction(q))


# Pure-circuit instances and assignments.


def parse_pc(text: str, first_line: int = 1) -> PCInstance:
    body = _header(lines_of(text, first_line), "pure-circuit")
    semantics = Semantics.ROBUST
    gates: list[Gate] = []
    extra: list[str] = []
    for ln in body:
        head = ln.tokens[0]
        if head == "semantics":
            _arity(ln, 2)
            try:
                semantics = Semantics(ln.tokens[1])
            except ValueError:
                raise ln.fail(ln.tokens[1], "expected robust or nonrobust") from None
        elif head == "node":
            extra += [_ident(ln, t) for t in ln.tokens[1:]]
        elif head == "gate":
            if len(ln.tokens) < 2:
                raise ln.fail(None, "gate needs a type")
            try:
                kind = GateType(ln.tokens[1])
            except ValueError:
                raise ln.fail(ln.tokens[1], "unknown gate type") from None
            rest = ln.tokens[2:]
            if "->" not in rest:
                raise ln.fail(None, "gate needs '->'")
            cut = rest.index("->")
            ins = [_ident(ln, t) for t in rest[:cut]]
            outs = [_ident(ln, t) for t in rest[cut + 1:]]
            if (len(ins), len(outs)) != kind.arity:
                raise ln.fail(ln.tokens[1], f"{kind.value} takes {kind.arity[0]} input(s) and {kind.arity[1]} output(s)")
            try:
                gates.append(Gate(kind, tuple(ins), tuple(outs)))
            except PureCircuitError as e:
                raise ln.fail(ln.tokens[1], str(e)) from None
        else:
            raise ln.fail(head, "expected semantics, node or gate")
    return PCInstance.from_gates(gates, semantics, extra_nodes=extra)


def write_pc(inst: PCInstance) -> str:
    out = ["pure-circuit v1", f"semantics {inst.semantics.value}"]
    if PCInstance.from_gates(inst.gates, inst.semantics).nodes != inst.nodes:
        out += [f"node {v}" for v in inst.nodes]
    for g in inst.gates:
        out.append(" ".join(["gate", g.type.value, *g.inputs, "->", *g.outputs]))
    return "\n".join(out) + "\n"


def _pairs(text: str, first_line: int = 1) -> list[tuple[Line, str, str]]:
    out = []
    for ln in lines_of(text, first_line):
        if len(ln.tokens) != 3 or ln.tokens[1] != "=":
            raise ln.fail(ln.tokens[0], "expected 'node = value'")
        out.append((ln, _ident(ln, ln.tokens[0]), ln.tokens[2]))
    return out


def _no_dupes(pairs):
    seen = set()
    for ln, k, _ in pairs:
        if k in seen:
            raise ln.fail(k, "node assigned twice")
        seen.add(k)


def parse_assignment(text: str) -> dict[str, Value]:
    pairs = _pairs(text)
    _no_dupes(pairs)
    out = {}
    for ln, k, v in pairs:
        try:
            out[k] = Value.parse(v)
        except PureCircuitError:
            raise ln.fail(v, "expected 0, 1 or bot") from None
    return out


def write_assignment(a: Mapping[str, Value], order: Iterable[str] | None = None) -> str:
    keys = list(order) if order is not None else list(a)
    return "".join(f"{k} = {a[k]}\n" for k in keys)


def parse_values(text: str) -> dict[str, Fraction]:
    pairs = _pairs(text)
    _no_dupes(pairs)
    return {k: _rational(ln, v) for ln, k, v in pairs}


def write_values(x: Mapping[str, Fraction], order: Iterable[str] | None = None) -> str:
    keys = list(order) if order is not None else list(x)
    return "".join(f"{k} = {fmt(x[k])}\n" for k in keys)


# Generalized circuits.


def parse_gcircuit(text: str, first_line: int = 1) -> GCInstance:
    body = _header(lines_of(text, first_line), "gcircuit")
    gates: list[GCGate] = []
    extra: list[str] = []
    for ln in body:
        if ln.tokens[0] == "node":
            extra += [_ident(ln, t) for t in ln.tokens[1:]]
            continue
        if ln.tokens[0] != "gate" or len(ln.tokens) < 2:
            raise ln.fail(ln.tokens[0], "expected node or gate")
        try:
            kind = GCType(ln.tokens[1])
        except ValueError:
            raise ln.fail(ln.tokens[1], "unknown gate type") from None
        rest = list(ln.tokens[2:])
        const = None
        if rest and rest[-1].startswith("c="):
            tok = rest.pop()
            const = _rational(ln, tok[2:])
        if "->" not in rest or rest.index("->") != len(rest) - 2:
            raise ln.fail(None, "expected 'inputs -> output'")
        ins = tuple(_ident(ln, t) for t in rest[:-2])
        out = _ident(ln, rest[-1])
        if len(ins) != kind.n_inputs:
            raise ln.fail(ln.tokens[1], f"{kind.value} takes {kind.n_inputs} input(s)")
        if kind.uses_constant != (const is not None):
            raise ln.fail(ln.tokens[1], "constant 'c=p/q' required exactly for Gc and Gxc")
        try:
            gates.append(GCGate(kind, ins, out, const))
        except PureCircuitError as e:
            raise ln.fail(ln.tokens[1], str(e)) from None
    return GCInstance.from_gates(gates, extra_nodes=extra)


def write_gcircuit(gc: GCInstance) -> str:
    out = ["gcircuit v1"]
    if GCInstance.from_gates(gc.gates).nodes != gc.nodes:
        out += [f"node {v}" for v in gc.nodes]
    for g in gc.gates:
        parts = ["gate", g.type.value, *g.inputs, "->", g.output]
        if g.const is not None:
            parts.append(f"c={fmt(g.const)}")
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"


# Sperner instances and point lists.


def parse_sperner(text: str, first_line: int = 1) -> SpernerInstance:
    body = _header(lines_of(text, first_line), "sperner")
    if not body or body[0].tokens[0] != "dims":
        raise FormatError("expected 'dims N M' after the header")
    _arity(body[0], 3)
    n, m = _int(body[0], body[0].tokens[1]), _int(body[0], body[0].tokens[2])
    wires: list[Wire] = []
    outputs: dict[int, str] = {}
    for ln in body[1:]:
        t = ln.tokens
        if t[0] == "wire":
            if len(t) < 4 or t[2] != "=":
                raise ln.fail(t[0], "expected 'wire w = OP args'")
            name, op, args = _ident(ln, t[1]), t[3], t[4:]
            if op == "INPUT":
                if len(args) != 2:
                    raise ln.fail(op, "INPUT takes i j")
                wires.append(Wire(name, op, (_int(ln, args[0]), _int(ln, args[1]))))
            elif op in ("AND", "OR", "NOT"):
                wires.append(Wire(name, op, tuple(_ident(ln, a) for a in args)))
            else:
                raise ln.fail(op, "expected AND, OR, NOT or INPUT")
        elif t[0] == "OUTPUT":
            _arity(ln, 3)
            i = _int(ln, t[1])
            if i in outputs:
                raise ln.fail(t[1], "output declared twice")
            outputs[i] = _ident(ln, t[2])
        else:
            raise ln.fail(t[0], "expected wire or OUTPUT")
    if sorted(outputs) != list(range(1, n + 1)):
        raise FormatError(f"OUTPUT lines must cover coordinates 1..{n}")
    try:
        circ = BooleanCircuit(n, m, tuple(wires), tuple(outputs[i] for i in range(1, n + 1)))
    except PureCircuitError as e:
        raise FormatError(str(e)) from None
    return SpernerInstance(n, m, circ)


def write_sperner(inst: SpernerInstance) -> str:
    c = inst.circuit
    out = ["sperner v1", f"dims {inst.n} {inst.m}"]
    for w in c.wires:
        out.append(f"wire {w.name} = {w.op} " + " ".join(str(a) for a in w.args))
    out += [f"OUTPUT {i} {o}" for i, o in enumerate(c.outputs, start=1)]
    return "\n".join(out) + "\n"


def parse_points(text: str) -> list[tuple[int, ...]]:
    return [tuple(_int(ln, t) for t in ln.tokens) for ln in lines_of(text)]


def write_points(points: Sequence[Sequence[int]]) -> str:
    return "".join(" ".join(map(str, p)) + "\n" for p in points)


# Polymatrix games and profiles.


def parse_polymatrix(text: str) -> PolymatrixGame:
    body = _header(lines_of(text), "polymatrix")
    actions: dict[str, int] = {}
    edges: list[tuple[str, str]] = []
    mats: dict[tuple[str, str], tuple] = {}
    k = 0
    while k < len(body):
        ln = body[k]
        t = ln.tokens
        if t[0] == "player":
            _arity(ln, 4)
            if t[2] != "actions":
                raise ln.fail(t[2], "expected 'actions'")
            p = _ident(ln, t[1])
            if p in actions:
                raise ln.fail(p, "player declared twice")
            actions[p] = _int(ln, t[3])
        elif t[0] == "edge":
            _arity(ln, 3)
            edges.append((_ident(ln, t[1]), _ident(ln, t[2])))
        elif t[0] == "matrix":
            _arity(ln, 3)
            if not t[2].endswith(":"):
                raise ln.fail(t[2], "expected 'matrix i j:'")
            i, j = _ident(ln, t[1]), _ident(ln, t[2][:-1])
            for p in (i, j):
                if p not in actions:
                    raise ln.fail(p, "unknown player")
            rows = []
            for r in range(actions[i]):
                k += 1
                if k >= len(body):
                    raise ln.fail(None, f"matrix {i} {j} needs {actions[i]} rows")
                rl = body[k]
                if len(rl.tokens) != actions[j]:
                    raise rl.fail(None, f"row needs {actions[j]} entries")
                rows.append(tuple(_rational(rl, z) for z in rl.tokens))
            if (i, j) in mats:
                raise ln.fail(t[1], "matrix given twice")
            mats[i, j] = tuple(rows)
        else:
            raise ln.fail(t[0], "expected player, edge or matrix")
        k += 1
    for i, j in edges:
        for key in ((i, j), (j, i)):
            if key not in mats:
                raise FormatError(f"edge {i} {j} lacks matrix {key[0]} {key[1]}")
    declared = {frozenset(e) for e in edges}
    for i, j in mats:
        if frozenset((i, j)) not in declared:
            raise FormatError(f"matrix {i} {j} has no matching edge line")
    try:
        return PolymatrixGame(tuple(actions), actions, mats)
    except PureCircuitError as e:
        raise FormatError(str(e)) from None


def write_polymatrix(g: PolymatrixGame) -> str:
    out = ["polymatrix v1"]
    out += [f"player {p} actions {g.actions[p]}" for p in g.players]
    out += [f"edge {i} {j}" for i, j in g.edges()]
    for i, j in g.edges():
        for a, b in ((i, j), (j, i)):
            out.append(f"matrix {a} {b}:")
            out += [" ".join(fmt(z) for z in row) for row in g.matrices[a, b]]
    return "\n".join(out) + "\n"


def parse_profile(text: str) -> dict[str, tuple[Fraction, ...]]:
    out = {}
    for ln in lines_of(text):
        t = ln.tokens
        if t[0] != "player" or len(t) < 3 or not t[1].endswith(":"):
            raise ln.fail(t[0], "expected 'player i: p_1 ... p_m'")
        p = _ident(ln, t[1][:-1])
        if p in out:
            raise ln.fail(p, "player given twice")
        out[p] = tuple(_rational(ln, z) for z in t[2:])
    return out


def write_profile(s: Mapping[str, Sequence[Fraction]], order: Iterable[str] | None = None) -> str:
    keys = list(order) if order is not None else list(s)
    return "".join(f"player {p}: " + " ".join(fmt(z) for z in s[p]) + "\n" for p in keys)


# Threshold games.


def parse_threshold(text: str) -> ThresholdGame:
    body = _header(lines_of(text), "threshold")
    nodes: dict[str, None] = {}
    edges = []
    for ln in body:
        t = ln.tokens
        if t[0] == "node":
            nodes.update(dict.fromkeys(_ident(ln, x) for x in t[1:]))
        elif t[0] == "edge":
            _arity(ln, 3)
            u, v = _ident(ln, t[1]), _ident(ln, t[2])
            nodes.update(dict.fromkeys((u, v)))
            edges.append((u, v))
        else:
            raise ln.fail(t[0], "expected node or edge")
    try:
        return ThresholdGame(tuple(nodes), tuple(edges))
    except PureCircuitError as e:
        raise FormatError(str(e)) from None


def write_threshold(g: ThresholdGame) -> str:
    out = ["threshold v1"]
    derived = list(dict.fromkeys(v for e in g.edges for v in e))
    if derived != list(g.nodes):
        out += [f"node {v}" for v in g.nodes]
    out += [f"edge {u} {v}" for u, v in g.edges]
    return "\n".join(out) + "\n"


# Bimatrix games and profiles.


def parse_bimatrix(text: str) -> BimatrixGame:
    body = _header(lines_of(text), "bimatrix")
    if not body or body[0].tokens[0] != "dims":
        raise FormatError("expected 'dims m k' after the header")
    _arity(body[0], 3)
    m, k = _int(body[0], body[0].tokens[1]), _int(body[0], body[0].tokens[2])
    rows = body[1:]
    if len(rows) != 2 * m:
        raise FormatError(f"expected {2 * m} matrix rows (R then C), got {len(rows)}")
    mats = []
    for ln in rows:
        if len(ln.tokens) != k:
            raise ln.fail(None, f"row needs {k} entries")
        mats.append(tuple(_rational(ln, z) for z in ln.tokens))
    try:
        return BimatrixGame(tuple(mats[:m]), tuple(mats[m:]))
    except PureCircuitError as e:
        raise FormatError(str(e)) from None


def write_bimatrix(g: BimatrixGame) -> str:
    m, k = g.shape
    out = ["bimatrix v1", f"dims {m} {k}"]
    out += [" ".join(fmt(z) for z in row) for row in g.R + g.C]
    return "\n".join(out) + "\n"


def parse_biprofile(text: str) -> BiProfile:
    got = {}
    for ln in lines_of(text):
        t = ln.tokens
        if t[0] not in ("row:", "col:") or t[0] in got:
            raise ln.fail(t[0], "expected one 'row:' and one 'col:' line")
        got[t[0]] = tuple(_rational(ln, z) for z in t[1:])
    if set(got) != {"row:", "col:"}:
        raise FormatError("profile needs a 'row:' and a 'col:' line")
    return got["row:"], got["col:"]


def write_biprofile(s: BiProfile) -> str:
    x, y = s
    return "row: " + " ".join(map(fmt, x)) + "\ncol: " + " ".join(map(fmt, y)) + "\n"


# Reduction maps.  Sections hold other documents verbatim.


@dataclass
class MapDoc:
    kind: str
    params: dict[str, Fraction]
    nodes: dict[str, str]
    gadgets: list[Gadget]
    records: list[Line]
    sections: dict[str, tuple[int, str]]


def _split_sections(text: str) -> tuple[str, dict[str, tuple[int, str]]]:
    """Pull out ``begin NAME`` ... ``end NAME`` blocks (outermost only)."""
    keep: list[str] = []
    sections: dict[str, tuple[int, str]] = {}
    raw = text.splitlines()
    k = 0
    while k < len(raw):
        toks = raw[k].split("#", 1)[0].split()
        if len(toks) == 2 and toks[0] == "begin":
            name, depth, start = toks[1], 1, k + 1
            k += 1
            while k < len(raw):
                t = raw[k].split("#", 1)[0].split()
                if t == ["begin", name]:
                    depth += 1
                elif t == ["end", name]:
                    depth -= 1
                    if depth == 0:
                        break
                k += 1
            if k == len(raw):
                raise FormatError(f"line {start}: section {name!r} is not closed")
            if name in sections:
                raise FormatError(f"line {start}: section {name!r} given twice")
            sections[name] = (start + 1, "\n".join(raw[start:k]) + "\n")
            keep.append("")
        else:
            keep.append(raw[k])
        k += 1
    return "\n".join(keep), sections


def parse_map(text: str) -> MapDoc:
    main, sections = _split_sections(text)
    body = _header(lines_of(main), "reduction-map")
    kind = None
    params: dict[str, Fraction] = {}
    nodes: dict[str, str] = {}
    gadgets: list[Gadget] = []
    records: list[Line] = []
    for ln in body:
        t = ln.tokens
        if t[0] == "kind":
            _arity(ln, 2)
            kind = t[1]
        elif t[0] == "param":
            _arity(ln, 3)
            params[t[1]] = _rational(ln, t[2])
        elif t[0] == "node":
            _arity(ln, 4)
            if t[2] != "->":
                raise ln.fail(t[2], "expected '->'")
            nodes[_ident(ln, t[1])] = _ident(ln, t[3])
        elif t[0] == "gadget":
            if len(t) < 2:
                raise ln.fail(None, "gadget needs an index")
            rest = list(t[2:])
            targets: list[int] = []
            if "targets" in rest:
                cut = rest.index("targets")
                targets = [_int(ln, z) for z in rest[cut + 1:]]
                rest = rest[:cut]
            gadgets.append(Gadget(_int(ln, t[1]), tuple(_ident(ln, z) for z in rest), tuple(targets)))
        else:
            records.append(ln)
    if kind is None:
        raise FormatError("map has no 'kind' line")
    return MapDoc(kind, params, nodes, gadgets, records, sections)


def _section(name: str, body: str) -> list[str]:
    return [f"begin {name}", body.rstrip("\n"), f"end {name}"]


def write_reduction_map(rmap: ReductionMap) -> str:
    out = ["reduction-map v1", f"kind {rmap.kind}"]
    out += [f"param {k} {fmt(v)}" for k, v in rmap.params.items()]
    out += [f"node {s} -> {t}" for s, t in rmap.nodes.items()]
    for gd in rmap.gadgets:
        line = f"gadget {gd.source_gate}" + "".join(f" {x}" for x in gd.internals)
        if gd.target_gates:
            line += " targets " + " ".join(map(str, gd.target_gates))
        out.append(line)
    if rmap.source is not None:
        out += _section("source", write_pc(rmap.source))
    if rmap.original is not None:
        out += _section("original", write_pc(rmap.original))
    return "\n".join(out) + "\n"


def reduction_map_from_doc(doc: MapDoc) -> ReductionMap:
    src = parse_pc(doc.sections["source"][1], doc.sections["source"][0]) if "source" in doc.sections else None
    orig = parse_pc(doc.sections["original"][1], doc.sections["original"][0]) if "original" in doc.sections else None
    return ReductionMap(doc.kind, doc.nodes, doc.params, tuple(doc.gadgets), src, orig)


def write_bimatrix_map(bmap: BimatrixMap, inner: ReductionMap | None) -> str:
    out = ["reduction-map v1", "kind bimatrix", f"param lambda {fmt(bmap.lam)}"]
    out.append("rows " + " ".join(bmap.rows))
    out.append("cols " + " ".join(bmap.cols))
    out += [f"dummy {d}" for d in sorted(bmap.dummies)]
    if inner is not None:
        out += _section("inner", write_reduction_map(inner))
    return "\n".join(out) + "\n"


def bimatrix_map_from_doc(doc: MapDoc) -> tuple[BimatrixMap, ReductionMap | None]:
    rows = cols = None
    dummies = set()
    for ln in doc.records:
        t = ln.tokens
        if t[0] == "rows":
            rows = tuple(_ident(ln, z) for z in t[1:])
        elif t[0] == "cols":
            cols = tuple(_ident(ln, z) for z in t[1:])
        elif t[0] == "dummy":
            _arity(ln, 2)
            dummies.add(_ident(ln, t[1]))
        else:
            raise ln.fail(t[0], "unexpected record in a bimatrix map")
    if rows is None or cols is None or len(rows) != len(cols):
        raise FormatError("bimatrix map needs 'rows' and 'cols' lines of equal length")
    inner = None
    if "inner" in doc.sections:
        inner = reduction_map_from_doc(parse_map(doc.sections["inner"][1]))
    lam = doc.params.get("lambda")
    if lam is None:
        raise FormatError("bimatrix map needs 'param lambda'")
    return BimatrixMap(rows, cols, frozenset(dummies), lam), inner


def write_sperner_map(emap: ExtractionMap) -> str:
    out = ["reduction-map v1", "kind sperner", f"dims {emap.n} {emap.m} {emap.k}"]
    out.append("selection " + " ".join(map(str, emap.selection)))
    out += [f"root {i} {j} {v}" for (i, j), v in emap.roots.items()]
    out += [f"leaf {i} {j} {c} {v}" for (i, j, c), v in emap.leaves.items()]
    if emap.source is not None:
        out += _section("sperner", write_sperner(emap.source))
    if emap.instance is not None:
        out += _section("instance", write_pc(emap.instance))
    return "\n".join(out) + "\n"


def sperner_map_from_doc(doc: MapDoc) -> ExtractionMap:
    dims = None
    selection: tuple[int, ...] = ()
    roots: dict[tuple[int, int], str] = {}
    leaves: dict[tuple[int, int, int], str] = {}
    for ln in doc.records:
        t = ln.tokens
        if t[0] == "dims":
            _arity(ln, 4)
            dims = tuple(_int(ln, z) for z in t[1:])
        elif t[0] == "selection":
            selection = tuple(_int(ln, z) for z in t[1:])
        elif t[0] == "root":
            _arity(ln, 4)
            roots[_int(ln, t[1]), _int(ln, t[2])] = _ident(ln, t[3])
        elif t[0] == "leaf":
            _arity(ln, 5)
            leaves[_int(ln, t[1]), _int(ln, t[2]), _int(ln, t[3])] = _ident(ln, t[4])
        else:
            raise ln.fail(t[0], "unexpected record in a sperner map")
    if dims is None:
        raise FormatError("sperner map needs a 'dims n m k' line")
    src = parse_sperner(doc.sections["sperner"][1], doc.sections["sperner"][0]) if "sperner" in doc.sections else None
    inst = parse_pc(doc.sections["instance"][1], doc.sections["instance"][0]) if "instance" in doc.sections else None
    n, m, k = dims
    return ExtractionMap(n, m, k, leaves, roots, selection, inst, src)


def sniff(text: str) -> str:
    """Name of the format announced by the first header line."""
    ls = lines_of(text)
    if not ls or len(ls[0].tokens) != 2 or ls[0].tokens[1] != "v1":
        raise FormatError("line 1: expected a '<format> v1' header")
    return ls[0].tokens[0]
