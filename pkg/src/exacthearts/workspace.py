"""Plain-text workspace files.

A workspace is a list of sections::

    [field]          q  or  fp:<p>
    [quiver]         vertices 1 2
                     arrow a : 2 -> 1
    [relations]      one relation per line, e.g.  t.t
    [modules]        P1 = projective 1      (also injective, simple)
                     M = rep 1 1 | a = [1]
                     S = sum P1 I2
    [maps]           inc : P1 -> P2 | 1 = [1] | 2 = []
                     z : P1 -> I2 zero
                     c = compose sur inc    (sur after inc)
    [subcategories]  E = add I1 I2 induced bound 2
                     A = mod induced
    [complexes]      X = from -1 : inc sur
                     Y = stalk P2 at 0
    [queries]        the same words as the command line, e.g.  heart compute E LHb

Matrices are written row by row, ``[1 0; 0 1]``; a vertex component has
shape (dim at target) x (dim at source).  Omitted components and arrow
matrices are zero.  Text after ``#`` is a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from pathlib import Path as FsPath

from .complexes import Complex
from .exact import INDUCED, SPLIT, ExactSubcat
from .linalg import Field, InputError, Matrix
from .modules import (
    Module,
    ModuleMap,
    RepresentationInfiniteError,
    direct_sum,
    enumerate_indecomposables,
    identity_map,
    injective,
    projective,
    simple,
    zero_map,
)
from .quiver import PathAlgebra, Quiver, build_path_algebra, parse_relation

SECTIONS = ("field", "quiver", "relations", "modules", "maps", "subcategories", "complexes", "queries")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")


class WorkspaceError(InputError):
    def __init__(self, message: str, line: int = 0, col: int = 0, path: str = ""):
        where = f"{path}:" if path else ""
        super().__init__(f"{where}{line}:{col}: {message}" if line else f"{where}{message}")
        self.line, self.col, self.message = line, col, message


@dataclass
class Line:
    number: int
    text: str          # without comment, stripped

    def col(self, token: str) -> int:
        i = self.text.find(token)
        return i + 1 if i >= 0 else 1


@dataclass
class Workspace:
    field: Field
    algebra: PathAlgebra
    modules: dict[str, Module] = dc_field(default_factory=dict)
    maps: dict[str, ModuleMap] = dc_field(default_factory=dict)
    subcategories: dict[str, ExactSubcat] = dc_field(default_factory=dict)
    complexes: dict[str, Complex] = dc_field(default_factory=dict)
    queries: list[str] = dc_field(default_factory=list)
    canonical_lines: dict[str, list[str]] = dc_field(default_factory=dict)
    source: str = ""

    def canonical(self) -> str:
        out = []
        for sec in SECTIONS:
            lines = self.canonical_lines.get(sec, [])
            if not lines and sec not in ("field", "quiver"):
                continue
            out.append(f"[{sec}]")
            out.extend(lines)
            out.append("")
        return "\n".join(out).rstrip("\n") + "\n"

    def subcategory(self, name: str | None) -> ExactSubcat:
        if name is None:
            if len(self.subcategories) != 1:
                raise InputError("name a subcategory: the workspace declares " + str(len(self.subcategories)))
            return next(iter(self.subcategories.values()))
        try:
            return self.subcategories[name]
        except KeyError:
            raise InputError(f"unknown subcategory {name!r}") from None

    def lookup(self, table: str, name: str):
        d = getattr(self, table)
        if name not in d:
            raise InputError(f"unknown {table[:-1] if table != 'complexes' else 'complex'} {name!r}")
        return d[name]


# ---------------------------------------------------------------------------
# Lexing


def _split_sections(text: str, path: str) -> dict[str, list[Line]]:
    sections: dict[str, list[Line]] = {}
    current = None
    for n, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("["):
            if not body.endswith("]"):
                raise WorkspaceError("unterminated section header", n, 1, path)
            name = body[1:-1].strip().lower()
            if name not in SECTIONS:
                raise WorkspaceError(f"unknown section [{name}]", n, 2, path)
            if name in sections:
                raise WorkspaceError(f"section [{name}] appears twice", n, 2, path)
            sections[name] = []
            current = name
            continue
        if current is None:
            raise WorkspaceError("text before the first section", n, 1, path)
        sections[current].append(Line(n, body))
    return sections


def parse_matrix(text: str, field: Field, nrows: int, ncols: int) -> Matrix:
    t = text.strip()
    if not (t.startswith("[") and t.endswith("]")):
        raise InputError(f"matrix literal must be bracketed, got {text!r}")
    inner = t[1:-1].strip()
    if nrows == 0 or ncols == 0:
        if inner:
            raise InputError(f"matrix {text!r} should be [] for shape {nrows}x{ncols}")
        return Matrix(field, nrows, ncols)
    rows = [r.split() for r in inner.split(";")]
    if len(rows) != nrows or any(len(r) != ncols for r in rows):
        raise InputError(f"matrix {text!r} does not have shape {nrows}x{ncols}")
    try:
        return Matrix.from_rows(field, rows, ncols)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad matrix entry in {text!r}: {exc}") from None


def format_matrix(m: Matrix) -> str:
    if m.nrows == 0 or m.ncols == 0:
        return "[]"
    return "[" + "; ".join(" ".join(m.field.fmt(x) for x in row) for row in m.data) + "]"


def _check_name(name: str, line: Line, path: str, taken: set):
    if not _NAME.match(name):
        raise WorkspaceError(f"bad name {name!r}", line.number, line.col(name), path)
    if name in taken:
        raise WorkspaceError(f"name {name!r} is already used", line.number, line.col(name), path)
    taken.add(name)


# ---------------------------------------------------------------------------
# Parsing


def parse_text(text: str, path: str = "", field_override: Field | None = None) -> Workspace:
    secs = _split_sections(text, path)
    canon: dict[str, list[str]] = {s: [] for s in SECTIONS}

    def fail(msg: str, line: Line, token: str = ""):
        raise WorkspaceError(msg, line.number, line.col(token) if token else 1, path)

    # field
    field = Field(5)
    flines = secs.get("field", [])
    if len(flines) > 1:
        fail("one field line expected", flines[1])
    if flines:
        try:
            field = Field.parse(flines[0].text)
        except InputError as exc:
            fail(str(exc), flines[0], flines[0].text)
    if field_override is not None:
        field = field_override
    canon["field"].append(str(field))

    # quiver
    vertices: list[str] = []
    arrows: list[tuple[str, str, str]] = []
    qlines = secs.get("quiver", [])
    if not qlines:
        raise WorkspaceError("missing [quiver] section", 0, 0, path)
    for ln in qlines:
        toks = ln.text.split()
        if toks[0] == "vertices":
            if vertices:
                fail("vertices declared twice", ln, "vertices")
            vertices = toks[1:]
            if not vertices:
                fail("no vertices", ln)
        elif toks[0] == "arrow":
            m = re.fullmatch(r"arrow\s+(\S+)\s*:\s*(\S+)\s*->\s*(\S+)", ln.text)
            if not m:
                fail("expected 'arrow <name> : <source> -> <target>'", ln)
            name, s, t = m.groups()
            for v in (s, t):
                if v not in vertices:
                    fail(f"unknown vertex {v!r}", ln, v)
            arrows.append((name, s, t))
        else:
            fail(f"unknown quiver line {toks[0]!r}", ln, toks[0])
    try:
        quiver = Quiver.build(vertices, arrows)
    except InputError as exc:
        raise WorkspaceError(str(exc), qlines[0].number, 1, path) from None
    canon["quiver"].append("vertices " + " ".join(vertices))
    canon["quiver"].extend(f"arrow {a} : {s} -> {t}" for a, s, t in arrows)

    relations = []
    for ln in secs.get("relations", []):
        try:
            relations.append(parse_relation(quiver, field, ln.text))
        except InputError as exc:
            fail(str(exc), ln)
        canon["relations"].append(" ".join(ln.text.split()))
    try:
        alg = build_path_algebra(quiver, relations, field)
    except InputError as exc:
        raise WorkspaceError(str(exc), 0, 0, path) from None

    ws = Workspace(field, alg, source=path)
    taken: set = set()

    def vertex(tok: str, ln: Line) -> int:
        if tok not in vertices:
            fail(f"unknown vertex {tok!r}", ln, tok)
        return vertices.index(tok)

    # modules
    for ln in secs.get("modules", []):
        name, _, rhs = ln.text.partition("=")
        name, rhs = name.strip(), rhs.strip()
        _check_name(name, ln, path, taken)
        toks = rhs.split()
        if not toks:
            fail("empty module declaration", ln)
        kind = toks[0]
        try:
            if kind in ("projective", "injective", "simple") and len(toks) == 2:
                build = {"projective": projective, "injective": injective, "simple": simple}[kind]
                ws.modules[name] = build(alg, vertex(toks[1], ln))
                canon["modules"].append(f"{name} = {kind} {toks[1]}")
            elif kind == "sum":
                parts = []
                for t in toks[1:]:
                    if t not in ws.modules:
                        fail(f"unknown module {t!r}", ln, t)
                    parts.append(ws.modules[t])
                if not parts:
                    fail("empty sum", ln, "sum")
                ws.modules[name] = direct_sum(parts, alg).module
                canon["modules"].append(f"{name} = sum " + " ".join(toks[1:]))
            elif kind == "rep":
                pieces = [p.strip() for p in rhs.split("|")]
                dims_t = pieces[0].split()[1:]
                if len(dims_t) != quiver.n or not all(d.isdigit() for d in dims_t):
                    fail(f"rep needs {quiver.n} vertex dimensions", ln, "rep")
                dims = [int(d) for d in dims_t]
                mats = {}
                for p in pieces[1:]:
                    an, _, lit = p.partition("=")
                    an = an.strip()
                    if an not in [a[0] for a in arrows]:
                        fail(f"unknown arrow {an!r}", ln, an)
                    a = quiver.arrows[quiver.arrow_index(an)]
                    mats[an] = parse_matrix(lit, field, dims[a.target], dims[a.source])
                maps = [mats.get(a.name, Matrix(field, dims[a.target], dims[a.source])) for a in quiver.arrows]
                ws.modules[name] = Module(alg, dims, maps)
                rendered = [f"{a.name} = {format_matrix(m)}" for a, m in zip(quiver.arrows, maps) if not m.is_zero()]
                canon["modules"].append(" | ".join([f"{name} = rep " + " ".join(dims_t)] + rendered))
            else:
                fail(f"unknown module kind {kind!r}", ln, kind)
        except WorkspaceError:
            raise
        except InputError as exc:
            fail(str(exc), ln, kind)

    # maps
    for ln in secs.get("maps", []):
        text = ln.text
        m = re.fullmatch(r"(\S+)\s*=\s*compose\s+(.+)", text)
        if m:
            name, names = m.group(1), m.group(2).split()
            _check_name(name, ln, path, taken)
            acc = None
            for t in names:
                if t not in ws.maps:
                    fail(f"unknown map {t!r}", ln, t)
                try:
                    acc = ws.maps[t] if acc is None else acc @ ws.maps[t]
                except InputError:
                    fail("maps do not compose", ln, t)
            ws.maps[name] = acc
            canon["maps"].append(f"{name} = compose " + " ".join(names))
            continue
        m = re.fullmatch(r"(\S+)\s*:\s*(\S+)\s*->\s*(\S+)\s*(.*)", text)
        if not m:
            fail("expected '<name> : <source> -> <target> ...' or '<name> = compose ...'", ln)
        name, sn, tn, rest = m.groups()
        _check_name(name, ln, path, taken)
        for t in (sn, tn):
            if t not in ws.modules:
                fail(f"unknown module {t!r}", ln, t)
        src, tgt = ws.modules[sn], ws.modules[tn]
        rest = rest.strip()
        head = f"{name} : {sn} -> {tn}"
        if rest in ("zero", ""):
            ws.maps[name] = zero_map(src, tgt)
            canon["maps"].append(head + " zero")
            continue
        if rest == "identity":
            if src != tgt:
                fail("identity needs equal source and target", ln, "identity")
            ws.maps[name] = identity_map(src)
            canon["maps"].append(head + " identity")
            continue
        comps = {}
        for p in [p.strip() for p in rest.split("|") if p.strip()]:
            vn, _, lit = p.partition("=")
            v = vertex(vn.strip(), ln)
            try:
                comps[v] = parse_matrix(lit, field, tgt.dims[v], src.dims[v])
            except InputError as exc:
                fail(str(exc), ln, lit.strip())
        full = [comps.get(v, Matrix(field, tgt.dims[v], src.dims[v])) for v in range(quiver.n)]
        try:
            ws.maps[name] = ModuleMap(src, tgt, full)
        except InputError as exc:
            fail(f"map {name}: {exc}", ln, name)
        rendered = [f"{vertices[v]} = {format_matrix(c)}" for v, c in enumerate(full) if not c.is_zero()]
        canon["maps"].append(" | ".join([head] + rendered) if rendered else head + " zero")

    # subcategories
    for ln in secs.get("subcategories", []):
        name, _, rhs = ln.text.partition("=")
        name = name.strip()
        _check_name(name, ln, path, taken)
        toks = rhs.split()
        if not toks or toks[0] not in ("add", "mod"):
            fail("expected 'add <modules> ...' or 'mod ...'", ln, toks[0] if toks else "")
        structure, bound, kbound = INDUCED, 2, None
        gens_names: list[str] = []
        i = 1
        while i < len(toks):
            t = toks[i]
            if t in (INDUCED, SPLIT):
                structure = t
            elif t in ("bound", "kernel") and i + 1 < len(toks) and toks[i + 1].isdigit():
                if t == "bound":
                    bound = int(toks[i + 1])
                else:
                    kbound = int(toks[i + 1])
                i += 1
            elif toks[0] == "add":
                if t not in ws.modules:
                    fail(f"unknown module {t!r}", ln, t)
                gens_names.append(t)
            else:
                fail(f"unexpected {t!r}", ln, t)
            i += 1
        try:
            if toks[0] == "mod":
                try:
                    gens = enumerate_indecomposables(alg)
                except RepresentationInfiniteError as exc:
                    fail(f"mod needs a representation-finite algebra: {exc}", ln, "mod")
            else:
                if not gens_names:
                    fail("add needs at least one module", ln, "add")
                gens = [ws.modules[g] for g in gens_names]
            ws.subcategories[name] = ExactSubcat(alg, gens, structure, kbound, bound, name=name)
        except WorkspaceError:
            raise
        except InputError as exc:
            fail(str(exc), ln, name)
        words = [name, "=", toks[0]] + gens_names + [structure, "bound", str(bound)]
        if kbound is not None:
            words += ["kernel", str(kbound)]
        canon["subcategories"].append(" ".join(words))

    # complexes
    for ln in secs.get("complexes", []):
        name, _, rhs = ln.text.partition("=")
        name, rhs = name.strip(), rhs.strip()
        _check_name(name, ln, path, taken)
        m = re.fullmatch(r"stalk\s+(\S+)(?:\s+at\s+(-?\d+))?", rhs)
        if m:
            mn, deg = m.group(1), int(m.group(2) or 0)
            if mn not in ws.modules:
                fail(f"unknown module {mn!r}", ln, mn)
            ws.complexes[name] = Complex.stalk(ws.modules[mn], deg)
            canon["complexes"].append(f"{name} = stalk {mn} at {deg}")
            continue
        m = re.fullmatch(r"from\s+(-?\d+)\s*:\s*(.+)", rhs)
        if not m:
            fail("expected 'stalk <module> at <n>' or 'from <n> : <maps>'", ln, rhs.split()[0] if rhs else "")
        start, names = int(m.group(1)), m.group(2).split()
        seq = []
        for t in names:
            if t not in ws.maps:
                fail(f"unknown map {t!r}", ln, t)
            seq.append(ws.maps[t])
        for a, b in zip(seq, seq[1:]):
            if a.target != b.source:
                fail("consecutive maps do not match", ln, names[seq.index(b)])
        try:
            ws.complexes[name] = Complex.from_maps(start, seq)
        except InputError as exc:
            fail(f"complex {name}: {exc}", ln, name)
        canon["complexes"].append(f"{name} = from {start} : " + " ".join(names))

    for ln in secs.get("queries", []):
        q = " ".join(ln.text.split())
        ws.queries.append(q)
        canon["queries"].append(q)
    ws.canonical_lines = canon
    return ws


def parse(path: str | FsPath, field_override: Field | None = None) -> Workspace:
    p = FsPath(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise WorkspaceError(f"cannot read workspace: {exc.strerror}", path=str(path)) from None
    return parse_text(text, str(path), field_override)


def shipped_workspace(name: str) -> FsPath:
    """Path of a workspace shipped with the package (``a2_example``, ``dual_numbers``)."""
    from importlib import resources
    return FsPath(str(resources.files("exacthearts") / "workspaces" / f"{name}.ws"))
