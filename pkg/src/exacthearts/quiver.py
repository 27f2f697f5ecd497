"""Finite quivers with relations and their finite-dimensional path algebras.

Paths compose left to right: the path ``(a, b)`` first traverses ``a`` then
``b``.  A trivial path at vertex ``v`` is the empty tuple tagged with ``v``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping, Sequence

from .linalg import Field, InputError, _rref_rows

DEFAULT_MAX_PATH_LENGTH = 12


class InfiniteDimensionalError(InputError):
    pass


@dataclass(frozen=True)
class Arrow:
    name: str
    source: int
    target: int


@dataclass(frozen=True)
class Path:
    """A path; ``arrows`` holds arrow indices, ``start``/``end`` are vertex indices."""

    start: int
    end: int
    arrows: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.arrows)


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("vertex labels must be unique")
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names) or set(names) & set(self.vertices):
            raise InputError("arrow labels must be unique and distinct from vertices")
        for a in self.arrows:
            if not (0 <= a.source < len(self.vertices) and 0 <= a.target < len(self.vertices)):
                raise InputError(f"arrow {a.name} references a missing vertex")

    @classmethod
    def build(cls, vertices: Sequence[str], arrows: Sequence[tuple[str, str, str]]) -> "Quiver":
        vs = tuple(str(v) for v in vertices)
        index = {v: i for i, v in enumerate(vs)}
        out = []
        for name, s, t in arrows:
            if str(s) not in index or str(t) not in index:
                raise InputError(f"arrow {name} references a missing vertex")
            out.append(Arrow(name, index[str(s)], index[str(t)]))
        return cls(vs, tuple(out))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def vertex_index(self, label) -> int:
        try:
            return self.vertices.index(str(label))
        except ValueError:
            raise InputError(f"unknown vertex {label!r}") from None

    def arrow_index(self, name: str) -> int:
        for i, a in enumerate(self.arrows):
            if a.name == name:
                return i
        raise InputError(f"unknown arrow {name!r}")

    def trivial(self, v: int) -> Path:
        return Path(v, v, ())

    def concat(self, p: Path, q: Path) -> Path | None:
        if p.end != q.start:
            return None
        return Path(p.start, q.end, p.arrows + q.arrows)

    def paths_of_length(self, length: int) -> list[Path]:
        if length == 0:
            return [self.trivial(v) for v in range(self.n)]
        out = []
        for p in self.paths_of_length(length - 1):
            for i, a in enumerate(self.arrows):
                if a.source == p.end:
                    out.append(Path(p.start, a.target, p.arrows + (i,)))
        return out

    def path_from_names(self, names: Sequence[str], vertex: str | None = None) -> Path:
        if not names:
            if vertex is None:
                raise InputError("trivial path needs a vertex")
            v = self.vertex_index(vertex)
            return self.trivial(v)
        idx = [self.arrow_index(n) for n in names]
        for a, b in zip(idx, idx[1:]):
            if self.arrows[a].target != self.arrows[b].source:
                raise InputError(f"arrows {self.arrows[a].name} and {self.arrows[b].name} do not compose")
        return Path(self.arrows[idx[0]].source, self.arrows[idx[-1]].target, tuple(idx))

    def path_name(self, p: Path) -> str:
        if not p.arrows:
            return f"e{self.vertices[p.start]}"
        return ".".join(self.arrows[i].name for i in p.arrows)

    def opposite(self) -> "Quiver":
        return Quiver(self.vertices, tuple(Arrow(a.name, a.target, a.source) for a in self.arrows))

    def is_acyclic(self) -> bool:
        indeg = [0] * self.n
        for a in self.arrows:
            indeg[a.target] += 1
        ready = [v for v in range(self.n) if indeg[v] == 0]
        seen = 0
        while ready:
            v = ready.pop()
            seen += 1
            for a in self.arrows:
                if a.source == v:
                    indeg[a.target] -= 1
                    if indeg[a.target] == 0:
                        ready.append(a.target)
        return seen == self.n


Relation = Mapping[Path, object]


@dataclass
class PathAlgebra:
    """Path algebra modulo relations with a basis of residue paths.

    ``basis`` lists the normal-form paths; every other path reduces to a
    combination of them through ``reduce``.
    """

    quiver: Quiver
    relations: tuple[tuple[tuple[Path, object], ...], ...]
    field: Field
    basis: tuple[Path, ...]
    _reductions: dict = dc_field(default_factory=dict, repr=False)
    _bound: int = 0
    _mult_cache: dict = dc_field(default_factory=dict, repr=False)

    def __hash__(self) -> int:
        return id(self)

    def __eq__(self, other) -> bool:
        return self is other

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def n(self) -> int:
        return self.quiver.n

    def basis_index(self, p: Path) -> int:
        return self._index[p]

    @property
    def _index(self) -> dict:
        idx = self.__dict__.get("_index_cache")
        if idx is None:
            idx = {p: i for i, p in enumerate(self.basis)}
            self.__dict__["_index_cache"] = idx
        return idx

    def reduce(self, p: Path) -> dict[Path, object]:
        """Normal form of a single path as {basis path: coefficient}."""
        if p in self._index:
            return {p: self.field.one()}
        if len(p) >= self._bound:
            return {}
        return dict(self._reductions.get(p, {}))

    def multiply_paths(self, p: Path, q: Path) -> dict[Path, object]:
        key = (p, q)
        hit = self._mult_cache.get(key)
        if hit is not None:
            return hit
        c = self.quiver.concat(p, q)
        out = {} if c is None else self.reduce(c)
        self._mult_cache[key] = out
        return out

    def multiply(self, x: Mapping[Path, object], y: Mapping[Path, object]) -> dict[Path, object]:
        f = self.field
        p = f.p
        out: dict[Path, object] = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for r, cr in self.multiply_paths(a, b).items():
                    v = out.get(r, f.zero()) + ca * cb * cr
                    out[r] = v % p if p else v
        return {k: v for k, v in out.items() if v}

    def paths_between(self, start: int, end: int) -> list[Path]:
        return [b for b in self.basis if b.start == start and b.end == end]

    def is_hereditary_certified(self) -> bool:
        """No relations and an acyclic quiver: a hereditary path algebra."""
        return not self.relations and self.quiver.is_acyclic()

    def opposite(self) -> "PathAlgebra":
        q = self.quiver.opposite()
        rels = []
        for rel in self.relations:
            rels.append({Path(path.end, path.start, tuple(reversed(path.arrows))): c for path, c in rel})
        return build_path_algebra(q, rels, self.field, self._bound)


def build_path_algebra(
    quiver: Quiver,
    relations: Sequence[Mapping[Path, object]],
    field: Field,
    max_path_length: int = DEFAULT_MAX_PATH_LENGTH,
) -> PathAlgebra:
    """Quotient of the path algebra by the ideal generated by ``relations``.

    Raises InfiniteDimensionalError when some path of length
    ``max_path_length`` survives modulo the relations.
    """
    rels = []
    for rel in relations:
        terms = {p: field(c) for p, c in rel.items() if field(c)}
        if not terms:
            continue
        ends = {(p.start, p.end) for p in terms}
        if len(ends) != 1:
            raise InputError("relation terms must be parallel paths")
        if any(len(p) < 2 for p in terms):
            raise InputError("relation terms must have length at least 2")
        rels.append(terms)

    L = max_path_length
    layers = [quiver.paths_of_length(k) for k in range(L + 1)]
    all_paths = [p for layer in layers for p in layer]
    # coordinates ordered longest first so that pivots land on long paths
    order = sorted(all_paths, key=lambda p: (-len(p), p.start, p.end, p.arrows))
    col = {p: i for i, p in enumerate(order)}

    generators = []
    for rel in rels:
        maxlen = max(len(p) for p in rel)
        for lu in range(L + 1):
            for u in layers[lu]:
                for lw in range(L + 1 - lu):
                    if lu + lw + maxlen > L:
                        break
                    for w in layers[lw]:
                        row = {}
                        ok = True
                        for p, c in rel.items():
                            left = quiver.concat(u, p)
                            full = quiver.concat(left, w) if left is not None else None
                            if full is None:
                                ok = False
                                break
                            row[full] = c
                        if ok:
                            generators.append(row)
    dense = []
    for g in generators:
        r = [field.zero()] * len(order)
        for p, c in g.items():
            r[col[p]] = c
        dense.append(r)
    pivots = _rref_rows(field, dense, len(order))
    pivot_set = set(pivots)
    top = [p for p in layers[L]] if L < len(layers) else []
    for p in top:
        if col[p] not in pivot_set:
            raise InfiniteDimensionalError(
                f"possibly infinite-dimensional: path {quiver.path_name(p)} of length {L} is nonzero"
            )
    basis = [p for p in all_paths if len(p) < L and col[p] not in pivot_set]
    basis.sort(key=lambda p: (len(p), p.start, p.end, p.arrows))
    reductions = {}
    pv = field.p
    for i, pc in enumerate(pivots):
        path = order[pc]
        if len(path) >= L:
            continue
        row = dense[i]
        red = {}
        for j, x in enumerate(row):
            if x and j != pc:
                red[order[j]] = (-x) % pv if pv else -x
        reductions[path] = red
    alg = PathAlgebra(
        quiver=quiver,
        relations=tuple(tuple(sorted(r.items(), key=lambda kv: (len(kv[0]), kv[0].arrows))) for r in rels),
        field=field,
        basis=tuple(basis),
    )
    alg._reductions = reductions
    alg._bound = L
    return alg


def parse_path(quiver: Quiver, text: str) -> Path:
    text = text.strip()
    if text.startswith("e") and text[1:] in quiver.vertices:
        return quiver.trivial(quiver.vertex_index(text[1:]))
    return quiver.path_from_names([t for t in text.replace("*", ".").split(".") if t])


def parse_relation(quiver: Quiver, field: Field, text: str) -> dict[Path, object]:
    """Parse ``a.b - 2 c.d`` (optionally ``= 0``) into {path: coefficient}."""
    text = text.split("=")[0].strip()
    if not text:
        raise InputError("empty relation")
    tokens = text.replace("-", " - ").replace("+", " + ").split()
    out: dict[Path, object] = {}
    sign = 1
    coeff: Fraction | None = None
    for tok in tokens:
        if tok == "+":
            sign = 1
            continue
        if tok == "-":
            sign = -sign
            continue
        try:
            coeff = Fraction(tok)
            continue
        except ValueError:
            pass
        c = field(sign * (coeff if coeff is not None else 1))
        path = parse_path(quiver, tok)
        prev = out.get(path, field.zero())
        out[path] = (prev + c) % field.p if field.p else prev + c
        sign = 1
        coeff = None
    return out
