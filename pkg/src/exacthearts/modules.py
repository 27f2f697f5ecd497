"""Finite-dimensional quiver representations and the maps between them.

A :class:`Module` stores one vector space dimension per vertex and one matrix
per arrow (columns indexed by the source space).  A :class:`ModuleMap` stores
one matrix per vertex.  Everything is immutable and hashable so that
expensive derived data (Hom spaces, decompositions) can be cached by value.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Sequence

from .linalg import (
    Field,
    InputError,
    Matrix,
    block_diag,
    char_poly,
    hstack,
    kernel_basis,
    left_kernel,
    rank_of_rows,
    roots_in_field,
    rref,
    solve,
)
from .quiver import Path, PathAlgebra


class SplittingFieldError(ArithmeticError):
    """Fitting splitting stalled: the ground field is too small for the summand."""


class Module:
    __slots__ = ("algebra", "dims", "maps", "_hash")

    def __init__(self, algebra: PathAlgebra, dims: Sequence[int], maps: Sequence[Matrix], check: bool = True):
        self.algebra = algebra
        self.dims = tuple(int(d) for d in dims)
        self.maps = tuple(maps)
        self._hash = None
        if check:
            self._validate()

    def _validate(self):
        q = self.algebra.quiver
        if len(self.dims) != q.n:
            raise InputError(f"expected {q.n} vertex dimensions, got {len(self.dims)}")
        if len(self.maps) != len(q.arrows):
            raise InputError(f"expected {len(q.arrows)} arrow matrices, got {len(self.maps)}")
        for a, m in zip(q.arrows, self.maps):
            if m.shape != (self.dims[a.target], self.dims[a.source]):
                raise InputError(
                    f"arrow {a.name}: matrix shape {m.shape} does not match "
                    f"{self.dims[a.target]}x{self.dims[a.source]}"
                )
            if m.field != self.algebra.field:
                raise InputError(f"arrow {a.name}: wrong field")
        for rel in self.algebra.relations:
            start, end = rel[0][0].start, rel[0][0].end
            acc = Matrix.zeros(self.field, self.dims[end], self.dims[start])
            for path, c in rel:
                acc = acc + self.path_action(path).scale(c)
            if not acc.is_zero():
                names = " + ".join(self.algebra.quiver.path_name(p) for p, _ in rel)
                raise InputError(f"relation {names} does not vanish on the module")

    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Module)
            and self.algebra is other.algebra
            and self.dims == other.dims
            and self.maps == other.maps
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((id(self.algebra), self.dims, self.maps))
        return self._hash

    def __repr__(self) -> str:
        return f"Module(dims={self.dims})"

    def arrow_map(self, name_or_index) -> Matrix:
        if isinstance(name_or_index, str):
            return self.maps[self.algebra.quiver.arrow_index(name_or_index)]
        return self.maps[name_or_index]

    def path_action(self, path: Path) -> Matrix:
        m = Matrix.identity(self.field, self.dims[path.start])
        for i in path.arrows:
            m = self.maps[i] @ m
        return m

    def element_action(self, element: dict) -> Matrix:
        """Matrix on the total space of an algebra element (paths act left to right)."""
        f = self.field
        n = self.total_dim
        offs = self.offsets()
        rows = [[f.zero()] * n for _ in range(n)]
        p = f.p
        for path, c in element.items():
            m = self.path_action(path)
            ro, co = offs[path.end], offs[path.start]
            for i in range(m.nrows):
                for j in range(m.ncols):
                    if m.data[i][j]:
                        v = rows[ro + i][co + j] + c * m.data[i][j]
                        rows[ro + i][co + j] = v % p if p else v
        return Matrix(f, n, n, rows)

    def offsets(self) -> list[int]:
        out, acc = [], 0
        for d in self.dims:
            out.append(acc)
            acc += d
        return out


class ModuleMap:
    __slots__ = ("source", "target", "comps", "_hash")

    def __init__(self, source: Module, target: Module, comps: Sequence[Matrix], check: bool = True):
        self.source = source
        self.target = target
        self.comps = tuple(comps)
        self._hash = None
        if check:
            self._validate()

    def _validate(self):
        s, t = self.source, self.target
        if s.algebra is not t.algebra:
            raise InputError("map between modules over different algebras")
        if len(self.comps) != len(s.dims):
            raise InputError("one component per vertex required")
        for v, c in enumerate(self.comps):
            if c.shape != (t.dims[v], s.dims[v]):
                raise InputError(f"component at vertex {s.algebra.quiver.vertices[v]} has wrong shape {c.shape}")
        for i, a in enumerate(s.algebra.quiver.arrows):
            if self.comps[a.target] @ s.maps[i] != t.maps[i] @ self.comps[a.source]:
                raise InputError(f"map does not intertwine arrow {a.name}")

    @property
    def field(self) -> Field:
        return self.source.field

    @property
    def algebra(self) -> PathAlgebra:
        return self.source.algebra

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModuleMap)
            and self.source == other.source
            and self.target == other.target
            and self.comps == other.comps
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.source, self.target, self.comps))
        return self._hash

    def __repr__(self) -> str:
        return f"ModuleMap({self.source.dims}->{self.target.dims})"

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        """Composition ``self ∘ other``."""
        if other.target != self.source:
            raise InputError("composition of non-composable maps")
        return ModuleMap(other.source, self.target, [a @ b for a, b in zip(self.comps, other.comps)], check=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        if self.source != other.source or self.target != other.target:
            raise InputError("sum of maps with different endpoints")
        return ModuleMap(self.source, self.target, [a + b for a, b in zip(self.comps, other.comps)], check=False)

    def __neg__(self) -> "ModuleMap":
        return ModuleMap(self.source, self.target, [-a for a in self.comps], check=False)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        return self + (-other)

    def scale(self, c) -> "ModuleMap":
        return ModuleMap(self.source, self.target, [a.scale(c) for a in self.comps], check=False)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def ranks(self) -> list[int]:
        return [c.rank() for c in self.comps]

    def is_injective(self) -> bool:
        return all(r == d for r, d in zip(self.ranks(), self.source.dims))

    def is_surjective(self) -> bool:
        return all(r == d for r, d in zip(self.ranks(), self.target.dims))

    def is_iso(self) -> bool:
        return self.source.dims == self.target.dims and self.is_injective()

    def inverse(self) -> "ModuleMap":
        return ModuleMap(self.target, self.source, [c.inverse() for c in self.comps], check=False)

    def vec(self) -> list:
        return [x for c in self.comps for r in c.data for x in r]

    def total_matrix(self) -> Matrix:
        return block_diag(self.field, self.comps)

    def power(self, k: int) -> "ModuleMap":
        return ModuleMap(self.source, self.target, [c.power(k) for c in self.comps], check=False)


# ---------------------------------------------------------------------------
# Constructors


def zero_module(alg: PathAlgebra) -> Module:
    f = alg.field
    dims = [0] * alg.n
    return Module(alg, dims, [Matrix(f, 0, 0) for _ in alg.quiver.arrows], check=False)


def identity_map(m: Module) -> ModuleMap:
    return ModuleMap(m, m, [Matrix.identity(m.field, d) for d in m.dims], check=False)


def zero_map(s: Module, t: Module) -> ModuleMap:
    return ModuleMap(s, t, [Matrix.zeros(s.field, b, a) for a, b in zip(s.dims, t.dims)], check=False)


def module_from_matrices(alg: PathAlgebra, dims: Sequence[int], arrow_mats: dict) -> Module:
    maps = []
    for a in alg.quiver.arrows:
        m = arrow_mats.get(a.name)
        if m is None:
            m = Matrix.zeros(alg.field, dims[a.target], dims[a.source])
        maps.append(m)
    return Module(alg, dims, maps)


def projective(alg: PathAlgebra, v: int) -> Module:
    """P(v): spanned at w by the basis paths from v to w."""
    return _projective_cached(alg, v)


@functools.lru_cache(maxsize=None)
def _projective_cached(alg: PathAlgebra, v: int) -> Module:
    q = alg.quiver
    f = alg.field
    spaces = [alg.paths_between(v, w) for w in range(q.n)]
    maps = []
    for i, a in enumerate(q.arrows):
        src, tgt = spaces[a.source], spaces[a.target]
        idx = {p: k for k, p in enumerate(tgt)}
        arrow_path = Path(a.source, a.target, (i,))
        rows = [[f.zero()] * len(src) for _ in tgt]
        for j, p in enumerate(src):
            for r, c in alg.multiply_paths(p, arrow_path).items():
                rows[idx[r]][j] = c
        maps.append(Matrix(f, len(tgt), len(src), rows))
    return Module(alg, [len(s) for s in spaces], maps)


def projective_generator_element(alg: PathAlgebra, v: int) -> int:
    """Index of the trivial path e_v inside P(v) at vertex v."""
    return alg.paths_between(v, v).index(alg.quiver.trivial(v))


def injective(alg: PathAlgebra, v: int) -> Module:
    return _injective_cached(alg, v)


@functools.lru_cache(maxsize=None)
def _injective_cached(alg: PathAlgebra, v: int) -> Module:
    q = alg.quiver
    f = alg.field
    spaces = [alg.paths_between(w, v) for w in range(q.n)]
    maps = []
    for i, a in enumerate(q.arrows):
        src, tgt = spaces[a.source], spaces[a.target]
        idx = {p: k for k, p in enumerate(src)}
        arrow_path = Path(a.source, a.target, (i,))
        rows = [[f.zero()] * len(src) for _ in tgt]
        for r_i, qpath in enumerate(tgt):
            for r, c in alg.multiply_paths(arrow_path, qpath).items():
                rows[r_i][idx[r]] = c
        maps.append(Matrix(f, len(tgt), len(src), rows))
    return Module(alg, [len(s) for s in spaces], maps)


def simple(alg: PathAlgebra, v: int) -> Module:
    dims = [1 if w == v else 0 for w in range(alg.n)]
    return Module(alg, dims, [Matrix.zeros(alg.field, dims[a.target], dims[a.source]) for a in alg.quiver.arrows])


def regular_module(alg: PathAlgebra) -> Module:
    return direct_sum([projective(alg, v) for v in range(alg.n)]).module


@dataclass(frozen=True)
class DirectSum:
    module: Module
    summands: tuple[Module, ...]
    inclusions: tuple[ModuleMap, ...]
    projections: tuple[ModuleMap, ...]


def direct_sum(mods: Sequence[Module], alg: PathAlgebra | None = None) -> DirectSum:
    if not mods:
        if alg is None:
            raise InputError("empty direct sum needs an algebra")
        z = zero_module(alg)
        return DirectSum(z, (), (), ())
    return _direct_sum_cached(tuple(mods))


@functools.lru_cache(maxsize=4096)
def _direct_sum_cached(mods: tuple[Module, ...]) -> DirectSum:
    alg = mods[0].algebra
    f = alg.field
    q = alg.quiver
    dims = [sum(m.dims[v] for m in mods) for v in range(q.n)]
    maps = [block_diag(f, [m.maps[i] for m in mods]) for i in range(len(q.arrows))]
    total = Module(alg, dims, maps, check=False)
    incs, projs = [], []
    offs = [0] * q.n
    for m in mods:
        ic, pc = [], []
        for v in range(q.n):
            d, D, o = m.dims[v], dims[v], offs[v]
            z, one = f.zero(), f.one()
            ic.append(Matrix(f, D, d, [[one if r == o + c else z for c in range(d)] for r in range(D)]))
            pc.append(Matrix(f, d, D, [[one if c == o + r else z for c in range(D)] for r in range(d)]))
            offs[v] += d
        incs.append(ModuleMap(m, total, ic, check=False))
        projs.append(ModuleMap(total, m, pc, check=False))
    return DirectSum(total, mods, tuple(incs), tuple(projs))


def map_from_blocks(src: DirectSum, tgt: DirectSum, blocks: Sequence[Sequence[ModuleMap | None]]) -> ModuleMap:
    """Assemble a map between direct sums; ``blocks[i][j]`` maps summand j to summand i."""
    acc = zero_map(src.module, tgt.module)
    for i, row in enumerate(blocks):
        for j, b in enumerate(row):
            if b is not None:
                acc = acc + tgt.inclusions[i] @ b @ src.projections[j]
    return acc


def direct_sum_of_maps(maps: Sequence[ModuleMap]) -> ModuleMap:
    s = direct_sum([m.source for m in maps])
    t = direct_sum([m.target for m in maps])
    return map_from_blocks(s, t, [[maps[i] if i == j else None for j in range(len(maps))] for i in range(len(maps))])


def column_map(src: Module, tgt: DirectSum, parts: Sequence[ModuleMap]) -> ModuleMap:
    acc = zero_map(src, tgt.module)
    for inc, p in zip(tgt.inclusions, parts):
        acc = acc + inc @ p
    return acc


def row_map(src: DirectSum, tgt: Module, parts: Sequence[ModuleMap]) -> ModuleMap:
    acc = zero_map(src.module, tgt)
    for proj, p in zip(src.projections, parts):
        acc = acc + p @ proj
    return acc


def power_module(m: Module, k: int) -> Module:
    return direct_sum([m] * k, m.algebra).module


# ---------------------------------------------------------------------------
# Hom spaces


class HomSpace:
    """Basis of Hom(X, Y) with O(1) coordinates.

    The basis comes from ``kernel_basis``; coordinates of any intertwiner are
    read off at the free-variable positions.
    """

    def __init__(self, source: Module, target: Module):
        self.source = source
        self.target = target
        f = source.field
        q = source.algebra.quiver
        X, Y = source, target
        offs, acc = [], 0
        for v in range(q.n):
            offs.append(acc)
            acc += Y.dims[v] * X.dims[v]
        nvars = acc
        rows = []
        p = f.p
        for i, a in enumerate(q.arrows):
            s, t = a.source, a.target
            Xa, Ya = X.maps[i], Y.maps[i]
            for r in range(Y.dims[t]):
                for c in range(X.dims[s]):
                    row = [f.zero()] * nvars
                    # (comp_t X_a)[r, c] = sum_k comp_t[r, k] X_a[k, c]
                    for k in range(X.dims[t]):
                        x = Xa.data[k][c]
                        if x:
                            idx = offs[t] + r * X.dims[t] + k
                            row[idx] = (row[idx] + x) % p if p else row[idx] + x
                    # (Y_a comp_s)[r, c] = sum_k Y_a[r, k] comp_s[k, c]
                    for k in range(Y.dims[s]):
                        y = Ya.data[r][k]
                        if y:
                            idx = offs[s] + k * X.dims[s] + c
                            row[idx] = (row[idx] - y) % p if p else row[idx] - y
                    rows.append(row)
        system = Matrix(f, len(rows), nvars, rows)
        red, pivots, _ = rref(system)
        pivset = set(pivots)
        self.free = [j for j in range(nvars) if j not in pivset]
        kb = kernel_basis(system)
        self.basis: list[ModuleMap] = []
        for col in kb.columns():
            comps = []
            for v in range(q.n):
                base = offs[v]
                dx = X.dims[v]
                comps.append(
                    Matrix(f, Y.dims[v], dx, [col[base + r * dx: base + (r + 1) * dx] for r in range(Y.dims[v])])
                )
            self.basis.append(ModuleMap(X, Y, comps, check=False))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, h: ModuleMap) -> list:
        v = h.vec()
        return [v[j] for j in self.free]

    def combine(self, coeffs: Sequence) -> ModuleMap:
        acc = zero_map(self.source, self.target)
        for c, b in zip(coeffs, self.basis):
            if c:
                acc = acc + b.scale(c)
        return acc


@functools.lru_cache(maxsize=200000)
def hom_space(x: Module, y: Module) -> HomSpace:
    if x.algebra is not y.algebra:
        raise InputError("Hom between modules over different algebras")
    return HomSpace(x, y)


def hom_basis(x: Module, y: Module) -> list[ModuleMap]:
    return list(hom_space(x, y).basis)


def hom_dim(x: Module, y: Module) -> int:
    return hom_space(x, y).dim


def solve_combination(candidates: Sequence[ModuleMap], target: ModuleMap) -> list | None:
    """Coefficients c with sum c_i candidates_i == target, or None."""
    f = target.field
    tv = target.vec()
    if not candidates:
        return [] if not any(tv) else None
    cols = [c.vec() for c in candidates]
    a = Matrix(f, len(tv), len(cols), [[col[i] for col in cols] for i in range(len(tv))])
    b = Matrix(f, len(tv), 1, [[x] for x in tv])
    x = solve(a, b)
    return None if x is None else [r[0] for r in x.data]


def combine(maps: Sequence[ModuleMap], coeffs: Sequence, source: Module, target: Module) -> ModuleMap:
    acc = zero_map(source, target)
    for c, m in zip(coeffs, maps):
        if c:
            acc = acc + m.scale(c)
    return acc


def factor_through(f: ModuleMap, h: ModuleMap) -> ModuleMap | None:
    """Some g with f ∘ g == h (g: source(h) -> source(f)), or None."""
    hs = hom_space(h.source, f.source)
    coeffs = solve_combination([f @ b for b in hs.basis], h)
    return None if coeffs is None else hs.combine(coeffs)


def factor_from(f: ModuleMap, h: ModuleMap) -> ModuleMap | None:
    """Some g with g ∘ f == h (g: target(f) -> target(h)), or None."""
    hs = hom_space(f.target, h.target)
    coeffs = solve_combination([b @ f for b in hs.basis], h)
    return None if coeffs is None else hs.combine(coeffs)


def is_split_mono(f: ModuleMap) -> ModuleMap | None:
    """A retraction r with r ∘ f = id, or None."""
    return factor_from(f, identity_map(f.source))


def is_split_epi(f: ModuleMap) -> ModuleMap | None:
    """A section s with f ∘ s = id, or None."""
    return factor_through(f, identity_map(f.target))


# ---------------------------------------------------------------------------
# Kernels, images, cokernels, pullbacks


def kernel(f: ModuleMap) -> tuple[Module, ModuleMap]:
    X = f.source
    field = X.field
    q = X.algebra.quiver
    K = [kernel_basis(c) for c in f.comps]
    maps = []
    for i, a in enumerate(q.arrows):
        rhs = X.maps[i] @ K[a.source]
        m = solve(K[a.target], rhs)
        maps.append(m if m is not None else Matrix(field, K[a.target].ncols, K[a.source].ncols))
    km = Module(X.algebra, [k.ncols for k in K], maps, check=False)
    return km, ModuleMap(km, X, K, check=False)


def image(f: ModuleMap) -> tuple[Module, ModuleMap, ModuleMap]:
    """Returns (image, epi source->image, mono image->target)."""
    Y = f.target
    q = Y.algebra.quiver
    B = []
    for c in f.comps:
        piv = rref(c)[1]
        B.append(c.submatrix(range(c.nrows), piv))
    maps = []
    for i, a in enumerate(q.arrows):
        m = solve(B[a.target], Y.maps[i] @ B[a.source])
        maps.append(m)
    im = Module(Y.algebra, [b.ncols for b in B], maps, check=False)
    epi = ModuleMap(f.source, im, [solve(b, c) for b, c in zip(B, f.comps)], check=False)
    mono = ModuleMap(im, Y, B, check=False)
    return im, epi, mono


def cokernel(f: ModuleMap) -> tuple[Module, ModuleMap]:
    Y = f.target
    q = Y.algebra.quiver
    Q = [left_kernel(c) for c in f.comps]
    R = [solve(qm, Matrix.identity(Y.field, qm.nrows)) for qm in Q]
    maps = []
    for i, a in enumerate(q.arrows):
        maps.append(Q[a.target] @ Y.maps[i] @ R[a.source])
    cm = Module(Y.algebra, [qm.nrows for qm in Q], maps, check=False)
    return cm, ModuleMap(Y, cm, Q, check=False)


def lift_through_mono(mono: ModuleMap, h: ModuleMap) -> ModuleMap:
    """The unique g with mono ∘ g == h; requires im h ⊆ im mono."""
    comps = []
    for m, c in zip(mono.comps, h.comps):
        g = solve(m, c)
        if g is None:
            raise InputError("map does not factor through the monomorphism")
        comps.append(g)
    return ModuleMap(h.source, mono.source, comps, check=False)


def descend_through_epi(epi: ModuleMap, h: ModuleMap) -> ModuleMap:
    """The unique g with g ∘ epi == h; requires h to vanish on ker epi."""
    comps = []
    for e, c in zip(epi.comps, h.comps):
        g = solve(e.transpose(), c.transpose())
        if g is None:
            raise InputError("map does not descend along the epimorphism")
        comps.append(g.transpose())
    return ModuleMap(epi.target, h.target, comps, check=False)


@dataclass(frozen=True)
class Pullback:
    module: Module
    to_left: ModuleMap   # P -> A
    to_right: ModuleMap  # P -> B


def pullback(a: ModuleMap, b: ModuleMap) -> Pullback:
    """Pullback of A -a-> C <-b- B, computed as ker[a, -b]."""
    if a.target != b.target:
        raise InputError("pullback of maps with different targets")
    s = direct_sum([a.source, b.source])
    diff = row_map(s, a.target, [a, -b])
    km, inc = kernel(diff)
    return Pullback(km, s.projections[0] @ inc, s.projections[1] @ inc)


@dataclass(frozen=True)
class Pushout:
    module: Module
    from_left: ModuleMap
    from_right: ModuleMap


def pushout(a: ModuleMap, b: ModuleMap) -> Pushout:
    """Pushout of A <-a- C -b-> B, computed as coker[a; -b]."""
    s = direct_sum([a.target, b.target])
    diff = column_map(a.source, s, [a, -b])
    cm, q = cokernel(diff)
    return Pushout(cm, q @ s.inclusions[0], q @ s.inclusions[1])


def is_exact_at(f: ModuleMap, g: ModuleMap) -> bool:
    """Pointwise exactness of L -f-> M -g-> N at M, by rank counts."""
    if not (g @ f).is_zero():
        return False
    return all(
        m - rg == rf for m, rf, rg in zip(f.target.dims, f.ranks(), g.ranks())
    )


def is_short_exact(i: ModuleMap, p: ModuleMap) -> bool:
    return i.is_injective() and p.is_surjective() and is_exact_at(i, p)


# ---------------------------------------------------------------------------
# Radical, top, projective covers


def radical_basis(m: Module, v: int) -> Matrix:
    q = m.algebra.quiver
    f = m.field
    cols = [m.maps[i] for i, a in enumerate(q.arrows) if a.target == v and m.maps[i].ncols]
    if not cols:
        return Matrix(f, m.dims[v], 0)
    h = hstack(f, cols)
    piv = rref(h)[1]
    return h.submatrix(range(h.nrows), piv)


def top_lifts(m: Module, v: int) -> list[tuple]:
    """Vectors in M_v whose images form a basis of the top at v."""
    f = m.field
    r = radical_basis(m, v)
    d = m.dims[v]
    h = hstack(f, [r, Matrix.identity(f, d)])
    piv = rref(h)[1]
    out = []
    z, o = f.zero(), f.one()
    for c in piv:
        if c >= r.ncols:
            j = c - r.ncols
            out.append(tuple(o if i == j else z for i in range(d)))
    return out


def map_from_projective(alg: PathAlgebra, v: int, target: Module, element: Sequence) -> ModuleMap:
    """The map P(v) -> target sending e_v to ``element`` in target_v."""
    P = projective(alg, v)
    f = alg.field
    x = Matrix(f, len(element), 1, [[e] for e in element])
    comps = []
    for w in range(alg.n):
        paths = alg.paths_between(v, w)
        cols = [(target.path_action(p) @ x).column(0) for p in paths]
        comps.append(Matrix.from_columns(f, target.dims[w], cols) if cols else Matrix(f, target.dims[w], 0))
    return ModuleMap(P, target, comps, check=False)


@dataclass(frozen=True)
class Cover:
    module: Module
    map: ModuleMap
    vertices: tuple[int, ...]  # vertex of each indecomposable projective summand


def projective_cover(m: Module) -> Cover:
    alg = m.algebra
    parts, maps, verts = [], [], []
    for v in range(alg.n):
        for x in top_lifts(m, v):
            parts.append(projective(alg, v))
            maps.append(map_from_projective(alg, v, m, x))
            verts.append(v)
    ds = direct_sum(parts, alg)
    eps = row_map(ds, m, maps) if parts else zero_map(ds.module, m)
    return Cover(ds.module, eps, tuple(verts))


def projective_resolution(m: Module, length: int) -> list[ModuleMap]:
    """Maps [d^{-k}, ..., d^{-1}, eps] with P^0 -eps-> m, stopping at a zero syzygy."""
    cov = projective_cover(m)
    out = [cov.map]
    current = cov.map
    for _ in range(length):
        km, inc = kernel(current)
        if km.is_zero():
            break
        c = projective_cover(km)
        d = inc @ c.map
        out.insert(0, d)
        current = d
    return out


def is_projective(m: Module) -> bool:
    return projective_cover(m).module.dims == m.dims


# ---------------------------------------------------------------------------
# Ext^1


@dataclass
class Ext1:
    source: Module          # X in Ext^1(X, Y)
    target: Module          # Y
    syzygy: Module
    syzygy_inclusion: ModuleMap   # Omega -> P0
    cover: ModuleMap              # P0 -> X
    hom_syzygy: HomSpace          # Hom(Omega, Y)
    representatives: list[ModuleMap]  # cocycle basis inside Hom(Omega, Y)
    boundary_rank: int

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def cocycle(self, coeffs: Sequence) -> ModuleMap:
        return combine(self.representatives, coeffs, self.syzygy, self.target)

    def extension(self, coeffs: Sequence) -> tuple[Module, ModuleMap, ModuleMap]:
        """Middle term of the class: returns (E, Y -> E, E -> X)."""
        phi = self.cocycle(coeffs)
        po = pushout(phi, self.syzygy_inclusion)
        i = po.from_left
        p = descend_through_epi(
            _pushout_quotient(phi, self.syzygy_inclusion, po),
            row_map(direct_sum([self.target, self.cover.source]), self.source,
                    [zero_map(self.target, self.source), self.cover]),
        )
        return po.module, i, p

    def class_of(self, cocycle: ModuleMap) -> list:
        """Coordinates of a cocycle Omega -> Y modulo boundaries."""
        cands = list(self.representatives) + self._boundaries()
        coeffs = solve_combination(cands, cocycle)
        if coeffs is None:
            raise InputError("not a cocycle")
        return coeffs[: self.dim]

    def _boundaries(self) -> list[ModuleMap]:
        return [g @ self.syzygy_inclusion for g in hom_basis(self.cover.source, self.target)]


def _pushout_quotient(phi: ModuleMap, inc: ModuleMap, po: Pushout) -> ModuleMap:
    s = direct_sum([phi.target, inc.target])
    return row_map(s, po.module, [po.from_left, po.from_right])


@functools.lru_cache(maxsize=20000)
def ext1(x: Module, y: Module) -> Ext1:
    cov = projective_cover(x)
    om, inc = kernel(cov.map)
    hs = hom_space(om, y)
    f = x.field
    bounds = [hs.coords(g @ inc) for g in hom_basis(cov.module, y)]
    if bounds and hs.dim:
        red, piv, rank = rref(Matrix(f, len(bounds), hs.dim, bounds))
    else:
        piv, rank = [], 0
    reps = [hs.basis[j] for j in range(hs.dim) if j not in set(piv)]
    return Ext1(x, y, om, inc, cov.map, hs, reps, rank)


def ext1_dim(x: Module, y: Module) -> int:
    return ext1(x, y).dim


# ---------------------------------------------------------------------------
# Krull-Schmidt decomposition


def _eigenvalues(m: Matrix) -> list:
    if m.nrows == 0:
        return []
    return roots_in_field(m.field, char_poly(m))


def _is_nilpotent(phi: ModuleMap) -> bool:
    n = phi.source.total_dim
    return phi.power(max(n, 1)).is_zero()


@dataclass(frozen=True)
class Summand:
    module: Module
    inclusion: ModuleMap
    projection: ModuleMap


def decompose_with_maps(m: Module) -> list[Summand]:
    """Indecomposable summands with inclusions/projections summing to the identity."""
    return list(_decompose_cached(m))


def decompose(m: Module) -> list[Module]:
    return [s.module for s in _decompose_cached(m)]


@functools.lru_cache(maxsize=20000)
def _decompose_cached(m: Module) -> tuple[Summand, ...]:
    if m.is_zero():
        return ()
    split = _find_split(m)
    if split is None:
        return (Summand(m, identity_map(m), identity_map(m)),)
    (k_mod, k_inc), (i_mod, i_inc) = split
    s = direct_sum([k_mod, i_mod])
    iso = row_map(s, m, [k_inc, i_inc])  # K ⊕ I -> M, invertible
    inv = iso.inverse()
    out = []
    for part, inc, proj in ((k_mod, k_inc, s.projections[0] @ inv), (i_mod, i_inc, s.projections[1] @ inv)):
        for sub in _decompose_cached(part):
            out.append(Summand(sub.module, inc @ sub.inclusion, sub.projection @ proj))
    return tuple(out)


def _fitting_split(phi: ModuleMap):
    n = phi.source.total_dim
    pw = phi.power(n)
    if pw.is_zero() or pw.is_injective():
        return None
    return kernel(pw), image(pw)[::2]


def _find_split(m: Module):
    basis = hom_basis(m, m)
    ident = identity_map(m)
    cands = list(basis)
    for a, b in itertools.combinations(basis, 2):
        cands.append(a + b)
    for phi in cands:
        for lam in _eigenvalues(phi.total_matrix()):
            psi = phi - ident.scale(lam) if lam else phi
            sp = _fitting_split(psi)
            if sp is not None:
                (km, kinc), (im, iinc) = sp
                return (km, kinc), (im, iinc)
    _check_local(m, basis, ident)
    return None


def _check_local(m: Module, basis: list[ModuleMap], ident: ModuleMap):
    """Certify End(m) = k·id ⊕ (nilpotent ideal); otherwise the field is too small."""
    f = m.field
    nil = []
    for phi in basis:
        ev = _eigenvalues(phi.total_matrix())
        if len(ev) != 1:
            raise SplittingFieldError(
                "splitting field insufficient: an endomorphism has no eigenvalue in the ground field"
            )
        psi = phi - ident.scale(ev[0])
        if not _is_nilpotent(psi):
            raise SplittingFieldError("splitting field insufficient")
        nil.append(psi)
    # the radical candidate must be closed under products
    vecs = [x.vec() for x in nil]
    r0 = rank_of_rows(f, vecs, len(ident.vec())) if vecs else 0
    for a in nil:
        for b in nil:
            prod = (a @ b).vec()
            if rank_of_rows(f, vecs + [prod], len(prod)) != r0:
                raise SplittingFieldError("splitting field insufficient: radical candidate not closed")


@functools.lru_cache(maxsize=20000)
def residue_functional(t: Module) -> tuple:
    """For indecomposable t: per End(t) basis element, its residue in End(t)/rad ≅ k."""
    basis = hom_basis(t, t)
    out = []
    for phi in basis:
        ev = _eigenvalues(phi.total_matrix())
        if len(ev) != 1:
            raise SplittingFieldError("splitting field insufficient: endomorphism ring is not split local")
        out.append(ev[0])
    return tuple(out)


def residue(t: Module, phi: ModuleMap) -> object:
    hs = hom_space(t, t)
    f = t.field
    res = residue_functional(t)
    acc = f.zero()
    for c, r in zip(hs.coords(phi), res):
        acc = acc + c * r
    return acc % f.p if f.p else acc


def multiplicity(t: Module, x: Module) -> int:
    """Multiplicity of the indecomposable t as a direct summand of x.

    Rank of the pairing Hom(t, x) x Hom(x, t) -> End(t)/rad End(t).
    """
    a = hom_basis(t, x)
    b = hom_basis(x, t)
    if not a or not b:
        return 0
    f = t.field
    rows = [[residue(t, psi @ phi) for psi in b] for phi in a]
    return Matrix(f, len(a), len(b), rows).rank()


def _nonnilpotent_pair(x: Module, y: Module) -> ModuleMap | None:
    for phi in hom_basis(x, y):
        for psi in hom_basis(y, x):
            if not _is_nilpotent(psi @ phi):
                return phi
    return None


def indecomposables_isomorphic(x: Module, y: Module) -> ModuleMap | None:
    """An isomorphism between indecomposables x and y, or None."""
    if x.dims != y.dims:
        return None
    if x == y:
        return identity_map(x)
    phi = _nonnilpotent_pair(x, y)
    if phi is None or not phi.is_iso():
        return None
    return phi


def find_isomorphism(x: Module, y: Module) -> ModuleMap | None:
    if x.algebra is not y.algebra or x.dims != y.dims:
        return None
    if x == y:
        return identity_map(x)
    if hom_dim(x, y) != hom_dim(y, y) or hom_dim(y, x) != hom_dim(x, x):
        return None
    xs = decompose_with_maps(x)
    ys = decompose_with_maps(y)
    if len(xs) != len(ys):
        return None
    used = [False] * len(ys)
    acc = zero_map(x, y)
    for sx in xs:
        for j, sy in enumerate(ys):
            if used[j]:
                continue
            iso = indecomposables_isomorphic(sx.module, sy.module)
            if iso is not None:
                used[j] = True
                acc = acc + sy.inclusion @ iso @ sx.projection
                break
        else:
            return None
    return acc


def is_isomorphic(x: Module, y: Module) -> bool:
    return find_isomorphism(x, y) is not None


def is_indecomposable(m: Module) -> bool:
    return len(decompose(m)) == 1


# ---------------------------------------------------------------------------
# Duality D = Hom_k(-, k): mod A -> mod A^op


def opposite_algebra(alg: PathAlgebra) -> PathAlgebra:
    op = alg.__dict__.get("_opposite")
    if op is None:
        op = alg.opposite()
        alg.__dict__["_opposite"] = op
        op.__dict__["_opposite"] = alg
    return op


@functools.lru_cache(maxsize=None)
def dual_module(m: Module) -> Module:
    op = opposite_algebra(m.algebra)
    return Module(op, m.dims, [a.transpose() for a in m.maps], check=False)


def dual_map(f: ModuleMap) -> ModuleMap:
    return ModuleMap(dual_module(f.target), dual_module(f.source), [c.transpose() for c in f.comps], check=False)


# ---------------------------------------------------------------------------
# Enumeration of indecomposables (representation-finite inputs)


class RepresentationInfiniteError(RuntimeError):
    pass


def enumerate_indecomposables(alg: PathAlgebra, max_dim: int = 40, max_count: int = 200) -> list[Module]:
    """All indecomposables, found by closing the simples under extensions.

    Each round takes non-split extensions between known indecomposables and
    keeps the new indecomposable summands of the middle terms.  Raises when
    the dimension or count cap is hit (likely representation-infinite).
    """
    known: list[Module] = [simple(alg, v) for v in range(alg.n)]
    frontier = list(known)
    f = alg.field
    while frontier:
        new: list[Module] = []
        pool = list(known)
        for a in pool:
            for b in pool:
                if a not in frontier and b not in frontier:
                    continue
                e = ext1(a, b)
                if not e.dim:
                    continue
                classes = [[f.one() if i == j else f.zero() for i in range(e.dim)] for j in range(e.dim)]
                if e.dim > 1:
                    classes.append([f.one()] * e.dim)
                for cls in classes:
                    mid, _, _ = e.extension(cls)
                    if mid.total_dim > max_dim:
                        raise RepresentationInfiniteError("dimension cap exceeded while enumerating indecomposables")
                    for s in decompose(mid):
                        if not any(is_isomorphic(s, k) for k in known + new):
                            new.append(s)
        if len(known) + len(new) > max_count:
            raise RepresentationInfiniteError("indecomposable count cap exceeded")
        known.extend(new)
        frontier = new
    known.sort(key=lambda m: (m.total_dim, [-d for d in m.dims]))
    return known
