"""Finitely presented functors on add(T), effaceability and the resolving completion.

A functor is stored as a presentation f: M -> N and means coker Hom(-, f).
Everything is computed by evaluating on the generators of E.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .complexes import NO, UNKNOWN, YES, Complex, Verdict
from .exact import SPLIT, ExactSubcat, approximation, is_deflation, is_mono_in_E
from .linalg import InputError, Matrix, _rref_rows, kernel_basis
from .modules import (
    Module,
    ModuleMap,
    decompose_with_maps,
    direct_sum,
    factor_through,
    hom_basis,
    hom_space,
    identity_map,
    image,
    is_isomorphic,
    kernel,
    projective_resolution,
    pullback,
    residue_functional,
    row_map,
    zero_map,
    zero_module,
)
from .quiver import Path, PathAlgebra, Quiver, build_path_algebra


class _Quotient:
    """V / S for V = k^d with S spanned by ``rows``; coordinates on a fixed complement."""

    def __init__(self, field, d: int, rows: Sequence[Sequence]):
        self.field = field
        self.d = d
        work = [list(r) for r in rows]
        self.pivots = _rref_rows(field, work, d)
        self.rows = work[: len(self.pivots)]
        pset = set(self.pivots)
        self.free = [j for j in range(d) if j not in pset]

    @property
    def dim(self) -> int:
        return len(self.free)

    def reduce(self, v: Sequence) -> list:
        f = self.field
        p = f.p
        v = list(v)
        for piv, row in zip(self.pivots, self.rows):
            c = v[piv]
            if c:
                v = [(x - c * y) % p if p else x - c * y for x, y in zip(v, row)]
        return v

    def coords(self, v: Sequence) -> list:
        r = self.reduce(v)
        return [r[j] for j in self.free]

    def lift(self, coords: Sequence) -> list:
        v = [self.field.zero()] * self.d
        for j, c in zip(self.free, coords):
            v[j] = c
        return v


@dataclass
class Evaluation:
    """F(A) = Hom(A, N) / f Hom(A, M), with a basis of representatives."""
    module: Module
    dim: int
    basis: list[ModuleMap]
    quotient: _Quotient = dc_field(repr=False)

    def coords(self, h: ModuleMap) -> list:
        return self.quotient.coords(hom_space(self.module, h.target).coords(h))


class FpFunctor:
    """coker Hom(-, f) for a presentation f: M -> N in E."""

    def __init__(self, presentation: ModuleMap, e: ExactSubcat, check: bool = True):
        self.presentation = presentation
        self.e = e
        if check:
            for label, m in (("source", presentation.source), ("target", presentation.target)):
                if not e.contains(m):
                    raise InputError(f"presentation {label} is not in {e.name}")
        self._evals: dict = {}

    @classmethod
    def representable(cls, m: Module, e: ExactSubcat) -> "FpFunctor":
        return cls(zero_map(zero_module(m.algebra), m), e)

    @property
    def top(self) -> Module:
        return self.presentation.target

    def __repr__(self) -> str:
        f = self.presentation
        return f"FpFunctor({f.source.dims} -> {f.target.dims})"

    def evaluate(self, a: Module) -> Evaluation:
        key = a
        hit = self._evals.get(key)
        if hit is not None:
            return hit
        f = self.presentation
        hn = hom_space(a, f.target)
        rows = [hn.coords(f @ b) for b in hom_basis(a, f.source)]
        q = _Quotient(a.field, hn.dim, rows)
        basis = [hn.combine(q.lift([a.field.one() if i == j else a.field.zero() for i in range(q.dim)]))
                 for j in range(q.dim)]
        ev = Evaluation(a, q.dim, basis, q)
        self._evals[key] = ev
        return ev

    def dims(self) -> tuple[int, ...]:
        return tuple(self.evaluate(g).dim for g in self.e.generators)

    def is_zero(self) -> bool:
        return not any(self.dims())

    def action(self, phi: ModuleMap) -> Matrix:
        """F(phi): F(B) -> F(A) for phi: A -> B, as a matrix in the evaluation bases."""
        src = self.evaluate(phi.target)
        tgt = self.evaluate(phi.source)
        cols = [tgt.coords(h @ phi) for h in src.basis]
        return Matrix.from_columns(phi.field, tgt.dim, cols)


class FunctorMap:
    """Natural transformation coker Hom(-, f) -> coker Hom(-, f') induced by top: N -> N'."""

    def __init__(self, source: FpFunctor, target: FpFunctor, top: ModuleMap, check: bool = True):
        self.source = source
        self.target = target
        self.top = top
        if check:
            if top.source != source.top or top.target != target.top:
                raise InputError("functor map has the wrong endpoints")
            if factor_through(target.presentation, top @ source.presentation) is None:
                raise InputError("top map does not descend to the cokernel functors")

    def at(self, a: Module) -> Matrix:
        src = self.source.evaluate(a)
        tgt = self.target.evaluate(a)
        cols = [tgt.coords(self.top @ h) for h in src.basis]
        return Matrix.from_columns(a.field, tgt.dim, cols)

    def __matmul__(self, other: "FunctorMap") -> "FunctorMap":
        return FunctorMap(other.source, self.target, self.top @ other.top, check=False)

    def is_zero(self) -> bool:
        return all(self.at(g).is_zero() for g in self.source.e.generators)

    def is_iso(self) -> bool:
        for g in self.source.e.generators:
            m = self.at(g)
            if m.nrows != m.ncols or m.rank() != m.nrows:
                return False
        return True


def identity_functor_map(F: FpFunctor) -> FunctorMap:
    return FunctorMap(F, F, identity_map(F.top), check=False)


def is_short_exact_functors(alpha: FunctorMap, beta: FunctorMap) -> bool:
    """0 -> E -> F -> G -> 0 exact after evaluation on every generator."""
    if alpha.target is not beta.source and alpha.target.presentation != beta.source.presentation:
        return False
    for g in alpha.source.e.generators:
        a, b = alpha.at(g), beta.at(g)
        if a.rank() != a.ncols or b.rank() != b.nrows:
            return False
        if not (b @ a).is_zero():
            return False
        if a.ncols + b.nrows != a.nrows:
            return False
    return True


def natural_maps(F: FpFunctor, G: FpFunctor) -> list[ModuleMap]:
    """Basis of tops u: N_F -> N_G that descend, i.e. u f_F factors through f_G.

    Tops differing by something factoring through f_G give the same map; the
    basis is not reduced modulo those.
    """
    f = F.presentation
    hs = hom_space(F.top, G.top)
    if not hs.dim:
        return []
    ev = G.evaluate(f.source)
    cols = [ev.coords(u @ f) for u in hs.basis]
    if not ev.dim:
        return list(hs.basis)
    mat = Matrix.from_columns(f.field, ev.dim, cols)
    return [hs.combine(list(c)) for c in kernel_basis(mat).columns()]


def find_functor_iso(F: FpFunctor, G: FpFunctor, seed: int = 0, tries: int = 400) -> tuple[FunctorMap, FunctorMap] | None:
    """An isomorphism F -> G with its inverse, by sampling natural maps.

    Returns None when the evaluation dimensions differ or no sample is
    invertible within ``tries``.
    """
    if F.dims() != G.dims():
        return None
    basis = natural_maps(F, G)
    field = F.top.field
    rng = random.Random(seed)
    candidates = []
    if len(basis) == 1:
        candidates.append([field.one()])
    for _ in range(tries):
        candidates.append([field(rng.randrange(field.p)) if field.p else field(rng.randint(-3, 3)) for _ in basis])
    for coeffs in candidates:
        u = zero_map(F.top, G.top)
        for c, b in zip(coeffs, basis):
            if c:
                u = u + b.scale(c)
        phi = FunctorMap(F, G, u, check=False)
        if not phi.is_iso():
            continue
        v = _inverse_top(phi)
        if v is not None:
            return phi, v
    return None


def _inverse_top(phi: FunctorMap) -> FunctorMap | None:
    """v with v u = id modulo f_F and v descending; linear once u is fixed."""
    F, G = phi.source, phi.target
    field = phi.top.field
    basis = natural_maps(G, F)
    # v u - id must factor through f_F: evaluate in F(N_F)
    ev = F.evaluate(F.top)
    target = ev.coords(identity_map(F.top))
    cols = [ev.coords(v @ phi.top) for v in basis]
    if not ev.dim:
        return FunctorMap(G, F, basis[0].scale(0) if basis else zero_map(G.top, F.top), check=False)
    from .linalg import solve_vector
    mat = Matrix.from_columns(field, ev.dim, cols) if cols else Matrix.zeros(field, ev.dim, 0)
    x = solve_vector(mat, target) if cols else None
    if x is None:
        return None
    v = zero_map(G.top, F.top)
    for c, b in zip(x, basis):
        if c:
            v = v + b.scale(c)
    return FunctorMap(G, F, v, check=False)


# ---------------------------------------------------------------------------
# Radical maps and minimal approximations


def radical_maps(e: ExactSubcat, i: int, j: int) -> list[ModuleMap]:
    """Basis of rad(T_i, T_j): everything for i != j, the non-invertible part of End(T_i) otherwise."""
    ti, tj = e.generators[i], e.generators[j]
    hb = hom_basis(ti, tj)
    if i != j:
        return list(hb)
    res = residue_functional(ti)
    k = next((m for m, r in enumerate(res) if r), None)
    if k is None:
        return list(hb)
    f = ti.field
    inv = f.inv(res[k])
    return [hb[m] - hb[k].scale(res[m] * inv) for m in range(len(hb)) if m != k]


def _complement_maps(space, spanning: Sequence[ModuleMap]) -> list[ModuleMap]:
    """Maps in ``space`` whose classes form a basis of space / span(spanning)."""
    field = space.source.field
    q = _Quotient(field, space.dim, [space.coords(m) for m in spanning])
    out = []
    for j in range(q.dim):
        unit = [field.one() if t == j else field.zero() for t in range(q.dim)]
        out.append(space.combine(q.lift(unit)))
    return out


def minimal_approximation(e: ExactSubcat, k: Module) -> ModuleMap:
    """Right-minimal map B -> k from add(T) through which every map from E factors."""
    gens = e.generators
    parts, maps = [], []
    for i, ti in enumerate(gens):
        rad_images = []
        for j, tj in enumerate(gens):
            for h in hom_basis(tj, k):
                for r in radical_maps(e, i, j):
                    rad_images.append(h @ r)
        for h in _complement_maps(hom_space(ti, k), rad_images):
            parts.append(ti)
            maps.append(h)
    ds = direct_sum(parts, e.algebra)
    if not parts:
        return zero_map(ds.module, k)
    return row_map(ds, k, maps)


def is_radical_map(g: ModuleMap) -> bool:
    """No component between indecomposable summands is invertible."""
    for sa in decompose_with_maps(g.source):
        for sb in decompose_with_maps(g.target):
            c = sb.projection @ g @ sa.inclusion
            if sa.module.dims == sb.module.dims and c.is_iso():
                return False
    return True


# ---------------------------------------------------------------------------
# Transport to modules over End(T)^op


@dataclass
class Transport:
    """Γ = End(T)^op as a bound quiver algebra; arrow k goes j -> i for phi_k: T_i -> T_j."""
    e: ExactSubcat
    gamma: PathAlgebra
    arrows: list[tuple[int, int, ModuleMap]]

    def functor_to_module(self, F: FpFunctor) -> Module:
        dims = F.dims()
        maps = [F.action(phi) for _, _, phi in self.arrows]
        return Module(self.gamma, dims, maps)

    def representable(self, i: int) -> Module:
        return self.functor_to_module(FpFunctor.representable(self.e.generators[i], self.e))


def irreducible_maps(e: ExactSubcat, i: int, j: int) -> list[ModuleMap]:
    """Representatives of a basis of rad(T_i, T_j) / rad^2(T_i, T_j)."""
    rad2 = []
    for k in range(len(e.generators)):
        for phi in radical_maps(e, i, k):
            for psi in radical_maps(e, k, j):
                rad2.append(psi @ phi)
    ti, tj = e.generators[i], e.generators[j]
    hs = hom_space(ti, tj)
    rad = radical_maps(e, i, j)
    field = ti.field
    q = _Quotient(field, hs.dim, [hs.coords(m) for m in rad2])
    rows = [list(r) for r in q.rows]
    out = []
    from .linalg import rank_of_rows
    r0 = len(rows)
    for m in rad:
        trial = rows + [hs.coords(m)]
        r1 = rank_of_rows(field, trial, hs.dim)
        if r1 > r0:
            out.append(m)
            rows, r0 = trial, r1
    return out


def end_transport(e: ExactSubcat) -> Transport:
    hit = e._flags.get("transport")
    if hit is not None:
        return hit
    gens = e.generators
    n = len(gens)
    field = e.field
    arrows = []
    named = []
    for i in range(n):
        for j in range(n):
            for phi in irreducible_maps(e, i, j):
                k = len(arrows)
                arrows.append((i, j, phi))
                named.append((f"x{k}", str(j + 1), str(i + 1)))
    quiver = Quiver.build([str(v + 1) for v in range(n)], named)

    def value(path_arrows) -> ModuleMap:
        acc = None
        for k in path_arrows:
            phi = arrows[k][2]
            acc = phi if acc is None else acc @ phi
        return acc

    # layer-by-layer until every path of the top layer is zero
    layers = [[(k,) for k in range(len(arrows))]]
    while layers[-1]:
        nxt = []
        for p in layers[-1]:
            end = arrows[p[-1]][0]
            for k, (_, j, _) in enumerate(arrows):
                if j == end:
                    nxt.append(p + (k,))
        if all(value(p).is_zero() for p in nxt):
            layers.append(nxt)
            break
        layers.append(nxt)
    relations = []
    longest = len(layers)
    by_ends: dict = {}
    for layer in layers[1:]:
        for p in layer:
            s, t = arrows[p[0]][1], arrows[p[-1]][0]
            by_ends.setdefault((s, t), []).append(p)
    for (s, t), paths in by_ends.items():
        hs = hom_space(gens[t], gens[s])
        cols = [hs.coords(value(p)) for p in paths]
        mat = Matrix.from_columns(field, hs.dim, cols) if hs.dim else Matrix.zeros(field, 0, len(paths))
        for c in kernel_basis(mat).columns():
            rel = {Path(s, t, p): x for p, x in zip(paths, c) if x}
            if rel:
                relations.append(rel)
    gamma = build_path_algebra(quiver, relations, field, max_path_length=longest + 1)
    out = Transport(e, gamma, arrows)
    e._flags["transport"] = out
    return out


def projective_dimension(m: Module, bound: int = 16) -> int | None:
    """pd via minimal projective resolutions; None when it exceeds ``bound``."""
    if m.is_zero():
        return -1
    res = projective_resolution(m, bound + 1)
    km, _ = kernel(res[0])
    if km.is_zero():
        return len(res) - 1
    return None


# ---------------------------------------------------------------------------
# Effaceability and fractions


def _killing_deflation(F: FpFunctor, h: ModuleMap) -> ModuleMap | None:
    """An E-deflation p: B -> A with F(p)[h] = 0, for h: A -> N.

    Every candidate factors through the pullback of f along h, and add(T) is
    idempotent complete, so the universal approximation of that pullback
    decides the question.
    """
    e = F.e
    a_mod = h.source
    if factor_through(F.presentation, h) is not None:
        return identity_map(a_mod)
    if e.structure == SPLIT:
        return None
    pb = pullback(h, F.presentation)
    p = pb.to_left @ approximation(e, pb.module)
    return p if is_deflation(p, e) else None


def _effaceable_elements(F: FpFunctor, elements) -> Verdict:
    witnesses = []
    for idx, h in elements:
        p = _killing_deflation(F, h)
        if p is None:
            return Verdict(NO, f"an element of F(T_{idx}) survives every deflation", (idx, h))
        witnesses.append((idx, p))
    return Verdict(YES, "every element is killed by a deflation", witnesses)


def is_effaceable(F: FpFunctor, e: ExactSubcat | None = None) -> Verdict:
    e = F.e if e is None else e
    if F.is_zero():
        return Verdict(YES, "zero functor", [])
    if e.structure == SPLIT:
        return Verdict(NO, "split structure: only the zero functor is effaceable", F.dims())
    elements = [(i, h) for i, g in enumerate(e.generators) for h in F.evaluate(g).basis]
    return _effaceable_elements(F, elements)


def cokernel_functor(alpha: FunctorMap) -> FpFunctor:
    G = alpha.target
    s = direct_sum([G.presentation.source, alpha.source.top])
    pres = row_map(s, G.top, [G.presentation, alpha.top])
    return FpFunctor(pres, G.e, check=False)


@dataclass
class FractionVerdict:
    invertible: bool | None
    kernel: Verdict
    cokernel: Verdict


def fraction_invertible(alpha: FunctorMap) -> FractionVerdict:
    """alpha becomes invertible modulo effaceables iff its kernel and cokernel are effaceable."""
    F = alpha.source
    e = F.e
    elements = []
    for i, g in enumerate(e.generators):
        m = alpha.at(g)
        ev = F.evaluate(g)
        for col in kernel_basis(m).columns():
            h = zero_map(g, F.top)
            for c, b in zip(col, ev.basis):
                if c:
                    h = h + b.scale(c)
            elements.append((i, h))
    if not elements:
        kv = Verdict(YES, "zero kernel", [])
    elif e.structure == SPLIT:
        kv = Verdict(NO, "split structure: nonzero kernel", elements[0])
    else:
        kv = _effaceable_elements(F, elements)
    cv = is_effaceable(cokernel_functor(alpha))
    if kv.yes and cv.yes:
        inv = True
    elif kv.no or cv.no:
        inv = False
    else:
        inv = None
    return FractionVerdict(inv, kv, cv)


@dataclass
class Fraction:
    """alpha ∘ s^{-1} with s invertible modulo effaceables."""
    s: FunctorMap
    alpha: FunctorMap

    def __post_init__(self):
        if self.s.source is not self.alpha.source:
            raise InputError("a roof needs a common source")
        if fraction_invertible(self.s).invertible is not True:
            raise InputError("the backward leg is not invertible modulo effaceables")


# ---------------------------------------------------------------------------
# Completions


@dataclass(frozen=True)
class CompletionDescriptor:
    kind: str          # "R", "Rb", "Rn", "Qlcat"
    n: int | None = None

    def __post_init__(self):
        if self.kind not in ("R", "Rb", "Rn", "Qlcat"):
            raise InputError(f"unknown completion {self.kind!r}")
        if self.kind == "Rn" and (self.n is None or self.n < 1):
            raise InputError("Rn needs n >= 1")

    @classmethod
    def parse(cls, text: str) -> "CompletionDescriptor":
        t = text.strip()
        if t in ("R", "Rb", "Qlcat"):
            return cls(t)
        if t.startswith("R") and t[1:].isdigit():
            return cls("Rn", int(t[1:]))
        raise InputError(f"unknown completion {text!r}")


@dataclass
class MembershipResult:
    status: str
    detail: str
    resolution: object = None      # Complex
    length: int | None = None
    depth: int = 0
    full: bool = False


def weak_kernel_resolution(F: FpFunctor, depth: int = 8) -> tuple[Complex, str]:
    """Left Hom-acyclic resolution from the presentation using minimal approximations.

    Returns the complex and how it ended: "terminated", "periodic" (a kernel
    repeats up to isomorphism) or "truncated".
    """
    e = F.e
    f = F.presentation
    terms = {0: f.target, -1: f.source}
    diffs = {-1: f}
    seen: list[Module] = []
    k = -1
    d = f
    how = "truncated"
    while True:
        km, inc = kernel(d)
        pi = minimal_approximation(e, km)
        if pi.source.is_zero():
            how = "terminated"
            break
        if any(km.dims == s.dims and is_isomorphic(km, s) for s in seen):
            how = "periodic"
            break
        seen.append(km)
        if -k >= depth:
            break
        d = inc @ pi
        terms[k - 1] = d.source
        diffs[k - 1] = d
        k -= 1
    return Complex(e.algebra, terms, diffs, check=False), how


def is_left_admissible(f: ModuleMap, e: ExactSubcat) -> bool:
    """f = mono ∘ deflation with the image in E."""
    im, epi, mono = image(f)
    if not e.contains(im):
        return False
    return bool(is_deflation(epi, e)) and is_mono_in_E(mono, e)


def membership_completion(F: FpFunctor, which: CompletionDescriptor | str, e: ExactSubcat | None = None,
                          depth: int = 8) -> MembershipResult:
    if isinstance(which, str):
        which = CompletionDescriptor.parse(which)
    e = F.e if e is None else e
    if which.kind == "Qlcat":
        return MembershipResult(YES, "every finitely presented functor is an object of the quotient", full=True)
    if which.kind == "Rn" and which.n == 1:
        ok = is_left_admissible(F.presentation, e)
        return MembershipResult(YES if ok else NO,
                                "presentation is left admissible" if ok else "presentation is not left admissible",
                                full=True)
    x, how = weak_kernel_resolution(F, depth)
    length = -x.lo if how == "terminated" else None
    if which.kind == "R":
        full = how != "truncated"
        detail = "weak-kernel resolution" + ("" if full else f" (member up to depth {depth})")
        return MembershipResult(YES, detail, x, length, depth, full)
    limit = which.n if which.kind == "Rn" else None
    if how == "terminated" and (limit is None or length <= limit):
        return MembershipResult(YES, f"bounded resolution of length {length}", x, length, depth, True)
    minimal = all(is_radical_map(x.diff(n)) for n in range(x.lo, -1))
    if e.structure == SPLIT and how == "periodic":
        return MembershipResult(NO, "syzygies repeat: infinite projective dimension", x, None, depth, True)
    if e.structure == SPLIT and how == "terminated" and minimal:
        return MembershipResult(NO, f"minimal resolution has length {length} > {limit}", x, length, depth, True)
    return MembershipResult(UNKNOWN, f"no bounded resolution found ({how} at depth {depth})", x, length, depth)


def generating_conflation(x: Complex, e: ExactSubcat) -> tuple[FpFunctor, FpFunctor, FpFunctor, FunctorMap, FunctorMap]:
    """coker Y(d^{-2}) -> Y(X^0) -> coker Y(d^{-1}) read off a resolution."""
    K = FpFunctor(x.diff(-2), e, check=False)
    P = FpFunctor.representable(x.term(0), e)
    F = FpFunctor(x.diff(-1), e, check=False)
    return K, P, F, FunctorMap(K, P, x.diff(-1), check=False), FunctorMap(P, F, identity_map(x.term(0)), check=False)
