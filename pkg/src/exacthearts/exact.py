"""Additive subcategories add(T) of mod A with the split or the induced exact structure."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .linalg import Field, InputError, Matrix, solve_vector
from .modules import (
    Module,
    ModuleMap,
    RepresentationInfiniteError,
    cokernel,
    decompose,
    direct_sum,
    dual_module,
    enumerate_indecomposables,
    hom_basis,
    hom_space,
    identity_map,
    is_isomorphic,
    is_split_epi,
    is_split_mono,
    kernel,
    multiplicity,
    opposite_algebra,
    projective,
    injective,
    row_map,
)
from .quiver import PathAlgebra

SPLIT = "split"
INDUCED = "induced"


class ExactSubcat:
    """add(T) for a list of pairwise non-isomorphic indecomposables T_i."""

    def __init__(
        self,
        algebra: PathAlgebra,
        generators: Sequence[Module],
        structure: str = INDUCED,
        kernel_dim_bound: int | None = None,
        multiplicity_bound: int = 2,
        name: str = "E",
        check: bool = True,
    ):
        if structure not in (SPLIT, INDUCED):
            raise InputError(f"unknown exact structure {structure!r}")
        self.algebra = algebra
        self.generators = tuple(generators)
        self.structure = structure
        self.kernel_dim_bound = kernel_dim_bound
        self.multiplicity_bound = multiplicity_bound
        self.name = name
        self._members: dict = {}
        self._flags: dict = {}
        for g in self.generators:
            if g.algebra is not algebra:
                raise InputError("generator over a different algebra")
        if check:
            for i, g in enumerate(self.generators):
                if g.is_zero() or len(decompose(g)) != 1:
                    raise InputError(f"generator {i} of {name} is not indecomposable")
            for a, b in itertools.combinations(self.generators, 2):
                if is_isomorphic(a, b):
                    raise InputError(f"generators of {name} must be pairwise non-isomorphic")

    def __hash__(self) -> int:
        return id(self)

    def __eq__(self, other) -> bool:
        return self is other

    def __repr__(self) -> str:
        return f"ExactSubcat({self.name}, {len(self.generators)} generators, {self.structure})"

    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def T(self) -> Module:
        return direct_sum(self.generators, self.algebra).module

    def membership(self, x: Module) -> tuple[int, ...] | None:
        hit = self._members.get(x, False)
        if hit is not False:
            return hit
        mus = tuple(multiplicity(t, x) for t in self.generators)
        total = [sum(m * t.dims[v] for m, t in zip(mus, self.generators)) for v in range(self.algebra.n)]
        out = mus if tuple(total) == x.dims else None
        self._members[x] = out
        return out

    def contains(self, x: Module) -> bool:
        return self.membership(x) is not None

    def object(self, mults: Sequence[int]) -> Module:
        parts = [g for g, m in zip(self.generators, mults) for _ in range(m)]
        return direct_sum(parts, self.algebra).module

    def opposite(self) -> "ExactSubcat":
        op = self._flags.get("opposite")
        if op is None:
            op = ExactSubcat(
                opposite_algebra(self.algebra),
                [dual_module(g) for g in self.generators],
                self.structure,
                self.kernel_dim_bound,
                self.multiplicity_bound,
                name=self.name + "^op",
                check=False,
            )
            op._flags["opposite"] = self
            self._flags["opposite"] = op
        return op

    def contains_projectives(self) -> bool:
        return all(self.contains(projective(self.algebra, v)) for v in range(self.algebra.n))

    def contains_injectives(self) -> bool:
        return all(self.contains(injective(self.algebra, v)) for v in range(self.algebra.n))

    def is_whole_module_category(self) -> bool:
        """True when the generators exhaust the indecomposables (representation-finite only)."""
        if "whole" not in self._flags:
            try:
                inds = enumerate_indecomposables(self.algebra)
            except RepresentationInfiniteError:
                self._flags["whole"] = False
            else:
                self._flags["whole"] = len(inds) == len(self.generators) and all(self.contains(m) for m in inds)
        return self._flags["whole"]

    def kernel_bound_for(self, a: Module) -> int:
        return self.kernel_dim_bound if self.kernel_dim_bound is not None else 4 * a.total_dim

    def objects(self, bound: int | None = None) -> list[tuple[tuple[int, ...], Module]]:
        """Nonzero objects with every generator multiplicity at most ``bound``, lexicographic."""
        b = self.multiplicity_bound if bound is None else bound
        out = []
        for mults in itertools.product(range(b + 1), repeat=len(self.generators)):
            if any(mults):
                out.append((mults, self.object(mults)))
        return out


def whole_module_category(alg: PathAlgebra, structure: str = INDUCED, name: str = "modA") -> ExactSubcat:
    return ExactSubcat(alg, enumerate_indecomposables(alg), structure, name=name)


def membership(x: Module, e: ExactSubcat) -> tuple[int, ...] | None:
    return e.membership(x)


def _require(e: ExactSubcat, *mods: Module):
    for m in mods:
        if not e.contains(m):
            raise InputError(f"object with dimension vector {m.dims} is not in {e.name}")


# ---------------------------------------------------------------------------
# Monomorphisms and epimorphisms in E


def _hom_action_rank(a: Module, f: ModuleMap, covariant: bool) -> tuple[int, int]:
    """(rank, dim) of Hom(a, f) when covariant, else of Hom(f, a)."""
    if covariant:
        src = hom_basis(a, f.source)
        tgt = hom_space(a, f.target)
        cols = [tgt.coords(f @ h) for h in src]
    else:
        src = hom_basis(f.target, a)
        tgt = hom_space(f.source, a)
        cols = [tgt.coords(h @ f) for h in src]
    if not cols:
        return 0, 0
    m = Matrix.from_columns(f.field, tgt.dim, cols) if tgt.dim else Matrix(f.field, 0, len(cols))
    return m.rank(), len(cols)


def is_mono_in_E(f: ModuleMap, e: ExactSubcat) -> bool:
    """Hom(A, f) injective for every generator A."""
    for a in e.generators:
        r, d = _hom_action_rank(a, f, True)
        if r != d:
            return False
    return True


def is_epi_in_E(f: ModuleMap, e: ExactSubcat) -> bool:
    """Hom(f, A) injective for every generator A."""
    for a in e.generators:
        r, d = _hom_action_rank(a, f, False)
        if r != d:
            return False
    return True


# ---------------------------------------------------------------------------
# Inflations, deflations, conflations


@dataclass
class Certificate:
    ok: bool
    reason: str = ""
    kernel: ModuleMap | None = None     # the inflation of the witnessing conflation
    cokernel: ModuleMap | None = None   # the deflation

    def __bool__(self) -> bool:
        return self.ok


def is_inflation(f: ModuleMap, e: ExactSubcat) -> Certificate:
    if e.structure == INDUCED:
        if not f.is_injective():
            return Certificate(False, "not injective")
    elif is_split_mono(f) is None:
        return Certificate(False, "not a split monomorphism")
    c, q = cokernel(f)
    if not e.contains(c):
        return Certificate(False, f"cokernel {c.dims} not in {e.name}")
    return Certificate(True, "", f, q)


def is_deflation(f: ModuleMap, e: ExactSubcat) -> Certificate:
    if e.structure == INDUCED:
        if not f.is_surjective():
            return Certificate(False, "not surjective")
    elif is_split_epi(f) is None:
        return Certificate(False, "not a split epimorphism")
    k, i = kernel(f)
    if not e.contains(k):
        return Certificate(False, f"kernel {k.dims} not in {e.name}")
    return Certificate(True, "", i, f)


def is_conflation(i: ModuleMap, p: ModuleMap, e: ExactSubcat) -> Certificate:
    if i.target != p.source:
        raise InputError("conflation maps are not composable")
    _require(e, i.source, i.target, p.target)
    if not (p @ i).is_zero():
        return Certificate(False, "composite is nonzero")
    if not (i.is_injective() and p.is_surjective()):
        return Certificate(False, "not injective/surjective")
    ranks = i.ranks()
    if any(m - r != d for m, r, d in zip(i.target.dims, p.ranks(), ranks)):
        return Certificate(False, "not exact in the middle")
    if e.structure == SPLIT:
        if is_split_epi(p) is None:
            return Certificate(False, "deflation does not split")
    return Certificate(True, "", i, p)


# ---------------------------------------------------------------------------
# Resolving axioms


@dataclass
class ResolvingReport:
    r1: str                      # "holds" | "fails"
    r1_detail: list = dc_field(default_factory=list)
    r2: str = "holds"            # "holds" | "verified_up_to_bound" | "fails"
    r2_detail: str = ""
    r1_witnesses: dict = dc_field(default_factory=dict)

    @property
    def resolving(self) -> bool:
        return self.r1 == "holds" and self.r2 in ("holds", "verified_up_to_bound")


def approximation(e: ExactSubcat, m: Module) -> ModuleMap:
    """The universal map from a sum of generators onto the E-reachable part of m."""
    parts, maps = [], []
    for a in e.generators:
        for h in hom_basis(a, m):
            parts.append(a)
            maps.append(h)
    ds = direct_sum(parts, e.algebra)
    if not parts:
        from .modules import zero_map
        return zero_map(ds.module, m)
    return row_map(ds, m, maps)


def check_resolving(e: ExactSubcat, ambient: ExactSubcat, bound: int | None = None, cap: int = 2000) -> ResolvingReport:
    """(R1) by universal approximations (exact); (R2) exact on fast paths, else bounded."""
    for g in e.generators:
        if not ambient.contains(g):
            raise InputError(f"{e.name} is not contained in {ambient.name}")
    report = ResolvingReport("holds")
    for idx, m in enumerate(ambient.generators):
        pi = approximation(e, m)
        cert = is_deflation(pi, ambient)
        if cert:
            report.r1_witnesses[idx] = pi
        else:
            report.r1 = "fails"
            report.r1_detail.append((idx, cert.reason))

    if all(e.contains(g) for g in ambient.generators):
        report.r2_detail = "same objects"
        return report
    if ambient.structure == SPLIT:
        report.r2_detail = "split ambient: kernels are summands"
        return report
    if (
        ambient.structure == INDUCED
        and ambient.is_whole_module_category()
        and e.algebra.is_hereditary_certified()
        and e.contains_projectives()
        and all(is_projective_module(g) for g in e.generators)
    ):
        report.r2_detail = "hereditary ambient: kernels of surjections between projectives are projective"
        return report
    b = e.multiplicity_bound if bound is None else bound
    objs = e.objects(b)
    truncated = False
    for (mb, B), (mc, C) in itertools.product(objs, objs):
        hs = hom_space(B, C)
        coeffs, trunc = enumerate_coefficients(hs.dim, e.field, cap)
        truncated |= trunc
        for c in coeffs:
            p = hs.combine(c)
            if not is_deflation(p, ambient):
                continue
            k, _ = kernel(p)
            if not e.contains(k):
                report.r2 = "fails"
                report.r2_detail = f"kernel of a deflation {mb}->{mc} with coefficients {list(c)} leaves {e.name}"
                return report
    report.r2 = "verified_up_to_bound"
    report.r2_detail = f"multiplicity bound {b}" + (", truncated" if truncated else "")
    return report


def is_projective_module(m: Module) -> bool:
    from .modules import is_projective
    return is_projective(m)


# ---------------------------------------------------------------------------
# Maximal non-negativity: every mono is an inflation, every epi a deflation


def enumerate_coefficients(n: int, field: Field, cap: int) -> tuple[list[tuple], bool]:
    """Nonzero coefficient vectors in order of support size, then lexicographic.

    Over F_p all values are used; over Q the values are {1, -1}.
    Returns (vectors, truncated).
    """
    vals = list(range(1, field.p)) if field.p else [field.one(), -field.one()]
    out = []
    for w in range(1, n + 1):
        for support in itertools.combinations(range(n), w):
            for values in itertools.product(vals, repeat=w):
                if len(out) >= cap:
                    return out, True
                v = [field.zero()] * n
                for i, x in zip(support, values):
                    v[i] = x
                out.append(tuple(v))
    return out, False


@dataclass
class MaxNegResult:
    status: str                  # "VerifiedUpToBound" | "Counterexample"
    bound: int
    truncated: bool = False
    condition: str = ""          # "mono_not_inflation" | "epi_not_deflation"
    source: tuple = ()
    target: tuple = ()
    coefficients: tuple = ()
    map: ModuleMap | None = None
    checked: int = 0
    conditions: tuple = ()       # every condition the reported map violates
    certificate: str = ""        # exact argument covering every bound, when one applies
    search_truncated: bool = False

    @property
    def verified(self) -> bool:
        return self.status == "VerifiedUpToBound"


class _PairTables:
    """Per-generator matrices of Hom(A, b_i) and Hom(b_i, A) for a Hom basis b_i.

    Mono/epi tests for f = sum c_i b_i then reduce to one rank per generator.
    Under the split structure the products r_j b_i (r_j a basis of Hom(Y, X))
    are kept as well, so that split-mono/epi tests are single solves.
    """

    def __init__(self, x: Module, y: Module, e: ExactSubcat):
        self.hs = hom_space(x, y)
        self.field = e.field
        self.mono, self.epi = [], []
        for a in e.generators:
            src = hom_basis(a, x)
            tgt = hom_space(a, y)
            self.mono.append((len(src), tgt.dim, [[tgt.coords(b @ h) for h in src] for b in self.hs.basis]))
            src2 = hom_basis(y, a)
            tgt2 = hom_space(x, a)
            self.epi.append((len(src2), tgt2.dim, [[tgt2.coords(h @ b) for h in src2] for b in self.hs.basis]))
        self.split = e.structure == SPLIT
        if self.split:
            back = hom_basis(y, x)
            self.left = [[(r @ b).vec() for r in back] for b in self.hs.basis]    # r b : X -> X
            self.right = [[(b @ r).vec() for r in back] for b in self.hs.basis]   # b r : Y -> Y
            self.id_x = identity_map(x).vec()
            self.id_y = identity_map(y).vec()
            self.nback = len(back)

    def _combine_cols(self, per_basis, coeffs, ncols, nrows):
        f = self.field
        p = f.p
        cols = []
        for j in range(ncols):
            col = [f.zero()] * nrows
            for c, mats in zip(coeffs, per_basis):
                if c:
                    for i, x in enumerate(mats[j]):
                        if x:
                            col[i] = col[i] + c * x
            cols.append([v % p for v in col] if p else col)
        return cols

    def _full_rank(self, tables, coeffs) -> bool:
        f = self.field
        for ncols, nrows, per_basis in tables:
            if ncols == 0:
                continue
            if nrows < ncols:
                return False
            cols = self._combine_cols(per_basis, coeffs, ncols, nrows)
            if Matrix.from_columns(f, nrows, cols).rank() != ncols:
                return False
        return True

    def is_mono(self, coeffs) -> bool:
        return self._full_rank(self.mono, coeffs)

    def is_epi(self, coeffs) -> bool:
        return self._full_rank(self.epi, coeffs)

    def _splits(self, prods, ident, coeffs) -> bool:
        if not self.nback:
            return not any(ident)
        cols = self._combine_cols(prods, coeffs, self.nback, len(ident))
        a = Matrix.from_columns(self.field, len(ident), cols)
        return solve_vector(a, ident) is not None

    def is_split_mono(self, coeffs) -> bool:
        return self._splits(self.left, self.id_x, coeffs)

    def is_split_epi(self, coeffs) -> bool:
        return self._splits(self.right, self.id_y, coeffs)


def _certificate(e: ExactSubcat) -> str:
    """An argument that settles maximal non-negativity at every bound, if one applies.

    Abelian case: monos are injective with cokernel in mod A, epis dually.
    Split structure holding every projective and every injective, all of them
    projective-injective: monos in E are injective maps out of an injective,
    epis in E are surjections onto a projective, so both split."""
    from .modules import dual_module, is_projective
    if e.structure == INDUCED and e.is_whole_module_category():
        return "abelian: monos are injective and epis surjective, with kernels and cokernels in mod A"
    if e.structure != SPLIT or not (e.contains_projectives() and e.contains_injectives()):
        return ""
    if all(is_projective(g) and is_projective(dual_module(g)) for g in e.generators):
        return "split structure on projective-injectives containing all projectives and injectives"
    return ""


def _maps_to_check(dim: int, field: Field, cap: int, extra: int, seed: int) -> tuple[list[tuple], bool]:
    coeffs, truncated = enumerate_coefficients(dim, field, cap)
    if truncated and extra:
        # a few dense pseudo-random maps so that generic maps are also probed
        rng = random.Random(seed)
        vals = list(range(1, field.p)) if field.p else [field.one(), -field.one()]
        for _ in range(extra):
            coeffs.append(tuple(rng.choice(vals) for _ in range(dim)))
    return coeffs, truncated


def check_maximally_nonnegative(
    e: ExactSubcat, bound: int | None = None, cap: int = 2000, extra: int = 32, certified_cap: int = 125
) -> MaxNegResult:
    """Search maps between objects with multiplicities <= bound for a mono that is
    not an inflation or an epi that is not a deflation.

    Pairs are visited by total multiplicity, then lexicographically; within a
    pair, maps by support size.  The first violation found is reported, so
    raising the bound only appends work after every earlier pair.

    When a certificate applies the search still runs, as a cross-check with
    a per-pair cap of at most ``certified_cap``.
    """
    b = e.multiplicity_bound if bound is None else bound
    cert = _certificate(e)
    if cert:
        cap = min(cap, certified_cap)
    objs = e.objects(b)
    pairs = sorted(itertools.product(objs, objs), key=lambda pq: (sum(pq[0][0]) + sum(pq[1][0]), pq[0][0], pq[1][0]))
    truncated = False
    checked = 0
    whole = e.structure == INDUCED and e.is_whole_module_category()
    for (mx, X), (my, Y) in pairs:
        tables = _PairTables(X, Y, e)
        coeffs, trunc = _maps_to_check(tables.hs.dim, e.field, cap, extra, hash((mx, my)) & 0xFFFF)
        truncated |= trunc
        for c in coeffs:
            checked += 1
            mono = tables.is_mono(c)
            epi = tables.is_epi(c)
            if not (mono or epi):
                continue
            if tables.split:
                # complements of split maps are summands, hence in add(T)
                bad_mono = mono and not tables.is_split_mono(c)
                bad_epi = epi and not tables.is_split_epi(c)
            else:
                f = tables.hs.combine(c)
                if whole:
                    bad_mono = mono and not f.is_injective()
                    bad_epi = epi and not f.is_surjective()
                else:
                    bad_mono = mono and not is_inflation(f, e)
                    bad_epi = epi and not is_deflation(f, e)
            if bad_mono or bad_epi:
                conds = tuple(name for name, bad in (("mono_not_inflation", bad_mono), ("epi_not_deflation", bad_epi)) if bad)
                return MaxNegResult("Counterexample", b, truncated, conds[0], mx, my, c, tables.hs.combine(c), checked, conds)
    if cert:
        return MaxNegResult("VerifiedUpToBound", b, False, checked=checked, certificate=cert, search_truncated=truncated)
    return MaxNegResult("VerifiedUpToBound", b, truncated, checked=checked, search_truncated=truncated)
