"""Regions U, V, V_l, U_r of the derived category, hearts, and t-pairs.

Pointwise membership works for any bounded complex over E.  Enumeration of
hearts needs a hereditary representation-finite ambient algebra, where every
indecomposable of D^b is a shifted stalk; objects are then named by module and
shift, and Hom-dimensions come from Hom and Ext^1 alone.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from .complexes import (
    NO,
    UNKNOWN,
    YES,
    ChainMap,
    Complex,
    Verdict,
    chain_map_space,
    classify_acyclicity,
    cone,
    homotopy_hom_dim,
    hyper_hom,
    left_ext_acyclic_at,
)
from .exact import INDUCED, SPLIT, ExactSubcat, check_maximally_nonnegative, check_resolving, enumerate_coefficients, whole_module_category
from .linalg import InputError
from .modules import (
    Module,
    ModuleMap,
    decompose,
    direct_sum,
    dual_module,
    enumerate_indecomposables,
    ext1_dim,
    hom_dim,
    hom_space,
    injective,
    is_isomorphic,
    is_projective,
    kernel,
    map_from_blocks,
    projective,
    projective_resolution,
    simple,
    zero_map,
    zero_module,
)
from .quiver import PathAlgebra

DEFAULT_WINDOW = (-3, 3)


class NotApplicable(InputError):
    """Heart enumeration was asked for outside its supported inputs."""


def _merge(statuses: Iterable[str]) -> str:
    seen = set(statuses)
    if NO in seen:
        return NO
    if UNKNOWN in seen:
        return UNKNOWN
    return YES


# ---------------------------------------------------------------------------
# Regions


@dataclass(frozen=True)
class RegionSpec:
    """U, V, V_left, U_right, or ``shifted`` = Σ^k of an inner region."""
    which: str
    k: int = 0
    inner: "RegionSpec | None" = None

    def __post_init__(self):
        if self.which not in ("U", "V", "V_left", "U_right", "shifted"):
            raise InputError(f"unknown region {self.which!r}")
        if self.which == "shifted" and self.inner is None:
            raise InputError("a shifted region needs an inner region")

    @classmethod
    def shifted(cls, k: int, inner: "RegionSpec | str") -> "RegionSpec":
        if isinstance(inner, str):
            inner = cls(inner)
        return cls("shifted", k, inner)

    def __str__(self) -> str:
        if self.which == "shifted":
            return f"shift({self.inner},{self.k})"
        return self.which


# which degrees each region constrains, and by which acyclicity notion
_REGION_RULES = {
    "U": ("positive", "e_acyclic"),
    "V": ("negative", "e_acyclic"),
    "V_left": ("negative", "left_ext"),
    "U_right": ("positive", "right_ext"),
}


@dataclass
class MembershipReport:
    status: str
    evidence: dict = dc_field(default_factory=dict)   # degree -> (condition, status, detail)

    @property
    def yes(self) -> bool:
        return self.status == YES

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "evidence": {str(n): {"condition": c, "status": s} for n, (c, s, _) in sorted(self.evidence.items())},
        }


def _degree_verdict(x: Complex, e: ExactSubcat, n: int, notion: str, mode: str) -> Verdict:
    entry = classify_acyclicity(x, e, n, mode=mode, which=[notion])
    return {"e_acyclic": entry.e_acyclic, "left_ext": entry.left_ext, "right_ext": entry.right_ext}[notion]


def _conditions(x: Complex, rules: Sequence[tuple[str, str]], e: ExactSubcat, mode: str) -> MembershipReport:
    evidence = {}
    if x.is_zero():
        return MembershipReport(YES, evidence)
    for n in range(x.lo, x.hi + 1):
        for where, notion in rules:
            if _in_range(n, where):
                v = _degree_verdict(x, e, n, notion, mode)
                old = evidence.get(n)
                if old is None or old[1] == YES:
                    evidence[n] = (notion, v.status, v.detail)
    return MembershipReport(_merge(s for _, s, _ in evidence.values()), evidence)


def _in_range(n: int, where) -> bool:
    if where == "positive":
        return n >= 1
    if where == "negative":
        return n <= -1
    if isinstance(where, tuple) and where[0] == "below":
        return n < where[1]
    raise ValueError(where)


def region_membership(x: Complex, spec: RegionSpec | str, e: ExactSubcat, mode: str = "auto") -> MembershipReport:
    if isinstance(spec, str):
        spec = RegionSpec(spec)
    if spec.which == "shifted":
        return region_membership(x.shift(-spec.k), spec.inner, e, mode)
    return _conditions(x, [_REGION_RULES[spec.which]], e, mode)


def _parse_heart(which: str) -> tuple[str, int | None]:
    if which in ("LHb", "RHb"):
        return which, None
    if which.startswith("LH") and which[2:].lstrip("-").isdigit():
        return "LHn", int(which[2:])
    raise InputError(f"unknown heart {which!r}; expected LHb, RHb or LH<n>")


def heart_membership(x: Complex, which: str, e: ExactSubcat, mode: str = "auto") -> MembershipReport:
    """LHb: E-acyclic in positive degrees, left Ext-acyclic in negative ones.
    RHb is the dual.  LH<n> additionally asks for E-acyclicity below -n.
    """
    kind, n = _parse_heart(which)
    if kind == "LHb":
        rules = [("positive", "e_acyclic"), ("negative", "left_ext")]
    elif kind == "RHb":
        rules = [("positive", "right_ext"), ("negative", "e_acyclic")]
    else:
        rules = [("positive", "e_acyclic"), ("negative", "left_ext"), (("below", -n), "e_acyclic")]
    return _conditions(x, rules, e, mode)


def stalk_object(x: Complex, e: ExactSubcat) -> Module | None:
    """The object of E a complex is isomorphic to as a stalk in degree 0, if any."""
    for n in range(x.lo, x.hi + 1):
        if n != 0 and not _degree_verdict(x, e, n, "e_acyclic", "auto").yes:
            return None
    h0 = x.homology(0)
    return h0 if (h0.is_zero() or e.contains(h0)) else None


# ---------------------------------------------------------------------------
# Ext-kernels


@dataclass
class ExtKernel:
    map: ModuleMap
    verdict: Verdict


def ext_kernel(g: ModuleMap, e: ExactSubcat) -> ExtKernel | None:
    """An f with (f, g) left Ext-acyclic.

    The minimal E-approximation of ker g is a weak kernel, hence already an
    Ext-kernel; the result is re-verified by the acyclicity classifier.
    """
    from .functors import minimal_approximation
    for m in (g.source, g.target):
        if not e.contains(m):
            raise InputError(f"map is not in {e.name}")
    km, kinc = kernel(g)
    f = kinc @ minimal_approximation(e, km)
    v = left_ext_acyclic_at(f, g, e)
    if not v.yes:
        return None
    return ExtKernel(f, v)


# ---------------------------------------------------------------------------
# Shifted stalks of a hereditary representation-finite algebra


def _module_rank(alg: PathAlgebra, m: Module) -> tuple[tuple, str]:
    names = alg.quiver.vertices
    for kind, build in (("P", projective), ("I", injective), ("S", simple)):
        for v in range(alg.n):
            if m.dims == build(alg, v).dims and is_isomorphic(m, build(alg, v)):
                return ({"P": 0, "I": 1, "S": 2}[kind], v), f"{kind}{names[v]}"
    return (3, m.dims), "M" + "".join(str(d) for d in m.dims)


@dataclass(frozen=True, order=True)
class DObject:
    """Σ^shift of the indecomposable module with index ``module``."""
    shift: int
    module: int

    def shifted(self, k: int) -> "DObject":
        return DObject(self.shift + k, self.module)


class DerivedUniverse:
    """Indecomposables Σ^i M of D^b(mod A) for hereditary representation-finite A."""

    def __init__(self, alg: PathAlgebra, window: tuple[int, int] = DEFAULT_WINDOW):
        if not alg.is_hereditary_certified():
            raise NotApplicable("heart enumeration needs a hereditary algebra (no relations, acyclic quiver)")
        self.algebra = alg
        self.window = window
        mods = enumerate_indecomposables(alg)
        ranked = sorted((_module_rank(alg, m) + (m,) for m in mods), key=lambda t: t[0])
        self.modules = [t[2] for t in ranked]
        self.module_names = [t[1] for t in ranked]
        self._hom = [[hom_dim(a, b) for b in self.modules] for a in self.modules]
        self._ext = [[ext1_dim(a, b) for b in self.modules] for a in self.modules]
        self._proj: dict = {}

    # naming and enumeration
    def objects(self, window: tuple[int, int] | None = None) -> list[DObject]:
        lo, hi = window or self.window
        return [DObject(s, m) for s in range(lo, hi + 1) for m in range(len(self.modules))]

    def in_window(self, o: DObject) -> bool:
        return self.window[0] <= o.shift <= self.window[1]

    def name(self, o: DObject) -> str:
        base = self.module_names[o.module]
        return base if o.shift == 0 else f"shift({base},{o.shift})"

    def index_of(self, m: Module) -> int:
        for i, n in enumerate(self.modules):
            if n.dims == m.dims and is_isomorphic(n, m):
                return i
        raise InputError(f"module {m.dims} is not indecomposable")

    # Hom in D^b
    def hom(self, a: DObject, b: DObject) -> int:
        d = b.shift - a.shift
        if d == 0:
            return self._hom[a.module][b.module]
        if d == 1:
            return self._ext[a.module][b.module]
        return 0

    def identify(self, x: Complex) -> list[DObject]:
        """Indecomposable summands: over a hereditary algebra X ≅ ⊕ Σ^{-n} H^n(X)."""
        out = []
        for n in range(x.lo, x.hi + 1):
            h = x.homology(n)
            if h.is_zero():
                continue
            for s in decompose(h):
                out.append(DObject(-n, self.index_of(s)))
        return sorted(out)

    # concrete complexes
    def projective_complex(self, o: DObject) -> Complex:
        base = self._proj.get(o.module)
        if base is None:
            m = self.modules[o.module]
            res = projective_resolution(m, len(self.modules) + 2)
            if len(res) == 1:
                base = Complex.stalk(res[0].source)
            else:
                base = Complex.from_maps(-(len(res) - 1), res[:-1])
            self._proj[o.module] = base
        return base.shift(o.shift)

    def maps(self, a: DObject, b: DObject) -> list[ChainMap]:
        """A basis of Hom_D(a, b) as chain maps between projective complexes."""
        if not self.hom(a, b):
            return []
        return chain_map_space(self.projective_complex(a), self.projective_complex(b)).quotient_basis

    def representative(self, o: DObject, e: ExactSubcat) -> Complex:
        return _representative_complex(self.modules[o.module], _rep_mode(e)).shift(o.shift)

    # extension closure
    def extension_closure(self, seeds: Iterable[DObject], max_terms: int = 2, seed: int = 0) -> tuple[set, bool]:
        """Close a set of window objects under extensions and summands.

        Extensions A -> X -> B are taken with A indecomposable and B a sum of
        at most ``max_terms`` members; sums need generic maps, drawn from a
        seeded RNG.  Summands falling outside the window set the flag.
        """
        rng = random.Random(seed)
        closure = {o for o in seeds if self.in_window(o)}
        truncated = False
        done: set = set()
        while True:
            found = set()
            members = sorted(closure)
            for a in members:
                for size in range(1, max_terms + 1):
                    for bs in itertools.combinations_with_replacement(members, size):
                        key = (a, bs)
                        if key in done:
                            continue
                        done.add(key)
                        if not all(self.hom(b, a.shifted(1)) for b in bs):
                            continue
                        for x in self._cocones(a, bs, rng):
                            for o in self.identify(x):
                                if not self.in_window(o):
                                    truncated = True
                                elif o not in closure:
                                    found.add(o)
            if not found:
                return closure, truncated
            closure |= found

    def _cocones(self, a: DObject, bs: Sequence[DObject], rng: random.Random) -> list[Complex]:
        sa = a.shifted(1)
        target = self.projective_complex(sa)
        if len(bs) == 1:
            phis = self.maps(bs[0], sa)
            out = [cone(p).complex.shift(-1) for p in phis]
            if len(phis) > 1:
                out.append(cone(_generic(phis, rng)).complex.shift(-1))
            return out
        parts = [self.projective_complex(b) for b in bs]
        src, incl = _sum_complex(parts)
        comps: dict = {}
        for inc_b, b in zip(incl, bs):
            phi = _generic(self.maps(b, sa), rng)
            for n, c in phi.comps.items():
                piece = c @ inc_b[n]
                comps[n] = comps[n] + piece if n in comps else piece
        full = {n: comps.get(n, zero_map(src.term(n), target.term(n))) for n in src.terms}
        return [cone(ChainMap(src, target, full, check=False)).complex.shift(-1)]


def _generic(maps: Sequence[ChainMap], rng: random.Random) -> ChainMap:
    field = maps[0].source.field
    p = field.p or 7
    acc = None
    for m in maps:
        c = field(rng.randrange(1, p))
        t = m.scale(c)
        acc = t if acc is None else acc + t
    return acc


def _sum_complex(parts: Sequence[Complex]) -> tuple[Complex, list[dict]]:
    """Direct sum of complexes and, per part, the degreewise projections."""
    alg = parts[0].algebra
    degs = sorted({n for p in parts for n in p.terms})
    sums = {n: direct_sum([p.term(n) for p in parts], alg) for n in range(degs[0], degs[-1] + 2)}
    diffs = {}
    for n in range(degs[0], degs[-1] + 1):
        blocks = [[p.diff(n) if i == j else None for j, p in enumerate(parts)] for i, p in enumerate(parts)]
        diffs[n] = map_from_blocks(sums[n], sums[n + 1], blocks)
    x = Complex(alg, {n: s.module for n, s in sums.items() if not s.module.is_zero()},
                {n: d for n, d in diffs.items() if not d.is_zero()}, check=False)
    projs = [{n: sums[n].projections[i] for n in degs} for i in range(len(parts))]
    return x, projs


def _rep_mode(e: ExactSubcat) -> str:
    """How shifted stalks of mod A are represented by complexes over E."""
    hit = e._flags.get("rep_mode")
    if hit is not None:
        return hit
    alg = e.algebra
    mode = None
    if e.structure == INDUCED and e.is_whole_module_category():
        mode = "stalk"
    elif e.structure == SPLIT and all(is_projective(g) for g in e.generators) and e.contains_projectives():
        mode = "projective"
    elif e.structure == INDUCED:
        amb = whole_module_category(alg)
        if e.contains_projectives() and check_resolving(e, amb).resolving:
            mode = "projective"
        elif e.contains_injectives():
            amb_op = whole_module_category(e.opposite().algebra)
            if check_resolving(e.opposite(), amb_op).resolving:
                mode = "injective"
    if mode is None:
        raise NotApplicable(
            f"{e.name}: D^b(E) is only modelled for E = mod A, or E resolving or coresolving in mod A; "
            "use heart_membership or scan_heart instead"
        )
    e._flags["rep_mode"] = mode
    return mode


def _representative_complex(m: Module, mode: str) -> Complex:
    if mode == "stalk":
        return Complex.stalk(m)
    if mode == "projective":
        res = projective_resolution(m, 32)
        if len(res) == 1:
            return Complex.stalk(res[0].source)
        return Complex.from_maps(-(len(res) - 1), res[:-1])
    # injective coresolution, as the dual of a projective resolution over A^op
    dm = dual_module(m)
    res = projective_resolution(dm, 32)
    p = Complex.stalk(res[0].source) if len(res) == 1 else Complex.from_maps(-(len(res) - 1), res[:-1])
    return p.dual()


# ---------------------------------------------------------------------------
# Normal forms of heart members


def truncate_nonpositive(x: Complex, e: ExactSubcat) -> Complex | None:
    """Replace X by ... -> X^{-1} -> ker d^0 -> 0 while the top differential is a deflation."""
    from .exact import is_deflation
    while not x.is_zero() and x.hi > 0:
        h = x.hi
        d = x.diff(h - 1)
        if not is_deflation(d, e):
            return None
        km, kinc = kernel(d)
        terms = {n: m for n, m in x.terms.items() if n < h - 1}
        diffs = {n: dd for n, dd in x.diffs.items() if n < h - 2}
        if not km.is_zero():
            terms[h - 1] = km
            if h - 2 in x.terms:
                from .modules import lift_through_mono
                diffs[h - 2] = lift_through_mono(kinc, x.diff(h - 2))
        x = Complex(x.algebra, terms, diffs, check=False)
    return x


def truncate_nonnegative(x: Complex, e: ExactSubcat) -> Complex | None:
    """Dual of :func:`truncate_nonpositive`, through the opposite algebra."""
    y = truncate_nonpositive(x.dual(), e.opposite())
    return None if y is None else y.dual()


# ---------------------------------------------------------------------------
# Hearts over the universe


@dataclass
class HeartGenerator:
    name: str
    obj: DObject
    complex: Complex


@dataclass
class HeartDescription:
    provenance: str
    generators: list[HeartGenerator]
    hom_table: dict            # k -> matrix of dim Hom(g_i, Σ^k g_j)
    window: tuple[int, int]
    truncated: bool = False
    notes: list = dc_field(default_factory=list)

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.generators]

    def is_nonnegative(self) -> bool:
        return all(v == 0 for k, mat in self.hom_table.items() if k < 0 for row in mat for v in row)

    def as_dict(self) -> dict:
        return {
            "heart": self.provenance,
            "generators": self.names,
            "hom_table": {str(k): mat for k, mat in sorted(self.hom_table.items())},
            "nonnegative": self.is_nonnegative(),
            "window": list(self.window),
            "window_truncated": self.truncated,
            "notes": list(self.notes),
        }


def _hom_table(u: DerivedUniverse, objs: Sequence[DObject], span: int = 2) -> dict:
    return {k: [[u.hom(a, b.shifted(k)) for b in objs] for a in objs] for k in range(-span, span + 1)}


def region_objects(e: ExactSubcat, spec: RegionSpec | str, universe: DerivedUniverse, mode: str = "auto") -> set:
    """Window objects whose E-representative lies in the region."""
    return {o for o in universe.objects() if region_membership(universe.representative(o, e), spec, e, mode).yes}


def _base_heart(e: ExactSubcat, which: str, u: DerivedUniverse, mode: str) -> list[DObject]:
    return [o for o in u.objects() if heart_membership(u.representative(o, e), which, e, mode).yes]


def _shift_span(u: DerivedUniverse) -> range:
    lo, hi = u.window
    return range(1, hi - lo + 3)


def v_left_of(u: DerivedUniverse, heart: Iterable[DObject]) -> set:
    """(Σ^{≥1} H)^⊥ on the window, the left Ext coaisle of H."""
    hs = list(heart)
    return {y for y in u.objects() if all(u.hom(h.shifted(i), y) == 0 for h in hs for i in _shift_span(u))}


def u_right_of(u: DerivedUniverse, heart: Iterable[DObject]) -> set:
    """^⊥(Σ^{≤-1} H) on the window, the right Ext aisle of H."""
    hs = list(heart)
    return {x for x in u.objects() if all(u.hom(x, h.shifted(-i)) == 0 for h in hs for i in _shift_span(u))}


def u_of(u: DerivedUniverse, heart: Iterable[DObject]) -> tuple[set, bool]:
    """Extension closure of Σ^{≥0} H within the window."""
    seeds = [h.shifted(i) for h in heart for i in range(0, u.window[1] - u.window[0] + 1)]
    return u.extension_closure(seeds)


def v_of(u: DerivedUniverse, heart: Iterable[DObject]) -> tuple[set, bool]:
    seeds = [h.shifted(-i) for h in heart for i in range(0, u.window[1] - u.window[0] + 1)]
    return u.extension_closure(seeds)


def left_heart_of(u: DerivedUniverse, heart: Iterable[DObject]) -> tuple[list[DObject], bool]:
    hs = list(heart)
    aisle, trunc = u_of(u, hs)
    return sorted(aisle & v_left_of(u, hs)), trunc


def right_heart_of(u: DerivedUniverse, heart: Iterable[DObject]) -> tuple[list[DObject], bool]:
    hs = list(heart)
    coaisle, trunc = v_of(u, hs)
    return sorted(u_right_of(u, hs) & coaisle), trunc


def _parse_nested(which: str) -> list[str]:
    """"LHb(RHb)" -> ["LHb", "RHb"], outermost first."""
    parts = []
    rest = which.replace(" ", "")
    while "(" in rest:
        head, _, tail = rest.partition("(")
        if not tail.endswith(")"):
            raise InputError(f"unbalanced heart expression {which!r}")
        parts.append(head)
        rest = tail[:-1]
    parts.append(rest)
    return parts


def compute_heart(
    e: ExactSubcat,
    which: str = "LHb",
    window: tuple[int, int] = DEFAULT_WINDOW,
    universe: DerivedUniverse | None = None,
    mode: str = "auto",
) -> HeartDescription:
    """Enumerate a heart over the shifted stalks in ``window``.

    ``which`` is LHb, RHb, LH<n>, or a nesting such as LHb(RHb): the innermost
    heart is found by membership tests on E-representatives, outer ones from
    the orthogonal description of the coaisle and the extension closure of
    the aisle.
    """
    chain = _parse_nested(which)
    if universe is None and e.structure == SPLIT and not e.algebra.is_hereditary_certified():
        if len(chain) > 1:
            raise NotApplicable("iterated hearts need a hereditary algebra")
        return _scanned_heart(e, which, window, mode)
    u = universe or DerivedUniverse(e.algebra, window)
    innermost = chain[-1]
    objs = _base_heart(e, innermost, u, mode)
    truncated = False
    for outer in reversed(chain[:-1]):
        if outer == "LHb":
            objs, t = left_heart_of(u, objs)
        elif outer == "RHb":
            objs, t = right_heart_of(u, objs)
        else:
            raise InputError(f"only LHb and RHb can be iterated, got {outer!r}")
        truncated |= t
    objs = sorted(objs)
    gens = []
    for o in objs:
        x = u.representative(o, e)
        if innermost.startswith("LH") and len(chain) == 1:
            x = truncate_nonpositive(x, e) or x
        elif innermost == "RHb" and len(chain) == 1:
            x = truncate_nonnegative(x, e) or x
        gens.append(HeartGenerator(u.name(o), o, x))
    notes = [f"representatives: {_rep_mode(e)}"]
    return HeartDescription(which, gens, _hom_table(u, objs), u.window, truncated, notes)


def _scanned_heart(e: ExactSubcat, which: str, window: tuple[int, int], mode: str,
                   bound: int = 1, length: int = 3) -> HeartDescription:
    """Split E: D^b(E) is K^b(E), so heart members are found among explicit
    complexes over E and Hom is taken up to homotopy.  Bounded by the scan."""
    cxs, truncated = small_complexes(e, window, bound, length)
    found: list[tuple[str, Complex]] = []
    stalks: list[Module] = []
    for x in cxs:
        if not heart_membership(x, which, e, mode).yes:
            continue
        m = stalk_object(x, e)
        if m is None:
            found.append((f"complex[{x.lo}..{x.hi}]#{len(found)}", x))
            continue
        for part in decompose(m) if not m.is_zero() else []:
            if not any(part.dims == q.dims and is_isomorphic(part, q) for q in stalks):
                stalks.append(part)
    named = sorted((_module_rank(e.algebra, m) + (m,) for m in stalks), key=lambda t: t[0])
    gens = [HeartGenerator(n, None, Complex.stalk(m, 0)) for _, n, m in named]
    gens += [HeartGenerator(n, None, x) for n, x in found]
    xs = [g.complex for g in gens]
    table = {k: [[homotopy_hom_dim(a, b.shift(k)) for b in xs] for a in xs] for k in range(-2, 3)}
    notes = [f"bounded scan in K^b(E): {len(cxs)} complexes, multiplicity <= {bound}, length <= {length}"]
    return HeartDescription(which, gens, table, window, truncated, notes)


def heart_resolving_witnesses(desc: HeartDescription, e: ExactSubcat) -> dict[str, bool]:
    """E ⊆ LH^b: the stalk X^0 -> X has cocone Σ^{-1}σ_{≤-1}X inside the heart.
    E ⊆ RH^b dually: X -> X^0 has cone Σσ_{≥1}X inside the heart."""
    out = {}
    for g in desc.generators:
        x = g.complex
        if desc.provenance == "LHb":
            rest = Complex(x.algebra, {n: m for n, m in x.terms.items() if n <= -1},
                           {n: d for n, d in x.diffs.items() if n < -1}, check=False)
            out[g.name] = e.contains(x.term(0)) and heart_membership(rest.shift(-1), "LHb", e).yes
        elif desc.provenance == "RHb":
            rest = Complex(x.algebra, {n: m for n, m in x.terms.items() if n >= 1},
                           {n: d for n, d in x.diffs.items() if n >= 1}, check=False)
            out[g.name] = e.contains(x.term(0)) and heart_membership(rest.shift(1), "RHb", e).yes
    return out


# ---------------------------------------------------------------------------
# t-pairs on the enumerated window


@dataclass
class TPairReport:
    orthogonal: bool
    u_closed: bool
    v_closed: bool
    shift_closed: bool
    left_maximal: bool
    right_maximal: bool
    truncated: bool
    violations: list = dc_field(default_factory=list)

    @property
    def t_pair(self) -> bool:
        return self.orthogonal and self.u_closed and self.v_closed and self.shift_closed

    def as_dict(self) -> dict:
        return {
            "orthogonal": self.orthogonal,
            "u_closed": self.u_closed,
            "v_closed": self.v_closed,
            "shift_closed": self.shift_closed,
            "left_maximal": self.left_maximal,
            "right_maximal": self.right_maximal,
            "t_pair": self.t_pair,
            "window_truncated": self.truncated,
            "violations": list(self.violations),
        }


def _as_objects(u: DerivedUniverse, members: Iterable) -> set:
    out = set()
    for m in members:
        if isinstance(m, DObject):
            out.add(m)
        else:
            out.update(u.identify(m))
    return out


def verify_t_pair(u_members: Iterable, v_members: Iterable, universe: DerivedUniverse) -> TPairReport:
    """Check a pair of window subcategories (given by objects or complexes).

    Orthogonality Hom(ΣU, V) = 0; closure of each side under extensions,
    summands and the relevant shift inside the window; and completeness of
    each side as an orthogonal, on the part of the window whose Hom-partners
    all lie inside it.  Over a hereditary algebra Hom(Σ^a M, Σ^b N) vanishes
    unless b - a is 0 or 1, which fixes those margins.
    """
    u = universe
    U, V = _as_objects(u, u_members), _as_objects(u, v_members)
    lo, hi = u.window
    span = _shift_span(u)
    violations = []

    orthogonal = True
    for a in sorted(U):
        for b in sorted(V):
            for i in span:
                if u.hom(a.shifted(i), b):
                    orthogonal = False
                    violations.append(f"Hom({u.name(a.shifted(i))}, {u.name(b)}) != 0")
    u_cl, t1 = u.extension_closure(U)
    v_cl, t2 = u.extension_closure(V)
    u_closed, v_closed = u_cl <= U, v_cl <= V
    violations += [f"extension {u.name(o)} missing from U" for o in sorted(u_cl - U)]
    violations += [f"extension {u.name(o)} missing from V" for o in sorted(v_cl - V)]
    shift_closed = all(a.shifted(1) in U for a in U if a.shift + 1 <= hi) and \
        all(b.shifted(-1) in V for b in V if b.shift - 1 >= lo)
    if not shift_closed:
        violations.append("not closed under the shift")

    # (ΣU)^⊥ = V on shifts >= lo + 2 and ^⊥V = ΣU on shifts <= hi - 1
    left_max = True
    for y in u.objects():
        if y.shift < lo + 2:
            continue
        perp = all(u.hom(a.shifted(i), y) == 0 for a in U for i in span)
        if perp != (y in V):
            left_max = False
            violations.append(f"{u.name(y)}: in (ΣU)^⊥ is {perp}, in V is {y in V}")
    right_max = True
    for x in u.objects():
        if x.shift > hi - 1 or x.shift - 1 < lo:
            continue
        perp = all(u.hom(x, b.shifted(-j)) == 0 for b in V for j in range(0, hi - lo + 3))
        if perp != (x.shifted(-1) in U):
            right_max = False
            violations.append(f"{u.name(x)}: in ^⊥V is {perp}, in ΣU is {x.shifted(-1) in U}")
    return TPairReport(orthogonal, u_closed, v_closed, shift_closed, left_max, right_max, t1 or t2, violations)


@dataclass
class MaximalTPairs:
    """The two maximal t-pairs built from E and their hearts, against the iterated hearts."""
    left: TPairReport              # (U_r(LH^b E), V_l(E))
    right: TPairReport             # (U_r(E), V_l(RH^b E))
    left_heart: list[str]
    right_heart: list[str]
    rh_of_lh: list[str]
    lh_of_rh: list[str]

    @property
    def hearts_match(self) -> bool:
        return self.left_heart == self.rh_of_lh and self.right_heart == self.lh_of_rh

    def as_dict(self) -> dict:
        return {
            "pair_U_r(LHb)_V_left": self.left.as_dict(),
            "pair_U_right_V_left(RHb)": self.right.as_dict(),
            "heart_U_r(LHb)_V_left": self.left_heart,
            "heart_U_right_V_left(RHb)": self.right_heart,
            "RHb(LHb)": self.rh_of_lh,
            "LHb(RHb)": self.lh_of_rh,
            "hearts_match": self.hearts_match,
        }


def maximal_t_pairs(e: ExactSubcat, window: tuple[int, int] = DEFAULT_WINDOW,
                    universe: DerivedUniverse | None = None) -> MaximalTPairs:
    u = universe or DerivedUniverse(e.algebra, window)
    lh = _base_heart(e, "LHb", u, "auto")
    rh = _base_heart(e, "RHb", u, "auto")
    v_l = region_objects(e, "V_left", u)
    u_r = region_objects(e, "U_right", u)
    u_r_lh = u_right_of(u, lh)
    v_l_rh = v_left_of(u, rh)
    names = lambda objs: [u.name(o) for o in sorted(objs)]
    return MaximalTPairs(
        verify_t_pair(u_r_lh, v_l, u),
        verify_t_pair(u_r, v_l_rh, u),
        names(u_r_lh & v_l),
        names(u_r & v_l_rh),
        compute_heart(e, "RHb(LHb)", universe=u).names,
        compute_heart(e, "LHb(RHb)", universe=u).names,
    )


def standard_t_structure(universe: DerivedUniverse) -> tuple[set, set]:
    """(D^{≤0}, D^{≥0}) of mod A on the window."""
    objs = universe.objects()
    return {o for o in objs if o.shift >= 0}, {o for o in objs if o.shift <= 0}


# ---------------------------------------------------------------------------
# Bounded scans (any algebra)


def _maps_up_to_scalar(x: Module, y: Module, cap: int) -> tuple[list[ModuleMap], bool]:
    hs = hom_space(x, y)
    out = [zero_map(x, y)]
    coeffs, truncated = enumerate_coefficients(hs.dim, x.field, cap)
    one = x.field.one()
    for c in coeffs:
        lead = next(v for v in c if v)
        if lead == one:
            out.append(hs.combine(c))
    return out, truncated


def small_complexes(e: ExactSubcat, window: tuple[int, int], bound: int = 1, length: int = 3,
                    cap: int = 64) -> tuple[list[Complex], bool]:
    """Complexes over E inside ``window``: two-term ones between objects of
    multiplicity <= bound, longer ones between generators; maps up to scalar."""
    lo, hi = window
    objs = [m for _, m in e.objects(bound)]
    gens = list(e.generators)
    truncated = False
    shapes: list[list[ModuleMap]] = []
    cache: dict = {}

    def maps(a, b):
        nonlocal truncated
        key = (a, b)
        if key not in cache:
            cache[key], t = _maps_up_to_scalar(a, b, cap)
            truncated |= t
        return cache[key]

    for a, b in itertools.product(objs, objs):
        shapes += [[f] for f in maps(a, b) if not f.is_zero()]
    for n in range(3, length + 1):
        for mods in itertools.product(gens, repeat=n):
            seqs = [[]]
            for a, b in zip(mods, mods[1:]):
                seqs = [s + [f] for s in seqs for f in maps(a, b)
                        if not f.is_zero() and (not s or (f @ s[-1]).is_zero())]
            shapes += seqs
    out = [Complex.stalk(m, 0) for m in objs]
    for seq in shapes:
        width = len(seq)
        for start in range(lo, hi - width + 1):
            out.append(Complex.from_maps(start, seq))
    return out, truncated


@dataclass
class ScanReport:
    which: str
    checked: int
    members: int
    non_stalk_members: list
    unknown: int
    truncated: bool

    @property
    def only_stalks(self) -> bool:
        return not self.non_stalk_members

    def as_dict(self) -> dict:
        return {
            "heart": self.which,
            "checked": self.checked,
            "members": self.members,
            "only_stalks": self.only_stalks,
            "non_stalk_members": [repr(x) for x in self.non_stalk_members],
            "unknown": self.unknown,
            "truncated": self.truncated,
        }


def scan_heart(e: ExactSubcat, which: str, window: tuple[int, int] = (-2, 2), bound: int = 1,
               length: int = 3, mode: str = "auto") -> ScanReport:
    """Membership over the small complexes; members off the stalks of E are reported."""
    cxs, truncated = small_complexes(e, window, bound, length)
    members, unknown, extra = 0, 0, []
    for x in cxs:
        r = heart_membership(x, which, e, mode)
        if r.status == UNKNOWN:
            unknown += 1
        if not r.yes:
            continue
        members += 1
        if stalk_object(x, e) is None:
            extra.append(x)
    return ScanReport(which, len(cxs), members, extra, unknown, truncated)


@dataclass
class Characterization:
    """Three independently computed forms of maximal non-negativity."""
    hearts_are_e: bool             # E = LH^b(E) = RH^b(E) on the scan
    coaisles_agree: bool           # V_l = V and U_r = U on the scan
    mono_epi: bool                 # every mono an inflation, every epi a deflation
    bound: int
    details: dict = dc_field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return self.hearts_are_e == self.coaisles_agree == self.mono_epi

    def as_dict(self) -> dict:
        return {
            "hearts_equal_E": self.hearts_are_e,
            "coaisles_agree": self.coaisles_agree,
            "mono_epi": self.mono_epi,
            "consistent": self.consistent,
            "bound": self.bound,
            "details": self.details,
        }


def characterize_maximal_nonnegativity(e: ExactSubcat, bound: int = 1, window: tuple[int, int] = (-2, 2),
                                       length: int = 3) -> Characterization:
    lh = scan_heart(e, "LHb", window, bound, length)
    rh = scan_heart(e, "RHb", window, bound, length)
    cxs, _ = small_complexes(e, window, bound, length)
    clash = []
    for x in cxs:
        for weak, strong in (("V_left", "V"), ("U_right", "U")):
            if region_membership(x, weak, e).yes and not region_membership(x, strong, e).yes:
                clash.append((weak, repr(x)))
    mx = check_maximally_nonnegative(e, bound)
    details = {
        "LHb_scan": lh.as_dict(),
        "RHb_scan": rh.as_dict(),
        "region_clashes": [f"{w}: {x}" for w, x in clash[:8]],
        "maxneg": {"status": mx.status, "conditions": list(mx.conditions)},
    }
    return Characterization(lh.only_stalks and rh.only_stalks, not clash, mx.verified, bound, details)


# ---------------------------------------------------------------------------
# Heart against resolving completion


@dataclass
class CrosscheckReport:
    status: str                    # "equal" | "consistent up to bound" | "mismatch"
    heart: list[str]
    heart_count: int
    completion_count: int
    heart_hom: list[list[int]]
    completion_hom: list[list[int]]
    effaceable_simples: list[int]
    rb_model: str
    stalks_representable: bool
    notes: list = dc_field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "heart": self.heart,
            "heart_count": self.heart_count,
            "completion_count": self.completion_count,
            "heart_hom": self.heart_hom,
            "completion_hom": self.completion_hom,
            "effaceable_simples": self.effaceable_simples,
            "rb_model": self.rb_model,
            "stalks_representable": self.stalks_representable,
            "notes": list(self.notes),
        }


def _simple_functor(e: ExactSubcat, i: int):
    """coker of Y(rad -> T_i): the simple functor at T_i."""
    from .functors import FpFunctor, radical_maps
    from .modules import row_map
    parts, maps = [], []
    for j, t in enumerate(e.generators):
        for r in radical_maps(e, j, i):
            parts.append(t)
            maps.append(r)
    ti = e.generators[i]
    ds = direct_sum(parts, e.algebra)
    g = row_map(ds, ti, maps) if parts else zero_map(zero_module(e.algebra), ti)
    return FpFunctor(g, e, check=False)


def completion_crosscheck(e: ExactSubcat, window: tuple[int, int] = DEFAULT_WINDOW,
                          universe: DerivedUniverse | None = None) -> CrosscheckReport:
    """Send each LH^b generator X to coker Y(d_X^{-1}) and compare with R^b(E).

    Functors are compared as modules over End(T')^op, where T' drops the
    generators whose simple functor is effaceable (the quotient by the
    effaceable functors).  The completion side is enumerated on its own:
    indecomposable modules of finite projective dimension.
    """
    from .functors import FpFunctor, end_transport, find_functor_iso, is_effaceable, projective_dimension
    notes = []
    desc = compute_heart(e, "LHb", window, universe)
    cxs = [g.complex for g in desc.generators]
    for g in desc.generators:
        if not g.complex.is_zero() and g.complex.hi > 0:
            notes.append(f"{g.name}: no representative in non-positive degrees")
    functors = [FpFunctor(x.diff(-1), e, check=False) for x in cxs]

    eff, unknown = [], False
    for i in range(len(e.generators)):
        v = is_effaceable(_simple_functor(e, i))
        if v.status == UNKNOWN:
            unknown = True
        elif v.yes:
            eff.append(i)
    keep = [t for i, t in enumerate(e.generators) if i not in eff]
    ek = ExactSubcat(e.algebra, keep, SPLIT, name=e.name + "'", check=False)
    tr = end_transport(ek)
    mods = [tr.functor_to_module(FpFunctor(F.presentation, ek, check=False)) for F in functors]

    heart_hom = [[hyper_hom(x, y, route="resolution").dim for y in cxs] for x in cxs]
    comp_hom = [[hom_dim(a, b) for b in mods] for a in mods]

    rb = [m for m in enumerate_indecomposables(tr.gamma) if projective_dimension(m) is not None]
    matched = set()
    images_ok = True
    for m in mods:
        hits = [k for k, r in enumerate(rb) if r.dims == m.dims and is_isomorphic(r, m)]
        if len(hits) != 1 or hits[0] in matched:
            images_ok = False
            notes.append(f"image {m.dims} is not a new indecomposable of R^b")
        else:
            matched.add(hits[0])

    stalks_ok = True
    for g, F in zip(desc.generators, functors):
        x = g.complex
        if not x.is_zero() and x.lo == x.hi == 0:
            if find_functor_iso(F, FpFunctor.representable(x.term(0), e)) is None:
                stalks_ok = False
    for t in e.generators:
        if not any(x.lo == x.hi == 0 and is_isomorphic(x.term(0), t) for x in cxs if not x.is_zero()):
            stalks_ok = False
            notes.append(f"generator {t.dims} of E is missing from the heart as a stalk")

    agree = (len(cxs) == len(rb) and heart_hom == comp_hom and images_ok and stalks_ok and not notes)
    if eff:
        model = "quotient by effaceable simples, then finite projective dimension"
    else:
        model = "no effaceable functors: finite projective dimension"
    if not agree:
        status = "mismatch"
    elif eff or unknown or desc.truncated:
        status = "consistent up to bound"
    else:
        status = "equal"
    return CrosscheckReport(status, desc.names, len(cxs), len(rb), heart_hom, comp_hom, eff, model, stalks_ok, notes)
