"""Ext-resolutions and the constructions that move data between them.

Every construction here is an induction over pullback squares

    P^{n-1} --b--> W^n
       |q           |p
    X^{n-1} --a--> P^n

descending one degree at a time.  Each step consumes an explicit lifting
witness from the left Ext-acyclicity classifier, so a step that cannot be
certified raises LiftError instead of guessing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from .complexes import (
    ChainMap,
    Complex,
    Verdict,
    check_homotopy,
    cone,
    find_lift,
    identity_chain_map,
    is_null_homotopic,
    is_quasi_iso,
    left_ext_acyclic_at,
)
from .exact import ExactSubcat, approximation, check_resolving, is_conflation, is_deflation
from .linalg import InputError, Matrix, kernel_basis
from .modules import (
    Module,
    ModuleMap,
    column_map,
    direct_sum,
    factor_through,
    hom_dim,
    hom_space,
    identity_map,
    is_split_epi,
    is_split_mono,
    lift_through_mono,
    map_from_blocks,
    pullback,
    row_map,
    solve_combination,
    zero_map,
    zero_module,
)

DEFAULT_MAX_STEPS = 32


class LiftError(RuntimeError):
    """A construction step has no certified witness."""


# ---------------------------------------------------------------------------
# Ext-resolutions


@dataclass
class ExtResolution:
    complex: Complex
    e: ExactSubcat
    acyclicity: dict[int, Verdict]

    @property
    def bounded(self) -> bool:
        return True

    @property
    def presentation(self) -> ModuleMap:
        return self.complex.diff(-1)

    def term(self, n: int) -> Module:
        return self.complex.term(n)

    def diff(self, n: int) -> ModuleMap:
        return self.complex.diff(n)


def ext_resolution(x: Complex, e: ExactSubcat, mode: str = "auto") -> ExtResolution:
    """Certify x as an Ext-resolution: supported in degrees <= 0, left Ext-acyclic below 0."""
    if not x.is_zero() and x.hi > 0:
        raise InputError("an Ext-resolution lives in non-positive degrees")
    for n in x.terms:
        if not e.contains(x.term(n)):
            raise InputError(f"term in degree {n} is not in {e.name}")
    verdicts = {}
    for n in range(min(x.lo, 0), 0):
        v = left_ext_acyclic_at(x.diff(n - 1), x.diff(n), e, mode)
        if v.status != "yes":
            raise InputError(f"not left Ext-acyclic in degree {n}: {v.status} ({v.detail})")
        verdicts[n] = v
    return ExtResolution(x, e, verdicts)


def _ext_lift(d: ModuleMap, a: ModuleMap, e: ExactSubcat) -> tuple[ModuleMap, ModuleMap]:
    """(p, b) with p an E-deflation onto a.source and a p = d b; plain factorisation first."""
    b = factor_through(d, a)
    if b is not None:
        return identity_map(a.source), b
    w = find_lift(d, a, e)
    if w is None:
        raise LiftError("cannot lift: Tier-C unknown (no deflation witness within the kernel bound)")
    return w.p, w.b


def _is_identity(p: ModuleMap) -> bool:
    return p.source == p.target and p == identity_map(p.source)


def _pullback_step(a: ModuleMap, p: ModuleMap) -> tuple[Module, ModuleMap, ModuleMap]:
    """Pullback of X -a-> P <-p- W as (P', q: P' -> X, b: P' -> W); trivial along identities."""
    if _is_identity(p):
        return a.source, identity_map(a.source), a
    pb = pullback(a, p)
    return pb.module, pb.to_left, pb.to_right


def _into_pullback(q: ModuleMap, b: ModuleMap, left: ModuleMap, right: ModuleMap) -> ModuleMap:
    """The map into P with q∘(-) = left and b∘(-) = right; (q, b) is jointly monic."""
    s = direct_sum([q.target, b.target])
    mono = column_map(q.source, s, [q, b])
    return lift_through_mono(mono, column_map(left.source, s, [left, right]))


@dataclass
class _Square:
    """The state at degree n of the descending induction."""
    P: Module
    q: ModuleMap   # P^n -> X^n
    b: ModuleMap   # P^n -> W^{n+1}
    p: ModuleMap   # W^n -> P^n
    W: Module


def _conflation(prev: _Square, cur: _Square, a: ModuleMap, e: ExactSubcat):
    """P^{n-1} -> W^n ⊕ X^{n-1} -> P^n from the pullback square."""
    s = direct_sum([cur.W, prev.q.target])
    i = column_map(prev.P, s, [prev.b, prev.q])
    pi = row_map(s, cur.P, [-cur.p, a])
    return is_conflation(i, pi, e)


def _assemble(x: Complex, squares: dict[int, _Square], keep_from: int) -> tuple[Complex, ChainMap]:
    """W with d_W^{n} = b^{n} p^{n} below keep_from and X above; g = q p."""
    alg = x.algebra
    terms = {n: sq.W for n, sq in squares.items()}
    diffs = {}
    for n, sq in squares.items():
        if n + 1 not in squares:
            continue
        diffs[n] = x.diff(n) if n >= keep_from else sq.b @ sq.p
    w = Complex(alg, terms, diffs, check=False)
    g = ChainMap(w, x, {n: sq.q @ sq.p for n, sq in squares.items() if n in x.terms}, check=False)
    return w, g


# ---------------------------------------------------------------------------
# Extending a partial map into an Ext-resolution


@dataclass
class LiftResult:
    w: Complex
    g: ChainMap
    f_hat: ChainMap
    seed: dict[int, ModuleMap]
    conflations: dict = dc_field(default_factory=dict)

    def verify(self, e: ExactSubcat) -> dict[str, bool]:
        out = {}
        try:
            ChainMap(self.w, self.g.target, self.g.comps)
            ChainMap(self.w, self.f_hat.target, self.f_hat.comps)
            out["chain_maps"] = True
        except InputError:
            out["chain_maps"] = False
        out["quasi_iso"] = is_quasi_iso(self.g, e)
        agree = True
        for n, f in self.seed.items():
            if self.w.term(n) != self.g.target.term(n) or self.g.comp(n) != identity_map(self.w.term(n)):
                agree = False
            elif self.f_hat.comp(n) != f:
                agree = False
        out["agreement"] = agree
        out["conflations"] = all(bool(c) for c in self.conflations.values())
        return out


def extend_to_chain_map(
    x: Complex,
    y: ExtResolution,
    f0: ModuleMap,
    f_minus1: ModuleMap,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> LiftResult:
    """Extend f0, f_minus1 to a chain map W -> Y after an E-quasi-isomorphism W -> X.

    x may have terms in positive degrees as long as y vanishes there; W agrees
    with x in degrees >= -1.
    """
    e = y.e
    Y = y.complex
    if f0.source != x.term(0) or f0.target != Y.term(0):
        raise InputError("f0 has the wrong endpoints")
    if f_minus1.source != x.term(-1) or f_minus1.target != Y.term(-1):
        raise InputError("f_minus1 has the wrong endpoints")
    if f0 @ x.diff(-1) != Y.diff(-1) @ f_minus1:
        raise InputError("the seed square does not commute")
    top = max(x.hi, 0)
    seed = {0: f0, -1: f_minus1}
    for n in range(1, top + 1):
        seed[n] = zero_map(x.term(n), Y.term(n))
    squares: dict[int, _Square] = {}
    fh: dict[int, ModuleMap] = dict(seed)
    for n in range(-1, top + 1):
        xn = x.term(n)
        squares[n] = _Square(xn, identity_map(xn), x.diff(n), identity_map(xn), xn)
    conflations = {}
    n = -1
    steps = 0
    while True:
        cur = squares[n]
        a = _into_pullback(cur.q, cur.b, x.diff(n - 1), zero_map(x.term(n - 1), cur.b.target))
        P, q, b = _pullback_step(a, cur.p)
        if P.is_zero() and n - 1 < x.lo:
            break
        steps += 1
        if steps > max_steps:
            raise LiftError(f"no termination within {max_steps} steps")
        if not e.contains(P):
            raise LiftError(f"pullback in degree {n - 1} is not in {e.name}")
        p, fn = _ext_lift(Y.diff(n - 1), fh[n] @ b, e)
        prev = _Square(P, q, b, p, p.source)
        conflations[n - 1] = _conflation(prev, cur, a, e)
        squares[n - 1] = prev
        fh[n - 1] = fn
        n -= 1
    w, g = _assemble(x, squares, -1)
    f_hat = ChainMap(w, Y, {k: v for k, v in fh.items() if k in w.terms}, check=False)
    return LiftResult(w, g, f_hat, seed, conflations)


# ---------------------------------------------------------------------------
# Null-homotopies after a quasi-isomorphism


@dataclass
class NullHomotopyResult:
    w: Complex
    g: ChainMap
    h: dict[int, ModuleMap]
    f: ChainMap
    conflations: dict = dc_field(default_factory=dict)

    def verify(self, e: ExactSubcat | None = None) -> dict[str, bool]:
        fg = _compose(self.f, self.g)
        out = {"homotopy": check_homotopy(fg, self.h)}
        if e is not None:
            out["quasi_iso"] = is_quasi_iso(self.g, e)
            out["conflations"] = all(bool(c) for c in self.conflations.values())
        return out


def _compose(f: ChainMap, g: ChainMap) -> ChainMap:
    comps = {n: f.comp(n) @ g.comp(n) for n in g.source.terms}
    return ChainMap(g.source, f.target, comps, check=False)


def null_homotopy_after_qis(
    f: ChainMap,
    h0: ModuleMap,
    e: ExactSubcat,
    accept_existing: bool = True,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> NullHomotopyResult:
    """A quasi-isomorphism g: W -> X and h with f g = d h + h d, given f^0 = d_Y^{-1} h0."""
    X, Y = f.source, f.target
    if X.hi > 0 or Y.hi > 0:
        raise InputError("both complexes must live in non-positive degrees")
    if h0.source != X.term(0) or h0.target != Y.term(-1):
        raise InputError("h0 has the wrong endpoints")
    if f.comp(0) != Y.diff(-1) @ h0:
        raise InputError("f^0 differs from d_Y^{-1} h0")
    if accept_existing:
        h = is_null_homotopic(f)
        if h is not None:
            return NullHomotopyResult(X, identity_chain_map(X), h, f)
    x0 = X.term(0)
    squares = {0: _Square(x0, identity_map(x0), X.diff(0), identity_map(x0), x0)}
    h = {0: h0}
    conflations = {}
    n = 0
    steps = 0
    while True:
        cur = squares[n]
        a = _into_pullback(cur.q, cur.b, X.diff(n - 1), zero_map(X.term(n - 1), cur.b.target))
        P, q, b = _pullback_step(a, cur.p)
        if P.is_zero() and n - 1 < X.lo:
            break
        steps += 1
        if steps > max_steps:
            raise LiftError(f"no termination within {max_steps} steps")
        if not e.contains(P):
            raise LiftError(f"pullback in degree {n - 1} is not in {e.name}")
        c = f.comp(n - 1) @ q - h[n] @ b
        p, hn = _ext_lift(Y.diff(n - 2), c, e)
        prev = _Square(P, q, b, p, p.source)
        conflations[n - 1] = _conflation(prev, cur, a, e)
        squares[n - 1] = prev
        h[n - 1] = hn
        n -= 1
    w, g = _assemble(X, squares, 0)
    h = {k: v for k, v in h.items() if k in w.terms and not v.is_zero()}
    return NullHomotopyResult(w, g, h, f, conflations)


# ---------------------------------------------------------------------------
# Horseshoe


@dataclass
class HorseshoeResult:
    w: Complex
    g: ChainMap              # W -> Z
    f: ChainMap              # Σ^{-1} W -> X
    resolution: ExtResolution
    comparison: object       # FunctorMap coker Y(d^{-1}) -> middle functor
    lift: LiftResult
    inclusion: ChainMap | None = None   # x -> resolution
    projection: ChainMap | None = None  # resolution -> w

    def verify(self) -> dict[str, bool]:
        """Re-check the output: degreewise and functor-level short exactness at every generator."""
        from .functors import FpFunctor, FunctorMap, is_short_exact_functors

        e = self.resolution.e
        R = self.resolution.complex
        out = {"comparison_iso": self.comparison.is_iso()}
        out.update({f"lift_{k}": v for k, v in self.lift.verify(e).items()})
        deg_ok = True
        for n in range(R.lo, R.hi + 1):
            i, p = self.inclusion.comp(n), self.projection.comp(n)
            if not (p @ i).is_zero() or is_split_mono(i) is None or is_split_epi(p) is None:
                deg_ok = False
            for g in e.generators:
                if hom_dim(g, i.source) + hom_dim(g, p.target) != hom_dim(g, R.term(n)):
                    deg_ok = False
        out["degreewise"] = deg_ok
        fx = FpFunctor(self.inclusion.source.diff(-1), e, check=False)
        fr = FpFunctor(R.diff(-1), e, check=False)
        fw = FpFunctor(self.w.diff(-1), e, check=False)
        al = FunctorMap(fx, fr, self.inclusion.comp(0), check=False)
        be = FunctorMap(fr, fw, self.projection.comp(0), check=False)
        out["functors_short_exact"] = is_short_exact_functors(al, be)
        return out


def horseshoe(alpha, beta, x: ExtResolution, z: ExtResolution) -> HorseshoeResult:
    """Resolve the middle term of 0 -> E -alpha-> F -beta-> G -> 0 from resolutions of E and G."""
    from .functors import FpFunctor, FunctorMap, find_functor_iso, is_short_exact_functors

    e = x.e
    if not is_short_exact_functors(alpha, beta):
        raise InputError("the sequence of functors is not short exact")
    Fx = FpFunctor(x.presentation, e, check=False)
    Fz = FpFunctor(z.presentation, e, check=False)
    iso_x = find_functor_iso(Fx, alpha.source)
    iso_z = find_functor_iso(beta.target, Fz)
    if iso_x is None or iso_z is None:
        raise InputError("the resolutions do not resolve the end terms")
    a_top = (alpha @ iso_x[0]).top          # X^0 -> N_F
    b_top = (iso_z[0] @ beta).top           # N_F -> Z^0
    F = alpha.target
    fF = F.presentation
    dX, dZ = x.diff(-1), z.diff(-1)
    Z0, Z1 = z.term(0), z.term(-1)

    # s: Z^0 -> N_F with b s = id modulo d_Z
    s_basis = hom_space(Z0, F.top).basis
    t_basis = hom_space(Z0, Z1).basis
    coeffs = solve_combination([b_top @ s for s in s_basis] + [-(dZ @ t) for t in t_basis], identity_map(Z0))
    if coeffs is None:
        raise LiftError("no lift of the top of the right term")
    s = zero_map(Z0, F.top)
    for c, m in zip(coeffs, s_basis):
        if c:
            s = s + m.scale(c)

    # f^0: Z^{-1} -> X^0 with a f^0 + s d_Z factoring through f_F
    phi_basis = hom_space(Z1, x.term(0)).basis
    u_basis = hom_space(Z1, fF.source).basis
    coeffs = solve_combination([a_top @ m for m in phi_basis] + [-(fF @ u) for u in u_basis], -(s @ dZ))
    if coeffs is None:
        raise LiftError("no connecting map in degree 0")
    f0 = zero_map(Z1, x.term(0))
    for c, m in zip(coeffs, phi_basis):
        if c:
            f0 = f0 + m.scale(c)

    # f^{-1}: Z^{-2} -> X^{-1} with d_X f^{-1} = -f^0 d_Z
    f1 = factor_through(dX, -(f0 @ z.diff(-2)))
    if f1 is None:
        raise LiftError("no connecting map in degree -1")

    src = z.complex.shift(-1)
    lift = extend_to_chain_map(src, x, f0, f1)
    cn = cone(lift.f_hat)
    c = cn.complex
    res = ext_resolution(c, e)
    cz = c.term(0)
    # cone^0 = Z^0 ⊕ X^0 in that order
    comp_top = row_map(direct_sum([Z0, x.term(0)]), F.top, [s, a_top])
    comparison = FunctorMap(FpFunctor(c.diff(-1), e, check=False), F, comp_top)
    if cz != comp_top.source or not comparison.is_iso():
        raise LiftError("reconstructed presentation does not recover the middle functor")
    return HorseshoeResult(lift.w.shift(1), lift.g.shift(1), lift.f_hat, res, comparison, lift,
                           cn.inclusion, cn.projection)


# ---------------------------------------------------------------------------
# Padding a presentation to an Ext-resolution


@dataclass
class PaddedResolution:
    resolution: ExtResolution
    top_row: Complex
    iso: dict[int, ModuleMap]          # top row -> resolution, degrees 0 and -1
    u: tuple[ModuleMap, ModuleMap]     # (u^{-1}, u^0): Y -> (M -> N)
    v: tuple[ModuleMap, ModuleMap]     # (v^{-1}, v^0): (M -> N) -> Y
    sigma: ModuleMap
    tau: ModuleMap
    t: ModuleMap                       # the split epi with d^{-1} = f ⊕ t


def pad_presentation(f: ModuleMap, y: ExtResolution, seed: int = 0, tries: int = 400) -> PaddedResolution:
    """An Ext-resolution whose last differential is f ⊕ t with t a split epimorphism."""
    from .functors import FpFunctor, find_functor_iso

    e = y.e
    Y = y.complex
    dY = y.presentation
    M, N = f.source, f.target
    Y0, Y1 = Y.term(0), Y.term(-1)
    found = find_functor_iso(FpFunctor(dY, e, check=False), FpFunctor(f, e), seed)
    if found is None:
        raise InputError("the cokernel functors of f and of the resolution differ")
    u0, v0 = found[0].top, found[1].top
    u1 = factor_through(f, u0 @ dY)
    v1 = factor_through(dY, v0 @ f)
    sigma = factor_through(dY, identity_map(Y0) - v0 @ u0)
    tau = factor_through(f, identity_map(N) - u0 @ v0)
    if None in (u1, v1, sigma, tau):
        raise LiftError("comparison maps between the presentations are inconsistent")

    alg = f.algebra
    s0 = direct_sum([Y0, N], alg)
    s1 = direct_sum([Y0, M, Y1, N], alg)
    s2 = direct_sum([Y0, M, Y.term(-2)], alg)
    d1_top = map_from_blocks(s1, s0, [[None, None, dY, None], [None, None, None, identity_map(N)]])
    d2_top = map_from_blocks(s2, s1, [
        [identity_map(Y0), None, None],
        [None, identity_map(M), None],
        [None, None, Y.diff(-2)],
        [None, None, None],
    ])
    d1_bot = map_from_blocks(s1, s0, [[identity_map(Y0), None, None, None], [None, f, None, None]])
    terms = {n: Y.term(n) for n in Y.terms if n <= -3}
    terms.update({0: s0.module, -1: s1.module, -2: s2.module})
    diffs = {n: Y.diff(n) for n in Y.terms if n <= -4}
    s3 = Y.term(-3)
    d3_top = column_map(s3, s2, [zero_map(s3, Y0), zero_map(s3, M), Y.diff(-3)])
    top_row = Complex(alg, terms, {**diffs, -3: d3_top, -2: d2_top, -1: d1_top})

    phi0, phi1 = _solve_vertical_isos(d1_top, d1_bot, seed, tries)
    bottom = Complex(alg, terms, {**diffs, -3: d3_top, -2: phi1 @ d2_top, -1: d1_bot})
    res = ext_resolution(bottom, e)
    t = row_map(direct_sum([Y0, Y1, N], alg), Y0, [identity_map(Y0), zero_map(Y1, Y0), zero_map(N, Y0)])
    return PaddedResolution(res, top_row, {0: phi0, -1: phi1}, (u1, u0), (v1, v0), sigma, tau, t)


def _solve_vertical_isos(d_top: ModuleMap, d_bot: ModuleMap, seed: int, tries: int) -> tuple[ModuleMap, ModuleMap]:
    """Invertible (Φ0, Φ1) with Φ0 d_top = d_bot Φ1, sampled from the linear solution space."""
    c0, c1 = d_top.target, d_top.source
    field = d_top.field
    e0 = hom_space(c0, c0).basis
    e1 = hom_space(c1, c1).basis
    cols = [(m @ d_top).vec() for m in e0] + [(-(d_bot @ m)).vec() for m in e1]
    rows = len(cols[0]) if cols else 0
    mat = Matrix.from_columns(field, rows, cols)
    sols = [list(c) for c in kernel_basis(mat).columns()]
    rng = random.Random(seed)
    for _ in range(tries):
        coeffs = [field(rng.randrange(field.p)) if field.p else field(rng.randint(-3, 3)) for _ in sols]
        vec = [field.zero()] * len(cols)
        for c, s in zip(coeffs, sols):
            if c:
                vec = [a + c * b for a, b in zip(vec, s)]
        if field.p:
            vec = [v % field.p for v in vec]
        phi0 = zero_map(c0, c0)
        for c, m in zip(vec[: len(e0)], e0):
            if c:
                phi0 = phi0 + m.scale(c)
        phi1 = zero_map(c1, c1)
        for c, m in zip(vec[len(e0):], e1):
            if c:
                phi1 = phi1 + m.scale(c)
        if phi0.is_iso() and phi1.is_iso():
            return phi0, phi1
    raise LiftError("no invertible comparison between the padded presentations was sampled")


# ---------------------------------------------------------------------------
# Transfer along a resolving subcategory


@dataclass
class TransferResult:
    w: Complex
    f: ChainMap
    truncated: bool
    conflations: dict = dc_field(default_factory=dict)

    def resolution(self, e: ExactSubcat) -> ExtResolution:
        if self.truncated:
            raise LiftError("transfer was truncated; no bounded resolution")
        return ext_resolution(self.w, e)


def transfer_resolution(
    x: ExtResolution,
    e: ExactSubcat,
    verify_resolving: bool = True,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> TransferResult:
    """An Ext_E-resolution W with an F-quasi-isomorphism W -> X, for E resolving in F = x.e."""
    amb = x.e
    X = x.complex
    if verify_resolving:
        rep = check_resolving(e, amb)
        if rep.r1 != "holds":
            raise LiftError(f"{e.name} does not generate {amb.name} by deflations: {rep.r1_detail}")
        if rep.r2 == "fails":
            raise LiftError(f"{e.name} is not deflation-closed in {amb.name}: {rep.r2_detail}")
    x0 = X.term(0)
    # the square at degree 0 before choosing p^0; W^1 = 0
    P, q, b = x0, identity_map(x0), zero_map(x0, zero_module(X.algebra))
    squares: dict[int, _Square] = {}
    conflations = {}
    n = 0
    steps = 0
    truncated = False
    while True:
        if e.contains(P):
            p = identity_map(P)
        else:
            p = approximation(e, P)
            if not is_deflation(p, amb):
                raise LiftError(f"no deflation from {e.name} onto the object {P.dims} in degree {n}")
        cur = _Square(P, q, b, p, p.source)
        squares[n] = cur
        a = _into_pullback(cur.q, cur.b, X.diff(n - 1), zero_map(X.term(n - 1), cur.b.target))
        P, q, b = _pullback_step(a, cur.p)
        conflations[n - 1] = (a, cur)
        if P.is_zero() and n - 1 < X.lo:
            break
        steps += 1
        if steps > max_steps:
            truncated = True
            break
        n -= 1
    w, f = _assemble(X, squares, 1)
    certs = {}
    for k, (a, cur) in conflations.items():
        prev = squares.get(k)
        if prev is not None:
            certs[k] = _conflation(prev, cur, a, amb)
    return TransferResult(w, f, truncated, certs)
