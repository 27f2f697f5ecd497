"""Random instances for the constructive lemmas, shared by unit and acceptance tests."""
import random

from exacthearts.complexes import Complex, random_chain_map, random_complex, random_map
from exacthearts.linalg import InputError
from exacthearts.modules import factor_through, zero_module
from exacthearts.resolutions import ext_resolution


def brutal_tail(x: Complex, lo: int) -> Complex:
    terms = {n: x.term(n) for n in range(lo, x.hi + 1)}
    diffs = {n: x.diff(n) for n in range(lo, x.hi)}
    return Complex(x.algebra, terms, diffs)


def random_resolution(e, rng: random.Random, lo: int = -3, tries: int = 40):
    """A random Ext-resolution over e, or None if the sampler keeps missing.

    Half the time the top term is zero, which makes lifts into y nontrivial.
    """
    for _ in range(tries):
        if rng.random() < 0.5:
            y = random_complex(e, lo, -1, rng)
            y = Complex(y.algebra, {**y.terms, 0: zero_module(y.algebra)}, dict(y.diffs))
        else:
            y = random_complex(e, lo, 0, rng)
        try:
            return ext_resolution(y, e)
        except InputError:
            continue
    return None


def lift_instance(e, rng: random.Random, hard: bool = False, tries: int = 200):
    """(x, y, f0, f_-1) with a commuting seed square.

    hard=True resamples until f_-1 d_x does not factor through y, so W must grow.
    """
    for _ in range(tries if hard else 1):
        y = random_resolution(e, rng)
        if y is None:
            continue
        x = random_complex(e, -2, 0, rng)
        seed = random_chain_map(brutal_tail(x, -1), brutal_tail(y.complex, -1), rng)
        if hard and factor_through(y.diff(-2), seed.comp(-1) @ x.diff(-2)) is not None:
            continue
        return x, y, seed.comp(0), seed.comp(-1)
    return None


def null_homotopy_instance(e, rng: random.Random):
    """(f, h0) with f null-homotopic by a random h and f^0 = d h0."""
    y = random_resolution(e, rng)
    if y is None:
        return None
    x = random_complex(e, -2, 0, rng)
    Y = y.complex
    h = {n: random_map(x.term(n), Y.term(n - 1), rng) for n in range(x.lo, 1)}
    comps = {}
    for n in range(x.lo, 1):
        c = Y.diff(n - 1) @ h[n]
        if n + 1 in h:
            c = c + h[n + 1] @ x.diff(n)
        comps[n] = c
    from exacthearts.complexes import ChainMap
    return ChainMap(x, Y, comps), h[0]


def horseshoe_instance(e, rng: random.Random, tries: int = 20):
    """(alpha, beta, x, z): middle functor presented by [[d_x, c], [0, d_z]] for random c."""
    from exacthearts.functors import FpFunctor, FunctorMap, is_short_exact_functors
    from exacthearts.modules import direct_sum, map_from_blocks

    for _ in range(tries):
        x, z = random_resolution(e, rng, lo=-2), random_resolution(e, rng, lo=-2)
        if x is None or z is None:
            continue
        dx, dz = x.presentation, z.presentation
        c = random_map(dz.source, dx.target, rng)
        s1 = direct_sum([dx.source, dz.source])
        s0 = direct_sum([dx.target, dz.target])
        f = map_from_blocks(s1, s0, [[dx, c], [None, dz]])
        fx, fz, ff = FpFunctor(dx, e, check=False), FpFunctor(dz, e, check=False), FpFunctor(f, e)
        alpha = FunctorMap(fx, ff, s0.inclusions[0])
        beta = FunctorMap(ff, fz, s0.projections[1])
        if is_short_exact_functors(alpha, beta):
            return alpha, beta, x, z
    return None


def pad_instance(e, rng: random.Random):
    """(f, y): f presents the same functor as y, disguised by a trivial summand and automorphisms."""
    from exacthearts.modules import direct_sum, direct_sum_of_maps, identity_map, zero_map

    y = random_resolution(e, rng)
    if y is None:
        return None
    d = y.presentation
    k = rng.choice(e.generators)
    f = direct_sum_of_maps([d, identity_map(k)])
    if rng.random() < 0.5:
        k2 = rng.choice(e.generators)
        z = zero_module(e.algebra)
        f = direct_sum_of_maps([f, zero_map(k2, z)])
    a, b = random_auto(f.target, rng), random_auto(f.source, rng)
    return a @ f @ b, y


def random_auto(m, rng: random.Random, tries: int = 50):
    from exacthearts.modules import identity_map

    for _ in range(tries):
        g = random_map(m, m, rng)
        if g.is_iso():
            return g
    return identity_map(m)


def transfer_instance(amb, rng: random.Random):
    return random_resolution(amb, rng)


def random_functor(e, rng: random.Random, max_summands: int = 2):
    """coker Y(f) for a random map f between random sums of generators."""
    from exacthearts.functors import FpFunctor
    from exacthearts.modules import direct_sum

    def obj():
        k = rng.randint(1, max_summands)
        return direct_sum([rng.choice(e.generators) for _ in range(k)], e.algebra).module

    return FpFunctor(random_map(obj(), obj(), rng), e)
