import random

import pytest
from hypothesis import given, settings, strategies as st

from exacthearts.complexes import Complex, check_homotopy, is_quasi_iso, zero_chain_map
from exacthearts.functors import FpFunctor, FunctorMap, find_functor_iso
from exacthearts.linalg import InputError
from exacthearts.modules import direct_sum, identity_map, is_split_epi, row_map, zero_map, zero_module
from exacthearts.resolutions import (
    LiftError,
    ext_resolution,
    extend_to_chain_map,
    horseshoe,
    null_homotopy_after_qis,
    pad_presentation,
    transfer_resolution,
)

from conftest import make_a2, make_dual
from instances import horseshoe_instance, lift_instance, null_homotopy_instance, pad_instance, random_resolution

A2, D = make_a2(), make_dual()
STRUCTURES = {"mod": A2.mod, "proj": A2.proj, "dual": D.E}


def test_ext_resolution_rejects_bad_input(a2):
    with pytest.raises(InputError):
        ext_resolution(Complex.stalk(a2.P1).shift(-1), a2.mod)
    with pytest.raises(InputError):
        ext_resolution(Complex.stalk(a2.P1), a2.E)
    y = ext_resolution(Complex.from_maps(-2, [a2.inc, a2.sur]), a2.mod)
    assert set(y.acyclicity) == {-2, -1}


def test_lift_of_identity_keeps_the_complex(a2):
    y_c = Complex.from_maps(-1, [a2.inc])
    y = ext_resolution(y_c, a2.proj)
    r = extend_to_chain_map(y_c, y, identity_map(a2.P2), identity_map(a2.P1))
    assert r.w == y_c
    assert all(r.verify(a2.proj).values())


def test_lift_needs_a_pullback(a2):
    z = zero_module(a2.A)
    y = ext_resolution(Complex(a2.A, {-3: a2.P1, -2: a2.P2, -1: a2.I2}, {-3: a2.inc, -2: a2.sur}), a2.mod)
    x = Complex(a2.A, {-2: a2.I2, -1: a2.I2}, {-2: identity_map(a2.I2)})
    r = extend_to_chain_map(x, y, zero_map(z, z), identity_map(a2.I2))
    assert r.w != x
    assert r.w.term(-2).dims == (2, 1)
    assert all(r.verify(a2.mod).values())


def test_lift_rejects_noncommuting_seed(a2):
    y = ext_resolution(Complex.from_maps(-1, [a2.inc]), a2.proj)
    x = Complex.from_maps(-1, [a2.inc])
    with pytest.raises(InputError, match="commute"):
        extend_to_chain_map(x, y, identity_map(a2.P2), zero_map(a2.P1, a2.P1))


def test_null_homotopy_of_zero(a2):
    y_c = Complex.from_maps(-1, [a2.inc])
    nh = null_homotopy_after_qis(zero_chain_map(y_c, y_c), zero_map(a2.P2, a2.P1), a2.proj)
    assert nh.w == y_c
    assert all(nh.verify(a2.proj).values())


def test_null_homotopy_checks_degree_zero(a2):
    y_c = Complex.from_maps(-1, [a2.inc])
    from exacthearts.complexes import identity_chain_map
    with pytest.raises(InputError):
        null_homotopy_after_qis(identity_chain_map(y_c), zero_map(a2.P2, a2.P1), a2.proj)


@pytest.mark.parametrize("which", ["mod", "proj"])
def test_horseshoe_on_projective_sequence(a2, which):
    e = {"mod": a2.mod, "proj": a2.proj}[which]
    fe, ff, fg = FpFunctor.representable(a2.P1, e), FpFunctor.representable(a2.P2, e), FpFunctor(a2.inc, e)
    al, be = FunctorMap(fe, ff, a2.inc), FunctorMap(ff, fg, identity_map(a2.P2))
    x = ext_resolution(Complex.stalk(a2.P1), e)
    z = ext_resolution(Complex.from_maps(-1, [a2.inc]), e)
    hs = horseshoe(al, be, x, z)
    assert hs.resolution.complex.term(0).dims == (2, 1)
    assert all(hs.verify().values())


def test_horseshoe_rejects_non_exact(a2):
    e = a2.mod
    fe, ff = FpFunctor.representable(a2.P1, e), FpFunctor.representable(a2.P2, e)
    zero = FunctorMap(fe, ff, zero_map(a2.P1, a2.P2))
    x = ext_resolution(Complex.stalk(a2.P1), e)
    with pytest.raises(InputError):
        horseshoe(zero, FunctorMap(ff, ff, identity_map(a2.P2)), x, ext_resolution(Complex.stalk(a2.P2), e))


def _check_padded(pr, f, e):
    res = pr.resolution
    ext_resolution(res.complex, e)
    assert is_split_epi(pr.t) is not None
    assert find_functor_iso(FpFunctor(res.presentation, e, check=False), FpFunctor(f, e)) is not None
    phi0, phi1 = pr.iso[0], pr.iso[-1]
    assert phi0.is_iso() and phi1.is_iso()
    assert phi0 @ pr.top_row.diff(-1) == res.presentation @ phi1


def test_pad_presentation_examples(a2):
    y = ext_resolution(Complex.from_maps(-2, [a2.inc, a2.sur]), a2.mod)
    pr = pad_presentation(a2.sur, y)
    _check_padded(pr, a2.sur, a2.mod)
    f2 = row_map(direct_sum([a2.P2, a2.P1]), a2.I2, [a2.sur, zero_map(a2.P1, a2.I2)])
    _check_padded(pad_presentation(f2, y), f2, a2.mod)


def test_pad_presentation_rejects_other_functor(a2):
    y = ext_resolution(Complex.stalk(a2.P2), a2.mod)
    with pytest.raises(InputError):
        pad_presentation(a2.sur, y)


def test_transfer_from_mod_to_projectives(a2):
    xm = ext_resolution(Complex.stalk(a2.I2), a2.mod)
    tr = transfer_resolution(xm, a2.proj)
    assert not tr.truncated
    assert tr.w.term(0).dims == (1, 1) and tr.w.term(-1).dims == (1, 0)
    assert is_quasi_iso(tr.f, a2.mod)
    assert tr.resolution(a2.proj).complex == tr.w


def test_transfer_needs_resolving(a2):
    xm = ext_resolution(Complex.stalk(a2.I2), a2.mod)
    with pytest.raises(LiftError, match="deflations"):
        transfer_resolution(xm, a2.E)


# ---------------------------------------------------------------------------
# Random instances


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(sorted(STRUCTURES)))
def test_lift_verifies(seed, which):
    e = STRUCTURES[which]
    inst = lift_instance(e, random.Random(seed))
    if inst is None:
        return
    assert all(extend_to_chain_map(*inst).verify(e).values())


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 10**6))
def test_lift_verifies_when_w_must_grow(seed):
    inst = lift_instance(A2.mod, random.Random(seed), hard=True)
    if inst is None:
        return
    r = extend_to_chain_map(*inst)
    assert r.w != inst[0]
    assert all(r.verify(A2.mod).values())


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(sorted(STRUCTURES)))
def test_null_homotopy_verifies(seed, which):
    e = STRUCTURES[which]
    inst = null_homotopy_instance(e, random.Random(seed))
    if inst is None:
        return
    nh = null_homotopy_after_qis(*inst, e, accept_existing=False)
    assert all(nh.verify(e).values())
    fg = {n: nh.f.comp(n) @ nh.g.comp(n) for n in nh.w.terms}
    assert check_homotopy(type(nh.f)(nh.w, nh.f.target, fg, check=False), nh.h)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(sorted(STRUCTURES)))
def test_horseshoe_verifies(seed, which):
    inst = horseshoe_instance(STRUCTURES[which], random.Random(seed))
    if inst is None:
        return
    assert all(horseshoe(*inst).verify().values())


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(sorted(STRUCTURES)))
def test_pad_verifies(seed, which):
    e = STRUCTURES[which]
    inst = pad_instance(e, random.Random(seed))
    if inst is None:
        return
    _check_padded(pad_presentation(*inst), inst[0], e)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_transfer_verifies(seed):
    xm = random_resolution(A2.mod, random.Random(seed))
    if xm is None:
        return
    tr = transfer_resolution(xm, A2.proj)
    assert not tr.truncated
    assert is_quasi_iso(tr.f, A2.mod)
    assert all(A2.proj.contains(tr.w.term(n)) for n in tr.w.terms)
    ext_resolution(tr.w, A2.proj)
