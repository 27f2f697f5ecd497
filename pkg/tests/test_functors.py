import random

import pytest
from hypothesis import given, settings, strategies as st

from exacthearts.exact import SPLIT, ExactSubcat
from exacthearts.functors import (
    CompletionDescriptor,
    FpFunctor,
    FunctorMap,
    end_transport,
    fraction_invertible,
    is_effaceable,
    membership_completion,
    projective_dimension,
)
from exacthearts.linalg import InputError
from exacthearts.modules import hom_dim, identity_map, simple

from conftest import make_a2, make_dual
from instances import random_functor

A2, D = make_a2(), make_dual()
SPLIT_CASES = {
    "a2": ExactSubcat(A2.A, [A2.P1, A2.P2, A2.I2], SPLIT, name="A2s"),
    "dual": D.E,
    "dual+k": ExactSubcat(D.A, [D.L, simple(D.A, 0)], SPLIT, name="LamK"),
}


def test_evaluate_matches_hom_counts(a2):
    F = FpFunctor(a2.sur, a2.mod)
    # generators of mod are P1, P2, I2; only id_I2 fails to factor through sur
    assert F.dims() == (0, 1, 0)
    assert F.evaluate(a2.I2).dim == 1
    assert F.evaluate(a2.P2).dim == 0
    Y = FpFunctor.representable(a2.P2, a2.mod)
    assert Y.dims() == tuple(hom_dim(g, a2.P2) for g in a2.mod.generators)


def test_presentation_must_live_in_e(a2):
    with pytest.raises(InputError):
        FpFunctor(a2.inc, a2.E)


def test_effaceable_examples(a2):
    assert is_effaceable(FpFunctor(a2.sur, a2.mod)).yes
    fe = FpFunctor(a2.sur, a2.E)
    assert fe.dims() == (0, 1)
    assert is_effaceable(fe).no
    assert is_effaceable(FpFunctor.representable(a2.P2, a2.mod)).no


def test_fraction_invertible_examples(a2):
    pr = ExactSubcat(a2.A, [a2.P1, a2.P2], SPLIT, name="Proj")
    fi = fraction_invertible(FunctorMap(FpFunctor.representable(a2.P1, pr), FpFunctor.representable(a2.P2, pr), a2.inc))
    assert fi.invertible is False and fi.kernel.yes and fi.cokernel.no
    fi = fraction_invertible(FunctorMap(FpFunctor.representable(a2.P2, a2.mod),
                                        FpFunctor.representable(a2.I2, a2.mod), a2.sur))
    assert fi.invertible is False and fi.kernel.no and fi.cokernel.yes
    Y = FpFunctor.representable(a2.P2, a2.mod)
    assert fraction_invertible(FunctorMap(Y, Y, identity_map(a2.P2))).invertible is True


def test_end_transport_shapes(a2, dual):
    g = end_transport(dual.E).gamma
    assert g.dim == 2 and len(g.quiver.arrows) == 1 and len(g.relations) == 1
    assert end_transport(ExactSubcat(a2.A, [a2.P2, a2.I2], name="E2")).gamma.dim == 3
    gm = end_transport(a2.mod).gamma
    assert gm.dim == 5 and len(gm.quiver.arrows) == 2


def test_transport_of_functor(a2):
    tr = end_transport(a2.mod)
    assert tr.functor_to_module(FpFunctor(a2.sur, a2.mod)).dims == (0, 1, 0)


def test_membership_examples(a2, dual):
    r = membership_completion(FpFunctor(a2.sur, a2.E), "Rb")
    assert r.status == "yes" and r.length == 1
    r = membership_completion(FpFunctor(dual.tm, dual.E), "Rb")
    assert r.status == "no" and "infinite" in r.detail
    assert membership_completion(FpFunctor.representable(dual.L, dual.E), "Rb").status == "yes"
    assert membership_completion(FpFunctor(dual.tm, dual.E), "R").status == "yes"
    assert membership_completion(FpFunctor(dual.tm, dual.E), "Qlcat").full


def test_completion_descriptor_parse():
    assert CompletionDescriptor.parse("R3") == CompletionDescriptor("Rn", 3)
    assert CompletionDescriptor.parse("Rb").kind == "Rb"
    for bad in ("R0", "S", "Rx"):
        with pytest.raises(InputError):
            CompletionDescriptor.parse(bad)


def test_projective_dimension_over_gamma(dual):
    tr = end_transport(dual.E)
    assert projective_dimension(tr.representable(0)) == 0
    assert projective_dimension(tr.functor_to_module(FpFunctor(dual.tm, dual.E))) is None


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(sorted(SPLIT_CASES)))
def test_split_effaceable_means_zero(seed, which):
    F = random_functor(SPLIT_CASES[which], random.Random(seed))
    assert is_effaceable(F).yes == F.is_zero()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(sorted(SPLIT_CASES)))
def test_split_bounded_completion_is_finite_pd(seed, which):
    e = SPLIT_CASES[which]
    F = random_functor(e, random.Random(seed))
    pd = projective_dimension(end_transport(e).functor_to_module(F))
    assert membership_completion(F, "Rb").status == ("yes" if pd is not None else "no")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(sorted(SPLIT_CASES)))
def test_transport_dims_match_evaluation(seed, which):
    e = SPLIT_CASES[which]
    F = random_functor(e, random.Random(seed))
    m = end_transport(e).functor_to_module(F)
    assert m.dims == F.dims()
