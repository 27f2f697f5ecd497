import random

import pytest
from hypothesis import given, settings, strategies as st

from exacthearts.complexes import Complex, hyper_hom, random_complex
from exacthearts.hearts import (
    DObject,
    DerivedUniverse,
    NotApplicable,
    characterize_maximal_nonnegativity,
    completion_crosscheck,
    compute_heart,
    ext_kernel,
    heart_membership,
    maximal_t_pairs,
    region_membership,
    scan_heart,
    standard_t_structure,
    verify_t_pair,
)
from exacthearts.modules import zero_map

from conftest import make_a2

A2 = make_a2()
U_A2 = DerivedUniverse(A2.A, (-3, 3))


def test_universe_lists_indecomposables():
    assert [m.dims for m in U_A2.modules] == [(1, 0), (1, 1), (0, 1)]
    assert U_A2.name(DObject(1, 0)) == "shift(P1,1)"


def test_region_membership_examples(a2):
    x = Complex.from_maps(-1, [a2.inc, a2.sur])
    for spec in ("U", "V_left", "V"):
        assert region_membership(x, spec, a2.mod).status == "yes"
    y = Complex.from_maps(-1, [a2.sur])
    assert region_membership(y, "V_left", a2.E).status == "yes"
    assert region_membership(y, "V", a2.E).status == "no"


@pytest.mark.parametrize("which,expected", [
    ("LHb", ["P2", "I2", "shift(P1,1)"]),
    ("RHb", ["P1", "P2", "I2"]),
])
def test_heart_membership_scan_over_stalks(which, expected):
    e = A2.E
    members = [U_A2.name(o) for o in U_A2.objects() if heart_membership(U_A2.representative(o, e), which, e).yes]
    assert members == expected


def test_abelian_hearts_are_the_module_category(a2):
    for which in ("LHb", "RHb"):
        assert compute_heart(a2.mod, which).names == ["P1", "P2", "I2"]


def test_compute_heart_a2(a2):
    assert compute_heart(a2.E, "LHb").names == ["P2", "I2", "shift(P1,1)"]
    assert compute_heart(a2.E, "RHb").names == ["P1", "P2", "I2"]
    assert compute_heart(a2.E, "LHb(RHb)").names == compute_heart(a2.E, "RHb").names
    assert compute_heart(a2.E, "RHb(LHb)").names == compute_heart(a2.E, "LHb").names


def test_compute_heart_hom_table_is_nonnegative(a2):
    d = compute_heart(a2.E, "LHb")
    assert d.is_nonnegative()
    assert d.as_dict()["generators"] == d.names


def test_split_non_hereditary_heart_is_scanned(dual):
    d = compute_heart(dual.E, "LHb")
    assert d.names == ["P1"]
    assert d.hom_table[0] == [[2]]
    assert any("scan" in n for n in d.notes)
    with pytest.raises(NotApplicable):
        compute_heart(dual.E, "LHb(RHb)")


def test_scan_heart_finds_only_stalks(dual):
    for which in ("LHb", "RHb"):
        r = scan_heart(dual.E, which)
        assert r.checked > 0 and r.non_stalk_members == [] and not r.unknown


def test_ext_kernel_examples(a2, dual):
    k = ext_kernel(dual.tm, dual.E)
    assert k.map.comps[0].rank() == 1
    assert ext_kernel(zero_map(dual.L, dual.L), dual.E).map.is_iso()
    assert ext_kernel(a2.inc, a2.mod).map.source.is_zero()


def test_standard_t_structure_is_a_t_pair():
    u, v = standard_t_structure(U_A2)
    r = verify_t_pair(u, v, U_A2)
    assert r.t_pair and r.left_maximal and r.right_maximal


def test_bad_pair_is_rejected():
    u, v = standard_t_structure(U_A2)
    r = verify_t_pair(v, u, U_A2)
    assert not r.orthogonal and r.violations


def test_maximal_t_pairs_a2(a2):
    m = maximal_t_pairs(a2.E)
    assert m.left.t_pair and m.right.t_pair
    assert m.hearts_match
    assert m.left_heart == ["P2", "I2", "shift(P1,1)"]


def test_completion_crosscheck(a2):
    for e in (a2.E, a2.proj):
        r = completion_crosscheck(e)
        assert r.status == "equal"
        assert r.heart_count == r.completion_count == 3
        assert r.heart_hom == r.completion_hom
    r = completion_crosscheck(a2.mod)
    assert r.heart_count == r.completion_count and r.heart_hom == r.completion_hom


def test_characterization_agrees(a2, dual):
    for e, expected in ((dual.E, True), (a2.E, False), (a2.proj, False), (a2.mod, True), (a2.P2I2, False)):
        c = characterize_maximal_nonnegativity(e)
        assert c.hearts_are_e == c.coaisles_agree == c.mono_epi == expected


# an abelian structure's hearts are always the stalks in degree zero
@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_heart_members_in_mod_are_degree_zero_stalks(seed):
    rng = random.Random(seed)
    x = random_complex(A2.mod, -1, 1, rng)
    if heart_membership(x, "LHb", A2.mod).yes:
        for n in range(x.lo, x.hi + 1):
            if n != 0:
                assert x.homology(n).is_zero()


def test_universe_hom_matches_hyper_hom():
    objs = U_A2.objects((-1, 1))
    for a in objs:
        ca = Complex.stalk(U_A2.modules[a.module]).shift(a.shift)
        for b in objs:
            cb = Complex.stalk(U_A2.modules[b.module]).shift(b.shift)
            assert U_A2.hom(a, b) == hyper_hom(ca, cb, route="resolution").dim, (a, b)
