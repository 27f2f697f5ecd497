"""Shared fixture algebras.

kA2 is the path algebra of 2 -> 1 over F_5 (arrow a: 2 -> 1).  Modules:
P1 = S1 = (1,0), P2 = I1 = (1,1), I2 = S2 = (0,1), with inc: P1 -> P2 and
sur: P2 -> I2.  D is k[T]/(T^2) with L its regular module and tm = (.T).
"""

from types import SimpleNamespace

import pytest

from exacthearts.exact import SPLIT, ExactSubcat, whole_module_category
from exacthearts.linalg import Field
from exacthearts.modules import hom_basis, injective, projective, simple
from exacthearts.quiver import Quiver, build_path_algebra, parse_relation


def make_a2(p: int = 5):
    F = Field(p)
    q = Quiver.build(["1", "2"], [("a", "2", "1")])
    A = build_path_algebra(q, [], F)
    ns = SimpleNamespace(F=F, A=A)
    ns.P1, ns.P2 = projective(A, 0), projective(A, 1)
    ns.I1, ns.I2 = injective(A, 0), injective(A, 1)
    ns.S1, ns.S2 = simple(A, 0), simple(A, 1)
    ns.inc = hom_basis(ns.P1, ns.P2)[0]
    ns.sur = hom_basis(ns.P2, ns.I2)[0]
    ns.mod = whole_module_category(A)
    ns.E = ExactSubcat(A, [ns.I1, ns.I2], name="E")
    ns.proj = ExactSubcat(A, [ns.P1, ns.P2], name="proj")
    ns.proj_split = ExactSubcat(A, [ns.P1, ns.P2], SPLIT, name="proj_split")
    ns.P2I2 = ExactSubcat(A, [ns.P2, ns.I2], name="P2I2")
    return ns


def make_dual(p: int = 5):
    F = Field(p)
    q = Quiver.build(["1"], [("t", "1", "1")])
    D = build_path_algebra(q, [parse_relation(q, F, "t.t")], F)
    ns = SimpleNamespace(F=F, A=D)
    ns.L = projective(D, 0)
    ns.k = simple(D, 0)
    ns.tm = next(h for h in hom_basis(ns.L, ns.L) if not h.is_iso())
    ns.E = ExactSubcat(D, [ns.L], SPLIT, name="Lam")
    ns.mod = whole_module_category(D)
    return ns


@pytest.fixture(scope="session")
def a2():
    return make_a2()


@pytest.fixture(scope="session")
def dual():
    return make_dual()
