"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest, or directly with ``python3 tests/test_acceptance.py``.
"""
import os
import random
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from exacthearts.cli import run_query  # noqa: E402
from exacthearts.complexes import (  # noqa: E402
    Complex,
    classify_acyclicity,
    cocylinder,
    cone,
    cylinder,
    hyper_hom,
    identity_chain_map,
    random_chain_map,
    random_complex,
)
from exacthearts.exact import SPLIT, ExactSubcat, check_maximally_nonnegative, is_epi_in_E, is_mono_in_E  # noqa: E402
from exacthearts.functors import end_transport, is_effaceable, membership_completion, projective_dimension  # noqa: E402
from exacthearts.hearts import (  # noqa: E402
    DerivedUniverse,
    characterize_maximal_nonnegativity,
    completion_crosscheck,
    maximal_t_pairs,
    region_objects,
    scan_heart,
    u_right_of,
    _base_heart,
)
from exacthearts.modules import direct_sum, direct_sum_of_maps  # noqa: E402
from exacthearts.resolutions import extend_to_chain_map, horseshoe, null_homotopy_after_qis  # noqa: E402
from exacthearts.workspace import parse, shipped_workspace  # noqa: E402

from conftest import make_a2, make_dual  # noqa: E402
from instances import horseshoe_instance, lift_instance, null_homotopy_instance, random_functor  # noqa: E402

A2, D = make_a2(), make_dual()


# ---------------------------------------------------------------------------
# 1. A2 hearts


def criterion_1():
    t = time.time()
    ws = parse(shipped_workspace("a2_example"))
    lh = run_query(ws, "heart compute E_sub LHb")
    rh = run_query(ws, "heart compute E_sub RHb")
    cmp = run_query(ws, "heart compare E_sub")
    dt = time.time() - t
    ok = (lh.headline == "P2, I2, shift(P1,1)" and rh.headline == "P1, P2, I2"
          and cmp.headline == "LHb(RHb) = RHb != LHb = RHb(LHb)" and dt < 5)
    return ok, f"LHb = {{{lh.headline}}}; RHb = {{{rh.headline}}}; {cmp.headline}; {dt:.2f}s"


# ---------------------------------------------------------------------------
# 2. dual numbers


def criterion_2():
    t = time.time()
    r = check_maximally_nonnegative(D.E, 2)
    mono, epi = is_mono_in_E(D.tm, D.E), is_epi_in_E(D.tm, D.E)
    scans = {w: scan_heart(D.E, w) for w in ("LHb", "RHb")}
    stalks_only = all(s.members and not s.non_stalk_members and not s.unknown for s in scans.values())
    dt = time.time() - t
    ok = r.status == "VerifiedUpToBound" and r.bound >= 2 and not mono and not epi and stalks_only and dt < 5
    checked = sum(s.checked for s in scans.values())
    return ok, (f"{r.status}({r.bound}); T mono: {bool(mono)}, epi: {bool(epi)}; "
                f"scans only stalks: {stalks_only} ({checked} complexes); {dt:.2f}s")


# ---------------------------------------------------------------------------
# 3. characterization consistency


def criterion_3():
    cases = [("k[T]/T^2", D.E), ("add(I1+I2)", A2.E), ("add(P1+P2)", A2.proj), ("mod kA2", A2.mod),
             ("add(P2+I2)", A2.P2I2)]
    rows, ok = [], True
    for name, e in cases:
        c = characterize_maximal_nonnegativity(e)
        agree = c.hearts_are_e == c.coaisles_agree == c.mono_epi
        ok &= agree
        rows.append(f"{name}: {int(c.hearts_are_e)}{int(c.coaisles_agree)}{int(c.mono_epi)}")
    return ok, "; ".join(rows)


# ---------------------------------------------------------------------------
# 4. cone / retract / two-out-of-three


def _lext(x: Complex, e, n: int):
    return classify_acyclicity(x, e, n, which=["left_ext"]).left_ext


def _sum_complexes(x: Complex, y: Complex) -> Complex:
    lo, hi = min(x.lo, y.lo), max(x.hi, y.hi)
    terms = {n: direct_sum([x.term(n), y.term(n)], x.algebra).module for n in range(lo, hi + 1)}
    diffs = {n: direct_sum_of_maps([x.diff(n), y.diff(n)]) for n in range(lo, hi)}
    return Complex(x.algebra, terms, diffs)


class _Tally:
    def __init__(self):
        self.checked = 0
        self.violations = []

    def implies(self, premises, conclusion, label):
        """premises, conclusion are Verdicts; only determinate ones count."""
        if not all(p.yes for p in premises) or not conclusion.determinate:
            return
        self.checked += 1
        if not conclusion.yes:
            self.violations.append(label)


def _closure_suite(e, rng, samples, tally):
    for _ in range(samples):
        x = random_complex(e, -1, 1, rng)
        y = random_complex(e, -1, 1, rng)
        f = random_chain_map(x, y, rng)
        c = cone(f).complex
        for n in range(-2, 2):
            vx, vy, vc = _lext(x, e, n), _lext(y, e, n), _lext(c, e, n)
            # cone gluing: X at n+1 and Y at n give cone(f) at n
            tally.implies([_lext(x, e, n + 1), vy], vc, f"cone at {n}")
            # two-out-of-three, both directions
            tally.implies([vx, vc], vy, f"2of3 (i) at {n}")
            tally.implies([vy, _lext(c, e, n - 1)], vx, f"2of3 (ii) at {n}")
            # homotopy retracts: Y ~ cyl(f), X ~ cocyl(f), X retract of X + Z
            vcyl, vcocyl = _lext(cylinder(f), e, n), _lext(cocylinder(f), e, n)
            tally.implies([vy], vcyl, f"retract cyl at {n}")
            tally.implies([vcyl], vy, f"retract cyl back at {n}")
            tally.implies([vcocyl], vx, f"retract cocyl at {n}")
            tally.implies([_lext(_sum_complexes(x, y), e, n)], vx, f"summand at {n}")
            contr = cone(identity_chain_map(y)).complex
            tally.implies([_lext(_sum_complexes(x, contr), e, n)], vx, f"contractible summand at {n}")


def criterion_4(samples: int = 200):
    t = time.time()
    per = {}
    ok = True
    for name, e in (("kA2", A2.mod), ("kA2 add(I1+I2)", A2.E), ("k[T]/T^2", D.E)):
        tally = _Tally()
        _closure_suite(e, random.Random(4000 + len(name)), samples, tally)
        per[name] = tally
        ok &= not tally.violations and tally.checked > 0
    dt = time.time() - t
    ok &= dt < 60
    detail = "; ".join(f"{k}: {v.checked} checks, {len(v.violations)} violations" for k, v in per.items())
    return ok, f"{samples} complexes+maps per structure; {detail}; {dt:.1f}s"


# ---------------------------------------------------------------------------
# 5. abelian oracle


def _pointwise_exact(f, g) -> bool:
    """Middle exactness from per-vertex ranks; g f = 0 is given."""
    mid = f.target
    return all(f.comps[v].rank() + g.comps[v].rank() == mid.dims[v] for v in range(len(mid.dims)))


def criterion_5(samples: int = 500):
    rng = random.Random(5)
    agree = total = exact = 0
    bad = []
    for name, e in (("kA2", A2.mod), ("k[T]/T^2", D.mod)):
        for _ in range(samples // 2):
            x = random_complex(e, -1, 1, rng, max_mult=2)
            v = classify_acyclicity(x, e, 0, mode="search", which=["left_ext"]).left_ext
            total += 1
            oracle = _pointwise_exact(x.diff(-1), x.diff(0))
            exact += oracle
            if v.determinate and v.yes == oracle:
                agree += 1
            else:
                bad.append((name, v.status))
    return agree == total and total >= 500, f"{agree}/{total} sequences agree ({exact} exact)" + (f"; first bad {bad[0]}" if bad else "")


# ---------------------------------------------------------------------------
# 6. constructive lemmas


def criterion_6(per_kind: int = 50):
    structures = [A2.mod, A2.proj, D.E]
    counts = {"extend_to_chain_map": [0, 0], "null_homotopy_after_qis": [0, 0], "horseshoe": [0, 0]}
    rng = random.Random(6)
    i = 0
    while min(c[0] for c in counts.values()) < per_kind and i < 20 * per_kind:
        e = structures[i % len(structures)]
        i += 1
        inst = lift_instance(e, rng)
        if inst is not None:
            counts["extend_to_chain_map"][0] += 1
            counts["extend_to_chain_map"][1] += all(extend_to_chain_map(*inst).verify(e).values())
        inst = null_homotopy_instance(e, rng)
        if inst is not None:
            nh = null_homotopy_after_qis(*inst, e, accept_existing=False)
            counts["null_homotopy_after_qis"][0] += 1
            counts["null_homotopy_after_qis"][1] += all(nh.verify(e).values())
        inst = horseshoe_instance(e, rng)
        if inst is not None:
            counts["horseshoe"][0] += 1
            counts["horseshoe"][1] += all(horseshoe(*inst).verify().values())
    ok = all(n >= per_kind and good == n for n, good in counts.values())
    return ok, "; ".join(f"{k}: {good}/{n}" for k, (n, good) in counts.items())


# ---------------------------------------------------------------------------
# 7. completion equivalence


def criterion_7():
    rows, ok = [], True
    for name, e in (("add(I1+I2)", A2.E), ("add(P1+P2)", A2.proj)):
        r = completion_crosscheck(e)
        good = r.heart_count == r.completion_count and r.heart_hom == r.completion_hom
        ok &= good
        rows.append(f"{name}: {r.heart_count} = {r.completion_count} generators, hom tables equal: {good}")
    return ok, "; ".join(rows)


# ---------------------------------------------------------------------------
# 8. t-pairs


def criterion_8():
    e = A2.E
    u = DerivedUniverse(e.algebra, (-3, 3))
    m = maximal_t_pairs(e, universe=u)
    v_l = region_objects(e, "V_left", u)
    u_r = u_right_of(u, _base_heart(e, "LHb", u, "auto"))
    # Hom(ΣU, V_l) through projective resolutions, not the universe's hereditary formula
    pairs = nonzero = 0
    for a in u_r:
        if a.shift + 1 > u.window[1]:
            continue
        ca = Complex.stalk(u.modules[a.module]).shift(a.shift + 1)
        for b in v_l:
            cb = Complex.stalk(u.modules[b.module]).shift(b.shift)
            pairs += 1
            nonzero += hyper_hom(ca, cb, route="resolution").dim != 0
    ok = nonzero == 0 and pairs > 0 and m.left.t_pair and m.right.t_pair and m.hearts_match
    return ok, (f"Hom(ΣU, V_l) = 0 on {pairs - nonzero}/{pairs} pairs; hearts {m.left_heart} / {m.right_heart} "
                f"match iterated: {m.hearts_match}")


# ---------------------------------------------------------------------------
# 9. split completion


def criterion_9(per_algebra: int = 30):
    cases = [("kA2 add(P1+P2+I2)", ExactSubcat(A2.A, [A2.P1, A2.P2, A2.I2], SPLIT, name="A2s")),
             ("k[T]/T^2 add(L)", D.E)]
    rng = random.Random(9)
    rows, ok = [], True
    for name, e in cases:
        tr = end_transport(e)
        eff_ok = rb_ok = 0
        for _ in range(per_algebra):
            F = random_functor(e, rng)
            eff_ok += is_effaceable(F).yes == F.is_zero()
            pd = projective_dimension(tr.functor_to_module(F))
            rb_ok += membership_completion(F, "Rb").status == ("yes" if pd is not None else "no")
        ok &= eff_ok == rb_ok == per_algebra
        rows.append(f"{name}: effaceable {eff_ok}/{per_algebra}, Rb {rb_ok}/{per_algebra}")
    return ok, "; ".join(rows)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9]


def _line(i: int, ok: bool, detail: str) -> str:
    return f"[acceptance {i}] {'PASS' if ok else 'FAIL'}: {detail}"


@pytest.mark.parametrize("i", range(1, len(CRITERIA) + 1))
def test_criterion(i, capsys):
    ok, detail = CRITERIA[i - 1]()
    with capsys.disabled():
        print("\n" + _line(i, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for i, crit in enumerate(CRITERIA, 1):
        ok, detail = crit()
        failed += not ok
        print(_line(i, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
