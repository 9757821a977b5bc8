"""Acceptance suite: one test per criterion, exact (zero tolerance), with a
pass/fail line printed per criterion.  Pinned heights: rational function
degree 4, Laurent precision 8.  Run with `pytest tests/test_acceptance.py -v`.
"""

import itertools
import random
import time

from valdetect.coeffmod import Coeff, Level, cancellation_conclusion, \
    cancellation_holds, index_m, index_n
from valdetect.characters import (
    Character,
    CharacterGroup,
    decomp_chars,
    inertia_chars,
)
from valdetect.cpairs import (
    c_center,
    c_pair_direct,
    c_pair_ktheory,
    quasi_independent,
)
from valdetect.central import (
    AbelianElement,
    cl_center,
    cl_pair,
    frame_from_k2,
    free_frame,
    heisenberg_mul,
    heisenberg_pow,
    pi_power,
)
from valdetect.detect import class_membership, detect_from_cgroup
from valdetect.fields import (
    ValuationHandle,
    enumerate_elements,
    format_element,
    parse_element,
    random_element,
    value_of,
)
from valdetect.milnor import steinberg_scan, tame_symbol


def report(num, name, ok):
    print(f"ACCEPTANCE {num:>2} [{name}]: {'PASS' if ok else 'FAIL'}")
    assert ok, f"acceptance criterion {num} ({name})"


def test_acceptance_01_index_functions():
    ok = True
    for r in (1, 2, 3, 5):
        ok &= index_m(r, 1) == 1
    for ell in (2, 3, 5, 11):
        ok &= index_n(ell, 1) == (1, 1)
    ok &= index_n(2, 2) == (93, 185)
    ok &= index_n(3, 2) == (483, 965)
    report(1, "index functions", ok)


def test_acceptance_02_cancellation():
    start = time.time()
    rng = random.Random(0xACC2)
    ok = True
    count = 0
    while count < 10_000:
        ell = rng.choice((2, 3, 5))
        n = rng.randrange(1, 4)
        r = rng.randrange(1, 3)
        R = index_m(r, n)
        lv = Level(ell, R)
        elln = ell ** n
        cs = []
        while len(cs) < r:
            c = rng.randrange(lv.modulus)
            if c % elln:
                cs.append(Coeff(c, lv))
        prod = Coeff(1, lv)
        for c in cs:
            prod = prod * c
        ann_exp = min(R, sum(c.valuation() for c in cs))
        a = Coeff(rng.randrange(lv.modulus), lv)
        b = Coeff(a.value + (lv.modulus // (ell ** ann_exp))
                  * rng.randrange(ell ** 2), lv)
        if (a * prod).value != (b * prod).value:
            continue
        ok &= cancellation_holds(a, b, cs, n)
        count += 1
    # sharpness: invalid instances (some c = 0 mod l^n) break the conclusion
    saw_failure = False
    for _ in range(100):
        ell = rng.choice((2, 3))
        n = 2
        lv = Level(ell, index_m(1, n))
        c = Coeff(ell ** n * rng.randrange(1, ell), lv)
        a = Coeff(rng.randrange(lv.modulus), lv)
        b = Coeff(a.value + lv.modulus // (ell ** c.valuation()), lv)
        if (a * c).value == (b * c).value and \
                not cancellation_conclusion(a, b, n):
            saw_failure = True
    ok &= saw_failure
    elapsed = time.time() - start
    ok &= elapsed < 5.0
    report(2, f"cancellation ({elapsed:.2f}s)", ok)


def test_acceptance_03_criterion_equivalence(w_u_u3, w_t_c):
    ok = True
    # pinned verdicts
    fu = Character.dual_by_label(w_u_u3, "u")
    fu3 = Character.dual_by_label(w_u_u3, "u-3")
    direct = c_pair_direct(fu, fu3, 4)
    ok &= direct.kind == "NotCPair"
    ok &= format_element(direct.witness) == "5*u"
    ft = Character.dual_by_label(w_t_c, "t")
    fc = Character.dual_by_label(w_t_c, "const")
    ok &= c_pair_direct(ft, fc, 8).kind == "CPair"
    # exhaustive agreement over quasi-independent pairs on both windows
    for w, h in ((w_u_u3, 4), (w_t_c, 8)):
        sp = steinberg_scan(w, h, stop_at_floor=True)
        chars = CharacterGroup.full(w).elements()
        for f, g in itertools.combinations(chars, 2):
            if f.is_zero() or g.is_zero() or not quasi_independent(f, g):
                continue
            ok &= (c_pair_direct(f, g, h).holds()
                   == c_pair_ktheory(f, g, sp).holds())
    report(3, "C-pair criterion equivalence", ok)


def test_acceptance_04_inertia_decomposition_pairs(w_t_c, w_tuu3):
    ok = True
    cases = [
        (w_t_c, ["t"], 8),
        (w_tuu3, ["t"], 4),
        (w_tuu3, ["t", "u"], 4),
    ]
    for w, steps, h in cases:
        v = ValuationHandle.from_steps(w.model, steps)
        I = inertia_chars(v, w)
        D, _ = decomp_chars(v, w, h)
        for i in I.elements():
            for d in D.elements():
                ok &= c_pair_direct(i, d, h).holds()
    report(4, "inertia x decomposition C-pairs", ok)


def test_acceptance_05_detection_round_trip(w_tsc):
    full = CharacterGroup.full(w_tsc)
    rep = detect_from_cgroup(full, 1, 8)
    ok = sorted(rep.inertia_labels) == ["s", "t"]
    ok &= rep.quotient_cyclic
    v = ValuationHandle.from_steps(w_tsc.model, ["t", "s"])
    for x in enumerate_elements(w_tsc.model, 8):
        if x.is_zero():
            continue
        native = all(c == 0 for c in value_of(v, x))
        ok &= rep.units.is_unit(x) == native
        if not ok:
            break
    report(5, "detection round trip", ok)


def test_acceptance_06_center_and_classification(w_tuu3):
    full = CharacterGroup.full(w_tuu3)
    center = c_center(full, 8)
    ok = center.labels() == ["t"]
    vt = ValuationHandle.from_steps(w_tuu3.model, ["t"])
    cm = class_membership(vt, w_tuu3, 1, 8)
    ok &= cm.in_v and cm.alt_v_agrees
    report(6, "C-center and V-membership", ok)


def test_acceptance_07_w_classification(w_tsc):
    vt = ValuationHandle.from_steps(w_tsc.model, ["t"])
    cm1 = class_membership(vt, w_tsc, 1, 8)
    ok = not cm1.in_w
    comp = ValuationHandle.from_steps(w_tsc.model, ["t", "s"])
    cm2 = class_membership(comp, w_tsc, 1, 8)
    ok &= cm2.in_w and not cm2.in_v
    report(7, "W-classification", ok)


def test_acceptance_08_cl_equals_c(w_u_u3, w_t_c, w_tuu3):
    ok = True
    for w, h in ((w_u_u3, 4), (w_t_c, 8), (w_tuu3, 4)):
        sp = steinberg_scan(w, h)
        frame = frame_from_k2(w, sp)
        full = CharacterGroup.full(w)
        chars = full.elements()
        disagreements = 0
        for f, g in itertools.combinations_with_replacement(chars, 2):
            cv = c_pair_direct(f, g, h).holds()
            clv = cl_pair(AbelianElement.from_character(frame, f),
                          AbelianElement.from_character(frame, g))
            if cv != clv:
                disagreements += 1
        ok &= disagreements == 0
        cc = {c.values for c in c_center(full, h).elements()}
        clc = {a.coeffs for a in cl_center(
            [AbelianElement.from_character(frame, c) for c in full.gens],
            frame)}
        ok &= cc == clc
    report(8, "CL equals C", ok)


def test_acceptance_09_tame_symbols(F7u, F7t, level31):
    rng = random.Random(0xACC9)
    ok = True
    pin_place = ValuationHandle.from_steps(F7u, ["u"])
    pinned = tame_symbol(parse_element(F7u, "u"),
                         parse_element(F7u, "u-3"), pin_place, level31)
    ok &= format_element(pinned.value) == "2" and not pinned.is_trivial()
    for model, place in ((F7u, pin_place),
                         (F7t, ValuationHandle.from_steps(F7t, ["t"]))):
        done = 0
        while done < 100:
            f = random_element(model, rng)
            omf = model.one() - f
            if f.is_zero() or omf.is_zero():
                continue
            ok &= tame_symbol(f, omf, place, level31).is_trivial()
            done += 1
    place3 = ValuationHandle.from_steps(F7u, ["u-3"])
    for _ in range(1000):
        f1 = random_element(F7u, rng)
        f2 = random_element(F7u, rng)
        g = random_element(F7u, rng)
        lhs = tame_symbol(f1 * f2, g, place3, level31)
        rhs = tame_symbol(f1, g, place3, level31).combine(
            tame_symbol(f2, g, place3, level31))
        ok &= lhs == rhs
    report(9, "tame symbols", ok)


def test_acceptance_10_power_map_oracle():
    ok = True
    for ell, n in ((2, 1), (2, 2), (3, 1), (3, 2)):
        ln = ell ** n
        m = ell ** (2 * n)
        fr = free_frame(Level(ell, n), ("x", "y"))
        for s1 in range(ln):
            for s2 in range(ln):
                lift = heisenberg_mul((s1, 0, 0), (0, s2, 0), m)
                brute = heisenberg_pow(lift, ln, m)
                formula = pi_power(AbelianElement(fr, (s1, s2)))
                a12, b1, b2 = formula.coords
                ok &= (brute[0] - ln * b1) % m == 0
                ok &= (brute[1] - ln * b2) % m == 0
                ok &= (brute[2] - ln * b1 * ln * b2 - a12) % ln == 0
    report(10, "power-map oracle", ok)
