import itertools

import pytest

from valdetect.coeffmod import Level
from valdetect.errors import FrameMismatch, WrongLevel
from valdetect.characters import Character, CharacterGroup
from valdetect.cpairs import c_center, c_pair_direct
from valdetect.central import (
    AbelianElement,
    beta_power,
    canonical_omega,
    cl_center,
    cl_pair,
    commutator,
    frame_from_k2,
    free_frame,
    heisenberg_mul,
    heisenberg_pow,
    ibcl_alt_check,
    minimized_identity_check,
    pi_power,
)
from valdetect.fields import ValuationHandle, format_element
from valdetect.milnor import steinberg_scan


def test_commutator_basis_cases():
    fr = free_frame(Level(3, 1), ("g1", "g2"))
    s = AbelianElement(fr, (1, 0))
    t = AbelianElement(fr, (0, 1))
    assert commutator(s, t).coords == (1, 0, 0)
    assert commutator(s, s).is_zero()
    mixed = AbelianElement(fr, (1, 1))
    assert commutator(mixed, t).coords == (1, 0, 0)


def test_commutator_antisymmetric_bilinear():
    fr = free_frame(Level(3, 2), ("a", "b", "c"))
    els = [AbelianElement(fr, v)
           for v in itertools.product((0, 1, 5), repeat=3)]
    for s in els:
        for t in els:
            st = commutator(s, t)
            ts = commutator(t, s)
            assert (st + ts).is_zero()
    s, t, u = els[1], els[5], els[9]
    lhs = commutator(AbelianElement(fr, tuple(
        (a + b) % 9 for a, b in zip(s.coeffs, t.coeffs))), u)
    rhs = commutator(s, u) + commutator(t, u)
    assert lhs.coords == rhs.coords


def test_pi_power_generator_case():
    fr = free_frame(Level(3, 1), ("g1", "g2"))
    g1 = AbelianElement(fr, (1, 0))
    assert pi_power(g1).coords == (0, 1, 0)


def test_beta_linear_all_small_frames():
    for ell, n, r in ((2, 1, 2), (2, 2, 3), (3, 1, 3), (3, 2, 2)):
        fr = free_frame(Level(ell, n), tuple(f"g{i}" for i in range(r)))
        mod = ell ** n
        vals = range(mod)
        els = [AbelianElement(fr, v)
               for v in itertools.product(vals, repeat=r)]
        for s in els:
            for t in els:
                summed = AbelianElement(fr, tuple(
                    (a + b) % mod for a, b in zip(s.coeffs, t.coeffs)))
                assert beta_power(summed).coords == \
                    (beta_power(s) + beta_power(t)).coords


def test_pi_nonlinear_at_two_but_beta_linear():
    fr = free_frame(Level(2, 1), ("g1", "g2"))
    s = AbelianElement(fr, (1, 0))
    t = AbelianElement(fr, (0, 1))
    st = AbelianElement(fr, (1, 1))
    # the correction 2*1/2 = 1 shows up on the commutator coordinate
    assert pi_power(st).coords != (pi_power(s) + pi_power(t)).coords
    assert beta_power(st).coords == (beta_power(s) + beta_power(t)).coords


def test_power_identity_heisenberg_oracle():
    # brute force in the Heisenberg group over Z/l^(2n) vs the normal form
    for ell, n in ((2, 1), (2, 2), (3, 1), (3, 2)):
        ln = ell ** n
        m = ell ** (2 * n)
        half = ln * (ln - 1) // 2
        fr = free_frame(Level(ell, n), ("x", "y"))
        for s1 in range(ln):
            for s2 in range(ln):
                lift = heisenberg_mul((s1, 0, 0), (0, s2, 0), m)
                brute = heisenberg_pow(lift, ln, m)
                formula = pi_power(AbelianElement(fr, (s1, s2)))
                a12 = formula.coords[0]
                b1, b2 = formula.coords[1], formula.coords[2]
                assert (brute[0] - ln * b1) % m == 0
                assert (brute[1] - ln * b2) % m == 0
                # central coordinates compare modulo l^n after removing the
                # cross term of the ordered product x^(ln b1) y^(ln b2)
                assert (brute[2] - ln * b1 * ln * b2 - a12) % ln == 0
                assert (a12 + half * s1 * s2) % ln == 0


def test_cl_pair_free_frame():
    fr = free_frame(Level(3, 1), ("g1", "g2"))
    s = AbelianElement(fr, (1, 0))
    t = AbelianElement(fr, (0, 1))
    assert not cl_pair(s, t)
    assert cl_pair(s, s)
    assert cl_center([s, t], fr) == [AbelianElement(fr, (0, 0))]


def test_frame_from_k2_pinned_laurent(w_t_c):
    sp = steinberg_scan(w_t_c, 8)
    omega = canonical_omega(w_t_c)
    assert format_element(omega) == "2"
    frame = frame_from_k2(w_t_c, sp, omega)
    # R is spanned by [1,2] + 2 pi_1, matching the tame one-relator shape
    assert frame.relations == ((1, 2, 0),)
    ft = Character.dual_by_label(w_t_c, "t")
    fc = Character.dual_by_label(w_t_c, "const")
    assert cl_pair(AbelianElement.from_character(frame, ft),
                   AbelianElement.from_character(frame, fc))


def test_frame_from_k2_pinned_ratfunc(w_u_u3):
    sp = steinberg_scan(w_u_u3, 4, stop_at_floor=True)
    frame = frame_from_k2(w_u_u3, sp)
    # the K2-quotient dies, so the relation module pairs with nothing
    assert frame.relations == ()
    fu = Character.dual_by_label(w_u_u3, "u")
    fu3 = Character.dual_by_label(w_u_u3, "u-3")
    assert not cl_pair(AbelianElement.from_character(frame, fu),
                       AbelianElement.from_character(frame, fu3))


def test_cl_matches_c_exhaustive_three_windows(w_u_u3, w_t_c, w_tuu3):
    for w, h in ((w_u_u3, 4), (w_t_c, 8), (w_tuu3, 4)):
        sp = steinberg_scan(w, h)
        frame = frame_from_k2(w, sp)
        chars = CharacterGroup.full(w).elements()
        for f, g in itertools.combinations_with_replacement(chars, 2):
            c_verdict = c_pair_direct(f, g, h).holds()
            cl_verdict = cl_pair(AbelianElement.from_character(frame, f),
                                 AbelianElement.from_character(frame, g))
            assert c_verdict == cl_verdict, (f.label(), g.label())


def test_cl_center_matches_c_center(w_tuu3, w_t_c):
    for w, h in ((w_tuu3, 4), (w_t_c, 8)):
        sp = steinberg_scan(w, h)
        frame = frame_from_k2(w, sp)
        full = CharacterGroup.full(w)
        cc = {c.values for c in c_center(full, h).elements()}
        clc = {a.coeffs for a in cl_center(
            [AbelianElement.from_character(frame, c) for c in full.gens],
            frame)}
        assert cc == clc


def test_ibcl_alternative(w_tuu3, w_t_c):
    for w, h in ((w_tuu3, 4), (w_t_c, 8)):
        sp = steinberg_scan(w, h)
        frame = frame_from_k2(w, sp)
        gens = [AbelianElement.from_character(frame, c)
                for c in CharacterGroup.full(w).gens]
        assert ibcl_alt_check(gens, frame)
    fr = free_frame(Level(3, 2), ("a", "b"))
    with pytest.raises(WrongLevel):
        ibcl_alt_check([AbelianElement(fr, (1, 0))], fr)


def test_minimized_identity(w_t_c, w_tuu3):
    sp = steinberg_scan(w_t_c, 8)
    omega = canonical_omega(w_t_c)
    frame = frame_from_k2(w_t_c, sp, omega)
    v = ValuationHandle.from_steps(w_t_c.model, ["t"])
    assert minimized_identity_check(v, w_t_c, frame, omega)
    sp3 = steinberg_scan(w_tuu3, 4)
    omega3 = canonical_omega(w_tuu3)
    frame3 = frame_from_k2(w_tuu3, sp3, omega3)
    v3 = ValuationHandle.from_steps(w_tuu3.model, ["t"])
    assert minimized_identity_check(v3, w_tuu3, frame3, omega3)


def test_inertia_pairs_commute_in_frame(w_tsc):
    # sigma, tau both inertial: [sigma, tau] lies in the relation module
    sp = steinberg_scan(w_tsc, 6)
    frame = frame_from_k2(w_tsc, sp)
    from valdetect.characters import inertia_chars
    v = ValuationHandle.from_steps(w_tsc.model, ["t", "s"])
    I = inertia_chars(v, w_tsc)
    for s in I.elements():
        for t in I.elements():
            probe = commutator(AbelianElement.from_character(frame, s),
                               AbelianElement.from_character(frame, t))
            assert frame.contains_relation(probe.coords)


def test_frame_mismatch_guard():
    fr1 = free_frame(Level(3, 1), ("a", "b"))
    fr2 = free_frame(Level(3, 1), ("x", "y"))
    with pytest.raises(FrameMismatch):
        commutator(AbelianElement(fr1, (1, 0)), AbelianElement(fr2, (0, 1)))
