"""End-to-end detection pipelines: recover a valuation from C-pair or
C-group data, detect inertia inside decomposition, and classify native
valuations by the maximality conditions.

Every report replays its claims: containments are re-verified by evaluating
characters on scanned elements, cyclic quotients are certified by quasi-bases
of the quotient module, and all heights and levels used are recorded.
"""

from dataclasses import dataclass, field

from .coeffmod import index_m, index_n
from .errors import (
    HypothesisFailed,
    MainClaimViolated,
    PreconditionViolated,
)
from .characters import (
    Character,
    CharacterGroup,
    decomp_chars,
    inertia_chars,
    residue_rank,
)
from .cpairs import c_group, c_pair_direct, c_center
from .fields import (
    PLACE,
    ValuationHandle,
    Window,
    compose_valuations,
    residue_model,
)
from .rigid import (
    MultSubgroup,
    UnitGroupApprox,
    canonical_valuation,
    capped_stream,
    comparable,
    rigid_complement,
    valuative_test,
)


@dataclass
class DetectionReport:
    mode: str
    window: Window
    level_n: int
    level_lift: int
    height: int
    inputs: list
    inertia_labels: list = field(default_factory=list)
    quotient_orders: list = field(default_factory=list)
    quotient_cyclic: bool = False
    branch: str = ""
    containments: dict = field(default_factory=dict)
    units_height: int = 0
    notes: list = field(default_factory=list)
    units: object = None            # UnitGroupApprox of the found valuation
    detected_group: object = None   # the valuative subgroup I

    def payload(self):
        return {
            "mode": self.mode,
            "window": self.window.spec(),
            "field": self.window.model.spec(),
            "ell": self.window.level.ell,
            "n": self.level_n,
            "lift_level": self.level_lift,
            "height": self.height,
            "inputs": self.inputs,
            "inertia": self.inertia_labels,
            "quotient_orders": self.quotient_orders,
            "quotient_cyclic": self.quotient_cyclic,
            "branch": self.branch,
            "containments": self.containments,
            "notes": self.notes,
        }


def _require_level(N, bound, aggressive, what):
    if aggressive:
        return ["aggressive mode: level bound not enforced "
                f"(need {bound} for {what}, have {N})"]
    if N < bound:
        raise PreconditionViolated(
            f"{what} needs lift level >= {bound}, got {N}")
    return []


def _maximal_ideal_scan(model, units: UnitGroupApprox, height,
                        max_samples=120, max_scanned=4000):
    """Scanned elements of the maximal ideal of the detected valuation:
    non-units x whose 1+x is a unit.  Capped; the caps bound the
    verification sample, not the detection itself."""
    one = model.one()
    out = []
    scanned = 0
    for x in capped_stream(model, height):
        scanned += 1
        if scanned > max_scanned:
            break
        if x.is_zero():
            continue
        if units.is_unit(x):
            continue
        opx = one + x
        if opx.is_zero():
            continue
        if units.is_unit(opx):
            out.append(x)
            if len(out) >= max_samples:
                break
    return out


def _verify_decomposition(chars, model, units, height):
    """All characters kill 1+x for scanned x in the maximal ideal."""
    one = model.one()
    for x in _maximal_ideal_scan(model, units, height):
        cls = chars[0].window.classify(one + x)
        for ch in chars:
            if ch.evaluate_class(cls) != 0:
                return False
    return True


def _verify_inertia(group: CharacterGroup, units, height, max_samples=60,
                    max_scanned=4000):
    """All members kill scanned units."""
    w = group.window
    seen = 0
    scanned = 0
    for x in capped_stream(w.model, height):
        scanned += 1
        if scanned > max_scanned or seen >= max_samples:
            break
        if x.is_zero() or not units.is_unit(x):
            continue
        cls = w.classify(x)
        if not all(Character(w, r).evaluate_class(cls) == 0
                   for r in group.howell()):
            return False
        seen += 1
    return True


def detect_from_cpair(fpp: Character, gpp: Character, n: int, height: int,
                      aggressive: bool = False) -> DetectionReport:
    """Recover a valuation from a C-pair lifted to level N >= N(n): the two
    reduced characters land in D_v(n) with cyclic image mod I_v(n)."""
    if fpp.window != gpp.window:
        raise PreconditionViolated("characters on different windows")
    w = fpp.window
    N = w.level.n
    notes = _require_level(N, index_n(w.level.ell, n)[1], aggressive,
                           "C-pair detection")
    probe = c_pair_direct(fpp, gpp, height)
    if not probe.holds():
        raise PreconditionViolated(
            "inputs are not a C-pair at the lifted level")
    f, g = fpp.reduce_level(n), gpp.reduce_level(n)
    wn = f.window
    rc = rigid_complement(f, g, height)
    branch = "H=T" if rc.is_trivial() else "H!=T"
    units = canonical_valuation(rc.subgroup, height)
    D = CharacterGroup(wn, (f, g))
    members = []
    for d in D.elements():
        if all(d.evaluate(x) == 0 for x in rc.qualifying):
            members.append(d)
    I = CharacterGroup(wn, tuple(members))
    iv = valuative_test(MultSubgroup.kernel_of(I), height)
    if not iv.holds():
        raise MainClaimViolated("detected subgroup failed the valuative scan")
    orders = D.quotient_orders(I)
    report = DetectionReport(
        mode="cpair", window=wn, level_n=n, level_lift=N, height=height,
        inputs=[fpp.label(), gpp.label()],
        inertia_labels=I.labels(),
        quotient_orders=orders,
        quotient_cyclic=len(orders) <= 1,
        branch=branch,
        units_height=height,
        notes=notes,
    )
    report.containments["f,g in D_v"] = _verify_decomposition(
        (f, g), wn.model, units, height)
    report.containments["I in I_v"] = _verify_inertia(I, units, height)
    report.units = units
    report.detected_group = I
    return report


def valuative_members(group: CharacterGroup, height: int):
    """The subgroup generated by the individually valuative members."""
    gens = []
    for f in group.elements():
        if f.is_zero():
            continue
        H = MultSubgroup.kernel_of(CharacterGroup(group.window, (f,)))
        if valuative_test(H, height).holds():
            gens.append(f)
    return CharacterGroup(group.window, tuple(gens))


def detect_from_cgroup(Dpp: CharacterGroup, n: int, height: int,
                       aggressive: bool = False) -> DetectionReport:
    """Recover I <= D with D/I cyclic and D <= D_{v_I}(n) from a C-group at
    level N >= N(M1(n))."""
    w = Dpp.window
    N = w.level.n
    ell = w.level.ell
    notes = _require_level(N, index_n(ell, index_m(1, n))[1], aggressive,
                           "C-group detection")
    probe = c_group(Dpp, height)
    if not probe.holds():
        raise PreconditionViolated("input is not a C-group at its level")
    M = min(index_m(1, n), N)
    if M < index_m(1, n):
        notes.append(f"intermediate level clamped to {M} (lift too shallow "
                     "for the full staircase)")
    Dp = Dpp.reduce_level(M)
    Ip = valuative_members(Dp, height)
    basis = [c for c, _ in Ip.member_quasi_basis()]
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            cv = comparable(basis[i], basis[j], height)
            if not cv.holds():
                raise MainClaimViolated(
                    "valuative members with incomparable valuations")
    I = Ip.reduce_level(n)
    D = Dpp.reduce_level(n)
    units = canonical_valuation(MultSubgroup.kernel_of(I), height)
    orders = D.quotient_orders(I)
    report = DetectionReport(
        mode="cgroup", window=D.window, level_n=n, level_lift=N,
        height=height,
        inputs=Dpp.labels(),
        inertia_labels=I.labels(),
        quotient_orders=orders,
        quotient_cyclic=len(orders) <= 1,
        units_height=height,
        notes=notes,
    )
    dbasis = [c for c, _ in D.member_quasi_basis()]
    report.containments["D in D_v"] = _verify_decomposition(
        dbasis, D.window.model, units, height) if dbasis else True
    report.containments["I in I_v"] = _verify_inertia(I, units, height)
    report.units = units
    report.detected_group = I
    return report


def detect_inertia(Ipp: CharacterGroup, Dpp: CharacterGroup, n: int,
                   height: int, aggressive: bool = False) -> DetectionReport:
    """Given I'' inside the C-center of D'' at level N >= N(M2(M1(n))) with
    D''_n not a C-group, certify that I''_n is valuative and D''_n lies in
    the decomposition group of its canonical valuation."""
    w = Dpp.window
    if Ipp.window != w:
        raise PreconditionViolated("subgroups on different windows")
    N = w.level.n
    ell = w.level.ell
    bound = index_n(ell, index_m(2, index_m(1, n)))[1]
    notes = _require_level(N, bound, aggressive, "inertia detection")
    center = c_center(Dpp, height)
    if not Ipp <= center:
        raise PreconditionViolated("I'' is not inside the C-center of D''")
    D = Dpp.reduce_level(n)
    if c_group(D, height).holds():
        raise HypothesisFailed(
            "D is a C-group; inertia detection needs a non-C decomposition")
    M = min(index_m(1, n), N)
    if M < index_m(1, n):
        notes.append(f"intermediate level clamped to {M} (lift too shallow "
                     "for the full staircase)")
    Ip = Ipp.reduce_level(M)
    for f in Ip.elements():
        if f.is_zero():
            continue
        H = MultSubgroup.kernel_of(CharacterGroup(Ip.window, (f,)))
        if not valuative_test(H, height).holds():
            raise MainClaimViolated(
                f"member {f.label()} of I' is not valuative")
    I = Ipp.reduce_level(n)
    units = canonical_valuation(MultSubgroup.kernel_of(I), height)
    orders = D.quotient_orders(I) if I <= D else []
    report = DetectionReport(
        mode="inertia", window=D.window, level_n=n, level_lift=N,
        height=height,
        inputs=[Ipp.labels(), Dpp.labels()],
        inertia_labels=I.labels(),
        quotient_orders=orders,
        quotient_cyclic=len(orders) <= 1,
        units_height=height,
        notes=notes,
    )
    dbasis = [c for c, _ in D.member_quasi_basis()]
    report.containments["D in D_v"] = _verify_decomposition(
        dbasis, D.window.model, units, height) if dbasis else True
    report.containments["I in I_v"] = _verify_inertia(I, units, height)
    report.units = units
    report.detected_group = I
    return report


# ---------------------------------------------------------------------------
# classification of native valuations
# ---------------------------------------------------------------------------

@dataclass
class ClassMembershipReport:
    handle: ValuationHandle
    window: Window
    level_n: int
    height: int
    in_w: bool
    in_v: bool
    alt_v: bool
    alt_v_agrees: bool
    refinements: list
    witness_refinement: str = None
    notes: list = None

    def payload(self):
        return {
            "mode": "classify",
            "valuation": self.handle.spec(),
            "window": self.window.spec(),
            "field": self.window.model.spec(),
            "n": self.level_n,
            "height": self.height,
            "in_W": self.in_w,
            "in_V": self.in_v,
            "alt_V_agrees": self.alt_v_agrees,
            "refinements_examined": self.refinements,
            "witness_refinement": self.witness_refinement,
            "notes": self.notes or [],
        }


def _refinement_steps(handle: ValuationHandle, window: Window,
                      degree_bound: int):
    """Native one-step refinements of the handle: the next uniformizer for a
    Laurent residue, or places of a rational-function residue up to the
    degree bound (window-listed places first)."""
    res = residue_model(handle)
    if res.kind == "laurent":
        yield ValuationHandle.from_steps(res, [res.var])
    elif res.kind == "ratfunc":
        listed = [g[1] for g in window.gens if g[0] == PLACE]
        seen = set()
        for p in listed:
            seen.add(p)
            yield ValuationHandle.from_steps(res, [p])
        for d in range(1, degree_bound + 1):
            for p in res.ff.monic_polys(d):
                if p in seen or not res.ff.poly_is_irreducible(p):
                    continue
                yield ValuationHandle.from_steps(res, [p])


def class_membership(handle: ValuationHandle, window: Window, n: int,
                     height: int, refinement_degree: int = 2
                     ) -> ClassMembershipReport:
    """Maximality classification of a native valuation within the window.

    Condition (1) holds for every chain (the value group is Z^k with the
    lexicographic order).  Condition (2) is checked over the enumerated
    refinements: any refinement with the same decomposition group must not
    grow the inertia group.  Membership in the finer class additionally needs
    a non-cyclic residue character group, and the level-1 alternative
    characterization is cross-checked.
    """
    w = window.at_level(n)
    Dv, _ = decomp_chars(handle, w, height)
    Iv = inertia_chars(handle, w)
    in_w = True
    witness = None
    refinements = []
    for step in _refinement_steps(handle, w, refinement_degree):
        wprime = compose_valuations(handle, step)
        refinements.append(wprime.spec())
        Dw, _ = decomp_chars(wprime, w, height)
        if Dw == Dv:
            Iw = inertia_chars(wprime, w)
            if Iw != Iv:
                in_w = False
                witness = wprime.spec()
                break
    rr = residue_rank(handle, w)
    in_v = in_w and rr >= 2
    # level-1 alternative: I_v(1) = C-center of D_v(1), properly inside it
    w1 = window.at_level(1)
    D1, _ = decomp_chars(handle, w1, height)
    I1 = inertia_chars(handle, w1)
    center1 = c_center(D1, height)
    alt_v = (I1 == center1) and (center1 != D1)
    return ClassMembershipReport(
        handle=handle, window=w, level_n=n, height=height,
        in_w=in_w, in_v=in_v,
        alt_v=alt_v, alt_v_agrees=(alt_v == in_v),
        refinements=refinements, witness_refinement=witness,
        notes=["value group Z^k lex: no nontrivial l-divisible convex "
               "subgroups (condition 1 automatic)",
               "residue characteristic equals the base characteristic, "
               "away from ell"],
    )
