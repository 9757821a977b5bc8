"""Valuative subgroups, canonical valuations, and the rigid complement.

A multiplicative subgroup H <= K^x enters as {x : Psi(x) in S} for a finite
character family Psi and a span S of value vectors; this covers both kernels
of character groups (S = 0) and the subgroup generated by the kernel and
finitely many classes.  All "for all x" conditions are semi-decided by
scanning the enumeration stream, and every verdict carries its height.
"""

from dataclasses import dataclass

from .coeffmod import FinMod, howell_form, span_contains
from .errors import (
    LevelMismatch,
    MainClaimViolated,
    NotValuative,
    PreconditionViolated,
)
from .characters import Character, CharacterGroup
from .cpairs import vectors_cyclic
from .fields import Window, enumerate_blocks
from .scans import scan_index


@dataclass(frozen=True)
class MultSubgroup:
    """{x in K^x : Psi(x) lies in the span}; span () means the plain kernel."""

    window: Window
    psi: tuple              # of Characters on the window
    span: tuple = ()        # howell rows over (Z/l^n)^len(psi)

    def __post_init__(self):
        for f in self.psi:
            if f.window != self.window:
                raise LevelMismatch("character on a different window")
        ell, n = self.window.level.ell, self.window.level.n
        object.__setattr__(
            self, "span",
            tuple(howell_form(self.span, ell, n, len(self.psi))))

    @staticmethod
    def kernel_of(group: CharacterGroup):
        return MultSubgroup(group.window,
                            tuple(Character(group.window, r)
                                  for r in group.howell()))

    def psi_image(self, cls):
        return tuple(f.evaluate_class(cls) for f in self.psi)

    def contains_class(self, cls) -> bool:
        img = self.psi_image(cls)
        if not any(img):
            return True
        ell, n = self.window.level.ell, self.window.level.n
        return span_contains(self.span, img, ell, n)

    def contains(self, x) -> bool:
        return self.contains_class(self.window.classify(x))

    def describe(self):
        return {"window": self.window.spec(),
                "characters": [f.label() for f in self.psi],
                "extra_span": [list(r) for r in self.span]}


NO_VIOLATION = "NoViolationUpTo"
VIOLATION = "Violation"


@dataclass(frozen=True)
class ValuativeVerdict:
    kind: str
    height: int
    witness: object = None          # single element x
    witness_pair: tuple = None      # (x, y) for the two-variable condition
    conditions: tuple = ()

    def holds(self):
        return self.kind == NO_VIOLATION

    def payload(self):
        from .fields import format_element
        out = {"result": self.kind, "height": self.height,
               "conditions": list(self.conditions)}
        if self.witness is not None:
            out["witness"] = format_element(self.witness)
        if self.witness_pair is not None:
            out["witness_pair"] = [format_element(e)
                                   for e in self.witness_pair]
        return out


# element-level scans (unit predicates, pair conditions) walk real elements,
# not class tables, so rational-function levels get a lower degree cap
ELEMENT_RATFUNC_CAP = 1


def capped_blocks(model, height, ratfunc_cap=ELEMENT_RATFUNC_CAP):
    """enumerate_blocks with rational-function levels capped; Laurent
    exponents still range over the full height."""
    if model.kind == "finite":
        yield from enumerate_blocks(model, height)
        return
    if model.kind == "ratfunc":
        capped = min(height, ratfunc_cap)
        for blk in enumerate_blocks(model, capped):
            yield blk
        for _ in range(capped + 1, height + 1):
            yield []
        return
    res_blocks = []
    for s, blk in enumerate(capped_blocks(model.base, height, ratfunc_cap)):
        res_blocks.append(blk)
        out = []
        if s == 0:
            out.append(model.zero())
        for sc, cblk in enumerate(res_blocks):
            for c in cblk:
                if c.is_zero():
                    continue
                es = (0,) if s == 0 else (
                    range(-s, s + 1) if sc == s else (-s, s))
                for e in sorted(es):
                    out.append(model.elt((((e, c.data),), None)))
        yield out


def capped_stream(model, height, ratfunc_cap=ELEMENT_RATFUNC_CAP):
    for blk in capped_blocks(model, height, ratfunc_cap):
        yield from blk


def valuative_test(H: MultSubgroup, height: int,
                   pair_height: int = None) -> ValuativeVerdict:
    """Scan the conditions for H to admit a valuation with O_v^x <= H.

    Always checks 1+x in H u xH for scanned x outside H.  For ell = 2 the
    additional two-variable condition (1+x, 1+y in H forces 1+x(1+y) in H)
    is scanned over element pairs; for odd ell it is implied because the
    l^n-th powers lie in H.
    """
    w = H.window
    conditions = ["one_plus_x"]
    if not H.contains_class(w.zero_class()):
        raise PreconditionViolated("-1 (trivial class) must lie in H")
    for ent in scan_index(w, height).entries(height):
        if H.contains_class(ent.cls_x):
            continue
        if ent.cls_1px is None:
            continue  # x = -1 sits in H, unreachable given the skip above
        if H.contains_class(ent.cls_1px):
            continue
        if H.contains_class(w.class_sub(ent.cls_1px, ent.cls_x)):
            continue
        return ValuativeVerdict(VIOLATION, height, witness=ent.element(),
                                conditions=tuple(conditions))
    if w.level.ell == 2:
        conditions.append("one_plus_x_one_plus_y")
        ph = pair_height if pair_height is not None else min(height, 2)
        qualifying = []
        one = w.model.one()
        for x in capped_stream(w.model, ph):
            if x.is_zero():
                continue
            cls = w.classify(x)
            if H.contains_class(cls):
                continue
            opx = one + x
            if opx.is_zero() or not H.contains(opx):
                continue
            qualifying.append((x, opx))
        for x, _ in qualifying:
            for y, opy in qualifying:
                probe = one + x * opy
                if probe.is_zero():
                    continue
                if not H.contains(probe):
                    return ValuativeVerdict(
                        VIOLATION, height, witness_pair=(x, y),
                        conditions=tuple(conditions))
    return ValuativeVerdict(NO_VIOLATION, height,
                            conditions=tuple(conditions))


class UnitGroupApprox:
    """Membership test for the units of the coarsest valuation below H.

    h is accepted iff h lies in H and, for every scanned x outside H,
    (1+x)/(h+x) lies in H; this is the unit-group characterization of the
    canonical valuation, evaluated against the stream at the given height.
    """

    MAX_NONMEMBERS = 400

    def __init__(self, H: MultSubgroup, height: int,
                 max_nonmembers: int = MAX_NONMEMBERS):
        self.H = H
        self.height = height
        self.max_nonmembers = max_nonmembers
        self._outside = None
        self._memo = {}

    def _nonmembers(self):
        if self._outside is None:
            w = self.H.window
            one = w.model.one()
            out = []
            for x in capped_stream(w.model, self.height):
                if x.is_zero():
                    continue
                cls = w.classify(x)
                if self.H.contains_class(cls):
                    continue
                opx = one + x
                out.append((x, None if opx.is_zero() else w.classify(opx)))
                if len(out) >= self.max_nonmembers:
                    break
            self._outside = out
        return self._outside

    def is_unit(self, h) -> bool:
        got = self._memo.get(h.data)
        if got is None:
            got = self._memo[h.data] = self._is_unit(h)
        return got

    def _is_unit(self, h) -> bool:
        if h.is_zero():
            return False
        w = self.H.window
        if not self.H.contains(h):
            return False
        # 1+x = h+x mod H, tested on classes (quotients never materialize)
        for x, cls_opx in self._nonmembers():
            hx = h + x
            if hx.is_zero() or cls_opx is None:
                continue  # impossible for true units; be permissive here
            if not self.H.contains_class(
                    w.class_sub(cls_opx, w.classify(hx))):
                return False
        return True

    def payload(self):
        return {"height": self.height, "subgroup": self.H.describe(),
                "scanned_nonmembers": len(self._nonmembers())}


def canonical_valuation(H: MultSubgroup, height: int) -> UnitGroupApprox:
    """Unit-group predicate of the coarsest valuation v with O_v^x <= H."""
    verdict = valuative_test(H, height)
    if not verdict.holds():
        raise NotValuative("subgroup failed the valuative conditions")
    return UnitGroupApprox(H, height)


@dataclass(frozen=True)
class RigidComplement:
    """H = <T, x with Psi(1+x) differing from Psi(1) and Psi(x)>, plus the
    cyclicity certificate for H/T."""

    psi: tuple
    height: int
    span: tuple
    generator: tuple            # psi-image generating H/T, or None
    subgroup: MultSubgroup
    qualifying: tuple           # representative elements found

    def is_trivial(self):
        return not self.span

    def payload(self):
        from .fields import format_element
        return {"height": self.height,
                "quotient_generator": list(self.generator)
                if self.generator else None,
                "qualifying": [format_element(x) for x in self.qualifying]}


def rigid_complement(f: Character, g: Character, height: int) -> RigidComplement:
    """Scan for the subgroup H generated by T = ker(f) n ker(g) and all x with
    Psi(1+x) distinct from Psi(1) and Psi(x); asserts H/T cyclic.

    A non-cyclic H/T falsifies the preconditions (the pair did not come from
    a C-pair at the required lifted level) and raises MainClaimViolated.
    """
    if f.window != g.window:
        raise LevelMismatch("characters on different windows")
    w = f.window
    ell, n = w.level.ell, w.level.n
    vectors = []
    reps = []
    for ent in scan_index(w, height).entries(height):
        img = (f.evaluate_class(ent.cls_x), g.evaluate_class(ent.cls_x))
        if not any(img):
            continue
        if ent.cls_1px is None:
            continue
        q = (f.evaluate_class(ent.cls_1px), g.evaluate_class(ent.cls_1px))
        if not any(q):
            continue
        if q == img:
            continue
        if not any(vec == img for vec in vectors):
            vectors.append(img)
            reps.append(ent.element())
    span = howell_form(vectors, ell, n, 2)
    basis = _span_quasi_basis(span, ell, n)
    if len(basis) > 1:
        raise MainClaimViolated(
            "H/T is not cyclic; inputs cannot reduce from a C-pair at the "
            "required level")
    gen = basis[0] if basis else None
    sub = MultSubgroup(w, (f, g), span)
    return RigidComplement((f, g), height, tuple(span), gen, sub, tuple(reps))


def _span_quasi_basis(span_rows, ell, n):
    """Quasi-basis of a span inside (Z/l^n)^2."""
    if not span_rows:
        return []
    from .coeffmod import Level, kernel_mod
    rel = kernel_mod([[row[c] for row in span_rows] for c in range(2)],
                     ell, n, len(span_rows))
    fm = FinMod(tuple(range(len(span_rows))), tuple(rel), Level(ell, n))
    out = []
    mod = ell ** n
    for expr, order in fm.quasi_basis():
        vec = [0, 0]
        for c, row in zip(expr, span_rows):
            vec[0] = (vec[0] + c * row[0]) % mod
            vec[1] = (vec[1] + c * row[1]) % mod
        out.append(tuple(vec))
    return out


@dataclass(frozen=True)
class ComparabilityVerdict:
    kind: str         # Comparable | NotComparable | ComparableUpToBound
    height: int
    witness: object = None

    def holds(self):
        return self.kind != "NotComparable"

    def payload(self):
        from .fields import format_element
        out = {"result": self.kind, "height": self.height}
        if self.witness is not None:
            out["witness"] = format_element(self.witness)
        return out


def comparable(f: Character, g: Character, height: int) -> ComparabilityVerdict:
    """Whether the canonical valuations of two valuative characters are
    comparable: scans the cyclicity of <Psi(1-x), Psi(x)>."""
    w = f.window
    for char in (f, g):
        v = valuative_test(MultSubgroup.kernel_of(
            CharacterGroup(w, (char,))), height)
        if not v.holds():
            raise NotValuative("input character is not valuative at this "
                               "height")
    ell, n = w.level.ell, w.level.n
    for ent in scan_index(w, height).entries(height):
        if ent.cls_1mx is None:
            continue
        psi_x = (f.evaluate_class(ent.cls_x), g.evaluate_class(ent.cls_x))
        psi_m = (f.evaluate_class(ent.cls_1mx), g.evaluate_class(ent.cls_1mx))
        if not vectors_cyclic(psi_m, psi_x, ell, n):
            return ComparabilityVerdict("NotComparable", height,
                                        witness=ent.element())
    from .scans import exhaustive_classes
    if exhaustive_classes(w.model, height, w.level):
        return ComparabilityVerdict("Comparable", height)
    return ComparabilityVerdict("ComparableUpToBound", height)
