"""C-pair and C-group testing, by direct scan and by the K-theoretic bound.

The direct method scans the enumeration stream for a witness x with
f(1-x)g(x) != f(x)g(1-x); it is exact on backends whose class triples are
exhausted at the height (finite fields and Laurent towers over them) and a
semi-decision elsewhere.  The K-theoretic method compares the order drop c of
the wedge generator in the presented K_2-quotient against the order drops
a, b of the two characters: the pair is a C-pair iff c <= a+b.  A negative
K-theoretic verdict is always certain and carries a direct witness; the two
methods must agree wherever both are exact.
"""

from dataclasses import dataclass

from .coeffmod import howell_form, span_contains
from .errors import (
    LevelMismatch,
    NotQuasiIndependent,
    PreconditionViolated,
    RankNotTwo,
)
from .characters import Character, CharacterGroup
from .scans import exhaustive_classes, scan_index

CPAIR = "CPair"
NOT_CPAIR = "NotCPair"
CPAIR_UP_TO = "CPairUpToBound"


@dataclass(frozen=True)
class CPairVerdict:
    kind: str
    method: str
    height: int
    witness: object = None      # element with a replayable violation
    exact: bool = False

    def holds(self):
        """True unless a violation was found (up-to-bound counts as holding)."""
        return self.kind != NOT_CPAIR

    def payload(self):
        out = {"result": self.kind, "method": self.method,
               "height": self.height, "exact": self.exact}
        if self.witness is not None:
            from .fields import format_element
            out["witness"] = format_element(self.witness)
        return out


def _pair_eq(f, g, cls_x, cls_1mx, mod):
    lhs = f.evaluate_class(cls_1mx) * g.evaluate_class(cls_x)
    rhs = f.evaluate_class(cls_x) * g.evaluate_class(cls_1mx)
    return (lhs - rhs) % mod == 0


def c_pair_direct(f: Character, g: Character, height: int) -> CPairVerdict:
    """Scan x in the stream for f(1-x)g(x) = f(x)g(1-x); witnesses minimal."""
    if f.window != g.window:
        raise LevelMismatch("characters on different windows")
    w = f.window
    if CharacterGroup(w, (f, g)).is_cyclic():
        # the identity is symmetric under g = c*f, no scan needed
        return CPairVerdict(CPAIR, "direct", height, exact=True)
    mod = w.level.modulus
    for ent in scan_index(w, height).entries(height):
        if ent.cls_1mx is None:
            continue
        if not _pair_eq(f, g, ent.cls_x, ent.cls_1mx, mod):
            return CPairVerdict(NOT_CPAIR, "direct", height,
                                witness=ent.element(), exact=True)
    if exhaustive_classes(w.model, height, w.level):
        return CPairVerdict(CPAIR, "direct", height, exact=True)
    return CPairVerdict(CPAIR_UP_TO, "direct", height)


def order_drop(f: Character) -> int:
    """a with f of order l^(n-a)."""
    return f.level.n - f.order_exponent()

def quasi_independent(f: Character, g: Character) -> bool:
    """No relation af + bg = 0 beyond the termwise ones."""
    span = CharacterGroup(f.window, (f, g))
    size = 1
    for _, order in span.member_quasi_basis():
        size *= order
    ell = f.level.ell
    return size == ell ** (f.order_exponent() + g.order_exponent())


def c_pair_ktheory(f: Character, g: Character, sp) -> CPairVerdict:
    """Order-drop criterion c <= a+b on the presented K2-quotient."""
    if f.window != g.window or f.window != sp.window:
        raise LevelMismatch("characters and presentation do not match")
    w = f.window
    if w.rank != 2:
        raise RankNotTwo(f"window has rank {w.rank}")
    if not quasi_independent(f, g):
        raise NotQuasiIndependent("characters are not quasi-independent")
    n = w.level.n
    ell = w.level.ell
    a, b = order_drop(f), order_drop(g)
    cval, wit = _k2_pair_drop(sp, f, g, a, b)
    if cval <= a + b:
        kind = CPAIR if sp.exhaustive else CPAIR_UP_TO
        return CPairVerdict(kind, "ktheory", sp.height, exact=sp.exhaustive)
    return CPairVerdict(NOT_CPAIR, "ktheory", sp.height, witness=wit,
                        exact=True)


def _k2_pair_drop(sp, f, g, a, b):
    """(c, witness) with the pair's K2-quotient of order l^(n-c); the witness
    realizes the largest order drop and is a direct violation when c > a+b."""
    w = sp.window
    ell, n = w.level.ell, w.level.n
    wedge_exp = n - max(a, b)     # order of x^y in the pair quotient
    best = wedge_exp
    best_wit = None
    for wit in sp.witnesses:
        fz, gz = f.evaluate_class(wit.cls_z), g.evaluate_class(wit.cls_z)
        fm, gm = f.evaluate_class(wit.cls_1mz), g.evaluate_class(wit.cls_1mz)
        h = fz // ell ** a
        i = gz // ell ** b
        j = fm // ell ** a
        k = gm // ell ** b
        coeff = (h * k - i * j) % ell ** wedge_exp
        v = _val(coeff, ell, wedge_exp)
        if v < best:
            best = v
            best_wit = wit
    cval = n - best
    return cval, (best_wit.element() if best_wit is not None else None)


def _val(x, ell, cap):
    if x == 0:
        return cap
    v = 0
    while x % ell == 0:
        x //= ell
        v += 1
    return min(v, cap)


@dataclass(frozen=True)
class CGroupVerdict:
    kind: str                   # CGroup | NotCGroup | CGroupUpToBound
    height: int
    pair: tuple = None          # offending generator pair
    witness: object = None
    exact: bool = False

    def holds(self):
        return self.kind != "NotCGroup"

    def payload(self):
        out = {"result": self.kind, "height": self.height,
               "exact": self.exact}
        if self.pair is not None:
            out["pair"] = [c.label() for c in self.pair]
        if self.witness is not None:
            from .fields import format_element
            out["witness"] = format_element(self.witness)
        return out


def c_group(group: CharacterGroup, height: int) -> CGroupVerdict:
    """Pairwise C-pair check over a quasi-basis of the subgroup."""
    basis = [c for c, _ in group.member_quasi_basis()]
    exact = True
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            v = c_pair_direct(basis[i], basis[j], height)
            if not v.holds():
                return CGroupVerdict("NotCGroup", height,
                                     pair=(basis[i], basis[j]),
                                     witness=v.witness, exact=True)
            exact = exact and v.exact
    kind = "CGroup" if exact else "CGroupUpToBound"
    return CGroupVerdict(kind, height, exact=exact)


def c_center(group: CharacterGroup, height: int) -> CharacterGroup:
    """{f in A : f forms a C-pair with every quasi-basis element of A}.

    The defining identity is bilinear, so the result is a subgroup; closure
    is nevertheless verified.
    """
    basis = [c for c, _ in group.member_quasi_basis()]
    members = []
    for f in group.elements():
        if all(c_pair_direct(f, g, height).holds() for g in basis):
            members.append(f)
    center = CharacterGroup(group.window, tuple(members))
    member_set = {m.values for m in members}
    for c in center.elements():
        if c.values not in member_set:
            raise PreconditionViolated(
                "C-center failed to close under addition")
    return center


def vectors_cyclic(v1, v2, ell, n):
    """Whether <v1, v2> in (Z/l^n)^2 is cyclic."""
    form1 = howell_form([v1], ell, n, 2)
    if span_contains(form1, v2, ell, n):
        return True
    form2 = howell_form([v2], ell, n, 2)
    return span_contains(form2, v1, ell, n)


def cyclic_pair_transfer(fp: Character, gp: Character, x, n: int,
                         verify_height: int = 2) -> bool:
    """For a C-pair at level M1(n) = 2n-1, the reduced pair Psi = (f_n, g_n)
    has <Psi(1-x), Psi(x)> cyclic; returns that check (true unless the
    inputs were not really a C-pair at the lifted level)."""
    from .coeffmod import index_m
    if fp.window != gp.window:
        raise LevelMismatch("characters on different windows")
    if fp.level.n != index_m(1, n):
        raise LevelMismatch(
            f"inputs must live at level {index_m(1, n)} for target {n}")
    probe = c_pair_direct(fp, gp, verify_height)
    if not probe.holds():
        raise PreconditionViolated("inputs are not a C-pair at the lifted level")
    f, g = fp.reduce_level(n), gp.reduce_level(n)
    w = f.window
    one_minus = w.model.one() - x
    if x.is_zero() or one_minus.is_zero():
        raise PreconditionViolated("x must avoid 0 and 1")
    psi_x = (f.evaluate(x), g.evaluate(x))
    psi_m = (f.evaluate(one_minus), g.evaluate(one_minus))
    return vectors_cyclic(psi_m, psi_x, w.level.ell, w.level.n)
