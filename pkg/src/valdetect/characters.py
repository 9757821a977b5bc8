"""Characters of K^x/T on a window, and the character-side of valuations.

A Character is an R_n-linear functional on a Window, i.e. a vector of values
on the window generators subject to the divisibility forced by each
generator's order.  Character groups are finite modules handled by the exact
linear algebra in coeffmod.

The two valuation-attached subgroups are computed here: inertia_chars(v, w)
is the group of characters killing every v-unit class (structural and exact
for native chains), and decomp_chars(v, w) is the group killing the classes
of 1 + m_v.  The latter is exact on Laurent steps (1 + m is contained in the
l^n-th powers when the residue characteristic is prime to l) and is a
bounded, stabilization-certified intersection at rational-function places.
"""

import math
from dataclasses import dataclass

from .coeffmod import (
    Level,
    howell_form,
    kernel_mod,
    span_contains,
    FinMod,
)
from .errors import (
    LevelMismatch,
    NotInDecomposition,
    PreconditionViolated,
    UnsupportedValuation,
)
from .fields import (
    CONST,
    PLACE,
    UNIF,
    FFModel,
    ValuationHandle,
    Window,
    _place_residue,
    residue_field_of_place,
)


@dataclass(frozen=True)
class Character:
    """A homomorphism K^x/T -> Z/l^n given by its values on the window gens."""

    window: Window
    values: tuple

    def __post_init__(self):
        n = self.level.modulus
        vals = tuple(v % n for v in self.values)
        if len(vals) != self.window.rank:
            raise LevelMismatch("value vector does not match the window rank")
        for v, order in zip(vals, self.window.orders):
            if v % (n // order):
                raise PreconditionViolated(
                    "character value incompatible with generator order")
        object.__setattr__(self, "values", vals)

    @property
    def level(self) -> Level:
        return self.window.level

    @staticmethod
    def zero(window):
        return Character(window, (0,) * window.rank)

    @staticmethod
    def dual(window, index):
        """Generator of the dual of window generator `index`."""
        n = window.level.modulus
        vals = [0] * window.rank
        vals[index] = n // window.orders[index]
        return Character(window, tuple(vals))

    @staticmethod
    def dual_by_label(window, label):
        for i in range(window.rank):
            if window.gen_label(i) == label:
                return Character.dual(window, i)
        # place generators may be written with any coefficient representatives
        bottom = window.model.bottom()
        if bottom.kind == "ratfunc":
            from .fields import PLACE, _parse_poly
            try:
                poly = bottom.ff.poly_monic(_parse_poly(bottom, label))
            except Exception:
                poly = None
            if poly is not None:
                for i, g in enumerate(window.gens):
                    if g == (PLACE, poly):
                        return Character.dual(window, i)
        raise PreconditionViolated(f"no window generator labeled {label!r}")

    def evaluate_class(self, cls):
        n = self.level.modulus
        return sum(a * c for a, c in zip(self.values, cls)) % n

    def evaluate(self, x):
        """Value on an element of K^x; additive in products."""
        return self.evaluate_class(self.window.classify(x))

    def reduce_level(self, n: int) -> "Character":
        if n > self.level.n:
            raise LevelMismatch(
                f"cannot raise a level-{self.level.n} character to {n}")
        w = self.window.at_level(n)
        m = w.level.modulus
        return Character(w, tuple(v % m for v in self.values))

    def __add__(self, other):
        if other.window != self.window:
            raise LevelMismatch("characters on different windows")
        return Character(self.window,
                         tuple(a + b for a, b in zip(self.values, other.values)))

    def __neg__(self):
        return Character(self.window, tuple(-a for a in self.values))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "Character":
        return Character(self.window, tuple(c * a for a in self.values))

    def is_zero(self):
        return not any(self.values)

    def order_exponent(self) -> int:
        """k with additive order l^k."""
        ell, n = self.level.ell, self.level.n
        k = 0
        cur = self.values
        while any(cur):
            cur = tuple(v * ell % self.level.modulus for v in cur)
            k += 1
        return k

    def label(self):
        """Readable combination of generator duals, for reports."""
        terms = []
        n = self.level.modulus
        for i, v in enumerate(self.values):
            if v == 0:
                continue
            unit = n // self.window.orders[i]
            if v % unit == 0 and v // unit < self.window.orders[i]:
                c = v // unit
                head = self.window.gen_label(i)
                terms.append(head if c == 1 else f"{c}*{head}")
            else:
                terms.append(f"{v}@{self.window.gen_label(i)}")
        return "+".join(terms) if terms else "0"


class CharacterGroup:
    """A subgroup of the window character group, given by generators."""

    def __init__(self, window, gens):
        self.window = window
        self.gens = tuple(gens)
        for g in self.gens:
            if g.window != window:
                raise LevelMismatch("generator on a different window")
        ell, n = window.level.ell, window.level.n
        self._form = howell_form([g.values for g in self.gens], ell, n,
                                 window.rank)

    @staticmethod
    def zero(window):
        return CharacterGroup(window, ())

    @staticmethod
    def full(window):
        return CharacterGroup(
            window, tuple(Character.dual(window, i) for i in range(window.rank)))

    @staticmethod
    def killing_classes(window, classes):
        """The subgroup of all window characters vanishing on given classes."""
        ell, n = window.level.ell, window.level.n
        # class equations plus the order constraints l^{d_i} a_i = 0
        rows = [tuple(cls) for cls in classes]
        for i in range(window.rank):
            r = [0] * window.rank
            r[i] = window.orders[i]
            rows.append(tuple(r))
        gens = kernel_mod(rows, ell, n, window.rank)
        return CharacterGroup(window,
                              tuple(Character(window, g) for g in gens))

    @property
    def level(self):
        return self.window.level

    def howell(self):
        return self._form

    def contains(self, char: Character) -> bool:
        if char.window != self.window:
            raise LevelMismatch("character on a different window")
        ell, n = self.level.ell, self.level.n
        return span_contains(self._form, char.values, ell, n)

    def __eq__(self, other):
        return (isinstance(other, CharacterGroup)
                and other.window == self.window
                and other._form == self._form)

    def __hash__(self):
        return hash((self.window, tuple(self._form)))

    def __le__(self, other):
        return all(other.contains(Character(self.window, r))
                   for r in self._form)

    def elements(self):
        """All members, deterministically ordered; sizes stay window-small."""
        ell, n = self.level.ell, self.level.n
        mod = self.level.modulus
        out = [Character.zero(self.window)]
        for row in self._form:
            piv = next(x for x in row if x)
            order = mod // _gcd_pow(piv, ell, n)
            new = []
            for mult in range(1, order):
                vec = tuple(mult * x for x in row)
                for old in out:
                    new.append(Character(
                        self.window,
                        tuple(a + b for a, b in zip(old.values, vec))))
            out.extend(new)
        # dedupe (order relations can overlap), keep first occurrences
        seen, uniq = set(), []
        for c in out:
            if c.values not in seen:
                seen.add(c.values)
                uniq.append(c)
        return uniq

    def size(self):
        return len(self.elements())

    def member_quasi_basis(self):
        """[(Character, order)] forming a quasi-basis of the subgroup."""
        ell, n = self.level.ell, self.level.n
        if not self._form:
            return []
        rel = kernel_mod([[row[c] for row in self._form]
                          for c in range(self.window.rank)], ell, n,
                         len(self._form))
        fm = FinMod(tuple(range(len(self._form))), tuple(rel), self.level)
        out = []
        mod = self.level.modulus
        for expr, order in fm.quasi_basis():
            vec = [0] * self.window.rank
            for c, row in zip(expr, self._form):
                for j in range(self.window.rank):
                    vec[j] = (vec[j] + c * row[j]) % mod
            out.append((Character(self.window, tuple(vec)), order))
        return out

    @property
    def rank(self):
        return len(self.member_quasi_basis())

    def is_cyclic(self):
        return self.rank <= 1

    def quotient_orders(self, sub: "CharacterGroup"):
        """Cyclic orders of self/sub; sub must be contained in self."""
        if not sub <= self:
            raise PreconditionViolated("quotient by a non-subgroup")
        ell, n = self.level.ell, self.level.n
        if not self._form:
            return []
        ncols = len(self._form)
        rel = list(kernel_mod([[row[c] for row in self._form]
                               for c in range(self.window.rank)],
                              ell, n, ncols))
        for srow in sub._form:
            rel.append(self._coords(srow))
        fm = FinMod(tuple(range(ncols)), tuple(rel), self.level)
        return [order for _, order in fm.quasi_basis()]

    def quotient_is_cyclic(self, sub):
        return len(self.quotient_orders(sub)) <= 1

    def _coords(self, vec):
        """Coordinates of a member vector over the Howell rows."""
        ell, n = self.level.ell, self.level.n
        mod = self.level.modulus
        v = list(vec)
        out = [0] * len(self._form)
        for i, row in enumerate(self._form):
            col = next(j for j, x in enumerate(row) if x)
            piv = row[col]
            pv = _gcd_pow(piv, ell, n)
            if v[col] % pv:
                raise PreconditionViolated("vector outside the span")
            q = v[col] // pv
            out[i] = q
            for j in range(self.window.rank):
                v[j] = (v[j] - q * row[j]) % mod
        if any(v):
            raise PreconditionViolated("vector outside the span")
        return tuple(out)

    def intersect(self, other: "CharacterGroup") -> "CharacterGroup":
        if other.window != self.window:
            raise LevelMismatch("windows differ")
        ell, n = self.level.ell, self.level.n
        r1, r2 = self._form, other._form
        if not r1 or not r2:
            return CharacterGroup.zero(self.window)
        rows = []
        for c in range(self.window.rank):
            rows.append(tuple([row[c] for row in r1] +
                              [-row[c] % self.level.modulus for row in r2]))
        sol = kernel_mod(rows, ell, n, len(r1) + len(r2))
        mod = self.level.modulus
        gens = []
        for s in sol:
            vec = [0] * self.window.rank
            for coef, row in zip(s[:len(r1)], r1):
                for j in range(self.window.rank):
                    vec[j] = (vec[j] + coef * row[j]) % mod
            gens.append(Character(self.window, tuple(vec)))
        return CharacterGroup(self.window, gens)

    def add_member(self, char: Character) -> "CharacterGroup":
        return CharacterGroup(self.window, self.gens + (char,))

    def reduce_level(self, n: int) -> "CharacterGroup":
        return CharacterGroup(self.window.at_level(n),
                              tuple(g.reduce_level(n) for g in self.gens))

    def perp_contains_class(self, cls) -> bool:
        """Whether a window class lies in A-perp (kernel of every member)."""
        return all(Character(self.window, row).evaluate_class(cls) == 0
                   for row in self._form)

    def perp_contains(self, x) -> bool:
        return self.perp_contains_class(self.window.classify(x))

    def labels(self):
        return [Character(self.window, row).label() for row in self._form]

    def __repr__(self):
        return f"<subgroup {{{', '.join(self.labels())}}} of {self.window.spec()}>"


def _gcd_pow(x, ell, n):
    pv = 1
    while x % (pv * ell) == 0 and pv * ell <= ell ** n:
        pv *= ell
    return pv


# ---------------------------------------------------------------------------
# inertia and decomposition
# ---------------------------------------------------------------------------

def _chain_gens(handle: ValuationHandle):
    """Window-generator specs consumed by the chain."""
    out = set()
    for kind, payload in handle.steps:
        if kind == "unif":
            out.add((UNIF, payload))
        else:
            out.add((PLACE, payload))
    return out


def inertia_chars(handle: ValuationHandle, window: Window) -> CharacterGroup:
    """Hom(K^x / O_v^x, R_n) cut down to the window; exact for native chains.

    A window generator class is a v-unit class exactly when the generator is
    not consumed by the chain, and the unit classes span exactly those
    coordinates; so the group is spanned by the duals of the chain
    generators that the window lists.
    """
    if handle.model != window.model:
        raise UnsupportedValuation("handle on a different field")
    chain = _chain_gens(handle)
    gens = [Character.dual(window, i)
            for i, g in enumerate(window.gens) if g in chain]
    return CharacterGroup(window, gens)


@dataclass(frozen=True)
class Certificate:
    """How a scanned subgroup was certified."""

    exact: bool
    height: int = 0
    stabilized: bool = True

    def describe(self):
        if self.exact:
            return "exact"
        tag = "stabilized" if self.stabilized else "UNSTABLE"
        return f"bounded-certified({tag} at height {self.height})"


_DECOMP_CACHE = {}


def decomp_chars(handle: ValuationHandle, window: Window, height: int = 4):
    """(CharacterGroup, Certificate) for Hom(K^x / +-(1+m_v), R_n) on the window.

    Laurent chain steps contribute nothing (1+m is made of l^n-th powers), so
    the computation recurses into the residue window and is exact until a
    rational-function place is hit; there the group is the stabilized kernel
    of the classes of enumerated 1 + P*y.
    """
    key = (handle, window, height)
    got = _DECOMP_CACHE.get(key)
    if got is None:
        got = _DECOMP_CACHE[key] = _decomp_chars(handle, window, height)
    return got


def _decomp_chars(handle, window, height):
    if handle.model != window.model:
        raise UnsupportedValuation("handle on a different field")
    if handle.is_trivial():
        return CharacterGroup.full(window), Certificate(exact=True)
    kind, payload = handle.steps[0]
    if kind == "unif":
        model = window.model
        if model.kind != "laurent" or model.var != payload:
            raise UnsupportedValuation("chain does not match tower")
        res_window = Window(model.base, window.level,
                            tuple(g for g in window.gens
                                  if g != (UNIF, payload)))
        rest = ValuationHandle(model.base, handle.steps[1:])
        sub, cert = decomp_chars(rest, res_window, height)
        gens = [_lift_char(window, res_window, g) for g in sub.gens]
        for i, g in enumerate(window.gens):
            if g == (UNIF, payload):
                gens.append(Character.dual(window, i))
        return CharacterGroup(window, gens), cert
    return _decomp_at_place(handle, window, payload, height)


def _lift_char(window, res_window, char):
    vals = []
    j = 0
    for g in window.gens:
        if j < res_window.rank and res_window.gens[j] == g:
            vals.append(char.values[j])
            j += 1
        else:
            vals.append(0)
    return Character(window, tuple(vals))


def _decomp_at_place(handle, window, place, height):
    """Stabilized kernel of the classes of 1 + P*(a/b) over a, b of bounded
    degree with P not dividing b; works on raw polynomial pairs."""
    model = window.model
    if model.kind != "ratfunc":
        raise UnsupportedValuation("place step off a rational function field")
    if len(handle.steps) > 1:
        raise UnsupportedValuation("no places below a finite residue field")
    from .scans import _decomp_place_classes
    classes = set()
    history = []
    group = CharacterGroup.full(window)
    for h in range(height + 1):
        classes |= _decomp_place_classes(window, place, h)
        group = CharacterGroup.killing_classes(window, sorted(classes))
        history.append(group)
        if len(history) >= 3 and history[-1] == history[-2] == history[-3]:
            return group, Certificate(exact=False, height=h, stabilized=True)
    return group, Certificate(exact=False, height=height, stabilized=False)


def residue_window(handle: ValuationHandle, window: Window) -> Window:
    """The induced window on the residue field of the chain.

    Along Laurent (uniformizer) steps the kernel carries over verbatim and the
    generators are those not consumed.  After a final place step the residue
    field is finite; the induced kernel is expressible in window form only
    when it is everything (rank-0 window), which is verified by computing the
    span of the residues of the unlisted places and constants.
    """
    cur = window
    for idx, (kind, payload) in enumerate(handle.steps):
        model = cur.model
        if kind == "unif":
            if model.kind != "laurent" or model.var != payload:
                raise UnsupportedValuation("chain does not match tower")
            cur = Window(model.base, cur.level,
                         tuple(g for g in cur.gens if g != (UNIF, payload)))
        else:
            if idx + 1 != len(handle.steps):
                raise UnsupportedValuation("places end at finite residues")
            kres = residue_field_of_place(model, payload)
            const_listed = any(g[0] == CONST for g in cur.gens)
            if _finite_kernel_is_everything(model, payload, cur,
                                            const_listed=const_listed):
                # every leftover generator class dies in the full kernel
                return Window(FFModel(kres), cur.level, ())
            if not const_listed and model.ff.poly_deg(payload) == 1:
                # constants alone surject onto the degree-one residue field
                return Window(FFModel(kres), cur.level, ())
            raise UnsupportedValuation(
                "residue kernel after the place step is not a window kernel")
    return cur


def _finite_kernel_is_everything(model, place, window, const_listed,
                                 degree_bound=2):
    """Whether residues of unlisted places (plus constants when unlisted and
    the l^n-th powers) already span all of k(P)^x mod the level."""
    ff = model.ff
    kres = residue_field_of_place(model, place)
    order = kres.q - 1
    span = math.gcd(window.level.modulus, order)   # l^n-th powers
    if order % 2 == 0:
        span = math.gcd(span, order // 2)          # -1
    listed = {g[1] for g in window.gens if g[0] == PLACE}
    for d in range(1, max(degree_bound, ff.poly_deg(place)) + 1):
        for q in ff.monic_polys(d):
            if q == place or q in listed or not ff.poly_is_irreducible(q):
                continue
            res = _place_residue(model, place, q, (ff.one,), 0)
            span = math.gcd(span, kres.dlog(res.data))
            if span == 1:
                return True
    if not const_listed:
        c = ff.generator()
        emb = c if kres is ff else \
            kres.from_digits((c,) + (0,) * (kres.degree - 1))
        span = math.gcd(span, kres.dlog(emb))
    return span == 1


def residue_rank(handle: ValuationHandle, window: Window) -> int:
    """Rank of the residue window's full character group; a finite residue
    contributes at most a cyclic group, reported as 1 when the exact induced
    kernel is not expressible in window form."""
    try:
        return residue_window(handle, window).rank
    except UnsupportedValuation:
        return 1


def residue_char(f: Character, handle: ValuationHandle, window: Window,
                 decomp=None, height: int = 4) -> Character:
    """Image of f in the residue window; defined for f in decomp_chars.

    Along uniformizer chains it is the projection that drops the consumed
    coordinates, with kernel exactly inertia_chars; a place step can only end
    in a rank-0 residue window, where the image is the zero character.
    """
    if f.window != window:
        raise LevelMismatch("character on a different window")
    if decomp is None:
        decomp, _ = decomp_chars(handle, window, height)
    if not decomp.contains(f):
        raise NotInDecomposition("character does not kill 1+m_v classes")
    res = residue_window(handle, window)
    vals = []
    for g in res.gens:
        i = window.gens.index(g)
        vals.append(f.values[i])
    return Character(res, tuple(vals))
