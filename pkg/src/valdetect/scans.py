"""Class-pair bookkeeping over the canonical enumeration streams.

Scanning predicates such as the C-pair identity or the rigid-element
conditions only see the window classes of x, 1-x and 1+x.  A ScanIndex
tabulates, block by block of the enumeration stream, the distinct class
triples together with the first element realizing each; predicate scans then
run over the (small) triple table instead of the raw stream, with witnesses
recovered from the stored representatives in stream order.

For rational function fields the table is built by sweeping all
numerator/denominator pairs per block (vectorized with numpy when the
constant field is prime and the listed places have degree one).  For Laurent
levels the stream is c * t^e with c from the residue stream, and the triple
of such an element is determined exactly by e and the residue data of c, so
the table derives from the residue table.
"""

from dataclasses import dataclass

import numpy as np

from .fields import CONST, PLACE, UNIF, Window


@dataclass(frozen=True)
class ScanEntry:
    key: tuple        # increases along the canonical stream
    cls_x: tuple
    cls_1mx: tuple    # None when x = 1
    cls_1px: tuple    # None when x = -1
    rep: object       # element factory closure or Elt

    def element(self):
        return self.rep() if callable(self.rep) else self.rep


class ScanIndex:
    """Per-window table of distinct (cls x, cls 1-x, cls 1+x) triples."""

    def __init__(self, window: Window):
        self.window = window
        self.blocks = []      # blocks[s] = new entries at height s
        self._seen = set()

    def ensure(self, height):
        while len(self.blocks) <= height:
            s = len(self.blocks)
            raw = _block_entries(self.window, s)
            new = []
            for ent in raw:
                trip = (ent.cls_x, ent.cls_1mx, ent.cls_1px)
                if trip not in self._seen:
                    self._seen.add(trip)
                    new.append(ent)
            self.blocks.append(new)
        return self

    def entries(self, height):
        height = effective_height(self.window.model, height)
        self.ensure(height)
        for s in range(height + 1):
            yield from self.blocks[s]


_INDEX_CACHE = {}

# Degree cap for rational-function levels inside deeper scans: Laurent
# precision and polynomial degree play different roles, and the class
# tables below a Laurent level are complete long before the exponent
# range is; the pinned acceptance heights are (degree 4, precision 8).
RATFUNC_DEGREE_CAP = 4


def effective_height(model, height):
    if model.kind == "ratfunc":
        return min(height, RATFUNC_DEGREE_CAP)
    return height


def scan_index(window: Window, height: int) -> ScanIndex:
    idx = _INDEX_CACHE.get(window)
    if idx is None:
        idx = _INDEX_CACHE[window] = ScanIndex(window)
    return idx.ensure(effective_height(window.model, height))


def exhaustive_classes(model, height, level) -> bool:
    """Whether the table at this height settles the scanned predicates for
    every x in K, not just the enumerated ones.

    Finite fields enumerate everything.  On a Laurent level, elements split
    as c * t^e * (1 + m); the table realizes every triple of such a product
    once e sweeps all residues (height >= l^n) and the residue level is
    itself exhaustive.  The only elements whose exact triple is not tabled
    are those with zero window class (the +-(1+m) cosets), and on those every
    scanned identity holds trivially, so verdict exactness is unaffected.
    """
    if model.kind == "finite":
        return True
    if model.kind == "laurent":
        return (height >= level.modulus
                and exhaustive_classes(model.base, height, level))
    return False


def _block_entries(window, s):
    model = window.model
    if model.kind == "finite":
        return _finite_block(window, s)
    if model.kind == "ratfunc":
        return _ratfunc_block_entries(window, s)
    return _laurent_block_entries(window, s)


# ---------------------------------------------------------------------------
# finite fields: everything sits in block 0
# ---------------------------------------------------------------------------

def _finite_block(window, s):
    if s > 0:
        return []
    model = window.model
    ff = model.ff
    out = []
    for i, code in enumerate(ff.elements()):
        if code == 0:
            continue
        x = model.elt(code)
        cls_x = window.classify(x)
        om = ff.sub(ff.one, code)
        op = ff.add(ff.one, code)
        cls_1mx = window.classify(model.elt(om)) if om else None
        cls_1px = window.classify(model.elt(op)) if op else None
        out.append(ScanEntry((0, i), cls_x, cls_1mx, cls_1px, x))
    return out


# ---------------------------------------------------------------------------
# rational function fields
# ---------------------------------------------------------------------------

def _ratfunc_gen_data(window):
    """(place polys, const listed, const order) for the class computation."""
    places = [g[1] for g in window.gens if g[0] == PLACE]
    const = any(g[0] == CONST for g in window.gens)
    return places, const


def _ratfunc_poly_class(window, memo, poly):
    """(mult at each listed place ..., dlog lc if const listed)."""
    got = memo.get(poly)
    if got is None:
        ff = window.model.ff
        places, const = _ratfunc_gen_data(window)
        data = [ff.place_multiplicity(poly, p) for p in places]
        if const:
            data.append(ff.dlog(poly[-1]))
        got = memo[poly] = tuple(data)
    return got


def _ratfunc_assemble(window, dnum, dden):
    """Window class from numerator/denominator class data."""
    out = []
    i = 0
    for g, order in zip(window.gens, window.orders):
        if g[0] == PLACE:
            out.append((dnum[i] - dden[i]) % window.level.modulus)
            i += 1
        elif g[0] == CONST:
            out.append((dnum[-1] - dden[-1]) % order)
        else:
            out.append(0)
    return tuple(out)


def _ratfunc_block_entries(window, s):
    model = window.model
    ff = model.ff
    if _numpy_eligible(window):
        return _ratfunc_block_numpy(window, s)
    memo = _MEMO.setdefault(window, {})
    out = []
    dens = [d for deg in range(s + 1) for d in ff.monic_polys(deg)]
    for di, den in enumerate(dens):
        dden = _ratfunc_poly_class(window, memo, den)
        if ff.poly_deg(den) == s:
            nums = [n for deg in range(s + 1) for n in ff.polys_of_degree(deg)]
        else:
            nums = list(ff.polys_of_degree(s))
        for ni, num in enumerate(nums):
            if num == den:
                diff = ()
            else:
                diff = ff.poly_sub(den, num)
            sm = ff.poly_add(den, num)
            cls_x = _ratfunc_assemble(
                window, _ratfunc_poly_class(window, memo, num), dden)
            cls_1mx = None if not diff else _ratfunc_assemble(
                window, _ratfunc_poly_class(window, memo, diff), dden)
            cls_1px = None if not sm else _ratfunc_assemble(
                window, _ratfunc_poly_class(window, memo, sm), dden)
            out.append(ScanEntry(
                (s, di, ni), cls_x, cls_1mx, cls_1px,
                _ratfunc_rep(model, num, den)))
    return out


_MEMO = {}


def _ratfunc_rep(model, num, den):
    return lambda: model.from_poly(num, den)


FORCE_PURE = False  # set in tests to cross-check the two ratfunc paths


def _numpy_eligible(window):
    if FORCE_PURE:
        return False
    model = window.model
    if model.kind != "ratfunc" or model.ff.base is not None:
        return False
    return all(model.ff.poly_deg(g[1]) == 1
               for g in window.gens if g[0] == PLACE)


class _NumpyPolyTable:
    """Per-window table of all polynomials of degree <= h with class data,
    indexed by the base-q digit encoding."""

    def __init__(self, window, h):
        ff = window.model.ff
        q = ff.p
        self.q = q
        self.h = h
        n = q ** (h + 1)
        ids = np.arange(n, dtype=np.int64)
        digits = np.empty((n, h + 1), dtype=np.int64)
        tmp = ids.copy()
        for i in range(h + 1):
            digits[:, i] = tmp % q
            tmp //= q
        self.digits = digits
        nz = digits != 0
        self.deg = np.where(
            nz.any(axis=1), h - np.argmax(nz[:, ::-1], axis=1), -1)
        places, const = _ratfunc_gen_data(window)
        roots = [(-p[0]) % q for p in places]
        self.mults = [self._mult_at(digits, self.deg, a, q) for a in roots]
        lead = digits[np.arange(n), np.clip(self.deg, 0, h)]
        if const:
            dlog_tab = np.zeros(q, dtype=np.int64)
            for c in range(1, q):
                dlog_tab[c] = ff.dlog(c)
            self.dlog_lc = dlog_tab[lead]
        else:
            self.dlog_lc = None
        # canonical (c0,..,cd)-lex order within each degree, matching the
        # pure-python polys_of_degree enumeration
        self.canon = {}
        for d in range(h + 1):
            sel = np.nonzero(self.deg == d)[0]
            cols = tuple(digits[sel, i] for i in range(d, -1, -1))
            self.canon[d] = sel[np.lexsort(cols)]
        scale = window.level.modulus ** len(places)
        if const:
            scale *= [o for g, o in zip(window.gens, window.orders)
                      if g[0] == CONST][0]
        self.scale = scale

    @staticmethod
    def _mult_at(digits, deg, a, q):
        n, w = digits.shape
        mult = np.zeros(n, dtype=np.int64)
        cur = digits.copy()
        alive = deg >= 0
        for _ in range(w):
            val = np.zeros(n, dtype=np.int64)
            for i in range(w - 1, -1, -1):
                val = (val * a + cur[:, i]) % q
            divisible = alive & (val == 0)
            if not divisible.any():
                break
            nxt = np.zeros_like(cur)
            acc = np.zeros(n, dtype=np.int64)
            for i in range(w - 1, 0, -1):
                acc = (acc * a + cur[:, i]) % q
                nxt[:, i - 1] = acc
            cur = np.where(divisible[:, None], nxt, cur)
            mult += divisible
            alive = divisible & (cur.sum(axis=1) > 0)
        return mult

    def ids_of_degree(self, d):
        return self.canon[d]

    def ids_up_to_degree(self, d):
        return np.concatenate([self.canon[i] for i in range(d + 1)])

    def pair_key(self, window, ids, den_id):
        """Packed window class of f/g for an id array f and a fixed g."""
        mod = window.level.modulus
        kx = np.zeros(len(ids), dtype=np.int64)
        scale = 1
        for m in self.mults:
            kx += ((m[ids] - m[den_id]) % mod) * scale
            scale *= mod
        if self.dlog_lc is not None:
            oc = [o for g, o in zip(window.gens, window.orders)
                  if g[0] == CONST][0]
            kx += ((self.dlog_lc[ids] - self.dlog_lc[den_id]) % oc) * scale
        return kx


_NP_TABLES = {}


def _np_table(window, h):
    hh = max(h, 4)
    key = (window, hh)
    tab = _NP_TABLES.get(key)
    if tab is None:
        tab = _NP_TABLES[key] = _NumpyPolyTable(window, hh)
    return tab


def _ratfunc_block_numpy(window, s):
    model = window.model
    ff = model.ff
    tab = _np_table(window, s)
    q = tab.q
    dens = [d for deg in range(s + 1) for d in ff.monic_polys(deg)]
    out = []
    seen = set()
    powers = q ** np.arange(tab.h + 1, dtype=np.int64)
    shift = 2 * tab.scale + 2
    for di, den in enumerate(dens):
        den_digits = np.zeros(tab.h + 1, dtype=np.int64)
        den_digits[: len(den)] = den
        den_id = int(den_digits @ powers)
        if ff.poly_deg(den) == s:
            num_ids = tab.ids_up_to_degree(s)
        else:
            num_ids = tab.ids_of_degree(s)
        nd = tab.digits[num_ids]
        minus_ids = ((den_digits[None, :] - nd) % q) @ powers
        plus_ids = ((den_digits[None, :] + nd) % q) @ powers
        kx = tab.pair_key(window, num_ids, den_id)
        km = np.where(minus_ids == 0, -1,
                      tab.pair_key(window, minus_ids, den_id))
        kp = np.where(plus_ids == 0, -1,
                      tab.pair_key(window, plus_ids, den_id))
        full = (kx * shift + (km + 1)) * shift + (kp + 1)
        uniq, first = np.unique(full, return_index=True)
        order = np.argsort(first, kind="stable")
        for u, ni in zip(uniq[order].tolist(), first[order].tolist()):
            if u in seen:
                continue
            seen.add(u)
            nid = int(num_ids[ni])
            num = tuple(int(c) for c in tab.digits[nid][: tab.deg[nid] + 1])
            out.append(_entry_from_polys(window, (s, di, int(ni)), num, den))
    return out


def _entry_from_polys(window, key, num, den):
    model = window.model
    ff = model.ff
    memo = _MEMO.setdefault(window, {})
    dden = _ratfunc_poly_class(window, memo, den)
    diff = ff.poly_sub(den, num)
    sm = ff.poly_add(den, num)
    cls_x = _ratfunc_assemble(window, _ratfunc_poly_class(window, memo, num),
                              dden)
    cls_1mx = None if not diff else _ratfunc_assemble(
        window, _ratfunc_poly_class(window, memo, diff), dden)
    cls_1px = None if not sm else _ratfunc_assemble(
        window, _ratfunc_poly_class(window, memo, sm), dden)
    return ScanEntry(key, cls_x, cls_1mx, cls_1px, _ratfunc_rep(model, num, den))


# ---------------------------------------------------------------------------
# Laurent levels: derive from the residue table
# ---------------------------------------------------------------------------

def _laurent_block_entries(window, s):
    model = window.model
    level = window.level
    mod = level.modulus
    top = (UNIF, model.var)
    res_window = Window(model.base, level,
                        tuple(g for g in window.gens if g != top))
    res_height = effective_height(model.base, s)
    res_index = scan_index(res_window, res_height)

    def embed(cls_res, e):
        out = []
        j = 0
        for g in window.gens:
            if g == top:
                out.append(e % mod)
            else:
                out.append(cls_res[j])
                j += 1
        return tuple(out)

    def lift(rep_res, e):
        def make():
            c = rep_res() if callable(rep_res) else rep_res
            return model.elt((((e, c.data),), None))
        return make

    out = []
    # residue classes and triples grouped by first-occurrence block
    for sc in range(min(s, res_height) + 1):
        entries = res_index.blocks[sc]
        es = list(range(-s, s + 1)) if sc == s else [-s, s]
        for ent in entries:
            for e in es:
                if e > 0:
                    cls_x = embed(ent.cls_x, e)
                    out.append(ScanEntry((s, sc) + ent.key + (e,),
                                         cls_x, window.zero_class(),
                                         window.zero_class(),
                                         lift(ent.rep, e)))
                elif e < 0:
                    cls_x = embed(ent.cls_x, e)
                    out.append(ScanEntry((s, sc) + ent.key + (e,),
                                         cls_x, cls_x, cls_x,
                                         lift(ent.rep, e)))
                else:
                    cls_x = embed(ent.cls_x, 0)
                    cls_1mx = None if ent.cls_1mx is None else \
                        embed(ent.cls_1mx, 0)
                    cls_1px = None if ent.cls_1px is None else \
                        embed(ent.cls_1px, 0)
                    out.append(ScanEntry((s, sc) + ent.key + (0,),
                                         cls_x, cls_1mx, cls_1px,
                                         lift(ent.rep, 0)))
    return out


# ---------------------------------------------------------------------------
# class sweeps for decomposition groups at a place
# ---------------------------------------------------------------------------

def _decomp_place_classes(window, place, h):
    """Window classes of 1 + P*(a/b) over the block max(deg a, deg b) = h
    with P not dividing b; vectorized when the window is numpy-eligible."""
    if _numpy_eligible(window):
        return _decomp_place_classes_numpy(window, place, h)
    ff = window.model.ff
    memo = _MEMO.setdefault(window, {})
    out = set()
    pa_memo = {}
    for bdeg in range(h + 1):
        for b in ff.monic_polys(bdeg):
            if ff.place_multiplicity(b, place) > 0:
                continue
            db = _ratfunc_poly_class(window, memo, b)
            adegs = range(h + 1) if bdeg == h else (h,)
            for adeg in adegs:
                for a in ff.polys_of_degree(adeg):
                    pa = pa_memo.get(a)
                    if pa is None:
                        pa = pa_memo[a] = ff.poly_mul(place, a)
                    num = ff.poly_add(b, pa)
                    if not num:
                        continue
                    out.add(_ratfunc_assemble(
                        window, _ratfunc_poly_class(window, memo, num), db))
    return out


def _decomp_place_classes_numpy(window, place, h):
    ff = window.model.ff
    q = ff.p
    dp = ff.poly_deg(place)
    tab = _np_table(window, h + dp)
    width = tab.h + 1
    powers = q ** np.arange(width, dtype=np.int64)
    # digits of P*a for every a of degree <= h
    a_ids = tab.ids_up_to_degree(h)
    ad = tab.digits[a_ids]
    pa = np.zeros((len(a_ids), width), dtype=np.int64)
    for j, cj in enumerate(place):
        if cj:
            pa[:, j:j + width - j] += cj * ad[:, : width - j]
    pa %= q
    adeg = tab.deg[a_ids]
    keys = set()
    for bdeg in range(h + 1):
        for b in ff.monic_polys(bdeg):
            if ff.place_multiplicity(b, place) > 0:
                continue
            bd = np.zeros(width, dtype=np.int64)
            bd[: len(b)] = b
            b_id = int(bd @ powers)
            sel = (adeg == h) if bdeg < h else (adeg <= h)
            num_ids = ((bd[None, :] + pa[sel]) % q) @ powers
            num_ids = num_ids[num_ids != 0]
            kx = tab.pair_key(window, num_ids, b_id)
            keys.update(np.unique(kx).tolist())
    return {_unpack_class_key(window, k) for k in keys}


def _unpack_class_key(window, key):
    """Inverse of the pair_key packing (places in order, then const)."""
    mod = window.level.modulus
    by_index = {}
    for i, g in enumerate(window.gens):
        if g[0] == PLACE:
            by_index[i] = key % mod
            key //= mod
    for i, (g, order) in enumerate(zip(window.gens, window.orders)):
        if g[0] == CONST:
            by_index[i] = key % order
            key //= order
    return tuple(by_index.get(i, 0) for i in range(window.rank))
