"""Residue arithmetic mod l^n and exact linear algebra over Z/l^e.

Provides the level bookkeeping (Level, Coeff), the index bounds used to pick
lifting levels, the cancellation rule for products over Z/l^R, and module
calculus for finitely generated Z/l^n-modules: Howell canonical forms, Smith
forms with transforms, kernels, span membership and quasi-bases.

All computations are exact; moduli may be astronomically large (the level
bounds grow like l^(3n), so Coeff values are plain Python integers).
"""

from dataclasses import dataclass
from functools import lru_cache

from .errors import LevelMismatch, PreconditionViolated

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(m: int) -> bool:
    """Deterministic Miller-Rabin, exact for anything we will ever see."""
    if m < 2:
        return False
    for p in _SMALL_PRIMES:
        if m % p == 0:
            return m == p
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, m)
        if x in (1, m - 1):
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True, order=True)
class Level:
    """The pair (l, n) fixing the coefficient ring Z/l^n."""

    ell: int
    n: int

    def __post_init__(self):
        if not is_prime(self.ell):
            raise PreconditionViolated(f"ell={self.ell} is not prime")
        if self.n < 1:
            raise PreconditionViolated(f"level n={self.n} must be >= 1")
        object.__setattr__(self, "_modulus", self.ell ** self.n)

    @property
    def modulus(self) -> int:
        return self._modulus

    def reduced(self, n: int) -> "Level":
        if n > self.n:
            raise LevelMismatch(f"cannot raise level {self.n} to {n}")
        return Level(self.ell, n)

    def __str__(self):
        return f"Z/{self.ell}^{self.n}"


@dataclass(frozen=True)
class Coeff:
    """An element of Z/l^n, stored by its least non-negative representative."""

    value: int
    level: Level

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.level.modulus)

    def _match(self, other):
        if self.level != other.level:
            raise LevelMismatch(f"{self.level} vs {other.level}")

    def __add__(self, other):
        self._match(other)
        return Coeff(self.value + other.value, self.level)

    def __sub__(self, other):
        self._match(other)
        return Coeff(self.value - other.value, self.level)

    def __mul__(self, other):
        self._match(other)
        return Coeff(self.value * other.value, self.level)

    def __neg__(self):
        return Coeff(-self.value, self.level)

    def is_zero(self) -> bool:
        return self.value == 0

    def is_unit(self) -> bool:
        return self.value % self.level.ell != 0

    def valuation(self) -> int:
        """l-adic valuation of the representative; the zero class gets n."""
        return val_mod(self.value, self.level.ell, self.level.n)

    def reduce(self, n: int) -> "Coeff":
        return Coeff(self.value, self.level.reduced(n))

    def __str__(self):
        return str(self.value)


def index_m(r: int, n: int) -> int:
    """Lifting bound (r+1)*n - r for cancelling r nonzero factors."""
    if r < 1 or n < 1:
        raise PreconditionViolated("index_m needs r >= 1 and n >= 1")
    return (r + 1) * n - r


def index_n(ell: int, n: int):
    """The pair of stacked lifting bounds (N', N) at the given prime."""
    if n < 1:
        raise PreconditionViolated("index_n needs n >= 1")
    nprime = (6 * ell ** (3 * n - 2) - 7) * (n - 1) + 3 * n - 2
    return nprime, index_m(1, nprime)


def level_bound(ell: int, n: int) -> int:
    """Full detection-pipeline lifting level N(M2(M1(n))); not expected sharp."""
    return index_n(ell, index_m(2, index_m(1, n)))[1]


def cancellation_conclusion(a: Coeff, b: Coeff, n: int) -> bool:
    """Whether a = b mod l^n; the conclusion of the cancellation rule."""
    m = a.level.ell ** n
    return (a.value - b.value) % m == 0


def cancellation_holds(a: Coeff, b: Coeff, cs, n: int) -> bool:
    """Check the cancellation rule instance a*prod(cs) = b*prod(cs) over Z/l^R.

    Preconditions (raised as PreconditionViolated when broken): all inputs at
    one level R with R >= index_m(len(cs), n), every c nonzero mod l^n, and
    the two products actually equal at level R.  Under them the conclusion
    a = b mod l^n is guaranteed; the function exists to falsify misuse.
    """
    level = a.level
    if b.level != level or any(c.level != level for c in cs):
        raise LevelMismatch("cancellation inputs at mixed levels")
    r = len(cs)
    if r < 1:
        raise PreconditionViolated("need at least one cancelling factor")
    if level.n < index_m(r, n):
        raise PreconditionViolated(
            f"working level {level.n} below index_m({r},{n})={index_m(r, n)}"
        )
    elln = level.ell ** n
    for c in cs:
        if c.value % elln == 0:
            raise PreconditionViolated("cancelling factor vanishes mod l^n")
    prod = Coeff(1, level)
    for c in cs:
        prod = prod * c
    if (a * prod).value != (b * prod).value:
        raise PreconditionViolated("products disagree at the working level")
    return cancellation_conclusion(a, b, n)


# ---------------------------------------------------------------------------
# linear algebra over Z/l^e
# ---------------------------------------------------------------------------

def val_mod(x: int, ell: int, e: int) -> int:
    """l-adic valuation of x mod l^e, capped at e (the zero class)."""
    x %= ell ** e
    if x == 0:
        return e
    v = 0
    while x % ell == 0:
        x //= ell
        v += 1
    return v


def unit_part(x: int, ell: int, e: int) -> int:
    x %= ell ** e
    while x % ell == 0:
        x //= ell
    return x


def inv_mod(x: int, m: int) -> int:
    return pow(x, -1, m)


def howell_form(rows, ell: int, e: int, ncols: int):
    """Canonical Howell basis of the row span of `rows` over Z/l^e.

    Rows come back sorted by pivot column; pivots are pure powers of l and
    every other entry in a pivot column is reduced below the pivot.  Two
    generating sets span the same submodule iff their forms are identical.
    Pivot ties break toward earlier rows so the output is deterministic.
    """
    m = ell ** e
    work = []
    for r in rows:
        rr = [x % m for x in r]
        if len(rr) != ncols:
            raise LevelMismatch("row width mismatch")
        if any(rr):
            work.append(rr)
    result = []
    for col in range(ncols):
        best = None
        best_val = e
        for idx, r in enumerate(work):
            if r[col]:
                v = val_mod(r[col], ell, e)
                if v < best_val:
                    best_val = v
                    best = idx
        if best is None:
            continue
        piv = work.pop(best)
        u = unit_part(piv[col], ell, e)
        ui = inv_mod(u, m)
        piv = [x * ui % m for x in piv]
        pv = ell ** best_val
        for r in work:
            if r[col]:
                q = r[col] // pv
                for j in range(col, ncols):
                    r[j] = (r[j] - q * piv[j]) % m
        ann = ell ** (e - best_val)
        extra = [x * ann % m for x in piv]
        if any(extra):
            work.append(extra)
        work = [r for r in work if any(r)]
        result.append((col, best_val, piv))
    # reduce entries above each pivot below that pivot's power of l
    for col, v, piv in result:
        pv = ell ** v
        for col2, v2, other in result:
            if other is piv:
                continue
            if other[col]:
                q = other[col] // pv
                if q:
                    for j in range(col, ncols):
                        other[j] = (other[j] - q * piv[j]) % m
    return [tuple(piv) for _, _, piv in result]


def span_reduce(form, vec, ell: int, e: int):
    """Canonical coset representative of vec modulo the row span of a Howell
    form; the residue is zero iff vec lies in the span."""
    m = ell ** e
    v = [x % m for x in vec]
    for row in form:
        col = next(j for j, x in enumerate(row) if x)
        pv = ell ** val_mod(row[col], ell, e)
        q = v[col] // pv
        if q:
            for j in range(col, len(v)):
                v[j] = (v[j] - q * row[j]) % m
    return tuple(v)


def span_contains(form, vec, ell: int, e: int) -> bool:
    return not any(span_reduce(form, vec, ell, e))


def smith_form(rows, ell: int, e: int, ncols: int):
    """Smith form over Z/l^e with transforms.

    Returns (diag_vals, V, Vinv) where diag_vals are the l-valuations of the
    diagonal (length ncols, e meaning zero), and the column transform V
    satisfies: new generator j, expressed in the old generators, is row j of
    Vinv; old coordinates x map to new coordinates V^T x.
    """
    m = ell ** e
    a = [[x % m for x in r] for r in rows]
    nrows = len(a)
    vmat = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]
    vinv = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]

    def col_swap(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in vmat:
            r[i], r[j] = r[j], r[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def col_add(dst, src, c):
        # col_dst += c * col_src ; inverse on vinv rows: row_src -= c * row_dst
        for r in a:
            r[dst] = (r[dst] + c * r[src]) % m
        for r in vmat:
            r[dst] = (r[dst] + c * r[src]) % m
        for j in range(ncols):
            vinv[src][j] = (vinv[src][j] - c * vinv[dst][j]) % m

    def col_scale(i, u):
        ui = inv_mod(u, m)
        for r in a:
            r[i] = r[i] * u % m
        for r in vmat:
            r[i] = r[i] * u % m
        for j in range(ncols):
            vinv[i][j] = vinv[i][j] * ui % m

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]

    def row_add(dst, src, c):
        for j in range(ncols):
            a[dst][j] = (a[dst][j] + c * a[src][j]) % m

    def row_scale(i, u):
        for j in range(ncols):
            a[i][j] = a[i][j] * u % m

    diag = []
    k = 0
    while k < min(nrows, ncols):
        best = None
        best_val = e
        for i in range(k, nrows):
            for j in range(k, ncols):
                if a[i][j]:
                    v = val_mod(a[i][j], ell, e)
                    if v < best_val:
                        best_val = v
                        best = (i, j)
        if best is None:
            break
        i0, j0 = best
        row_swap(k, i0)
        col_swap(k, j0)
        row_scale(k, inv_mod(unit_part(a[k][k], ell, e), m))
        pv = ell ** best_val
        for i in range(nrows):
            if i != k and a[i][k]:
                row_add(i, k, -(a[i][k] // pv))
        for j in range(ncols):
            if j != k and a[k][j]:
                col_add(j, k, -(a[k][j] // pv))
        diag.append(best_val)
        k += 1
    while len(diag) < ncols:
        diag.append(e)
    return diag, vmat, vinv


def kernel_mod(rows, ell: int, e: int, ncols: int):
    """Generators for {x : M x = 0 over Z/l^e} with M given by rows."""
    m = ell ** e
    diag, vmat, _ = smith_form(rows, ell, e, ncols)
    gens = []
    for j in range(ncols):
        scale = ell ** (e - diag[j])
        if scale == m:
            continue
        vec = tuple(vmat[i][j] * scale % m for i in range(ncols))
        if any(vec):
            gens.append(vec)
    return howell_form(gens, ell, e, ncols)


def annihilator_mod(rows, ell: int, e: int, ncols: int):
    """Generators for {x : <r, x> = 0 for every row r} over Z/l^e."""
    return kernel_mod(rows, ell, e, ncols)


@dataclass(frozen=True)
class FinMod:
    """A finitely generated Z/l^n-module presented by generators and relations.

    `gens` are labels; `relations` are coefficient rows declaring combinations
    equal to zero.
    """

    gens: tuple
    relations: tuple
    level: Level

    def __post_init__(self):
        m = self.level.modulus
        rel = tuple(tuple(x % m for x in r) for r in self.relations)
        for r in rel:
            if len(r) != len(self.gens):
                raise LevelMismatch("relation width mismatch")
        object.__setattr__(self, "relations", rel)

    @property
    def rank(self):
        return len(self.gens)

    def _howell(self):
        return howell_form(
            self.relations, self.level.ell, self.level.n, self.rank
        )

    def reduce(self, vec):
        """Canonical coset representative of vec modulo the relations."""
        return span_reduce(self._howell(), vec, self.level.ell, self.level.n)

    def quasi_basis(self):
        """[(expression over the generators, additive order)] sorted by order.

        The family generates, any vanishing combination vanishes termwise, and
        its length equals dim over Z/l of M/l.
        """
        ell, e = self.level.ell, self.level.n
        diag, _, vinv = smith_form(self.relations, ell, e, self.rank)
        out = []
        for j in range(self.rank):
            # diagonal l^v means the j-th transformed generator has order l^v
            order = ell ** diag[j]
            if order > 1:
                out.append((tuple(vinv[j]), order))
        out.sort(key=lambda t: (-t[1], t[0]))
        return out

    def element_count(self):
        total = 1
        for _, order in self.quasi_basis():
            total *= order
        return total

    def is_cyclic(self):
        return len(self.quasi_basis()) <= 1

    def span_members(self, gens_vectors):
        """All distinct coset representatives of the span of gens_vectors.

        Exhaustive; intended for small oracles only.
        """
        m = self.level.modulus
        seen = {self.reduce((0,) * self.rank)}
        frontier = [next(iter(seen))]
        while frontier:
            cur = frontier.pop()
            for g in gens_vectors:
                nxt = self.reduce(tuple((a + b) % m for a, b in zip(cur, g)))
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen


def submodule_contains(module: FinMod, gens, x) -> bool:
    """Exact membership of x in the span of gens inside the presented module."""
    if len(x) != module.rank or any(len(g) != module.rank for g in gens):
        raise LevelMismatch("vector width does not match module rank")
    ell, e = module.level.ell, module.level.n
    form = howell_form(
        list(gens) + list(module.relations), ell, e, module.rank
    )
    return span_contains(form, x, ell, e)


@lru_cache(maxsize=None)
def _binom2(m: int) -> int:
    return m * (m - 1) // 2
