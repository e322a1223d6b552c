"""Exact linear algebra over the Gaussian rationals.

Everything here is field-generic: the routines only use +, -, *, / and
truthiness of entries, so they work for Fraction, GaussianRational, or any
other exact field type.  Dense routines (rref, nullspace, solve) are used for
the degree-by-degree systems, which stay small; the sparse RowSpace is used
for the larger filtration-truncated rank computations.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def _gcd3(a, b, c):
    return gcd(gcd(abs(a), abs(b)), abs(c))


class GaussianRational:
    """Exact complex number (a + b*i)/d with integer a, b and d > 0.

    Normalized so that gcd(a, b, d) == 1.  Supports mixed arithmetic with
    int and Fraction.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d=1):
        if isinstance(a, GaussianRational):
            a, b, d = a.a, a.b, a.d
        elif isinstance(a, Fraction):
            if isinstance(b, Fraction) or b:
                bf = Fraction(b)
                den = a.denominator * bf.denominator // gcd(a.denominator, bf.denominator)
                a, b, d = a.numerator * (den // a.denominator), bf.numerator * (den // bf.denominator), den
            else:
                a, b, d = a.numerator, 0, a.denominator
        if d < 0:
            a, b, d = -a, -b, -d
        if d == 0:
            raise ZeroDivisionError("zero denominator")
        g = _gcd3(a, b, d)
        if g > 1:
            a //= g
            b //= g
            d //= g
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    @classmethod
    def _raw(cls, a, b, d):
        self = object.__new__(cls)
        if d < 0:
            a, b, d = -a, -b, -d
        g = _gcd3(a, b, d)
        if g > 1:
            a //= g
            b //= g
            d //= g
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)
        return self

    @classmethod
    def from_fractions(cls, re, im=0):
        re = Fraction(re)
        im = Fraction(im)
        return cls(re, im)

    @property
    def real(self):
        return Fraction(self.a, self.d)

    @property
    def imag(self):
        return Fraction(self.b, self.d)

    def is_real(self):
        return self.b == 0

    def conjugate(self):
        return GaussianRational._raw(self.a, -self.b, self.d)

    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, int):
            return GaussianRational._raw(other, 0, 1)
        if isinstance(other, Fraction):
            return GaussianRational._raw(other.numerator, 0, other.denominator)
        return None

    def __add__(self, other):
        o = GaussianRational._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(self.a * o.d + o.a * self.d,
                                     self.b * o.d + o.b * self.d,
                                     self.d * o.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussianRational._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(self.a * o.d - o.a * self.d,
                                     self.b * o.d - o.b * self.d,
                                     self.d * o.d)

    def __rsub__(self, other):
        o = GaussianRational._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = GaussianRational._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational._raw(self.a * o.a - self.b * o.b,
                                     self.a * o.b + self.b * o.a,
                                     self.d * o.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational._coerce(other)
        if o is None:
            return NotImplemented
        n = o.a * o.a + o.b * o.b
        if n == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational._raw((self.a * o.a + self.b * o.b) * o.d,
                                     (self.b * o.a - self.a * o.b) * o.d,
                                     self.d * n)

    def __rtruediv__(self, other):
        o = GaussianRational._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational._raw(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = GaussianRational._raw(1, 0, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __eq__(self, other):
        o = GaussianRational._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b and self.d == o.d

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.d))
        return hash((self.a, self.b, self.d))

    def __complex__(self):
        return complex(self.a / self.d, self.b / self.d)

    def __repr__(self):
        if self.b == 0:
            return str(Fraction(self.a, self.d))
        return f"({Fraction(self.a, self.d)}{'+' if self.b >= 0 else '-'}{abs(Fraction(self.b, self.d))}i)"


QQI_ZERO = GaussianRational(0)
QQI_ONE = GaussianRational(1)
QQI_I = GaussianRational(0, 1)


def rref(rows):
    """Reduced row echelon form of a dense matrix (list of row lists).

    Returns (new_rows, pivot_cols).  The input is not modified.
    """
    rows = [list(r) for r in rows]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivot_cols = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r][c]
        if piv != 1:
            inv = 1 / piv if not isinstance(piv, GaussianRational) else QQI_ONE / piv
            rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                ri, rr = rows[i], rows[r]
                rows[i] = [vi - f * vr for vi, vr in zip(ri, rr)]
        pivot_cols.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivot_cols


def rank(rows):
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows, ncols, one=1):
    """Basis of the right kernel of the matrix, one vector per free column.

    Vector k has `one` in its free column and the pivot columns filled by back
    substitution; ordering follows ascending free column, which is what makes
    downstream bases reproducible.
    """
    if not rows:
        return [_unit(ncols, k, one) for k in range(ncols)]
    red, pivot_cols = rref(rows)
    pivset = set(pivot_cols)
    free_cols = [c for c in range(ncols) if c not in pivset]
    zero = one * 0
    basis = []
    for fc in free_cols:
        vec = [zero] * ncols
        vec[fc] = one
        for r, pc in enumerate(pivot_cols):
            if red[r][fc]:
                vec[pc] = -red[r][fc]
        basis.append(vec)
    return basis


def _unit(n, k, one):
    zero = one * 0
    vec = [zero] * n
    vec[k] = one
    return vec


def solve_multi(rows, ncols, rhs_list, one=1):
    """Solve A x = b for several right-hand sides at once, exactly.

    rows: dense rows of A (length ncols each); rhs_list: list of vectors of
    length len(rows).  Returns a list with, per rhs, the particular solution
    obtained by setting all free variables to zero, or None if inconsistent.
    """
    nrhs = len(rhs_list)
    aug = [list(row) + [rhs[i] for rhs in rhs_list] for i, row in enumerate(rows)]
    if not aug:
        zero = one * 0
        return [[zero] * ncols for _ in range(nrhs)]
    red = aug
    # eliminate, but only pick pivots among the first ncols columns
    pivot_cols = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(red)):
            if red[i][c]:
                pr = i
                break
        if pr is None:
            continue
        red[r], red[pr] = red[pr], red[r]
        piv = red[r][c]
        if piv != 1:
            inv = 1 / piv if not isinstance(piv, GaussianRational) else QQI_ONE / piv
            red[r] = [v * inv for v in red[r]]
        for i in range(len(red)):
            if i != r and red[i][c]:
                f = red[i][c]
                ri, rr = red[i], red[r]
                red[i] = [vi - f * vr for vi, vr in zip(ri, rr)]
        pivot_cols.append(c)
        r += 1
        if r == len(red):
            break
    zero = one * 0
    out = []
    for k in range(nrhs):
        bad = False
        for i in range(r, len(red)):
            if red[i][ncols + k]:
                bad = True
                break
        if bad:
            out.append(None)
            continue
        sol = [zero] * ncols
        for row_idx, pc in enumerate(pivot_cols):
            sol[pc] = red[row_idx][ncols + k]
        out.append(sol)
    return out


class RowSpace:
    """Incrementally built row space kept in reduced echelon form.

    Rows are sparse dicts column -> value.  `key` orders the columns for
    pivot selection; picking pivots on the highest-degree monomials first
    keeps fill-in low for the filtration-truncated module matrices.
    """

    def __init__(self, key=None):
        self.key = key if key is not None else (lambda c: c)
        self.rows = {}  # pivot column -> sparse row with row[pivot] == 1

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, vec):
        """Return a copy of vec forward-reduced against the stored rows."""
        vec = {c: v for c, v in vec.items() if v}
        rows = self.rows
        key = self.key
        while True:
            c = None
            for col in vec:
                if col in rows and (c is None or key(col) < key(c)):
                    c = col
            if c is None:
                return vec
            f = vec.pop(c)
            for col, v in rows[c].items():
                if col == c:
                    continue
                nv = vec.get(col, 0) - f * v
                if nv:
                    vec[col] = nv
                elif col in vec:
                    del vec[col]

    def add(self, vec):
        """Insert a vector; returns True if it enlarged the space."""
        red = self.reduce(vec)
        if not red:
            return False
        key = self.key
        p = min(red, key=key)
        piv = red[p]
        if piv != 1:
            inv = 1 / piv if not isinstance(piv, GaussianRational) else QQI_ONE / piv
            red = {c: v * inv for c, v in red.items()}
        # back-eliminate p from existing rows to keep full reduction
        for q, row in self.rows.items():
            if p in row:
                f = row[p]
                for c, v in red.items():
                    nv = row.get(c, 0) - f * v
                    if nv:
                        row[c] = nv
                    elif c in row:
                        del row[c]
        self.rows[p] = red
        return True

    def contains(self, vec):
        return not self.reduce(vec)
