"""Small exact-rational square matrices.

Entries are Fractions; every operation is exact.  Sizes stay at most 5x5
here, so plain Python loops are fast enough.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from operator import mul


class FactorizationError(ArithmeticError):
    """A triangular factorization needed a pivot that is zero."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floating point entries are not allowed")
    return Fraction(x)


class RationalMatrix:
    __slots__ = ("rows", "_hash")

    def __init__(self, rows):
        self.rows = tuple(tuple(_frac(x) for x in r) for r in rows)
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise ValueError("matrix must be square")
        self._hash = None

    @classmethod
    def identity(cls, size: int) -> "RationalMatrix":
        return cls._raw(tuple(tuple(Fraction(int(i == j)) for j in range(size)) for i in range(size)))

    @classmethod
    def _raw(cls, rows) -> "RationalMatrix":
        m = object.__new__(cls)
        m.rows = rows
        m._hash = None
        return m

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def __mul__(self, other: "RationalMatrix") -> "RationalMatrix":
        cols = tuple(zip(*other.rows))
        return RationalMatrix._raw(tuple(tuple([sum(map(mul, r, c)) for c in cols]) for r in self.rows))

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self) -> str:
        return "RationalMatrix(" + repr([[str(x) for x in r] for r in self.rows]) + ")"

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix._raw(tuple(zip(*self.rows)))

    def map_entries(self, f) -> "RationalMatrix":
        n = self.size
        return RationalMatrix._raw(tuple(tuple(f(i, j, self.rows[i][j]) for j in range(n)) for i in range(n)))

    def inverse(self) -> "RationalMatrix":
        n = self.size
        a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            piv = next((r for r in range(c, n) if a[r][c] != 0), None)
            if piv is None:
                raise ZeroDivisionError("matrix is singular")
            a[c], a[piv] = a[piv], a[c]
            inv = 1 / a[c][c]
            a[c] = [x * inv for x in a[c]]
            for r in range(n):
                if r != c and a[r][c] != 0:
                    f = a[r][c]
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return RationalMatrix._raw(tuple(tuple(r[n:]) for r in a))

    def det(self) -> Fraction:
        return det(self.rows)

    def minor(self, rows, cols) -> Fraction:
        return det([[self.rows[i][j] for j in cols] for i in rows])

    def to_json(self) -> list:
        return [[_fmt(x) for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, obj) -> "RationalMatrix":
        return cls([[Fraction(str(x)) for x in r] for r in obj])


def _fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def det(rows) -> Fraction:
    a = [list(r) for r in rows]
    n = len(a)
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            out = -out
        out *= a[c][c]
        for r in range(c + 1, n):
            if a[r][c] != 0:
                f = a[r][c] / a[c][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return out


def rank(rows) -> int:
    """Rank by fraction-free (Bareiss style) elimination on integer-cleared rows."""
    a = [list(r) for r in rows]
    if not a or not a[0]:
        return 0
    # clear denominators row by row so the elimination stays in the integers
    b = []
    for r in a:
        d = lcm(*(x.denominator for x in r))
        b.append([int(x * d) for x in r])
    m, n = len(b), len(b[0])
    rk = 0
    prev = 1
    for c in range(n):
        piv = next((r for r in range(rk, m) if b[r][c] != 0), None)
        if piv is None:
            continue
        b[rk], b[piv] = b[piv], b[rk]
        for r in range(rk + 1, m):
            b[r] = [(b[rk][c] * b[r][k] - b[r][c] * b[rk][k]) // prev for k in range(n)]
        prev = b[rk][c]
        rk += 1
        if rk == m:
            break
    return rk


def ldu(g: RationalMatrix) -> tuple[RationalMatrix, RationalMatrix, RationalMatrix]:
    """g = L D U with L unit lower, D diagonal, U unit upper; needs nonzero leading minors."""
    n = g.size
    a = [list(r) for r in g.rows]
    low = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        if a[c][c] == 0:
            raise FactorizationError(f"leading principal minor of size {c + 1} vanishes")
        for r in range(c + 1, n):
            if a[r][c] != 0:
                f = a[r][c] / a[c][c]
                low[r][c] = f
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    diag = [[a[i][i] if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    up = [[a[i][j] / a[i][i] if j >= i else Fraction(0) for j in range(n)] for i in range(n)]
    return RationalMatrix._raw(tuple(map(tuple, low))), RationalMatrix._raw(tuple(map(tuple, diag))), \
        RationalMatrix._raw(tuple(map(tuple, up)))


def _flip(g: RationalMatrix) -> RationalMatrix:
    n = g.size
    return RationalMatrix._raw(tuple(tuple(g.rows[n - 1 - i][n - 1 - j] for j in range(n)) for i in range(n)))


def udl(g: RationalMatrix) -> tuple[RationalMatrix, RationalMatrix, RationalMatrix]:
    """g = U D L with U unit upper, D diagonal, L unit lower (via the antidiagonal flip)."""
    low, diag, up = ldu(_flip(g))
    return _flip(low), _flip(diag), _flip(up)


def leading_minors_nonzero(g: RationalMatrix) -> bool:
    n = g.size
    a = [list(r) for r in g.rows]
    for c in range(n):
        if a[c][c] == 0:
            return False
        for r in range(c + 1, n):
            if a[r][c] != 0:
                f = a[r][c] / a[c][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return True
