"""Exact linear algebra over the rationals and prime fields.

Every other module reduces its questions to the primitives here: reduced row
echelon forms, null spaces and linear solves.  Nothing in this package uses
floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class InputError(ValueError):
    """Raised for malformed input (dimension mismatch, bad field, ...)."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True)
class Field:
    """The ground field: ``Field()`` is Q, ``Field(p)`` is F_p."""

    p: int = 0

    def __post_init__(self):
        if self.p:
            if not _is_prime(self.p):
                raise InputError(f"{self.p} is not prime")
            if self.p >= 2**31:
                raise InputError("prime fields require p < 2^31")

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    def __str__(self) -> str:
        return "q" if self.p == 0 else f"fp:{self.p}"

    @staticmethod
    def parse(text: str) -> "Field":
        t = text.strip().lower()
        if t in ("q", "qq", "rationals"):
            return Field()
        if t.startswith("fp:") or t.startswith("f"):
            digits = t.split(":", 1)[1] if ":" in t else t[1:]
            try:
                return Field(int(digits))
            except ValueError:
                pass
        raise InputError(f"unknown field {text!r}; expected q or fp:<p>")

    def __call__(self, x) -> object:
        """Coerce an int, Fraction or string into a field element."""
        if isinstance(x, str):
            x = Fraction(x.strip())
        if self.p == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def zero(self):
        return Fraction(0) if self.p == 0 else 0

    def one(self):
        return Fraction(1) if self.p == 0 else 1

    def inv(self, x):
        if not x:
            raise ZeroDivisionError("inverse of zero")
        if self.p == 0:
            return 1 / x
        return pow(x, -1, self.p)

    def elements(self):
        """All elements of a prime field, in increasing order."""
        if self.p == 0:
            raise InputError("Q has infinitely many elements")
        return range(self.p)

    def fmt(self, x) -> str:
        if self.p:
            return str(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class Matrix:
    """Immutable dense matrix over a :class:`Field`.

    ``data`` is a tuple of row tuples.  Zero-row or zero-column matrices keep
    their shape explicitly.
    """

    __slots__ = ("nrows", "ncols", "data", "field", "_hash")

    def __init__(self, field: Field, nrows: int, ncols: int, data: Sequence[Sequence] | None = None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        if data is None:
            z = field.zero()
            self.data = tuple((z,) * ncols for _ in range(nrows))
        else:
            if len(data) != nrows or any(len(r) != ncols for r in data):
                raise InputError(f"matrix entries do not match shape {nrows}x{ncols}")
            self.data = tuple(tuple(r) for r in data)
        self._hash = None

    # construction helpers
    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        rows = [[field(x) for x in r] for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(field, len(rows), ncols, rows)

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Matrix":
        return cls(field, nrows, ncols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        z, o = field.zero(), field.one()
        return cls(field, n, n, [[o if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, field: Field, nrows: int, cols: Sequence[Sequence]) -> "Matrix":
        return cls(field, nrows, len(cols), [[c[i] for c in cols] for i in range(nrows)])

    # basic protocol
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.shape == other.shape
            and self.field == other.field
            and self.data == other.data
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nrows, self.ncols, self.data))
        return self._hash

    def __repr__(self) -> str:
        f = self.field.fmt
        body = "; ".join(" ".join(f(x) for x in r) for r in self.data)
        return f"Matrix({self.nrows}x{self.ncols} [{body}])"

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def to_lists(self) -> list[list[str]]:
        f = self.field.fmt
        return [[f(x) for x in r] for r in self.data]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.data)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.ncols)]

    def flat(self) -> list:
        return [x for r in self.data for x in r]

    def is_zero(self) -> bool:
        return not any(x for r in self.data for x in r)

    # arithmetic
    def _check(self, other: "Matrix"):
        if self.field != other.field:
            raise InputError("matrices over different fields")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise InputError(f"shape mismatch {self.shape} + {other.shape}")
        p = self.field.p
        if p:
            rows = [[(a + b) % p for a, b in zip(r, s)] for r, s in zip(self.data, other.data)]
        else:
            rows = [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)]
        return Matrix(self.field, self.nrows, self.ncols, rows)

    def __neg__(self) -> "Matrix":
        p = self.field.p
        if p:
            rows = [[(-a) % p for a in r] for r in self.data]
        else:
            rows = [[-a for a in r] for r in self.data]
        return Matrix(self.field, self.nrows, self.ncols, rows)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        c = self.field(c)
        p = self.field.p
        if p:
            rows = [[(a * c) % p for a in r] for r in self.data]
        else:
            rows = [[a * c for a in r] for r in self.data]
        return Matrix(self.field, self.nrows, self.ncols, rows)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.ncols != other.nrows:
            raise InputError(f"shape mismatch {self.shape} @ {other.shape}")
        p = self.field.p
        cols = list(zip(*other.data)) if other.nrows else [()] * other.ncols
        z = self.field.zero()
        out = []
        for r in self.data:
            if p:
                out.append([sum(a * b for a, b in zip(r, c)) % p for c in cols])
            else:
                out.append([sum((a * b for a, b in zip(r, c)), z) for c in cols])
        return Matrix(self.field, self.nrows, other.ncols, out)

    def transpose(self) -> "Matrix":
        if self.nrows == 0:
            return Matrix(self.field, self.ncols, 0, [() for _ in range(self.ncols)])
        return Matrix(self.field, self.ncols, self.nrows, list(zip(*self.data)))

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(self.field, len(rows), len(cols), [[self.data[i][j] for j in cols] for i in rows])

    def rank(self) -> int:
        return rref(self)[2]

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.nrows

    def inverse(self) -> "Matrix":
        if self.nrows != self.ncols:
            raise InputError("inverse of a non-square matrix")
        x = solve(self, Matrix.identity(self.field, self.nrows))
        if x is None or not self.is_invertible():
            raise InputError("matrix is singular")
        return x

    def power(self, k: int) -> "Matrix":
        result = Matrix.identity(self.field, self.nrows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result


def hstack(field: Field, blocks: Sequence[Matrix], nrows: int | None = None) -> Matrix:
    if not blocks:
        return Matrix(field, nrows or 0, 0)
    n = blocks[0].nrows
    for b in blocks:
        if b.nrows != n:
            raise InputError("hstack row mismatch")
    rows = [sum((b.data[i] for b in blocks), ()) for i in range(n)]
    return Matrix(field, n, sum(b.ncols for b in blocks), rows)


def vstack(field: Field, blocks: Sequence[Matrix], ncols: int | None = None) -> Matrix:
    if not blocks:
        return Matrix(field, 0, ncols or 0)
    n = blocks[0].ncols
    for b in blocks:
        if b.ncols != n:
            raise InputError("vstack column mismatch")
    rows = [r for b in blocks for r in b.data]
    return Matrix(field, len(rows), n, rows)


def block(field: Field, grid: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble a block matrix; every block must already have its final shape."""
    return vstack(field, [hstack(field, row) for row in grid], sum(b.ncols for b in grid[0]) if grid else 0)


def block_diag(field: Field, blocks: Sequence[Matrix]) -> Matrix:
    nr = sum(b.nrows for b in blocks)
    nc = sum(b.ncols for b in blocks)
    rows = []
    left = 0
    z = field.zero()
    for b in blocks:
        for r in b.data:
            rows.append((z,) * left + r + (z,) * (nc - left - b.ncols))
        left += b.ncols
    return Matrix(field, nr, nc, rows)


def _rref_rows(field: Field, rows: list[list], ncols: int):
    """In-place reduction; returns the pivot column list."""
    p = field.p
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        inv = field.inv(pr[c])
        if p:
            pr[:] = [(x * inv) % p for x in pr]
        else:
            pr[:] = [x * inv for x in pr]
        for i in range(nrows):
            if i != r:
                row = rows[i]
                f = row[c]
                if f:
                    if p:
                        row[:] = [(a - f * b) % p for a, b in zip(row, pr)]
                    else:
                        row[:] = [a - f * b for a, b in zip(row, pr)]
        pivots.append(c)
        r += 1
    return pivots


def rref(m: Matrix) -> tuple[Matrix, list[int], int]:
    """Reduced row echelon form with first-nonzero pivoting in column order."""
    rows = [list(r) for r in m.data]
    pivots = _rref_rows(m.field, rows, m.ncols)
    return Matrix(m.field, m.nrows, m.ncols, rows), pivots, len(pivots)


def rank_of_rows(field: Field, rows: Iterable[Sequence], ncols: int) -> int:
    work = [list(r) for r in rows]
    return len(_rref_rows(field, work, ncols))


def kernel_basis(m: Matrix) -> Matrix:
    """Columns form a basis of the null space; one column per free variable."""
    red, pivots, rank = rref(m)
    n = m.ncols
    field = m.field
    free = [j for j in range(n) if j not in set(pivots)]
    z, o = field.zero(), field.one()
    p = field.p
    cols = []
    for fj in free:
        v = [z] * n
        v[fj] = o
        for i, pc in enumerate(pivots):
            x = red.data[i][fj]
            v[pc] = (-x) % p if p else -x
        cols.append(v)
    return Matrix.from_columns(field, n, cols) if cols else Matrix(field, n, 0)


def solve(a: Matrix, b: Matrix) -> Matrix | None:
    """Return some x with a @ x == b, or None when no solution exists.

    The particular solution sets all free variables to zero; the full solution
    set is x + span(kernel_basis(a)).
    """
    if a.nrows != b.nrows:
        raise InputError(f"solve: {a.nrows} rows against {b.nrows}")
    field = a.field
    n = a.ncols
    rows = [list(ra) + list(rb) for ra, rb in zip(a.data, b.data)]
    pivots = _rref_rows(field, rows, n)
    # an inconsistent row has its pivot beyond the coefficient block
    for i in range(len(pivots), len(rows)):
        if any(rows[i][n:]):
            return None
    z = field.zero()
    x = [[z] * b.ncols for _ in range(n)]
    for i, pc in enumerate(pivots):
        x[pc] = rows[i][n:]
    return Matrix(field, n, b.ncols, x)


def solve_vector(a: Matrix, v: Sequence) -> list | None:
    col = Matrix(a.field, len(v), 1, [[x] for x in v])
    x = solve(a, col)
    return None if x is None else [r[0] for r in x.data]


def column_space_basis(m: Matrix) -> list[int]:
    """Indices of a deterministic basis of pivot columns."""
    return rref(m)[1]


def left_kernel(m: Matrix) -> Matrix:
    """Rows form a basis of {y : y m = 0}."""
    return kernel_basis(m.transpose()).transpose()


# ---------------------------------------------------------------------------
# Polynomials (coefficient lists, lowest degree first) for eigenvalue search.


def char_poly(m: Matrix) -> list:
    """Characteristic polynomial det(x I - m), division-free (Berkowitz).

    Uses the Samuelson-Berkowitz recursion, which needs no division and so
    works in every characteristic.
    """
    field = m.field
    n = m.nrows
    p = field.p
    a = [list(r) for r in m.data]

    def mul(x, y):
        return (x * y) % p if p else x * y

    def add(x, y):
        return (x + y) % p if p else x + y

    # Berkowitz: polynomial coefficients highest degree first
    poly = [field.one(), (-a[0][0]) % p if p else -a[0][0]] if n else [field.one()]
    for k in range(1, n):
        # A_k is the leading (k+1)x(k+1) block; split off last row/column
        R = [a[k][j] for j in range(k)]
        C = [a[i][k] for i in range(k)]
        Akk = a[k][k]
        Ak = [[a[i][j] for j in range(k)] for i in range(k)]
        # Toeplitz column: 1, -a_kk, -R C, -R A C, -R A^2 C, ...
        col = [field.one(), (-Akk) % p if p else -Akk]
        vec = C[:]
        for _ in range(k):
            s = field.zero()
            for x, y in zip(R, vec):
                s = add(s, mul(x, y))
            col.append((-s) % p if p else -s)
            vec = [sum((mul(Ak[i][j], vec[j]) for j in range(k)), field.zero()) % p if p
                   else sum((Ak[i][j] * vec[j] for j in range(k)), field.zero()) for i in range(k)]
        # new poly = T @ old poly, T lower triangular Toeplitz of size (k+2)x(k+1)
        new = []
        for i in range(k + 2):
            s = field.zero()
            for j in range(min(i + 1, k + 1)):
                s = add(s, mul(col[i - j], poly[j]))
            new.append(s)
        poly = new
    return list(reversed(poly))


def _poly_eval(field: Field, poly: Sequence, x):
    acc = field.zero()
    p = field.p
    for c in reversed(poly):
        acc = (acc * x + c) % p if p else acc * x + c
    return acc


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def _poly_trim(poly: list) -> list:
    while poly and not poly[-1]:
        poly.pop()
    return poly


def _poly_mulmod(a: list, b: list, m: list, p: int) -> list:
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    return _poly_rem(prod, m, p)


def _poly_rem(a: list, m: list, p: int) -> list:
    a = _poly_trim(list(a))
    inv = pow(m[-1], -1, p)
    while len(a) >= len(m):
        f = (a[-1] * inv) % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - f * c) % p
        _poly_trim(a)
    return a


def _poly_gcd(a: list, b: list, p: int) -> list:
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        a, b = b, _poly_rem(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [(c * inv) % p for c in a]
    return a


def _poly_powmod(base: list, e: int, m: list, p: int) -> list:
    result = [1]
    base = _poly_rem(base, m, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, m, p)
        base = _poly_mulmod(base, base, m, p)
        e >>= 1
    return result


def _fp_roots(poly: list, p: int) -> list[int]:
    poly = _poly_trim([c % p for c in poly])
    if len(poly) <= 1:
        return []
    if p <= 5000:
        return [x for x in range(p) if not _poly_eval(Field(p), poly, x)]
    # product of the distinct linear factors, then deterministic splitting
    xp = _poly_powmod([0, 1], p, poly, p)
    xp = xp + [0] * (2 - len(xp))
    xp[1] = (xp[1] - 1) % p
    g = _poly_gcd(poly, _poly_trim(xp), p)
    roots: list[int] = []

    def split(h: list, shift: int):
        if len(h) <= 1:
            return
        if len(h) == 2:
            roots.append((-h[0] * pow(h[1], -1, p)) % p)
            return
        while shift < p:
            t = _poly_powmod([shift, 1], (p - 1) // 2, h, p)
            t = t + [0] * (1 - len(t)) if t else [0]
            t[0] = (t[0] - 1) % p
            d = _poly_gcd(h, _poly_trim(t), p)
            if 1 < len(d) < len(h):
                split(d, shift + 1)
                q = _poly_div_exact(h, d, p)
                split(q, shift + 1)
                return
            shift += 1

    split(g, 0)
    return sorted(set(roots))


def _poly_div_exact(a: list, b: list, p: int) -> list:
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    inv = pow(b[-1], -1, p)
    for k in range(len(out) - 1, -1, -1):
        c = (a[k + len(b) - 1] * inv) % p
        out[k] = c
        for i, x in enumerate(b):
            a[k + i] = (a[k + i] - c * x) % p
    return out


def roots_in_field(field: Field, poly: Sequence) -> list:
    """Distinct roots lying in the ground field, sorted deterministically."""
    if field.p:
        return _fp_roots(list(poly), field.p)
    coeffs = [Fraction(c) for c in poly]
    coeffs = _poly_trim(coeffs)
    if len(coeffs) <= 1:
        return []
    roots = set()
    # strip factors of x
    while coeffs and coeffs[0] == 0:
        roots.add(Fraction(0))
        coeffs = coeffs[1:]
    if len(coeffs) <= 1:
        return sorted(roots)
    den = 1
    for c in coeffs:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    for a in _divisors(ints[0]):
        for b in _divisors(ints[-1]):
            for s in (1, -1):
                x = Fraction(s * a, b)
                if _poly_eval(field, coeffs, x) == 0:
                    roots.add(x)
    return sorted(roots)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)
