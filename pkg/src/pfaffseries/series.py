"""Sparse truncated multivariate power series over the rationals.

A :class:`Series` in ``m`` variables holds every coefficient of total degree
``<= trunc`` exactly; anything above ``trunc`` is unknown, not zero.  Binary
operations keep the smaller truncation so no result ever claims precision
it does not have.

Axes are numbered from 1, matching ``x1 .. xm`` in the expression syntax.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

MultiIndex = tuple[int, ...]


class NonUnitMatrix(ArithmeticError):
    """Matrix is not invertible over the truncated series ring."""

    def __init__(self, message: str, level: int | None = None):
        super().__init__(message)
        self.level = level


def _rat(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


class Series:
    __slots__ = ("m", "trunc", "terms")

    def __init__(self, m: int, trunc: int, terms: Mapping[MultiIndex, object] | None = None):
        if m < 1:
            raise ValueError("a series needs at least one variable")
        if trunc < 0:
            raise ValueError("truncation degree must be >= 0")
        self.m = m
        self.trunc = trunc
        clean: dict[MultiIndex, Fraction] = {}
        for k, v in (terms or {}).items():
            k = tuple(k)
            if len(k) != m or min(k) < 0:
                raise ValueError(f"bad multi-index {k} for {m} variables")
            if sum(k) > trunc or not v:
                continue
            clean[k] = _rat(v)
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, m: int, trunc: int) -> Series:
        return cls(m, trunc)

    @classmethod
    def constant(cls, c, m: int, trunc: int) -> Series:
        return cls(m, trunc, {(0,) * m: c})

    @classmethod
    def monomial(cls, k: Sequence[int], c, trunc: int) -> Series:
        return cls(len(k), trunc, {tuple(k): c})

    @classmethod
    def variable(cls, axis: int, m: int, trunc: int) -> Series:
        _check_axis(axis, m)
        k = [0] * m
        k[axis - 1] = 1
        return cls(m, trunc, {tuple(k): 1})

    # -- basic protocol ----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.m == other.m and self.trunc == other.trunc and self.terms == other.terms

    def __hash__(self):
        return hash((self.m, self.trunc, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Series({self.to_text()} + O(deg {self.trunc + 1}))"

    def __str__(self):
        return self.to_text()

    def coeff(self, k: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(k), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.m, Fraction(0))

    def degree_part(self, d: int) -> dict[MultiIndex, Fraction]:
        return {k: v for k, v in self.terms.items() if sum(k) == d}

    def sorted_terms(self) -> list[tuple[MultiIndex, Fraction]]:
        """Terms by ascending total degree, ``x1`` powers first within a degree."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), tuple(-e for e in kv[0])))

    def to_text(self) -> str:
        return format_terms(self.sorted_terms(), [f"x{i + 1}" for i in range(self.m)])

    def truncate(self, trunc: int) -> Series:
        if trunc > self.trunc:
            raise ValueError("cannot raise truncation without new information")
        return Series(self.m, trunc, self.terms)

    # -- ring operations ---------------------------------------------------

    def _check(self, other: Series) -> None:
        if self.m != other.m:
            raise ValueError(f"variable-count mismatch: {self.m} vs {other.m}")

    def __add__(self, other):
        if not isinstance(other, Series):
            return self + Series.constant(other, self.m, self.trunc)
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Series(self.m, min(self.trunc, other.trunc), out)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.m, self.trunc, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series):
            c = _rat(other)
            return Series(self.m, self.trunc, {k: c * v for k, v in self.terms.items()})
        self._check(other)
        trunc = min(self.trunc, other.trunc)
        right = sorted((sum(k), k, v) for k, v in other.terms.items())
        out: dict[MultiIndex, Fraction] = {}
        for ka, va in self.terms.items():
            room = trunc - sum(ka)
            for db, kb, vb in right:
                if db > room:
                    break
                key = tuple(a + b for a, b in zip(ka, kb))
                out[key] = out.get(key, 0) + va * vb
        return Series(self.m, trunc, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> Series:
        if e < 0:
            raise ValueError("negative powers are not supported; use inverse()")
        result = Series.constant(1, self.m, self.trunc)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> Series:
        """Multiplicative inverse; the constant term must be nonzero."""
        a0 = self.constant_term()
        if not a0:
            raise ZeroDivisionError("series with zero constant term is not a unit")
        b = Series.constant(1 / a0, self.m, self.trunc)
        two = Series.constant(2, self.m, self.trunc)
        # Newton step doubles the number of correct degrees.
        correct = 1
        while correct <= self.trunc:
            b = b * (two - self * b)
            correct *= 2
        return b

    # -- calculus and order ------------------------------------------------

    def partial(self, axis: int) -> Series:
        _check_axis(axis, self.m)
        if self.trunc < 1:
            raise ValueError("cannot differentiate a series truncated at degree 0")
        i = axis - 1
        out = {}
        for k, v in self.terms.items():
            if k[i]:
                kk = list(k)
                kk[i] -= 1
                out[tuple(kk)] = k[i] * v
        return Series(self.m, self.trunc - 1, out)

    def mul_axis_power(self, axis: int, p: int) -> Series:
        """Multiply by ``x_axis**p``; the truncation rises by ``p``."""
        _check_axis(axis, self.m)
        if p < 0:
            raise ValueError("power must be non-negative")
        i = axis - 1
        out = {}
        for k, v in self.terms.items():
            kk = list(k)
            kk[i] += p
            out[tuple(kk)] = v
        return Series(self.m, self.trunc + p, out)

    def shift(self, a: Sequence[int]) -> Series:
        """Multiply by ``x**a`` keeping the truncation (overflowing terms drop)."""
        out = {tuple(x + y for x, y in zip(k, a)): v for k, v in self.terms.items()}
        return Series(self.m, self.trunc, out)

    def ord_axis(self, axis: int) -> float | int:
        """Smallest ``x_axis`` exponent among stored terms (``inf`` for zero).

        The value is relative to the truncation: it certifies that every
        *computed* term is divisible by ``x_axis**r``.
        """
        _check_axis(axis, self.m)
        if not self.terms:
            return math.inf
        return min(k[axis - 1] for k in self.terms)

    def restrict_axis(self, axis: int) -> Series:
        """Set ``x_axis = 0``; the variable count is unchanged."""
        _check_axis(axis, self.m)
        i = axis - 1
        return Series(self.m, self.trunc, {k: v for k, v in self.terms.items() if k[i] == 0})

    def layer(self, axis: int, j: int) -> Series:
        """Coefficient of ``x_axis**j`` as a series in the other variables."""
        _check_axis(axis, self.m)
        if j > self.trunc:
            raise ValueError("layer beyond truncation")
        i = axis - 1
        out = {}
        for k, v in self.terms.items():
            if k[i] == j:
                kk = list(k)
                kk[i] = 0
                out[tuple(kk)] = v
        return Series(self.m, self.trunc - j, out)


def _check_axis(axis: int, m: int) -> None:
    if not 1 <= axis <= m:
        raise ValueError(f"axis {axis} out of range 1..{m}")


def format_terms(items: Iterable[tuple[tuple, Fraction]], names: Sequence[str]) -> str:
    """Render ``(exponents, coeff)`` pairs as ``3/2*x1*y1^2 - x2``."""
    parts: list[str] = []
    for exps, c in items:
        factors = []
        for name, e in zip(names, exps):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = f"{mag}*" + "*".join(factors)
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f" + {body}" if c > 0 else f" - {body}")
    return "".join(parts) or "0"


# -- vectors and matrices of series ---------------------------------------

SeriesVec = Sequence[Series]
SeriesMat = Sequence[Sequence[Series]]


def common_trunc(items: Iterable[Series]) -> tuple[int, int]:
    items = list(items)
    if not items:
        raise ValueError("empty series collection")
    m = items[0].m
    if any(s.m != m for s in items):
        raise ValueError("variable-count mismatch inside series collection")
    return m, min(s.trunc for s in items)


def constant_matrix(M: SeriesMat) -> list[list[Fraction]]:
    return [[e.constant_term() for e in row] for row in M]


def mat_vec(M: SeriesMat, v: SeriesVec) -> list[Series]:
    out = []
    for row in M:
        acc = Series.zero(v[0].m, min(s.trunc for s in list(row) + list(v)))
        for a, b in zip(row, v):
            if a and b:
                acc = acc + a * b
        out.append(acc)
    return out


def det(M: SeriesMat) -> Series:
    """Determinant by cofactor expansion along the first row."""
    n = len(M)
    if n == 0 or any(len(row) != n for row in M):
        raise ValueError("det needs a non-empty square matrix")
    m, trunc = common_trunc(e for row in M for e in row)
    return _cofactor([list(row) for row in M], m, trunc)


def _cofactor(M: list[list[Series]], m: int, trunc: int) -> Series:
    n = len(M)
    if n == 1:
        return M[0][0].truncate(trunc)
    total = Series.zero(m, trunc)
    for c in range(n):
        if not M[0][c]:
            continue
        minor = [row[:c] + row[c + 1:] for row in M[1:]]
        term = M[0][c] * _cofactor(minor, m, trunc)
        total = total + term if c % 2 == 0 else total - term
    return total


def solve_linear_series(M: SeriesMat, r: SeriesVec) -> list[Series]:
    """Solve ``M u = r`` exactly when ``M`` is a unit of the truncated ring.

    Gaussian elimination, always pivoting on an entry with nonzero constant
    term.  Raises :class:`NonUnitMatrix` when ``det M`` vanishes at the origin.
    """
    n = len(M)
    if n == 0 or any(len(row) != n for row in M) or len(r) != n:
        raise ValueError("solve_linear_series needs a square system")
    m, trunc = common_trunc([e for row in M for e in row] + list(r))
    if not rat_det(constant_matrix(M)):
        raise NonUnitMatrix("matrix is singular at the origin")
    A = [[e.truncate(trunc) for e in row] for row in M]
    b = [s.truncate(trunc) for s in r]
    for col in range(n):
        piv = next(i for i in range(col, n) if A[i][col].constant_term())
        A[col], A[piv] = A[piv], A[col]
        b[col], b[piv] = b[piv], b[col]
        inv = A[col][col].inverse()
        A[col] = [e * inv for e in A[col]]
        b[col] = b[col] * inv
        for i in range(n):
            if i != col and A[i][col]:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[col])]
                b[i] = b[i] - f * b[col]
    return b


def rat_det(M: list[list[Fraction]]) -> Fraction:
    """Exact determinant of a rational matrix by elimination."""
    A = [list(row) for row in M]
    n = len(A)
    d = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if A[i][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            d = -d
        d *= A[col][col]
        for i in range(col + 1, n):
            if A[i][col]:
                f = A[i][col] / A[col][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[col])]
    return d
