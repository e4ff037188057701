"""Polynomial right-hand sides and the Pfaffian system in PDE form.

The system is ``x_i**p_i * dy/dx_i = f_i(x, y)`` for ``i = 1..m`` with
``y = (y1..yn)``.  Every ``f_i`` is a vector of exact polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .series import MultiIndex, Series, format_terms

Key = tuple[MultiIndex, MultiIndex]  # (x exponents, y exponents)


class Poly:
    """Exact polynomial in ``x1..xm, y1..yn``; immutable by convention."""

    __slots__ = ("m", "n", "terms")

    def __init__(self, m: int, n: int, terms: Mapping[Key, object] | None = None):
        self.m, self.n = m, n
        clean: dict[Key, Fraction] = {}
        for (xe, ye), c in (terms or {}).items():
            xe, ye = tuple(xe), tuple(ye)
            if len(xe) != m or len(ye) != n:
                raise ValueError(f"monomial shape {xe}/{ye} does not match m={m}, n={n}")
            if c:
                clean[(xe, ye)] = c if isinstance(c, Fraction) else Fraction(c)
        self.terms = clean

    @classmethod
    def constant(cls, c, m: int, n: int) -> Poly:
        return cls(m, n, {((0,) * m, (0,) * n): c})

    @classmethod
    def x(cls, axis: int, m: int, n: int) -> Poly:
        xe = [0] * m
        xe[axis - 1] = 1
        return cls(m, n, {(tuple(xe), (0,) * n): 1})

    @classmethod
    def y(cls, index: int, m: int, n: int) -> Poly:
        ye = [0] * n
        ye[index - 1] = 1
        return cls(m, n, {((0,) * m, tuple(ye)): 1})

    @classmethod
    def parse(cls, text: str, m: int, n: int) -> Poly:
        from .expr import parse_expression

        return parse_expression(text, m, n)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return (self.m, self.n, self.terms) == (other.m, other.n, other.terms)

    def __hash__(self):
        return hash((self.m, self.n, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Poly({str(self)!r}, m={self.m}, n={self.n})"

    def sorted_terms(self) -> list[tuple[Key, Fraction]]:
        """Descending total degree, then descending exponents (x before y)."""
        return sorted(self.terms.items(), key=lambda kv: (-sum(kv[0][0]) - sum(kv[0][1]),
                                                          tuple(-e for e in kv[0][0] + kv[0][1])))

    def __str__(self):
        names = [f"x{i + 1}" for i in range(self.m)] + [f"y{j + 1}" for j in range(self.n)]
        return format_terms(((xe + ye, c) for (xe, ye), c in self.sorted_terms()), names)

    def _same(self, other: Poly) -> None:
        if (self.m, self.n) != (other.m, other.n):
            raise ValueError("polynomials live in different variable sets")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(other, self.m, self.n)
        self._same(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Poly(self.m, self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.m, self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = Fraction(other)
            return Poly(self.m, self.n, {k: c * v for k, v in self.terms.items()})
        self._same(other)
        out: dict[Key, Fraction] = {}
        for (xa, ya), va in self.terms.items():
            for (xb, yb), vb in other.terms.items():
                key = (tuple(map(sum, zip(xa, xb))), tuple(map(sum, zip(ya, yb))))
                out[key] = out.get(key, 0) + va * vb
        return Poly(self.m, self.n, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> Poly:
        result = Poly.constant(1, self.m, self.n)
        for _ in range(e):
            result = result * self
        return result

    def partial_x(self, axis: int) -> Poly:
        if not 1 <= axis <= self.m:
            raise ValueError(f"axis {axis} out of range 1..{self.m}")
        return self._partial(0, axis - 1)

    def partial_y(self, index: int) -> Poly:
        if not 1 <= index <= self.n:
            raise ValueError(f"y index {index} out of range 1..{self.n}")
        return self._partial(1, index - 1)

    def _partial(self, part: int, i: int) -> Poly:
        out = {}
        for key, v in self.terms.items():
            e = key[part][i]
            if e:
                exps = list(key[part])
                exps[i] -= 1
                new = (tuple(exps), key[1]) if part == 0 else (key[0], tuple(exps))
                out[new] = e * v
        return Poly(self.m, self.n, out)

    def mul_x_power(self, axis: int, p: int) -> Poly:
        out = {}
        for (xe, ye), v in self.terms.items():
            xx = list(xe)
            xx[axis - 1] += p
            out[(tuple(xx), ye)] = v
        return Poly(self.m, self.n, out)

    def constant_term(self) -> Fraction:
        return self.terms.get(((0,) * self.m, (0,) * self.n), Fraction(0))

    def y_degree(self) -> int:
        return max((sum(ye) for _, ye in self.terms), default=0)


PolyMap = tuple[Poly, ...]
RatMat = list[list[Fraction]]


@dataclass(frozen=True)
class PfaffianSystem:
    """``x_i**p[i] * dy/dx_i = f[i](x, y)``; ``f[i]`` has ``n`` components."""

    m: int
    n: int
    p: tuple[int, ...]
    f: tuple[PolyMap, ...]

    @classmethod
    def from_strings(cls, p: Sequence[int], f: Sequence[Sequence[str]],
                     m: int | None = None, n: int | None = None) -> PfaffianSystem:
        m = len(p) if m is None else m
        n = len(f[0]) if n is None else n
        polys = tuple(tuple(Poly.parse(s, m, n) for s in comp) for comp in f)
        return cls(m, n, tuple(p), polys)

    def describe(self) -> str:
        lines = []
        for i, (p, fi) in enumerate(zip(self.p, self.f), start=1):
            lhs = f"x{i}^{p}*dy/dx{i}" if p != 1 else f"x{i}*dy/dx{i}"
            lines.append(f"{lhs} = [" + ", ".join(str(c) for c in fi) + "]")
        return "\n".join(lines)


def validate(sys: PfaffianSystem) -> list[str]:
    """Every structural violation, in a stable order; empty means valid."""
    errors = []
    if sys.m < 1:
        errors.append("m must be >= 1")
    if sys.n < 1:
        errors.append("n must be >= 1")
    if len(sys.p) != sys.m:
        errors.append(f"expected {sys.m} entries in p, got {len(sys.p)}")
    if len(sys.f) != sys.m:
        errors.append(f"expected {sys.m} right-hand sides, got {len(sys.f)}")
    for i, p in enumerate(sys.p, start=1):
        if p < 1:
            errors.append(f"p_{i} < 1")
    for i, fi in enumerate(sys.f, start=1):
        if len(fi) != sys.n:
            errors.append(f"f_{i} has {len(fi)} components, expected {sys.n}")
        for a, comp in enumerate(fi, start=1):
            if (comp.m, comp.n) != (sys.m, sys.n):
                errors.append(f"f_{i}[{a}] has shape m={comp.m}, n={comp.n}")
            elif comp.constant_term():
                errors.append(f"constant term in f_{i}" + (f" component {a}" if sys.n > 1 else ""))
    return errors


def jacobian_y(fm: Sequence[Poly]) -> list[list[Poly]]:
    n = len(fm)
    return [[fm[a].partial_y(b + 1) for b in range(n)] for a in range(n)]


def partial_x(P: Poly, axis: int) -> Poly:
    return P.partial_x(axis)


def jacobian_y_at_origin(fm: Sequence[Poly]) -> RatMat:
    n = len(fm)
    J = [[Fraction(0)] * n for _ in range(n)]
    for a, comp in enumerate(fm):
        zero_x = (0,) * comp.m
        for (xe, ye), c in comp.terms.items():
            if xe == zero_x and sum(ye) == 1:
                J[a][ye.index(1)] += c
    return J


class SeriesEvaluator:
    """Evaluates polynomials at ``y = phi`` sharing the powers of ``phi``."""

    def __init__(self, phi: Sequence[Series]):
        if not phi:
            raise ValueError("phi must have at least one component")
        self.m = phi[0].m
        self.trunc = min(s.trunc for s in phi)
        if any(s.m != self.m for s in phi):
            raise ValueError("phi components disagree on the variable count")
        if any(s.constant_term() for s in phi):
            raise ValueError("phi must have no constant term")
        self.phi = [s.truncate(self.trunc) for s in phi]
        self._pow: dict[MultiIndex, Series] = {}

    def power(self, ye: MultiIndex) -> Series:
        got = self._pow.get(ye)
        if got is not None:
            return got
        if sum(ye) == 0:
            res = Series.constant(1, self.m, self.trunc)
        else:
            b = next(i for i, e in enumerate(ye) if e)
            parent = list(ye)
            parent[b] -= 1
            res = self.power(tuple(parent)) * self.phi[b]
        self._pow[ye] = res
        return res

    def __call__(self, P: Poly) -> Series:
        if P.n != len(self.phi) or P.m != self.m:
            raise ValueError("shape mismatch between polynomial and phi")
        total = Series.zero(self.m, self.trunc)
        for (xe, ye), c in P.terms.items():
            if sum(xe) > self.trunc:
                continue
            total = total + (self.power(ye) * c).shift(xe)
        return total


def eval_series(P: Poly, phi: Sequence[Series]) -> Series:
    """``P(x, phi(x))`` exactly through ``min(phi.trunc)``."""
    return SeriesEvaluator(phi)(P)


def eval_matrix(M: Iterable[Iterable[Poly]], phi: Sequence[Series]) -> list[list[Series]]:
    ev = SeriesEvaluator(phi)
    return [[ev(e) for e in row] for row in M]
