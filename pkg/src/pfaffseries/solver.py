"""Truncated formal power-series solutions by exact coefficient matching.

Coefficient matching of ``[x^l]`` in ``x_i^p_i dphi/dx_i = f_i(x, phi)`` at
total degree ``d = |l|`` gives::

    p_i = 1:   l_i c_l                               = [f_i(x, phi)]_l
    p_i >= 2:  (l_i - p_i + 1) c_{l - (p_i - 1) e_i}  = [f_i(x, phi)]_l

and ``[f_i(x, phi)]_l = J_i(0) c_l + (terms in coefficients of degree < d)``.
For ``p_i >= 2`` the unknown of degree ``d - p_i + 1`` is pinned by degree-``d``
equations, so a coefficient whose own block is singular cannot be settled at
its own degree.  The graded solver therefore keeps unsettled coefficients as
symbols and resolves them lazily:

* each stage ``d`` introduces the degree-``d`` coefficients as symbols and
  collects every degree-``d`` equation;
* when those equations are linear in the live symbols they are reduced
  exactly; pivots (highest degree first) become *determined*;
* a live symbol is handed to the free policy only when it enters an
  equation nonlinearly or when no equation up to ``order + max(p) - 1`` has
  pinned it.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .integrability import defect_on_solution
from .series import MultiIndex, NonUnitMatrix, Series, solve_linear_series
from .system import PfaffianSystem, SeriesEvaluator, eval_matrix, jacobian_y, validate


class Provenance(enum.Enum):
    DETERMINED = "determined"
    FREE = "free"
    # value supplied from outside and only checked against a constraint
    FORCED = "forced"


@dataclass(frozen=True)
class LedgerEntry:
    kind: Provenance
    value: tuple[Fraction, ...]
    free_components: tuple[int, ...] = ()


@dataclass(frozen=True)
class FormalSolution:
    phi: tuple[Series, ...]
    ledger: dict[MultiIndex, LedgerEntry]
    order: int

    @property
    def m(self) -> int:
        return self.phi[0].m

    @property
    def n(self) -> int:
        return len(self.phi)

    def coefficient(self, k: Sequence[int]) -> tuple[Fraction, ...]:
        return tuple(s.coeff(k) for s in self.phi)

    def free_indices(self) -> list[MultiIndex]:
        return [k for k, e in self.ledger.items() if e.kind is Provenance.FREE]


class SolveStatus(enum.Enum):
    SOLVED = "solved"
    INCONSISTENT = "inconsistent"
    ABORTED = "aborted"


@dataclass
class SolveReport:
    status: SolveStatus
    order: int
    counts: dict[int, dict[str, int]] = field(default_factory=dict)
    free: list[dict] = field(default_factory=list)
    witness: dict | None = None
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "order": self.order,
            "counts": {str(d): c for d, c in self.counts.items()},
            "free": [{"k": list(e["k"]), "components": e["components"],
                      "value": [str(v) for v in e["value"]]} for e in self.free],
            "witness": self.witness,
            "message": self.message,
        }


# -- symbolic coefficients ---------------------------------------------------


def _acc(t: dict, k: tuple, v) -> None:
    nv = t.get(k, 0) + v
    if nv:
        t[k] = nv
    else:
        t.pop(k, None)


class _Sym:
    """Sparse polynomial over Q in the solver's live unknowns.

    Keys are sorted tuples of symbol ids (``()`` is the constant term).
    Mixed arithmetic with ``Fraction``/``int`` works in either order.
    """

    __slots__ = ("t",)

    def __init__(self, t: dict[tuple[int, ...], Fraction]):
        self.t = t

    @classmethod
    def var(cls, s: int) -> _Sym:
        return cls({(s,): Fraction(1)})

    def __bool__(self):
        return bool(self.t)

    def __add__(self, o):
        t = dict(self.t)
        if isinstance(o, _Sym):
            for k, v in o.t.items():
                _acc(t, k, v)
        elif o:
            _acc(t, (), o)
        return _Sym(t)

    __radd__ = __add__

    def __neg__(self):
        return _Sym({k: -v for k, v in self.t.items()})

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, _Sym):
            t: dict = {}
            for k1, v1 in self.t.items():
                for k2, v2 in o.t.items():
                    _acc(t, tuple(sorted(k1 + k2)), v1 * v2)
            return _Sym(t)
        if not o:
            return _Sym({})
        return _Sym({k: v * o for k, v in self.t.items()})

    __rmul__ = __mul__

    def symbols(self) -> set[int]:
        return {s for k in self.t for s in k}

    def nonlinear_symbols(self) -> set[int]:
        return {s for k in self.t if len(k) > 1 for s in k}

    def subs(self, mapping: Mapping[int, object]):
        t: dict = {}
        for k, v in self.t.items():
            if not any(s in mapping for s in k):
                _acc(t, k, v)
                continue
            term = v
            for s in k:
                term = term * mapping.get(s, _Sym.var(s))
            if isinstance(term, _Sym):
                for kk, vv in term.t.items():
                    _acc(t, kk, vv)
            elif term:
                _acc(t, (), term)
        return _clean(_Sym(t))


def _clean(v):
    if isinstance(v, _Sym):
        if not v.t:
            return Fraction(0)
        if len(v.t) == 1 and () in v.t:
            return v.t[()]
    return v


def _as_row(E) -> tuple[dict[int, Fraction], Fraction]:
    """Equation ``E = 0`` as ``lin . u = rhs``."""
    if not isinstance(E, _Sym):
        return {}, -Fraction(E)
    lin = {k[0]: v for k, v in E.t.items() if len(k) == 1}
    return lin, -E.t.get((), Fraction(0))


@lru_cache(maxsize=None)
def indices_of_degree(m: int, d: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of total degree ``d`` in ascending lexicographic order."""
    if m == 1:
        return ((d,),)
    return tuple((i,) + rest for i in range(d + 1) for rest in indices_of_degree(m - 1, d - i))


def _rref(rows, prio):
    """Gauss-Jordan with columns taken in ``prio`` order; None if inconsistent."""
    cols = sorted({s for _, lin, _ in rows for s in lin}, key=prio)
    work = [[dict(lin), rhs] for _, lin, rhs in rows]
    used = [False] * len(work)
    pivots: dict[int, int] = {}
    for c in cols:
        r = next((i for i, w in enumerate(work) if not used[i] and w[0].get(c)), None)
        if r is None:
            continue
        used[r] = True
        row = work[r]
        inv = 1 / row[0][c]
        row[0] = {s: v * inv for s, v in row[0].items()}
        row[1] *= inv
        for i, other in enumerate(work):
            f = other[0].get(c)
            if i == r or not f:
                continue
            for s, v in row[0].items():
                _acc(other[0], s, -f * v)
            other[1] -= f * row[1]
        pivots[c] = r
    for i, (lin, rhs) in enumerate(work):
        if not used[i] and rhs:
            return None
    return {c: (work[r][1], {s: v for s, v in work[r][0].items() if s != c}) for c, r in pivots.items()}


def _first_inconsistent(rows):
    """First row (in input order) that makes the prefix inconsistent."""
    basis: list[tuple[int, dict, Fraction]] = []
    for tag, lin, rhs in rows:
        lin = dict(lin)
        for piv, blin, brhs in basis:
            f = lin.get(piv)
            if f:
                for s, v in blin.items():
                    _acc(lin, s, -f * v)
                rhs -= f * brhs
        if not lin:
            if rhs:
                return tag, rhs
            continue
        piv = min(lin)
        inv = 1 / lin[piv]
        basis.append((piv, {s: v * inv for s, v in lin.items()}, rhs * inv))
    return None


class _Stop(Exception):
    def __init__(self, status: SolveStatus, witness: dict, message: str):
        self.status, self.witness, self.message = status, witness, message


class _GradedSolver:
    def __init__(self, sys: PfaffianSystem, order: int, policy: str,
                 assignments: Mapping[MultiIndex, Sequence] | None):
        self.sys = sys
        self.m, self.n = sys.m, sys.n
        self.N = order
        self.top = order + max(sys.p) - 1
        self.policy = policy
        self.assignments = {tuple(k): tuple(Fraction(x) for x in v) for k, v in (assignments or {}).items()}
        self.phi = [[{} for _ in range(self.top + 1)] for _ in range(self.n)]
        self.info: list[tuple[MultiIndex, int]] = []
        self.state: dict[int, tuple[Provenance, Fraction | None]] = {}
        self.live: set[int] = set()
        self.monos = [[[(c, xe, sum(xe), ye, sum(ye)) for (xe, ye), c in comp.terms.items()]
                       for comp in fi] for fi in sys.f]
        self._setup_powers()

    # powers of phi, stored by degree

    def _setup_powers(self) -> None:
        needed = {ye for fi in self.monos for comp in fi for *_, ye, dy in comp if dy >= 2}
        parent: dict[MultiIndex, tuple[MultiIndex, int]] = {}
        stack = list(needed)
        while stack:
            e = stack.pop()
            if e in parent or sum(e) < 2:
                continue
            b = next(i for i, x in enumerate(e) if x)
            pe = list(e)
            pe[b] -= 1
            parent[e] = (tuple(pe), b)
            stack.append(tuple(pe))
        self.pow_order = sorted(parent, key=lambda e: (sum(e), e))
        self.parent = parent
        self.pw = {e: [{} for _ in range(self.top + 1)] for e in parent}
        self.pw_valid = 0

    def part(self, e: MultiIndex, j: int) -> dict:
        if sum(e) == 1:
            return self.phi[e.index(1)][j]
        return self.pw[e][j]

    def _refresh_powers(self, upto: int) -> None:
        for j in range(self.pw_valid + 1, upto + 1):
            for e in self.pow_order:
                pe, b = self.parent[e]
                out: dict = {}
                for t in range(1, j):
                    A, B = self.part(pe, j - t), self.phi[b][t]
                    if not A or not B:
                        continue
                    for ka, va in A.items():
                        for kb, vb in B.items():
                            key = tuple(x + y for x, y in zip(ka, kb))
                            out[key] = out.get(key, 0) + va * vb
                self.pw[e][j] = {k: _clean(v) for k, v in out.items() if v}
        self.pw_valid = max(self.pw_valid, upto)

    # symbols

    def _degree(self, s: int) -> int:
        return sum(self.info[s][0])

    def _pivot_key(self, s: int):
        k, a = self.info[s]
        return (-sum(k), k, a)

    def _age_key(self, s: int):
        k, a = self.info[s]
        return (sum(k), k, a)

    def _new_symbols(self, d: int) -> None:
        for l in indices_of_degree(self.m, d):
            for a in range(self.n):
                s = len(self.info)
                self.info.append((l, a))
                self.phi[a][d][l] = _Sym.var(s)
                self.live.add(s)

    def _substitute(self, mapping: Mapping[int, object]) -> None:
        lowest = min(self._degree(s) for s in mapping)
        for comp in self.phi:
            for j in range(lowest, self.top + 1):
                layer = comp[j]
                for k, v in list(layer.items()):
                    if isinstance(v, _Sym):
                        nv = v.subs(mapping)
                        if nv:
                            layer[k] = nv
                        else:
                            del layer[k]
        self.pw_valid = min(self.pw_valid, lowest)

    def _resolve_by_policy(self, s: int) -> None:
        k, a = self.info[s]
        if self.policy == "fail":
            raise _Stop(SolveStatus.ABORTED, {"k": list(k), "component": a + 1},
                        f"free parameter at x^{list(k)} component {a + 1} (policy 'fail')")
        value = Fraction(0)
        if self.policy == "value" and k in self.assignments:
            value = self.assignments[k][a]
        self.state[s] = (Provenance.FREE, value)
        self.live.discard(s)
        self._substitute({s: value})

    # equations

    def _equations(self, d: int):
        out = []
        for l in indices_of_degree(self.m, d):
            for i in range(self.m):
                p, li = self.sys.p[i], l[i]
                for a in range(self.n):
                    if p == 1:
                        lhs = li * self.phi[a][d].get(l, 0) if li else 0
                    elif li >= p:
                        src = list(l)
                        src[i] -= p - 1
                        src = tuple(src)
                        lhs = (li - p + 1) * self.phi[a][d - p + 1].get(src, 0)
                    else:
                        lhs = 0
                    rhs = 0
                    for c, xe, dx, ye, dy in self.monos[i][a]:
                        if dy == 0:
                            if xe == l:
                                rhs = rhs + c
                            continue
                        if d - dx < dy:
                            continue
                        rest = tuple(x - y for x, y in zip(l, xe))
                        if min(rest) < 0:
                            continue
                        v = self.part(ye, d - dx).get(rest)
                        if v is not None:
                            rhs = rhs + c * v
                    out.append(((l, i, a), lhs - rhs))
        return out

    def _stage(self, d: int, extra: bool) -> bool:
        self._refresh_powers(d)
        while True:
            eqs = self._equations(d)
            nonlinear: set[int] = set()
            for _, E in eqs:
                if isinstance(E, _Sym):
                    nonlinear |= E.nonlinear_symbols()
            if nonlinear:
                if extra:
                    return False
                self._resolve_by_policy(min(nonlinear, key=self._age_key))
                self._refresh_powers(d)
                continue
            rows = [(tag, *_as_row(E)) for tag, E in eqs]
            rows = [r for r in rows if r[1] or r[2]]
            pivots = _rref(rows, self._pivot_key)
            if pivots is None:
                if extra:
                    return False
                (l, i, a), value = _first_inconsistent(rows)
                witness = {"k": list(l), "equation": i + 1, "component": a + 1, "row": f"0 = {value}"}
                raise _Stop(SolveStatus.INCONSISTENT, witness,
                            f"no formal solution: equation {i + 1}, component {a + 1} "
                            f"at x^{list(l)} reduces to 0 = {value}")
            if pivots:
                mapping = {}
                for s, (rhs, free) in pivots.items():
                    expr = _Sym({(f,): -v for f, v in free.items()}) + rhs if free else rhs
                    mapping[s] = _clean(expr)
                    self.state[s] = (Provenance.DETERMINED, None)
                    self.live.discard(s)
                self._substitute(mapping)
            return True

    def run(self) -> tuple[FormalSolution | None, SolveReport]:
        try:
            for d in range(1, self.top + 1):
                extra = d > self.N
                self._new_symbols(d)
                if not self._stage(d, extra):
                    break
            for s in sorted((s for s in self.live if self._degree(s) <= self.N), key=self._age_key):
                if s in self.live:
                    self._resolve_by_policy(s)
        except _Stop as stop:
            return None, SolveReport(stop.status, self.N, self._counts(), self._free(),
                                     stop.witness, stop.message)
        phi = []
        for a in range(self.n):
            terms = {}
            for j in range(1, self.N + 1):
                for k, v in self.phi[a][j].items():
                    if isinstance(v, _Sym):
                        raise AssertionError(f"unresolved coefficient at {k}")
                    terms[k] = v
            phi.append(Series(self.m, self.N, terms))
        ledger = {}
        by_index: dict[MultiIndex, list[int]] = {}
        for s, (k, a) in enumerate(self.info):
            if sum(k) <= self.N:
                by_index.setdefault(k, []).append(s)
        for k in sorted(by_index, key=lambda k: (sum(k), k)):
            free = tuple(self.info[s][1] + 1 for s in by_index[k] if self.state[s][0] is Provenance.FREE)
            kind = Provenance.FREE if free else Provenance.DETERMINED
            ledger[k] = LedgerEntry(kind, tuple(c.coeff(k) for c in phi), free)
        solution = FormalSolution(tuple(phi), ledger, self.N)
        res = residual(self.sys, solution.phi)
        if any(r for eq in res for r in eq):
            raise AssertionError("solver produced a nonzero residual")
        return solution, SolveReport(SolveStatus.SOLVED, self.N, self._counts(), self._free())

    def _counts(self) -> dict[int, dict[str, int]]:
        counts: dict[int, dict[str, int]] = {}
        for s, (kind, _) in self.state.items():
            d = self._degree(s)
            if d <= self.N:
                c = counts.setdefault(d, {"determined": 0, "free": 0})
                c[kind.value] += 1
        return dict(sorted(counts.items()))

    def _free(self) -> list[dict]:
        grouped: dict[MultiIndex, dict] = {}
        for s, (kind, value) in sorted(self.state.items(), key=lambda kv: self._age_key(kv[0])):
            if kind is Provenance.FREE and self._degree(s) <= self.N:
                k, a = self.info[s]
                g = grouped.setdefault(k, {"k": k, "components": [], "value": []})
                g["components"].append(a + 1)
                g["value"].append(value)
        return list(grouped.values())


def solve_formal(sys: PfaffianSystem, order: int, policy: str = "zero",
                 assignments: Mapping[MultiIndex, Sequence] | None = None
                 ) -> tuple[FormalSolution | None, SolveReport]:
    """Formal solution without constant term through total degree ``order``.

    ``policy`` decides free parameters: ``"zero"``, ``"fail"`` (abort on the
    first one) or ``"value"`` (take ``assignments[k][component]``, missing
    entries default to zero).  The solution is ``None`` unless the report
    status is ``SOLVED``.
    """
    errors = validate(sys)
    if errors:
        raise ValueError("invalid system: " + "; ".join(errors))
    if order < 1:
        raise ValueError("order must be >= 1")
    if policy not in ("zero", "fail", "value"):
        raise ValueError(f"unknown free policy {policy!r}")
    for k, v in (assignments or {}).items():
        if len(k) != sys.m or len(v) != sys.n:
            raise ValueError(f"assignment {k} -> {v} does not match m={sys.m}, n={sys.n}")
    return _GradedSolver(sys, order, policy, assignments).run()


# -- verification ---------------------------------------------------------


def residual(sys: PfaffianSystem, phi: Sequence[Series]) -> list[list[Series]]:
    """``x_i^p_i dphi/dx_i - f_i(x, phi)`` for each ``i``, through ``phi``'s truncation."""
    if len(phi) != sys.n or any(s.m != sys.m for s in phi):
        raise ValueError("phi does not match the system shape")
    ev = SeriesEvaluator(phi)
    N = ev.trunc
    out = []
    for i in range(sys.m):
        comps = []
        for a in range(sys.n):
            rhs = ev(sys.f[i][a])
            if N == 0:
                comps.append(Series.zero(sys.m, 0))
                continue
            lhs = ev.phi[a].partial(i + 1).mul_axis_power(i + 1, sys.p[i])
            comps.append((lhs - rhs).truncate(N))
        out.append(comps)
    return out


@dataclass
class VerifyReport:
    degree: int
    trunc: int
    failing: dict | None
    defects: dict[tuple[int, int], bool]

    @property
    def ok(self) -> bool:
        return self.degree == self.trunc

    def to_dict(self) -> dict:
        return {"verified_degree": self.degree, "trunc": self.trunc, "failing": self.failing,
                "defects_vanish": {f"F_{i}{j}": ok for (i, j), ok in self.defects.items()}}


def verify(sys: PfaffianSystem, phi: Sequence[Series]) -> VerifyReport:
    """Largest degree through which all residuals vanish, plus defect checks."""
    res = residual(sys, phi)
    trunc = min(s.trunc for s in phi)
    D, failing = trunc, None
    for i, eq in enumerate(res, start=1):
        for a, r in enumerate(eq, start=1):
            if not r:
                continue
            k, c = r.sorted_terms()[0]
            if sum(k) - 1 < D:
                D = sum(k) - 1
                failing = {"equation": i, "component": a,
                           "monomial": Series(r.m, r.trunc, {k: 1}).to_text(), "coefficient": str(c)}
    defects = {}
    for i, j in itertools.combinations(range(1, sys.m + 1), 2):
        vals = defect_on_solution(sys, phi, i, j)
        defects[(i, j)] = all(sum(k) > D for s in vals for k in s.terms)
    return VerifyReport(D, trunc, failing, defects)


# -- layered recursion along x1 -----------------------------------------------


def restricted_jacobian_A(sys: PfaffianSystem, phi: Sequence[Series]) -> list[list[Series]]:
    """``df_1/dy (x, phi)`` at ``x1 = 0``, as a matrix of series."""
    if sys.p[0] != 1:
        raise ValueError("restricted Jacobian needs p_1 = 1")
    J = eval_matrix(jacobian_y(sys.f[0]), phi)
    return [[e.restrict_axis(1) for e in row] for row in J]


def layered_solve_axis1(sys: PfaffianSystem, order: int, c0: Sequence[Series]) -> FormalSolution:
    """Rebuild ``phi = sum_j c_j(x2..xm) x1^j`` from the ``x1**0`` layer.

    Each layer solves ``(A - jI) c_j = -[x1^j] f_1(x, c_0 + c_1 x1 + ... + c_{j-1} x1^{j-1})``
    over the series ring.  Raises :class:`NonUnitMatrix` (with ``level = j``)
    when ``det(A - jI)`` vanishes at the origin.
    """
    if sys.p[0] != 1:
        raise ValueError("layered recursion needs p_1 = 1")
    if len(c0) != sys.n:
        raise ValueError("c0 must have n components")
    if any(s.trunc < order for s in c0):
        raise ValueError("c0 is not known through the requested order")
    c0 = [s.truncate(order) for s in c0]
    if any(s.restrict_axis(1) != s for s in c0):
        raise ValueError("c0 must not depend on x1")
    if any(s.constant_term() for s in c0):
        raise ValueError("c0 must vanish at the origin")
    f1 = sys.f[0]
    g0 = SeriesEvaluator(c0)
    if any(g0(c).restrict_axis(1) for c in f1):
        raise ValueError("c0 does not satisfy f_1(0, x2..xm, c0) = 0")
    A = restricted_jacobian_A(sys, c0)
    phi = list(c0)
    for j in range(1, order + 1):
        ev = SeriesEvaluator(phi)
        h = [ev(c).layer(1, j) for c in f1]
        M = [[(e - (j if a == b else 0)).truncate(order - j) for b, e in enumerate(row)]
             for a, row in enumerate(A)]
        try:
            cj = solve_linear_series(M, [-x for x in h])
        except NonUnitMatrix as exc:
            raise NonUnitMatrix(f"det(A - {j}I) vanishes at the origin", level=j) from exc
        phi = [s + c.mul_axis_power(1, j) for s, c in zip(phi, cj)]
    ledger = {}
    for d in range(1, order + 1):
        for k in indices_of_degree(sys.m, d):
            kind = Provenance.FORCED if k[0] == 0 else Provenance.DETERMINED
            ledger[k] = LedgerEntry(kind, tuple(s.coeff(k) for s in phi))
    return FormalSolution(tuple(phi), ledger, order)
