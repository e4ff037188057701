"""Convergence criteria for formal solutions and the aggregated report.

Every checker returns a :class:`~pfaffseries.integrability.Verdict`.  The
hypotheses that mention the full (untruncated) solution are certified from
the computed coefficients where a finite witness suffices; otherwise the
verdict is inconclusive at the computed order, never a failure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .integrability import (
    Status,
    SubsetCapExceeded,
    Verdict,
    check_theorem2,
    check_theorem3,
    is_completely_integrable,
)
from .series import Series, constant_matrix, det, rat_det
from .solver import restricted_jacobian_A
from .system import PfaffianSystem, RatMat, eval_matrix, jacobian_y, jacobian_y_at_origin

BIVARIATE_NOTE = "for m = 2 the complete-integrability assumption is not needed"


@dataclass(frozen=True)
class CharPoly:
    """Coefficients of ``det(M - lambda*I)``, lowest degree first."""

    coeffs: tuple[Fraction, ...]

    def __call__(self, lam) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * lam + c
        return acc

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def charpoly(M: RatMat) -> CharPoly:
    """Faddeev-LeVerrier recursion, exact over Q."""
    n = len(M)
    A = [[Fraction(x) for x in row] for row in M]
    # c[k] is the coefficient of lambda^k in det(lambda*I - A)
    c = [Fraction(0)] * (n + 1)
    c[n] = Fraction(1)
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        AM = [[sum(A[i][t] * Mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        Mk = [[AM[i][j] + (c[n - k + 1] if i == j else 0) for j in range(n)] for i in range(n)]
        trace = sum(sum(A[i][t] * Mk[t][i] for t in range(n)) for i in range(n))
        c[n - k] = -trace / k
    sign = -1 if n % 2 else 1
    return CharPoly(tuple(sign * x for x in c))


def eigen_bound(M: RatMat) -> int:
    """``floor`` of the largest absolute row sum (bounds every eigenvalue)."""
    return math.floor(max((sum(abs(Fraction(x)) for x in row) for row in M), default=0))


def integer_eigs(M: RatMat, bound: int | None = None) -> list[int]:
    """Non-negative integers ``j <= bound`` with ``det(M - jI) = 0``."""
    P = charpoly(M)
    B = eigen_bound(M) if bound is None else bound
    return [j for j in range(B + 1) if P(j) == 0]


def check_theoremA(sys: PfaffianSystem) -> Verdict:
    if all(p == 1 for p in sys.p):
        return Verdict("A", Status.HOLDS, "every formal solution converges", {"p": list(sys.p)})
    i = next(i for i, p in enumerate(sys.p, start=1) if p != 1)
    return Verdict("A", Status.NOT_APPLICABLE, note=f"not Fuchsian: p_{i} = {sys.p[i - 1]}")


def check_theoremB(sys: PfaffianSystem, axis: int, eig_bound: int | None = None) -> Verdict:
    if not 1 <= axis <= sys.m:
        raise ValueError(f"axis {axis} out of range 1..{sys.m}")
    if sys.p[axis - 1] != 1:
        return Verdict("B", Status.NOT_APPLICABLE, certificate={"axis": axis},
                       note=f"p_{axis} = {sys.p[axis - 1]} (not Fuchsian along x{axis} = 0)")
    J = jacobian_y_at_origin(sys.f[axis - 1])
    bound = eigen_bound(J) if eig_bound is None else eig_bound
    eigs = integer_eigs(J, bound)
    cert = {"axis": axis, "jacobian": [[str(x) for x in row] for row in J], "scan_bound": bound}
    if eigs:
        return Verdict("B", Status.FAILS, certificate={**cert, "eigenvalue": eigs[0], "eigenvalues": eigs},
                       note=f"J_{axis}(0) has the non-negative integer eigenvalue {eigs[0]}")
    return Verdict("B", Status.HOLDS, "every formal solution converges", cert)


def check_theoremC(sys: PfaffianSystem) -> Verdict:
    if sys.m < 2:
        return Verdict("C", Status.NOT_APPLICABLE, note="needs at least two independent variables")
    if any(p < 2 for p in sys.p):
        return Verdict("C", Status.NOT_APPLICABLE, note="needs every p_i > 1")
    if sys.m > 2 and not is_completely_integrable(sys).holds:
        return Verdict("C", Status.NOT_APPLICABLE,
                       note="needs complete integrability when m > 2; " + BIVARIATE_NOTE)
    dets = [rat_det(jacobian_y_at_origin(fi)) for fi in sys.f]
    for j, l in itertools.combinations(range(sys.m), 2):
        if dets[j] and dets[l]:
            return Verdict("C", Status.HOLDS, "the formal solution is unique and converges",
                           {"pair": [j + 1, l + 1], "dets": [str(dets[j]), str(dets[l])]},
                           note=BIVARIATE_NOTE if sys.m == 2 else "")
    return Verdict("C", Status.FAILS, certificate={"dets": [str(x) for x in dets]},
                   note="fewer than two non-degenerate Jacobi matrices J_i(0)")


def _shifted(A: Sequence[Sequence[Series]], j: int) -> list[list[Series]]:
    return [[e - j if a == b else e for b, e in enumerate(row)] for a, row in enumerate(A)]


def check_theorem1(sys: PfaffianSystem, phi: Sequence[Series], eig_bound: int | None = None) -> Verdict:
    """``det(A - jI)`` must be a nonzero series for every integer ``j >= 0``.

    Only the integer eigenvalues of ``A(0)`` need a series-level check; any
    other ``j`` gives a nonzero constant term.
    """
    if sys.p[0] != 1:
        return Verdict("1", Status.NOT_APPLICABLE, note=f"p_1 = {sys.p[0]}")
    A = restricted_jacobian_A(sys, phi)
    A0 = constant_matrix(A)
    bound = eigen_bound(A0) if eig_bound is None else eig_bound
    resonant = integer_eigs(A0, bound)
    N = min(s.trunc for s in phi)
    witnesses = {}
    for j in resonant:
        D = det(_shifted(A, j))
        if not D:
            return Verdict("1", Status.INCONCLUSIVE, order=N,
                           certificate={"resonant": resonant, "j": j},
                           note=f"det(A - {j}I) vanishes through degree {N}")
        witnesses[str(j)] = D.sorted_terms()[0][0]
    cert = {"resonant": resonant, "scan_bound": bound,
            "witness": {j: Series(sys.m, N, {k: 1}).to_text() for j, k in witnesses.items()}}
    return Verdict("1", Status.HOLDS, "the formal solution converges", cert, order=N)


def check_theorem4(sys: PfaffianSystem, phi: Sequence[Series]) -> Verdict:
    """Order conditions ``ord_{x_i} df_i/dy(x, phi) >= p_i - 1`` for ``m = 2``."""
    if sys.m != 2:
        return Verdict("4", Status.NOT_APPLICABLE, note="bivariate systems only")
    N = min(s.trunc for s in phi)
    orders = []
    for i in (1, 2):
        J = eval_matrix(jacobian_y(sys.f[i - 1]), phi)
        need = sys.p[i - 1] - 1
        for a, row in enumerate(J, start=1):
            for b, e in enumerate(row, start=1):
                bad = [k for k, _ in e.sorted_terms() if k[i - 1] < need]
                if bad:
                    return Verdict("4", Status.FAILS, certificate={
                        "axis": i, "entry": [a, b], "required_order": need,
                        "monomial": Series(sys.m, N, {bad[0]: 1}).to_text()})
        o = min(e.ord_axis(i) for row in J for e in row)
        orders.append(None if o == math.inf else int(o))
    return Verdict("4", Status.HOLDS, "the formal solution converges",
                   {"verified_degree": N, "orders": orders, "required": [p - 1 for p in sys.p]},
                   order=N, note=f"no violating monomial through degree {N}; "
                                 "terms of higher total degree were not computed")


@dataclass
class CriteriaReport:
    verdicts: list[Verdict] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return any(v.holds for v in self.verdicts)

    @property
    def certifying(self) -> list[str]:
        return [v.label() for v in self.verdicts if v.holds]

    def summary(self) -> str:
        if self.certified:
            return "convergence certified by " + ", ".join(self.certifying)
        return "no criterion applies"

    def to_dict(self) -> dict:
        return {"certified": self.certified, "summary": self.summary(),
                "verdicts": [v.to_dict() for v in self.verdicts]}


def run_all(sys: PfaffianSystem, phi: Sequence[Series] | None = None,
            eig_bound: int | None = None) -> CriteriaReport:
    """Theorems A, B (every axis), C, 1, 2, 3, 4; those needing ``phi`` are skipped without it."""
    report = CriteriaReport()
    report.verdicts.append(check_theoremA(sys))
    for axis in range(1, sys.m + 1):
        report.verdicts.append(check_theoremB(sys, axis, eig_bound))
    report.verdicts.append(check_theoremC(sys))
    if phi is None:
        report.verdicts.append(check_theorem2(sys))
        return report
    report.verdicts.append(check_theorem1(sys, phi, eig_bound))
    report.verdicts.append(check_theorem2(sys, phi))
    try:
        report.verdicts.append(check_theorem3(sys, phi))
    except SubsetCapExceeded as exc:
        report.verdicts.append(Verdict("3", Status.INCONCLUSIVE, note=str(exc)))
    report.verdicts.append(check_theorem4(sys, phi))
    return report
