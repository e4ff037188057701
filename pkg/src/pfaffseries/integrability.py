"""Complete-integrability defects and the non-integrable convergence checks.

For ``i < j`` the defect vector is::

    F_ij = x_j^p_j df_i/dx_j - x_i^p_i df_j/dx_i + (df_i/dy) f_j - (df_j/dy) f_i

The system is completely integrable exactly when every ``F_ij`` is the zero
polynomial.  On any solution (formal or not) every ``F_ij`` vanishes, which
is what the two non-integrable checks exploit.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Any, Sequence

from .series import Series, det
from .system import PfaffianSystem, Poly, SeriesEvaluator, jacobian_y

DEFAULT_SUBSET_CAP = 10_000


class Status(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    NOT_APPLICABLE = "not applicable"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    """Outcome of checking one theorem's hypotheses.

    ``order`` is set for inconclusive verdicts (the truncation that limited
    the check) and for checks certified only through a computed degree.
    """

    theorem: str
    status: Status
    conclusion: str = ""
    certificate: dict[str, Any] = field(default_factory=dict)
    order: int | None = None
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    def label(self) -> str:
        axis = self.certificate.get("axis")
        if self.theorem in ("A", "B", "C", "1", "2", "3", "4"):
            name = f"Theorem {self.theorem}"
        else:
            name = self.theorem
        return f"{name} (axis {axis})" if axis is not None and self.theorem == "B" else name

    def status_text(self) -> str:
        if self.status is Status.INCONCLUSIVE and self.order is not None:
            return f"inconclusive at order {self.order}"
        return self.status.value

    def to_dict(self) -> dict[str, Any]:
        return {
            "theorem": self.theorem,
            "status": self.status.value,
            "order": self.order,
            "conclusion": self.conclusion,
            "certificate": self.certificate,
            "note": self.note,
        }


class SubsetCapExceeded(RuntimeError):
    pass


def compat_defect(sys: PfaffianSystem, i: int, j: int) -> tuple[Poly, ...]:
    if not 1 <= i < j <= sys.m:
        raise ValueError(f"need 1 <= i < j <= {sys.m}, got ({i}, {j})")
    fi, fj = sys.f[i - 1], sys.f[j - 1]
    Ji, Jj = jacobian_y(fi), jacobian_y(fj)
    out = []
    for a in range(sys.n):
        comp = fi[a].partial_x(j).mul_x_power(j, sys.p[j - 1]) - fj[a].partial_x(i).mul_x_power(i, sys.p[i - 1])
        for b in range(sys.n):
            comp = comp + Ji[a][b] * fj[b] - Jj[a][b] * fi[b]
        out.append(comp)
    return tuple(out)


def defects(sys: PfaffianSystem) -> dict[tuple[int, int], tuple[Poly, ...]]:
    """All ``F_ij`` with ``i < j``, keyed in lexicographic order."""
    return {(i, j): compat_defect(sys, i, j)
            for i, j in itertools.combinations(range(1, sys.m + 1), 2)}


def is_completely_integrable(sys: PfaffianSystem) -> Verdict:
    if sys.m < 2:
        return Verdict("integrability", Status.HOLDS, "completely integrable",
                       {"pairs": []}, note="vacuous: a single equation has no compatibility conditions")
    for (i, j), F in defects(sys).items():
        for a, comp in enumerate(F, start=1):
            if comp:
                (xe, ye), c = comp.sorted_terms()[0]
                mono = str(Poly(sys.m, sys.n, {(xe, ye): c}))
                return Verdict("integrability", Status.FAILS, "not completely integrable",
                               {"pair": [i, j], "component": a, "monomial": mono, "defect": str(comp)})
    return Verdict("integrability", Status.HOLDS, "completely integrable",
                   {"pairs": [list(k) for k in defects(sys)]})


def defect_on_solution(sys: PfaffianSystem, phi: Sequence[Series], i: int, j: int) -> list[Series]:
    ev = SeriesEvaluator(phi)
    return [ev(c) for c in compat_defect(sys, i, j)]


def check_theorem2(sys: PfaffianSystem, phi: Sequence[Series] | None = None) -> Verdict:
    """Scalar non-integrable systems: every formal solution converges."""
    if sys.n != 1:
        return Verdict("2", Status.NOT_APPLICABLE, note="only scalar unknowns (n = 1) are covered")
    integ = is_completely_integrable(sys)
    if integ.holds:
        return Verdict("2", Status.NOT_APPLICABLE, note="system is completely integrable")
    return Verdict("2", Status.HOLDS, "every formal solution converges",
                   {"pair": integ.certificate["pair"], "monomial": integ.certificate["monomial"]})


def _poly_det(M: list[list[Poly]]) -> Poly:
    if len(M) == 1:
        return M[0][0]
    total = M[0][0] * 0
    for c in range(len(M)):
        if M[0][c]:
            minor = [row[:c] + row[c + 1:] for row in M[1:]]
            term = M[0][c] * _poly_det(minor)
            total = total + term if c % 2 == 0 else total - term
    return total


def check_theorem3(sys: PfaffianSystem, phi: Sequence[Series],
                   cap: int = DEFAULT_SUBSET_CAP) -> Verdict:
    """Search ``n`` defect components whose y-Jacobian is invertible on ``phi``."""
    if sys.m < 2 or is_completely_integrable(sys).holds:
        return Verdict("3", Status.NOT_APPLICABLE, note="system is completely integrable")
    comps = [((i, j), a, c) for (i, j), F in defects(sys).items()
             for a, c in enumerate(F, start=1) if c]
    if len(comps) < sys.n:
        return Verdict("3", Status.NOT_APPLICABLE,
                       note=f"only {len(comps)} nonzero defect components, need {sys.n}")
    ev = SeriesEvaluator(phi)
    trunc = ev.trunc
    symbolic_nonzero = False
    for count, subset in enumerate(itertools.combinations(comps, sys.n), start=1):
        if count > cap:
            raise SubsetCapExceeded(f"more than {cap} component subsets")
        J = [[g.partial_y(b) for b in range(1, sys.n + 1)] for _, _, g in subset]
        D = det([[ev(e) for e in row] for row in J])
        where = [{"pair": list(pair), "component": a, "g": str(g)} for pair, a, g in subset]
        if D:
            return Verdict("3", Status.HOLDS, "the formal solution converges",
                           {"components": where, "det": D.to_text()}, order=trunc)
        if _poly_det(J):
            symbolic_nonzero = True
    if symbolic_nonzero:
        return Verdict("3", Status.INCONCLUSIVE, order=trunc,
                       note="every candidate determinant vanishes on phi through the computed degree")
    return Verdict("3", Status.FAILS, certificate={"reason": "every candidate determinant is the zero polynomial"})
