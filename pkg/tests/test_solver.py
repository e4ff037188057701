import random
from fractions import Fraction

import pytest

from pfaffseries.catalog import e2, e3, e5, euler, resonant
from pfaffseries.integrability import defect_on_solution
from pfaffseries.series import NonUnitMatrix, Series
from pfaffseries.solver import (Provenance, SolveStatus, indices_of_degree, layered_solve_axis1,
                                residual, restricted_jacobian_A, solve_formal, verify)
from pfaffseries.system import PfaffianSystem, Poly, eval_series

import oracles


def test_euler_coefficients():
    sol, rep = solve_formal(euler(), 6)
    assert rep.status is SolveStatus.SOLVED
    assert [sol.phi[0].coeff((k,)) for k in range(1, 7)] == [1, 1, 2, 6, 24, 120]
    assert all(e.kind is Provenance.DETERMINED for e in sol.ledger.values())


def test_euler_against_recursion_oracle():
    sol, _ = solve_formal(euler(), 20)
    assert [sol.phi[0].coeff((k,)) for k in range(1, 21)] == oracles.euler_oracle(20)


def test_e5_zero_policy():
    sol, rep = solve_formal(e5(), 4)
    assert sol.phi[0] == Series(2, 4, {(1, 0): -1, (0, 1): -1})
    assert sol.free_indices() == [(1, 1)]
    assert sol.ledger[(1, 1)].value == (0,)
    assert [f["k"] for f in rep.free] == [(1, 1)]


@pytest.mark.parametrize("lam", [Fraction(1), Fraction(2), Fraction(-1, 3)])
def test_e5_value_policy_gives_lambda_family(lam):
    sol, _ = solve_formal(e5(), 6, "value", {(1, 1): [lam]})
    assert sol.phi[0] == Series(2, 6, {(1, 0): -1, (0, 1): -1, (1, 1): lam})
    assert sol.ledger[(1, 1)].kind is Provenance.FREE


@pytest.mark.parametrize("lam", [Fraction(1), Fraction(2), Fraction(1, 2)])
def test_e2_value_policy_gives_geometric_diagonal(lam):
    # u/(1-u) with u = lam*x1*x2
    sol, _ = solve_formal(e2(), 10, "value", {(1, 1): [lam]})
    assert sol.phi[0] == Series(2, 10, {(k, k): lam ** k for k in range(1, 6)})


def test_fail_policy_aborts_on_first_free():
    sol, rep = solve_formal(e5(), 4, "fail")
    assert sol is None and rep.status is SolveStatus.ABORTED
    assert rep.witness == {"k": [1, 1], "component": 1}


def test_resonance_is_inconsistent():
    sol, rep = solve_formal(resonant(), 5)
    assert sol is None and rep.status is SolveStatus.INCONSISTENT
    assert list(rep.witness["k"]) == [1]
    assert rep.witness["row"] == "0 = 1"


def test_e3_needs_the_value_policy_for_x1():
    sol, _ = solve_formal(e3(), 8)
    assert not sol.phi[0]
    sol, _ = solve_formal(e3(), 8, "value", {(1, 0): [1]})
    assert sol.phi[0] == Series.variable(1, 2, 8)


def test_solve_is_deterministic():
    a = solve_formal(e5(), 7)
    b = solve_formal(e5(), 7)
    assert a[0] == b[0] and a[1].to_dict() == b[1].to_dict()


def test_bad_arguments():
    with pytest.raises(ValueError):
        solve_formal(euler(), 0)
    with pytest.raises(ValueError):
        solve_formal(euler(), 3, "sometimes")
    with pytest.raises(ValueError):
        solve_formal(PfaffianSystem.from_strings([1], [["y1 + 1"]]), 3)


def test_indices_of_degree_counts():
    from math import comb
    for m in (1, 2, 3):
        for d in range(5):
            assert len(indices_of_degree(m, d)) == comb(d + m - 1, m - 1)


def test_residual_examples():
    phi = [Series(1, 3, {(1,): 1, (2,): 1, (3,): 2})]
    assert not any(residual(euler(), phi)[0])
    phi = [Series(2, 4, {(1, 1): 1, (2, 2): 1})]
    assert not any(r for eq in residual(e2(), phi) for r in eq)
    r = residual(euler(), [Series(1, 3, {(1,): 1})])[0][0]
    assert r.terms == {(2,): 1}


def test_verify_examples():
    sol, _ = solve_formal(euler(), 6)
    assert verify(euler(), sol.phi).degree == 6
    rep = verify(euler(), [Series(1, 3, {(1,): 1})])
    assert rep.degree == 1 and rep.failing["monomial"] == "x1^2"
    sys = PfaffianSystem.from_strings([1, 2], [["y1^2"], ["x1*y1"]])
    assert verify(sys, [Series.zero(2, 5)]).degree == 5


def test_restricted_jacobian_examples():
    diag = Series(2, 6, {(k, k): 1 for k in range(1, 4)})
    assert restricted_jacobian_A(e2(), [diag]) == [[Series.constant(1, 2, 6)]]
    assert restricted_jacobian_A(e3(), [Series.variable(1, 2, 4)]) == [[Series.constant(1, 2, 4)]]
    sys = PfaffianSystem.from_strings([1, 1], [["y1 + x2*y1"], ["-y1 + x2"]])
    A = restricted_jacobian_A(sys, [Series.zero(2, 3)])
    assert A == [[Series(2, 3, {(0, 0): 1, (0, 1): 1})]]


# -- layered recursion -------------------------------------------------------


def test_layered_simple_example():
    sys = PfaffianSystem.from_strings([1, 1], [["-y1 + x2"], ["-y1 + x2"]])
    sol = layered_solve_axis1(sys, 6, [Series.variable(2, 2, 6)])
    assert sol.phi[0] == Series.variable(2, 2, 6)
    assert all(e.kind is Provenance.FORCED for k, e in sol.ledger.items() if k[0] == 0)


def test_layered_e2_hits_resonance_at_level_one():
    with pytest.raises(NonUnitMatrix) as exc:
        layered_solve_axis1(e2(), 6, [Series.zero(2, 6)])
    assert exc.value.level == 1


def test_layered_eigenvalue_two_raises_at_level_two():
    sys = PfaffianSystem.from_strings([1, 1], [["2*y1 + x1^2"], ["y1"]])
    with pytest.raises(NonUnitMatrix) as exc:
        layered_solve_axis1(sys, 5, [Series.zero(2, 5)])
    assert exc.value.level == 2


def test_layered_rejects_inconsistent_c0():
    sys = PfaffianSystem.from_strings([1, 1], [["-y1 + x2"], ["-y1 + x2"]])
    with pytest.raises(ValueError):
        layered_solve_axis1(sys, 4, [Series.zero(2, 4)])


@pytest.mark.parametrize("f", ["-y1 + y1^2 + x1", "-2*y1 + 3*y1^3 - x1^2 + x1*y1", "-y1/2 + x1"])
def test_layered_agrees_with_graded_scalar(f):
    f = f.replace("y1/2", "(1/2)*y1")
    sys = PfaffianSystem.from_strings([1], [[f]])
    graded, rep = solve_formal(sys, 10)
    assert rep.status is SolveStatus.SOLVED and not graded.free_indices()
    layered = layered_solve_axis1(sys, 10, [Series.zero(1, 10)])
    assert layered.phi == graded.phi


def _constructed(rng, m=2):
    """Integrable Fuchsian system with the known solution ``y = psi``.

    With ``z = y - psi`` each equation reads ``x_i dz/dx_i = a_i * g(z)``,
    which is compatible for any common ``g``.
    """
    psi = Poly(m, 1)
    for _ in range(4):
        xe = tuple(rng.randint(0, 2) for _ in range(m))
        if sum(xe):
            psi = psi + Poly(m, 1, {(xe, (0,)): rng.randint(-2, 2)})
    z = Poly.y(1, m, 1) - psi
    b = Fraction(rng.randint(-2, 2))
    g = z + z * z * b
    f = []
    for i in range(1, m + 1):
        a = -rng.randint(1, 3)
        f.append([str(psi.partial_x(i).mul_x_power(i, 1) + g * a)])
    return PfaffianSystem.from_strings([1] * m, f), psi


@pytest.mark.parametrize("seed", range(8))
def test_layered_agrees_with_graded_on_constructed_systems(seed):
    rng = random.Random(seed)
    sys, psi = _constructed(rng)
    N = 7
    graded, rep = solve_formal(sys, N)
    assert rep.status is SolveStatus.SOLVED and not graded.free_indices()
    expected = eval_series(psi, [Series.zero(2, N)])
    assert graded.phi[0] == expected
    c0 = [expected.restrict_axis(1)]
    layered = layered_solve_axis1(sys, N, c0)
    assert layered.phi == graded.phi
    assert not any(defect_on_solution(sys, graded.phi, 1, 2))


@pytest.mark.parametrize("seed", range(12))
def test_solved_outputs_have_zero_residual(seed):
    rng = random.Random(100 + seed)
    p, f = oracles.random_system(rng, n=rng.randint(1, 2))
    sys = PfaffianSystem.from_strings(p, f)
    sol, rep = solve_formal(sys, 5)
    if rep.status is not SolveStatus.SOLVED:
        assert sol is None and rep.witness
        return
    assert verify(sys, sol.phi).ok
    assert all(sum(k) > 5 for s in defect_on_solution(sys, sol.phi, 1, 2) for k in s.terms)
