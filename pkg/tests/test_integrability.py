import random

import pytest
import sympy

from pfaffseries.catalog import e2, e3, e5, euler
from pfaffseries.integrability import (Status, check_theorem2, check_theorem3, compat_defect,
                                       defect_on_solution, defects, is_completely_integrable)
from pfaffseries.series import Series
from pfaffseries.system import PfaffianSystem, Poly

import oracles


def test_defect_examples():
    assert compat_defect(e2(), 1, 2) == (Poly(2, 1),)
    assert compat_defect(e3(), 1, 2) == (Poly.parse("x1*y1 - y1^2", 2, 1),)
    assert compat_defect(e5(), 1, 2) == (Poly(2, 1),)


def test_defect_index_checks():
    with pytest.raises(ValueError):
        compat_defect(e2(), 2, 1)


def test_integrability_verdicts():
    assert is_completely_integrable(e2()).holds
    v = is_completely_integrable(e3())
    assert v.status is Status.FAILS
    assert v.certificate["pair"] == [1, 2] and v.certificate["monomial"] == "x1*y1"
    v = is_completely_integrable(euler())
    assert v.holds and "vacuous" in v.note


def test_defect_on_solution_examples():
    assert not any(defect_on_solution(e3(), [Series.variable(1, 2, 6)], 1, 2))
    diag = Series(2, 8, {(k, k): 1 for k in range(1, 5)})
    assert not any(defect_on_solution(e2(), [diag], 1, 2))
    sys = PfaffianSystem.from_strings([1, 2], [["x1*y1 + y1^2"], ["y1"]])
    assert not any(defect_on_solution(sys, [Series.zero(2, 5)], 1, 2))


def test_theorem2_examples():
    assert check_theorem2(e3(), [Series.variable(1, 2, 5)]).holds
    assert check_theorem2(e2()).status is Status.NOT_APPLICABLE
    sys2 = PfaffianSystem.from_strings([1, 1], [["y1", "y2"], ["y2*x1", "y1^2"]])
    assert check_theorem2(sys2).status is Status.NOT_APPLICABLE


def test_theorem3_examples():
    v = check_theorem3(e3(), [Series.variable(1, 2, 6)])
    assert v.holds and v.certificate["det"] == "-x1"
    assert check_theorem3(e2(), [Series.zero(2, 4)]).status is Status.NOT_APPLICABLE
    v = check_theorem3(e3(), [Series.zero(2, 4)])
    assert v.holds and v.certificate["det"] == "x1"


@pytest.mark.parametrize("seed", range(15))
def test_defect_matches_sympy_oracles(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 2)
    p, f = oracles.random_system(rng, m=3 if seed % 5 == 0 else 2, n=n)
    sys = PfaffianSystem.from_strings(p, f)
    for (i, j), F in defects(sys).items():
        direct = oracles.defect_oracle(p, f, i, j)
        cleared = oracles.cleared_compatibility(p, f, i, j)
        for a in range(n):
            ours = oracles.to_sympy(str(F[a]), sys.m, n)
            assert sympy.expand(ours - direct[a]) == 0
            assert sympy.expand(ours - cleared[a]) == 0


def test_defect_is_antisymmetric_under_swap():
    rng = random.Random(7)
    for _ in range(10):
        p, f = oracles.random_system(rng, n=2)
        F = compat_defect(PfaffianSystem.from_strings(p, f), 1, 2)
        G = compat_defect(PfaffianSystem.from_strings(p[::-1], [_swap(c) for c in f[::-1]]), 1, 2)
        for g, c in zip(G, F):
            assert sympy.expand(oracles.to_sympy(_swap(str(g)), 2, 2) + oracles.to_sympy(str(c), 2, 2)) == 0


def _swap(text):
    if isinstance(text, list):
        return [_swap(t) for t in text]
    return text.replace("x1", "X").replace("x2", "x1").replace("X", "x2")
