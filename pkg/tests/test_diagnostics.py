import math

import pytest

from pfaffseries.catalog import e2, euler
from pfaffseries.diagnostics import (InsufficientData, degree_profile, gevrey_fit, radius_estimate,
                                     ray_coefficients)
from pfaffseries.series import Series
from pfaffseries.solver import solve_formal


def test_profile_of_euler():
    sol, _ = solve_formal(euler(), 10)
    prof = degree_profile(sol)
    assert prof.as_floats() == [float(math.factorial(k - 1)) for k in range(1, 11)]
    assert prof.zero_degrees == ()
    assert prof.to_csv().splitlines()[:3] == ["degree,max_abs_coeff", "1,1.0", "2,1.0"]


def test_profile_records_zero_degrees():
    prof = degree_profile([Series(2, 4, {(1, 1): 1, (2, 2): 1})])
    assert prof.zero_degrees == (1, 3)
    assert not prof.degenerate
    assert degree_profile([Series.zero(1, 3)]).degenerate


def test_gevrey_fit_euler_is_factorial():
    sol, _ = solve_formal(euler(), 25)
    fit = gevrey_fit(degree_profile(sol))
    assert 0.8 <= fit.s <= 1.2
    assert fit.verdict() == "factorial-type growth: likely divergent"


def test_gevrey_fit_recovers_synthetic_parameters():
    seq = [math.exp(0.3 + d * math.log(2) + 0.5 * math.lgamma(d + 1)) for d in range(1, 21)]
    fit = gevrey_fit(seq)
    assert fit.s == pytest.approx(0.5, abs=1e-6)
    assert fit.log_a == pytest.approx(math.log(2), abs=1e-6)
    assert fit.log_c == pytest.approx(0.3, abs=1e-6)
    assert fit.r_squared == pytest.approx(1.0)


def test_gevrey_fit_geometric():
    fit = gevrey_fit([3.0 ** d for d in range(1, 15)])
    assert abs(fit.s) < 1e-6
    assert fit.verdict() == "geometric growth: consistent with convergence"


def test_gevrey_needs_enough_points():
    with pytest.raises(InsufficientData):
        gevrey_fit([1, 0, 0, 2, 0, 0, 3])


def test_e2_diagonal_radius():
    sol, _ = solve_formal(e2(), 24, "value", {(1, 1): [1]})
    assert radius_estimate(sol, "diagonal") == pytest.approx(1.0, abs=1e-9)
    fit = gevrey_fit(degree_profile(sol))
    assert abs(fit.s) < 0.2


def test_geometric_radius_along_axis():
    phi = [Series(2, 20, {(k, 0): 3 ** k for k in range(1, 21)})]
    assert radius_estimate(phi, 1) == pytest.approx(1 / 3)
    with pytest.raises(InsufficientData):
        radius_estimate(phi, 2)


def test_euler_radius_is_small():
    sol, _ = solve_formal(euler(), 25)
    assert radius_estimate(sol, 1) < 0.15


def test_ray_coefficients_diagonal_sums_each_degree():
    phi = [Series(2, 3, {(1, 0): 1, (0, 1): -3, (1, 1): 2})]
    a = ray_coefficients(phi, "diagonal")
    assert [float(v) for v in a] == [0.0, 2.0, 2.0, 0.0]


def test_ray_axis_out_of_range():
    with pytest.raises(ValueError):
        ray_coefficients([Series.zero(2, 3)], 3)
