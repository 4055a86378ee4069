import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from covbridge.convergence import (
    REFERENCE_ALPHAS,
    REFERENCE_LAMBDAS,
    EvalGrid,
    abs_error_curve,
    covariance_limit_scan,
    gamma_ratio_probe,
    mae,
    mae_table,
    spectral_limit_scan,
)
from covbridge.errors import DomainError, ParameterError

UNIT_SPAN = EvalGrid.span(0.0, 1.0, 10000)
# sup_t |1/(1+t) - exp(-t)|, root of the derivative found with mpmath
UNCONSTRAINED_SUP = 0.20363218879453693


def test_grid_constructors():
    g = EvalGrid.span(0.0, 1.0, 4)
    assert np.allclose(g.points, [0.25, 0.5, 0.75, 1.0]) and g.lower == 0.0
    g = EvalGrid.linear(1.0, 2.0, 3)
    assert np.allclose(g.points, [1.0, 1.5, 2.0]) and g.lower == 1.0
    g = EvalGrid.log(0.1, 10.0, 3)
    assert np.allclose(g.points, [0.1, 1.0, 10.0])
    assert len(g) == 3


@pytest.mark.parametrize(
    "points", [[], [0.0, 1.0], [1.0, 1.0], [2.0, 1.0], [1.0, np.nan]], ids=["empty", "zero", "dup", "desc", "nan"]
)
def test_grid_invariants(points):
    with pytest.raises(ParameterError):
        EvalGrid(points)


def test_grid_constructor_validation():
    with pytest.raises(ParameterError):
        EvalGrid.linear(0.0, 1.0, 3)  # includes 0
    with pytest.raises(ParameterError):
        EvalGrid.span(1.0, 1.0, 3)
    with pytest.raises(ParameterError):
        EvalGrid.linear(1.0, 2.0, 1)


def test_grid_is_read_only():
    g = EvalGrid.span(0.0, 1.0, 4)
    with pytest.raises(ValueError):
        g.points[0] = 5.0


def test_abs_error_curve_values():
    g = EvalGrid([1e-9, 1.0])
    e = abs_error_curve(1.0, 1.0, g)
    assert e[0] < 1e-14
    assert e[1] == pytest.approx(abs(0.5 - math.exp(-1)), rel=1e-14)
    assert abs_error_curve(1e6, 1.0, EvalGrid([1.0]))[0] < 2e-7


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 1e4), st.floats(0.01, 10.0))
def test_abs_error_curve_range(lam, alpha):
    e = abs_error_curve(lam, alpha, EvalGrid.span(0.0, 20.0, 200))
    assert np.all((e >= 0) & (e < 1))


@pytest.mark.parametrize(
    "lam, alpha, expected",
    [(1.0, 0.2 / 3, 0.20363), (20.0, 2 / 3, 0.01228), (2.0, 20 / 3, 0.00462), (2000.0, 20 / 3, 0.0)],
)
def test_mae_reference_cells(lam, alpha, expected):
    assert mae(lam, alpha, UNIT_SPAN) == pytest.approx(expected, abs=5e-6)


@pytest.mark.parametrize("alpha", [0.01, 0.3, 1.0, 7.0])
def test_mae_unconstrained_supremum(alpha):
    g = EvalGrid.span(0.0, 100 * alpha, 2000)
    assert mae(1.0, alpha, g) == pytest.approx(UNCONSTRAINED_SUP, abs=1e-9)


def test_mae_refines_beyond_grid():
    coarse = EvalGrid.span(0.0, 10.0, 7)
    assert mae(1.0, 1.0, coarse) == pytest.approx(UNCONSTRAINED_SUP, abs=1e-9)
    assert np.max(abs_error_curve(1.0, 1.0, coarse)) < UNCONSTRAINED_SUP - 1e-3


@settings(max_examples=25, deadline=None)
@given(st.floats(1.0, 3000.0), st.floats(0.01, 2.0), st.floats(0.01, 2.0))
def test_mae_alpha_invariance(lam, a1, a2):
    m1 = mae(lam, a1, EvalGrid.span(0.0, 50 * a1, 500))
    m2 = mae(lam, a2, EvalGrid.span(0.0, 50 * a2, 500))
    assert m1 == pytest.approx(m2, abs=1e-9)


def test_mae_table_shape_and_rows():
    table = mae_table(REFERENCE_LAMBDAS, REFERENCE_ALPHAS, UNIT_SPAN)
    assert table.cells.shape == (4, 9)
    assert table.grid is UNIT_SPAN
    assert table.notes == ()
    assert np.array_equal(np.round(table.row(0.02 / 3), 5), np.round(table.row(0.2 / 3), 5))
    assert np.all(np.diff(table.cells, axis=1) < 0)
    lam = np.array(REFERENCE_LAMBDAS)
    scaled = table.cells[:, -3:] * lam[-3:]
    assert np.all(np.abs(scaled / scaled[:, -1:] - 1) < 0.1)


def test_mae_table_flags_unsorted_rows():
    table = mae_table([5.0, 1.0], [1.0], UNIT_SPAN)
    assert table.notes == ()  # rows are checked in sorted lambda order
    with pytest.raises(ParameterError):
        mae_table([], [1.0], UNIT_SPAN)


def test_covariance_limit_scan():
    got = covariance_limit_scan(0.2 / 3, [1, 2, 5, 20], UNIT_SPAN)
    assert got == pytest.approx([0.20363, 0.11608, 0.05075, 0.01331], abs=5e-6)
    assert covariance_limit_scan(2 / 3, [60, 160], UNIT_SPAN) == pytest.approx([0.00415, 0.00156], abs=5e-6)
    assert covariance_limit_scan(1.0, [3.0], UNIT_SPAN) == [mae(3.0, 1.0, UNIT_SPAN)]
    with pytest.raises(ParameterError):
        covariance_limit_scan(1.0, [5, 2], UNIT_SPAN)


def test_spectral_limit_scan_decreases_at_delta_one():
    z = EvalGrid([0.1, 1.0, 3.0])
    scan = spectral_limit_scan(1.0, 1, z, [10.0, 100.0, 1000.0])
    assert scan.shape == (3, 3)
    assert np.all(np.diff(scan, axis=0) < 0)
    assert scan[-1].max() < 1e-2 / math.pi


def test_spectral_limit_scan_negative_control():
    # at delta = 2 the limit is a different density, the error does not vanish
    scan = spectral_limit_scan(1.0, 1, EvalGrid([1.0]), [10.0, 1000.0], delta=2.0)
    assert scan[-1, 0] > 0.05


def test_spectral_limit_scan_validation():
    z = EvalGrid([1.0])
    with pytest.raises(ParameterError):
        spectral_limit_scan(1.0, 2, z, [10.0], delta=0.9)
    with pytest.raises(ParameterError):
        spectral_limit_scan(1.0, 3, z, [10.0])
    with pytest.raises(ParameterError):
        spectral_limit_scan(1.0, 1, z, [10.0, 5.0])


@pytest.mark.parametrize(
    "lam, c, expected",
    [
        # mpmath, 40 digits
        (10.5, 2.5, 1.5887924854093595),
        (11.0, 0.5, 1.0357857140546658),
        (47337.0, 0.015625, 1.0000001676194053),
        (1e4, 3.5, 1.0007879152629551),
    ],
)
def test_gamma_ratio_reference(lam, c, expected):
    assert gamma_ratio_probe(lam, c) == pytest.approx(expected, rel=2e-15)


def test_gamma_ratio_values():
    assert gamma_ratio_probe(7.0, 0.0) == 1.0
    # exact: Gamma(9998) 10^8 / Gamma(10000) = 10^8 / (9998 * 9999)
    assert gamma_ratio_probe(1e4, 2.0) == pytest.approx(1e8 / (9998 * 9999), rel=1e-11)
    assert abs(gamma_ratio_probe(1e4, 2.0) - 1) < 3.1e-4
    assert abs(gamma_ratio_probe(100.0, 1.0) - 1) < 2e-2
    assert abs(gamma_ratio_probe(100.0, 1.0) - 1) < abs(gamma_ratio_probe(10.0, 1.0) - 1)


@pytest.mark.parametrize("lam, c", [(3.0, 2.0), (2.0, 1.0), (np.inf, 1.0)])
def test_gamma_ratio_domain(lam, c):
    with pytest.raises(DomainError):
        gamma_ratio_probe(lam, c)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 5.0), st.floats(7.0, 1e5))
def test_gamma_ratio_above_one_and_decreasing(c, lam):
    r1 = gamma_ratio_probe(lam, c)
    r2 = gamma_ratio_probe(2 * lam, c)
    assert r1 > 1.0 and r2 > 1.0
    assert r2 < r1
    assert r1 - 1 == pytest.approx(c * (c + 1) / (2 * lam), rel=3 * (c + 2) ** 2 / lam + 1e-6)
