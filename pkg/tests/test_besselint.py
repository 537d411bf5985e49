from fractions import Fraction

import numpy as np
import pytest

from haarmoments import besselint as bi
from haarmoments import sampling as sp
from haarmoments.schur import partitions_up_to

# independent 50-term exact-rational partial sums, frozen
I0_AT_ONE = 2.2795853023360673
FN_RANK1_N2_AT_ONE = 1.590636854637329


def test_series_at_zero():
    assert bi.i0_series(0.0) == 1.0


def test_series_at_one():
    assert bi.i0_series(1.0).real == pytest.approx(I0_AT_ONE, rel=1e-14)


def test_j0_unit_bound_on_grid():
    for x in np.linspace(0.0, 100.0, 400):
        assert abs(bi.j0(float(x))) <= 1.0


def test_j0_small_argument_matches_series():
    from scipy.special import j0 as sp_j0

    for x in (0.5, 3.0, 11.0):
        assert bi.j0(x) == pytest.approx(float(sp_j0(x)), abs=1e-12)


def test_fn_rank1_at_zero_exactly_one():
    for n in (2, 4, 7):
        assert bi.fn_rank1(0.0, n) == 1.0


def test_fn_rank1_value_n2():
    assert bi.fn_rank1(1.0, 2).real == pytest.approx(FN_RANK1_N2_AT_ONE, rel=1e-13)


def test_fn_rank1_series_vs_quadrature():
    for z2 in (1.0, -4.0, 9.0 + 3.0j, 25.0, -25.0):
        a = bi.fn_rank1(z2, 6)
        b = bi.fn_rank1_quad(z2, 6)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_fn_rank1_matches_mc():
    n = 4
    z2 = 0.9 + 0.4j
    A = np.zeros((n, n), dtype=complex)
    A[0, 0] = z2
    B = np.eye(n)

    def f(U):
        return complex(np.exp(np.trace(A @ U) + np.trace(U.conj().T @ B.conj().T)))

    est = sp.mc_average(f, sp.haar_unitary(n), 40_000, seed=7)
    assert abs(est.mean - bi.fn_rank1(z2, n)) <= 4 * est.stderr


def test_fn_general_reduces_to_rank1():
    spec = bi.BesselSpec((1.5 + 0.5j,), 4)
    assert bi.fn_general(spec) == bi.fn_rank1(1.5 + 0.5j, 4)


def test_fn_general_m2_matches_mc():
    n = 5
    A = np.zeros((n, n), dtype=complex)
    A[0, 0] = 1.0
    A[1, 1] = -1.0

    def f(U):
        return complex(np.exp(np.trace(A @ U) + np.trace(U.conj().T)))

    est = sp.mc_average(f, sp.haar_unitary(n), 40_000, seed=8)
    form = bi.fn_general(bi.BesselSpec((1.0, -1.0), n))
    assert abs(est.mean - form) <= 4 * est.stderr


def test_fn_general_permutation_symmetric():
    a = bi.fn_general(bi.BesselSpec((1.0, -1.0, 0.5j), 7))
    b = bi.fn_general(bi.BesselSpec((0.5j, 1.0, -1.0), 7))
    assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


def test_fn_general_degenerate_direction_cauchy():
    # as the second eigenvalue shrinks, values approach the rank-one integral
    target = bi.fn_rank1(1.0, 6)
    gaps = [abs(bi.fn_general(bi.BesselSpec((1.0, s), 6)) - target)
            for s in (0.2, 0.1, 0.05, 0.025)]
    assert all(gaps[i] > gaps[i + 1] for i in range(len(gaps) - 1))


def test_bessel_spec_validation():
    with pytest.raises(ValueError):
        bi.BesselSpec((1.0, 1.0 + 1e-6), 8)      # too close
    with pytest.raises(ValueError):
        bi.BesselSpec((1.0, 2.0, 3.0), 5)        # 2m > n


def test_exp_trace_coefficients_det_vs_product():
    for lam in partitions_up_to(4):
        for m in range(max(1, lam.length), 5):
            d = bi.exp_trace_schur_coeff(lam, m, via="det")
            p = bi.exp_trace_schur_coeff(lam, m, via="product")
            assert d == p


def test_exp_trace_coefficient_empty():
    assert bi.exp_trace_schur_coeff([], 1) == Fraction(1)
