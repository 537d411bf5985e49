import math

import numpy as np
import pytest

from haarmoments import regdet as rd
from haarmoments import moments as mo
from haarmoments import sampling as sp
from haarmoments.numerics import HermSpectrum, adaptive_integrate, gram_eigs
from conftest import rand_complex


def kernel_quad(k, eps2, a2):
    f = lambda t: (1 - t) ** k / np.sqrt((t - a2 + eps2) ** 2 + 4 * eps2 * a2)
    val, _ = adaptive_integrate(f, 0.0, 1.0, tol=1e-13)
    return val


def test_i0_log_form_at_unit_a():
    eps = 1e-4
    got = rd.ik_exact(0, eps * eps, 1.0).value
    assert got == pytest.approx(math.log(1.0 / eps), abs=2 * eps)


def test_ik_matches_quadrature_spot():
    for (k, a2, eps) in [(0, 0.3, 1e-3), (2, 0.5, 1e-3), (4, 1.0, 0.05),
                         (9, 2.0, 1e-5), (12, 4.0, 1.0), (3, 0.0, 0.01)]:
        got = rd.ik_exact(k, eps * eps, a2).value
        want = kernel_quad(k, eps * eps, a2)
        assert abs(got - want) <= 1e-9 * max(abs(want), 1e-12)


def test_ik_antiderivative_differentiates_back():
    # d/dt [Q sqrt(S)] + lam/sqrt(S) must reproduce the integrand
    k, eps2, a2 = 5, 1e-4, 0.8
    res = rd.ik_exact(k, eps2, a2)
    c = a2 - eps2
    d = 4 * eps2 * a2

    def S(t):
        return (t - c) ** 2 + d

    for t in (0.1, 0.45, 0.9):
        h = 1e-6
        F = lambda x: res.Q(x).real * math.sqrt(S(x))
        deriv = (F(t + h) - F(t - h)) / (2 * h) + res.lam / math.sqrt(S(t))
        want = (1 - t) ** k / math.sqrt(S(t))
        assert deriv == pytest.approx(want, rel=1e-6)


def test_ik_small_eps_leading_order():
    # I_2 at a^2 = 0.5: leading term (1-a^2)^2 ln((1-a^2)/eps^2)
    a2, eps = 0.5, 1e-3
    got = rd.ik_exact(2, eps * eps, a2).value
    lead = (1 - a2) ** 2 * math.log((1 - a2) / eps ** 2)
    # subtract the next eps-independent layer by differencing two eps values
    got10 = rd.ik_exact(2, (eps / 10) ** 2, a2).value
    slope = (got10 - got) / math.log(100.0)
    assert slope == pytest.approx((1 - a2) ** 2, rel=1e-4)
    assert abs(got - lead) / got <= 0.35   # same order, constant offset allowed


def test_f_eps_zero_spectrum_quadrature():
    n, eps = 5, 0.03
    got = rd.f_eps(0.0, eps * eps, n)
    f = lambda t: (n - 1) * (1 - t) ** (n - 2) / (t + eps * eps)
    want, _ = adaptive_integrate(f, 0.0, 1.0, tol=1e-12)
    assert got == pytest.approx(want, rel=1e-10)


def test_f_eps_n2_is_log_kernel():
    eps2, a2 = 1e-6, 0.7
    assert rd.f_eps(a2, eps2, 2) == pytest.approx(rd.ik_exact(0, eps2, a2).value)


def test_f_eps_large_eps_limit():
    val = rd.f_eps(0.5, 1e6, 4)
    assert val == pytest.approx(1e-6, rel=1e-2)


def test_r_eps_limit_matches_negative_moment():
    spec = HermSpectrum.of([4.0, 9.0])
    lim = rd.r_eps_zero_limit(spec, 1.0)
    closed = (1.0 / 5.0) * math.log(32.0 / 27.0)
    assert lim == pytest.approx(closed, rel=1e-12)
    n2 = mo.moment_neg_z(np.diag([2.0, 3.0]), 1.0).real
    assert lim == pytest.approx(n2, rel=1e-9)
    small = rd.r_eps(rd.RegQuery(spec, 1.0, 1e-6))
    assert abs(small - lim) <= 1e-8


def test_r_eps_scaled_z_limit():
    # general z: the regularized average tends to |z|^(2n) times the
    # reciprocal-moment branch value
    A = np.diag([0.3, 0.5, 0.2])
    spec = gram_eigs(A)
    z = 1.2 - 0.4j
    lim = rd.r_eps(rd.RegQuery(spec, z, 1e-6))
    want = abs(z) ** (2 * spec.dim) * mo.moment_neg_z(A, z).real
    assert lim == pytest.approx(want, rel=1e-6)


def test_r_eps_monotone_in_eps():
    spec = HermSpectrum.of([0.2, 0.9, 1.7, 3.0])
    vals = [rd.r_eps(rd.RegQuery(spec, 1.0, e)) for e in (0.5, 0.2, 0.1, 0.05, 0.02)]
    assert all(vals[i] < vals[i + 1] for i in range(len(vals) - 1))


def test_r_eps_divided_difference_agrees():
    spec = HermSpectrum.of([0.2, 0.9, 1.7, 3.0])
    q = rd.RegQuery(spec, 1.0 + 0.2j, 0.1)
    assert rd.r_eps(q) == pytest.approx(rd.r_eps(q, use_divided_difference=True),
                                        rel=1e-9)


def test_r_eps_rejects_tiny_gap():
    spec = HermSpectrum.of([1.0, 1.0 + 1e-9])
    with pytest.raises(ValueError, match="gap"):
        rd.r_eps(rd.RegQuery(spec, 1.0, 0.1))


def test_r_eps_matches_mc(rng):
    n = 4
    A = rand_complex(rng, n, 1.4)
    spec = gram_eigs(A)
    z = complex(math.sqrt((spec.eigs[0] + spec.eigs[-1]) / 2.0))
    eps = 0.1
    val = rd.r_eps(rd.RegQuery(spec, z, eps))
    eye = np.eye(n)

    def f(Us):
        M = eye[None] - (A / z)[None] @ Us
        G = eps ** 2 * eye[None] + M @ M.conj().transpose(0, 2, 1)
        return 1.0 / np.linalg.det(G).real

    est = sp.mc_average(f, sp.haar_unitary(n), 50_000, seed=3, batched=True)
    assert abs(est.mean.real - val) <= 4 * est.stderr


def test_alpha_two_point_example():
    spec = HermSpectrum.of([0.5, 2.0])
    co = rd.asym_coeffs(spec, 1.0)
    assert co.alpha == pytest.approx(2.0 / 3.0, rel=1e-12)
    assert rd.ef_coefficient(spec, 1.0) == pytest.approx(co.alpha, rel=1e-12)


def test_alpha_vanishes_off_spectrum():
    above = HermSpectrum.of([2.0, 3.0, 5.0])
    below = HermSpectrum.of([0.1, 0.3, 0.6])
    assert rd.asym_coeffs(above, 1.0).alpha == pytest.approx(0.0, abs=1e-12)
    assert rd.asym_coeffs(below, 1.0).alpha == pytest.approx(0.0, abs=1e-12)


def test_lagrange_annihilation_of_low_degree_polynomials():
    # adding any polynomial of degree <= n-2 in a^2 to the kernel must leave
    # the weighted sum unchanged
    spec = HermSpectrum.of([0.2, 0.9, 1.7, 3.0])
    z, eps = 1.0, 0.05
    n = spec.dim
    x = np.asarray(spec.eigs)
    from haarmoments.schur import lagrange_weights

    w = lagrange_weights(x)
    base = rd.r_eps(rd.RegQuery(spec, z, eps))
    poly = lambda u: 2.3 - 1.1 * u + 0.7 * u ** (n - 2)
    perturbed = float(np.sum((np.array([rd.f_eps(u, eps ** 2, n) for u in x])
                              + poly(x)) * w))
    assert perturbed == pytest.approx(base, abs=1e-9 * max(1.0, abs(base)))


def test_r_eps_continuous_across_unit_eigenvalue():
    # for fixed eps > 0 nothing is singular as an eigenvalue crosses |z|^2
    eps = 0.05
    vals = [rd.r_eps(rd.RegQuery(HermSpectrum.of([a2, 2.5]), 1.0, eps))
            for a2 in (0.999, 0.9999, 1.0001, 1.001)]
    spread = max(vals) - min(vals)
    assert spread <= 1e-2 * max(vals)


def test_slope_fit_two_and_three_points():
    for spec_vals in ([0.5, 2.0], [0.3, 0.8, 2.0]):
        spec = HermSpectrum.of(spec_vals)
        rep = rd.theorem2a_density_ratio(spec, 1.0)
        assert rep.passed
        assert abs(rep.lhs - rep.rhs) <= 0.01 * abs(rep.rhs)


def test_slope_fit_nonstraddling_is_zero():
    spec = HermSpectrum.of([2.0, 3.0])
    rep = rd.theorem2a_density_ratio(spec, 1.0)
    assert rep.passed
    assert abs(rep.rhs) <= 1e-12
    assert abs(rep.lhs) <= 1e-3


def test_eps_to_zero_linear_remainder():
    # off the spectrum the remainder vs the limit shrinks at least linearly
    spec = HermSpectrum.of([2.0, 3.0, 4.5])
    lim = rd.r_eps_zero_limit(spec, 1.0)
    eps = np.array([1e-2, 1e-3, 1e-4])
    errs = np.array([abs(rd.r_eps(rd.RegQuery(spec, 1.0, e)) - lim) for e in eps])
    C = errs / eps
    assert np.all(C <= max(1.0, C[0]) + 1e-9)


def test_reg_query_validation():
    spec = HermSpectrum.of([1.0, 2.0])
    with pytest.raises(ValueError):
        rd.RegQuery(spec, 1.0, 0.0)
    with pytest.raises(ValueError):
        rd.RegQuery(spec, 0.0, 0.1)
