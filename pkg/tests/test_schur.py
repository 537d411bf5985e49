import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haarmoments import schur as sc


partitions_st = st.lists(st.integers(1, 6), min_size=0, max_size=4).map(
    lambda xs: sc.Partition.of(sorted(xs, reverse=True)))


def test_conjugate_row_to_column():
    assert sc.conjugate([3]).parts == (1, 1, 1)


def test_conjugate_empty():
    assert sc.conjugate([]).parts == ()


def test_conjugate_self_conjugate():
    assert sc.conjugate([2, 1]).parts == (2, 1)


@given(partitions_st)
def test_conjugate_involutive(lam):
    assert sc.conjugate(sc.conjugate(lam)) == lam
    assert sc.conjugate(lam).weight == lam.weight
    if lam.parts:
        assert sc.conjugate(lam).length == lam.parts[0]


def test_partitions_reverse_lex():
    got = [p.parts for p in sc.partitions_of_weight(4)]
    assert got == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]


def test_schur_hook_at_ones():
    # s_(2,1)(x1, x2) = x1 x2 (x1 + x2), so 2 at (1, 1)
    assert sc.schur_eval([2, 1], [1.0, 1.0]) == pytest.approx(2.0)


def test_schur_too_long_is_zero():
    assert sc.schur_eval([1, 1, 1], [1.0, 1.0]) == 0.0


def test_schur_single_row_is_complete_symmetric():
    h2, _ = sc.hr_er([1.0, 2.0], 2)
    assert sc.schur_eval([2], [1.0, 2.0]) == pytest.approx(h2)
    assert h2 == pytest.approx(7.0)


def test_hr_er_values():
    h, e = sc.hr_er([1.0, 1.0, 1.0, 1.0], 2)
    assert e == pytest.approx(6.0)   # C(4, 2)
    h, e = sc.hr_er([1.0, 1.0], 2)
    assert h == pytest.approx(3.0)   # C(3, 2)
    assert sc.hr_er([1.0, 2.0], -1) == (0.0, 0.0)


def test_dim_u_values():
    assert sc.dim_u([2], 3) == 6          # C(4, 2)
    assert sc.dim_u([1, 1], 4) == 6       # C(4, 2)
    assert sc.dim_u_conj([2], 3) == 3     # e_2(1_3)
    assert sc.dim_u([2, 1], 2) == 2
    assert sc.dim_u([1, 1, 1], 2) == 0
    assert sc.dim_u([], 5) == 1


def test_dim_u_matches_schur_at_ones():
    for lam in sc.partitions_up_to(8):
        for n in range(1, 7):
            want = sc.dim_u(lam, n)
            got = sc.schur_eval(lam, np.ones(n))
            assert abs(got - want) <= 1e-9 * max(1.0, abs(want))


def test_dim_u_extrapolation(rng):
    # schur at (1+eps_i) converges to the dimension as eps -> 0
    lam = sc.Partition.of([3, 1])
    n = 4
    want = sc.dim_u(lam, n)
    errs = []
    for scale in (1e-2, 1e-3):
        x = 1.0 + scale * rng.standard_normal(n)
        errs.append(abs(sc.schur_eval(lam, x) - want))
    assert errs[1] < errs[0]
    assert errs[1] <= 1e-2 * want


@given(partitions_st, st.integers(2, 4), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_schur_symmetric_under_permutation(lam, n, pyrandom):
    x = np.array([pyrandom.uniform(0.5, 2.0) + 1j * pyrandom.uniform(-1, 1)
                  for _ in range(n)])
    perm = list(range(n))
    pyrandom.shuffle(perm)
    a = sc.schur_eval(lam, x)
    b = sc.schur_eval(lam, x[perm])
    assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


@given(partitions_st, st.integers(2, 4))
@settings(max_examples=40, deadline=None)
def test_schur_homogeneous(lam, n):
    x = np.linspace(0.6, 1.9, n) + 0.3j
    c = 1.7 - 0.4j
    a = sc.schur_eval(lam, c * x)
    b = c ** lam.weight * sc.schur_eval(lam, x)
    assert abs(a - b) <= 1e-9 * max(1.0, abs(b))


@given(partitions_st, st.integers(2, 4))
@settings(max_examples=40, deadline=None)
def test_schur_branching_zero_argument(lam, n):
    x = np.linspace(0.5, 1.5, n - 1)
    with_zero = sc.schur_eval(lam, np.concatenate([x, [0.0]]))
    if lam.length <= n - 1:
        want = sc.schur_eval(lam, x)
    else:
        want = 0.0
    assert abs(with_zero - want) <= 1e-9 * max(1.0, abs(want))


def test_cauchy_poly_identity():
    rep = sc.cauchy_check([0.5], np.eye(2), kind="poly")
    assert rep.passed
    assert rep.lhs == pytest.approx(9.0 / 4.0)


def test_cauchy_trivial_at_zero():
    rep = sc.cauchy_check([0.0], np.eye(3), kind="poly")
    assert rep.passed and rep.lhs == pytest.approx(1.0)
    rep = sc.cauchy_check([0.0], 0.5 * np.eye(2), kind="inverse")
    assert rep.passed and rep.lhs == pytest.approx(1.0)


def test_cauchy_inverse_geometric():
    rep = sc.cauchy_check([0.5], 0.5 * np.eye(1), kind="inverse", weight_cutoff=60)
    assert rep.passed
    assert rep.lhs == pytest.approx(4.0 / 3.0)


def test_cauchy_inverse_requires_contraction():
    with pytest.raises(ValueError):
        sc.cauchy_check([1.0], 2.0 * np.eye(2), kind="inverse")


def test_cauchy_random_matrix(rng):
    X = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    rep = sc.cauchy_check([0.3, 0.2 - 0.1j], X, kind="poly")
    assert rep.passed


def test_orthogonality_diagonal():
    rep = sc.orthogonality_check([1], [1], np.eye(2), np.eye(2), 20_000, seed=1)
    assert rep.passed
    assert rep.rhs == pytest.approx(1.0)  # s_(1)(I_2) / dim = 2/2


def test_orthogonality_distinct_vanishes():
    rep = sc.orthogonality_check([1], [2], np.eye(2), np.eye(2), 20_000, seed=2)
    assert rep.passed
    assert rep.rhs == 0.0


def test_orthogonality_weight_two():
    rep = sc.orthogonality_check([2], [2], np.eye(2), np.eye(2), 30_000, seed=3)
    assert rep.passed
    assert rep.rhs == pytest.approx(1.0)


def test_lagrange_weights_two_nodes():
    w = sc.lagrange_weights([0.0, 1.0])
    assert w == pytest.approx([1.0, -1.0])
    assert np.sum(w) == pytest.approx(0.0)


def test_lagrange_moment_identities():
    # powers r <= n-2 annihilate; r = n-1+s gives the complete symmetric h_s
    x = np.array([0.0, 1.0, 3.0])
    w = sc.lagrange_weights(x)
    assert np.sum(x**0 * w) == pytest.approx(0.0, abs=1e-12)
    assert np.sum(x**1 * w) == pytest.approx(0.0, abs=1e-12)
    assert np.sum(x**2 * w) == pytest.approx(1.0)   # h_0
    h1 = float(sc.hr_er(x, 1)[0].real)
    assert np.sum(x**3 * w) == pytest.approx(h1)    # h_1(0,1,3) = 4


def test_lagrange_partial_fraction_example():
    x = np.array([0.0, 1.0])
    w = sc.lagrange_weights(x)
    t = -1.0
    lhs = 1.0 / np.prod(x - t)
    rhs = np.sum(w / (x - t))
    assert lhs == pytest.approx(0.5)
    assert rhs == pytest.approx(lhs)


def test_lagrange_moment_identities_random(rng):
    for n in range(2, 9):
        x = np.sort(rng.uniform(0.0, 10.0, n))
        if np.min(np.diff(x)) < 1e-3:
            continue
        w = sc.lagrange_weights(x)
        for r in range(n - 1):
            s = float(np.sum(x**r * w))
            scale = float(np.sum(np.abs(x**r * w)))
            assert abs(s) <= 1e-9 * max(1.0, scale)


def test_lagrange_gap_error():
    with pytest.raises(ValueError, match="gap"):
        sc.lagrange_weights([1.0, 1.0 + 1e-12])
