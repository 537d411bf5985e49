import math

import numpy as np
import pytest

from haarmoments import sampling as sp


def test_haar_unitarity():
    U = sp.sample(sp.haar_unitary(5), sp.substream(0, 0))
    assert np.allclose(U @ U.conj().T, np.eye(5), atol=1e-12)


def test_haar_entry_second_moment():
    # <|U_11|^2> = 1/n by character orthogonality at weight one
    n = 3
    est = sp.mc_average(lambda U: abs(U[0, 0]) ** 2, sp.haar_unitary(n),
                        60_000, seed=1)
    assert abs(est.mean.real - 1.0 / n) <= 3 * est.stderr


def test_gue_trace_moment():
    # <tr H^2> = n^2 / beta: n diagonal variances 1/beta plus n(n-1) off-diagonal
    n, beta = 3, 1.0
    est = sp.mc_average(lambda H: np.trace(H @ H).real, sp.gue(n, beta),
                        60_000, seed=2)
    assert abs(est.mean.real - n * n / beta) <= 3 * est.stderr


def test_mc_constant_function():
    est = sp.mc_average(lambda U: 1.0, sp.haar_unitary(2), 100, seed=0)
    assert est.mean == 1.0
    assert est.stderr == 0.0
    assert est.samples == 100


def test_mc_unimodular_determinant():
    est = sp.mc_average(lambda U: abs(np.linalg.det(U)) ** 2,
                        sp.haar_unitary(2), 5000, seed=3)
    assert abs(est.mean.real - 1.0) <= max(3 * est.stderr, 1e-12)


def test_mc_deterministic_across_runs_and_shards(monkeypatch):
    monkeypatch.delenv("HAARMOMENTS_THREADS", raising=False)

    def f(U):
        return complex(np.linalg.det(U))

    results = [sp.mc_average(f, sp.haar_unitary(3), 3000, seed=9, shards=s)
               for s in (1, 2, 8)]
    again = sp.mc_average(f, sp.haar_unitary(3), 3000, seed=9, shards=2)
    assert results[0] == results[1] == results[2] == again


def test_mc_thread_cap_env(monkeypatch):
    monkeypatch.setenv("HAARMOMENTS_THREADS", "1")
    assert sp.max_workers(8) == 1


def test_mc_batched_matches_scalar():
    def f(U):
        return complex(np.trace(U))

    def fb(Us):
        return np.einsum("sii->s", Us)

    a = sp.mc_average(f, sp.haar_unitary(3), 2000, seed=4)
    b = sp.mc_average(fb, sp.haar_unitary(3), 2000, seed=4, batched=True)
    assert a.mean == pytest.approx(b.mean, abs=1e-14)
    assert a.stderr == pytest.approx(b.stderr, abs=1e-14)


def test_mc_nonfinite_reports_index():
    def f(U):
        return math.nan

    with pytest.raises(ValueError, match="sample index 0"):
        sp.mc_average(f, sp.haar_unitary(2), 64, seed=0)


def test_mc_merge_pools_moments(rng):
    vals = rng.standard_normal(50) + 1j * rng.standard_normal(50)

    def est_of(chunk, seed=0):
        mean = chunk.mean()
        s = np.sum(np.abs(chunk - mean) ** 2)
        stderr = math.sqrt(s / (len(chunk) - 1) / len(chunk))
        return sp.McEstimate(complex(mean), stderr, len(chunk), seed)

    merged = sp.mc_merge(est_of(vals[:20]), est_of(vals[20:]))
    whole = est_of(vals)
    assert merged.mean == pytest.approx(whole.mean, abs=1e-12)
    assert merged.stderr == pytest.approx(whole.stderr, abs=1e-12)


def test_haar_left_invariance():
    # statistics of tr(VU) match those of tr(U) for a fixed unitary V
    n = 3
    V = sp.sample(sp.haar_unitary(n), sp.substream(42, 0))

    def tr(Us):
        return np.einsum("sii->s", Us)

    def trV(Us):
        return np.einsum("ij,sji->s", V, Us)

    e1 = sp.mc_average(tr, sp.haar_unitary(n), 50_000, seed=5, batched=True)
    e2 = sp.mc_average(trV, sp.haar_unitary(n), 50_000, seed=6, batched=True)
    tol = 4 * math.hypot(e1.stderr, e2.stderr)
    assert abs(e1.mean - e2.mean) <= tol

    m1 = sp.mc_average(lambda Us: np.abs(tr(Us)) ** 2, sp.haar_unitary(n),
                       50_000, seed=5, batched=True)
    m2 = sp.mc_average(lambda Us: np.abs(trV(Us)) ** 2, sp.haar_unitary(n),
                       50_000, seed=6, batched=True)
    assert abs(m1.mean - m2.mean) <= 4 * math.hypot(m1.stderr, m2.stderr)


def test_ginibre_mean_modulus_squared():
    # mean |z|^2 over the two eigenvalues of a 2x2 Ginibre matrix is 3/2
    n, N = 2, 40_000
    spec = sp.ginibre(n)
    rng = sp.substream(7, 0)
    ev = np.linalg.eigvals(sp.sample_batch(spec, rng, N))
    vals = (np.abs(ev) ** 2).mean(axis=1)
    mean = vals.mean()
    stderr = vals.std(ddof=1) / math.sqrt(N)
    assert abs(mean - 1.5) <= 3 * stderr


def test_histogram_ginibre_radial():
    edges = np.linspace(0.0, 9.0, 10)
    table = sp.eig_histogram(sp.ginibre(1), 40_000, ("radial", edges), seed=8)
    for (qlo, qhi, dens, err) in table.rows():
        qmid = 0.5 * (qlo + qhi)
        want = math.exp(-qmid) / math.pi
        # midpoint approximation of the bin mean adds a small bias allowance
        assert abs(dens - want) <= 4 * err + 0.05 * want + 1e-4


def test_histogram_cue_rank1_support():
    gamma = 0.4
    edges = np.array([0.0, 1.0 - gamma, 1.0, 2.0])
    table = sp.eig_histogram(sp.cue_rank1(4, gamma), 2000, ("radial", edges), seed=9)
    dens = table.density
    assert dens[0] == 0.0 and dens[2] == 0.0 and dens[1] > 0.0


def test_histogram_gue_rank1_strip():
    beta, gamma = 1.0, 0.6
    xe = np.array([-50.0, 50.0])
    ye = np.array([-50.0, 0.0, gamma, 50.0])
    table = sp.eig_histogram(sp.gue_rank1(3, beta, gamma), 2000,
                             ("planar", xe, ye), seed=10)
    d = table.density[0]
    assert d[0] == 0.0 and d[2] == 0.0 and d[1] > 0.0


def test_ensemble_spec_validation():
    with pytest.raises(ValueError):
        sp.cue_rank1(3, 1.5)
    with pytest.raises(ValueError):
        sp.gue(3, beta=-1.0)
    with pytest.raises(ValueError):
        sp.EnsembleSpec("wishart", 3)
