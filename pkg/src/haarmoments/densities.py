"""Mean eigenvalue densities tied to spectral-determinant moments.

Covers the Ginibre density and its dimensional-reduction form, rank-one
deviations from a unitary (annulus support) and from a Hermitian matrix
(strip support), plus the large-n logarithmic potential of unitarily
invariant ensembles with a user-supplied limiting spectral law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from . import sampling
from .moments import moment_pos_z
from .numerics import HermSpectrum, Poly, adaptive_integrate, find_root_monotone, quad_rule
from .report import VerificationReport, make_report

__all__ = [
    "SpectralLaw",
    "DensityQuery",
    "mp_law",
    "discrete_law",
    "table_law",
    "ginibre_density",
    "ginibre_reduction_check",
    "cue_rank1_density",
    "cue_rank1_equal_mass_edges",
    "cue_rank1_count_limit",
    "cue_rank1_count_finite",
    "gue_rank1_density",
    "gue_rank1_prefactor",
    "fz_phi",
    "ginibre_pn_mc",
]


@dataclass(frozen=True)
class SpectralLaw:
    """Limiting eigenvalue law of W W*, as much as the potential needs.

    ``m_minus_1`` is math.inf when the inverse moment diverges; that acts as
    a branch selector, never as an arithmetic value.
    """

    kind: str
    support: tuple
    m1: float
    m_minus_1: float
    atoms: tuple = ()
    masses: tuple = ()

    def integrate(self, f, tol: float = 1e-11) -> float:
        """Integral of f against the law."""
        if self.kind in ("discrete", "table"):
            return float(sum(w * f(a) for a, w in zip(self.atoms, self.masses)))
        # smooth angular form of the Marchenko-Pastur law:
        # lambda = 4 sin^2(phi/2), weight (1 + cos(phi))/pi on (0, pi)
        def g(phi):
            lam = 4.0 * np.sin(np.asarray(phi) / 2.0) ** 2
            return np.asarray(f(lam)) * (1.0 + np.cos(phi)) / math.pi

        est = quad_rule("legendre01", 64).integrate(lambda u: g(u * math.pi) * math.pi)
        tol_eff = max(tol, 5e-14 * abs(est))
        val, _ = adaptive_integrate(g, 0.0, math.pi, tol=tol_eff)
        return float(val)

    def log_moment(self) -> float:
        """Integral of ln(lambda) against the law."""
        if self.kind in ("discrete", "table"):
            return float(sum(w * math.log(a) for a, w in zip(self.atoms, self.masses)))
        return self.integrate(lambda lam: np.log(np.maximum(lam, 1e-300)))


def mp_law() -> SpectralLaw:
    """Marchenko-Pastur law (1/2pi) sqrt((4-lam)/lam) on (0, 4)."""
    return SpectralLaw("marchenko_pastur", (0.0, 4.0), 1.0, math.inf)


def discrete_law(atoms, weights) -> SpectralLaw:
    atoms = tuple(float(a) for a in atoms)
    weights = tuple(float(w) for w in weights)
    if abs(sum(weights) - 1.0) > 1e-10 or any(w < 0 for w in weights):
        raise ValueError("weights must be nonnegative with unit total mass")
    m1 = sum(w * a for a, w in zip(atoms, weights))
    if any(a <= 0 and w > 0 for a, w in zip(atoms, weights)):
        m_1 = math.inf
    else:
        m_1 = sum(w / a for a, w in zip(atoms, weights))
    return SpectralLaw("discrete", (min(atoms), max(atoms)), m1, m_1, atoms, weights)


def table_law(nodes, masses) -> SpectralLaw:
    law = discrete_law(nodes, masses)
    return SpectralLaw("table", law.support, law.m1, law.m_minus_1,
                       law.atoms, law.masses)


@dataclass(frozen=True)
class DensityQuery:
    n: int
    z: complex
    gamma: float | None = None
    beta: float | None = None


def ginibre_density(n: int, z: complex) -> float:
    """Mean eigenvalue density of n x n Ginibre matrices at z.

    (1/pi) e^{-|z|^2} sum_{k<n} |z|^{2k}/k!, evaluated through the
    regularized incomplete Gamma for stability at large n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(gammaincc(n, abs(z) ** 2)) / math.pi


def ginibre_reduction_check(n: int, z: complex, N: int, seed: int = 0,
                            shards: int = 1) -> VerificationReport:
    """Dimensional reduction: the density equals a Gaussian weight times the
    mean squared characteristic polynomial one dimension down."""
    if n < 2:
        raise ValueError("needs n >= 2")
    q2 = abs(z) ** 2
    pref = math.exp(-q2) / (math.pi * math.factorial(n - 1))
    eye = np.eye(n - 1)

    def f(W):
        return pref * abs(np.linalg.det(z * eye[None] - W)) ** 2

    est = sampling.mc_average(f, sampling.ginibre(n - 1), N, seed=seed,
                              shards=shards, batched=True)
    return make_report(
        "ginibre_dimensional_reduction", {"n": n, "z": complex(z), "N": N},
        est.mean, ginibre_density(n, z), tolerance=0.0,
        mc_stderr=est.stderr, k=3.0, seed=seed)


def _gtilde_spectrum(n_inner: int, gamma_tilde: float) -> HermSpectrum:
    eigs = [1.0] * n_inner
    eigs[0] = 1.0 - gamma_tilde
    return HermSpectrum.of(eigs)


def cue_rank1_density(q: DensityQuery) -> float:
    """Density of eigenvalues of diag(sqrt(1-gamma), 1, ..., 1) U.

    Supported on the annulus 1 - gamma < |z|^2 < 1; inside, it reduces to a
    second spectral-determinant moment one dimension down.
    """
    n, gamma = q.n, q.gamma
    if gamma is None or not (0 < gamma < 1):
        raise ValueError("needs gamma in (0, 1)")
    q2 = abs(q.z) ** 2
    if not (1.0 - gamma < q2 < 1.0):
        return 0.0
    gt = (q2 + gamma - 1.0) / q2
    inner = moment_pos_z(_gtilde_spectrum(n - 1, gt), q.z, 1).real
    return (n - 1) / (math.pi * gamma * q2) * (gt / gamma) ** (n - 2) * inner


def _cue_radial_mass(n: int, gamma: float, q_lo: float, q_hi: float,
                     nodes: int = 200) -> float:
    """Integral of the density over an annulus, as pi * int rho(q) dq."""
    lo = max(q_lo, 1.0 - gamma)
    hi = min(q_hi, 1.0)
    if hi <= lo:
        return 0.0
    rule = quad_rule("legendre01", nodes)
    qs = lo + (hi - lo) * rule.nodes
    vals = np.array([cue_rank1_density(DensityQuery(n, math.sqrt(qq), gamma=gamma))
                     for qq in qs])
    return math.pi * (hi - lo) * float(np.sum(rule.weights * vals))


def cue_rank1_equal_mass_edges(n: int, gamma: float, nbins: int,
                               nodes: int = 400) -> np.ndarray:
    """Annulus bin edges in |z|^2 holding equal predicted eigenvalue mass."""
    lo, hi = 1.0 - gamma, 1.0
    grid = np.linspace(lo, hi, nodes + 1)
    dens = np.array([cue_rank1_density(DensityQuery(n, math.sqrt(max(qq, lo + 1e-12)),
                                                    gamma=gamma))
                     for qq in (grid[1:] + grid[:-1]) / 2.0])
    seg = math.pi * np.diff(grid) * dens
    cdf = np.concatenate([[0.0], np.cumsum(seg)])
    cdf /= cdf[-1]
    targets = np.linspace(0.0, 1.0, nbins + 1)
    edges = np.interp(targets, cdf, grid)
    edges[0], edges[-1] = lo, hi
    return edges


def cue_rank1_count_limit(a: float, b: float, gamma: float) -> float:
    """Large-n fraction of eigenvalues in the annulus 2a/n <= 1-|z|^2 <= 2b/n."""
    if not (0 < a < b):
        raise ValueError("needs 0 < a < b")
    if not (0 < gamma < 1):
        raise ValueError("needs gamma in (0, 1)")

    c = (gamma - 2.0) / gamma   # < -1, so both exponents below are negative

    def term(u):
        if u < 350.0:
            return math.exp(u * (c - 1.0)) * math.expm1(2.0 * u) / (2.0 * u)
        return math.exp(u * (c + 1.0)) / (2.0 * u)

    return term(a) - term(b)


def cue_rank1_count_finite(a: float, b: float, gamma: float, n: int) -> float:
    """Finite-n counterpart: annulus mass of the density divided by n."""
    return _cue_radial_mass(n, gamma, 1.0 - 2.0 * b / n, 1.0 - 2.0 * a / n) / n


def gue_rank1_prefactor(n: int, beta: float, gamma: float, x: float, y: float) -> float:
    """Strip-density prefactor multiplying the inner determinant moment.

    beta^n (gamma-y)^(n-2) exp(-beta x^2/2 - beta (gamma-y) y)
    / (sqrt(2 pi beta) gamma^(n-1) (n-2)!).
    """
    return (beta ** n * (gamma - y) ** (n - 2)
            * math.exp(-beta * x * x / 2.0 - beta * (gamma - y) * y)
            / (math.sqrt(2.0 * math.pi * beta) * gamma ** (n - 1)
               * math.factorial(n - 2)))


def gue_rank1_density(q: DensityQuery, N: int = 50_000, seed: int = 0,
                      shards: int = 1):
    """Density for H + i diag(gamma, 0, ..., 0) with H from gue(n, beta).

    Returns ``(value, stderr)``.  The inner average over the (n-1)-dimensional
    Hermitian ensemble has no closed form in general and is estimated by
    Monte Carlo; at n = 2 it is a scalar Gaussian second moment and is
    computed exactly (stderr 0).
    """
    n, beta, gamma = q.n, q.beta, q.gamma
    if beta is None or gamma is None or beta <= 0 or gamma <= 0:
        raise ValueError("needs beta > 0 and gamma > 0")
    if n < 2:
        raise ValueError("needs n >= 2")
    x, y = q.z.real, q.z.imag
    if not (0.0 < y < gamma):
        return 0.0, 0.0
    pref = gue_rank1_prefactor(n, beta, gamma, x, y)
    if n == 2:
        inner = x * x + 1.0 / beta + (2.0 * y - gamma) ** 2
        return pref * inner, 0.0
    shift = gamma - y
    eye = np.eye(n - 1)

    def f(H):
        M = H.copy()
        M[:, 0, 0] += 1j * shift
        return np.abs(np.linalg.det(q.z * eye[None] - M)) ** 2

    est = sampling.mc_average(f, sampling.gue(n - 1, beta), N, seed=seed,
                              shards=shards, batched=True)
    return pref * est.mean.real, pref * est.stderr


def fz_phi(law: SpectralLaw, z: complex) -> float:
    """Limiting log-potential (1/n) ln <|det(zI - W)|^2> of an invariant
    ensemble with the given spectral law of W W*.

    Outside the eigenvalue support the potential is ln|z|^2 (or the law's
    log-moment near the origin); in between, it needs the unique nonnegative
    root t0 of int dw/(lam + t) = 1/(|z|^2 + t).
    """
    qr = abs(z)
    q2 = qr * qr
    if qr > law.m1:
        return math.log(q2)
    if qr == 0.0 or (math.isfinite(law.m_minus_1) and qr * law.m_minus_1 < 1.0):
        return law.log_moment()

    def g(t):
        return law.integrate(lambda lam: 1.0 / (lam + t)) - 1.0 / (q2 + t)

    lo = 1e-8
    for _ in range(8):
        if g(lo) > 0:
            break
        lo *= 1e-2
    else:
        raise ValueError("t0 not bracketed from below: law/moments inconsistent")
    hi = max(1.0, q2)
    for _ in range(80):
        if g(hi) < 0:
            break
        hi *= 2.0
    else:
        raise ValueError("t0 not bracketed from above: law/moments inconsistent")
    t0 = find_root_monotone(g, lo, hi, tol=1e-13)
    # ln|z|^2 leading term: the saddle point of the moment integral sits at
    # t = t0/|z|^2 and contributes -ln(1 + t0/|z|^2); it also makes the three
    # branches agree at their boundaries
    return math.log(q2) + law.integrate(lambda lam: np.log((lam + t0) / (q2 + t0)))


def _char_coeffs_from_roots(roots: np.ndarray) -> np.ndarray:
    """Ascending coefficients of prod_j (x + r_j) for each row of roots."""
    B, n = roots.shape
    coeffs = np.zeros((B, n + 1), dtype=roots.dtype)
    coeffs[:, 0] = 1.0
    for j in range(n):
        coeffs[:, 1:j + 2] = coeffs[:, 1:j + 2] * roots[:, j, None] + coeffs[:, 0:j + 1]
        coeffs[:, 0] = coeffs[:, 0] * roots[:, j]
    return coeffs


def ginibre_pn_mc(n: int, N: int, seed: int = 0, normalized: bool = True,
                  shards: int = 1):
    """Monte Carlo mean characteristic polynomial of W W* for Ginibre W.

    ``normalized=True`` scales entries to variance 1/n (the convention whose
    squared-singular-value law tends to Marchenko-Pastur on (0, 4)).
    Returns ``(Poly, stderr_per_coefficient)``.
    """
    scale = 1.0 / math.sqrt(n) if normalized else 1.0
    spec = sampling.ginibre(n)
    sizes = sampling._substream_sizes(N)
    cap = sampling._batch_cap(n)
    sums = np.zeros(n + 1)
    sqs = np.zeros(n + 1)
    for idx, todo in enumerate(sizes):
        rng = sampling.substream(seed, idx)
        left = todo
        while left > 0:
            nb = min(cap, left)
            W = scale * sampling.sample_batch(spec, rng, nb)
            lam = np.linalg.eigvalsh(W @ W.conj().transpose(0, 2, 1))
            coeffs = _char_coeffs_from_roots(lam)
            sums += coeffs.sum(axis=0)
            sqs += (coeffs ** 2).sum(axis=0)
            left -= nb
    mean = sums / N
    var = np.maximum(sqs / N - mean ** 2, 0.0)
    stderr = np.sqrt(var / N)
    return Poly.of(mean), stderr
