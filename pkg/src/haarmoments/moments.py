"""Closed-form moments of det[(AU+C)(BU+D)*] over the unitary group.

Positive integer moments reduce to an m x m determinant whose entries are
Beta-type integral transforms of the polynomial det(CD* + t AB*); negative
moments use the companion measure on [0, 1] and require the strict spectral
dominance AA* < CC*, BB* < DD*.  A fully exact path is provided for rational
inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .betadet import MeasureParams, norm_const
from .numerics import (
    HermSpectrum,
    Poly,
    RatComplex,
    adaptive_integrate,
    as_square,
    beta_rat,
    det_exact,
    gram_eigs,
)
from .schur import _elementary_all

__all__ = [
    "MomentQuery",
    "detpoly",
    "detpoly_exact",
    "moment_pos",
    "moment_pos_exact",
    "moment_neg",
    "moment_pos_z",
    "moment_neg_z",
    "invariant_ensemble_moment",
]

# refuse negative moments when the dominance margin is thinner than this
SPECTRAL_MARGIN = 1e-8


@dataclass(frozen=True)
class MomentQuery:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    m: int
    sign: str

    def __post_init__(self):
        for name in "ABCD":
            object.__setattr__(self, name, as_square(getattr(self, name)))
        n = self.A.shape[0]
        if any(getattr(self, k).shape[0] != n for k in "BCD"):
            raise ValueError("A, B, C, D must share one dimension")
        if self.m < 1:
            raise ValueError("moment order must be >= 1")
        if self.sign not in ("positive", "negative"):
            raise ValueError("sign must be 'positive' or 'negative'")
        if self.sign == "negative":
            if 2 * self.m > n:
                raise ValueError("negative moments need 2m <= n")
            _check_dominance(self.A, self.C, "AA* < CC*")
            _check_dominance(self.B, self.D, "BB* < DD*")

    @property
    def dim(self) -> int:
        return self.A.shape[0]


def _check_dominance(X, Y, label):
    gap = np.linalg.eigvalsh(Y @ Y.conj().T - X @ X.conj().T)
    if gap[0] <= SPECTRAL_MARGIN:
        raise ValueError(
            f"spectrum straddle: {label} fails with margin {gap[0]:.3e}; use regdet")


def _cheb_nodes01(k: int) -> np.ndarray:
    i = np.arange(k)
    return 0.5 * (1.0 + np.cos(math.pi * (2 * i + 1) / (2 * k)))


def detpoly(A, B, C, D) -> Poly:
    """Coefficients of det(CD* + t AB*), by sampling and interpolation."""
    A, B, C, D = (as_square(M) for M in (A, B, C, D))
    n = A.shape[0]
    ab = A @ B.conj().T
    cd = C @ D.conj().T
    ts = _cheb_nodes01(n + 1)
    vals = np.array([np.linalg.det(cd + t * ab) for t in ts])
    V = np.vander(ts, n + 1, increasing=True)
    coeffs = np.linalg.solve(V, vals)
    return Poly.of(coeffs, trim_rel=1e-12)


def detpoly_exact(A, B, C, D) -> list:
    """Exact coefficients of det(CD* + t AB*) for rational input matrices.

    Entries may be ints, Fractions, floats, complex or RatComplex; every
    representable value is converted exactly.
    """
    A, B, C, D = ([[RatComplex.of(v) for v in row] for row in M]
                  for M in (A, B, C, D))
    n = len(A)

    def mat_conj_t(M):
        return [[M[j][i].conjugate() for j in range(n)] for i in range(n)]

    def mat_mul(X, Y):
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = RatComplex(Fraction(0), Fraction(0))
                for k in range(n):
                    acc = acc + X[i][k] * Y[k][j]
                row.append(acc)
            out.append(row)
        return out

    ab = mat_mul(A, mat_conj_t(B))
    cd = mat_mul(C, mat_conj_t(D))
    vals = []
    for t in range(n + 1):
        tt = RatComplex(Fraction(t), Fraction(0))
        vals.append(det_exact([[cd[i][j] + tt * ab[i][j] for j in range(n)]
                               for i in range(n)]))
    # exact divided-difference (Newton) interpolation at t = 0..n
    coeffs_newton = list(vals)
    for level in range(1, n + 1):
        for i in range(n, level - 1, -1):
            diff = coeffs_newton[i] - coeffs_newton[i - 1]
            coeffs_newton[i] = diff / RatComplex(Fraction(level), Fraction(0))
    poly = [RatComplex(Fraction(0), Fraction(0))]
    for k in range(n, -1, -1):
        # poly <- poly * (t - k) + newton coefficient k
        shifted = [RatComplex(Fraction(0), Fraction(0))] + poly
        mk = RatComplex(Fraction(-k), Fraction(0))
        poly = [shifted[i] + (poly[i] * mk if i < len(poly) else
                              RatComplex(Fraction(0), Fraction(0)))
                for i in range(len(shifted))]
        poly[0] = poly[0] + coeffs_newton[k]
    while len(poly) > 1 and poly[-1].is_zero():
        poly.pop()
    return poly


def _pos_entry(coeffs, i, j, n, m):
    """Entry ij of the positive-moment determinant: a Beta-weighted sum."""
    acc = 0.0 + 0.0j
    for k, c in enumerate(coeffs):
        acc += c * float(beta_rat(k + i + j + 1, n + 2 * m - k - i - j - 1))
    return acc


def moment_pos(q: MomentQuery) -> complex:
    """Positive moment via the m x m determinant of Beta-transform entries."""
    if q.sign != "positive":
        raise ValueError("moment_pos needs sign='positive'")
    n, m = q.dim, q.m
    ab = q.A @ q.B.conj().T
    if not np.any(ab):
        # unit-mass measure: the integrand is the constant det(CD*)^m
        return complex(np.linalg.det(q.C @ q.D.conj().T) ** m)
    coeffs = detpoly(q.A, q.B, q.C, q.D).coeffs
    ent = np.array([[_pos_entry(coeffs, i, j, n, m) for j in range(m)]
                    for i in range(m)])
    pref = float(Fraction(math.factorial(m)) / norm_const(MeasureParams(n, m, "mu")))
    return complex(pref * np.linalg.det(ent))


def moment_pos_exact(A, B, C, D, m: int) -> RatComplex:
    """Exact positive moment for rational inputs."""
    coeffs = detpoly_exact(A, B, C, D)
    n = len(list(A))
    rows = []
    for i in range(m):
        row = []
        for j in range(m):
            acc = RatComplex(Fraction(0), Fraction(0))
            for k, c in enumerate(coeffs):
                b = beta_rat(k + i + j + 1, n + 2 * m - k - i - j - 1)
                acc = acc + c * RatComplex(b, Fraction(0))
            row.append(acc)
        rows.append(row)
    pref = Fraction(math.factorial(m)) / norm_const(MeasureParams(n, m, "mu"))
    d = det_exact(rows)
    return RatComplex(d.re * pref, d.im * pref)


def _neg_pole_screen(coeffs, margin: float = 1e-9):
    c = np.array([complex(v) for v in coeffs])
    if len(c) < 2:
        return
    roots = np.roots(c[::-1])
    for r in roots:
        if abs(r.imag) < 1e-7 and -margin <= r.real <= 1.0 + margin:
            raise ValueError(f"det(CD* - t AB*) vanishes near t = {r.real:.6g} in [0, 1]")


def moment_neg(q: MomentQuery, tol: float = 1e-11) -> complex:
    """Negative moment via adaptive quadrature of the reciprocal entries."""
    if q.sign != "negative":
        raise ValueError("moment_neg needs sign='negative'")
    n, m = q.dim, q.m
    ab = q.A @ q.B.conj().T
    cd = q.C @ q.D.conj().T
    if not np.any(ab):
        return complex(np.linalg.det(cd) ** (-m))
    qpoly = detpoly(q.A, -q.B, q.C, q.D)   # det(CD* - t AB*)
    _neg_pole_screen(qpoly.coeffs)
    ent = np.empty((m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            def fre(t):
                return ((1.0 - t) ** (n - 2 * m) * t ** (i + j) / qpoly(t)).real

            def fim(t):
                return ((1.0 - t) ** (n - 2 * m) * t ** (i + j) / qpoly(t)).imag

            re, _ = adaptive_integrate(fre, 0.0, 1.0, tol=tol)
            im, _ = adaptive_integrate(fim, 0.0, 1.0, tol=tol)
            ent[i, j] = re + 1j * im
    pref = float(Fraction(math.factorial(m)) / norm_const(MeasureParams(n, m, "nu")))
    return complex(pref * np.linalg.det(ent))


def _spectrum_of(A) -> HermSpectrum:
    return A if isinstance(A, HermSpectrum) else gram_eigs(A)


def moment_pos_z(A, z: complex, m: int = 1) -> complex:
    """Mean of |det(zI - AU)|^(2m) over Haar unitaries.

    For m = 1 this is the secular-coefficient sum
    sum_k e_k(spec) |z|^(2(n-k)) / binom(n, k); higher m goes through the
    general determinant formula.
    """
    if m == 1:
        spec = _spectrum_of(A)
        n = spec.dim
        e = _elementary_all(np.asarray(spec.eigs, dtype=complex), n).real
        q2 = abs(z) ** 2
        return complex(sum(e[k] * q2 ** (n - k) / math.comb(n, k)
                           for k in range(n + 1)))
    A = as_square(A)
    zI = z * np.eye(A.shape[0])
    return moment_pos(MomentQuery(-A, -A, zI, zI, m, "positive"))


def moment_neg_z(A, z: complex, tol: float = 1e-12) -> complex:
    """Mean of 1/|det(zI - AU)|^2; only valid off the Gram spectrum.

    Picks the branch by comparing |z|^2 with the extreme eigenvalues of AA*
    and refuses points in between (those need the regularized evaluator).
    """
    spec = _spectrum_of(A)
    n = spec.dim
    if n < 2:
        raise ValueError("needs dimension >= 2")
    q2 = abs(z) ** 2
    lo, hi = spec.eigs[0], spec.eigs[-1]
    eigs = np.asarray(spec.eigs)
    if q2 < lo - SPECTRAL_MARGIN:
        def f(t):
            return (n - 1) * (1.0 - t) ** (n - 2) / np.prod(
                eigs[:, None] - np.atleast_1d(t)[None, :] * q2, axis=0)
    elif q2 > hi + SPECTRAL_MARGIN:
        def f(t):
            return (n - 1) * (1.0 - t) ** (n - 2) / np.prod(
                q2 - np.atleast_1d(t)[None, :] * eigs[:, None], axis=0)
    else:
        raise ValueError("spectrum straddle: |z|^2 inside [min, max] of AA*; use regdet")
    val, _ = adaptive_integrate(lambda t: f(np.atleast_1d(t)), 0.0, 1.0, tol=tol)
    return complex(val)


def invariant_ensemble_moment(pn: Poly, z: complex, n: int) -> complex:
    """Second moment of the spectral determinant of a unitarily invariant
    ensemble, from the mean characteristic polynomial of W W*.

    Computes (n+1) * sum_k c_k |z|^(2k) B(k+1, n+1-k) for
    pn(x) = sum_k c_k x^k, which is the Beta-integral transform of
    pn(|z|^2 t) against (1+t)^(-n-2).
    """
    if pn.degree > n:
        raise ValueError("pn must have degree <= n")
    q2 = abs(z) ** 2
    acc = 0.0 + 0.0j
    for k, c in enumerate(pn.coeffs):
        acc += c * q2 ** k * (n + 1) * float(beta_rat(k + 1, n + 1 - k))
    return complex(acc)
