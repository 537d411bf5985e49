"""Dense complex linear algebra, exact rationals, quadrature and root finding.

Everything here is a pure function of its inputs.  Matrices are plain numpy
arrays (complex128); exact arithmetic uses :class:`fractions.Fraction` and a
small Gaussian-rational helper for complex entries.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

__all__ = [
    "BigRat",
    "RatComplex",
    "HermSpectrum",
    "Poly",
    "QuadratureRule",
    "IntegrationError",
    "det",
    "det_exact",
    "gram_eigs",
    "quad_rule",
    "adaptive_integrate",
    "find_root_monotone",
    "beta_rat",
]

BigRat = Fraction

# eigenvalues of A A* in (-clamp, 0) are treated as exact zeros
_EIG_CLAMP = 1e-12


def as_square(M) -> np.ndarray:
    """Validate and return M as a square complex128 array."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A.real)) or not np.all(np.isfinite(A.imag)):
        raise ValueError("matrix has non-finite entries")
    return A


def det(M) -> complex:
    """Determinant of a square complex matrix (pivoted LU via LAPACK)."""
    return complex(np.linalg.det(as_square(M)))


@dataclass(frozen=True)
class RatComplex:
    """Exact complex number with rational real and imaginary parts."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(value) -> "RatComplex":
        if isinstance(value, RatComplex):
            return value
        if isinstance(value, complex):
            return RatComplex(Fraction(value.real), Fraction(value.imag))
        return RatComplex(Fraction(value), Fraction(0))

    def __add__(self, other: "RatComplex") -> "RatComplex":
        return RatComplex(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "RatComplex") -> "RatComplex":
        return RatComplex(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "RatComplex") -> "RatComplex":
        return RatComplex(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "RatComplex") -> "RatComplex":
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by exact zero")
        return RatComplex(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def __neg__(self) -> "RatComplex":
        return RatComplex(-self.re, -self.im)

    def conjugate(self) -> "RatComplex":
        return RatComplex(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))


RC_ZERO = RatComplex(Fraction(0), Fraction(0))
RC_ONE = RatComplex(Fraction(1), Fraction(0))


def det_exact(rows) -> RatComplex:
    """Exact determinant of a square matrix of RatComplex entries.

    Plain Gaussian elimination; division by a rational pivot is exact, so no
    fraction-free tricks are needed.
    """
    a = [[RatComplex.of(v) for v in row] for row in rows]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix must be square")
    sign = 1
    out = RC_ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if piv is None:
            return RC_ZERO
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        p = a[col][col]
        out = out * p
        for r in range(col + 1, n):
            factor = a[r][col] / p
            if factor.is_zero():
                continue
            for c in range(col, n):
                a[r][c] = a[r][c] - factor * a[col][c]
    if sign < 0:
        out = -out
    return out


@dataclass(frozen=True)
class HermSpectrum:
    """Sorted nonnegative eigenvalues of a Gram matrix A A*."""

    dim: int
    eigs: tuple

    def __post_init__(self):
        if len(self.eigs) != self.dim:
            raise ValueError("spectrum length does not match dim")
        if any(e < 0 for e in self.eigs):
            raise ValueError("negative eigenvalue in Gram spectrum")
        if any(self.eigs[i] > self.eigs[i + 1] for i in range(self.dim - 1)):
            raise ValueError("eigenvalues must be ascending")

    @staticmethod
    def of(eigs) -> "HermSpectrum":
        vals = tuple(sorted(float(e) for e in eigs))
        return HermSpectrum(len(vals), vals)


def gram_eigs(A) -> HermSpectrum:
    """Eigenvalues of A A*, ascending, clamped to be nonnegative.

    The Gram matrix is formed explicitly and passed to a Hermitian
    eigensolver; the precision loss from squaring is acceptable at the
    dimensions used here and is cross-checked against an SVD in the tests.
    """
    A = as_square(A)
    G = A @ A.conj().T
    w = np.linalg.eigvalsh(G)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    tol = _EIG_CLAMP * scale
    if np.any(w < -tol):
        raise ArithmeticError(
            f"Gram eigenvalue {w.min():.3e} below clamp tolerance -{tol:.1e}"
        )
    w = np.where(w < 0, 0.0, w)
    return HermSpectrum(A.shape[0], tuple(float(x) for x in w))


@dataclass(frozen=True)
class Poly:
    """Polynomial with coefficients in ascending degree order."""

    coeffs: tuple

    @staticmethod
    def of(coeffs, trim_rel: float = 0.0) -> "Poly":
        cs = [complex(c) for c in coeffs]
        if trim_rel > 0 and cs:
            scale = max(abs(c) for c in cs)
            if scale > 0:
                while len(cs) > 1 and abs(cs[-1]) <= trim_rel * scale:
                    cs.pop()
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [0j]
        return Poly(tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t):
        acc = np.zeros_like(np.asarray(t, dtype=complex))
        for c in reversed(self.coeffs):
            acc = acc * t + c
        if np.ndim(t) == 0:
            return complex(acc)
        return acc

    def deriv(self) -> "Poly":
        if self.degree == 0:
            return Poly.of([0.0])
        return Poly.of([k * c for k, c in enumerate(self.coeffs)][1:])


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights on [0, 1] for a tagged weight function."""

    nodes: np.ndarray
    weights: np.ndarray
    kind: str

    def integrate(self, f) -> float:
        vals = np.asarray(f(self.nodes))
        return float(np.real(np.sum(self.weights * vals)))

    def integrate_complex(self, f) -> complex:
        vals = np.asarray(f(self.nodes))
        return complex(np.sum(self.weights * vals))


def quad_rule(kind: str, K: int, alpha: float | None = None) -> QuadratureRule:
    """Gauss rule with K nodes on [0, 1].

    ``legendre01``  -- weight 1; exact for polynomials of degree <= 2K-1.
    ``jacobi``      -- weight (1-t)**alpha, alpha > -1; exact against that
    weight for degree <= 2K-1.
    """
    if K < 1:
        raise ValueError("node count must be >= 1")
    if kind == "legendre01":
        x, w = leggauss(K)
        return QuadratureRule((x + 1.0) / 2.0, w / 2.0, "legendre01")
    if kind == "jacobi":
        if alpha is None or alpha <= -1:
            raise ValueError("jacobi rule needs alpha > -1")
        x, w = roots_jacobi(K, alpha, 0.0)
        # map [-1,1] with weight (1-x)^alpha onto [0,1] with weight (1-t)^alpha
        return QuadratureRule((x + 1.0) / 2.0, w * 0.5 ** (alpha + 1.0), f"jacobi({alpha})")
    raise ValueError(f"unknown rule kind {kind!r}")


class IntegrationError(RuntimeError):
    """Adaptive integration hit its subdivision cap.

    Carries the best value and error estimate obtained so far.
    """

    def __init__(self, message, value, err_estimate):
        super().__init__(message)
        self.value = value
        self.err_estimate = err_estimate


_GL_LO = leggauss(10)
_GL_HI = leggauss(21)


def _eval_vec(f, x: np.ndarray) -> np.ndarray:
    y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.array([float(f(t)) for t in x])
    return y


def _panel(f, a: float, b: float):
    h = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    y_lo = _eval_vec(f, mid + h * _GL_LO[0])
    y_hi = _eval_vec(f, mid + h * _GL_HI[0])
    i_lo = h * float(np.dot(_GL_LO[1], y_lo))
    i_hi = h * float(np.dot(_GL_HI[1], y_hi))
    return i_hi, abs(i_hi - i_lo)


def adaptive_integrate(f, a: float, b: float, tol: float = 1e-10,
                       max_intervals: int = 10**6):
    """Integrate f on [a, b] by adaptive bisection with nested Gauss panels.

    Returns ``(value, err_estimate)`` with the estimate targeted at or below
    ``tol`` (absolute).  Raises :class:`IntegrationError` carrying the partial
    result if the subdivision cap is reached first.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if a == b:
        return 0.0, 0.0
    span = abs(b - a)
    val, err = _panel(f, a, b)
    heap = [(-err, 0, a, b, val)]
    frozen_val = 0.0
    frozen_err = 0.0
    total_val, total_err = val, err
    n_intervals = 1
    counter = 1
    while heap and total_err + frozen_err > tol:
        if n_intervals >= max_intervals:
            raise IntegrationError(
                f"subdivision cap {max_intervals} reached",
                total_val + frozen_val, total_err + frozen_err,
            )
        neg_e, _, lo, hi, v = heapq.heappop(heap)
        total_val -= v
        total_err += neg_e
        mid = 0.5 * (lo + hi)
        if hi - lo < 5e-16 * span or mid <= lo or mid >= hi:
            # cannot refine further in float64; freeze this panel
            frozen_val += v
            frozen_err += -neg_e
            continue
        for (x0, x1) in ((lo, mid), (mid, hi)):
            v2, e2 = _panel(f, x0, x1)
            total_val += v2
            total_err += e2
            heapq.heappush(heap, (-e2, counter, x0, x1, v2))
            counter += 1
        n_intervals += 1
    value = total_val + frozen_val
    err = total_err + frozen_err
    if err > tol:
        raise IntegrationError(
            "unresolvable panels leave error above tol", value, err)
    return value, err


def find_root_monotone(g, lo: float, hi: float, tol: float = 1e-12,
                       max_iter: int = 200) -> float:
    """Root of a continuous monotone g on [lo, hi] by bisection/secant.

    Returns t with ``|g(t)| <= tol``.  Raises ValueError when the interval
    does not bracket a sign change.
    """
    ga = float(g(lo))
    gb = float(g(hi))
    if abs(ga) <= tol:
        return lo
    if abs(gb) <= tol:
        return hi
    if math.copysign(1.0, ga) == math.copysign(1.0, gb):
        raise ValueError("g(lo) and g(hi) have the same sign: no bracketed root")
    a, b = float(lo), float(hi)
    best_x, best_g = (a, ga) if abs(ga) < abs(gb) else (b, gb)
    for _ in range(max_iter):
        if gb != ga:
            x = b - gb * (b - a) / (gb - ga)
        else:
            x = 0.5 * (a + b)
        width = b - a
        if not (a + 0.1 * width < x < b - 0.1 * width):
            x = 0.5 * (a + b)
        gx = float(g(x))
        if abs(gx) < abs(best_g):
            best_x, best_g = x, gx
        if abs(gx) <= tol:
            return x
        if math.copysign(1.0, gx) == math.copysign(1.0, ga):
            a, ga = x, gx
        else:
            b, gb = x, gx
        if b - a <= 1e-16 * max(1.0, abs(a), abs(b)):
            return best_x
    raise ArithmeticError(f"root not located to |g| <= {tol} in {max_iter} iterations")


def beta_rat(p: int, q: int) -> Fraction:
    """Exact Beta function at positive integer arguments."""
    if p < 1 or q < 1:
        raise ValueError("beta_rat needs integer arguments >= 1")
    return Fraction(math.factorial(p - 1) * math.factorial(q - 1),
                    math.factorial(p + q - 1))
