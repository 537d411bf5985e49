"""Haar-group integrals of exp(tr(AU + U*B*)) via Bessel-kernel determinants."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numerics import beta_rat, quad_rule
from .schur import _as_partition, dim_u

__all__ = [
    "BesselSpec",
    "i0_series",
    "j0",
    "fn_rank1",
    "fn_rank1_quad",
    "fn_general",
    "exp_trace_schur_coeff",
]

_SERIES_TOL = 1e-16
_Z2_GAP = 1e-4


def i0_series(x) -> complex:
    """Entire series sum_j x^j / (j!)^2, i.e. I_0(2 sqrt(x))."""
    x = complex(x)
    term = 1.0 + 0.0j
    acc = term
    for j in range(1, 400):
        term *= x / (j * j)
        acc += term
        if abs(term) <= _SERIES_TOL * max(1.0, abs(acc)):
            return acc
    raise ArithmeticError("series did not converge in 400 terms")


def j0(x: float) -> float:
    """Bessel J_0 on the real line, |J_0| <= 1.

    The alternating kernel series loses all float64 digits past |x| ~ 15,
    so larger arguments are delegated to scipy's J_0.
    """
    if abs(x) <= 12.0:
        v = i0_series(-(x * x) / 4.0).real
    else:
        from scipy.special import j0 as _sp_j0

        v = float(_sp_j0(x))
    if abs(v) > 1.0 + 1e-9:
        raise ArithmeticError(f"J0({x}) = {v} violates the unit bound")
    return v


@dataclass(frozen=True)
class BesselSpec:
    """Distinct nonzero eigenvalues of AB* plus the group dimension."""

    z2: tuple
    n: int

    def __post_init__(self):
        m = len(self.z2)
        if 2 * m > self.n:
            raise ValueError("needs 2m <= n")
        scale = max(abs(v) for v in self.z2) if self.z2 else 1.0
        for i in range(m):
            for j in range(i + 1, m):
                if abs(self.z2[i] - self.z2[j]) < _Z2_GAP * max(1.0, scale):
                    raise ValueError("eigenvalues of AB* too close together")


def fn_rank1(z2, n: int) -> complex:
    """Group integral for rank-one AB* with nonzero eigenvalue z^2.

    Termwise Beta integration of the kernel series:
    sum_j z^(2j)/(j!)^2 * (n-1) B(j+1, n-1).
    """
    if n < 2:
        raise ValueError("needs n >= 2")
    z2 = complex(z2)
    if z2 == 0:
        return 1.0 + 0.0j   # Haar normalization: the integral of 1 is 1
    acc = 0.0 + 0.0j
    term = 1.0 + 0.0j   # z^(2j) / (j!)^2
    for j in range(0, 400):
        if j > 0:
            term *= z2 / (j * j)
        contrib = term * (n - 1) * float(beta_rat(j + 1, n - 1))
        acc += contrib
        if j > 2 and abs(contrib) <= _SERIES_TOL * max(1.0, abs(acc)):
            return acc
    raise ArithmeticError("series did not converge in 400 terms")


def fn_rank1_quad(z2, n: int, nodes: int = 48) -> complex:
    """Quadrature route for the rank-one integral (path cross-check)."""
    rule = quad_rule("jacobi", nodes, alpha=float(n - 2))
    vals = np.array([i0_series(t * z2) for t in rule.nodes])
    return complex((n - 1) * np.sum(rule.weights * vals))


def fn_general(spec: BesselSpec, nodes: int = 32) -> complex:
    """Determinantal form for AB* of rank m with distinct eigenvalues.

    Tensorized Gauss-Jacobi on the entire-function integrand
    det(I_0(2 sqrt(t_i z_j^2))) / Vandermonde(z^2) * prod t_i^(m-i),
    against the per-axis weight (1 - t)^(n - 2m).
    """
    m = len(spec.z2)
    n = spec.n
    if m == 0:
        return 1.0 + 0.0j
    if m == 1:
        return fn_rank1(spec.z2[0], n)
    rule = quad_rule("jacobi", nodes, alpha=float(n - 2 * m))
    t = rule.nodes
    w = rule.weights
    K = len(t)
    G = np.empty((K, m), dtype=complex)
    for a in range(K):
        for b in range(m):
            G[a, b] = i0_series(t[a] * spec.z2[b])
    idx_tuples = list(itertools.product(range(K), repeat=m))
    stacks = np.array([G[list(tup), :] for tup in idx_tuples])
    dets = np.linalg.det(stacks)
    weights = np.array([np.prod(w[list(tup)]) * np.prod(
        [t[tup[i]] ** (m - 1 - i) for i in range(m)]) for tup in idx_tuples])
    integral = complex(np.sum(weights * dets))
    vand = 1.0 + 0.0j
    for i in range(m):
        for j in range(i + 1, m):
            vand *= spec.z2[i] - spec.z2[j]
    pref = 1.0
    for j in range(1, m + 1):
        pref *= math.factorial(n - j) / math.factorial(n - m - j)
    return pref * integral / vand


def exp_trace_schur_coeff(lam, m: int, via: str = "det") -> Fraction:
    """Coefficient of s_lambda in the Schur expansion of exp(tr).

    ``via='det'`` evaluates det(1/(lam_j - j + i)!); ``via='product'`` uses
    s_lambda(1_m) prod (m-j)!/(m + lam_j - j)!.  Both must agree.
    """
    lam = _as_partition(lam)
    if lam.length > m:
        raise ValueError("need l(lam) <= m")
    if via == "product":
        out = Fraction(dim_u(lam, m))
        for j in range(1, m + 1):
            out *= Fraction(math.factorial(m - j),
                            math.factorial(m + lam.part(j) - j))
        return out
    if via != "det":
        raise ValueError("via must be 'det' or 'product'")
    rows = []
    for i in range(1, m + 1):
        row = []
        for j in range(1, m + 1):
            v = lam.part(j) - j + i
            row.append(Fraction(0) if v < 0 else Fraction(1, math.factorial(v)))
        rows.append(row)
    # exact determinant over Fractions
    from .betadet import _det_fraction

    return _det_fraction(rows)
