"""Exact Beta-determinant identities behind the moment formulas.

All checks in this module are exact: both sides are computed in arbitrary
precision rationals and compared for equality, with the lone exception of
``quadrature_vs_exact`` which exercises the floating-point integration path
against the exact value.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numerics import beta_rat, quad_rule
from .report import VerificationReport, make_exact_report, make_report
from .schur import Partition, _as_partition, dim_u, dim_u_conj, schur_eval

__all__ = [
    "MeasureParams",
    "norm_const",
    "prop1_check",
    "lemma1_check",
    "lemma1_exact_sides",
    "factorial_det_check",
    "quadrature_vs_exact",
    "lemma1_cases",
]


@dataclass(frozen=True)
class MeasureParams:
    """Parameters of the two determinantal reference measures.

    ``mu`` lives on [0, inf)^m with weight prod (1+t_j)^(-n-2m);
    ``nu`` lives on [0, 1]^m with weight prod (1-t_j)^(n-2m) and needs
    n >= 2m.
    """

    n: int
    m: int
    kind: str

    def __post_init__(self):
        if self.kind not in ("mu", "nu"):
            raise ValueError("kind must be 'mu' or 'nu'")
        if self.m < 1 or self.n < 0:
            raise ValueError("need m >= 1 and n >= 0")
        if self.kind == "nu" and self.n < 2 * self.m:
            raise ValueError("nu measure needs n >= 2m")


def norm_const(p: MeasureParams) -> Fraction:
    """Exact normalization constant of the measure."""
    out = Fraction(1)
    for j in range(p.m):
        if p.kind == "mu":
            out *= Fraction(
                math.factorial(j) * math.factorial(j + 1) * math.factorial(p.n + j),
                math.factorial(p.n + p.m + j))
        else:
            out *= Fraction(
                math.factorial(j) * math.factorial(j + 1)
                * math.factorial(p.n - p.m - j - 1),
                math.factorial(p.n - j - 1))
    return out


def _det_fraction(rows) -> Fraction:
    a = [[Fraction(v) for v in row] for row in rows]
    n = len(a)
    sign = 1
    out = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        p = a[col][col]
        out *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f == 0:
                continue
            for c in range(col, n):
                a[r][c] -= f * a[col][c]
    return out * sign


def prop1_check(p, q) -> VerificationReport:
    """Exact equality of the two Beta determinants det B(p_j - i, q_j + i)
    and det B(p_j - i, q_j + 1), i, j = 1..m."""
    p = [int(v) for v in p]
    q = [int(v) for v in q]
    m = len(p)
    if len(q) != m:
        raise ValueError("p and q must have equal length")
    if any(pj <= m for pj in p):
        raise ValueError("need p_j > m")
    if any(qj <= -1 for qj in q):
        raise ValueError("need q_j > -1")
    lhs = _det_fraction([[beta_rat(p[j] - i, q[j] + i) for j in range(m)]
                         for i in range(1, m + 1)])
    rhs = _det_fraction([[beta_rat(p[j] - i, q[j] + 1) for j in range(m)]
                         for i in range(1, m + 1)])
    return make_exact_report("beta_det_column_identity",
                             {"p": p, "q": q, "m": m}, lhs, rhs)


def _lemma1_rhs_exact(lam: Partition, m: int, n: int, kind: str) -> Fraction:
    f = [m + lam.part(j) - j for j in range(1, m + 1)]
    pref = Fraction(1)
    for j in range(m):
        if kind == "a":
            pref *= Fraction(math.factorial(n + m + j),
                             math.factorial(j) ** 2 * math.factorial(n + j))
        else:
            pref *= Fraction(math.factorial(n - j - 1),
                             math.factorial(j) ** 2 * math.factorial(n - m - j - 1))
    if kind == "a":
        mat = [[beta_rat(f[j] + m - i + 1, n + m - f[j]) for j in range(m)]
               for i in range(1, m + 1)]
    else:
        mat = [[beta_rat(f[j] + m - i + 1, n - 2 * m + 1) for j in range(m)]
               for i in range(1, m + 1)]
    return pref * _det_fraction(mat)


def lemma1_exact_sides(lam, m: int, n: int, kind: str):
    """Both sides of the multivariate moment identity, as exact rationals.

    kind 'a': s_lam(1_m)^2 / s_{lam'}(1_n) against the mu-measure integral of
    s_lam; kind 'b': s_lam(1_m)^2 / s_lam(1_n) against the nu-measure one.
    The integral side is evaluated through its Beta-determinant reduction,
    which is exact and O(m^3).
    """
    lam = _as_partition(lam)
    if kind not in ("a", "b"):
        raise ValueError("kind must be 'a' or 'b'")
    if lam.length > m:
        raise ValueError("need l(lam) <= m")
    if kind == "a" and lam.parts and lam.parts[0] > n:
        raise ValueError("kind 'a' needs lam_1 <= n")
    if kind == "b" and n < 2 * m:
        raise ValueError("kind 'b' needs n >= 2m")
    num = Fraction(dim_u(lam, m)) ** 2
    den = dim_u_conj(lam, n) if kind == "a" else dim_u(lam, n)
    lhs = num / den
    rhs = _lemma1_rhs_exact(lam, m, n, kind)
    return lhs, rhs


def lemma1_check(lam, m: int, n: int, kind: str) -> VerificationReport:
    lam = _as_partition(lam)
    lhs, rhs = lemma1_exact_sides(lam, m, n, kind)
    return make_exact_report(f"schur_moment_identity_{kind}",
                             {"lam": list(lam.parts), "m": m, "n": n}, lhs, rhs)


def factorial_det_check(f) -> VerificationReport:
    """Exact equality f_1! ... f_m! Vandermonde(f) = det((f_j + m - i)!)."""
    f = [int(v) for v in f]
    m = len(f)
    if any(f[i] <= f[i + 1] for i in range(m - 1)) or f[-1] < 0:
        raise ValueError("need strictly decreasing nonnegative integers")
    vand = Fraction(1)
    for i in range(m):
        for j in range(i + 1, m):
            vand *= f[i] - f[j]
    lhs = vand
    for v in f:
        lhs *= math.factorial(v)
    rhs = _det_fraction([[math.factorial(f[j] + m - i) for j in range(m)]
                         for i in range(1, m + 1)])
    return make_exact_report("factorial_determinant", {"f": f, "m": m}, lhs, rhs)


def quadrature_vs_exact(lam, m: int, n: int, kind: str,
                        tolerance: float = 1e-9) -> VerificationReport:
    """Evaluate the m-fold integral side by tensorized Gauss rules.

    The integrand s_lam * Vandermonde^2 is polynomial, so the rules are exact
    in exact arithmetic; the check compares the float quadrature against the
    exact rational value within ``tolerance`` (relative).
    """
    lam = _as_partition(lam)
    _, rhs_exact = lemma1_exact_sides(lam, m, n, kind)
    deg_per_axis = (lam.parts[0] if lam.parts else 0) + 2 * (m - 1)
    K = deg_per_axis // 2 + 2
    if kind == "a":
        # map [0,inf) -> [0,1) by t = u/(1-u); per-axis integrand becomes
        # t^p (1+t)^(-n-2m) dt = u^p (1-u)^(n+2m-p-2) du, a polynomial
        rule = quad_rule("legendre01", K + (n + 2 * m) // 2 + 2)
        u = rule.nodes
        t = u / (1.0 - u)
        axis_w = rule.weights * (1.0 - u) ** (n + 2 * m - 2)
    else:
        rule = quad_rule("jacobi", K, alpha=float(n - 2 * m))
        t = rule.nodes
        axis_w = rule.weights
    pref = 1.0 / float(norm_const(MeasureParams(n, m, "mu" if kind == "a" else "nu")))
    total = 0.0
    for idx in itertools.product(range(len(t)), repeat=m):
        ts = t[list(idx)]
        wprod = float(np.prod(axis_w[list(idx)]))
        vand = 1.0
        for i in range(m):
            for j in range(i + 1, m):
                vand *= ts[i] - ts[j]
        total += wprod * vand * vand * schur_eval(lam, ts).real
    lhs = pref * total
    return make_report(
        f"schur_moment_quadrature_{kind}",
        {"lam": list(lam.parts), "m": m, "n": n, "nodes": len(t)},
        lhs, float(rhs_exact),
        tolerance=tolerance * max(1.0, abs(float(rhs_exact))))


def lemma1_cases(max_weight: int, max_m: int, max_n: int):
    """All admissible (lam, m, n, kind) tuples at desk scale."""
    from .schur import partitions_up_to

    for lam in partitions_up_to(max_weight):
        for m in range(max(1, lam.length), max_m + 1):
            for n in range(0, max_n + 1):
                if not lam.parts or lam.parts[0] <= n:
                    yield lam, m, n, "a"
                if n >= 2 * m:
                    yield lam, m, n, "b"
