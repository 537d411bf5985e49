"""Partitions, Schur functions, unitary-group dimensions and related identities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import sampling
from .report import VerificationReport, make_report

__all__ = [
    "Partition",
    "conjugate",
    "partitions_of_weight",
    "partitions_up_to",
    "hr_er",
    "schur_eval",
    "dim_u",
    "dim_u_conj",
    "cauchy_check",
    "orthogonality_check",
    "lagrange_weights",
]

# below this relative argument separation the bialternant is 0/0; switch
# to Jacobi-Trudi, which is stable for the small weights used here
CONFLUENT_THRESHOLD = 1e-6


@dataclass(frozen=True)
class Partition:
    parts: tuple

    @staticmethod
    def of(parts) -> "Partition":
        ps = [int(p) for p in parts if int(p) != 0]
        if any(p < 0 for p in ps):
            raise ValueError("parts must be nonnegative")
        if any(ps[i] < ps[i + 1] for i in range(len(ps) - 1)):
            raise ValueError("parts must be weakly decreasing")
        return Partition(tuple(ps))

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def part(self, j: int) -> int:
        """parts[j] with the trailing-zeros convention (1-indexed)."""
        return self.parts[j - 1] if j <= len(self.parts) else 0


def _as_partition(lam) -> Partition:
    return lam if isinstance(lam, Partition) else Partition.of(lam)


def conjugate(lam) -> Partition:
    """Transpose of the Young diagram."""
    lam = _as_partition(lam)
    if not lam.parts:
        return lam
    cols = [0] * lam.parts[0]
    for p in lam.parts:
        for i in range(p):
            cols[i] += 1
    return Partition(tuple(cols))


def partitions_of_weight(w: int, max_len: int | None = None,
                         max_part: int | None = None):
    """Partitions of weight w in reverse-lexicographic order."""
    if w < 0:
        return
    first = w if max_part is None else min(w, max_part)

    def rec(rem, cap, length):
        if rem == 0:
            yield ()
            return
        if max_len is not None and length >= max_len:
            return
        for p in range(min(cap, rem), 0, -1):
            for tail in rec(rem - p, p, length + 1):
                yield (p,) + tail

    if w == 0:
        yield Partition(())
        return
    for parts in rec(w, first, 0):
        yield Partition(parts)


def partitions_up_to(max_weight: int, max_len: int | None = None,
                     max_part: int | None = None):
    for w in range(max_weight + 1):
        yield from partitions_of_weight(w, max_len, max_part)


def _elementary_all(x: np.ndarray, rmax: int) -> np.ndarray:
    """e_0..e_rmax of the arguments, by expanding prod(1 + t x_i)."""
    e = np.zeros(rmax + 1, dtype=complex)
    e[0] = 1.0
    top = 0
    for xi in x:
        top = min(top + 1, rmax)
        e[1:top + 1] = e[1:top + 1] + xi * e[0:top]
    return e


def _complete_all(x: np.ndarray, rmax: int) -> np.ndarray:
    """h_0..h_rmax via the e-h convolution identity."""
    n = len(x)
    e = _elementary_all(x, min(n, rmax))
    h = np.zeros(rmax + 1, dtype=complex)
    h[0] = 1.0
    for k in range(1, rmax + 1):
        acc = 0.0 + 0.0j
        for i in range(1, min(k, n) + 1):
            acc += (-1) ** (i - 1) * e[i] * h[k - i]
        h[k] = acc
    return h


def hr_er(x, r: int):
    """(h_r, e_r) of the argument list; both are 0 for r < 0."""
    if r < 0:
        return 0.0 + 0.0j, 0.0 + 0.0j
    x = np.asarray(list(x), dtype=complex)
    h = _complete_all(x, r)[r]
    e = _elementary_all(x, r)[r] if r <= len(x) else 0.0 + 0.0j
    return complex(h), complex(e)


def _schur_jacobi_trudi(lam: Partition, x: np.ndarray) -> complex:
    l = lam.length
    if l == 0:
        return 1.0 + 0.0j
    rmax = lam.parts[0] + l - 1
    h = _complete_all(x, rmax)

    def h_at(r):
        return h[r] if 0 <= r <= rmax else 0.0 + 0.0j

    M = np.array([[h_at(lam.parts[i] - (i + 1) + (j + 1)) for j in range(l)]
                  for i in range(l)], dtype=complex)
    return complex(np.linalg.det(M))


def _schur_bialternant(lam: Partition, x: np.ndarray) -> complex:
    n = len(x)
    powers = np.array([lam.part(j) + n - j for j in range(1, n + 1)])
    num = np.linalg.det(x[:, None] ** powers[None, :])
    den = 1.0 + 0.0j
    for i in range(n):
        for j in range(i + 1, n):
            den *= x[i] - x[j]
    return complex(num / den)


def schur_eval(lam, x) -> complex:
    """Schur polynomial of the given arguments.

    Uses the bialternant ratio for well-separated arguments and the
    Jacobi-Trudi determinant of complete symmetric functions otherwise.
    Returns 0 when the partition is longer than the argument list.
    """
    lam = _as_partition(lam)
    x = np.asarray(list(x), dtype=complex)
    n = len(x)
    if lam.length > n:
        return 0.0 + 0.0j
    if lam.length == 0:
        return 1.0 + 0.0j
    if n == 1:
        return complex(x[0] ** lam.parts[0])
    scale = float(np.max(np.abs(x)))
    if scale == 0.0:
        return 0.0 + 0.0j
    min_gap = min(abs(x[i] - x[j]) for i in range(n) for j in range(i + 1, n))
    if min_gap < CONFLUENT_THRESHOLD * scale:
        return _schur_jacobi_trudi(lam, x)
    return _schur_bialternant(lam, x)


def dim_u(lam, n: int) -> int:
    """Exact s_lambda(1_n): dimension of the U(n) irrep with that signature."""
    lam = _as_partition(lam)
    if lam.length > n:
        return 0
    if lam.length == 0:
        return 1
    m = lam.length
    out = Fraction(1)
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            out *= lam.part(i) - i - lam.part(j) + j
    for j in range(1, m + 1):
        lj = lam.part(j)
        out *= Fraction(math.factorial(n + lj - j),
                        math.factorial(m + lj - j) * math.factorial(n - j))
    assert out.denominator == 1
    return int(out)


def dim_u_conj(lam, n: int) -> int:
    """Exact s_{lambda'}(1_n), via the conjugate product formula."""
    lam = _as_partition(lam)
    if lam.parts and lam.parts[0] > n:
        return 0
    if lam.length == 0:
        return 1
    m = lam.length
    out = Fraction(1)
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            out *= lam.part(i) - i - lam.part(j) + j
    for j in range(1, m + 1):
        lj = lam.part(j)
        out *= Fraction(math.factorial(n + j - 1),
                        math.factorial(n + j - 1 - lj) * math.factorial(m + lj - j))
    assert out.denominator == 1
    return int(out)


def _spectral_norm(X: np.ndarray) -> float:
    return float(np.linalg.norm(X, 2))


def cauchy_check(t, X, kind: str = "poly", weight_cutoff: int = 30,
                 tolerance: float = 1e-9) -> VerificationReport:
    """Compare a product of determinants with its Schur-sum expansion.

    ``kind='poly'``    : prod det(I + t_i X)  against the finite dual sum.
    ``kind='inverse'`` : prod det(I - t_i X)^-1 against the (truncated)
    direct sum; requires max|t_i| * ||X|| < 1 for convergence.
    """
    t = np.asarray(list(t), dtype=complex)
    X = np.asarray(X, dtype=complex)
    n = X.shape[0]
    m = len(t)
    xe = np.linalg.eigvals(X)
    if kind == "poly":
        lhs = np.prod([np.linalg.det(np.eye(n) + ti * X) for ti in t])
        rhs = 0.0 + 0.0j
        for lam in partitions_up_to(m * n, max_len=m, max_part=n):
            rhs += schur_eval(lam, t) * schur_eval(conjugate(lam), xe)
    elif kind == "inverse":
        r = float(np.max(np.abs(t))) * _spectral_norm(X) if m else 0.0
        if r >= 1.0:
            raise ValueError("series diverges: need max|t_i| * specnorm(X) < 1")
        lhs = np.prod([1.0 / np.linalg.det(np.eye(n) - ti * X) for ti in t])
        rhs = 0.0 + 0.0j
        for lam in partitions_up_to(weight_cutoff, max_len=min(m, n)):
            rhs += schur_eval(lam, t) * schur_eval(lam, xe)
    else:
        raise ValueError("kind must be 'poly' or 'inverse'")
    return make_report(
        f"cauchy_{kind}", {"m": m, "n": n, "weight_cutoff": weight_cutoff},
        lhs, rhs, tolerance)


def orthogonality_check(lam, mu, A, B, N: int, seed: int = 0,
                        shards: int = 1) -> VerificationReport:
    """Monte Carlo test of character orthogonality over the unitary group.

    Compares the Haar average of s_lam(AU) conj(s_mu(BU)) with
    delta_{lam,mu} s_lam(AB*)/s_lam(1_n); passes within 4 stderr.
    """
    lam = _as_partition(lam)
    mu = _as_partition(mu)
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    n = A.shape[0]

    def f(U):
        return schur_eval(lam, np.linalg.eigvals(A @ U)) * \
            np.conj(schur_eval(mu, np.linalg.eigvals(B @ U)))

    est = sampling.mc_average(f, sampling.haar_unitary(n), N, seed=seed, shards=shards)
    if lam == mu:
        d = dim_u(lam, n)
        rhs = schur_eval(lam, np.linalg.eigvals(A @ B.conj().T)) / d
    else:
        rhs = 0.0 + 0.0j
    return make_report(
        "schur_orthogonality",
        {"lam": list(lam.parts), "mu": list(mu.parts), "n": n, "N": N},
        est.mean, rhs, tolerance=0.0, mc_stderr=est.stderr, k=4.0, seed=seed)


def lagrange_weights(x, rel_gap: float = 1e-9) -> np.ndarray:
    """Weights w_j = prod_{k != j} 1/(x_k - x_j) of the interpolation nodes.

    Raises when the smallest node gap is below ``rel_gap`` times the node
    scale; callers needing near-degenerate nodes must switch to a
    divided-difference evaluation instead.
    """
    x = np.asarray(list(x), dtype=float)
    n = len(x)
    if n < 1:
        raise ValueError("need at least one node")
    scale = max(1.0, float(np.max(np.abs(x))))
    w = np.ones(n)
    for j in range(n):
        for k in range(n):
            if k == j:
                continue
            d = x[k] - x[j]
            if abs(d) < rel_gap * scale:
                raise ValueError(
                    f"node gap {abs(d):.3e} below threshold {rel_gap:.1e} * {scale:g}")
            w[j] /= d
    return w
