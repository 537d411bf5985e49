"""Random-matrix samplers and a reproducible, shardable Monte Carlo engine.

Randomness comes from counter-based Philox streams keyed by
``(seed, substream index)``.  An average over N samples is split into a fixed
number of substreams whose partial moments are merged in index order, so the
result is bit-identical no matter how many workers execute it.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EnsembleSpec",
    "McEstimate",
    "DensityTable",
    "haar_unitary",
    "ginibre",
    "gue",
    "cue_rank1",
    "gue_rank1",
    "sample",
    "sample_batch",
    "mc_average",
    "mc_merge",
    "eig_histogram",
    "substream",
    "max_workers",
]

_N_SUBSTREAMS = 16

_KINDS = {"haar_unitary", "ginibre", "gue", "cue_rank1", "gue_rank1"}


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    dim: int
    beta: float | None = None
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        if self.kind == "cue_rank1" and not (self.gamma is not None and 0 < self.gamma < 1):
            raise ValueError("cue_rank1 needs gamma in (0, 1)")
        if self.kind in ("gue", "gue_rank1") and not (self.beta is not None and self.beta > 0):
            raise ValueError("gue needs beta > 0")
        if self.kind == "gue_rank1" and not (self.gamma is not None and self.gamma > 0):
            raise ValueError("gue_rank1 needs gamma > 0")


def haar_unitary(n: int) -> EnsembleSpec:
    return EnsembleSpec("haar_unitary", n)


def ginibre(n: int) -> EnsembleSpec:
    """Complex i.i.d. Gaussian entries with E|W_jk|^2 = 1."""
    return EnsembleSpec("ginibre", n)


def gue(n: int, beta: float = 1.0) -> EnsembleSpec:
    """Hermitian, density ~ exp(-(beta/2) tr H^2).

    That convention gives diagonal variance 1/beta and off-diagonal
    real/imaginary part variance 1/(2 beta) each.
    """
    return EnsembleSpec("gue", n, beta=beta)


def cue_rank1(n: int, gamma: float) -> EnsembleSpec:
    """G U with G = diag(sqrt(1-gamma), 1, ..., 1) and U Haar unitary."""
    return EnsembleSpec("cue_rank1", n, gamma=gamma)


def gue_rank1(n: int, beta: float, gamma: float) -> EnsembleSpec:
    """H + i diag(gamma, 0, ..., 0) with H drawn from gue(n, beta)."""
    return EnsembleSpec("gue_rank1", n, beta=beta, gamma=gamma)


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent Philox stream keyed by (seed, index)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def _std_complex(rng: np.random.Generator, shape) -> np.ndarray:
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / math.sqrt(2.0)


def sample_batch(spec: EnsembleSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    """Stack of ``count`` matrices drawn from the ensemble."""
    n = spec.dim
    if spec.kind == "ginibre":
        return _std_complex(rng, (count, n, n))
    if spec.kind == "haar_unitary":
        z = _std_complex(rng, (count, n, n))
        q, r = np.linalg.qr(z)
        d = np.einsum("...ii->...i", r)
        # dividing out the phases of R's diagonal makes the law exactly Haar
        return q * (d / np.abs(d))[..., None, :]
    if spec.kind == "gue":
        a = _std_complex(rng, (count, n, n))
        return (a + a.conj().transpose(0, 2, 1)) / math.sqrt(2.0 * spec.beta)
    if spec.kind == "cue_rank1":
        u = sample_batch(haar_unitary(n), rng, count)
        g = np.ones(n)
        g[0] = math.sqrt(1.0 - spec.gamma)
        return g[None, :, None] * u
    if spec.kind == "gue_rank1":
        h = sample_batch(gue(n, spec.beta), rng, count)
        h[:, 0, 0] += 1j * spec.gamma
        return h
    raise AssertionError(spec.kind)


def sample(spec: EnsembleSpec, rng: np.random.Generator) -> np.ndarray:
    """Single matrix drawn from the ensemble."""
    return sample_batch(spec, rng, 1)[0]


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with the standard error of the mean."""

    mean: complex
    stderr: float
    samples: int
    seed: int


def _merge_moments(c1, m1, s1, c2, m2, s2):
    # Chan et al. pooled mean / sum of squared deviations
    if c1 == 0:
        return c2, m2, s2
    if c2 == 0:
        return c1, m1, s1
    c = c1 + c2
    delta = m2 - m1
    m = m1 + delta * (c2 / c)
    s = s1 + s2 + abs(delta) ** 2 * (c1 * c2 / c)
    return c, m, s


def mc_merge(a: McEstimate, b: McEstimate) -> McEstimate:
    """Pool two estimates as if their samples had been drawn jointly."""
    s1 = (a.stderr**2) * a.samples * (a.samples - 1)
    s2 = (b.stderr**2) * b.samples * (b.samples - 1)
    c, m, s = _merge_moments(a.samples, a.mean, s1, b.samples, b.mean, s2)
    stderr = math.sqrt(s / (c - 1) / c) if c > 1 else 0.0
    return McEstimate(m, stderr, c, a.seed)


def _batch_cap(n: int) -> int:
    return max(16, min(8192, (1 << 22) // max(1, 16 * n * n)))


def max_workers(requested: int) -> int:
    cap = os.environ.get("HAARMOMENTS_THREADS")
    w = int(requested)
    if cap is not None:
        w = min(w, max(1, int(cap)))
    return max(1, w)


def _substream_sizes(N: int) -> list[int]:
    blocks = min(_N_SUBSTREAMS, N)
    base, extra = divmod(N, blocks)
    return [base + (1 if i < extra else 0) for i in range(blocks)]


def mc_average(f, spec: EnsembleSpec, N: int, seed: int = 0, shards: int = 1,
               batched: bool = False) -> McEstimate:
    """Mean and standard error of f over N ensemble draws.

    ``f`` maps a single matrix to a complex number, or -- when
    ``batched=True`` -- a (count, n, n) stack to a (count,) vector.  ``shards``
    only caps worker concurrency; the estimate is a deterministic function of
    (f, spec, N, seed).
    """
    if N < 2:
        raise ValueError("need at least 2 samples")
    sizes = _substream_sizes(N)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    cap = _batch_cap(spec.dim)

    def run_block(idx: int):
        rng = substream(seed, idx)
        todo = sizes[idx]
        done = 0
        cnt, mean, s = 0, 0.0 + 0.0j, 0.0
        while done < todo:
            nb = min(cap, todo - done)
            mats = sample_batch(spec, rng, nb)
            if batched:
                vals = np.asarray(f(mats), dtype=complex)
            else:
                vals = np.array([f(mats[i]) for i in range(nb)], dtype=complex)
            bad = ~(np.isfinite(vals.real) & np.isfinite(vals.imag))
            if np.any(bad):
                i = int(np.argmax(bad))
                raise ValueError(
                    f"f returned a non-finite value at sample index "
                    f"{int(offsets[idx]) + done + i}")
            bm = complex(vals.mean())
            bs = float(np.sum(np.abs(vals - bm) ** 2))
            cnt, mean, s = _merge_moments(cnt, mean, s, nb, bm, bs)
            done += nb
        return cnt, mean, s

    workers = max_workers(shards)
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_block, range(len(sizes))))
    else:
        parts = [run_block(i) for i in range(len(sizes))]

    cnt, mean, s = 0, 0.0 + 0.0j, 0.0
    for c2, m2, s2 in parts:
        cnt, mean, s = _merge_moments(cnt, mean, s, c2, m2, s2)
    stderr = math.sqrt(s / (cnt - 1) / cnt) if cnt > 1 else 0.0
    return McEstimate(complex(mean), float(stderr), int(cnt), int(seed))


@dataclass(frozen=True)
class DensityTable:
    """Histogram-backed density estimate with per-bin multinomial stderr."""

    kind: str                # "radial" (bins in |z|^2) or "planar"
    edges: tuple             # radial: (q_edges,); planar: (x_edges, y_edges)
    density: np.ndarray
    stderr: np.ndarray
    samples: int             # matrices drawn
    dim: int
    skipped: int = 0

    def rows(self):
        if self.kind == "radial":
            (qe,) = self.edges
            for i in range(len(self.density)):
                yield (qe[i], qe[i + 1], self.density[i], self.stderr[i])
        else:
            xe, ye = self.edges
            for i in range(self.density.shape[0]):
                for j in range(self.density.shape[1]):
                    yield (0.5 * (xe[i] + xe[i + 1]), 0.5 * (ye[j] + ye[j + 1]),
                           self.density[i, j], self.stderr[i, j])


def eig_histogram(spec: EnsembleSpec, N: int, bins, seed: int = 0,
                  shards: int = 1) -> DensityTable:
    """Empirical mean eigenvalue density from N sampled matrices.

    ``bins`` is ``("radial", q_edges)`` for annular bins in |z|^2 or
    ``("planar", x_edges, y_edges)``.  The density is normalized so its
    integral over the plane is the matrix dimension n; stderr is the
    per-bin multinomial error propagated to density units.  Samples whose
    eigensolve fails are skipped and counted.
    """
    kind = bins[0]
    if kind == "radial":
        qe = np.asarray(bins[1], dtype=float)
        counts = np.zeros(len(qe) - 1)
        areas = math.pi * np.diff(qe)
    elif kind == "planar":
        xe = np.asarray(bins[1], dtype=float)
        ye = np.asarray(bins[2], dtype=float)
        counts = np.zeros((len(xe) - 1, len(ye) - 1))
        areas = np.outer(np.diff(xe), np.diff(ye))
    else:
        raise ValueError("bins must be ('radial', q_edges) or ('planar', x_edges, y_edges)")

    sizes = _substream_sizes(N)
    cap = _batch_cap(spec.dim)

    def run_block(idx: int):
        rng = substream(seed, idx)
        todo = sizes[idx]
        local = np.zeros_like(counts)
        skipped = 0
        while todo > 0:
            nb = min(cap, todo)
            mats = sample_batch(spec, rng, nb)
            try:
                ev = np.linalg.eigvals(mats)
            except np.linalg.LinAlgError:
                ev_rows = []
                for i in range(nb):
                    try:
                        ev_rows.append(np.linalg.eigvals(mats[i]))
                    except np.linalg.LinAlgError:
                        skipped += 1
                ev = np.vstack(ev_rows) if ev_rows else np.zeros((0, spec.dim), complex)
            flat = ev.ravel()
            if kind == "radial":
                local += np.histogram(np.abs(flat) ** 2, qe)[0]
            else:
                local += np.histogram2d(flat.real, flat.imag, bins=(xe, ye))[0]
            todo -= nb
        return local, skipped

    workers = max_workers(shards)
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_block, range(len(sizes))))
    else:
        parts = [run_block(i) for i in range(len(sizes))]

    skipped = sum(p[1] for p in parts)
    for local, _ in parts:
        counts += local
    used = N - skipped
    total = used * spec.dim
    p_hat = counts / total
    density = spec.dim * p_hat / areas
    stderr = spec.dim * np.sqrt(p_hat * (1.0 - p_hat) / total) / areas
    return DensityTable(kind, bins[1:], density, stderr, used, spec.dim, skipped)
