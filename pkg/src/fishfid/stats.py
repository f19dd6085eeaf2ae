"""Two-sample Kolmogorov-Smirnov comparison of control vs. transect distances."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .errors import EmptySample, MissingGroup
from .fit import Label


@dataclass(frozen=True)
class KsResult:
    d_statistic: float
    p_value: float
    n1: int
    n2: int
    mean1: float
    mean2: float

    def to_dict(self):
        return asdict(self)


def _as_sample(values, name):
    a = np.asarray(values, dtype=float).ravel()
    if a.size == 0:
        raise EmptySample(f"{name} sample is empty")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} sample contains non-finite values")
    return np.sort(a)


def ks_statistic(a, b) -> float:
    """sup_t |F_a(t) - F_b(t)|, evaluated at every distinct value of the merged sample.

    Both ECDFs are right-continuous steps, so the supremum is attained at one
    of the jump points; ties count fully on both sides.
    """
    a = _as_sample(a, "first")
    b = _as_sample(b, "second")
    grid = np.unique(np.concatenate([a, b]))
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


DUAL_BELOW = 1.0


def _q_dual(lam):
    # 1 - sqrt(2 pi)/lam * sum exp(-(2j-1)^2 pi^2 / (8 lam^2)); no cancellation for small lam
    a = -math.pi ** 2 / (8.0 * lam * lam)
    s = 0.0
    for j in range(1, 100):
        t = math.exp(a * (2 * j - 1) ** 2)
        s += t
        if t <= 1e-17 * s:
            break
    return min(max(1.0 - math.sqrt(2.0 * math.pi) / lam * s, 0.0), 1.0)


def kolmogorov_q(lam: float, tol: float = 1e-12, max_terms: int = 100) -> float:
    """Kolmogorov survival function Q(lam) = 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lam^2).

    The series stops once a term drops below ``tol``. Below lam = 1 the
    alternating terms sit near 2 and cancel, leaving ~1e-13 of round-off
    that makes Q non-monotone; there the equivalent theta-function form is
    summed instead.
    """
    if lam <= 0:
        return 1.0
    if lam < DUAL_BELOW:
        return _q_dual(lam)
    a2 = -2.0 * lam * lam
    total = 0.0
    sign = 1.0
    for j in range(1, max_terms + 1):
        term = 2.0 * math.exp(a2 * j * j)
        total += sign * term
        if term < tol:
            return min(max(total, 0.0), 1.0)
        sign = -sign
    return 1.0


def ks_pvalue(d: float, n1: int, n2: int) -> float:
    ne = n1 * n2 / (n1 + n2)
    root = math.sqrt(ne)
    return kolmogorov_q((root + 0.12 + 0.11 / root) * d)


def ks_two_sample(control, transect) -> KsResult:
    """Two-sided two-sample KS test with the asymptotic p-value.

    >>> ks_two_sample([1, 2], [3, 4]).d_statistic
    1.0
    """
    a = _as_sample(control, "control")
    b = _as_sample(transect, "transect")
    d = ks_statistic(a, b)
    return KsResult(
        d_statistic=d,
        p_value=ks_pvalue(d, a.size, b.size),
        n1=int(a.size),
        n2=int(b.size),
        mean1=float(a.mean()),
        mean2=float(b.mean()),
    )


def split_groups(samples):
    control = [s.distance for s in samples if s.label == Label.CONTROL]
    transect = [s.distance for s in samples if s.label == Label.TRANSECT]
    return control, transect


def compare_groups(samples) -> KsResult:
    """KS test of Control vs. Transect distances.

    ``mean2 < mean1`` means fish sat closer to shelter during transects.
    """
    control, transect = split_groups(samples)
    if not control:
        raise MissingGroup("no Control samples")
    if not transect:
        raise MissingGroup("no Transect samples")
    return ks_two_sample(control, transect)


def ecdf_points(values):
    """(value, F(value)) at each distinct sorted value."""
    a = _as_sample(values, "ecdf")
    grid = np.unique(a)
    f = np.searchsorted(a, grid, side="right") / a.size
    return list(zip(grid.tolist(), f.tolist()))


def permutation_pvalue(a, b, n_permutations=10_000, seed=0, chunk=1000, workers=1):
    """Monte-Carlo permutation p-value for the KS statistic.

    Permutations are split into fixed-size chunks, each with its own child
    seed, so the answer is the same for any ``workers`` count.
    """
    a = _as_sample(a, "first")
    b = _as_sample(b, "second")
    pooled = np.concatenate([a, b])
    d_obs = ks_statistic(a, b)
    n_chunks = math.ceil(n_permutations / chunk)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(chunk, n_permutations - i * chunk) for i in range(n_chunks)]

    def run(i):
        rng = np.random.default_rng(children[i])
        hits = 0
        for _ in range(sizes[i]):
            p = rng.permutation(pooled)
            if ks_statistic(p[: a.size], p[a.size :]) >= d_obs - 1e-12:
                hits += 1
        return hits

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            hits = sum(ex.map(run, range(n_chunks)))
    else:
        hits = sum(map(run, range(n_chunks)))
    return (hits + 1) / (n_permutations + 1)
