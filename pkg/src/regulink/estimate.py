"""Integer-valued estimates and the seeded, batch-parallel Monte-Carlo driver."""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import quat
from .errors import InconclusiveError

RESIDUAL_GATE = 0.1
STDERR_GATE = 0.05
BATCH_SIZE = 50_000


@dataclass
class IntegerEstimate:
    raw: float
    rounded: int
    residual: float
    stderr: float
    samples: int
    seed: int | None
    elapsed: float = 0.0
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_raw(cls, raw, stderr=0.0, samples=0, seed=None, elapsed=0.0, **meta):
        raw = float(raw)
        rounded = int(round(raw))
        return cls(raw, rounded, abs(raw - rounded), float(stderr), int(samples), seed,
                   elapsed, dict(meta))

    @property
    def accepted(self):
        return self.residual < RESIDUAL_GATE and self.stderr < STDERR_GATE

    def __int__(self):
        return self.rounded

    def to_dict(self):
        d = asdict(self)
        d.pop("elapsed")
        return d


def default_workers():
    env = os.environ.get("REGULINK_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def monte_carlo_mean(integrand, samples, seed, workers=None, batch_size=BATCH_SIZE):
    """Mean and standard error of ``integrand`` over uniform points of S^3.

    A vector-valued integrand (shape (n, k)) yields arrays of k means/errors.

    The sample set is split into fixed batches, one child seed each, so the
    result depends on (samples, seed, batch_size) only, never on ``workers``.
    Batch sums are merged with ``math.fsum``.
    """
    samples = int(samples)
    n_batches = max(1, math.ceil(samples / batch_size))
    sizes = [batch_size] * (n_batches - 1) + [samples - batch_size * (n_batches - 1)]
    children = np.random.SeedSequence(seed).spawn(n_batches)

    def run(i):
        pts = quat.sample_s3(sizes[i], np.random.default_rng(children[i]))
        vals = np.asarray(integrand(pts), dtype=float).reshape(sizes[i], -1)
        return ([math.fsum(c) for c in vals.T], [math.fsum(c * c) for c in vals.T])

    workers = workers or default_workers()
    if workers > 1 and n_batches > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, range(n_batches)))
    else:
        parts = [run(i) for i in range(n_batches)]
    s = np.array([math.fsum(col) for col in zip(*(p[0] for p in parts))])
    s2 = np.array([math.fsum(col) for col in zip(*(p[1] for p in parts))])
    mean = s / samples
    var = np.maximum(s2 / samples - mean * mean, 0.0) * samples / max(samples - 1, 1)
    se = np.sqrt(var / samples)
    if len(mean) == 1:
        mean, se = float(mean[0]), float(se[0])
    return mean, se, {"batches": n_batches, "batch_size": batch_size}


def integer_from_mean(integrand, samples, seed, workers=None, strict=True, **meta):
    t0 = time.perf_counter()
    mean, se, part = monte_carlo_mean(integrand, samples, seed, workers)
    est = IntegerEstimate.from_raw(mean, se, samples, seed, time.perf_counter() - t0,
                                   **part, **meta)
    if strict and not est.accepted:
        raise InconclusiveError(
            f"estimate {est.raw:.4f} +- {est.stderr:.4f} is not conclusive; "
            "increase the sample count", est)
    return est
