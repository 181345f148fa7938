"""Integer homotopy invariants of maps out of S^3.

* :func:`degree` -- S^3 -> S^3, mean Jacobian determinant over uniform samples.
* :func:`hopf_invariant` -- S^3 -> S^2, linking number of two oriented fibres.
* :func:`so3_class` -- S^3 -> SO(3), through the evaluation map at N.
"""
from __future__ import annotations

import time

import numpy as np

from . import quat
from .curves import TraceConfig, linking_number, trace_preimage
from .diffcalc import DEFAULT_STEP, is_regular_value, jacobians
from .errors import DomainError, InconclusiveError, NotRegularError
from .estimate import IntegerEstimate, integer_from_mean
from .maps import MapHandle, evaluate_at

MIN_DEGREE_SAMPLES = 10_000

# The fibre orientation rule in curves.trace_preimage already gives the Hopf
# fibration linking number +1; kept explicit so the calibration is visible.
HOPF_SIGN = 1

DEFAULT_VALUES = (
    quat.normalize(np.array([0.36, 0.48, 0.80])),
    quat.normalize(np.array([-0.48, 0.60, -0.64])),
)


def degree_integrand(f: MapHandle, h=DEFAULT_STEP):
    if f.target != "S3":
        raise DomainError("degree() needs a map S^3 -> S^3")

    def integrand(pts):
        return np.linalg.det(jacobians(f, pts, h))

    return integrand


def degree(f: MapHandle, samples=200_000, seed=0, workers=None, strict=True) -> IntegerEstimate:
    """Mapping degree of f: S^3 -> S^3.

    Both frames are the quaternionic ones, so the Jacobian determinant is the
    pull-back density of the volume form and its uniform mean is the degree.
    Raises :class:`InconclusiveError` when residual >= 0.1 or stderr >= 0.05
    (unless ``strict=False``).
    """
    if samples < MIN_DEGREE_SAMPLES:
        raise DomainError(f"degree estimation needs at least {MIN_DEGREE_SAMPLES} samples")
    return integer_from_mean(degree_integrand(f), samples, seed, workers, strict,
                             map=f.name)


def hopf_invariant(f: MapHandle, v1=None, v2=None, cfg: TraceConfig = TraceConfig()) -> IntegerEstimate:
    """Hopf invariant of f: S^3 -> S^2 as the linking number of two fibres.

    A value whose fibre could not be located is treated as missed by ``f``,
    which forces the invariant to vanish; this is recorded in ``meta``.
    """
    if f.target != "S2":
        raise DomainError("hopf_invariant() needs a map S^3 -> S^2")
    t0 = time.perf_counter()
    v1 = DEFAULT_VALUES[0] if v1 is None else quat.normalize(np.asarray(v1, dtype=float))
    v2 = DEFAULT_VALUES[1] if v2 is None else quat.normalize(np.asarray(v2, dtype=float))
    if np.linalg.norm(v1 - v2) < 1e-6:
        raise DomainError("the two regular values must be distinct")
    fibers = []
    empty = []
    for v in (v1, v2):
        rep = is_regular_value(f, v, cfg.seed_budget, cfg.seed, tol=cfg.corrector_tol)
        if rep.status is False:
            raise NotRegularError(f"{np.round(v, 6).tolist()} is not a regular value of "
                                  f"{f.name} (margin {rep.margin:.2e})")
        if rep.status is None:
            empty.append(v.tolist())
            fibers.append([])
            continue
        fibers.append(trace_preimage(f, v, cfg))
    raw = 0.0
    pairs = 0
    worst = 0.0
    for A in fibers[0]:
        for B in fibers[1]:
            lk = linking_number(A, B)
            raw += lk.raw
            pairs += lk.samples
            worst = max(worst, lk.residual)
    est = IntegerEstimate.from_raw(
        HOPF_SIGN * raw, 0.0, pairs, cfg.seed, time.perf_counter() - t0,
        map=f.name, values=[v1.tolist(), v2.tolist()],
        components=[len(fibers[0]), len(fibers[1])], empty_fibers=empty,
        link_residual=worst)
    if est.residual >= 1e-3:
        raise InconclusiveError("fibre linking sum is not near an integer", est)
    return est


def so3_class(mu_map: MapHandle, cfg: TraceConfig = TraceConfig(), N=quat.NORTH,
              v1=None, v2=None) -> IntegerEstimate:
    """Class of mu: S^3 -> SO(3) in pi_3(SO(3)) = Z, read off through eval_N."""
    if mu_map.target != "SO3":
        raise DomainError("so3_class() needs an SO(3)-valued map")
    return hopf_invariant(evaluate_at(mu_map, N), v1, v2, cfg)


def random_regular_pairs(f: MapHandle, count=3, seed=0, cfg: TraceConfig = TraceConfig(),
                         min_angle=0.5, min_margin=0.05):
    """``count`` pairs of well-separated regular values of f, reproducibly from ``seed``."""
    rng = np.random.default_rng(seed)
    pairs = []
    while len(pairs) < count:
        v1, v2 = quat.sample_s2(2, rng)
        if np.arccos(np.clip(v1 @ v2, -1, 1)) < min_angle:
            continue
        reps = [is_regular_value(f, v, cfg.seed_budget, cfg.seed) for v in (v1, v2)]
        if all(r.status and r.margin >= min_margin for r in reps):
            pairs.append((v1, v2))
    return pairs
