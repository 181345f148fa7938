"""Differentials of map handles in orthonormal frames, and regular-value tests."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import quat
from .errors import DomainError, EvaluationError
from .maps import MapHandle, vee, vee4

DEFAULT_STEP = 1e-5
RICHARDSON_TOL = 1e-4
ANALYTIC_TOL = 1e-5
REGULAR_MARGIN = 1e-4


class PrecisionWarning(UserWarning):
    """Step-halving changed a finite-difference differential noticeably."""


@dataclass(frozen=True)
class JacobianSample:
    point: np.ndarray
    matrix: np.ndarray
    sigma_min: float


def stencil(p, h):
    """Points ``p(+-h)`` along the three frame directions, shape (..., 3, 2, 4)."""
    frame = quat.tangent_frame(p)
    pc = p[..., None, :]
    plus = np.cos(h) * pc + np.sin(h) * frame
    minus = np.cos(h) * pc - np.sin(h) * frame
    return np.stack([plus, minus], axis=-2)


def target_coefficients(target, center, derivative):
    """Express derivative vectors at ``center`` in the target's frame.

    ``derivative`` has shape (..., 3, *value_shape): one derivative per domain
    direction.  Returns (..., k, 3).
    """
    if target == "S3":
        frame = quat.tangent_frame(center)
        return np.einsum("...ij,...cj->...ic", frame, derivative)
    if target == "S2":
        frame = quat.s2_frame(center)
        return np.einsum("...ij,...cj->...ic", frame, derivative)
    if target in ("SO3", "SO4"):
        Rt = np.swapaxes(center, -1, -2)[..., None, :, :]
        S = Rt @ derivative
        S = 0.5 * (S - np.swapaxes(S, -1, -2))
        coeffs = vee(S) if target == "SO3" else vee4(S)
        return np.swapaxes(coeffs, -1, -2)
    if target == "S3xS2":
        top = target_coefficients("S3", center[..., :4], derivative[..., :4])
        bottom = target_coefficients("S2", center[..., 4:], derivative[..., 4:])
        return np.concatenate([top, bottom], axis=-2)
    raise DomainError(f"unsupported target {target!r}")


def fd_jacobians(f: MapHandle, points, h=DEFAULT_STEP):
    """Central-difference coefficient matrices at a batch of points, (..., k, 3)."""
    p = np.asarray(points, dtype=float)
    center = f(p)
    st = stencil(p, h)
    vals = f(st)
    if not (np.all(np.isfinite(center)) and np.all(np.isfinite(vals))):
        raise EvaluationError(f"{f.name} returned non-finite values")
    deriv = (vals[..., 0, :] - vals[..., 1, :]) if vals.ndim == st.ndim else None
    if deriv is None:
        # matrix-valued targets carry two trailing axes
        deriv = vals[..., 0, :, :] - vals[..., 1, :, :]
    deriv = deriv / (2.0 * h)
    return target_coefficients(f.target, center, deriv)


def jacobians(f: MapHandle, points, h=DEFAULT_STEP):
    """Analytic coefficient matrices when available, otherwise finite differences."""
    if f.jacobian is not None:
        return f.jacobian(np.asarray(points, dtype=float))
    return fd_jacobians(f, points, h)


def differential(f: MapHandle, p, h=DEFAULT_STEP, check=True) -> JacobianSample:
    """Differential of ``f`` at one point of S^3.

    Finite differences are computed at ``h`` and ``h/2``; a disagreement above
    1e-4 emits :class:`PrecisionWarning` and the Richardson extrapolate is used.
    If ``f`` has an analytic differential it is returned instead, after checking
    it against the finite-difference value.
    """
    if not (1e-7 <= h <= 1e-3):
        raise DomainError("finite-difference step must lie in [1e-7, 1e-3]")
    p = quat.check_unit(np.asarray(p, dtype=float).reshape(4))
    d1 = fd_jacobians(f, p, h)
    d2 = fd_jacobians(f, p, h / 2)
    if np.max(np.abs(d1 - d2)) > RICHARDSON_TOL:
        warnings.warn(f"{f.name}: step halving changed the differential by "
                      f"{np.max(np.abs(d1 - d2)):.2e}", PrecisionWarning, stacklevel=2)
    fd = (4.0 * d2 - d1) / 3.0
    J = fd
    if f.jacobian is not None:
        J = f.jacobian(p)
        if check and np.max(np.abs(J - fd)) > ANALYTIC_TOL:
            raise EvaluationError(
                f"{f.name}: analytic and finite-difference differentials differ by "
                f"{np.max(np.abs(J - fd)):.2e}")
    sv = np.linalg.svd(J, compute_uv=False)
    return JacobianSample(point=p, matrix=J, sigma_min=float(sv[-1]))


# ---------------------------------------------------------------- fibres of S^3 -> S^2

def fiber_residual(f, p, v):
    return np.linalg.norm(f(p) - v, axis=-1)


def newton_to_fiber(f: MapHandle, p, v, tol=1e-10, max_iter=40, h=DEFAULT_STEP):
    """Gauss-Newton correction of ``p`` onto ``f^{-1}(v)`` for f: S^3 -> S^2.

    Returns ``(point, residual, converged)``.  Steps are minimum-norm solutions
    in T_p S^3 followed by renormalisation.
    """
    v = np.asarray(v, dtype=float)
    p = np.asarray(p, dtype=float)
    res = float(fiber_residual(f, p, v))
    for _ in range(max_iter):
        if res < tol:
            return p, res, True
        y = f(p)
        if np.dot(y, v) <= 0:
            return p, res, False
        E = quat.s2_frame(y)
        r = E @ (v - y)
        Jm = jacobians(f, p, h)
        step = np.linalg.pinv(Jm, rcond=1e-12) @ r
        p = quat.normalize(p + step @ quat.tangent_frame(p))
        res = float(fiber_residual(f, p, v))
    return p, res, res < tol


@dataclass
class RegularityReport:
    """Outcome of a regular-value test.

    ``status`` is True (regular), False (a critical preimage was found) or None
    (indeterminate: no preimage located within the seed budget).
    """
    status: bool | None
    margin: float
    preimages: np.ndarray = field(repr=False)
    best_residual: float = np.inf

    def __bool__(self):
        return bool(self.status)


def seed_candidates(f, v, samples, seed, keep=16):
    """Random S^3 points with the smallest ``|f(p) - v|``, best first."""
    pts = quat.sample_s3(samples, seed)
    vals = f(pts)
    res = np.linalg.norm(vals - v, axis=-1)
    order = np.argsort(res)
    front = order[np.sum(vals[order] * v, axis=-1) > 0][:keep]
    return pts[front], res[front]


def is_regular_value(f: MapHandle, v, samples=2000, seed=0, keep=16, tol=1e-10) -> RegularityReport:
    """Check whether ``v`` is a regular value of ``f`` near every located preimage."""
    if f.target != "S2":
        raise DomainError("regular-value test is for maps S^3 -> S^2")
    if samples < 10:
        raise DomainError("need at least 10 samples")
    v = np.asarray(v, dtype=float)
    cands, cres = seed_candidates(f, v, samples, seed, keep)
    found = []
    best = float(cres[0]) if len(cres) else np.inf
    for c in cands:
        p, res, ok = newton_to_fiber(f, c, v, tol=tol)
        best = min(best, res)
        if ok:
            found.append(p)
    if not found:
        return RegularityReport(None, float("nan"), np.empty((0, 4)), best)
    found = np.array(found)
    J = fd_jacobians(f, found)
    sv = np.linalg.svd(J, compute_uv=False)[..., -1]
    margin = float(np.min(sv))
    return RegularityReport(margin > REGULAR_MARGIN, margin, found, best)
