"""Isoclinic (left/right quaternion) decomposition of SO(4) and pair degrees.

Every A in SO(4) is ``x -> qL x conj(qR)`` for a pair of unit quaternions that
is unique up to simultaneous sign.  For a map F: S^3 -> SO(4) the degrees
(a, b) of q -> qL(q) and q -> qR(q) give its class in
pi_3(SO(4)) = Z + Z, in the basis

* left multiplication q -> L_q          : pair (1, 0), the pi_3(S^3) generator
* j4-image of the double cover q -> rho(q): pair (1, 1), the pi_3(SO(3)) generator

so the pi_3(S^3) component is a - b and the pi_3(SO(3)) component is b.
Stabilisation to pi_3(SO(5)) = Z is taken as a + b (kernel spanned by (1, -1));
the mod-2 class (a + b) mod 2 = (a - b) mod 2 does not depend on that choice.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import quat
from .diffcalc import DEFAULT_STEP, stencil, target_coefficients
from .errors import DomainError, InconclusiveError
from .estimate import IntegerEstimate, monte_carlo_mean
from .invariants import MIN_DEGREE_SAMPLES
from .maps import MapHandle

_E = np.eye(4)
# M[a, b] is the matrix of x -> e_a x conj(e_b); A = sum_ab qL_a qR_b M[a, b]
_M = np.array([[quat.isoclinic_matrix(_E[a], _E[b]) for b in range(4)] for a in range(4)])
assert np.allclose(np.einsum("abij,cdij->abcd", _M, _M),
                   4 * np.einsum("ac,bd->abcd", _E, _E))


@dataclass(frozen=True)
class IsoclinicPair:
    qL: np.ndarray
    qR: np.ndarray

    def matrix(self):
        return quat.isoclinic_matrix(self.qL, self.qR)

    def __neg__(self):
        return IsoclinicPair(-self.qL, -self.qR)


def association(A):
    """The rank-one 4x4 array Gamma(A) = qL qR^T."""
    return np.einsum("abij,...ij->...ab", _M, np.asarray(A, dtype=float)) / 4.0


def _split(A):
    G = association(A)
    U, S, Vt = np.linalg.svd(G)
    s = np.sqrt(S[..., :1])
    qL = quat.normalize(U[..., :, 0] * s)
    qR = quat.normalize(Vt[..., 0, :] * s)
    # canonical sign: largest |component| of qL positive
    idx = np.argmax(np.abs(qL), axis=-1)
    sgn = np.sign(np.take_along_axis(qL, idx[..., None], axis=-1))
    return qL * sgn, qR * sgn


def isoclinic_split(A, align_with: IsoclinicPair | None = None) -> IsoclinicPair:
    """Left/right pair of A; with ``align_with`` the sign closest to the reference."""
    A = np.asarray(A, dtype=float)
    if A.shape != (4, 4):
        raise DomainError("isoclinic_split expects one 4x4 matrix")
    quat.check_rotation(A)
    qL, qR = _split(A)
    if align_with is not None:
        if np.dot(qL, align_with.qL) + np.dot(qR, align_with.qR) < 0:
            qL, qR = -qL, -qR
    return IsoclinicPair(qL, qR)


def lift_jacobians(F: MapHandle, points, h=DEFAULT_STEP):
    """Frame coefficients of the left and right lifts of F at ``points``.

    Every stencil value is sign-aligned with the lift at its centre, so the
    result does not depend on the +-1 ambiguity of the pair.
    """
    if F.target != "SO4":
        raise DomainError("lift_jacobians needs an SO(4)-valued map")
    p = np.asarray(points, dtype=float)
    Lc, Rc = _split(F(p))
    st = stencil(p, h)
    Ls, Rs = _split(F(st))
    sgn = np.sign(np.sum(Ls * Lc[..., None, None, :], axis=-1)
                  + np.sum(Rs * Rc[..., None, None, :], axis=-1))[..., None]
    Ls, Rs = Ls * sgn, Rs * sgn
    dL = (Ls[..., 0, :] - Ls[..., 1, :]) / (2 * h)
    dR = (Rs[..., 0, :] - Rs[..., 1, :]) / (2 * h)
    return target_coefficients("S3", Lc, dL), target_coefficients("S3", Rc, dR)


@dataclass
class PairDegrees:
    a: IntegerEstimate
    b: IntegerEstimate

    @property
    def s3_component(self):
        return self.a.rounded - self.b.rounded

    @property
    def so3_component(self):
        return self.b.rounded

    @property
    def stable(self):
        return self.a.rounded + self.b.rounded

    @property
    def mod2(self):
        return self.stable % 2

    def as_tuple(self):
        return self.a.rounded, self.b.rounded


def pair_degrees(F: MapHandle, samples=200_000, seed=0, workers=None, strict=True) -> PairDegrees:
    """Degrees of the left and right lifts of F: S^3 -> SO(4)."""
    if samples < MIN_DEGREE_SAMPLES:
        raise DomainError(f"pair_degrees needs at least {MIN_DEGREE_SAMPLES} samples")
    t0 = time.perf_counter()

    def integrand(pts):
        JL, JR = lift_jacobians(F, pts)
        return np.stack([np.linalg.det(JL), np.linalg.det(JR)], axis=-1)

    mean, se, part = monte_carlo_mean(integrand, samples, seed, workers)
    dt = time.perf_counter() - t0
    a = IntegerEstimate.from_raw(mean[0], se[0], samples, seed, dt, map=F.name, lift="left", **part)
    b = IntegerEstimate.from_raw(mean[1], se[1], samples, seed, dt, map=F.name, lift="right", **part)
    out = PairDegrees(a, b)
    if strict and not (a.accepted and b.accepted):
        raise InconclusiveError(f"pair degrees ({a.raw:.3f}, {b.raw:.3f}) are not conclusive", out)
    return out
