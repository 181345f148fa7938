"""Quaternion and rotation algebra on S^3, S^2, SO(3) and SO(4).

Quaternions are stored as float arrays ``(..., 4)`` in the order (w, x, y, z),
i.e. ``w + x i + y j + z k``.  Pure imaginary quaternions are identified with
R^3 through (i, j, k) <-> (e1, e2, e3).  A point of S^3 is also read as a pair
of complex numbers ``(z1, z2) = (w + i x, y + i z)`` so that ``q = z1 + z2 j``.

All functions are vectorised over leading axes and have no side effects.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ProjectionError

UNIT_TOL = 1e-12
# looser gate for points produced by arithmetic (stencils, Newton updates)
ARITH_TOL = 1e-9
ROT_TOL = 1e-10

ONE = np.array([1.0, 0.0, 0.0, 0.0])
I = np.array([0.0, 1.0, 0.0, 0.0])
J = np.array([0.0, 0.0, 1.0, 0.0])
K = np.array([0.0, 0.0, 0.0, 1.0])
UNITS = np.stack([I, J, K])

NORTH = np.array([1.0, 0.0, 0.0])


@dataclass(frozen=True)
class UnitQuaternion:
    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        n = self.w**2 + self.x**2 + self.y**2 + self.z**2
        if abs(n - 1.0) > UNIT_TOL * 10:
            raise DomainError(f"quaternion norm^2 {n!r} is not 1")

    @classmethod
    def from_array(cls, a, normalize=False):
        a = np.asarray(a, dtype=float).reshape(4)
        if normalize:
            a = a / np.linalg.norm(a)
        return cls(*map(float, a))

    def __array__(self, dtype=None, copy=None):
        return np.array([self.w, self.x, self.y, self.z], dtype=dtype)

    def __neg__(self):
        return UnitQuaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        return UnitQuaternion.from_array(qmul(np.asarray(self), np.asarray(other)), normalize=True)

    def conj(self):
        return UnitQuaternion(self.w, -self.x, -self.y, -self.z)


@dataclass(frozen=True)
class PointS2:
    n1: float
    n2: float
    n3: float

    def __post_init__(self):
        n = self.n1**2 + self.n2**2 + self.n3**2
        if abs(n - 1.0) > UNIT_TOL * 10:
            raise DomainError(f"point norm^2 {n!r} is not 1")

    @classmethod
    def from_array(cls, a, normalize=False):
        a = np.asarray(a, dtype=float).reshape(3)
        if normalize:
            a = a / np.linalg.norm(a)
        return cls(*map(float, a))

    def __array__(self, dtype=None, copy=None):
        return np.array([self.n1, self.n2, self.n3], dtype=dtype)

    def __neg__(self):
        return PointS2(-self.n1, -self.n2, -self.n3)


# ---------------------------------------------------------------- algebra

def qmul(a, b):
    """Hamilton product, broadcasting over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = aw * bw - ax * bx - ay * by - az * bz
    out[..., 1] = aw * bx + ax * bw + ay * bz - az * by
    out[..., 2] = aw * by - ax * bz + ay * bw + az * bx
    out[..., 3] = aw * bz + ax * by - ay * bx + az * bw
    return out


def qconj(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def normalize(a):
    a = np.asarray(a, dtype=float)
    return a / np.linalg.norm(a, axis=-1, keepdims=True)


def check_unit(q, tol=ARITH_TOL, what="quaternion"):
    q = np.asarray(q, dtype=float)
    err = np.abs(np.einsum("...i,...i->...", q, q) - 1.0)
    worst = err.max() if err.ndim else float(err)
    if not worst <= tol:
        raise DomainError(f"{what} is not of unit norm (max deviation {worst:.3g})")
    return q


def check_rotation(R, tol=ROT_TOL):
    """Validate ``R`` as an element (or stack) of SO(n); returns it as an array."""
    R = np.asarray(R, dtype=float)
    n = R.shape[-1]
    gram = np.swapaxes(R, -1, -2) @ R
    if np.any(np.abs(gram - np.eye(n)) > tol):
        raise DomainError("matrix is not orthogonal")
    if np.any(np.abs(np.linalg.det(R) - 1.0) > tol):
        raise DomainError("matrix has determinant != +1")
    return R


# matrices of left multiplication by i, j, k
_LEFT_UNITS = np.stack([np.stack([qmul(u, e) for e in np.eye(4)], axis=-1) for u in UNITS])


def to_complex_pair(q):
    q = np.asarray(q, dtype=float)
    return q[..., 0] + 1j * q[..., 1], q[..., 2] + 1j * q[..., 3]


def from_complex_pair(z1, z2):
    return np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-1)


# ---------------------------------------------------------------- named maps

def rho(q):
    """Double cover S^3 -> SO(3): ``rho(q) @ v == Im(q v conj(q))``."""
    q = check_unit(q)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    R = np.empty(q.shape[:-1] + (3, 3))
    R[..., 0, 0] = w*w + x*x - y*y - z*z
    R[..., 0, 1] = 2*(x*y - w*z)
    R[..., 0, 2] = 2*(x*z + w*y)
    R[..., 1, 0] = 2*(x*y + w*z)
    R[..., 1, 1] = w*w - x*x + y*y - z*z
    R[..., 1, 2] = 2*(y*z - w*x)
    R[..., 2, 0] = 2*(x*z - w*y)
    R[..., 2, 1] = 2*(y*z + w*x)
    R[..., 2, 2] = w*w - x*x - y*y + z*z
    return R


def pow_m(m, p):
    """Degree-m self-map ``(z1, z2) -> (z1**m, z2) / |(z1**m, z2)|`` of S^3."""
    if int(m) != m or m < 1:
        raise DomainError(f"pow_m needs an integer m >= 1, got {m!r}")
    p = check_unit(p)
    z1, z2 = to_complex_pair(p)
    out = from_complex_pair(z1 ** int(m), z2)
    return normalize(out)


def eval_N(R, N=NORTH):
    """Evaluation map SO(3) -> S^2, ``R -> R N``."""
    R = np.asarray(R, dtype=float)
    return R @ np.asarray(N, dtype=float)


def hopf(q):
    """``q -> Im(q i conj(q))``, equal to ``eval_N(rho(q))`` for N = e1."""
    return rho(q)[..., :, 0]


# ---------------------------------------------------------------- sampling & frames

def sample_s3(n, rng):
    """Uniform points on S^3 by normalised Gaussians.  ``rng`` may be a seed."""
    rng = np.random.default_rng(rng)
    g = rng.standard_normal((n, 4))
    return normalize(g)


def sample_s2(n, rng):
    rng = np.random.default_rng(rng)
    return normalize(rng.standard_normal((n, 3)))


def tangent_frame(q):
    """Rows (i q, j q, k q): a global oriented orthonormal frame of T_q S^3."""
    return np.einsum("cij,...j->...ci", _LEFT_UNITS, np.asarray(q, dtype=float))


def s2_frame(n):
    """Oriented orthonormal basis (e_a, e_b) of T_n S^2 with ``n x e_a = e_b``.

    e_a is obtained by Gram-Schmidt of the coordinate axis least aligned with n.
    """
    n = np.asarray(n, dtype=float)
    idx = np.argmin(np.abs(n), axis=-1)
    axis = np.eye(3)[idx]
    ea = axis - np.sum(axis * n, axis=-1, keepdims=True) * n
    ea = normalize(ea)
    eb = np.cross(n, ea)
    return np.stack([ea, eb], axis=-2)


def great_arc_step(p, direction, h):
    """Move from p along the unit tangent ``direction`` by arc length h."""
    return np.cos(h) * p + np.sin(h) * direction


# ---------------------------------------------------------------- matrices on H = R^4

def left_matrix(q):
    """4x4 matrix of ``x -> q x``."""
    q = np.asarray(q, dtype=float)
    cols = [qmul(q, e) for e in np.eye(4)]
    return np.stack(cols, axis=-1)


def right_conj_matrix(q):
    """4x4 matrix of ``x -> x conj(q)``."""
    q = np.asarray(q, dtype=float)
    qc = qconj(q)
    cols = [qmul(e, qc) for e in np.eye(4)]
    return np.stack(cols, axis=-1)


def isoclinic_matrix(qL, qR):
    """4x4 matrix of ``x -> qL x conj(qR)``."""
    return left_matrix(qL) @ right_conj_matrix(qR)


# ---------------------------------------------------------------- stereographic projection

POLE_TOL = 1e-9


def stereographic(p, pole=ONE):
    """Project S^3 minus ``pole`` to R^3; ``-pole`` goes to the origin.

    The pole is first moved to 1 by left multiplication with its conjugate (an
    SO(4) map), so the orientation character does not depend on the pole.
    """
    p = np.asarray(p, dtype=float)
    pole = np.asarray(pole, dtype=float)
    u = qmul(qconj(pole), p)
    denom = 1.0 - u[..., 0]
    if np.any(np.linalg.norm(p - pole, axis=-1) < POLE_TOL):
        raise ProjectionError("point coincides with the projection pole")
    return u[..., 1:] / denom[..., None]


def inverse_stereographic(y, pole=ONE):
    y = np.asarray(y, dtype=float)
    r2 = np.sum(y * y, axis=-1, keepdims=True)
    u = np.concatenate([(r2 - 1.0) / (r2 + 1.0), 2.0 * y / (r2 + 1.0)], axis=-1)
    return qmul(np.asarray(pole, dtype=float), u)
