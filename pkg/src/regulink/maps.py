"""Map handles: smooth maps out of S^3 with an evaluation rule.

A handle may carry an analytic differential.  Differentials are *coefficient
matrices* of shape ``(..., k, 3)``: column ``c`` is the image of the domain
frame vector ``e_c p`` (``e = i, j, k``) expressed in the orthonormal frame of
the target at ``f(p)``:

* ``S3``   -- rows (i y, j y, k y) at y = f(p)
* ``S2``   -- rows (e_a, e_b) of :func:`quat.s2_frame`
* ``SO3``  -- omega with ``R^T dR = hat(omega)``
* ``SO4``  -- the six upper entries (01, 02, 03, 12, 13, 23) of ``R^T dR``
* ``S3xS2`` -- the S3 block stacked on the S2 block
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import quat
from .errors import DomainError

TARGET_DIMS = {"S3": 3, "S2": 2, "SO3": 3, "SO4": 6, "S3xS2": 5}


@dataclass(frozen=True)
class MapHandle:
    name: str
    target: str
    rule: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.target not in TARGET_DIMS:
            raise DomainError(f"unknown target manifold {self.target!r}")

    def __call__(self, p):
        return self.rule(np.asarray(p, dtype=float))

    @property
    def target_dim(self):
        return TARGET_DIMS[self.target]


def hat(w):
    w = np.asarray(w, dtype=float)
    z = np.zeros(w.shape[:-1])
    return np.stack([
        np.stack([z, -w[..., 2], w[..., 1]], axis=-1),
        np.stack([w[..., 2], z, -w[..., 0]], axis=-1),
        np.stack([-w[..., 1], w[..., 0], z], axis=-1),
    ], axis=-2)


def vee(S):
    return np.stack([S[..., 2, 1], S[..., 0, 2], S[..., 1, 0]], axis=-1)


SO4_INDEX = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def vee4(S):
    return np.stack([S[..., a, b] for a, b in SO4_INDEX], axis=-1)


# ---------------------------------------------------------------- S^3 -> S^3

def identity():
    return MapHandle("identity", "S3", lambda p: p,
                     lambda p: np.broadcast_to(np.eye(3), p.shape[:-1] + (3, 3)).copy())


def antipodal():
    # -p has the same frame coefficients as p: (e(-p)) = -(e p)
    return MapHandle("antipodal", "S3", lambda p: -p,
                     lambda p: np.broadcast_to(np.eye(3), p.shape[:-1] + (3, 3)).copy())


def constant(value, target="S3", name=None):
    value = np.asarray(value, dtype=float)
    dim = TARGET_DIMS[target]

    def rule(p):
        return np.broadcast_to(value, p.shape[:-1] + value.shape).copy()

    def jac(p):
        return np.zeros(p.shape[:-1] + (dim, 3))

    return MapHandle(name or f"constant[{target}]", target, rule, jac)


def _pow_jacobian(m, p):
    z1, z2 = quat.to_complex_pair(p)
    G = quat.from_complex_pair(z1 ** m, z2)
    r = np.linalg.norm(G, axis=-1, keepdims=True)
    F = G / r
    V = quat.tangent_frame(p)                      # (..., 3, 4) domain directions
    dz1, dz2 = quat.to_complex_pair(V)
    dG = quat.from_complex_pair(m * (z1 ** (m - 1))[..., None] * dz1, dz2)
    Fb = F[..., None, :]
    dF = (dG - Fb * np.sum(Fb * dG, axis=-1, keepdims=True)) / r[..., None, :]
    return np.einsum("...ij,...cj->...ic", quat.tangent_frame(F), dF)


def power(m):
    m = int(m)
    if m < 1:
        raise DomainError("pow_m is defined for m >= 1 only")
    return MapHandle(f"pow:{m}", "S3", lambda p: quat.pow_m(m, p),
                     lambda p: _pow_jacobian(m, p))


def compose(g, f, name=None):
    """``g o f`` for f: S^3 -> S^3."""
    if f.target != "S3":
        raise DomainError("inner map of a composition must land in S^3")
    jac = None
    if g.jacobian is not None and f.jacobian is not None:
        def jac(p):
            return g.jacobian(f(p)) @ f.jacobian(p)
    return MapHandle(name or f"{g.name}∘{f.name}", g.target, lambda p: g(f(p)), jac)


def rotate_domain(f, A, name=None):
    """``f(A p)`` for a fixed A in SO(4)."""
    A = quat.check_rotation(A)
    return MapHandle(name or f"{f.name}∘rot", f.target, lambda p: f(p @ A.T))


def product(f, g, name=None):
    """Pointwise quaternion product ``p -> f(p) g(p)`` of two S^3-valued maps."""
    return MapHandle(name or f"({f.name})·({g.name})", "S3",
                     lambda p: quat.normalize(quat.qmul(f(p), g(p))))


def conjugate(f):
    return MapHandle(f"conj({f.name})", "S3", lambda p: quat.qconj(f(p)))


def left_translation(a):
    """``p -> a p`` for a fixed unit quaternion a (an orientation-preserving isometry)."""
    a = quat.check_unit(np.asarray(a, dtype=float))
    return MapHandle("left-translation", "S3", lambda p: quat.qmul(a, p))


# ---------------------------------------------------------------- S^3 -> SO(3), S^2

def mu(m):
    """rho o pow_m : S^3 -> SO(3)."""
    pw = power(m)

    def jac(p):
        y = pw(p)
        return 2.0 * np.swapaxes(quat.rho(y), -1, -2) @ pw.jacobian(p)

    return MapHandle(f"mu:{m}", "SO3", lambda p: quat.rho(pw(p)), jac)


def evaluate_at(R_map, N=quat.NORTH, name=None):
    """``eval_N o R_map`` : S^3 -> S^2."""
    if R_map.target != "SO3":
        raise DomainError("evaluate_at needs an SO(3)-valued map")
    N = np.asarray(N, dtype=float)

    def rule(p):
        return quat.eval_N(R_map(p), N)

    jac = None
    if R_map.jacobian is not None:
        def jac(p):
            R = R_map(p)
            E = quat.s2_frame(R @ N)
            # d(R N) = R (omega x N) = -R hat(N) omega
            return -E @ R @ hat(N) @ R_map.jacobian(p)

    return MapHandle(name or f"eval∘{R_map.name}", "S2", rule, jac)


def hopf_map():
    """The Hopf fibration ``q -> q i conj(q)``, i.e. eval_N o mu_1 with N = e1."""
    def jac(p):
        n = quat.hopf(p)
        E = quat.s2_frame(n)
        # moving p along e p changes n by 2 e x n
        cols = [np.einsum("...ij,...j->...i", E, 2.0 * np.cross(e[1:], n)) for e in quat.UNITS]
        return np.stack(cols, axis=-1)

    return MapHandle("hopf", "S2", quat.hopf, jac)


def hopf_composite(m):
    """eval_N o mu_m : the second component of alpha_m restricted to S^3 x N."""
    return evaluate_at(mu(m), name=f"eval∘mu:{m}")


def alpha_restricted(m):
    """``x -> (x, mu_m(x) N)`` as a map S^3 -> S^3 x S^2 (values packed as 7-vectors)."""
    second = hopf_composite(m)

    def rule(p):
        return np.concatenate([p, second(p)], axis=-1)

    def jac(p):
        top = np.broadcast_to(np.eye(3), p.shape[:-1] + (3, 3))
        return np.concatenate([top, second.jacobian(p)], axis=-2)

    return MapHandle(f"alpha:{m}|S3", "S3xS2", rule, jac)


# ---------------------------------------------------------------- S^3 -> SO(4)

def j4(R):
    """Block embedding SO(3) -> SO(4) fixing the real axis."""
    R = np.asarray(R, dtype=float)
    out = np.zeros(R.shape[:-2] + (4, 4))
    out[..., 0, 0] = 1.0
    out[..., 1:, 1:] = R
    return out


def j4_mu(m):
    """q -> j4(rho(pow_m(q))), the matrix of x -> p x conj(p) with p = pow_m(q)."""
    pw = power(m)
    return MapHandle(f"j4∘mu:{m}", "SO4", lambda p: j4(quat.rho(pw(p))))


def left_multiplication():
    return MapHandle("left-mult", "SO4", quat.left_matrix)


def column(F, e=(1.0, 0.0, 0.0, 0.0), name=None):
    """``q -> F(q) e`` : evaluation of an SO(4)-valued map at a unit vector."""
    if F.target != "SO4":
        raise DomainError("column() needs an SO(4)-valued map")
    e = np.asarray(e, dtype=float)
    return MapHandle(name or f"{F.name}·e1", "S3", lambda p: F(p) @ e)
