"""Preimage curves of maps S^3 -> S^2 and exact linking numbers of polygons."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quat
from .diffcalc import is_regular_value, jacobians
from .errors import (DomainError, InconclusiveError, NonClosureError, NotRegularError,
                     ProximityError, TracingError)
from .estimate import IntegerEstimate
from .maps import MapHandle

# Global sign making the Gauss sum below equal the standard linking number
# (calibrated against direct quadrature of the Gauss integral in the tests).
GAUSS_SIGN = -1.0

LINK_RESIDUAL_OK = 1e-6
LINK_RESIDUAL_FAIL = 1e-3


@dataclass(frozen=True)
class TraceConfig:
    step: float = 5e-3
    corrector_tol: float = 1e-10
    max_steps: int = 1_000_000
    seed_budget: int = 2000
    seed: int = 0
    max_newton: int = 30

    def __post_init__(self):
        if not (1e-4 <= self.step <= 5e-2):
            raise DomainError(f"trace step {self.step} outside [1e-4, 5e-2]")
        if self.seed_budget < 10:
            raise DomainError("seed budget must be at least 10")


@dataclass
class PolylineLoop:
    """Closed oriented polygon; the closing edge runs from the last vertex to the first."""
    vertices: np.ndarray
    orientation: int = 1
    step: float = 5e-3
    closure: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] not in (3, 4):
            raise DomainError("loop vertices must be an (n, 3) or (n, 4) array")
        if len(self.vertices) < 12:
            raise DomainError("a loop needs at least 12 vertices")
        if self.on_s3:
            quat.check_unit(self.vertices, tol=1e-10, what="loop vertex")

    @property
    def on_s3(self):
        return self.vertices.shape[1] == 4

    def __len__(self):
        return len(self.vertices)

    def edges(self):
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def gaps(self):
        a, b = self.edges()
        return np.linalg.norm(b - a, axis=1)

    @property
    def length(self):
        return float(np.sum(self.gaps()))

    def reversed(self):
        return PolylineLoop(self.vertices[::-1].copy(), -self.orientation, self.step,
                            self.closure, dict(self.meta))

    def refined(self):
        """Insert the midpoint of every edge (re-projected to S^3 for S^3 loops)."""
        a, b = self.edges()
        mid = 0.5 * (a + b)
        if self.on_s3:
            mid = quat.normalize(mid)
        out = np.empty((2 * len(a), a.shape[1]))
        out[0::2] = a
        out[1::2] = mid
        return PolylineLoop(out, self.orientation, self.step / 2, self.closure, dict(self.meta))

    def projected(self, pole):
        if not self.on_s3:
            raise DomainError("loop is already in R^3")
        return PolylineLoop(quat.stereographic(self.vertices, pole), self.orientation,
                            self.step, self.closure, dict(self.meta))


# ---------------------------------------------------------------- tracing

def _tangent_coeffs(J, orientation):
    k = orientation * np.cross(J[0], J[1])
    n = np.linalg.norm(k)
    if n < 1e-14:
        raise TracingError("differential lost rank while tracing")
    return k / n


def _complement(k):
    """Two orthonormal vectors of R^3 spanning the orthogonal complement of k."""
    a = np.eye(3)[np.argmin(np.abs(k))]
    b1 = a - np.dot(a, k) * k
    b1 /= np.linalg.norm(b1)
    return np.stack([b1, np.cross(k, b1)])


def _trace_from(f, v, p0, cfg, orientation):
    h = cfg.step
    verts = [p0]
    p = p0
    J = jacobians(f, p)
    far = False
    for _ in range(cfg.max_steps):
        k = _tangent_coeffs(J, orientation)
        F = quat.tangent_frame(p)
        t = k @ F
        plane = _complement(k) @ F            # (2, 4), orthogonal to t in T_p S^3
        q = np.cos(h) * p + np.sin(h) * t
        for _ in range(cfg.max_newton):
            y = f(q)
            res = np.linalg.norm(y - v)
            if res < cfg.corrector_tol:
                break
            if res > 10 * h:
                raise TracingError(f"corrector diverged (residual {res:.2e})", q)
            E = quat.s2_frame(y)
            Jq = jacobians(f, q)
            C = plane @ quat.tangent_frame(q).T  # plane vectors in the frame at q
            delta = np.linalg.solve(Jq @ C.T, E @ (v - y))
            q = quat.normalize(q + delta @ plane)
        else:
            raise TracingError(f"corrector did not converge (residual {res:.2e})", q)
        if np.linalg.norm(q - p) >= 2 * h:
            raise TracingError("corrector jumped away from the curve", q)
        verts.append(q)
        p = q
        J = jacobians(f, p)
        dist0 = np.linalg.norm(q - p0)
        if dist0 > 3 * h:
            far = True
        elif far and dist0 < h:
            return np.array(verts), float(dist0)
    raise NonClosureError(f"curve did not close within {cfg.max_steps} steps", p)


def hausdorff(a, b):
    """Bidirectional Hausdorff distance between two vertex sets."""
    d = _min_point_distances(a, b)
    e = _min_point_distances(b, a)
    return float(max(d.max(), e.max()))


def _min_point_distances(P, Q, chunk=512):
    out = np.empty(len(P))
    for s in range(0, len(P), chunk):
        diff = P[s:s + chunk, None, :] - Q[None, :, :]
        out[s:s + chunk] = np.sqrt(np.min(np.sum(diff * diff, axis=-1), axis=1))
    return out


def trace_preimage(f: MapHandle, v, cfg: TraceConfig = TraceConfig(), orientation=1):
    """All preimage components of ``v`` reachable from the seed budget.

    Each loop is oriented so that the tangent k satisfies det[k, w1, w2] > 0,
    where (w1, w2) are df-preimages of the oriented frame of T_v S^2 (see
    :func:`quat.s2_frame`); ``orientation=-1`` uses the reversed frame.
    Returns an empty list when no preimage was located.
    """
    if orientation not in (1, -1):
        raise DomainError("orientation must be +1 or -1")
    v = np.asarray(v, dtype=float)
    rep = is_regular_value(f, v, cfg.seed_budget, cfg.seed, tol=cfg.corrector_tol)
    if rep.status is False:
        raise NotRegularError(f"{v} is not a regular value of {f.name} "
                              f"(margin {rep.margin:.2e})")
    loops = []
    for s in rep.preimages:
        if any(np.min(np.linalg.norm(L.vertices - s, axis=1)) < 5 * cfg.step for L in loops):
            continue
        verts, gap = _trace_from(f, v, s, cfg, orientation)
        loop = PolylineLoop(verts, orientation, cfg.step, gap,
                            {"map": f.name, "value": v.tolist(), "seed": cfg.seed})
        if any(hausdorff(loop.vertices, L.vertices) < 5 * cfg.step for L in loops):
            continue
        loops.append(loop)
    return loops


# ---------------------------------------------------------------- linking

def _point_segment_distances(P, A0, A1, chunk=256):
    """Distance from each point of P to the nearest segment [A0_i, A1_i]."""
    D = A1 - A0
    dd = np.maximum(np.sum(D * D, axis=1), 1e-300)
    out = np.empty(len(P))
    for s in range(0, len(P), chunk):
        W = P[s:s + chunk, None, :] - A0[None, :, :]
        t = np.clip(np.sum(W * D[None], axis=-1) / dd, 0.0, 1.0)
        R = W - t[..., None] * D[None]
        out[s:s + chunk] = np.sqrt(np.min(np.sum(R * R, axis=-1), axis=1))
    return out


def _point_segment_min(P, A0, A1, chunk=256):
    return float(_point_segment_distances(P, A0, A1, chunk).min())


def circle_hausdorff(loop: PolylineLoop, e1, e2, dense=4096):
    """Hausdorff distance between a loop and the great circle spanned by e1, e2.

    Vertices are measured against the exact circle, and ``dense`` circle points
    against the loop's segments, so chord sagitta counts.
    """
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    V = loop.vertices
    c = np.outer(V @ e1, e1) + np.outer(V @ e2, e2)
    to_circle = np.linalg.norm(V - quat.normalize(c), axis=1)
    th = np.linspace(0.0, 2 * np.pi, dense, endpoint=False)
    C = np.outer(np.cos(th), e1) + np.outer(np.sin(th), e2)
    a0, a1 = loop.edges()
    to_loop = _point_segment_distances(C, a0, a1)
    return float(max(to_circle.max(), to_loop.max()))


def loop_separation(A: PolylineLoop, B: PolylineLoop):
    """Smallest vertex-to-segment distance between the two loops."""
    a0, a1 = A.edges()
    b0, b1 = B.edges()
    return min(_point_segment_min(A.vertices, b0, b1), _point_segment_min(B.vertices, a0, a1))


def choose_pole(*loops, candidates=256, rng=0):
    """A point of S^3 maximising the minimal distance to all loop vertices."""
    cand = np.concatenate([np.eye(4), -np.eye(4), quat.sample_s3(candidates, rng)])
    pts = np.concatenate([L.vertices for L in loops])
    dmin = np.min(np.linalg.norm(cand[:, None, :] - pts[None, :, :], axis=-1), axis=1)
    return cand[int(np.argmax(dmin))]


def _tri_solid_angle(a, b, c):
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    nc = np.linalg.norm(c, axis=-1)
    num = np.sum(a * np.cross(b, c), axis=-1)
    den = (na * nb * nc + np.sum(a * b, axis=-1) * nc
           + np.sum(a * c, axis=-1) * nb + np.sum(b * c, axis=-1) * na)
    return 2.0 * np.arctan2(num, den)


def gauss_linking_sum(A, B, chunk=128):
    """Exact Gauss linking integral of two closed polygons in R^3.

    Each edge pair contributes the signed solid angle of the planar
    parallelogram {b - a}, split into two triangles.
    """
    a0 = np.asarray(A, dtype=float)
    a1 = np.roll(a0, -1, axis=0)
    b0 = np.asarray(B, dtype=float)
    b1 = np.roll(b0, -1, axis=0)
    parts = []
    for s in range(0, len(a0), chunk):
        p0 = a0[s:s + chunk, None, :]
        p1 = a1[s:s + chunk, None, :]
        c00 = b0[None] - p0
        c01 = b1[None] - p0
        c11 = b1[None] - p1
        c10 = b0[None] - p1
        om = _tri_solid_angle(c00, c01, c11) + _tri_solid_angle(c00, c11, c10)
        parts.append(math.fsum(om.ravel()))
    return GAUSS_SIGN * math.fsum(parts) / (4.0 * math.pi)


def linking_number(A: PolylineLoop, B: PolylineLoop, pole=None) -> IntegerEstimate:
    """Linking number of two disjoint loops (in S^3 or R^3)."""
    if A.on_s3 != B.on_s3:
        raise DomainError("both loops must live in the same space")
    sep = loop_separation(A, B)
    if sep <= 10 * max(A.step, B.step):
        raise ProximityError(f"loops are {sep:.2e} apart; refine the trace step")
    meta = {"separation": sep}
    if A.on_s3:
        pole = choose_pole(A, B) if pole is None else np.asarray(pole, dtype=float)
        PA = quat.stereographic(A.vertices, pole)
        PB = quat.stereographic(B.vertices, pole)
        meta["pole"] = pole.tolist()
    else:
        PA, PB = A.vertices, B.vertices
    raw = gauss_linking_sum(PA, PB)
    est = IntegerEstimate.from_raw(raw, 0.0, len(PA) * len(PB), None, **meta)
    if est.residual >= LINK_RESIDUAL_FAIL:
        raise InconclusiveError(f"linking sum {raw:.6f} is not near an integer", est)
    return est


# ---------------------------------------------------------------- export

def write_loops(path, loops, header=None):
    """Plain-text vertex table: '#' header lines, then one vertex per line."""
    with open(path, "w") as fh:
        for key, val in (header or {}).items():
            fh.write(f"# {key}: {val}\n")
        for n, L in enumerate(loops):
            fh.write(f"# loop {n} orientation={L.orientation:+d} vertices={len(L)} "
                     f"step={L.step} closure={L.closure:.3e}\n")
            np.savetxt(fh, L.vertices, fmt="%.17g")


def read_loops(path):
    loops, header, rows, info = [], {}, [], None

    def flush():
        if info is not None:
            loops.append(PolylineLoop(np.array(rows), info["orientation"], info["step"],
                                      info["closure"]))

    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("# loop"):
                flush()
                rows = []
                kv = dict(tok.split("=") for tok in line.split()[3:])
                info = {"orientation": int(kv["orientation"]), "step": float(kv["step"]),
                        "closure": float(kv["closure"])}
            elif line.startswith("#"):
                key, _, val = line[1:].partition(":")
                header[key.strip()] = val.strip()
            else:
                rows.append([float(x) for x in line.split()])
    flush()
    return header, loops
