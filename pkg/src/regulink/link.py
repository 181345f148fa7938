"""Parametrisation of X_d = {xy - z(z + v^d) = 0} and the framing of its link.

Ambient coordinates are (x, y, z, v) in C^4.  Two charts cover the punctured
variety:

* chart A: (t, x, v)  -> (x, t^2 x + t v^d, t x, v)
* chart B: (t', y, v) -> (t'^2 y - t' v^d, y, t' y - v^d, v)

glued by t' = 1/t, y = t^2 x + t v^d.  On the slice t = 0 chart A is the
inclusion of C^2_{x,v}; the normal frame there is built from the t-velocity
(v^d, x) and the (conjugated) gradient of g, both living in the (y, z) plane,
whose real coordinates (Re y, Im y, Re z, Im z) are identified with
(1, i, j, k).  S^3 points q = (w, x, y, z) are read as (x, v) = (w + i x, y + i z).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import quat
from .errors import DegenerateFrameError, DomainError, OverlapError
from .estimate import IntegerEstimate
from .invariants import degree
from .maps import MapHandle, column
from .so4 import PairDegrees, pair_degrees

CONVENTIONS = ("conjugate", "paper")
DEGENERATE_TOL = 1e-8
OVERLAP_TOL = 1e-9


def _c(a):
    return np.asarray(a, dtype=complex)


def _check_degree(d):
    if int(d) != d or d < 1:
        raise DomainError(f"d must be a positive integer, got {d!r}")
    return int(d)


@dataclass(frozen=True)
class AmbientPoint:
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    v: np.ndarray

    def g(self, d):
        return defining_polynomial(self.x, self.y, self.z, self.v, d)

    def as_array(self):
        return np.stack([_c(self.x), _c(self.y), _c(self.z), _c(self.v)], axis=-1)


@dataclass(frozen=True)
class ChartPointA:
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        if np.any(np.abs(self.x) + np.abs(self.v) == 0):
            raise DomainError("chart A point lies on the zero section (x = v = 0)")


@dataclass(frozen=True)
class ChartPointB:
    tp: np.ndarray
    y: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        if np.any(np.abs(self.y) + np.abs(self.v) == 0):
            raise DomainError("chart B point lies on the zero section (y = v = 0)")


def defining_polynomial(x, y, z, v, d):
    return x * y - z * (z + v ** d)


# ---------------------------------------------------------------- charts

def psi_a(p: ChartPointA, d) -> AmbientPoint:
    d = _check_degree(d)
    t, x, v = _c(p.t), _c(p.x), _c(p.v)
    return AmbientPoint(x, t * t * x + t * v ** d, t * x, v)


def psi_b(p: ChartPointB, d) -> AmbientPoint:
    d = _check_degree(d)
    tp, y, v = _c(p.tp), _c(p.y), _c(p.v)
    return AmbientPoint(tp * tp * y - tp * v ** d, y, tp * y - v ** d, v)


def chart_change(p: ChartPointA, d) -> ChartPointB:
    d = _check_degree(d)
    t, x, v = _c(p.t), _c(p.x), _c(p.v)
    if np.any(np.abs(t) < OVERLAP_TOL):
        raise OverlapError("chart change needs t != 0")
    return ChartPointB(1.0 / t, t * t * x + t * v ** d, v)


def chart_change_inverse(p: ChartPointB, d) -> ChartPointA:
    d = _check_degree(d)
    tp, y, v = _c(p.tp), _c(p.y), _c(p.v)
    if np.any(np.abs(tp) < OVERLAP_TOL):
        raise OverlapError("chart change needs t' != 0")
    return ChartPointA(1.0 / tp, tp * tp * y - tp * v ** d, v)


def shear_diffeotopy(p: ChartPointA, s, d) -> ChartPointA:
    """(t, x, v) -> (t, x - s t v^d, v), s in [0, 1]."""
    d = _check_degree(d)
    if not 0.0 <= s <= 1.0:
        raise DomainError("shear parameter must lie in [0, 1]")
    t, x, v = _c(p.t), _c(p.x), _c(p.v)
    return ChartPointA(t, x - s * t * v ** d, v)


def unshear(p: ChartPointA, s, d) -> ChartPointA:
    """Inverse of :func:`shear_diffeotopy` at the same s."""
    d = _check_degree(d)
    t, x, v = _c(p.t), _c(p.x), _c(p.v)
    return ChartPointA(t, x + s * t * v ** d, v)


def clutching(p: ChartPointA) -> ChartPointA:
    """Equatorial transition (t, x, v) -> (t, t^2 x, v) of T CP^1 + trivial line."""
    t, x, v = _c(p.t), _c(p.x), _c(p.v)
    return ChartPointA(t, t * t * x, v)


def _realify(Jc):
    """Real (2n x 2m) matrix of a complex-linear map, (Re, Im) block ordering."""
    re, im = Jc.real, Jc.imag
    top = np.concatenate([re, -im], axis=-1)
    bottom = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def chart_jacobian(chart, a, b, v, d):
    """Complex 4x3 Jacobian of the chart map at (a, b, v) = (t, x, v) or (t', y, v)."""
    a, b, v = _c(a), _c(b), _c(v)
    vd = v ** d
    dvd = d * v ** (d - 1)
    zero = np.zeros_like(a)
    one = np.ones_like(a)
    if chart == "A":
        t, x = a, b
        cols = [(zero, 2 * t * x + vd, x, zero),
                (one, t * t, t, zero),
                (zero, t * dvd, zero, one)]
    elif chart == "B":
        tp, y = a, b
        cols = [(2 * tp * y - vd, zero, y, zero),
                (tp * tp, one, tp, zero),
                (-tp * dvd, zero, -dvd, one)]
    else:
        raise DomainError(f"unknown chart {chart!r}")
    return np.stack([np.stack(c, axis=-1) for c in cols], axis=-1)


@dataclass
class ImmersionReport:
    d: int
    chart: str
    samples: int
    seed: int
    min_sigma6: float
    max_residual: float
    min_pair_distance: float
    counterexample: list | None = None

    @property
    def passed(self):
        return (self.counterexample is None and self.min_sigma6 > 1e-6
                and self.max_residual < 1e-12 and self.min_pair_distance > 0)


def sample_chart(n, seed, radius=2.0):
    """Uniform points of the complex polydisc |t|, |x|, |v| <= radius."""
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.random((3, n)))
    ph = rng.uniform(0, 2 * np.pi, (3, n))
    return r * np.exp(1j * ph)


def immersion_check(d, chart="A", samples=10_000, seed=0, radius=2.0, pairs=1000) -> ImmersionReport:
    """Rank, residual and injectivity spot checks of one chart map."""
    d = _check_degree(d)
    a, b, v = sample_chart(samples, seed, radius)
    if chart == "A":
        P = psi_a(ChartPointA(a, b, v), d)
    elif chart == "B":
        P = psi_b(ChartPointB(a, b, v), d)
    else:
        raise DomainError(f"unknown chart {chart!r}")
    resid = np.abs(P.g(d))
    J = _realify(chart_jacobian(chart, a, b, v, d))
    sig = np.linalg.svd(J, compute_uv=False)[:, 5]
    rng = np.random.default_rng([seed, 1])
    i, j = rng.integers(0, samples, (2, pairs))
    keep = i != j
    img = P.as_array()
    dist = np.linalg.norm(img[i[keep]] - img[j[keep]], axis=-1)
    bad = None
    k = int(np.argmin(sig))
    if sig[k] <= 1e-6:
        bad = [complex(a[k]), complex(b[k]), complex(v[k])]
    return ImmersionReport(d, chart, samples, seed, float(sig.min()), float(resid.max()),
                           float(dist.min()), bad)


# ---------------------------------------------------------------- normal frames

def _real4(c1, c2):
    return np.stack([c1.real, c1.imag, c2.real, c2.imag], axis=-1)


@dataclass
class NormalFrame:
    vectors: np.ndarray          # (..., 4, 4), columns u1..u4
    convention: str
    gram: np.ndarray = field(init=False)
    det: np.ndarray = field(init=False)

    def __post_init__(self):
        U = self.vectors
        self.gram = np.swapaxes(U, -1, -2) @ U
        self.det = np.linalg.det(U)

    @property
    def u(self):
        return tuple(np.moveaxis(self.vectors, -1, 0))


def frame_field(x, v, d, convention="conjugate") -> NormalFrame:
    """Frame (u1, u2, u3, u4) in the real (y, z) 4-space at (x, 0, 0, v).

    u1, u2 come from the t-velocity (v^d, x) and its multiple by -i; the
    literal convention (tag ``"paper"``) takes u3, u4 from the holomorphic gradient (x, -v^d)
    and its i-multiple, the ``conjugate`` one from (conj x, -conj v^d).
    """
    d = _check_degree(d)
    if convention not in CONVENTIONS:
        raise DomainError(f"unknown frame convention {convention!r}")
    x, v = _c(x), _c(v)
    if np.any(np.abs(x) + np.abs(v) == 0):
        raise DomainError("frame field is undefined at the origin")
    vd = v ** d
    w = (vd, x)
    if convention == "paper":
        c = (x, -vd)
    else:
        c = (np.conj(x), -np.conj(vd))
    u1 = _real4(*w)
    u2 = _real4(-1j * w[0], -1j * w[1])
    u3 = _real4(*c)
    u4 = _real4(1j * c[0], 1j * c[1])
    return NormalFrame(np.stack([u1, u2, u3, u4], axis=-1), convention)


SWAP_LAST = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=float)


def _gram_schmidt(U):
    Q, R = np.linalg.qr(U)
    sgn = np.sign(np.diagonal(R, axis1=-2, axis2=-1))
    return Q * sgn[..., None, :]


def frame_matrices(q, d, convention="conjugate"):
    """Orthonormalised frames at S^3 points ``q`` and their orientation flags.

    Columns are Gram-Schmidt'ed in order; where det < 0 the last two columns are
    swapped (flag True).  The literal convention raises
    :class:`DegenerateFrameError` at points where the frame loses rank.
    """
    q = np.asarray(q, dtype=float)
    x, v = quat.to_complex_pair(q)
    fr = frame_field(x, v, d, convention)
    scale = (np.abs(x) ** 2 + np.abs(v ** d) ** 2) ** 2
    degenerate = np.abs(fr.det) < DEGENERATE_TOL * scale
    if np.any(degenerate):
        raise DegenerateFrameError(f"{convention} frame degenerates at {int(degenerate.sum())} "
                                   "point(s)", q[degenerate])
    Q = _gram_schmidt(fr.vectors)
    flag = fr.det < 0
    Q = np.where(flag[..., None, None], Q @ SWAP_LAST, Q)
    return Q, flag


def frame_map(d, convention="conjugate") -> MapHandle:
    """S^3 -> SO(4), (x, v) -> orthonormalised frame (u1, u2, u3, u4)."""
    d = _check_degree(d)
    return MapHandle(f"frame:{d}:{convention}", "SO4",
                     lambda q: frame_matrices(q, d, convention)[0])


def branched_cover(q, d):
    """(x, v) -> (x, v^d), renormalised to S^3."""
    x, v = quat.to_complex_pair(np.asarray(q, dtype=float))
    return quat.normalize(quat.from_complex_pair(x, v ** d))


def orientation_flags(d, samples=10_000, seed=0, convention="conjugate"):
    """The set of swap flags seen on random S^3 points."""
    _, flag = frame_matrices(quat.sample_s3(samples, seed), d, convention)
    return set(np.unique(flag).tolist())


def literal_degeneracy_points(d, count=16, seed=0):
    """Points of S^3 on {x^2 + v^(2d) = 0}, where the literal-convention frame has rank 2.

    With x = +-i v^d the constraint |x|^2 + |v|^2 = 1 fixes r = |v| through
    r^2 + r^(2d) = 1.
    """
    d = _check_degree(d)
    r = brentq(lambda s: s * s + s ** (2 * d) - 1.0, 0.0, 1.0, xtol=1e-15)
    rng = np.random.default_rng(seed)
    phi = rng.uniform(0, 2 * np.pi, count)
    sign = rng.choice([-1.0, 1.0], count)
    v = r * np.exp(1j * phi)
    x = sign * 1j * v ** d
    return quat.from_complex_pair(x, v)


@dataclass
class DegeneracyReport:
    d: int
    convention: str
    samples: int
    seed: int
    min_ratio: float              # min |det| / (|x|^2 + |v^d|^2)^2 over random samples
    locus_points: np.ndarray = field(repr=False)
    locus_det: np.ndarray = field(repr=False)
    locus_residual: float = 0.0   # max |x^2 + v^(2d)| at the constructed points

    @property
    def degenerate(self):
        return bool(np.max(np.abs(self.locus_det)) < DEGENERATE_TOL) if self.convention == "paper" \
            else self.min_ratio < DEGENERATE_TOL


def degeneracy_report(d, convention="paper", samples=100_000, seed=0, locus=16) -> DegeneracyReport:
    d = _check_degree(d)
    q = quat.sample_s3(samples, seed)
    x, v = quat.to_complex_pair(q)
    fr = frame_field(x, v, d, convention)
    scale = (np.abs(x) ** 2 + np.abs(v ** d) ** 2) ** 2
    ratio = float(np.min(np.abs(fr.det) / scale))
    pts = literal_degeneracy_points(d, locus, seed)
    lx, lv = quat.to_complex_pair(pts)
    ldet = frame_field(lx, lv, d, convention).det
    res = float(np.max(np.abs(lx ** 2 + lv ** (2 * d))))
    return DegeneracyReport(d, convention, samples, seed, ratio, pts, ldet, res)


# ---------------------------------------------------------------- the link invariant

@dataclass
class LinkClass:
    d: int
    component: IntegerEstimate      # pi_3(S^3) component a - b
    swapped: bool
    pair: PairDegrees | None = None

    @property
    def mod2(self):
        return self.component.rounded % 2

    @property
    def sign(self):
        return int(np.sign(self.component.rounded))

    @property
    def consistent(self):
        return abs(self.component.rounded) == self.d


def link_class(d, samples=200_000, seed=0, cross_check=False, workers=None, strict=True) -> LinkClass:
    """The pi_3(S^3) component of the framing of L_d and its parity.

    Computed as the degree of q -> F(q) e1 with F = frame_map(d), which equals
    a - b of the pair degrees; ``cross_check`` also computes (a, b).
    """
    d = _check_degree(d)
    t0 = time.perf_counter()
    F = frame_map(d, "conjugate")
    flags = orientation_flags(d, 1000, seed)
    est = degree(column(F, name=f"frame:{d}·e1"), samples, seed, workers, strict)
    pair = pair_degrees(F, samples, seed, workers, strict) if cross_check else None
    est.elapsed = time.perf_counter() - t0
    return LinkClass(d, est, flags == {True}, pair)


# ---------------------------------------------------------------- tables

def write_table(path, rows, header, columns):
    with open(path, "w") as fh:
        for key, val in header.items():
            fh.write(f"# {key}: {val}\n")
        fh.write("# " + " ".join(columns) + "\n")
        np.savetxt(fh, np.asarray(rows, dtype=float), fmt="%.17g")


def write_frame_table(path, d, convention="conjugate", samples=100, seed=0):
    """Frames at random S^3 points: q (4 columns) then the 16 frame entries, row-major."""
    q = quat.sample_s3(samples, seed)
    Q, _ = frame_matrices(q, d, convention)
    rows = np.concatenate([q, Q.reshape(len(q), 16)], axis=1)
    cols = ["x1", "x2", "v1", "v2"] + [f"F{i}{j}" for i in range(4) for j in range(4)]
    write_table(path, rows, {"d": d, "convention": convention, "seed": seed}, cols)


def write_chart_table(path, d, chart="A", samples=100, seed=0):
    """Chart samples and their images: Re/Im of (a, b, v) then of (x, y, z, v)."""
    a, b, v = sample_chart(samples, seed)
    P = psi_a(ChartPointA(a, b, v), d) if chart == "A" else psi_b(ChartPointB(a, b, v), d)
    src = np.stack([a, b, v], axis=-1)
    img = P.as_array()
    rows = np.concatenate([src.real, src.imag, img.real, img.imag], axis=1)
    names = ["t", "x", "v"] if chart == "A" else ["t'", "y", "v"]
    cols = ([f"Re_{n}" for n in names] + [f"Im_{n}" for n in names]
            + [f"Re_{n}" for n in "xyzv"] + [f"Im_{n}" for n in "xyzv"])
    write_table(path, rows, {"d": d, "chart": chart, "seed": seed}, cols)
