"""Machine-readable run reports.

Schema (key order is fixed so reports diff cleanly)::

    {command, params, checks: [{name, anchor, raw, rounded, residual, stderr, pass}],
     seed, samples, elapsed_ms, conventions}

``elapsed_ms`` is the only field that may differ between two runs with the
same command line.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .curves import GAUSS_SIGN
from .estimate import IntegerEstimate
from .invariants import HOPF_SIGN

CONVENTIONS = {
    "quaternion_order": "w,x,y,z",
    "imaginary_axes": "i,j,k <-> e1,e2,e3",
    "evaluation_point_N": [1.0, 0.0, 0.0],
    "degree_m_map": "(z1,z2) -> (z1^m, z2)/|.|, q = z1 + z2 j",
    "s3_frame": "(i q, j q, k q)",
    "s2_frame": "Gram-Schmidt of least aligned axis, then n x e_a",
    "stereographic": "left-translate pole to 1, project from 1",
    "fiber_orientation": "det[k, w1, w2] > 0",
    "gauss_sign": GAUSS_SIGN,
    "hopf_sign": HOPF_SIGN,
    "so4_basis": "left-mult = (1,0), j4(rho) = (1,1)",
    "stabilization": "a + b",
    "link_s3_coordinates": "(x, v) = (w + i x, y + i z)",
    "normal_4space": "(Re y, Im y, Re z, Im z) <-> (1, i, j, k)",
    "frame_convention": "conjugate gradient",
    "frame_orientation": "swap u3,u4 when det < 0",
}


def _num(x):
    if x is None:
        return None
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        return x
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class Check:
    name: str
    anchor: str
    raw: float | None
    rounded: int | None
    residual: float | None
    stderr: float | None
    passed: bool

    @classmethod
    def from_estimate(cls, name, anchor, est: IntegerEstimate, expected=None, residual_tol=0.1):
        ok = est.residual < residual_tol and est.stderr < 0.05
        if expected is not None:
            ok = ok and est.rounded == expected
        return cls(name, anchor, est.raw, est.rounded, est.residual, est.stderr, bool(ok))

    @classmethod
    def bound(cls, name, anchor, value, limit, below=True):
        """A real-valued measurement gated by ``value < limit`` (or ``>`` when below=False)."""
        ok = value < limit if below else value > limit
        return cls(name, anchor, value, None, None, None, bool(ok))

    @classmethod
    def flag(cls, name, anchor, ok, raw=None):
        return cls(name, anchor, raw, None, None, None, bool(ok))

    def to_dict(self):
        return {"name": self.name, "anchor": self.anchor, "raw": _num(self.raw),
                "rounded": self.rounded, "residual": _num(self.residual),
                "stderr": _num(self.stderr), "pass": self.passed}


@dataclass
class RunReport:
    command: str
    params: dict
    seed: int
    samples: int
    checks: list = field(default_factory=list)
    elapsed_ms: float = 0.0
    inconclusive: bool = False   # some estimate failed its precision gates

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, check: Check):
        self.checks.append(check)
        return check

    def to_dict(self):
        return {
            "command": self.command,
            "params": self.params,
            "checks": [c.to_dict() for c in self.checks],
            "seed": self.seed,
            "samples": self.samples,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "conventions": CONVENTIONS,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def summary_lines(self):
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            val = c.rounded if c.rounded is not None else c.raw
            yield f"[{mark}] {self.command}: {c.name} = {val}"


def dump_reports(path, reports):
    data = [r.to_dict() for r in reports]
    if len(data) == 1:
        data = data[0]
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
