"""Acceptance criteria, one test each, at the stated tolerances and time budgets.

Every test prints a single ``[PASS]``/``[FAIL]`` line; the lines are repeated in
the pytest terminal summary.  Run directly (``python3 tests/test_acceptance.py``)
to get only those lines.
"""
import json
import time

import numpy as np
import pytest

from regulink import link, maps, quat
from regulink.cli import main as cli_main
from regulink.curves import circle_hausdorff, linking_number, trace_preimage
from regulink.diffcalc import fd_jacobians
from regulink.invariants import degree, hopf_invariant, random_regular_pairs
from regulink.so4 import isoclinic_split, pair_degrees
from regulink.verify import HOPF_FIBERS, VerifyConfig, chart_checks, frame_checks
from regulink.report import RunReport

RESULTS = []


def record(n, title, ok, detail, elapsed):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} ({detail}; {elapsed:.1f} s)"
    RESULTS.append(line)
    print(line, flush=True)
    return ok


def failed_checks(rep: RunReport):
    return [f"{c.name}={c.raw}" for c in rep.checks if not c.passed]


def test_criterion_1_hopf_fibration():
    t0 = time.perf_counter()
    est = hopf_invariant(maps.hopf_composite(1))
    dists = {}
    for label, (value, e1, e2) in HOPF_FIBERS.items():
        loops = trace_preimage(maps.hopf_composite(1), value)
        dists[label] = max(circle_hausdorff(L, e1, e2) for L in loops) if len(loops) == 1 else np.inf
    dt = time.perf_counter() - t0
    ok = est.rounded == 1 and est.residual < 0.01 and max(dists.values()) < 1e-5 and dt < 30
    detail = (f"invariant {est.raw:.6f}, Hausdorff N {dists['N']:.2e}, "
              f"-N {dists['-N']:.2e}")
    assert record(1, "Hopf fibration has invariant 1, fibres are great circles", ok, detail, dt)


def test_criterion_2_hopf_invariant_scales(tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "lemmaA.json"
    code = cli_main(["verify", "lemmaA", "--json", str(out)])
    rep = json.loads(out.read_text())
    dt = time.perf_counter() - t0
    hopf = [c for c in rep["checks"] if c["name"].startswith("hopf(")]
    by_m = {m: [c["rounded"] for c in hopf if f"mu_{m})" in c["name"]] for m in (1, 2, 3)}
    ok = (code == 0 and all(by_m[m] == [m, m, m] for m in by_m)
          and all(c["residual"] < 0.01 for c in hopf) and dt < 180)
    assert record(2, "Hopf invariant of eval_N o mu_m is m over 3 pairs each", ok,
                  f"exit {code}, values {by_m}", dt)


def test_criterion_3_degree_engine():
    t0 = time.perf_counter()
    ests = {m: degree(maps.power(m), 200_000, seed=m) for m in (1, 2, 3, 4)}
    ident = degree(maps.identity(), 200_000)
    dt = time.perf_counter() - t0
    ok = (all(e.rounded == m and e.stderr < 0.05 for m, e in ests.items())
          and ident.rounded == 1 and dt < 120)
    detail = ", ".join(f"pow_{m} {e.raw:.4f}+-{e.stderr:.4f}" for m, e in ests.items())
    assert record(3, "degree(pow_m) = m, degree(identity) = 1", ok,
                  f"{detail}, identity {ident.raw:.4f}", dt)


def test_criterion_4_pair_degrees():
    t0 = time.perf_counter()
    pds = {m: pair_degrees(maps.j4_mu(m), 200_000, seed=0) for m in (1, 2)}
    dt = time.perf_counter() - t0
    ok = all(pd.as_tuple() == (m, m) and pd.stable == 2 * m and pd.mod2 == 0
             for m, pd in pds.items())
    detail = ", ".join(f"m={m}: (a,b)=({pd.a.raw:.3f},{pd.b.raw:.3f}) stable {pd.stable}"
                       for m, pd in pds.items())
    assert record(4, "pair degrees of j4 o mu_m are (m, m), stable 2m, mod 2 zero", ok, detail, dt)


def test_criterion_5_parametrisation():
    t0 = time.perf_counter()
    rep = RunReport("acceptance:5", {}, 0, 10_000)
    chart_checks(rep, VerifyConfig(chart_d=(1, 2, 3), chart_samples=10_000))
    dt = time.perf_counter() - t0
    worst = {a: max(c.raw for c in rep.checks if c.anchor == a)
             for a in ("chart-a-lies-on-variety", "chart-b-lies-on-variety",
                       "charts-glue-by-coordinate-change")}
    sig = min(c.raw for c in rep.checks if c.anchor == "chart-is-an-immersion")
    detail = (f"|g psi_a| {worst['chart-a-lies-on-variety']:.1e}, "
              f"|g psi_b| {worst['chart-b-lies-on-variety']:.1e}, "
              f"gluing {worst['charts-glue-by-coordinate-change']:.1e}, min sigma6 {sig:.3f}")
    assert record(5, "chart identities, gluing and immersion", rep.passed, detail, dt), \
        failed_checks(rep)


def test_criterion_6_frames():
    t0 = time.perf_counter()
    rep = RunReport("acceptance:6", {}, 0, 100_000)
    frame_checks(rep, VerifyConfig(chart_d=(1, 2, 3), frame_samples=100_000))
    dt = time.perf_counter() - t0
    ratio = min(c.raw for c in rep.checks if c.anchor == "conjugate-frame-never-degenerates")
    lit = max(c.raw for c in rep.checks if c.anchor == "literal-frame-degenerates")
    detail = f"conjugate min |det|/bound {ratio:.6f}, literal max |det| on locus {lit:.1e}"
    assert record(6, "conjugate frame bounded below, literal frame degenerates on locus",
                  rep.passed, detail, dt), failed_checks(rep)


def test_criterion_7_link_classes():
    t0 = time.perf_counter()
    classes = {d: link.link_class(d, 200_000, seed=0) for d in (1, 2, 3, 4)}
    dt = time.perf_counter() - t0
    comps = {d: c.component.rounded for d, c in classes.items()}
    mod2 = tuple(classes[d].mod2 for d in (1, 2, 3, 4))
    signs = {classes[d].sign for d in (1, 2, 3)}
    ok = (all(abs(comps[d]) == d and classes[d].component.accepted for d in (1, 2, 3))
          and len(signs) == 1 and mod2 == (1, 0, 1, 0) and dt < 600)
    assert record(7, "|a-b| = d with fixed sign, mod 2 classes (1,0,1,0)", ok,
                  f"components {comps}, mod2 {mod2}", dt)


def test_criterion_8_property_suites():
    t0 = time.perf_counter()
    checks = {}
    f = maps.hopf_composite(1)
    A, = trace_preimage(f, quat.normalize(np.array([0.36, 0.48, 0.8])))
    B, = trace_preimage(f, quat.normalize(np.array([-0.48, 0.6, -0.64])))
    ab = linking_number(A, B)
    checks["symmetry"] = ab.rounded == linking_number(B, A).rounded == 1
    checks["antisymmetry"] = (linking_number(A, B.reversed()).rounded == -1
                              and linking_number(A.reversed(), B).rounded == -1)
    checks["subdivision"] = abs(linking_number(A.refined(), B.refined()).raw - ab.raw) < 1e-9
    poles = quat.sample_s3(3, 1)
    raws = [linking_number(A, B, pole=p) for p in poles]
    checks["projection"] = (all(r.rounded == 1 for r in raws)
                            and max(abs(r.raw - raws[0].raw) for r in raws) < 1e-9)
    g = maps.hopf_composite(2)
    vals = {hopf_invariant(g, v1, v2).rounded for v1, v2 in random_regular_pairs(g, 3, seed=3)}
    checks["regular-value independence"] = vals == {2}
    rot = [quat.isoclinic_matrix(*quat.sample_s3(2, s)) for s in range(3)]
    checks["rotation precomposition"] = all(
        degree(maps.rotate_domain(maps.power(3), R), 50_000, seed=s).rounded == 3
        for s, R in enumerate(rot))
    pairs = quat.sample_s3(200, 2).reshape(100, 2, 4)
    err = 0.0
    for qL, qR in pairs:
        p = isoclinic_split(quat.isoclinic_matrix(qL, qR))
        s = np.sign(p.qL @ qL)
        err = max(err, np.abs(s * p.qL - qL).max(), np.abs(s * p.qR - qR).max())
    checks["isoclinic round trip"] = err < 1e-9
    pts = quat.sample_s3(1000, 5)
    fd = max(float(np.max(np.abs(h.jacobian(pts) - fd_jacobians(h, pts))))
             for h in (maps.power(3), maps.mu(2), maps.hopf_composite(3),
                       maps.compose(maps.power(2), maps.power(2))))
    checks["analytic vs finite differences"] = fd < 1e-5
    dt = time.perf_counter() - t0
    ok = all(checks.values()) and dt < 300
    bad = [k for k, v in checks.items() if not v]
    detail = (f"{sum(checks.values())}/{len(checks)} properties, split err {err:.1e}, "
              f"FD err {fd:.1e}" + (f", failing {bad}" if bad else ""))
    assert record(8, "property suites", ok, detail, dt)


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
