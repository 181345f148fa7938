import numpy as np
import pytest
from hypothesis import given, settings

from regulink import maps, quat
from regulink.curves import (GAUSS_SIGN, PolylineLoop, TraceConfig, circle_hausdorff,
                             gauss_linking_sum, linking_number, read_loops, trace_preimage,
                             write_loops)
from regulink.errors import DomainError, NotRegularError, ProximityError

from conftest import unit_quaternions

HOPF = maps.hopf_composite(1)


def great_circle(e1, e2, n=400, step=None):
    th = np.linspace(0, 2 * np.pi, n, endpoint=False)
    V = np.outer(np.cos(th), e1) + np.outer(np.sin(th), e2)
    return PolylineLoop(V, 1, step or 2 * np.pi / n, 0.0)


def planar_circle(center, normal_axis, radius=1.0, n=400):
    th = np.linspace(0, 2 * np.pi, n, endpoint=False)
    a, b = [k for k in range(3) if k != normal_axis]
    V = np.zeros((n, 3))
    V[:, a], V[:, b] = radius * np.cos(th), radius * np.sin(th)
    return PolylineLoop(V + center, 1, 2 * np.pi / n, 0.0)


@pytest.fixture(scope="module")
def hopf_fibres():
    v1, v2 = quat.normalize(np.array([0.36, 0.48, 0.8])), quat.normalize(np.array([-0.48, 0.6, -0.64]))
    A, = trace_preimage(HOPF, v1)
    B, = trace_preimage(HOPF, v2)
    return A, B


def test_trace_config_validates_step():
    with pytest.raises(DomainError):
        TraceConfig(step=1e-5)
    with pytest.raises(DomainError):
        TraceConfig(seed_budget=5)


def test_polyline_invariants():
    with pytest.raises(DomainError):
        great_circle([1, 0, 0, 0], [0, 1, 0, 0], n=8)
    V = great_circle([1, 0, 0, 0], [0, 1, 0, 0]).vertices * 1.01
    with pytest.raises(DomainError):
        PolylineLoop(V, 1, 0.02, 0.0)


def test_hopf_fibre_over_north_is_great_circle():
    loops = trace_preimage(HOPF, quat.NORTH, TraceConfig(step=2e-3))
    assert len(loops) == 1
    assert circle_hausdorff(loops[0], [1, 0, 0, 0], [0, 1, 0, 0]) < 1e-6


def test_hopf_fibre_over_south_is_great_circle():
    loops = trace_preimage(HOPF, -quat.NORTH)
    assert len(loops) == 1
    assert circle_hausdorff(loops[0], [0, 0, 1, 0], [0, 0, 0, 1]) < 1e-5


def test_traced_loop_contract(hopf_fibres):
    for L in hopf_fibres:
        assert len(L) >= 12
        assert L.gaps().max() < 2 * L.step
        assert L.closure < L.step
        assert np.allclose(np.linalg.norm(L.vertices, axis=1), 1, atol=1e-10)


def test_mu2_fibre_residuals():
    f = maps.hopf_composite(2)
    v = quat.normalize(np.array([0.2, -0.5, 0.7]))
    cfg = TraceConfig()
    loops = trace_preimage(f, v, cfg)
    assert 1 <= len(loops) <= 4
    for L in loops:
        assert np.isfinite(L.length)
        assert np.max(np.linalg.norm(f(L.vertices) - v, axis=1)) < cfg.corrector_tol


def test_trace_rejects_critical_value():
    with pytest.raises(NotRegularError):
        trace_preimage(maps.hopf_composite(2), -quat.NORTH)


def test_trace_of_missed_value_is_empty():
    f = maps.constant(quat.NORTH, "S2")
    assert trace_preimage(f, -quat.NORTH) == []


def test_orientation_flag_flips_direction():
    cfg = TraceConfig()
    A, = trace_preimage(HOPF, quat.NORTH, cfg)
    B, = trace_preimage(HOPF, quat.NORTH, cfg, orientation=-1)
    assert A.orientation == 1 and B.orientation == -1
    ta = A.vertices[1] - A.vertices[0]
    # same start point, opposite direction of travel
    assert np.allclose(A.vertices[0], B.vertices[0])
    assert ta @ (B.vertices[1] - B.vertices[0]) < 0


def test_orthogonal_great_circles_link_once():
    A = great_circle([1, 0, 0, 0], [0, 1, 0, 0])
    B = great_circle([0, 0, 1, 0], [0, 0, 0, 1])
    lk = linking_number(A, B)
    assert abs(lk.rounded) == 1 and lk.residual < 1e-6


def test_split_circles_do_not_link():
    A = planar_circle(np.zeros(3), 2)
    B = planar_circle(np.array([10.0, 0, 0]), 0)
    assert linking_number(A, B).rounded == 0


def gauss_quadrature(ca, cb, n=600):
    """Midpoint rule for the Gauss double integral of two smooth parametrised curves."""
    s = (np.arange(n) + 0.5) * 2 * np.pi / n
    a, da = ca(s)
    b, db = cb(s)
    r = a[:, None, :] - b[None, :, :]
    cross = np.cross(da[:, None, :], db[None, :, :])
    dens = np.sum(cross * r, axis=-1) / np.linalg.norm(r, axis=-1) ** 3
    return dens.sum() * (2 * np.pi / n) ** 2 / (4 * np.pi)


def test_gauss_sum_matches_quadrature_oracle():
    def ca(s):
        return np.stack([np.cos(s), np.sin(s), 0 * s], 1), np.stack([-np.sin(s), np.cos(s), 0 * s], 1)

    def cb(s):
        return (np.stack([1 + np.cos(s), 0 * s, np.sin(s)], 1),
                np.stack([-np.sin(s), 0 * s, np.cos(s)], 1))

    oracle = gauss_quadrature(ca, cb)
    n = 500
    th = np.linspace(0, 2 * np.pi, n, endpoint=False)
    pa, pb = ca(th)[0], cb(th)[0]
    assert abs(oracle - round(oracle)) < 1e-3
    assert gauss_linking_sum(pa, pb) == pytest.approx(oracle, abs=1e-3)
    assert GAUSS_SIGN in (1.0, -1.0)


def test_linking_symmetry(hopf_fibres):
    A, B = hopf_fibres
    ab, ba = linking_number(A, B), linking_number(B, A)
    assert ab.rounded == ba.rounded == 1
    assert ab.residual < 1e-6


def test_linking_antisymmetry(hopf_fibres):
    A, B = hopf_fibres
    assert linking_number(A, B.reversed()).rounded == -1
    assert linking_number(A.reversed(), B).rounded == -1


def test_subdivision_invariance(hopf_fibres):
    A, B = hopf_fibres
    raw = linking_number(A, B).raw
    assert abs(linking_number(A.refined(), B).raw - raw) < 1e-9
    assert abs(linking_number(A, B.refined()).raw - raw) < 1e-9


def test_projection_invariance(hopf_fibres):
    A, B = hopf_fibres
    poles = quat.sample_s3(4, 9)
    vals = [linking_number(A, B, pole=p) for p in poles]
    assert {v.rounded for v in vals} == {1}
    assert max(abs(v.raw - vals[0].raw) for v in vals) < 1e-9


@settings(max_examples=15)
@given(unit_quaternions(), unit_quaternions())
def test_linking_invariant_under_so4(a, b):
    A = great_circle([1, 0, 0, 0], [0, 1, 0, 0], n=300)
    B = great_circle([0, 0, 1, 0], [0, 0, 0, 1], n=300)
    base = linking_number(A, B).rounded
    M = quat.isoclinic_matrix(a, b)
    A2 = PolylineLoop(A.vertices @ M.T, 1, A.step, 0.0)
    B2 = PolylineLoop(B.vertices @ M.T, 1, B.step, 0.0)
    assert linking_number(A2, B2).rounded == base


def test_proximity_error():
    A = great_circle([1, 0, 0, 0], [0, 1, 0, 0], step=0.05)
    B = PolylineLoop(quat.normalize(A.vertices + 0.01 * np.array([0, 0, 1, 0])), 1, 0.05, 0.0)
    with pytest.raises(ProximityError):
        linking_number(A, B)


def test_loop_export_round_trip(tmp_path, hopf_fibres):
    path = tmp_path / "loops.txt"
    write_loops(path, hopf_fibres, {"map": HOPF.name, "seed": 0})
    text = path.read_text().splitlines()
    assert text[0] == f"# map: {HOPF.name}"
    header, loops = read_loops(path)
    assert header["seed"] == "0"
    assert len(loops) == 2
    for a, b in zip(loops, hopf_fibres):
        assert np.array_equal(a.vertices, b.vertices)
        assert a.orientation == b.orientation
