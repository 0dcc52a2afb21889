"""Cross-checks between the compiled kernel core and the NumPy fallback,
and between the batch kernels and the scalar geometry reference."""

import numpy as np
import pytest

from risuav._kernels import _fallback
from risuav.geometry import Position3, segment_blocked

from conftest import random_boxes

try:
    from risuav._kernels import _core
except ImportError:
    _core = None

needs_core = pytest.mark.skipif(_core is None, reason="compiled core not built")

BACKENDS = [_fallback] + ([_core] if _core is not None else [])


def _random_inputs(seed, m=40, n=15, n_boxes=20):
    rng = np.random.default_rng(seed)
    obstacles = random_boxes(rng, n_boxes)
    boxes = np.ascontiguousarray([o.as_slab_row() for o in obstacles])
    tx = np.ascontiguousarray(np.column_stack([rng.uniform(0, 100, (m, 2)), np.full(m, 1.5)]))
    rxp = np.ascontiguousarray(np.column_stack([rng.uniform(0, 100, (m, 2)), np.full(m, 1.5)]))
    cu = np.ascontiguousarray(np.column_stack([rng.uniform(0, 100, (n, 2)), np.full(n, 1.5)]))
    kappa_tab = np.ascontiguousarray(rng.uniform(1e3, 7e4, (m, 4)))
    fsq_tab = np.ascontiguousarray(rng.uniform(0.01, 4.0, (n, 2)))
    plf_d2d = np.ascontiguousarray(rng.uniform(1e7, 1e9, 4))
    plf_cu = np.ascontiguousarray(rng.uniform(1e10, 1e12, 2))
    beta = np.array([2.0, 2.92])
    return boxes, tx, rxp, cu, kappa_tab, fsq_tab, plf_d2d, plf_cu, beta


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.backend_name())
def test_classify_matches_scalar_reference(backend):
    rng = np.random.default_rng(0)
    obstacles = random_boxes(rng, 15)
    boxes = np.ascontiguousarray([o.as_slab_row() for o in obstacles])
    pts = np.ascontiguousarray(
        np.column_stack([rng.uniform(0, 100, (200, 2)), rng.uniform(0, 10, 200)])
    )
    x, y, z = 50.0, 60.0, 25.0
    flags = backend.classify_to_point(pts, x, y, z, boxes)
    target = Position3(x, y, z)
    for i in range(pts.shape[0]):
        p = Position3(*pts[i])
        expected = any(segment_blocked(p, target, o) for o in obstacles)
        assert bool(flags[i]) == expected


@needs_core
@pytest.mark.parametrize("seed", range(8))
def test_classify_backends_agree(seed):
    boxes, tx, rxp, cu, *_ = _random_inputs(seed)
    rng = np.random.default_rng(seed + 100)
    for _ in range(20):
        x, y = rng.uniform(0, 100, 2)
        a = _fallback.classify_to_point(tx, x, y, 25.0, boxes)
        b = _core.classify_to_point(tx, x, y, 25.0, boxes)
        assert np.array_equal(a, b)


@needs_core
@pytest.mark.parametrize("seed", range(5))
def test_eval_backends_agree(seed):
    boxes, tx, rxp, cu, kappa_tab, fsq_tab, plf_d2d, plf_cu, beta = _random_inputs(seed)
    rng = np.random.default_rng(seed + 200)
    m, n = tx.shape[0], cu.shape[0]
    for _ in range(10):
        x, y = rng.uniform(0, 100, 2)
        c1 = _fallback.classify_to_point(tx, x, y, 25.0, boxes).astype(np.intp)
        c2 = _fallback.classify_to_point(rxp, x, y, 25.0, boxes).astype(np.intp)
        cc = c1 * 2 + c2
        eta = kappa_tab[np.arange(m), cc] * plf_d2d[cc]
        ra, ta, gxa, gya = _fallback.d2d_eval(x, y, 25.0, tx, rxp, eta, beta[c1], beta[c2])
        rb, tb, gxb, gyb = _core.d2d_eval(x, y, 25.0, tx, rxp, eta, beta[c1], beta[c2])
        np.testing.assert_allclose(ra, rb, rtol=1e-12)
        assert ta == pytest.approx(tb, rel=1e-12)
        assert gxa == pytest.approx(gxb, rel=1e-9, abs=1e-12)
        assert gya == pytest.approx(gyb, rel=1e-9, abs=1e-12)

        cn = _fallback.classify_to_point(cu, x, y, 25.0, boxes).astype(np.intp)
        lam = fsq_tab[np.arange(n), cn] * plf_cu[cn]
        ra, ta, gxa, gya = _fallback.cu_eval(x, y, 25.0, cu, lam, beta[cn])
        rb, tb, gxb, gyb = _core.cu_eval(x, y, 25.0, cu, lam, beta[cn])
        np.testing.assert_allclose(ra, rb, rtol=1e-12)
        assert ta == pytest.approx(tb, rel=1e-12)
        assert gxa == pytest.approx(gxb, rel=1e-9, abs=1e-12)
        assert gya == pytest.approx(gyb, rel=1e-9, abs=1e-12)


@needs_core
@pytest.mark.parametrize("seed", range(4))
def test_joint_scan_backends_agree(seed):
    boxes, tx, rxp, cu, kappa_tab, fsq_tab, plf_d2d, plf_cu, beta = _random_inputs(
        seed, m=12, n=6, n_boxes=10
    )
    args = (
        48.0, 53.0, 25.0, 24, 3.0, 11, 0.0, 100.0, 0.0, 100.0,
        tx, rxp, cu, boxes, kappa_tab, fsq_tab, plf_d2d, plf_cu, beta, 1.7,
    )
    xa, ya, ta, ea, impa = _fallback.joint_scan(*args)
    xb, yb, tb, eb, impb = _core.joint_scan(*args)
    assert ea == eb
    assert (xa, ya) == pytest.approx((xb, yb), abs=1e-9)
    assert ta == pytest.approx(tb, rel=1e-9)
    assert [i[0] for i in impa] == [i[0] for i in impb]
