"""NumPy implementation of the hot evaluation kernels.

This is the reference backend: the compiled extension in ``_core.pyx``
mirrors these functions one-for-one.  Within a backend every code path that
feeds a throughput total uses the same per-link arithmetic and the same
left-to-right accumulation, so identity cases (equal positions, equal
ratios) compare exactly instead of merely closely.

Array conventions: positions are float64 ``(n, 3)`` rows of x/y/z in
meters; obstacle slabs are float64 ``(n, 5)`` rows of
x_min/x_max/y_min/y_max/height with an implicit z_min of 0.
"""

from __future__ import annotations

import math

import numpy as np

_LN2 = math.log(2.0)


def backend_name() -> str:
    return "fallback"


def _seq_sum(values) -> float:
    # Left-to-right accumulation; keep in sync with the C loop in _core.
    total = 0.0
    for v in values:
        total += v
    return total


def _slab(p, d, lo, hi):
    """Per-axis slab interval (t1, t2) for rows p + t*d against [lo, hi]."""
    par = d == 0.0
    safe = np.where(par, 1.0, d)
    ta = (lo - p) / safe
    tb = (hi - p) / safe
    t1 = np.minimum(ta, tb)
    t2 = np.maximum(ta, tb)
    inside = (p >= lo) & (p <= hi)
    t1 = np.where(par, np.where(inside, -np.inf, np.inf), t1)
    t2 = np.where(par, np.where(inside, np.inf, -np.inf), t2)
    return t1, t2


def classify_to_point(pts, x, y, z, boxes):
    """Blocked flag (1 = NLoS) for the segment from each point to (x, y, z).

    A segment is blocked when its open interior intersects the closed box;
    an endpoint lying exactly on a face does not count.
    """
    n = pts.shape[0]
    if boxes.shape[0] == 0 or n == 0:
        return np.zeros(n, dtype=np.uint8)
    px = pts[:, 0][:, None]
    py = pts[:, 1][:, None]
    pz = pts[:, 2][:, None]
    t1x, t2x = _slab(px, x - px, boxes[:, 0], boxes[:, 1])
    t1y, t2y = _slab(py, y - py, boxes[:, 2], boxes[:, 3])
    t1z, t2z = _slab(pz, z - pz, 0.0, boxes[:, 4])
    tmin = np.maximum(np.maximum(t1x, t1y), t1z)
    tmax = np.minimum(np.minimum(t2x, t2y), t2z)
    hit = (tmin <= tmax) & (tmax > 0.0) & (tmin < 1.0)
    return hit.any(axis=1).astype(np.uint8)


def d2d_eval(x, y, z, tx, rxp, eta, b1, b2):
    """Per-pair two-hop rates plus the gradient of their sum at (x, y, z).

    Rate per pair: log2(1 + eta * d_tx^-b1 * d_rx^-b2) with d the 3-D
    distances from the evaluation point to the pair's endpoints.
    Returns (rates, total, gx, gy); the total is the left-to-right sum.
    """
    dx1 = x - tx[:, 0]
    dy1 = y - tx[:, 1]
    dz1 = z - tx[:, 2]
    d1sq = dx1 * dx1 + dy1 * dy1 + dz1 * dz1
    d1 = np.sqrt(d1sq)
    dx2 = x - rxp[:, 0]
    dy2 = y - rxp[:, 1]
    dz2 = z - rxp[:, 2]
    d2sq = dx2 * dx2 + dy2 * dy2 + dz2 * dz2
    d2 = np.sqrt(d2sq)
    snr = eta * (d1 ** (-b1) * d2 ** (-b2))
    rates = np.log2(1.0 + snr)
    w = snr / (_LN2 * (1.0 + snr))
    gx = -float(np.sum(w * (b1 * dx1 / d1sq + b2 * dx2 / d2sq)))
    gy = -float(np.sum(w * (b1 * dy1 / d1sq + b2 * dy2 / d2sq)))
    return rates, _seq_sum(rates.tolist()), gx, gy


def cu_eval(x, y, z, cu, lam, b):
    """Single-hop rates log2(1 + lam * d^-b) plus gradient of their sum."""
    dx = x - cu[:, 0]
    dy = y - cu[:, 1]
    dz = z - cu[:, 2]
    dsq = dx * dx + dy * dy + dz * dz
    d = np.sqrt(dsq)
    snr = lam * d ** (-b)
    rates = np.log2(1.0 + snr)
    w = snr / (_LN2 * (1.0 + snr))
    gx = -float(np.sum(w * b * dx / dsq))
    gy = -float(np.sum(w * b * dy / dsq))
    return rates, _seq_sum(rates.tolist()), gx, gy


def joint_scan(
    x0,
    y0,
    z,
    num_directions,
    step_size,
    max_steps,
    bx_lo,
    bx_hi,
    by_lo,
    by_hi,
    tx,
    rxp,
    cu,
    boxes,
    kappa_tab,
    fsq_tab,
    plf_d2d,
    plf_cu,
    beta,
    phi,
):
    """Directional walk minimizing the per-capita throughput ratio deviation.

    Pattern search over num_directions equally spaced directions: from the
    current best point, step step_size along the direction while the value
    strictly improves (at most max_steps accepted steps per direction), then
    turn to the next direction.  A candidate outside the closed bounds box
    or failing to improve ends the direction (the anchor does not move, so
    further probes along that direction would repeat the same point).  Link
    classes are re-derived at every probe and eta/lambda resolved from the
    per-pair kappa table (columns indexed hop1*2 + hop2) and the per-CU
    |f|^2 table.  Returns (best_x, best_y, best_t, evaluations,
    improvements) where improvements lists (eval_ordinal, x, y, t) for
    every accepted move, starting with the anchor at ordinal 0.
    """
    m = tx.shape[0]
    n = cu.shape[0]
    rows_m = np.arange(m)
    rows_n = np.arange(n)

    def t_at(px, py):
        c1 = classify_to_point(tx, px, py, z, boxes).astype(np.intp)
        c2 = classify_to_point(rxp, px, py, z, boxes).astype(np.intp)
        cc = c1 * 2 + c2
        eta = kappa_tab[rows_m, cc] * plf_d2d[cc]
        _, d2d_total, _, _ = d2d_eval(px, py, z, tx, rxp, eta, beta[c1], beta[c2])
        cn = classify_to_point(cu, px, py, z, boxes).astype(np.intp)
        lam = fsq_tab[rows_n, cn] * plf_cu[cn]
        _, cu_total, _, _ = cu_eval(px, py, z, cu, lam, beta[cn])
        if d2d_total == 0.0:
            return math.inf
        return abs((cu_total / n) / (d2d_total / m) - phi)

    best_x = x0
    best_y = y0
    best_t = t_at(x0, y0)
    improvements = [(0, x0, y0, best_t)]
    evals = 1
    for i in range(num_directions):
        theta = 2.0 * math.pi * i / num_directions
        dx = math.cos(theta)
        dy = math.sin(theta)
        for _ in range(max_steps):
            px = best_x + dx * step_size
            py = best_y + dy * step_size
            if px < bx_lo or px > bx_hi or py < by_lo or py > by_hi:
                break
            t = t_at(px, py)
            evals += 1
            if t < best_t:
                best_t = t
                best_x = px
                best_y = py
                improvements.append((evals - 1, px, py, t))
            else:
                break
    return best_x, best_y, best_t, evals, improvements
