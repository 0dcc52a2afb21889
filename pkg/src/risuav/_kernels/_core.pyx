# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementation of the hot evaluation kernels.

Mirrors risuav._kernels._fallback one-for-one; see that module for the
contract.  Per-link rate arithmetic and totals accumulate left-to-right in
the same order as the fallback so each backend is internally consistent
across code paths.
"""

import math

import numpy as np

from libc.math cimport INFINITY, cos, fabs, log2, pow, sin, sqrt


def backend_name():
    return "compiled"


cdef inline bint _box_hit(
    double px, double py, double pz,
    double dx, double dy, double dz,
    double x0, double x1, double y0, double y1, double z1,
) noexcept nogil:
    """Open-segment-vs-closed-box slab test; endpoint on a face is a miss."""
    cdef double tmin = -INFINITY
    cdef double tmax = INFINITY
    cdef double ta, tb, tmp

    if dx == 0.0:
        if px < x0 or px > x1:
            return False
    else:
        ta = (x0 - px) / dx
        tb = (x1 - px) / dx
        if ta > tb:
            tmp = ta; ta = tb; tb = tmp
        if ta > tmin:
            tmin = ta
        if tb < tmax:
            tmax = tb
        if tmin > tmax:
            return False

    if dy == 0.0:
        if py < y0 or py > y1:
            return False
    else:
        ta = (y0 - py) / dy
        tb = (y1 - py) / dy
        if ta > tb:
            tmp = ta; ta = tb; tb = tmp
        if ta > tmin:
            tmin = ta
        if tb < tmax:
            tmax = tb
        if tmin > tmax:
            return False

    if dz == 0.0:
        if pz < 0.0 or pz > z1:
            return False
    else:
        ta = (0.0 - pz) / dz
        tb = (z1 - pz) / dz
        if ta > tb:
            tmp = ta; ta = tb; tb = tmp
        if ta > tmin:
            tmin = ta
        if tb < tmax:
            tmax = tb
        if tmin > tmax:
            return False

    return tmax > 0.0 and tmin < 1.0


cdef inline bint _blocked(
    double px, double py, double pz,
    double qx, double qy, double qz,
    const double[:, ::1] boxes,
) noexcept nogil:
    cdef Py_ssize_t b
    cdef double dx = qx - px
    cdef double dy = qy - py
    cdef double dz = qz - pz
    for b in range(boxes.shape[0]):
        if _box_hit(px, py, pz, dx, dy, dz,
                    boxes[b, 0], boxes[b, 1], boxes[b, 2], boxes[b, 3], boxes[b, 4]):
            return True
    return False


def classify_to_point(const double[:, ::1] pts, double x, double y, double z, const double[:, ::1] boxes):
    """Blocked flag (1 = NLoS) for the segment from each point to (x, y, z)."""
    cdef Py_ssize_t n = pts.shape[0]
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] flags = out
    cdef Py_ssize_t i
    for i in range(n):
        if _blocked(pts[i, 0], pts[i, 1], pts[i, 2], x, y, z, boxes):
            flags[i] = 1
    return out


cdef double _LN2 = math.log(2.0)
cdef double _PI = math.pi


cdef inline double _pair_rate(
    double x, double y, double z,
    double ax, double ay, double az,
    double bx, double by, double bz,
    double eta, double b1, double b2,
    double* gx, double* gy,
) noexcept nogil:
    """Two-hop rate log2(1 + eta*d1^-b1*d2^-b2); accumulates the gradient."""
    cdef double dx1 = x - ax
    cdef double dy1 = y - ay
    cdef double dz1 = z - az
    cdef double d1sq = dx1 * dx1 + dy1 * dy1 + dz1 * dz1
    cdef double d1 = sqrt(d1sq)
    cdef double dx2 = x - bx
    cdef double dy2 = y - by
    cdef double dz2 = z - bz
    cdef double d2sq = dx2 * dx2 + dy2 * dy2 + dz2 * dz2
    cdef double d2 = sqrt(d2sq)
    cdef double snr = eta * (pow(d1, -b1) * pow(d2, -b2))
    cdef double w = snr / (_LN2 * (1.0 + snr))
    gx[0] -= w * (b1 * dx1 / d1sq + b2 * dx2 / d2sq)
    gy[0] -= w * (b1 * dy1 / d1sq + b2 * dy2 / d2sq)
    return log2(1.0 + snr)


cdef inline double _cu_rate(
    double x, double y, double z,
    double ax, double ay, double az,
    double lam, double b,
    double* gx, double* gy,
) noexcept nogil:
    """Single-hop rate log2(1 + lam*d^-b); accumulates the gradient."""
    cdef double dx = x - ax
    cdef double dy = y - ay
    cdef double dz = z - az
    cdef double dsq = dx * dx + dy * dy + dz * dz
    cdef double d = sqrt(dsq)
    cdef double snr = lam * pow(d, -b)
    cdef double w = snr / (_LN2 * (1.0 + snr))
    gx[0] -= w * b * dx / dsq
    gy[0] -= w * b * dy / dsq
    return log2(1.0 + snr)


def d2d_eval(
    double x, double y, double z,
    const double[:, ::1] tx, const double[:, ::1] rxp,
    const double[::1] eta, const double[::1] b1, const double[::1] b2,
):
    """Per-pair two-hop rates plus the gradient of their sum at (x, y, z)."""
    cdef Py_ssize_t m = tx.shape[0]
    rates = np.empty(m, dtype=np.float64)
    cdef double[::1] rv = rates
    cdef double total = 0.0
    cdef double gx = 0.0
    cdef double gy = 0.0
    cdef Py_ssize_t i
    for i in range(m):
        rv[i] = _pair_rate(
            x, y, z,
            tx[i, 0], tx[i, 1], tx[i, 2],
            rxp[i, 0], rxp[i, 1], rxp[i, 2],
            eta[i], b1[i], b2[i], &gx, &gy,
        )
        total += rv[i]
    return rates, total, gx, gy


def cu_eval(
    double x, double y, double z,
    const double[:, ::1] cu,
    const double[::1] lam, const double[::1] b,
):
    """Single-hop rates log2(1 + lam * d^-b) plus gradient of their sum."""
    cdef Py_ssize_t n = cu.shape[0]
    rates = np.empty(n, dtype=np.float64)
    cdef double[::1] rv = rates
    cdef double total = 0.0
    cdef double gx = 0.0
    cdef double gy = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        rv[i] = _cu_rate(x, y, z, cu[i, 0], cu[i, 1], cu[i, 2], lam[i], b[i], &gx, &gy)
        total += rv[i]
    return rates, total, gx, gy


cdef double _t_value(
    double px, double py, double z,
    const double[:, ::1] tx, const double[:, ::1] rxp, const double[:, ::1] cu, const double[:, ::1] boxes,
    const double[:, ::1] kappa_tab, const double[:, ::1] fsq_tab,
    const double[::1] plf_d2d, const double[::1] plf_cu, const double[::1] beta,
    double phi,
) noexcept nogil:
    cdef Py_ssize_t m = tx.shape[0]
    cdef Py_ssize_t n = cu.shape[0]
    cdef double d2d_total = 0.0
    cdef double cu_total = 0.0
    cdef double gx = 0.0
    cdef double gy = 0.0
    cdef Py_ssize_t i, c1, c2, cc
    cdef double eta, lam
    for i in range(m):
        c1 = 1 if _blocked(tx[i, 0], tx[i, 1], tx[i, 2], px, py, z, boxes) else 0
        c2 = 1 if _blocked(rxp[i, 0], rxp[i, 1], rxp[i, 2], px, py, z, boxes) else 0
        cc = c1 * 2 + c2
        eta = kappa_tab[i, cc] * plf_d2d[cc]
        d2d_total += _pair_rate(
            px, py, z,
            tx[i, 0], tx[i, 1], tx[i, 2],
            rxp[i, 0], rxp[i, 1], rxp[i, 2],
            eta, beta[c1], beta[c2], &gx, &gy,
        )
    for i in range(n):
        c1 = 1 if _blocked(cu[i, 0], cu[i, 1], cu[i, 2], px, py, z, boxes) else 0
        lam = fsq_tab[i, c1] * plf_cu[c1]
        cu_total += _cu_rate(px, py, z, cu[i, 0], cu[i, 1], cu[i, 2], lam, beta[c1], &gx, &gy)
    if d2d_total == 0.0:
        return INFINITY
    return fabs((cu_total / n) / (d2d_total / m) - phi)


def joint_scan(
    double x0, double y0, double z,
    int num_directions, double step_size, int max_steps,
    double bx_lo, double bx_hi, double by_lo, double by_hi,
    const double[:, ::1] tx, const double[:, ::1] rxp, const double[:, ::1] cu, const double[:, ::1] boxes,
    const double[:, ::1] kappa_tab, const double[:, ::1] fsq_tab,
    const double[::1] plf_d2d, const double[::1] plf_cu, const double[::1] beta,
    double phi,
):
    """Directional walk minimizing the per-capita throughput ratio deviation.

    Same pattern-search semantics, bounds handling, and return shape as the
    fallback implementation.
    """
    cdef double best_x = x0
    cdef double best_y = y0
    cdef double best_t = _t_value(
        x0, y0, z, tx, rxp, cu, boxes, kappa_tab, fsq_tab, plf_d2d, plf_cu, beta, phi
    )
    improvements = [(0, x0, y0, best_t)]
    cdef long evals = 1
    cdef int i, k
    cdef double theta, dx, dy, px, py, t
    for i in range(num_directions):
        theta = 2.0 * _PI * i / num_directions
        dx = cos(theta)
        dy = sin(theta)
        for k in range(max_steps):
            px = best_x + dx * step_size
            py = best_y + dy * step_size
            if px < bx_lo or px > bx_hi or py < by_lo or py > by_hi:
                break
            t = _t_value(
                px, py, z, tx, rxp, cu, boxes, kappa_tab, fsq_tab, plf_d2d, plf_cu, beta, phi
            )
            evals += 1
            if t < best_t:
                best_t = t
                best_x = px
                best_y = py
                improvements.append((evals - 1, px, py, t))
            else:
                break
    return best_x, best_y, best_t, evals, improvements
