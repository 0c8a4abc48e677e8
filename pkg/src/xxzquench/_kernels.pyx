# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: mode sums and the measurement-basis grid scan.

Same contracts as ``_kernels_py``; reductions use Neumaier compensated
summation over a fixed ascending-mode order, so results are independent
of thread count and agree with the exact-summation fallback to rounding.
"""

from libc.math cimport cos, sin, sqrt, log, INFINITY

import numpy as np

__all__ = ["BACKEND", "gap_map_sums", "correlator_series", "basis_grid_scan"]

BACKEND = "compiled"

cdef double _LOG2 = log(2.0)


cdef inline void _acc(double value, double *s, double *c) nogil:
    """One Neumaier compensated-summation step: add value into (s, c)."""
    cdef double t = s[0] + value
    if (s[0] if s[0] >= 0 else -s[0]) >= (value if value >= 0 else -value):
        c[0] += (s[0] - t) + value
    else:
        c[0] += (value - t) + s[0]
    s[0] = t


def gap_map_sums(const double[::1] a, const double[::1] b, const double[::1] eps,
                 const double[::1] cos_q, const double[::1] sin_q):
    """Return (Σ A/ε, Σ cos q·A/ε, Σ sin q·B/ε) over positive modes."""
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double ra, rb
    cdef double s1 = 0, c1 = 0, s2 = 0, c2 = 0, s3 = 0, c3 = 0
    for i in range(n):
        ra = a[i] / eps[i]
        rb = b[i] / eps[i]
        _acc(ra, &s1, &c1)
        _acc(cos_q[i] * ra, &s2, &c2)
        _acc(sin_q[i] * rb, &s3, &c3)
    return s1 + c1, s2 + c2, s3 + c3


def correlator_series(const double[::1] q, const double[::1] eps,
                      const double[::1] cos2f, const double[::1] sin2f,
                      const double[::1] cos2phi, const double[::1] sin2phi,
                      hop_m, pair_m, times):
    """Hopping/pairing mode sums on a time grid (no 1/N prefactor)."""
    cdef const double[::1] tgrid = np.ascontiguousarray(times, dtype=np.float64)
    cdef const long[::1] hops = np.ascontiguousarray(hop_m, dtype=np.int64)
    cdef const long[::1] pairs = np.ascontiguousarray(pair_m, dtype=np.int64)
    cdef Py_ssize_t nq = q.shape[0], nt = tgrid.shape[0]
    cdef Py_ssize_t nh = hops.shape[0], np_ = pairs.shape[0]

    cos_qm_arr = np.empty((nh, nq))
    sin_qm_arr = np.empty((np_, nq))
    cdef double[:, ::1] cos_qm = cos_qm_arr
    cdef double[:, ::1] sin_qm = sin_qm_arr
    cdef Py_ssize_t i, k, it
    for k in range(nh):
        for i in range(nq):
            cos_qm[k, i] = cos(q[i] * hops[k])
    for k in range(np_):
        for i in range(nq):
            sin_qm[k, i] = sin(q[i] * pairs[k])

    hop_arr = np.empty((nt, nh))
    pair_arr = np.empty((nt, np_), dtype=np.complex128)
    cdef double[:, ::1] hop = hop_arr
    cdef double complex[:, ::1] pair = pair_arr

    cet_arr = np.empty(nq)
    set_arr = np.empty(nq)
    cdef double[::1] cet = cet_arr
    cdef double[::1] st = set_arr
    cdef double t, phase, s, c, sr, cr, si, ci, term
    with nogil:
        for it in range(nt):
            t = 2.0 * tgrid[it]
            for i in range(nq):
                phase = t * eps[i]
                cet[i] = cos(phase)
                st[i] = sin(phase)
            for k in range(nh):
                s = 0; c = 0
                for i in range(nq):
                    term = cos_qm[k, i] * (1.0 - cos2f[i] * cos2phi[i]
                                           - sin2f[i] * sin2phi[i] * cet[i])
                    _acc(term, &s, &c)
                hop[it, k] = s + c
            for k in range(np_):
                sr = 0; cr = 0; si = 0; ci = 0
                for i in range(nq):
                    term = sin_qm[k, i] * (sin2f[i] * cos2phi[i]
                                           - cos2f[i] * sin2phi[i] * cet[i])
                    _acc(term, &sr, &cr)
                    term = -sin_qm[k, i] * sin2phi[i] * st[i]
                    _acc(term, &si, &ci)
                pair[it, k] = (sr + cr) + 1j * (si + ci)
    return hop_arr, pair_arr


cdef inline double _h2(double p) nogil:
    """Binary entropy in bits with the 0·log 0 = 0 convention."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * log(p) + (1.0 - p) * log(1.0 - p)) / _LOG2


def basis_grid_scan(double c1, double c2, double c3, double c4,
                    const double[::1] thetas, const double[::1] phis,
                    theta_block=128):
    """Minimum conditional entropy over a (θ, φ) grid.

    Scan order is θ-major, φ-minor with strict-less updates, so ties
    keep the first (smallest θ, then smallest φ) grid point.  Returns
    (value, i_theta, i_phi).
    """
    cdef Py_ssize_t nt = thetas.shape[0], nph = phis.shape[0]
    cos_p_arr = np.cos(np.asarray(phis))
    sin_p_arr = np.sin(np.asarray(phis))
    cdef double[::1] cos_p = cos_p_arr
    cdef double[::1] sin_p = sin_p_arr
    cdef double best = INFINITY
    cdef Py_ssize_t best_it = 0, best_ip = 0
    cdef Py_ssize_t it, ip
    cdef double ct, stt, nx, ny, nz, cond, denom, prob
    cdef double chi1, chi2, chi3, radius, sgn
    cdef int side
    with nogil:
        for it in range(nt):
            ct = cos(thetas[it])
            stt = sin(thetas[it])
            for ip in range(nph):
                nx = stt * cos_p[ip]
                ny = stt * sin_p[ip]
                nz = ct
                cond = 0.0
                for side in range(2):
                    sgn = 1.0 if side == 0 else -1.0
                    denom = 1.0 + sgn * c4 * nz
                    prob = 0.5 * denom
                    if prob <= 0.0:
                        continue
                    if denom <= 1e-300:
                        denom = 1.0
                    chi1 = c1 * nx / denom
                    chi2 = c2 * ny / denom
                    chi3 = (sgn * c3 * nz + c4) / denom
                    radius = sqrt(chi1 * chi1 + chi2 * chi2 + chi3 * chi3)
                    if radius > 1.0:
                        radius = 1.0
                    cond += prob * _h2(0.5 * (1.0 + radius))
                if cond < best:
                    best = cond
                    best_it = it
                    best_ip = ip
    return best, best_it, best_ip
