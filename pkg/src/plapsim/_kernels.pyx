# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled time-stepping kernels; mirrors _kernels_py function for function."""

from libc.math cimport pow, fabs, sqrt, copysign, isfinite

import numpy as np

BACKEND = "cython"

cdef enum:
    S_DONE = 0
    S_CHUNK = 1
    S_BLOWUP = 2
    S_UNDERFLOW = 3

DONE, CHUNK, BLOWUP, UNDERFLOW = S_DONE, S_CHUNK, S_BLOWUP, S_UNDERFLOW

cdef double LIP_ETA = 1e-3


cdef inline double fpow(double x, double e) noexcept nogil:
    # exact shortcuts for the exponents that dominate in practice
    if e == 1.0:
        return x
    if e == 2.0:
        return x * x
    if e == 0.0:
        return 1.0
    if e == 0.5:
        return sqrt(x)
    return pow(x, e)


cdef inline double spow(double u, double e) noexcept nogil:
    if u == 0.0:
        return 0.0
    return copysign(fpow(fabs(u), e), u)


cdef double c_plap(const double[::1] u, double[::1] out, double h, const double[::1] wf,
                   const double[::1] wn, int sym_left, double p, double eps) noexcept nogil:
    cdef Py_ssize_t n = u.shape[0] - 1, i
    cdef double D, phi, F, Fprev = 0.0, phimax = 0.0, ex = (p - 2.0) / 2.0
    for i in range(n):
        D = (u[i + 1] - u[i]) / h
        phi = fpow(D * D + eps * eps, ex)
        if phi > phimax:
            phimax = phi
        F = wf[i] * phi * D
        if i == 0:
            out[0] = 2.0 * F * wn[0] if sym_left else 0.0
        else:
            out[i] = (F - Fprev) * wn[i]
        Fprev = F
    out[n] = 0.0
    return phimax


cdef double c_grad_abs(const double[::1] u, double[::1] out, double h, int sym_left) noexcept nogil:
    cdef Py_ssize_t n = u.shape[0] - 1, i
    cdef double G
    out[0] = 0.0 if sym_left else fabs(u[1] - u[0]) / h
    out[n] = fabs(u[n] - u[n - 1]) / h
    G = out[0] if out[0] > out[n] else out[n]
    for i in range(1, n):
        out[i] = fabs(u[i + 1] - u[i - 1]) / (2.0 * h)
        if out[i] > G:
            G = out[i]
    return G


cdef void c_rhs(const double[::1] u, double[::1] f, double[::1] g, double h,
                const double[::1] wf, const double[::1] wn, const double[::1] wq,
                int sym_left, const double[::1] prm, double* res) noexcept nogil:
    cdef double alpha = prm[0], beta = prm[1], gamma = prm[2], mu = prm[3], nu = prm[4]
    cdef double k = prm[5], s = prm[6], l = prm[7], q = prm[8], m = prm[9], r = prm[10]
    cdef double sigma = prm[11], p = prm[12], eps = prm[13]
    cdef Py_ssize_t n = u.shape[0] - 1, i
    cdef double I = 0.0, U = 0.0, au, ui, gi, phimax, G
    phimax = c_plap(u, f, h, wf, wn, sym_left, p, eps)
    G = c_grad_abs(u, g, h, sym_left)
    for i in range(n + 1):
        au = fabs(u[i])
        if au > U:
            U = au
        I += wq[i] * fpow(au, s)
    for i in range(n + 1):
        ui = u[i]
        gi = g[i]
        f[i] += (alpha * I) * spow(ui, k) - beta * spow(ui, l) * fpow(gi, q) \
            + gamma * spow(ui, m) + mu * fpow(gi, r) - nu * spow(ui, sigma)
    f[n] = 0.0
    if not sym_left:
        f[0] = 0.0
    res[0] = I
    res[1] = phimax
    res[2] = G
    res[3] = U


cdef double c_z(double W, double Iw, double G, const double[::1] prm) noexcept nogil:
    return (fabs(prm[0]) * fpow(W, prm[5]) * Iw + fabs(prm[2]) * fpow(W, prm[9])
            + prm[4] * fpow(W, prm[11]) + fabs(prm[1]) * fpow(W, prm[7]) * fpow(G, prm[8]))


cdef double c_lipschitz(double U, double I, double G, const double[::1] prm) noexcept nogil:
    if U <= 0.0:
        return 0.0
    cdef double V = U * (1.0 + LIP_ETA)
    return (c_z(V, I * fpow(1.0 + LIP_ETA, prm[6]), G, prm) - c_z(U, I, G, prm)) / (U * LIP_ETA)


cdef double c_prepare(const double[::1] u, double[::1] f, double[::1] g, double h,
                      const double[::1] wf, const double[::1] wn, const double[::1] wq,
                      int sym_left, const double[::1] prm, double nfac, double safety,
                      double dt_max, double* U) noexcept nogil:
    cdef double res[4]
    cdef double dt_diff, lam, dt
    c_rhs(u, f, g, h, wf, wn, wq, sym_left, prm, res)
    dt_diff = h * h / (2.0 * nfac * res[1] * (prm[12] - 1.0) * (1.0 + prm[13]))
    lam = c_lipschitz(res[3], res[0], res[2], prm)
    dt = 1.0 / (1.0 + lam)
    if dt_diff < dt:
        dt = dt_diff
    dt = safety * dt
    U[0] = res[3]
    return dt if dt < dt_max else dt_max


cdef int c_euler(const double[::1] u, const double[::1] f, double dt, double[::1] out,
                 int sym_left, double U) noexcept nogil:
    cdef Py_ssize_t n = u.shape[0] - 1, i
    cdef double jump = 0.0, d
    cdef int ok = 1
    for i in range(n + 1):
        out[i] = u[i] + dt * f[i]
    out[n] = 0.0
    if not sym_left:
        out[0] = 0.0
    for i in range(n + 1):
        if not isfinite(out[i]):
            ok = 0
        d = fabs(out[i] - u[i])
        if d > jump:
            jump = d
    if jump > 0.5 * (1.0 + U):
        ok = 0
    return ok


cdef void c_norms(const double[::1] u, const double[::1] wq, double s, double* res) noexcept nogil:
    cdef Py_ssize_t i
    cdef double sup = 0.0, l2 = 0.0, integral = 0.0, au
    for i in range(u.shape[0]):
        au = fabs(u[i])
        if au > sup:
            sup = au
        l2 += wq[i] * u[i] * u[i]
        integral += wq[i] * fpow(au, s)
    res[0] = sup
    res[1] = sqrt(l2)
    res[2] = integral


def plap(double[::1] u, double[::1] out, double h, double[::1] wf, double[::1] wn,
         int sym_left, double p, double eps):
    return c_plap(u, out, h, wf, wn, sym_left, p, eps)


def grad_abs(double[::1] u, double[::1] out, double h, int sym_left):
    return c_grad_abs(u, out, h, sym_left)


def rhs(double[::1] u, double[::1] f, double h, double[::1] wf, double[::1] wn,
        double[::1] wq, int sym_left, double[::1] prm):
    cdef double res[4]
    g = np.empty(u.shape[0])
    c_rhs(u, f, g, h, wf, wn, wq, sym_left, prm, res)
    return res[0], res[1], res[2], res[3]


def lipschitz(double U, double I, double G, double[::1] prm):
    return c_lipschitz(U, I, G, prm)


def prepare(double[::1] u, double[::1] f, double h, double[::1] wf, double[::1] wn,
            double[::1] wq, int sym_left, double[::1] prm, double nfac, double safety,
            double dt_max):
    cdef double U
    g = np.empty(u.shape[0])
    dt = c_prepare(u, f, g, h, wf, wn, wq, sym_left, prm, nfac, safety, dt_max, &U)
    return dt, U


def euler(double[::1] u, double[::1] f, double dt, double[::1] out, int sym_left, double U):
    return bool(c_euler(u, f, dt, out, sym_left, U))


def norms(double[::1] u, double[::1] wq, double s):
    cdef double res[3]
    c_norms(u, wq, s, res)
    return res[0], res[1], res[2]


def advance(double[::1] u, double t, double t_end, long max_steps, double h,
            double[::1] wf, double[::1] wn, double[::1] wq, int sym_left, double[::1] prm,
            double nfac, double safety, double dt_max, double dt_min, double threshold,
            double[:, ::1] series, long row0):
    cdef Py_ssize_t npts = u.shape[0], i
    cdef double[::1] f = np.empty(npts)
    cdef double[::1] g = np.empty(npts)
    cdef double[::1] trial = np.empty(npts)
    cdef double s = prm[6], dt, U
    cdef double res[3]
    cdef long n = 0
    cdef int status = S_CHUNK
    with nogil:
        while n < max_steps:
            if t >= t_end:
                status = S_DONE
                break
            dt = c_prepare(u, f, g, h, wf, wn, wq, sym_left, prm, nfac, safety, dt_max, &U)
            if t + dt > t_end:
                dt = t_end - t
            while not c_euler(u, f, dt, trial, sym_left, U):
                dt *= 0.5
                if dt < dt_min:
                    status = S_UNDERFLOW
                    break
            if status == S_UNDERFLOW:
                break
            if dt < dt_min and t + dt < t_end:
                status = S_UNDERFLOW
                break
            for i in range(npts):
                u[i] = trial[i]
            t = t + dt
            c_norms(u, wq, s, res)
            series[row0 + n, 0] = t
            series[row0 + n, 1] = res[0]
            series[row0 + n, 2] = res[1]
            series[row0 + n, 3] = res[2]
            series[row0 + n, 4] = dt
            n += 1
            if res[0] >= threshold:
                status = S_BLOWUP
                break
        else:
            if t >= t_end:
                status = S_DONE
    return t, n, status
