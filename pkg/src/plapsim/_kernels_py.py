"""Pure numpy time-stepping kernels.

Reference implementation of the compiled ``_kernels`` module; both expose the
same functions with the same argument order.

Geometry is passed as flat arrays:
    wf  face metric weights (radius^(N-1) at faces, ones on an interval)
    wn  node divergence factors (1/(h radius^(N-1)); N/(h wf[0]) at a radial origin)
    wq  trapezoid quadrature weights including the sphere measure
    sym_left  1 if node 0 is a radial origin (mirror symmetry), 0 if Dirichlet
Parameters are packed as
    prm = [alpha, beta, gamma, mu, nu, k, s, l, q, m, r, sigma, p, eps_reg].
"""

import math

import numpy as np

LIP_ETA = 1e-3

BACKEND = "python"

DONE, CHUNK, BLOWUP, UNDERFLOW = 0, 1, 2, 3


def _spow(u, e):
    return np.sign(u) * np.abs(u) ** e


def plap(u, out, h, wf, wn, sym_left, p, eps):
    D = (u[1:] - u[:-1]) / h
    phi = (D * D + eps * eps) ** ((p - 2.0) / 2.0)
    F = wf * phi * D
    out[1:-1] = (F[1:] - F[:-1]) * wn[1:-1]
    out[0] = 2.0 * F[0] * wn[0] if sym_left else 0.0
    out[-1] = 0.0
    return float(phi.max())


def grad_abs(u, out, h, sym_left):
    out[1:-1] = np.abs(u[2:] - u[:-2]) / (2.0 * h)
    out[0] = 0.0 if sym_left else abs(u[1] - u[0]) / h
    out[-1] = abs(u[-1] - u[-2]) / h
    return float(out.max())


def rhs(u, f, h, wf, wn, wq, sym_left, prm):
    alpha, beta, gamma, mu, nu, k, s, l, q, m, r, sigma, p, eps = prm
    phimax = plap(u, f, h, wf, wn, sym_left, p, eps)
    g = np.empty_like(u)
    G = grad_abs(u, g, h, sym_left)
    au = np.abs(u)
    I = float(np.dot(wq, au**s))
    f += (alpha * I) * _spow(u, k) - beta * _spow(u, l) * g**q + gamma * _spow(u, m) \
        + mu * g**r - nu * _spow(u, sigma)
    f[-1] = 0.0
    if not sym_left:
        f[0] = 0.0
    return I, phimax, G, float(au.max())


def lipschitz(U, I, G, prm):
    alpha, beta, gamma, mu, nu, k, s, l, q, m, r, sigma, p, eps = prm
    if U <= 0.0:
        return 0.0

    def z(W, Iw):
        return (abs(alpha) * W**k * Iw + abs(gamma) * W**m + nu * W**sigma
                + abs(beta) * W**l * G**q)

    V = U * (1.0 + LIP_ETA)
    return (z(V, I * (1.0 + LIP_ETA) ** s) - z(U, I)) / (U * LIP_ETA)


def prepare(u, f, h, wf, wn, wq, sym_left, prm, nfac, safety, dt_max):
    I, phimax, G, U = rhs(u, f, h, wf, wn, wq, sym_left, prm)
    p, eps = prm[12], prm[13]
    dt_diff = h * h / (2.0 * nfac * phimax * (p - 1.0) * (1.0 + eps))
    lam = lipschitz(U, I, G, prm)
    dt = safety * min(dt_diff, 1.0 / (1.0 + lam))
    return min(dt, dt_max), U


def euler(u, f, dt, out, sym_left, U):
    np.add(u, dt * f, out=out)
    out[-1] = 0.0
    if not sym_left:
        out[0] = 0.0
    with np.errstate(invalid="ignore"):
        jump = float(np.max(np.abs(out - u)))
    return bool(np.all(np.isfinite(out)) and jump <= 0.5 * (1.0 + U))


def norms(u, wq, s):
    au = np.abs(u)
    return float(au.max()), math.sqrt(float(np.dot(wq, u * u))), float(np.dot(wq, au**s))


def advance(u, t, t_end, max_steps, h, wf, wn, wq, sym_left, prm, nfac, safety,
            dt_max, dt_min, threshold, series, row0):
    """Step u in place until t_end, blow-up, underflow or max_steps.

    Each accepted step writes (t, sup, l2, integral, dt) into series[row0 + i].
    Returns (t, steps_taken, status).
    """
    f = np.empty_like(u)
    trial = np.empty_like(u)
    s = prm[6]
    n = 0
    status = CHUNK
    while n < max_steps:
        if t >= t_end:
            status = DONE
            break
        dt, U = prepare(u, f, h, wf, wn, wq, sym_left, prm, nfac, safety, dt_max)
        if t + dt > t_end:
            dt = t_end - t
        while not euler(u, f, dt, trial, sym_left, U):
            dt *= 0.5
            if dt < dt_min:
                return t, n, UNDERFLOW
        if dt < dt_min and t + dt < t_end:
            return t, n, UNDERFLOW
        u[:] = trial
        t = t + dt
        sup, l2, integral = norms(u, wq, s)
        row = series[row0 + n]
        row[0], row[1], row[2], row[3], row[4] = t, sup, l2, integral, dt
        n += 1
        if sup >= threshold:
            status = BLOWUP
            break
    else:
        if t >= t_end:
            status = DONE
    return t, n, status
