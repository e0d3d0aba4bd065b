"""Explicit sub- and super-solutions with pointwise residual certificates.

The blow-up sub-solution is the self-similar function

    v(x, t) = tau^{-kt} V(|x - c| / tau^{rt}),   tau = 1 - delta t,

built on the compactly supported profile

    V(y) = 1 + A/lam - y^lam / (lam A^(lam-1)),   lam = p/(p-1),

whose radial p-Laplacian is the constant -N/A on its support.  The
bounded super-solution is L exp(|x - x_a|) with an anchor x_a outside the
domain.

Points are one-dimensional coordinates: a position on the interval, or a
coordinate along the first axis of the ball (the sub-solution is radial and
the super-solution depends only on the distance to the anchor, which is
placed on that axis).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate

from .model import (
    BLOWUP,
    DEFAULT_EPSILON,
    GLOBAL,
    DomainSpec,
    Interval,
    ProblemParams,
    classify_regime,
    global_constant,
    sphere_area,
)

QUAD_TOL = 1e-10
CERT_RTOL = 1e-9


# -- profile ------------------------------------------------------------------

def support_radius(A: float, lam: float) -> float:
    return (A ** (lam - 1) * (A + lam)) ** (1.0 / lam)


def eval_profile(y, A: float, lam: float):
    """Profile value and slope, clamped to zero beyond the support radius."""
    y = np.asarray(y, dtype=float)
    R = support_radius(A, lam)
    inside = y <= R
    V = 1.0 + A / lam - y**lam / (lam * A ** (lam - 1))
    dV = -((y / A) ** (lam - 1))
    V = np.where(inside, np.maximum(V, 0.0), 0.0)
    dV = np.where(inside, dV, 0.0)
    if V.ndim == 0:
        return float(V), float(dV)
    return V, dV


def profile_second_derivative(y, A: float, lam: float):
    y = np.asarray(y, dtype=float)
    return -(lam - 1) / A * (y / A) ** (lam - 2)


def profile_flux(y, A: float, p: float):
    """|V'|^(p-2) V' computed from the slope (equals -y/A on the support)."""
    lam = p / (p - 1)
    _, dV = eval_profile(y, A, lam)
    return np.abs(dV) ** (p - 2) * dV


def radial_plap_profile(y, A: float, p: float, N: int):
    """(p-1)|V'|^(p-2) V'' + (N-1)/y |V'|^(p-2) V' evaluated term by term.

    Valid on 0 < y < R; at y = 0 the symmetric limit -N/A is returned.
    """
    y = np.asarray(y, dtype=float)
    lam = p / (p - 1)
    _, dV = eval_profile(y, A, lam)
    ypos = np.where(y > 0, y, 1.0)
    d2V = profile_second_derivative(ypos, A, lam)
    w = np.abs(dV) ** (p - 2)
    out = (p - 1) * w * d2V + (N - 1) / ypos * w * dV
    out = np.where(y > 0, out, -N / A)
    return float(out) if out.ndim == 0 else out


# -- constant selection -------------------------------------------------------

@dataclass(frozen=True)
class RtildeChoice:
    value: float
    bounds: dict
    strict: bool


def rtilde_bounds(P: ProblemParams, N: int) -> dict:
    ks = P.k + P.s
    out = {"q": (ks - P.l - P.q) / (P.q * (ks - 1) + N * (P.l + P.q - 1))}
    if P.p * (ks - 1) + N * (P.p - 2) > 0:
        out["p"] = (ks + 1 - P.p) / (P.p * (ks - 1) + N * (P.p - 2))
    if P.r * (ks - 1) + N * (P.r - 1) > 0:
        out["r"] = (ks - P.r) / (P.r * (ks - 1) + N * (P.r - 1))
    return out


def select_rtilde(P: ProblemParams, N: int, margin: float = 0.9) -> RtildeChoice:
    bounds = rtilde_bounds(P, N)
    bound = min(bounds.values())
    value = margin * bound
    if not value > 0:
        raise ValueError(f"self-similar exponent must be positive, got {value} "
                         f"(bounds {bounds})")
    return RtildeChoice(value, bounds, value < bound)


# -- sub-solution -------------------------------------------------------------

@dataclass(frozen=True)
class SubSolutionSpec:
    p: float
    N: int
    lam: float
    r_tilde: float
    k_tilde: float
    A: float
    delta: float
    R: float
    K: float
    tau0: float
    t0: float
    center: float

    @property
    def t_blowup(self) -> float:
        return 1.0 / self.delta

    @property
    def horizon(self) -> float:
        """Time left between t0 and the blow-up time 1/delta."""
        return self.tau0 / self.delta

    def tau_at(self, t):
        return self.tau0 - self.delta * (np.asarray(t, dtype=float) - self.t0)

    def support_radius_at(self, tau) -> float:
        return self.R * tau**self.r_tilde

    def to_dict(self) -> dict:
        return asdict(self)


def exponent_margins(spec: SubSolutionSpec, P: ProblemParams) -> dict:
    kt, rt = spec.k_tilde, spec.r_tilde
    return {
        "diffusion": 1 + kt - rt - (kt + rt) * (P.p - 1),
        "gradient_source": kt + 1 - P.r * (kt + rt),
        "absorption": kt + 1 - kt * P.sigma,
        "gradient_absorption": kt + 1 - P.l * kt - P.q * (kt + rt),
    }


def profile_mass(A: float, lam: float, s: float, N: int) -> float:
    """Integral of V^s over the ball B(0, R) in R^N."""
    R = support_radius(A, lam)

    def f(y):
        V, _ = eval_profile(y, A, lam)
        return V**s * y ** (N - 1)

    val, _ = integrate.quad(f, 0.0, R, epsabs=QUAD_TOL, epsrel=1e-12, limit=200)
    return sphere_area(N) * val


def _dist(x, center):
    return np.abs(np.asarray(x, dtype=float) - center)


def _eval_tau(spec: SubSolutionSpec, x, tau):
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0):
        raise ValueError("sub-solution is only defined before its blow-up time 1/delta")
    y = _dist(x, spec.center) / tau**spec.r_tilde
    V, _ = eval_profile(y, spec.A, spec.lam)
    return tau ** (-spec.k_tilde) * V


def eval_subsolution(spec: SubSolutionSpec, x, t):
    return _eval_tau(spec, x, spec.tau_at(t))


def eval_subsolution_elapsed(spec: SubSolutionSpec, x, elapsed):
    """v(x, t0 + elapsed), computed without forming 1/delta - t0 by subtraction."""
    return _eval_tau(spec, x, spec.tau0 - spec.delta * np.asarray(elapsed, dtype=float))


def subsolution_terms(spec: SubSolutionSpec, P: ProblemParams, y, tau) -> dict:
    """Signed terms of P(v) at self-similar coordinate y and tau = 1 - delta t.

    The entries sum to the residual v_t - Delta_p v - alpha v^k int v^s
    + beta v^l |grad v|^q - gamma v^m - mu |grad v|^r + nu v^sigma.
    """
    y = np.asarray(y, dtype=float)
    tau = np.asarray(tau, dtype=float)
    kt, rt, p, N = spec.k_tilde, spec.r_tilde, spec.p, spec.N
    V, dV = eval_profile(y, spec.A, spec.lam)
    amp = tau ** (-kt)
    v = amp * V
    grad = tau ** (-kt - rt) * np.abs(dV)
    nonlocal_int = spec.K * tau ** (N * rt - kt * P.s)
    lap = radial_plap_profile(np.minimum(y, spec.R), spec.A, p, N)
    return {
        "time": spec.delta * tau ** (-kt - 1) * (kt * V + rt * y * dV),
        "diffusion": -(tau ** (-(kt + rt) * (p - 1) - rt)) * lap,
        "nonlocal": -P.alpha * v**P.k * nonlocal_int,
        "gradient_absorption": P.beta * v**P.l * grad**P.q,
        "reaction": -P.gamma * v**P.m,
        "gradient_source": -P.mu * grad**P.r,
        "absorption": P.nu * v**P.sigma,
    }


def subsolution_residual(spec: SubSolutionSpec, P: ProblemParams, domain: DomainSpec, x, t):
    """P(v)(x, t) in closed form; zero outside the support ball."""
    tau = spec.tau_at(t)
    if np.any(tau <= 0):
        raise ValueError("t must be below 1/delta")
    dist = _dist(x, spec.center)
    y = dist / tau**spec.r_tilde
    terms = subsolution_terms(spec, P, y, tau)
    res = sum(terms.values())
    res = np.where(y <= spec.R, res, 0.0)
    return float(res) if res.ndim == 0 else res


@dataclass(frozen=True)
class Certificate:
    ok: bool
    worst: float  # max of residual / max(1, term scale); <= CERT_RTOL passes
    split_worst: float
    n_space: int
    n_time: int


def certify_subsolution(spec: SubSolutionSpec, P: ProblemParams, tau0: float | None = None,
                        n_space: int = 201, n_time: int = 101,
                        tau_span: float = 1e-6) -> Certificate:
    """Check P(v) <= 0 on a space x time grid of the support.

    Space nodes span y in [0, R]; time nodes are geometric in tau from tau0
    down to tau0 * tau_span.  On [0, A] the reaction/diffusion part and the
    nonlocal/gradient-absorption part are also required to be nonpositive
    separately.
    """
    tau0 = spec.tau0 if tau0 is None else tau0
    y = np.linspace(0.0, spec.R, n_space)
    tau = tau0 * np.geomspace(1.0, tau_span, n_time)
    Y, T = np.meshgrid(y, tau, indexing="ij")
    with np.errstate(over="ignore", invalid="ignore"):
        terms = subsolution_terms(spec, P, Y, T)
        total = sum(terms.values())
        scale = np.maximum(1.0, np.max(np.abs(np.stack(list(terms.values()))), axis=0))
        worst = float(np.max(total / scale))
        p1 = (terms["time"] + terms["diffusion"] + terms["reaction"]
              + terms["gradient_source"] + terms["absorption"])
        p2 = terms["nonlocal"] + terms["gradient_absorption"]
        inner = Y <= spec.A
        split = np.maximum(p1, p2) / scale
        split_worst = float(np.max(split[inner])) if inner.any() else -np.inf
    ok = bool(np.isfinite(worst) and worst <= CERT_RTOL and split_worst <= CERT_RTOL)
    return Certificate(ok, worst, split_worst, n_space, n_time)


DEFAULT_MARGINS = {"r_tilde": 0.9, "A": 2.0, "delta": 0.5}
TAU_FLOOR = 1e-12


def build_subsolution(P: ProblemParams, domain: DomainSpec, margins: dict | None = None,
                      center: float | None = None) -> SubSolutionSpec:
    verdict = classify_regime(P, domain)
    if verdict.tag != BLOWUP:
        failed = [c.name for c in verdict.blowup_checks if not c.holds]
        raise ValueError(f"blow-up hypotheses fail: {failed}")
    mg = dict(DEFAULT_MARGINS)
    if margins:
        unknown = set(margins) - set(mg)
        if unknown:
            raise ValueError(f"unknown margins {sorted(unknown)}")
        mg.update(margins)
    if not (0 < mg["r_tilde"] < 1 and mg["A"] > 1 and 0 < mg["delta"] < 1):
        raise ValueError(f"margins must keep the inequalities strict: {mg}")

    N = domain.dimension
    lam = P.p / (P.p - 1)
    rt = select_rtilde(P, N, mg["r_tilde"]).value
    kt = (N * rt + 1) / (P.k + P.s - 1)
    A = mg["A"] * kt / rt
    delta = mg["delta"] * P.gamma / (kt * (1 + A / lam))
    R = support_radius(A, lam)
    K = profile_mass(A, lam, P.s, N)
    c = domain.center if center is None else float(center)
    room = _room(domain, c)
    if room <= 0:
        raise ValueError("sub-solution centre must lie inside the domain")

    draft = SubSolutionSpec(P.p, N, lam, rt, kt, A, delta, R, K, 1.0, 0.0, c)

    def admissible(tau):
        if R * tau**rt > room:
            return False
        return certify_subsolution(draft, P, tau).ok

    tau0 = _search_tau0(admissible)
    return SubSolutionSpec(P.p, N, lam, rt, kt, A, delta, R, K, tau0, (1.0 - tau0) / delta, c)


def _room(domain: DomainSpec, c: float) -> float:
    if isinstance(domain, Interval):
        return min(c - domain.a, domain.b - c)
    return domain.radius - abs(c)


def _search_tau0(admissible, iters: int = 60) -> float:
    """Largest admissible tau in (0, 1], i.e. the smallest admissible t0."""
    if admissible(1.0):
        return 1.0
    hi = 1.0  # inadmissible
    lo = 0.5
    while not admissible(lo):
        hi = lo
        lo *= 0.5
        if lo < TAU_FLOOR:
            raise ValueError("no t0 below 1/delta gives an admissible sub-solution "
                             "(domain too small for the support radius)")
    # bisect in log(tau): lo admissible, hi not
    for _ in range(iters):
        mid = math.sqrt(lo * hi)
        if admissible(mid):
            lo = mid
        else:
            hi = mid
        if hi / lo < 1 + 1e-12:
            break
    return lo


# -- super-solution -----------------------------------------------------------

@dataclass(frozen=True)
class SuperSolutionSpec:
    L: float
    x_a: float
    epsilon: float
    rho_Omega: float
    C_const: float
    case_tag: int
    offset: float
    exp_integral: float  # integral over the domain of exp(s |x - x_a|)
    L_terms: dict

    @property
    def bound(self) -> float:
        return self.L * math.exp(self.rho_Omega + 1.0)

    def to_dict(self) -> dict:
        return asdict(self)


def _anchor(domain: DomainSpec, epsilon: float):
    rho = domain.diameter
    d = min(rho / 2 + epsilon, 1.0)
    if isinstance(domain, Interval):
        return domain.b + d, d
    return domain.radius + d, d


def exp_distance_integral(domain: DomainSpec, x_a: float, s: float) -> float:
    if isinstance(domain, Interval):
        f = lambda x: math.exp(s * abs(x - x_a))  # noqa: E731
        pts = [x_a] if domain.a < x_a < domain.b else None
        val, _ = integrate.quad(f, domain.a, domain.b, epsabs=QUAD_TOL, epsrel=1e-12,
                                points=pts, limit=200)
        return val
    R, N = domain.radius, domain.dimension
    if N == 1:
        val, _ = integrate.quad(lambda z: math.exp(s * abs(z - x_a)), -R, R,
                                epsabs=QUAD_TOL, epsrel=1e-12, limit=200)
        return val
    w_area = sphere_area(N - 1)

    def inner(w, z):
        return math.exp(s * math.hypot(z - x_a, w)) * w ** (N - 2)

    val, _ = integrate.dblquad(inner, -R, R, 0.0, lambda z: math.sqrt(max(R * R - z * z, 0.0)),
                               epsabs=QUAD_TOL, epsrel=1e-10)
    return w_area * val


def build_supersolution(P: ProblemParams, domain: DomainSpec, u0_sup: float,
                        epsilon: float = DEFAULT_EPSILON) -> SuperSolutionSpec:
    verdict = classify_regime(P, domain, epsilon)
    if verdict.tag != GLOBAL:
        failed = [c.name for c in verdict.global_checks if not c.holds]
        if verdict.tag == BLOWUP:
            failed.append("blow-up hypotheses hold")
        raise ValueError(f"boundedness hypotheses fail: {failed}")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    case = verdict.global_case
    N = domain.dimension
    rho = domain.diameter
    C = global_constant(P, domain)
    x_a, d = _anchor(domain, epsilon)
    ql, ks = P.q + P.l, P.k + P.s

    terms = {"one": 1.0, "u0_sup": float(u0_sup)}
    if case in (1, 2):
        terms["diffusion"] = (2.0 / P.beta * ((N - 1) / epsilon + (P.p - 1))) ** (1.0 / (ql - P.p + 1))
    if case in (1, 3):
        terms["nonlocal"] = (2.0 * P.alpha * C * domain.measure / P.beta) ** (1.0 / (ql - ks))
    if P.gamma > 0:
        terms["reaction"] = (P.gamma / P.nu) ** (1.0 / (P.sigma - P.m))
    L = max(terms.values())
    return SuperSolutionSpec(L, x_a, epsilon, rho, C, case, d,
                             exp_distance_integral(domain, x_a, P.s), terms)


def _inside(domain: DomainSpec, x) -> bool:
    x = np.asarray(x, dtype=float)
    if isinstance(domain, Interval):
        return bool(np.all((x >= domain.a) & (x <= domain.b)))
    return bool(np.all(np.abs(x) <= domain.radius))


def supersolution_terms(spec: SuperSolutionSpec, P: ProblemParams, domain: DomainSpec, x) -> dict:
    rho = np.abs(np.asarray(x, dtype=float) - spec.x_a)
    L, N = spec.L, domain.dimension
    return {
        "diffusion": -(L ** (P.p - 1)) * np.exp((P.p - 1) * rho) * ((N - 1) / spec.epsilon + (P.p - 1)),
        "nonlocal": -P.alpha * L**P.k * np.exp(P.k * rho) * L**P.s * spec.exp_integral,
        "gradient_absorption": P.beta * L ** (P.l + P.q) * np.exp((P.l + P.q) * rho),
        "reaction": -P.gamma * L**P.m * np.exp(P.m * rho),
        "absorption": P.nu * L**P.sigma * np.exp(P.sigma * rho),
    }


def supersolution_residual(spec: SuperSolutionSpec, P: ProblemParams, domain: DomainSpec, x):
    if not _inside(domain, x):
        raise ValueError("points must lie in the domain")
    if P.mu != 0:
        raise ValueError("the exponential super-solution needs mu = 0")
    res = sum(supersolution_terms(spec, P, domain, x).values())
    return float(res) if np.ndim(res) == 0 else res


def certify_supersolution(spec: SuperSolutionSpec, P: ProblemParams, domain: DomainSpec,
                          n: int = 1000) -> dict:
    if isinstance(domain, Interval):
        x = np.linspace(domain.a, domain.b, n)
    else:
        x = np.linspace(-domain.radius, domain.radius, n)
    terms = supersolution_terms(spec, P, domain, x)
    total = sum(terms.values())
    scale = np.maximum(1.0, np.max(np.abs(np.stack(list(terms.values()))), axis=0))
    rho = np.abs(x - spec.x_a)
    worst = float(np.min(total / scale))
    return {
        "ok": bool(worst >= -CERT_RTOL),
        "min_scaled_residual": worst,
        "rho_min": float(rho.min()),
        "rho_max": float(rho.max()),
        "rho_in_range": bool(rho.min() >= spec.epsilon and rho.max() <= spec.rho_Omega + 1),
        "sup_v": float(np.max(spec.L * np.exp(rho))),
    }
