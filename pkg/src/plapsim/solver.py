"""Method-of-lines solver with adaptive explicit Euler steps.

Fields live on a uniform node grid: an interval [a, b] with Dirichlet nodes at
both ends, or the radial segment [0, R] of an N-ball with a symmetric origin
node and a Dirichlet node at R.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from scipy import optimize

from . import kernels
from .model import DomainSpec, Interval, ProblemParams, sphere_area

SERIES_COLUMNS = ("t", "sup_norm", "l2_norm", "nonlocal_integral", "dt")


@dataclass(frozen=True)
class Grid:
    x: np.ndarray
    h: float
    radial: bool
    N: int
    domain: DomainSpec

    @classmethod
    def build(cls, domain: DomainSpec, n: int) -> "Grid":
        if n < 8:
            raise ValueError("grid needs at least 8 intervals")
        if isinstance(domain, Interval):
            x = np.linspace(domain.a, domain.b, n + 1)
            return cls(x, (domain.b - domain.a) / n, False, 1, domain)
        x = np.linspace(0.0, domain.radius, n + 1)
        return cls(x, domain.radius / n, True, domain.dimension, domain)

    @property
    def n(self) -> int:
        return len(self.x) - 1

    @property
    def sym_left(self) -> int:
        return int(self.radial)

    def distance_from(self, center: float) -> np.ndarray:
        return np.abs(self.x - center)

    def arrays(self):
        """Face weights, node divergence factors and quadrature weights."""
        h, n = self.h, self.n
        if not self.radial:
            wf = np.ones(n)
            wn = np.full(n + 1, 1.0 / h)
            wq = np.full(n + 1, h)
            wq[0] = wq[-1] = h / 2
            return wf, wn, wq
        N = self.N
        faces = (np.arange(n) + 0.5) * h
        wf = faces ** (N - 1)
        wn = np.empty(n + 1)
        wn[1:] = 1.0 / (h * self.x[1:] ** (N - 1))
        wn[0] = N / (h * wf[0])
        wq = sphere_area(N) * h * self.x ** (N - 1)
        wq[0] *= 0.5
        wq[-1] *= 0.5
        return wf, wn, wq


def pack_params(P: ProblemParams, eps_reg: float) -> np.ndarray:
    return np.array([P.alpha, P.beta, P.gamma, P.mu, P.nu, P.k, P.s, P.l, P.q, P.m,
                     P.r, P.sigma, P.p, eps_reg], dtype=float)


@dataclass(frozen=True)
class SolverConfig:
    n: int = 200
    eps_reg: float = 1e-8
    dt_init: float = 1.0  # upper bound on any step
    dt_min: float = 1e-14
    safety: float = 0.4
    t_max: float = 1.0
    blowup_threshold: float = 1e8
    snapshot_every: int = 0  # accepted steps between snapshots; 0 keeps none
    max_steps: int = 50_000_000

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "snapshot_every":
                if v < 0:
                    raise ValueError("snapshot_every must be >= 0")
            elif not v > 0:
                raise ValueError(f"{f.name} must be positive")
        if not self.dt_min < self.dt_init:
            raise ValueError("dt_min must be below dt_init")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SolverConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown solver keys: {sorted(unknown)}")
        kw = {}
        for k, v in d.items():
            kw[k] = int(v) if k in ("n", "snapshot_every", "max_steps") else float(v)
        return cls(**kw)


class _Stepper:
    """Binds grid arrays and packed parameters for the kernel calls."""

    def __init__(self, grid: Grid, P: ProblemParams, cfg: SolverConfig, backend=None):
        self.grid = grid
        self.P = P
        self.cfg = cfg
        self.k = backend or kernels.backend
        self.wf, self.wn, self.wq = grid.arrays()
        self.prm = pack_params(P, cfg.eps_reg)
        self.nfac = float(grid.N) if grid.radial else 1.0

    def rhs(self, u):
        f = np.empty_like(u)
        diag = self.k.rhs(u, f, self.grid.h, self.wf, self.wn, self.wq, self.grid.sym_left, self.prm)
        return f, diag

    def propose(self, u):
        f = np.empty_like(u)
        dt, U = self.k.prepare(u, f, self.grid.h, self.wf, self.wn, self.wq, self.grid.sym_left,
                               self.prm, self.nfac, self.cfg.safety, self.cfg.dt_init)
        return dt, U, f

    def euler(self, u, f, dt, U):
        out = np.empty_like(u)
        ok = self.k.euler(u, f, dt, out, self.grid.sym_left, U)
        return out, ok

    def norms(self, u):
        return self.k.norms(u, self.wq, self.P.s)

    def advance(self, u, t, t_end, max_steps, series, row0):
        c = self.cfg
        return self.k.advance(u, t, t_end, max_steps, self.grid.h, self.wf, self.wn, self.wq,
                              self.grid.sym_left, self.prm, self.nfac, c.safety, c.dt_init,
                              c.dt_min, c.blowup_threshold, series, row0)


# -- operators ----------------------------------------------------------------

def plap_operator(u, grid: Grid, p: float, eps_reg: float = 1e-8, backend=None) -> np.ndarray:
    """Regularized flux-form p-Laplacian at every node (zero on Dirichlet nodes)."""
    k = backend or kernels.backend
    wf, wn, _ = grid.arrays()
    u = np.ascontiguousarray(u, dtype=float)
    out = np.empty_like(u)
    k.plap(u, out, grid.h, wf, wn, grid.sym_left, p, eps_reg)
    return out


def nonlocal_integral(u, grid: Grid, s: float) -> float:
    _, _, wq = grid.arrays()
    return float(np.dot(wq, np.abs(np.asarray(u, dtype=float)) ** s))


def rhs(u, grid: Grid, P: ProblemParams, eps_reg: float = 1e-8, backend=None) -> np.ndarray:
    st = _Stepper(grid, P, SolverConfig(eps_reg=eps_reg), backend)
    f, _ = st.rhs(np.ascontiguousarray(u, dtype=float))
    return f


def step(u, grid: Grid, P: ProblemParams, cfg: SolverConfig, t: float = 0.0, backend=None):
    """One accepted Euler step. Returns (new field, dt used)."""
    u = np.array(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("field must be finite")
    st = _Stepper(grid, P, cfg, backend)
    series = np.empty((1, 5))
    _, n, status = st.advance(u, t, math.inf, 1, series, 0)
    if status == kernels.UNDERFLOW:
        raise FloatingPointError("dt underflow")
    return u, (series[0, 4] if n else 0.0)


# -- runs ---------------------------------------------------------------------

COMPLETED, BLOWUP, FAILED = "Completed", "BlowUp", "Failed"


@dataclass
class BlowupFit:
    T: float
    kappa: float
    degenerate: bool
    window: int
    rss: float = float("nan")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunOutcome:
    status: str
    series: np.ndarray  # rows (t, sup, l2, integral, dt)
    final: np.ndarray
    grid: Grid
    reason: str = ""
    fit: BlowupFit | None = None
    snapshots: list = field(default_factory=list)  # (step, t, u)
    backend: str = ""

    @property
    def t(self):
        return self.series[:, 0]

    @property
    def sup_norm(self):
        return self.series[:, 1]

    @property
    def T_est(self):
        return self.fit.T if self.fit else None

    @property
    def steps(self) -> int:
        return len(self.series) - 1


def run(u0, grid: Grid, P: ProblemParams, cfg: SolverConfig, backend=None,
        chunk: int = 200_000, observer=None, observe_every: int = 1) -> RunOutcome:
    """Integrate until t_max, blow-up (sup >= threshold) or failure.

    ``observer(t, u)`` is called on the initial field and after every
    ``observe_every`` accepted steps; it must not modify ``u``.
    """
    st = _Stepper(grid, P, cfg, backend)
    u = np.array(u0, dtype=float)
    if u.shape != grid.x.shape:
        raise ValueError("initial field does not match the grid")
    tol = 1e-12 * max(1.0, float(np.max(np.abs(u))))
    if abs(u[-1]) > tol or (not grid.radial and abs(u[0]) > tol):
        raise ValueError("initial field must vanish on the Dirichlet boundary")
    u[-1] = 0.0
    if not grid.radial:
        u[0] = 0.0
    sup, l2, integral = st.norms(u)
    blocks = [np.array([[0.0, sup, l2, integral, 0.0]])]
    snaps = []
    every = cfg.snapshot_every
    if every:
        snaps.append((0, 0.0, u.copy()))
    t, total = 0.0, 0
    if observer is not None:
        observer(0.0, u)
    status, reason = COMPLETED, ""
    code = kernels.CHUNK
    if sup >= cfg.blowup_threshold:
        code = kernels.BLOWUP
    while code == kernels.CHUNK:
        budget = min(chunk, cfg.max_steps - total)
        if every:
            budget = min(budget, every - total % every)
        if observer is not None:
            budget = min(budget, observe_every - total % observe_every)
        if budget <= 0:
            status, reason = FAILED, "step budget exhausted"
            break
        buf = np.empty((budget, 5))
        t, n, code = st.advance(u, t, cfg.t_max, budget, buf, 0)
        blocks.append(buf[:n])
        total += n
        if every and total % every == 0 and n:
            snaps.append((total, t, u.copy()))
        if observer is not None and n and (total % observe_every == 0 or code != kernels.CHUNK):
            observer(t, u)
    series = np.concatenate(blocks)
    fit = None
    if code == kernels.BLOWUP:
        status = BLOWUP
        fit = estimate_blowup_time(series)
    elif code == kernels.UNDERFLOW:
        status, reason = FAILED, "dt underflow"
    if every and (not snaps or snaps[-1][0] != total):
        snaps.append((total, t, u.copy()))
    return RunOutcome(status, series, u, grid, reason, fit, snaps, st.k.BACKEND)


def estimate_blowup_time(series, window_frac: float = 0.25, min_samples: int = 10) -> BlowupFit:
    """Fit log sup|u| = -kappa log(T - t) + c over the trailing samples."""
    series = np.asarray(series, dtype=float)
    t, sup = series[:, 0], series[:, 1]
    n = len(t)
    w = max(min_samples, int(math.ceil(window_frac * n)))
    w = min(w, n)
    tw, yw = t[-w:], np.log(np.maximum(sup[-w:], np.finfo(float).tiny))
    t_last = float(t[-1])
    if w < 3 or np.ptp(yw) < 1e-9 or np.ptp(tw) <= 0:
        return BlowupFit(t_last, 0.0, True, w)
    span = float(tw[-1] - tw[0])

    def rss(logd):
        x = -np.log(t_last + math.exp(logd) - tw)
        A = np.vstack([x, np.ones_like(x)]).T
        coef, *_ = np.linalg.lstsq(A, yw, rcond=None)
        r = yw - A @ coef
        return float(r @ r), coef

    lo, hi = math.log(span * 1e-9), math.log(span * 1e3)
    grid = np.linspace(lo, hi, 241)
    vals = np.array([rss(g)[0] for g in grid])
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    best = optimize.minimize_scalar(lambda g: rss(g)[0], bounds=(a, b), method="bounded",
                                    options={"xatol": 1e-10})
    logd = best.x if best.fun <= vals[i] else grid[i]
    res, coef = rss(logd)
    degenerate = bool(i == len(grid) - 1 or coef[0] <= 0)
    T = t_last + math.exp(logd)
    return BlowupFit(t_last if degenerate else T, float(coef[0]), degenerate, w, res)
