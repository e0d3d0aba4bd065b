"""Problem parameters, domains and the regime classifier.

The equation integrated throughout the package is

    u_t - div(|grad u|^(p-2) grad u) = alpha |u|^(k-1) u * int_Omega |u|^s
        - beta |u|^(l-1) u |grad u|^q + gamma u^m + mu |grad u|^r
        - nu |u|^(sigma-1) u

with homogeneous Dirichlet data on the boundary.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Union

EQ_TOL = 1e-9
DEFAULT_EPSILON = 0.5


@dataclass(frozen=True)
class ProblemParams:
    alpha: float = 1.0
    beta: float = 0.0
    gamma: float = 0.0
    mu: float = 0.0
    nu: float = 0.0
    k: float = 1.0
    s: float = 1.0
    l: float = 1.0  # noqa: E741
    q: float = 1.0
    m: float = 1.0
    r: float = 1.0
    sigma: float = 1.0
    p: float = 2.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemParams":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown problem keys: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in d.items()})

    def replace(self, **kw) -> "ProblemParams":
        d = self.to_dict()
        d.update(kw)
        return ProblemParams(**d)


@dataclass(frozen=True)
class Interval:
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise ValueError(f"interval needs finite a < b, got ({self.a}, {self.b})")

    @property
    def dimension(self) -> int:
        return 1

    @property
    def measure(self) -> float:
        return self.b - self.a

    @property
    def diameter(self) -> float:
        return self.b - self.a

    @property
    def center(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def inradius(self) -> float:
        return 0.5 * (self.b - self.a)

    def to_dict(self) -> dict:
        return {"shape": "interval", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class RadialBall:
    """Ball of the given radius centred at the origin of R^N."""

    radius: float = 1.0
    dimension: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dimension}")

    @property
    def measure(self) -> float:
        n = self.dimension
        return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * self.radius**n

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    @property
    def center(self) -> float:
        return 0.0

    @property
    def inradius(self) -> float:
        return self.radius

    def to_dict(self) -> dict:
        return {"shape": "ball", "radius": self.radius, "dimension": self.dimension}


DomainSpec = Union[Interval, RadialBall]


def domain_from_dict(d: dict) -> DomainSpec:
    d = dict(d)
    shape = d.pop("shape", None)
    if shape == "interval":
        allowed = {"a", "b"}
    elif shape == "ball":
        allowed = {"radius", "dimension"}
    else:
        raise ValueError(f"unknown domain shape {shape!r}")
    unknown = set(d) - allowed
    if unknown:
        raise ValueError(f"unknown domain keys: {sorted(unknown)}")
    if shape == "interval":
        return Interval(float(d.get("a", 0.0)), float(d.get("b", 1.0)))
    dim = d.get("dimension", 1)
    if int(dim) != dim:
        raise ValueError(f"dimension must be an integer, got {dim}")
    return RadialBall(float(d.get("radius", 1.0)), int(dim))


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n (2 for n = 1)."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


# -- validation ---------------------------------------------------------------

def validate(params: ProblemParams) -> list[str]:
    """Every violated standing assumption, by name. Empty means valid."""
    P = params
    out = []
    for name in ("alpha", "l", "sigma"):
        if not getattr(P, name) > 0:
            out.append(f"{name} > 0 violated")
    for name in ("beta", "nu"):
        if not getattr(P, name) >= 0:
            out.append(f"{name} >= 0 violated")
    for name in ("k", "m", "s"):
        if not getattr(P, name) >= 1:
            out.append(f"{name} >= 1 violated")
    if not P.r >= P.p - 1:
        out.append("r >= p-1 violated")
    if not P.p - 1 >= P.p / 2:
        out.append("p-1 >= p/2 violated")
    if not P.q >= P.p / 2:
        out.append("q >= p/2 violated")
    for f in fields(P):
        if not math.isfinite(getattr(P, f.name)):
            out.append(f"{f.name} finite violated")
    return out


class InvalidParams(ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


def require_valid(params: ProblemParams) -> None:
    v = validate(params)
    if v:
        raise InvalidParams(v)


# -- regime classification ----------------------------------------------------

BLOWUP = "BlowUpPredicted"
GLOBAL = "GlobalPredicted"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Check:
    name: str
    holds: bool
    margin: float

    def to_dict(self) -> dict:
        return {"name": self.name, "holds": self.holds, "margin": self.margin}


@dataclass(frozen=True)
class RegimeVerdict:
    tag: str
    blowup_checks: tuple[Check, ...] = ()
    global_checks: tuple[Check, ...] = ()
    global_case: int | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def reasons(self) -> tuple[Check, ...]:
        return self.blowup_checks + self.global_checks

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "global_case": self.global_case,
            "blowup_checks": [c.to_dict() for c in self.blowup_checks],
            "global_checks": [c.to_dict() for c in self.global_checks],
            "notes": list(self.notes),
        }


def _gt(name, lhs, rhs):
    return Check(name, lhs > rhs, lhs - rhs)


def blowup_checks(P: ProblemParams) -> list[Check]:
    return [
        _gt("gamma > 0", P.gamma, 0.0),
        _gt("m > max{p-1, r, sigma}", P.m, max(P.p - 1, P.r, P.sigma)),
        _gt("q+l > 1", P.q + P.l, 1.0),
        _gt("k+s > max{p-1, q+l, r}", P.k + P.s, max(P.p - 1, P.q + P.l, P.r)),
        Check("q >= p/2", P.q >= P.p / 2, P.q - P.p / 2),
        Check("k, s >= 1", min(P.k, P.s) >= 1, min(P.k, P.s) - 1),
    ]


def global_constant(P: ProblemParams, domain: DomainSpec) -> float:
    """The constant e^{s(diam + 1)} bounding the exponential super-solution."""
    return math.exp(P.s * (domain.diameter + 1.0))


def global_case(P: ProblemParams) -> int | None:
    ql, ks, p1 = P.q + P.l, P.k + P.s, P.p - 1
    if ql > max(p1, ks) and abs(ql - ks) > EQ_TOL and abs(ql - p1) > EQ_TOL:
        return 1
    if abs(ql - ks) <= EQ_TOL and ql > p1 + EQ_TOL:
        return 2
    if abs(ql - p1) <= EQ_TOL and p1 > ks + EQ_TOL:
        return 3
    return None


def global_checks(P: ProblemParams, domain: DomainSpec, epsilon: float = DEFAULT_EPSILON):
    checks = [
        Check("mu = 0", P.mu == 0.0, -abs(P.mu)),
        _gt("sigma > m", P.sigma, P.m),
        _gt("beta > 0", P.beta, 0.0),
    ]
    if P.gamma > 0:
        checks.append(_gt("nu > 0 (gamma > 0)", P.nu, 0.0))
    case = global_case(P)
    ql, ks, p1 = P.q + P.l, P.k + P.s, P.p - 1
    if case is None:
        checks.append(Check("one of the three exponent cases",
                            False, ql - max(p1, ks)))
    elif case == 1:
        checks.append(_gt("case 1: q+l > max{p-1, k+s}", ql, max(p1, ks)))
    elif case == 2:
        checks.append(Check("case 2: q+l = k+s > p-1", True, ql - p1))
        C = global_constant(P, domain)
        need = 2.0 * P.alpha * C * domain.measure
        checks.append(Check("case 2: |Omega| <= beta/(2 alpha C)", P.beta >= need, P.beta - need))
    else:
        checks.append(Check("case 3: q+l = p-1 > k+s", True, p1 - ks))
        need = 2.0 * ((domain.dimension - 1) / epsilon + (P.p - 1))
        checks.append(Check("case 3: beta >= 2((N-1)/eps + p-1)", P.beta >= need, P.beta - need))
    return checks, case


def classify_regime(params: ProblemParams, domain: DomainSpec,
                    epsilon: float = DEFAULT_EPSILON) -> RegimeVerdict:
    require_valid(params)
    notes = []
    if params.q < params.p - 1:
        notes.append("q < p-1: blow-up statement assumes only q >= p/2, "
                     "the comparison estimate uses q >= p-1")
    bc = tuple(blowup_checks(params))
    gc, case = global_checks(params, domain, epsilon)
    gc = tuple(gc)
    if all(c.holds for c in bc):
        return RegimeVerdict(BLOWUP, bc, gc, None, tuple(notes))
    if all(c.holds for c in gc):
        return RegimeVerdict(GLOBAL, bc, gc, case, tuple(notes))
    return RegimeVerdict(UNKNOWN, bc, gc, case, tuple(notes))
