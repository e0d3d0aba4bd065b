"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test appends one line to RESULTS; the lines are printed in the pytest
terminal summary and when this file is run as a script.
"""

import json
import math
import time

import numpy as np
import pytest

from plapsim import analytic, cli, harness, solver
from plapsim.model import Interval, ProblemParams
from plapsim.solver import Grid, SolverConfig

RESULTS = []


def report(number, title, passed, detail, elapsed, budget):
    ok = passed and elapsed <= budget
    RESULTS.append(f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}; "
                   f"{elapsed:.2f}s (budget {budget:g}s)")
    return ok


# 1 -------------------------------------------------------------------------

@pytest.mark.xfail(strict=True, reason="the inequality is false for exponents in (1, 2): "
                   "a=0, b=1 gives lhs=1 < 4/s^2=rhs; holds on [2, 6]")
def test_criterion_1_lemma_suite():
    t0 = time.perf_counter()
    rep = harness.lemma_suite(seed=42, samples=100_000)
    elapsed = time.perf_counter() - t0
    rec = {r.name: r for r in rep.records}
    full = rec["min slack (lhs-rhs)/(1+|lhs|), sigma in (1,6]"]
    upper = rec["min slack (lhs-rhs)/(1+|lhs|), sigma in [2,6]"]
    eq = max(r.value for r in rep.records if r.name.startswith("sigma=2"))
    ok = report(1, "monotonicity inequality, 1e5 samples", full.passed and eq <= 1e-12,
                f"min slack {full.value:.3g} (need >= -1e-12), on sigma>=2 {upper.value:.3g}, "
                f"sigma=2 max|lhs-rhs| {eq:.2g}", elapsed, 5)
    assert upper.passed and eq <= 1e-12  # the part that does hold
    assert ok


# 2 -------------------------------------------------------------------------

def test_criterion_2_profile_identity():
    t0 = time.perf_counter()
    rep = harness.profile_suite(seed=42, cases=100, points=1000)
    elapsed = time.perf_counter() - t0
    flux, lap = rep.records[0].value, rep.records[1].value
    ok = report(2, "profile flux and radial p-Laplacian identities", flux <= 1e-12 and lap <= 1e-12,
                f"max rel err flux {flux:.2g}, p-Laplacian {lap:.2g} (tol 1e-12)", elapsed, 2)
    assert ok


# 3 -------------------------------------------------------------------------

def test_criterion_3_heat_convergence():
    t0 = time.perf_counter()
    P = ProblemParams(alpha=1e-300, k=1, s=1, l=1, q=1, m=1, r=1, sigma=1, p=2)
    errs = []
    for n in (50, 100, 200):
        g = Grid.build(Interval(0.0, 1.0), n)
        out = solver.run(np.sin(np.pi * g.x), g, P, SolverConfig(n=n, t_max=0.1))
        exact = math.exp(-math.pi**2 * 0.1) * np.sin(np.pi * g.x)
        errs.append(float(np.max(np.abs(out.final - exact))))
    elapsed = time.perf_counter() - t0
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    ok = report(3, "heat convergence oracle",
                all(1.7 <= o <= 2.3 for o in orders) and errs[-1] <= 1e-3,
                f"orders {orders[0]:.3f}, {orders[1]:.3f} (need [1.7, 2.3]); "
                f"sup err at n=200 {errs[-1]:.3g} (<= 1e-3)", elapsed, 30)
    assert ok


# 4 -------------------------------------------------------------------------

def test_criterion_4_subsolution_certificate():
    t0 = time.perf_counter()
    P = harness.BLOWUP_TUPLE
    spec = analytic.build_subsolution(P, harness.BLOWUP_DOMAIN)
    margins = analytic.exponent_margins(spec, P)
    cert = analytic.certify_subsolution(spec, P)
    elapsed = time.perf_counter() - t0
    # hand chain: r~ = 0.9 * (1/3), k~ = N r~ + 1, A = 2 k~/r~, delta = 0.5 gamma/(k~ (1 + A/2))
    hand = {"r_tilde": 0.3, "k_tilde": 1.3, "A": 26 / 3, "delta": 0.5 / (1.3 * (1 + 13 / 3))}
    got = {k: getattr(spec, k) for k in hand}
    digits = all(abs(got[k] - v) <= 5e-7 * abs(v) for k, v in hand.items())
    ok = report(4, "sub-solution constants and certificate",
                digits and all(m > 0 for m in margins.values()) and cert.worst <= 1e-9
                and (cert.n_space, cert.n_time) == (201, 101),
                "r~={r_tilde:.6g} k~={k_tilde:.6g} A={A:.6g} delta={delta:.6g}; ".format(**got)
                + f"min exponent margin {min(margins.values()):.3g}; "
                f"max scaled P(v) {cert.worst:.3g} on 201x101", elapsed, 10)
    assert ok


# 5 -------------------------------------------------------------------------

def test_criterion_5_blowup_end_to_end():
    t0 = time.perf_counter()
    rep = harness.blowup_experiment(harness.BLOWUP_TUPLE, harness.BLOWUP_DOMAIN, n_grid=400)
    elapsed = time.perf_counter() - t0
    rec = {r.name: r for r in rep.records}
    T = rec["T_est <= (1/delta - t0)(1 + 0.10)"]
    order = rec["max (v(t+t0) - u)/max(1, sup v) on common window"]
    kappa_dev = rep.diagnostics["kappa_rel_dev"]
    ok = report(5, "blow-up from the sub-solution at n=400",
                rep.passed and kappa_dev <= 0.25,
                f"status {rep.diagnostics['status']}, T_est {T.value:.5g} <= {T.bound:.5g}; "
                f"ordering slack {order.value:.3g} (<= 1e-6); kappa rel dev {kappa_dev:.3f}",
                elapsed, 300)
    assert ok


# 6 -------------------------------------------------------------------------

def test_criterion_6_global_end_to_end():
    t0 = time.perf_counter()
    rep = harness.global_experiment(harness.GLOBAL_TUPLE, Interval(0.0, 1.0), t_end=10.0,
                                    n_grid=100)
    elapsed = time.perf_counter() - t0
    rec = {r.name: r for r in rep.records}
    sup = rec["max sup-norm over run"]
    res = rec["min scaled residual of super-solution"]
    ok = report(6, "global boundedness to t=10", rep.passed,
                f"status {rep.diagnostics['status']}, max sup {sup.value:.4g} <= {sup.bound:.6g}; "
                f"min scaled L_p v {res.value:.4g} (>= -1e-9, 1000 points)", elapsed, 300)
    assert ok


# 7 -------------------------------------------------------------------------

def test_criterion_7_comparison_preservation():
    t0 = time.perf_counter()
    rep = harness.comparison_suite(seed=42, pairs=20)
    elapsed = time.perf_counter() - t0
    pairs = [r for r in rep.records if r.name.startswith("pair ")]
    control = next(r for r in rep.records if r.name.startswith("identical"))
    worst = max(r.value / r.bound for r in pairs)
    ok = report(7, "ordering preservation on random pairs",
                len(pairs) == 20 and all(r.passed for r in pairs) and control.value == 0.0,
                f"{sum(r.passed for r in pairs)}/20 pairs pass, worst violation/tol {worst:.3g}; "
                f"control violation {control.value:g}", elapsed, 600)
    assert ok


# 8 -------------------------------------------------------------------------

def hand_verdict(P, measure=1.0, diameter=1.0, N=1, eps=0.5, tol=1e-9):
    """Direct transcription of the two hypothesis lists."""
    ql, ks, p1 = P["q"] + P["l"], P["k"] + P["s"], P["p"] - 1
    if (P["gamma"] > 0 and P["m"] > max(p1, P["r"], P["sigma"]) and ql > 1
            and ks > max(p1, ql, P["r"])):
        return "BlowUpPredicted"
    if not (P["mu"] == 0 and P["sigma"] > P["m"] and P["beta"] > 0
            and (P["gamma"] <= 0 or P["nu"] > 0)):
        return "Unknown"
    C = math.exp(P["s"] * (diameter + 1))
    if ql > max(p1, ks) and abs(ql - ks) > tol and abs(ql - p1) > tol:
        return "GlobalPredicted"
    if abs(ql - ks) <= tol and ql > p1 + tol:
        return "GlobalPredicted" if P["beta"] >= 2 * P["alpha"] * C * measure else "Unknown"
    if abs(ql - p1) <= tol and p1 > ks + tol:
        return "GlobalPredicted" if P["beta"] >= 2 * ((N - 1) / eps + p1) else "Unknown"
    return "Unknown"


SWEEP_BASES = {
    "sigma>m": dict(alpha=1.0, beta=20.0, gamma=1.0, mu=0.0, nu=1.0, k=1.0, s=1.0, l=1.0,
                    q=2.0, m=2.0, r=1.0, sigma=3.0, p=2.0),
    "sigma<m": dict(alpha=1.0, beta=0.1, gamma=1.0, mu=0.1, nu=0.1, k=1.0, s=1.0, l=0.5,
                    q=1.0, m=2.0, r=1.0, sigma=0.5, p=2.0),
}
SWEEP_AXES = {
    "sigma>m": {"q": [1.0, 1.5, 2.0, 2.5, 3.0], "k": [1.0, 1.5, 2.0, 2.5, 3.0]},
    "sigma<m": {"q": [1.0, 1.25, 1.5, 2.0, 2.5], "k": [1.0, 1.25, 1.5, 2.0, 2.5]},
}


def test_criterion_8_regime_sweep(tmp_path):
    t0 = time.perf_counter()
    mismatches, total, tags = [], 0, set()
    for side, base in SWEEP_BASES.items():
        cfg = {"problem": base, "domain": {"shape": "interval", "a": 0.0, "b": 1.0},
               "output": {"directory": str(tmp_path / side)},
               "sweep": {"axes": SWEEP_AXES[side], "solve": False}}
        path = tmp_path / f"{side}.json"
        path.write_text(json.dumps(cfg))
        assert cli.main(["sweep", "--config", str(path)]) == 0
        lines = (tmp_path / side / "sweep.csv").read_text().splitlines()
        header = lines[0].split(",")
        for line in lines[1:]:
            row = dict(zip(header, line.split(",")))
            P = dict(base, q=float(row["q"]), k=float(row["k"]))
            total += 1
            tags.add(row["verdict"])
            if row["verdict"] != hand_verdict(P):
                mismatches.append((side, row["q"], row["k"], row["verdict"]))
    elapsed = time.perf_counter() - t0
    ok = report(8, "5x5 regime sweeps across q+l vs k+s", total == 50 and not mismatches,
                f"{total - len(mismatches)}/{total} tuples match the hand evaluation "
                f"(two 5x5 grids, one per side of sigma vs m); verdicts seen {sorted(tags)}",
                elapsed, 5)
    assert ok, mismatches


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
