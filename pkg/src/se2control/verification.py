"""Numerical verification suites for a given system.

Each suite re-checks one structural fact on the concrete system with seeded
random sampling: the strict spectral-bound inequality behind the invariant
ball, ball invariance itself, conjugacy of the closed-form flow against an
independent RK4 integration, the semigroup property of the flow, and strict
growth of the monotone functional in the degenerate case.  Suites that do not
apply to the system's case are reported as skipped with the reason.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .flow import DEFAULT_RK4_STEP, flow_detA0, flow_r2, flow_se2, rk4_oracle
from .geometry import check_invariance, chord_ratio, chord_ratio_limit
from .group import TWO_PI, GroupElement, angle_dist
from .reachability import control_grid, degenerate_structure_check
from .system import (
    CASE_DEGENERATE,
    SystemSpec,
    classify,
    larc,
    reduce_system,
)

SUITE_NAMES = (
    "bound_sweep",
    "ball_invariance",
    "conjugacy",
    "semigroup",
    "monotone_functional",
)


@dataclass
class SuiteResult:
    name: str
    status: str  # "passed" | "failed" | "skipped"
    reason: str = ""
    metrics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"name": self.name, "status": self.status, "metrics": self.metrics}
        if self.reason:
            out["reason"] = self.reason
        return out


@dataclass
class VerificationReport:
    case: str
    seed: int
    suites: list

    @property
    def passed(self) -> bool:
        return all(s.status != "failed" for s in self.suites) and any(
            s.status == "passed" for s in self.suites
        )

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "seed": self.seed,
            "passed": self.passed,
            "suites": [s.to_dict() for s in self.suites],
        }


def _suite_bound_sweep(spec: SystemSpec, seed: int) -> SuiteResult:
    """Strict inequality of the spectral bound on its whole (nu, s) sweep."""
    if spec.lam == 0.0:
        return SuiteResult("bound_sweep", "skipped", "requires trace A != 0")
    sigma = abs(spec.lam)
    nus = np.array(
        [spec.mu - spec.alpha * u for u in control_grid(spec.omega, 21)]
    )
    nus = nus[nus != 0.0]
    if nus.size == 0:
        return SuiteResult(
            "bound_sweep", "skipped", "every control hits the rotation-free axis"
        )
    svals = np.concatenate([np.geomspace(1e-3, 10.0, 41), -np.geomspace(1e-3, 10.0, 41)])
    min_margin = np.inf
    count = 0
    for nu in nus:
        bound = chord_ratio_limit(sigma, nu)
        vals = chord_ratio(sigma, nu, svals)
        min_margin = min(min_margin, float(np.min(bound - vals)))
        count += svals.size
    status = "passed" if min_margin > 0.0 else "failed"
    return SuiteResult(
        "bound_sweep",
        status,
        metrics={"evaluations": count, "min_margin": min_margin},
    )


def _suite_ball_invariance(spec: SystemSpec, seed: int, n_samples: int) -> SuiteResult:
    if spec.lam == 0.0:
        return SuiteResult("ball_invariance", "skipped", "requires trace A != 0")
    if spec.det() == 0.0 or spec.alpha == 0.0:
        return SuiteResult("ball_invariance", "skipped", "no planar reduction")
    rs = reduce_system(spec)
    if float(np.linalg.norm(rs.eta)) == 0.0:
        return SuiteResult(
            "ball_invariance", "skipped", "eta = 0: equilibria collapse to the origin"
        )
    rep = check_invariance(rs, n_samples=n_samples, seed=seed)
    status = "passed" if rep.passed else "failed"
    return SuiteResult(
        "ball_invariance",
        status,
        metrics={
            "samples": rep.n_samples,
            "violations_inward": rep.violations_inward,
            "violations_outward": rep.violations_outward,
            "min_margin_inward": rep.min_margin_inward,
            "min_margin_outward": rep.min_margin_outward,
        },
    )


def _suite_conjugacy(
    spec: SystemSpec, seed: int, n_samples: int = 50, tol: float = 1e-6
) -> SuiteResult:
    """Closed-form flow (through the conjugation charts) vs direct RK4."""
    if spec.alpha == 0.0:
        return SuiteResult("conjugacy", "skipped", "alpha = 0: no reduction chart")
    rng = np.random.default_rng(seed)
    lo, hi = spec.omega
    max_dev = 0.0
    for _ in range(n_samples):
        g = GroupElement(rng.uniform(0.0, TWO_PI), rng.uniform(-2.0, 2.0, size=2))
        u = rng.uniform(lo, hi)
        s = rng.uniform(0.1, 2.0)
        exact = flow_se2(spec, s, g, u)
        approx = rk4_oracle(spec, s, g.as_array(), u, step=DEFAULT_RK4_STEP)
        dev = angle_dist(exact.t, approx[0]) + float(
            np.linalg.norm(exact.v - approx[1:])
        )
        max_dev = max(max_dev, dev)
    status = "passed" if max_dev < tol else "failed"
    return SuiteResult(
        "conjugacy",
        status,
        metrics={"samples": n_samples, "max_deviation": max_dev, "tolerance": tol},
    )


def _suite_semigroup(
    spec: SystemSpec, seed: int, n_samples: int = 50, tol: float = 1e-9
) -> SuiteResult:
    """phi(s + t) = phi(s) after phi(t) for the closed-form flows."""
    if spec.alpha == 0.0:
        return SuiteResult("semigroup", "skipped", "alpha = 0: no reduction chart")
    rng = np.random.default_rng(seed + 1)
    max_dev = 0.0
    if spec.det() == 0.0:
        chart = SystemSpec(
            spec.alpha,
            spec.xi,
            np.zeros((2, 2)),
            np.zeros(2),
            tuple(sorted((spec.alpha * spec.omega[0], spec.alpha * spec.omega[1]))),
        )
        lo, hi = chart.omega
        for _ in range(n_samples):
            g = GroupElement(rng.uniform(0.0, TWO_PI), rng.uniform(-2.0, 2.0, size=2))
            u = rng.uniform(lo, hi)
            s, t = rng.uniform(0.0, 3.0, size=2)
            whole = flow_detA0(chart, s + t, g, u)
            parts = flow_detA0(chart, s, flow_detA0(chart, t, g, u), u)
            dev = angle_dist(whole.t, parts.t) + float(np.linalg.norm(whole.v - parts.v))
            scale = max(1.0, float(np.linalg.norm(whole.v)))
            max_dev = max(max_dev, dev / scale)
    else:
        rs = reduce_system(spec)
        lo, hi = rs.omega
        for _ in range(n_samples):
            v = rng.uniform(-3.0, 3.0, size=2)
            u = rng.uniform(lo, hi)
            s, t = rng.uniform(-2.0, 2.0, size=2)
            whole = flow_r2(rs, s + t, v, u)
            parts = flow_r2(rs, s, flow_r2(rs, t, v, u), u)
            dev = float(np.linalg.norm(whole - parts))
            scale = max(1.0, float(np.linalg.norm(whole)))
            max_dev = max(max_dev, dev / scale)
    status = "passed" if max_dev < tol else "failed"
    return SuiteResult(
        "semigroup",
        status,
        metrics={"samples": n_samples, "max_deviation": max_dev, "tolerance": tol},
    )


def _suite_monotone(spec: SystemSpec, seed: int) -> SuiteResult:
    if spec.det() != 0.0:
        return SuiteResult("monotone_functional", "skipped", "requires A = 0")
    if not larc(spec):
        return SuiteResult(
            "monotone_functional", "skipped", "rank condition fails (alpha xi = 0)"
        )
    rep = degenerate_structure_check(spec, n_samples=30, n_pairs=6, seed=seed)
    status = "passed" if rep.passed else "failed"
    return SuiteResult(
        "monotone_functional",
        status,
        metrics={
            "trajectories": rep.n_trajectories,
            "min_increment": rep.min_functional_increment,
            "mutual_pairs": rep.n_mutual,
            "counterexamples": rep.counterexamples,
            "irreversible_confirmed": rep.irreversible_confirmed,
        },
    )


def run_verification(
    spec: SystemSpec,
    seed: int = 0,
    suites=None,
    n_samples: int = 2000,
) -> VerificationReport:
    """Run the requested suites (default: all) with case-aware routing."""
    report = classify(spec)
    requested = tuple(suites) if suites else SUITE_NAMES
    unknown = set(requested) - set(SUITE_NAMES)
    if unknown:
        raise ValueError(f"unknown suites: {sorted(unknown)}")
    results = []
    for name in SUITE_NAMES:
        if name not in requested:
            continue
        if name == "bound_sweep":
            results.append(_suite_bound_sweep(spec, seed))
        elif name == "ball_invariance":
            results.append(_suite_ball_invariance(spec, seed, n_samples))
        elif name == "conjugacy":
            results.append(_suite_conjugacy(spec, seed))
        elif name == "semigroup":
            results.append(_suite_semigroup(spec, seed))
        elif name == "monotone_functional":
            results.append(_suite_monotone(spec, seed))
    return VerificationReport(case=report.case, seed=seed, suites=results)
