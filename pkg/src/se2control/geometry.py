"""Equilibria geometry, the invariant ball, and the strict spiral bound.

For lam != 0 the equilibria v(u) = -u A(u)^{-1} eta, u in R, sweep a circle
with center -((mu/lam) eta + theta eta)/2 and radius
|eta| sqrt(mu^2 + lam^2) / (2 |lam|); as u -> +-infinity they approach
-theta eta.  For lam = 0 they sweep the line R * theta eta with a pole at
u = mu.

The ball B centered at -theta eta with radius |eta| sqrt(lam^2 + mu^2)/|lam|
is invariant: flows with lam s < 0 map B strictly into its interior, and
flows with lam s > 0 strictly increase the distance to the center outside B.
Both facts rest on the strict bound f(sigma, nu, s) < (sigma^2+nu^2)/sigma^2
implemented here in a cancellation-free form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .flow import equilibrium, flow_r2
from .group import perp
from .system import ReducedSpec

LOCUS_CLIP_NORM = 1e6


@dataclass
class Circle:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(2)
        self.radius = float(self.radius)

    def to_dict(self) -> dict:
        return {"center": [float(c) for c in self.center], "radius": float(self.radius)}


@dataclass
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(2)
        self.radius = float(self.radius)

    def contains(self, v, margin: float = 0.0) -> bool:
        v = np.asarray(v, dtype=float)
        return float(np.linalg.norm(v - self.center)) <= self.radius + margin

    def to_dict(self) -> dict:
        return {"center": [float(c) for c in self.center], "radius": float(self.radius)}


def circle_params(rs: ReducedSpec) -> Circle:
    """Circle swept by the equilibria v(u), u in R (requires lam != 0)."""
    if rs.lam == 0.0:
        raise ValueError("equilibria form a line when lam = 0, not a circle")
    center = -0.5 * ((rs.mu / rs.lam) * rs.eta + perp(rs.eta))
    radius = 0.5 * np.sqrt((rs.mu**2 + rs.lam**2) / rs.lam**2) * float(
        np.linalg.norm(rs.eta)
    )
    return Circle(center, radius)


def invariant_ball(rs: ReducedSpec) -> Ball:
    """Invariant ball: center -theta eta, radius |eta| sqrt(lam^2+mu^2)/|lam|."""
    if rs.lam == 0.0:
        raise ValueError("the invariant ball requires lam != 0")
    radius = np.sqrt((rs.lam**2 + rs.mu**2) / rs.lam**2) * float(
        np.linalg.norm(rs.eta)
    )
    return Ball(-perp(rs.eta), radius)


@dataclass
class LocusReport:
    """Sampled equilibria locus, JSON-serializable."""

    kind: str  # "circle_arc" | "interval_on_line" | "point"
    u_values: np.ndarray
    samples: np.ndarray
    clipped: np.ndarray
    limit_point: np.ndarray
    circle: Circle | None = None
    line_direction: np.ndarray | None = None
    pole: float | None = None
    pole_clipped: bool = False

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "u_values": [float(u) for u in self.u_values],
            "samples": [list(map(float, v)) for v in self.samples],
            "clipped": [bool(c) for c in self.clipped],
            "limit_point": list(map(float, self.limit_point)),
            "pole_clipped": self.pole_clipped,
        }
        if self.circle is not None:
            out["circle"] = self.circle.to_dict()
        if self.line_direction is not None:
            out["line_direction"] = list(map(float, self.line_direction))
        if self.pole is not None:
            out["pole"] = self.pole
        return out


def equilibria_locus(rs: ReducedSpec, u_values) -> LocusReport:
    """Sample the equilibria v(u) and describe the curve they lie on.

    For lam = 0 the locus is the line R * theta eta with a pole at u = mu;
    samples beyond norm 1e6 (and the pole itself) are clipped and flagged.
    """
    u_values = np.asarray(u_values, dtype=float).reshape(-1)
    limit_point = -perp(rs.eta)
    samples = np.zeros((u_values.size, 2))
    clipped = np.zeros(u_values.size, dtype=bool)
    for i, u in enumerate(u_values):
        if rs.det_a_of_u(u) == 0.0:
            clipped[i] = True
            samples[i] = np.nan
            continue
        v = equilibrium(rs, u)
        if float(np.linalg.norm(v)) > LOCUS_CLIP_NORM:
            clipped[i] = True
            v = v * (LOCUS_CLIP_NORM / float(np.linalg.norm(v)))
        samples[i] = v

    norm_eta = float(np.linalg.norm(rs.eta))
    if norm_eta == 0.0:
        return LocusReport(
            kind="point",
            u_values=u_values,
            samples=samples,
            clipped=clipped,
            limit_point=limit_point,
        )
    if rs.lam != 0.0:
        return LocusReport(
            kind="circle_arc",
            u_values=u_values,
            samples=samples,
            clipped=clipped,
            limit_point=limit_point,
            circle=circle_params(rs),
        )
    pole = rs.mu
    lo, hi = float(np.min(u_values)), float(np.max(u_values))
    return LocusReport(
        kind="interval_on_line",
        u_values=u_values,
        samples=samples,
        clipped=clipped,
        limit_point=limit_point,
        line_direction=perp(rs.eta) / norm_eta,
        pole=pole,
        pole_clipped=bool(np.any(clipped)) and lo <= pole <= hi,
    )


# ---------------------------------------------------------------------------
# Strict spiral bound
# ---------------------------------------------------------------------------


def chord_ratio_limit(sigma, nu):
    """Small-s limit (sigma^2 + nu^2) / sigma^2 of :func:`chord_ratio`."""
    sigma = np.asarray(sigma, dtype=float)
    nu = np.asarray(nu, dtype=float)
    return 1.0 + (nu / sigma) ** 2


def chord_ratio(sigma, nu, s):
    """Spiral chord ratio f(sigma, nu, s) = (1 - 2 e^{s sigma} cos(s nu) + e^{2 s sigma}) / (1 - e^{s sigma})^2.

    Evaluated in the cancellation-free form
    1 + 4 e^{s sigma} sin(s nu / 2)^2 / expm1(s sigma)^2, which is exact
    algebraically and keeps the strict bound f < (sigma^2+nu^2)/sigma^2
    resolvable in float64 down to |s| ~ 1e-3 (the naive form loses it to
    roundoff).  Requires sigma != 0 and s != 0.  Symmetric in nu -> -nu.
    """
    sigma = np.asarray(sigma, dtype=float)
    nu = np.asarray(nu, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(sigma == 0.0):
        raise ValueError("chord_ratio requires sigma != 0")
    if np.any(s == 0.0):
        raise ValueError("chord_ratio requires s != 0")
    em = np.expm1(s * sigma)
    out = 1.0 + 4.0 * np.exp(s * sigma) * np.sin(0.5 * s * nu) ** 2 / em**2
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Monte Carlo invariance check
# ---------------------------------------------------------------------------


@dataclass
class InvarianceReport:
    """Result of :func:`check_invariance`; margins are distances to failure."""

    n_samples: int
    seed: int
    violations_inward: int
    violations_outward: int
    min_margin_inward: float
    min_margin_outward: float
    ball: Ball = field(default=None)

    @property
    def passed(self) -> bool:
        return self.violations_inward == 0 and self.violations_outward == 0

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "seed": self.seed,
            "violations_inward": self.violations_inward,
            "violations_outward": self.violations_outward,
            "min_margin_inward": self.min_margin_inward,
            "min_margin_outward": self.min_margin_outward,
            "passed": self.passed,
            "ball": self.ball.to_dict() if self.ball is not None else None,
        }


def check_invariance(
    rs: ReducedSpec,
    n_samples: int = 10_000,
    seed: int = 0,
    horizon: float = 2.0,
    margin_tol: float = 1e-12,
) -> InvarianceReport:
    """Monte Carlo check of the two strict invariance properties of the ball.

    Inward: w in B, lam*s < 0  =>  flow stays in the interior of B.
    Outward: w outside B, lam*s > 0  =>  |flow - center| > |w - center|.

    All sample parameters are drawn up front from one seeded generator, so
    the verdict does not depend on how the per-sample work is partitioned.
    Margins approach zero near u = mu with w near the boundary tangency
    point; the strict bound still holds everywhere except at w = v(u) itself.
    """
    if rs.lam == 0.0:
        raise ValueError("check_invariance requires lam != 0")
    n = int(n_samples)
    rng = np.random.default_rng(seed)
    ball = invariant_ball(rs)
    c, radius = ball.center, ball.radius
    lo, hi = rs.omega

    u = rng.uniform(lo, hi, size=2 * n)
    smag = rng.uniform(1e-3, horizon, size=2 * n)
    ang = rng.uniform(0.0, 2.0 * np.pi, size=2 * n)
    rad_in = radius * np.sqrt(rng.uniform(0.0, 1.0, size=n))
    rad_out = radius * (1.0 + rng.uniform(1e-6, 1.0, size=n))

    tol = margin_tol * max(radius, 1.0)

    def _flow_norms(w, uu, ss):
        out = np.empty(len(ss))
        for i in range(len(ss)):
            out[i] = np.linalg.norm(flow_r2(rs, ss[i], w[i], uu[i]) - c)
        return out

    # Inward regime: lam * s < 0.
    w_in = c + rad_in[:, None] * np.stack([np.cos(ang[:n]), np.sin(ang[:n])], axis=1)
    s_in = -np.sign(rs.lam) * smag[:n]
    d_in = _flow_norms(w_in, u[:n], s_in)
    margin_in = radius - d_in
    viol_in = int(np.sum(margin_in < tol))

    # Outward regime: lam * s > 0; skip the measure-zero collision w = v(u).
    w_out = c + rad_out[:, None] * np.stack(
        [np.cos(ang[n:]), np.sin(ang[n:])], axis=1
    )
    s_out = np.sign(rs.lam) * smag[n:]
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        if rs.det_a_of_u(u[n + i]) != 0.0:
            keep[i] = (
                np.linalg.norm(w_out[i] - equilibrium(rs, u[n + i])) > 1e-9 * radius
            )
    d_out = _flow_norms(w_out[keep], u[n:][keep], s_out[keep])
    margin_out = d_out - rad_out[keep]
    viol_out = int(np.sum(margin_out < tol))

    return InvarianceReport(
        n_samples=n,
        seed=int(seed),
        violations_inward=viol_in,
        violations_outward=viol_out,
        min_margin_inward=float(np.min(margin_in)) if n else np.inf,
        min_margin_outward=float(np.min(margin_out)) if np.any(keep) else np.inf,
        ball=ball,
    )
