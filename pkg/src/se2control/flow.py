"""Closed-form flows, piecewise-constant controls, and the RK4 oracle.

For the planar reduced system vdot = (A - u theta) v + u eta with constant
control u, the closed-loop matrix A(u) = [[lam, -(mu-u)], [mu-u, lam]] is a
scaled rotation, so the flow is the logarithmic spiral

    phi(s, v, u) = e^{s lam} R(s (mu - u)) (v - v(u)) + v(u),

about the equilibrium v(u) = -u A(u)^{-1} eta whenever det A(u) != 0.  The
single singular constant control (lam = 0, u = mu) has A(u) = 0 and flows
along the straight line v + s u eta.

The RK4 oracle integrates the same fields with classical fixed-step RK4 and
never calls the closed-form code; it exists so every closed form can be
cross-validated independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._accel import jit_or_python
from .group import (
    GroupElement,
    conj_psi1,
    conj_psi1_inv,
    conj_psi2,
    conj_psi2_inv,
    conj_psi_zero,
    conj_psi_zero_inv,
    lambda_map,
    perp,
    rotation,
    wrap_angle,
)
from .system import ReducedSpec, SystemSpec, reduce_system

DEFAULT_RK4_STEP = 1e-3
SAMPLES_PER_SEGMENT = 64


# ---------------------------------------------------------------------------
# Equilibria
# ---------------------------------------------------------------------------


def equilibrium(rs: ReducedSpec, u: float) -> np.ndarray:
    """Equilibrium v(u) = -u A(u)^{-1} eta of the constant-control loop.

    Undefined at the singular control (lam = 0 and u = mu), where A(u) = 0
    and the drift u eta has no rest point.
    """
    u = float(u)
    d = rs.det_a_of_u(u)
    if d == 0.0:
        raise ValueError("no equilibrium at the singular control u = mu (lam = 0)")
    # -u A(u)^{-1} eta = -u/(lam^2 + (mu-u)^2) * (lam eta - (mu-u) theta eta)
    nu = rs.mu - u
    return (-u / d) * (rs.lam * rs.eta - nu * perp(rs.eta))


def equilibrium_derivative(rs: ReducedSpec, u: float) -> np.ndarray:
    """Derivative v'(u) = -A(u)^{-1} (eta - theta v(u)); nonzero when eta != 0."""
    u = float(u)
    d = rs.det_a_of_u(u)
    if d == 0.0:
        raise ValueError("derivative undefined at the singular control")
    w = rs.eta - perp(equilibrium(rs, u))
    nu = rs.mu - u
    # A(u)^{-1} = [[lam, nu], [-nu, lam]] / d
    return -np.array([rs.lam * w[0] + nu * w[1], -nu * w[0] + rs.lam * w[1]]) / d


# ---------------------------------------------------------------------------
# Closed-form flows
# ---------------------------------------------------------------------------


def flow_r2(rs: ReducedSpec, s: float, v, u: float) -> np.ndarray:
    """Planar closed-form flow for constant control, any real time s."""
    s = float(s)
    u = float(u)
    v = np.asarray(v, dtype=float).reshape(2)
    if s == 0.0:
        return v.copy()
    if rs.det_a_of_u(u) == 0.0:
        # Singular control: A(u) = 0, vdot = u eta.
        return v + (s * u) * rs.eta
    vu = equilibrium(rs, u)
    return math.exp(s * rs.lam) * (rotation(s * (rs.mu - u)) @ (v - vu)) + vu


def flow_product(rs: ReducedSpec, s: float, g: GroupElement, u: float) -> GroupElement:
    """Lifted flow on S^1 x R^2: the angle advances linearly, t + s u."""
    return GroupElement(g.t + float(s) * float(u), flow_r2(rs, s, g.v, u))


def flow_detA0(spec: SystemSpec, s: float, g: GroupElement, u: float) -> GroupElement:
    """Degenerate flow for A = 0, in coordinates where the invariant field is (1, 0).

    The normalized dynamics are tdot = u, vdot = Lambda_t xi.  For u != 0

        phi(s, (t, v), u) = (t + s u,
                             v + s theta xi + theta (rho(t+su) - rho(t)) theta xi / u),

    and for u = 0 the translation drifts along the frozen direction
    Lambda_t xi.  Callers working with the raw system must first move to the
    normalized chart (conj_psi_zero) and rescale the control by alpha.
    """
    if float(np.max(np.abs(spec.A))) != 0.0:
        raise ValueError("flow_detA0 requires A = 0")
    s = float(s)
    u = float(u)
    xi = spec.xi
    if u == 0.0:
        return GroupElement(g.t, g.v + s * lambda_map(g.t, xi))
    txi = perp(xi)
    dv = s * txi + perp((rotation(g.t + s * u) - rotation(g.t)) @ txi) / u
    return GroupElement(g.t + s * u, g.v + dv)


def flow_se2(spec: SystemSpec, s: float, g: GroupElement, u: float) -> GroupElement:
    """Exact flow of the full system on the group, any classification case.

    det A != 0: conjugate to the reduced system (control rescaled to
    alpha u), flow there, conjugate back.  A = 0: same scheme through the
    degenerate chart.
    """
    if spec.alpha == 0.0:
        raise ValueError("exact flow requires alpha != 0")
    ut = spec.alpha * float(u)
    if spec.det() == 0.0:
        h = conj_psi_zero(spec.alpha, spec.eta1, g)
        hf = flow_detA0(
            SystemSpec(spec.alpha, spec.xi, np.zeros((2, 2)), np.zeros(2), spec.omega),
            s,
            h,
            ut,
        )
        return conj_psi_zero_inv(spec.alpha, spec.eta1, hf)
    rs = reduce_system(spec)
    h = conj_psi2(conj_psi1(spec.A, spec.xi, g))
    hf = flow_product(rs, s, h, ut)
    return conj_psi1_inv(spec.A, spec.xi, conj_psi2_inv(hf))


# ---------------------------------------------------------------------------
# Piecewise controls and trajectories
# ---------------------------------------------------------------------------


@dataclass
class PiecewiseControl:
    """Piecewise-constant control: a list of (duration, value) segments."""

    segments: list

    def __post_init__(self):
        segs = []
        for dur, u in self.segments:
            dur = float(dur)
            u = float(u)
            if not (np.isfinite(dur) and dur >= 0.0):
                raise ValueError("segment durations must be finite and >= 0")
            if not np.isfinite(u):
                raise ValueError("segment controls must be finite")
            segs.append((dur, u))
        self.segments = segs

    @property
    def total_duration(self) -> float:
        return float(sum(d for d, _ in self.segments))

    def within(self, omega) -> bool:
        lo, hi = omega
        return all(lo <= u <= hi for _, u in self.segments)

    def to_dict(self) -> dict:
        return {"segments": [{"duration": d, "u": u} for d, u in self.segments]}

    @classmethod
    def from_dict(cls, data: dict) -> "PiecewiseControl":
        return cls([(seg["duration"], seg["u"]) for seg in data["segments"]])


@dataclass
class Trajectory:
    """Sampled trajectory.

    `states` has shape (n, 2) for planar runs and (n, 3) (angle, v_x, v_y)
    for runs on the group.  `controls[i]` is the control active at
    `times[i]` (the first segment's value at s = 0).
    """

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    kind: str  # "planar" or "group"

    @property
    def endpoint(self) -> np.ndarray:
        return self.states[-1]


def _segment_stepper(sys_obj):
    """Return (step, pack, unpack, kind) for closed-form segment evaluation."""
    if isinstance(sys_obj, ReducedSpec):
        def step_planar(state, s, u):
            return flow_r2(sys_obj, s, state, u)

        return step_planar, "planar"
    if isinstance(sys_obj, SystemSpec):
        def step_group(state, s, u):
            g = flow_se2(sys_obj, s, GroupElement(state[0], state[1:]), u)
            return g.as_array()

        return step_group, "group"
    raise TypeError("expected ReducedSpec or SystemSpec")


def flow_concat(
    sys_obj,
    control: PiecewiseControl,
    x0,
    samples_per_segment: int = SAMPLES_PER_SEGMENT,
) -> Trajectory:
    """Concatenate closed-form segment flows along a piecewise control.

    Every sample, including each segment endpoint, is evaluated in closed
    form from the segment's start state; nothing is interpolated.
    """
    if isinstance(x0, GroupElement):
        if isinstance(sys_obj, ReducedSpec):
            def step(state, s, u):
                g = flow_product(sys_obj, s, GroupElement(state[0], state[1:]), u)
                return g.as_array()

            kind = "group"
        else:
            step, kind = _segment_stepper(sys_obj)
        state = x0.as_array()
    else:
        step, kind = _segment_stepper(sys_obj)
        state = np.asarray(x0, dtype=float).reshape(-1).copy()

    m = int(samples_per_segment)
    if m < 1:
        raise ValueError("samples_per_segment must be >= 1")

    times = [0.0]
    states = [state.copy()]
    controls = [control.segments[0][1] if control.segments else 0.0]
    elapsed = 0.0
    for dur, u in control.segments:
        for j in range(1, m + 1):
            tau = dur * j / m
            times.append(elapsed + tau)
            states.append(step(state, tau, u))
            controls.append(u)
        state = states[-1].copy()
        elapsed += dur
    return Trajectory(
        times=np.asarray(times),
        states=np.asarray(states),
        controls=np.asarray(controls),
        kind=kind,
    )


# ---------------------------------------------------------------------------
# RK4 oracle
# ---------------------------------------------------------------------------


def field_planar(rs: ReducedSpec):
    """Planar field (A - u theta) v + u eta as a callable f(v, u)."""
    lam, mu, eta = rs.lam, rs.mu, rs.eta

    def f(v, u):
        nu = mu - u
        return np.array(
            [lam * v[0] - nu * v[1] + u * eta[0], nu * v[0] + lam * v[1] + u * eta[1]]
        )

    return f


def field_group(rs: ReducedSpec):
    """Lifted field on packed state [t, v_x, v_y]."""
    fp = field_planar(rs)

    def f(x, u):
        dv = fp(x[1:], u)
        return np.array([u, dv[0], dv[1]])

    return f


def field_degenerate(xi):
    """Normalized degenerate field: tdot = u, vdot = Lambda_t xi."""
    xi = np.asarray(xi, dtype=float)

    def f(x, u):
        dv = lambda_map(x[0], xi)
        return np.array([u, dv[0], dv[1]])

    return f


def field_se2(spec: SystemSpec):
    """Raw field on the group: tdot = u alpha, vdot = A v + Lambda_t xi + u rho(t) eta1."""
    A = spec.A

    def f(x, u):
        dv = A @ x[1:] + lambda_map(x[0], spec.xi) + u * (rotation(x[0]) @ spec.eta1)
        return np.array([u * spec.alpha, dv[0], dv[1]])

    return f


def _rk4_steps(s: float, step: float):
    n = max(1, int(math.ceil(abs(s) / step - 1e-12)))
    return n, s / n


def _rk4_planar_kernel(vx, vy, lam, mu, ex, ey, u, h, n):
    nu = mu - u
    for _ in range(n):
        k1x = lam * vx - nu * vy + u * ex
        k1y = nu * vx + lam * vy + u * ey
        ax = vx + 0.5 * h * k1x
        ay = vy + 0.5 * h * k1y
        k2x = lam * ax - nu * ay + u * ex
        k2y = nu * ax + lam * ay + u * ey
        bx = vx + 0.5 * h * k2x
        by = vy + 0.5 * h * k2y
        k3x = lam * bx - nu * by + u * ex
        k3y = nu * bx + lam * by + u * ey
        cx = vx + h * k3x
        cy = vy + h * k3y
        k4x = lam * cx - nu * cy + u * ex
        k4y = nu * cx + lam * cy + u * ey
        vx = vx + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        vy = vy + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    return vx, vy


def _rk4_se2_kernel(t, vx, vy, a00, a01, a10, a11, xix, xiy, e1x, e1y, alpha, u, h, n):
    # vdot = A v + (I - rho(t)) theta xi + u rho(t) eta1, tdot = u alpha
    txx = -xiy  # theta xi
    txy = xix
    td = u * alpha
    for _ in range(n):
        c = math.cos(t)
        s_ = math.sin(t)
        k1x = a00 * vx + a01 * vy + txx - (c * txx - s_ * txy) + u * (c * e1x - s_ * e1y)
        k1y = a10 * vx + a11 * vy + txy - (s_ * txx + c * txy) + u * (s_ * e1x + c * e1y)
        t2 = t + 0.5 * h * td
        ax = vx + 0.5 * h * k1x
        ay = vy + 0.5 * h * k1y
        c = math.cos(t2)
        s_ = math.sin(t2)
        k2x = a00 * ax + a01 * ay + txx - (c * txx - s_ * txy) + u * (c * e1x - s_ * e1y)
        k2y = a10 * ax + a11 * ay + txy - (s_ * txx + c * txy) + u * (s_ * e1x + c * e1y)
        bx = vx + 0.5 * h * k2x
        by = vy + 0.5 * h * k2y
        k3x = a00 * bx + a01 * by + txx - (c * txx - s_ * txy) + u * (c * e1x - s_ * e1y)
        k3y = a10 * bx + a11 * by + txy - (s_ * txx + c * txy) + u * (s_ * e1x + c * e1y)
        t4 = t + h * td
        cx = vx + h * k3x
        cy = vy + h * k3y
        c = math.cos(t4)
        s_ = math.sin(t4)
        k4x = a00 * cx + a01 * cy + txx - (c * txx - s_ * txy) + u * (c * e1x - s_ * e1y)
        k4y = a10 * cx + a11 * cy + txy - (s_ * txx + c * txy) + u * (s_ * e1x + c * e1y)
        vx = vx + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        vy = vy + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        t = t + h * td
    return t, vx, vy


_rk4_planar_fast = jit_or_python(_rk4_planar_kernel)
_rk4_se2_fast = jit_or_python(_rk4_se2_kernel)


def rk4_oracle(field, s: float, x0, u: float, step: float = DEFAULT_RK4_STEP):
    """Classical fixed-step RK4 endpoint for xdot = field(x, u), constant u.

    `field` is either a callable or a system object (ReducedSpec for the
    planar/lifted field, SystemSpec for the raw group field), in which case a
    compiled stepper with identical arithmetic is used.  Negative `s`
    integrates backward.  Independent of the closed-form flow code by
    construction.
    """
    s = float(s)
    u = float(u)
    if s == 0.0:
        return np.asarray(x0, dtype=float).reshape(-1).copy()
    n, h = _rk4_steps(s, step)

    if isinstance(field, ReducedSpec):
        x0 = np.asarray(x0, dtype=float).reshape(-1)
        if x0.shape[0] == 2:
            vx, vy = _rk4_planar_fast(
                x0[0], x0[1], field.lam, field.mu, field.eta[0], field.eta[1], u, h, n
            )
            return np.array([vx, vy])
        if x0.shape[0] == 3:
            vx, vy = _rk4_planar_fast(
                x0[1], x0[2], field.lam, field.mu, field.eta[0], field.eta[1], u, h, n
            )
            return np.array([x0[0] + s * u, vx, vy])
        raise ValueError("state must have 2 (planar) or 3 (group) components")
    if isinstance(field, SystemSpec):
        x0 = np.asarray(x0, dtype=float).reshape(3)
        A = field.A
        t, vx, vy = _rk4_se2_fast(
            x0[0],
            x0[1],
            x0[2],
            A[0, 0],
            A[0, 1],
            A[1, 0],
            A[1, 1],
            field.xi[0],
            field.xi[1],
            field.eta1[0],
            field.eta1[1],
            field.alpha,
            u,
            h,
            n,
        )
        return np.array([t, vx, vy])

    x = np.asarray(x0, dtype=float).reshape(-1).copy()
    for _ in range(n):
        k1 = field(x, u)
        k2 = field(x + (0.5 * h) * k1, u)
        k3 = field(x + (0.5 * h) * k2, u)
        k4 = field(x + h * k3, u)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x


def rk4_piecewise(field, control: PiecewiseControl, x0, step: float = DEFAULT_RK4_STEP):
    """RK4 endpoint across a piecewise-constant control (segment by segment)."""
    x = np.asarray(x0, dtype=float).reshape(-1).copy()
    for dur, u in control.segments:
        if dur > 0.0:
            x = rk4_oracle(field, dur, x, u, step)
    return x
