"""Grid reachability, control-set estimation, and degenerate-case checks.

The reach set is grown as a breadth-first fixed point on an occupancy grid:
every occupied cell stores one exact reachable point (its representative),
and each round flows all new representatives for one time step under every
control in the grid.  Representatives are never snapped to cell centers, so
every occupied cell contains a genuinely reachable point and containment
statements (e.g. inside the invariant ball) hold without drift artifacts.

Candidates claim cells first-writer-wins in a canonical order (frontier cell
index, then control index; frontiers kept sorted between rounds), which makes
the result independent of expansion order and identical across the numba and
numpy backends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .flow import PiecewiseControl, equilibrium, flow_detA0, flow_r2
from .geometry import invariant_ball
from .group import TWO_PI, GroupElement, angle_dist, lambda_map, perp
from .system import ReducedSpec, SystemSpec, larc

DEFAULT_MAX_CELLS = 1_000_000
DEFAULT_N_CONTROLS = 21


# ---------------------------------------------------------------------------
# Grid configuration
# ---------------------------------------------------------------------------


@dataclass
class GridConfig:
    """Occupancy-grid parameters for reach-set computation.

    Expansion flows each cell representative along constant-control arcs of
    1..steps_per_arc time steps (every arc point is exact, so occupied cells
    always contain genuinely reachable points); longer arcs let the frontier
    cross cells even where the flow is slower than one cell per step.
    """

    bounds: tuple  # (x_min, x_max, y_min, y_max)
    resolution: float
    controls: np.ndarray
    time_step: float
    max_cells: int = DEFAULT_MAX_CELLS
    steps_per_arc: int = 24

    def __post_init__(self):
        xmin, xmax, ymin, ymax = (float(b) for b in self.bounds)
        if not (xmin < xmax and ymin < ymax):
            raise ValueError("bounds must satisfy x_min < x_max, y_min < y_max")
        self.bounds = (xmin, xmax, ymin, ymax)
        self.resolution = float(self.resolution)
        if not (self.resolution > 0.0):
            raise ValueError("resolution must be positive")
        self.controls = np.unique(np.asarray(self.controls, dtype=float).reshape(-1))
        if self.controls.size < 1 or not np.all(np.isfinite(self.controls)):
            raise ValueError("controls must be a nonempty finite list")
        self.time_step = float(self.time_step)
        if not (self.time_step > 0.0):
            raise ValueError("time_step must be positive")
        self.max_cells = int(self.max_cells)
        if self.max_cells < 1:
            raise ValueError("max_cells must be >= 1")
        self.steps_per_arc = int(self.steps_per_arc)
        if self.steps_per_arc < 1:
            raise ValueError("steps_per_arc must be >= 1")

    @property
    def shape(self) -> tuple:
        xmin, xmax, ymin, ymax = self.bounds
        nx = int(math.ceil((xmax - xmin) / self.resolution - 1e-9))
        ny = int(math.ceil((ymax - ymin) / self.resolution - 1e-9))
        return max(nx, 1), max(ny, 1)

    @property
    def cell_diagonal(self) -> float:
        return self.resolution * math.sqrt(2.0)

    def cell_of(self, v) -> tuple:
        v = np.asarray(v, dtype=float)
        i = int(math.floor((v[0] - self.bounds[0]) / self.resolution))
        j = int(math.floor((v[1] - self.bounds[2]) / self.resolution))
        return i, j

    def cell_center(self, i: int, j: int) -> np.ndarray:
        return np.array(
            [
                self.bounds[0] + (i + 0.5) * self.resolution,
                self.bounds[2] + (j + 0.5) * self.resolution,
            ]
        )

    def in_bounds(self, v) -> bool:
        i, j = self.cell_of(v)
        nx, ny = self.shape
        return 0 <= i < nx and 0 <= j < ny

    def to_dict(self) -> dict:
        return {
            "bounds": list(self.bounds),
            "resolution": self.resolution,
            "controls": [float(u) for u in self.controls],
            "time_step": self.time_step,
            "max_cells": self.max_cells,
            "steps_per_arc": self.steps_per_arc,
        }


def control_grid(omega, n: int = DEFAULT_N_CONTROLS) -> np.ndarray:
    """Evenly spaced controls over omega, always including u-, 0 and u+."""
    if n < 3:
        raise ValueError("control grid needs at least 3 values")
    lo, hi = float(omega[0]), float(omega[1])
    return np.unique(np.concatenate([np.linspace(lo, hi, int(n)), [0.0]]))


def default_grid_config(
    rs: ReducedSpec,
    resolution: float | None = None,
    n_controls: int = DEFAULT_N_CONTROLS,
    time_step: float | None = None,
    bounds: tuple | None = None,
    max_cells: int = DEFAULT_MAX_CELLS,
    steps_per_arc: int = 24,
) -> GridConfig:
    """Grid defaults sized from the system's own geometry.

    lam != 0: box = invariant-ball center +- 1.5 * radius, cell = radius/200.
    lam == 0: box = +-4 |eta|, cell = |eta|/50.  Time step
    0.05 / max(|lam|, |mu - u-|, |mu - u+|, 1).
    """
    lo, hi = rs.omega
    scale = float(np.linalg.norm(rs.eta))
    if rs.lam != 0.0:
        ball = invariant_ball(rs)
        radius = ball.radius if ball.radius > 0.0 else max(scale, 1.0)
        cx, cy = ball.center
        half = 1.5 * radius
        if bounds is None:
            bounds = (cx - half, cx + half, cy - half, cy + half)
        if resolution is None:
            resolution = radius / 200.0
    else:
        extent = 4.0 * max(scale, 0.25)
        if bounds is None:
            bounds = (-extent, extent, -extent, extent)
        if resolution is None:
            resolution = max(scale, 0.25) / 50.0
    if time_step is None:
        time_step = 0.05 / max(abs(rs.lam), abs(rs.mu - lo), abs(rs.mu - hi), 1.0)
    return GridConfig(
        bounds=bounds,
        resolution=resolution,
        controls=control_grid(rs.omega, n_controls),
        time_step=time_step,
        max_cells=max_cells,
        steps_per_arc=steps_per_arc,
    )


# ---------------------------------------------------------------------------
# Round expansion kernels (numba and numpy, identical arithmetic)
# ---------------------------------------------------------------------------


def _expand_round_py(
    occ_flat,
    nx,
    ny,
    x0,
    y0,
    res,
    cur_ids,
    cur_px,
    cur_py,
    sing,
    vux,
    vuy,
    ecos,
    esin,
    linx,
    liny,
):
    """One expansion round, vectorized.  Returns (ids, px, py) sorted by id."""
    px = cur_px[:, None]
    py = cur_py[:, None]
    dx = px - vux[None, :]
    dy = py - vuy[None, :]
    qx = np.where(sing[None, :], px + linx[None, :], vux[None, :] + ecos[None, :] * dx - esin[None, :] * dy)
    qy = np.where(sing[None, :], py + liny[None, :], vuy[None, :] + esin[None, :] * dx + ecos[None, :] * dy)
    fi = np.floor((qx - x0) / res)
    fj = np.floor((qy - y0) / res)
    valid = (
        np.isfinite(qx)
        & np.isfinite(qy)
        & (fi >= 0.0)
        & (fj >= 0.0)
        & (fi < nx)
        & (fj < ny)
    )
    # Flatten in canonical (frontier index, control index) order.
    qx = qx.ravel()[valid.ravel()]
    qy = qy.ravel()[valid.ravel()]
    ids = (
        fi.ravel()[valid.ravel()].astype(np.int64) * ny
        + fj.ravel()[valid.ravel()].astype(np.int64)
    )
    fresh = ~occ_flat[ids]
    ids = ids[fresh]
    qx = qx[fresh]
    qy = qy[fresh]
    if ids.size == 0:
        return ids, qx, qy
    uids, first = np.unique(ids, return_index=True)
    occ_flat[uids] = True
    return uids, qx[first], qy[first]


def _expand_round_loop(
    occ_flat,
    nx,
    ny,
    x0,
    y0,
    res,
    cur_ids,
    cur_px,
    cur_py,
    sing,
    vux,
    vuy,
    ecos,
    esin,
    linx,
    liny,
    out_ids,
    out_px,
    out_py,
):
    n_new = 0
    nu = vux.size
    for a in range(cur_px.size):
        px = cur_px[a]
        py = cur_py[a]
        for m in range(nu):
            if sing[m]:
                qx = px + linx[m]
                qy = py + liny[m]
            else:
                dx = px - vux[m]
                dy = py - vuy[m]
                qx = vux[m] + ecos[m] * dx - esin[m] * dy
                qy = vuy[m] + esin[m] * dx + ecos[m] * dy
            if not (math.isfinite(qx) and math.isfinite(qy)):
                continue
            fi = math.floor((qx - x0) / res)
            fj = math.floor((qy - y0) / res)
            if fi < 0.0 or fj < 0.0 or fi >= nx or fj >= ny:
                continue
            idx = np.int64(fi) * ny + np.int64(fj)
            if not occ_flat[idx]:
                occ_flat[idx] = True
                out_ids[n_new] = idx
                out_px[n_new] = qx
                out_py[n_new] = qy
                n_new += 1
    return n_new


_expand_round_jit = _accel.njit_if_available(_expand_round_loop)

# Ceiling on candidate-array size per vectorized batch (frontier x columns).
_PY_CANDIDATE_BUDGET = 2_000_000


def _expand_round(backend, *args):
    occ_flat, nx, ny, x0, y0, res, cur_ids, cur_px, cur_py, consts = args
    n_cols = consts[1].size
    if backend == "numba":
        # New claims cannot exceed the number of grid cells.
        cap = int(min(cur_px.size * n_cols, occ_flat.size))
        out_ids = np.empty(cap, dtype=np.int64)
        out_px = np.empty(cap)
        out_py = np.empty(cap)
        n_new = _expand_round_jit(
            occ_flat, nx, ny, x0, y0, res, cur_ids, cur_px, cur_py, *consts,
            out_ids, out_px, out_py,
        )
        ids = out_ids[:n_new]
        order = np.argsort(ids)  # ids are unique within a round
        return ids[order], out_px[:n_new][order], out_py[:n_new][order]
    chunk = max(1, _PY_CANDIDATE_BUDGET // max(n_cols, 1))
    if cur_px.size <= chunk:
        return _expand_round_py(
            occ_flat, nx, ny, x0, y0, res, cur_ids, cur_px, cur_py, *consts
        )
    # Chunks run in frontier order and mark occupancy as they go, so the
    # first-writer rule is unchanged; a final sort matches the single-batch
    # (and numba) id ordering.
    parts = [
        _expand_round_py(
            occ_flat, nx, ny, x0, y0, res,
            cur_ids[s : s + chunk], cur_px[s : s + chunk], cur_py[s : s + chunk],
            *consts,
        )
        for s in range(0, cur_px.size, chunk)
    ]
    ids = np.concatenate([p[0] for p in parts])
    px = np.concatenate([p[1] for p in parts])
    py = np.concatenate([p[2] for p in parts])
    order = np.argsort(ids)
    return ids[order], px[order], py[order]


def _control_constants(rs: ReducedSpec, cfg: GridConfig, direction: int):
    """Flattened per-(control, arc step) flow constants, control-major order.

    Column c = m * steps_per_arc + (k - 1) maps a point to its exact image
    after k time steps under control m; the closed form makes every arc
    sample exact rather than an iterated approximation.
    """
    dt = direction * cfg.time_step
    us = cfg.controls
    n_steps = cfg.steps_per_arc
    n = us.size * n_steps
    sing = np.zeros(n, dtype=np.bool_)
    vux = np.zeros(n)
    vuy = np.zeros(n)
    ecos = np.ones(n)
    esin = np.zeros(n)
    linx = np.zeros(n)
    liny = np.zeros(n)
    c = 0
    for u in us:
        if rs.det_a_of_u(u) == 0.0:
            for k in range(1, n_steps + 1):
                s = k * dt
                sing[c] = True
                linx[c] = s * u * rs.eta[0]
                liny[c] = s * u * rs.eta[1]
                c += 1
        else:
            vu = equilibrium(rs, u)
            for k in range(1, n_steps + 1):
                s = k * dt
                vux[c] = vu[0]
                vuy[c] = vu[1]
                ang = s * (rs.mu - u)
                efac = math.exp(s * rs.lam)
                ecos[c] = efac * math.cos(ang)
                esin[c] = efac * math.sin(ang)
                c += 1
    return sing, vux, vuy, ecos, esin, linx, liny


# ---------------------------------------------------------------------------
# Reach sets
# ---------------------------------------------------------------------------


@dataclass
class ReachSet:
    """Occupancy-grid reach set with one exact reachable point per cell."""

    config: GridConfig
    occupied: np.ndarray  # (nx, ny) bool
    rep_x: np.ndarray
    rep_y: np.ndarray
    seed: np.ndarray
    direction: int  # +1 forward, -1 backward
    rounds: int
    truncated: bool

    @property
    def cell_count(self) -> int:
        return int(np.count_nonzero(self.occupied))

    def occupied_cells(self) -> np.ndarray:
        """Occupied cell indices, shape (k, 2), lexicographically sorted."""
        return np.argwhere(self.occupied)

    def cell_centers(self) -> np.ndarray:
        cells = self.occupied_cells()
        xmin, _, ymin, _ = self.config.bounds
        res = self.config.resolution
        return np.stack(
            [xmin + (cells[:, 0] + 0.5) * res, ymin + (cells[:, 1] + 0.5) * res],
            axis=1,
        )

    def representatives(self) -> np.ndarray:
        cells = self.occupied_cells()
        return np.stack(
            [self.rep_x[cells[:, 0], cells[:, 1]], self.rep_y[cells[:, 0], cells[:, 1]]],
            axis=1,
        )

    def contains(self, v) -> bool:
        if not self.config.in_bounds(v):
            return False
        i, j = self.config.cell_of(v)
        return bool(self.occupied[i, j])


def _reach(rs: ReducedSpec, x0, cfg: GridConfig, direction: int, backend=None) -> ReachSet:
    x0 = np.asarray(x0, dtype=float).reshape(2)
    if backend is None:
        backend = _accel.BACKEND
    if backend not in ("numba", "numpy"):
        raise ValueError("backend must be 'numba' or 'numpy'")
    if backend == "numba" and not _accel.HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is unavailable")
    if not cfg.in_bounds(x0):
        raise ValueError("seed point lies outside the grid bounds")
    lo, hi = rs.omega
    if cfg.controls[0] < lo - 1e-12 or cfg.controls[-1] > hi + 1e-12:
        raise ValueError("control grid exceeds the system's control range")

    nx, ny = cfg.shape
    xmin, _, ymin, _ = cfg.bounds
    res = cfg.resolution
    occ = np.zeros((nx, ny), dtype=np.bool_)
    rep_x = np.full((nx, ny), np.nan)
    rep_y = np.full((nx, ny), np.nan)

    i0, j0 = cfg.cell_of(x0)
    occ[i0, j0] = True
    rep_x[i0, j0] = x0[0]
    rep_y[i0, j0] = x0[1]

    consts = _control_constants(rs, cfg, direction)
    occ_flat = occ.reshape(-1)

    cur_ids = np.array([np.int64(i0) * ny + j0], dtype=np.int64)
    cur_px = np.array([x0[0]])
    cur_py = np.array([x0[1]])
    total = 1
    rounds = 0
    while cur_ids.size and total < cfg.max_cells:
        cur_ids, cur_px, cur_py = _expand_round(
            backend, occ_flat, nx, ny, xmin, ymin, res, cur_ids, cur_px, cur_py, consts
        )
        if cur_ids.size:
            rep_x.reshape(-1)[cur_ids] = cur_px
            rep_y.reshape(-1)[cur_ids] = cur_py
            total += cur_ids.size
        rounds += 1

    return ReachSet(
        config=cfg,
        occupied=occ,
        rep_x=rep_x,
        rep_y=rep_y,
        seed=x0,
        direction=direction,
        rounds=rounds,
        truncated=bool(cur_ids.size and total >= cfg.max_cells),
    )


def reach_forward(rs: ReducedSpec, x0, cfg: GridConfig | None = None, backend=None) -> ReachSet:
    """Grid fixed point of one-step forward flows from x0."""
    if cfg is None:
        cfg = default_grid_config(rs)
    return _reach(rs, x0, cfg, +1, backend)


def reach_backward(rs: ReducedSpec, x0, cfg: GridConfig | None = None, backend=None) -> ReachSet:
    """Grid fixed point of one-step backward flows from x0 (points that reach x0)."""
    if cfg is None:
        cfg = default_grid_config(rs)
    return _reach(rs, x0, cfg, -1, backend)


def binary_erode(occ: np.ndarray, layers: int = 1) -> np.ndarray:
    """Erode an occupancy mask by `layers` 8-neighborhood shells."""
    out = occ.copy()
    for _ in range(layers):
        padded = np.zeros((out.shape[0] + 2, out.shape[1] + 2), dtype=bool)
        padded[1:-1, 1:-1] = out
        eroded = padded[1:-1, 1:-1].copy()
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == 0 and dj == 0:
                    continue
                eroded &= padded[1 + di : padded.shape[0] - 1 + di, 1 + dj : padded.shape[1] - 1 + dj]
        out = eroded
    return out


# ---------------------------------------------------------------------------
# Control-set estimation
# ---------------------------------------------------------------------------


def default_seed_control(rs: ReducedSpec) -> float:
    """An interior control away from mu to seed the estimate from."""
    lo, hi = rs.omega
    for u in (0.5 * hi, 0.5 * lo, 0.25 * hi, 0.25 * lo, 0.75 * hi, 0.75 * lo):
        if abs(u - rs.mu) > 0.05 * max(1.0, abs(rs.mu)):
            return float(u)
    return 0.5 * hi  # unreachable for a nondegenerate omega


def boundary_control_sets(rs: ReducedSpec) -> list:
    """One-point control sets on the boundary (open case, mu in Omega)."""
    lo, hi = rs.omega
    if rs.lam <= 0.0 or not (lo <= rs.mu <= hi):
        return []
    if rs.mu == 0.0:
        return [
            {
                "kind": "continuum_of_fixed_points",
                "plane_point": [0.0, 0.0],
                "lifted": "every (t, 0) is a fixed point",
            }
        ]
    point = equilibrium(rs, rs.mu)
    return [
        {
            "kind": "singleton",
            "control": rs.mu,
            "plane_point": [float(point[0]), float(point[1])],
            "lifted": "periodic_orbit",
            "period": TWO_PI / rs.mu,
        }
    ]


@dataclass
class ControlSetEstimate:
    """Grid estimate of the unique control set with nonempty interior."""

    case: str  # "all_plane" | "closed_bounded" | "open"
    seed_control: float | None
    region: ReachSet | None
    coverage: dict = field(default_factory=dict)
    boundary: list = field(default_factory=list)
    ball_check: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "case": self.case,
            "seed_control": self.seed_control,
            "coverage": self.coverage,
            "boundary": self.boundary,
            "ball_check": self.ball_check,
            "diagnostics": self.diagnostics,
        }
        if self.region is not None:
            out["grid"] = self.region.config.to_dict()
            out["cells"] = self.region.cell_count
            out["truncated"] = self.region.truncated
            out["direction"] = "forward" if self.region.direction > 0 else "backward"
        return out


def _coverage_in_disk(region: ReachSet, center, radius: float) -> float:
    centers = _all_cell_centers(region.config)
    inside = np.linalg.norm(centers - np.asarray(center, float), axis=1) <= radius
    if not np.any(inside):
        return 0.0
    occ = region.occupied.reshape(-1)
    return float(np.count_nonzero(occ & inside)) / float(np.count_nonzero(inside))


def _all_cell_centers(cfg: GridConfig) -> np.ndarray:
    nx, ny = cfg.shape
    xs = cfg.bounds[0] + (np.arange(nx) + 0.5) * cfg.resolution
    ys = cfg.bounds[2] + (np.arange(ny) + 0.5) * cfg.resolution
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.stack([gx.reshape(-1), gy.reshape(-1)], axis=1)


def _ball_containment(region: ReachSet, rs: ReducedSpec) -> dict:
    ball = invariant_ball(rs)
    centers = region.cell_centers()
    d = np.linalg.norm(centers - ball.center, axis=1)
    allowed = ball.radius + region.config.cell_diagonal
    return {
        "ball": ball.to_dict(),
        "max_center_distance": float(np.max(d)) if d.size else 0.0,
        "allowed": allowed,
        "violations": int(np.sum(d > allowed)),
    }


def _boundary_growth_diagnostics(
    region: ReachSet, rs: ReducedSpec, u0: float, n_probes: int = 8
) -> dict:
    """Neutral diagnostic: growth of distance-to-center for points just
    outside the estimated set.  No claim is attached to these numbers."""
    ball = invariant_ball(rs)
    occ = region.occupied
    boundary = occ & ~binary_erode(occ, 1)
    cells = np.argwhere(boundary)
    if cells.size == 0:
        return {"probes": 0}
    idx = np.linspace(0, len(cells) - 1, min(n_probes, len(cells))).astype(int)
    res = region.config.resolution
    horizon = 5.0 * region.config.time_step
    rates = []
    for i, j in cells[idx]:
        p = region.config.cell_center(i, j)
        d = p - ball.center
        nd = np.linalg.norm(d)
        if nd == 0.0:
            continue
        probe = p + (2.0 * res / nd) * d
        before = np.linalg.norm(probe - ball.center)
        after = np.linalg.norm(flow_r2(rs, horizon, probe, u0) - ball.center)
        rates.append((after - before) / horizon)
    if not rates:
        return {"probes": 0}
    return {
        "probes": len(rates),
        "offset_cells": 2.0,
        "horizon": horizon,
        "min_growth_rate": float(np.min(rates)),
        "mean_growth_rate": float(np.mean(rates)),
    }


def estimate_control_set(
    rs: ReducedSpec,
    cfg: GridConfig | None = None,
    seed_control: float | None = None,
    coverage_radius: float | None = None,
    backend=None,
) -> ControlSetEstimate:
    """Estimate the control set with nonempty interior for the planar system.

    trace = 0: the system is controllable; a forward reach run from the
    origin provides a coverage certificate over a test disk.  trace < 0: the
    set is the closure of the forward orbit of an equilibrium.  trace > 0:
    the set is the backward orbit of an equilibrium.
    """
    if cfg is None:
        cfg = default_grid_config(rs)
    if seed_control is None:
        seed_control = default_seed_control(rs)
    boundary = boundary_control_sets(rs)

    if rs.lam == 0.0:
        region = reach_forward(rs, np.zeros(2), cfg, backend)
        radius = coverage_radius if coverage_radius is not None else max(
            float(np.linalg.norm(rs.eta)), 0.25
        )
        coverage = {
            "disk_center": [0.0, 0.0],
            "disk_radius": radius,
            "fraction": _coverage_in_disk(region, np.zeros(2), radius),
        }
        return ControlSetEstimate(
            case="all_plane",
            seed_control=None,
            region=region,
            coverage=coverage,
            boundary=boundary,
            diagnostics={"note": "controllable: estimate certifies disk coverage"},
        )

    x0 = equilibrium(rs, seed_control)
    if rs.lam < 0.0:
        region = reach_forward(rs, x0, cfg, backend)
        case = "closed_bounded"
    else:
        region = reach_backward(rs, x0, cfg, backend)
        case = "open"
    est = ControlSetEstimate(
        case=case,
        seed_control=float(seed_control),
        region=region,
        boundary=boundary,
        ball_check=_ball_containment(region, rs),
    )
    if rs.lam > 0.0:
        est.diagnostics["boundary_growth"] = _boundary_growth_diagnostics(
            region, rs, float(seed_control)
        )
    return est


@dataclass
class LiftedControlSet:
    """The control set upstairs: full circle factor times the planar region."""

    angular: str
    planar_case: str
    closed: bool
    open_: bool
    boundary: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "angular": self.angular,
            "planar_case": self.planar_case,
            "closed": self.closed,
            "open": self.open_,
            "boundary": self.boundary,
        }


def lift_to_se2(est: ControlSetEstimate) -> LiftedControlSet:
    """Describe the lifted control set S^1 x C from a planar estimate."""
    if est.case == "all_plane":
        return LiftedControlSet(
            angular="full_circle",
            planar_case=est.case,
            closed=True,
            open_=True,
            boundary=est.boundary,
        )
    return LiftedControlSet(
        angular="full_circle",
        planar_case=est.case,
        closed=est.case == "closed_bounded",
        open_=est.case == "open",
        boundary=est.boundary,
    )


# ---------------------------------------------------------------------------
# Degenerate case (A = 0): structure checks
# ---------------------------------------------------------------------------


def _normalized_degenerate(spec: SystemSpec) -> tuple:
    """Return (chart spec with A=0 data, rescaled omega) for the A = 0 case."""
    if float(np.max(np.abs(spec.A))) != 0.0:
        raise ValueError("degenerate analysis requires A = 0")
    if spec.alpha == 0.0 or not larc(spec):
        raise ValueError("degenerate analysis requires alpha != 0 and alpha xi != 0")
    lo, hi = sorted((spec.alpha * spec.omega[0], spec.alpha * spec.omega[1]))
    chart = SystemSpec(
        spec.alpha, spec.xi, np.zeros((2, 2)), np.zeros(2), (lo, hi)
    )
    return chart, (lo, hi)


def _degenerate_endpoint(chart: SystemSpec, control: PiecewiseControl, g: GroupElement) -> GroupElement:
    for dur, u in control.segments:
        if dur > 0.0:
            g = flow_detA0(chart, dur, g, u)
    return g


def steer_degenerate(
    spec: SystemSpec,
    v_from,
    v_to,
    eps_grid=None,
) -> tuple:
    """Best-effort steering of the normalized degenerate system.

    Moves (0, v_from) toward (0, v_to) with a drive/dwell/drive/dwell/drive
    control built from small angle excursions +-eps: dwelling at angle t
    pushes v at the fixed rate sin(t) xi + (1 - cos t) theta xi, so shrinking
    eps trades time for precision along +-xi while the unavoidable drift
    (along +theta xi) vanishes like eps.  Motion along -theta xi is
    impossible, so targets with a negative theta-xi component keep an
    irreducible residual.

    The dwell durations are solved against the *realized* dwell angles of the
    arc segments and the dwell rates the flow itself will use, so feasible
    targets are hit to arithmetic rounding.  Returns (control, endpoint,
    residual) with the endpoint evaluated exactly; the best epsilon over the
    grid (by evaluated residual) wins.
    """
    chart, (lo, hi) = _normalized_degenerate(spec)
    xi = chart.xi
    n2 = float(xi @ xi)
    txi = perp(xi)
    v_from = np.asarray(v_from, dtype=float).reshape(2)
    v_to = np.asarray(v_to, dtype=float).reshape(2)
    delta = v_to - v_from
    if float(np.linalg.norm(delta)) == 0.0:
        ctrl = PiecewiseControl([])
        return ctrl, GroupElement(0.0, v_from), 0.0
    a_t = float(delta @ xi) / n2
    b_t = float(delta @ txi) / n2
    u_d = 0.9 * min(-lo, hi)
    if eps_grid is None:
        eps_grid = np.geomspace(0.3, 3e-10, 30)

    g0 = GroupElement(0.0, v_from)
    best = None
    for eps in eps_grid:
        s1 = eps / u_d
        # Arcs-only rehearsal: realized dwell angles and arc displacement.
        g = flow_detA0(chart, s1, g0, u_d)
        t1 = g.t
        g = flow_detA0(chart, 2.0 * s1, g, -u_d)
        t2 = g.t
        g = flow_detA0(chart, s1, g, u_d)
        arc_a = float((g.v - v_from) @ xi) / n2
        arc_b = float((g.v - v_from) @ txi) / n2
        # Dwell rates exactly as the flow will apply them.
        rate1 = lambda_map(t1, xi)
        rate2 = lambda_map(t2, xi)
        sin1 = float(rate1 @ xi) / n2
        w1 = float(rate1 @ txi) / n2
        sin2 = float(rate2 @ xi) / n2
        w2 = float(rate2 @ txi) / n2
        # The dwell drift cannot point along -theta xi; tiny negative values
        # are rounding noise from the chart arithmetic, and feeding them to
        # the solver would fabricate huge dwells that ride the noise.
        w1 = max(w1, 0.0)
        w2 = max(w2, 0.0)
        a_rem = a_t - arc_a
        b_rem = b_t - arc_b
        det = sin1 * w2 - sin2 * w1
        if sin1 <= 0.0 or sin2 >= 0.0:
            continue
        if det == 0.0:
            # Dwell drift underflows to exact zero at this eps; only the
            # xi-component can move, so solve it alone (b_rem is then the
            # honest residual).
            tau1 = a_rem / sin1 if a_rem >= 0.0 else 0.0
            tau2 = a_rem / sin2 if a_rem < 0.0 else 0.0
        else:
            tau1 = (a_rem * w2 - sin2 * b_rem) / det
            tau2 = (sin1 * b_rem - a_rem * w1) / det
            if tau1 < 0.0:
                tau1 = 0.0
                tau2 = a_rem / sin2 if a_rem / sin2 > 0.0 else 0.0
            elif tau2 < 0.0:
                tau2 = 0.0
                tau1 = a_rem / sin1 if a_rem / sin1 > 0.0 else 0.0
        ctrl = PiecewiseControl(
            [
                (s1, u_d),
                (tau1, 0.0),
                (2.0 * s1, -u_d),
                (tau2, 0.0),
                (s1, u_d),
            ]
        )
        end = _degenerate_endpoint(chart, ctrl, g0)
        residual = float(np.linalg.norm(end.v - v_to)) + angle_dist(end.t, 0.0)
        if best is None or residual < best[2]:
            best = (ctrl, end, residual)
    return best


@dataclass
class DegenerateReport:
    """Structure verification for the A = 0 case."""

    n_trajectories: int
    min_functional_increment: float
    pairs: list
    n_mutual: int
    counterexamples: int
    irreversible_confirmed: int
    seed: int

    @property
    def passed(self) -> bool:
        return (
            self.min_functional_increment > 0.0
            and self.counterexamples == 0
            and self.n_mutual > 0
        )

    def to_dict(self) -> dict:
        return {
            "n_trajectories": self.n_trajectories,
            "min_functional_increment": self.min_functional_increment,
            "pairs": self.pairs,
            "n_mutual": self.n_mutual,
            "counterexamples": self.counterexamples,
            "irreversible_confirmed": self.irreversible_confirmed,
            "seed": self.seed,
            "passed": self.passed,
        }


def degenerate_structure_check(
    spec: SystemSpec,
    n_samples: int = 100,
    seed: int = 0,
    n_pairs: int = 12,
    line_tol: float = 1e-6,
    pair_tol: float = 1e-8,
) -> DegenerateReport:
    """Verify the two structural facts of the A = 0 case numerically.

    (a) The functional H(v) = <v - v0, theta xi> strictly increases along
    trajectories whose control never vanishes.  (b) Points mutually reachable
    with (0, v0) stay on the line v0 + R xi at angle 0: steering succeeds in
    both directions only for targets with no theta-xi offset, and every
    verified mutual pair satisfies |<v0 - v1, theta xi>| < line_tol.
    Translation equivariance of the flow makes the base point v0 irrelevant;
    the check uses v0 = 0 in the normalized chart.
    """
    chart, (lo, hi) = _normalized_degenerate(spec)
    rng = np.random.default_rng(seed)
    xi = chart.xi
    txi = perp(xi)
    umin = 0.05 * min(-lo, hi)
    v0 = np.zeros(2)

    # (a) strict growth of the monotone functional.
    min_inc = np.inf
    for _ in range(int(n_samples)):
        n_seg = int(rng.integers(2, 7))
        g = GroupElement(0.0, v0)
        h_prev = float((g.v - v0) @ txi)
        for _ in range(n_seg):
            u = rng.uniform(umin, min(-lo, hi)) * (1.0 if rng.uniform() < 0.5 else -1.0)
            dur = rng.uniform(0.1, 1.5)
            for frac in np.linspace(1.0 / 8.0, 1.0, 8):
                gq = flow_detA0(chart, dur * frac, g, u)
                h = float((gq.v - v0) @ txi)
                min_inc = min(min_inc, h - h_prev)
                h_prev = h
            g = flow_detA0(chart, dur, g, u)

    # (b) constructive mutual-reachability pairs.
    scale = max(1.0, float(np.linalg.norm(xi)))
    pairs = []
    n_mutual = 0
    counterexamples = 0
    irreversible = 0
    xin = xi / float(np.linalg.norm(xi))
    txin = perp(xin)
    for k in range(int(n_pairs)):
        c = rng.uniform(0.3, 1.5) * (1.0 if k % 2 == 0 else -1.0)
        off_line = k % 4 >= 2
        d = rng.uniform(0.05, 0.5) * (1.0 if rng.uniform() < 0.5 else -1.0) if off_line else 0.0
        target = v0 + c * xin + d * txin
        ctrl_f, end_f, res_f = steer_degenerate(spec, v0, target)
        p = end_f.v
        ctrl_r, end_r, res_r = steer_degenerate(spec, p, v0)
        mutual = res_f < pair_tol * scale and res_r < pair_tol * scale
        functional = abs(float((p - v0) @ txi))
        angle_dev = angle_dist(end_f.t, 0.0)
        if mutual:
            n_mutual += 1
            if functional >= line_tol or angle_dev >= 1e-9:
                counterexamples += 1
        elif off_line:
            irreversible += 1
        pairs.append(
            {
                "target_along": c,
                "target_offset": d,
                "forward_residual": res_f,
                "reverse_residual": res_r,
                "mutual": mutual,
                "functional": functional,
                "angle_deviation": angle_dev,
            }
        )

    return DegenerateReport(
        n_trajectories=int(n_samples),
        min_functional_increment=float(min_inc),
        pairs=pairs,
        n_mutual=n_mutual,
        counterexamples=counterexamples,
        irreversible_confirmed=irreversible,
        seed=int(seed),
    )
