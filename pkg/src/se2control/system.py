"""System descriptions, controllability rank check, classification, reduction.

A system on the planar motion group is specified by the drift data (A, xi),
the invariant field data (alpha, eta1) and a control range Omega = [u-, u+]
with u- < 0 < u+.  When det A != 0 the angle decouples and the translation
part reduces to the planar system

    vdot = (A - u theta) v + u eta,

after absorbing alpha into the control (the reduced control range is
alpha * Omega and the reduced drift vector is eta / alpha with
eta = alpha A^{-1} xi + eta1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .group import THETA, commutes_with_theta

# Classification cases.
CASE_DEGENERATE = "DegenerateDetZero"
CASE_TRACE_ZERO = "ControllableTraceZero"
CASE_CLOSED = "ClosedBoundedControlSet"
CASE_OPEN = "OpenControlSet"
CASE_NOT_CLASSIFIED = "NotClassified"


def lambda_mu(A, tol: float = 1e-12):
    """Extract (lam, mu) from a matrix commuting with theta.

    Raises ValueError if A does not have the form [[lam, -mu], [mu, lam]].
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (2, 2) or not commutes_with_theta(A, tol):
        raise ValueError("A must commute with the rotation generator")
    return float(A[0, 0]), float(A[1, 0])


def matrix_from_lambda_mu(lam: float, mu: float) -> np.ndarray:
    """Build the commuting matrix [[lam, -mu], [mu, lam]]."""
    return np.array([[lam, -mu], [mu, lam]])


def _check_omega(omega):
    lo, hi = float(omega[0]), float(omega[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < 0.0 < hi):
        raise ValueError("omega must satisfy u- < 0 < u+")
    return lo, hi


@dataclass
class SystemSpec:
    """Full system data on the planar motion group.

    Attributes
    ----------
    alpha : float
        Angular rate of the invariant field.
    xi : ndarray, shape (2,)
        Drift translation data.
    A : ndarray, shape (2, 2)
        Linear part; must commute with the rotation generator.
    eta1 : ndarray, shape (2,)
        Invariant field translation data.
    omega : (float, float)
        Control range [u-, u+] with u- < 0 < u+.
    """

    alpha: float
    xi: np.ndarray
    A: np.ndarray
    eta1: np.ndarray
    omega: tuple = (-1.0, 1.0)

    def __post_init__(self):
        self.alpha = float(self.alpha)
        self.xi = np.asarray(self.xi, dtype=float).reshape(2).copy()
        self.eta1 = np.asarray(self.eta1, dtype=float).reshape(2).copy()
        self.A = np.asarray(self.A, dtype=float).reshape(2, 2).copy()
        lambda_mu(self.A)  # validates the commuting form
        self.omega = _check_omega(self.omega)
        if not (
            np.isfinite(self.alpha)
            and np.all(np.isfinite(self.xi))
            and np.all(np.isfinite(self.eta1))
            and np.all(np.isfinite(self.A))
        ):
            raise ValueError("system data must be finite")

    @property
    def lam(self) -> float:
        return float(self.A[0, 0])

    @property
    def mu(self) -> float:
        return float(self.A[1, 0])

    def det(self) -> float:
        return self.lam**2 + self.mu**2

    def trace(self) -> float:
        return 2.0 * self.lam

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "xi": list(self.xi),
            "A": {"lambda": self.lam, "mu": self.mu},
            "eta1": list(self.eta1),
            "omega": list(self.omega),
        }


@dataclass
class ReducedSpec:
    """Planar reduced system vdot = (A - u theta) v + u eta.

    The control u ranges over `omega` (already alpha-rescaled when the spec
    comes from :func:`reduce_system`).
    """

    lam: float
    mu: float
    eta: np.ndarray
    omega: tuple = (-1.0, 1.0)

    def __post_init__(self):
        self.lam = float(self.lam)
        self.mu = float(self.mu)
        self.eta = np.asarray(self.eta, dtype=float).reshape(2).copy()
        if self.lam == 0.0 and self.mu == 0.0:
            raise ValueError("reduced system requires det A != 0")
        self.omega = _check_omega(self.omega)
        if not np.all(np.isfinite(self.eta)):
            raise ValueError("eta must be finite")

    @property
    def A(self) -> np.ndarray:
        return matrix_from_lambda_mu(self.lam, self.mu)

    def a_of_u(self, u: float) -> np.ndarray:
        """Closed-loop matrix A(u) = A - u theta = [[lam, -(mu-u)], [mu-u, lam]]."""
        return matrix_from_lambda_mu(self.lam, self.mu - float(u))

    def det_a_of_u(self, u: float) -> float:
        return self.lam**2 + (self.mu - float(u)) ** 2

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "mu": self.mu,
            "eta": list(self.eta),
            "omega": list(self.omega),
        }


def larc(spec: SystemSpec) -> bool:
    """Rank condition: alpha != 0 and alpha xi + A eta1 != 0.

    When it fails the system is not controllable on any neighborhood and the
    classification is unreliable.
    """
    if spec.alpha == 0.0:
        return False
    w = spec.alpha * spec.xi + spec.A @ spec.eta1
    return float(np.linalg.norm(w)) > 0.0


def reduce_system(spec: SystemSpec) -> ReducedSpec:
    """Reduce the translation dynamics to the planar system.

    Requires det A != 0.  The reduced control is u~ = alpha u, so the reduced
    range is alpha * Omega (sorted) and the reduced drift vector is
    eta~ = eta / alpha with eta = alpha A^{-1} xi + eta1.
    """
    if spec.det() == 0.0:
        raise ValueError("reduce_system requires det A != 0")
    if spec.alpha == 0.0:
        raise ValueError("reduce_system requires alpha != 0")
    eta = spec.alpha * np.linalg.solve(spec.A, spec.xi) + spec.eta1
    # For det A != 0 the rank condition is equivalent to eta != 0 because
    # alpha xi + A eta1 = A eta; assert the identity instead of trusting it.
    residual = float(
        np.max(np.abs((spec.alpha * spec.xi + spec.A @ spec.eta1) - spec.A @ eta))
    )
    scale = max(1.0, float(np.linalg.norm(spec.xi)), float(np.linalg.norm(spec.eta1)))
    if residual > 1e-9 * scale:
        raise AssertionError("internal identity A eta = alpha xi + A eta1 violated")
    if larc(spec) and float(np.linalg.norm(eta)) == 0.0:
        raise AssertionError("rank condition holds but reduced eta vanished")
    lo, hi = sorted((spec.alpha * spec.omega[0], spec.alpha * spec.omega[1]))
    return ReducedSpec(lam=spec.lam, mu=spec.mu, eta=eta / spec.alpha, omega=(lo, hi))


@dataclass
class ClassificationReport:
    """Outcome of :func:`classify`, JSON-serializable via :meth:`to_dict`."""

    case: str
    controllable: bool
    larc: bool
    det: float
    trace: float
    lam: float
    mu: float
    boundary_structure: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    reduced: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "controllable": self.controllable,
            "larc": self.larc,
            "det": self.det,
            "trace": self.trace,
            "lambda": self.lam,
            "mu": self.mu,
            "boundary_structure": self.boundary_structure,
            "notes": self.notes,
            "reduced": self.reduced,
        }


def _boundary_structure(lam: float, mu: float, eta, omega) -> dict:
    """Boundary of the lifted control set for the open (trace > 0) case.

    At reduced control u = mu the closed loop A(mu) = lam * I has the single
    equilibrium v(mu) = -(mu/lam) eta, a one-point planar control set whose
    lift is a periodic orbit of period 2*pi/mu; for mu = 0 every (t, 0) is a
    fixed point, giving a continuum of one-point control sets.
    """
    lo, hi = omega
    if not (lo <= mu <= hi):
        return {"kind": "none", "reason": "mu outside the reduced control range"}
    if mu == 0.0:
        return {"kind": "continuum_of_fixed_points", "plane_point": [0.0, 0.0]}
    point = -(mu / lam) * np.asarray(eta, float)
    return {
        "kind": "periodic_orbit",
        "control": mu,
        "plane_point": [float(point[0]), float(point[1])],
        "period": 2.0 * np.pi / mu,
    }


def classify(spec: SystemSpec) -> ClassificationReport:
    """Classify the control-set structure of the system.

    Cases: det A = 0 (infinitely many control sets with empty interior);
    trace A = 0 (controllable on the plane after reduction); trace A < 0
    (unique bounded control set, closed); trace A > 0 (unique control set
    with nonempty interior, open).  When the rank condition fails the report
    abstains from predicting a case.
    """
    lam, mu = spec.lam, spec.mu
    rank_ok = larc(spec)
    notes = []
    boundary: dict = {"kind": "none"}
    reduced: dict = {}
    if not rank_ok:
        notes.append(
            "rank condition fails (alpha = 0 or alpha xi + A eta1 = 0); "
            "no case predicted"
        )
        return ClassificationReport(
            case=CASE_NOT_CLASSIFIED,
            controllable=False,
            larc=False,
            det=spec.det(),
            trace=spec.trace(),
            lam=lam,
            mu=mu,
            boundary_structure=boundary,
            notes=notes,
            reduced=reduced,
        )

    if spec.det() == 0.0:
        case = CASE_DEGENERATE
        controllable = False
        notes.append(
            "A = 0: control sets are one-dimensional slices "
            "{angle 0} x (v + R xi), all with empty interior"
        )
    else:
        rs = reduce_system(spec)
        reduced = rs.to_dict()
        if lam == 0.0:
            case = CASE_TRACE_ZERO
            controllable = True
        elif lam < 0.0:
            case = CASE_CLOSED
            controllable = False
            if rs.omega[0] <= mu <= rs.omega[1]:
                notes.append(
                    "mu lies in the reduced control range: the singleton "
                    "{v(mu)} is an additional one-point control set"
                )
        else:
            case = CASE_OPEN
            controllable = False
            boundary = _boundary_structure(lam, mu, rs.eta, rs.omega)

    return ClassificationReport(
        case=case,
        controllable=controllable,
        larc=rank_ok,
        det=spec.det(),
        trace=spec.trace(),
        lam=lam,
        mu=mu,
        boundary_structure=boundary,
        notes=notes,
        reduced=reduced,
    )
