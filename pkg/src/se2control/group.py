"""Core operations on the planar motion group S^1 x R^2.

The group element (t, v) acts on the plane by rotating with angle t and
translating by v; composition is the semidirect product

    (t1, v1) * (t2, v2) = (t1 + t2, v1 + rho(t1) v2),

where rho(t) is the rotation by t.  Angles are kept canonical in [0, 2*pi).

The module also evaluates the two vector fields that make up a linear
control system on this group -- a linear field (0, A v + Lambda_t xi) and a
left-invariant field (alpha, rho(t) eta1) -- together with the coordinate
changes that decouple them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

# Rotation generator: theta @ w rotates w by +90 degrees.
THETA = np.array([[0.0, -1.0], [1.0, 0.0]])

COMMUTE_TOL = 1e-12


def wrap_angle(t: float) -> float:
    """Reduce an angle to the canonical interval [0, 2*pi)."""
    t = float(t) % TWO_PI
    # Python's % can return the modulus itself after rounding (e.g. -1e-20).
    if t >= TWO_PI:
        t -= TWO_PI
    return t


def angle_dist(a: float, b: float) -> float:
    """Distance between two angles on the circle."""
    d = abs(wrap_angle(a) - wrap_angle(b))
    return min(d, TWO_PI - d)


def rotation(t: float) -> np.ndarray:
    """Rotation matrix rho(t).

    Parameters
    ----------
    t : float
        Rotation angle in radians.

    Returns
    -------
    ndarray, shape (2, 2)
    """
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s], [s, c]])


def perp(w) -> np.ndarray:
    """Rotate `w` by +90 degrees (theta @ w)."""
    w = np.asarray(w, dtype=float)
    return np.array([-w[1], w[0]])


def lambda_map(t: float, w) -> np.ndarray:
    """Evaluate Lambda_t w = (I - rho(t)) theta w.

    This is the translation part of the linear drift generated by a pure
    rotation; it vanishes iff t = 0 (mod 2*pi).

    Examples
    --------
    >>> lambda_map(np.pi, [1.0, 0.0])
    array([0., 2.])
    """
    w = np.asarray(w, dtype=float)
    tw = perp(w)
    return tw - rotation(t) @ tw


@dataclass
class GroupElement:
    """Element (t, v) of the planar motion group.

    Attributes
    ----------
    t : float
        Angle, canonicalized to [0, 2*pi).
    v : ndarray, shape (2,)
        Translation part.
    """

    t: float
    v: np.ndarray

    def __post_init__(self):
        self.t = wrap_angle(self.t)
        self.v = np.asarray(self.v, dtype=float).reshape(2).copy()

    def as_array(self) -> np.ndarray:
        """Pack as [t, v_x, v_y]."""
        return np.array([self.t, self.v[0], self.v[1]])

    def isclose(self, other: "GroupElement", tol: float = 1e-12) -> bool:
        return (
            angle_dist(self.t, other.t) <= tol
            and float(np.max(np.abs(self.v - other.v))) <= tol
        )


def group_product(g1: GroupElement, g2: GroupElement) -> GroupElement:
    """Semidirect product (t1 + t2, v1 + rho(t1) v2)."""
    return GroupElement(g1.t + g2.t, g1.v + rotation(g1.t) @ g2.v)


def group_inverse(g: GroupElement) -> GroupElement:
    """Inverse (-t, -rho(-t) v).

    Examples
    --------
    >>> g = group_inverse(GroupElement(np.pi / 2, [1.0, 0.0]))
    >>> np.allclose([g.t, *g.v], [3 * np.pi / 2, 0.0, 1.0])
    True
    """
    return GroupElement(-g.t, -(rotation(-g.t) @ g.v))


def identity() -> GroupElement:
    return GroupElement(0.0, np.zeros(2))


def commutes_with_theta(A, tol: float = COMMUTE_TOL) -> bool:
    """Check A theta = theta A within `tol` (max-abs entrywise)."""
    A = np.asarray(A, dtype=float)
    return float(np.max(np.abs(A @ THETA - THETA @ A))) <= tol


def _require_commuting(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.shape != (2, 2):
        raise ValueError("A must be a 2x2 matrix")
    if not commutes_with_theta(A):
        raise ValueError(
            "A must commute with the rotation generator "
            "(form [[lam, -mu], [mu, lam]])"
        )
    return A


def linear_field_eval(A, xi, g: GroupElement):
    """Evaluate the linear drift field at g = (t, v).

    The field is (0, A v + Lambda_t xi); A must commute with theta.

    Returns
    -------
    (float, ndarray)
        Angular rate (always 0) and planar rate.
    """
    A = _require_commuting(A)
    xi = np.asarray(xi, dtype=float)
    return 0.0, A @ g.v + lambda_map(g.t, xi)


def invariant_field_eval(alpha: float, eta1, g: GroupElement):
    """Evaluate the left-invariant field (alpha, rho(t) eta1) at g."""
    eta1 = np.asarray(eta1, dtype=float)
    return float(alpha), rotation(g.t) @ eta1


# ---------------------------------------------------------------------------
# Coordinate changes decoupling the drift
# ---------------------------------------------------------------------------


def conj_psi1(A, xi, g: GroupElement) -> GroupElement:
    """First decoupling map psi1(t, v) = (t, v + Lambda_t A^{-1} xi).

    Removes the Lambda_t xi drift term; requires det A != 0.
    """
    A = _require_commuting(A)
    if abs(np.linalg.det(A)) == 0.0:
        raise ValueError("conj_psi1 requires det A != 0")
    return GroupElement(g.t, g.v + lambda_map(g.t, np.linalg.solve(A, np.asarray(xi, float))))


def conj_psi1_inv(A, xi, g: GroupElement) -> GroupElement:
    """Inverse of :func:`conj_psi1`."""
    A = _require_commuting(A)
    return GroupElement(g.t, g.v - lambda_map(g.t, np.linalg.solve(A, np.asarray(xi, float))))


def conj_psi2(g: GroupElement) -> GroupElement:
    """Second decoupling map psi2(t, v) = (t, rho(-t) v)."""
    return GroupElement(g.t, rotation(-g.t) @ g.v)


def conj_psi2_inv(g: GroupElement) -> GroupElement:
    """Inverse of :func:`conj_psi2`."""
    return GroupElement(g.t, rotation(g.t) @ g.v)


def conj_psi_zero(alpha: float, eta1, g: GroupElement) -> GroupElement:
    """Decoupling map for the A = 0 case: (t, v - Lambda_t eta1 / alpha).

    Conjugates the invariant field (alpha, rho(t) eta1) to (alpha, 0).
    """
    if alpha == 0.0:
        raise ValueError("conj_psi_zero requires alpha != 0")
    return GroupElement(g.t, g.v - lambda_map(g.t, np.asarray(eta1, float)) / alpha)


def conj_psi_zero_inv(alpha: float, eta1, g: GroupElement) -> GroupElement:
    """Inverse of :func:`conj_psi_zero`."""
    if alpha == 0.0:
        raise ValueError("conj_psi_zero requires alpha != 0")
    return GroupElement(g.t, g.v + lambda_map(g.t, np.asarray(eta1, float)) / alpha)
