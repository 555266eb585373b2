"""Shared test fixtures and an independent fixed-step RK4 oracle.

The oracle integrates the raw right-hand sides directly (plain cos/sin
arithmetic, no calls into the package's flow or group code) so closed-form
results are checked against an implementation that shares nothing with them.
"""
import math

import numpy as np
import pytest


def _rot(t):
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s], [s, c]])


def _theta(v):
    return np.array([-v[1], v[0]])


def reduced_field(lam, mu, eta, v, u):
    """v' = (A - u*theta) v + u*eta with A = ((lam,-mu),(mu,lam))."""
    nu = mu - u
    return np.array(
        [lam * v[0] - nu * v[1] + u * eta[0], nu * v[0] + lam * v[1] + u * eta[1]]
    )


def full_field(alpha, xi, lam, mu, eta1, state, u):
    """State (t, v): t' = alpha*u, v' = A v + (I - rho_t) theta xi + u rho_t eta1."""
    t, v = state[0], state[1:]
    tx = _theta(xi)
    drift = np.array([lam * v[0] - mu * v[1], mu * v[0] + lam * v[1]])
    drift += tx - _rot(t) @ tx
    ctrl = u * (_rot(t) @ np.asarray(eta1, dtype=float))
    return np.concatenate([[alpha * u], drift + ctrl])


def rk4(field, s, x0, step=1e-3):
    """Classical RK4 from 0 to s (s may be negative) with fixed step size."""
    x = np.asarray(x0, dtype=float).copy()
    n = max(1, int(math.ceil(abs(s) / step)))
    h = s / n
    for _ in range(n):
        k1 = field(x)
        k2 = field(x + 0.5 * h * k1)
        k3 = field(x + 0.5 * h * k2)
        k4 = field(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x


def rk4_reduced(lam, mu, eta, s, v0, u, step=1e-3):
    return rk4(lambda v: reduced_field(lam, mu, eta, v, u), s, v0, step)


def rk4_full(alpha, xi, lam, mu, eta1, s, state0, u, step=1e-3):
    return rk4(lambda x: full_field(alpha, xi, lam, mu, eta1, x, u), s, state0, step)


def rk4_piecewise_reduced(lam, mu, eta, segments, v0, step=1e-3):
    v = np.asarray(v0, dtype=float)
    for dur, u in segments:
        v = rk4_reduced(lam, mu, eta, dur, v, u, step)
    return v


def angle_gap(a, b):
    d = (a - b) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
