"""Geodesic curvature along the outward distance flow of a closed curve.

A curve moved a distance ``t`` along its outward normal has curvature

    |k0| = 1:  k0
    |k0| < 1:  tanh(t - log sqrt(k~))
    |k0| > 1:  coth(t - log sqrt(k~)),     k~ = |(1 - k0) / (1 + k0)|,

in the convention where circles about their centre have positive curvature.
Measured against the inward normal ``eta = -grad d`` the sign flips and the
same trajectories solve ``k' = k^2 - 1``; the ODE oracle integrates that form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .curve import DiscreteCurve
from .errors import ConvergenceError, DomainError, FocalError
from .hyperbolic import TWO_PI, complex_to_polar, exp_map


@dataclass(frozen=True)
class CurvatureTrajectory:
    """Classification of an initial curvature ``k0`` (``k_tilde`` is ``None`` at ``k0 = -1``)."""

    k0: float
    regime: str
    k_tilde: float | None

    @classmethod
    def from_k0(cls, k0: float) -> "CurvatureTrajectory":
        a = abs(k0)
        regime = "unit" if a == 1.0 else ("sub" if a < 1.0 else "super")
        kt = None if k0 == -1.0 else abs((1.0 - k0) / (1.0 + k0))
        return cls(float(k0), regime, kt)

    @property
    def shift(self) -> float:
        """``log sqrt(k_tilde)``; the flow time at which a ``k0 < -1`` trajectory blows up."""
        return 0.5 * math.log(self.k_tilde)


def evolve_curvature(k0: float, t: float) -> float:
    """Closed-form curvature after flowing outward for time ``t``."""
    if k0 == -1.0:
        raise DomainError("k0 = -1 is excluded")
    if t < 0.0:
        raise DomainError("flow time must be non-negative")
    traj = CurvatureTrajectory.from_k0(k0)
    if traj.regime == "unit":
        return float(k0)
    x = t - traj.shift
    if traj.regime == "sub":
        return math.tanh(x)
    if x >= 0.0 and k0 < -1.0:
        raise DomainError(f"curvature blows up at t = {traj.shift}")
    return 1.0 / math.tanh(x)


def _rk4(f, y, dt):
    a = f(y)
    b = f(y + 0.5 * dt * a)
    c = f(y + 0.5 * dt * b)
    d = f(y + dt * c)
    return y + dt * (a + 2.0 * b + 2.0 * c + d) / 6.0


def evolve_curvature_ode(k0: float, t: float, tol: float = 1e-13, h_min: float = 1e-12) -> float:
    """Adaptive RK4 (step doubling) for ``kh' = kh^2 - 1``, ``kh = -k``.

    Independent of :func:`evolve_curvature`.  Raises :class:`ConvergenceError`
    when the step size underflows, which happens next to a pole.
    """
    if k0 == -1.0:
        raise DomainError("k0 = -1 is excluded")
    if t < 0.0:
        raise DomainError("flow time must be non-negative")

    def rhs(y):
        return y * y - 1.0

    y, s, dt = -float(k0), 0.0, min(0.01, t) if t > 0 else 0.0
    while s < t:
        dt = min(dt, t - s)
        full = _rk4(rhs, y, dt)
        half = _rk4(rhs, _rk4(rhs, y, 0.5 * dt), 0.5 * dt)
        err = abs(half - full) / 15.0
        if not math.isfinite(half) or err > tol * max(1.0, abs(half)):
            dt *= 0.5
            if dt < h_min:
                raise ConvergenceError(f"step size underflow at t = {s} (pole of the trajectory)")
            continue
        y = half + (half - full) / 15.0
        s += dt
        if err < 0.05 * tol * max(1.0, abs(y)):
            dt *= 2.0
    return -y


@dataclass(frozen=True)
class OffsetResult:
    """Offset curve together with where each original node went."""

    curve: DiscreteCurve
    image_theta: np.ndarray
    image_rho: np.ndarray


def offset_nodes(curve: DiscreteCurve, t: float):
    """Move every node distance ``t`` along the outward normal; returns polar images.

    Angles are unwrapped relative to the source nodes and must stay strictly
    increasing over one turn, otherwise the curve stopped being a radial graph.
    """
    if t < 0.0:
        raise DomainError("offset distance must be non-negative")
    moved = exp_map(curve.model_points(), curve.outward_normals(), t)
    rho, _ = complex_to_polar(moved)
    theta0 = curve.theta
    turn = np.angle(moved * np.exp(-1j * theta0))
    theta = theta0 + turn
    gaps = np.diff(np.append(theta, theta[0] + TWO_PI))
    if np.any(gaps <= 0.0) or np.any(np.abs(turn) >= 0.5 * math.pi):
        raise FocalError(f"offset by t = {t} is no longer star-shaped about the origin")
    return theta, rho


def offset_curve_with_images(curve: DiscreteCurve, t: float) -> OffsetResult:
    theta, rho = offset_nodes(curve, t)
    if t == 0.0:
        return OffsetResult(curve, theta, rho)
    # periodic spline through (theta_i, rho_i); shift so the knots start at theta[0]
    knots = np.append(theta, theta[0] + TWO_PI)
    spline = CubicSpline(knots, np.append(rho, rho[0]), bc_type="periodic")
    grid = curve.theta
    g = spline(theta[0] + np.mod(grid - theta[0], TWO_PI))
    return OffsetResult(DiscreteCurve(g), theta, rho)


def offset_curve(curve: DiscreteCurve, t: float) -> DiscreteCurve:
    """Equidistant curve at distance ``t`` outside ``curve``, resampled on the same grid."""
    return offset_curve_with_images(curve, t).curve


def curvature_report(curve: DiscreteCurve, t: float) -> dict:
    """Node-wise curvature before and after the flow.

    The discrete value after the flow is the fourth-order nodal curvature of the
    offset curve, spline-interpolated to the image angle of each source node.
    """
    res = offset_curve_with_images(curve, t)
    k_before = curve.curvature()
    closed = np.array([evolve_curvature(k, t) for k in k_before])
    k_new = res.curve.curvature()
    grid = res.curve.theta
    spline = CubicSpline(np.append(grid, TWO_PI), np.append(k_new, k_new[0]), bc_type="periodic")
    discrete = spline(np.mod(res.image_theta, TWO_PI))
    return {
        "theta": curve.theta,
        "k_before": k_before,
        "k_after_closed_form": closed,
        "k_after_discrete": discrete,
    }
