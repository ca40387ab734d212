"""Poincare disk primitives: points, metric, distances and isometries.

Points are stored with Euclidean coordinates inside the unit disk.  All
array-level helpers accept complex numpy arrays ``z = x + iy`` so that they
can be applied to whole curves and grids at once; the scalar wrappers accept
:class:`ModelPoint` as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ModelPoint:
    """A point of the Poincare disk given by Euclidean coordinates."""

    x: float
    y: float

    def __post_init__(self):
        if not (self.x * self.x + self.y * self.y < 1.0):
            raise DomainError(f"point ({self.x}, {self.y}) is not inside the unit disk")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "ModelPoint":
        return cls(float(z.real), float(z.imag))


@dataclass(frozen=True)
class PolarPoint:
    """Geodesic polar coordinates about the origin.

    ``rho`` is the hyperbolic distance from 0, ``theta`` is normalized to
    ``[0, 2*pi)``.  The Euclidean radius of the point is ``tanh(rho / 2)``.
    """

    rho: float
    theta: float

    def __post_init__(self):
        if not self.rho >= 0.0:
            raise DomainError(f"rho must be non-negative, got {self.rho}")
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)

    @property
    def euclidean_radius(self) -> float:
        return math.tanh(self.rho / 2.0)


def _as_complex(p):
    if isinstance(p, ModelPoint):
        return p.z
    return np.asarray(p, dtype=complex) if np.ndim(p) else complex(p)


def _check_inside(z):
    if np.any(np.abs(z) >= 1.0):
        raise DomainError("points must lie strictly inside the unit disk")


def conformal_factor(euclidean_radius):
    """Return ``lambda(r) = 2 / (1 - r**2)``, the disk-model conformal factor."""
    r = np.asarray(euclidean_radius, dtype=float)
    if np.any(r < 0.0) or np.any(r >= 1.0):
        raise DomainError("conformal factor needs 0 <= r < 1")
    out = 2.0 / (1.0 - r * r)
    return float(out) if out.ndim == 0 else out


def distance_array(z1, z2):
    """Vectorized hyperbolic distance between complex arrays (no domain check).

    Uses ``d = 2 asinh(|z1 - z2| / sqrt((1 - |z1|^2)(1 - |z2|^2)))`` which keeps
    full relative accuracy for nearby points.
    """
    num = np.abs(z1 - z2)
    den = np.sqrt((1.0 - np.abs(z1) ** 2) * (1.0 - np.abs(z2) ** 2))
    return 2.0 * np.arcsinh(num / den)


def hyp_distance(p, q):
    """Hyperbolic distance between two points (ModelPoint or complex / arrays)."""
    z1, z2 = _as_complex(p), _as_complex(q)
    _check_inside(z1)
    _check_inside(z2)
    d = distance_array(z1, z2)
    return float(d) if np.ndim(d) == 0 else d


def to_polar(p) -> PolarPoint:
    z = _as_complex(p)
    _check_inside(z)
    r = abs(z)
    if r == 0.0:
        return PolarPoint(0.0, 0.0)
    return PolarPoint(2.0 * math.atanh(r), math.atan2(z.imag, z.real))


def from_polar(pp: PolarPoint) -> ModelPoint:
    r = math.tanh(pp.rho / 2.0)
    return ModelPoint(r * math.cos(pp.theta), r * math.sin(pp.theta))


def polar_to_complex(rho, theta):
    """Array version of :func:`from_polar`."""
    return np.tanh(np.asarray(rho) / 2.0) * np.exp(1j * np.asarray(theta))


def complex_to_polar(z):
    """Array version of :func:`to_polar`; returns ``(rho, theta)`` arrays."""
    z = np.asarray(z, dtype=complex)
    return 2.0 * np.arctanh(np.abs(z)), np.mod(np.angle(z), TWO_PI)


def mobius_translate(z, a):
    """Apply ``z -> (z + a) / (1 + conj(a) z)``.

    This is the hyperbolic translation along the geodesic through 0 and ``a``
    that sends the origin to ``a``.  Its derivative at 0 is the positive real
    ``1 - |a|^2``, so directions at the origin are carried without rotation.
    """
    return (z + a) / (1.0 + np.conj(a) * z)


def translation_parameter(theta0: float, s: float) -> complex:
    """Disk point to which the translation (theta0, s) moves the origin."""
    return math.tanh(s / 2.0) * complex(math.cos(theta0), math.sin(theta0))


def translate(p, theta0: float, s: float):
    """Translate ``p`` by signed distance ``s`` along the geodesic through 0 in direction ``theta0``.

    The origin is sent to the point with polar coordinates ``(|s|, theta0)`` when
    ``s > 0`` and ``(|s|, theta0 + pi)`` when ``s < 0``.  Translations by ``s``
    and ``-s`` along the same axis are mutually inverse.
    """
    a = translation_parameter(theta0, s)
    if isinstance(p, ModelPoint):
        return ModelPoint.from_complex(mobius_translate(p.z, a))
    z = _as_complex(p)
    _check_inside(z)
    return mobius_translate(z, a)


def exp_map(z, direction, t):
    """Move from ``z`` a hyperbolic distance ``t`` along the geodesic with unit direction ``direction``.

    ``direction`` is a complex number of modulus one giving the Euclidean
    direction of the initial velocity (the metric is conformal, so Euclidean
    and hyperbolic angles agree).  Vectorized over all arguments.
    """
    w = np.tanh(np.asarray(t) / 2.0) * direction
    return mobius_translate(w, z)
