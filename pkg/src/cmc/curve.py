"""Star-shaped closed curves stored as radial graphs ``rho = g(theta)``.

A :class:`DiscreteCurve` samples ``g`` on the uniform grid
``theta_k = 2 pi k / n``.  Geodesic curvature uses the closed form for radial
graphs in geodesic polar coordinates ``d rho^2 + sinh(rho)^2 d theta^2``,

    k = (S^2 C + 2 C g'^2 - S g'') / (g'^2 + S^2)^(3/2),   S = sinh g, C = cosh g,

with ``g'`` and ``g''`` taken from fourth-order periodic central differences.
The sign is chosen so that a circle of radius R has curvature ``coth R``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CurveFormatError, DomainError
from .hyperbolic import TWO_PI, polar_to_complex

MIN_SAMPLES = 8
DEFAULT_FOURIER_SAMPLES = 128


def radial_graph_curvature(g, g1, g2):
    """Geodesic curvature of ``rho = g(theta)`` from ``g`` and its first two derivatives."""
    s, c = np.sinh(g), np.cosh(g)
    return (s * s * c + 2.0 * c * g1 * g1 - s * g2) / (g1 * g1 + s * s) ** 1.5


def fd_derivatives(g, dtheta, periodic=True):
    """Fourth-order central differences ``(g', g'')``.

    With ``periodic=False`` only the interior values ``g[2:-2]`` get
    derivatives and the returned arrays are shorter by four entries.
    """
    g = np.asarray(g, dtype=float)
    if periodic:
        gp1, gp2 = np.roll(g, -1), np.roll(g, -2)
        gm1, gm2 = np.roll(g, 1), np.roll(g, 2)
        g0 = g
    else:
        gm2, gm1, g0, gp1, gp2 = g[:-4], g[1:-3], g[2:-2], g[3:-1], g[4:]
    d1 = (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * dtheta)
    d2 = (-gp2 + 16.0 * gp1 - 30.0 * g0 + 16.0 * gm1 - gm2) / (12.0 * dtheta * dtheta)
    return d1, d2


def curvature_of_samples(g, dtheta, periodic=True):
    """Geodesic curvature of a sampled radial graph (see :func:`fd_derivatives`)."""
    d1, d2 = fd_derivatives(g, dtheta, periodic)
    g0 = np.asarray(g, dtype=float) if periodic else np.asarray(g, dtype=float)[2:-2]
    return radial_graph_curvature(g0, d1, d2)


@dataclass(frozen=True, eq=False)
class DiscreteCurve:
    """Closed curve ``rho = g(theta)`` sampled on a uniform periodic grid."""

    g: np.ndarray

    def __post_init__(self):
        g = np.array(self.g, dtype=float).ravel()
        if g.size < MIN_SAMPLES:
            raise DomainError(f"a curve needs at least {MIN_SAMPLES} samples, got {g.size}")
        if not np.all(np.isfinite(g)) or np.any(g <= 0.0):
            raise DomainError("radial samples must be finite and positive")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    # -- construction -------------------------------------------------------
    @classmethod
    def circle(cls, radius: float, n: int = DEFAULT_FOURIER_SAMPLES) -> "DiscreteCurve":
        return cls(np.full(n, float(radius)))

    @classmethod
    def from_function(cls, func, n: int) -> "DiscreteCurve":
        return cls(func(TWO_PI * np.arange(n) / n))

    @classmethod
    def from_fourier(cls, a0, a=(), b=(), n: int = DEFAULT_FOURIER_SAMPLES) -> "DiscreteCurve":
        """Sample ``g = a0 + sum_k a_k cos(k theta) + b_k sin(k theta)`` (k from 1)."""
        theta = TWO_PI * np.arange(n) / n
        g = np.full(n, float(a0))
        for k, ak in enumerate(a, start=1):
            g += ak * np.cos(k * theta)
        for k, bk in enumerate(b, start=1):
            g += bk * np.sin(k * theta)
        return cls(g)

    # -- basic geometry -----------------------------------------------------
    @property
    def n(self) -> int:
        return self.g.size

    @property
    def dtheta(self) -> float:
        return TWO_PI / self.n

    @property
    def theta(self) -> np.ndarray:
        return self.dtheta * np.arange(self.n)

    def derivatives(self):
        return fd_derivatives(self.g, self.dtheta)

    def curvature(self) -> np.ndarray:
        """Geodesic curvature at every node."""
        return curvature_of_samples(self.g, self.dtheta)

    def model_points(self) -> np.ndarray:
        """Nodes as complex disk coordinates."""
        return polar_to_complex(self.g, self.theta)

    def outward_normals(self, g1=None) -> np.ndarray:
        """Unit outward normals at the nodes, as complex Euclidean directions."""
        if g1 is None:
            g1 = self.derivatives()[0]
        theta = self.theta
        # d/dtheta of tanh(g/2) e^{i theta} is proportional to (r' + i r) e^{i theta}
        r = np.tanh(self.g / 2.0)
        dr = 0.5 * g1 / np.cosh(self.g / 2.0) ** 2
        tangent = (dr + 1j * r) * np.exp(1j * theta)
        return -1j * tangent / np.abs(tangent)

    def fourier_coefficients(self) -> np.ndarray:
        return np.fft.rfft(self.g) / self.n

    def evaluate(self, theta, derivative: int = 0):
        """Trigonometric interpolant of the samples (or its derivative) at ``theta``."""
        coeffs = self.fourier_coefficients()
        k = np.arange(coeffs.size)
        weight = np.full(coeffs.size, 2.0)
        weight[0] = 1.0
        if self.n % 2 == 0:
            weight[-1] = 1.0
        theta = np.asarray(theta, dtype=float)
        phase = np.exp(1j * np.multiply.outer(theta, k))
        terms = weight * coeffs * (1j * k) ** derivative
        return np.real(phase @ terms)

    def resample(self, n: int) -> "DiscreteCurve":
        if n == self.n:
            return self
        return DiscreteCurve(self.evaluate(TWO_PI * np.arange(n) / n))

    def rotate(self, shift: int) -> "DiscreteCurve":
        """Rotate by ``shift`` grid steps (counterclockwise)."""
        return DiscreteCurve(np.roll(self.g, shift))

    # -- serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        return {"n": self.n, "g": [float(v) for v in self.g]}


def discrete_curvature(curve: DiscreteCurve, i: int) -> float:
    """Geodesic curvature of ``curve`` at node ``i``; circles of radius R give ``coth R``."""
    if np.any(np.diff(np.append(curve.model_points(), curve.model_points()[0])) == 0):
        raise DomainError("curve has repeated nodes")
    return float(curve.curvature()[i % curve.n])


def curve_from_dict(data) -> DiscreteCurve:
    if not isinstance(data, dict):
        raise CurveFormatError("curve JSON must be an object")
    if "fourier" in data:
        coeffs = data["fourier"]
        if not isinstance(coeffs, dict) or "a0" not in coeffs:
            raise CurveFormatError("'fourier' entry needs at least an 'a0' coefficient")
        n = int(data.get("n", DEFAULT_FOURIER_SAMPLES))
        try:
            return DiscreteCurve.from_fourier(float(coeffs["a0"]), coeffs.get("a", []), coeffs.get("b", []), n)
        except (TypeError, ValueError) as exc:
            raise CurveFormatError(f"bad fourier coefficients: {exc}") from exc
    if "g" not in data:
        raise CurveFormatError("curve JSON needs either 'g' samples or a 'fourier' entry")
    g = data["g"]
    if "n" in data and int(data["n"]) != len(g):
        raise CurveFormatError(f"'n' = {data['n']} does not match {len(g)} samples in 'g'")
    try:
        return DiscreteCurve(np.asarray(g, dtype=float))
    except (TypeError, ValueError) as exc:
        raise CurveFormatError(f"bad samples: {exc}") from exc


def load_curve(path) -> DiscreteCurve:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CurveFormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return curve_from_dict(data)
    except CurveFormatError as exc:
        raise CurveFormatError(f"{path}: {exc}") from exc


def save_curve(curve: DiscreteCurve, path) -> None:
    Path(path).write_text(json.dumps(curve.to_dict(), indent=1) + "\n")


def perturbed_circle(radius: float, amplitude: float, mode: int = 2, n: int = DEFAULT_FOURIER_SAMPLES):
    """Circle of hyperbolic radius ``radius`` with a ``cos(mode * theta)`` ripple."""
    return DiscreteCurve.from_fourier(radius, [0.0] * (mode - 1) + [amplitude], [], n)


__all__ = [
    "DiscreteCurve",
    "curvature_of_samples",
    "curve_from_dict",
    "discrete_curvature",
    "fd_derivatives",
    "load_curve",
    "perturbed_circle",
    "radial_graph_curvature",
    "save_curve",
]
