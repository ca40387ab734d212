"""Structured grids on star-shaped hyperbolic annuli and the discrete mean curvature operator.

The annulus between ``rho = g(theta)`` and the circle ``rho = rho2`` is the
image of ``[0, 1] x [0, 2 pi)`` under

    rho(s, theta) = g(theta) + (rho2 - g(theta)) m(s),

with ``m(s) = s^2`` (default) or ``m(s) = s``.  In the ``(s, theta)`` chart
the metric has ``sqrt(det) = rho_s sinh(rho)`` and

    Q(u) = (d_s F^s + d_theta F^theta) / (rho_s sinh rho),
    F^s     = ((rho_theta^2 + S^2) u_s - rho_s rho_theta u_theta) / (rho_s S W),
    F^theta = (rho_s u_theta - rho_theta u_s) / (S W),
    W^2     = 1 + u_s^2 / rho_s^2 + (rho_s u_theta - rho_theta u_s)^2 / (rho_s S)^2.

``Q`` is discretized in flux form on the cell around each node: normal
derivatives on a face are compact two-point differences, tangential ones
average the neighbouring centred differences, so every row couples a 3x3
block of nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..curve import DiscreteCurve
from ..errors import DomainError
from ..hyperbolic import TWO_PI, polar_to_complex


def _roll(a, k):
    return np.roll(a, k, axis=-1)


def periodic_midpoints(g, dtheta):
    """Fourth-order values and derivatives at ``theta_{j+1/2}`` plus nodal derivatives."""
    gm1, gp1, gp2 = _roll(g, 1), _roll(g, -1), _roll(g, -2)
    half = (-gm1 + 9.0 * g + 9.0 * gp1 - gp2) / 16.0
    dhalf = (gm1 - 27.0 * g + 27.0 * gp1 - gp2) / (24.0 * dtheta)
    gm2 = _roll(g, 2)
    dnode = (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * dtheta)
    return half, dhalf, dnode


_MAPS = {
    "quadratic": (lambda s: s * s, lambda s: 2.0 * s),
    "linear": (lambda s: s, lambda s: np.ones_like(s)),
}


@dataclass(frozen=True, eq=False)
class AnnulusGrid:
    """Nodes ``(s_i, theta_j)``, ``i = 0..n_s``, ``j = 0..n_theta-1``, and face geometry."""

    inner: DiscreteCurve
    outer_radius: float
    n_s: int
    n_theta: int
    grid_map: str = "quadratic"

    def __post_init__(self):
        if self.n_s < 4 or self.n_theta < 8:
            raise DomainError("grid needs n_s >= 4 and n_theta >= 8")
        if self.grid_map not in _MAPS:
            raise DomainError(f"unknown grid map {self.grid_map!r}")
        inner = self.inner.resample(self.n_theta)
        if not inner.g.max() < self.outer_radius:
            raise DomainError("outer radius must exceed the inner curve")
        object.__setattr__(self, "inner", inner)
        object.__setattr__(self, "_geom", self._geometry())

    # -- chart --------------------------------------------------------------
    @property
    def ds(self) -> float:
        return 1.0 / self.n_s

    @property
    def dtheta(self) -> float:
        return TWO_PI / self.n_theta

    @property
    def s(self) -> np.ndarray:
        return np.arange(self.n_s + 1) * self.ds

    @property
    def theta(self) -> np.ndarray:
        return np.arange(self.n_theta) * self.dtheta

    @property
    def shape(self) -> tuple:
        return (self.n_s + 1, self.n_theta)

    def rho_at(self, s, g):
        m, _ = _MAPS[self.grid_map]
        return g + (self.outer_radius - g) * m(s)

    @property
    def rho(self) -> np.ndarray:
        return self._geom["rho"]

    def model_points(self) -> np.ndarray:
        return polar_to_complex(self.rho, self.theta[None, :])

    def _geometry(self):
        m, dm = _MAPS[self.grid_map]
        g = self.inner.g
        rho2 = self.outer_radius
        g_half, dg_half, dg_node = periodic_midpoints(g, self.dtheta)
        s = self.s[:, None]
        s_face = (self.s[:-1] + 0.5 * self.ds)[:, None]
        geom = {}
        geom["rho"] = g + (rho2 - g) * m(s)
        geom["rho_s"] = (rho2 - g) * dm(s)
        geom["rho_t"] = dg_node * (1.0 - m(s))
        # s-faces (i+1/2, j)
        geom["sf_rho"] = g + (rho2 - g) * m(s_face)
        geom["sf_rs"] = (rho2 - g) * dm(s_face)
        geom["sf_rt"] = dg_node * (1.0 - m(s_face))
        # theta-faces (i, j+1/2)
        geom["tf_rho"] = g_half + (rho2 - g_half) * m(s)
        geom["tf_rs"] = (rho2 - g_half) * dm(s)
        geom["tf_rt"] = dg_half * (1.0 - m(s))
        c = np.cosh(geom["sf_rho"])
        geom["area"] = (c[1:] - c[:-1]) * self.dtheta
        geom["g_prime"] = dg_node
        return geom

    def geometry(self, key):
        return self._geom[key]


def _flux(u_s, u_t, rho, rs, rt):
    S = np.sinh(rho)
    cross = rs * u_t - rt * u_s
    W = np.sqrt(1.0 + (u_s / rs) ** 2 + (cross / (rs * S)) ** 2)
    fs = ((rt * rt + S * S) * u_s - rs * rt * u_t) / (rs * S * W)
    ft = cross / (S * W)
    return fs, ft


def discrete_Q(grid: AnnulusGrid, u) -> np.ndarray:
    """Finite-volume mean curvature operator at interior nodes (rows ``1..n_s-1``).

    Returns an array of shape ``(n_s - 1, n_theta)``.  Works for complex ``u``
    (used for complex-step Jacobians).
    """
    u = np.asarray(u)
    ds, dt = grid.ds, grid.dtheta
    G = grid._geom
    # s-faces between rows i and i+1
    us_f = (u[1:] - u[:-1]) / ds
    ct = (_roll(u, -1) - _roll(u, 1)) / (2.0 * dt)
    ut_f = 0.5 * (ct[1:] + ct[:-1])
    fs, _ = _flux(us_f, ut_f, G["sf_rho"], G["sf_rs"], G["sf_rt"])
    # theta-faces between columns j and j+1, interior rows only
    cs = (u[2:] - u[:-2]) / (2.0 * ds)
    us_t = 0.5 * (cs + _roll(cs, -1))
    ut_t = (_roll(u[1:-1], -1) - u[1:-1]) / dt
    _, ft = _flux(us_t, ut_t, G["tf_rho"][1:-1], G["tf_rs"][1:-1], G["tf_rt"][1:-1])
    div = (fs[1:] - fs[:-1]) * dt + (ft - _roll(ft, 1)) * ds
    return div / G["area"]

