"""Dirichlet problem ``Q(u) = 2h`` on hyperbolic annuli, solved by geometric continuation.

The inner curve is deformed linearly from the base circle of ``H_alpha``
(where ``H_alpha`` itself is the solution) to the target curve.  Each stage
is solved by damped Newton starting from the previous stage's nodal values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import rotational as rot
from ..admissibility import check_r_admissible, horosphere_convex
from ..config import RunConfig
from ..curve import DiscreteCurve
from ..errors import ContinuationError, ConvergenceError, DomainError
from .grid import AnnulusGrid, discrete_Q
from .newton import damped_newton


def _boundary_values(data, theta, default):
    if data is None:
        return np.full(theta.size, default)
    if callable(data):
        return np.asarray(data(theta), dtype=float)
    return np.full(theta.size, float(data))


@dataclass(frozen=True, eq=False)
class AnnulusProblem:
    """``Q(u) = 2h`` between ``inner`` and the circle of radius ``outer_radius``.

    Boundary data are constants or callables of ``theta``; the outer default is
    ``H_alpha(outer_radius)`` and the inner default is zero.
    """

    h: float
    inner: DiscreteCurve
    outer_radius: float
    alpha: float
    beta: float | None = None
    inner_data: object = 0.0
    outer_data: object = None

    def __post_init__(self):
        if not self.inner.g.max() < self.outer_radius:
            raise DomainError("outer radius must exceed max g")
        if not 0.0 < self.alpha < 2.0 * self.h:
            raise DomainError("alpha must lie in (0, 2h)")

    @property
    def profile(self) -> rot.RotationalProfile:
        return rot.make_profile(self.h, self.alpha)

    def outer_default(self) -> float:
        return rot.height(self.profile, self.outer_radius)

    def boundary(self, theta):
        return (_boundary_values(self.inner_data, theta, 0.0),
                _boundary_values(self.outer_data, theta, self.outer_default()))


@dataclass(frozen=True, eq=False)
class GraphSolution:
    grid: AnnulusGrid
    u: np.ndarray
    residual_norm: float
    grad: np.ndarray
    grad_max: float
    grad_ceiling: float
    boundary_normal_derivs: dict
    provenance: dict = field(default_factory=dict)

    @property
    def accepted(self) -> bool:
        return bool(self.grad_max <= self.grad_ceiling)


def deformation_family(curve: DiscreteCurve, h: float, n_steps: int, alpha: float | None = None,
                       config: RunConfig = RunConfig(), check: bool = True):
    """Curves ``g^sigma = sigma rho^h(alpha) + (1 - sigma) g`` for ``sigma = 1, ..., 0``.

    Returns ``(sigma, curve, report)`` triples; ``report`` holds the
    admissibility verdict and horosphere convexity of each intermediate curve
    (``None`` when ``check`` is false).
    """
    if n_steps < 1:
        raise DomainError("need at least one deformation step")
    if alpha is None:
        from ..admissibility import choose_parameters

        alpha = choose_parameters(curve, h, config).alpha
    r0 = rot.rho_h(h, alpha)
    out = []
    for sigma in np.linspace(1.0, 0.0, n_steps + 1):
        c = family_curve(curve, r0, float(sigma))
        rep = check_r_admissible(c, h, config, alpha=alpha) if check else None
        out.append((float(sigma), c, rep))
    return out


def family_curve(curve: DiscreteCurve, base_radius: float, sigma: float) -> DiscreteCurve:
    if sigma == 1.0:
        return DiscreteCurve(np.full(curve.n, base_radius))
    return DiscreteCurve(sigma * base_radius + (1.0 - sigma) * curve.g)


def _full_field(u_int, b0, b1):
    return np.vstack([b0[None, :], u_int, b1[None, :]])


def gradient_field(grid: AnnulusGrid, u):
    """``|grad u|`` at every node; one-sided second-order differences in ``s`` on the boundary rows."""
    us = np.gradient(u, grid.ds, axis=0, edge_order=2)
    ut = (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1)) / (2.0 * grid.dtheta)
    rs = grid.geometry("rho_s")
    rt = grid.geometry("rho_t")
    S = np.sinh(grid.rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        # rho_s vanishes on the inner row of the quadratic map; there use the normal derivative
        out = np.sqrt((us / rs) ** 2 + ((rs * ut - rt * us) / (rs * S)) ** 2)
    if grid.grid_map == "quadratic":
        out[0] = np.abs(boundary_normal_derivatives(grid, u)["inner"])
    return out


def _one_sided(d, v):
    """Derivative at ``d[0]`` of the quadratic through ``(d_k, v_k)``, ``k = 0, 1, 2``."""
    d1, d2 = d[1] - d[0], d[2] - d[0]
    return (-(d1 + d2) / (d1 * d2)) * v[0] + (d2 / (d1 * (d2 - d1))) * v[1] - (d1 / (d2 * (d2 - d1))) * v[2]


def boundary_normal_derivatives(grid: AnnulusGrid, u) -> dict:
    """Second-order one-sided boundary derivatives.

    ``inner``: derivative along the normal of the inner curve pointing into the
    annulus.  ``outer``: radial derivative ``du/drho`` at the outer circle.
    """
    rho = grid.rho
    g = grid.inner.g
    u_rho_in = _one_sided(rho[:3], u[:3])
    S = np.sinh(g)
    inner = u_rho_in * np.sqrt(S * S + grid.geometry("g_prime") ** 2) / S
    outer = _one_sided(rho[::-1][:3], u[::-1][:3])
    return {"inner": inner, "outer": outer}


def _solve_stage(grid, b0, b1, h, u_guess, config):
    def residual(u_int):
        return discrete_Q(grid, _full_field(u_int, b0, b1)) - 2.0 * h

    return damped_newton(residual, u_guess, grid.n_theta, config.newton_tol, config.newton_max_iter,
                         config.damping_floor)


def solve_dirichlet(problem: AnnulusProblem, n_s: int | None = None, n_theta: int | None = None,
                    tol: float | None = None, config: RunConfig = RunConfig(), check_family: bool = False,
                    override: bool = False):
    """Continuation from the base circle of ``H_alpha`` (``sigma = 1``) to ``problem.inner`` (``sigma = 0``).

    The inner curve must pass :func:`check_r_admissible` with ``problem.alpha``
    unless ``override`` is set (the circular oracle problems need it, since
    their inner curve is the base circle itself).

    Steps in ``sigma`` are halved on Newton failure and grown by 1.5 after a
    success; :class:`ContinuationError` reports the last converged ``sigma``
    when the step falls below ``config.sigma_step_min``.
    """
    config = config.replace(n_s=n_s, n_theta=n_theta, newton_tol=tol)
    n_s, n_theta = config.n_s, config.n_theta
    h, alpha = problem.h, problem.alpha
    r0 = rot.rho_h(h, alpha)
    target = problem.inner.resample(n_theta)
    if r0 > target.g.min() + 1e-12:
        raise DomainError(f"base circle radius {r0} must lie inside the inner curve")
    if not override:
        rep = check_r_admissible(problem.inner, h, config, alpha=alpha)
        if not rep.verdict:
            raise DomainError(f"inner curve is not admissible: {'; '.join(rep.reasons)}")
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    b0, b1 = problem.boundary(theta)

    sigma = 1.0
    grid = AnnulusGrid(family_curve(target, r0, 1.0), problem.outer_radius, n_s, n_theta, config.grid_map)
    table = rot.height_table(h, alpha, float(problem.outer_radius))
    guess = table(grid.rho[1:-1])
    stage = _solve_stage(grid, b0, b1, h, guess, config)
    path = [(1.0, stage.iterations)]
    warnings = []
    step = config.sigma_step
    while sigma > 0.0:
        nxt = max(sigma - step, 0.0)
        cand = AnnulusGrid(family_curve(target, r0, nxt), problem.outer_radius, n_s, n_theta, config.grid_map)
        try:
            trial = _solve_stage(cand, b0, b1, h, stage.u, config)
        except ConvergenceError:
            step *= 0.5
            if step < config.sigma_step_min:
                raise ContinuationError(f"continuation stalled below sigma = {sigma}", last_sigma=sigma)
            continue
        sigma, grid, stage = nxt, cand, trial
        path.append((sigma, stage.iterations))
        if check_family and sigma > 0.0:
            rep = check_r_admissible(grid.inner, h, config, alpha=alpha)
            if not (rep.verdict and horosphere_convex(grid.inner)[0]):
                warnings.append(f"intermediate curve at sigma = {sigma} fails admissibility or convexity")
        step = min(1.5 * step, config.sigma_step_max)

    u = _full_field(stage.u, b0, b1)
    grad = gradient_field(grid, u)
    normals = boundary_normal_derivatives(grid, u)
    slope = max(float(np.abs(normals["inner"]).max()), float(np.abs(normals["outer"]).max()), rot.asymptotic_slope(h))
    provenance = {
        "sigma_path": path,
        "newton_step_norms": stage.step_norms,
        "newton_residuals": stage.residual_norms,
        "quadratic_constant": stage.quadratic_constant,
        "warnings": warnings,
    }
    return GraphSolution(grid, u, stage.residual_norm, grad, float(grad[1:-1].max()),
                         config.grad_ceiling_factor * slope, normals, provenance)
