"""Numerical verification of the comparison barriers behind the a-priori estimates.

(a) sandwich      ``H_beta - eps <= u <= H_alpha + eps``
(b) inner upper   ``w+ = psi(d)``, ``psi(x) = A (e^e - x - e^(e - x))``, ``d`` the distance to the inner curve
(c) inner lower   translates of ``H_beta`` tangent to the inner curve from inside
(d) outer         slice ``u <= H_alpha(rho2)`` and a cone through ``(rho0, H_beta(rho0))``, ``(rho2, H_alpha(rho2))``
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .. import rotational as rot
from ..admissibility import AdmissibilityReport, barrier_center, verify_barrier_tangency
from ..config import RunConfig
from ..curve import DiscreteCurve
from ..flow import offset_curve
from ..hyperbolic import distance_array
from ..parallel import ordered_map
from .dirichlet import AnnulusProblem, GraphSolution, boundary_normal_derivatives
from .grid import AnnulusGrid, discrete_Q


@dataclass(frozen=True)
class BarrierCheck:
    name: str
    passed: bool
    margin: float
    parameters: dict = field(default_factory=dict)
    reason: str = ""

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class BarrierSuite:
    sandwich: BarrierCheck
    inner_upper: BarrierCheck
    inner_lower: BarrierCheck
    outer: BarrierCheck

    @property
    def checks(self):
        return (self.sandwich, self.inner_upper, self.inner_lower, self.outer)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        d = {c.name: c.to_dict() for c in self.checks}
        d["passed"] = self.passed
        return d


def _tables(problem: AnnulusProblem, beta: float, extra: float = 0.0):
    rho2 = float(problem.outer_radius)
    return (rot.height_table(problem.h, problem.alpha, rho2),
            rot.height_table(problem.h, beta, rho2 + extra))


def sandwich_check(problem, solution: GraphSolution, beta: float, slack: float) -> BarrierCheck:
    t_alpha, t_beta = _tables(problem, beta)
    rho = solution.grid.rho
    upper = float((t_alpha(rho) + slack - solution.u).min())
    lower = float((solution.u - t_beta(np.maximum(rho, t_beta.profile.rho0)) + slack).min())
    return BarrierCheck("sandwich", upper >= 0.0 and lower >= 0.0, min(upper, lower),
                        {"upper_margin": upper, "lower_margin": lower, "slack": slack})


# -- (b) ---------------------------------------------------------------------
def psi(x, eps, A):
    return A * (math.exp(eps) - x - np.exp(eps - x))


def psi_parameters(eps: float, M: float):
    """``A = M / (e^eps - eps - 1)`` so that ``psi(0) = 0`` and ``psi(eps) = M``."""
    return M / (math.expm1(eps) - eps)


def supersolution_margin(c: float, eps: float, A: float, n_x: int = 201) -> float:
    """``max_x [c psi' (1 + psi'^2) + psi'']`` over ``x in [0, eps]``; negative means ``w+`` is a supersolution."""
    x = np.linspace(0.0, eps, n_x)
    d1 = A * np.expm1(eps - x)
    d2 = -A * np.exp(eps - x)
    return float((c * d1 * (1.0 + d1 * d1) + d2).max())


def level_set_max(problem: AnnulusProblem, eps: float, table) -> float:
    """``max H_alpha`` on the curve at distance ``eps`` outside the inner curve."""
    level = offset_curve(problem.inner, eps)
    return float(table(np.minimum(level.g, problem.outer_radius)).max())


def distance_to_curve(points, curve, oversample: int = 16):
    dense = curve.resample(curve.n * oversample).model_points()
    out = np.empty(points.size)
    flat = points.ravel()
    for i in range(0, flat.size, 512):
        out[i:i + 512] = distance_array(flat[i:i + 512, None], dense[None, :]).min(axis=1)
    return out.reshape(points.shape)


def inner_upper_check(problem, solution: GraphSolution, slack: float, n_eps: int = 60) -> BarrierCheck:
    t_alpha = rot.height_table(problem.h, problem.alpha, float(problem.outer_radius))
    c = float(problem.inner.curvature().max())
    eps_max = 0.5 * (problem.outer_radius - float(problem.inner.g.max()))
    best = None
    for eps in np.geomspace(1e-3, eps_max, n_eps):
        M = level_set_max(problem, float(eps), t_alpha)
        A = psi_parameters(float(eps), M)
        margin = supersolution_margin(c, float(eps), A)
        if best is None or margin < best[3]:
            best = (float(eps), M, A, margin)
    eps, M, A, margin = best
    grid = solution.grid
    d = distance_to_curve(grid.model_points(), grid.inner)
    near = d <= eps
    w = psi(np.minimum(d, eps), eps, A)
    comparison = float((w + slack - solution.u)[near].min()) if near.any() else math.inf
    bound = A * math.expm1(eps)
    normals = boundary_normal_derivatives(grid, solution.u)["inner"]
    params = {"eps": eps, "A": A, "c": c, "M": M, "supersolution_margin": margin,
              "comparison_margin": comparison, "normal_derivative_bound": bound,
              "max_inner_normal_derivative": float(normals.max()),
              "psi_at_0": float(psi(0.0, eps, A)), "psi_at_eps": float(psi(eps, eps, A))}
    ok_super = margin < 0.0
    reason = "" if ok_super else (
        f"no eps in (0, {eps_max:.3g}] makes c psi'(1 + psi'^2) + psi'' negative (best {margin:.3g} at eps = {eps:.3g})")
    return BarrierCheck("inner_upper", bool(ok_super and comparison >= 0.0), min(-margin, comparison), params, reason)


# -- (c) ---------------------------------------------------------------------
def inner_lower_check(problem, solution: GraphSolution, report: AdmissibilityReport,
                      config: RunConfig) -> BarrierCheck:
    curve = solution.grid.inner
    pts = solution.grid.model_points()
    r_eff = report.r_effective
    extra = 2.0 * (float(curve.g.max()) + 1.0)
    _, t_beta = _tables(problem, report.beta, extra)

    def one(i):
        br = verify_barrier_tangency(curve, problem.h, report, i, config)
        cz = barrier_center(curve, i, r_eff)
        d = np.maximum(distance_array(pts, cz), t_beta.profile.rho0)
        return br, float((solution.u - t_beta(d) + config.slack).min())

    results = ordered_map(one, range(curve.n))
    tangency = min(min(r.below_alpha_margin, r.asymptotic_margin, r.below_zero_margin) for r, _ in results)
    comparison = min(m for _, m in results)
    ok = all(r.passed for r, _ in results) and comparison >= 0.0
    return BarrierCheck("inner_lower", bool(ok), min(tangency, comparison),
                        {"tangency_margin": tangency, "comparison_margin": comparison, "nodes": curve.n})


# -- (d) ---------------------------------------------------------------------
def cone_slope(t_alpha_rho2, t_beta, rho0, rho2):
    return (t_alpha_rho2 - float(t_beta(rho0))) / (rho2 - rho0)


def outer_check(problem, solution: GraphSolution, beta: float, config: RunConfig) -> BarrierCheck:
    h = problem.h
    rho2 = float(problem.outer_radius)
    t_alpha, t_beta = _tables(problem, beta)
    top = float(t_alpha(rho2))
    slice_margin = float((top + config.slack - solution.u).min())
    target = rot.asymptotic_slope(h) * (1.0 + config.cone_margin)
    lo = max(float(solution.grid.inner.g.max()), t_beta.profile.rho0)
    f = lambda r: cone_slope(top, t_beta, r, rho2) - target
    if f(lo) >= 0.0:
        rho0 = lo
    else:
        hi = rho2 - 1e-9
        rho0 = optimize.brentq(f, lo, hi, xtol=1e-12)
        # step just inside the admissible side of the threshold
        while f(rho0) < 0.0:
            rho0 = rho0 + 1e-12 * max(1.0, rho0)
    c = cone_slope(top, t_beta, rho0, rho2)
    k = top - c * rho2
    grid = solution.grid
    rho = grid.rho
    sub = rho >= rho0
    cone_margin = float((solution.u - (c * rho + k) + config.slack)[sub].min())
    # mean curvature of the cone on the sub-annulus
    n_sub = max(8, grid.n_s // 2)
    cone_grid = AnnulusGrid(DiscreteCurve.circle(rho0, grid.n_theta), rho2, n_sub, grid.n_theta, "linear")
    q = discrete_Q(cone_grid, c * cone_grid.rho + k)
    q_margin = float(q.min() - 2.0 * h)
    outer_slope = boundary_normal_derivatives(grid, solution.u)["outer"]
    slope_margin = float(min(outer_slope.min(), c - outer_slope.max()))
    params = {"slice_height": top, "slice_margin": slice_margin, "rho0": rho0, "c": c, "k": k,
              "c_h": rot.asymptotic_slope(h), "cone_margin": cone_margin, "cone_Q_margin": q_margin,
              "outer_slope_min": float(outer_slope.min()), "outer_slope_max": float(outer_slope.max()),
              "slope_margin": slope_margin}
    ok = slice_margin >= 0.0 and cone_margin >= 0.0 and q_margin > 0.0 and slope_margin >= -config.slack
    return BarrierCheck("outer", bool(ok), min(slice_margin, cone_margin, q_margin, slope_margin), params)


def barrier_suite(problem: AnnulusProblem, solution: GraphSolution, report: AdmissibilityReport,
                  config: RunConfig = RunConfig()) -> BarrierSuite:
    """Run all four barrier checks for an accepted solution."""
    beta = report.beta
    return BarrierSuite(
        sandwich_check(problem, solution, beta, config.slack),
        inner_upper_check(problem, solution, config.slack),
        inner_lower_check(problem, solution, report, config),
        outer_check(problem, solution, beta, config),
    )
