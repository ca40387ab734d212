"""Exterior ends as limits of annulus solutions with growing outer radius."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .. import rotational as rot
from ..admissibility import check_r_admissible
from ..config import RunConfig
from ..curve import DiscreteCurve
from ..errors import DomainError
from ..parallel import ordered_map
from .dirichlet import AnnulusProblem, GraphSolution, solve_dirichlet

COMMON_MARGIN = 0.5


@dataclass(frozen=True)
class EndReport:
    h: float
    alpha: float
    beta: float
    schedule: tuple
    residuals: tuple
    max_u: tuple
    common_radius: float
    sup_differences: tuple
    cauchy: bool
    slope_window: tuple
    slope: float
    slope_relative_error: float
    epsilon: float
    cone_table: tuple
    cone_spread: float
    cone_condition: bool
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def ray_values(solution: GraphSolution, rho_targets):
    """Interpolate ``u`` along each ray ``theta_j`` to radii ``rho_targets[:, j]``.

    Splines are built in the chart variable ``s``, in which the solution is smooth.
    """
    grid = solution.grid
    g = grid.inner.g
    L = grid.outer_radius - g
    frac = np.clip((np.asarray(rho_targets) - g) / L, 0.0, 1.0)
    s_t = np.sqrt(frac) if grid.grid_map == "quadratic" else frac
    out = np.empty(np.shape(rho_targets))
    for j in range(grid.n_theta):
        out[:, j] = CubicSpline(grid.s, solution.u[:, j])(s_t[:, j])
    return out


def cone_sequence(h: float, alpha: float, beta: float, schedule, epsilon: float):
    """``c_n = (H_alpha(rho_n) - H_beta(rho_n - eps)) / eps`` and ``k_n = H_alpha(rho_n) - c_n rho_n``."""
    pa, pb = rot.make_profile(h, alpha), rot.make_profile(h, beta)
    rows = []
    for rho_n in schedule:
        t_n = rot.height(pa, rho_n)
        t_e = rot.height(pb, rho_n - epsilon)
        c = (t_n - t_e) / epsilon
        ratio = c / np.sqrt(1.0 + c * c)
        rows.append({"rho_n": float(rho_n), "t_n": t_n, "t_eps": t_e, "c": c, "k": t_n - c * rho_n,
                     "cone_mean_curvature_limit": float(ratio), "satisfies_2h": bool(ratio >= 2.0 * h)})
    return rows


def solve_end(curve: DiscreteCurve, h: float, schedule, tol: float | None = None, config: RunConfig = RunConfig(),
              n_s: int | None = None, n_theta: int | None = None, slope_window=(8.0, 10.0),
              epsilon_fraction: float = 0.5, alpha: float | None = None) -> EndReport:
    """Solve the truncated problems for each outer radius in ``schedule`` and measure convergence.

    The sup-differences of consecutive solutions are taken on the common
    sub-annulus ``rho <= schedule[0] - 0.5``.  The cone width ``eps`` is
    ``epsilon_fraction * min(d_inf, schedule[0] - r)``.
    """
    schedule = tuple(float(r) for r in schedule)
    if len(schedule) < 2 or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise DomainError("schedule must be strictly increasing with at least two radii")
    common = schedule[0] - COMMON_MARGIN
    if not common > float(curve.g.max()):
        raise DomainError("first schedule radius too small for the inner curve")
    report = check_r_admissible(curve, h, config, alpha=alpha)
    if not report.verdict:
        raise DomainError(f"inner curve is not admissible: {report.reasons}")
    config = config.replace(n_s=n_s, n_theta=n_theta, newton_tol=tol)

    def run(rho_n):
        return solve_dirichlet(AnnulusProblem(h, curve, rho_n, report.alpha, report.beta), config=config,
                              override=True)

    sols = ordered_map(run, schedule)
    g = sols[0].grid.inner.g
    t = np.linspace(0.0, 1.0, 2 * config.n_s + 1)[:, None]
    targets = g + (common - g) * t ** 2
    vals = [ray_values(s, targets) for s in sols]
    diffs = tuple(float(np.abs(b - a).max()) for a, b in zip(vals, vals[1:]))
    cauchy = all(b < a for a, b in zip(diffs, diffs[1:]))

    last = sols[-1]
    lo, hi = slope_window
    slope = float("nan")
    if last.grid.outer_radius >= hi:
        r = np.linspace(lo, hi, 21)[:, None] * np.ones((1, last.grid.n_theta))
        u = ray_values(last, r)
        slope = float(np.mean(np.polyfit(r[:, 0], u, 1)[0]))
    c_h = rot.asymptotic_slope(h)

    d_inf = rot.d_infinity(h, report.alpha, report.beta)
    eps = epsilon_fraction * min(d_inf, schedule[0] - report.r_effective)
    table = cone_sequence(h, report.alpha, report.beta, schedule, eps)
    cs = np.array([row["c"] for row in table])
    spread = float((cs.max() - cs.min()) / cs.mean())
    return EndReport(
        h, report.alpha, report.beta, schedule,
        tuple(s.residual_norm for s in sols),
        tuple(float(s.u.max()) for s in sols),
        common, diffs, bool(cauchy), tuple(slope_window), slope, abs(slope - c_h) / c_h,
        eps, tuple(table), spread, all(row["satisfies_2h"] for row in table),
        {"d_infinity": d_inf, "c_h": c_h, "r_effective": report.r_effective,
         "sigma_paths": [s.provenance["sigma_path"] for s in sols]},
    )
