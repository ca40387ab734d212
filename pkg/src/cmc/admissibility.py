"""r-admissibility of inner boundary curves and the translated-barrier check.

A star-shaped curve ``gamma`` is admissible for mean curvature ``h`` when it
has an interior sphere of radius ``r`` and lies in the annulus
``r <= |z| <= r + xi`` with ``xi = min(d_beta / 2, d_inf(alpha, beta))``,
where ``rho^h(beta) = r`` on the upper branch and ``alpha < 2h`` has its base
circle inside ``gamma``.  Translates of ``H_beta`` tangent to ``gamma`` from
inside then sit below ``H_alpha`` and below zero on ``gamma``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from . import rotational as rot
from .config import RunConfig
from .curve import DiscreteCurve
from .errors import CertificationError, DomainError
from .hyperbolic import complex_to_polar, distance_array, exp_map
from .parallel import ordered_map

SPHERE_TOL = 1e-7


def _min_distance_to(points, centers, chunk=256):
    out = np.empty(centers.size)
    for i in range(0, centers.size, chunk):
        c = centers[i:i + chunk, None]
        out[i:i + chunk] = distance_array(c, points[None, :]).min(axis=1)
    return out


def sphere_margins(curve: DiscreteCurve, r: float, oversample: int = 16):
    """``min_j d(c_i, p_j) - r`` for tangent disks of radius ``r`` at the dense nodes ``p_i``."""
    dense = curve.resample(curve.n * oversample)
    pts = dense.model_points()
    centers = exp_map(pts, -dense.outward_normals(), r)
    return _min_distance_to(pts, centers) - r


def inward_widths(curve: DiscreteCurve, samples: int = 400) -> np.ndarray:
    """Length of the inward normal geodesic from each node until it leaves the curve's interior."""
    pts = curve.model_points()
    normals = -curve.outward_normals()
    t = np.linspace(0.0, 2.0 * float(curve.g.max()) + 1.0, samples)[1:]
    z = exp_map(pts[:, None], normals[:, None], t[None, :])
    rho, theta = complex_to_polar(z)
    outside = rho > curve.evaluate(theta)
    # skip the first few steps, where rounding can put points marginally outside
    outside[:, :2] = False
    first = np.where(outside.any(axis=1), outside.argmax(axis=1), t.size - 1)
    return t[first]


def interior_sphere_radius(curve: DiscreteCurve, oversample: int = 16) -> float:
    """Largest certified radius of tangent disks fitting inside the curve at every node.

    Candidate ``min(arcoth(max k), min inward width / 2)``; certified by checking
    that each tangent disk (on a ``oversample``-times denser resampling) keeps
    every curve point at distance at least its radius, else reduced by bisection.
    """
    kmax = float(curve.curvature().max())
    cand = 0.5 * float(inward_widths(curve).min())
    if kmax > 1.0:
        cand = min(cand, math.atanh(1.0 / kmax))
    if sphere_margins(curve, cand, oversample).min() >= -SPHERE_TOL:
        return cand
    lo, hi = 0.0, cand
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if sphere_margins(curve, mid, oversample).min() >= -SPHERE_TOL:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * cand:
            break
    if lo <= 0.0:
        raise CertificationError("no positive interior sphere radius could be certified")
    return lo


def horosphere_convex(curve_or_curvature) -> tuple[bool, float]:
    """``(min k > 1, min k)`` for a curve or an array of nodal curvatures."""
    if isinstance(curve_or_curvature, DiscreteCurve):
        k = curve_or_curvature.curvature()
    else:
        k = np.asarray(curve_or_curvature, dtype=float)
    kmin = float(k.min())
    return bool(kmin > 1.0), kmin


@dataclass(frozen=True)
class Parameters:
    alpha: float
    beta: float
    r: float
    r_effective: float
    r_reduced: bool
    beta_bar: float


def _beta_bar(h, config: RunConfig):
    return rot.beta_bar(h, config.beta_divisions, config.beta_cap_multiple)


def choose_parameters(curve: DiscreteCurve, h: float, config: RunConfig = RunConfig(),
                      alpha: float | None = None, r: float | None = None) -> Parameters:
    """Pick ``(alpha, beta, r_effective)`` for ``curve``.

    ``beta`` solves ``rho^h(beta) = r`` on the upper branch; if it exceeds the
    certified ``beta_bar`` the radius is reduced to ``rho^h(beta_bar)``.  By
    default ``alpha`` puts the base circle at ``alpha_fraction * min g``.
    """
    if r is None:
        r = interior_sphere_radius(curve, config.sphere_oversample)
    bb = _beta_bar(h, config)
    beta = rot.alpha_for_radius(h, r, "upper")
    r_eff, reduced = r, False
    if beta > bb:
        beta, r_eff, reduced = bb, rot.rho_h(h, bb), True
    gmin = float(curve.g.min())
    if alpha is None:
        target = config.alpha_fraction * gmin
        if target < math.atanh(2.0 * h):
            alpha = rot.alpha_for_radius(h, target, "lower")
        else:
            alpha = 2.0 * h * (1.0 - 1e-3)
    if not 0.0 < alpha < 2.0 * h:
        raise DomainError(f"alpha must lie in (0, 2h), got {alpha}")
    if not rot.rho_h(h, alpha) <= gmin + 1e-12:
        raise CertificationError(
            f"base circle of alpha = {alpha} (radius {rot.rho_h(h, alpha)}) is not inside the curve (min g = {gmin})")
    return Parameters(float(alpha), float(beta), float(r), float(r_eff), reduced, float(bb))


def xi(h: float, alpha: float, beta: float) -> float:
    """``min(d_beta / 2, d_inf(alpha, beta))``."""
    if not 0.0 < alpha < 2.0 * h < beta:
        raise DomainError("need 0 < alpha < 2h < beta")
    return min(0.5 * rot.d_beta(rot.make_profile(h, beta)), rot.d_infinity(h, alpha, beta))


@dataclass(frozen=True)
class AdmissibilityReport:
    h: float
    r: float
    r_reduced: bool
    r_effective: float
    alpha: float
    beta: float
    beta_bar: float
    xi: float
    annulus: tuple
    horosphere_convex: bool
    min_curvature: float
    interior_sphere: bool
    contained: bool
    verdict: bool
    margins: dict = field(default_factory=dict)
    reasons: tuple = ()

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["annulus"] = list(self.annulus)
        d["reasons"] = list(self.reasons)
        return d


def check_r_admissible(curve: DiscreteCurve, h: float, config: RunConfig = RunConfig(),
                       alpha: float | None = None, r: float | None = None,
                       xi_override: float | None = None) -> AdmissibilityReport:
    """Full admissibility verdict; failures are reported, not raised.

    ``r`` and ``xi_override`` bypass the computed interior radius and the
    ``min`` defining ``xi``; they exist to build negative examples.
    """
    convex, kmin = horosphere_convex(curve)
    reasons = []
    try:
        params = choose_parameters(curve, h, config, alpha, r)
    except (CertificationError, DomainError) as exc:
        return AdmissibilityReport(h, math.nan, False, math.nan, math.nan, math.nan, math.nan, math.nan,
                                   (math.nan, math.nan), convex, kmin, False, False, False, {}, (str(exc),))
    x = xi(h, params.alpha, params.beta) if xi_override is None else float(xi_override)
    tol = config.containment_tol
    lo, hi = params.r_effective, params.r_effective + x
    inner = float(curve.g.min()) - lo
    outer = hi - float(curve.g.max())
    contained = inner >= -tol and outer >= -tol
    if not contained:
        reasons.append(f"curve leaves the annulus [{lo}, {hi}] (inner margin {inner}, outer margin {outer})")
    sphere = float(sphere_margins(curve, params.r_effective, config.sphere_oversample).min())
    sphere_ok = sphere >= -SPHERE_TOL
    if not sphere_ok:
        reasons.append(f"interior sphere of radius {params.r_effective} does not fit (margin {sphere})")
    if params.r_reduced:
        reasons.append(f"r reduced from {params.r} so that beta <= beta_bar = {params.beta_bar}")
    margins = {
        "inner": inner,
        "outer": outer,
        "interior_sphere": sphere,
        "base_circle": float(curve.g.min()) - rot.rho_h(h, params.alpha),
        "beta_bar": params.beta_bar - params.beta,
        "horosphere": kmin - 1.0,
    }
    return AdmissibilityReport(h, params.r, params.r_reduced, params.r_effective, params.alpha, params.beta,
                               params.beta_bar, x, (lo, hi), convex, kmin, sphere_ok, contained,
                               bool(contained and sphere_ok), margins, tuple(reasons))


@dataclass(frozen=True)
class BarrierReport:
    z_index: int
    center: tuple
    translation: float
    below_alpha_margin: float
    asymptotic_margin: float
    below_zero_margin: float
    below_alpha: bool
    below_zero: bool

    @property
    def passed(self) -> bool:
        return self.below_alpha and self.below_zero


def barrier_center(curve: DiscreteCurve, z_index: int, radius: float) -> complex:
    """Centre of the disk of radius ``radius`` tangent to ``curve`` from inside at node ``z_index``."""
    p = curve.model_points()[z_index]
    n_in = -curve.outward_normals()[z_index]
    return complex(exp_map(p, n_in, radius))


def verify_barrier_tangency(curve: DiscreteCurve, h: float, report: AdmissibilityReport, z_index: int,
                            config: RunConfig = RunConfig(), n_rho: int = 120) -> BarrierReport:
    """Check that the translate of ``H_beta`` tangent at node ``z_index`` is a lower barrier.

    (1) it stays below ``H_alpha`` outside ``gamma`` on ``rho <= barrier_rho_max``
    and asymptotically (``k_alpha - k_beta > c_h |c_z|``); (2) every node of
    ``gamma`` is within ``arccosh(beta / 2h)`` of the translated centre ``c_z``,
    so the translate is non-positive on ``gamma``.
    """
    if not report.verdict:
        raise CertificationError("barrier construction needs an admissible curve")
    z_index = int(z_index) % curve.n
    r_eff = report.r_effective
    k = float(curve.curvature()[z_index])
    if k > 1.0 / math.tanh(r_eff) + 1e-6:
        raise CertificationError(f"osculating disk at node {z_index} is smaller than r = {r_eff}")
    c = barrier_center(curve, z_index, r_eff)
    dist_c = 2.0 * math.atanh(abs(c))
    rho_max = config.barrier_rho_max
    beta_table = rot.height_table(h, report.beta, rho_max + dist_c + 1.0)
    alpha_table = rot.height_table(h, report.alpha, rho_max)
    p_beta = beta_table.profile

    theta = curve.theta
    s = np.linspace(0.0, 1.0, n_rho)[:, None]
    g = curve.g[None, :]
    rho = g + (rho_max - g) * s ** 2
    pts = np.tanh(rho / 2.0) * np.exp(1j * theta)[None, :]
    d = np.maximum(distance_array(pts, c), p_beta.rho0)
    gap = alpha_table(rho) - beta_table(d)
    slope = rot.asymptotic_slope(h)
    asym = (rot.k_asym(h, report.alpha) - rot.k_asym(h, report.beta)) - slope * dist_c

    reach = math.acosh(report.beta / (2.0 * h))
    below_zero = reach - float(distance_array(curve.model_points(), c).max())
    tol = config.containment_tol
    return BarrierReport(z_index, (c.real, c.imag), dist_c, float(gap.min()), asym, below_zero,
                         bool(gap.min() > 0.0 and asym > 0.0), bool(below_zero >= -tol))


def verify_all_nodes(curve: DiscreteCurve, h: float, report: AdmissibilityReport,
                     config: RunConfig = RunConfig()) -> list[BarrierReport]:
    return ordered_map(lambda i: verify_barrier_tangency(curve, h, report, i, config), range(curve.n))
