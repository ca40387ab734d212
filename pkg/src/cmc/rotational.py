"""Rotational constant mean curvature graphs ``H_alpha^h`` over the hyperbolic plane.

For ``0 < h < 1/2`` and ``alpha > 0`` the profile is

    u(rho) = (-alpha + 2h cosh rho) / sqrt(sinh^2 rho - (-alpha + 2h cosh rho)^2)
    H(rho) = integral of u from rho0 to rho,   cosh(rho0) = phi,

defined outside the base circle of radius ``rho0``.  Writing ``s = cosh r`` the
denominator factors as ``sqrt(q (s - phi)(s - b))`` with ``q = 1 - 4h^2`` and
``b < 0``, so after ``z = s - phi`` the only singularity is ``1/sqrt(z)`` at the
lower endpoint.  The further substitution ``z = w^2`` removes it; that is the
form handed to adaptive quadrature.  Far from the base circle the integral is
continued in ``rho`` itself, where the integrand is smooth and tends to the
slope ``c_h = 2h / sqrt(q)``.

Large-``rho`` behaviour: ``H(rho) = k + c_h rho + C exp(-rho) + ...`` with
``C = 2 alpha / q^(3/2)``.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .errors import ConvergenceError, DomainError, SingularPointError

DEFAULT_TOL = 1e-10
# tolerance used internally where tiny exponential tails must be resolved
FINE_TOL = 1e-13
# beyond rho0 + SPLIT the rho-variable integrand is smooth
SPLIT = 2.0
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _check_h(h):
    if not 0.0 < h < 0.5:
        raise DomainError(f"mean curvature h must lie in (0, 1/2), got {h}")


def asymptotic_slope(h: float) -> float:
    """Return ``c_h = 2h / sqrt(1 - 4h^2)``."""
    _check_h(h)
    return 2.0 * h / math.sqrt(1.0 - 4.0 * h * h)


@dataclass(frozen=True)
class RotationalProfile:
    """One member ``H_alpha^h`` of the rotational family.

    ``phi_minus_one`` is ``phi - 1`` computed without cancellation, which keeps
    ``rho0`` accurate when ``alpha`` is close to ``2h``.
    """

    h: float
    alpha: float
    phi: float
    b: float
    rho0: float
    phi_minus_one: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def q(self) -> float:
        return 1.0 - 4.0 * self.h * self.h

    @property
    def slope(self) -> float:
        return asymptotic_slope(self.h)

    @property
    def numerator_at_base(self) -> float:
        """``-alpha + 2h phi``, the sign of ``u`` next to the base circle."""
        return (2.0 * self.h - self.alpha) + 2.0 * self.h * self.phi_minus_one

    @property
    def k_asym(self) -> float:
        """Asymptotic constant ``k``; computed once, identical on recomputation."""
        if "k" not in self._cache:
            self._cache["k"] = _k_cached(self.h, self.alpha)
        return self._cache["k"]


def make_profile(h: float, alpha: float) -> RotationalProfile:
    _check_h(h)
    if not alpha > 0.0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    q = 1.0 - 4.0 * h * h
    root = math.sqrt(q + alpha * alpha)
    # phi - 1 = q (alpha - 2h)^2 / (q (root + q + 2 alpha h)), exact rearrangement
    em1 = (alpha - 2.0 * h) ** 2 / (root + q + 2.0 * alpha * h)
    phi = 1.0 + em1
    b = -(2.0 * h * alpha + root) / q
    rho0 = 2.0 * math.asinh(math.sqrt(em1 / 2.0))
    return RotationalProfile(h, alpha, phi, b, rho0, em1)


def rho_h(h: float, alpha: float) -> float:
    """Base-circle radius ``arccosh(phi^h(alpha))``."""
    return make_profile(h, alpha).rho0


def _cosh_gap(rho, rho0):
    """``cosh(rho) - cosh(rho0)`` without cancellation."""
    return 2.0 * np.sinh(0.5 * (rho + rho0)) * np.sinh(0.5 * (rho - rho0))


def u_alpha(p: RotationalProfile, rho):
    """Slope ``dH/drho`` of the profile; requires ``rho > rho0``."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < p.rho0):
        raise DomainError(f"rho must exceed the base radius {p.rho0}")
    if np.any(rho == p.rho0) and p.alpha != 2.0 * p.h:
        raise SingularPointError("u_alpha is singular on the base circle")
    far = rho > 20.0
    c = np.cosh(np.where(far, 0.0, rho))
    num = -p.alpha + 2.0 * p.h * c
    den = np.sqrt(p.q * _cosh_gap(np.where(far, 1.0 + p.rho0, rho), p.rho0) * (c - p.b))
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        out = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 0.0)
        # the cosh form overflows for large rho; switch to powers of sech
        out = np.where(far, p.slope + _slope_excess(p, np.where(far, rho, 21.0)), out)
    return float(out) if out.ndim == 0 else out


def _slope_excess(p: RotationalProfile, r):
    """``u(r) - c_h`` written in powers of ``sech r``; safe for very large ``r``."""
    ic = np.exp(-np.abs(r)) * 2.0 / (1.0 + np.exp(-2.0 * np.abs(r)))
    u = (2.0 * p.h - p.alpha * ic) / np.sqrt(p.q * (1.0 - p.phi * ic) * (1.0 - p.b * ic))
    return u - p.slope


def _w_integrand(p: RotationalProfile, w):
    z = w * w
    if p.phi_minus_one == 0.0:
        # alpha = 2h: the numerator is 2h z, so cancel one factor of w
        return 4.0 * p.h * w / np.sqrt(p.q * (z + p.phi - p.b) * (z + 2.0))
    num = p.numerator_at_base + 2.0 * p.h * z
    den = np.sqrt(p.q * (z + p.phi - p.b) * (z + p.phi_minus_one) * (z + p.phi + 1.0))
    return 2.0 * num / den


def _w_limit(p: RotationalProfile, rho):
    return math.sqrt(max(_cosh_gap(rho, p.rho0), 0.0))


def _breakpoints(p: RotationalProfile, upper):
    """Points resolving the ``sqrt(phi - 1)`` scale of a nearly singular integrand."""
    if p.phi_minus_one <= 0.0:
        return None
    scale = math.sqrt(p.phi_minus_one)
    pts = [scale * f for f in (0.5, 1.0, 4.0, 16.0) if scale * f < upper]
    return pts or None


def _quad(f, a, b, tol, points=None):
    with warnings.catch_warnings():
        # tolerances near machine precision trigger roundoff notices on large
        # integrals; the oracle tests and the asymptotic ratio check cover accuracy
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, _ = integrate.quad(f, a, b, epsabs=0.1 * tol, epsrel=1e-13, limit=400, points=points)
    return value


def height(p: RotationalProfile, rho: float, tol: float = DEFAULT_TOL) -> float:
    """``H_alpha^h(rho)`` by desingularized adaptive quadrature."""
    if rho < p.rho0:
        raise DomainError(f"rho = {rho} lies inside the base circle (radius {p.rho0})")
    if rho == p.rho0:
        return 0.0
    split = min(rho, p.rho0 + SPLIT)
    upper = _w_limit(p, split)
    value = _quad(lambda w: _w_integrand(p, w), 0.0, upper, tol, _breakpoints(p, upper))
    if rho > split:
        value += _quad(lambda r: _slope_excess(p, r), split, rho, tol) + p.slope * (rho - split)
    return value


def height_inverse(p: RotationalProfile, t: float, tol: float = DEFAULT_TOL) -> float:
    """Radius ``rho`` on the increasing branch with ``height(rho) = t``.

    For ``alpha <= 2h`` the branch is ``(rho0, inf)``; otherwise it starts at the
    circle of minima ``arccosh(alpha / 2h)``.
    """
    lo = p.rho0 if p.alpha <= 2.0 * p.h else min_circle_radius(p)
    t_lo = height(p, lo, FINE_TOL)
    if t < t_lo - tol:
        raise DomainError(f"height {t} is below the range {t_lo} of the increasing branch")
    if t <= t_lo:
        return lo
    hi = max(lo + 1.0, (t - p.k_asym) / p.slope + 1.0)
    while height(p, hi, FINE_TOL) < t:
        hi = lo + 2.0 * (hi - lo)
    split = p.rho0 + SPLIT
    if lo == p.rho0 and t <= height(p, split, FINE_TOL):
        # solve in w = sqrt(cosh rho - cosh rho0), where the height is smooth at w = 0
        def f(w):
            return _quad(lambda x: _w_integrand(p, x), 0.0, w, FINE_TOL, _breakpoints(p, w)) - t

        w = optimize.brentq(f, 0.0, _w_limit(p, split), xtol=1e-15, rtol=1e-15)
        # sinh^2(rho / 2) = sinh^2(rho0 / 2) + w^2 / 2
        return max(2.0 * math.asinh(math.sqrt(math.sinh(0.5 * p.rho0) ** 2 + 0.5 * w * w)), p.rho0)
    return optimize.brentq(lambda r: height(p, r, FINE_TOL) - t, lo, hi, xtol=1e-13, rtol=1e-15)


@dataclass(frozen=True)
class AsymptoticData:
    """Fitted large-``rho`` behaviour ``H = k + slope * rho + O(exp(-rho))``."""

    k_asym: float
    slope: float
    decay_bound: float
    rho: tuple = ()
    residuals: tuple = ()
    ratios: tuple = ()


def asymptotic_constant(p: RotationalProfile, start: float = 12.0, count: int = 5,
                        tol: float = FINE_TOL) -> AsymptoticData:
    """Extract ``k`` from ``H(rho) - c_h rho`` at ``rho = start, start + 1, ...``.

    Successive differences must shrink by ``e^-1`` (within 20 %); the tail is then
    summed as a geometric series.  ``decay_bound`` is the least-squares ``C`` in
    ``residual ~ C exp(-rho)``.
    """
    if count < 3:
        raise DomainError("need at least three extraction radii")
    rhos = start + np.arange(count, dtype=float)
    offsets = np.array([height(p, r, tol) - p.slope * r for r in rhos])
    diffs = np.diff(offsets)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = diffs[1:] / diffs[:-1]
    target = math.exp(-1.0)
    if not np.all(np.abs(ratios / target - 1.0) < 0.2):
        raise ConvergenceError(
            f"H - c_h rho does not decay like exp(-rho) on [{rhos[0]}, {rhos[-1]}]: ratios {ratios}")
    k = offsets[-1] + diffs[-1] * target / (1.0 - target)
    residuals = offsets - k
    basis = np.exp(-rhos)
    decay = float(max(np.dot(residuals, basis) / np.dot(basis, basis), 0.0))
    return AsymptoticData(float(k), p.slope, decay, tuple(rhos), tuple(residuals), tuple(ratios))


@functools.lru_cache(maxsize=4096)
def _k_cached(h: float, alpha: float) -> float:
    return asymptotic_constant(make_profile(h, alpha)).k_asym


def k_asym(h: float, alpha: float) -> float:
    """Cached asymptotic constant ``k_alpha^h``."""
    return _k_cached(float(h), float(alpha))


def _alpha_derivatives(h, alpha):
    q = 1.0 - 4.0 * h * h
    root = math.sqrt(q + alpha * alpha)
    return (-2.0 * h + alpha / root) / q, (-2.0 * h - alpha / root) / q


def dalpha_integrand(p: RotationalProfile, z):
    """``d/dalpha`` of the ``z``-integrand, i.e. ``(psi1 + psi2 + psi3) / sqrt(z)`` over ``sqrt(q)``."""
    dphi, db = _alpha_derivatives(p.h, p.alpha)
    lb = z + p.phi - p.b
    l2m1 = (z + p.phi_minus_one) * (z + p.phi + 1.0)
    num = p.numerator_at_base + 2.0 * p.h * z
    psi1 = (-1.0 + 2.0 * p.h * dphi) / np.sqrt(lb * l2m1)
    psi2 = -(dphi - db) * num / (2.0 * lb ** 1.5 * np.sqrt(l2m1))
    psi3 = -dphi * (z + p.phi) * num / (np.sqrt(lb) * l2m1 ** 1.5)
    return (psi1 + psi2 + psi3) / np.sqrt(p.q * z)


def dheight_dalpha(h: float, alpha: float, rho: float, tol: float = FINE_TOL) -> float:
    """Partial derivative of ``H_alpha^h(rho)`` with respect to ``alpha``.

    Differentiates under the integral in the ``z`` variable, whose lower limit
    does not move with ``alpha``, and adds the moving-upper-limit term
    ``u~(z_max) * dz_max/dalpha``.  At ``alpha = 2h`` the integrand behaves like
    ``-1/z`` and the result is ``-inf``.
    """
    _check_h(h)
    if alpha == 2.0 * h:
        return -math.inf
    p = make_profile(h, alpha)
    if rho <= p.rho0:
        raise DomainError("rho must exceed the base radius")
    dphi, _ = _alpha_derivatives(h, alpha)
    zmax = float(_cosh_gap(rho, p.rho0))
    upper = math.sqrt(zmax)

    def f(w):
        # dz = 2 w dw cancels the 1/sqrt(z)
        return 2.0 * w * dalpha_integrand(p, w * w)

    integral = _quad(f, 0.0, upper, tol, _breakpoints(p, upper))
    lz = zmax + p.phi
    u_end = (p.numerator_at_base + 2.0 * h * zmax) / math.sqrt(
        p.q * zmax * (lz - p.b) * (zmax + p.phi_minus_one) * (lz + 1.0))
    return integral - u_end * dphi


def alpha_for_radius(h: float, r: float, branch: str = "upper") -> float:
    """Parameter with base radius ``r`` on the lower ``(0, 2h]`` or upper ``[2h, inf)`` branch."""
    _check_h(h)
    if r < 0.0:
        raise DomainError("radius must be non-negative")
    if r == 0.0:
        return 2.0 * h
    if branch == "lower":
        if r >= math.atanh(2.0 * h):
            raise DomainError(f"radius {r} exceeds the lower-branch range [0, {math.atanh(2 * h)})")
        lo, hi = 1e-300, 2.0 * h
    elif branch == "upper":
        lo, hi = 2.0 * h, 4.0 * h + 1.0
        while rho_h(h, hi) < r:
            hi *= 2.0
    else:
        raise DomainError(f"unknown branch {branch!r}")
    return optimize.brentq(lambda a: rho_h(h, a) - r, lo, hi, xtol=1e-15, rtol=1e-15)


def d_infinity(h: float, alpha: float, beta: float) -> float:
    """Asymptotic horizontal distance ``|k_beta - k_alpha| / c_h``."""
    if alpha == beta:
        return 0.0
    return abs(k_asym(h, beta) - k_asym(h, alpha)) / asymptotic_slope(h)


def vertical_asymptotic_distance(h: float, alpha1: float, alpha2: float) -> float:
    """``lim (H_alpha1 - H_alpha2) = k_alpha1 - k_alpha2``."""
    if alpha1 == alpha2:
        return 0.0
    return k_asym(h, alpha1) - k_asym(h, alpha2)


def min_circle_radius(p: RotationalProfile) -> float:
    """Radius ``arccosh(alpha / 2h)`` of the circle where ``H`` attains its minimum (``alpha > 2h``)."""
    if not p.alpha > 2.0 * p.h:
        raise DomainError("only profiles with alpha > 2h have an interior minimum")
    return math.acosh(p.alpha / (2.0 * p.h))


def d_beta(p: RotationalProfile) -> float:
    return min_circle_radius(p) - p.rho0


@functools.lru_cache(maxsize=64)
def beta_bar(h: float, divisions: int = 64, cap_multiple: float = 4.0) -> float:
    """Largest grid-certified ``beta > 2h`` with ``k`` strictly decreasing on ``(0, beta]``.

    ``k`` is sampled on the grid ``j * 2h / divisions``; consecutive values must
    decrease.  The upward scan stops at the first failure (then bisects inside
    the failing cell) or at ``cap_multiple * 2h``, whichever comes first.
    """
    _check_h(h)
    step = 2.0 * h / divisions
    j_cap = int(round(cap_multiple * divisions))
    values = [k_asym(h, step)]
    for j in range(2, j_cap + 1):
        values.append(k_asym(h, j * step))
        if values[-1] < values[-2]:
            continue
        alpha_ok = (j - 1) * step
        if alpha_ok <= 2.0 * h:
            # the derivative diverges to -inf at 2h, so a point just above is certifiable
            return 2.0 * h * (1.0 + 1e-6)
        lo, hi = alpha_ok, j * step
        delta = step / 64.0
        while hi - lo > delta:
            mid = 0.5 * (lo + hi)
            if k_asym(h, mid + delta) < k_asym(h, mid):
                lo = mid
            else:
                hi = mid
        return lo
    return j_cap * step


class HeightTable:
    """Fast vectorized evaluation of ``H_alpha^h`` on ``[rho0, rho_max]``.

    Values at a fixed set of knots are accumulated panel by panel with
    16-point Gauss-Legendre rules; a query integrates from the nearest knot
    below.  Knots are graded near the base circle so the ``sqrt(phi - 1)``
    scale is resolved.  Intended for evaluating barriers on whole grids.
    """

    def __init__(self, profile: RotationalProfile, rho_max: float, panels: int = 400):
        if rho_max <= profile.rho0:
            raise DomainError("rho_max must exceed the base radius")
        self.profile = profile
        self.rho_max = float(rho_max)
        p = profile
        self.split = min(self.rho_max, p.rho0 + SPLIT)
        w_split = _w_limit(p, self.split)
        graded = w_split * np.linspace(0.0, 1.0, panels // 2 + 1) ** 2
        if p.phi_minus_one > 0.0:
            scale = math.sqrt(p.phi_minus_one)
            geo = scale * np.geomspace(1e-3, 64.0, 60)
            graded = np.union1d(graded, geo[geo < w_split])
        self.w_knots = np.union1d(graded, [w_split])
        self.w_values = np.concatenate([[0.0], np.cumsum(self._panel(self._wf, self.w_knots[:-1], self.w_knots[1:]))])
        n_tail = max(int(math.ceil((self.rho_max - self.split) / 0.125)), 1)
        self.r_knots = np.linspace(self.split, max(self.rho_max, self.split + 1e-12), n_tail + 1)
        tail = self._panel(self._rf, self.r_knots[:-1], self.r_knots[1:])
        self.r_values = self.w_values[-1] + np.concatenate([[0.0], np.cumsum(tail)])

    def _wf(self, w):
        return _w_integrand(self.profile, w)

    def _rf(self, r):
        return u_alpha(self.profile, r)

    @staticmethod
    def _panel(f, a, b):
        a = np.asarray(a, dtype=float)[..., None]
        b = np.asarray(b, dtype=float)[..., None]
        x = 0.5 * (a + b) + 0.5 * (b - a) * _GL_NODES
        return (0.5 * (b - a) * f(x) @ _GL_WEIGHTS[:, None])[..., 0]

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        p = self.profile
        if np.any(rho < p.rho0 - 1e-14) or np.any(rho > self.rho_max + 1e-9):
            raise DomainError(f"table covers [{p.rho0}, {self.rho_max}]")
        rho = np.clip(rho, p.rho0, None)
        out = np.empty(rho.shape)
        inner = rho <= self.split
        if np.any(inner):
            w = np.sqrt(np.maximum(_cosh_gap(rho[inner], p.rho0), 0.0))
            i = np.clip(np.searchsorted(self.w_knots, w, side="right") - 1, 0, self.w_knots.size - 2)
            out[inner] = self.w_values[i] + self._panel(self._wf, self.w_knots[i], w)
        if np.any(~inner):
            r = rho[~inner]
            i = np.clip(np.searchsorted(self.r_knots, r, side="right") - 1, 0, self.r_knots.size - 2)
            out[~inner] = self.r_values[i] + self._panel(self._rf, self.r_knots[i], r)
        return float(out) if out.ndim == 0 else out


@functools.lru_cache(maxsize=128)
def height_table(h: float, alpha: float, rho_max: float) -> HeightTable:
    return HeightTable(make_profile(h, alpha), rho_max)
