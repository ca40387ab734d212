"""Damped Newton iteration with a colored complex-step sparse Jacobian."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from ..errors import ConvergenceError

STEP = 1e-30


def _period_color(n_theta):
    for c in range(3, n_theta + 1):
        if n_theta % c == 0:
            return c
    return n_theta


def colored_jacobian(residual, u_int, n_theta):
    """Exact Jacobian of a residual with a 3x3 periodic-in-``j`` stencil.

    ``residual`` maps an ``(m, n_theta)`` interior field (possibly complex) to
    an array of the same shape.  Columns sharing a color ``(i mod 3, j mod c)``
    never touch the same row, so each color costs one complex evaluation.
    """
    m = u_int.shape[0]
    c = _period_color(n_theta)
    rows, cols, vals = [], [], []
    idx = np.arange(m * n_theta).reshape(m, n_theta)
    for ci in range(3):
        for cj in range(c):
            pert = np.zeros((m, n_theta))
            sel_i = np.arange(ci, m, 3)
            sel_j = np.arange(cj, n_theta, c)
            if sel_i.size == 0:
                continue
            pert[np.ix_(sel_i, sel_j)] = 1.0
            d = np.imag(residual(u_int + 1j * STEP * pert)) / STEP
            for di in (-1, 0, 1):
                ri = sel_i + di
                keep = (ri >= 0) & (ri < m)
                if not keep.any():
                    continue
                for dj in (-1, 0, 1):
                    rj = (sel_j + dj) % n_theta
                    r = idx[np.ix_(ri[keep], rj)].ravel()
                    col = idx[np.ix_(sel_i[keep], sel_j)].ravel()
                    rows.append(r)
                    cols.append(col)
                    vals.append(d[np.ix_(ri[keep], rj)].ravel())
    rows, cols, vals = (np.concatenate(x) for x in (rows, cols, vals))
    n = m * n_theta
    return sparse.csc_matrix((vals, (rows, cols)), shape=(n, n))


@dataclass
class NewtonResult:
    u: np.ndarray
    residual_norm: float
    iterations: int
    step_norms: list = field(default_factory=list)
    residual_norms: list = field(default_factory=list)
    converged: bool = False

    @property
    def quadratic_constant(self) -> float:
        """``max |d_{k+1}| / |d_k|^2`` over the last two Newton steps (``nan`` if unavailable)."""
        s = [x for x in self.step_norms if x > 0.0]
        if len(s) < 2:
            return float("nan")
        return s[-1] / s[-2] ** 2


def damped_newton(residual, u0, n_theta, tol=1e-8, max_iter=30, damping_floor=1.0 / 64.0):
    """Solve ``residual(u) = 0`` in the max norm with backtracking on ``|F|_inf``."""
    u = np.array(u0, dtype=float)
    F = np.real(residual(u))
    norm = float(np.abs(F).max())
    out = NewtonResult(u, norm, 0, [], [norm])
    if not np.isfinite(norm):
        raise ConvergenceError("initial residual is not finite")
    for it in range(1, max_iter + 1):
        if norm <= tol:
            out.converged = True
            break
        J = colored_jacobian(residual, u, n_theta)
        try:
            delta = -splu(J).solve(F.ravel()).reshape(u.shape)
        except RuntimeError as exc:
            raise ConvergenceError(f"singular Jacobian: {exc}") from exc
        lam = 1.0
        while True:
            trial = u + lam * delta
            Ft = np.real(residual(trial))
            nt = float(np.abs(Ft).max())
            if np.isfinite(nt) and nt <= (1.0 - 1e-4 * lam) * norm:
                break
            lam *= 0.5
            if lam < damping_floor:
                raise ConvergenceError(f"line search failed at iteration {it} (residual {norm})")
        u, F, norm = trial, Ft, nt
        out.step_norms.append(float(lam * np.abs(delta).max()))
        out.residual_norms.append(norm)
        out.iterations = it
    out.u, out.residual_norm = u, norm
    out.converged = norm <= tol
    if not out.converged:
        raise ConvergenceError(f"Newton did not converge in {max_iter} iterations (residual {norm})")
    return out
