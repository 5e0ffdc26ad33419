"""Deterministic analysis of the post-selected no-click flow.

The flow theta_dot = (-Omega_L, -Omega_R) on the angle torus organizes the
three dynamical regimes: no fixed points (ergodic), a diagonal
unstable/saddle pair (correlated Zeno), or four fixed points including a
stable one (standard Zeno). Fixed points are located by a dense grid scan
plus damped Newton refinement and classified through the analytic Jacobian.
"""

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BoundaryIndeterminateError
from .gutzwiller import drift, wrap_angle

PI = math.pi
TWO_PI = 2.0 * math.pi

RESIDUAL_TOL = 1e-10
DEDUPE_TOL = 1e-6
MARGINAL_TOL = 1e-8


class Stability(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    SADDLE = "saddle"
    MARGINAL = "marginal"


class PhaseLabel(enum.Enum):
    ERGODIC = "ergodic"
    CORRELATED_ZENO = "correlated_zeno"
    STANDARD_ZENO = "standard_zeno"


@dataclass(frozen=True)
class FixedPoint:
    """A zero of the no-click flow with its linearization.

    ``eig1``, ``eig2`` are the eigenvalues of the flow Jacobian (time^-1);
    they are real here because the Jacobian is symmetric, but are stored as
    complex for the record format.
    """

    theta_l: float
    theta_r: float
    eig1: complex
    eig2: complex
    stability: Stability


def omega_jacobian(theta_l, theta_r, lambda1, lambda2, omega_s=1.0):
    """Analytic Jacobian d(Omega_L, Omega_R)/d(theta_l, theta_r)."""
    s2l = np.sin(theta_l / 2) ** 2
    s2r = np.sin(theta_r / 2) ** 2
    a = 2 * omega_s * (lambda1 + lambda2 * s2r) * np.cos(theta_l)
    b = omega_s * lambda2 * np.sin(theta_l) * np.sin(theta_r)
    d = 2 * omega_s * (lambda1 + lambda2 * s2l) * np.cos(theta_r)
    return np.array([[a, b], [b, d]])


def flow_field(grid_n: int, lambda1, lambda2, omega_s=1.0):
    """Velocity (-Omega_L, -Omega_R) at the cell centers of a periodic grid.

    Returns (centers, v_l, v_r) with ``centers`` the shared 1-d axis and the
    velocity arrays indexed [i_theta_l, j_theta_r].
    """
    if grid_n < 8:
        raise ValueError("grid_n must be >= 8")
    centers = -PI + TWO_PI * (np.arange(grid_n) + 0.5) / grid_n
    tl, tr = np.meshgrid(centers, centers, indexing="ij")
    wl, wr = drift(tl, tr, lambda1, lambda2, omega_s)
    return centers, -wl, -wr


def _classify(eig1, eig2):
    re1, re2 = eig1.real, eig2.real
    if min(abs(re1), abs(re2)) < MARGINAL_TOL:
        return Stability.MARGINAL
    if re1 < 0 and re2 < 0:
        return Stability.STABLE
    if re1 > 0 and re2 > 0:
        return Stability.UNSTABLE
    return Stability.SADDLE


def _make_fixed_point(theta_l, theta_r, lambda1, lambda2, omega_s):
    j = -omega_jacobian(theta_l, theta_r, lambda1, lambda2, omega_s)
    tr_half = 0.5 * (j[0, 0] + j[1, 1])
    disc = math.sqrt(max(0.25 * (j[0, 0] - j[1, 1]) ** 2 + j[0, 1] * j[1, 0], 0.0))
    eig1 = complex(tr_half + disc)
    eig2 = complex(tr_half - disc)
    return FixedPoint(theta_l=theta_l, theta_r=theta_r, eig1=eig1, eig2=eig2,
                      stability=_classify(eig1, eig2))


def _newton_refine(seed, lambda1, lambda2, omega_s, damping=0.5, max_iter=100):
    x = np.array(seed, dtype=float)
    for _ in range(max_iter):
        f = np.array(drift(x[0], x[1], lambda1, lambda2, omega_s))
        if np.abs(f).max() <= RESIDUAL_TOL:
            return x
        j = omega_jacobian(x[0], x[1], lambda1, lambda2, omega_s)
        det = j[0, 0] * j[1, 1] - j[0, 1] * j[1, 0]
        if abs(det) < 1e-14:
            return None
        dx = np.linalg.solve(j, -f)
        x = wrap_angle(x + damping * dx)
    return None


def _torus_dist(a, b):
    d = wrap_angle(np.asarray(a) - np.asarray(b))
    return math.hypot(d[0], d[1])


def _scalar_g(theta, lambda1, lambda2):
    return 1.0 + (lambda1 + lambda2 * math.sin(theta / 2) ** 2) * math.sin(theta)


def _scalar_g_prime(theta, lambda1, lambda2):
    s2 = math.sin(theta / 2) ** 2
    return ((lambda1 + lambda2 * s2) * math.cos(theta)
            + 0.5 * lambda2 * math.sin(theta) ** 2)


def diagonal_root_condition(lambda1, lambda2, n_scan=4096, tol=1e-12):
    """Roots of g(theta) = 1 + (lambda1 + lambda2 sin^2(theta/2)) sin(theta)
    on (-pi, pi]: the diagonal fixed points of the flow.

    Sign changes are bracketed and refined to ``tol``; tangent (degenerate)
    roots are detected at the critical points of g. Returns
    (roots_exist, sorted root list).
    """
    thetas = np.linspace(-PI, PI, n_scan + 1)
    g = 1.0 + (lambda1 + lambda2 * np.sin(thetas / 2) ** 2) * np.sin(thetas)
    roots = []
    for i in range(n_scan):
        if g[i] == 0.0:
            roots.append(float(thetas[i]))
        elif g[i] * g[i + 1] < 0:
            roots.append(brentq(_scalar_g, thetas[i], thetas[i + 1],
                                args=(lambda1, lambda2), xtol=tol))
    # tangency: critical points where g touches zero without a sign change
    gp = ((lambda1 + lambda2 * np.sin(thetas / 2) ** 2) * np.cos(thetas)
          + 0.5 * lambda2 * np.sin(thetas) ** 2)
    for i in range(n_scan):
        if gp[i] * gp[i + 1] < 0:
            tc = brentq(_scalar_g_prime, thetas[i], thetas[i + 1],
                        args=(lambda1, lambda2), xtol=tol)
            if abs(_scalar_g(tc, lambda1, lambda2)) <= tol:
                roots.append(tc)
    roots = sorted(wrap_angle(t) for t in roots)
    deduped = []
    for t in roots:
        if not deduped or abs(t - deduped[-1]) > DEDUPE_TOL:
            deduped.append(t)
    return bool(deduped), deduped


def _scan_seeds(lambda1, lambda2, omega_s, scan_n):
    corners = -PI + TWO_PI * np.arange(scan_n) / scan_n
    tl, tr = np.meshgrid(corners, corners, indexing="ij")
    wl, wr = drift(tl, tr, lambda1, lambda2, omega_s)
    seeds = []
    for w in (wl, wr):
        c00 = w
        c10 = np.roll(w, -1, axis=0)
        c01 = np.roll(w, -1, axis=1)
        c11 = np.roll(np.roll(w, -1, axis=0), -1, axis=1)
        lo = np.minimum(np.minimum(c00, c10), np.minimum(c01, c11))
        hi = np.maximum(np.maximum(c00, c10), np.maximum(c01, c11))
        seeds.append((lo < 0) & (hi > 0))
    cells = np.argwhere(seeds[0] & seeds[1])
    half = PI / scan_n
    return [(corners[i] + half, corners[j] + half) for i, j in cells]


def find_fixed_points(lambda1, lambda2, omega_s=1.0, scan_n=144):
    """All zeros of (Omega_L, Omega_R) on the torus, classified.

    Newton candidates come from grid cells where both velocity components
    change sign across the cell, plus the diagonal roots of
    :func:`diagonal_root_condition` and, for lambda2 = 0, the exact Cartesian
    product of single-site roots (the scan alone can miss nearly tangent
    pairs). Non-converged candidates are dropped with a warning.
    """
    if scan_n < 8:
        raise ValueError("scan_n must be >= 8")
    seeds = _scan_seeds(lambda1, lambda2, omega_s, scan_n)
    _, diag_roots = diagonal_root_condition(lambda1, lambda2)
    seeds.extend((t, t) for t in diag_roots)
    if lambda2 == 0:
        seeds.extend((a, b) for a in diag_roots for b in diag_roots)
    found = []
    n_failed = 0
    for seed in seeds:
        x = _newton_refine(seed, lambda1, lambda2, omega_s)
        if x is None:
            n_failed += 1
            continue
        if all(_torus_dist(x, y) > DEDUPE_TOL for y in found):
            found.append((float(x[0]), float(x[1])))
    if n_failed:
        warnings.warn(f"{n_failed} Newton candidates did not converge and were dropped")
    found.sort()
    return [_make_fixed_point(tl, tr, lambda1, lambda2, omega_s) for tl, tr in found]


def classify_phase(lambda1, lambda2, omega_s=1.0, scan_n=144) -> PhaseLabel:
    """Phase from the fixed-point set: none -> ergodic, a stable point ->
    standard Zeno, otherwise correlated Zeno. Marginal eigenvalues raise
    :class:`BoundaryIndeterminateError` (the point sits on a boundary)."""
    fps = find_fixed_points(lambda1, lambda2, omega_s, scan_n)
    if any(fp.stability is Stability.MARGINAL for fp in fps):
        raise BoundaryIndeterminateError(
            f"marginal fixed point at (lambda1={lambda1}, lambda2={lambda2})"
        )
    if not fps:
        return PhaseLabel.ERGODIC
    if any(fp.stability is Stability.STABLE for fp in fps):
        return PhaseLabel.STANDARD_ZENO
    return PhaseLabel.CORRELATED_ZENO


@dataclass(frozen=True)
class PhaseDiagram:
    """Classification over a rectangular grid in (lambda1, lambda2)."""

    lambda1s: np.ndarray
    lambda2s: np.ndarray
    labels: np.ndarray       # (n1, n2) strings; 'boundary' when indeterminate
    n_fixed: np.ndarray      # (n1, n2) fixed-point counts
    n_stable: np.ndarray


def phase_diagram(l1_min, l1_max, l2_min, l2_max, resolution,
                  omega_s=1.0, scan_n=144) -> PhaseDiagram:
    if resolution < 1 or (resolution < 2 and (l1_max > l1_min or l2_max > l2_min)):
        raise ValueError("resolution must be >= 2 for a non-degenerate range")
    if min(l1_min, l2_min) < 0:
        raise ValueError("lambda ranges must be nonnegative")
    l1s = np.linspace(l1_min, l1_max, resolution)
    l2s = np.linspace(l2_min, l2_max, resolution)
    labels = np.empty((l1s.size, l2s.size), dtype=object)
    n_fixed = np.zeros(labels.shape, dtype=int)
    n_stable = np.zeros(labels.shape, dtype=int)
    for i, l1 in enumerate(l1s):
        for j, l2 in enumerate(l2s):
            fps = find_fixed_points(l1, l2, omega_s, scan_n)
            n_fixed[i, j] = len(fps)
            n_stable[i, j] = sum(fp.stability is Stability.STABLE for fp in fps)
            if any(fp.stability is Stability.MARGINAL for fp in fps):
                labels[i, j] = "boundary"
            elif not fps:
                labels[i, j] = PhaseLabel.ERGODIC.value
            elif n_stable[i, j]:
                labels[i, j] = PhaseLabel.STANDARD_ZENO.value
            else:
                labels[i, j] = PhaseLabel.CORRELATED_ZENO.value
    return PhaseDiagram(lambda1s=l1s, lambda2s=l2s, labels=labels,
                        n_fixed=n_fixed, n_stable=n_stable)
