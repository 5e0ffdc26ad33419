"""Histogramming on the angle torus, marginals and cuts, distribution
distances and ensemble bookkeeping."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyHistogramError, ShapeMismatchError
from .fokker_planck import PdfGrid

PI = math.pi
TWO_PI = 2.0 * math.pi

DEFAULT_BINS = 72


@dataclass(frozen=True)
class Histogram2D:
    """Binned angle-pair counts over (-pi, pi]^2.

    Bins are half-open [left, right) with theta = pi assigned to the last
    bin. ``density`` is normally derived from the counts; grid-solver
    snapshots carry an explicit density instead (``total`` = 0).
    """

    n: int
    counts: np.ndarray
    total: int
    meta: dict = field(default_factory=dict)
    density: np.ndarray = None

    @property
    def dtheta(self) -> float:
        return TWO_PI / self.n

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(-PI, PI, self.n + 1)

    @property
    def centers(self) -> np.ndarray:
        return -PI + self.dtheta * (np.arange(self.n) + 0.5)

    def density_matrix(self) -> np.ndarray:
        if self.density is not None:
            return self.density
        if self.total == 0:
            raise EmptyHistogramError("histogram holds no samples")
        return self.counts / (self.total * self.dtheta**2)

    def masses(self) -> np.ndarray:
        """Per-bin probability masses, normalized to 1."""
        return self.density_matrix() * self.dtheta**2

    def transpose(self) -> "Histogram2D":
        return Histogram2D(n=self.n, counts=self.counts.T.copy(), total=self.total,
                           meta=dict(self.meta),
                           density=None if self.density is None else self.density.T.copy())


def bin_index(theta, n):
    """Bin of a canonical angle: floor((theta+pi)/dtheta), theta = pi -> last bin."""
    idx = np.floor((np.asarray(theta) + PI) / (TWO_PI / n)).astype(np.int64)
    return np.clip(idx, 0, n - 1)


def bin_angles(theta_l, theta_r, n=DEFAULT_BINS, meta=None) -> Histogram2D:
    """Histogram an ensemble of final angle pairs.

    NaN pairs (samples whose Bloch direction was degenerate) are dropped and
    counted in ``meta['n_dropped']``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    theta_l = np.asarray(theta_l, dtype=float)
    theta_r = np.asarray(theta_r, dtype=float)
    good = ~(np.isnan(theta_l) | np.isnan(theta_r))
    n_dropped = int((~good).sum())
    i = bin_index(theta_l[good], n)
    j = bin_index(theta_r[good], n)
    counts = np.zeros((n, n), dtype=np.int64)
    np.add.at(counts, (i, j), 1)
    meta = dict(meta or {})
    if n_dropped:
        meta["n_dropped"] = n_dropped
    return Histogram2D(n=n, counts=counts, total=int(good.sum()), meta=meta)


def histogram_from_grid(grid: PdfGrid, meta=None) -> Histogram2D:
    """Wrap a grid-solver density in the histogram container (counts zero).

    The singular diagonal component is folded into the cell-averaged
    densities, so the file format stays one density per bin.
    """
    return Histogram2D(n=grid.n, counts=np.zeros((grid.n, grid.n), dtype=np.int64),
                       total=0, meta=dict(meta or {}),
                       density=grid.cell_densities())


@dataclass(frozen=True)
class Marginal1D:
    """One-axis density over (-pi, pi], integrating to 1."""

    n: int
    density: np.ndarray

    @property
    def dtheta(self) -> float:
        return TWO_PI / self.n

    @property
    def centers(self) -> np.ndarray:
        return -PI + self.dtheta * (np.arange(self.n) + 0.5)

    def masses(self) -> np.ndarray:
        return self.density * self.dtheta


def marginal(h: Histogram2D, axis: str) -> Marginal1D:
    """Marginal over theta_l (axis='L') or theta_r (axis='R')."""
    if axis not in ("L", "R"):
        raise ValueError(f"axis must be 'L' or 'R', got {axis!r}")
    m = h.masses().sum(axis=1 if axis == "L" else 0)
    s = m.sum()
    if s <= 0:
        raise EmptyHistogramError("cannot take the marginal of an empty histogram")
    return Marginal1D(n=h.n, density=m / (s * h.dtheta))


@dataclass(frozen=True)
class ConditionalCuts:
    """Normalized 1-d sections: along theta_l at theta_r = pi, along theta_r
    at theta_l = pi, and along the diagonal bin_l = bin_r."""

    at_theta_r_pi: Marginal1D
    at_theta_l_pi: Marginal1D
    diagonal: Marginal1D


def conditional_cuts(h: Histogram2D) -> ConditionalCuts:
    masses = h.masses()
    cuts = {}
    for name, slc in (("at_theta_r_pi", masses[:, h.n - 1]),
                      ("at_theta_l_pi", masses[h.n - 1, :]),
                      ("diagonal", np.diagonal(masses))):
        s = slc.sum()
        if s <= 0:
            raise EmptyHistogramError(f"cut '{name}' holds no mass")
        cuts[name] = Marginal1D(n=h.n, density=slc / (s * h.dtheta))
    return ConditionalCuts(**cuts)


def _masses_of(obj):
    if isinstance(obj, (Histogram2D, Marginal1D, PdfGrid)):
        return np.asarray(obj.masses(), dtype=float)
    arr = np.asarray(obj, dtype=float)
    s = arr.sum()
    if s <= 0:
        raise EmptyHistogramError("cannot normalize an empty array")
    return arr / s


def tv_distance(a, b) -> float:
    """Total-variation distance: half the L1 distance between the normalized
    per-bin masses. Accepts histograms, marginals, grid densities or arrays."""
    ma = _masses_of(a)
    mb = _masses_of(b)
    if ma.shape != mb.shape:
        raise ShapeMismatchError(f"shape {ma.shape} vs {mb.shape}")
    return 0.5 * float(np.abs(ma - mb).sum())


def occupied_fraction(h, region=None) -> float:
    """Fraction of (optionally masked) bins with nonzero occupancy."""
    if isinstance(h, Histogram2D):
        hit = h.counts > 0 if h.total > 0 else h.density_matrix() > 0
    elif isinstance(h, PdfGrid):
        hit = h.masses() > 0
    else:
        hit = np.asarray(h) > 0
    if region is not None:
        region = np.asarray(region, dtype=bool)
        if region.shape != hit.shape:
            raise ShapeMismatchError(f"mask shape {region.shape} vs {hit.shape}")
        if not region.any():
            raise EmptyHistogramError("mask selects no bins")
        return float(hit[region].mean())
    return float(hit.mean())


def splitting_floor(theta_l, theta_r, n=DEFAULT_BINS) -> float:
    """Statistical TV floor by ensemble halving: the distance between the
    histograms of the first and second half of the samples."""
    theta_l = np.asarray(theta_l, dtype=float)
    theta_r = np.asarray(theta_r, dtype=float)
    half = theta_l.size // 2
    if half < 1:
        raise EmptyHistogramError("need at least two samples to split")
    h1 = bin_angles(theta_l[:half], theta_r[:half], n)
    h2 = bin_angles(theta_l[half:], theta_r[half:], n)
    return tv_distance(h1, h2)


def product_of_marginals(h: Histogram2D) -> np.ndarray:
    """Per-bin masses of the product of the two marginals of ``h``."""
    ml = marginal(h, "L").masses()
    mr = marginal(h, "R").masses()
    return np.outer(ml, mr)
