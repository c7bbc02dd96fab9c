"""Probability measures on the ambient interval and distances between them.

Two concrete kinds: finitely supported point measures (what cycle
enumeration produces) and piecewise-constant Lebesgue densities (what the
transfer-operator discretisation produces).  Both expose CDF queries, so the
Kolmogorov distance works across kinds and serves as the numerical proxy for
weak* convergence throughout the experiments.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse

from .errors import ConvergenceError, ParameterError
from .maps import Interval
from .symbolic import RandomSystem


class WeightedPointMeasure:
    """Finitely supported probability measure with sorted, merged atoms."""

    def __init__(self, points, weights, merge_tol: float = 1e-12):
        pts = np.asarray(points, dtype=float)
        wts = np.asarray(weights, dtype=float)
        if pts.size == 0:
            raise ParameterError("point measure needs at least one atom")
        if pts.shape != wts.shape:
            raise ParameterError("points and weights must have equal length")
        if (wts <= 0).any():
            raise ParameterError("weights must be positive")
        order = np.argsort(pts, kind="stable")
        pts, wts = pts[order], wts[order]
        # merge runs of points closer than merge_tol to their predecessor
        keep = np.empty(len(pts), dtype=bool)
        keep[0] = True
        keep[1:] = np.diff(pts) > merge_tol
        groups = np.cumsum(keep) - 1
        merged_w = np.zeros(groups[-1] + 1)
        np.add.at(merged_w, groups, wts)
        self.points = pts[keep]
        self.weights = merged_w
        total = self.weights.sum()
        if abs(total - 1.0) > 1e-12:
            raise ParameterError(f"weights sum to {total!r}, expected 1")

    @classmethod
    def delta(cls, x: float) -> "WeightedPointMeasure":
        return cls([x], [1.0])

    def __len__(self):
        return len(self.points)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def cdf(self, t) -> np.ndarray:
        """Right-continuous CDF: mass of (-inf, t]."""
        cum = np.cumsum(self.weights)
        idx = np.searchsorted(self.points, np.asarray(t, dtype=float), side="right")
        return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)

    def cdf_left(self, t) -> np.ndarray:
        """Mass of (-inf, t): the CDF limit from below."""
        cum = np.cumsum(self.weights)
        idx = np.searchsorted(self.points, np.asarray(t, dtype=float), side="left")
        return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)

    def mass_below(self, t: float) -> float:
        return float(self.cdf_left(t))

    def candidate_points(self) -> np.ndarray:
        return self.points


class PiecewiseConstantDensity:
    """Density w.r.t. Lebesgue, constant on the cells of a breakpoint grid."""

    def __init__(self, breakpoints, values):
        bp = np.asarray(breakpoints, dtype=float)
        vals = np.asarray(values, dtype=float)
        if bp.ndim != 1 or len(bp) < 2 or (np.diff(bp) <= 0).any():
            raise ParameterError("breakpoints must be strictly ascending")
        if len(vals) != len(bp) - 1:
            raise ParameterError("need one value per cell")
        if (vals < -1e-15).any():
            raise ParameterError("density values must be nonnegative")
        self.breakpoints = bp
        self.values = np.maximum(vals, 0.0)
        if abs(self.integral() - 1.0) > 1e-10:
            raise ParameterError(f"density integrates to {self.integral()!r}, expected 1")

    def integral(self) -> float:
        return float(np.dot(self.values, np.diff(self.breakpoints)))

    def cdf(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        cellmass = self.values * np.diff(self.breakpoints)
        cum = np.concatenate([[0.0], np.cumsum(cellmass)])
        idx = np.clip(
            np.searchsorted(self.breakpoints, t, side="right") - 1,
            0,
            len(self.values) - 1,
        )
        inside = cum[idx] + self.values[idx] * (t - self.breakpoints[idx])
        below = t < self.breakpoints[0]
        above = t >= self.breakpoints[-1]
        return np.where(below, 0.0, np.where(above, 1.0, inside))

    cdf_left = cdf  # continuous CDF

    def mass(self, a: float, b: float) -> float:
        return float(self.cdf(b) - self.cdf(a))

    def value_at(self, t: float) -> float:
        idx = int(
            np.clip(
                np.searchsorted(self.breakpoints, t, side="right") - 1,
                0,
                len(self.values) - 1,
            )
        )
        return float(self.values[idx])

    def candidate_points(self) -> np.ndarray:
        return self.breakpoints


def kolmogorov_distance(a, b) -> float:
    """sup |CDF_a - CDF_b|, evaluated right-continuously and just below atoms."""
    ts = np.union1d(a.candidate_points(), b.candidate_points())
    d_right = np.abs(np.asarray(a.cdf(ts)) - np.asarray(b.cdf(ts)))
    d_left = np.abs(np.asarray(a.cdf_left(ts)) - np.asarray(b.cdf_left(ts)))
    return float(max(d_right.max(), d_left.max()))


def lebesgue_density(interval: Interval) -> PiecewiseConstantDensity:
    """Normalised Lebesgue measure on an interval."""
    return PiecewiseConstantDensity(
        [interval.lo, interval.hi], [1.0 / interval.width]
    )


def pelikan_index(system: RandomSystem, grid: int = 4096) -> float:
    """sup over the interval of sum_i p_i / |T_i'(x)|; below 1 means the
    averaged system contracts densities (absolutely continuous stationary
    measure exists)."""
    amb = system.ambient
    pts = set(np.linspace(amb.lo, amb.hi, grid))
    for m in system.maps:
        pts.update(m.partition_points())
    pts = sorted(pts)
    best = 0.0
    for x in pts:
        total = 0.0
        for q, m in zip(system.p, system.maps):
            total += q / abs(m.evaluate(x)[1])
        best = max(best, total)
    # one-sided values from the left at branch tops
    for q_i, m in enumerate(system.maps):
        for b in m.branches:
            x = b.domain.hi
            total = system.p[q_i] / abs(b.deriv(x))
            for j, other in enumerate(system.maps):
                if j == q_i:
                    continue
                ob = _branch_from_left(other, x)
                total += system.p[j] / abs(ob.deriv(x))
            best = max(best, total)
    return best


def _branch_from_left(markov_map, x):
    for b in markov_map.branches:
        if b.domain.lo < x <= b.domain.hi:
            return b
    return markov_map.branches[0]


def ulam_grid(system: RandomSystem, cells: int) -> np.ndarray:
    """Uniform grid snapped to all Markov partition points."""
    if cells < 2:
        raise ParameterError("need at least two cells")
    amb = system.ambient
    grid = list(np.linspace(amb.lo, amb.hi, cells + 1))
    for m in system.maps:
        grid.extend(m.partition_points())
    grid = sorted(grid)
    out = [grid[0]]
    for g in grid[1:]:
        if g - out[-1] > 1e-12:
            out.append(g)
    out[-1] = amb.hi
    return np.array(out)


def ulam_matrix(system: RandomSystem, breakpoints: np.ndarray) -> sparse.csr_matrix:
    """Row-stochastic discretisation of the averaged transfer operator.

    Entry (j, k) is sum_i p_i Leb(cell_j ∩ T_i^{-1}(cell_k)) / Leb(cell_j),
    with branch preimages in closed form (affine pieces) or by bisection.
    """
    bp = breakpoints
    ncells = len(bp) - 1
    widths = np.diff(bp)
    rows, cols, vals = [], [], []
    for q, m in zip(system.p, system.maps):
        for b in m.branches:
            dlo, dhi = b.domain.lo, b.domain.hi
            # snap to the grid points nearest the branch endpoints (grid is
            # built to contain them up to 1e-12)
            j0 = int(np.argmin(np.abs(bp - dlo)))
            j1 = int(np.argmin(np.abs(bp - dhi)))
            # grid is snapped to partition points, so cells j0..j1-1 tile the domain
            for j in range(j0, j1):
                xlo, xhi = bp[j], bp[j + 1]
                y0, y1 = b.value(xlo), b.value(xhi)
                increasing = y1 >= y0
                ylo, yhi = (y0, y1) if increasing else (y1, y0)
                k0 = int(np.clip(np.searchsorted(bp, ylo, side="right") - 1, 0, ncells - 1))
                k1 = int(np.clip(np.searchsorted(bp, yhi, side="left"), 1, ncells))
                for k in range(k0, k1):
                    seg_lo = max(ylo, bp[k])
                    seg_hi = min(yhi, bp[k + 1])
                    if seg_hi <= seg_lo:
                        continue
                    u = b.inverse(seg_lo)
                    v = b.inverse(seg_hi)
                    if u > v:
                        u, v = v, u
                    u = max(u, xlo)
                    v = min(v, xhi)
                    if v <= u:
                        continue
                    rows.append(j)
                    cols.append(k)
                    vals.append(q * (v - u) / widths[j])
    return sparse.csr_matrix((vals, (rows, cols)), shape=(ncells, ncells))


def ulam_stationary(
    system: RandomSystem,
    cells: int,
    tol: float = 1e-12,
    max_iter: int = 100_000,
) -> PiecewiseConstantDensity:
    """Stationary density of the averaged operator by power iteration.

    Starts from the uniform density and iterates until the L1 change of the
    cell masses drops below ``tol``.
    """
    bp = ulam_grid(system, cells)
    P = ulam_matrix(system, bp)
    widths = np.diff(bp)
    mass = widths / widths.sum()
    for _ in range(max_iter):
        new = mass @ P
        total = new.sum()
        if total <= 0:
            raise ConvergenceError("transfer operator lost all mass", 1.0)
        new = new / total
        change = np.abs(new - mass).sum()
        mass = new
        if change < tol:
            break
    else:
        raise ConvergenceError("power iteration did not converge", float(change))
    return PiecewiseConstantDensity(bp, mass / widths)


GOLDEN_RATIO = (1.0 + np.sqrt(5.0)) / 2.0


def golden_density(p1: float) -> PiecewiseConstantDensity:
    """Stationary density of the golden-ratio greedy/lazy pair, closed form.

    With b the golden ratio and X = [0, b], the density w.r.t. Lebesgue is
    (1/(3-b)) * [p1*b on [0,1/b), 1 on [1/b,1), (1-p1)*b on [1,b]].  The
    coefficient order is fixed so that p1 = 1 reduces to the classical
    greedy-map density (proportional to b on [0,1/b), 1 on [1/b,1)) and so
    that the implied digit frequencies match their closed form; the
    transfer-operator solver independently confirms it.
    """
    if not 0.0 <= p1 <= 1.0:
        raise ParameterError("p1 must lie in [0, 1]")
    b = GOLDEN_RATIO
    scale = 1.0 / (3.0 - b)
    return PiecewiseConstantDensity(
        [0.0, 1.0 / b, 1.0, b],
        [scale * p1 * b, scale, scale * (1.0 - p1) * b],
    )
