"""Markov interval maps built from finitely many monotone branches.

A map is given by an ordered list of branches over a partition of a common
ambient interval.  Branch domains are half-open ``[lo, hi)`` except the last
branch, which is closed, so every point of the ambient interval dispatches to
exactly one branch.  Branches come in three closed-form kinds (affine,
base-beta pieces, and the intermittent left piece ``x (1 + 2^a x^a)``), which
keeps derivatives exact.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError

#: numeric codes used by the enumeration kernels
KIND_AFFINE = 0
KIND_LSV_LEFT = 1


@dataclass(frozen=True)
class Interval:
    """Closed interval with positive width."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ParameterError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol


@dataclass(frozen=True)
class AffineBranch:
    """Branch ``x -> slope*x + intercept`` with nonzero slope."""

    domain: Interval
    slope: float
    intercept: float
    label: int

    kind = "affine"

    def __post_init__(self):
        if self.slope == 0.0:
            raise ParameterError("affine branch needs nonzero slope")

    def value(self, x: float) -> float:
        return self.slope * x + self.intercept

    def deriv(self, x: float) -> float:
        return self.slope

    def inverse(self, y: float) -> float:
        return (y - self.intercept) / self.slope

    def kernel_params(self):
        return KIND_AFFINE, self.slope, self.intercept


@dataclass(frozen=True)
class BetaPieceBranch:
    """Branch ``x -> beta*x - offset`` of a base-beta expansion map.

    Affine with slope beta; the integer offset is the digit emitted when an
    orbit passes through this branch.
    """

    domain: Interval
    beta: float
    offset: int
    label: int

    kind = "beta_piece"

    def __post_init__(self):
        if self.beta <= 1.0:
            raise ParameterError("beta piece needs beta > 1")

    def value(self, x: float) -> float:
        return self.beta * x - self.offset

    def deriv(self, x: float) -> float:
        return self.beta

    def inverse(self, y: float) -> float:
        return (y + self.offset) / self.beta

    def kernel_params(self):
        return KIND_AFFINE, self.beta, -float(self.offset)


@dataclass(frozen=True)
class LsvLeftBranch:
    """The intermittent left branch ``x -> x (1 + 2^a x^a)``.

    Increasing on [0, 1/2] with derivative 1 at the origin (the neutral
    fixed point).  Its inverse has no closed form; :meth:`inverse` bisects
    to absolute tolerance 1e-14.
    """

    domain: Interval
    alpha: float
    label: int

    kind = "lsv_left"
    inverse_tol = 1e-14

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ParameterError("lsv_left branch needs alpha > 0")

    @property
    def coeff(self) -> float:
        return 2.0**self.alpha

    def value(self, x: float) -> float:
        if x < 0.0:  # guard rounding drift below the neutral endpoint
            x = 0.0
        return x + self.coeff * x ** (1.0 + self.alpha)

    def deriv(self, x: float) -> float:
        if x < 0.0:
            x = 0.0
        return 1.0 + (1.0 + self.alpha) * self.coeff * x**self.alpha

    def inverse(self, y: float) -> float:
        lo, hi = self.domain.lo, self.domain.hi
        if y <= self.value(lo):
            return lo
        if y >= self.value(hi):
            return hi
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            if self.value(mid) < y:
                lo = mid
            else:
                hi = mid
            if hi - lo <= self.inverse_tol:
                break
        return 0.5 * (lo + hi)

    def kernel_params(self):
        return KIND_LSV_LEFT, self.coeff, self.alpha


Branch = AffineBranch | BetaPieceBranch | LsvLeftBranch


@dataclass(frozen=True)
class MarkovMap:
    """Interval self-map with ordered monotone branches covering the ambient.

    ``exceptional`` declares the finitely many points where expansion
    ``|T'| > 1`` is allowed to fail (e.g. the neutral origin of an
    intermittent map); validation checks the declaration by sampling.
    """

    branches: tuple[Branch, ...]
    ambient: Interval
    exceptional: tuple[float, ...] = ()
    name: str = ""

    def __post_init__(self):
        tol = 1e-12
        if not self.branches:
            raise ParameterError("map needs at least one branch")
        prev = self.ambient.lo
        for b in self.branches:
            if abs(b.domain.lo - prev) > tol:
                raise ParameterError(
                    f"branch domains must tile the ambient interval; gap at {prev}"
                )
            prev = b.domain.hi
        if abs(prev - self.ambient.hi) > tol:
            raise ParameterError("branch domains must end at the ambient endpoint")

    def partition_points(self) -> list[float]:
        return [b.domain.lo for b in self.branches] + [self.ambient.hi]

    def branch_at(self, x: float) -> Branch:
        """Dispatch ``x`` to its branch: domains are [lo, hi), last closed."""
        if not self.ambient.contains(x):
            raise DomainError(f"{x} outside ambient [{self.ambient.lo}, {self.ambient.hi}]")
        los = [b.domain.lo for b in self.branches]
        idx = bisect_right(los, x) - 1
        if idx < 0:
            idx = 0
        return self.branches[idx]

    def evaluate(self, x: float) -> tuple[float, float, int]:
        """Map value, one-sided derivative, and branch label at ``x``."""
        b = self.branch_at(x)
        return b.value(x), b.deriv(x), b.label


def step_many(markov_map: MarkovMap, xs: np.ndarray) -> np.ndarray:
    """Vectorised one-step application of the map under branch dispatch."""
    xs = np.asarray(xs, dtype=float)
    los = np.array([b.domain.lo for b in markov_map.branches])
    idx = np.clip(np.searchsorted(los, xs, side="right") - 1, 0, len(los) - 1)
    out = np.empty_like(xs)
    for j, b in enumerate(markov_map.branches):
        sel = idx == j
        if not sel.any():
            continue
        if b.kind == "lsv_left":
            xx = np.maximum(xs[sel], 0.0)
            out[sel] = xx + b.coeff * np.power(xx, 1.0 + b.alpha)
        elif b.kind == "beta_piece":
            out[sel] = b.beta * xs[sel] - b.offset
        else:
            out[sel] = b.slope * xs[sel] + b.intercept
    return out


@dataclass(frozen=True)
class BranchCheck:
    """Per-branch validation record."""

    label: int
    image: tuple[float, float]
    covered_cells: tuple[int, ...]
    endpoint_mismatch: float


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    branch_checks: tuple[BranchCheck, ...]
    max_endpoint_mismatch: float
    nonexpansion_points: tuple[float, ...]
    unexpected_nonexpansion: tuple[float, ...]

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        lines = [f"markov validation: {status}"]
        for bc in self.branch_checks:
            lines.append(
                f"  branch {bc.label}: image [{bc.image[0]:.12g}, {bc.image[1]:.12g}]"
                f" covers cells {bc.covered_cells}, endpoint mismatch {bc.endpoint_mismatch:.3e}"
            )
        if self.nonexpansion_points:
            lines.append(f"  non-expansion points: {self.nonexpansion_points}")
        return "\n".join(lines)


def _branch_image(b: Branch) -> tuple[float, float]:
    y0, y1 = b.value(b.domain.lo), b.value(b.domain.hi)
    return (y0, y1) if y0 <= y1 else (y1, y0)


def validate_markov(
    markov_map: MarkovMap, tol: float = 1e-9, samples_per_branch: int = 257
) -> ValidationReport:
    """Check the Markov covering property and expansion by direct computation.

    A branch passes when both of its image endpoints match partition points
    (or ambient endpoints) within ``tol``; the covered cells are then the
    partition cells between the matched endpoints.  Expansion ``|T'| > 1`` is
    sampled on each branch; sample points where it fails must appear in the
    map's declared exceptional set.
    """
    pts = markov_map.partition_points()
    checks = []
    worst = 0.0
    for b in markov_map.branches:
        img = _branch_image(b)
        mismatch = 0.0
        idxs = []
        for endpoint in img:
            dists = [abs(endpoint - q) for q in pts]
            j = int(np.argmin(dists))
            mismatch = max(mismatch, dists[j])
            idxs.append(j)
        j0, j1 = sorted(idxs)
        covered = tuple(range(j0 + 1, j1 + 1)) if mismatch <= tol else ()
        checks.append(BranchCheck(b.label, img, covered, mismatch))
        worst = max(worst, mismatch)

    bad = []
    for b in markov_map.branches:
        grid = np.linspace(b.domain.lo, b.domain.hi, samples_per_branch)
        for x in grid:
            if abs(b.deriv(float(x))) <= 1.0 + 1e-12:
                bad.append(float(x))
    bad = sorted(set(bad))
    unexpected = tuple(
        x for x in bad if all(abs(x - e) > 1e-9 for e in markov_map.exceptional)
    )
    passed = worst <= tol and not unexpected
    return ValidationReport(passed, tuple(checks), worst, tuple(bad), unexpected)


def wraps_as_circle(markov_map: MarkovMap, tol: float = 1e-9) -> bool:
    """True when the map is continuous once the ambient endpoints are glued.

    Detects maps like ``2x mod 1`` that are really circle maps written on an
    interval: at every interior partition point the left-limit value must
    either match the right value or jump from the ambient top to the ambient
    bottom, and the two ambient endpoints must have identified images.  Maps
    that are plainly continuous on the interval do not count.
    """
    amb = markov_map.ambient

    def ident(v: float) -> float:
        return amb.lo if abs(v - amb.hi) <= tol else v

    needed = False
    bs = markov_map.branches
    for left, right in zip(bs, bs[1:]):
        c = right.domain.lo
        v_left = left.value(c)
        v_right = right.value(c)
        if abs(v_left - v_right) <= tol:
            continue
        if abs(v_left - amb.hi) <= tol and abs(v_right - amb.lo) <= tol:
            needed = True
            continue
        return False
    v_lo = bs[0].value(amb.lo)
    v_hi = bs[-1].value(amb.hi)
    if abs(ident(v_lo) - ident(v_hi)) > tol:
        return False
    return needed


def affine_markov_map(
    breakpoints,
    slopes,
    intercepts,
    exceptional: tuple[float, ...] = (),
    name: str = "",
) -> MarkovMap:
    """Build a piecewise-affine map from cell breakpoints and per-cell (slope, intercept)."""
    breakpoints = [float(x) for x in breakpoints]
    if len(breakpoints) < 2 or sorted(breakpoints) != breakpoints:
        raise ParameterError("breakpoints must be ascending with at least two entries")
    if not (len(slopes) == len(intercepts) == len(breakpoints) - 1):
        raise ParameterError("need one (slope, intercept) pair per cell")
    branches = tuple(
        AffineBranch(
            Interval(breakpoints[j], breakpoints[j + 1]),
            float(slopes[j]),
            float(intercepts[j]),
            label=j + 1,
        )
        for j in range(len(slopes))
    )
    return MarkovMap(branches, Interval(breakpoints[0], breakpoints[-1]), exceptional, name)


def doubling_map() -> MarkovMap:
    """The full-branch doubling map on [0, 1] (two affine branches of slope 2)."""
    return affine_markov_map([0.0, 0.5, 1.0], [2.0, 2.0], [0.0, -1.0], name="doubling")
