"""Independent brute-force oracles used to cross-check the enumeration.

These deliberately avoid the package's admissible-word machinery: the
composition is evaluated by straight branch dispatch on a dense grid, roots
are located by sign-change bisection plus explicit probing of cell corners,
and corner orbits are followed with per-step snapping (plain float iteration
through corners is unstable to the half-open cell convention).
"""

import numpy as np

from randcycles.maps import step_many


def all_corners(system) -> np.ndarray:
    pts = set()
    for m in system.maps:
        pts.update(m.partition_points())
    return np.array(sorted(pts))


def _snap(corners: np.ndarray, x: float, tol: float = 1e-11) -> float:
    j = np.searchsorted(corners, x)
    for jj in (j - 1, j):
        if 0 <= jj < len(corners) and abs(corners[jj] - x) <= tol:
            return float(corners[jj])
    return x


def compose_dispatch(system, letters, x: float) -> float:
    v = float(x)
    for letter in letters:
        v = system.maps[letter - 1].evaluate(v)[0]
    return v


def compose_dispatch_snapped(system, letters, x: float) -> float:
    corners = all_corners(system)
    v = float(x)
    for letter in letters:
        v = _snap(corners, v)
        v = system.maps[letter - 1].evaluate(v)[0]
    return v


def brute_force_cycle_points(system, letters, grid_points: int = 1_000_000):
    """Fixed points of the dispatched composition, by dense scan + bisection.

    The grid must be much finer than the composition's discontinuity count
    (roughly the admissible-word count), otherwise a root and a jump sharing
    one grid cell can hide a sign change.
    """
    amb = system.ambient
    letters = tuple(letters)
    xs = np.linspace(amb.lo, amb.hi, grid_points + 1)
    vs = xs.copy()
    for letter in letters:
        vs = step_many(system.maps[letter - 1], vs)
    g = vs - xs

    roots = []
    resid_tol = 1e-8 * max(1.0, amb.width)
    sign = np.sign(g)
    brackets = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    for i in brackets:
        a, b = float(xs[i]), float(xs[i + 1])
        fa = g[i]
        for _ in range(80):
            mid = 0.5 * (a + b)
            fm = compose_dispatch(system, letters, mid) - mid
            if (fm < 0) == (fa < 0):
                a, fa = mid, fm
            else:
                b = mid
            if b - a <= 1e-13:
                break
        r = 0.5 * (a + b)
        if abs(compose_dispatch(system, letters, r) - r) <= resid_tol:
            roots.append(r)

    # corners need snapped orbits: one-ulp drift flips the dispatched branch
    for c in all_corners(system):
        if abs(compose_dispatch_snapped(system, letters, float(c)) - c) <= resid_tol:
            roots.append(float(c))

    roots.sort()
    out = []
    for r in roots:
        if out and r - out[-1] <= 1e-9:
            continue
        out.append(r)
    if system.identify_endpoints and out and abs(out[-1] - amb.hi) <= 1e-9:
        out.pop()
    return out
