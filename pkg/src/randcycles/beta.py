"""Random expansions in a non-integer base: greedy/lazy map pair and digits.

For non-integer beta > 1 the greedy map ``beta*x - floor(beta*x)`` (with the
last branch ``beta*x - floor(beta)``) and its reflection-conjugate lazy map
act on ``X = [0, floor(beta)/(beta-1)]``.  When the greedy expansion of 1 is
finite both maps are Markov over the partition generated by the branch cuts,
the orbit of 1, and their reflections; orbits then read off digit sequences
``x = sum digit_k beta^{-k} + beta^{-n} T^n x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cycles import Cycle, CycleSet
from .errors import ParameterError
from .maps import BetaPieceBranch, Interval, MarkovMap, step_many
from .measures import PiecewiseConstantDensity
from .symbolic import RandomSystem

_DIGIT_SNAP = 1e-10  # absorb rounding just below integer digit boundaries


@dataclass(frozen=True)
class BetaSystem:
    """Greedy/lazy pair for one base, with digit bookkeeping.

    ``digit_offsets`` maps each global symbol id (1-based) to the digit the
    corresponding branch emits; a cycle's digit sequence is just the offsets
    of its itinerary word.
    """

    beta: float
    floor: int
    system: RandomSystem
    greedy_orbit_of_1: tuple[float, ...]
    digit_offsets: np.ndarray

    @property
    def ambient(self) -> Interval:
        return self.system.ambient

    def u(self, x: float) -> float:
        """The reflection conjugating greedy and lazy: x -> floor(beta)/(beta-1) - x."""
        return self.ambient.hi - x

    def digit_cells(self) -> list[tuple[float, float]]:
        """The intervals L_i on which the greedy digit function equals i."""
        fl, b = self.floor, self.beta
        cells = [(i / b, (i + 1) / b) for i in range(fl)]
        cells.append((fl / b, self.ambient.hi))
        return cells

    def digit_value(self, letter: int, x: float) -> int:
        """The digit functions: e_1 from the greedy cells, e_2 reflected."""
        fl, b = self.floor, self.beta
        x = min(max(x, 0.0), self.ambient.hi)  # rounding drift off the ends
        if letter == 1:
            if x < fl / b:
                return int(math.floor(b * x))
            return fl
        if letter == 2:
            return fl - self.digit_value(1, self.u(x))
        raise ParameterError("letter must be 1 (greedy) or 2 (lazy)")


def _greedy_step(beta: float, fl: int, x: float) -> tuple[float, int]:
    """One greedy step with snapping at integer digit boundaries."""
    if x < 1.0:
        t = beta * x
        d = math.floor(t)
        if t - d > 1.0 - _DIGIT_SNAP:
            d += 1
    else:
        t = beta * x
        d = fl
    return max(t - d, 0.0), int(d)


def greedy_orbit_of_one(beta: float, depth_bound: int) -> tuple[float, ...]:
    """Orbit of 1 under the greedy map until it reaches 0, else raise."""
    fl = int(math.floor(beta))
    orbit = [1.0]
    x = 1.0
    for _ in range(depth_bound):
        x, _ = _greedy_step(beta, fl, x)
        orbit.append(x)
        if abs(x) <= 1e-9:
            orbit[-1] = 0.0
            return tuple(orbit)
    raise ParameterError(
        f"greedy expansion of 1 not finite to depth {depth_bound} (beta={beta})"
    )


def build_beta_system(
    beta: float, depth_bound: int = 64, p=(0.5, 0.5)
) -> BetaSystem:
    """Construct the greedy/lazy system for a non-integer base.

    The Markov partition collects the branch cut points ``k/beta``, the point
    1, the greedy orbit of 1, and the reflections of all of these; the
    construction fails if the orbit of 1 does not reach 0 within
    ``depth_bound`` steps or if the resulting maps are not Markov.
    """
    if beta <= 1.0 or float(beta).is_integer():
        raise ParameterError("beta must be a non-integer greater than 1")
    fl = int(math.floor(beta))
    hi = fl / (beta - 1.0)
    orbit = greedy_orbit_of_one(beta, depth_bound)

    pts = {0.0, hi, 1.0}
    pts.update(k / beta for k in range(1, fl + 1))
    pts.update(orbit)
    pts.update(hi - q for q in list(pts))
    raw = sorted(pts)
    snapped = [raw[0]]
    for q in raw[1:]:
        if q - snapped[-1] > 1e-12:
            snapped.append(q)
    snapped[0], snapped[-1] = 0.0, hi
    snapped = [q for q in snapped if -1e-12 <= q <= hi + 1e-12]

    def digit_on_cell(letter: int, lo: float, hi_: float) -> int:
        mid = 0.5 * (lo + hi_)
        if letter == 1:
            if mid < fl / beta:
                return int(math.floor(beta * mid + _DIGIT_SNAP))
            return fl
        return fl - digit_on_cell(1, hi - hi_, hi - lo)

    def build_map(letter: int, name: str) -> MarkovMap:
        branches = []
        for j in range(len(snapped) - 1):
            d = digit_on_cell(letter, snapped[j], snapped[j + 1])
            branches.append(
                BetaPieceBranch(
                    Interval(snapped[j], snapped[j + 1]), beta, d, label=j + 1
                )
            )
        return MarkovMap(tuple(branches), Interval(0.0, hi), name=name)

    greedy = build_map(1, f"beta_greedy({beta})")
    lazy = build_map(2, f"beta_lazy({beta})")
    system = RandomSystem((greedy, lazy), p, name=f"beta({beta})")
    alphabet, _ = system.scheme()  # validates the Markov property

    offsets = np.array(
        [
            system.maps[s.map_index].branches[s.branch_label - 1].offset
            for s in alphabet.symbols
        ],
        dtype=np.int64,
    )
    bs = BetaSystem(float(beta), fl, system, orbit, offsets)

    # conjugacy check: lazy = u ∘ greedy ∘ u pointwise away from cell boundaries
    grid = np.linspace(1e-6, hi - 1e-6, 257)
    grid = np.array(
        [g for g in grid if all(abs(g - q) > 1e-7 for q in snapped)]
    )
    lhs = step_many(lazy, grid)
    rhs = hi - step_many(greedy, hi - grid)
    if np.max(np.abs(lhs - rhs)) > 1e-10:
        raise ParameterError("lazy map fails the reflection conjugacy check")
    return bs


@dataclass(frozen=True)
class DigitSequence:
    """Digits read along one cycle, with their source sample word and point."""

    digits: tuple[int, ...]
    letters: tuple[int, ...]
    point: float
    max_digit: int

    def __len__(self):
        return len(self.digits)


def digit_sequence(bs: BetaSystem, cycle: Cycle) -> DigitSequence:
    """Digit sequence of a cycle: the offsets of its itinerary branches.

    Identical to evaluating the digit functions along the orbit except on the
    measure-zero set of cell boundaries, where the itinerary decides; taking
    offsets keeps the reconstruction identity exact.
    """
    alphabet, _ = bs.system.scheme()
    digits = tuple(int(bs.digit_offsets[sid - 1]) for sid in cycle.word)
    letters = tuple(alphabet.owner(sid) + 1 for sid in cycle.word)
    return DigitSequence(digits, letters, cycle.point, bs.floor)


def reconstruct(bs: BetaSystem, ds: DigitSequence, tail: float = 0.0) -> float:
    """Partial sum sum_k digit_k beta^{-k} (+ beta^{-n} tail)."""
    total = 0.0
    for k, d in enumerate(ds.digits, start=1):
        total += d * bs.beta ** (-k)
    return total + tail * bs.beta ** (-len(ds.digits))


@dataclass(frozen=True)
class DigitStats:
    freq: np.ndarray
    symmetric_mean: float
    mean_distance: float


def digit_stats(digits, max_digit: int | None = None) -> DigitStats:
    """Relative digit frequencies, symmetric mean, and mean distance.

    The symmetric mean is 2/(n(n-1)) sum_{i<j} a_i a_j and the mean distance
    2/(n(n-1)) sum_{i<j} |a_i - a_j|; both need n >= 2.
    """
    if isinstance(digits, DigitSequence):
        if max_digit is None:
            max_digit = digits.max_digit
        digits = digits.digits
    arr = np.asarray(digits, dtype=np.int64)
    n = len(arr)
    if n < 2:
        raise ParameterError("symmetric mean and mean distance need n >= 2")
    if max_digit is None:
        max_digit = int(arr.max())
    counts = np.bincount(arr, minlength=max_digit + 1).astype(float)
    freq = counts / n
    total = arr.sum()
    s = (total * total - np.square(arr).sum()) / (n * (n - 1))
    d = 0.0
    for i in range(max_digit + 1):
        for j in range(i + 1, max_digit + 1):
            d += 2.0 * (j - i) * counts[i] * counts[j]
    d /= n * (n - 1)
    return DigitStats(freq, float(s), float(d))


def weighted_digit_averages(bs: BetaSystem, cs: CycleSet) -> DigitStats:
    """Cycle-weighted averages of the per-cycle digit statistics.

    This is the quantity whose large-period limit is predicted by the digit
    frequency vector q: frequencies tend to q_i, the symmetric mean to
    (sum i q_i)^2, and the mean distance to 2 sum_{i<j} (j-i) q_i q_j.
    """
    if not cs.cycles:
        raise ParameterError("empty cycle set")
    n = cs.n
    words = np.array([c.word for c in cs.cycles], dtype=np.int64)
    digits = bs.digit_offsets[words - 1]
    ws = cs.normalized_weights()
    fl = bs.floor

    freqs = np.stack([(digits == i).mean(axis=1) for i in range(fl + 1)], axis=1)
    freq_avg = ws @ freqs

    if n < 2:
        raise ParameterError("symmetric mean and mean distance need n >= 2")
    row_sum = digits.sum(axis=1)
    row_sumsq = np.square(digits).sum(axis=1)
    s_rows = (row_sum * row_sum - row_sumsq) / (n * (n - 1))

    counts = np.stack([(digits == i).sum(axis=1) for i in range(fl + 1)], axis=1)
    d_rows = np.zeros(len(digits))
    for i in range(fl + 1):
        for j in range(i + 1, fl + 1):
            d_rows += 2.0 * (j - i) * counts[:, i] * counts[:, j]
    d_rows /= n * (n - 1)
    return DigitStats(freq_avg, float(ws @ s_rows), float(ws @ d_rows))


def q_closed_form_golden(p1: float) -> tuple[float, float]:
    """Digit frequencies for the golden base: q_i = (1 + (2 p_{i+1} - 1)/sqrt 5)/2."""
    if not 0.0 <= p1 <= 1.0:
        raise ParameterError("p1 must lie in [0, 1]")
    root5 = math.sqrt(5.0)
    q0 = 0.5 * (1.0 + (2.0 * p1 - 1.0) / root5)
    q1 = 0.5 * (1.0 + (2.0 * (1.0 - p1) - 1.0) / root5)
    return q0, q1


def q_from_density(
    bs: BetaSystem, p, density: PiecewiseConstantDensity
) -> np.ndarray:
    """Digit frequency vector from a stationary density.

    q_i = p1 * lambda(L_i) + p2 * lambda(u(L_{floor-i})); the reflection form
    integrates one density against both symbol cells, which matches the
    two-density definition because the lazy density is the reflection of the
    greedy one.
    """
    p1, p2 = float(p[0]), float(p[1])
    fl = bs.floor
    cells = bs.digit_cells()
    q = np.zeros(fl + 1)
    for i in range(fl + 1):
        lo, hi = cells[i]
        mass_greedy = float(density.cdf(hi) - density.cdf(lo))
        rlo, rhi = cells[fl - i]
        mass_lazy = float(density.cdf(bs.u(rlo)) - density.cdf(bs.u(rhi)))
        q[i] = p1 * mass_greedy + p2 * mass_lazy
    return q


def digit_limit_targets(q) -> tuple[float, float]:
    """(symmetric-mean limit, mean-distance limit) implied by frequencies q."""
    q = np.asarray(q, dtype=float)
    idx = np.arange(len(q))
    s_target = float(np.dot(idx, q)) ** 2
    d_target = 0.0
    for i in range(len(q)):
        for j in range(i + 1, len(q)):
            d_target += 2.0 * (j - i) * q[i] * q[j]
    return s_target, float(d_target)
