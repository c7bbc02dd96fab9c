"""Random cycles: enumeration, weights, normalising constants, and the
measures and averages built from them.

A cycle of period n for a sample word ``omega`` is a fixed point of the
composition ``T_{omega_n} ∘ ... ∘ T_{omega_1}``; each admissible symbol word
contributes at most one candidate (its cylinder is contracted by the
expanding composition).  Candidates whose orbit runs through cell corners
are kept only when the itinerary's branch choices agree with branch
dispatch there, so the result is exactly the fixed-point set of the
composition as a map of the interval; boundary points shared by two
cylinders are counted once, and when every generating map is really a
circle map written on an interval (e.g. ``2x mod 1``) the glued top
endpoint is dropped as the twin of the bottom one.

All weight arithmetic is carried in log space so that periods around 30
survive slopes like beta^n.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from math import isfinite, log

import numpy as np
from scipy.special import logsumexp

from .errors import (
    DomainError,
    NumericalError,
    ParameterError,
    SizeGuardError,
)
from .kernels import build_tables, run_enumeration
from .measures import WeightedPointMeasure
from .symbolic import (
    RandomSystem,
    SampleWord,
    _as_letters,
    count_admissible_words,
    count_all_words,
    cylinder_interval,
    mixing_index,
)

#: refuse enumerations whose admissible-word count exceeds this
WORD_GUARD = 10**8

#: skew enumeration is attempted automatically below this candidate count
ANNEALED_AUTO_LIMIT = 10**6

DEDUPE_TOL = 1e-9
_ENDPOINT_TOL = 1e-12
_DISPATCH_REL_TOL = 1e-6


@dataclass(frozen=True)
class Cycle:
    """One random cycle: itinerary word, fixed point, and log of its weight.

    ``log_weight`` is minus the log-derivative of the composition along the
    orbit; ``orbit`` holds the n points the cycle visits.
    """

    word: tuple[int, ...]
    point: float
    log_weight: float
    orbit: tuple[float, ...]

    @property
    def weight(self) -> float:
        return float(np.exp(self.log_weight))


@dataclass(frozen=True)
class CycleSet:
    """All cycles of one period for one sample word, with the normaliser."""

    omega: SampleWord
    cycles: tuple[Cycle, ...]
    logZ: float
    duplicates_merged: int = 0
    phantoms_rejected: int = 0
    endpoint_dropped: int = 0

    @property
    def n(self) -> int:
        return len(self.omega)

    @property
    def Z(self) -> float:
        return float(np.exp(self.logZ))

    def __len__(self):
        return len(self.cycles)

    def normalized_weights(self) -> np.ndarray:
        lws = np.array([c.log_weight for c in self.cycles])
        return np.exp(lws - self.logZ)


def _system_mixing_index(system: RandomSystem, n_max: int = 64) -> int | None:
    if "n0" not in system._cache:
        _, matrix = system.scheme()
        system._cache["n0"] = mixing_index(matrix, n_max)
    return system._cache["n0"]


_SNAP_TOL = 1e-11
_CORNER_VALUE_TOL = 1e-9


def _partition_point_array(system: RandomSystem) -> np.ndarray:
    if "partition_points" not in system._cache:
        pts = set()
        for m in system.maps:
            pts.update(m.partition_points())
        system._cache["partition_points"] = np.array(sorted(pts))
    return system._cache["partition_points"]


def _map_corner_arrays(system: RandomSystem) -> list[np.ndarray]:
    if "map_corners" not in system._cache:
        system._cache["map_corners"] = [
            np.array(m.partition_points()) for m in system.maps
        ]
    return system._cache["map_corners"]


def _snap_to_boundaries(system: RandomSystem, xs: np.ndarray) -> np.ndarray:
    """Snap candidates to cell corners they numerically sit on.

    Roots are exact only up to solver tolerance; a candidate within a few
    ulps of a corner stands for the corner itself, which is where membership
    in the fixed-point set is decided.
    """
    pts = _partition_point_array(system)
    xs = np.asarray(xs, dtype=float) + 0.0  # normalises -0.0
    idx = np.clip(np.searchsorted(pts, xs), 0, len(pts) - 1)
    out = xs.copy()
    for j in (idx - 1, idx):
        jj = np.clip(j, 0, len(pts) - 1)
        hit = np.abs(pts[jj] - out) <= _SNAP_TOL
        out[hit] = pts[jj][hit]
    return out


def _nearest(sorted_pts: np.ndarray, y: float) -> float:
    j = np.searchsorted(sorted_pts, y)
    best = None
    for jj in (j - 1, j):
        if 0 <= jj < len(sorted_pts):
            c = sorted_pts[jj]
            if best is None or abs(c - y) < abs(best - y):
                best = c
    return float(best)


def _coding_consistent(system, alphabet, letters, word0, orbit) -> bool:
    """Check that a word-coded orbit agrees with branch dispatch at cell corners.

    Away from corners the word's branch is the dispatched branch, so only
    orbit points within snapping distance of a corner need attention: the
    candidate is genuine exactly when the word's branch and the dispatched
    branch assign that corner the same image (one-sided limits agree).
    Following the dispatch orbit directly would be float-unstable here, since
    corner orbits land ulps to either side of the next corner.
    """
    corners = _map_corner_arrays(system)
    for k, sid0 in enumerate(word0):
        mp = system.maps[letters[k] - 1]
        y = float(orbit[k])
        c = _nearest(corners[letters[k] - 1], y)
        if abs(y - c) > _SNAP_TOL:
            continue
        sym = alphabet.symbols[int(sid0)]
        b_word = mp.branches[sym.branch_label - 1]
        b_disp = mp.branch_at(c)
        if b_disp is b_word:
            continue
        if abs(b_word.value(c) - b_disp.value(c)) > _CORNER_VALUE_TOL:
            return False
    return True


def _word_orbit(system, alphabet, word0, x):
    """Orbit and log-weight along a word's branches (0-based symbol row)."""
    orbit = np.empty(len(word0))
    lw = 0.0
    v = float(x)
    for k, sid0 in enumerate(word0):
        sym = alphabet.symbols[int(sid0)]
        b = system.maps[sym.map_index].branches[sym.branch_label - 1]
        orbit[k] = v
        lw += log(abs(b.deriv(v)))
        v = b.value(v)
    return orbit, -lw


def _filter_candidates(system, letters, words, xs, logws, orbits, dedupe=True):
    """Snap, verify coding consistency, apply endpoint identification, dedupe.

    Candidates must arrive in word order; the first word wins a dedupe tie.
    Returns (cycles, merged, phantoms, endpoint_dropped).
    """
    amb = system.ambient
    m = len(xs)
    if m == 0:
        return (), 0, 0, 0
    raw = np.asarray(xs, dtype=float)
    xs = _snap_to_boundaries(system, raw)
    logws = np.array(logws, dtype=float)
    orbits = np.array(orbits, dtype=float)
    alphabet, _ = system.scheme()
    for i in np.nonzero(xs != raw)[0]:
        orbits[i], logws[i] = _word_orbit(system, alphabet, words[i], xs[i])

    # screen: only candidates whose orbit approaches a corner of the map
    # acting at that step need the consistency check
    corners = _map_corner_arrays(system)
    suspicious = np.zeros(m, dtype=bool)
    for k, letter in enumerate(letters):
        pts = corners[letter - 1]
        col = orbits[:, k]
        idx = np.clip(np.searchsorted(pts, col), 0, len(pts) - 1)
        near = np.abs(pts[idx] - col) <= _SNAP_TOL
        idx2 = np.clip(idx - 1, 0, len(pts) - 1)
        near |= np.abs(pts[idx2] - col) <= _SNAP_TOL
        suspicious |= near
    genuine = np.ones(m, dtype=bool)
    for i in np.nonzero(suspicious)[0]:
        genuine[i] = _coding_consistent(system, alphabet, letters, words[i], orbits[i])
    phantoms = int(m - genuine.sum())

    endpoint_dropped = 0
    if system.identify_endpoints:
        at_top = np.abs(xs - amb.hi) <= DEDUPE_TOL
        endpoint_dropped = int((genuine & at_top).sum())
        genuine &= ~at_top

    cycles = []
    merged = 0
    kept_sorted: list[float] = []
    for i in range(m):
        if not genuine[i]:
            continue
        x = float(xs[i])
        if dedupe:
            j = bisect_left(kept_sorted, x)
            near = (j < len(kept_sorted) and kept_sorted[j] - x <= DEDUPE_TOL) or (
                j > 0 and x - kept_sorted[j - 1] <= DEDUPE_TOL
            )
            if near:
                merged += 1
                continue
            insort(kept_sorted, x)
        cycles.append(
            Cycle(
                tuple(int(w) + 1 for w in words[i]),
                x,
                float(logws[i]),
                tuple(float(v) for v in orbits[i]),
            )
        )
    return tuple(cycles), merged, phantoms, endpoint_dropped


def enumerate_cycles(
    system: RandomSystem,
    omega,
    n: int | None = None,
    threads: int = 1,
    dedupe: bool = True,
    backend=None,
) -> CycleSet:
    """All random cycles of period n for one sample word.

    Walks the admissible-word tree (optionally split over ``threads`` by
    first symbol; the merged result is identical for any thread count),
    solves one root per cylinder, and filters to the genuine fixed-point set.
    """
    letters = _as_letters(omega, n)
    n = len(letters)
    if n < 1:
        raise ParameterError("period must be at least 1")
    count = count_admissible_words(system, letters)
    if count > WORD_GUARD:
        raise SizeGuardError(
            f"enumeration would visit {count} words (guard {WORD_GUARD})"
        )
    tables = build_tables(system)
    alphabet, _ = system.scheme()
    omega0 = np.array([letter - 1 for letter in letters], dtype=np.int32)

    first_syms = [s.sid - 1 for s in alphabet.of_map(letters[0] - 1)]
    if threads <= 1 or len(first_syms) <= 1:
        parts = [run_enumeration(tables, omega0, count, -1, backend)]
    else:
        caps = {
            s: count_admissible_words(system, letters, first_symbol=s + 1)
            for s in first_syms
        }
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(
                    lambda s: run_enumeration(tables, omega0, caps[s], s, backend),
                    first_syms,
                )
            )
    words = np.concatenate([p[0] for p in parts])
    xs = np.concatenate([p[1] for p in parts])
    logws = np.concatenate([p[2] for p in parts])
    orbits = np.concatenate([p[3] for p in parts])

    cycles, merged, phantoms, dropped = _filter_candidates(
        system, letters, words, xs, logws, orbits, dedupe
    )
    if cycles:
        logz = float(logsumexp(np.array([c.log_weight for c in cycles])))
    else:
        n0 = _system_mixing_index(system)
        if n0 is not None and n >= n0:
            raise NumericalError(
                f"no cycles found at period {n} >= mixing index {n0}"
            )
        logz = float("-inf")
    sw = omega if isinstance(omega, SampleWord) else SampleWord(letters)
    if len(sw) > n:
        sw = SampleWord(letters, sw.seed)
    return CycleSet(sw, cycles, logz, merged, phantoms, dropped)


def find_cycle_in_cylinder(system: RandomSystem, word, verify_dispatch: bool = True):
    """The unique fixed-point candidate of one admissible word, or None.

    Solves ``f_word(x) = x`` on the closed cylinder: bisection after a sign
    check, one Newton polish, and endpoint acceptance when the composition
    fixes a cylinder endpoint (the neutral boundary case).  With
    ``verify_dispatch`` the candidate's itinerary must agree with branch
    dispatch at any cell corners its orbit touches, which rejects points
    coded only by one-sided branch extensions.

    This path is deliberately independent of the enumeration kernels and is
    used to cross-check them.
    """
    word = tuple(int(a) for a in word)
    alphabet, _ = system.scheme()
    branches = []
    letters = []
    for sid in word:
        sym = alphabet.symbols[sid - 1]
        branches.append(system.maps[sym.map_index].branches[sym.branch_label - 1])
        letters.append(sym.map_index + 1)
    cyl = cylinder_interval(system, word)

    def compose(x):
        for b in branches:
            x = b.value(x)
        return x

    glo = compose(cyl.lo) - cyl.lo
    ghi = compose(cyl.hi) - cyl.hi
    if abs(glo) <= _ENDPOINT_TOL:
        root = cyl.lo
    elif abs(ghi) <= _ENDPOINT_TOL:
        root = cyl.hi
    elif (glo < 0.0) != (ghi < 0.0):
        a, b = cyl.lo, cyl.hi
        fa = glo
        while b - a > 1e-12:
            mid = 0.5 * (a + b)
            fm = compose(mid) - mid
            if (fm < 0.0) == (fa < 0.0):
                a, fa = mid, fm
            else:
                b = mid
        root = 0.5 * (a + b)
        d = 1.0
        v = root
        for br in branches:
            d *= br.deriv(v)
            v = br.value(v)
        if d != 1.0:
            polished = root - (v - root) / (d - 1.0)
            if cyl.lo - 1e-12 <= polished <= cyl.hi + 1e-12:
                root = min(max(polished, cyl.lo), cyl.hi)
    else:
        return None

    root = float(_snap_to_boundaries(system, np.array([root]))[0])
    orbit = []
    lw = 0.0
    v = root
    for b in branches:
        orbit.append(v)
        lw += log(abs(b.deriv(v)))
        v = b.value(v)

    if verify_dispatch:
        word0 = [sid - 1 for sid in word]
        if not _coding_consistent(system, alphabet, letters, word0, orbit):
            return None
    return Cycle(word, root, -lw, tuple(orbit))


def cycle_measure_xi(cs: CycleSet) -> WeightedPointMeasure:
    """Weighted empirical measure: each cycle spreads its weight over its orbit.

    Orbit points of distinct cycles that coincide mathematically agree
    numerically only up to slope^n rounding, so atoms merge at the same
    tolerance used for cycle deduplication.
    """
    if not cs.cycles:
        raise ParameterError("empty cycle set has no measure")
    n = cs.n
    ws = cs.normalized_weights()
    points = np.concatenate([np.asarray(c.orbit) for c in cs.cycles])
    weights = np.repeat(ws / n, n)
    return WeightedPointMeasure(points, weights, merge_tol=DEDUPE_TOL)


def cycle_point_measure(cs: CycleSet) -> WeightedPointMeasure:
    """Point masses at the cycle points themselves, weights w(x)/Z."""
    if not cs.cycles:
        raise ParameterError("empty cycle set has no measure")
    return WeightedPointMeasure(
        [c.point for c in cs.cycles], cs.normalized_weights(), merge_tol=DEDUPE_TOL
    )


@dataclass(frozen=True)
class SkewEnumeration:
    """Cycles of every sample word of one period, plus annealed aggregates."""

    n: int
    per_omega: tuple[tuple[tuple[int, ...], CycleSet], ...]
    log_partition: float  # log Z_{p,n} = log sum_omega Q_p(omega) Z_{omega,n}
    measure: WeightedPointMeasure  # the annealed, orbit-spread cycle measure


def _log_q(system: RandomSystem, letters) -> float:
    return float(sum(log(system.p[letter - 1]) for letter in letters))


def enumerate_skew_fixed_points(
    system: RandomSystem, n: int, threads: int = 1
) -> SkewEnumeration:
    """Enumerate cycles for every sample word of length n and aggregate.

    The aggregate measure weights each cycle by Q_p(omega) w(x) / Z_{p,n},
    spread over its orbit.
    """
    if n < 1:
        raise ParameterError("period must be at least 1")
    total = count_all_words(system, n)
    if total > WORD_GUARD:
        raise SizeGuardError(
            f"skew enumeration would visit {total} words (guard {WORD_GUARD})"
        )
    per_omega = []
    log_terms = []
    for letters in product(range(1, system.n_maps + 1), repeat=n):
        cs = enumerate_cycles(system, letters, threads=threads)
        per_omega.append((letters, cs))
        log_terms.append(_log_q(system, letters) + cs.logZ)
    log_zpn = float(logsumexp(np.array(log_terms)))

    points = []
    weights = []
    for letters, cs in per_omega:
        lq = _log_q(system, letters)
        for c in cs.cycles:
            w = float(np.exp(lq + c.log_weight - log_zpn)) / n
            points.extend(c.orbit)
            weights.extend([w] * n)
    measure = WeightedPointMeasure(points, weights, merge_tol=DEDUPE_TOL)
    return SkewEnumeration(n, tuple(per_omega), log_zpn, measure)


def annealed_partition_direct(system: RandomSystem, n: int) -> float:
    """log Z_{p,n} by direct enumeration of periodic symbol words.

    Independent route for cross-checking :func:`enumerate_skew_fixed_points`:
    walks admissible symbol words over the whole alphabet, keeps those that
    close up under the transition matrix, solves each cylinder with
    :func:`find_cycle_in_cylinder`, and applies the same point-set filters
    per sample word.
    """
    alphabet, matrix = system.scheme()
    if count_all_words(system, n) > WORD_GUARD:
        raise SizeGuardError("periodic-word enumeration exceeds the guard")
    sids = [s.sid for s in alphabet.symbols]
    mat = matrix.m
    groups: dict[tuple[int, ...], list] = {}

    def rec(prefix):
        k = len(prefix)
        if k == n:
            if mat[prefix[-1] - 1, prefix[0] - 1]:
                cyc = find_cycle_in_cylinder(system, prefix)
                if cyc is not None:
                    letters = tuple(
                        alphabet.owner(sid) + 1 for sid in prefix
                    )
                    groups.setdefault(letters, []).append(cyc)
            return
        for sid in sids:
            if k == 0 or mat[prefix[-1] - 1, sid - 1]:
                rec(prefix + (sid,))

    rec(())

    amb = system.ambient
    log_terms = []
    for letters, cycles in groups.items():
        kept_sorted: list[float] = []
        lq = _log_q(system, letters)
        for c in cycles:  # cycles arrive in word order per group
            if system.identify_endpoints and abs(c.point - amb.hi) <= DEDUPE_TOL:
                continue
            j = bisect_left(kept_sorted, c.point)
            near = (
                j < len(kept_sorted) and kept_sorted[j] - c.point <= DEDUPE_TOL
            ) or (j > 0 and c.point - kept_sorted[j - 1] <= DEDUPE_TOL)
            if near:
                continue
            insort(kept_sorted, c.point)
            log_terms.append(lq + c.log_weight)
    if not log_terms:
        return float("-inf")
    return float(logsumexp(np.array(log_terms)))


def sample_averaged_measure(
    system: RandomSystem, n: int, seeds, threads: int = 1
) -> WeightedPointMeasure:
    """Monte Carlo average of the cycle measures over sampled words."""
    seeds = list(seeds)
    if not seeds:
        raise ParameterError("need at least one seed")
    points = []
    weights = []
    for seed in seeds:
        omega = SampleWord.sample(system, seed, n)
        xi = cycle_measure_xi(enumerate_cycles(system, omega, threads=threads))
        points.append(xi.points)
        weights.append(xi.weights / len(seeds))
    return WeightedPointMeasure(
        np.concatenate(points), np.concatenate(weights), merge_tol=DEDUPE_TOL
    )


def enumerate_preimages(
    system: RandomSystem, omega, n: int, x0: float, spread_orbits: bool = True
) -> WeightedPointMeasure:
    """Weighted preimages of a point: measure over the orbit prefixes.

    Each admissible word whose composition image contains ``x0`` contributes
    the preimage ``x = f_word^{-1}(x0)`` with weight 1/|composition'(x)|,
    normalised over all preimages.  By default each preimage is spread over
    its forward orbit x, T x, ..., T^{n-1} x; with ``spread_orbits=False``
    the atoms sit at the preimages themselves.
    """
    amb = system.ambient
    if not (amb.lo < x0 < amb.hi):
        raise DomainError(f"x0={x0} must lie in the open ambient interval")
    for m in system.maps:
        for q in m.partition_points():
            if abs(x0 - q) <= 1e-12:
                raise DomainError(
                    f"x0={x0} lies on a cell boundary; membership is ambiguous"
                )
    if n == 0:
        return WeightedPointMeasure.delta(x0)

    letters = _as_letters(omega, n)
    alphabet, matrix = system.scheme()
    if count_admissible_words(system, letters) > WORD_GUARD:
        raise SizeGuardError("preimage enumeration exceeds the guard")

    def branch_of(sid):
        sym = alphabet.symbols[sid - 1]
        return system.maps[sym.map_index].branches[sym.branch_label - 1]

    images = {}
    for s in alphabet.symbols:
        b = branch_of(s.sid)
        y0, y1 = b.value(b.domain.lo), b.value(b.domain.hi)
        images[s.sid] = (min(y0, y1), max(y0, y1))

    results = []

    def back(k, y, suffix):
        """Choose the symbol at position k (1-based), pulling y back through it."""
        for s in alphabet.of_map(letters[k - 1] - 1):
            sid = s.sid
            if suffix and not matrix.allows(sid, suffix[0]):
                continue
            ilo, ihi = images[sid]
            if not (ilo - 1e-12 <= y <= ihi + 1e-12):
                continue
            b = branch_of(sid)
            yk = b.inverse(y)
            yk = min(max(yk, b.domain.lo), b.domain.hi)
            if k == 1:
                results.append(((sid,) + suffix, yk))
            else:
                back(k - 1, yk, (sid,) + suffix)

    back(n, float(x0), ())
    results.sort(key=lambda t: t[0])

    words = np.array([w for w, _ in results], dtype=np.int64)
    xs = np.array([x for _, x in results])
    if len(xs) == 0:
        raise NumericalError(f"no admissible preimages of {x0} at depth {n}")
    xs = _snap_to_boundaries(system, xs)

    # orbits, weights, and coding-consistency verification
    orbits = np.empty((len(xs), n))
    logws = np.zeros(len(xs))
    vs = xs.copy()
    for k in range(n):
        orbits[:, k] = vs
        for i, sid in enumerate(words[:, k]):
            b = branch_of(int(sid))
            logws[i] -= log(abs(b.deriv(vs[i])))
        vs = np.array([branch_of(int(words[i, k])).value(vs[i]) for i in range(len(xs))])
    genuine = np.abs(vs - x0) <= _DISPATCH_REL_TOL * amb.width
    for i in range(len(xs)):
        if genuine[i]:
            word0 = [int(s) - 1 for s in words[i]]
            genuine[i] = _coding_consistent(system, alphabet, letters, word0, orbits[i])

    kept_sorted: list[float] = []
    keep_rows = []
    for i in range(len(xs)):
        if not genuine[i]:
            continue
        j = bisect_left(kept_sorted, xs[i])
        near = (j < len(kept_sorted) and kept_sorted[j] - xs[i] <= DEDUPE_TOL) or (
            j > 0 and xs[i] - kept_sorted[j - 1] <= DEDUPE_TOL
        )
        if near:
            continue
        insort(kept_sorted, float(xs[i]))
        keep_rows.append(i)
    if not keep_rows:
        raise NumericalError(f"no verified preimages of {x0} at depth {n}")
    keep_rows = np.array(keep_rows)
    logws = logws[keep_rows]
    orbits = orbits[keep_rows]
    logz = float(logsumexp(logws))
    w_norm = np.exp(logws - logz)
    if not spread_orbits:
        return WeightedPointMeasure(orbits[:, 0], w_norm, merge_tol=DEDUPE_TOL)
    points = orbits.reshape(-1)
    weights = np.repeat(w_norm / n, n)
    return WeightedPointMeasure(points, weights, merge_tol=DEDUPE_TOL)


@dataclass(frozen=True)
class PressureResult:
    per_sample: float
    annealed: float | None


def pressure_from_cycles(
    system: RandomSystem, omega, n: int, annealed="auto", threads: int = 1
) -> PressureResult:
    """Empirical pressure (1/n) log Z; both flavours decay to 0 as n grows."""
    cs = enumerate_cycles(system, omega, n, threads=threads)
    per_sample = cs.logZ / n
    log_zpn = None
    want = annealed is True or (
        annealed == "auto" and count_all_words(system, n) <= ANNEALED_AUTO_LIMIT
    )
    if want:
        log_zpn = enumerate_skew_fixed_points(system, n, threads).log_partition / n
    return PressureResult(float(per_sample), log_zpn)


def weighted_functional_average(cs: CycleSet, functional) -> float:
    """Normalised weighted sum of a per-cycle functional: Z^{-1} sum w(x) f."""
    if not cs.cycles:
        raise ParameterError("empty cycle set")
    ws = cs.normalized_weights()
    total = 0.0
    for w, c in zip(ws, cs.cycles):
        val = functional(c, cs.omega)
        if not isfinite(val):
            raise NumericalError(f"functional not finite on cycle {c.word}")
        total += w * val
    return float(total)


def birkhoff_average(phi):
    """Functional (1/n) sum_k phi(letter_{k+1}, x_k) along the cycle orbit."""

    def fn(cycle: Cycle, omega: SampleWord) -> float:
        lets = omega.letters
        return sum(phi(lets[k], x) for k, x in enumerate(cycle.orbit)) / len(
            cycle.orbit
        )

    return fn


def birkhoff_ratio(phi, psi):
    """Functional sum_k phi / sum_k psi along the orbit (psi must not vanish)."""

    def fn(cycle: Cycle, omega: SampleWord) -> float:
        lets = omega.letters
        top = sum(phi(lets[k], x) for k, x in enumerate(cycle.orbit))
        bot = sum(psi(lets[k], x) for k, x in enumerate(cycle.orbit))
        return top / bot

    return fn


def birkhoff_product(phi, psi):
    """Functional (1/n^2) (sum_k phi)(sum_k psi) along the orbit."""

    def fn(cycle: Cycle, omega: SampleWord) -> float:
        lets = omega.letters
        top = sum(phi(lets[k], x) for k, x in enumerate(cycle.orbit))
        bot = sum(psi(lets[k], x) for k, x in enumerate(cycle.orbit))
        return top * bot / len(cycle.orbit) ** 2

    return fn


def pair_sum_statistic(g, pi1, pi2):
    """Functional (1/n^2) sum_{k1,k2} g(pi1(...k1) + pi2(...k2))."""

    def fn(cycle: Cycle, omega: SampleWord) -> float:
        lets = omega.letters
        u = [pi1(lets[k], x) for k, x in enumerate(cycle.orbit)]
        v = [pi2(lets[k], x) for k, x in enumerate(cycle.orbit)]
        return sum(g(a + b) for a in u for b in v) / len(u) ** 2

    return fn
