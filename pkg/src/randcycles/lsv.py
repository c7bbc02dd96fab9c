"""Intermittent interval maps with a common neutral fixed point at 0.

The one-parameter family ``x (1 + 2^a x^a)`` on [0, 1/2) with ``2x - 1`` on
[1/2, 1] is fully branched, so random systems built from several parameters
have an all-ones transition matrix; the neutral origin makes the averaged
operator fail the contraction criterion, and whether an integrable
stationary density survives depends on the parameters through the tails of
the sojourn time near 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cycles import cycle_measure_xi, enumerate_cycles
from .errors import NumericalError, ParameterError
from .maps import AffineBranch, Interval, LsvLeftBranch, MarkovMap
from .symbolic import RandomSystem


@dataclass(frozen=True)
class LsvSpec:
    """Parameters of an intermittent random system: exponents and probabilities."""

    alphas: tuple[float, ...]
    p: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "p", tuple(float(q) for q in self.p))
        if not self.alphas:
            raise ParameterError("need at least one exponent")
        if any(a <= 0 for a in self.alphas):
            raise ParameterError("exponents must be positive")
        if len(self.p) != len(self.alphas):
            raise ParameterError("probability vector must match exponent count")


def lsv_map(alpha: float) -> MarkovMap:
    """One intermittent map: neutral left branch, affine right branch."""
    if alpha <= 0:
        raise ParameterError("alpha must be positive")
    return MarkovMap(
        (
            LsvLeftBranch(Interval(0.0, 0.5), float(alpha), label=1),
            AffineBranch(Interval(0.5, 1.0), 2.0, -1.0, label=2),
        ),
        Interval(0.0, 1.0),
        exceptional=(0.0,),
        name=f"lsv({alpha})",
    )


def build_lsv_system(spec: LsvSpec) -> RandomSystem:
    """Random system of intermittent maps on [0, 1]."""
    return RandomSystem(
        tuple(lsv_map(a) for a in spec.alphas), spec.p, name="lsv"
    )


@dataclass(frozen=True)
class TailResult:
    """Lebesgue tail of the sojourn time in the neutral cell, with a log-log fit."""

    ns: np.ndarray
    tails: np.ndarray
    exponent: float


def return_time_tail(
    markov_map: MarkovMap, branch_index: int = 1, n_max: int = 1000
) -> TailResult:
    """Tail measures Leb{time to leave the neutral cell > n} and their decay rate.

    The sets {t > n} are the intervals [0, y_n) where y_n is the n-th
    preimage of the cell's top endpoint under the neutral branch (bisection);
    the exponent is the least-squares slope of log tail against log n over
    the last nine tenths of the range, and should be close to -1/alpha.
    """
    branch = markov_map.branches[branch_index - 1]
    y = branch.domain.hi
    tails = np.empty(n_max)
    for k in range(n_max):
        y = branch.inverse(y)
        tails[k] = y - branch.domain.lo
        if k > 0 and tails[k] >= tails[k - 1]:
            raise NumericalError("preimage sequence failed to decrease")
    ns = np.arange(1, n_max + 1)
    sel = ns >= max(2, n_max // 10)
    slope = np.polyfit(np.log(ns[sel]), np.log(tails[sel]), 1)[0]
    return TailResult(ns, tails, float(slope))


def classify_case(spec: LsvSpec) -> str:
    """Equilibrium-state structure implied by the exponents.

    'c': all exponents below 1, every map has a normalisable absolutely
    continuous invariant measure, and the point mass at 0 coexists with an
    absolutely continuous stationary measure (uniqueness fails).
    'b': all exponents at least 1, the sojourn tails are non-integrable and
    the point mass at 0 is the unique equilibrium state.
    'unresolved': mixed exponents; neither criterion applies.
    """
    alphas = sorted(spec.alphas)
    if alphas[-1] < 1.0:
        return "c"
    if alphas[0] >= 1.0:
        return "b"
    return "unresolved"


@dataclass(frozen=True)
class NeutralMassProfile:
    """How much cycle-measure mass sits near the neutral point, per epsilon."""

    n: int
    masses: tuple[tuple[float, float], ...]  # (eps, xi-mass of [0, eps))
    neutral_weight_normalized: float


def neutral_mass_profile(
    system: RandomSystem,
    omega,
    n: int,
    eps_values=(0.01, 0.05, 0.1),
    threads: int = 1,
) -> NeutralMassProfile:
    """Diagnostics of weight concentration at the common neutral fixed point.

    Reports the cycle measure's mass of [0, eps) for each epsilon and the
    normalised weight 1/Z of the all-left neutral cycle (its raw weight is 1
    because the derivative is 1 along the orbit at 0).
    """
    cs = enumerate_cycles(system, omega, n, threads=threads)
    xi = cycle_measure_xi(cs)
    masses = tuple((float(e), float(xi.mass_below(e))) for e in eps_values)
    neutral = 0.0
    for c in cs.cycles:
        if abs(c.point) <= 1e-12:
            neutral = float(np.exp(c.log_weight - cs.logZ))
            break
    return NeutralMassProfile(n, masses, neutral)
