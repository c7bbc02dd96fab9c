"""Symbolic scheme for a random system: alphabet, transitions, words, cylinders.

The branches of all maps get disjoint global symbol ids (1-based).  A symbol
word ``a_1 ... a_n`` is admissible for a sample word ``omega`` when symbol
``a_k`` belongs to map ``omega_k`` and every consecutive pair is allowed by
the transition matrix.  Each admissible word indexes a cylinder interval, the
set of points whose orbit follows that branch itinerary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InadmissibleWordError,
    MarkovStructureError,
    ParameterError,
)
from .maps import Interval, MarkovMap, validate_markov, wraps_as_circle


@dataclass
class RandomSystem:
    """Finitely many Markov maps on a common interval with selection probabilities.

    ``N = 1`` is allowed and reproduces the deterministic theory; it is used
    as a test oracle throughout.
    """

    maps: tuple[MarkovMap, ...]
    p: tuple[float, ...]
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.maps = tuple(self.maps)
        self.p = tuple(float(q) for q in self.p)
        if len(self.maps) < 1:
            raise ParameterError("need at least one map")
        if len(self.p) != len(self.maps):
            raise ParameterError("probability vector length must match map count")
        if any(q <= 0 for q in self.p) or abs(sum(self.p) - 1.0) > 1e-12:
            raise ParameterError("probabilities must be positive and sum to 1")
        amb = self.maps[0].ambient
        for m in self.maps[1:]:
            if abs(m.ambient.lo - amb.lo) > 1e-12 or abs(m.ambient.hi - amb.hi) > 1e-12:
                raise ParameterError("all maps must share the ambient interval")

    @property
    def n_maps(self) -> int:
        return len(self.maps)

    @property
    def ambient(self) -> Interval:
        return self.maps[0].ambient

    @property
    def identify_endpoints(self) -> bool:
        """True when every map glues the ambient endpoints (circle maps)."""
        if "wrap" not in self._cache:
            self._cache["wrap"] = all(wraps_as_circle(m) for m in self.maps)
        return self._cache["wrap"]

    def scheme(self, tol: float = 1e-9) -> tuple["Alphabet", "TransitionMatrix"]:
        """Alphabet and transition matrix, built once and cached."""
        if "scheme" not in self._cache:
            self._cache["scheme"] = build_alphabet_and_matrix(self, tol)
        return self._cache["scheme"]


@dataclass(frozen=True)
class Symbol:
    """One global symbol: a branch of one of the system's maps."""

    sid: int  # global id, 1-based
    map_index: int  # 0-based index into system.maps
    branch_label: int
    cell: Interval


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[Symbol, ...]

    def __len__(self):
        return len(self.symbols)

    def of_map(self, map_index: int) -> tuple[Symbol, ...]:
        return tuple(s for s in self.symbols if s.map_index == map_index)

    def cell(self, sid: int) -> Interval:
        return self.symbols[sid - 1].cell

    def owner(self, sid: int) -> int:
        return self.symbols[sid - 1].map_index


@dataclass(frozen=True)
class TransitionMatrix:
    """0/1 matrix over global symbols: entry (a, b) says cl(T(J(a))) covers J(b)."""

    m: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "m", np.asarray(self.m, dtype=np.uint8))

    @property
    def n(self) -> int:
        return self.m.shape[0]

    def allows(self, a: int, b: int) -> bool:
        return bool(self.m[a - 1, b - 1])

    def is_irreducible(self) -> bool:
        reach = np.eye(self.n, dtype=bool) | self.m.astype(bool)
        for _ in range(self.n):
            reach = reach | (reach @ reach)
        return bool(reach.all())


def build_alphabet_and_matrix(
    system: RandomSystem, tol: float = 1e-9
) -> tuple[Alphabet, TransitionMatrix]:
    """Disjoint-union alphabet and the branch-to-cell covering matrix.

    Requires every map to pass :func:`validate_markov`.  Raises
    :class:`MarkovStructureError` when some branch image overlaps a cell of
    any map without covering it, naming the offending branch.
    """
    symbols = []
    for i, m in enumerate(system.maps):
        report = validate_markov(m, tol)
        if not report.passed:
            raise MarkovStructureError(
                f"map {i + 1} fails Markov validation "
                f"(max endpoint mismatch {report.max_endpoint_mismatch:.3e}, "
                f"unexpected non-expansion {report.unexpected_nonexpansion})"
            )
        for b in m.branches:
            symbols.append(Symbol(len(symbols) + 1, i, b.label, b.domain))
    alphabet = Alphabet(tuple(symbols))

    n = len(symbols)
    mat = np.zeros((n, n), dtype=np.uint8)
    for a_sym in symbols:
        branch = system.maps[a_sym.map_index].branches[a_sym.branch_label - 1]
        y0, y1 = branch.value(branch.domain.lo), branch.value(branch.domain.hi)
        img_lo, img_hi = (y0, y1) if y0 <= y1 else (y1, y0)
        for b_sym in symbols:
            cell = b_sym.cell
            covers = img_lo <= cell.lo + tol and cell.hi <= img_hi + tol
            overlaps = min(img_hi, cell.hi) - max(img_lo, cell.lo) > tol
            if overlaps and not covers:
                raise MarkovStructureError(
                    f"image of map {a_sym.map_index + 1} branch {a_sym.branch_label} "
                    f"([{img_lo:.12g}, {img_hi:.12g}]) meets the interior of cell "
                    f"[{cell.lo:.12g}, {cell.hi:.12g}] of map {b_sym.map_index + 1} "
                    "without covering it"
                )
            if covers:
                mat[a_sym.sid - 1, b_sym.sid - 1] = 1
    return alphabet, TransitionMatrix(mat)


def mixing_index(matrix: TransitionMatrix, n_max: int) -> int | None:
    """Smallest power with all entries positive, or None up to ``n_max``."""
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    base = matrix.m.astype(bool)
    power = base.copy()
    for k in range(1, n_max + 1):
        if power.all():
            return k
        power = power @ base
    return None


@dataclass(frozen=True)
class SampleWord:
    """A finite sample of map choices (letters in 1..N), with seed provenance."""

    letters: tuple[int, ...]
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(x) for x in self.letters))

    def __len__(self):
        return len(self.letters)

    def __getitem__(self, k):
        return self.letters[k]

    @classmethod
    def sample(cls, system: RandomSystem, seed: int, n: int) -> "SampleWord":
        """Draw n letters i.i.d. with the system's probabilities.

        Uses the named PCG64 generator; one uniform is consumed per letter so
        that longer samples from the same seed share their prefix.
        """
        gen = np.random.Generator(np.random.PCG64(seed))
        cum = np.cumsum(system.p)
        us = gen.random(n)
        letters = np.searchsorted(cum, us, side="right") + 1
        letters = np.minimum(letters, system.n_maps)
        return cls(tuple(int(v) for v in letters), seed)

    @classmethod
    def constant(cls, letter: int, n: int) -> "SampleWord":
        return cls((int(letter),) * n)


def _as_letters(omega, n: int | None = None) -> tuple[int, ...]:
    letters = tuple(omega.letters if isinstance(omega, SampleWord) else omega)
    if n is not None and len(letters) < n:
        raise ParameterError(f"sample word has {len(letters)} letters, need {n}")
    return letters[:n] if n is not None else letters


def admissible_words(
    matrix: TransitionMatrix, alphabet: Alphabet, omega, n: int | None = None
):
    """Yield the admissible symbol words for ``omega`` in lexicographic order.

    Words are tuples of global symbol ids whose k-th symbol belongs to map
    ``omega_k``.  Only the transition structure is used here; cylinder
    emptiness pruning happens in the cycle enumeration.
    """
    letters = _as_letters(omega, n)
    n = len(letters)
    if n == 0:
        yield ()
        return
    by_map = [tuple(s.sid for s in alphabet.of_map(i)) for i in range(max(letters))]
    mat = matrix.m

    def rec(prefix):
        k = len(prefix)
        if k == n:
            yield prefix
            return
        for sid in by_map[letters[k] - 1]:
            if k == 0 or mat[prefix[-1] - 1, sid - 1]:
                yield from rec(prefix + (sid,))

    yield from rec(())


def count_admissible_words(
    system: RandomSystem, omega, n: int | None = None, first_symbol: int | None = None
) -> int:
    """Exact admissible-word count from transition-matrix block products.

    ``first_symbol`` (1-based) restricts the initial symbol; used to size
    per-thread work when the tree is partitioned by its root.
    """
    alphabet, matrix = system.scheme()
    letters = _as_letters(omega, n)
    if not letters:
        return 1
    owners = np.array([s.map_index for s in alphabet.symbols])
    v = (owners == letters[0] - 1).astype(int).astype(object)  # big ints: no overflow
    if first_symbol is not None:
        mask = np.zeros(len(v), dtype=object)
        mask[first_symbol - 1] = 1
        v = v * mask
    m = matrix.m.astype(int).astype(object)
    for letter in letters[1:]:
        v = np.dot(v, m) * (owners == letter - 1).astype(int)
    return int(v.sum())


def count_all_words(system: RandomSystem, n: int) -> int:
    """Admissible symbol-word count of length n over all sample words."""
    alphabet, matrix = system.scheme()
    v = np.ones(len(alphabet), dtype=object)  # exact big-int arithmetic
    m = matrix.m.astype(object)
    for _ in range(n - 1):
        v = np.dot(v, m)
    return int(v.sum())


def cylinder_interval(system: RandomSystem, word) -> Interval:
    """Cylinder of an admissible word: pull the ambient back through inverse branches.

    Follows the backward recursion K_n = J(a_n), K_k = J(a_k) ∩ f_{a_k}^{-1}(K_{k+1});
    affine pieces invert in closed form, the intermittent piece by bisection.
    """
    word = tuple(int(a) for a in word)
    if not word:
        raise ParameterError("cylinder of the empty word is the whole interval")
    alphabet, matrix = system.scheme()
    for a, b in zip(word, word[1:]):
        if not matrix.allows(a, b):
            raise InadmissibleWordError(f"transition {a} -> {b} not allowed")

    def branch_of(sid: int):
        sym = alphabet.symbols[sid - 1]
        return system.maps[sym.map_index].branches[sym.branch_label - 1]

    last = branch_of(word[-1])
    klo, khi = last.domain.lo, last.domain.hi
    for sid in reversed(word[:-1]):
        b = branch_of(sid)
        u, v = b.inverse(klo), b.inverse(khi)
        if u > v:
            u, v = v, u
        klo = max(b.domain.lo, u)
        khi = min(b.domain.hi, v)
        if khi <= klo:
            raise InadmissibleWordError(f"empty cylinder for word {word}")
    return Interval(klo, khi)
