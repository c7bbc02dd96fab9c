"""Kernel backend selection and branch-table packing.

The hot loop (admissible-word tree walk with root solving) exists twice: a
compiled Cython extension and a pure-Python twin.  The compiled one is
preferred when its import succeeds; both expose the same
``enumerate_candidates`` contract and produce bit-identical output, so the
choice only affects speed.  ``benchmarks/bench_enumeration.py`` compares them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels_py

try:  # pragma: no cover - depends on whether the extension was built
    from . import _kernels_cy

    _default = _kernels_cy
except ImportError:  # pragma: no cover
    _kernels_cy = None
    _default = _kernels_py

BACKEND = _default.BACKEND_NAME


def available_backends() -> dict:
    out = {"pure": _kernels_py}
    if _kernels_cy is not None:
        out["compiled"] = _kernels_cy
    return out


def get_backend(name: str | None = None):
    """Return a kernel module by name ('pure' / 'compiled'); default backend if None."""
    if name is None:
        return _default
    backends = available_backends()
    if name not in backends:
        raise KeyError(f"kernel backend {name!r} not available (have {sorted(backends)})")
    return backends[name]


@dataclass(frozen=True)
class SystemTables:
    """Flat branch arrays consumed by the kernels (symbols are 0-based rows)."""

    br_lo: np.ndarray
    br_hi: np.ndarray
    br_kind: np.ndarray
    br_p1: np.ndarray
    br_p2: np.ndarray
    br_owner: np.ndarray
    trans: np.ndarray
    amb_lo: float
    amb_hi: float

    @property
    def n_symbols(self) -> int:
        return len(self.br_lo)


def build_tables(system) -> SystemTables:
    """Pack a system's alphabet and branch data into kernel arrays (cached)."""
    cache = system._cache
    if "tables" not in cache:
        alphabet, matrix = system.scheme()
        n = len(alphabet)
        lo = np.empty(n)
        hi = np.empty(n)
        kind = np.empty(n, dtype=np.int32)
        p1 = np.empty(n)
        p2 = np.empty(n)
        owner = np.empty(n, dtype=np.int32)
        for s in alphabet.symbols:
            b = system.maps[s.map_index].branches[s.branch_label - 1]
            kcode, v1, v2 = b.kernel_params()
            j = s.sid - 1
            lo[j], hi[j] = b.domain.lo, b.domain.hi
            kind[j], p1[j], p2[j] = kcode, v1, v2
            owner[j] = s.map_index
        cache["tables"] = SystemTables(
            lo,
            hi,
            kind,
            p1,
            p2,
            owner,
            np.ascontiguousarray(matrix.m, dtype=np.uint8),
            system.ambient.lo,
            system.ambient.hi,
        )
    return cache["tables"]


def run_enumeration(
    tables: SystemTables,
    omega0: np.ndarray,
    word_cap: int,
    first_symbol: int = -1,
    backend=None,
):
    """Invoke a kernel; returns (words, xs, logws, orbits) trimmed to the hits."""
    impl = backend if backend is not None else _default
    n = len(omega0)
    words = np.zeros((word_cap, n), dtype=np.int32)
    xs = np.zeros(word_cap)
    logws = np.zeros(word_cap)
    orbits = np.zeros((word_cap, n))
    m = impl.enumerate_candidates(
        tables.br_lo,
        tables.br_hi,
        tables.br_kind,
        tables.br_p1,
        tables.br_p2,
        tables.br_owner,
        tables.trans,
        np.asarray(omega0, dtype=np.int32),
        int(first_symbol),
        words,
        xs,
        logws,
        orbits,
    )
    return words[:m], xs[:m], logws[:m], orbits[:m]
