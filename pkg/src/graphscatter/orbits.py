"""Primitive periodic orbits on the directed bonds: enumeration and amplitudes.

A periodic orbit is a cyclic sequence of following directed bonds,
identified up to rotation (a cycle and its reversal are distinct orbits).
Orbits are stored in canonical form, the lexicographically minimal
rotation, and kept columnar (flat integer arrays) so catalogs with millions
of orbits stay affordable; PrimitiveOrbit views are materialized on demand.

The orbit amplitude a_p multiplies the scattering entries along the cycle;
its trace identity  tr U^n = sum_{m|n} m sum_{p in P(m)} a_p^{n/m}  is the
workhorse cross-check between the spectral and the combinatorial sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CatalogDepthError, CatalogSizeError
from .graph import DirectedBondSpace, Graph
from .scattering import _degree_vector, scattering_phases

DEFAULT_MAX_ORBITS = 10_000_000
_CHUNK_ROWS = 1_000_000


@dataclass
class PrimitiveOrbit:
    """One primitive periodic orbit in canonical rotation."""

    bonds: tuple[int, ...]
    backscatter_count: int

    @property
    def period(self) -> int:
        return len(self.bonds)

    @property
    def no_backtrack(self) -> bool:
        return self.backscatter_count == 0

    def validate(self, space: DirectedBondSpace) -> None:
        """Re-check the defining invariants; raises AssertionError on failure."""
        n = self.period
        seq = self.bonds
        for k in range(n):
            nxt = seq[(k + 1) % n]
            assert space.terminus[seq[k]] == space.origin[nxt], "bonds do not follow"
        rotations = [tuple(seq[k:]) + tuple(seq[:k]) for k in range(1, n)]
        assert all(rot > seq for rot in rotations), "not the minimal rotation or not primitive"
        beta = sum(1 for k in range(n) if seq[(k + 1) % n] == space.reversal[seq[k]])
        assert beta == self.backscatter_count, "wrong back-scatter count"


class _LengthBlock:
    """Columnar store of all canonical orbits of one period."""

    __slots__ = ("walks", "beta", "_stats")

    def __init__(self, walks: np.ndarray, beta: np.ndarray):
        self.walks = walks  # (count, n) bond indices
        self.beta = beta  # (count,) back-scatter counts
        self._stats = None

    @property
    def count(self) -> int:
        return self.walks.shape[0]


class OrbitCatalog:
    """All primitive periodic orbits of a graph up to a maximum period."""

    def __init__(self, space: DirectedBondSpace, max_length: int, no_backtrack: bool):
        self.space = space
        self.max_length = max_length
        self.no_backtrack = no_backtrack
        self._blocks: dict[int, _LengthBlock] = {}

    # -- counts -------------------------------------------------------------

    def count(self, n: int) -> int:
        """|P(n)|, or |C(n)| for a no-backtrack catalog."""
        block = self._blocks.get(n)
        return 0 if block is None else block.count

    def count_no_backtrack(self, n: int) -> int:
        """|C(n)|: primitive n-orbits without back-scatter."""
        block = self._blocks.get(n)
        return 0 if block is None else int(np.sum(block.beta == 0))

    def total(self) -> int:
        return sum(b.count for b in self._blocks.values())

    def counts_table(self) -> dict[int, tuple[int, int]]:
        """n -> (|P(n)|, |C(n)|) for every enumerated length."""
        return {
            n: (self.count(n), self.count_no_backtrack(n))
            for n in range(2, self.max_length + 1)
        }

    # -- orbit access ---------------------------------------------------------

    def orbit(self, n: int, idx: int) -> PrimitiveOrbit:
        block = self._blocks[n]
        return PrimitiveOrbit(
            bonds=tuple(int(b) for b in block.walks[idx]),
            backscatter_count=int(block.beta[idx]),
        )

    def orbits_of_length(self, n: int) -> list[PrimitiveOrbit]:
        return [self.orbit(n, i) for i in range(self.count(n))]

    @property
    def orbits_by_length(self) -> dict[int, list[PrimitiveOrbit]]:
        """Materialized orbit lists per length; avoid on very large catalogs."""
        return {n: self.orbits_of_length(n) for n in sorted(self._blocks)}

    def iter_orbits(self, max_length: int | None = None):
        top = self.max_length if max_length is None else max_length
        for n in sorted(self._blocks):
            if n > top:
                break
            block = self._blocks[n]
            for i in range(block.count):
                yield self.orbit(n, i)

    def export_jsonl(self, fh, max_length: int | None = None) -> int:
        """Write one {"n":..,"beta":..,"bonds":[..]} JSON object per line."""
        count = 0
        for n in sorted(self._blocks):
            if max_length is not None and n > max_length:
                break
            block = self._blocks[n]
            for i in range(block.count):
                bonds = ",".join(str(int(b)) for b in block.walks[i])
                fh.write(f'{{"n": {n}, "beta": {int(block.beta[i])}, "bonds": [{bonds}]}}\n')
                count += 1
        return count

    def require_depth(self, n: int) -> None:
        if n > self.max_length:
            raise CatalogDepthError(
                f"catalog enumerated to length {self.max_length}, need {n}"
            )

    # -- per-orbit sufficient statistics (standard-kind fast path) -----------

    def _vertex_stats(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """(passes_without_backscatter, backscatters) per orbit and vertex."""
        block = self._blocks[n]
        if block._stats is not None:
            return block._stats
        walks = block.walks
        m = walks.shape[0]
        nv = self.space.graph.num_vertices
        tv = self.space.terminus
        rev = self.space.reversal
        nb = np.zeros((m, nv), dtype=np.int32)
        bk = np.zeros((m, nv), dtype=np.int32)
        for k in range(n):
            step_vertex = tv[walks[:, k]]
            is_back = walks[:, (k + 1) % n] == rev[walks[:, k]]
            # bincount over (row, vertex) pairs, split by back-scatter flag
            for j in range(nv):
                at_j = step_vertex == j
                bk[:, j] += at_j & is_back
                nb[:, j] += at_j & ~is_back
        block._stats = (nb, bk)
        return block._stats


def _expand_chunk(chunk: np.ndarray, succ_pad: np.ndarray, start: int,
                  rev: np.ndarray, no_backtrack: bool) -> np.ndarray:
    """All one-step extensions of the walks in chunk staying on bonds >= start."""
    last = chunk[:, -1]
    cand = succ_pad[last]  # (m, max_deg), padded with -1
    ok = cand >= start
    if no_backtrack:
        ok &= cand != rev[last][:, None]
    rows, cols = np.nonzero(ok)
    out = np.empty((rows.size, chunk.shape[1] + 1), dtype=chunk.dtype)
    out[:, :-1] = chunk[rows]
    out[:, -1] = cand[rows, cols]
    return out


def _canonical_filter(walks: np.ndarray, start: int) -> np.ndarray:
    """Keep rows that are the minimal rotation of a primitive walk.

    Every row starts at bond `start`, the smallest bond it contains.  Rows
    where `start` occurs once are automatically canonical and primitive.
    For the rest, rotations can only start at other occurrences of `start`;
    a strictly smaller rotation or an equal one (periodicity) disqualifies.
    """
    m, n = walks.shape
    occurrences = walks == start
    counts = occurrences.sum(axis=1)
    keep = counts == 1
    multi_idx = np.flatnonzero(counts > 1)
    if multi_idx.size:
        sub = walks[multi_idx]
        doubled = np.concatenate([sub, sub], axis=1)
        good = np.ones(multi_idx.size, dtype=bool)
        for offset in range(1, n):
            hit = sub[:, offset] == start
            if not np.any(hit):
                continue
            rows = np.flatnonzero(hit & good)
            if rows.size == 0:
                continue
            rot = doubled[rows, offset : offset + n]
            base = sub[rows]
            neq = rot != base
            any_neq = neq.any(axis=1)
            # equal to a nontrivial rotation: periodic, not primitive
            good[rows[~any_neq]] = False
            diff_rows = np.flatnonzero(any_neq)
            if diff_rows.size:
                first = np.argmax(neq[diff_rows], axis=1)
                smaller = rot[diff_rows, first] < base[diff_rows, first]
                good[rows[diff_rows[smaller]]] = False
        keep[multi_idx[good]] = True
    return keep


def enumerate_orbits(
    space: DirectedBondSpace,
    max_length: int,
    no_backtrack: bool = False,
    max_orbits: int = DEFAULT_MAX_ORBITS,
) -> OrbitCatalog:
    """Enumerate every primitive periodic orbit of period <= max_length.

    Depth-first over walks of following bonds from each start bond s,
    pruning steps onto bonds with index < s and accepting on return to s;
    a walk survives only as its own minimal rotation, which also removes
    repetitions of shorter orbits.  Walks may revisit bonds.  The search is
    vectorized over walk frontiers in bounded-size chunks.

    Raises CatalogSizeError as soon as the orbit count passes max_orbits.
    """
    if max_length < 2:
        raise ValueError("max_length must be at least 2")
    catalog = OrbitCatalog(space, max_length, no_backtrack)
    nb = space.num_bonds
    if nb == 0:
        return catalog
    succ_pad = space.successor_table()
    rev = space.reversal
    origin = space.origin
    terminus = space.terminus
    dtype = np.int16 if nb < 32000 else np.int32

    closed: dict[int, list[np.ndarray]] = {n: [] for n in range(2, max_length + 1)}
    total = 0

    for start in range(nb):
        home = origin[start]
        stack = [np.array([[start]], dtype=dtype)]
        while stack:
            chunk = stack.pop()
            depth = chunk.shape[1]
            if depth >= 2:
                is_closed = terminus[chunk[:, -1]] == home
                if no_backtrack:
                    # the closing step back onto the start bond must not backtrack
                    is_closed &= chunk[:, -1] != rev[start]
                if np.any(is_closed):
                    rows = chunk[is_closed]
                    keep = _canonical_filter(rows, start)
                    kept = rows[keep]
                    if kept.shape[0]:
                        closed[depth].append(kept)
                        total += kept.shape[0]
                        if total > max_orbits:
                            raise CatalogSizeError(max_orbits, depth)
            if depth == max_length:
                continue
            expanded = _expand_chunk(chunk, succ_pad, start, rev, no_backtrack)
            if expanded.shape[0] == 0:
                continue
            if expanded.shape[0] > _CHUNK_ROWS:
                for lo in range(0, expanded.shape[0], _CHUNK_ROWS):
                    stack.append(expanded[lo : lo + _CHUNK_ROWS])
            else:
                stack.append(expanded)

    for n in range(2, max_length + 1):
        parts = closed[n]
        if not parts:
            continue
        walks = parts[0] if len(parts) == 1 else np.concatenate(parts, axis=0)
        # deterministic order: lexicographic within each length
        order = np.lexsort(tuple(walks[:, k] for k in range(n - 1, -1, -1)))
        walks = np.ascontiguousarray(walks[order])
        beta = np.zeros(walks.shape[0], dtype=np.int32)
        for k in range(n):
            beta += walks[:, (k + 1) % n] == rev[walks[:, k]]
        catalog._blocks[n] = _LengthBlock(walks, beta)
    return catalog


# -- amplitudes --------------------------------------------------------------


def _entry_tables(g: Graph, lam: complex, kind: str):
    """Per-vertex transmission and reflection amplitudes at lambda.

    Returns (tau, rho, coef): tau_j is the entry for a non-backtracking
    step through vertex j before any weight factor, rho_j the back-scatter
    entry for the standard kind; the weighted back-scatter needs the bond
    weight and uses coef_j directly.
    """
    phases = scattering_phases(g, lam, kind)
    deg = _degree_vector(g, kind)
    coef = (1.0 + phases) / deg
    tau = -1j * coef
    rho = 1j * (1.0 - coef)
    return tau, rho, coef


def orbit_amplitude(
    orbit: PrimitiveOrbit, g: Graph, lam: complex, kind: str = "standard",
    space: DirectedBondSpace | None = None,
) -> complex:
    """Product of the scattering entries along one orbit (reference path)."""
    from .graph import directed_bonds

    if space is None:
        space = directed_bonds(g)
    tau, rho, coef = _entry_tables(g, lam, kind)
    w = space.bond_weight
    seq = orbit.bonds
    n = len(seq)
    amp = 1.0 + 0.0j
    for k in range(n):
        d = seq[k]
        d_next = seq[(k + 1) % n]
        j = int(space.terminus[d])
        if kind == "generalized":
            if d_next == space.reversal[d]:
                amp *= 1j * (1.0 - coef[j] * w[d])
            else:
                amp *= -1j * coef[j] * np.sqrt(w[d] * w[d_next])
        else:
            amp *= rho[j] if d_next == space.reversal[d] else tau[j]
    return complex(amp)


def orbit_matrix_amplitude(orbit: PrimitiveOrbit, matrix: np.ndarray) -> complex:
    """Cyclic product of matrix entries M[d_{k+1}, d_k] along the orbit."""
    seq = orbit.bonds
    n = len(seq)
    amp = 1.0 + 0.0j
    for k in range(n):
        amp *= matrix[seq[(k + 1) % n], seq[k]]
    return complex(amp)


def bulk_amplitudes(
    catalog: OrbitCatalog, lam: complex, kind: str = "standard",
    max_length: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Amplitudes of every catalog orbit with period <= max_length.

    Returns (lengths, betas, amplitudes) as flat arrays in catalog order.
    The standard kind uses per-vertex step counts, so the cost per lambda
    is one small matrix-vector product per orbit block; the weighted kind
    walks the bond stream.
    """
    top = catalog.max_length if max_length is None else max_length
    catalog.require_depth(top)
    g = catalog.space.graph
    lengths: list[np.ndarray] = []
    betas: list[np.ndarray] = []
    amps: list[np.ndarray] = []
    tau, rho, coef = _entry_tables(g, lam, kind)
    log_tau = np.log(tau)
    for n in range(2, top + 1):
        block = catalog._blocks.get(n)
        if block is None or block.count == 0:
            continue
        if kind == "standard":
            nb_counts, bk_counts = catalog._vertex_stats(n)
            if np.all(np.abs(rho) > 0.0):
                log_amp = nb_counts @ log_tau + bk_counts @ np.log(rho)
                amp = np.exp(log_amp)
            else:
                amp = np.exp(nb_counts @ log_tau) * np.prod(
                    rho[None, :] ** bk_counts, axis=1
                )
        else:
            amp = _stream_amplitudes(catalog.space, block, coef)
        lengths.append(np.full(block.count, n, dtype=np.int64))
        betas.append(block.beta.astype(np.int64))
        amps.append(amp)
    if not lengths:
        empty = np.array([], dtype=np.int64)
        return empty, empty.copy(), np.array([], dtype=np.complex128)
    return np.concatenate(lengths), np.concatenate(betas), np.concatenate(amps)


def _stream_amplitudes(space: DirectedBondSpace, block: _LengthBlock, coef: np.ndarray) -> np.ndarray:
    """Weighted-kind amplitudes over a block, vectorized per step."""
    walks = block.walks
    m, n = walks.shape
    w = space.bond_weight
    tv = space.terminus
    rev = space.reversal
    amp = np.ones(m, dtype=np.complex128)
    for k in range(n):
        d = walks[:, k].astype(np.int64)
        d_next = walks[:, (k + 1) % n].astype(np.int64)
        j = tv[d]
        is_back = d_next == rev[d]
        step = np.where(
            is_back,
            1j * (1.0 - coef[j] * w[d]),
            -1j * coef[j] * np.sqrt(w[d] * w[d_next]),
        )
        amp *= step
    return amp


def trace_power_from_orbits(
    catalog: OrbitCatalog, g: Graph, lam: complex, n: int, kind: str = "standard"
) -> complex:
    """tr U(lambda)^n summed over primitive orbits and their repetitions.

    sum over m dividing n of m * sum_{p in P(m)} a_p(lambda)^{n/m}; the
    repetition exponent n/m is required for the geometric structure of the
    log-determinant expansion (checked against matrix powers in the tests).
    """
    catalog.require_depth(n)
    lengths, _, amps = bulk_amplitudes(catalog, lam, kind, max_length=n)
    total = 0.0 + 0.0j
    for m in range(2, n + 1):
        if n % m:
            continue
        sel = lengths == m
        if np.any(sel):
            total += m * np.sum(amps[sel] ** (n // m))
    return complex(total)
