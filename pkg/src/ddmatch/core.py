"""Domain types and the intersection predicates shared by every matcher.

The routing space is a d-dimensional box. A subscription or update region
("extent") is an axis-aligned d-rectangle given by one interval per
dimension. Matching means finding every (subscription, update) pair whose
extents intersect; results are stored in an n x m bit matrix with one
column per update extent.

Intersection is strict: intervals that merely touch at an endpoint do NOT
intersect. Every algorithm in this package agrees with this predicate
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, Sequence

import numpy as np


class Kind(Enum):
    """Role of an extent: receiver interest (S) or sender influence (U)."""

    SUBSCRIPTION = "S"
    UPDATE = "U"


@dataclass(frozen=True, slots=True)
class Interval1D:
    """One extent's projection on a single dimension: [low, high] with strict overlap.

    `id` is the 1-based index of the owning extent in its set; `kind` says
    which set that is.
    """

    low: float
    high: float
    id: int
    kind: Kind = Kind.SUBSCRIPTION

    def __post_init__(self) -> None:
        object.__setattr__(self, "low", float(self.low))
        object.__setattr__(self, "high", float(self.high))
        object.__setattr__(self, "id", int(self.id))
        if not self.low < self.high:
            raise ValueError(f"interval must satisfy low < high, got [{self.low}, {self.high}]")
        if self.id < 1:
            raise ValueError(f"interval id must be >= 1, got {self.id}")


@dataclass(frozen=True, slots=True)
class Extent:
    """An axis-aligned d-rectangle: one Interval1D projection per dimension."""

    id: int
    kind: Kind
    proj: tuple[Interval1D, ...]

    def __post_init__(self) -> None:
        if len(self.proj) < 1:
            raise ValueError("extent needs at least one dimension")
        for iv in self.proj:
            if iv.id != self.id:
                raise ValueError(f"projection id {iv.id} does not match extent id {self.id}")
            if iv.kind != self.kind:
                raise ValueError(f"projection kind {iv.kind} does not match extent kind {self.kind}")

    @classmethod
    def from_bounds(cls, id: int, kind: Kind, bounds: Sequence[tuple[float, float]]) -> "Extent":
        """Build an extent from (low, high) pairs, one per dimension."""
        proj = tuple(Interval1D(lo, hi, id, kind) for lo, hi in bounds)
        return cls(id, kind, proj)

    @property
    def d(self) -> int:
        return len(self.proj)


@dataclass(frozen=True)
class MatchInstance:
    """A matching problem: n subscription extents vs m update extents.

    Extents are stored in id order, so S[i].id == i + 1 (0-based i) and
    likewise for U. All extents share the same dimension count d.
    """

    S: tuple[Extent, ...]
    U: tuple[Extent, ...]
    d: int

    def __post_init__(self) -> None:
        for pos, ext in enumerate(self.S):
            if ext.id != pos + 1:
                raise ValueError(f"subscription at position {pos} has id {ext.id}, expected {pos + 1}")
            if ext.kind is not Kind.SUBSCRIPTION:
                raise ValueError(f"extent {ext.id} in S is not a subscription")
            if ext.d != self.d:
                raise ValueError(f"subscription {ext.id} has d={ext.d}, instance has d={self.d}")
        for pos, ext in enumerate(self.U):
            if ext.id != pos + 1:
                raise ValueError(f"update at position {pos} has id {ext.id}, expected {pos + 1}")
            if ext.kind is not Kind.UPDATE:
                raise ValueError(f"extent {ext.id} in U is not an update")
            if ext.d != self.d:
                raise ValueError(f"update {ext.id} has d={ext.d}, instance has d={self.d}")

    @property
    def n(self) -> int:
        return len(self.S)

    @property
    def m(self) -> int:
        return len(self.U)

    def subscription_intervals(self, dim: int = 0) -> list[Interval1D]:
        """Projections of all subscription extents along one dimension."""
        return [ext.proj[dim] for ext in self.S]

    def update_intervals(self, dim: int = 0) -> list[Interval1D]:
        """Projections of all update extents along one dimension."""
        return [ext.proj[dim] for ext in self.U]


def intersect_1d(x: Interval1D, y: Interval1D) -> bool:
    """Segment intersection test, strict on both sides.

    Touching endpoints do not count: [0,1] and [1,2] are disjoint.
    """
    return x.low < y.high and y.low < x.high


def intersect_extent(s: Extent, u: Extent) -> bool:
    """d-rectangles intersect iff their projections intersect on every dimension."""
    if s.d != u.d:
        raise ValueError(f"dimension mismatch: {s.d} vs {u.d}")
    return all(intersect_1d(a, b) for a, b in zip(s.proj, u.proj))


def _pack_bits(bits: np.ndarray | Sequence[int], nbits: int) -> np.ndarray:
    """Normalize a bit vector (bools/0-1 ints, or already-packed uint8) to packed bytes."""
    arr = np.asarray(bits)
    nbytes = (nbits + 7) // 8
    if arr.dtype == np.uint8 and arr.size == nbytes and nbits != nbytes:
        packed = arr.copy()
    else:
        if arr.size != nbits:
            raise ValueError(f"bit vector has length {arr.size}, expected {nbits}")
        packed = np.packbits(arr.astype(bool), bitorder="little")
        if packed.size < nbytes:
            packed = np.pad(packed, (0, nbytes - packed.size))
    if nbits % 8:
        packed[-1] &= (1 << (nbits % 8)) - 1
    return packed


class IntersectionMatrix:
    """Dense n x m bit matrix of subscription/update intersections.

    Storage is column-major and word-packed: column j occupies the
    contiguous ceil(n/64) uint64 words of `words[j - 1]`, little-endian,
    so bit i of a column sits at byte i >> 3, mask 1 << (i & 7) of the
    same memory. Because each column owns a disjoint word range,
    concurrent writers are safe as long as they touch disjoint column
    sets; `or_row` or any reader must not overlap other writers.

    All public indices are 1-based, matching extent ids. Bits beyond n
    in each column's last word stay zero.
    """

    __slots__ = ("n", "m", "words")

    WORD_BITS = 64

    def __init__(self, n: int, m: int, words: np.ndarray | None = None):
        if n < 0 or m < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.n = n
        self.m = m
        nwords = (n + 63) // 64
        if words is None:
            words = np.zeros((m, nwords), dtype=np.uint64)
        elif words.shape != (m, nwords) or words.dtype != np.uint64:
            raise ValueError("backing array has wrong shape or dtype")
        self.words = words

    @property
    def byte_columns(self) -> np.ndarray:
        """Zero-copy uint8 view of the column storage, shape (m, 8 * ceil(n/64))."""
        return self.words.view(np.uint8)

    def _check(self, i: int | None = None, j: int | None = None) -> None:
        if i is not None and not 1 <= i <= self.n:
            raise IndexError(f"row {i} out of range 1..{self.n}")
        if j is not None and not 1 <= j <= self.m:
            raise IndexError(f"column {j} out of range 1..{self.m}")

    def get(self, i: int, j: int) -> int:
        self._check(i, j)
        return int(self.words[j - 1, (i - 1) >> 6] >> np.uint64((i - 1) & 63)) & 1

    def set(self, i: int, j: int) -> None:
        """Set bit (i, j); setting an already-set bit is a no-op."""
        self._check(i, j)
        self.words[j - 1, (i - 1) >> 6] |= np.uint64(1 << ((i - 1) & 63))

    def or_column(self, j: int, rowbits: np.ndarray | Sequence[int]) -> None:
        """OR an n-bit vector into column j (single word-level pass)."""
        self._check(j=j)
        packed = _pack_bits(rowbits, self.n)
        self.byte_columns[j - 1, : packed.size] |= packed

    def or_row(self, i: int, colbits: np.ndarray | Sequence[int]) -> None:
        """OR an m-bit vector into row i, setting bits column by column."""
        self._check(i=i)
        packed = _pack_bits(colbits, self.m)
        word_i = (i - 1) >> 6
        mask = np.uint64(1 << ((i - 1) & 63))
        for j0 in np.flatnonzero(packed):
            b = int(packed[j0])
            base = int(j0) << 3
            while b:
                lsb = b & -b
                self.words[base + lsb.bit_length() - 1, word_i] |= mask
                b ^= lsb

    def and_with(self, other: "IntersectionMatrix") -> "IntersectionMatrix":
        """Elementwise AND; shapes must match."""
        if (self.n, self.m) != (other.n, other.m):
            raise ValueError(f"shape mismatch: {self.n}x{self.m} vs {other.n}x{other.m}")
        return IntersectionMatrix(self.n, self.m, self.words & other.words)

    __and__ = and_with

    def popcount(self) -> int:
        """Total number of set bits (K)."""
        return int(np.bitwise_count(self.words).sum())

    def column_popcounts(self) -> np.ndarray:
        """Set-bit count of every column, as an m-vector."""
        return np.bitwise_count(self.words).sum(axis=1, dtype=np.int64)

    def pairs(self) -> Iterator[tuple[int, int]]:
        """All set (i, j) pairs, 1-based, in lexicographic order."""
        if self.n == 0 or self.m == 0:
            return iter(())
        bytes_view = self.byte_columns
        cols, ii = [], []
        for j in range(self.m):
            rows = np.flatnonzero(np.unpackbits(bytes_view[j], count=self.n, bitorder="little"))
            ii.append(rows + 1)
            cols.append(np.full(rows.size, j + 1, dtype=np.int64))
        i_all = np.concatenate(ii) if ii else np.empty(0, dtype=np.int64)
        j_all = np.concatenate(cols) if cols else np.empty(0, dtype=np.int64)
        order = np.lexsort((j_all, i_all))
        return iter(zip(i_all[order].tolist(), j_all[order].tolist()))

    def to_bool_array(self) -> np.ndarray:
        """Dense (n, m) bool view; intended for tests and small matrices."""
        if self.n == 0 or self.m == 0:
            return np.zeros((self.n, self.m), dtype=bool)
        cols = np.unpackbits(self.byte_columns, axis=1, count=self.n, bitorder="little")
        return cols.T.astype(bool)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntersectionMatrix):
            return NotImplemented
        return self.n == other.n and self.m == other.m and np.array_equal(self.words, other.words)

    def __repr__(self) -> str:
        return f"IntersectionMatrix(n={self.n}, m={self.m}, K={self.popcount()})"


Matcher1D = Callable[[Sequence[Interval1D], Sequence[Interval1D]], IntersectionMatrix]


def match_extents(inst: MatchInstance, algo_1d: Matcher1D) -> IntersectionMatrix:
    """Match d-rectangles by running a 1-D matcher per dimension and ANDing.

    Two extents intersect iff all their projections do, so the d
    per-dimension matrices combine with elementwise AND into the extent
    matrix.
    """
    result: IntersectionMatrix | None = None
    for dim in range(inst.d):
        m_dim = algo_1d(inst.subscription_intervals(dim), inst.update_intervals(dim))
        result = m_dim if result is None else result.and_with(m_dim)
    assert result is not None
    return result


# --- text formats -----------------------------------------------------------
#
# Extent sets: header "# d=<d>", then one extent per line:
#   id,kind,low_1,high_1,...,low_d,high_d      (kind is S or U)
# Matrices: header "n m K", then one "i,j" line per set bit, sorted.


def write_extents(inst: MatchInstance, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# d={inst.d}\n")
        for ext in list(inst.S) + list(inst.U):
            coords = ",".join(f"{iv.low!r},{iv.high!r}" for iv in ext.proj)
            fh.write(f"{ext.id},{ext.kind.value},{coords}\n")


def read_extents(path) -> MatchInstance:
    d = None
    groups: dict[Kind, list[Extent]] = {Kind.SUBSCRIPTION: [], Kind.UPDATE: []}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line.lstrip("# ").partition("=")
                if key.strip() == "d":
                    d = int(value)
                continue
            fields = line.split(",")
            ext_id, kind = int(fields[0]), Kind(fields[1])
            coords = [float(v) for v in fields[2:]]
            if d is None:
                raise ValueError("extent file is missing the '# d=<d>' header")
            if len(coords) != 2 * d:
                raise ValueError(f"extent {ext_id}: expected {2 * d} coordinates, got {len(coords)}")
            bounds = [(coords[2 * k], coords[2 * k + 1]) for k in range(d)]
            groups[kind].append(Extent.from_bounds(ext_id, kind, bounds))
    if d is None:
        raise ValueError("extent file is missing the '# d=<d>' header")
    subs = tuple(sorted(groups[Kind.SUBSCRIPTION], key=lambda e: e.id))
    upds = tuple(sorted(groups[Kind.UPDATE], key=lambda e: e.id))
    return MatchInstance(subs, upds, d)


def write_matrix(matrix: IntersectionMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{matrix.n} {matrix.m} {matrix.popcount()}\n")
        for i, j in matrix.pairs():
            fh.write(f"{i},{j}\n")


def read_matrix(path) -> IntersectionMatrix:
    with open(path) as fh:
        n, m, k = (int(v) for v in fh.readline().split())
        matrix = IntersectionMatrix(n, m)
        count = 0
        for line in fh:
            line = line.strip()
            if not line:
                continue
            i, j = (int(v) for v in line.split(","))
            matrix.set(i, j)
            count += 1
    if matrix.popcount() != k:
        raise ValueError(f"matrix file header claims K={k}, found {matrix.popcount()}")
    return matrix
