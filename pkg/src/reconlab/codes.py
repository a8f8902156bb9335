"""Sparse binary parity-check matrices and syndrome algebra over GF(2).

Indices are 0-based everywhere in memory; the alist text format is 1-based
on disk (conversion happens at the I/O boundary). Bit vectors are numpy
uint8 arrays of 0/1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AlistFormatError, DimensionError, DistributionError


def as_bits(v, length: int | None = None) -> np.ndarray:
    """Coerce to a validated uint8 0/1 vector."""
    arr = np.asarray(v, dtype=np.uint8)
    if arr.ndim != 1:
        raise DimensionError(f"bit vector must be 1-D, got shape {arr.shape}")
    if np.any(arr > 1):
        raise ValueError("bit vector entries must be 0 or 1")
    if length is not None and arr.shape[0] != length:
        raise DimensionError(f"bit vector has length {arr.shape[0]}, expected {length}")
    return arr


class ParityCheckMatrix:
    """Immutable sparse binary matrix with row- and column-major adjacency.

    Both orientations are kept because decoding iterates rows while peeling
    iterates columns; the memory cost is accepted for speed.
    """

    __slots__ = ("n_rows", "n_cols", "row_start", "row_cols", "col_start", "col_rows")

    def __init__(self, n_rows: int, n_cols: int, rows: list[list[int]]):
        if len(rows) != n_rows:
            raise DimensionError(f"got {len(rows)} row lists for n_rows={n_rows}")
        degs = np.array([len(r) for r in rows], dtype=np.int64)
        row_start = np.zeros(n_rows + 1, dtype=np.int64)
        np.cumsum(degs, out=row_start[1:])
        flat = np.concatenate([np.asarray(sorted(r), dtype=np.int32) for r in rows]) \
            if n_rows else np.zeros(0, dtype=np.int32)
        for m, r in enumerate(rows):
            if len(set(r)) != len(r):
                raise ValueError(f"row {m} has duplicate column indices")
            if len(r) == 0:
                raise ValueError(f"row {m} has degree 0")
        if flat.size and (flat.min() < 0 or flat.max() >= n_cols):
            raise ValueError("column index out of range")
        col_deg = np.bincount(flat, minlength=n_cols).astype(np.int64)
        if np.any(col_deg == 0):
            bad = int(np.nonzero(col_deg == 0)[0][0])
            raise ValueError(f"column {bad} has degree 0")
        # CSC built by stable counting sort over (col, row) pairs
        col_start = np.zeros(n_cols + 1, dtype=np.int64)
        np.cumsum(col_deg, out=col_start[1:])
        row_of_edge = np.repeat(np.arange(n_rows, dtype=np.int32), degs)
        order = np.argsort(flat, kind="stable")
        col_rows = row_of_edge[order]

        self.n_rows = n_rows
        self.n_cols = n_cols
        self.row_start = row_start
        self.row_cols = flat
        self.col_start = col_start
        self.col_rows = col_rows

    @classmethod
    def from_rows(cls, rows: list[list[int]], n_cols: int) -> "ParityCheckMatrix":
        return cls(len(rows), n_cols, rows)

    @classmethod
    def from_cols(cls, cols: list[list[int]], n_rows: int) -> "ParityCheckMatrix":
        rows: list[list[int]] = [[] for _ in range(n_rows)]
        for n, rlist in enumerate(cols):
            for m in rlist:
                rows[m].append(n)
        return cls(n_rows, len(cols), rows)

    def row(self, m: int) -> np.ndarray:
        return self.row_cols[self.row_start[m]:self.row_start[m + 1]]

    def col(self, n: int) -> np.ndarray:
        return self.col_rows[self.col_start[n]:self.col_start[n + 1]]

    def row_degrees(self) -> np.ndarray:
        return np.diff(self.row_start)

    def col_degrees(self) -> np.ndarray:
        return np.diff(self.col_start)

    @property
    def n_edges(self) -> int:
        return int(self.row_cols.size)

    @property
    def rate(self) -> float:
        return 1.0 - self.n_rows / self.n_cols

    def rows_as_lists(self) -> list[list[int]]:
        return [self.row(m).tolist() for m in range(self.n_rows)]

    def __eq__(self, other):
        if not isinstance(other, ParityCheckMatrix):
            return NotImplemented
        return (
            self.n_rows == other.n_rows
            and self.n_cols == other.n_cols
            and np.array_equal(self.row_start, other.row_start)
            and np.array_equal(self.row_cols, other.row_cols)
        )

    def __hash__(self):
        return hash((self.n_rows, self.n_cols, self.row_cols.tobytes()))

    def __repr__(self):
        return f"ParityCheckMatrix({self.n_rows}x{self.n_cols}, {self.n_edges} edges)"

    def __reduce__(self):
        return (_rebuild_pcm, (self.n_rows, self.n_cols, self.row_start, self.row_cols))


def _rebuild_pcm(n_rows, n_cols, row_start, row_cols):
    rows = [row_cols[row_start[m]:row_start[m + 1]].tolist() for m in range(n_rows)]
    return ParityCheckMatrix(n_rows, n_cols, rows)


def syndrome(H: ParityCheckMatrix, u) -> np.ndarray:
    """s[m] = XOR of u[n] over the columns n of row m."""
    u = as_bits(u, H.n_cols)
    if H.n_rows == 0:
        return np.zeros(0, dtype=np.uint8)
    return np.bitwise_xor.reduceat(u[H.row_cols], H.row_start[:-1]).astype(np.uint8)


def restricted_syndrome(H: ParityCheckMatrix, u, keep) -> np.ndarray:
    """Syndrome using only the columns in ``keep`` (others treated as zero)."""
    u = as_bits(u, H.n_cols)
    keep = np.asarray(keep, dtype=np.int64)
    if keep.size and (keep.min() < 0 or keep.max() >= H.n_cols):
        raise ValueError("keep index out of range")
    mask = np.zeros(H.n_cols, dtype=np.uint8)
    mask[keep] = 1
    masked = u & mask
    return np.bitwise_xor.reduceat(masked[H.row_cols], H.row_start[:-1]).astype(np.uint8)


def row_weights_within(H: ParityCheckMatrix, subset) -> np.ndarray:
    """Per-row count of neighbors that lie in ``subset``."""
    subset = np.asarray(subset, dtype=np.int64)
    if subset.size and (subset.min() < 0 or subset.max() >= H.n_cols):
        raise ValueError("subset index out of range")
    mask = np.zeros(H.n_cols, dtype=np.int64)
    mask[subset] = 1
    return np.add.reduceat(mask[H.row_cols], H.row_start[:-1]).astype(np.int64)


# ---------------------------------------------------------------------------
# alist serialization (MacKay format, 1-based, entries 0-padded)
# ---------------------------------------------------------------------------

def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise AlistFormatError(f"non-integer token in {line!r}", lineno) from None


def load_alist(text: str) -> ParityCheckMatrix:
    """Parse alist text into a validated matrix.

    Layout: "N M" / "max_col_deg max_row_deg" / N column degrees /
    M row degrees / N neighbor lines (rows per column, 1-based, 0-padded) /
    M neighbor lines (columns per row).
    """
    lines = text.splitlines()
    if len(lines) < 4:
        raise AlistFormatError("fewer than 4 header lines", len(lines))

    hdr = _ints(lines[0], 1)
    if len(hdr) != 2:
        raise AlistFormatError(f"expected 'N M', got {lines[0]!r}", 1)
    n_cols, n_rows = hdr
    if n_cols <= 0 or n_rows <= 0:
        raise AlistFormatError(f"non-positive dimensions {n_cols}x{n_rows}", 1)

    maxdeg = _ints(lines[1], 2)
    if len(maxdeg) != 2:
        raise AlistFormatError("expected 'max_col_degree max_row_degree'", 2)
    max_cdeg, max_rdeg = maxdeg

    col_deg = _ints(lines[2], 3)
    if len(col_deg) != n_cols:
        raise AlistFormatError(f"expected {n_cols} column degrees, got {len(col_deg)}", 3)
    row_deg = _ints(lines[3], 4)
    if len(row_deg) != n_rows:
        raise AlistFormatError(f"expected {n_rows} row degrees, got {len(row_deg)}", 4)
    if col_deg and max(col_deg) != max_cdeg:
        raise AlistFormatError(f"max column degree {max(col_deg)} != declared {max_cdeg}", 3)
    if row_deg and max(row_deg) != max_rdeg:
        raise AlistFormatError(f"max row degree {max(row_deg)} != declared {max_rdeg}", 4)

    if len(lines) < 4 + n_cols + n_rows:
        raise AlistFormatError(
            f"expected {4 + n_cols + n_rows} lines, found {len(lines)}", len(lines)
        )

    cols: list[list[int]] = []
    for n in range(n_cols):
        lineno = 5 + n
        entries = [e for e in _ints(lines[4 + n], lineno) if e != 0]
        if len(entries) != col_deg[n]:
            raise AlistFormatError(
                f"column {n + 1} has {len(entries)} nonzero entries, degree says {col_deg[n]}",
                lineno,
            )
        for e in entries:
            if not 1 <= e <= n_rows:
                raise AlistFormatError(f"row index {e} out of range 1..{n_rows}", lineno)
        cols.append([e - 1 for e in entries])

    rows: list[list[int]] = []
    for m in range(n_rows):
        lineno = 5 + n_cols + m
        entries = [e for e in _ints(lines[4 + n_cols + m], lineno) if e != 0]
        if len(entries) != row_deg[m]:
            raise AlistFormatError(
                f"row {m + 1} has {len(entries)} nonzero entries, degree says {row_deg[m]}",
                lineno,
            )
        for e in entries:
            if not 1 <= e <= n_cols:
                raise AlistFormatError(f"column index {e} out of range 1..{n_cols}", lineno)
        rows.append([e - 1 for e in entries])

    try:
        H = ParityCheckMatrix(n_rows, n_cols, rows)
    except (ValueError, DimensionError) as e:
        raise AlistFormatError(str(e)) from None

    # the two adjacency blocks must describe the same edge set
    edges_from_cols = {(m, n) for n, rlist in enumerate(cols) for m in rlist}
    edges_from_rows = {(m, n) for m, clist in enumerate(rows) for n in clist}
    if edges_from_cols != edges_from_rows:
        raise AlistFormatError("column and row adjacency blocks disagree")
    return H


def save_alist(H: ParityCheckMatrix) -> str:
    """Serialize to alist text; load_alist(save_alist(H)) == H."""
    col_deg = H.col_degrees()
    row_deg = H.row_degrees()
    max_cdeg = int(col_deg.max())
    max_rdeg = int(row_deg.max())
    out = [
        f"{H.n_cols} {H.n_rows}",
        f"{max_cdeg} {max_rdeg}",
        " ".join(str(int(d)) for d in col_deg),
        " ".join(str(int(d)) for d in row_deg),
    ]
    for n in range(H.n_cols):
        entries = [str(int(m) + 1) for m in H.col(n)]
        entries += ["0"] * (max_cdeg - len(entries))
        out.append(" ".join(entries))
    for m in range(H.n_rows):
        entries = [str(int(n) + 1) for n in H.row(m)]
        entries += ["0"] * (max_rdeg - len(entries))
        out.append(" ".join(entries))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# degree distributions and PEG construction
# ---------------------------------------------------------------------------

@dataclass
class DegreeDistribution:
    """Node-perspective degree multiplicities: degree -> node count."""

    col_mult: dict[int, int] = field(default_factory=dict)
    row_mult: dict[int, int] = field(default_factory=dict)

    @property
    def n_cols(self) -> int:
        return sum(self.col_mult.values())

    @property
    def n_rows(self) -> int:
        return sum(self.row_mult.values())

    def edge_count(self) -> tuple[int, int]:
        col_e = sum(d * c for d, c in self.col_mult.items())
        row_e = sum(d * c for d, c in self.row_mult.items())
        return col_e, row_e

    def validate(self):
        for side, mult in (("col", self.col_mult), ("row", self.row_mult)):
            for d, c in mult.items():
                if d < 1 or c < 1:
                    raise DistributionError(f"{side} entry degree={d} count={c} is invalid")
        if not self.col_mult or not self.row_mult:
            raise DistributionError("distribution needs both column and row degrees")
        ce, re = self.edge_count()
        if ce != re:
            raise DistributionError(f"edge counts disagree: columns {ce} vs rows {re}")

    def expand(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-node degree arrays, ascending by degree."""
        cols = np.concatenate(
            [np.full(c, d, dtype=np.int32) for d, c in sorted(self.col_mult.items())]
        )
        rows = np.concatenate(
            [np.full(c, d, dtype=np.int32) for d, c in sorted(self.row_mult.items())]
        )
        return cols, rows


def parse_dist_text(text: str) -> DegreeDistribution:
    """Parse "col <degree> <count>" / "row <degree> <count>" lines ('#' comments)."""
    dist = DegreeDistribution()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] not in ("col", "row"):
            raise DistributionError(
                f"line {lineno}: expected 'col|row <degree> <count>', got {raw!r}"
            )
        try:
            deg, count = int(parts[1]), int(parts[2])
        except ValueError:
            raise DistributionError(f"line {lineno}: non-integer field in {raw!r}") from None
        mult = dist.col_mult if parts[0] == "col" else dist.row_mult
        mult[deg] = mult.get(deg, 0) + count
    dist.validate()
    return dist


def build_peg(dist: DegreeDistribution, n_cols: int, seed: int, backend=None) -> ParityCheckMatrix:
    """Progressive-edge-growth construction realizing ``dist`` exactly on columns.

    Row degrees act as soft capacity targets (PEG picks the candidate row with
    the most remaining capacity at the deepest reachable level), so the row
    distribution is matched approximately. Deterministic given ``seed``.
    """
    dist.validate()
    if dist.n_cols != n_cols:
        raise DistributionError(f"distribution has {dist.n_cols} columns, asked for {n_cols}")
    col_degrees, row_targets = dist.expand()
    if np.any(col_degrees > dist.n_rows):
        raise DistributionError("a column degree exceeds the number of rows")
    if backend is None:
        from . import kernels

        backend = kernels.get_backend()
    flat = backend.peg_build(col_degrees, row_targets, int(dist.n_rows), seed & ((1 << 64) - 1))
    cols, pos = [], 0
    for d in col_degrees:
        cols.append(sorted(int(m) for m in flat[pos:pos + d]))
        pos += d
    return ParityCheckMatrix.from_cols(cols, dist.n_rows)
