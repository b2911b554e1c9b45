"""Sparse exact rational linear algebra.

Rank, solvability, nullspaces and cokernel dimensions over Q, computed by
sparse Gaussian elimination with Markowitz-style pivot selection (minimum
fill-in estimate, deterministic tie-breaks on coefficient bit length and
then index order).  All arithmetic is exact.
"""

from __future__ import annotations

import heapq
from typing import Iterable, Optional, Sequence

from .rational import Q, QZERO


class SparseMatrixQ:
    """Sparse matrix over Q with optional row/column labels.

    Entries are stored column-major as {col: {row: value}}; no zeros are
    stored.  Matrices are immutable once assembly is finished (by
    convention; elimination always works on copies).
    """

    __slots__ = ("nrows", "ncols", "cols", "row_labels", "col_labels")

    def __init__(self, nrows: int, ncols: int, row_labels=None, col_labels=None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols: list[dict[int, object]] = [dict() for _ in range(ncols)]
        self.row_labels = row_labels
        self.col_labels = col_labels

    def set(self, r: int, c: int, v) -> None:
        if not (0 <= r < self.nrows and 0 <= c < self.ncols):
            raise IndexError(f"entry ({r}, {c}) out of range")
        if v == 0:
            self.cols[c].pop(r, None)
        else:
            self.cols[c][r] = Q(v)

    def add(self, r: int, c: int, v) -> None:
        cur = self.cols[c].get(r, QZERO) + v
        self.set(r, c, cur)

    def get(self, r: int, c: int):
        return self.cols[c].get(r, QZERO)

    @property
    def entries(self) -> dict[tuple[int, int], object]:
        return {(r, c): v for c, col in enumerate(self.cols) for r, v in col.items()}

    def nnz(self) -> int:
        return sum(len(col) for col in self.cols)

    @classmethod
    def from_entries(cls, nrows, ncols, entries, row_labels=None, col_labels=None):
        m = cls(nrows, ncols, row_labels, col_labels)
        for (r, c), v in entries.items():
            m.set(r, c, v)
        return m

    def transpose(self) -> "SparseMatrixQ":
        m = SparseMatrixQ(self.ncols, self.nrows, self.col_labels, self.row_labels)
        for c, col in enumerate(self.cols):
            for r, v in col.items():
                m.set(c, r, v)
        return m

    def dump_triplets(self) -> str:
        """Plain 'row col num/den' text, rows sorted, for debugging."""
        lines = [f"{self.nrows} {self.ncols}"]
        for (r, c) in sorted(self.entries):
            lines.append(f"{r} {c} {self.get(r, c)}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Elimination core
# ---------------------------------------------------------------------------


class _Eliminator:
    """Row-based sparse elimination with approximate Markowitz pivoting.

    Pivot choice: among the allowed column class, take the column with the
    fewest active nonzeros; within it, the row minimizing
    (row_nnz, numerator bit length, row index).  Fully deterministic.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: list[dict[int, object]] = []
        self.col_rows: list[set[int]] = [set() for _ in range(ncols)]
        self.active: set[int] = set()
        self.pivots: list[tuple[int, int]] = []  # (row, col) in elimination order

    def add_row(self, row: dict[int, object]) -> int:
        idx = len(self.rows)
        self.rows.append(dict(row))
        self.active.add(idx)
        for c in row:
            self.col_rows[c].add(idx)
        return idx

    def _pick_pivot(self, cols: Sequence[int]) -> Optional[tuple[int, int]]:
        heap = [(len(self.col_rows[c]), c) for c in cols if self.col_rows[c]]
        if not heap:
            return None
        heapq.heapify(heap)
        while heap:
            cnt, c = heapq.heappop(heap)
            cur = len(self.col_rows[c])
            if cur == 0:
                continue
            if cur != cnt:
                heapq.heappush(heap, (cur, c))
                continue
            r = min(
                self.col_rows[c],
                key=lambda rr: (
                    len(self.rows[rr]),
                    int(self.rows[rr][c].numerator).bit_length(),
                    rr,
                ),
            )
            return r, c
        return None

    def eliminate(self, cols: Sequence[int], jordan: bool = False) -> int:
        """Eliminate using pivots only from the given columns; returns the
        number of pivots found.  With jordan=True the pivot column is also
        cleared from previously retired pivot rows."""
        found = 0
        while True:
            pick = self._pick_pivot(cols)
            if pick is None:
                return found
            pr, pc = pick
            self._retire(pr)
            self.pivots.append((pr, pc))
            found += 1
            prow = self.rows[pr]
            pval = prow[pc]
            victims = list(self.col_rows[pc])
            if jordan:
                victims += [r for (r, _c) in self.pivots[:-1] if pc in self.rows[r]]
            for r in victims:
                self._axpy(r, prow, -(self.rows[r][pc] / pval), active=r in self.active)

    def _retire(self, r: int) -> None:
        self.active.discard(r)
        for c in self.rows[r]:
            self.col_rows[c].discard(r)

    def _axpy(self, r: int, src: dict[int, object], factor, active: bool) -> None:
        row = self.rows[r]
        for c, v in src.items():
            s = row.get(c, QZERO) + factor * v
            if s == 0:
                if c in row:
                    del row[c]
                    if active:
                        self.col_rows[c].discard(r)
            else:
                if c not in row and active:
                    self.col_rows[c].add(r)
                row[c] = s


def _as_rows(a: SparseMatrixQ) -> list[dict[int, object]]:
    rows: list[dict[int, object]] = [dict() for _ in range(a.nrows)]
    for c, col in enumerate(a.cols):
        for r, v in col.items():
            rows[r][c] = v
    return rows


def rank(a: SparseMatrixQ) -> int:
    elim = _Eliminator(a.ncols)
    for row in _as_rows(a):
        elim.add_row(row)
    return elim.eliminate(range(a.ncols))


def solve(a: SparseMatrixQ, b: Sequence) -> Optional[list]:
    """One exact solution of A x = b, or None if b is not in the column
    space.  Deterministic for a fixed pivot rule; free variables are 0."""
    if len(b) != a.nrows:
        raise ValueError("right-hand side has wrong length")
    bc = a.ncols  # augmented column index
    elim = _Eliminator(a.ncols + 1)
    rows = _as_rows(a)
    for r, row in enumerate(rows):
        if b[r] != 0:
            row[bc] = Q(b[r])
        elim.add_row(row)
    elim.eliminate(range(a.ncols), jordan=True)
    # inconsistent iff a row reduced to (0 ... 0 | nonzero)
    for r in elim.active:
        if elim.rows[r]:
            if set(elim.rows[r]) == {bc}:
                return None
    x = [QZERO] * a.ncols
    for r, c in elim.pivots:
        row = elim.rows[r]
        x[c] = row.get(bc, QZERO) / row[c]
    return x


def nullspace(a: SparseMatrixQ) -> list[dict[int, object]]:
    """Basis of ker(A) as sparse {col: value} vectors, one per free column."""
    elim = _Eliminator(a.ncols)
    for row in _as_rows(a):
        elim.add_row(row)
    elim.eliminate(range(a.ncols), jordan=True)
    pivot_cols = {c: r for (r, c) in elim.pivots}
    basis = []
    for c_free in range(a.ncols):
        if c_free in pivot_cols:
            continue
        vec = {c_free: Q(1)}
        for c_piv, r in pivot_cols.items():
            row = elim.rows[r]
            v = row.get(c_free)
            if v is not None:
                vec[c_piv] = -v / row[c_piv]
        basis.append(vec)
    return basis


def rank_with_extension(a: SparseMatrixQ, extra_cols: list[dict[int, object]]):
    """(rank(A), rank([A | extra]) - rank(A)) with A-columns pivoted first."""
    elim = _Eliminator(a.ncols + len(extra_cols))
    rows = _as_rows(a)
    for j, col in enumerate(extra_cols):
        for r, v in col.items():
            rows[r][a.ncols + j] = Q(v)
    for row in rows:
        elim.add_row(row)
    base = elim.eliminate(range(a.ncols))
    extra = elim.eliminate(range(a.ncols, a.ncols + len(extra_cols)))
    return base, extra


def cokernel_dim_on(a: SparseMatrixQ, target_rows: Iterable[int]) -> int:
    """Dimension of span{e_r : r in target_rows} modulo its intersection
    with the column space of A; exact."""
    targets = sorted(set(target_rows))
    for r in targets:
        if not 0 <= r < a.nrows:
            raise IndexError(f"target row {r} out of range")
    _, extra = rank_with_extension(a, [{r: Q(1)} for r in targets])
    return extra
