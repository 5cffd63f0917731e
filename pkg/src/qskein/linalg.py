"""Sparse exact linear algebra over Q(v).

Rows are sparse dicts {column_key: Scalar}.  Column keys can be anything
hashable; an optional col_key function supplies the sort order (for word
columns pass word_key, so the pivot of a row is its deglex-largest word).

The Echelon class keeps an incrementally built row-echelon basis and can
track each stored row as a combination of the inserted ones, which gives
nullspace vectors and solutions of linear systems with no extra passes.
"""

from __future__ import annotations

import heapq

from .scalar import ONE, ZERO, Scalar

__all__ = ["Echelon", "matrix_rank", "kernel_basis", "solve_combination"]


class _Desc:
    """Heap wrapper: pops columns in decreasing col_key order."""

    __slots__ = ("key", "col")

    def __init__(self, key, col):
        self.key = key
        self.col = col

    def __lt__(self, other):
        return self.key > other.key


class Echelon:
    """Incremental echelon form with optional combination tracking."""

    def __init__(self, col_key=None):
        self.col_key = col_key or (lambda c: c)
        self.pivots: dict = {}   # pivot column -> (row, tag)
        self._nins = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def pivot_cols(self):
        return sorted(self.pivots, key=self.col_key)

    def reduce(self, row: dict, tag: dict | None = None):
        """Eliminate every pivot column from row (tracking in tag).

        Columns are processed in decreasing order; elimination only ever
        touches columns below the one being cleared, so each column is
        final once passed.
        """
        kf = self.col_key
        row = {c: x for c, x in row.items() if x}
        tag = dict(tag) if tag is not None else {}
        heap = [_Desc(kf(c), c) for c in row]
        heapq.heapify(heap)
        while heap:
            c = heapq.heappop(heap).col
            coef = row.get(c)
            if coef is None:
                continue
            hit = self.pivots.get(c)
            if hit is None:
                continue
            prow, ptag = hit
            for pc, px in prow.items():
                s = row.get(pc, ZERO) - coef * px
                if s:
                    if pc not in row and pc != c:
                        heapq.heappush(heap, _Desc(kf(pc), pc))
                    row[pc] = s
                else:
                    row.pop(pc, None)
            for k, x in ptag.items():
                s = tag.get(k, ZERO) - coef * x
                if s:
                    tag[k] = s
                else:
                    tag.pop(k, None)
        return row, tag

    def insert(self, row: dict, tag: dict | None = None):
        """Reduce row and store it if independent.

        Returns (pivot_column, residual_tag); pivot_column is None when the
        row was dependent, in which case residual_tag expresses the zero row
        as a combination of previously inserted rows plus this one.
        """
        if tag is None:
            tag = {self._nins: ONE}
        self._nins += 1
        row, tag = self.reduce(row, tag)
        if not row:
            return None, tag
        top = max(row, key=self.col_key)
        inv = row[top].inverse()
        row = {c: x * inv for c, x in row.items()}
        tag = {k: x * inv for k, x in tag.items()}
        self.pivots[top] = (row, tag)
        return top, tag

    def contains(self, row: dict) -> bool:
        res, _ = self.reduce(row)
        return not res

    def solve(self, target: dict):
        """Coefficients x with sum_i x_i * row_i = target, or None.

        Only meaningful when every insert used the default auto-tag.
        """
        res, tag = self.reduce(target, {})
        if res:
            return None
        return {k: -x for k, x in tag.items() if x}


def matrix_rank(rows, col_key=None) -> int:
    ech = Echelon(col_key)
    for r in rows:
        ech.insert(r, tag={})
    return ech.rank


def kernel_basis(rows, col_key=None):
    """Basis of {x : sum_i x_i row_i = 0} as sparse dicts {i: Scalar}."""
    ech = Echelon(col_key)
    out = []
    for i, r in enumerate(rows):
        piv, tag = ech.insert(r, tag={i: ONE})
        if piv is None:
            out.append(tag)
    return out


def solve_combination(rows, target, col_key=None):
    """Solve sum_i x_i row_i = target; returns {i: Scalar} or None."""
    ech = Echelon(col_key)
    for i, r in enumerate(rows):
        ech.insert(r, tag={i: ONE})
    return ech.solve(target)
