"""Exact elimination over any field from :mod:`nodalci.fields`.

Over finite fields elimination is plain Gauss-Jordan on numpy arrays.  Over Q the
rank is computed with fraction-free (Bareiss) elimination on an integer matrix;
reduced echelon forms over Q fall back to Fraction arithmetic.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np

from .fields import RationalField

__all__ = ["rref", "rank", "nullspace", "left_kernel", "bareiss_rank", "as_matrix", "span_rank"]


def as_matrix(field, rows, ncols: int | None = None) -> np.ndarray:
    rows = list(rows)
    if not rows:
        return field.zeros((0, ncols or 0))
    return field.array(rows).reshape(len(rows), -1)


def _eliminate(M: np.ndarray, field, full: bool):
    M = np.array(M, copy=True)
    nrows, ncols = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(~field.vzero(M[r:, c]))[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            M[[r, i]] = M[[i, r]]
        piv_inv = field.inv(M[r, c])
        M[r] = field.vmul(M[r], piv_inv)
        lo = 0 if full else r + 1
        col = M[lo:, c].copy()
        if not full:
            mask = ~field.vzero(col)
        else:
            mask = ~field.vzero(col)
            mask[r - lo] = False
        if mask.any():
            idx = np.nonzero(mask)[0] + lo
            M[idx] = field.vsub(M[idx], field.vmul(M[idx, c][:, None], M[r][None, :]))
        pivots.append(c)
        r += 1
    return M[:r], pivots


def rref(M, field):
    """Reduced row echelon form; returns ``(R, pivots)`` with only nonzero rows."""
    M = np.asarray(M)
    if M.size == 0:
        return M.reshape(0, M.shape[1] if M.ndim == 2 else 0), []
    return _eliminate(M, field, full=True)


def bareiss_rank(rows) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    A = [list(map(int, r)) for r in rows]
    if not A:
        return 0
    n, m = len(A), len(A[0])
    prev = 1
    r = 0
    for c in range(m):
        if r == n:
            break
        piv = next((i for i in range(r, n) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        a = A[r][c]
        for i in range(r + 1, n):
            b = A[i][c]
            row_i, row_r = A[i], A[r]
            A[i] = [(a * row_i[j] - b * row_r[j]) // prev for j in range(m)]
        prev = a
        r += 1
    return r


def rank(M, field) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    if isinstance(field, RationalField):
        ints = []
        for row in M:
            den = lcm(*[Fraction(x).denominator for x in row]) if len(row) else 1
            ints.append([int(Fraction(x) * den) for x in row])
        return bareiss_rank(ints)
    return len(_eliminate(M, field, full=False)[1])


def nullspace(M, field, ncols: int | None = None) -> np.ndarray:
    """Basis (as rows) of ``{v : M v = 0}``."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] == 0:
        n = M.shape[1] if M.ndim == 2 else (ncols or 0)
        out = field.zeros((n, n))
        for i in range(n):
            out[i, i] = field.one
        return out
    R, pivots = rref(M, field)
    n = M.shape[1]
    free = [c for c in range(n) if c not in set(pivots)]
    out = field.zeros((len(free), n))
    for k, f in enumerate(free):
        out[k, f] = field.one
        for i, pc in enumerate(pivots):
            out[k, pc] = field.neg(R[i, f])
    return out


def left_kernel(M, field) -> np.ndarray:
    """Basis of ``{u : u M = 0}``."""
    M = np.asarray(M)
    return nullspace(M.T, field, ncols=M.shape[0])


def span_rank(rows, field) -> int:
    rows = np.asarray(rows)
    if rows.size == 0:
        return 0
    return rank(rows, field)
