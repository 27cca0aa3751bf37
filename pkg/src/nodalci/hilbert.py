"""Evaluation matrices, Hilbert functions of point sets and colon subspaces."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from .fields import QQ
from .linalg import nullspace, rank, rref
from .polyring import _mono_eval, monomial_basis, normalize_point

__all__ = [
    "PointSet",
    "HilbertTable",
    "GradedTupleSpace",
    "LinearSubspace",
    "evaluation_matrix",
    "hilbert_of_points",
    "hilbert_table_of_points",
    "linear_system_defect",
    "colon_constraints",
    "colon_subspace",
    "subspace_dimension_table",
]


class PointSet:
    """Distinct points of a weighted projective space, normalised."""

    def __init__(self, field, points, weights=None):
        pts = [normalize_point(field, [field.coerce(x) for x in p]) for p in points]
        if len(set(pts)) != len(pts):
            raise ValueError("points are not pairwise distinct")
        lengths = {len(p) for p in pts}
        if len(lengths) > 1:
            raise ValueError("points have different numbers of coordinates")
        self.field = field
        self.points = pts
        nv = lengths.pop() if lengths else (len(weights) if weights else 0)
        self.weights = tuple(weights) if weights is not None else (1,) * nv

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def to_json(self):
        F = self.field
        return {"field": F.name, "points": [[F.to_json(x) for x in p] for p in self.points]}


@dataclass
class HilbertTable:
    values: dict
    label: str = ""

    def __post_init__(self):
        keys = sorted(self.values)
        if keys and keys != list(range(keys[0], keys[-1] + 1)):
            raise ValueError("Hilbert table degrees must be contiguous")
        if any(int(v) != v or v < 0 for v in self.values.values()):
            raise ValueError("Hilbert values must be nonnegative integers")
        self.values = {int(k): int(self.values[k]) for k in keys}

    def __getitem__(self, k):
        return self.values[k]

    def __contains__(self, k):
        return k in self.values

    def get(self, k, default=None):
        return self.values.get(k, default)

    @property
    def degrees(self):
        return list(self.values)

    def to_json(self):
        return {"label": self.label, "values": {str(k): v for k, v in self.values.items()}}

    @classmethod
    def from_json(cls, data):
        return cls({int(k): v for k, v in data["values"].items()}, data.get("label", ""))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "k", "h"])
        for k, v in self.values.items():
            w.writerow([self.label, k, v])
        return buf.getvalue()


def evaluation_matrix(basis, points, field) -> np.ndarray:
    """Rows indexed by points, columns by monomials of ``basis``."""
    pts = list(points)
    if not pts:
        return field.zeros((0, len(basis)))
    rows = [[_mono_eval(field, e, p) for e in basis] for p in pts]
    return field.array(rows).reshape(len(pts), len(basis))


def hilbert_of_points(delta: PointSet, k: int) -> int:
    if k < 0:
        return 0
    basis = monomial_basis(delta.weights, k)
    if not basis or not len(delta):
        return 0
    return rank(evaluation_matrix(basis, delta, delta.field), delta.field)


def hilbert_table_of_points(delta: PointSet, kmax: int, kmin: int = 0) -> HilbertTable:
    return HilbertTable({k: hilbert_of_points(delta, k) for k in range(kmin, kmax + 1)}, "points")


def linear_system_defect(delta: PointSet, k: int) -> int:
    """How many conditions the points fail to impose on degree-``k`` forms."""
    return len(delta) - hilbert_of_points(delta, k)


@dataclass(frozen=True)
class GradedTupleSpace:
    """``A_k = (+)_j S_{k + shift_j}`` over a polynomial ring with given weights.

    Basis elements are pairs ``(j, exponent)``, ordered by component then by
    the lex-descending monomial order.
    """

    weights: tuple
    shifts: tuple

    @lru_cache(maxsize=None)
    def basis(self, k: int):
        return tuple((j, e) for j, s in enumerate(self.shifts) for e in monomial_basis(self.weights, k + s))

    @lru_cache(maxsize=None)
    def index(self, k: int):
        return {b: i for i, b in enumerate(self.basis(k))}

    def dim(self, k: int) -> int:
        return len(self.basis(k))

    def component_slice(self, k: int, j: int) -> slice:
        start = sum(len(monomial_basis(self.weights, k + s)) for s in self.shifts[:j])
        return slice(start, start + len(monomial_basis(self.weights, k + self.shifts[j])))

    def components_from(self, k: int, i: int) -> slice:
        """Columns of components ``i, i+1, ...`` (0-based)."""
        start = self.component_slice(k, i).start
        return slice(start, self.dim(k))


@dataclass
class LinearSubspace:
    """A subspace of ``space`` in degree ``degree`` given by spanning rows.

    Rows are brought to reduced echelon form on construction, so two equal
    subspaces have identical ``rows``.
    """

    space: GradedTupleSpace
    degree: int
    rows: np.ndarray
    field: object = dc_field(default=QQ)

    def __post_init__(self):
        n = self.space.dim(self.degree)
        M = np.asarray(self.rows)
        if M.size == 0:
            self.rows = self.field.zeros((0, n))
        else:
            M = M.reshape(-1, n)
            self.rows, _ = rref(M, self.field)

    @property
    def dimension(self) -> int:
        return self.rows.shape[0]

    @property
    def codimension(self) -> int:
        return self.space.dim(self.degree) - self.dimension

    def annihilator(self) -> np.ndarray:
        """Rows ``z`` with ``v . z = 0`` for every ``v`` in the subspace."""
        n = self.space.dim(self.degree)
        if self.dimension == 0:
            return nullspace(self.field.zeros((0, n)), self.field, n)
        return nullspace(self.rows, self.field)

    def contains(self, v) -> bool:
        F = self.field
        v = F.array(list(v)).reshape(1, -1)
        stacked = np.concatenate([self.rows, v]) if self.dimension else v
        return rank(stacked, F) == self.dimension

    @classmethod
    def full(cls, space, degree, field):
        n = space.dim(degree)
        eye = field.zeros((n, n))
        for i in range(n):
            eye[i, i] = field.one
        return cls(space, degree, eye, field)


def colon_constraints(space: GradedTupleSpace, top: int, functionals, k: int, field, columns: slice | None = None):
    """Matrix whose kernel is ``{v in A_k : phi(v m) = 0 for all phi, m in S_{top-k}}``.

    ``functionals`` are rows on the basis of ``A_top``.  Rows of the result are
    indexed by pairs ``(phi, m)``; columns by the basis of ``A_k`` (optionally
    restricted to ``columns``).
    """
    basis = space.basis(k)
    idx = space.index(top)
    mults = monomial_basis(space.weights, top - k)
    phis = np.asarray(functionals)
    if phis.ndim == 1:
        phis = phis.reshape(1, -1)
    cols = range(len(basis)) if columns is None else range(*columns.indices(len(basis)))
    cols = list(cols)
    out = field.zeros((phis.shape[0] * len(mults), len(cols)))
    if not len(cols) or not len(mults):
        return out
    # target position of (j, e + m) for each column and multiplier
    pos = np.empty((len(mults), len(cols)), dtype=np.int64)
    for a, m in enumerate(mults):
        for b, c in enumerate(cols):
            j, e = basis[c]
            pos[a, b] = idx[(j, tuple(x + y for x, y in zip(e, m)))]
    for r in range(phis.shape[0]):
        out[r * len(mults) : (r + 1) * len(mults)] = phis[r][pos]
    return out


def colon_subspace(top: LinearSubspace, k: int) -> LinearSubspace:
    """Largest ``V_k`` with ``V_k * S_{T-k}`` inside ``top`` (``T = top.degree``)."""
    T = top.degree
    if k > T:
        raise ValueError(f"colon degree {k} exceeds top degree {T}")
    F = top.field
    n = top.space.dim(k)
    ann = top.annihilator()
    if ann.shape[0] == 0:
        return LinearSubspace.full(top.space, k, F)
    C = colon_constraints(top.space, T, ann, k, F)
    return LinearSubspace(top.space, k, nullspace(C, F, n), F)


def subspace_dimension_table(family, label: str = "") -> HilbertTable:
    """``k -> codim V_k`` for a mapping ``k -> LinearSubspace``."""
    return HilbertTable({k: V.codimension for k, V in sorted(family.items())}, label)
