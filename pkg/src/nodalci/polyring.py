"""Sparse graded and bigraded polynomials with exact coefficients.

``GradedPolynomial`` lives in ``k[x_0..x_N]`` with ``deg x_i = w_i``;
``BigradedPolynomial`` lives in the Cox ring of the projective bundle, with
``deg x_i = (w_i, 0)`` and ``deg y_j = (-d_j, 1)``.  All monomial lists are in
graded-lexicographic order (descending), which fixes every matrix column order
used downstream.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .fields import QQ, RationalField

__all__ = [
    "CIConfig",
    "GradedPolynomial",
    "BigradedPolynomial",
    "monomial_basis",
    "bigraded_basis",
    "random_polynomial",
    "normalize_point",
    "make_rng",
    "poly_to_json",
    "poly_from_json",
]


def make_rng(seed) -> random.Random:
    """All randomness flows through :class:`random.Random` seeded with an int."""
    if isinstance(seed, random.Random):
        return seed
    return random.Random(int(seed))


@dataclass(frozen=True)
class CIConfig:
    """Ambient data of a complete intersection: ``n``, weights and multidegree."""

    degrees: tuple[int, ...]
    n: int = 3
    weights: tuple[int, ...] | None = None

    def __post_init__(self):
        degrees = tuple(int(d) for d in self.degrees)
        if not degrees:
            raise ValueError("need at least one equation")
        if list(degrees) != sorted(degrees):
            raise ValueError(f"degrees {degrees} must be sorted ascending")
        if any(d < 1 for d in degrees):
            raise ValueError("degrees must be positive")
        if self.n < 1 or self.n % 2 == 0:
            raise ValueError(f"n must be a positive odd integer, got {self.n}")
        nvars = self.n + len(degrees) + 1
        weights = tuple(int(w) for w in self.weights) if self.weights is not None else (1,) * nvars
        if len(weights) != nvars:
            raise ValueError(f"expected {nvars} weights, got {len(weights)}")
        if any(w < 1 for w in weights):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "weights", weights)

    @property
    def c(self) -> int:
        return len(self.degrees)

    @property
    def nvars(self) -> int:
        return len(self.weights)

    @property
    def D(self) -> int:
        return sum(self.degrees)

    @property
    def w(self) -> int:
        return sum(self.weights)

    @property
    def m(self) -> int:
        return (self.n + 1) // 2

    @property
    def dc(self) -> int:
        return self.degrees[-1]

    @property
    def standard(self) -> bool:
        return all(w == 1 for w in self.weights)

    def to_json(self):
        return {"n": self.n, "degrees": list(self.degrees), "weights": list(self.weights)}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(data["degrees"]), int(data.get("n", 3)), tuple(data["weights"]) if "weights" in data else None)


@lru_cache(maxsize=None)
def monomial_basis(weights: tuple[int, ...], degree: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of weighted degree ``degree``, lex-descending."""
    weights = tuple(weights)
    if degree < 0:
        return ()
    out: list[tuple[int, ...]] = []

    def rec(i, left, prefix):
        if i == len(weights) - 1:
            if left % weights[i] == 0:
                out.append(prefix + (left // weights[i],))
            return
        for e in range(left // weights[i], -1, -1):
            rec(i + 1, left - e * weights[i], prefix + (e,))

    if weights:
        rec(0, degree, ())
    elif degree == 0:
        out.append(())
    return tuple(out)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def bigraded_basis(config: CIConfig, bidegree: tuple[int, int]):
    """Monomials ``(alpha, beta)`` of bidegree ``(a, b)`` in the Cox ring.

    ``beta`` runs over y-exponents with ``|beta| = b`` (lex-descending, so for
    ``b = 1`` the blocks are ``y_1 S_{a+d_1}, y_2 S_{a+d_2}, ...``).
    """
    a, b = bidegree
    if b < 0:
        return []
    out = []
    for beta in _compositions(b, config.c):
        xdeg = a + sum(bj * dj for bj, dj in zip(beta, config.degrees))
        for alpha in monomial_basis(config.weights, xdeg):
            out.append((alpha, beta))
    return out


def _mono_eval(field, exps, point):
    val = field.one
    for e, x in zip(exps, point):
        if e:
            val = field.mul(val, field.pow(x, e))
    return val


class GradedPolynomial:
    """Homogeneous polynomial stored as ``{exponent tuple: coefficient}``."""

    __slots__ = ("field", "weights", "terms", "_degree")

    def __init__(self, field, weights, terms=None, degree: int | None = None):
        self.field = field
        self.weights = tuple(weights)
        clean = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(self.weights):
                raise ValueError(f"exponent {exps} has wrong length for {len(self.weights)} variables")
            coef = field.coerce(coef)
            if not field.is_zero(coef):
                clean[exps] = field.add(clean[exps], coef) if exps in clean else coef
                if field.is_zero(clean[exps]):
                    del clean[exps]
        self.terms = clean
        degs = {sum(e * w for e, w in zip(exps, self.weights)) for exps in clean}
        if len(degs) > 1:
            raise ValueError(f"polynomial is not homogeneous (degrees {sorted(degs)})")
        if degs:
            (d,) = degs
            if degree is not None and degree != d:
                raise ValueError(f"declared degree {degree} but terms have degree {d}")
            self._degree = d
        else:
            self._degree = degree

    @property
    def nvars(self) -> int:
        return len(self.weights)

    @property
    def degree(self) -> int | None:
        return self._degree

    def is_zero(self) -> bool:
        return not self.terms

    @classmethod
    def variable(cls, field, weights, i):
        e = [0] * len(weights)
        e[i] = 1
        return cls(field, weights, {tuple(e): field.one})

    @classmethod
    def constant(cls, field, weights, value):
        return cls(field, weights, {(0,) * len(weights): value})

    def _like(self, terms, degree=None):
        return GradedPolynomial(self.field, self.weights, terms, degree)

    def __eq__(self, other):
        return (
            isinstance(other, GradedPolynomial)
            and self.field == other.field
            and self.weights == other.weights
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.weights, frozenset(self.terms.items())))

    def __add__(self, other):
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        F = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = F.add(out[e], c) if e in out else c
        return self._like({e: c for e, c in out.items() if not F.is_zero(c)}, self._degree)

    def __neg__(self):
        return self._like({e: self.field.neg(c) for e, c in self.terms.items()}, self._degree)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        F = self.field
        if not isinstance(other, GradedPolynomial):
            s = F(other) if not isinstance(F, RationalField) else Fraction(other)
            return self._like({e: F.mul(c, s) for e, c in self.terms.items()}, self._degree)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = F.mul(c1, c2)
                out[e] = F.add(out[e], v) if e in out else v
        deg = None
        if self._degree is not None and other._degree is not None:
            deg = self._degree + other._degree
        return self._like({e: c for e, c in out.items() if not F.is_zero(c)}, deg)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = GradedPolynomial.constant(self.field, self.weights, self.field.one)
        for _ in range(k):
            out = out * self
        return out

    def partial(self, i: int) -> "GradedPolynomial":
        F = self.field
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = F.mul(c, F(e[i]))
        deg = None if self._degree is None else self._degree - self.weights[i]
        return self._like({k: v for k, v in out.items() if not F.is_zero(v)}, deg)

    def evaluate(self, point):
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        F = self.field
        acc = F.zero
        for e, c in self.terms.items():
            acc = F.add(acc, F.mul(c, _mono_eval(F, e, point)))
        return acc

    def change_field(self, field) -> "GradedPolynomial":
        if field == self.field:
            return self
        if not isinstance(self.field, RationalField):
            if field.characteristic != self.field.characteristic:
                raise ValueError(f"cannot map {self.field!r} coefficients into {field!r}")
            return GradedPolynomial(field, self.weights, {e: field(int(c)) for e, c in self.terms.items()}, self._degree)
        return GradedPolynomial(field, self.weights, {e: field.from_fraction(c) for e, c in self.terms.items()}, self._degree)

    def substitute(self, images: Sequence["GradedPolynomial"]) -> "GradedPolynomial":
        """Replace ``x_i`` by ``images[i]`` (all images in one common ring)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        ring = images[0]
        acc = GradedPolynomial(self.field, ring.weights, {})
        cache: dict = {}
        for e, c in self.terms.items():
            term = GradedPolynomial.constant(self.field, ring.weights, c)
            for i, k in enumerate(e):
                if k:
                    if (i, k) not in cache:
                        cache[(i, k)] = images[i] ** k
                    term = term * cache[(i, k)]
            acc = acc + term
        if acc.is_zero() and self._degree is not None:
            acc = GradedPolynomial(self.field, ring.weights, {}, self._degree)
        return acc

    def restrict_hyperplane(self, linear_form):
        """Restrict to ``{l = 0}`` for a linear form ``l`` (coefficient vector).

        The pivot is the last variable ``x_j`` with nonzero coefficient; it is
        eliminated via ``x_j = -(sum_{i != j} l_i x_i) / l_j`` and the remaining
        variables keep their order.  Returns ``(polynomial, change)`` where
        ``change`` is the ``nvars x (nvars-1)`` matrix expressing old variables
        in the new ones.  Standard weights only.
        """
        change = hyperplane_change(self.field, linear_form)
        nw = (1,) * (self.nvars - 1)
        images = [
            GradedPolynomial(self.field, nw, {tuple(1 if k == j else 0 for k in range(len(nw))): row[j] for j in range(len(nw))})
            for row in change
        ]
        if any(w != 1 for w in self.weights):
            raise ValueError("hyperplane restriction needs standard weights")
        return self.substitute(images), change

    def to_json(self):
        return poly_to_json(self)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(f"x{i}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)


def hyperplane_change(field, linear_form):
    """Matrix ``C`` with ``x_old = C x_new`` on the hyperplane ``{l = 0}``."""
    l = [field.coerce(x) for x in linear_form]
    nz = [i for i, x in enumerate(l) if not field.is_zero(x)]
    if not nz:
        raise ValueError("zero linear form")
    j = nz[-1]
    inv = field.inv(l[j])
    n = len(l)
    change = []
    for i in range(n):
        row = [field.zero] * (n - 1)
        if i == j:
            for k in range(n):
                if k != j:
                    col = k if k < j else k - 1
                    row[col] = field.neg(field.mul(l[k], inv))
        else:
            row[i if i < j else i - 1] = field.one
        change.append(row)
    return change


class BigradedPolynomial:
    """Polynomial in ``x_0..x_N, y_1..y_c`` stored as ``{(alpha, beta): coeff}``."""

    __slots__ = ("field", "config", "terms")

    def __init__(self, field, config: CIConfig, terms=None):
        self.field = field
        self.config = config
        clean = {}
        for (alpha, beta), coef in (terms or {}).items():
            key = (tuple(alpha), tuple(beta))
            if len(key[0]) != config.nvars or len(key[1]) != config.c:
                raise ValueError("exponent vector has wrong length")
            if not field.is_zero(coef):
                clean[key] = field.add(clean[key], coef) if key in clean else coef
        self.terms = {k: v for k, v in clean.items() if not field.is_zero(v)}

    def bidegree_of(self, alpha, beta):
        cfg = self.config
        a = sum(e * w for e, w in zip(alpha, cfg.weights)) - sum(b * d for b, d in zip(beta, cfg.degrees))
        return (a, sum(beta))

    @property
    def bidegree(self):
        degs = {self.bidegree_of(a, b) for a, b in self.terms}
        if len(degs) > 1:
            raise ValueError(f"not bihomogeneous: {sorted(degs)}")
        return degs.pop() if degs else None

    def is_bihomogeneous(self) -> bool:
        return len({self.bidegree_of(a, b) for a, b in self.terms}) <= 1

    def x_part(self, j: int) -> GradedPolynomial:
        """Coefficient of ``y_j`` (0-based) when the polynomial is linear in y."""
        unit = tuple(1 if i == j else 0 for i in range(self.config.c))
        return GradedPolynomial(
            self.field, self.config.weights, {a: c for (a, b), c in self.terms.items() if b == unit}
        )

    def partial_x(self, i: int) -> "BigradedPolynomial":
        F = self.field
        out = {}
        for (a, b), c in self.terms.items():
            if a[i]:
                na = list(a)
                na[i] -= 1
                out[(tuple(na), b)] = F.mul(c, F(a[i]))
        return BigradedPolynomial(F, self.config, out)

    def partial_y(self, j: int) -> "BigradedPolynomial":
        F = self.field
        out = {}
        for (a, b), c in self.terms.items():
            if b[j]:
                nb = list(b)
                nb[j] -= 1
                out[(a, tuple(nb))] = F.mul(c, F(b[j]))
        return BigradedPolynomial(F, self.config, out)

    def evaluate(self, p, q):
        F = self.field
        if len(p) != self.config.nvars or len(q) != self.config.c:
            raise ValueError("point has wrong number of coordinates")
        acc = F.zero
        for (a, b), c in self.terms.items():
            acc = F.add(acc, F.mul(c, F.mul(_mono_eval(F, a, p), _mono_eval(F, b, q))))
        return acc

    def to_json(self):
        F = self.field
        return [[F.to_json(c), list(a), list(b)] for (a, b), c in sorted(self.terms.items(), reverse=True)]


def random_polynomial(weights, degree: int, seed, field=QQ, bound: int = 9) -> GradedPolynomial:
    """Dense random homogeneous polynomial; coefficients drawn from ``seed``.

    Over Q the coefficients are integers in ``[-bound, bound]``; over a finite
    field they are uniform.  A degree-0 result is always a nonzero constant.
    """
    rng = make_rng(seed)
    weights = tuple(weights)
    terms = {}
    for e in monomial_basis(weights, degree):
        terms[e] = field.random(rng, bound) if isinstance(field, RationalField) else field.random(rng)
    if degree == 0:
        while field.is_zero(terms[(0,) * len(weights)]):
            terms[(0,) * len(weights)] = field.random(rng, bound) if isinstance(field, RationalField) else field.random(rng)
    return GradedPolynomial(field, weights, terms, degree)


def normalize_point(field, coords):
    """Scale a projective point so its first nonzero coordinate is 1."""
    coords = list(coords)
    for x in coords:
        if not field.is_zero(x):
            inv = field.inv(x)
            return tuple(field.mul(y, inv) for y in coords)
    raise ValueError("the zero vector is not a projective point")


def poly_to_json(poly: GradedPolynomial):
    F = poly.field
    return [[F.to_json(c), list(e)] for e, c in sorted(poly.terms.items(), reverse=True)]


def poly_from_json(data, field, weights, degree=None) -> GradedPolynomial:
    terms = {}
    for item in data:
        if len(item) != 2:
            raise ValueError(f"malformed term {item!r}; expected [[num, den], [exponents]]")
        coef, exps = item
        terms[tuple(int(e) for e in exps)] = field.from_json(coef)
    return GradedPolynomial(field, weights, terms, degree)
