"""Macaulay expansions and the growth bounds built on them.

For a base ``d >= 1`` every ``c >= 0`` has a unique expansion

    c = sum_{i=1}^{d} binom(i + eps_i, i),   eps_d >= ... >= eps_1 >= -1,

found greedily from the top index down.  From it come the upper growth bound
``c^<d>`` (``growth_up``), the shrink ``c_<d>`` (``shrink``) and the one-step
lower bound ``c_{*d}`` (``down``).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

__all__ = [
    "MacaulayExpansion",
    "MissingDegreeError",
    "OutOfRangeError",
    "binom",
    "expand",
    "growth_up",
    "shrink",
    "down",
    "low_degree_bound",
    "gotzmann_predicted",
    "gotzmann_polynomial",
    "check_macaulay_growth",
    "UnivariatePolynomial",
]


class OutOfRangeError(ValueError):
    """Arguments outside the range where a closed-form bound is valid."""


class MissingDegreeError(KeyError):
    """A Hilbert table lacks a degree needed by a check."""


def binom(a: int, b: int) -> int:
    """Binomial coefficient with ``binom(a, b) = 0`` whenever ``a < b`` or ``b < 0``."""
    if b < 0 or a < b:
        return 0
    return comb(a, b)


@dataclass(frozen=True)
class MacaulayExpansion:
    base: int
    coefficients: tuple[int, ...]  # (eps_d, eps_{d-1}, ..., eps_1)
    value: int

    def __post_init__(self):
        if len(self.coefficients) != self.base:
            raise ValueError("need exactly `base` coefficients")
        eps = self.coefficients
        if any(e < -1 for e in eps) or any(a < b for a, b in zip(eps, eps[1:])):
            raise ValueError(f"coefficients {eps} are not weakly decreasing and >= -1")
        if self.resum() != self.value:
            raise ValueError(f"coefficients {eps} do not sum to {self.value}")

    def eps(self, i: int) -> int:
        """``eps_i`` for ``1 <= i <= base``."""
        return self.coefficients[self.base - i]

    def terms(self):
        """Pairs ``(i, eps_i)`` for ``i = d, d-1, ..., 1``."""
        return [(self.base - j, e) for j, e in enumerate(self.coefficients)]

    def resum(self) -> int:
        return sum(binom(i + e, i) for i, e in self.terms())


def expand(c: int, d: int) -> MacaulayExpansion:
    if d <= 0:
        raise ValueError(f"base must be positive, got {d}")
    if c < 0:
        raise ValueError(f"value must be nonnegative, got {c}")
    eps = []
    rest = c
    for i in range(d, 0, -1):
        # largest e with binom(i+e, i) <= rest; e = -1 always qualifies
        lo, hi = -1, 0
        while binom(i + hi, i) <= rest:
            lo, hi = hi, 2 * hi + 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if binom(i + mid, i) <= rest:
                lo = mid
            else:
                hi = mid
        e = lo
        eps.append(e)
        rest -= binom(i + e, i)
    return MacaulayExpansion(d, tuple(eps), c)


def growth_up(c: int, d: int) -> int:
    """``c^<d>``: the largest possible codimension in degree ``d+1``."""
    return sum(binom(i + e + 1, i + 1) for i, e in expand(c, d).terms())


def shrink(c: int, d: int) -> int:
    """``c_<d>``."""
    return sum(binom(i + e - 1, i) for i, e in expand(c, d).terms())


def down(c: int, d: int) -> int:
    """``c_{*d}``: lower bound for ``h(d-1)`` given ``h(d) = c``."""
    if d < 2:
        raise ValueError(f"down() needs d >= 2, got {d}")
    return sum(binom(i + e - 1, i - 1) for i, e in expand(c, d).terms() if i >= 2)


def low_degree_bound(c: int, d: int, k: int) -> int:
    """Lower bound for ``h(k)``, ``0 <= k <= d``, from ``h(d) = c <= 2d + 1``."""
    if not 0 <= k <= d:
        raise ValueError(f"need 0 <= k <= d, got k={k}, d={d}")
    if c < 0:
        raise ValueError("c must be nonnegative")
    if c > 2 * d + 1:
        raise OutOfRangeError(f"c={c} exceeds 2d+1={2 * d + 1}")
    if c <= d:
        return min(c, k + 1)
    if c <= 2 * d:
        return min(k + (c - d), 2 * k + 1)
    return 2 * k + 1


class UnivariatePolynomial:
    """Exact polynomial in ``t`` with Fraction coefficients (constant term first)."""

    def __init__(self, coeffs):
        coeffs = [Fraction(x) for x in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @classmethod
    def binomial(cls, shift: int, e: int) -> "UnivariatePolynomial":
        """``binom(t + shift, e)`` as a polynomial in ``t`` (``e >= 0``)."""
        poly = cls([1])
        for j in range(e):
            poly = poly * cls([shift - j, 1])
        return poly * cls([Fraction(1, factorial(e))])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return UnivariatePolynomial([x + y for x, y in zip(a, b)])

    def __mul__(self, other):
        if not self.coeffs or not other.coeffs:
            return UnivariatePolynomial([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return UnivariatePolynomial(out)

    def __call__(self, t):
        acc = Fraction(0)
        for x in reversed(self.coeffs):
            acc = acc * t + x
        return acc

    def __eq__(self, other):
        return isinstance(other, UnivariatePolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i, x in reversed(list(enumerate(self.coeffs))):
            if x == 0:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            coef = str(x)
            if mono and x == 1:
                coef = ""
            parts.append(f"{coef}{'*' if coef and mono else ''}{mono}")
        return " + ".join(parts)

    def to_json(self):
        return [[x.numerator, x.denominator] for x in self.coeffs]


def gotzmann_predicted(expansion: MacaulayExpansion):
    """Hilbert polynomial and dimension predicted by Gotzmann persistence, literal form.

    Returns ``(sum_i binom(t + eps_i, t), eps_d)``; terms with ``eps_i = -1``
    vanish.  This literal form omits the per-term shift ``i - d``; see
    :func:`gotzmann_polynomial` for the shifted version that matches the
    Hilbert polynomial of lex-segment ideals.
    """
    poly = UnivariatePolynomial([])
    for _, e in expansion.terms():
        if e >= 0:
            poly = poly + UnivariatePolynomial.binomial(e, e)
    return poly, expansion.eps(expansion.base)


def gotzmann_polynomial(expansion: MacaulayExpansion) -> UnivariatePolynomial:
    """``sum_i binom(t + eps_i + i - d, eps_i)``: the persistence polynomial."""
    d = expansion.base
    poly = UnivariatePolynomial([])
    for i, e in expansion.terms():
        if e >= 0:
            poly = poly + UnivariatePolynomial.binomial(e + i - d, e)
    return poly


def check_macaulay_growth(h, d: int) -> bool:
    """True iff ``h(d+1) <= growth_up(h(d), d)`` for a Hilbert table ``h``."""
    missing = [k for k in (d, d + 1) if k not in h]
    if missing:
        raise MissingDegreeError(f"Hilbert table lacks degrees {missing}")
    return h[d + 1] <= growth_up(h[d], d)
