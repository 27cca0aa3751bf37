"""Exact scalar fields: the rationals, prime fields F_p and extensions F_{p^k}.

Every field exposes scalar operations on plain Python values (``add``, ``mul``,
``inv``, ...) and vectorised counterparts on numpy arrays (``vadd``, ``vmul``,
...), so that elimination code can be written once for all backends.

Element encodings:

* ``RationalField``: :class:`fractions.Fraction` (numpy ``object`` arrays).
* ``PrimeField``: integers in ``[0, p)`` (numpy ``int64`` arrays).
* ``GaloisField``: integer codes in ``[0, p**k)``; the base-``p`` digits of a
  code are the coefficients of the residue polynomial, constant term first.
"""
from __future__ import annotations

import itertools
import re
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "RationalField",
    "PrimeField",
    "GaloisField",
    "QQ",
    "finite_field",
    "parse_field",
    "is_prime",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class RationalField:
    """The field Q with exact :class:`Fraction` arithmetic."""

    name = "q"
    characteristic = 0
    order = None
    dtype = object
    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, x) -> Fraction:
        return Fraction(x)

    def coerce(self, x) -> Fraction:
        return Fraction(x)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("q")

    # scalar arithmetic
    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def div(self, a, b):
        return Fraction(a) / b

    def pow(self, a, e: int):
        return Fraction(a) ** e

    def is_zero(self, a) -> bool:
        return a == 0

    # vectorised arithmetic
    def array(self, data) -> np.ndarray:
        arr = np.array(data, dtype=object)
        if arr.size:
            flat = arr.reshape(-1)
            for i, v in enumerate(flat):
                if not isinstance(v, Fraction):
                    flat[i] = Fraction(v)
        return arr

    def zeros(self, shape) -> np.ndarray:
        arr = np.empty(shape, dtype=object)
        arr.fill(Fraction(0))
        return arr

    def vadd(self, a, b):
        return a + b

    def vsub(self, a, b):
        return a - b

    def vmul(self, a, b):
        return a * b

    def vneg(self, a):
        return -a

    def vzero(self, a) -> np.ndarray:
        return np.asarray(a == 0, dtype=bool)

    def matmul(self, a, b):
        if a.shape[1] == 0:
            return self.zeros((a.shape[0], b.shape[1]))
        return a.dot(b)

    # conversion
    def from_fraction(self, x: Fraction) -> Fraction:
        return Fraction(x)

    def to_json(self, x):
        x = Fraction(x)
        return [x.numerator, x.denominator]

    def from_json(self, pair):
        num, den = pair
        return Fraction(int(num), int(den))

    def random(self, rng, bound: int = 9) -> Fraction:
        return Fraction(rng.randint(-bound, bound))

    def frobenius(self, x):
        return x


QQ = RationalField()


class PrimeField:
    """The prime field F_p, elements stored as integers in ``[0, p)``."""

    degree = 1
    dtype = np.int64

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.order = p
        self.zero = 0
        self.one = 1
        self.name = f"fp:{p}"

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(self.name)

    def __call__(self, x) -> int:
        if isinstance(x, Fraction):
            return self.from_fraction(x)
        return int(x) % self.p

    coerce = __call__

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(int(a), self.p - 2, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        return pow(int(a), e, self.p)

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def array(self, data) -> np.ndarray:
        return np.asarray(data, dtype=np.int64) % self.p

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def vadd(self, a, b):
        return (a + b) % self.p

    def vsub(self, a, b):
        return (a - b) % self.p

    def vmul(self, a, b):
        return (a * b) % self.p

    def vneg(self, a):
        return (-a) % self.p

    def vzero(self, a) -> np.ndarray:
        return np.asarray(a) == 0

    def matmul(self, a, b):
        n = a.shape[1]
        if n == 0:
            return self.zeros((a.shape[0], b.shape[1]))
        # float64 (BLAS) is exact while every partial sum stays below 2^53
        if n * (self.p - 1) ** 2 < 2**53:
            prod = a.astype(np.float64) @ b.astype(np.float64)
            return (prod.astype(np.int64)) % self.p
        # int64 accumulation is safe while n * (p-1)^2 < 2^63
        if n * (self.p - 1) ** 2 < 2**62:
            return (a @ b) % self.p
        out = a.astype(object).dot(b.astype(object))
        return (out % self.p).astype(np.int64)

    def from_fraction(self, x: Fraction) -> int:
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise ZeroDivisionError(f"denominator of {x} vanishes mod {self.p}")
        return (x.numerator * pow(x.denominator, self.p - 2, self.p)) % self.p

    def to_json(self, x):
        return [int(x), 1]

    def from_json(self, pair):
        num, den = pair
        return self.from_fraction(Fraction(int(num), int(den)))

    def random(self, rng, bound=None) -> int:
        return rng.randrange(self.p)

    def frobenius(self, x):
        return x

    def elements(self):
        return range(self.p)


def _poly_mulmod(a, b, modulus, p):
    """Multiply coefficient lists ``a*b`` modulo a monic ``modulus`` over F_p."""
    k = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for deg in range(len(prod) - 1, k - 1, -1):
        coef = prod[deg]
        if coef:
            for j in range(k + 1):
                prod[deg - k + j] = (prod[deg - k + j] - coef * modulus[j]) % p
    return (prod + [0] * k)[:k]


def _is_irreducible(modulus, p) -> bool:
    # a polynomial of degree <= 3 is irreducible iff it has no root; in general
    # test that x^(p^i) != x mod f for i <= k/2 via gcd-free brute force on
    # monic factors of degree <= k/2
    k = len(modulus) - 1
    for dd in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=dd):
            factor = list(tail) + [1]
            if _poly_divides(factor, modulus, p):
                return False
    return True


def _poly_divides(factor, poly, p) -> bool:
    rem = list(poly)
    df = len(factor) - 1
    for deg in range(len(rem) - 1, df - 1, -1):
        coef = rem[deg]
        if coef:
            for j in range(df + 1):
                rem[deg - df + j] = (rem[deg - df + j] - coef * factor[j]) % p
    return not any(rem[:df])


class GaloisField:
    """The field F_{p^k} (k >= 2) with table-driven arithmetic on integer codes.

    The defining polynomial is the lexicographically first monic irreducible
    polynomial of degree ``k``; the primitive element is the smallest code that
    generates the multiplicative group.  Both choices are deterministic, so codes
    are stable across runs.
    """

    dtype = np.int64

    def __init__(self, p: int, k: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if k < 2:
            raise ValueError("use PrimeField for k = 1")
        q = p**k
        if q > 5000:
            raise ValueError(f"GF({p}^{k}) too large for table arithmetic")
        self.p, self.degree, self.order = p, k, q
        self.characteristic = p
        self.name = f"gf:{p}^{k}"
        self.zero, self.one = 0, 1

        modulus = None
        for tail in itertools.product(range(p), repeat=k):
            cand = list(reversed(tail)) + [1]
            if cand[0] != 0 and _is_irreducible(cand, p):
                modulus = cand
                break
        self.modulus = tuple(modulus)

        self._digits = np.array(
            [[(c // p**i) % p for i in range(k)] for c in range(q)], dtype=np.int64
        )
        powers = p ** np.arange(k, dtype=np.int64)

        def code(digs):
            return int(sum(int(d) * p**i for i, d in enumerate(digs)))

        exp = None
        for g in range(2, q):
            gd = list(self._digits[g])
            seq = [1]
            cur = [1] + [0] * (k - 1)
            for _ in range(q - 2):
                cur = _poly_mulmod(cur, gd, modulus, p)
                c = code(cur)
                if c == 1:
                    break
                seq.append(c)
            if len(seq) == q - 1:
                exp = seq
                self.generator = g
                break
        exp = np.array(exp + exp, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        log[exp[: q - 1]] = np.arange(q - 1)
        self._exp, self._log = exp, log

        d = self._digits
        add = np.zeros((q, q), dtype=np.int64)
        sub = np.zeros((q, q), dtype=np.int64)
        for i in range(k):
            add += ((d[:, None, i] + d[None, :, i]) % p) * powers[i]
            sub += ((d[:, None, i] - d[None, :, i]) % p) * powers[i]
        self._add, self._sub = add, sub
        self._neg = sub[0].copy()
        inv = np.zeros(q, dtype=np.int64)
        inv[1:] = exp[(q - 1 - log[1:]) % (q - 1)]
        self._inv = inv
        frob = np.zeros(q, dtype=np.int64)
        frob[1:] = exp[(log[1:] * p) % (q - 1)]
        self._frob = frob
        # python-list copies for fast scalar lookups
        self._add_l = add.tolist()
        self._sub_l = sub.tolist()
        self._exp_l, self._log_l = exp.tolist(), log.tolist()
        self._inv_l, self._neg_l = inv.tolist(), self._neg.tolist()

    def __repr__(self):
        return f"GF({self.p}^{self.degree})"

    def __eq__(self, other):
        return isinstance(other, GaloisField) and other.order == self.order

    def __hash__(self):
        return hash(self.name)

    def __call__(self, x) -> int:
        """Image of an integer or fraction under the prime-field embedding."""
        if isinstance(x, Fraction):
            return self.from_fraction(x)
        return int(x) % self.p

    def coerce(self, x) -> int:
        """Normalise an element given by its code."""
        if isinstance(x, Fraction):
            return self.from_fraction(x)
        x = int(x)
        if not 0 <= x < self.order:
            raise ValueError(f"{x} is not a code of {self!r}")
        return x

    def add(self, a, b):
        return self._add_l[a][b]

    def sub(self, a, b):
        return self._sub_l[a][b]

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp_l[self._log_l[a] + self._log_l[b]]

    def neg(self, a):
        return self._neg_l[a]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._inv_l[a]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        if e == 0:
            return 1
        if a == 0:
            return 0
        return self._exp_l[(self._log_l[a] * e) % (self.order - 1)]

    def is_zero(self, a) -> bool:
        return a == 0

    def array(self, data) -> np.ndarray:
        return np.asarray(data, dtype=np.int64)

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def vadd(self, a, b):
        return self._add[a, b]

    def vsub(self, a, b):
        return self._sub[a, b]

    def vmul(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def vneg(self, a):
        return self._neg[a]

    def vzero(self, a) -> np.ndarray:
        return np.asarray(a) == 0

    def vinv(self, a):
        return self._inv[a]

    def vfrobenius(self, a):
        return self._frob[a]

    def matmul(self, a, b):
        out = self.zeros((a.shape[0], b.shape[1]))
        for j in range(a.shape[1]):
            out = self.vadd(out, self.vmul(a[:, j : j + 1], b[j : j + 1, :]))
        return out

    def from_fraction(self, x: Fraction) -> int:
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise ZeroDivisionError(f"denominator of {x} vanishes mod {self.p}")
        return (x.numerator * pow(x.denominator, self.p - 2, self.p)) % self.p

    def to_json(self, x):
        return [int(x), 1]

    def from_json(self, pair):
        num, den = pair
        if int(den) != 1:
            return self.from_fraction(Fraction(int(num), int(den)))
        return int(num) % self.order

    def random(self, rng, bound=None) -> int:
        return rng.randrange(self.order)

    def frobenius(self, x):
        return int(self._frob[x])

    def elements(self):
        return range(self.order)


@lru_cache(maxsize=None)
def finite_field(p: int, k: int = 1):
    """Return F_{p^k}; instances are cached so tables are built once."""
    if k == 1:
        return PrimeField(p)
    return GaloisField(p, k)


_FIELD_RE = re.compile(r"^(?:fp:(\d+)|gf:(\d+)\^(\d+))$")


def parse_field(spec: str):
    """Parse ``q``, ``fp:<p>`` or ``gf:<p>^<k>``."""
    spec = spec.strip().lower()
    if spec in ("q", "qq"):
        return QQ
    m = _FIELD_RE.match(spec)
    if not m:
        raise ValueError(f"unrecognised field {spec!r}; expected q, fp:<p> or gf:<p>^<k>")
    if m.group(1):
        return finite_field(int(m.group(1)))
    return finite_field(int(m.group(2)), int(m.group(3)))
