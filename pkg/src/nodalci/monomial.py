"""Brute-force Hilbert functions of monomial ideals.

These routines count standard monomials directly and share no code with
:mod:`nodalci.macaulay`, so they serve as an independent oracle for the
Macaulay and Gotzmann statements.
"""
from __future__ import annotations

import itertools
import random
from functools import lru_cache

__all__ = [
    "monomials",
    "divides",
    "monomial_hilbert",
    "lex_segment_growth",
    "lex_ideal_hilbert",
    "enumerate_monomial_ideals",
    "artinian_monomial_ideals",
]


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """All exponent vectors of total degree ``degree``, lex-descending."""
    if degree < 0:
        return ()
    out = [e for e in itertools.product(range(degree, -1, -1), repeat=nvars) if sum(e) == degree]
    return tuple(out)


def divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_hilbert(gens, nvars: int, kmax: int) -> dict[int, int]:
    """``k -> dim (S/I)_k`` for ``0 <= k <= kmax`` where ``I = (gens)``."""
    gens = [tuple(g) for g in gens]
    table = {}
    for k in range(kmax + 1):
        table[k] = sum(1 for m in monomials(nvars, k) if not any(divides(g, m) for g in gens))
    return table


def lex_segment_growth(nvars: int, d: int, c: int) -> tuple[int, int]:
    """Codimensions in degrees ``d`` and ``d+1`` of the ideal spanned by a lex segment.

    The segment consists of the largest ``dim S_d - c`` monomials of degree ``d``.
    """
    basis = monomials(nvars, d)
    if not 0 <= c <= len(basis):
        raise ValueError(f"codimension {c} impossible in degree {d}")
    seg = basis[: len(basis) - c]
    h = lex_ideal_hilbert(seg, nvars, d + 1)
    return h[d], h[d + 1]


def lex_ideal_hilbert(segment, nvars: int, kmax: int) -> dict[int, int]:
    return monomial_hilbert(segment, nvars, kmax)


def _antichains(mons, size):
    comparable = [[divides(a, b) or divides(b, a) for b in mons] for a in mons]

    def rec(start, chosen):
        if len(chosen) == size:
            yield tuple(mons[i] for i in chosen)
            return
        for j in range(start, len(mons)):
            if not any(comparable[j][i] for i in chosen):
                chosen.append(j)
                yield from rec(j + 1, chosen)
                chosen.pop()

    yield from rec(0, [])


def enumerate_monomial_ideals(nvars: int, max_degree: int, budget: int, seed: int = 0):
    """Minimal generating sets of monomial ideals generated in degree ``<= max_degree``.

    Ideals are produced by increasing number of minimal generators.  Every class
    that fits in the remaining budget is listed exhaustively; the first class
    that does not fit is sampled uniformly (seeded) to fill the budget.  Returns
    ``(ideals, complete_up_to)`` where ``complete_up_to`` is the largest generator
    count enumerated exhaustively.  The zero ideal (no generators) comes first.
    """
    mons = [m for k in range(max_degree + 1) for m in monomials(nvars, k)]
    out: list[tuple] = []
    complete = -1
    size = 0
    while len(out) < budget and size <= len(mons):
        cls = list(_antichains(mons, size))
        if not cls:
            break
        room = budget - len(out)
        if len(cls) <= room:
            out.extend(cls)
            complete = size
        else:
            rng = random.Random(seed)
            picks = sorted(rng.sample(range(len(cls)), room))
            out.extend(cls[i] for i in picks)
        size += 1
    return out, complete


def artinian_monomial_ideals(nvars: int, max_power: int, extra_degree: int, max_extra: int = 2):
    """Artinian monomial ideals ``(x_0^a_0, ..., x_r^a_r) + (extra monomials)``.

    Pure powers range over ``1..max_power``; up to ``max_extra`` further
    monomials of degree ``<= extra_degree`` are added.
    """
    extras = [m for k in range(2, extra_degree + 1) for m in monomials(nvars, k) if sum(1 for x in m if x) >= 2]
    for powers in itertools.product(range(1, max_power + 1), repeat=nvars):
        pure = [tuple(a if j == i else 0 for j in range(nvars)) for i, a in enumerate(powers)]
        for n_extra in range(max_extra + 1):
            for ex in itertools.combinations(extras, n_extra):
                gens = pure + list(ex)
                minimal = [g for g in gens if not any(h != g and divides(h, g) for h in gens)]
                if len(minimal) == len(gens):
                    yield tuple(gens)
