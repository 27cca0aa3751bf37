import itertools

import pytest
from hypothesis import given, settings, strategies as st

from nodalci.macaulay import (
    MacaulayExpansion,
    MissingDegreeError,
    OutOfRangeError,
    UnivariatePolynomial,
    binom,
    check_macaulay_growth,
    down,
    expand,
    gotzmann_polynomial,
    gotzmann_predicted,
    growth_up,
    low_degree_bound,
    shrink,
)
from nodalci.monomial import (
    artinian_monomial_ideals,
    lex_segment_growth,
    monomial_hilbert,
    monomials,
)


def test_binom_conventions():
    assert binom(5, 2) == 10
    assert binom(2, 5) == 0
    assert binom(3, -1) == 0
    assert binom(0, 0) == 1


@pytest.mark.parametrize(
    "c,d,eps",
    [(5, 3, (1, 0, -1)), (0, 4, (-1, -1, -1, -1)), (13, 6, (1, 1, -1, -1, -1, -1))],
)
def test_expand_examples(c, d, eps):
    e = expand(c, d)
    assert e.coefficients == eps
    assert e.resum() == c


def test_expand_matches_exhaustive_search():
    # every weakly decreasing sequence >= -1 with small entries, grouped by value
    for d in range(1, 5):
        found = {}
        for seq in itertools.product(range(-1, 5), repeat=d):
            if all(a >= b for a, b in zip(seq, seq[1:])):
                val = sum(binom(i + e, i) for i, e in zip(range(d, 0, -1), seq))
                found.setdefault(val, []).append(seq)
        for c, seqs in found.items():
            if c > 40:
                continue
            # the expansion is unique among admissible sequences
            assert seqs == [expand(c, d).coefficients]


def test_expansion_validation():
    with pytest.raises(ValueError):
        MacaulayExpansion(3, (0, 1, -1), 3)
    with pytest.raises(ValueError):
        MacaulayExpansion(2, (1, 0), 99)
    with pytest.raises(ValueError):
        expand(-1, 3)
    with pytest.raises(ValueError):
        expand(3, 0)


def test_growth_examples():
    assert growth_up(4, 7) == 4
    assert growth_up(5, 3) == 6
    assert growth_up(13, 6) == 15


def test_shrink_and_down_examples():
    assert shrink(0, 5) == 0
    assert shrink(5, 3) == 1
    # 7 = binom(4,3) + binom(3,2) + 0, so eps = (1, 1, -1)
    assert expand(7, 3).coefficients == (1, 1, -1)
    assert shrink(7, 3) == binom(3, 3) + binom(2, 2)
    assert down(0, 3) == 0
    assert down(5, 3) == 4
    assert down(9, 4) == 7
    with pytest.raises(ValueError):
        down(3, 1)


def test_low_degree_bound_examples():
    assert low_degree_bound(5, 7, 2) == 3
    assert low_degree_bound(10, 7, 4) == 7
    assert low_degree_bound(15, 7, 3) == 7
    with pytest.raises(OutOfRangeError):
        low_degree_bound(16, 7, 3)
    with pytest.raises(ValueError):
        low_degree_bound(3, 7, 8)


def test_growth_regimes_closed_forms():
    for d in range(1, 31):
        for c in range(0, d + 1):
            assert growth_up(c, d) == c
        for c in range(d + 1, 2 * d + 1):
            assert growth_up(c, d) == c + 1
        if d >= 2:
            assert growth_up(2 * d + 1, d) == 2 * d + 3
    # for d = 1 the value 3 expands as binom(3, 1), not as eps_d = eps_{d-1} = 1
    assert expand(3, 1).coefficients == (2,)
    assert growth_up(3, 1) == 6


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 30))
def test_expand_reconstructs(c, d):
    e = expand(c, d)
    assert e.resum() == c
    assert all(a >= b for a, b in zip(e.coefficients, e.coefficients[1:]))
    assert min(e.coefficients) >= -1


def test_monotone_in_c():
    for d in range(1, 13):
        g = [growth_up(c, d) for c in range(2001)]
        s = [shrink(c, d) for c in range(2001)]
        assert g == sorted(g) and s == sorted(s)
        if d >= 2:
            dn = [down(c, d) for c in range(2001)]
            assert dn == sorted(dn)


def test_lex_segments_attain_growth():
    for nvars in (2, 3):
        for d in range(1, 7):
            for c in range(len(monomials(nvars, d)) + 1):
                hd, hd1 = lex_segment_growth(nvars, d, c)
                assert hd == c
                assert hd1 <= growth_up(c, d)
                if nvars == 3:
                    assert hd1 == growth_up(c, d)


def test_check_macaulay_growth():
    assert check_macaulay_growth({3: 0, 4: 0}, 3)
    assert not check_macaulay_growth({3: 5, 4: 7}, 3)
    # three general plane points: h = 1, 3, 3
    assert check_macaulay_growth({0: 1, 1: 3, 2: 3}, 1)
    with pytest.raises(MissingDegreeError):
        check_macaulay_growth({3: 1}, 3)


def test_gotzmann_literal_form():
    poly, dim = gotzmann_predicted(expand(1, 4))
    assert poly == UnivariatePolynomial([1]) and dim == 0
    poly, dim = gotzmann_predicted(expand(5, 5))
    assert poly == UnivariatePolynomial([5]) and dim == 0
    e = expand(13, 6)
    poly, dim = gotzmann_predicted(e)
    assert dim == 1 and poly.degree == 1 and poly.coeffs[1] == 2


def test_gotzmann_shifted_form_matches_lex_ideals():
    # Hilbert polynomial of a lex ideal agrees with the shifted persistence polynomial
    for d in range(2, 6):
        for c in range(1, len(monomials(3, d)) + 1):
            seg = monomials(3, d)[: len(monomials(3, d)) - c]
            h = monomial_hilbert(seg, 3, d + 8)
            poly = gotzmann_polynomial(expand(c, d))
            assert all(poly(t) == h[t] for t in range(d, d + 9))


def test_down_on_artinian_ideals():
    for gens in artinian_monomial_ideals(3, 4, 4, max_extra=1):
        h = monomial_hilbert(gens, 3, 10)
        for d in range(2, 10):
            if h[d]:
                lo = down(h[d], d)
                assert h[d - 1] >= lo
                if expand(h[d], d).eps(1) >= 0:
                    assert h[d - 1] > lo


def test_strict_decrease_for_artinian_ideals():
    # base-point free in degree d+1 and h(d) <= d: h drops strictly until it vanishes
    checked = 0
    for gens in artinian_monomial_ideals(3, 4, 4, max_extra=2):
        h = monomial_hilbert(gens, 3, 14)
        top_power = max(sum(g) for g in gens if sum(1 for x in g if x) == 1)
        for d in range(max(1, top_power - 1), 13):
            if h[d] <= d:
                checked += 1
                for k in range(d, 13):
                    assert h[k + 1] < h[k] or h[k] == 0
                break
    assert checked > 100


def test_gotzmann_literal_form_mismatch_is_recorded():
    # the literal polynomial misses the per-term shift; its dimension is still right
    mismatches = 0
    for d in range(2, 6):
        for c in range(1, len(monomials(3, d)) + 1):
            seg = monomials(3, d)[: len(monomials(3, d)) - c]
            h = monomial_hilbert(seg, 3, d + 8)
            poly, dim = gotzmann_predicted(expand(c, d))
            assert poly.degree == gotzmann_polynomial(expand(c, d)).degree == dim
            mismatches += any(poly(t) != h[t] for t in range(d, d + 9))
    assert mismatches == 20
