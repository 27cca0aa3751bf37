"""Example complete intersections with certified node loci.

Families:

* ``plane``: ``f_i = x_3 a_i + x_4 b_i + x_5 c_i`` contains the plane
  ``Pi = {x_3 = x_4 = x_5 = 0}``.  Its singular points are where the 2x3 matrix
  ``(a_i, b_i, c_i)|_Pi`` drops rank.  That matrix is built as a Hilbert-Burch
  matrix of a planted set of rational points, so the nodes are known exactly.
* ``induced``: ``f_1 = x_0^2 + ... + x_3^2`` is singular along a line ``L``;
  ``g`` cuts ``L`` in ``d_2`` planted rational points, all lifting to the same
  ``(y_1 : y_2) = (1 : 0)``.
* ``smooth``: random equations, negative controls.

Every example is checked after construction (node certification over Q, point
scans over ``F_5``); a failed check re-seeds with ``seed + 1``.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field as dc_field
from fractions import Fraction
from math import gcd, lcm

from .cayley import (
    CompleteIntersection,
    NodeRecord,
    NotIsolatedLiftError,
    NotSingularError,
    certify_node,
    find_singular_points,
    hypersurface_smooth_certificate,
    lift_node,
)
from .defect import node_lower_bound
from .fields import QQ, finite_field
from .hilbert import evaluation_matrix
from .linalg import nullspace, rank
from .polyring import CIConfig, GradedPolynomial, make_rng, monomial_basis

__all__ = [
    "ExampleProvenance",
    "Example",
    "GenerationError",
    "plane_containing_ci",
    "induced_defect_example",
    "quadric_pair_cases",
    "smooth_random_ci",
    "generate",
    "PLANE_BASIS",
]

SCAN_PRIME = 5
MAX_RETRIES = 40
PLANE_BASIS = [[1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]]


class GenerationError(RuntimeError):
    pass


@dataclass
class ExampleProvenance:
    family: str
    seed: int
    used_seed: int
    retries: int
    node_locus: str
    node_locus_basis: list | None
    expected_nodes: int
    expected_nodes_formula: str
    expected_defect: int | None
    induced_defect: bool
    line_in_hyperplane_section: bool
    partial_ci_smooth: bool | None
    scans: list = dc_field(default_factory=list)

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, data):
        return cls(**data)


@dataclass
class Example:
    ci: CompleteIntersection
    nodes: list
    provenance: ExampleProvenance

    def to_json(self):
        return {
            "ci": self.ci.to_json(),
            "nodes": [nd.to_json() for nd in self.nodes],
            "provenance": self.provenance.to_json(),
        }

    @classmethod
    def from_json(cls, data):
        ci = CompleteIntersection.from_json(data["ci"])
        nodes = [NodeRecord.from_json(nd, ci.field) for nd in data["nodes"]]
        return cls(ci, nodes, ExampleProvenance.from_json(data["provenance"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# ---------------------------------------------------------------------------
# helpers


def _vars(weights, field=QQ):
    return [GradedPolynomial.variable(field, weights, i) for i in range(len(weights))]


def _poly_from_vector(vec, basis, weights, degree):
    return GradedPolynomial(QQ, weights, {e: c for e, c in zip(basis, vec)}, degree)


def _integral(vec):
    """Scale a rational vector to coprime integers."""
    den = lcm(*[Fraction(x).denominator for x in vec]) if len(vec) else 1
    ints = [int(Fraction(x) * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [Fraction(x // g) for x in ints] if g else [Fraction(0)] * len(ints)


def _embed(poly: GradedPolynomial, nvars: int) -> GradedPolynomial:
    """View a polynomial in ``x_0..x_{k-1}`` inside ``k[x_0..x_{nvars-1}]``."""
    pad = (0,) * (nvars - poly.nvars)
    return GradedPolynomial(poly.field, (1,) * nvars, {e + pad: c for e, c in poly.terms.items()}, poly.degree)


def _random_in_ideal(rng, gens_idx, nvars, degree, bound):
    """Random element of degree ``degree`` in the ideal generated by the variables ``gens_idx``."""
    W = (1,) * nvars
    x = _vars(W)
    acc = GradedPolynomial(QQ, W, {}, degree)
    for i in gens_idx:
        cof = {e: Fraction(rng.randint(-bound, bound)) for e in monomial_basis(W, degree - 1)}
        acc = acc + x[i] * GradedPolynomial(QQ, W, cof, degree - 1)
    return acc


def _distinct_points_p2(rng, count, p=SCAN_PRIME):
    """``count`` distinct normalised points of ``P^2(F_p)``, lifted to integers in ``[0, p)``."""
    pool = []
    for lead in range(3):
        free = 2 - lead
        for idx in range(p**free):
            pt = [0] * 3
            pt[lead] = 1
            r = idx
            for col in range(2, lead, -1):
                pt[col] = r % p
                r //= p
            pool.append(tuple(pt))
    if count > len(pool):
        raise GenerationError(f"P^2(F_{p}) has only {len(pool)} points")
    return sorted(rng.sample(pool, count))


def _certify_all(X, points):
    nodes = []
    for pt in points:
        try:
            nd = lift_node(X, pt)
        except (NotSingularError, NotIsolatedLiftError):
            return None
        if not certify_node(X, nd):
            return None
        nodes.append(nd)
    return nodes


def _reduce_ok(X, p=SCAN_PRIME):
    try:
        X.change_field(finite_field(p))
    except ZeroDivisionError:
        return False
    return True


def _partial_smooth(X) -> bool | None:
    """Certified smoothness of ``V(f_1)`` when ``c = 2``; ``None`` when not decided."""
    if X.config.c != 2:
        return None
    return hypersurface_smooth_certificate(X.equations[0])


def _points_mod(nodes, p=SCAN_PRIME):
    F = finite_field(p)
    return sorted(tuple(int(v) for v in nd.change_field(F).p) for nd in nodes)


# ---------------------------------------------------------------------------
# plane family


def _hilbert_burch(rng, delta, e1, e2, bound=3):
    """Rows of degrees ``e1``, ``e2`` whose 2x2 minors cut out ``delta`` in ``P^2``.

    Returns ``None`` when the planted points are not general enough.
    """
    W3 = (1, 1, 1)
    t = e1 + e2
    basis_t = monomial_basis(W3, t)
    E = evaluation_matrix(basis_t, delta, QQ)
    gens = nullspace(E, QQ, len(basis_t))
    if gens.shape[0] != 3:
        return None
    g = [_poly_from_vector(_integral(row), basis_t, W3, t) for row in gens]

    def syzygies(e):
        be = monomial_basis(W3, e)
        bt = monomial_basis(W3, e + t)
        idx = {m: i for i, m in enumerate(bt)}
        cols = []
        for gi in g:
            for m in be:
                col = [Fraction(0)] * len(bt)
                for ge, c in gi.terms.items():
                    col[idx[tuple(a + b for a, b in zip(ge, m))]] += c
                cols.append(col)
        M = QQ.array([list(r) for r in zip(*cols)]).reshape(len(bt), len(cols))
        return nullspace(M, QQ, len(cols)), be

    def row_from(vec, be, e):
        n = len(be)
        return [_poly_from_vector(vec[i * n : (i + 1) * n], be, W3, e) for i in range(3)]

    S1, be1 = syzygies(e1)
    if e1 == e2:
        if S1.shape[0] != 2:
            return None
        combos = [[rng.choice([-1, 1]) * rng.randint(1, bound) for _ in range(2)] for _ in range(2)]
        vecs = [_integral([sum(Fraction(a) * S1[k][j] for k, a in enumerate(cb)) for j in range(S1.shape[1])]) for cb in combos]
        rows = [row_from(v, be1, e1) for v in vecs]
    else:
        if S1.shape[0] != 1:
            return None
        S2, be2 = syzygies(e2)
        coeffs = [rng.choice([-1, 1]) * rng.randint(1, bound) for _ in range(S2.shape[0])]
        v2 = _integral([sum(Fraction(a) * S2[k][j] for k, a in enumerate(coeffs)) for j in range(S2.shape[1])])
        rows = [row_from(_integral(list(S1[0])), be1, e1), row_from(v2, be2, e2)]
    minors = [rows[0][a] * rows[1][b] - rows[0][b] * rows[1][a] for a, b in ((1, 2), (0, 2), (0, 1))]
    if any(m.is_zero() for m in minors):
        return None
    # the minors must define delta: h_J(k) = |delta| in two consecutive degrees
    # past the generating degree (persistence then fixes the Hilbert polynomial)
    F = finite_field(10007)
    for k in (t + 1, t + 2):
        bk = monomial_basis(W3, k)
        idx = {m: i for i, m in enumerate(bk)}
        span = []
        for mi in minors:
            mf = mi.change_field(F)
            for m in monomial_basis(W3, k - t):
                row = [0] * len(bk)
                for e, c in mf.terms.items():
                    row[idx[tuple(a + b for a, b in zip(e, m))]] = c
                span.append(row)
        if len(bk) - rank(F.array(span), F) != len(delta):
            return None
    return rows


def plane_containing_ci(config: CIConfig, seed: int = 0, ext: int = 2, bound: int = 3) -> Example:
    """Complete intersection containing ``Pi`` whose nodes are planted rational points."""
    if config.c != 2 or config.n != 3 or not config.standard:
        raise ValueError("plane family needs c = 2, n = 3 and standard weights")
    e1, e2 = config.degrees[0] - 1, config.degrees[1] - 1
    if e1 < 1:
        raise ValueError("plane family needs degrees >= 2")
    expected = node_lower_bound(config)
    W = config.weights
    x = _vars(W)
    for attempt in range(MAX_RETRIES):
        used = seed + attempt
        rng = make_rng(used)
        delta = _distinct_points_p2(rng, expected)
        rows = _hilbert_burch(rng, delta, e1, e2, bound)
        if rows is None:
            continue
        eqs = []
        for i, (row, e) in enumerate(zip(rows, (e1, e2))):
            f = GradedPolynomial(QQ, W, {}, e + 1)
            for j in range(3):
                entry = _embed(row[j], 6) + _random_in_ideal(rng, (3, 4, 5), 6, e, bound)
                f = f + x[3 + j] * entry
            eqs.append(f)
        X = CompleteIntersection(config, eqs)
        if not _reduce_ok(X):
            continue
        nodes = _certify_all(X, [tuple(Fraction(v) for v in pt) + (Fraction(0),) * 3 for pt in delta])
        if nodes is None:
            continue
        scans = _scan_checks(X, nodes, PLANE_BASIS, ext)
        if scans is None:
            continue
        partial = _partial_smooth(X)
        if not partial:
            continue
        prov = ExampleProvenance(
            family="plane",
            seed=seed,
            used_seed=used,
            retries=attempt,
            node_locus="nodes lie on the plane x3 = x4 = x5 = 0, where the 2x3 coefficient matrix drops rank",
            node_locus_basis=PLANE_BASIS,
            expected_nodes=expected,
            expected_nodes_formula="sum_{i<=j} (d_i - 1)(d_j - 1)",
            expected_defect=1,
            induced_defect=False,
            line_in_hyperplane_section=True,
            partial_ci_smooth=partial,
            scans=scans,
        )
        return Example(X, nodes, prov)
    raise GenerationError(f"no generic plane example found after {MAX_RETRIES} seeds")


def _scan_checks(X, nodes, locus_basis, ext, ambient=True):
    """Scan the node locus over ``F_{5^k}`` (k <= ext) and, optionally, all of ``P^5(F_5)``.

    Returns scan summaries, or ``None`` when the scans find anything beyond the
    planted nodes.
    """
    planted = _points_mod(nodes)
    if len(set(planted)) != len(planted):
        return None
    summaries = []
    for k in range(1, ext + 1):
        res = find_singular_points(X, SCAN_PRIME, k, subspace=locus_basis)
        info = res.summary()
        info["scope"] = "node locus"
        summaries.append(info)
        if len(res.points) != len(nodes) or any(s != 1 for s in res.orbit_sizes):
            return None
        if k == 1 and sorted(res.points) != planted:
            return None
    if ambient:
        res = find_singular_points(X, SCAN_PRIME, 1)
        info = res.summary()
        info["scope"] = "ambient"
        summaries.append(info)
        if sorted(res.points) != planted:
            return None
    return summaries


# ---------------------------------------------------------------------------
# induced family


def induced_defect_example(config: CIConfig, seed: int = 0, ext: int = 2, bound: int = 3) -> Example:
    """``V(x_0^2+..+x_3^2, g)``: nodes are the ``d_2`` points of ``L ∩ V(g)``, ``L = {x_0=..=x_3=0}``."""
    if config.c != 2 or config.n != 3 or config.degrees[0] != 2 or not config.standard:
        raise ValueError("induced family needs c = 2, n = 3, d_1 = 2 and standard weights")
    d2 = config.degrees[1]
    if d2 > SCAN_PRIME + 1:
        raise ValueError(f"at most {SCAN_PRIME + 1} planted points fit on P^1(F_{SCAN_PRIME})")
    W = config.weights
    x = _vars(W)
    f1 = x[0] ** 2 + x[1] ** 2 + x[2] ** 2 + x[3] ** 2
    line_basis = [[0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1]]
    line_pts = [(1, a) for a in range(SCAN_PRIME)] + [(0, 1)]
    for attempt in range(MAX_RETRIES):
        used = seed + attempt
        rng = make_rng(used)
        roots = sorted(rng.sample(line_pts, d2))
        g = GradedPolynomial.constant(QQ, W, Fraction(rng.choice([1, 2, 3])))
        for s, t in roots:
            g = g * (x[4] * Fraction(t) - x[5] * Fraction(s))
        g = g + _random_in_ideal(rng, (0, 1, 2, 3), 6, d2, bound)
        X = CompleteIntersection(config, [f1, g])
        if not _reduce_ok(X):
            continue
        pts = [(Fraction(0),) * 4 + (Fraction(s), Fraction(t)) for s, t in roots]
        nodes = _certify_all(X, pts)
        if nodes is None:
            continue
        scans = _scan_checks(X, nodes, line_basis, ext)
        if scans is None:
            continue
        prov = ExampleProvenance(
            family="induced",
            seed=seed,
            used_seed=used,
            retries=attempt,
            node_locus="nodes lie on the singular line x0 = x1 = x2 = x3 = 0 of the first quadric",
            node_locus_basis=line_basis,
            expected_nodes=d2,
            expected_nodes_formula="s * d_c with s = 1",
            expected_defect=1 if d2 == 2 else None,
            induced_defect=True,
            line_in_hyperplane_section=False,
            partial_ci_smooth=False,
            scans=scans,
        )
        return Example(X, nodes, prov)
    raise GenerationError(f"no generic induced example found after {MAX_RETRIES} seeds")


# ---------------------------------------------------------------------------
# smooth controls


def smooth_random_ci(config: CIConfig, seed: int = 0, bound: int = 3) -> Example:
    """Random equations whose ambient ``F_5`` scan finds no singular point."""
    W = config.weights
    if not config.standard:
        raise ValueError("smooth controls use standard weights")
    for attempt in range(MAX_RETRIES):
        used = seed + attempt
        rng = make_rng(used)
        eqs = []
        for d in config.degrees:
            terms = {e: Fraction(rng.randint(-bound, bound)) for e in monomial_basis(W, d)}
            eqs.append(GradedPolynomial(QQ, W, terms, d))
        if any(f.is_zero() for f in eqs):
            continue
        X = CompleteIntersection(config, eqs)
        if not _reduce_ok(X):
            continue
        res = find_singular_points(X, SCAN_PRIME, 1)
        if res.points:
            continue
        info = res.summary()
        info["scope"] = "ambient"
        prov = ExampleProvenance(
            family="smooth",
            seed=seed,
            used_seed=used,
            retries=attempt,
            node_locus="none: the ambient scan over F_5 is empty",
            node_locus_basis=None,
            expected_nodes=0,
            expected_nodes_formula="0",
            expected_defect=0,
            induced_defect=False,
            line_in_hyperplane_section=False,
            partial_ci_smooth=_partial_smooth(X),
            scans=[info],
        )
        return Example(X, [], prov)
    raise GenerationError(f"no smooth example found after {MAX_RETRIES} seeds")


def quadric_pair_cases(seed: int = 0) -> list[Example]:
    """Three (2,2) examples: plane (3 nodes), induced (2 nodes, equal lifts), smooth."""
    cfg = CIConfig((2, 2))
    return [
        plane_containing_ci(cfg, seed),
        induced_defect_example(cfg, seed),
        smooth_random_ci(cfg, seed),
    ]


FAMILIES = {
    "plane": plane_containing_ci,
    "induced": induced_defect_example,
    "smooth": smooth_random_ci,
}


def generate(family: str, degrees, seed: int = 0) -> Example:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    return FAMILIES[family](CIConfig(tuple(degrees)), seed)
