"""The Cayley trick: from ``X = V(f_1..f_c)`` to ``Y = V(sum y_i f_i)``.

A singular point ``p`` of ``X`` with ``rank M(p) = c - 1`` lifts to the unique
point ``(p, q)`` of ``Y`` where ``q`` spans the left kernel of the Jacobian
``M(p)``.  Node certification checks that the Hessian of the affine equation
of ``Y`` at ``(p, q)`` is nondegenerate.

Point scans over finite fields are vectorised with numpy and enumerate
normalised representatives (first nonzero coordinate equal to 1).
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd, lcm
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from .fields import QQ, GaloisField, PrimeField, RationalField, finite_field
from .linalg import left_kernel, rank
from .polyring import BigradedPolynomial, CIConfig, GradedPolynomial, normalize_point, poly_from_json, poly_to_json

__all__ = [
    "CompleteIntersection",
    "NodeRecord",
    "NotIsolatedLiftError",
    "NotSingularError",
    "BudgetExceededError",
    "ScanResult",
    "cayley_equation",
    "jacobian_at",
    "lift_node",
    "hessian_at",
    "certify_node",
    "find_singular_points",
    "scan_singular",
    "projective_points",
    "standard_node_model",
]

DEFAULT_BUDGET = 2_000_000


class NotIsolatedLiftError(ValueError):
    """The fiber of the Cayley projection over ``p`` is not a single point."""

    def __init__(self, fiber_dimension: int, point=None):
        self.fiber_dimension = fiber_dimension
        self.point = point
        super().__init__(
            f"not an isolated hypersurface-singularity lift: fiber has dimension {fiber_dimension}"
        )


class NotSingularError(ValueError):
    """The point is not a singular point of ``X`` (or of ``Y``)."""


class BudgetExceededError(RuntimeError):
    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"scan needs {required} points, budget is {budget}")


@dataclass
class CompleteIntersection:
    config: CIConfig
    equations: list[GradedPolynomial]

    def __post_init__(self):
        cfg = self.config
        if len(self.equations) != cfg.c:
            raise ValueError(f"expected {cfg.c} equations, got {len(self.equations)}")
        fields = {f.field for f in self.equations}
        if len(fields) != 1:
            raise ValueError("equations live over different fields")
        for i, (f, d) in enumerate(zip(self.equations, cfg.degrees)):
            if f.weights != cfg.weights:
                raise ValueError(f"equation {i} has weights {f.weights}, expected {cfg.weights}")
            if f.degree is not None and f.degree != d:
                raise ValueError(f"equation {i} has degree {f.degree}, expected {d}")

    @property
    def field(self):
        return self.equations[0].field

    def change_field(self, field) -> "CompleteIntersection":
        return CompleteIntersection(self.config, [f.change_field(field) for f in self.equations])

    def to_json(self):
        return {
            "config": self.config.to_json(),
            "field": self.field.name,
            "equations": [poly_to_json(f) for f in self.equations],
        }

    @classmethod
    def from_json(cls, data, field=None):
        from .fields import parse_field

        cfg = CIConfig.from_json(data["config"])
        fld = field or parse_field(data.get("field", "q"))
        eqs = [poly_from_json(e, fld, cfg.weights, d) for e, d in zip(data["equations"], cfg.degrees)]
        return cls(cfg, eqs)


@dataclass
class NodeRecord:
    p: tuple
    q: tuple
    jacobian_rank: int
    hessian_rank: int | None = None
    field: object = dc_field(default=QQ, repr=False)

    def to_json(self):
        F = self.field
        return {
            "p": [F.to_json(x) for x in self.p],
            "q": [F.to_json(x) for x in self.q],
            "jacobian_rank": self.jacobian_rank,
            "hessian_rank": self.hessian_rank,
        }

    @classmethod
    def from_json(cls, data, field=QQ):
        return cls(
            tuple(field.from_json(x) for x in data["p"]),
            tuple(field.from_json(x) for x in data["q"]),
            int(data["jacobian_rank"]),
            data.get("hessian_rank"),
            field,
        )

    def change_field(self, field) -> "NodeRecord":
        if isinstance(self.field, RationalField):
            # primitive integer representatives reduce to nonzero vectors mod any prime
            p, q = _primitive(self.p), _primitive(self.q)
            conv = field.from_fraction
        else:
            p, q, conv = self.p, self.q, field
        return NodeRecord(
            normalize_point(field, [conv(x) for x in p]),
            normalize_point(field, [conv(x) for x in q]),
            self.jacobian_rank,
            self.hessian_rank,
            field,
        )


def _primitive(coords):
    den = lcm(*[Fraction(x).denominator for x in coords])
    ints = [int(Fraction(x) * den) for x in coords]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [Fraction(x // g) for x in ints]


def cayley_equation(X: CompleteIntersection) -> BigradedPolynomial:
    """``F = sum_i y_i f_i``, bihomogeneous of bidegree ``(0, 1)``."""
    cfg = X.config
    terms = {}
    for i, f in enumerate(X.equations):
        if f.degree is not None and f.degree != cfg.degrees[i]:
            raise ValueError(f"equation {i} has degree {f.degree}, expected {cfg.degrees[i]}")
        beta = tuple(1 if j == i else 0 for j in range(cfg.c))
        for alpha, coef in f.terms.items():
            terms[(alpha, beta)] = coef
    return BigradedPolynomial(X.field, cfg, terms)


def jacobian_at(X: CompleteIntersection, p) -> np.ndarray:
    """The ``c x (n+c+1)`` matrix ``(df_i/dx_j (p))``."""
    F = X.field
    p = [F.coerce(x) for x in p]
    if len(p) != X.config.nvars:
        raise ValueError(f"point has {len(p)} coordinates, expected {X.config.nvars}")
    rows = [[f.partial(j).evaluate(p) for j in range(X.config.nvars)] for f in X.equations]
    return F.array(rows).reshape(X.config.c, X.config.nvars)


def lift_node(X: CompleteIntersection, p) -> NodeRecord:
    """Lift a singular point ``p`` of ``X`` to ``(p, q)`` on ``Y``."""
    F = X.field
    p = normalize_point(F, [F.coerce(x) for x in p])
    bad = [i for i, f in enumerate(X.equations) if not F.is_zero(f.evaluate(p))]
    if bad:
        raise NotSingularError(f"point does not lie on X (equations {bad} do not vanish)")
    M = jacobian_at(X, p)
    r = rank(M, F)
    c = X.config.c
    if r == c:
        raise NotSingularError("point is a smooth point of X")
    if r != c - 1:
        raise NotIsolatedLiftError(c - r - 1, p)
    K = left_kernel(M, F)
    q = normalize_point(F, list(K[0]))
    return NodeRecord(p, q, r, None, F)


def hessian_at(X: CompleteIntersection, record: NodeRecord) -> np.ndarray:
    """Hessian of ``F`` in the chart ``x_a = 1, y_b = 1`` at ``(p, q)``.

    ``a`` and ``b`` index the first nonzero coordinates of ``p`` and ``q``.
    Rows and columns are ordered ``x_j (j != a)`` then ``y_i (i != b)``.
    """
    F = X.field
    cfg = X.config
    p, q = list(record.p), list(record.q)
    a = next(i for i, x in enumerate(p) if not F.is_zero(x))
    b = next(i for i, x in enumerate(q) if not F.is_zero(x))
    xs = [j for j in range(cfg.nvars) if j != a]
    ys = [i for i in range(cfg.c) if i != b]
    grads = [[f.partial(j) for j in range(cfg.nvars)] for f in X.equations]
    size = len(xs) + len(ys)
    H = F.zeros((size, size))
    for r, j in enumerate(xs):
        for s, k in enumerate(xs):
            if s < r:
                H[r, s] = H[s, r]
                continue
            acc = F.zero
            for i in range(cfg.c):
                if not F.is_zero(q[i]):
                    acc = F.add(acc, F.mul(q[i], grads[i][j].partial(k).evaluate(p)))
            H[r, s] = acc
        for s, i in enumerate(ys):
            v = grads[i][j].evaluate(p)
            H[r, len(xs) + s] = v
            H[len(xs) + s, r] = v
    return H


def certify_node(X: CompleteIntersection, record: NodeRecord) -> bool:
    """True iff ``(p, q)`` is an A_1 point of ``Y``; fills ``record.hessian_rank``."""
    F = X.field
    cfg = X.config
    if not cfg.standard:
        raise ValueError("node certification is only supported for standard weights")
    p, q = list(record.p), list(record.q)
    if any(not F.is_zero(f.evaluate(p)) for f in X.equations):
        raise NotSingularError("p does not lie on X")
    M = jacobian_at(X, p)
    qM = F.matmul(F.array([q]).reshape(1, -1), M)
    if not F.vzero(qM).all():
        raise NotSingularError("(p, q) is a smooth point of Y: q M(p) != 0")
    H = hessian_at(X, record)
    record.hessian_rank = rank(H, F)
    return record.hessian_rank == cfg.nvars + cfg.c - 2


def standard_node_model(n: int = 3, c: int = 2, field=QQ):
    """``sum_{i=1}^{n+1} x_i^2 = x_{n+2} = ... = x_{n+c} = 0`` with its node at ``(1:0:...:0)``."""
    # degrees are sorted ascending, so the linear equations come first
    cfg = CIConfig((1,) * (c - 1) + (2,), n)
    W = cfg.weights
    x = [GradedPolynomial.variable(field, W, i) for i in range(cfg.nvars)]
    quad = x[1] ** 2
    for i in range(2, n + 2):
        quad = quad + x[i] ** 2
    eqs = [x[n + 1 + j] for j in range(1, c)] + [quad]
    X = CompleteIntersection(cfg, eqs)
    p = (field.one,) + (field.zero,) * (cfg.nvars - 1)
    return X, p


# ---------------------------------------------------------------------------
# vectorised scans over finite fields


def projective_points(field, dim: int, chunk: int = 1 << 16):
    """Yield normalised points of ``P^dim(F_q)`` in canonical order, in chunks."""
    q = field.order
    for lead in range(dim + 1):
        free = dim - lead
        total = q**free
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            pts = np.zeros((len(idx), dim + 1), dtype=np.int64)
            pts[:, lead] = 1
            rest = idx
            for col in range(dim, lead, -1):
                pts[:, col] = rest % q
                rest = rest // q
            yield pts


def _count_projective(q: int, dim: int) -> int:
    return sum(q**i for i in range(dim + 1))


def _veval(poly: GradedPolynomial, X: np.ndarray, powers: dict) -> np.ndarray:
    F = poly.field
    acc = np.zeros(X.shape[0], dtype=np.int64)
    for e, c in poly.terms.items():
        m = np.full(X.shape[0], c, dtype=np.int64)
        for j, k in enumerate(e):
            if k:
                key = (j, k)
                if key not in powers:
                    v = X[:, j]
                    out = np.ones(X.shape[0], dtype=np.int64)
                    for _ in range(k):
                        out = F.vmul(out, v)
                    powers[key] = out
                m = F.vmul(m, powers[key])
        acc = F.vadd(acc, m)
    return acc


def _vdet(F, cols):
    """Determinant of a batch of square matrices given as ``cols[r][s]`` arrays."""
    n = len(cols)
    if n == 1:
        return cols[0][0]
    acc = None
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = cols[0][perm[0]]
        for r in range(1, n):
            term = F.vmul(term, cols[r][perm[r]])
        if sign < 0:
            term = F.vneg(term)
        acc = term if acc is None else F.vadd(acc, term)
    return acc


def _vnormalize(F, P: np.ndarray) -> np.ndarray:
    nz = ~F.vzero(P)
    lead = np.argmax(nz, axis=1)
    piv = P[np.arange(P.shape[0]), lead]
    if isinstance(F, GaloisField):
        inv = F.vinv(piv)
    else:
        inv = np.array([F.inv(int(v)) for v in piv], dtype=np.int64) if len(piv) else piv
    return F.vmul(P, inv[:, None])


def _frob_point(F, pt: tuple) -> tuple:
    if isinstance(F, GaloisField):
        return tuple(F.frobenius(x) for x in pt)
    return pt


def _orbit_size(F, pt: tuple) -> int:
    cur = _frob_point(F, pt)
    size = 1
    while cur != pt:
        cur = _frob_point(F, cur)
        size += 1
    return size


@dataclass
class ScanResult:
    field: object
    points: list
    scanned: int
    orbit_sizes: list

    def orbits(self):
        """One representative per Frobenius orbit (the first in scan order)."""
        seen = set()
        reps = []
        for pt in self.points:
            if pt in seen:
                continue
            cur = pt
            while cur not in seen:
                seen.add(cur)
                cur = _frob_point(self.field, cur)
            reps.append(pt)
        return reps

    def summary(self):
        return {
            "field": self.field.name,
            "points_scanned": self.scanned,
            "singular_points": len(self.points),
            "frobenius_orbits": len(self.orbits()),
            "points_by_orbit_size": {str(k): self.orbit_sizes.count(k) for k in sorted(set(self.orbit_sizes))},
        }


def find_singular_points(
    X: CompleteIntersection,
    p: int = 5,
    k: int = 1,
    subspace=None,
    budget: int = DEFAULT_BUDGET,
    jobs: int = 1,
    chunk: int = 1 << 15,
) -> ScanResult:
    """All ``F_{p^k}``-points of ``X`` with ``rank M(point) < c``.

    ``X`` must have rational or ``F_p`` coefficients.  With ``subspace`` (a list
    of spanning vectors in ambient coordinates, entries in ``F_p`` or Q) only the
    points of that linear subspace are enumerated.  Points come back normalised,
    in ambient coordinates, sorted by their codes.
    """
    return scan_singular(X.equations, p, k, subspace, budget, jobs, chunk)


def scan_singular(
    equations,
    p: int = 5,
    k: int = 1,
    subspace=None,
    budget: int = DEFAULT_BUDGET,
    jobs: int = 1,
    chunk: int = 1 << 15,
) -> ScanResult:
    """Common zeros of ``equations`` where their Jacobian has rank below their number."""
    F = finite_field(p, k)
    src = equations[0].field
    if isinstance(src, PrimeField) and src.p != p:
        raise ValueError(f"equations are defined over {src!r}, cannot scan over {F!r}")
    eqs = [f.change_field(F) for f in equations]
    N = eqs[0].nvars
    if subspace is None:
        basis = None
        dim = N - 1
    else:
        rows = []
        for v in subspace:
            rows.append([F.from_fraction(x) if not isinstance(x, (int, np.integer)) else F(int(x)) for x in v])
        basis = np.array(rows, dtype=np.int64)
        if rank(basis, F) != len(rows):
            raise ValueError("subspace vectors are linearly dependent")
        dim = len(rows) - 1
    required = _count_projective(F.order, dim)
    if required > budget:
        raise BudgetExceededError(required, budget)

    grads = [[f.partial(j) for j in range(N)] for f in eqs]
    c = len(eqs)
    minors = list(itertools.combinations(range(N), c))

    def work(T):
        if basis is None:
            P = T
        else:
            P = np.zeros((T.shape[0], N), dtype=np.int64)
            for i in range(basis.shape[0]):
                P = F.vadd(P, F.vmul(T[:, i : i + 1], basis[i][None, :]))
            P = _vnormalize(F, P)
        powers: dict = {}
        keep = np.ones(P.shape[0], dtype=bool)
        for f in eqs:
            keep &= F.vzero(_veval(f, P, powers))
        if not keep.any():
            return []
        P = P[keep]
        powers = {}
        J = [[_veval(g, P, powers) for g in row] for row in grads]
        sing = np.ones(P.shape[0], dtype=bool)
        for cols in minors:
            det = _vdet(F, [[J[i][j] for j in cols] for i in range(c)])
            sing &= F.vzero(det)
            if not sing.any():
                break
        return [tuple(int(v) for v in row) for row in P[sing]]

    chunks = projective_points(F, dim, chunk)
    found = []
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(work, chunks):
                found.extend(part)
    else:
        for T in chunks:
            found.extend(work(T))
    found = sorted(set(found))
    return ScanResult(F, found, required, [_orbit_size(F, pt) for pt in found])


def hypersurface_smooth_certificate(f: GradedPolynomial, prime: int = 10007) -> bool:
    """True if the partials of ``f`` span all forms of degree ``N(d-2)+1`` modulo ``prime``.

    Then the partials have no common zero over the algebraic closure of Q, so
    ``V(f)`` is smooth.  A False answer only means the certificate failed
    (the hypersurface is singular, or the prime is unlucky).
    """
    from .polyring import monomial_basis

    F = finite_field(prime)
    g = f.change_field(F)
    N = g.nvars
    d = g.degree
    if any(w != 1 for w in g.weights):
        raise ValueError("smoothness certificate needs standard weights")
    if d is None or d < 1:
        return False
    if d == 1:
        return not g.is_zero()
    k = N * (d - 2) + 1
    target = monomial_basis(g.weights, k)
    idx = {m: i for i, m in enumerate(target)}
    rows = []
    for j in range(N):
        dj = g.partial(j)
        for m in monomial_basis(g.weights, k - (d - 1)):
            row = np.zeros(len(target), dtype=np.int64)
            for e, c in dj.terms.items():
                row[idx[tuple(a + b for a, b in zip(e, m))]] = c
            rows.append(row)
    M = np.array(rows)
    # compress to a few more rows than columns with a seeded random combination;
    # this can only lower the rank, so a full-rank answer is still a proof
    extra = M.shape[0] - len(target) - 8
    if extra > 0:
        rng = np.random.default_rng(0)
        R = rng.integers(0, prime, size=(len(target) + 8, M.shape[0]), dtype=np.int64)
        M = F.matmul(R, M)
    return rank(M, F) == len(target)
