"""Defect of nodal complete intersection threefolds and the W / V machinery.

For ``X = V(f_1..f_c)`` in ``P^{3+c}`` with nodes ``(p, q)`` on the Cayley
hypersurface, the defect is the corank of evaluating bidegree ``(D-w, m-1)``
forms ``sum_j h_j y_j`` at the nodes.  The module ``W`` collects the tuples
``(h_1..h_c)`` vanishing at all nodes; ``W'`` is its restriction to a general
hyperplane; ``V`` is a Gorenstein-type module built from a functional that
kills ``W'`` in the top degree ``T = D + d_c - c - 3``.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .cayley import CompleteIntersection, NodeRecord
from .fields import QQ, RationalField, finite_field
from .hilbert import (
    GradedTupleSpace,
    HilbertTable,
    PointSet,
    colon_constraints,
    linear_system_defect,
)
from .linalg import nullspace, rank
from .polyring import CIConfig, _mono_eval, bigraded_basis, make_rng, monomial_basis

__all__ = [
    "DEFAULT_PRIMES",
    "UncertifiedNodeError",
    "UnsupportedDimensionError",
    "NoDefectDirectionError",
    "RankDisagreementError",
    "WModuleSlice",
    "DefectReport",
    "WRestriction",
    "VFamily",
    "tuple_space",
    "w_matrix",
    "w_slice",
    "w_table",
    "defect_via_bigraded",
    "defect_of_ci",
    "defect_upper_bound_cynk",
    "restrict_W",
    "build_v_family",
    "vl_hilbert",
    "node_lower_bound",
    "inequality_suite",
]

DEFAULT_PRIMES = (10007, 10009)


class UncertifiedNodeError(ValueError):
    pass


class UnsupportedDimensionError(ValueError):
    pass


class NoDefectDirectionError(ValueError):
    """``W'`` fills its ambient space in the top degree: no functional kills it."""


class RankDisagreementError(RuntimeError):
    pass


def _field(spec):
    if isinstance(spec, int):
        return finite_field(spec)
    return spec


def _nodes_over(nodes, field):
    out = []
    for nd in nodes:
        out.append(nd if nd.field == field else nd.change_field(field))
    return out


def tuple_space(config: CIConfig, nvars: int | None = None) -> GradedTupleSpace:
    """``(+)_j S_{k - d_c + d_j}``; ``nvars`` defaults to the ambient count."""
    weights = config.weights if nvars is None else (1,) * nvars
    return GradedTupleSpace(tuple(weights), tuple(d - config.dc for d in config.degrees))


def _check_certified(config, nodes):
    full = config.nvars + config.c - 2
    for i, nd in enumerate(nodes):
        if nd.hessian_rank != full:
            raise UncertifiedNodeError(f"node {i} is not certified (hessian rank {nd.hessian_rank}, need {full})")


def w_matrix(config: CIConfig, nodes, k: int, field) -> np.ndarray:
    """Rows: nodes ``(p, q)``.  Columns: basis ``(j, x^e)`` of the tuple space.  Entry ``p^e q_j``."""
    space = tuple_space(config)
    basis = space.basis(k)
    nodes = _nodes_over(nodes, field)
    M = field.zeros((len(nodes), len(basis)))
    for r, nd in enumerate(nodes):
        cache = {}
        for col, (j, e) in enumerate(basis):
            if field.is_zero(nd.q[j]):
                continue
            if e not in cache:
                cache[e] = _mono_eval(field, e, nd.p)
            M[r, col] = field.mul(cache[e], nd.q[j])
    return M


@dataclass
class WModuleSlice:
    degree: int
    ambient_dimension: int
    node_count: int
    codimension: int
    field: object = dc_field(repr=False, default=None)

    def to_json(self):
        return {
            "degree": self.degree,
            "ambient_dimension": self.ambient_dimension,
            "node_count": self.node_count,
            "h_W": self.codimension,
            "field": self.field.name if self.field is not None else None,
        }


def w_slice(X: CompleteIntersection | CIConfig, nodes, k: int, field=DEFAULT_PRIMES[0]) -> WModuleSlice:
    config = X.config if isinstance(X, CompleteIntersection) else X
    _check_certified(config, nodes)
    F = _field(field)
    M = w_matrix(config, nodes, k, F)
    h = rank(M, F) if M.size else 0
    return WModuleSlice(k, M.shape[1], len(nodes), h, F)


def w_table(config: CIConfig, nodes, kmax: int, field=DEFAULT_PRIMES[0], kmin: int = 0) -> HilbertTable:
    F = _field(field)
    vals = {}
    for k in range(kmin, kmax + 1):
        M = w_matrix(config, nodes, k, F)
        vals[k] = rank(M, F) if M.size else 0
    return HilbertTable(vals, "W")


def defect_via_bigraded(config: CIConfig, nodes, field) -> tuple[int, int]:
    """``(corank, rank)`` of evaluating bidegree ``(D - w, m - 1)`` monomials at the nodes."""
    F = _field(field)
    a, b = config.D - config.w, config.m - 1
    basis = bigraded_basis(config, (a, b))
    nodes = _nodes_over(nodes, F)
    if not nodes:
        return 0, 0
    if not basis:
        return len(nodes), 0
    rows = [[F.mul(_mono_eval(F, al, nd.p), _mono_eval(F, be, nd.q)) for al, be in basis] for nd in nodes]
    r = rank(F.array(rows).reshape(len(nodes), len(basis)), F)
    return len(nodes) - r, r


@dataclass
class DefectReport:
    config: CIConfig
    node_count: int
    defect: int
    evaluation_rank: int
    defect_degree: int
    bound: int
    cynk_bound: int | None
    ranks_by_field: dict
    checks: dict = dc_field(default_factory=dict)
    tables: dict = dc_field(default_factory=dict)
    notes: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(v for v in self.checks.values() if isinstance(v, bool))

    def failed_checks(self):
        return [k for k, v in self.checks.items() if v is False]

    def to_json(self):
        return {
            "config": self.config.to_json(),
            "nodes": self.node_count,
            "defect": self.defect,
            "evaluation_rank": self.evaluation_rank,
            "defect_degree": self.defect_degree,
            "bound": self.bound,
            "cynk_bound": self.cynk_bound,
            "ranks_by_field": self.ranks_by_field,
            "checks": self.checks,
            "tables": {k: v.to_json() if hasattr(v, "to_json") else v for k, v in self.tables.items()},
            "notes": self.notes,
        }


def defect_upper_bound_cynk(X: CompleteIntersection | CIConfig, nodes, field=DEFAULT_PRIMES[0]) -> int:
    """Failure of the node projections to impose independent conditions in degree ``d_c + D - w``."""
    config = X.config if isinstance(X, CompleteIntersection) else X
    if not nodes:
        return 0
    F = _field(field)
    pts = PointSet(F, [nd.p for nd in _nodes_over(nodes, F)], config.weights)
    return linear_system_defect(pts, config.dc + config.D - config.w)


def defect_of_ci(
    X: CompleteIntersection | CIConfig,
    nodes,
    primes=DEFAULT_PRIMES,
    exact: bool = False,
    partial_smooth: bool | None = None,
) -> DefectReport:
    """Defect from the nodes, computed at each prime (and over Q if ``exact``).

    The node list must be complete; that is the caller's responsibility.
    ``partial_smooth`` states whether ``V(f_1..f_{c-1})`` is smooth.  The
    upper bound from the node projections is only guaranteed in that case, so
    the sandwich check is recorded as ``None`` (not applicable) otherwise.
    """
    config = X.config if isinstance(X, CompleteIntersection) else X
    if config.n != 3:
        raise UnsupportedDimensionError(f"defect formula implemented for threefolds only, got n={config.n}")
    if not config.standard:
        raise UnsupportedDimensionError("defect formula implemented for standard weights only")
    _check_certified(config, nodes)
    k = config.D + config.dc - 4 - config.c
    fields = [finite_field(p) for p in primes] + ([QQ] if exact else [])
    ranks = {}
    for F in fields:
        sl = w_slice(config, nodes, k, F)
        corank_b, rank_b = defect_via_bigraded(config, nodes, F)
        ranks[F.name] = {"tuple_basis": sl.codimension, "bigraded_basis": rank_b}
    flat = {v for d in ranks.values() for v in d.values()}
    if len(flat) != 1:
        raise RankDisagreementError(f"evaluation ranks disagree across fields/paths: {ranks}")
    r = flat.pop()
    delta = len(nodes) - r
    report = DefectReport(
        config=config,
        node_count=len(nodes),
        defect=delta,
        evaluation_rank=r,
        defect_degree=k,
        bound=node_lower_bound(config),
        cynk_bound=defect_upper_bound_cynk(config, nodes, fields[0]),
        ranks_by_field=ranks,
    )
    report.checks["rank_agreement"] = True
    report.checks["defect_in_range"] = 0 <= delta <= len(nodes)
    if partial_smooth:
        report.checks["cynk_sandwich"] = delta <= report.cynk_bound
    else:
        report.checks["cynk_sandwich"] = None
        report.notes.append(
            "projection bound not applicable: smoothness of V(f_1..f_{c-1}) "
            + ("fails" if partial_smooth is False else "not asserted")
        )
    return report


# ---------------------------------------------------------------------------
# hyperplane restriction


@dataclass
class WRestriction:
    hyperplane: tuple
    attempts: int
    h_W: HilbertTable
    h_Wprime: HilbertTable
    top: int
    Wprime_top: np.ndarray  # spanning rows of W'_T in the tuple space over the hyperplane
    field: object
    chain_ok: bool
    oracle_ok: bool

    def to_json(self):
        F = self.field
        return {
            "hyperplane": [F.to_json(x) for x in self.hyperplane],
            "attempts": self.attempts,
            "h_W": self.h_W.to_json(),
            "h_Wprime": self.h_Wprime.to_json(),
            "top_degree": self.top,
            "partial_sum_chain": self.chain_ok,
            "difference_oracle": self.oracle_ok,
        }


def _restriction_matrix(weights_in, k, shifts, a, field):
    """Matrix of substituting ``x_N = sum_{i<N} a_i x_i`` on the tuple space in degree ``k``.

    Rows: basis of ``(+)_j R_{k+s_j}``; columns: basis of ``(+)_j S_{k+s_j}``.
    """
    N = len(weights_in) - 1
    src = GradedTupleSpace(tuple(weights_in), tuple(shifts))
    dst = GradedTupleSpace((1,) * N, tuple(shifts))
    didx = dst.index(k)
    out = field.zeros((src.dim(k), dst.dim(k)))
    power_cache = {0: {(0,) * N: field.one}}

    def lin_power(t):
        if t not in power_cache:
            prev = lin_power(t - 1)
            cur = {}
            for e, c in prev.items():
                for i in range(N):
                    if field.is_zero(a[i]):
                        continue
                    ne = e[:i] + (e[i] + 1,) + e[i + 1 :]
                    v = field.mul(c, a[i])
                    cur[ne] = field.add(cur[ne], v) if ne in cur else v
            power_cache[t] = cur
        return power_cache[t]

    for r, (j, e) in enumerate(src.basis(k)):
        head = e[:N]
        for te, c in lin_power(e[N]).items():
            tgt = (j, tuple(x + y for x, y in zip(head, te)))
            col = didx[tgt]
            out[r, col] = field.add(out[r, col], c)
    return out


def _w_basis(config, nodes, k, field):
    space = tuple_space(config)
    n = space.dim(k)
    M = w_matrix(config, nodes, k, field)
    if M.shape[0] == 0:
        return nullspace(field.zeros((0, n)), field, n), 0
    return nullspace(M, field, n), rank(M, field)


def restrict_W(
    X: CompleteIntersection | CIConfig,
    nodes,
    seed: int = 0,
    field=DEFAULT_PRIMES[0],
    kmax: int | None = None,
    max_attempts: int = 50,
) -> WRestriction:
    """Tables of ``W`` and its restriction ``W'`` to a seeded general hyperplane.

    The hyperplane is ``x_N = sum_{i<N} a_i x_i`` with random ``a``; it is
    re-drawn while it passes through a node.
    """
    config = X.config if isinstance(X, CompleteIntersection) else X
    if not config.standard:
        raise ValueError("hyperplane restriction needs standard weights")
    F = _field(field)
    rng = make_rng(seed)
    fnodes = _nodes_over(nodes, F)
    N = config.nvars - 1
    T = config.D + config.dc - config.c - 3
    kmax = T if kmax is None else kmax
    attempts = 0
    while True:
        attempts += 1
        if attempts > max_attempts:
            raise RuntimeError("could not find a hyperplane avoiding the nodes")
        a = [F.random(rng) if not isinstance(F, RationalField) else F.random(rng, 9) for _ in range(N)]
        if all(not F.is_zero(F.sub(nd.p[N], sum_mul(F, a, nd.p[:N]))) for nd in fnodes):
            break
    hyper = tuple(F.neg(x) for x in a) + (F.one,)
    shifts = tuple(d - config.dc for d in config.degrees)
    sspace = GradedTupleSpace((1,) * N, shifts)
    hw, hwp = {}, {}
    top_rows = None
    for k in range(0, kmax + 1):
        B, h = _w_basis(config, fnodes, k, F)
        hw[k] = h
        dst_dim = sspace.dim(k)
        if B.shape[0] and dst_dim:
            R = _restriction_matrix(config.weights, k, shifts, a, F)
            img = F.matmul(B, R)
            rk = rank(img, F)
        else:
            img = F.zeros((0, dst_dim))
            rk = 0
        hwp[k] = dst_dim - rk
        if k == T:
            top_rows = img
    h_W = HilbertTable(hw, "W")
    h_Wp = HilbertTable(hwp, "W'")
    chain = all(len(nodes) >= hw[k] >= sum(hwp[j] for j in range(k + 1)) for k in hw)
    oracle = all(hwp[k] == hw[k] - hw.get(k - 1, 0) for k in hw)
    if top_rows is None:
        top_rows = F.zeros((0, sspace.dim(T)))
    return WRestriction(hyper, attempts, h_W, h_Wp, T, top_rows, F, chain, oracle)


def sum_mul(F, a, xs):
    acc = F.zero
    for u, v in zip(a, xs):
        acc = F.add(acc, F.mul(u, v))
    return acc


# ---------------------------------------------------------------------------
# the V family


@dataclass
class VFamily:
    config: CIConfig
    top: int
    functional: np.ndarray
    h_V: HilbertTable
    h_F: dict  # i (1-based) -> HilbertTable of F^iV; i = c+1 is the zero module
    h_P: dict  # i -> HilbertTable of P^iV (indexed by its own degree)
    condition2: bool
    condition2_all_choices: bool
    generator_samples: int
    generator_failures: int
    filtration_ok: bool
    symmetric: bool
    attempts: int
    field: object = dc_field(repr=False, default=None)

    @property
    def h_Fc(self) -> HilbertTable:
        return self.h_F[self.config.c]

    def to_json(self):
        return {
            "top_degree": self.top,
            "h_V": self.h_V.to_json(),
            "h_F": {str(i): t.to_json() for i, t in self.h_F.items()},
            "h_P": {str(i): t.to_json() for i, t in self.h_P.items()},
            "condition2": self.condition2,
            "condition2_all_generator_choices": self.condition2_all_choices,
            "generator_changes_sampled": self.generator_samples,
            "generator_changes_failing": self.generator_failures,
            "filtration_identity": self.filtration_ok,
            "gorenstein_symmetry": self.symmetric,
            "functional_attempts": self.attempts,
            "field": self.field.name if self.field is not None else None,
        }


def build_v_family(
    config: CIConfig,
    restriction: WRestriction,
    seed: int = 0,
    generator_samples: int = 16,
    max_attempts: int = 20,
) -> VFamily:
    """``V_T`` = kernel of a seeded functional vanishing on ``W'_T``; lower ``V_k`` by colon.

    The functional is re-drawn (up to ``max_attempts``) until it is nonzero on
    the last summand, when that is possible.
    """
    F = restriction.field
    T = restriction.top
    c = config.c
    N = config.nvars - 1
    space = GradedTupleSpace((1,) * N, tuple(d - config.dc for d in config.degrees))
    n_top = space.dim(T)
    W = restriction.Wprime_top
    if W.shape[0]:
        Z = nullspace(W, F, n_top)
    else:
        Z = nullspace(F.zeros((0, n_top)), F, n_top)
    if Z.shape[0] == 0:
        raise NoDefectDirectionError("W' fills the top degree; no defect direction")
    rng = make_rng(seed)
    last = space.component_slice(T, c - 1)
    attempts = 0
    while True:
        attempts += 1
        coeffs = F.array([F.random(rng) if not isinstance(F, RationalField) else F.random(rng, 9) for _ in range(Z.shape[0])])
        phi = F.matmul(coeffs.reshape(1, -1), Z)[0]
        if F.vzero(phi).all():
            continue
        cond2 = not F.vzero(phi[last]).all()
        if cond2 or attempts >= max_attempts:
            break

    # condition (2) over all generator choices: a change of generators acts on the
    # functional's top-degree block by arbitrary nonzero combinations
    top_block = [j for j in range(c) if config.degrees[j] == config.dc]
    comps = F.array([list(phi[space.component_slice(T, j)]) for j in top_block]).reshape(len(top_block), -1)
    all_choices = rank(comps, F) == len(top_block)
    failures = 0
    for _ in range(generator_samples):
        b = [F.random(rng) if not isinstance(F, RationalField) else F.random(rng, 9) for _ in top_block]
        if all(F.is_zero(x) for x in b):
            continue
        combo = F.matmul(F.array(b).reshape(1, -1), comps)[0]
        if F.vzero(combo).all():
            failures += 1

    hV, hF, hP = {}, {i: {} for i in range(1, c + 2)}, {i: {} for i in range(1, c + 1)}
    filt = True
    for k in range(0, T + 1):
        C = colon_constraints(space, T, phi, k, F)
        hV[k] = rank(C, F) if C.size else 0
        hF[c + 1][k] = 0
        for i in range(1, c + 1):
            cols = space.components_from(k, i - 1)
            sub = C[:, cols]
            hF[i][k] = rank(sub, F) if sub.size else 0
            # P^iV: projection of F^iV onto summand i, in degree k + d_i - d_c
            kp = k + config.degrees[i - 1] - config.dc
            comp = space.component_slice(k, i - 1)
            width = comp.stop - comp.start
            if kp < 0:
                continue
            if sub.shape[1] == 0:
                continue
            K = nullspace(sub, F, sub.shape[1]) if sub.shape[0] else nullspace(F.zeros((0, sub.shape[1])), F, sub.shape[1])
            proj = K[:, :width]
            dimproj = rank(proj, F) if proj.size else 0
            hP[i][kp] = width - dimproj
        if hF[1][k] != hV[k]:
            filt = False
    h_V = HilbertTable(hV, "V")
    h_F = {i: HilbertTable(v, f"F^{i}V") for i, v in hF.items()}
    h_P = {i: HilbertTable(v, f"P^{i}V") for i, v in hP.items()}
    for i in range(1, c + 1):
        for k in range(0, T + 1):
            kp = k + config.degrees[i - 1] - config.dc
            p_val = h_P[i].get(kp, 0)
            if h_F[i][k] != h_F[i + 1][k] + p_val:
                filt = False
    fc = h_F[c]
    symmetric = all(fc[k] == fc[T - k] for k in range(T + 1))
    return VFamily(
        config=config,
        top=T,
        functional=phi,
        h_V=h_V,
        h_F=h_F,
        h_P=h_P,
        condition2=cond2,
        condition2_all_choices=cond2 and all_choices,
        generator_samples=generator_samples,
        generator_failures=failures,
        filtration_ok=filt,
        symmetric=symmetric,
        attempts=attempts,
        field=F,
    )


# ---------------------------------------------------------------------------
# closed forms and inequalities


def vl_hilbert(config: CIConfig, k: int) -> int:
    """Hilbert function of ``V`` for sections containing a line, in closed form."""
    D, dc, c = config.D, config.dc, config.c
    if k < 0:
        return 0
    if k <= dc - 2:
        return sum(max(0, k + 1 - dc + d) for d in config.degrees)
    if k <= D + dc - c - 2:
        return D + dc - c - 2 - k
    return 0


def node_lower_bound(config: CIConfig) -> int:
    e = [d - 1 for d in config.degrees]
    return sum(e[i] * e[j] for i in range(len(e)) for j in range(i, len(e)))


def inequality_suite(vfam: VFamily, config: CIConfig | None = None) -> dict:
    """Evaluate the high-degree and low-degree lower bounds on a built ``V``.

    Returns ``{name: {"holds": bool, "range": [lo, hi], "violations": [...]}}``
    plus the sum of ``h_V`` against the node lower bound.
    """
    config = config or vfam.config
    D, dc, c = config.D, config.dc, config.c
    T = vfam.top

    def hv(k):
        if k in vfam.h_V:
            return vfam.h_V[k]
        if k > T:
            return 0
        raise KeyError(f"h_V missing degree {k}")

    def hfc(k):
        if k in vfam.h_Fc:
            return vfam.h_Fc[k]
        if k > T:
            return 0
        raise KeyError(f"h_F^cV missing degree {k}")

    checks = {}

    def run(name, lo, hi, value, bound):
        bad = [k for k in range(lo, hi + 1) if value(k) < bound(k)]
        checks[name] = {"range": [lo, hi], "holds": not bad, "violations": bad}

    run("high_degree_V", dc, D + dc - c - 2, hv, lambda k: D + dc - c - 2 - k)
    run("high_degree_Fc", D - c - 1, T, hfc, lambda k: D + dc - 2 - c - k)
    run("low_degree_Fc", 0, dc - 2, hfc, lambda k: k + 1)
    total = sum(vfam.h_V.values.values())
    checks["sum_vs_node_bound"] = {
        "sum_h_V": total,
        "node_lower_bound": node_lower_bound(config),
        "holds": total >= node_lower_bound(config),
    }
    return checks
