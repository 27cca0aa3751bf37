from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nodalci.cayley import (
    BudgetExceededError,
    CompleteIntersection,
    NodeRecord,
    NotIsolatedLiftError,
    NotSingularError,
    cayley_equation,
    certify_node,
    find_singular_points,
    hypersurface_smooth_certificate,
    jacobian_at,
    lift_node,
    projective_points,
    standard_node_model,
)
from nodalci.fields import QQ, PrimeField, finite_field
from nodalci.generators import PLANE_BASIS
from nodalci.linalg import left_kernel, rank
from nodalci.polyring import CIConfig, GradedPolynomial, bigraded_basis, random_polynomial

W6 = (1,) * 6


def x(i, W=W6, F=QQ):
    return GradedPolynomial.variable(F, W, i)


def quadric():
    return x(0) ** 2 + x(1) ** 2 + x(2) ** 2 + x(3) ** 2


def test_cayley_equation_examples():
    cfg1 = CIConfig((3,))
    f = random_polynomial(cfg1.weights, 3, seed=2)
    F1 = cayley_equation(CompleteIntersection(cfg1, [f]))
    assert F1.x_part(0) == f and F1.bidegree == (0, 1)

    F2 = cayley_equation(CompleteIntersection(CIConfig((2, 2)), [x(0) ** 2, x(1) ** 2]))
    assert F2.terms == {((2, 0, 0, 0, 0, 0), (1, 0)): 1, ((0, 2, 0, 0, 0, 0), (0, 1)): 1}

    cfg = CIConfig((2, 3))
    X = CompleteIntersection(cfg, [random_polynomial(W6, 2, 1), random_polynomial(W6, 3, 2)])
    F = cayley_equation(X)
    assert F.bidegree == (0, 1)
    assert set(F.terms) <= set(bigraded_basis(cfg, (0, 1)))


def test_ci_validation():
    with pytest.raises(ValueError):
        CompleteIntersection(CIConfig((2, 2)), [x(0) ** 2])
    with pytest.raises(ValueError):
        CompleteIntersection(CIConfig((2, 3)), [x(0) ** 2, x(1) ** 2])


def test_jacobian_examples():
    X, p = standard_node_model()
    M = jacobian_at(X, p)
    assert M.shape == (2, 6)
    assert rank(M, QQ) == 1
    # a linear equation contributes a constant unit row
    assert list(M[0]) == [0, 0, 0, 0, 0, 1]
    # smooth point of a smooth quadric pair has rank c
    Y = CompleteIntersection(CIConfig((1, 2)), [x(5), quadric() - x(4) ** 2])
    assert rank(jacobian_at(Y, [1, 0, 0, 0, 1, 0]), QQ) == 2


def test_lift_node_examples():
    X1 = CompleteIntersection(CIConfig((2,)), [sum((x(i, (1,) * 5) ** 2 for i in range(1, 5)), GradedPolynomial(QQ, (1,) * 5, {}, 2))])
    nd = lift_node(X1, [1, 0, 0, 0, 0])
    assert nd.q == (1,)

    X = CompleteIntersection(CIConfig((1, 2)), [x(4), quadric()])
    nd = lift_node(X, [0, 0, 0, 0, 0, 1])
    assert nd.q == (0, 1) and nd.jacobian_rank == 1

    both = CompleteIntersection(CIConfig((2, 2)), [x(0) ** 2 + x(1) ** 2, x(2) ** 2 + x(3) ** 2])
    with pytest.raises(NotIsolatedLiftError) as err:
        lift_node(both, [0, 0, 0, 0, 1, 0])
    assert err.value.fiber_dimension == 1


def test_certify_examples():
    X, p = standard_node_model()
    nd = lift_node(X, p)
    assert certify_node(X, nd) and nd.hessian_rank == X.config.nvars + X.config.c - 2

    W5 = (1,) * 5
    y = [GradedPolynomial.variable(QQ, W5, i) for i in range(5)]
    cusp = y[1] ** 3 + (y[2] ** 2 + y[3] ** 2 + y[4] ** 2) * y[0]
    C = CompleteIntersection(CIConfig((3,)), [cusp])
    nd = lift_node(C, [1, 0, 0, 0, 0])
    assert not certify_node(C, nd) and nd.hessian_rank == 3

    with pytest.raises(NotSingularError):
        lift_node(X, [1, 0, 0, 0, 1, 0])
    with pytest.raises(NotSingularError):
        certify_node(X, NodeRecord((1, 1, 0, 0, 0, 0), (0, 1), 1, None, QQ))


@pytest.mark.parametrize("n,c", [(1, 1), (3, 2), (3, 3), (5, 2)])
def test_standard_model_is_a_node(n, c):
    X, p = standard_node_model(n, c)
    nd = lift_node(X, p)
    assert certify_node(X, nd)


def test_node_record_roundtrip_and_reduction():
    X, p = standard_node_model()
    nd = lift_node(X, p)
    certify_node(X, nd)
    back = NodeRecord.from_json(nd.to_json())
    assert back.p == nd.p and back.q == nd.q and back.hessian_rank == nd.hessian_rank
    red = NodeRecord((Fraction(1, 3), Fraction(2, 5), 0), (Fraction(1, 7),), 0, None, QQ).change_field(PrimeField(5))
    # (1/3 : 2/5 : 0) = (5 : 6 : 0) as a primitive integer vector
    assert red.p == (0, 1, 0)


def test_projective_point_counts():
    F = PrimeField(5)
    assert sum(len(c) for c in projective_points(F, 2)) == 31
    G = finite_field(5, 2)
    assert sum(len(c) for c in projective_points(G, 2, chunk=100)) == 25 ** 2 + 25 + 1


def test_scan_smooth_and_budget(examples):
    ex = examples("smooth", (2, 2))
    res = find_singular_points(ex.ci, 5, 1)
    assert res.points == [] and res.scanned == 3906
    with pytest.raises(BudgetExceededError) as err:
        find_singular_points(ex.ci, 5, 2, budget=1000)
    assert err.value.required == (25 ** 6 - 1) // 24


def test_scan_plane_over_extension(examples):
    ex = examples("plane", (2, 2))
    res = find_singular_points(ex.ci, 5, 2, subspace=PLANE_BASIS)
    assert len(res.points) == 3 and res.scanned == 25 ** 2 + 25 + 1
    assert res.summary()["points_by_orbit_size"] == {"1": 3}


def test_scan_independent_of_jobs(examples):
    ex = examples("plane", (2, 3))
    a = find_singular_points(ex.ci, 5, 1, jobs=1, chunk=500)
    b = find_singular_points(ex.ci, 5, 1, jobs=4, chunk=500)
    assert a.points == b.points and len(a.points) == 7


def _brute_singular_Y(X, p):
    """Singular points of Y over F_p by testing every (x, y) pair directly."""
    F = PrimeField(p)
    Xf = X.change_field(F)
    cfg = X.config
    out = []
    ys = [pt for chunk in projective_points(F, cfg.c - 1) for pt in map(tuple, chunk)]
    grads = [[f.partial(j) for j in range(cfg.nvars)] for f in Xf.equations]
    for chunk in projective_points(F, cfg.nvars - 1):
        for pt in map(tuple, chunk):
            if any(f.evaluate(pt) for f in Xf.equations):
                continue
            M = [[g.evaluate(pt) for g in row] for row in grads]
            for q in ys:
                if all(sum(q[i] * M[i][j] for i in range(cfg.c)) % p == 0 for j in range(cfg.nvars)):
                    out.append((pt, q))
    return out


@pytest.mark.parametrize("family,degs", [("plane", (2, 2)), ("induced", (2, 3)), ("smooth", (2, 2))])
def test_psi_is_well_defined(examples, family, degs):
    ex = examples(family, degs)
    ysing = _brute_singular_Y(ex.ci, 5)
    xsing = find_singular_points(ex.ci, 5, 1).points
    assert sorted({pt for pt, _ in ysing}) == sorted(xsing)
    # nodes have a single lift, so psi is a bijection here
    assert len(ysing) == len(xsing)


def test_fiber_dimension_law(examples):
    F = PrimeField(5)
    for family, degs in [("plane", (2, 3)), ("induced", (2, 2))]:
        X = examples(family, degs).ci.change_field(F)
        for pt in find_singular_points(X, 5, 1).points:
            M = jacobian_at(X, pt)
            assert left_kernel(M, F).shape[0] - 1 == X.config.c - rank(M, F) - 1


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=-20, max_value=20).filter(lambda t: t != 0))
def test_scaling_invariance(lam):
    X, p = standard_node_model()
    a = lift_node(X, p)
    b = lift_node(X, [lam * v for v in p])
    assert a.p == b.p and a.q == b.q and a.jacobian_rank == b.jacobian_rank


def test_smoothness_certificate():
    assert hypersurface_smooth_certificate(quadric() + x(4) ** 2 + x(5) ** 2)
    assert not hypersurface_smooth_certificate(quadric())
