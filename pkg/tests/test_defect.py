import pytest

from nodalci.cayley import NodeRecord, certify_node, lift_node
from nodalci.defect import (
    NoDefectDirectionError,
    UncertifiedNodeError,
    UnsupportedDimensionError,
    build_v_family,
    defect_of_ci,
    defect_upper_bound_cynk,
    defect_via_bigraded,
    inequality_suite,
    node_lower_bound,
    restrict_W,
    vl_hilbert,
    w_slice,
    w_table,
)
from nodalci.fields import QQ
from nodalci.polyring import CIConfig

C22, C23, C33 = CIConfig((2, 2)), CIConfig((2, 3)), CIConfig((3, 3))


def test_node_lower_bound_examples():
    assert node_lower_bound(C22) == 3
    assert node_lower_bound(C23) == 7
    assert node_lower_bound(C33) == 12
    assert node_lower_bound(CIConfig((5,))) == 16


def test_vl_hilbert_examples():
    assert vl_hilbert(C22, 0) == 2
    assert vl_hilbert(C23, 1) == 3
    # k = 3 lies in the middle range: D + d_c - c - 2 - k = 5 + 3 - 2 - 2 - 3
    assert vl_hilbert(C23, 3) == 1
    assert [vl_hilbert(C23, k) for k in range(-1, 6)] == [0, 1, 3, 2, 1, 0, 0]


@pytest.mark.parametrize("degs", [(2, 2), (2, 3), (3, 3), (2, 4), (3, 4), (4, 4), (2, 2, 2), (2, 2, 3), (2, 3, 3)])
def test_vl_hilbert_sums_to_node_bound(degs):
    cfg = CIConfig(degs)
    assert sum(vl_hilbert(cfg, k) for k in range(cfg.D + cfg.dc)) == node_lower_bound(cfg)


def test_w_slice_examples(examples):
    assert w_slice(C22, [], 2).codimension == 0
    ex = examples("plane", (2, 2))
    one = w_slice(ex.ci, ex.nodes[:1], 2)
    assert one.codimension == 1
    sl = w_slice(ex.ci, ex.nodes, 0)
    assert sl.ambient_dimension == 2 and sl.codimension == 2 < 3


def test_uncertified_node_rejected(examples):
    ex = examples("plane", (2, 2))
    nd = ex.nodes[0]
    raw = NodeRecord(nd.p, nd.q, nd.jacobian_rank, None, nd.field)
    with pytest.raises(UncertifiedNodeError):
        w_slice(ex.ci, [raw], 0)


def test_defect_rejects_other_dimensions():
    with pytest.raises(UnsupportedDimensionError):
        defect_of_ci(CIConfig((2, 2), n=5), [])


def test_smooth_defect_zero():
    rep = defect_of_ci(C23, [])
    assert rep.defect == 0 and rep.node_count == 0 and rep.ok
    assert defect_upper_bound_cynk(C22, []) == 0


@pytest.mark.parametrize("degs,nodes", [((2, 2), 3), ((2, 3), 7)])
def test_plane_defect(examples, degs, nodes):
    ex = examples("plane", degs)
    rep = defect_of_ci(ex.ci, ex.nodes, partial_smooth=ex.provenance.partial_ci_smooth)
    assert (rep.node_count, rep.defect, rep.bound) == (nodes, 1, nodes)
    assert rep.ok and rep.checks["cynk_sandwich"] is True
    assert rep.defect <= rep.cynk_bound


def test_plane_22_cynk_value(examples):
    ex = examples("plane", (2, 2))
    # degree 2 + 4 - 6 = 0: three points impose one condition on constants
    assert defect_upper_bound_cynk(ex.ci, ex.nodes) == 2


def test_exact_rank_agrees_with_primes(examples):
    ex = examples("plane", (2, 2))
    rep = defect_of_ci(ex.ci, ex.nodes, exact=True)
    assert set(rep.ranks_by_field) == {"fp:10007", "fp:10009", "q"}
    assert {v for d in rep.ranks_by_field.values() for v in d.values()} == {2}


def test_two_code_paths_agree(examples):
    for family, degs in [("plane", (2, 3)), ("induced", (2, 4))]:
        ex = examples(family, degs)
        cfg = ex.ci.config
        k = cfg.D + cfg.dc - 4 - cfg.c
        for p in (10007, 10009):
            corank, r = defect_via_bigraded(cfg, ex.nodes, p)
            assert r == w_slice(ex.ci, ex.nodes, k, p).codimension
            assert corank == len(ex.nodes) - r


@pytest.mark.parametrize("family,degs", [("plane", (2, 2)), ("plane", (2, 3)), ("induced", (2, 3))])
def test_w_stabilizes_and_grows(examples, family, degs):
    ex = examples(family, degs)
    t = w_table(ex.ci.config, ex.nodes, 8)
    vals = [t[k] for k in range(9)]
    assert vals == sorted(vals) and vals[-1] == len(ex.nodes)


@pytest.mark.parametrize("family,degs", [("plane", (2, 2)), ("plane", (2, 3)), ("induced", (2, 2)), ("induced", (2, 3))])
def test_detection_threshold(examples, family, degs):
    ex = examples(family, degs)
    cfg = ex.ci.config
    rep = defect_of_ci(ex.ci, ex.nodes)
    h = w_slice(ex.ci, ex.nodes, cfg.D + cfg.dc - cfg.c - 4).codimension
    assert (rep.defect > 0) == (h < len(ex.nodes))


def test_restriction_without_nodes():
    R = restrict_W(C22, [], seed=3)
    assert set(R.h_W.values.values()) == {0}
    assert R.chain_ok and R.oracle_ok


@pytest.mark.parametrize("degs", [(2, 2), (2, 3)])
def test_restriction_chain(examples, degs):
    ex = examples("plane", degs)
    R = restrict_W(ex.ci, ex.nodes, seed=5)
    assert R.chain_ok and R.oracle_ok
    assert max(R.h_W.values.values()) <= len(ex.nodes)


def test_hyperplane_avoids_nodes(examples):
    ex = examples("plane", (2, 2))
    R = restrict_W(ex.ci, ex.nodes, seed=0)
    F = R.field
    for nd in ex.nodes:
        p = nd.change_field(F).p
        assert sum(F.mul(a, b) for a, b in zip(R.hyperplane, p)) % F.p != 0


def test_v_family_from_zero_w_prime():
    R = restrict_W(C22, [], seed=1)
    # no nodes: W' is everything, so there is no defect direction
    with pytest.raises(NoDefectDirectionError):
        build_v_family(C22, R, seed=1)
    R.Wprime_top = R.field.zeros((0, R.Wprime_top.shape[1]))
    V = build_v_family(C22, R, seed=1)
    assert V.h_V[V.top] == 1


@pytest.mark.parametrize("degs", [(2, 2), (2, 3), (3, 3)])
def test_v_family_plane(examples, degs):
    ex = examples("plane", degs)
    cfg = ex.ci.config
    R = restrict_W(ex.ci, ex.nodes, seed=1)
    V = build_v_family(cfg, R, seed=1)
    T = cfg.D + cfg.dc - cfg.c - 3
    assert V.top == T
    assert V.filtration_ok and V.symmetric and V.condition2
    fc = V.h_Fc
    assert all(fc[k] == fc[T - k] for k in range(T + 1))
    # filtration conservation: the graded pieces add up to h_V
    for k in range(T + 1):
        parts = sum(V.h_P[i].get(k + d - cfg.dc, 0) for i, d in enumerate(cfg.degrees, start=1))
        assert parts == V.h_V[k]
    ineq = inequality_suite(V)
    assert all(v["holds"] for v in ineq.values())
    if degs != (2, 2):
        assert [V.h_V[k] for k in range(T + 1)] == [vl_hilbert(cfg, k) for k in range(T + 1)]
        assert sum(V.h_V.values.values()) == node_lower_bound(cfg)


def test_no_defect_direction(examples):
    # with W' filling the top degree there is no corank-one V_T
    ex = examples("plane", (2, 2))
    R = restrict_W(ex.ci, ex.nodes, seed=1)
    full = R.field.zeros((R.Wprime_top.shape[1], R.Wprime_top.shape[1]))
    for i in range(full.shape[0]):
        full[i, i] = 1
    R.Wprime_top = full
    with pytest.raises(NoDefectDirectionError):
        build_v_family(ex.ci.config, R, seed=1)


def test_report_json(examples):
    ex = examples("plane", (2, 2))
    data = defect_of_ci(ex.ci, ex.nodes).to_json()
    assert data["nodes"] == 3 and data["defect"] == 1 and data["bound"] == 3
