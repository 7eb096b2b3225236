from fractions import Fraction

import pytest

from lgmirror.polyring import direct_sum, parse_polynomial, transpose, weight_system
from lgmirror.statespace import (
    NotAdmissible,
    SectorElement,
    action_weight,
    build_sector,
    build_state_space,
    poincare_table,
    table_to_json,
)
from lgmirror.symmetry import (
    GroupElement,
    gmax,
    j_element,
    sl_subgroup,
    span,
    transpose_group,
)

E1 = parse_polynomial("x0^2+x1^3+x2^6")
K3 = parse_polynomial("y0^2+y1^6+y2^6+y3^6")
WS1 = weight_system(E1)
WS2 = weight_system(K3)
J1 = span(3, [j_element(WS1)])
J2 = span(4, [j_element(WS2)])


def test_action_weight_examples():
    j = j_element(WS1)
    e = SectorElement(GroupElement.identity(3), (0, 1, 4), "A")
    assert action_weight(j, e) == 0  # 2*(1/3) + 5*(1/6) + 1*(1/2) = 2
    assert action_weight(GroupElement.identity(3), e) == 0
    unit = SectorElement(GroupElement.identity(3), (0, 0, 0), "A")
    assert action_weight(j, unit) == 0  # age j = 1 for CY


def test_build_sector_identity():
    rings = {}
    got = build_sector(E1, J1, GroupElement.identity(3), "A", WS1, rings)
    assert sorted(e.monomial for e in got) == [(0, 0, 0), (0, 1, 4)]


def test_build_sector_narrow():
    rings = {}
    j = j_element(WS1)
    got = build_sector(E1, J1, j, "A", WS1, rings)
    assert len(got) == 1 and got[0].monomial == (0, 0, 0)


def test_build_sector_empty():
    rings = {}
    g = GroupElement([Fraction(1, 2), 0, Fraction(1, 2)])  # j^3
    got = build_sector(E1, J1, g, "A", WS1, rings)
    assert got == []


def test_elliptic_a_table():
    space = build_state_space(E1, J1, "A")
    table = poincare_table(space)
    assert table == {
        (Fraction(0), Fraction(0)): 1,
        (Fraction(1), Fraction(0)): 1,
        (Fraction(0), Fraction(1)): 1,
        (Fraction(1), Fraction(1)): 1,
    }


def test_k3_a_table():
    space = build_state_space(K3, J2, "A")
    table = poincare_table(space)
    assert space.dim == 24
    assert table[(Fraction(1), Fraction(1))] == 20
    assert table[(Fraction(2), Fraction(0))] == 1
    assert table[(Fraction(0), Fraction(2))] == 1
    assert table[(Fraction(0), Fraction(0))] == 1
    assert table[(Fraction(2), Fraction(2))] == 1


def test_b_requires_sl():
    with pytest.raises(NotAdmissible):
        build_state_space(E1, gmax(E1), "B")


def test_a_requires_j():
    triv = span(3, [])
    with pytest.raises(NotAdmissible):
        build_state_space(E1, triv, "A")


def test_a_b_same_total_dim():
    # J1 is both A- and B-admissible for the CY elliptic curve
    a = build_state_space(E1, J1, "A")
    b = build_state_space(E1, J1, "B")
    assert a.dim == b.dim


def test_b_bidegree_identity_broad():
    b = build_state_space(E1, J1, "B")
    unit = next(e for e in b.basis if e.sector.is_identity() and e.monomial == (0, 0, 0))
    assert b.bidegree(unit) == (Fraction(0), Fraction(0))


def test_b_bidegree_inverse_swap():
    b = build_state_space(E1, J1, "B")
    for e in b.basis:
        inv = next(
            (f for f in b.basis if f.sector == -e.sector and f.monomial == e.monomial),
            None,
        )
        assert inv is not None
        p, q = b.bidegree(e)
        assert b.bidegree(inv) == (q, p)


def test_kuenneth_tensor_dims():
    # sector bases of a disjoint sum factor through the blockwise invariants
    w = direct_sum(E1, K3)
    ws = weight_system(w)
    j1 = GroupElement(list(j_element(WS1).components) + [0] * 4)
    j2 = GroupElement([0] * 3 + list(j_element(WS2).components))
    g = span(7, [j1, j2])
    space = build_state_space(w, g, "A")
    a1 = build_state_space(E1, J1, "A")
    a2 = build_state_space(K3, J2, "A")
    assert space.dim == a1.dim * a2.dim
    # bidegrees add under the product of sectors
    t = poincare_table(space)
    t1 = poincare_table(a1)
    t2 = poincare_table(a2)
    expected = {}
    for (p1, q1), d1 in t1.items():
        for (p2, q2), d2 in t2.items():
            key = (p1 + p2, q1 + q2)
            expected[key] = expected.get(key, 0) + d1 * d2
    assert t == expected


def test_krawitz_bigraded_dimension_check():
    # A(W, G) and B(W^T, G^T) have equal bigraded tables
    cases = [
        (E1, J1),
        (E1, sl_subgroup(gmax(E1))),
        (K3, J2),
        (parse_polynomial("x^3*y+y^4"), None),
    ]
    for poly, grp in cases:
        ws = weight_system(poly)
        if grp is None:
            grp = span(poly.nvars, [j_element(ws)])
        a = build_state_space(poly, grp, "A")
        dual = transpose_group(grp, poly)
        b = build_state_space(transpose(poly), dual, "B")
        assert poincare_table(a) == poincare_table(b)


def test_table_json_shapes():
    space = build_state_space(E1, J1, "A")
    data = table_to_json(poincare_table(space), "A")
    assert data["flavor"] == "A"
    assert data["total"] == 4
    assert {e["p"] for e in data["entries"]} == {"0/1", "1/1"}


def test_deterministic_basis_order():
    s1 = build_state_space(K3, J2, "A")
    s2 = build_state_space(K3, J2, "A")
    assert s1.basis == s2.basis


def test_sector_dims_record_empty_sectors():
    space = build_state_space(E1, J1, "A")
    assert len(space.sector_dims) == J1.order
    assert sum(space.sector_dims.values()) == space.dim
    assert 0 in space.sector_dims.values()  # e.g. the j^2 sector is empty


def test_parallel_ring_warmup_matches_serial():
    serial = build_state_space(K3, J2, "A", jobs=1)
    parallel = build_state_space(K3, J2, "A", jobs=2)
    assert serial.basis == parallel.basis


def test_krawitz_check_helper():
    from lgmirror.statespace import krawitz_dimension_check

    checked, lhs, rhs = krawitz_dimension_check(E1, J1)
    assert checked and lhs == rhs


def test_krawitz_check_skips_half_weight_chain():
    import warnings

    from lgmirror.statespace import krawitz_dimension_check

    # chain x^2 y + y^2: weights (1,2;4), so the chain variable y has q = 1/2
    chain = parse_polynomial("x^2*y+y^2")
    ws = weight_system(chain)
    assert ws.weights == (1, 2) and ws.degree == 4
    grp = span(2, [j_element(ws)])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        checked, _, _ = krawitz_dimension_check(chain, grp)
    assert not checked
    assert any("weight 1/2" in str(w.message) for w in caught)
