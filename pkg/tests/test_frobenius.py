from fractions import Fraction

import pytest

from lgmirror.bvlg import build_bv
from lgmirror.frobenius import (
    AlgebraElement,
    BAlgebra,
    MixedSpaces,
    NotBasisElement,
    OddElement,
    check_property1,
    even_basis,
    gamma_lemma_cases,
    phi_map,
    verify_theorem2,
    z2_grading,
)
from lgmirror.polyring import parse_polynomial, weight_system
from lgmirror.statespace import SectorElement, action_weight, build_state_space
from lgmirror.symmetry import GroupElement, j_element, span, transpose_group

E1 = parse_polynomial("x0^2+x1^3+x2^6")
K3 = parse_polynomial("y0^2+y1^6+y2^6+y3^6")
MINI = parse_polynomial("y0^2+y1^2")
X3 = parse_polynomial("x^3")


def jgens(w1, w2):
    ws1, ws2 = weight_system(w1), weight_system(w2)
    j1 = GroupElement([Fraction(w, ws1.degree) for w in ws1.weights] + [0] * w2.nvars)
    j2 = GroupElement([0] * w1.nvars + [Fraction(w, ws2.degree) for w in ws2.weights])
    return [j1, j2]


def x3_algebra():
    space = build_state_space(X3, span(1, []), "B")
    return space, BAlgebra(space)


def test_z2_grading_examples():
    narrow = SectorElement(GroupElement([Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)]), (0, 0, 0), "A")
    assert z2_grading(narrow, 3) == 0  # N_g = 0
    broad = SectorElement(GroupElement.identity(3), (0, 0, 0), "A")
    assert z2_grading(broad, 3) == 1  # N = 3
    b_identity = SectorElement(GroupElement.identity(5), (0,) * 5, "B")
    assert z2_grading(b_identity, 5) == 0  # N - N_g = 0


def test_gamma_identity_is_one():
    space, alg = x3_algebra()
    e = GroupElement.identity(1)
    assert alg.gamma(e, e) == 1

    m = build_bv(E1, K3, jgens(E1, K3))
    mirror = m.mirror()
    b0 = build_state_space(mirror.poly, mirror.sigma_group, "B")
    alg0 = BAlgebra(b0)
    ident = GroupElement.identity(7)
    for g in list(sorted({e.sector for e in b0.basis}))[:6]:
        assert alg0.gamma(ident, g) == 1


def test_gamma_condition_fails_to_zero():
    m = build_bv(E1, K3, jgens(E1, K3))
    mirror = m.mirror()
    b0 = build_state_space(mirror.poly, mirror.sigma_group, "B")
    alg0 = BAlgebra(b0)
    narrow = [
        e.sector
        for e in b0.basis
        if not [c for c in e.sector.components if c == 0]
    ]
    g = narrow[0]
    h = next(h for h in narrow if not (g + h).is_identity())
    # both narrow and gh narrow: the union of fixed sets misses everything
    if not [c for c in (g + h).components if c == 0]:
        assert alg0.gamma(g, h) == 0


def test_product_unit_and_nilpotent():
    space, alg = x3_algebra()
    x = SectorElement(GroupElement.identity(1), (1,), "B")
    ax = AlgebraElement.basis(space, x)
    assert alg.product(alg.unit(), ax) == ax
    assert alg.product(ax, alg.unit()) == ax
    assert alg.product(ax, ax).is_zero()  # nf(x^2) = 0 in Q(x^3)


def test_pairing_examples():
    space, alg = x3_algebra()
    one = SectorElement(GroupElement.identity(1), (0,), "B")
    x = SectorElement(GroupElement.identity(1), (1,), "B")
    assert alg.pairing_basis(one, x) == Fraction(1, 3)
    assert alg.pairing_basis(one, one) == 0


def test_pairing_sector_orthogonality():
    m = build_bv(E1, MINI, jgens(E1, MINI))
    mirror = m.mirror()
    b0 = build_state_space(mirror.poly, mirror.sigma_group, "B")
    alg = BAlgebra(b0)
    for e1 in b0.basis:
        for e2 in b0.basis:
            if e2.sector != -e1.sector:
                assert alg.pairing_basis(e1, e2) == 0


def test_even_gram_nondegenerate():
    m = build_bv(E1, K3, jgens(E1, K3))
    mirror = m.mirror()
    b0 = build_state_space(mirror.poly, mirror.sigma_group, "B")
    alg = BAlgebra(b0)
    ev = even_basis(b0)
    gram = [[alg.pairing_basis(a, b) for b in ev] for a in ev]
    # exact determinant via fraction Gaussian elimination
    n = len(gram)
    det = Fraction(1)
    mat = [row[:] for row in gram]
    for c in range(n):
        piv = next((i for i in range(c, n) if mat[i][c] != 0), None)
        assert piv is not None
        if piv != c:
            mat[c], mat[piv] = mat[piv], mat[c]
            det = -det
        det *= mat[c][c]
        inv = 1 / mat[c][c]
        for i in range(c + 1, n):
            if mat[i][c]:
                f = mat[i][c] * inv
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[c])]
    assert det != 0


def test_odd_operands_rejected():
    m = build_bv(E1, MINI, jgens(E1, MINI))
    mirror = m.mirror()
    b0 = build_state_space(mirror.poly, mirror.sigma_group, "B")
    alg = BAlgebra(b0)
    odd = [e for e in b0.basis if z2_grading(e, 5)]
    if odd:
        with pytest.raises(OddElement):
            alg.product(
                AlgebraElement.basis(b0, odd[0]), AlgebraElement.basis(b0, odd[0])
            )


def test_mixed_spaces_rejected():
    m = build_bv(E1, MINI, jgens(E1, MINI))
    mirror = m.mirror()
    b0 = build_state_space(mirror.poly, mirror.sigma_group, "B")
    space, alg = x3_algebra()
    with pytest.raises(MixedSpaces):
        alg.product(alg.unit(), AlgebraElement.basis(b0, b0.basis[0]))


def test_z2_additive_on_products():
    m = build_bv(E1, K3, jgens(E1, K3))
    mirror = m.mirror()
    b0 = build_state_space(mirror.poly, mirror.sigma_group, "B")
    alg = BAlgebra(b0)
    ev = even_basis(b0)
    for e1 in ev:
        for e2 in ev:
            out = alg._product_basis(e1, e2)
            for target in out.coeffs:
                assert z2_grading(target, 7) == 0


def test_phi_map_cases():
    m = build_bv(E1, K3, jgens(E1, K3))
    mirror = m.mirror()
    shared = {}
    bhk = build_state_space(
        mirror.poly, transpose_group(m.sigma_group, m.poly), "B", rings=shared
    )
    bv = build_state_space(mirror.poly, mirror.sigma_group, "B", rings=shared)
    half = Fraction(1, 2)
    saw = set()
    for e in bhk.basis:
        k, image = phi_map(e, bhk, bv, mirror.sigma)
        if image == e:
            assert k == 1
            saw.add("shared")
        else:
            slots_zero = (
                e.sector.components[mirror.slot1] == 0
                and e.sector.components[mirror.slot2] == 0
            )
            assert k == (half if slots_zero else 2)
            assert image.monomial == e.monomial
            assert image.sector == mirror.sigma + e.sector
            saw.add("half" if slots_zero else "double")
    assert "shared" in saw and ("half" in saw or "double" in saw)


def test_phi_membership_criterion():
    # <m; g> lies in the BV mirror exactly when j of W1^T fixes m
    m = build_bv(E1, K3, jgens(E1, K3))
    mirror = m.mirror()
    shared = {}
    bhk = build_state_space(
        mirror.poly, transpose_group(m.sigma_group, m.poly), "B", rings=shared
    )
    bv = build_state_space(mirror.poly, mirror.sigma_group, "B", rings=shared)
    for e in bhk.basis:
        fixes = action_weight(mirror.j1, e) == 0
        assert fixes == (e in bv.basis_set)


def nonproduct_model():
    mixer = GroupElement(
        [0, Fraction(1, 4), Fraction(3, 4), 0, Fraction(1, 6), Fraction(5, 6), 0]
    )
    e2 = parse_polynomial("x0^2+x1^4+x2^4")
    return build_bv(e2, K3, jgens(e2, K3) + [mixer])


def test_phi_map_all_three_cases_on_nonproduct_model():
    m = nonproduct_model()
    mirror = m.mirror()
    shared = {}
    bhk = build_state_space(
        mirror.poly, transpose_group(m.sigma_group, m.poly), "B", rings=shared
    )
    bv = build_state_space(mirror.poly, mirror.sigma_group, "B", rings=shared)
    saw = set()
    for e in bhk.basis:
        k, image = phi_map(e, bhk, bv, mirror.sigma)
        if image == e:
            saw.add("shared")
        elif k == Fraction(1, 2):
            saw.add("half")
        elif k == 2:
            saw.add("double")
    assert saw == {"shared", "half", "double"}


def test_theorem2_nonproduct_model():
    # exercises the doubling branch of the rescaling map
    report = verify_theorem2(nonproduct_model())
    assert report.passed, report.mismatches


def test_phi_not_basis_element():
    m = build_bv(E1, MINI, jgens(E1, MINI))
    mirror = m.mirror()
    shared = {}
    bhk = build_state_space(
        mirror.poly, transpose_group(m.sigma_group, m.poly), "B", rings=shared
    )
    bv = build_state_space(mirror.poly, mirror.sigma_group, "B", rings=shared)
    fake = SectorElement(GroupElement.identity(5), (4, 4, 4, 4, 4), "B")
    with pytest.raises(NotBasisElement):
        phi_map(fake, bhk, bv, mirror.sigma)


def test_property1_fermat_models():
    for text in ("x0^2+x1^3+x2^6", "y0^2+y1^6+y2^6+y3^6"):
        p = parse_polynomial(text)
        g = span(p.nvars, [j_element(weight_system(p))])
        assert check_property1(p, g).passed


def test_property1_bv_model():
    m = build_bv(E1, K3, jgens(E1, K3))
    assert check_property1(m.poly, m.sigma_group, ws=m.ws).passed


def test_property1_chain_counterexample():
    # the j^9 sector (1/3, 0, 0) fixes the chain tail {x2, x3} but not x1
    w = parse_polynomial("x1^3*x2+x2^3*x3+x3^3")
    grp = span(3, [j_element(weight_system(w))])
    report = check_property1(w, grp)
    assert not report.passed
    assert any(v["sector"] == "1/3,0,0" for v in report.mismatches)


def test_theorem2_mini():
    m = build_bv(E1, MINI, jgens(E1, MINI))
    report = verify_theorem2(m)
    assert report.passed, report.mismatches


def test_theorem2_fermat_k3_and_negative_control():
    m = build_bv(E1, K3, jgens(E1, K3))
    report = verify_theorem2(m)
    assert report.passed, report.mismatches
    assert report.details["associativity_failures"] == 0
    assert report.details["frobenius_failures"] == 0
    bad = verify_theorem2(m, rescaled=False)
    assert not bad.passed
    assert bad.details["product_failures"] or bad.details["pairing_failures"]


def test_gamma_lemma_factors():
    m = build_bv(E1, K3, jgens(E1, K3))
    mirror = m.mirror()
    b0 = build_state_space(mirror.poly, mirror.sigma_group, "B")
    alg = BAlgebra(b0)
    sectors = sorted({e.sector for e in even_basis(b0)})
    checked, failures = gamma_lemma_cases(alg, mirror.sigma, sectors)
    assert checked == len(sectors) ** 2
    assert not failures


def test_gamma_csv_export(tmp_path):
    m = build_bv(E1, MINI, jgens(E1, MINI))
    mirror = m.mirror()
    b0 = build_state_space(mirror.poly, mirror.sigma_group, "B")
    alg = BAlgebra(b0)
    path = tmp_path / "gamma.csv"
    sectors = sorted({e.sector for e in even_basis(b0)})
    alg.export_gamma_csv(path, sectors)
    lines = path.read_text().splitlines()
    assert lines[0] == "g,h,gamma"
    assert len(lines) == 1 + len(sectors) ** 2
