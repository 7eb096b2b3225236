"""Borcea-Voisin Landau-Ginzburg models: sigma extensions, mirror pairs,
the twist construction, and the state-space theorem verifiers."""

from __future__ import annotations

import math
import warnings
from fractions import Fraction

from .polyring import (
    Polynomial,
    WeightSystem,
    check_cy,
    direct_sum,
    is_bv_form,
    is_invertible,
    transpose,
    weight_system,
)
from .report import Report
from .statespace import (
    SectorElement,
    build_state_space,
    frac_str,
    poincare_table,
)
from .symmetry import (
    GroupElement,
    SymmetryGroup,
    element_in_gmax,
    group_from_elements,
    j_element,
    span,
    transpose_group,
)


class BVError(Exception):
    pass


class BadForm(BVError):
    pass


class NotCY(BVError):
    pass


class GroupOutOfRange(BVError):
    pass


class MalformedSector(BVError):
    """A nonempty sector fixes exactly one distinguished variable."""


class BVModel:
    """(W1 + W2, sigma*G) with J1 x J2 <= G <= SL(W1) x SL(W2)."""

    __slots__ = (
        "w1",
        "w2",
        "poly",
        "ws",
        "ws1",
        "ws2",
        "n1",
        "n2",
        "slot1",
        "slot2",
        "group",
        "sigma",
        "sigma_group",
        "j1",
        "j2",
        "_mirror",
        "_twist",
    )

    def __init__(self, w1, w2, poly, ws, ws1, ws2, slot1, slot2, group, sigma, sigma_group, j1, j2):
        self.w1 = w1
        self.w2 = w2
        self.poly = poly
        self.ws = ws
        self.ws1 = ws1
        self.ws2 = ws2
        self.n1 = w1.nvars
        self.n2 = w2.nvars
        self.slot1 = slot1
        self.slot2 = slot2  # index in the combined variable list
        self.group = group
        self.sigma = sigma
        self.sigma_group = sigma_group
        self.j1 = j1
        self.j2 = j2
        self._mirror = None
        self._twist = None

    @property
    def slots(self):
        return (self.slot1, self.slot2)

    def block_components(self, g: GroupElement):
        return g.components[: self.n1], g.components[self.n1 :]

    def mirror(self) -> "BVModel":
        if self._mirror is None:
            self._mirror = mirror_pair(self)
        return self._mirror

    def twist(self) -> "TwistModel":
        if self._twist is None:
            self._twist = twist_model(self)
        return self._twist

    def __repr__(self):
        return f"BVModel({self.w1} | {self.w2}, |sigmaG|={self.sigma_group.order})"


def _block_age(components) -> Fraction:
    return sum(components, Fraction(0)) % 1


def build_bv(w1: Polynomial, w2: Polynomial, gens) -> BVModel:
    """Validate the two potentials and the group, build sigma*G.

    gens are group elements over the combined variable list; the spanned
    group must satisfy J1 x J2 <= G <= SL(W1) x SL(W2).
    """
    ok1, i1 = is_bv_form(w1)
    if not ok1:
        raise BadForm(f"{w1} is not of the form z0^2 + f")
    ok2, i2 = is_bv_form(w2)
    if not ok2:
        raise BadForm(f"{w2} is not of the form z0^2 + f")
    ws1 = weight_system(w1)
    ws2 = weight_system(w2)
    if not check_cy(ws1):
        raise NotCY(f"{w1} fails the Calabi-Yau condition")
    if not check_cy(ws2):
        raise NotCY(f"{w2} fails the Calabi-Yau condition")
    try:
        poly = direct_sum(w1, w2)
    except ValueError as exc:
        raise BadForm(str(exc)) from exc
    ws = weight_system(poly)
    n1 = w1.nvars
    n = poly.nvars
    slot1, slot2 = i1, n1 + i2
    j1 = GroupElement(list(j_element(ws1).components) + [Fraction(0)] * w2.nvars)
    j2 = GroupElement([Fraction(0)] * n1 + list(j_element(ws2).components))
    group = span(n, list(gens))
    if j1 not in group or j2 not in group:
        raise GroupOutOfRange("J1 x J2 is not contained in G")
    for h in group.gens:
        bx, by = h.components[:n1], h.components[n1:]
        if _block_age(bx) != 0 or _block_age(by) != 0:
            raise GroupOutOfRange(f"generator {h} leaves SL(W1) x SL(W2)")
        if not element_in_gmax(poly, h):
            raise GroupOutOfRange(f"generator {h} is not a symmetry of W1 + W2")
    sigma = GroupElement(
        [Fraction(1, 2) if k in (slot1, slot2) else Fraction(0) for k in range(n)]
    )
    if sigma in group:
        raise GroupOutOfRange("sigma already lies in G")
    elements = list(group.elements) + [sigma + g for g in group.elements]
    sigma_group = SymmetryGroup(n, elements, tuple(group.gens) + (sigma,))
    return BVModel(w1, w2, poly, ws, ws1, ws2, slot1, slot2, group, sigma, sigma_group, j1, j2)


def mirror_pair(model: BVModel) -> BVModel:
    """(W1^T, W2^T) with group sigma * (G^T); re-validated from scratch."""
    dual = transpose_group(model.group, model.poly)
    gens = dual.gens if dual.gens else [GroupElement.identity(model.poly.nvars)]
    return build_bv(transpose(model.w1), transpose(model.w2), gens)


class TwistModel:
    """tw W = f1 - f2 with its weight system and slot-projected group."""

    __slots__ = ("poly", "ws", "delta", "group", "keep", "source")

    def __init__(self, poly, ws, delta, group, keep, source):
        self.poly = poly
        self.ws = ws
        self.delta = delta
        self.group = group
        self.keep = keep  # combined-model indices kept by the projection
        self.source = source

    def __repr__(self):
        return f"TwistModel({self.poly}, delta={self.delta}, |twG|={self.group.order})"


def twist_polynomial(w1: Polynomial, w2: Polynomial):
    """f1 - f2 with the rescaled weight system; returns (poly, ws, delta).

    The computed weight system of f1 - f2 is checked against the closed-form
    rescaling of the two input systems.
    """
    ok1, i1 = is_bv_form(w1)
    ok2, i2 = is_bv_form(w2)
    if not (ok1 and ok2):
        raise BadForm("both potentials must be z0^2 + f")
    ws1 = weight_system(w1)
    ws2 = weight_system(w2)
    u0 = ws1.weights[i1]
    v0 = ws2.weights[i2]
    delta = math.gcd(u0, v0)
    keep1 = [k for k in range(w1.nvars) if k != i1]
    keep2 = [k for k in range(w2.nvars) if k != i2]
    variables = tuple(w1.variables[k] for k in keep1) + tuple(
        w2.variables[k] for k in keep2
    )
    terms = {}
    for m, c in w1.terms.items():
        if m[i1]:
            continue
        terms[tuple(m[k] for k in keep1) + (0,) * len(keep2)] = c
    for m, c in w2.terms.items():
        if m[i2]:
            continue
        terms[(0,) * len(keep1) + tuple(m[k] for k in keep2)] = -c
    poly = Polynomial(variables, terms)
    formula = WeightSystem(
        tuple(v0 * ws1.weights[k] // delta for k in keep1)
        + tuple(u0 * ws2.weights[k] // delta for k in keep2),
        math.lcm(ws1.degree, ws2.degree),
    )
    ws = weight_system(poly)
    if ws != formula:
        raise BVError(f"twist weight formula mismatch: solved {ws}, formula {formula}")
    if sum(ws.weights) != ws.degree:
        raise NotCY("twist polynomial lost the Calabi-Yau condition")
    if not is_invertible(poly):
        warnings.warn(f"twist polynomial {poly} is not invertible", stacklevel=2)
    return poly, ws, delta


def twist_group(model: BVModel, tw_poly: Polynomial, keep) -> SymmetryGroup:
    """Elements of sigma*G vanishing on both distinguished slots, projected."""
    s1, s2 = model.slots
    projected = []
    for g in model.sigma_group.elements:
        c = g.components
        if c[s1] == 0 and c[s2] == 0:
            projected.append(GroupElement(c[k] for k in keep))
    group = group_from_elements(len(keep), projected)
    for h in group.gens:
        if not element_in_gmax(tw_poly, h):
            raise BVError(f"projected element {h} is not a symmetry of {tw_poly}")
    tw_ws = weight_system(tw_poly)
    if j_element(tw_ws) not in group:
        raise BVError("exponential grading operator of tw W missing from tw G")
    return group


def twist_model(model: BVModel) -> TwistModel:
    poly, ws, delta = twist_polynomial(model.w1, model.w2)
    keep = [k for k in range(model.poly.nvars) if k not in model.slots]
    group = twist_group(model, poly, keep)
    return TwistModel(poly, ws, delta, group, keep, model)


def _sector_epsilon(model: BVModel, g: GroupElement) -> int:
    c = g.components
    pair = (c[model.slot1], c[model.slot2])
    if pair == (0, 0):
        return 0
    if pair == (Fraction(1, 2), Fraction(1, 2)):
        return 1
    raise MalformedSector(f"sector {g} fixes exactly one distinguished variable")


def tw_a_map(e: SectorElement, model: BVModel, tw: TwistModel):
    """Image of a basis element under the twist map, with its 2^(1-eps) factor."""
    eps = _sector_epsilon(model, e.sector)
    for s in model.slots:
        if e.monomial[s]:
            raise MalformedSector("monomial touches a distinguished variable")
    sector = GroupElement(e.sector.components[k] for k in tw.keep)
    mono = tuple(e.monomial[k] for k in tw.keep)
    return Fraction(2) ** (1 - eps), SectorElement(sector, mono, e.flavor)


def tw_b_map(e: SectorElement, model: BVModel, tw: TwistModel):
    return tw_a_map(e, model, tw)


def verify_twist_iso(model: BVModel, flavor: str, tw_group_override=None) -> Report:
    """tw maps the (W, sigma G) basis bijectively onto the twist basis,
    preserving bidegrees; a corrupted twist group makes this fail."""
    tw = model.twist()
    group = tw_group_override if tw_group_override is not None else tw.group
    source = build_state_space(model.poly, model.sigma_group, flavor)
    target = build_state_space(tw.poly, group, flavor)
    mismatches = []
    images = set()
    for e in source.basis:
        coeff, image = tw_a_map(e, model, tw)
        if image not in target.basis_set:
            mismatches.append({"element": repr(e), "reason": "image not in twist basis"})
            continue
        if image in images:
            mismatches.append({"element": repr(e), "reason": "image duplicated"})
            continue
        images.add(image)
        if source.bidegree(e) != target.bidegree(image):
            mismatches.append(
                {
                    "element": repr(e),
                    "reason": "bidegree changed",
                    "source": [frac_str(x) for x in source.bidegree(e)],
                    "target": [frac_str(x) for x in target.bidegree(image)],
                }
            )
    unmatched = len(target.basis_set) - len(images)
    if unmatched:
        mismatches.append({"reason": f"{unmatched} twist basis elements unmatched"})
    return Report(
        f"twist-iso-{flavor}",
        not mismatches,
        {
            "flavor": flavor,
            "source_dim": source.dim,
            "target_dim": target.dim,
            "delta": tw.delta,
        },
        mismatches,
    )


def verify_group_lemma(model: BVModel) -> Report:
    """tw(G^T) = (tw G)^T as exact element sets."""
    mirror = model.mirror()
    tw = model.twist()
    mirror_tw = mirror.twist()
    lhs = mirror_tw.group  # tw(G^T)
    rhs = transpose_group(tw.group, tw.poly)  # (tw G)^T
    only_l = sorted(str(g) for g in lhs.element_set - rhs.element_set)
    only_r = sorted(str(g) for g in rhs.element_set - lhs.element_set)
    mismatches = [{"only_in_tw_of_dual": only_l, "only_in_dual_of_tw": only_r}] if (only_l or only_r) else []
    return Report(
        "group-lemma",
        not mismatches,
        {"lhs_order": lhs.order, "rhs_order": rhs.order},
        mismatches,
    )


def _table_mismatches(lhs: dict, rhs: dict):
    out = []
    for key in sorted(set(lhs) | set(rhs)):
        a = lhs.get(key, 0)
        b = rhs.get(key, 0)
        if a != b:
            out.append(
                {"p": frac_str(key[0]), "q": frac_str(key[1]), "lhs": a, "rhs": b}
            )
    return out


def verify_theorem1(model: BVModel) -> Report:
    """Exact bigraded equality of A(W, sigma G) and B(W^T, sigma(G^T))."""
    a_space = build_state_space(model.poly, model.sigma_group, "A")
    mirror = model.mirror()
    b_space = build_state_space(mirror.poly, mirror.sigma_group, "B")
    lhs = poincare_table(a_space)
    rhs = poincare_table(b_space)
    mismatches = _table_mismatches(lhs, rhs)
    return Report(
        "theorem1",
        not mismatches,
        {"lhs_total": a_space.dim, "rhs_total": b_space.dim},
        mismatches,
    )
