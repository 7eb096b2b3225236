"""Chen-Ruan orbifold Hodge tables of [X_{W1} x X_{W2} / sigma G~].

The table is assembled from the coset decomposition of sigma*G: for each
representative and each pair of scaling angles with nontrivial fixed locus,
the summand is (ambient + primitive) x (ambient + primitive) cohomology of
the two restricted hypersurfaces, group invariants taken on the tensor
product, everything shifted by the tangent-space age of the sector.

Primitive pieces come from the graded dimensions of the Milnor ring
(monodromy-invariant Milnor-fiber cohomology); ambient pieces are the
(i, i) ladder of the ambient weighted projective space.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .bvlg import BVModel
from .milnor import milnor_ring
from .polyring import Polynomial, WeightSystem, restrict, weight_system
from .report import Report
from .statespace import build_state_space, frac_str, poincare_table
from .symmetry import GroupElement, bv_cosets, span

AMBIENT = "ambient"
PRIMITIVE = "primitive"


def lambda_set(components, ws: WeightSystem):
    """Rational angles t with w_k * t + g_k integral for some coordinate k."""
    out = set()
    for g_k, w in zip(components, ws.weights):
        for t in range(w):
            out.add((Fraction(t) - Fraction(g_k)) / w % 1)
    return tuple(sorted(out))


def scaled_element(components, theta: Fraction, ws: WeightSystem) -> GroupElement:
    """g composed with the scaling of angle theta (acting by theta * w_k)."""
    return GroupElement(
        Fraction(c) + theta * w for c, w in zip(components, ws.weights)
    )


def ambient_classes(dim: int):
    """One (i, i) class for i = 0..dim; empty when dim < 0."""
    return [(i, i) for i in range(dim + 1)]


def primitive_hodge(poly: Polynomial, active=None, ws: WeightSystem | None = None):
    """Primitive Hodge numbers of the degree-d hypersurface on the active
    coordinates: h^{D-q, q} = dim of the Milnor-ring graded piece whose
    monomial-plus-form weight is the integer q + 1 (Griffiths-Steenbrink)."""
    if ws is None:
        ws = weight_system(poly)
    if active is None:
        active = tuple(range(poly.nvars))
    active = tuple(sorted(active))
    table: dict = {}
    for p, q, _ in _primitive_classes(poly, active, ws):
        table[(p, q)] = table.get((p, q), 0) + 1
    return table


def _primitive_classes(poly: Polynomial, active, ws: WeightSystem):
    """(p, q, monomial) for each primitive class of the restricted hypersurface."""
    d = ws.degree
    dim = len(active) - 2
    if dim < 0:
        return []
    ring = milnor_ring(poly, active=active, ws=ws)
    form_weight = sum(ws.weights[k] for k in active)
    out = []
    for m in ring.basis:
        total = ring.wdeg(m) + form_weight
        if total % d:
            continue
        q = total // d - 1
        if not 0 <= q <= dim:
            raise ValueError(
                f"Griffiths-Steenbrink grade {q} outside 0..{dim} for {poly}"
            )
        out.append((dim - q, q, m))
    return out


def _block_classes(poly: Polynomial, fixed, ws: WeightSystem):
    """Cohomology classes of X_{W | fixed}: list of (p, q, kind, monomial)."""
    fixed = tuple(sorted(fixed))
    if not fixed:
        return []
    restricted = restrict(poly, fixed)
    if restricted.is_zero():
        # the polynomial vanishes on the fixed locus: ambient cohomology of
        # the weighted projective space of dimension |fixed| - 1
        return [(i, i, AMBIENT, None) for i, _ in ambient_classes(len(fixed) - 1)]
    dim = len(fixed) - 2
    if dim < 0:
        return []  # z^a = 0 inside a weighted point: empty hypersurface
    classes = [(i, i, AMBIENT, None) for i, _ in ambient_classes(dim)]
    classes.extend(
        (p, q, PRIMITIVE, m) for p, q, m in _primitive_classes(poly, fixed, ws)
    )
    return classes


def age_shift(s1: GroupElement, s2: GroupElement, theta1, theta2, d1: int, d2: int) -> Fraction:
    """Tangent-space age: ambient age of (s1, s2) minus the angles by which the
    two defining polynomials are scaled (one normal direction per factor)."""
    total = sum(s1.components, Fraction(0)) + sum(s2.components, Fraction(0))
    total -= (d1 * Fraction(theta1)) % 1
    total -= (d2 * Fraction(theta2)) % 1
    return total


class CRTable:
    __slots__ = ("table", "sectors")

    def __init__(self, table, sectors):
        self.table = dict(table)
        self.sectors = list(sectors)

    @property
    def total(self) -> int:
        return sum(self.table.values())

    def to_json(self) -> dict:
        entries = [
            {"p": frac_str(p), "q": frac_str(q), "dim": d}
            for (p, q), d in sorted(self.table.items())
        ]
        return {
            "flavor": "CR",
            "total": self.total,
            "entries": entries,
            "sectors": self.sectors,
        }


def cr_table(model: BVModel) -> CRTable:
    """Bigraded Chen-Ruan table of the model's orbifold, with provenance."""
    n1 = model.n1
    j_group = span(model.poly.nvars, [model.j1, model.j2])
    decomposition = bv_cosets(model.sigma_group, j_group, model.slots, model.sigma)
    gens = model.sigma_group.gens
    L = math.lcm(*(c.denominator for h in gens for c in h.components), 1)
    gen_blocks1 = [tuple(int(c * L) for c in h.components[:n1]) for h in gens]
    gen_blocks2 = [tuple(int(c * L) for c in h.components[n1:]) for h in gens]

    cls_cache: dict = {}

    def classes_with_weights(block: int, fixed):
        key = (block, fixed)
        hit = cls_cache.get(key)
        if hit is not None:
            return hit
        poly = model.w1 if block == 1 else model.w2
        ws = model.ws1 if block == 1 else model.ws2
        gen_blocks = gen_blocks1 if block == 1 else gen_blocks2
        out = []
        for p, q, kind, mono in _block_classes(poly, fixed, ws):
            if kind == AMBIENT:
                sig = (0,) * len(gens)
            else:
                sig = tuple(
                    sum((mono[k] + 1) * h[k] for k in fixed) % L for h in gen_blocks
                )
            out.append((p, q, kind, sig))
        cls_cache[key] = out
        return out

    table: dict = {}
    sectors = []
    for rep in decomposition.representatives:
        g1 = rep.components[:n1]
        g2 = rep.components[n1:]
        for theta1 in lambda_set(g1, model.ws1):
            s1 = scaled_element(g1, theta1, model.ws1)
            fixed1 = tuple(i for i, c in enumerate(s1.components) if c == 0)
            cls1 = classes_with_weights(1, fixed1)
            if not cls1:
                continue
            for theta2 in lambda_set(g2, model.ws2):
                s2 = scaled_element(g2, theta2, model.ws2)
                fixed2 = tuple(i for i, c in enumerate(s2.components) if c == 0)
                cls2 = classes_with_weights(2, fixed2)
                if not cls2:
                    continue
                shift = age_shift(
                    s1, s2, theta1, theta2, model.ws1.degree, model.ws2.degree
                )
                buckets: dict = {}
                for p2, q2, kind2, sig2 in cls2:
                    buckets.setdefault(sig2, []).append((p2, q2, kind2))
                count = 0
                tags = set()
                for p1, q1, kind1, sig1 in cls1:
                    want = tuple((-s) % L for s in sig1)
                    for p2, q2, kind2 in buckets.get(want, ()):
                        key = (p1 + p2 + shift, q1 + q2 + shift)
                        table[key] = table.get(key, 0) + 1
                        count += 1
                        tags.add(f"{kind1}*{kind2}")
                if count:
                    sectors.append(
                        {
                            "rep": str(rep),
                            "lambda1": frac_str(theta1),
                            "lambda2": frac_str(theta2),
                            "age": frac_str(shift),
                            "dim": count,
                            "tags": sorted(tags),
                        }
                    )
    return CRTable(table, sectors)


def hodge_diamond(poly: Polynomial, ws: WeightSystem | None = None):
    """Hodge table of the single quasismooth hypersurface X_W (no quotient):
    ambient (i, i) ladder plus the Griffiths-Steenbrink primitive part."""
    if ws is None:
        ws = weight_system(poly)
    table: dict = {}
    for p, q, kind, _ in _block_classes(poly, tuple(range(poly.nvars)), ws):
        key = (Fraction(p), Fraction(q))
        table[key] = table.get(key, 0) + 1
    return table


def verify_lgcy(model: BVModel) -> Report:
    """State-space isomorphism: the CR table equals the A-model table."""
    cr = cr_table(model)
    a_space = build_state_space(model.poly, model.sigma_group, "A")
    a_table = poincare_table(a_space)
    mismatches = _diff_tables(cr.table, a_table, "cr", "fjrw")
    return Report(
        "lgcy",
        not mismatches,
        {"cr_total": cr.total, "fjrw_total": a_space.dim},
        mismatches,
    )


def verify_bv_mirror(model: BVModel) -> Report:
    """Hodge-diamond rotation: CR^{p,q}(M) = CR^{N-p,q}(mirror), N = n+m-2."""
    n = model.n1 + model.n2 - 4
    cr = cr_table(model)
    mirror_cr = cr_table(model.mirror())
    rotated = {(n - p, q): d for (p, q), d in mirror_cr.table.items()}
    mismatches = _diff_tables(cr.table, rotated, "cr", "rotated_mirror")
    return Report(
        "bvms",
        not mismatches,
        {"N": n, "lhs_total": cr.total, "rhs_total": mirror_cr.total},
        mismatches,
    )


def verify_twist_corollary(model: BVModel, tw_group_override=None) -> Report:
    """CR table of the model equals the table of the twist hypersurface,
    computed through the LG route A(tw W, tw G)."""
    cr = cr_table(model)
    tw = model.twist()
    group = tw_group_override if tw_group_override is not None else tw.group
    tw_space = build_state_space(tw.poly, group, "A")
    tw_table = poincare_table(tw_space)
    mismatches = _diff_tables(cr.table, tw_table, "cr", "twist_lg")
    return Report(
        "twist-corollary",
        not mismatches,
        {"cr_total": cr.total, "twist_total": tw_space.dim},
        mismatches,
    )


def _diff_tables(lhs: dict, rhs: dict, lname: str, rname: str):
    out = []
    for key in sorted(set(lhs) | set(rhs)):
        a = lhs.get(key, 0)
        b = rhs.get(key, 0)
        if a != b:
            out.append(
                {"p": frac_str(key[0]), "q": frac_str(key[1]), lname: a, rname: b}
            )
    return out
