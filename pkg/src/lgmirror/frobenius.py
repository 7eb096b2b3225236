"""B-model Frobenius structure on even subspaces: gamma structure constants,
residue pairings, the rescaling map between the two mirror B-models, and the
Frobenius-isomorphism verifier.

Products follow the convention <m;g> * <n;h> = gamma_{g,h} nf(mn) <1;gh>,
with mn carried into the Milnor ring of W restricted to Fix(gh) (monomials
whose support leaves the fixed locus map to zero).
"""

from __future__ import annotations

from fractions import Fraction

from .bvlg import BVModel
from .milnor import MilnorRing, hessian, milnor_ring, residue_pairing
from .polyring import Polynomial, atomic_decomposition, restrict, transpose
from .report import Report
from .statespace import (
    SectorElement,
    StateSpace,
    build_state_space,
)
from .symmetry import GroupElement, fixed_indices, transpose_group


class FrobeniusError(Exception):
    pass


class NonProportional(FrobeniusError):
    """The two Hessian normal forms are not scalar multiples of the socle."""


class MixedSpaces(FrobeniusError):
    pass


class OddElement(FrobeniusError):
    pass


class NotBasisElement(FrobeniusError):
    pass


def z2_grading(e: SectorElement, nvars: int) -> int:
    """A-model: N_g mod 2; B-model: N - N_g mod 2."""
    ng = len(fixed_indices(e.sector))
    if e.flavor == "A":
        return ng % 2
    return (nvars - ng) % 2


def even_basis(space: StateSpace):
    return tuple(e for e in space.basis if z2_grading(e, space.poly.nvars) == 0)


class AlgebraElement:
    """Finitely supported rational combination of one space's basis elements."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space: StateSpace, coeffs=None):
        self.space = space
        self.coeffs = {}
        for e, c in (coeffs or {}).items():
            c = Fraction(c)
            if c:
                self.coeffs[e] = c

    @classmethod
    def basis(cls, space, e, coeff=1):
        return cls(space, {e: Fraction(coeff)})

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        if self.space is not other.space:
            raise MixedSpaces("cannot add elements of different state spaces")
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
        return AlgebraElement(self.space, out)

    def scale(self, c) -> "AlgebraElement":
        c = Fraction(c)
        return AlgebraElement(self.space, {e: c * v for e, v in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraElement)
            and self.space is other.space
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*{e!r}" for e, c in sorted(self.coeffs.items(), key=lambda t: t[0]))


class BAlgebra:
    """Krawitz product and residue pairing on one B-model state space."""

    def __init__(self, space: StateSpace):
        if space.flavor != "B":
            raise MixedSpaces("Frobenius structure is built on B-model spaces")
        self.space = space
        self.poly = space.poly
        self.nvars = space.poly.nvars
        self.rings = space.rings  # shared subset-keyed Milnor cache
        self._hessians: dict = {}
        self._gamma: dict = {}
        self._products: dict = {}

    def ring(self, subset) -> MilnorRing:
        subset = tuple(sorted(subset))
        ring = self.rings.get(subset)
        if ring is None:
            ring = milnor_ring(self.poly, active=subset, ws=self.space.ws)
            self.rings[subset] = ring
        return ring

    def _hessian(self, subset) -> Polynomial:
        subset = tuple(sorted(subset))
        h = self._hessians.get(subset)
        if h is None:
            h = hessian(restrict(self.poly, subset), subset)
            self._hessians[subset] = h
        return h

    def _gamma_data(self, g: GroupElement, h: GroupElement):
        """Solve gamma * Hess(W_{g n h}) / mu_{g n h} = Hess(W_{gh}) / mu_{gh}.

        Fix(gh) contains Fix(g) n Fix(h); the defining relation is solved by
        the class Hess(W_extra) / mu_extra on the complementary block, whose
        normal form is (scalar) * (socle of the extra ring).  Returns
        (scalar, extra socle monomial), or (0, None) when the index condition
        I_g u I_h u I_gh = everything fails.  Requires W_{gh} to split as
        W_{g n h} + W_extra (guaranteed under the all-or-nothing property);
        raises NonProportional otherwise.
        """
        key = (g, h)
        hit = self._gamma.get(key)
        if hit is not None:
            return hit
        ig = set(fixed_indices(g))
        ih = set(fixed_indices(h))
        igh = set(fixed_indices(g + h))
        if ig | ih | igh != set(range(self.nvars)):
            self._gamma[key] = (Fraction(0), None)
            return self._gamma[key]
        meet = ig & ih
        extra = tuple(sorted(igh - meet))
        whole = restrict(self.poly, igh)
        split = restrict(self.poly, meet) + restrict(self.poly, extra)
        if whole != split:
            raise NonProportional(
                f"W restricted to {sorted(igh)} has cross terms between "
                f"{sorted(meet)} and {list(extra)}"
            )
        ring_extra = self.ring(extra)
        scalar = ring_extra.hessian_socle_coefficient() / ring_extra.mu
        self._gamma[key] = (scalar, ring_extra.socle)
        return self._gamma[key]

    def gamma(self, g: GroupElement, h: GroupElement) -> Fraction:
        """Scalar coefficient of the structure class (on the extra-block socle)."""
        return self._gamma_data(g, h)[0]

    def unit(self) -> AlgebraElement:
        e = SectorElement(
            GroupElement.identity(self.nvars), (0,) * self.nvars, "B"
        )
        if e not in self.space.basis_set:
            raise NotBasisElement("identity-sector unit missing from the basis")
        return AlgebraElement.basis(self.space, e)

    def _product_basis(self, e1: SectorElement, e2: SectorElement) -> AlgebraElement:
        key = (e1, e2)
        hit = self._products.get(key)
        if hit is not None:
            return hit
        for e in (e1, e2):
            if e not in self.space.basis_set:
                raise NotBasisElement(f"{e!r} is not a basis element")
            if z2_grading(e, self.nvars):
                raise OddElement("products are defined on the even subspace")
        g, h = e1.sector, e2.sector
        coeff, extra_socle = self._gamma_data(g, h)
        out = AlgebraElement(self.space)
        if coeff:
            gh = g + h
            igh = fixed_indices(gh)
            mono = tuple(
                a + b + s
                for a, b, s in zip(e1.monomial, e2.monomial, extra_socle)
            )
            if all(e == 0 or k in set(igh) for k, e in enumerate(mono)):
                ring = self.ring(igh)
                nf = ring.normal_form(Polynomial(self.poly.variables, {mono: 1}))
                terms = {}
                for b_mono, c in nf.terms.items():
                    target = SectorElement(gh, b_mono, "B")
                    if target not in self.space.basis_set:
                        raise NotBasisElement(
                            f"product lands outside the invariant basis: {target!r}"
                        )
                    terms[target] = coeff * c
                out = AlgebraElement(self.space, terms)
        self._products[key] = out
        return out

    def product(self, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
        if a.space is not self.space or b.space is not self.space:
            raise MixedSpaces("operands belong to a different state space")
        out = AlgebraElement(self.space)
        for e1, c1 in a.coeffs.items():
            for e2, c2 in b.coeffs.items():
                out = out + self._product_basis(e1, e2).scale(c1 * c2)
        return out

    def pairing_basis(self, e1: SectorElement, e2: SectorElement) -> Fraction:
        if e2.sector != -e1.sector:
            return Fraction(0)
        ring = self.ring(fixed_indices(e1.sector))
        m = Polynomial(self.poly.variables, {e1.monomial: 1})
        n = Polynomial(self.poly.variables, {e2.monomial: 1})
        return residue_pairing(m, n, ring)

    def pairing(self, a: AlgebraElement, b: AlgebraElement) -> Fraction:
        if a.space is not self.space or b.space is not self.space:
            raise MixedSpaces("operands belong to a different state space")
        total = Fraction(0)
        for e1, c1 in a.coeffs.items():
            for e2, c2 in b.coeffs.items():
                if e2.sector == -e1.sector:
                    total += c1 * c2 * self.pairing_basis(e1, e2)
        return total

    def export_gamma_csv(self, path, sectors=None):
        """Rows (g, h, gamma) over the given sectors (basis sectors by default)."""
        if sectors is None:
            sectors = sorted({e.sector for e in self.space.basis})
        lines = ["g,h,gamma"]
        for g in sectors:
            for h in sectors:
                lines.append(f"\"{g}\",\"{h}\",{self.gamma(g, h)}")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


def phi_map(
    e: SectorElement,
    bhk_space: StateSpace,
    bv_space: StateSpace,
    sigma: GroupElement,
    rescaled: bool = True,
):
    """Rescaling map B(W^T, (sigma G)^T) -> B(W^T, sigma (G^T)).

    Shared basis elements map to themselves; the others move to the sigma-
    shifted sector (the volume form toggles dx0+dy0) with factor 1/2 when g
    fixes the distinguished slots and 2 otherwise.
    """
    if e not in bhk_space.basis_set:
        raise NotBasisElement(f"{e!r} is not in the BHK-mirror basis")
    if e in bv_space.basis_set:
        return Fraction(1), e
    moved = SectorElement(sigma + e.sector, e.monomial, "B")
    if moved not in bv_space.basis_set:
        raise NotBasisElement(f"neither {e!r} nor its sigma-shift is in the BV basis")
    slots = [k for k, c in enumerate(sigma.components) if c != 0]
    fixes = all(e.sector.components[k] == 0 for k in slots)
    if not rescaled:
        return Fraction(1), moved
    return (Fraction(1, 2) if fixes else Fraction(2)), moved


def check_property1(poly: Polynomial, group, ws=None) -> Report:
    """All-or-nothing fixing of atomic blocks across the nonempty sectors of
    A(W, G) and B(W^T, G^T)."""
    blocks = atomic_decomposition(poly)
    violations = []

    def sweep(space: StateSpace, poly_blocks, side: str):
        seen = set()
        for e in space.basis:
            if e.sector in seen:
                continue
            seen.add(e.sector)
            fixed = set(fixed_indices(e.sector))
            for block in poly_blocks:
                inside = fixed & set(block.variables)
                if inside and inside != set(block.variables):
                    violations.append(
                        {
                            "side": side,
                            "sector": str(e.sector),
                            "block": str(block),
                            "fixed_in_block": sorted(inside),
                        }
                    )

    a_space = build_state_space(poly, group, "A", ws=ws)
    sweep(a_space, blocks, "A")
    dual = transpose_group(group, poly)
    mirror_poly = transpose(poly)
    b_space = build_state_space(mirror_poly, dual, "B")
    sweep(b_space, atomic_decomposition(mirror_poly), "B-mirror")
    return Report(
        "property1",
        not violations,
        {"blocks": [str(b) for b in blocks], "a_dim": a_space.dim, "b_dim": b_space.dim},
        violations,
    )


def _extend_phi(alg_from, alg_to, mapping):
    def apply(elt: AlgebraElement) -> AlgebraElement:
        out = AlgebraElement(alg_to.space)
        for e, c in elt.coeffs.items():
            k, image = mapping[e]
            out = out + AlgebraElement.basis(alg_to.space, image, k * c)
        return out

    return apply


def gamma_lemma_cases(algebra: BAlgebra, sigma: GroupElement, sectors):
    """Factor of gamma(g,h) against gamma(g, sigma h) per the slot pattern of
    (g, h): (1/2,1/2)x(1/2,1/2) -> 4, (1/2,1/2)x(0,0) -> 1/4, else 1."""
    slots = [k for k, c in enumerate(sigma.components) if c != 0]
    half = Fraction(1, 2)
    failures = []
    checked = 0
    for g in sectors:
        g_half = all(g.components[k] == half for k in slots)
        for h in sectors:
            h_half = all(h.components[k] == half for k in slots)
            h_zero = all(h.components[k] == 0 for k in slots)
            lhs = algebra.gamma(g, h)
            rhs = algebra.gamma(g, sigma + h)
            if g_half and h_half:
                factor = Fraction(4)
            elif g_half and h_zero:
                factor = Fraction(1, 4)
            else:
                factor = Fraction(1)
            checked += 1
            if lhs != factor * rhs:
                failures.append(
                    {
                        "g": str(g),
                        "h": str(h),
                        "gamma": str(lhs),
                        "gamma_sigma": str(rhs),
                        "expected_factor": str(factor),
                    }
                )
    return checked, failures


def verify_theorem2(model: BVModel, rescaled: bool = True) -> Report:
    """phi-bar preserves products and pairings between the even subspaces of
    the two mirror B-models; also checks unit, associativity, the Frobenius
    identity, and the gamma-factor lemma."""
    prop = check_property1(model.poly, model.sigma_group, ws=model.ws)
    if not prop.passed:
        return Report(
            "theorem2", False, {"hypothesis": "property1 failed"}, prop.mismatches
        )
    mirror = model.mirror()
    bhk_group = transpose_group(model.sigma_group, model.poly)
    shared_rings: dict = {}
    b2_space = build_state_space(mirror.poly, bhk_group, "B", rings=shared_rings)
    b0_space = build_state_space(mirror.poly, mirror.sigma_group, "B", rings=shared_rings)
    even2 = even_basis(b2_space)
    even0 = even_basis(b0_space)
    mismatches = []
    details = {
        "dim_b2_even": len(even2),
        "dim_b0_even": len(even0),
        "b2_total": b2_space.dim,
        "b0_total": b0_space.dim,
    }
    if len(even2) != len(even0):
        mismatches.append({"reason": "even subspace dimensions differ"})

    mapping = {}
    images = set()
    for e in even2:
        k, image = phi_map(e, b2_space, b0_space, mirror.sigma, rescaled=rescaled)
        mapping[e] = (k, image)
        if image in images:
            mismatches.append({"reason": "phi image duplicated", "element": repr(e)})
        images.add(image)
        if z2_grading(image, b0_space.poly.nvars):
            mismatches.append({"reason": "phi image is odd", "element": repr(e)})
        if b2_space.bidegree(e) != b0_space.bidegree(image):
            mismatches.append({"reason": "phi changed the bidegree", "element": repr(e)})
    if images != set(even0):
        mismatches.append({"reason": "phi is not onto the even BV basis"})

    alg2 = BAlgebra(b2_space)
    alg0 = BAlgebra(b0_space)
    phi = _extend_phi(alg2, alg0, mapping)

    product_fail = pairing_fail = 0
    for e1 in even2:
        a1 = AlgebraElement.basis(b2_space, e1)
        for e2 in even2:
            a2 = AlgebraElement.basis(b2_space, e2)
            lhs = phi(alg2.product(a1, a2))
            k1, im1 = mapping[e1]
            k2, im2 = mapping[e2]
            rhs = alg0.product(
                AlgebraElement.basis(b0_space, im1, k1),
                AlgebraElement.basis(b0_space, im2, k2),
            )
            if lhs != rhs:
                product_fail += 1
                if len(mismatches) < 20:
                    mismatches.append(
                        {"reason": "product not preserved", "pair": [repr(e1), repr(e2)]}
                    )
            lp = alg2.pairing(a1, a2)
            rp = alg0.pairing(
                AlgebraElement.basis(b0_space, im1, k1),
                AlgebraElement.basis(b0_space, im2, k2),
            )
            if lp != rp:
                pairing_fail += 1
                if len(mismatches) < 20:
                    mismatches.append(
                        {"reason": "pairing not preserved", "pair": [repr(e1), repr(e2)]}
                    )
    details["product_failures"] = product_fail
    details["pairing_failures"] = pairing_fail

    unit = alg0.unit()
    for e in even0:
        a = AlgebraElement.basis(b0_space, e)
        if alg0.product(unit, a) != a or alg0.product(a, unit) != a:
            mismatches.append({"reason": "unit fails", "element": repr(e)})

    assoc_fail = frob_fail = 0
    cache = {
        (e1, e2): alg0._product_basis(e1, e2) for e1 in even0 for e2 in even0
    }
    for e1 in even0:
        a = AlgebraElement.basis(b0_space, e1)
        for e2 in even0:
            ab = cache[(e1, e2)]
            b = AlgebraElement.basis(b0_space, e2)
            for e3 in even0:
                c = AlgebraElement.basis(b0_space, e3)
                bc = cache[(e2, e3)]
                if alg0.product(ab, c) != alg0.product(a, bc):
                    assoc_fail += 1
                if alg0.pairing(ab, c) != alg0.pairing(a, bc):
                    frob_fail += 1
    details["associativity_failures"] = assoc_fail
    details["frobenius_failures"] = frob_fail
    if assoc_fail:
        mismatches.append({"reason": f"{assoc_fail} associativity failures"})
    if frob_fail:
        mismatches.append({"reason": f"{frob_fail} Frobenius-identity failures"})

    sectors = sorted({e.sector for e in even0})
    checked, gamma_failures = gamma_lemma_cases(alg0, mirror.sigma, sectors)
    details["gamma_pairs_checked"] = checked
    if gamma_failures:
        mismatches.append({"reason": "gamma lemma failures", "cases": gamma_failures[:10]})

    return Report("theorem2", not mismatches, details, mismatches)
