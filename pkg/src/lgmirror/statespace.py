"""A- and B-model state spaces: sector-by-sector bases and bigraded tables.

A basis element is a sector group element g together with a standard monomial
of the Milnor ring of W restricted to Fix(g); the volume form over the fixed
coordinates is implicit.  Invariance under the acting group is checked on
generators with integer arithmetic.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .milnor import MilnorRing, milnor_ring
from .polyring import Polynomial, WeightSystem, weight_system
from .symmetry import (
    GroupElement,
    SymmetryGroup,
    age,
    fixed_indices,
    is_b_admissible,
    j_element,
)


class NotAdmissible(Exception):
    pass


# default worker count for sector sweeps; the CLI --jobs flag sets this
DEFAULT_JOBS = 1


class SectorElement:
    """<m; g> with flavor tag; the form over Fix(g) is implicit."""

    __slots__ = ("sector", "monomial", "flavor")

    def __init__(self, sector: GroupElement, monomial, flavor: str):
        self.sector = sector
        self.monomial = tuple(monomial)
        self.flavor = flavor

    def fixed(self):
        return fixed_indices(self.sector)

    def __eq__(self, other):
        return (
            isinstance(other, SectorElement)
            and self.sector == other.sector
            and self.monomial == other.monomial
            and self.flavor == other.flavor
        )

    def __hash__(self):
        return hash((self.sector, self.monomial, self.flavor))

    def __lt__(self, other):
        return (self.sector, self.monomial) < (other.sector, other.monomial)

    def __repr__(self):
        return f"<{self.monomial}; {self.sector}>{self.flavor}"


def action_weight(h: GroupElement, e: SectorElement) -> Fraction:
    """Weight of h on m * omega_g: sum over fixed j of (a_j + 1) h_j mod 1."""
    total = Fraction(0)
    for j in fixed_indices(e.sector):
        total += (e.monomial[j] + 1) * h.components[j]
    return total % 1


class StateSpace:
    __slots__ = (
        "poly",
        "ws",
        "group",
        "flavor",
        "age_j",
        "basis",
        "basis_set",
        "rings",
        "sector_dims",
    )

    def __init__(self, poly, ws, group, flavor, age_j, basis, rings, sector_dims=None):
        self.poly = poly
        self.ws = ws
        self.group = group
        self.flavor = flavor
        self.age_j = age_j
        self.basis = tuple(basis)
        self.basis_set = frozenset(self.basis)
        self.rings = rings
        # every sector is recorded, empty ones with dimension 0
        self.sector_dims = dict(sector_dims or {})

    @property
    def dim(self) -> int:
        return len(self.basis)

    def ring(self, e: SectorElement) -> MilnorRing:
        return self.rings[e.fixed()]

    def deg_m(self, e: SectorElement) -> Fraction:
        q = self.ws.q
        fixed = fixed_indices(e.sector)
        return sum((e.monomial[j] * q[j] for j in fixed), Fraction(0)) + sum(
            (q[j] for j in fixed), Fraction(0)
        )

    def bidegree(self, e: SectorElement):
        if e.flavor == "A":
            return a_bidegree(e, self.ws, self.age_j)
        return b_bidegree(e, self.ws, self.age_j)

    def contains(self, e: SectorElement) -> bool:
        return e in self.basis_set


def _deg_m(e: SectorElement, ws: WeightSystem) -> Fraction:
    q = ws.q
    fixed = fixed_indices(e.sector)
    return sum((e.monomial[j] * q[j] for j in fixed), Fraction(0)) + sum(
        (q[j] for j in fixed), Fraction(0)
    )


def a_bidegree(e: SectorElement, ws: WeightSystem, age_j: Fraction):
    """(deg m + age g - age j, N_g - deg m + age g - age j); deg m counts the
    volume-form weights."""
    dm = _deg_m(e, ws)
    a = age(e.sector)
    ng = len(fixed_indices(e.sector))
    return (dm + a - age_j, ng - dm + a - age_j)


def b_bidegree(e: SectorElement, ws: WeightSystem, age_j: Fraction):
    """(deg m + age g - age j, deg m + age g^{-1} - age j)."""
    dm = _deg_m(e, ws)
    return (dm + age(e.sector) - age_j, dm + age(-e.sector) - age_j)


def _ring_task(args):
    poly, active, ws = args
    return active, milnor_ring(poly, active=active, ws=ws)


def build_sector(
    poly: Polynomial,
    group: SymmetryGroup,
    g: GroupElement,
    flavor: str,
    ws: WeightSystem,
    rings: dict,
):
    """Invariant standard monomials of Milnor(W_g), as sector elements."""
    fixed = fixed_indices(g)
    ring = rings.get(fixed)
    if ring is None:
        ring = milnor_ring(poly, active=fixed, ws=ws)
        rings[fixed] = ring
    gens = group.gens
    if not gens:
        return [SectorElement(g, m, flavor) for m in ring.basis]
    L = math.lcm(*(c.denominator for h in gens for c in h.components), 1)
    gen_vecs = [tuple(int(c * L) for c in h.components) for h in gens]
    kept = []
    for m in ring.basis:
        ok = True
        for hv in gen_vecs:
            total = 0
            for j in fixed:
                total += (m[j] + 1) * hv[j]
            if total % L:
                ok = False
                break
        if ok:
            kept.append(SectorElement(g, m, flavor))
    return kept


def build_state_space(
    poly: Polynomial,
    group: SymmetryGroup,
    flavor: str,
    ws: WeightSystem | None = None,
    rings: dict | None = None,
    jobs: int | None = None,
) -> StateSpace:
    """Sweep all sectors of (W, G); raises NotAdmissible on a flavor mismatch."""
    if jobs is None:
        jobs = DEFAULT_JOBS
    if flavor not in ("A", "B"):
        raise ValueError(f"unknown flavor {flavor!r}")
    if ws is None:
        ws = weight_system(poly)
    if group.n != poly.nvars:
        raise NotAdmissible("group length does not match variable count")
    if flavor == "A" and j_element(ws) not in group:
        raise NotAdmissible("A-model requires the exponential grading operator in G")
    if flavor == "B" and not is_b_admissible(group):
        raise NotAdmissible("B-model requires G inside SL (integral ages)")
    age_j = sum(ws.q, Fraction(0))
    if rings is None:
        rings = {}
    subsets = sorted({fixed_indices(g) for g in group.elements})
    missing = [s for s in subsets if s not in rings]
    if jobs > 1 and len(missing) > 1:
        tasks = [(poly, s, ws) for s in missing]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for active, ring in pool.map(_ring_task, tasks):
                rings[active] = ring
    basis = []
    sector_dims = {}
    for g in group.elements:
        got = build_sector(poly, group, g, flavor, ws, rings)
        sector_dims[g] = len(got)
        basis.extend(got)
    return StateSpace(poly, ws, group, flavor, age_j, basis, rings, sector_dims)


def poincare_table(space: StateSpace) -> dict:
    """Map (p, q) -> dimension over exact rationals."""
    table: dict = {}
    for e in space.basis:
        key = space.bidegree(e)
        table[key] = table.get(key, 0) + 1
    return table


def krawitz_dimension_check(poly: Polynomial, group: SymmetryGroup):
    """Bigraded tables of A(W, G) and B(W^T, G^T) agree for invertible W.

    Returns (checked, lhs_table, rhs_table); a chain summand of weight 1/2 is
    outside the supported range, so the check is skipped with a warning and
    checked=False.
    """
    import warnings

    from .polyring import has_half_weight_chain, transpose
    from .symmetry import transpose_group

    ws = weight_system(poly)
    if has_half_weight_chain(poly, ws):
        warnings.warn(
            f"{poly} has a chain variable of weight 1/2; the bigraded "
            "dimension comparison is not guaranteed there",
            stacklevel=2,
        )
        return False, {}, {}
    a_space = build_state_space(poly, group, "A", ws=ws)
    dual = transpose_group(group, poly)
    b_space = build_state_space(transpose(poly), dual, "B")
    return True, poincare_table(a_space), poincare_table(b_space)


def frac_str(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def table_to_json(table: dict, flavor: str, extra: dict | None = None) -> dict:
    entries = [
        {"p": frac_str(p), "q": frac_str(q), "dim": d}
        for (p, q), d in sorted(table.items())
    ]
    out = {"flavor": flavor, "total": sum(table.values()), "entries": entries}
    if extra:
        out.update(extra)
    return out
