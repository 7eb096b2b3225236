"""Finite diagonal symmetry groups in (Q/Z)^n.

Group elements are vectors of exact rationals canonicalized to [0, 1).
Enumeration-heavy paths (G^max via Smith normal form, dual-group filtering,
span closures) run on integer vectors over a common denominator.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction

from .polyring import (
    NotInvertible,
    Polynomial,
    WeightSystem,
    _head_aligned_rows,
    _int_det,
    exponent_matrix,
)


class GroupError(Exception):
    pass


class RankDeficient(GroupError):
    """Exponent matrix rank < variable count: G^max would be infinite."""


class NotSubgroup(GroupError):
    pass


class EnumerationCapExceeded(GroupError):
    pass


def _cap() -> int:
    return int(os.environ.get("LGMIRROR_MAX_GROUP", 10**6))


class GroupElement:
    """A diagonal symmetry (g_1, ..., g_n) with each g_i in [0, 1)."""

    __slots__ = ("components",)

    def __init__(self, components):
        self.components = tuple(Fraction(c) % 1 for c in components)

    @classmethod
    def identity(cls, n: int) -> "GroupElement":
        return cls([Fraction(0)] * n)

    @property
    def n(self) -> int:
        return len(self.components)

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(a + b for a, b in zip(self.components, other.components))

    def __neg__(self) -> "GroupElement":
        return GroupElement(-c for c in self.components)

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __mul__(self, k: int) -> "GroupElement":
        return GroupElement(c * k for c in self.components)

    __rmul__ = __mul__

    def is_identity(self) -> bool:
        return all(c == 0 for c in self.components)

    def order(self) -> int:
        return math.lcm(*(c.denominator for c in self.components))

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __lt__(self, other):
        return self.components < other.components

    def __str__(self):
        return ",".join(str(c) for c in self.components)

    def __repr__(self):
        return f"GroupElement({self})"


def age(g: GroupElement) -> Fraction:
    """Sum of the [0, 1) representatives."""
    return sum(g.components, Fraction(0))


def fixed_indices(g: GroupElement):
    """Indices of coordinates fixed by g (component zero)."""
    return tuple(i for i, c in enumerate(g.components) if c == 0)


def j_element(ws: WeightSystem) -> GroupElement:
    """Exponential grading operator (q_1, ..., q_n)."""
    return GroupElement(ws.q)


def parse_group_elements(text: str, n: int):
    """Parse `1/2,1/3,1/6;0,1/3,1/3` into group elements of length n."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != n:
            raise GroupError(f"expected {n} components, got {len(parts)} in {chunk!r}")
        out.append(GroupElement(Fraction(p) for p in parts))
    return out


class SymmetryGroup:
    """Finitely enumerated subgroup of (Q/Z)^n, immutable after construction."""

    __slots__ = ("n", "elements", "element_set", "gens", "_int_cache")

    def __init__(self, n, elements, gens):
        self.n = n
        self.elements = tuple(sorted(elements))
        self.element_set = frozenset(self.elements)
        self.gens = tuple(gens)
        self._int_cache = None

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g: GroupElement) -> bool:
        return g in self.element_set

    def is_subgroup_of(self, other: "SymmetryGroup") -> bool:
        return self.element_set <= other.element_set

    def identity(self) -> GroupElement:
        return GroupElement.identity(self.n)

    def denominator(self) -> int:
        return math.lcm(*(c.denominator for g in self.gens for c in g.components), 1)

    def int_elements(self):
        """(L, list of integer tuples g*L) cached; used by hot filters."""
        if self._int_cache is None:
            L = math.lcm(
                *(c.denominator for g in self.elements for c in g.components), 1
            )
            vecs = [tuple(int(c * L) for c in g.components) for g in self.elements]
            self._int_cache = (L, vecs)
        return self._int_cache

    def __repr__(self):
        return f"SymmetryGroup(n={self.n}, order={self.order})"


def _close_int(seed_vecs, gen_vecs, L, n, cap):
    """BFS closure of seed under addition of gens, all mod L (integer tuples)."""
    seen = set(seed_vecs)
    frontier = list(seed_vecs)
    while frontier:
        new = []
        for e in frontier:
            for g in gen_vecs:
                f = tuple((a + b) % L for a, b in zip(e, g))
                if f not in seen:
                    seen.add(f)
                    new.append(f)
                    if len(seen) > cap:
                        raise EnumerationCapExceeded(
                            f"group enumeration exceeded cap {cap}"
                        )
        frontier = new
    return seen


def span(n: int, gens, cap: int | None = None) -> SymmetryGroup:
    """Smallest subgroup of (Q/Z)^n containing the generators (BFS closure)."""
    gens = [g for g in gens if not g.is_identity()]
    if cap is None:
        cap = _cap()
    if not gens:
        return SymmetryGroup(n, [GroupElement.identity(n)], [])
    L = math.lcm(*(c.denominator for g in gens for c in g.components))
    gen_vecs = [tuple(int(c * L) for c in g.components) for g in gens]
    zero = tuple([0] * n)
    seen = _close_int([zero], gen_vecs, L, n, cap)
    elements = [GroupElement(Fraction(v, L) for v in vec) for vec in seen]
    return SymmetryGroup(n, elements, gens)


def group_from_elements(n: int, elements) -> SymmetryGroup:
    """Wrap an already-closed element set (closure is the caller's contract)."""
    elements = sorted(set(elements))
    gens = minimal_generators(n, elements)
    return SymmetryGroup(n, elements, gens)


def minimal_generators(n: int, elements):
    """Greedy small generating set: add elements not yet spanned, in order."""
    elements = sorted(elements)
    if len(elements) <= 1:
        return []
    L = math.lcm(*(c.denominator for g in elements for c in g.components))
    vec_of = {g: tuple(int(c * L) for c in g.components) for g in elements}
    zero = tuple([0] * n)
    spanned = {zero}
    gens = []
    for g in elements:
        v = vec_of[g]
        if v in spanned:
            continue
        gens.append(g)
        # abelian: new span = old span + multiples of v
        shifts = []
        acc = v
        while acc not in spanned:
            shifts.append(acc)
            acc = tuple((a + b) % L for a, b in zip(acc, v))
        spanned |= {
            tuple((s + t) % L for s, t in zip(base, shift))
            for base in list(spanned)
            for shift in shifts
        }
        if len(spanned) == len(elements):
            break
    return gens


def smith_normal_form(matrix):
    """U*A*V = D with U, V unimodular; returns (diagonal of D, V).

    Only V is tracked (row operations do not affect it).
    """
    a = [row[:] for row in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def col_op_sub(j, k, q):  # col_j -= q * col_k
        for i in range(m):
            a[i][j] -= q * a[i][k]
        for i in range(n):
            v[i][j] -= q * v[i][k]

    def col_swap(j, k):
        for i in range(m):
            a[i][j], a[i][k] = a[i][k], a[i][j]
        for i in range(n):
            v[i][j], v[i][k] = v[i][k], v[i][j]

    t = 0
    while t < min(m, n):
        # locate a minimal nonzero pivot in the trailing block
        pivot = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < best):
                    best = abs(a[i][j])
                    pivot = (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        if pi != t:
            a[t], a[pi] = a[pi], a[t]
        if pj != t:
            col_swap(t, pj)
        if a[t][t] < 0:
            for j in range(n):
                a[t][j] = -a[t][j]
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, m):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    for j in range(n):
                        a[i][j] -= q * a[t][j]
                    if a[i][t] != 0:  # remainder smaller than pivot: swap up
                        a[t], a[i] = a[i], a[t]
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    col_op_sub(j, t, q)
                    if a[t][j] != 0:
                        col_swap(t, j)
                        dirty = True
            if a[t][t] < 0:
                for j in range(n):
                    a[t][j] = -a[t][j]
        # divisibility: every entry of the trailing block divisible by pivot
        fix = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if a[i][j] % a[t][t]:
                    fix = i
                    break
            if fix is not None:
                break
        if fix is not None:
            for j in range(n):
                a[t][j] += a[fix][j]
            continue  # redo this pivot
        t += 1
    diag = [a[i][i] for i in range(min(m, n))]
    return diag, v


_GMAX_CACHE: dict = {}
_GMAX_RAW_CACHE: dict = {}


def _gmax_raw(poly: Polynomial):
    """(L, element int-vectors mod L, generator int-vectors) for Gmax(W).

    Integer-level enumeration via Smith normal form, memoized; Fractions are
    only materialized by the callers that need them.
    """
    cached = _GMAX_RAW_CACHE.get(poly)
    if cached is not None:
        return cached
    rows = exponent_matrix(poly)
    n = poly.nvars
    diag, v = smith_normal_form(rows)
    if len(diag) < n or any(d == 0 for d in diag):
        raise RankDeficient(f"exponent matrix of {poly} has rank < {n}")
    order = 1
    for d in diag:
        order *= d
    if order > _cap():
        raise EnumerationCapExceeded(
            f"|Gmax| = {order} exceeds cap {_cap()} (set LGMIRROR_MAX_GROUP)"
        )
    L = math.lcm(*diag)
    gen_vecs = []
    for i in range(n):
        if diag[i] == 1:
            continue
        step = L // diag[i]
        gen_vecs.append((diag[i], tuple((v[j][i] * step) % L for j in range(n))))
    # direct-product enumeration: each SNF generator contributes Z/d_i
    elems = [tuple([0] * n)]
    for d, vec in gen_vecs:
        layer = []
        shift = tuple([0] * n)
        shifts = []
        for _ in range(d):
            shifts.append(shift)
            shift = tuple((a + b) % L for a, b in zip(shift, vec))
        for base in elems:
            for s in shifts:
                layer.append(tuple((a + b) % L for a, b in zip(base, s)))
        elems = layer
    unique = set(elems)
    if len(unique) != order:
        raise GroupError(f"SNF enumeration produced {len(unique)} != {order}")
    out = (L, sorted(unique), [vec for _, vec in gen_vecs])
    _GMAX_RAW_CACHE[poly] = out
    return out


def gmax(poly: Polynomial) -> SymmetryGroup:
    """Maximal diagonal symmetry group {g : A_W g integral} via SNF.

    Requires the exponent matrix to have full column rank; the result is
    memoized per polynomial.
    """
    cached = _GMAX_CACHE.get(poly)
    if cached is not None:
        return cached
    L, vecs, gen_vecs = _gmax_raw(poly)
    elements = [GroupElement(Fraction(c, L) for c in vec) for vec in vecs]
    gens = [GroupElement(Fraction(c, L) for c in vec) for vec in gen_vecs]
    group = SymmetryGroup(poly.nvars, elements, gens)
    _GMAX_CACHE[poly] = group
    return group


def element_in_gmax(poly: Polynomial, g: GroupElement) -> bool:
    """Direct definition check: every monomial has integral g-weight."""
    for m in poly.terms:
        w = sum(Fraction(e) * c for e, c in zip(m, g.components))
        if w % 1 != 0:
            return False
    return True


def sl_subgroup(group: SymmetryGroup) -> SymmetryGroup:
    """Elements of integral age (the SL subgroup)."""
    return group_from_elements(
        group.n, [g for g in group.elements if age(g).denominator == 1]
    )


def is_a_admissible(group: SymmetryGroup, ws: WeightSystem) -> bool:
    return j_element(ws) in group


def is_b_admissible(group: SymmetryGroup) -> bool:
    return all(age(g).denominator == 1 for g in group.elements)


def transpose_group(group: SymmetryGroup, poly: Polynomial) -> SymmetryGroup:
    """Dual group {g in Gmax(W^T) : g A_W h integral for all h in G}.

    Implemented as a filter over the enumeration of Gmax(W^T); the pairing
    uses the head-aligned square exponent matrix.
    """
    from .polyring import transpose  # local: avoids cycle at import time

    rows = exponent_matrix(poly)
    if len(rows) != poly.nvars or _int_det(rows) == 0:
        raise NotInvertible(f"{poly} is not invertible")
    aligned = _head_aligned_rows(poly, rows)
    for h in group.gens:
        if not element_in_gmax(poly, h):
            raise NotSubgroup(f"{h} is not a symmetry of {poly}")
    L, vecs, _ = _gmax_raw(transpose(poly))
    constraints = []
    for h in group.gens:
        c = [sum(Fraction(aligned[i][j]) * h.components[j] for j in range(poly.nvars))
             for i in range(poly.nvars)]
        D = math.lcm(*(x.denominator for x in c), 1)
        constraints.append(([int(x * D) for x in c], L * D))
    kept = []
    for vec in vecs:
        ok = True
        for cnum, modulus in constraints:
            if sum(a * b for a, b in zip(vec, cnum)) % modulus:
                ok = False
                break
        if ok:
            kept.append(GroupElement(Fraction(c, L) for c in vec))
    return group_from_elements(group.n, kept)


class CosetDecomposition:
    """Coset representatives of H in G, each the minimal element of its coset."""

    __slots__ = ("group", "subgroup", "representatives")

    def __init__(self, group, subgroup, representatives):
        self.group = group
        self.subgroup = subgroup
        self.representatives = tuple(representatives)

    def __len__(self):
        return len(self.representatives)


def cosets(group: SymmetryGroup, subgroup: SymmetryGroup) -> CosetDecomposition:
    if not subgroup.is_subgroup_of(group):
        raise NotSubgroup("H is not contained in G")
    seen = set()
    reps = []
    for g in group.elements:  # sorted, so reps are coset minima
        if g in seen:
            continue
        reps.append(g)
        for h in subgroup.elements:
            seen.add(g + h)
    return CosetDecomposition(group, subgroup, reps)


def bv_cosets(sigma_group: SymmetryGroup, j_group: SymmetryGroup, slots, sigma) -> CosetDecomposition:
    """Cosets of J in sigma*G, normalized so the first M representatives fix
    both distinguished coordinates and the last M are sigma times the first."""
    base = cosets(sigma_group, j_group)
    i0, j0 = slots
    by_key = {}
    for rep in base.representatives:
        coset = sorted(rep + h for h in j_group.elements)
        key = coset[0]
        by_key[key] = coset
    paired = set()
    first = []
    for key in sorted(by_key):
        if key in paired:
            continue
        coset = by_key[key]
        zero_slot = [e for e in coset if e.components[i0] == 0 and e.components[j0] == 0]
        if not zero_slot:
            raise GroupError("coset without a representative fixing the distinguished slots")
        rep = min(zero_slot)
        partner_key = min(sigma + e for e in coset)
        if partner_key == key:
            raise GroupError("sigma stabilizes a J-coset")
        first.append(rep)
        paired.add(key)
        paired.add(partner_key)
    second = [sigma + r for r in first]
    if 2 * len(first) != len(base.representatives):
        raise GroupError("sigma pairing did not halve the cosets")
    return CosetDecomposition(sigma_group, j_group, first + second)
