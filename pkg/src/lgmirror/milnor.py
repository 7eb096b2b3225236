"""Milnor rings over exact rationals: Buchberger kernel, normal forms,
Hessians, and the residue pairing.

Everything is computed with `fractions.Fraction`; term orders are weighted
degree + reverse lexicographic, which respects the quasihomogeneous grading.
"""

from __future__ import annotations

from fractions import Fraction

from .polyring import (
    Polynomial,
    PolyError,
    WeightSystem,
    restrict,
    weight_system,
)


class MilnorError(Exception):
    pass


class DegenerateSingularity(MilnorError):
    """The Jacobian ideal is not zero-dimensional on the active variables."""


class DegenerateHessian(MilnorError):
    """Normal form of the Hessian has no socle component."""


class TermOrder:
    """Weighted-degrevlex: weighted degree first, then reverse lexicographic
    with ties broken from the last variable index backwards."""

    __slots__ = ("weights",)

    def __init__(self, weights):
        self.weights = tuple(int(w) for w in weights)

    def wdeg(self, mono) -> int:
        return sum(e * w for e, w in zip(mono, self.weights))

    def key(self, mono):
        return (self.wdeg(mono), tuple(-e for e in reversed(mono)))


def _leading(terms: dict, order: TermOrder):
    return max(terms, key=order.key)


def _monic(terms: dict, order: TermOrder) -> dict:
    lc = terms[_leading(terms, order)]
    if lc == 1:
        return dict(terms)
    return {m: c / lc for m, c in terms.items()}


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm_mono(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _reduce_terms(terms: dict, basis, order: TermOrder) -> dict:
    """Full remainder of `terms` modulo basis entries (lt, monic_terms)."""
    work = dict(terms)
    remainder: dict = {}
    while work:
        m = max(work, key=order.key)
        c = work.pop(m)
        if c == 0:
            continue
        for lt, g in basis:
            if _divides(lt, m):
                shift = tuple(x - y for x, y in zip(m, lt))
                for m2, c2 in g.items():
                    if m2 == lt:
                        continue
                    mm = tuple(x + y for x, y in zip(m2, shift))
                    nv = work.get(mm, Fraction(0)) - c * c2
                    if nv:
                        work[mm] = nv
                    else:
                        work.pop(mm, None)
                break
        else:
            remainder[m] = remainder.get(m, Fraction(0)) + c
    return remainder


def groebner(gens, order: TermOrder):
    """Reduced Groebner basis (Buchberger with the coprime-lcm criterion).

    Deterministic for a fixed order: pairs are processed by increasing
    weighted degree of the lcm.
    """
    basis = []  # list of (lt, monic terms dict)
    for g in gens:
        terms = g.terms if isinstance(g, Polynomial) else dict(g)
        if terms:
            t = _monic(terms, order)
            basis.append((_leading(t, order), t))
    basis.sort(key=lambda e: order.key(e[0]))

    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]

    def pair_key(p):
        i, j = p
        return (order.wdeg(_lcm_mono(basis[i][0], basis[j][0])), i, j)

    while pairs:
        pairs.sort(key=pair_key)
        i, j = pairs.pop(0)
        lti, gi = basis[i]
        ltj, gj = basis[j]
        lcm = _lcm_mono(lti, ltj)
        if tuple(a + b for a, b in zip(lti, ltj)) == lcm:
            continue  # coprime leading terms
        si = tuple(a - b for a, b in zip(lcm, lti))
        sj = tuple(a - b for a, b in zip(lcm, ltj))
        s: dict = {}
        for m, c in gi.items():
            mm = tuple(a + b for a, b in zip(m, si))
            s[mm] = s.get(mm, Fraction(0)) + c
        for m, c in gj.items():
            mm = tuple(a + b for a, b in zip(m, sj))
            nv = s.get(mm, Fraction(0)) - c
            if nv:
                s[mm] = nv
            else:
                s.pop(mm, None)
        rem = _reduce_terms(s, basis, order)
        if rem:
            t = _monic(rem, order)
            basis.append((_leading(t, order), t))
            k = len(basis) - 1
            pairs.extend((i2, k) for i2 in range(k))

    # minimalize, then tail-reduce
    basis.sort(key=lambda e: order.key(e[0]))
    minimal = []
    for idx, (lt, g) in enumerate(basis):
        if not any(_divides(lt2, lt) for lt2, _ in basis[:idx]):
            minimal.append((lt, g))
    reduced = []
    for idx, (lt, g) in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1 :]
        rem = _reduce_terms(g, others, order)
        if rem:
            t = _monic(rem, order)
            reduced.append((_leading(t, order), t))
    reduced.sort(key=lambda e: order.key(e[0]))
    return reduced


def jacobian_ideal(poly: Polynomial, active=None):
    """All first partials of `poly` with respect to the active variables."""
    if active is None:
        active = range(poly.nvars)
    return [poly.diff(i) for i in active]


class MilnorRing:
    """Quotient by the Jacobian ideal on a chosen set of active variables.

    Monomials keep their full ambient exponent tuples; inactive slots are
    always zero.  `weights` is the ambient weight system used for grading.
    """

    __slots__ = (
        "poly",
        "active",
        "weights",
        "order",
        "basis_entries",
        "lead_monomials",
        "basis",
        "socle",
        "mu",
        "_hess_socle_coeff",
    )

    def __init__(self, poly: Polynomial, active, weights, order, basis_entries):
        self.poly = poly
        self.active = tuple(sorted(active))
        self.weights = tuple(weights)
        self.order = order
        self.basis_entries = basis_entries
        self.lead_monomials = [lt for lt, _ in basis_entries]
        self._hess_socle_coeff = None
        self.basis = self._standard_basis()
        self.mu = len(self.basis)
        self.socle = self._socle()

    def _standard_basis(self):
        n = self.poly.nvars
        if not self.active:
            return (tuple([0] * n),)
        bounds = {}
        for i in self.active:
            pure = [
                lt[i]
                for lt in self.lead_monomials
                if lt[i] > 0 and all(e == 0 for j, e in enumerate(lt) if j != i)
            ]
            if not pure:
                raise DegenerateSingularity(
                    f"no pure power of variable {self.poly.variables[i]} in the "
                    f"leading-term ideal of {self.poly}"
                )
            bounds[i] = min(pure)
        lead = self.lead_monomials
        out = []
        mono = [0] * n
        active = self.active

        def rec(k: int):
            if k == len(active):
                m = tuple(mono)
                if not any(_divides(lt, m) for lt in lead):
                    out.append(m)
                return
            i = active[k]
            for e in range(bounds[i]):
                mono[i] = e
                rec(k + 1)
            mono[i] = 0

        rec(0)
        out.sort(key=lambda m: (self.wdeg(m), m))
        return tuple(out)

    def _socle(self):
        top = max(self.wdeg(m) for m in self.basis)
        at_top = [m for m in self.basis if self.wdeg(m) == top]
        if len(at_top) != 1:
            raise MilnorError(
                f"socle not unique for {self.poly} on {self.active}: {at_top}"
            )
        return at_top[0]

    def wdeg(self, mono) -> int:
        return sum(e * w for e, w in zip(mono, self.weights))

    def normal_form(self, p: Polynomial) -> Polynomial:
        if not p.support() <= set(self.active):
            raise ValueError("polynomial uses variables outside the ring")
        rem = _reduce_terms(p.terms, self.basis_entries, self.order)
        return Polynomial(p.variables, rem)

    def socle_coefficient(self, p: Polynomial) -> Fraction:
        return self.normal_form(p).coefficient(self.socle)

    def hessian_socle_coefficient(self) -> Fraction:
        if self._hess_socle_coeff is None:
            h = hessian(self.poly, self.active)
            c = self.socle_coefficient(h)
            if c == 0:
                raise DegenerateHessian(
                    f"Hessian of {self.poly} on {self.active} reduces to zero socle"
                )
            self._hess_socle_coeff = c
        return self._hess_socle_coeff


def milnor_ring(poly: Polynomial, active=None, ws: WeightSystem | None = None) -> MilnorRing:
    """Build the Milnor ring of `poly` restricted to `active` variables.

    Raises DegenerateSingularity when the quotient is infinite dimensional.
    `ws` supplies the grading; by default the weight system is solved from
    the restricted polynomial itself (all-ones fallback when non-unique, the
    order is still valid).
    """
    n = poly.nvars
    if active is None:
        active = tuple(range(n))
    active = tuple(sorted(active))
    restricted = restrict(poly, active)
    if ws is not None:
        weights = ws.weights
    else:
        weights = _grading_weights(restricted, active)
    if active and restricted.is_zero():
        raise DegenerateSingularity(f"{poly} vanishes on the active variables {active}")
    order = TermOrder(weights)
    gens = jacobian_ideal(restricted, active)
    basis_entries = groebner(gens, order)
    return MilnorRing(restricted, active, weights, order, basis_entries)


def _grading_weights(poly: Polynomial, active):
    n = poly.nvars
    if poly.is_zero():
        return tuple([1] * n)
    sub = Polynomial(
        tuple(poly.variables[i] for i in active),
        {tuple(m[i] for i in active): c for m, c in poly.terms.items()},
    )
    try:
        sub_ws = weight_system(sub)
    except PolyError:
        return tuple([1] * n)
    weights = [1] * n
    for slot, i in enumerate(active):
        weights[i] = sub_ws.weights[slot]
    return tuple(weights)


def hessian(poly: Polynomial, active=None) -> Polynomial:
    """Determinant of the matrix of second partials on the active variables.

    The variable-interaction graph splits the matrix into diagonal blocks, so
    the determinant is computed blockwise (cofactor expansion with memoized
    column masks inside each block).  Empty variable set gives 1.
    """
    n = poly.nvars
    if active is None:
        active = tuple(range(n))
    active = tuple(sorted(active))
    one = Polynomial(poly.variables, {tuple([0] * n): Fraction(1)})
    if not active:
        return one

    # connected components of "appear in a common monomial"
    parent = {i: i for i in active}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m in restrict(poly, active).terms:
        used = [i for i in active if m[i] > 0]
        for a, b in zip(used, used[1:]):
            parent[find(a)] = find(b)
    comps: dict = {}
    for i in active:
        comps.setdefault(find(i), []).append(i)

    result = one
    for comp in sorted(comps.values()):
        rows = [[poly.diff(i).diff(j) for j in comp] for i in comp]
        result = result * _poly_det(rows, poly.variables)
    return result


def _poly_det(rows, variables) -> Polynomial:
    n = len(rows)
    zero_m = tuple([0] * len(variables))
    if n == 0:
        return Polynomial(variables, {zero_m: Fraction(1)})
    memo: dict = {}

    def rec(mask: int) -> Polynomial:
        if mask == 0:
            return Polynomial(variables, {zero_m: Fraction(1)})
        if mask in memo:
            return memo[mask]
        row = n - bin(mask).count("1")
        acc = Polynomial.zero(variables)
        sign = 1
        for j in range(n):
            if not mask & (1 << j):
                continue
            entry = rows[row][j]
            if not entry.is_zero():
                term = entry * rec(mask & ~(1 << j))
                acc = acc + (term if sign > 0 else -term)
            sign = -sign
        memo[mask] = acc
        return acc

    return rec((1 << n) - 1)


def residue_pairing(f: Polynomial, g: Polynomial, ring: MilnorRing) -> Fraction:
    """<f, g> = mu * socle-coeff(nf(f*g)) / socle-coeff(nf(Hess(W)))."""
    ch = ring.hessian_socle_coefficient()
    cf = ring.socle_coefficient(f * g)
    return Fraction(ring.mu) * cf / ch


def fermat_milnor_number(ws: WeightSystem) -> int:
    """Product formula for sums of Fermat monomials: mu = prod(d/w_i - 1)."""
    total = 1
    for w in ws.weights:
        if ws.degree % w:
            raise ValueError("not a Fermat weight system")
        total *= ws.degree // w - 1
    return total
