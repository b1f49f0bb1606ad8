"""Integrality, the orders R_{m,L}, units and roots of unity.

``R_{m,L}`` is the set of algebraic integers of ``L`` congruent to a rational
integer modulo ``m O_L``; an element belongs to it exactly when some residue
``j`` in ``[0, m)`` makes ``(x - j) / m`` integral.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Optional

from .errors import InternalContradiction, NotCMTower, PreconditionFailed
from .poly import RatPoly, cyclotomic, euler_phi, phi_inverse
from .positivity import is_totally_real
from .tower import AlgNum, FieldTower, conj, cyclotomic_cm_tower


@dataclass(frozen=True)
class ResidueWitness:
    m: int
    j: int

    def to_json(self):
        return {"m": self.m, "j": self.j}

    @classmethod
    def from_json(cls, data):
        return cls(int(data["m"]), int(data["j"]))


@dataclass(frozen=True)
class UnitEvidence:
    """Minimal polynomial of a unit and its inverse as an integer polynomial in it."""

    min_poly: RatPoly
    constant: int
    inverse: tuple  # integer coefficients c_k, inverse = sum c_k u^k

    def inverse_of(self, u: AlgNum) -> AlgNum:
        acc = u.tower.zero()
        for c in reversed(self.inverse):
            acc = acc * u + c
        return acc

    def to_json(self):
        return {"min_poly": self.min_poly.to_json(), "constant": self.constant, "inverse": list(self.inverse)}

    @classmethod
    def from_json(cls, data):
        return cls(RatPoly.from_json(data["min_poly"]), int(data["constant"]), tuple(int(c) for c in data["inverse"]))


@dataclass(frozen=True)
class RootOfUnityReport:
    is_root_of_unity: bool
    order: Optional[int] = None


def is_algebraic_integer(alpha: AlgNum) -> bool:
    return alpha.min_poly().is_integral()


def r_m_membership(alpha: AlgNum, m: int) -> Optional[ResidueWitness]:
    """The residue ``j`` with ``(alpha - j)/m`` integral, or None if alpha is not in R_m."""
    if m < 1:
        raise ValueError("m must be positive")
    for j in range(m):
        if is_algebraic_integer((alpha - j) / m):
            return ResidueWitness(m, j)
    return None


def is_unit(alpha: AlgNum) -> Optional[UnitEvidence]:
    """Evidence that ``alpha`` is a unit, from ``u (u^(n-1) + ... + c_1) = -c_0``."""
    mp = alpha.min_poly()
    if not mp.is_integral() or abs(mp.coeffs[0]) != 1:
        return None
    c0 = int(mp.coeffs[0])
    # u^-1 = -c0 * (u^(n-1) + c_(n-1) u^(n-2) + ... + c_1), as c0 = +-1
    inverse = tuple(-c0 * int(c) for c in mp.coeffs[1:])
    ev = UnitEvidence(mp, c0, inverse)
    if ev.inverse_of(alpha) * alpha != 1:
        raise InternalContradiction("unit inverse expression does not invert")
    return ev


def is_root_of_unity(alpha: AlgNum) -> RootOfUnityReport:
    mp = alpha.min_poly()
    if not mp.is_integral() or abs(mp.coeffs[0]) != 1:
        return RootOfUnityReport(False)
    for n in phi_inverse(mp.degree):
        if cyclotomic(n) == mp:
            return RootOfUnityReport(True, n)
    return RootOfUnityReport(False)


def conj_ratio(u: AlgNum):
    """``u / conj(u)`` for a unit on a CM tower, with its root-of-unity report.

    The ratio is always a root of unity; anything else means the arithmetic
    is broken and raises :class:`InternalContradiction`.
    """
    if not u.tower.is_cm():
        raise NotCMTower("conj_ratio needs a CM tower")
    if is_unit(u) is None:
        raise PreconditionFailed(f"{u} is not a unit (minimal polynomial {u.min_poly()})")
    ratio = u * conj(u).invert()
    report = is_root_of_unity(ratio)
    if not report.is_root_of_unity:
        raise InternalContradiction(f"u/conj(u) = {ratio} is not a root of unity")
    return ratio, report


# ---------------------------------------------------------------------
# roots of unity available in a tower


def _closure(found):
    """All products of the given roots of unity, keyed by coefficient tuple."""
    group = {}
    frontier = []
    for z in found:
        key = tuple(z.flatten())
        if key not in group:
            group[key] = z
            frontier.append(z)
    while frontier:
        new = []
        for a in frontier:
            for b in found:
                c = a * b
                key = tuple(c.flatten())
                if key not in group:
                    group[key] = c
                    new.append(c)
        frontier = new
    return list(group.values())


def roots_of_unity(tower: FieldTower, extra=()):
    """Roots of unity reachable from the tower's generators.

    Candidates are the base generator, every step root, the half sums
    ``(x + s_k) / 2`` (which give zeta_n on a CM cyclotomic tower) and any
    caller-supplied elements. The group they generate is returned with
    orders, sorted by order.
    """
    cands = [tower.gen()]
    for k in range(1, tower.height + 1):
        s = tower.root(k)
        cands.append(s)
        cands.append((tower.gen() + s) / 2)
    cands.extend(tower.coerce(e) for e in extra)
    found = [tower.rational(-1)]
    for c in cands:
        if is_root_of_unity(c).is_root_of_unity:
            found.append(c)
    out = []
    for z in _closure(found):
        out.append((is_root_of_unity(z).order, z))
    out.sort(key=lambda t: (t[0], tuple(t[1].flatten())))
    return out


@dataclass
class ProbeResult:
    order: int
    candidates: int
    violations: list = field(default_factory=list)


@dataclass
class ProbeReport:
    m: int
    results: list

    @property
    def ok(self):
        return all(r.candidates > 0 and not r.violations for r in self.results)

    def to_json(self):
        return {
            "m": self.m,
            "ok": self.ok,
            "orders": [
                {
                    "order": r.order,
                    "roots_found": r.candidates,
                    "violations": [z.to_json() for z in r.violations],
                    "status": "pass" if r.candidates and not r.violations else ("missing" if not r.candidates else "fail"),
                }
                for r in self.results
            ],
        }


def probe_mu_trivial(tower: FieldTower, m: int, orders, extra=()) -> ProbeReport:
    """Check that no root of unity of the probed orders (> 2) lies in R_{m,tower}."""
    if m < 2:
        raise ValueError("probe needs m >= 2")
    available = roots_of_unity(tower, extra)
    results = []
    for n in orders:
        zs = [z for order, z in available if order == n]
        res = ProbeResult(n, len(zs))
        if n > 2:
            for z in zs:
                if r_m_membership(z, m) is not None:
                    res.violations.append(z)
        results.append(res)
    return ProbeReport(m, results)


# ---------------------------------------------------------------------
# unit sampling


def sample_units(generators, max_length=3):
    """Products of up to ``max_length`` generators, their inverses and negations."""
    gens = []
    for u in generators:
        gens.extend([u, u.invert()])
    out = {}

    def add(x):
        for y in (x, -x):
            out.setdefault(hash(y), y)

    words = [g for g in gens]
    for w in words:
        add(w)
    for _ in range(max_length - 1):
        words = [w * g for w in words for g in gens]
        for w in words:
            add(w)
    return list(out.values())


# ---------------------------------------------------------------------
# anti-invariant units in R_2 of a cyclotomic field


@dataclass
class AntiInvariantUnit:
    u: AlgNum
    zeta: AlgNum
    sign: int
    zeta_power: int
    exponents: dict
    witness: ResidueWitness


def cyclotomic_unit_generators(n, zeta, include_one_minus_zeta=True):
    """Cyclotomic units: ``(1 - zeta^b)/(1 - zeta)`` for 1 < b < n/2 coprime to n.

    When ``n`` is not a prime power ``1 - zeta`` is itself a unit and is
    included first (under the label ``1``).
    """
    base = 1 - zeta
    gens = []
    if include_one_minus_zeta:
        if is_unit(base) is None:
            raise PreconditionFailed(f"1 - zeta_{n} is not a unit (n is a prime power)")
        gens.append((1, base))
    binv = base.invert()
    for b in range(2, (n + 1) // 2):
        if gcd(b, n) == 1:
            gens.append((b, (1 - zeta**b) * binv))
    return gens


def search_anti_invariant_units(n=15, exponent_bound=2, include_one_minus_zeta=True, first_only=True):
    """Search ``+-zeta^a * prod g_b^(e_b)`` with ``|e_b| <= bound`` for units u in R_2 with conj(u) = -u.

    Runs over the CM tower of Q(zeta_n). Returns the list of hits in a
    fixed enumeration order (only the first when ``first_only``).
    """
    tower, zeta = cyclotomic_cm_tower(n)
    gens = cyclotomic_unit_generators(n, zeta, include_one_minus_zeta)
    powers = []
    for _, g in gens:
        table = {0: tower.one()}
        ginv = g.invert()
        for e in range(1, exponent_bound + 1):
            table[e] = table[e - 1] * g
            table[-e] = table[-(e - 1)] * ginv
        powers.append(table)
    zeta_pows = [tower.one()]
    for _ in range(1, n):
        zeta_pows.append(zeta_pows[-1] * zeta)
    rng = range(-exponent_bound, exponent_bound + 1)
    hits = []
    for exps in product(rng, repeat=len(gens)):
        core = tower.one()
        for table, e in zip(powers, exps):
            if e:
                core = core * table[e]
        for a in range(n):
            for sign in (1, -1):
                u = core * zeta_pows[a] * sign
                if not u.components()[0].is_zero():
                    continue
                w = r_m_membership(u, 2)
                if w is None:
                    continue
                hit = AntiInvariantUnit(u, zeta, sign, a, {b: e for (b, _), e in zip(gens, exps)}, w)
                hits.append(hit)
                if first_only:
                    return hits
    return hits


def power_basis_coordinates(alpha: AlgNum, zeta: AlgNum, degree: int):
    """Coordinates of ``alpha`` in the basis 1, zeta, ..., zeta^(degree-1)."""
    cols = []
    z = alpha.tower.one()
    for _ in range(degree):
        cols.append(z.flatten())
        z = z * zeta
    target = alpha.flatten()
    n = len(target)
    # solve sum_k c_k cols[k] = target by Gauss-Jordan on the augmented system
    rows = [[cols[k][i] for k in range(degree)] + [target[i]] for i in range(n)]
    piv_cols = []
    r = 0
    for c in range(degree):
        piv = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(rows[i][-1] != 0 for i in range(r, n)):
        raise ValueError("element is not in the span of the zeta powers")
    coords = [Fraction(0)] * degree
    for i, c in enumerate(piv_cols):
        coords[c] = rows[i][-1]
    return coords


@dataclass
class AntiInvariantCheck:
    is_unit: bool
    residue_by_min_poly: Optional[ResidueWitness]
    residue_by_coordinates: Optional[int]
    anti_invariant: bool

    @property
    def ok(self):
        return (
            self.is_unit
            and self.residue_by_min_poly is not None
            and self.residue_by_coordinates is not None
            and self.residue_by_min_poly.j == self.residue_by_coordinates
            and self.anti_invariant
        )


def verify_anti_invariant_unit(u: AlgNum, zeta: AlgNum, n: int) -> AntiInvariantCheck:
    """Re-check a search hit by two routes.

    Membership in R_2 is decided once through minimal polynomials and once
    through coordinates in the power basis of Z[zeta_n], the full ring of
    integers of Q(zeta_n).
    """
    unit = is_unit(u) is not None
    by_mp = r_m_membership(u, 2)
    deg = euler_phi(n)
    by_coords = None
    for j in (0, 1):
        coords = power_basis_coordinates((u - j) / 2, zeta, deg)
        if all(c.denominator == 1 for c in coords):
            by_coords = j
            break
    anti = conj(u) == -u
    return AntiInvariantCheck(unit, by_mp, by_coords, anti)


def totally_real_sample_check(units):
    """Names of sampled units whose square fails to be totally real (expected empty)."""
    return [u for u in units if not is_totally_real(u * u)]
