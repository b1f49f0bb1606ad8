"""Census of algebraic integers with every conjugate in (0, t).

A degree-k entry is a monic integer polynomial

    p(x) = x^k - e1 x^(k-1) + e2 x^(k-2) - ... + (-1)^k ek

with k distinct roots in the open interval (0, t). All e_j are then
positive and below ``C(k, j) t^j``, which bounds the enumeration box.

The enumeration walks e1, e2, ... in turn. After fixing e1..ej the
(k-j)-th derivative of p is known, and by Rolle it must itself have j
distinct roots in (0, t). Its constant term is the only part that depends on
e_j, so the admissible e_j form an interval read off from the sign pattern at
the roots of the previous derivative. Floats only propose that interval
(padded by one on each side); every candidate is accepted or rejected by an
exact Sturm count.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb, factorial, floor

from .errors import CellBudgetExceeded, NotSquarefree, PreconditionFailed
from .poly import (
    RatPoly,
    SturmChain,
    cyclotomic,
    euler_phi,
    isolate_real_roots,
    lagrange_interpolate,
    rat,
    rat_to_str,
    resultant,
    squarefree_part,
)
from .positivity import IntervalSpec, count_roots_in

DEFAULT_CELL_BUDGET = 10**8
KRONECKER_T = Fraction(4)


def cell_budget() -> int:
    raw = os.environ.get("TRCERT_CELL_BUDGET")
    if raw:
        return int(float(raw))
    return DEFAULT_CELL_BUDGET


# ---------------------------------------------------------------------
# the Kronecker family


@dataclass(frozen=True)
class KroneckerEntry:
    n: int
    poly: RatPoly

    @property
    def degree(self):
        return self.poly.degree

    def element(self):
        """kappa_n as the generator of Q[x]/(poly)."""
        from .tower import FieldTower

        return FieldTower.make_base(self.poly).gen()

    def to_json(self):
        return {"n": self.n, "degree": self.degree, "min_poly": self.poly.to_json()}


def kronecker_poly(n: int) -> RatPoly:
    """Minimal polynomial of ``zeta_n + 1/zeta_n + 2``.

    ``Res_x(Phi_n(x), x^2 - (y - 2) x + 1)`` is evaluated at phi(n) + 1
    integer points and interpolated; every value of y occurs twice (from
    zeta and 1/zeta), so the squarefree part is the minimal polynomial.
    """
    phi = cyclotomic(n)
    deg = phi.degree
    pts = []
    for y in range(deg + 1):
        quad = RatPoly((1, -(y - 2), 1))
        pts.append((y, resultant(phi, quad)))
    return squarefree_part(lagrange_interpolate(pts))


def kronecker_entry(n: int) -> KroneckerEntry:
    if n < 3:
        raise PreconditionFailed("kappa_n lies in (0, 4) only for n >= 3 (kappa_1 = 4, kappa_2 = 0)")
    p = kronecker_poly(n)
    if p.degree != euler_phi(n) // 2 or not p.is_integral():
        raise AssertionError(f"unexpected minimal polynomial {p} for n = {n}")
    if count_roots_in(p, IntervalSpec.open(0, 4)) != p.degree:
        raise AssertionError(f"kappa_{n} has a conjugate outside (0, 4)")
    return KroneckerEntry(n, p)


def kronecker_indices(max_degree: int):
    """All n >= 3 with phi(n)/2 <= max_degree, using phi(n) >= sqrt(n/2)."""
    top = 2 * (2 * max_degree) ** 2 + 2
    return [n for n in range(3, top + 1) if euler_phi(n) <= 2 * max_degree]


# ---------------------------------------------------------------------
# census


@dataclass(frozen=True)
class CensusEntry:
    poly: RatPoly

    @property
    def degree(self):
        return self.poly.degree

    def signed_coefficients(self):
        """(e1, ..., ek) with p = sum (-1)^j e_j x^(k-j)."""
        k = self.degree
        return tuple(int((-1) ** j * self.poly[k - j]) for j in range(1, k + 1))

    def to_json(self):
        return {"degree": self.degree, "min_poly": self.poly.to_json()}


def _sort_key(p: RatPoly):
    """Degree, then the signed coefficients e1, e2, ... in increasing order."""
    k = p.degree
    return (k, tuple((-1) ** j * p[k - j] for j in range(1, k + 1)))


@dataclass
class CensusTable:
    D: int
    t: Fraction
    entries: list = field(default_factory=list)
    candidates: int = 0  # polynomials with all roots in (0, t) before deduplication

    @property
    def counts(self):
        out = {k: 0 for k in range(1, self.D + 1)}
        for e in self.entries:
            out[e.degree] += 1
        return out

    @property
    def element_count(self):
        return sum(e.degree for e in self.entries)

    def polys(self):
        return [e.poly for e in self.entries]

    def to_json(self):
        return {
            "D": self.D,
            "t": rat_to_str(self.t),
            "counts": {str(k): v for k, v in self.counts.items()},
            "element_count": self.element_count,
            "entries": [e.to_json() for e in self.entries],
        }


def box_cells(D: int, t) -> int:
    """Cells of the raw coefficient box over all degrees up to D."""
    t = rat(t)
    total = 0
    for k in range(1, D + 1):
        cells = 1
        for j in range(1, k + 1):
            cells *= _upper(k, j, t)
        total += cells
    return total


def _upper(k, j, t):
    """Number of integers e with 0 < e < C(k, j) t^j."""
    return max(ceil(comb(k, j) * t**j) - 1, 0)


def _level_poly(k, es):
    """The (k - j)-th derivative of p, which only involves e = (e1..ej)."""
    j = len(es)
    coeffs = [Fraction(0)] * (j + 1)
    full = (1,) + tuple(es)
    for i, e in enumerate(full):
        coeffs[j - i] = Fraction((-1) ** i * e * factorial(k - i), factorial(j - i))
    return RatPoly(coeffs)


def _roots_ok(p: RatPoly, interval: IntervalSpec) -> bool:
    try:
        return count_roots_in(p, interval) == p.degree
    except NotSquarefree:
        return False


def _float_roots(p: RatPoly):
    return [float((lo + hi) / 2) for lo, hi in isolate_real_roots(p, Fraction(1, 1 << 40))]


def _candidate_range(k, es, prev_roots, t):
    """Integer e_j to test at level j = len(es) + 1, proposed by the sign pattern."""
    j = len(es) + 1
    top = _upper(k, j, t)
    if top < 1:
        return range(0)
    h = _level_poly(k, tuple(es) + (0,))
    scale = factorial(k - j) * (-1) ** j  # q_j = h + scale * e_j
    points = [0.0] + prev_roots + [float(t)]
    lo, hi = 1.0, float(top)
    hf = [float(c) for c in h.coeffs]
    for i, x in enumerate(points):
        hx = 0.0
        for c in reversed(hf):
            hx = hx * x + c
        sign = 1 if (j - i) % 2 == 0 else -1
        # need sign * (hx + scale * e) > 0
        coef = sign * scale
        bound = -sign * hx / coef
        if coef > 0:
            lo = max(lo, bound)
        else:
            hi = min(hi, bound)
    a = max(1, floor(lo) - 1)
    b = min(top, ceil(hi) + 1)
    return range(a, b + 1)


def _enumerate_degree(k, t, first=None):
    """All (e1..ek) whose polynomial has k distinct roots in (0, t)."""
    interval = IntervalSpec.open(0, t)
    out = []

    def walk(es, prev_roots):
        j = len(es) + 1
        for e in _candidate_range(k, es, prev_roots, t):
            if j == 1 and first is not None and e != first:
                continue
            cur = es + [e]
            q = _level_poly(k, cur)
            if not _roots_ok(q, interval):
                continue
            if j == k:
                out.append(tuple(cur))
            else:
                walk(cur, _float_roots(q))

    walk([], [])
    return out


def _poly_from_es(es):
    k = len(es)
    coeffs = [0] * (k + 1)
    coeffs[k] = 1
    for j, e in enumerate(es, start=1):
        coeffs[k - j] = (-1) ** j * e
    return RatPoly(coeffs)


def _census_chunk(args):
    k, t, first = args
    return [_poly_from_es(es) for es in _enumerate_degree(k, t, first)]


def qualifying_polys(D: int, t, workers: int = 1):
    """Every monic integer polynomial of degree <= D with all roots simple and in (0, t)."""
    t = rat(t)
    jobs = []
    for k in range(1, D + 1):
        for e1 in range(1, _upper(k, 1, t) + 1):
            jobs.append((k, t, e1))
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_census_chunk, jobs))
    else:
        parts = [_census_chunk(j) for j in jobs]
    polys = [p for part in parts for p in part]
    polys.sort(key=_sort_key)
    return polys


def census(D: int, t, budget=None, workers: int = 1) -> CensusTable:
    """Irreducible entries of degree <= D with every root in (0, t).

    A polynomial is kept when it shares no root with a kept entry of lower
    degree (its resultant with each is nonzero); this leaves exactly the
    irreducible ones because every factor of a qualifying polynomial
    qualifies too.
    """
    t = rat(t)
    if D < 1:
        raise PreconditionFailed("D must be at least 1")
    if t <= 0:
        raise PreconditionFailed("t must be positive")
    budget = cell_budget() if budget is None else int(budget)
    needed = box_cells(D, t)
    if needed > budget:
        raise CellBudgetExceeded(needed, budget)
    polys = qualifying_polys(D, t, workers)
    kept = []
    for p in polys:
        if all(q.degree == p.degree or resultant(p, q) != 0 for q in kept):
            kept.append(p)
    return CensusTable(D, t, [CensusEntry(p) for p in kept], len(polys))


def recheck_entry(entry: CensusEntry, t) -> bool:
    """Fresh Sturm check: squarefree, monic integral, all roots in (0, t)."""
    p = entry.poly
    if not (p.is_monic() and p.is_integral()):
        return False
    chain = SturmChain(p)
    t = rat(t)
    return chain.count(Fraction(0), t) - (1 if p(t) == 0 else 0) == p.degree and p(0) != 0


@dataclass
class CompletenessReport:
    D: int
    census_polys: list
    kronecker: list
    missing_from_census: list
    not_in_kronecker: list

    @property
    def ok(self):
        return not self.missing_from_census and not self.not_in_kronecker

    def to_json(self):
        return {
            "D": self.D,
            "ok": self.ok,
            "census_entries": len(self.census_polys),
            "kronecker_entries": [e.to_json() for e in self.kronecker],
            "missing_from_census": [p.to_json() for p in self.missing_from_census],
            "not_in_kronecker": [p.to_json() for p in self.not_in_kronecker],
        }


def kronecker_completeness(D: int, budget=None, workers: int = 1) -> CompletenessReport:
    """Compare census(D, 4) with the polynomials of kappa_n, phi(n)/2 <= D."""
    table = census(D, KRONECKER_T, budget, workers)
    fam = [kronecker_entry(n) for n in kronecker_indices(D)]
    cset = set(table.polys())
    kset = {e.poly for e in fam}
    missing = sorted(kset - cset, key=_sort_key)
    extra = sorted(cset - kset, key=_sort_key)
    return CompletenessReport(D, table.polys(), fam, missing, extra)


@dataclass
class Profile:
    D: int
    rows: list  # (t, element_count)

    def to_json(self):
        return {"D": self.D, "profile": [{"t": rat_to_str(t), "count": c} for t, c in self.rows]}

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "count"])
        for t, c in self.rows:
            w.writerow([rat_to_str(t), c])
        return buf.getvalue()


def jr_profile(D: int, ts, budget=None, workers: int = 1) -> Profile:
    return Profile(D, [(rat(t), census(D, t, budget, workers).element_count) for t in ts])
