"""Unit certificates and four-squares certificates.

The unit certificates write totally real algebraic integers through units of
the order ``R_2``:

* a unit pair turns ``a = 2(2d + 1)`` into ``u + 1/u`` with
  ``u = 2(d + sqrt(d^2 + d)) + 1``;
* a 32d certificate writes ``32 d = u^2 + u^-2 - v^2 - v^-2``;
* an x-witness combines two 32d certificates through
  ``4 alpha = (alpha + 1)^2 - (alpha - 1)^2``.

Four-squares certificates record ``0 << x << a/b`` through the sums of
squares ``x y0^2`` and ``(a - b x) y0^2``.

Verifiers recompute every clause from the stored elements and never raise on
a bad certificate; they return a :class:`VerificationReport` instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional

from .errors import (
    ConjugateInForbiddenInterval,
    NotAlgebraicInteger,
    NotTotallyNonnegative,
    NotTotallyReal,
    PreconditionFailed,
    TrcertError,
)
from .integrality import is_algebraic_integer, is_unit, r_m_membership
from .positivity import IntervalSpec, is_totally_nonnegative, is_totally_real, totally_avoids, totally_in
from .tower import AlgNum, FieldTower, conj, sqrt_in_tower

FORBIDDEN = IntervalSpec.open(-2, 0)
_NEG_UNIT = IntervalSpec.open(-1, 0)


# ---------------------------------------------------------------------
# reports


@dataclass
class Clause:
    name: str
    status: str  # "pass", "fail" or "n/a"
    detail: str = ""
    scope: str = ""

    @property
    def label(self):
        return f"{self.scope}: {self.name}" if self.scope else self.name

    def to_json(self):
        out = {"clause": self.label, "status": self.status}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class VerificationReport:
    kind: str
    clauses: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.clauses)

    @property
    def first_failure(self) -> Optional[Clause]:
        return next((c for c in self.clauses if c.status == "fail"), None)

    def add(self, name, passed, detail="", scope=""):
        self.clauses.append(Clause(name, "pass" if passed else "fail", "" if passed else detail, scope))
        return passed

    def skip(self, name, detail, scope=""):
        self.clauses.append(Clause(name, "n/a", detail, scope))

    def extend(self, other: VerificationReport, scope):
        for c in other.clauses:
            self.clauses.append(Clause(c.name, c.status, c.detail, f"{scope}.{c.scope}" if c.scope else scope))

    def to_json(self):
        ff = self.first_failure
        return {
            "kind": self.kind,
            "ok": self.ok,
            "first_failure": ff.label if ff else None,
            "clauses": [c.to_json() for c in self.clauses],
        }


def _safe(report, name, fn, scope=""):
    """Record ``fn()`` as a clause; exceptions count as failures."""
    try:
        ok = bool(fn())
        detail = ""
    except (TrcertError, ArithmeticError, ValueError, TypeError) as exc:
        ok = False
        detail = f"{type(exc).__name__}: {exc}"
    return report.add(name, ok, detail or "clause does not hold", scope)


# ---------------------------------------------------------------------
# unit pairs


@dataclass
class UnitPairCert:
    d: AlgNum
    tower: FieldTower
    u: AlgNum
    a: AlgNum

    @property
    def u_inverse(self):
        # 2(d - r) + 1 = a - u
        return self.a - self.u

    def to_json(self):
        return {"d": self.d.lift(self.tower).to_json(), "u": self.u.to_json(), "a": self.a.to_json()}


def _adjoin_root(value: AlgNum):
    """A square root of ``value``, adjoining a step only when none exists already."""
    r = sqrt_in_tower(value)
    if r is not None:
        return value.tower, r
    tower = value.tower.adjoin_sqrt(value)
    return tower, tower.root(tower.height)


def _pair_over(c: AlgNum):
    """``u = 2(c + sqrt(c^2 + c)) + 1`` with no positivity requirement on c^2 + c."""
    tower, r = _adjoin_root(c * c + c)
    c = c.lift(tower)
    u = (c + r) * 2 + 1
    a = (c * 2 + 1) * 2
    return tower, u, a


def _check_totally_real_integer(d: AlgNum, name="d"):
    if not is_algebraic_integer(d):
        raise NotAlgebraicInteger(f"{name} = {d} is not an algebraic integer")
    if not is_totally_real(d):
        raise NotTotallyReal(f"{name} = {d} is not totally real")


def build_unit_pair(d: AlgNum) -> UnitPairCert:
    """Unit ``u`` of R_2 with ``u + 1/u = 2(2d + 1)``."""
    _check_totally_real_integer(d)
    if not is_totally_nonnegative(d * d + d):
        raise NotTotallyNonnegative(f"d^2 + d is negative at a conjugate of d = {d}")
    tower, u, a = _pair_over(d)
    return UnitPairCert(d, tower, u, a)


def verify_unit_pair(c: UnitPairCert) -> VerificationReport:
    rep = VerificationReport("unit_pair")
    d = c.d.lift(c.tower)
    u, a = c.tower.coerce(c.u), c.tower.coerce(c.a)
    _safe(rep, "a = 2(2d+1)", lambda: a == (d * 2 + 1) * 2)
    _safe(rep, "u * (a - u) = 1", lambda: u * (a - u) == 1)
    _safe(rep, "u + 1/u = a", lambda: u + u.invert() == a)
    _safe(rep, "u^2 + 1/u^2 + 2 = a^2", lambda: u * u + (u * u).invert() + 2 == a * a)
    _safe(rep, "u is a unit", lambda: is_unit(u) is not None)
    _safe(rep, "u residue (m=2, j=1)", lambda: (w := r_m_membership(u, 2)) is not None and w.j == 1)
    return rep


# ---------------------------------------------------------------------
# 32d certificates


@dataclass
class Sum32Cert:
    d: AlgNum
    tower: FieldTower
    u: AlgNum
    v: AlgNum
    c: AlgNum  # u + 1/u = 2(2c + 1)
    e: AlgNum  # v + 1/v = 2(2e + 1), with (c - e)(c + e + 1) = 2d

    def to_json(self):
        lift = self.tower.coerce
        return {
            "d": lift(self.d).to_json(),
            "u": self.u.to_json(),
            "v": self.v.to_json(),
            "c": lift(self.c).to_json(),
            "e": lift(self.e).to_json(),
        }

    @classmethod
    def from_json(cls, tower: FieldTower, data):
        el = tower.element_from_json
        return cls(el(data["d"]), tower, el(data["u"]), el(data["v"]), el(data["c"]), el(data["e"]))


def _split_candidates(d: AlgNum, height=None):
    """Factors ``delta`` tried for ``(c - e)(c + e + 1) = 2d``, simplest first."""
    tower = d.tower
    n = tower.degree
    if height is None:
        height = 3 if n <= 2 else 2 if n <= 4 else 1
    seen = set()
    out = []

    def push(x):
        key = tuple(x.flatten())
        if key not in seen and not x.is_zero():
            seen.add(key)
            out.append(x)

    push(tower.one())
    for k in range(1, 4):
        for s in (1, -1):
            push(d**k * s)
            push(d**k * (2 * s))
    box = []
    for coords in product(range(-height, height + 1), repeat=n):
        if any(coords):
            box.append((max(map(abs, coords)), sum(map(abs, coords)), coords))
    box.sort()
    for _, _, coords in box:
        push(tower.from_flat(coords))
    return out


def _choose_split(d: AlgNum):
    """``(c, e)`` with ``(c - e)(c + e + 1) = 2d`` and both outside (-1, 0), if found.

    The first candidate ``delta = 1`` gives ``c = d``, ``e = d - 1``.
    """
    for delta in _split_candidates(d):
        q = d * 2 / delta
        c = (q + delta - 1) / 2
        e = (q - delta - 1) / 2
        if not (is_algebraic_integer(c) and is_algebraic_integer(e)):
            continue
        if totally_avoids(c, _NEG_UNIT) and totally_avoids(e, _NEG_UNIT):
            return c, e
    return None


def build_sum32(d: AlgNum, search_split=True) -> Sum32Cert:
    """Units ``u, v`` of R_2 with ``32 d = u^2 + u^-2 - v^2 - v^-2``.

    The default split uses ``c = d`` and ``e = d - 1``. When ``d`` has a
    conjugate in (0, 1) that split makes ``(d-1)^2 + (d-1)`` negative
    somewhere, so ``v`` would not be totally real; another factorisation of
    ``2d`` is then searched for, and the default split is kept only if none
    is found.
    """
    _check_totally_real_integer(d)
    if not totally_avoids(d, FORBIDDEN):
        raise ConjugateInForbiddenInterval(f"a conjugate of d = {d} lies in (-2, 0)")
    split = None
    if totally_avoids(d - 1, _NEG_UNIT):
        split = (d, d - 1)
    elif search_split:
        split = _choose_split(d)
    if split is None:
        split = (d, d - 1)
    c, e = split
    tower1, u, _ = _pair_over(c)
    tower2, v, _ = _pair_over(e.lift(tower1))
    u = u.lift(tower2)
    return Sum32Cert(d, tower2, u, v, c, e)


def verify_sum32(cert: Sum32Cert, require_totally_real=False) -> VerificationReport:
    rep = VerificationReport("sum32")
    try:
        tower = cert.tower
        d = tower.coerce(cert.d)
        u = tower.coerce(cert.u)
        v = tower.coerce(cert.v)
    except (TrcertError, TypeError, ValueError) as exc:
        rep.add("elements belong to the tower", False, str(exc))
        return rep
    _safe(rep, "u is a unit", lambda: is_unit(u) is not None)
    _safe(rep, "v is a unit", lambda: is_unit(v) is not None)
    _safe(rep, "u residue (m=2, j=1)", lambda: (w := r_m_membership(u, 2)) is not None and w.j == 1)
    _safe(rep, "v residue (m=2, j=1)", lambda: (w := r_m_membership(v, 2)) is not None and w.j == 1)

    def identity():
        u2, v2 = u * u, v * v
        return u2 + u2.invert() - v2 - v2.invert() == d * 32

    _safe(rep, "32d identity", identity)
    try:
        c, e = tower.coerce(cert.c), tower.coerce(cert.e)
    except (TrcertError, TypeError, ValueError) as exc:
        rep.add("split belongs to the tower", False, str(exc))
    else:
        _safe(rep, "u + 1/u = 2(2c+1)", lambda: u + u.invert() == (c * 2 + 1) * 2)
        _safe(rep, "v + 1/v = 2(2e+1)", lambda: v + v.invert() == (e * 2 + 1) * 2)
        _safe(rep, "(c-e)(c+e+1) = 2d", lambda: (c - e) * (c + e + 1) == d * 2)
    _safe(rep, "d is a totally real algebraic integer", lambda: is_algebraic_integer(d) and is_totally_real(d))
    _safe(rep, "d avoids (-2,0)", lambda: totally_avoids(d, FORBIDDEN))
    if require_totally_real:
        _safe(rep, "tower totally real", tower.is_totally_real)
    return rep


# ---------------------------------------------------------------------
# x-witnesses


@dataclass
class XWitnessCert:
    alpha: AlgNum
    d1: AlgNum
    d2: AlgNum
    sum1: Sum32Cert
    sum2: Sum32Cert

    @property
    def units(self):
        return [self.sum1.u, self.sum1.v, self.sum2.u, self.sum2.v]


def build_x_witness(alpha: AlgNum) -> XWitnessCert:
    """Witness ``4 alpha = d1 - d2`` with 32d certificates for ``d1 = (alpha+1)^2``, ``d2 = (alpha-1)^2``."""
    _check_totally_real_integer(alpha, "alpha")
    d1 = (alpha + 1) * (alpha + 1)
    d2 = (alpha - 1) * (alpha - 1)
    return XWitnessCert(alpha, d1, d2, build_sum32(d1), build_sum32(d2))


def _cm_clause(rep, cert: Sum32Cert, scope):
    """Square of every unit is fixed by conjugation in K1(sqrt(-1)) and totally real."""
    tower = cert.tower
    try:
        if not tower.is_totally_real():
            rep.skip("conj(w^2) = w^2 in K1(i)", "K1 is not totally real, so K1(i) is not CM", scope)
            return
        cm = tower.adjoin_sqrt(tower.rational(-1))
        if not cm.is_cm():
            rep.add("conj(w^2) = w^2 in K1(i)", False, "K1(i) is not CM", scope)
            return
        ok = True
        for w in (cert.u, cert.v):
            sq = cm.coerce(w) ** 2
            ok = ok and conj(sq) == sq and is_totally_real(sq)
        rep.add("conj(w^2) = w^2 in K1(i)", ok, "a unit square is not fixed by conjugation", scope)
    except (TrcertError, ArithmeticError, ValueError, TypeError) as exc:
        rep.add("conj(w^2) = w^2 in K1(i)", False, f"{type(exc).__name__}: {exc}", scope)


def verify_x_witness(cert: XWitnessCert) -> VerificationReport:
    rep = VerificationReport("x_witness")
    alpha = cert.alpha
    for name, sub in (("d1", cert.sum1), ("d2", cert.sum2)):
        rep.extend(verify_sum32(sub), f"sum32[{name}]")
    _safe(rep, "alpha is a totally real algebraic integer", lambda: is_algebraic_integer(alpha) and is_totally_real(alpha))
    _safe(rep, "d1 = (alpha+1)^2", lambda: cert.d1 == (alpha + 1) * (alpha + 1))
    _safe(rep, "d2 = (alpha-1)^2", lambda: cert.d2 == (alpha - 1) * (alpha - 1))
    _safe(rep, "4 alpha = d1 - d2", lambda: alpha * 4 == cert.d1 - cert.d2)
    _safe(rep, "sum32[d1] certifies d1", lambda: cert.sum1.tower.coerce(cert.d1) == cert.sum1.tower.coerce(cert.sum1.d))
    _safe(rep, "sum32[d2] certifies d2", lambda: cert.sum2.tower.coerce(cert.d2) == cert.sum2.tower.coerce(cert.sum2.d))
    for name, sub in (("d1", cert.sum1), ("d2", cert.sum2)):
        _cm_clause(rep, sub, f"sum32[{name}]")
    return rep


# ---------------------------------------------------------------------
# four squares


@dataclass
class FourSquaresCert:
    x: AlgNum
    a: int
    b: int
    ys: tuple  # y0, y1, ..., y8

    def to_json(self):
        tower = self.x.tower
        return {
            "x": self.x.to_json(),
            "a": self.a,
            "b": self.b,
            "y": [tower.coerce(y).to_json() for y in self.ys],
        }

    @classmethod
    def from_json(cls, tower: FieldTower, data):
        ys = tuple(tower.element_from_json(y) for y in data["y"])
        return cls(tower.element_from_json(data["x"]), int(data["a"]), int(data["b"]), ys)


def verify_four_squares(cert: FourSquaresCert) -> VerificationReport:
    """Check ``b x y0^2 != 0``, ``b x y0^2 != a y0^2`` and the two sums of four squares.

    Both sums are taken with the common denominator ``y0^2`` cleared:
    ``x y0^2 = y1^2 + ... + y4^2`` and ``(a - b x) y0^2 = y5^2 + ... + y8^2``.
    """
    rep = VerificationReport("four_squares")
    try:
        tower = cert.x.tower
        x = cert.x
        ys = [tower.coerce(y) for y in cert.ys]
        a, b = int(cert.a), int(cert.b)
    except (TrcertError, TypeError, ValueError) as exc:
        rep.add("certificate is well formed", False, str(exc))
        return rep
    if not rep.add("nine witnesses", len(ys) == 9, f"expected 9 witnesses, got {len(ys)}"):
        return rep
    rep.add("b > 0", b > 0, f"b = {b}")
    y0sq = ys[0] * ys[0]
    bxy = x * y0sq * b
    _safe(rep, "b x y0^2 != 0", lambda: not bxy.is_zero())
    _safe(rep, "b x y0^2 != a y0^2", lambda: bxy != y0sq * a)
    _safe(rep, "x y0^2 = y1^2 + y2^2 + y3^2 + y4^2", lambda: x * y0sq == sum((y * y for y in ys[1:5]), tower.zero()))
    _safe(
        rep,
        "(a - b x) y0^2 = y5^2 + y6^2 + y7^2 + y8^2",
        lambda: (x * (-b) + a) * y0sq == sum((y * y for y in ys[5:9]), tower.zero()),
    )
    _safe(
        rep,
        "y_i are totally real algebraic integers",
        lambda: all(is_algebraic_integer(y) and is_totally_real(y) for y in ys),
    )
    return rep


class _Embedder:
    """Float images of flat coordinate vectors under the real embeddings."""

    def __init__(self, tower: FieldTower):
        from .embedding import real_embeddings

        self.tower = tower
        self.n = tower.degree
        embs = real_embeddings(tower)
        basis = [tower.from_flat([1 if i == j else 0 for i in range(self.n)]) for j in range(self.n)]
        # rows: embeddings, columns: basis elements
        self.matrix = [[e.approx(bj) for bj in basis] for e in embs]

    def images(self, coords):
        return [sum(m * float(c) for m, c in zip(row, coords)) for row in self.matrix]

    def coordinate_bounds(self, radius):
        """Bounds on |coordinate| for elements with every image in [-radius, radius]."""
        import mpmath

        inv = mpmath.inverse(mpmath.matrix(self.matrix))
        return [float(radius * sum(abs(inv[i, j]) for j in range(self.n))) * (1 + 1e-9) + 1e-9 for i in range(self.n)]


def _square_candidates(tower, emb, target_images, bound):
    """Sign-normalised totally real integers y with y^2 <= target everywhere and height <= bound."""
    denom = 2**tower.height
    radius = max(target_images) ** 0.5 if target_images else 0.0
    cbounds = emb.coordinate_bounds(radius)
    ranges = []
    for cb in cbounds:
        k = min(int(bound * denom), int(cb * denom + 1e-9))
        ranges.append(range(-k, k + 1))
    slack = 1e-9 * (1 + max(target_images))
    out = []
    for ks in product(*ranges):
        nz = next((k for k in ks if k), 0)
        if nz < 0:
            continue
        coords = [Fraction(k, denom) for k in ks]
        imgs = emb.images(coords)
        if any(v * v > t + slack for v, t in zip(imgs, target_images)):
            continue
        y = tower.from_flat(coords)
        if not is_algebraic_integer(y):
            continue
        out.append((sum(v * v for v in imgs), tuple(coords), y))
    out.sort(key=lambda t: (t[0], t[1]))
    return [y for _, _, y in out]


def _four_squares(target: AlgNum, cands, emb):
    """Lexicographically least index quadruple (i <= j <= k <= l) of candidates whose squares sum to target."""
    tgt_imgs = emb.images(target.flatten())
    squares = [y * y for y in cands]
    sq_imgs = [emb.images(s.flatten()) for s in squares]
    slack = 1e-9 * (1 + max(map(abs, tgt_imgs)))
    pairs = {}
    order = []
    for i in range(len(cands)):
        for j in range(i, len(cands)):
            imgs = [p + q for p, q in zip(sq_imgs[i], sq_imgs[j])]
            if any(v > t + slack for v, t in zip(imgs, tgt_imgs)):
                continue
            s = squares[i] + squares[j]
            key = tuple(s.flatten())
            pairs.setdefault(key, []).append((i, j))
            order.append((i, j, key))
    tkey = target.flatten()
    for i, j, key in order:
        rest = tuple(t - k for t, k in zip(tkey, key))
        for k, l in pairs.get(rest, ()):
            if k >= j:
                return [cands[i], cands[j], cands[k], cands[l]]
    return None


def search_four_squares(x: AlgNum, a: int, b: int, height_bound: int = 8) -> Optional[FourSquaresCert]:
    """Bounded search for a four-squares certificate of ``0 << x << a/b``.

    ``y0`` runs over 1..height_bound and the other witnesses over elements
    whose power-basis coordinates have denominator dividing ``2^height`` and
    absolute value at most ``height_bound``. None means nothing was found in
    that box, not that no certificate exists.
    """
    tower = x.tower
    if b <= 0:
        raise PreconditionFailed("b must be positive")
    if not is_algebraic_integer(x):
        raise NotAlgebraicInteger(f"x = {x} is not an algebraic integer")
    if not totally_in(x, IntervalSpec.open(0, Fraction(a, b))):
        raise PreconditionFailed(f"x = {x} does not satisfy 0 << x << {a}/{b}")
    if not tower.is_totally_real():
        raise PreconditionFailed("four-squares search needs a totally real tower")
    emb = _Embedder(tower)
    for y0 in range(1, height_bound + 1):
        t1 = x * (y0 * y0)
        t2 = (x * (-b) + a) * (y0 * y0)
        imgs1 = emb.images(t1.flatten())
        imgs2 = emb.images(t2.flatten())
        cands = _square_candidates(tower, emb, [max(p, q) for p, q in zip(imgs1, imgs2)], height_bound)
        first = _four_squares(t1, cands, emb)
        if first is None:
            continue
        second = _four_squares(t2, cands, emb)
        if second is None:
            continue
        cert = FourSquaresCert(x, a, b, tuple([tower.rational(y0)] + first + second))
        if not verify_four_squares(cert).ok:
            raise AssertionError("search produced a certificate that fails verification")
        return cert
    return None
