"""Number fields presented as towers of square-root extensions.

A :class:`FieldTower` is a base field ``Q[x]/(f)`` followed by steps that each
adjoin a square root ``s_k`` of an element ``delta_k`` of the tower below.
Elements (:class:`AlgNum`) are stored as nested coefficient trees: at height 0
a tuple of ``deg f`` Fractions, at height ``k`` a pair ``(c0, c1)`` of height
``k - 1`` trees standing for ``c0 + c1 * s_k``.

Irreducibility of the steps is never proven up front. Inverting a nonzero
zero divisor raises :class:`~trcert.errors.ReducibleTower` naming the step
that failed.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import isqrt

from .errors import (
    DivisionByZero,
    NotCMTower,
    ReducibleTower,
    TowerMismatch,
)
from .poly import RatPoly, as_poly, cyclotomic, rat, rat_to_str

_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------
# coefficient-tree kernels


def _zero(n0, h):
    t = (_ZERO,) * n0
    for _ in range(h):
        t = (t, t)
    return t


def _is_zero(t):
    if isinstance(t[0], Fraction):
        return not any(t)
    return _is_zero(t[0]) and _is_zero(t[1])


def _add(a, b):
    if isinstance(a[0], Fraction):
        return tuple(x + y for x, y in zip(a, b))
    return (_add(a[0], b[0]), _add(a[1], b[1]))


def _sub(a, b):
    if isinstance(a[0], Fraction):
        return tuple(x - y for x, y in zip(a, b))
    return (_sub(a[0], b[0]), _sub(a[1], b[1]))


def _neg(a):
    if isinstance(a[0], Fraction):
        return tuple(-x for x in a)
    return (_neg(a[0]), _neg(a[1]))


def _scale(a, q):
    if isinstance(a[0], Fraction):
        return tuple(x * q for x in a)
    return (_scale(a[0], q), _scale(a[1], q))


def _flatten(t, out):
    if isinstance(t[0], Fraction):
        out.extend(t)
    else:
        _flatten(t[0], out)
        _flatten(t[1], out)
    return out


def _unflatten(vec, n0, h):
    if h == 0:
        return tuple(vec)
    half = len(vec) // 2
    return (_unflatten(vec[:half], n0, h - 1), _unflatten(vec[half:], n0, h - 1))


def _lift(t, n0, h_from, h_to):
    for h in range(h_from, h_to):
        t = (t, _zero(n0, h))
    return t


def _height(t):
    h = 0
    while not isinstance(t[0], Fraction):
        t = t[0]
        h += 1
    return h


def _lower(t):
    """Drop top levels whose square-root coefficient vanishes."""
    while not isinstance(t[0], Fraction) and _is_zero(t[1]):
        t = t[0]
    return t


def _tree_to_json(t):
    if isinstance(t[0], Fraction):
        return [rat_to_str(c) for c in t]
    return [_tree_to_json(t[0]), _tree_to_json(t[1])]


def _json_depth(data):
    if isinstance(data, (str, int)):
        return -1
    if all(isinstance(c, (str, int)) for c in data):
        return 0
    return 1 + _json_depth(data[0])


def _tree_from_json(data, n0):
    if isinstance(data, (str, int)):
        return (rat(data),) + (_ZERO,) * (n0 - 1)
    if all(isinstance(c, (str, int)) for c in data):
        coeffs = [rat(c) for c in data]
        if len(coeffs) > n0:
            raise ValueError(f"base element has {len(coeffs)} coefficients, field degree is {n0}")
        return tuple(coeffs) + (_ZERO,) * (n0 - len(coeffs))
    if len(data) != 2:
        raise ValueError("square-root level must have exactly two entries")
    left, right = data
    h = max(_json_depth(left), _json_depth(right), 0)
    a = _tree_from_json(left, n0)
    b = _tree_from_json(right, n0)
    return (_lift(a, n0, _height(a), h), _lift(b, n0, _height(b), h))


class FieldTower:
    """A base field ``Q[x]/(f)`` followed by quadratic square-root steps."""

    def __init__(self, base, steps=(), parent=None):
        base = as_poly(base)
        if base.degree < 1 or not base.is_monic():
            raise ValueError("base polynomial must be monic of degree >= 1")
        self.base = base
        self.n0 = base.degree
        self.steps = tuple(steps)
        self.height = len(self.steps)
        self.degree = self.n0 * 2**self.height
        self._parent = parent
        self._key = (base.coeffs, self.steps)
        self._hash = hash(self._key)
        self._cache = {}
        # x^(n0 + k) reduced mod f, for k = 0 .. n0 - 2
        n0 = self.n0
        red = []
        cur = [-c for c in base.coeffs[:-1]]
        for _ in range(max(n0 - 1, 0)):
            red.append(tuple(cur))
            top = cur[-1]
            cur = [_ZERO] + cur[:-1]
            if top:
                cur = [c - top * b for c, b in zip(cur, base.coeffs[:-1])]
        self._red = red

    # -- construction --------------------------------------------------
    @classmethod
    def make_base(cls, f) -> FieldTower:
        return cls(as_poly(f))

    @classmethod
    def rationals(cls) -> FieldTower:
        return cls(RatPoly.x())

    def adjoin_sqrt(self, delta) -> FieldTower:
        """Tower of twice the degree containing a square root of ``delta``."""
        delta = self.coerce(delta)
        if delta.is_zero():
            raise ValueError("cannot adjoin the square root of zero")
        return FieldTower(self.base, self.steps + (delta.tree,), parent=self)

    def prefix(self, h: int) -> FieldTower:
        if not 0 <= h <= self.height:
            raise ValueError(f"no prefix of height {h}")
        t = self
        while t.height > h:
            t = t._parent if t._parent is not None else FieldTower(self.base, self.steps[: t.height - 1])
        return t

    def is_prefix_of(self, other: FieldTower) -> bool:
        return (
            other.height >= self.height
            and other.base.coeffs == self.base.coeffs
            and other.steps[: self.height] == self.steps
        )

    def __eq__(self, other):
        return isinstance(other, FieldTower) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FieldTower(base={self.base}, steps={len(self.steps)}, degree={self.degree})"

    # -- elements ------------------------------------------------------
    def element(self, tree) -> AlgNum:
        return AlgNum(self, tree)

    def zero(self) -> AlgNum:
        return AlgNum(self, _zero(self.n0, self.height))

    def one(self) -> AlgNum:
        return self.rational(1)

    def rational(self, q) -> AlgNum:
        t = (rat(q),) + (_ZERO,) * (self.n0 - 1)
        return AlgNum(self, _lift(t, self.n0, 0, self.height))

    def gen(self) -> AlgNum:
        """The class of x in the base field."""
        if self.n0 == 1:
            return self.rational(-self.base.coeffs[0])
        t = (_ZERO, _ONE) + (_ZERO,) * (self.n0 - 2)
        return AlgNum(self, _lift(t, self.n0, 0, self.height))

    def root(self, k: int) -> AlgNum:
        """The square root adjoined at step ``k`` (1-based), lifted to this tower."""
        if not 1 <= k <= self.height:
            raise ValueError(f"tower has no step {k}")
        z = _zero(self.n0, k - 1)
        one = _lift((_ONE,) + (_ZERO,) * (self.n0 - 1), self.n0, 0, k - 1)
        return AlgNum(self, _lift((z, one), self.n0, k, self.height))

    def delta(self, k: int) -> AlgNum:
        """The radicand of step ``k``, as an element of the height ``k - 1`` prefix."""
        return AlgNum(self.prefix(k - 1), self.steps[k - 1])

    def from_flat(self, vec) -> AlgNum:
        vec = [rat(c) for c in vec]
        if len(vec) != self.degree:
            raise ValueError("flat vector has the wrong length")
        return AlgNum(self, _unflatten(vec, self.n0, self.height))

    def coerce(self, value) -> AlgNum:
        if isinstance(value, AlgNum):
            if value.tower == self:
                return value
            if value.tower.is_prefix_of(self):
                return value.lift(self)
            raise TowerMismatch("element does not belong to a prefix of this tower")
        if isinstance(value, (int, Fraction)):
            return self.rational(value)
        if isinstance(value, str):
            return self.rational(rat(value))
        raise TypeError(f"cannot coerce {type(value).__name__} into a tower")

    def element_from_json(self, data) -> AlgNum:
        if isinstance(data, str) and data.strip().startswith("["):
            data = json.loads(data)
        t = _tree_from_json(data, self.n0)
        h = _height(t)
        if h > self.height:
            raise ValueError("element is deeper than the tower")
        return AlgNum(self, _lift(t, self.n0, h, self.height))

    # -- structure -----------------------------------------------------
    @property
    def signature(self):
        from .embedding import signature

        if "signature" not in self._cache:
            self._cache["signature"] = signature(self)
        return self._cache["signature"]

    def is_totally_real(self) -> bool:
        return self.signature.s == 0

    def is_cm(self) -> bool:
        """Top step is a totally imaginary quadratic extension of a totally real field."""
        if "cm" not in self._cache:
            if self.height == 0:
                ok = False
            else:
                below = self.prefix(self.height - 1)
                ok = below.is_totally_real() and self.signature.r == 0
            self._cache["cm"] = ok
        return self._cache["cm"]

    # -- serialization -------------------------------------------------
    def to_json(self):
        return {"base": self.base.to_json(), "steps": [_tree_to_json(s) for s in self.steps]}

    @classmethod
    def from_json(cls, data) -> FieldTower:
        if isinstance(data, str):
            data = json.loads(data)
        tower = cls(RatPoly.from_json(data["base"]))
        for step in data.get("steps", []):
            tower = tower.adjoin_sqrt(tower.element_from_json(step))
        return tower

    # -- kernels needing the tower ---------------------------------------
    def _mul(self, a, b, h):
        if h == 0:
            return self._mul_base(a, b)
        a0, a1 = a
        b0, b1 = b
        d = self.steps[h - 1]
        p00 = self._mul(a0, b0, h - 1)
        p11 = self._mul(a1, b1, h - 1)
        # Karatsuba on the cross term
        cross = _sub(_sub(self._mul(_add(a0, a1), _add(b0, b1), h - 1), p00), p11)
        return (_add(p00, self._mul(p11, d, h - 1)), cross)

    def _mul_base(self, a, b):
        n0 = self.n0
        if n0 == 1:
            return (a[0] * b[0],)
        prod = [_ZERO] * (2 * n0 - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        out = prod[:n0]
        for k, c in enumerate(prod[n0:]):
            if c:
                row = self._red[k]
                for i in range(n0):
                    out[i] += c * row[i]
        return tuple(out)

    def _inv(self, a, h):
        if h == 0:
            return self._inv_base(a)
        a0, a1 = a
        d = self.steps[h - 1]
        norm = _sub(self._mul(a0, a0, h - 1), self._mul(self._mul(a1, a1, h - 1), d, h - 1))
        if _is_zero(norm):
            raise ReducibleTower(h, f"step {h}: radicand is a square in the tower below")
        ninv = self._inv(norm, h - 1)
        return (self._mul(a0, ninv, h - 1), _neg(self._mul(a1, ninv, h - 1)))

    def _inv_base(self, a):
        if self.n0 == 1:
            return (1 / a[0],)
        # extended Euclid: s*a + t*f = g
        r0, r1 = self.base, RatPoly(a)
        s0, s1 = RatPoly(), RatPoly((1,))
        while not r1.is_zero():
            q, r = divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
        if r0.degree > 0:
            raise ReducibleTower(0, "base polynomial is reducible")
        inv = s0 * (1 / r0.coeffs[0])
        inv = inv % self.base
        return tuple(inv[i] for i in range(self.n0))


class AlgNum:
    """An element of a :class:`FieldTower`."""

    __slots__ = ("tower", "tree", "_minpoly")

    def __init__(self, tower: FieldTower, tree):
        self.tower = tower
        self.tree = tree
        self._minpoly = None

    # -- coercion ------------------------------------------------------
    def lift(self, tower: FieldTower) -> AlgNum:
        if tower == self.tower:
            return self
        if not self.tower.is_prefix_of(tower):
            raise TowerMismatch("target tower does not extend this element's tower")
        return AlgNum(tower, _lift(self.tree, tower.n0, self.tower.height, tower.height))

    def _pair(self, other):
        if isinstance(other, AlgNum):
            if other.tower == self.tower:
                return self.tower, self.tree, other.tree
            if self.tower.is_prefix_of(other.tower):
                return other.tower, self.lift(other.tower).tree, other.tree
            if other.tower.is_prefix_of(self.tower):
                return self.tower, self.tree, other.lift(self.tower).tree
            raise TowerMismatch("elements live in unrelated towers")
        if isinstance(other, (int, Fraction)):
            return self.tower, self.tree, self.tower.rational(other).tree
        return None

    # -- ring operations -----------------------------------------------
    def __add__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        return AlgNum(p[0], _add(p[1], p[2]))

    __radd__ = __add__

    def __sub__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        return AlgNum(p[0], _sub(p[1], p[2]))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return AlgNum(self.tower, _neg(self.tree))

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgNum(self.tower, _scale(self.tree, rat(other)))
        p = self._pair(other)
        if p is None:
            return NotImplemented
        return AlgNum(p[0], p[0]._mul(p[1], p[2], p[0].height))

    __rmul__ = __mul__

    def invert(self) -> AlgNum:
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        return AlgNum(self.tower, self.tower._inv(self.tree, self.tower.height))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by zero")
            return AlgNum(self.tower, _scale(self.tree, 1 / rat(other)))
        if isinstance(other, AlgNum):
            return self * other.invert()
        return NotImplemented

    def __rtruediv__(self, other):
        return self.invert() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        result = self.tower.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparisons -----------------------------------------------------
    def is_zero(self) -> bool:
        return _is_zero(self.tree)

    def __eq__(self, other):
        try:
            p = self._pair(other)
        except TowerMismatch:
            return False
        if p is None:
            return NotImplemented
        return p[1] == p[2]

    def __hash__(self):
        return hash((self.tower.base.coeffs, _lower(self.tree)))

    def is_rational(self) -> bool:
        flat = self.flatten()
        return not any(flat[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.flatten()[0]

    # -- views -----------------------------------------------------------
    def flatten(self):
        """Coordinates in the tower's product basis ``x^i * prod(s_k)``."""
        return _flatten(self.tree, [])

    def components(self):
        """``(c0, c1)`` with ``self = c0 + c1 * s_top``, both in the tower below."""
        if self.tower.height == 0:
            raise ValueError("base-field elements have no square-root components")
        below = self.tower.prefix(self.tower.height - 1)
        return AlgNum(below, self.tree[0]), AlgNum(below, self.tree[1])

    def lowered(self) -> AlgNum:
        """The same element in the smallest prefix tower that contains it."""
        t = _lower(self.tree)
        return AlgNum(self.tower.prefix(_height(t)), t)

    def conj(self) -> AlgNum:
        return conj(self)

    def min_poly(self) -> RatPoly:
        if self._minpoly is None:
            self._minpoly = min_poly(self)
        return self._minpoly

    def to_json(self):
        return _tree_to_json(self.tree)

    def __repr__(self):
        return f"AlgNum({self})"

    def __str__(self):
        return _tree_str(self.tree, self.tower.n0, "x")


def _tree_str(t, n0, var):
    if isinstance(t[0], Fraction):
        terms = []
        for i, c in enumerate(t):
            if c == 0:
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}")
        if not terms:
            return "0"
        return " + ".join(terms).replace("+ -", "- ")
    h = _height(t)
    c0 = _tree_str(t[0], n0, var)
    c1 = _tree_str(t[1], n0, var)
    parts = []
    if c0 != "0":
        parts.append(c0)
    if c1 != "0":
        parts.append(f"s{h}" if c1 == "1" else f"({c1})*s{h}")
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------
# minimal polynomials


def min_poly(alpha: AlgNum) -> RatPoly:
    """Monic minimal polynomial over Q from the Krylov sequence 1, a, a^2, ...

    The first power that is a rational linear combination of the lower ones
    gives the minimal polynomial of multiplication by ``alpha``, which in a
    field is irreducible without any factoring.
    """
    tower = alpha.tower
    n = tower.degree
    rows = []  # (pivot, vec, combo) with vec[pivot] == 1
    power = tower.one()
    for k in range(n + 1):
        vec = power.flatten()
        combo = [_ZERO] * (k + 1)
        combo[k] = _ONE
        for piv, rvec, rcombo in rows:
            c = vec[piv]
            if c:
                vec = [v - c * r for v, r in zip(vec, rvec)]
                for i, rc in enumerate(rcombo):
                    combo[i] -= c * rc
        piv = next((i for i, v in enumerate(vec) if v), None)
        if piv is None:
            return RatPoly(combo)
        inv = 1 / vec[piv]
        rows.append((piv, [v * inv for v in vec], [c * inv for c in combo]))
        power = power * alpha
    raise AssertionError("Krylov sequence failed to become dependent")


# ---------------------------------------------------------------------
# complex conjugation on CM towers


def conj(alpha: AlgNum) -> AlgNum:
    """Negate the top square root; complex conjugation when the tower is CM."""
    tower = alpha.tower
    if not tower.is_cm():
        raise NotCMTower("top step is not a totally imaginary extension of a totally real field")
    return AlgNum(tower, (alpha.tree[0], _neg(alpha.tree[1])))


# ---------------------------------------------------------------------
# square roots inside a tower


def _rational_sqrt(q: Fraction):
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _quadratic_sqrt(a0, a1, delta, sqrt_below):
    """Square root of ``a0 + a1*s`` where ``s^2 = delta``; None when absent.

    Coefficients are elements of the field below, with arithmetic operators,
    and ``sqrt_below`` extracts square roots there.
    """
    if a1 == 0:
        r = sqrt_below(a0)
        if r is not None:
            return r, a1 * 0
        r = sqrt_below(a0 / delta)
        if r is not None:
            return a1 * 0, r
        return None
    n = sqrt_below(a0 * a0 - a1 * a1 * delta)
    if n is None:
        return None
    for cand in (n, -n):
        b0 = sqrt_below((a0 + cand) / 2)
        if b0 is not None and b0 != 0:
            b1 = a1 / (b0 * 2)
            if b0 * b0 + b1 * b1 * delta == a0 and b0 * b1 * 2 == a1:
                return b0, b1
    return None


def sqrt_in_tower(alpha: AlgNum):
    """A square root of ``alpha`` inside its own tower, or None.

    Exact for every square-root step and for bases of degree <= 2. For larger
    bases only squares of rationals are recognised; a None there means
    "not found" and callers fall back on adjoining the root lazily.
    """
    tower = alpha.tower
    if alpha.is_zero():
        return tower.zero()
    if tower.height == 0:
        return _base_sqrt(alpha)
    c0, c1 = alpha.components()
    res = _quadratic_sqrt(c0, c1, tower.delta(tower.height), sqrt_in_tower)
    if res is None:
        return None
    b0, b1 = res
    return b0.lift(tower) + b1.lift(tower) * tower.root(tower.height)


def _base_sqrt(alpha: AlgNum):
    tower = alpha.tower
    flat = alpha.flatten()
    if not any(flat[1:]):
        r = _rational_sqrt(flat[0])
        if r is not None:
            return tower.rational(r)
        if tower.n0 == 1:
            return None
    if tower.n0 == 2:
        # x = (-p + w)/2 with w^2 = disc
        q, p = tower.base.coeffs[0], tower.base.coeffs[1]
        disc = p * p - 4 * q
        a0, a1 = flat
        res = _quadratic_sqrt(a0 - a1 * p / 2, a1 / 2, disc, _rational_sqrt)
        if res is None:
            return None
        b0, b1 = res
        return tower.from_flat([b0 + b1 * p, 2 * b1])
    # bases of degree > 2 would need factoring over the field
    return None


# ---------------------------------------------------------------------
# named towers


def quadratic_tower(d) -> FieldTower:
    """Q(sqrt(d)) as one square-root step over the rationals."""
    return FieldTower.rationals().adjoin_sqrt(FieldTower.rationals().rational(d))


def cyclotomic_base(n: int) -> FieldTower:
    """Q(zeta_n) as the single base step Q[x]/(Phi_n)."""
    return FieldTower.make_base(cyclotomic(n))


def cyclotomic_cm_tower(n: int):
    """Q(zeta_n) as a CM tower over its maximal real subfield.

    The base is generated by ``theta = zeta + 1/zeta`` and the single step
    adjoins ``sqrt(theta^2 - 4)``. Returns ``(tower, zeta)`` with
    ``zeta = (theta + s) / 2``.
    """
    if n < 3:
        raise ValueError("needs n >= 3 so that zeta_n is not real")
    cyc = cyclotomic_base(n)
    z = cyc.gen()
    real_base = FieldTower.make_base((z + z.invert()).min_poly())
    theta = real_base.gen()
    tower = real_base.adjoin_sqrt(theta * theta - 4)
    zeta = (theta.lift(tower) + tower.root(1)) / 2
    return tower, zeta
