"""Exact univariate polynomial arithmetic over the rationals.

Polynomials are immutable :class:`RatPoly` values holding a tuple of
:class:`fractions.Fraction` coefficients, lowest degree first, with no trailing
zero (the zero polynomial is the empty tuple).

Besides ring arithmetic the module provides resultants (subresultant PRS on
integer images), gcd and squarefree parts, Sturm chains with real root
counting and isolation, and cyclotomic polynomials.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt, lcm

from .errors import NotSquarefree, ZeroPolynomial

Rat = Fraction


def rat(value) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def rat_to_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _strip(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


class RatPoly:
    """A polynomial with rational coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        object.__setattr__(self, "coeffs", tuple(_strip(rat(c) for c in coeffs)))

    def __setattr__(self, name, value):
        raise AttributeError("RatPoly is immutable")

    def __reduce__(self):
        return (RatPoly, (self.coeffs,))

    @classmethod
    def x(cls) -> RatPoly:
        return cls((0, 1))

    @classmethod
    def constant(cls, c) -> RatPoly:
        return cls((c,))

    @classmethod
    def from_roots(cls, roots) -> RatPoly:
        p = cls((1,))
        for r in roots:
            p = p * cls((-rat(r), 1))
        return p

    # -- basic queries -------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __eq__(self, other):
        if isinstance(other, RatPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RatPoly((other,)).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"RatPoly({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if i == 0:
                body = str(a)
            else:
                mono = "x" if i == 1 else f"x^{i}"
                body = mono if a == 1 else f"{a}*{mono}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    # -- arithmetic ----------------------------------------------------
    @staticmethod
    def _coerce(other):
        if isinstance(other, RatPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return RatPoly((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        return RatPoly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return RatPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return RatPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RatPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = RatPoly((1,)), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return RatPoly(), self
        quo = [Fraction(0)] * (dq + 1)
        lead = other.lead
        db = other.degree
        for k in range(dq, -1, -1):
            c = rem[k + db] / lead
            quo[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return RatPoly(quo), RatPoly(rem[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> RatPoly:
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def __call__(self, x):
        """Evaluate by Horner's rule; works for any ring element supporting * and +."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> RatPoly:
        return RatPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def monic(self) -> RatPoly:
        if not self.coeffs:
            return self
        lead = self.lead
        return RatPoly(c / lead for c in self.coeffs)

    def shift(self, c) -> RatPoly:
        """Return p(x + c)."""
        c = rat(c)
        out = RatPoly()
        lin = RatPoly((c, 1))
        for coeff in reversed(self.coeffs):
            out = out * lin + coeff
        return out

    def scale_var(self, c) -> RatPoly:
        """Return p(c*x)."""
        c = rat(c)
        return RatPoly(a * c**i for i, a in enumerate(self.coeffs))

    def compose(self, q: RatPoly) -> RatPoly:
        out = RatPoly()
        for coeff in reversed(self.coeffs):
            out = out * q + coeff
        return out

    def integer_image(self):
        """Return ``(ints, scale)`` with ``ints = scale * self`` a primitive integer list.

        The scale is positive, so signs of values are preserved.
        """
        if not self.coeffs:
            return [], Fraction(1)
        den = lcm(*(c.denominator for c in self.coeffs))
        ints = [c.numerator * (den // c.denominator) for c in self.coeffs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        ints = [v // g for v in ints]
        return ints, Fraction(den, g)

    # -- serialization -------------------------------------------------
    def to_json(self):
        return [rat_to_str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> RatPoly:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(rat(c) for c in data)


def as_poly(p) -> RatPoly:
    return p if isinstance(p, RatPoly) else RatPoly(p)


# ---------------------------------------------------------------------
# gcd, resultant, squarefree part


def poly_gcd(p: RatPoly, q: RatPoly) -> RatPoly:
    """Monic gcd over Q (zero only when both inputs are zero)."""
    a, b = as_poly(p), as_poly(q)
    while not b.is_zero():
        a, b = b, (a % b).monic()
    return a.monic()


def _int_strip(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _int_content(a):
    g = 0
    for v in a:
        g = gcd(g, v)
    return g


def _int_prem(a, b):
    """Pseudo-remainder: lc(b)^(deg a - deg b + 1) * a mod b, over Z."""
    db = len(b) - 1
    lb = b[-1]
    r = list(a)
    e = len(a) - len(b) + 1
    while r and len(r) - 1 >= db:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [c * lb for c in r]
        for i, c in enumerate(b):
            r[i + shift] -= lr * c
        r.pop()
        _int_strip(r)
        e -= 1
    if e > 0:
        f = lb**e
        r = [c * f for c in r]
    return r


def _int_resultant(A, B):
    """Resultant of integer polynomials by the subresultant algorithm."""
    if not A or not B:
        return 0
    dA, dB = len(A) - 1, len(B) - 1
    s = 1
    if dA < dB:
        A, B = B, A
        dA, dB = dB, dA
        if dA % 2 and dB % 2:
            s = -1
    if dB == 0:
        return s * B[0] ** dA
    a, b = _int_content(A), _int_content(B)
    A = [c // a for c in A]
    B = [c // b for c in B]
    t = a**dB * b**dA
    g = h = 1
    while True:
        dA, dB = len(A) - 1, len(B) - 1
        delta = dA - dB
        if dA % 2 and dB % 2:
            s = -s
        R = _int_prem(A, B)
        A = B
        if not R:
            return 0
        div = g * h**delta
        B = [c // div for c in R]
        g = A[-1]
        if delta:
            h = g**delta // h ** (delta - 1)
        if len(B) == 1:
            dA = len(A) - 1
            h = B[0] ** dA // h ** (dA - 1)
            return s * t * h


def resultant(p: RatPoly, q: RatPoly) -> Fraction:
    """Res(p, q), zero exactly when p and q share a complex root."""
    p, q = as_poly(p), as_poly(q)
    if p.is_zero() or q.is_zero():
        raise ZeroPolynomial("resultant of a zero polynomial")
    P, sp = p.integer_image()
    Q, sq = q.integer_image()
    return Fraction(_int_resultant(P, Q)) / (sp**q.degree * sq**p.degree)


def squarefree_part(p: RatPoly) -> RatPoly:
    """Monic p / gcd(p, p'): same roots, all simple."""
    p = as_poly(p)
    if p.is_zero():
        raise ZeroPolynomial("squarefree part of zero")
    if p.degree == 0:
        return RatPoly((1,))
    return p.exact_div(poly_gcd(p, p.derivative())).monic()


def is_squarefree(p: RatPoly) -> bool:
    p = as_poly(p)
    return not p.is_zero() and poly_gcd(p, p.derivative()).degree == 0


# ---------------------------------------------------------------------
# Sturm chains


class SturmChain:
    """Canonical Sturm sequence p, p', -rem(p, p'), ... of a squarefree polynomial."""

    __slots__ = ("polys", "_scaled")

    def __init__(self, p: RatPoly):
        p = as_poly(p)
        if p.is_zero():
            raise ZeroPolynomial("Sturm chain of zero")
        polys = [p]
        if p.degree > 0:
            polys.append(p.derivative())
            while True:
                r = polys[-2] % polys[-1]
                if r.is_zero():
                    break
                polys.append(-r)
        if polys[-1].degree > 0:
            raise NotSquarefree(f"{p} is not squarefree")
        self.polys = tuple(polys)
        # positive rescaling keeps signs and makes evaluation integer-only
        self._scaled = tuple(q.integer_image()[0] for q in self.polys)

    def __len__(self):
        return len(self.polys)

    def variations(self, x) -> int:
        """Sign variations at a rational point, or at +-inf when x is None-signed.

        ``x`` may be a Fraction/int, or the strings ``"+inf"`` / ``"-inf"``.
        """
        signs = []
        if x == "+inf" or x == "-inf":
            neg = x == "-inf"
            for q in self._scaled:
                s = 1 if q[-1] > 0 else -1
                if neg and (len(q) - 1) % 2:
                    s = -s
                signs.append(s)
        else:
            x = rat(x)
            num, den = x.numerator, x.denominator
            for q in self._scaled:
                # den^deg * q(num/den), sign-equivalent since den > 0
                acc = 0
                dpow = 1
                for c in reversed(q):
                    acc = acc * num + c * dpow
                    dpow *= den
                if acc:
                    signs.append(1 if acc > 0 else -1)
        count = 0
        prev = None
        for s in signs:
            if prev is not None and s != prev:
                count += 1
            prev = s
        return count

    def count(self, lo, hi) -> int:
        """Distinct real roots in (lo, hi]; ``None`` endpoints mean -inf / +inf."""
        vlo = self.variations("-inf" if lo is None else lo)
        vhi = self.variations("+inf" if hi is None else hi)
        return vlo - vhi


def sturm_chain(p: RatPoly) -> SturmChain:
    return SturmChain(p)


def sturm_count(p: RatPoly, lo, hi) -> int:
    """Number of distinct real roots of squarefree ``p`` in the half-open (lo, hi]."""
    lo, hi = rat(lo), rat(hi)
    if not lo < hi:
        raise ValueError("sturm_count needs lo < hi")
    return SturmChain(p).count(lo, hi)


def cauchy_bound(p: RatPoly) -> Fraction:
    """1 + max|c_i| / |lead|: every complex root has modulus strictly below it."""
    p = as_poly(p)
    lead = abs(p.lead)
    return 1 + max((abs(c) for c in p.coeffs[:-1]), default=Fraction(0)) / lead


def count_real_roots(p: RatPoly) -> int:
    p = as_poly(p)
    b = cauchy_bound(p)
    return SturmChain(p).count(-b, b)


def isolate_real_roots(p: RatPoly, width=None):
    """Disjoint isolating intervals (lo, hi] for the real roots of squarefree p.

    Intervals are returned in increasing order. When ``width`` is given each
    interval is bisected until ``hi - lo <= width``; a rational root hit
    exactly is returned as the degenerate interval ``(r, r)``.
    """
    p = as_poly(p)
    chain = SturmChain(p)
    b = cauchy_bound(p)
    out = []
    stack = [(-b, b, chain.count(-b, b))]
    while stack:
        lo, hi, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        n_left = chain.count(lo, mid)
        stack.append((mid, hi, n - n_left))
        stack.append((lo, mid, n_left))
    out.sort()
    if width is not None:
        out = [refine_root(p, lo, hi, width) for lo, hi in out]
    return out


def refine_root(p: RatPoly, lo, hi, width):
    """Bisect an isolating interval (lo, hi] of a simple root down to ``width``."""
    width = rat(width)
    lo, hi = rat(lo), rat(hi)
    if lo == hi:
        return lo, hi
    if p(hi) == 0:
        return hi, hi
    s_hi = 1 if p(hi) > 0 else -1
    while hi - lo > width:
        mid = (lo + hi) / 2
        v = p(mid)
        if v == 0:
            return mid, mid
        if (v > 0) == (s_hi > 0):
            hi = mid
        else:
            lo = mid
    return lo, hi


# ---------------------------------------------------------------------
# cyclotomic polynomials and arithmetic helpers


def divisors(n: int):
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def phi_inverse(k: int):
    """All n with euler_phi(n) == k, using phi(n) >= sqrt(n/2)."""
    return [n for n in range(1, 2 * k * k + 3) if euler_phi(n) == k]


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> RatPoly:
    """The n-th cyclotomic polynomial, by exact division of x^n - 1."""
    if n < 1:
        raise ValueError("cyclotomic index must be positive")
    p = RatPoly([-1] + [0] * (n - 1) + [1])
    for d in divisors(n):
        if d < n:
            p = p.exact_div(cyclotomic(d))
    return p


def lagrange_interpolate(points) -> RatPoly:
    """The unique polynomial of degree < len(points) through ``(x, y)`` pairs.

    Built from Newton divided differences, then expanded by Horner's rule.
    """
    xs = [rat(x) for x, _ in points]
    dd = [rat(y) for _, y in points]
    n = len(xs)
    if len(set(xs)) != n:
        raise ValueError("interpolation nodes must be distinct")
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level])
    coeffs = []
    for i in range(n - 1, -1, -1):
        # coeffs <- coeffs * (x - xs[i]) + dd[i]
        out = [Fraction(0)] * (len(coeffs) + 1)
        for j, c in enumerate(coeffs):
            out[j + 1] += c
            out[j] -= c * xs[i]
        out[0] += dd[i]
        coeffs = out
    return RatPoly(coeffs)
