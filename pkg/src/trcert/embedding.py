"""Embeddings of towers into R and C with rigorous rational enclosures.

Real embeddings are tracked structurally: an isolating interval for a real
root of the base polynomial plus a sign choice for every square-root step.
Images are enclosed by outward-rounded interval arithmetic, refined until a
sign is decided, so every decision is exact even though the intervals shrink
by bisection.

``embed`` encloses all conjugates of an element: real ones by Sturm
bisection on the minimal polynomial, complex ones by disks certified with the
bound ``|z - root| <= n |p(z) / p'(z)|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, isqrt

from .errors import NotSquarefree, ReducibleTower
from .poly import isolate_real_roots, rat, refine_root

_MAX_BITS = 1 << 14


@dataclass(frozen=True)
class Signature:
    r: int
    s: int

    @property
    def degree(self):
        return self.r + 2 * self.s

    def unit_rank(self):
        """Expected rank r + s - 1 of the unit group of any order."""
        return self.r + self.s - 1


# ---------------------------------------------------------------------
# rational interval arithmetic


def _round_out(lo, hi, bits):
    scale = 1 << bits
    return Fraction(floor(lo * scale), scale), Fraction(ceil(hi * scale), scale)


def _iv_mul(a, b):
    p = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(p), max(p)


def _iv_sqrt(a, bits):
    lo, hi = a
    scale = 1 << bits
    lo_s = max(lo, 0) * scale * scale
    hi_s = max(hi, 0) * scale * scale
    return Fraction(isqrt(floor(lo_s)), scale), Fraction(isqrt(ceil(hi_s)) + 1, scale)


class RealEmbedding:
    """One real embedding of a tower: a base root and a sign per step."""

    def __init__(self, tower, base_interval, signs):
        self.tower = tower
        self.base_interval = base_interval
        self.signs = tuple(signs)
        self._base_cache = {}

    def __repr__(self):
        lo, hi = self.base_interval
        return f"RealEmbedding(root in ({float(lo):.6g}, {float(hi):.6g}], signs={self.signs})"

    def _base_iv(self, bits):
        if bits not in self._base_cache:
            lo, hi = self.base_interval
            self._base_cache[bits] = refine_root(self.tower.base, lo, hi, Fraction(1, 1 << bits))
        return self._base_cache[bits]

    def _eval(self, tree, h, bits, memo):
        if h == 0:
            x = self._base_iv(bits)
            acc = (tree[-1], tree[-1])
            for c in reversed(tree[:-1]):
                acc = _iv_mul(acc, x)
                acc = (acc[0] + c, acc[1] + c)
                acc = _round_out(acc[0], acc[1], bits + 8)
            return acc
        c0 = self._eval(tree[0], h - 1, bits, memo)
        c1 = self._eval(tree[1], h - 1, bits, memo)
        if c1 == (0, 0):
            return c0
        if h not in memo:
            d = self._eval(self.tower.steps[h - 1], h - 1, bits, memo)
            root = _iv_sqrt(d, bits + 8)
            if self.signs[h - 1] < 0:
                root = (-root[1], -root[0])
            memo[h] = root
        prod = _iv_mul(c1, memo[h])
        return _round_out(c0[0] + prod[0], c0[1] + prod[1], bits + 8)

    def enclose(self, alpha, bits=32):
        """Rational interval containing the image of ``alpha``."""
        alpha = self.tower.coerce(alpha)
        return self._eval(alpha.tree, self.tower.height, bits, {})

    def sign(self, alpha) -> int:
        alpha = self.tower.coerce(alpha)
        if alpha.is_zero():
            return 0
        bits = 16
        while True:
            lo, hi = self.enclose(alpha, bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            if bits == 64 and alpha.min_poly().coeffs[0] == 0:
                raise ReducibleTower(self.tower.height, "nonzero element with a zero conjugate")
            if bits >= _MAX_BITS:
                raise RuntimeError("sign refinement did not converge")
            bits *= 2

    def approx(self, alpha, bits=48) -> float:
        lo, hi = self.enclose(alpha, bits)
        return float((lo + hi) / 2)


def real_embeddings(tower):
    """All real embeddings of ``tower``, in a fixed deterministic order."""
    cached = tower._cache.get("real_embeddings")
    if cached is not None:
        return cached
    if tower.height == 0:
        try:
            ivs = isolate_real_roots(tower.base)
        except NotSquarefree:
            raise ReducibleTower(0, "base polynomial has repeated roots") from None
        out = [RealEmbedding(tower, iv, ()) for iv in ivs]
    else:
        below = tower.prefix(tower.height - 1)
        delta = tower.delta(tower.height)
        out = []
        for emb in real_embeddings(below):
            s = emb.sign(delta)
            if s == 0:
                raise ReducibleTower(tower.height, "radicand vanishes")
            if s > 0:
                for sign in (1, -1):
                    child = RealEmbedding(tower, emb.base_interval, emb.signs + (sign,))
                    child._base_cache = emb._base_cache
                    out.append(child)
    tower._cache["real_embeddings"] = out
    return out


def signature(tower) -> Signature:
    r = len(real_embeddings(tower))
    return Signature(r, (tower.degree - r) // 2)


# ---------------------------------------------------------------------
# enclosures of all conjugates


@dataclass(frozen=True)
class Box:
    re_lo: Fraction
    re_hi: Fraction
    im_lo: Fraction
    im_hi: Fraction

    @property
    def is_real(self):
        return self.im_lo == 0 and self.im_hi == 0

    @property
    def width(self):
        return max(self.re_hi - self.re_lo, self.im_hi - self.im_lo)

    def contains(self, z) -> bool:
        z = complex(z)
        return (
            float(self.re_lo) - 1e-12 <= z.real <= float(self.re_hi) + 1e-12
            and float(self.im_lo) - 1e-12 <= z.imag <= float(self.im_hi) + 1e-12
        )

    def center(self) -> complex:
        return complex(float((self.re_lo + self.re_hi) / 2), float((self.im_lo + self.im_hi) / 2))


@dataclass(frozen=True)
class EmbeddingEnclosure:
    boxes: tuple
    width: Fraction

    def real_boxes(self):
        return [b for b in self.boxes if b.is_real]


def _mpf_to_fraction(x):
    sign, man, exp, _ = x._mpf_
    man = -int(man) if sign else int(man)
    exp = int(exp)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2 ** (-exp))


def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _ceval(coeffs, z):
    acc = (Fraction(0), Fraction(0))
    for c in reversed(coeffs):
        acc = _cmul(acc, z)
        acc = (acc[0] + c, acc[1])
    return acc


def _sqrt_up(q: Fraction, bits):
    scale = 1 << bits
    return Fraction(isqrt(ceil(q * scale * scale)) + 1, scale)


def complex_root_boxes(p, count, width):
    """Disjoint certified boxes for the ``count`` nonreal roots of squarefree p."""
    import mpmath

    if count == 0:
        return []
    width = rat(width)
    n = p.degree
    dp = p.derivative()
    dps = 30
    while dps <= 4000:
        with mpmath.workdps(dps):
            coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(p.coeffs)]
            try:
                roots = mpmath.polyroots(coeffs, maxsteps=100 + 10 * n, extraprec=dps)
            except mpmath.libmp.NoConvergence:
                dps *= 2
                continue
            cands = sorted(roots, key=lambda z: -abs(mpmath.im(z)))[:count]
            bits = int(dps * 3.3) - 4
            pts = []
            for z in cands:
                zr = _mpf_to_fraction(mpmath.mpf(mpmath.re(z)))
                zi = _mpf_to_fraction(mpmath.mpf(mpmath.im(z)))
                pts.append((Fraction(round(zr * (1 << bits)), 1 << bits), Fraction(round(zi * (1 << bits)), 1 << bits)))
        ok = True
        radii = []
        for z in pts:
            fz = _ceval(p.coeffs, z)
            dz = _ceval(dp.coeffs, z)
            den = dz[0] ** 2 + dz[1] ** 2
            if den == 0:
                ok = False
                break
            r2 = n * n * (fz[0] ** 2 + fz[1] ** 2) / den
            r = _sqrt_up(r2, bits) if r2 else Fraction(1, 1 << bits)
            if 2 * r > width or abs(z[1]) <= r:
                ok = False
                break
            radii.append(r)
        if ok:
            for i in range(len(pts)):
                for j in range(i + 1, len(pts)):
                    dx = pts[i][0] - pts[j][0]
                    dy = pts[i][1] - pts[j][1]
                    if dx * dx + dy * dy <= (radii[i] + radii[j]) ** 2:
                        ok = False
        if ok:
            return [Box(z[0] - r, z[0] + r, z[1] - r, z[1] + r) for z, r in zip(pts, radii)]
        dps *= 2
    raise RuntimeError("complex root certification failed")


def embed(alpha, width) -> EmbeddingEnclosure:
    """Boxes of width <= ``width`` around the images of ``alpha`` under every embedding.

    Each conjugate appears ``[tower : Q(alpha)]`` times, once per embedding
    that sends ``alpha`` to it.
    """
    width = rat(width)
    mp = alpha.min_poly()
    mult = alpha.tower.degree // mp.degree
    real = [Box(lo, hi, Fraction(0), Fraction(0)) for lo, hi in isolate_real_roots(mp, width)]
    cplx = complex_root_boxes(mp, mp.degree - len(real), width)
    boxes = []
    for b in real + sorted(cplx, key=lambda b: (b.re_lo, b.im_lo)):
        boxes.extend([b] * mult)
    return EmbeddingEnclosure(tuple(boxes), width)
