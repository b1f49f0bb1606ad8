from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from oracles import min_poly_sympy
from trcert.embedding import Signature, embed, real_embeddings
from trcert.errors import DivisionByZero, NotCMTower, ReducibleTower, TowerMismatch
from trcert.poly import RatPoly, count_real_roots, cyclotomic
from trcert.tower import (
    AlgNum,
    FieldTower,
    conj,
    cyclotomic_base,
    cyclotomic_cm_tower,
    quadratic_tower,
    sqrt_in_tower,
)

X = RatPoly.x()
Q = FieldTower.rationals()
QR2 = quadratic_tower(2)
S2 = QR2.root(1)
QR2I = QR2.adjoin_sqrt(-1)
QI = quadratic_tower(-1)


def _towers():
    q23 = QR2.adjoin_sqrt(3)
    return [
        Q,
        QR2,
        QR2I,
        q23,
        q23.adjoin_sqrt(q23.root(1) + 5),
        FieldTower.make_base(X**3 - 2),
        FieldTower.make_base(X**3 - 2).adjoin_sqrt(-1),
        cyclotomic_base(5),
        cyclotomic_cm_tower(15)[0],
    ]


TOWERS = _towers()


@st.composite
def elements(draw, tower=None, nonzero=False):
    if tower is None:
        tower = draw(st.sampled_from(TOWERS))
    coords = draw(st.lists(st.integers(-4, 4), min_size=tower.degree, max_size=tower.degree))
    den = draw(st.sampled_from([1, 1, 2, 3]))
    a = tower.from_flat([Fraction(c, den) for c in coords])
    if nonzero and a.is_zero():
        a = a + 1
    return a


@st.composite
def element_triples(draw):
    tower = draw(st.sampled_from(TOWERS))
    return tuple(draw(elements(tower)) for _ in range(3))


# -- examples ---------------------------------------------------------


def test_make_base_degrees():
    assert FieldTower.make_base(X).degree == 1
    assert FieldTower.make_base(X**2 - 2).degree == 2
    assert FieldTower.make_base(cyclotomic(15)).degree == 8


def test_adjoin_sqrt_examples():
    d = 3 + 2 * S2
    t = QR2.adjoin_sqrt(d * d + d)
    assert t.degree == 4
    assert t.root(2) ** 2 == d * d + d
    assert (d * d + d) == 20 + 14 * S2
    assert QR2I.degree == 4 and QR2I.root(2) ** 2 == -1


def test_arithmetic_examples():
    assert (3 + 2 * S2) * (3 - 2 * S2) == 1
    q6 = quadratic_tower(6)
    s6 = q6.root(1)
    assert (5 + 2 * s6).invert() == 5 - 2 * s6
    with pytest.raises(DivisionByZero):
        QR2.zero().invert()


def test_min_poly_examples():
    assert S2.min_poly() == X**2 - 2
    assert (3 + 2 * S2).min_poly() == X**2 - 6 * X + 1
    z = cyclotomic_base(5).gen()
    assert (z + z.invert()).min_poly() == X**2 + X - 1


def test_signature_examples():
    assert QR2.signature == Signature(2, 0)
    assert QI.signature == Signature(0, 1)
    assert QR2I.signature == Signature(0, 2)
    assert FieldTower.make_base(X**3 - 2).signature == Signature(1, 1)
    assert cyclotomic_cm_tower(15)[0].signature == Signature(0, 4)


def test_conj_examples():
    i = QR2I.root(2)
    s = S2.lift(QR2I)
    assert conj(i) == -i
    assert conj(s) == s
    assert conj(1 + 2 * i * s) == 1 - 2 * i * s
    with pytest.raises(NotCMTower):
        conj(S2)


def test_cm_detection():
    assert QR2I.is_cm() and QI.is_cm()
    assert not QR2.is_cm()
    cube = FieldTower.make_base(X**3 - 2).adjoin_sqrt(-1)
    assert not cube.is_cm()  # the cubic field below is not totally real


def test_embed_examples():
    enc = embed(S2, Fraction(1, 100))
    assert len(enc.boxes) == 2 and all(b.is_real for b in enc.boxes)
    assert enc.boxes[0].contains(-2**0.5) and enc.boxes[1].contains(2**0.5)
    z = cyclotomic_base(5).gen()
    enc = embed(z + z.invert(), Fraction(1, 100))
    centers = sorted(b.center().real for b in enc.boxes)
    assert centers[0] == pytest.approx(-1.618, abs=0.01) and centers[-1] == pytest.approx(0.618, abs=0.01)
    enc = embed(3 + 2 * S2, Fraction(1, 10**6))
    centers = sorted(b.center().real for b in enc.boxes)
    assert centers == [pytest.approx(0.171572875, abs=1e-6), pytest.approx(5.828427125, abs=1e-6)]


def test_embed_complex_boxes_contain_roots():
    z = cyclotomic_base(5).gen()
    enc = embed(z, Fraction(1, 1000))
    assert not any(b.is_real for b in enc.boxes)
    for k in (1, 2, 3, 4):
        root = complex(mpmath.exp(2j * mpmath.pi * k / 5))
        assert sum(b.contains(root) for b in enc.boxes) == 1


def test_reducible_steps_surface_lazily():
    bad = Q.adjoin_sqrt(4)
    with pytest.raises(ReducibleTower) as err:
        (bad.root(1) - 2).invert()
    assert err.value.step == 1
    bad_base = FieldTower.make_base(X**2 - 1)
    with pytest.raises(ReducibleTower) as err:
        (bad_base.gen() - 1).invert()
    assert err.value.step == 0


def test_prefix_coercion_and_mismatch():
    assert S2 + QR2I.root(2) == S2.lift(QR2I) + QR2I.root(2)
    with pytest.raises(TowerMismatch):
        S2 + quadratic_tower(3).root(1)


def test_tower_and_element_json_round_trip():
    for tower in TOWERS:
        again = FieldTower.from_json(tower.to_json())
        assert again == tower
        a = tower.from_flat([Fraction(k, 7) - 1 for k in range(tower.degree)])
        assert again.element_from_json(a.to_json()) == a


def test_sqrt_in_tower():
    assert sqrt_in_tower(3 + 2 * S2) ** 2 == 3 + 2 * S2
    assert sqrt_in_tower(QR2.rational(8)) == 2 * S2
    assert sqrt_in_tower(20 + 14 * S2) is None
    base = FieldTower.make_base(X**2 - 2)
    assert sqrt_in_tower(3 + 2 * base.gen()) == 1 + base.gen()


def test_cyclotomic_cm_tower_zeta():
    tower, zeta = cyclotomic_cm_tower(15)
    assert tower.degree == 8 and tower.is_cm()
    assert zeta.min_poly() == cyclotomic(15)
    assert conj(zeta) == zeta.invert()


@pytest.mark.parametrize(
    "build, expr",
    [
        (lambda: 1 + S2, 1 + sympy.sqrt(2)),
        (lambda: QR2.adjoin_sqrt(3).root(2) + S2, sympy.sqrt(2) + sympy.sqrt(3)),
        (lambda: S2.lift(QR2I) * QR2I.root(2) + 1, 1 + sympy.I * sympy.sqrt(2)),
        (lambda: FieldTower.make_base(X**3 - 2).gen() + 1, sympy.root(2, 3) + 1),
    ],
)
def test_min_poly_matches_independent_computation(build, expr):
    assert list(build().min_poly().coeffs) == min_poly_sympy(expr)


# -- properties -------------------------------------------------------


@given(element_triples())
def test_field_axioms(abc):
    a, b, c = abc
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    if not a.is_zero():
        assert a * a.invert() == 1


@given(elements())
def test_min_poly_annihilates_and_divides_degree(a):
    mp = a.min_poly()
    assert mp(a).is_zero()
    assert a.tower.degree % mp.degree == 0


CM_TOWERS = [t for t in TOWERS if t.height and t.is_cm()]


@given(st.sampled_from(CM_TOWERS).flatmap(lambda t: st.tuples(elements(t), elements(t))))
def test_conj_is_involutive_homomorphism(ab):
    a, b = ab
    assert conj(conj(a)) == a
    assert conj(a * b) == conj(a) * conj(b)
    assert conj(a + b) == conj(a) + conj(b)
    assert conj(a).min_poly() == a.min_poly()


@pytest.mark.parametrize("tower", TOWERS, ids=lambda t: repr(t))
def test_signature_counts_degree(tower):
    sig = tower.signature
    assert sig.r + 2 * sig.s == tower.degree


@pytest.mark.parametrize("tower", [t for t in TOWERS if t.is_totally_real()], ids=lambda t: repr(t))
def test_signature_under_positive_and_negative_steps(tower):
    pos = tower.adjoin_sqrt(tower.one() * 7 + tower.gen() * tower.gen())
    assert pos.signature.r == 2 * tower.signature.r
    neg = tower.adjoin_sqrt(-(tower.one() * 7 + tower.gen() * tower.gen()))
    assert neg.signature == Signature(0, tower.degree)


@given(elements())
def test_embed_real_boxes_match_real_root_count(a):
    mp = a.min_poly()
    enc = embed(a, Fraction(1, 64))
    mult = a.tower.degree // mp.degree
    assert len(enc.boxes) == a.tower.degree
    assert len(enc.real_boxes()) == count_real_roots(mp) * mult
    assert all(b.width <= Fraction(1, 64) for b in enc.boxes)


@given(elements())
def test_real_embeddings_agree_with_min_poly(a):
    mp = a.min_poly()
    for emb in real_embeddings(a.tower):
        lo, hi = emb.enclose(a, 40)
        # the image is a real root of the min poly inside the enclosure
        assert lo <= hi
        assert any(lo - Fraction(1, 2**30) <= r.real <= hi + Fraction(1, 2**30) for r in _float_roots(mp))


def _float_roots(p):
    return [complex(r) for r in mpmath.polyroots([float(c) for c in reversed(p.coeffs)], maxsteps=200, extraprec=200)]


@given(elements())
def test_element_json_round_trip(a):
    assert a.tower.element_from_json(a.to_json()) == a
