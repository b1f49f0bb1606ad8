from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from trcert.errors import NotTotallyReal
from trcert.positivity import (
    IntervalSpec,
    is_totally_nonnegative,
    is_totally_positive,
    is_totally_real,
    totally_avoids,
    totally_in,
)
from trcert.tower import FieldTower, cyclotomic_base, quadratic_tower

Q = FieldTower.rationals()
QR2 = quadratic_tower(2)
S2 = QR2.root(1)
QR5 = quadratic_tower(5)
S5 = QR5.root(1)
QI = quadratic_tower(-1)
ZERO_FOUR = IntervalSpec.open(0, 4)
FORBIDDEN = IntervalSpec.open(-2, 0)


def test_is_totally_real_examples():
    assert is_totally_real(S2)
    assert not is_totally_real(QI.root(1))
    z = cyclotomic_base(5).gen()
    assert is_totally_real(z + z.invert())


def test_totally_in_examples():
    assert totally_in((3 + S5) / 2, ZERO_FOUR)
    assert not totally_in(Q.rational(4), ZERO_FOUR)
    assert totally_in(2 + S2, ZERO_FOUR)
    assert totally_in(Q.rational(4), IntervalSpec(0, 4, True, False))
    assert not totally_in(QI.root(1), IntervalSpec(None, None))


def test_totally_avoids_examples():
    assert totally_avoids(Q.rational(1), FORBIDDEN)
    assert not totally_avoids(Q.rational(-1), FORBIDDEN)
    assert totally_avoids(3 + 2 * S2, FORBIDDEN)
    with pytest.raises(NotTotallyReal):
        totally_avoids(QI.root(1), FORBIDDEN)


def test_nonnegativity_examples():
    d = 3 + 2 * S2
    assert is_totally_nonnegative((d - 1) ** 2)
    assert not is_totally_nonnegative(Q.rational(-1))
    assert is_totally_nonnegative(d * d + d)
    assert is_totally_nonnegative(Q.zero())
    assert not is_totally_positive(Q.zero())


def test_interval_json_round_trip():
    for iv in (ZERO_FOUR, IntervalSpec(Fraction(-1, 3), None, False, True), IntervalSpec(None, 0)):
        assert IntervalSpec.from_json(iv.to_json()) == iv
    assert ZERO_FOUR.to_json() == {"lo": "0/1", "hi": "4/1", "lo_open": True, "hi_open": True}


def test_exact_at_known_conjugates():
    # conjugates of (3 + sqrt5)/2 are (3 -+ sqrt5)/2, about 0.382 and 2.618
    a = (3 + S5) / 2
    assert totally_in(a, IntervalSpec.open(0, Fraction(2619, 1000)))
    assert not totally_in(a, IntervalSpec.open(0, Fraction(2618, 1000)))
    assert totally_in(a, IntervalSpec.open(Fraction(381, 1000), 3))
    assert not totally_in(a, IntervalSpec.open(Fraction(382, 1000), 3))
    # rational conjugate at an endpoint: open excludes, closed includes
    assert not totally_in(Q.rational(2), IntervalSpec.open(0, 2))
    assert totally_in(Q.rational(2), IntervalSpec(0, 2, True, False))


quad_towers = st.sampled_from([QR2, QR5, quadratic_tower(3), QR2.adjoin_sqrt(3)])


@st.composite
def totally_real_elements(draw, height=6):
    tower = draw(quad_towers)
    coords = draw(st.lists(st.integers(-height, height), min_size=tower.degree, max_size=tower.degree))
    return tower.from_flat(coords)


@given(totally_real_elements(), st.fractions(min_value=-5, max_value=5, max_denominator=4))
def test_translation_equivariance(a, c):
    t = Fraction(40)
    if totally_in(a, IntervalSpec.open(0, t)):
        assert totally_in(a + c, IntervalSpec.open(c, t + c))


@given(totally_real_elements(), st.integers(1, 30))
def test_square_bound(a, B):
    if not a.is_zero() and totally_in(a, IntervalSpec.open(-B, B)):
        assert totally_in(a * a, IntervalSpec.open(0, B * B))


def _random_depth_two(rng, height=10):
    tower = rng.choice([Q, QR2, QR5, quadratic_tower(3), QR2.adjoin_sqrt(3), QR5.adjoin_sqrt(2)])
    return tower.from_flat([rng.randint(-height, height) for _ in range(tower.degree)])


def _sample_avoiding_forbidden(rng, count=200):
    out = []
    while len(out) < count:
        d = _random_depth_two(rng)
        if totally_avoids(d, FORBIDDEN):
            out.append(d)
    return out


def test_x_squared_plus_x_nonnegative_off_forbidden_interval(rng):
    for d in _sample_avoiding_forbidden(rng):
        assert is_totally_nonnegative(d * d + d), d


def test_shifted_value_nonnegative_when_d_also_avoids_zero_one(rng):
    # (d-1)^2 + (d-1) = d(d-1), negative exactly at conjugates in (0, 1)
    for d in _sample_avoiding_forbidden(rng):
        if totally_avoids(d, IntervalSpec.open(0, 1)):
            assert is_totally_nonnegative((d - 1) ** 2 + (d - 1)), d


def test_shifted_value_counterexample():
    d = 3 - 2 * S2  # conjugates about 0.17 and 5.83
    assert totally_avoids(d, FORBIDDEN)
    assert not is_totally_nonnegative((d - 1) ** 2 + (d - 1))


def test_shifted_value_nonnegative_off_forbidden_interval(rng):
    # the stated property: avoiding (-2, 0) alone is claimed to suffice for
    # both d^2 + d and (d-1)^2 + (d-1); the counterexample above refutes the
    # second half, so this test is expected to fail
    bad = [d for d in _sample_avoiding_forbidden(rng) if not is_totally_nonnegative((d - 1) ** 2 + (d - 1))]
    assert not bad, f"{len(bad)} of 200 samples fail, first {bad[0]}"
