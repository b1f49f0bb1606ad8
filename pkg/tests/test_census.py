import json
from fractions import Fraction

import pytest

from oracles import brute_census, naive_census_deg2
from trcert.census import (
    CensusEntry,
    box_cells,
    census,
    jr_profile,
    kronecker_completeness,
    kronecker_entry,
    kronecker_indices,
    recheck_entry,
)
from trcert.errors import CellBudgetExceeded, PreconditionFailed
from trcert.integrality import is_algebraic_integer
from trcert.poly import RatPoly, euler_phi
from trcert.positivity import IntervalSpec, totally_in


def P(*coeffs):
    """Polynomial from coefficients, highest degree first."""
    return RatPoly(tuple(reversed(coeffs)))


def as_tuples(table):
    return {tuple(int(c) for c in p.coeffs) for p in table.polys()}


def test_kronecker_examples():
    assert kronecker_entry(3).poly == P(1, -1)
    assert kronecker_entry(5).poly == P(1, -3, 1)
    assert kronecker_entry(12).poly == P(1, -4, 1)


def test_kronecker_rejects_small_n():
    for n in (0, 1, 2):
        with pytest.raises(PreconditionFailed):
            kronecker_entry(n)


def test_kronecker_entries_up_to_60():
    zero_four = IntervalSpec.open(0, 4)
    for n in range(3, 61):
        e = kronecker_entry(n)
        p = e.poly
        assert p.is_monic() and p.is_integral()
        assert e.degree == euler_phi(n) // 2
        k = e.element()
        assert totally_in(k, zero_four) and is_algebraic_integer(k)


def test_kronecker_indices():
    assert kronecker_indices(1) == [3, 4, 6]
    assert sorted(kronecker_indices(2)) == [3, 4, 5, 6, 8, 10, 12]
    assert sorted(set(kronecker_indices(3)) - set(kronecker_indices(2))) == [7, 9, 14, 18]


def test_census_examples():
    t = census(1, Fraction(7, 2))
    assert t.polys() == [P(1, -1), P(1, -2), P(1, -3)] and t.element_count == 3
    t4 = census(2, 4)
    assert set(t4.polys()) == {P(1, -1), P(1, -2), P(1, -3), P(1, -3, 1), P(1, -4, 2), P(1, -5, 5), P(1, -4, 1)}
    t3 = census(2, 3)
    assert len(t3.entries) < len(t4.entries)
    assert P(1, -3, 1) in t3.polys() and P(1, -4, 1) not in t3.polys()


def test_census_preconditions():
    with pytest.raises(PreconditionFailed):
        census(0, 4)
    with pytest.raises(PreconditionFailed):
        census(2, 0)


def test_census_matches_naive_quadratic_enumeration():
    for t in (Fraction(39, 10), Fraction(3), Fraction(4), Fraction(5, 2), Fraction(9, 2)):
        assert as_tuples(census(2, t)) == naive_census_deg2(t), t


def test_census_degree_four_matches_brute_force():
    t = Fraction(39, 10)
    table = census(4, t)
    assert as_tuples(table) == brute_census(4, t)
    assert table.counts == {1: 3, 2: 4, 3: 4, 4: 2}


def test_census_degree_three_matches_brute_force_at_four():
    assert as_tuples(census(3, 4)) == brute_census(3, 4)


@pytest.mark.parametrize("D", [1, 2, 3])
def test_kronecker_completeness(D):
    rep = kronecker_completeness(D)
    assert rep.ok, rep.to_json()
    assert len(rep.census_polys) == {1: 3, 2: 7, 3: 11}[D]


def test_census_monotone():
    ts = [Fraction(2), Fraction(5, 2), Fraction(3), Fraction(7, 2), Fraction(39, 10), Fraction(4)]
    for D in (1, 2, 3):
        prev = set()
        for t in ts:
            cur = set(census(D, t).polys())
            assert prev <= cur
            prev = cur
    for t in ts:
        assert set(census(2, t).polys()) <= set(census(3, t).polys())


def test_entries_pass_recheck():
    for D, t in ((3, 4), (4, Fraction(39, 10))):
        for e in census(D, t).entries:
            assert recheck_entry(e, t)
    assert not recheck_entry(CensusEntry(P(1, -4)), 4)
    assert not recheck_entry(CensusEntry(P(1, 0)), 4)
    assert not recheck_entry(CensusEntry(P(1, -4, 1)), 3)


def test_entries_sorted_and_distinct():
    table = census(3, 4)
    keys = [(e.degree, e.signed_coefficients()) for e in table.entries]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)


def test_workers_give_same_table():
    assert census(3, 4, workers=2).polys() == census(3, 4).polys()


def test_budget_guard(monkeypatch):
    with pytest.raises(CellBudgetExceeded) as info:
        census(3, 4, budget=10)
    assert info.value.needed == box_cells(3, 4)
    monkeypatch.setenv("TRCERT_CELL_BUDGET", "100")
    with pytest.raises(CellBudgetExceeded):
        census(3, 4)
    monkeypatch.setenv("TRCERT_CELL_BUDGET", "1e6")
    assert census(3, 4).element_count > 0


def test_profile_examples():
    p = jr_profile(1, [Fraction(1, 2), Fraction(3, 2), Fraction(5, 2), Fraction(9, 2)])
    assert [c for _, c in p.rows] == [0, 1, 2, 4]
    a, b = (c for _, c in jr_profile(2, [Fraction(7, 2), 4]).rows)
    assert b > a
    a, b = (c for _, c in jr_profile(2, [4, 4]).rows)
    assert a == b


def test_profile_monotone():
    ts = [Fraction(k, 4) for k in range(1, 17)]
    counts = [c for _, c in jr_profile(2, ts).rows]
    assert counts == sorted(counts)


def test_serialization():
    table = census(2, 4)
    data = json.loads(json.dumps(table.to_json()))
    assert data["D"] == 2 and data["t"] == "4/1"
    assert data["counts"] == {"1": 3, "2": 4} and data["element_count"] == 11
    assert len(data["entries"]) == 7
    csv = jr_profile(1, [Fraction(1, 2), Fraction(9, 2)]).to_csv()
    assert csv == "t,count\n1/2,0\n9/2,4\n"
