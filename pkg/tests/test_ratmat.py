from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import leibniz_det
from tnnflag.ratmat import FactorizationError, RationalMatrix, det, ldu, leading_minors_nonzero, rank, udl

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def matrix(draw, n=None):
    n = n or draw(st.integers(1, 4))
    return RationalMatrix([[draw(small) for _ in range(n)] for _ in range(n)])


def test_rejects_floats_and_ragged_rows():
    with pytest.raises(TypeError):
        RationalMatrix([[0.5]])
    with pytest.raises(ValueError):
        RationalMatrix([[1, 2]])


def test_json_round_trip():
    m = RationalMatrix([[1, Fraction(1, 2)], [Fraction(-3, 4), 2]])
    assert RationalMatrix.from_json(m.to_json()) == m


@settings(max_examples=150, deadline=None)
@given(matrix())
def test_det_matches_leibniz(m):
    assert m.det() == leibniz_det(m.rows)
    assert det([list(r) for r in m.rows]) == m.det()


@settings(max_examples=150, deadline=None)
@given(matrix())
def test_inverse_and_rank(m):
    d = m.det()
    if d == 0:
        assert rank([list(r) for r in m.rows]) < m.size
    else:
        assert m * m.inverse() == RationalMatrix.identity(m.size)
        assert rank([list(r) for r in m.rows]) == m.size


@settings(max_examples=150, deadline=None)
@given(matrix())
def test_triangular_factorizations(m):
    n = m.size
    minors = [leibniz_det([r[:k] for r in m.rows[:k]]) for k in range(1, n + 1)]
    assert leading_minors_nonzero(m) == all(minors)
    if all(minors):
        low, diag, up = ldu(m)
        assert low * diag * up == m
        assert all(low[i, j] == int(i == j) for i in range(n) for j in range(i, n))
        assert all(up[i, j] == int(i == j) for i in range(n) for j in range(i + 1))
    else:
        with pytest.raises(FactorizationError):
            ldu(m)
    try:
        up, diag, low = udl(m)
    except FactorizationError:
        return
    assert up * diag * low == m
