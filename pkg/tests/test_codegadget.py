import json
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from congest_lb.codegadget import (
    CodeError,
    codebook,
    encode,
    hamming_distance,
    is_prime_power,
    load_table,
    make_params,
    max_agreement,
    min_pairwise_distance,
    next_prime_power,
)
from reference import rs_codeword_prime

FIGURE_TABLE = [[2, 3, 1], [3, 1, 2], [1, 2, 3]]


def test_params_counts():
    p = make_params(2, 1, backend="explicit_table", allow_tiny=True, table=FIGURE_TABLE)
    assert (p.q, p.k, p.m_len, p.sigma_size) == (3, 3, 3, 3)
    assert make_params(4, 1).k == 5
    p = make_params(3, 2)
    assert (p.q, p.k) == (5, 25)


def test_rejects_bad_params():
    with pytest.raises(CodeError, match="prime power"):
        make_params(4, 2)  # q = 6
    with pytest.raises(CodeError, match="ell > alpha"):
        make_params(2, 2)
    make_params(2, 2, allow_tiny=True)
    with pytest.raises(CodeError):
        make_params(0, 1)
    with pytest.raises(CodeError):
        make_params(2, 1, backend="mystery")


def test_prime_power_suggestion():
    with pytest.raises(CodeError, match="q = 7"):
        make_params(4, 2)
    assert next_prime_power(6) == 7
    assert next_prime_power(8) == 8
    assert [q for q in range(2, 17) if is_prime_power(q)] == [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]


def test_figure_table_encoding():
    p = make_params(2, 1, backend="explicit_table", table=FIGURE_TABLE)
    assert tuple(encode(p, 1)) == (2, 3, 1)
    assert min_pairwise_distance(p) == 3


def test_default_table_matches_figure():
    p = make_params(2, 1, backend="explicit_table")
    assert [tuple(w) for w in codebook(p)] == [tuple(r) for r in FIGURE_TABLE]


def test_rs_constant_codewords():
    p = make_params(4, 1)
    for m in range(1, 6):
        assert tuple(encode(p, m)) == (m,) * 5
    assert min_pairwise_distance(p) == 5


def test_rs_frozen_regression():
    # frozen from the independent evaluator in tests/reference.py
    p = make_params(3, 2)
    assert tuple(encode(p, 7)) == (2, 3, 4, 5, 1)
    assert rs_codeword_prime(5, 2, 7) == (2, 3, 4, 5, 1)


@pytest.mark.parametrize("ell,alpha", [(3, 2), (4, 1), (5, 2), (4, 3), (9, 2)])
def test_rs_matches_reference_over_prime_fields(ell, alpha):
    p = make_params(ell, alpha)
    for m in range(1, p.k + 1):
        assert tuple(encode(p, m)) == rs_codeword_prime(p.q, alpha, m)


@pytest.mark.parametrize("ell,alpha", [(3, 2), (4, 1), (2, 1), (7, 2), (5, 3), (3, 1), (6, 2)])
def test_distance_and_agreement(ell, alpha):
    p = make_params(ell, alpha)
    d = min_pairwise_distance(p)
    assert d >= ell
    # Reed-Solomon is MDS: d = M - L + 1
    assert d == p.m_len - alpha + 1
    assert max_agreement(p) <= alpha


def test_prime_power_field_distance_brute_force():
    p = make_params(5, 3)  # GF(8), k = 512
    words = codebook(p)
    sample = words[:40]
    assert min(hamming_distance(a, b) for a, b in combinations(sample, 2)) >= 5
    assert len(set(words)) == p.k


def test_encode_range_errors():
    p = make_params(4, 1)
    for bad in (0, 6, -1):
        with pytest.raises(CodeError):
            encode(p, bad)


def test_codeword_indexing_is_one_based():
    p = make_params(2, 1, backend="explicit_table")
    w = encode(p, 1)
    assert (w[1], w[2], w[3]) == (2, 3, 1)
    with pytest.raises(IndexError):
        w[0]


def test_table_validation(tmp_path):
    with pytest.raises(CodeError):
        make_params(2, 1, backend="explicit_table", table=[[1, 1, 1], [1, 1, 2], [3, 3, 3]])
    with pytest.raises(CodeError):
        make_params(2, 1, backend="explicit_table", table=[[1, 2, 3], [2, 3, 1]])
    with pytest.raises(CodeError):
        make_params(2, 1, backend="explicit_table", table=[[1, 2, 4], [2, 3, 1], [3, 1, 2]])
    path = tmp_path / "t.json"
    path.write_text(json.dumps(FIGURE_TABLE))
    assert load_table(path) == FIGURE_TABLE


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 1), (3, 1), (4, 1), (3, 2), (5, 2), (6, 1)]), st.data())
def test_injective_and_distance_property(pa, data):
    p = make_params(*pa)
    m1 = data.draw(st.integers(1, p.k))
    m2 = data.draw(st.integers(1, p.k).filter(lambda m: m != m1))
    a, b = encode(p, m1), encode(p, m2)
    assert a != b
    assert hamming_distance(a, b) >= p.ell
    assert all(1 <= s <= p.q for s in a)
    assert len(a) == p.m_len
