import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from congest_lb.instances import (
    DisjointnessInstance,
    InstanceError,
    PromiseKind,
    enumerate_promise_instances,
    from_bitstrings,
    from_supports,
    make_intersecting,
    make_pairwise_disjoint,
    pair_index,
    unpair_index,
    verify_promise,
)


def test_intersecting_examples():
    assert make_intersecting(2, 3, 2, 0.0).bitstrings() == ["010", "010"]
    assert make_intersecting(3, 5, 1, 0.0).bitstrings() == ["10000"] * 3
    inst = make_intersecting(2, 9, 5, 0.2, seed=7)
    assert str(verify_promise(inst)) == "UniquelyIntersecting(5)"


def test_disjoint_examples():
    assert make_pairwise_disjoint(2, 3, 0.0).bitstrings() == ["000", "000"]
    assert from_supports(3, [[1], [3]]).bitstrings() == ["100", "001"]
    inst = make_pairwise_disjoint(3, 25, 0.1, seed=11)
    assert verify_promise(inst).kind is PromiseKind.PAIRWISE_DISJOINT


def test_verify_promise_examples():
    assert str(verify_promise(from_bitstrings(["010", "010"]))) == "UniquelyIntersecting(2)"
    assert str(verify_promise(from_bitstrings(["100", "001"]))) == "PairwiseDisjoint"
    # one all-ones index, nothing else shared: strict promise holds
    assert str(verify_promise(from_bitstrings(["110", "011"]))) == "UniquelyIntersecting(2)"


@pytest.mark.parametrize(
    "strings",
    [
        ["110", "110"],  # two common indices
        ["110", "011", "000"],  # a pair meets but not everyone
        ["111", "110", "100"],  # common index plus extra pairwise overlap
    ],
)
def test_promise_violations(strings):
    assert verify_promise(from_bitstrings(strings)).kind is PromiseKind.PROMISE_VIOLATED


def test_pair_index_examples():
    assert pair_index(3, 1, 1) == 1
    assert pair_index(3, 2, 3) == 6
    assert unpair_index(3, 9) == (3, 3)
    with pytest.raises(InstanceError):
        pair_index(3, 0, 1)
    with pytest.raises(InstanceError):
        unpair_index(3, 10)


@given(st.integers(1, 12), st.data())
def test_pair_roundtrip(k, data):
    m1 = data.draw(st.integers(1, k))
    m2 = data.draw(st.integers(1, k))
    flat = pair_index(k, m1, m2)
    assert 1 <= flat <= k * k
    assert unpair_index(k, flat) == (m1, m2)


@settings(max_examples=150)
@given(
    st.integers(2, 5),
    st.integers(1, 40),
    st.floats(0.0, 1.0),
    st.integers(0, 2**31),
    st.data(),
)
def test_generators_respect_promise(t, length, density, seed, data):
    common = data.draw(st.integers(1, length))
    inst = make_intersecting(t, length, common, density, seed=seed)
    assert verify_promise(inst) == verify_promise(inst)
    v = verify_promise(inst)
    assert v.intersecting and v.index == common
    assert make_intersecting(t, length, common, density, seed=seed) == inst
    inst = make_pairwise_disjoint(t, length, density, seed=seed)
    assert verify_promise(inst).disjoint
    assert make_pairwise_disjoint(t, length, density, seed=seed) == inst


def test_full_density_fills_every_position():
    inst = make_pairwise_disjoint(3, 30, 1.0, seed=4)
    union = 0
    for s in inst.strings:
        union |= s
    assert union == (1 << 30) - 1


def test_density_bounds():
    with pytest.raises(InstanceError, match="infeasible"):
        make_pairwise_disjoint(2, 5, 1.5)
    with pytest.raises(InstanceError):
        make_intersecting(2, 5, 6)


def test_quadratic_shape():
    inst = make_intersecting(2, 9, pair_index(3, 2, 3), 0.0, k=3)
    assert inst.shape == "quadratic"
    assert inst.pair_bit(1, 2, 3) == 1 and inst.pair_bit(2, 1, 1) == 0
    with pytest.raises(InstanceError):
        DisjointnessInstance(2, 8, (0, 0), "quadratic", 3)
    with pytest.raises(InstanceError):
        make_intersecting(2, 3, 1).pair_bit(1, 1, 1)


def test_structure_errors():
    with pytest.raises(InstanceError):
        DisjointnessInstance(2, 3, (0,))
    with pytest.raises(InstanceError):
        DisjointnessInstance(2, 3, (8, 0))
    with pytest.raises(InstanceError):
        from_bitstrings(["01", "012"])


def test_json_roundtrip():
    inst = make_intersecting(3, 9, 4, 0.6, seed=3, k=3)
    data = inst.to_json()
    assert set(data) == {"t", "len", "shape", "k", "strings"}
    assert all(s.startswith("0x") for s in data["strings"])
    assert DisjointnessInstance.from_json(data) == inst
    assert DisjointnessInstance.from_json(data).digest() == inst.digest()
    with pytest.raises(InstanceError):
        DisjointnessInstance.from_json({"t": 2})


def test_enumeration_counts():
    inter = list(enumerate_promise_instances(2, 3, "intersect"))
    disj = list(enumerate_promise_instances(2, 3, "disjoint"))
    assert len(inter) == 27 and len(disj) == 27
    assert len(set(inter)) == 27
    assert all(verify_promise(x).intersecting for x in inter)
    assert all(verify_promise(x).disjoint for x in disj)
    assert sum(1 for _ in enumerate_promise_instances(3, 3, "disjoint")) == 4**3
