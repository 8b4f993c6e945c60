import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from record_laws.distributions import Exponential
from record_laws.errors import StateError
from record_laws.records import Interleaving, RecordTrace, classify_ordering, extract_records, inter_record_gaps
from record_laws.simulation import shard_generator, simulate_shard


def _trace(u, l, n):
    m = max(u + l)
    return RecordTrace(n, tuple(u), tuple(l), tuple(range(len(u))), tuple(range(len(l))), m)


def test_extract_examples():
    t = extract_records([5, 8, 2, 9, 1], 3)
    assert t.upper_times == (1, 2, 4) and t.lower_times == (1, 3, 5)
    assert t.upper_values == (5, 8, 9) and t.lower_values == (5, 2, 1)
    assert t.complete

    t = extract_records([5, 5, 5], 2)
    assert t.upper_times == (1,) and t.lower_times == (1,) and not t.complete

    t = extract_records([3, 7], 2)
    assert t.upper_times == (1, 2) and t.lower_times == (1,) and not t.complete


def test_extract_stops_early_and_rejects_empty():
    t = extract_records([5, 8, 2, 9, 1, 0, 100], 2)
    assert t.draws_consumed == 3
    with pytest.raises(ValueError):
        extract_records([], 2)


def test_classify_examples():
    assert classify_ordering(_trace([1, 2, 3], [1, 4, 5], 3)).events == ("U2", "U3", "L2", "L3")
    assert classify_ordering(_trace([1, 2, 3], [1, 4, 5], 3)).label == "O1"
    assert classify_ordering(_trace([1, 3, 5], [1, 2, 4], 3)).label == "O4"
    assert classify_ordering(_trace([1, 2], [1, 4], 2)).events == ("U2", "L2")


def test_classify_requires_complete():
    with pytest.raises(StateError):
        classify_ordering(extract_records([3, 7], 2))
    with pytest.raises(StateError):
        inter_record_gaps(extract_records([3, 7], 2))


def test_gap_examples():
    assert inter_record_gaps(_trace([1, 2], [1, 4], 2)) == [0, 1]
    assert inter_record_gaps(_trace([1, 2, 3], [1, 4, 5], 3)) == [0, 0, 0, 0]
    assert inter_record_gaps(_trace([1, 5], [1, 2], 2)) == [0, 2]


def test_gap_after_ties_in_discrete_data():
    t = extract_records([3, 3, 3, 4, 2], 2)
    assert inter_record_gaps(t) == [2, 0]


def test_interleaving_admissibility():
    with pytest.raises(ValueError):
        Interleaving(3, ("U3", "U2", "L2", "L3"))
    assert Interleaving.parse("U2,L2").sides == "UL"
    assert Interleaving.from_sides("LLUU").label == "O6"


seqs = st.lists(st.integers(-20, 20), min_size=1, max_size=60)


@settings(max_examples=300, deadline=None)
@given(seq=seqs, n=st.integers(2, 4))
def test_idempotence(seq, n):
    t = extract_records(seq, n)
    if t.complete:
        again = extract_records(seq[: t.completion_time()], n)
        assert again == t


@settings(max_examples=300, deadline=None)
@given(seq=seqs, n=st.integers(2, 4))
def test_reflection_swaps_roles(seq, n):
    t = extract_records(seq, n)
    r = extract_records([-v for v in seq], n)
    assert r.upper_times == t.lower_times and r.lower_times == t.upper_times
    assert r.upper_values == tuple(-v for v in t.lower_values)


@settings(max_examples=200, deadline=None)
@given(seq=seqs, n=st.integers(2, 4))
def test_trace_invariants(seq, n):
    t = extract_records(seq, n)
    assert t.upper_values[0] == t.lower_values[0]
    assert all(a < b for a, b in zip(t.upper_values, t.upper_values[1:]))
    assert all(a > b for a, b in zip(t.lower_values, t.lower_values[1:]))
    assert len(set(t.upper_times[1:]) & set(t.lower_times[1:])) == 0


def test_second_observation_is_always_a_record():
    batch = simulate_shard(Exponential(1.0), 2, 100_000, shard_generator(3, 0), 100_000)
    second = (batch.upper_times[:, 1] == 2) | (batch.lower_times[:, 1] == 2)
    assert second.all()


def test_batch_traces_match_scanner():
    rng = shard_generator(11, 0)
    batch = simulate_shard(Exponential(1.0), 3, 200, rng, 5000)
    for i in range(200):
        t = batch.trace(i)
        if t.complete:
            assert t.completion_time() == batch.draws[i]
