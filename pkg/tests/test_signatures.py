from fractions import Fraction as Fr
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shl_lab.signatures import (
    EventuallyConstant,
    ParameterSet,
    Signature,
    enumerate_partitions,
    enumerate_signatures,
    signatures_with_top,
    stats,
)


def test_stats_examples():
    s = stats(Signature((5, 2, 2, 0)))
    assert s.m == {5: 1, 2: 2, 0: 1} and s.ell == 3 and s.m0 == 1 and s.weight == 9
    s = stats(Signature((0, 0, 0)))
    assert s.ell == 0 and s.m0 == 3 and s.weight == 0
    s = stats(Signature((3, 3, 3)))
    assert s.m == {3: 3} and s.ell == 3 and s.m0 == 0


def test_enumerate_examples():
    assert set(enumerate_signatures(2, 1)) == {Signature((0, 0)), Signature((1, 0)), Signature((1, 1))}
    assert len(list(enumerate_signatures(1, 4))) == 5
    assert len(list(enumerate_signatures(3, 3))) == 20


@pytest.mark.parametrize("N", range(0, 6))
@pytest.mark.parametrize("max_part", range(0, 9))
def test_enumeration_count_and_uniqueness(N, max_part):
    sigs = list(enumerate_signatures(N, max_part))
    assert len(sigs) == comb(N + max_part, N) == len(set(sigs))
    for lam in sigs:
        st_ = stats(lam)
        assert st_.m0 + st_.ell == N
        assert sum(st_.m.values()) == N


def test_shells_partition_the_enumeration():
    shells = [lam for top in range(5) for lam in signatures_with_top(3, top)]
    assert sorted(shells) == sorted(enumerate_signatures(3, 4))


def test_partitions_drop_zeros():
    parts = set(enumerate_partitions(2, 2))
    assert Signature(()) in parts and Signature((2, 1)) in parts and len(parts) == comb(4, 2)


def test_signature_validation():
    with pytest.raises(ValueError):
        Signature((1, 2))
    with pytest.raises(ValueError):
        Signature((1, -1))
    assert Signature((1, 0)).shifted(-2).parts == (-1, -2)
    assert Signature.parse("(3,1,0)") == Signature((3, 1, 0))
    assert Signature((2,)).padded(3) == Signature((2, 0, 0))


@given(st.lists(st.integers(0, 9), max_size=6))
def test_stats_property(parts):
    lam = Signature(sorted(parts, reverse=True))
    s = stats(lam)
    assert s.m0 + s.ell == lam.N and s.weight == sum(parts)


def test_eventually_constant_lookup():
    seq = EventuallyConstant((Fr(1), Fr(2)), Fr(5))
    assert [seq[x] for x in range(5)] == [1, 2, 5, 5, 5]
    assert seq.shift(1)[0] == 2 and seq.shift(3)[0] == 5
    with pytest.raises(IndexError):
        seq[-1]


def test_parameter_set_lists_and_ints():
    p = ParameterSet(Fr(1, 2), [Fr(-1, 3), Fr(-1, 5)], 1, 2)
    assert p.s0 == Fr(-1, 3) and p.s[7] == Fr(-1, 5)
    assert isinstance(p.xi0, Fr) and isinstance(p.gamma, Fr)
    assert p.inverted_xi().xi0 == 1
    assert p.with_s0(Fr(0)).s[1] == Fr(-1, 5)
