from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catalytic_lab import codes
from catalytic_lab.errors import ConfigInvalid, LengthMismatch, TooLarge
from catalytic_lab.measures import (BitVectorSet, Subcube, ball_lower_bound_holds, ball_union, check_partition,
                                    gotsman_linial_check, partition_complexity, projection_complexity,
                                    projection_complexity_bruteforce, spectral_l1, threshold_set, wht_spectrum,
                                    xor_shift)
from catalytic_lab.setlang import All, Codewords, Parity, PrefixZero


def brute_partition(mask, m):
    """Smallest exact cover of the set by subcubes inside it (plain recursion, m <= 4)."""
    cubes = []
    for pat in product("01*", repeat=m):
        pts = frozenset(x for x in range(1 << m)
                        if all(c == "*" or int(c) == (x >> (m - 1 - i)) & 1 for i, c in enumerate(pat)))
        if all(mask[p] for p in pts):
            cubes.append(pts)

    @lru_cache(maxsize=None)
    def solve(rem):
        if not rem:
            return 0
        p = min(rem)
        return 1 + min(solve(rem - c) for c in cubes if p in c and c <= rem)

    return solve(frozenset(np.flatnonzero(mask).tolist()))


def random_sets(max_m):
    return st.integers(1, max_m).flatmap(
        lambda m: st.lists(st.booleans(), min_size=1 << m, max_size=1 << m).map(
            lambda bits: BitVectorSet(m, np.array(bits))))


# ------------------------------------------------------------------- sets


def test_bitvector_checks():
    with pytest.raises(LengthMismatch):
        BitVectorSet(3, np.zeros(7, dtype=bool))
    with pytest.raises(TooLarge):
        BitVectorSet(25, np.zeros(1, dtype=bool))
    with pytest.raises(LengthMismatch):
        BitVectorSet.from_points(3, ["01"])
    A = BitVectorSet.from_points(3, ["001", "110"])
    assert "110" in A and "111" not in A and A.size == 2
    assert A.words() == ["001", "110"]
    assert A.issubset(A.union(BitVectorSet.from_points(3, [0])))


@given(random_sets(8))
def test_hex_round_trip(A):
    back = BitVectorSet.from_hex(A.to_hex(), A.m)
    assert back == A and hash(back) == hash(A)
    if A.m >= 3:
        assert BitVectorSet.from_hex(A.to_hex()) == A


def test_hex_errors():
    with pytest.raises(ConfigInvalid):
        BitVectorSet.from_hex("ffffff")  # 24 bits is not a power of two
    with pytest.raises(LengthMismatch):
        BitVectorSet.from_hex("ff01", 3)


def test_xor_shift_and_balls():
    A = BitVectorSet.from_points(4, ["0011", "0101"])
    assert xor_shift(A, "0000") == A
    assert set(xor_shift(A, "1000").words()) == {"1011", "1101"}
    assert ball_union(["0000"], 1).words() == ["0000", "0001", "0010", "0100", "1000"]
    assert ball_union([], 1, m=3).size == 0
    with pytest.raises(LengthMismatch):
        xor_shift(A, "01")
    with pytest.raises(LengthMismatch):
        ball_union(["000", "01"], 1)


def test_threshold_set():
    assert threshold_set(4, 1).size == 5
    assert threshold_set(4, 4).size == 16


# ----------------------------------------------------------------- partition


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_partition_parity(m):
    res = partition_complexity(BitVectorSet.from_set(Parity(m)))
    assert res.value == 2 ** (m - 1)
    assert check_partition(BitVectorSet.from_set(Parity(m)), res.witness)


def test_partition_examples():
    assert partition_complexity(BitVectorSet.from_set(PrefixZero(8, 2))).value == 1
    ball = ball_union(["000"], 1)
    res = partition_complexity(ball)
    assert res.value == 3 and check_partition(ball, res.witness)
    assert partition_complexity(BitVectorSet(4, np.zeros(16, dtype=bool))).value == 0
    assert partition_complexity(BitVectorSet.from_set(All(6))).value == 1


@given(random_sets(4))
def test_partition_matches_bruteforce(A):
    res = partition_complexity(A)
    assert res.value == brute_partition(A.mask, A.m)
    assert len(res.witness) == res.value and check_partition(A, res.witness)


@given(random_sets(6))
def test_partition_methods_agree(A):
    a = partition_complexity(A, method="ilp") if A.size else partition_complexity(A)
    b = partition_complexity(A, method="bnb")
    assert a.value == b.value
    assert check_partition(A, a.witness) and check_partition(A, b.witness)
    assert a.lower_bound <= a.value


def test_partition_dense_random_bnb(backend):
    rng = np.random.default_rng(11)
    for _ in range(3):
        A = BitVectorSet(6, rng.random(64) < 0.7)
        assert partition_complexity(A, method="bnb").value == partition_complexity(A, method="ilp").value


@pytest.mark.parametrize("text", ["hamming:7", "rm:1,3", "exthamming:8", "rep:5", "random:10,3,1",
                                  "random:12,4,7"])
def test_partition_codewords(text):
    code = codes.parse_code(text)
    A = BitVectorSet.from_set(Codewords(code))
    assert partition_complexity(A).value == 2 ** code.k


def test_partition_errors():
    with pytest.raises(TooLarge):
        partition_complexity(BitVectorSet.from_set(Parity(15)))
    with pytest.raises(ConfigInvalid):
        partition_complexity(BitVectorSet.from_set(Parity(3)), method="magic")


def test_check_partition_rejects_bad_witnesses():
    A = ball_union(["000"], 1)
    assert not check_partition(A, [Subcube("00*"), Subcube("0*0")])  # overlap and missing 100
    assert not check_partition(A, [Subcube("***")])
    assert Subcube("0*1").points() == [1, 3]


def test_ball_additivity():
    far = [("000000", "111100"), ("00000000", "11110000", "00001111")]
    for centers in far:
        single = partition_complexity(ball_union([centers[0]], 1)).value
        assert partition_complexity(ball_union(centers, 1)).value == len(centers) * single


def test_ball_additivity_fails_when_balls_touch():
    # balls at center distance 3 are adjacent (distance 1 between them); the union admits
    # a subcube across both balls, so the sum is not attained
    assert partition_complexity(ball_union(["000000"], 1)).value == 6
    assert partition_complexity(ball_union(["000000", "111000"], 1)).value < 12


def test_ball_lower_bound():
    for m in range(2, 9):
        for k in range(0, (m + 1) // 2):
            A = ball_union(["0" * m], k)
            if abs(wht_spectrum(A).coefficient(0)) >= Fraction(1, 2):
                continue
            assert ball_lower_bound_holds(m, partition_complexity(A).value)
    assert ball_lower_bound_holds(16, 2) and not ball_lower_bound_holds(17, 2)


@given(random_sets(5), st.data())
def test_partition_translation_invariant(A, data):
    z = data.draw(st.text("01", min_size=A.m, max_size=A.m))
    assert partition_complexity(xor_shift(A, z)).value == partition_complexity(A).value


# ---------------------------------------------------------------- projection


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_projection_parity_literal(m):
    # every projection of Parity_m onto T, |T| = m, is Parity_m itself with 2^(m-1) points,
    # which meets the >= 2^(ell-1) threshold, so the literal definition gives m
    stats = projection_complexity(BitVectorSet.from_set(Parity(m)), epsilon=0)
    assert stats.value == m
    assert stats.fractions[m] == 1


def test_projection_full_cube():
    for eps in [0, Fraction(1, 4), 1]:
        assert projection_complexity(BitVectorSet.from_set(All(5)), epsilon=eps).value == 5


def test_projection_codes_lemma():
    A = BitVectorSet.from_set(Codewords(codes.extended_hamming(8)))
    stats = projection_complexity(A, epsilon=Fraction(1, 256))
    assert stats.value >= 4 and stats.fractions[4] == 1


@given(random_sets(6), st.sampled_from([Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)]))
def test_projection_matches_bruteforce(A, eps):
    assert projection_complexity(A, epsilon=eps).value == projection_complexity_bruteforce(A, eps)


def test_projection_alpha_and_errors():
    A = BitVectorSet.from_set(Parity(6))
    assert projection_complexity(A, alpha=Fraction(1, 4)).value == projection_complexity(A, epsilon=0).value
    with pytest.raises(ConfigInvalid):
        projection_complexity(A)
    with pytest.raises(ConfigInvalid):
        projection_complexity(A, epsilon=2)
    with pytest.raises(TooLarge):
        projection_complexity(BitVectorSet.from_set(Parity(21)), epsilon=0, exhaustive=True)


def test_projection_monte_carlo_reproducible():
    A = BitVectorSet.from_set(Parity(21))
    a = projection_complexity(A, epsilon=Fraction(1, 4), samples=64, seed=3)
    b = projection_complexity(A, epsilon=Fraction(1, 4), samples=64, seed=3)
    assert not a.exact and a.to_dict() == b.to_dict()
    assert a.value == 21


@given(random_sets(5), st.data())
def test_projection_translation_invariant(A, data):
    z = data.draw(st.text("01", min_size=A.m, max_size=A.m))
    eps = Fraction(1, 4)
    assert projection_complexity(xor_shift(A, z), epsilon=eps).value == projection_complexity(A, epsilon=eps).value


@given(random_sets(6), st.data())
def test_projection_monotone(B, data):
    keep = data.draw(st.lists(st.booleans(), min_size=1 << B.m, max_size=1 << B.m))
    A = BitVectorSet(B.m, B.mask & np.array(keep))
    eps = Fraction(1, 4)
    assert projection_complexity(A, epsilon=eps).value <= projection_complexity(B, epsilon=eps).value


# ------------------------------------------------------------------ spectra


def test_spectrum_examples(backend):
    const = wht_spectrum(BitVectorSet(3, np.zeros(8, dtype=bool)))
    assert const.nonzero() == {"000": 1} and spectral_l1(const) == 1
    th = wht_spectrum(threshold_set(3, 1))
    assert th.coefficient(0) == 0
    assert all(abs(th.coefficient([i])) == Fraction(1, 2) for i in range(3))
    assert spectral_l1(th) == 2
    par = wht_spectrum(BitVectorSet.from_set(Parity(5)))
    assert par.nonzero() == {"11111": 1}
    assert par.coefficient("11111") == 1


@given(random_sets(8))
def test_parseval_exact(A):
    spec = wht_spectrum(A)
    assert spec.parseval_holds()
    assert sum(c * c for c in spec.nonzero().values()) == 1


def test_spectrum_too_large():
    with pytest.raises(TooLarge):
        wht_spectrum(BitVectorSet.from_set(Parity(21)))


def test_gotsman_linial_examples():
    r = gotsman_linial_check(3, 1)
    assert r.value == Fraction(3, 4) and r.holds
    r = gotsman_linial_check(2, 0)
    assert r.value == Fraction(3, 4) and r.empty_coefficient == Fraction(1, 2)
    with pytest.raises(ConfigInvalid):
        gotsman_linial_check(3, 3)


@pytest.mark.parametrize("m", range(1, 11))
def test_gotsman_linial_all(m):
    assert all(gotsman_linial_check(m, k).holds for k in range(m))
