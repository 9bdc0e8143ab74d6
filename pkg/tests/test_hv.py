import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amshd.hv import (
    BinaryHV,
    BipolarHV,
    DimensionMismatch,
    ScalarAccumulator,
    accumulate,
    bind,
    bundle,
    cosine,
    hamming,
    pack_bits,
    permute,
    to_binary,
    to_bipolar,
    unpack_bits,
)


def hv(s: str) -> BinaryHV:
    return BinaryHV([int(c) for c in s])


def bits_strategy(min_dim=1, max_dim=200):
    return st.integers(min_dim, max_dim).flatmap(lambda d: st.lists(st.integers(0, 1), min_size=d, max_size=d))


@st.composite
def same_dim_triples(draw, max_dim=200):
    d = draw(st.integers(1, max_dim))
    row = st.lists(st.integers(0, 1), min_size=d, max_size=d)
    return BinaryHV(draw(row)), BinaryHV(draw(row)), BinaryHV(draw(row))


# -- construction and packing --------------------------------------------------


@pytest.mark.parametrize("dim", [1, 7, 8, 63, 64, 65, 1000])
def test_packed_ops_match_naive_reference(dim):
    rng = np.random.default_rng(dim)
    for _ in range(20):
        a = rng.integers(0, 2, dim, dtype=np.uint8)
        b = rng.integers(0, 2, dim, dtype=np.uint8)
        A, B = BinaryHV(a), BinaryHV(b)
        assert [A[i] for i in range(dim)] == a.tolist()
        assert np.array_equal(bind(A, B).bits, a ^ b)
        assert hamming(A, B) == np.count_nonzero(a != b) / dim
        assert A.popcount() == int(a.sum())
        assert np.array_equal(A.complement().bits, 1 - a)
        r = int(rng.integers(-2 * dim, 2 * dim))
        assert np.array_equal(permute(A, r).bits, np.array([a[(i - r) % dim] for i in range(dim)]))
        vs = [BinaryHV(rng.integers(0, 2, dim, dtype=np.uint8)) for _ in range(4)]
        counts = np.sum([v.bits for v in vs], axis=0)
        assert np.array_equal(bundle(vs).bits, (2 * counts >= 4).astype(np.uint8))


@pytest.mark.parametrize("dim", [1, 7, 8, 63, 64, 65, 1000])
def test_padding_bits_stay_zero(dim):
    ones = BinaryHV.ones(dim)
    words = ones.words
    assert ones.popcount() == dim
    assert ones.complement().popcount() == 0
    assert int(np.bitwise_count(words).sum()) == dim
    assert permute(ones, 3).popcount() == dim
    assert bind(ones, BinaryHV.zeros(dim)).popcount() == dim


def test_pack_roundtrip():
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, (5, 130), dtype=np.uint8)
    assert np.array_equal(unpack_bits(pack_bits(bits), 130), bits)


def test_bytes_roundtrip_and_size():
    v = BinaryHV(np.random.default_rng(1).integers(0, 2, 1000))
    data = v.to_bytes()
    assert len(data) == 125
    assert BinaryHV.from_bytes(data, 1000) == v


def test_rejects_non_bits():
    with pytest.raises(ValueError):
        BinaryHV([0, 2, 1])
    with pytest.raises(ValueError):
        BinaryHV([])
    with pytest.raises(ValueError):
        BipolarHV([1, 0, -1])


def test_dim_is_immutable():
    v = hv("1010")
    with pytest.raises(AttributeError):
        v.dim = 5


# -- bind -----------------------------------------------------------------------


def test_bind_examples():
    a, b, c = hv("1010"), hv("0110"), hv("1100")
    assert bind(a, a) == BinaryHV.zeros(4)
    assert bind(a, BinaryHV.zeros(4)) == a
    assert hamming(bind(a, c), bind(b, c)) == 0.5 == hamming(a, b)


def test_bind_bipolar_is_product():
    a, b = BipolarHV([1, -1, 1]), BipolarHV([-1, -1, 1])
    assert bind(a, b) == BipolarHV([-1, 1, 1])


def test_bind_errors():
    with pytest.raises(DimensionMismatch):
        bind(hv("101"), hv("1010"))
    with pytest.raises(TypeError):
        bind(hv("101"), BipolarHV([1, -1, 1]))


@given(same_dim_triples())
def test_binding_preserves_distance(t):
    a, b, c = t
    assert hamming(bind(a, c), bind(b, c)) == hamming(a, b)


# -- bundle ---------------------------------------------------------------------


def test_bundle_examples():
    v = hv("1101")
    assert bundle([v]) == v
    assert bundle([hv("1010"), hv("1000"), hv("0010")]) == hv("1010")
    assert bundle([hv("1010"), hv("0101")]) == hv("1111")


def test_bundle_errors():
    with pytest.raises(ValueError):
        bundle([])
    with pytest.raises(DimensionMismatch):
        bundle([hv("10"), hv("101")])


@pytest.mark.parametrize("dim", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_bundle_exhaustive_against_majority_oracle(dim, n):
    vectors = list(itertools.product([0, 1], repeat=dim))
    for combo in itertools.product(vectors, repeat=n):
        expected = [1 if sum(col) * 2 >= n else 0 for col in zip(*combo)]
        assert bundle([BinaryHV(v) for v in combo]).bits.tolist() == expected


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_bundle_exhaustive_columns_d8(n):
    # majority is per-bit, so covering every n-bit column pattern in D=8
    # vectors exercises every case that can occur
    patterns = np.array(list(itertools.product([0, 1], repeat=n)), dtype=np.uint8)
    for a in range(0, len(patterns), 8):
        cols = patterns[a : a + 8]
        cols = np.concatenate([cols, patterns[: 8 - len(cols)]])
        vs = [BinaryHV(cols[:, i]) for i in range(n)]
        expected = [1 if 2 * int(c.sum()) >= n else 0 for c in cols]
        assert bundle(vs).bits.tolist() == expected


@settings(max_examples=50)
@given(st.integers(1, 64), st.integers(0, 2**32 - 1))
def test_bundle_containment_odd_lists(dim, seed):
    rng = np.random.default_rng(seed)
    vs = [BinaryHV(rng.integers(0, 2, dim)) for _ in range(3)]
    out = bundle(vs)
    # for three inputs, each output bit agrees with at least two of them
    agree = np.sum([(v.bits == out.bits) for v in vs], axis=0)
    assert (agree >= 2).all()


# -- accumulate -----------------------------------------------------------------


def test_accumulate_examples():
    v = BipolarHV([1, -1, 1])
    acc = accumulate(ScalarAccumulator(3), v)
    assert acc.values.tolist() == [1, -1, 1] and acc.count == 1
    acc = accumulate(acc, -v)
    assert acc.values.tolist() == [0, 0, 0] and acc.count == 2
    acc = ScalarAccumulator(3, np.array([1.0, -1.0, 1.0]), 1)
    acc = accumulate(acc, BipolarHV([1, 1, -1]))
    assert acc.values.tolist() == [2, 0, 0] and acc.count == 2


def test_accumulate_dim_mismatch():
    with pytest.raises(DimensionMismatch):
        accumulate(ScalarAccumulator(3), BipolarHV([1, 1]))


@given(st.integers(1, 50), st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_accumulator_bounds(dim, n, seed):
    rng = np.random.default_rng(seed)
    acc = ScalarAccumulator(dim)
    for _ in range(n):
        acc = accumulate(acc, BipolarHV(rng.choice([-1, 1], dim)))
    assert acc.count == n
    assert (np.abs(acc.values) <= n).all()


def test_accumulator_merge():
    a = ScalarAccumulator(2, np.array([1.0, 2.0]), 1)
    b = ScalarAccumulator(2, np.array([-3.0, 1.0]), 2)
    m = a.merge(b)
    assert m.values.tolist() == [-2.0, 3.0] and m.count == 3


# -- permute --------------------------------------------------------------------


def test_permute_examples():
    v = hv("1000")
    assert permute(v, 0) == v
    assert permute(v, 4) == v
    assert permute(v, 1) == hv("0100")


@given(bits_strategy(), st.integers(-500, 500), st.integers(-500, 500))
def test_permute_composes(bits, a, b):
    v = BinaryHV(bits)
    assert permute(permute(v, a), b) == permute(v, a + b)


@given(same_dim_triples(), st.integers(-300, 300))
def test_permute_preserves_distance(t, r):
    a, b, _ = t
    assert hamming(permute(a, r), permute(b, r)) == hamming(a, b)


# -- similarity -----------------------------------------------------------------


def test_hamming_examples():
    a = hv("10110")
    assert hamming(a, a) == 0
    assert hamming(a, a.complement()) == 1.0
    with pytest.raises(DimensionMismatch):
        hamming(a, hv("1"))


def test_cosine_examples():
    a = BipolarHV([1, -1, 1, 1])
    assert cosine(a, a) == 1
    assert cosine(a, -a) == -1
    assert cosine(a, BipolarHV([1, 1, -1, 1])) == 0
    with pytest.raises(DimensionMismatch):
        cosine(a, BipolarHV([1]))


@given(same_dim_triples())
def test_duality(t):
    a, b, _ = t
    assert cosine(to_bipolar(a), to_bipolar(b)) == 1 - 2 * hamming(a, b)


def test_cosine_matches_float_dot():
    rng = np.random.default_rng(5)
    for _ in range(50):
        x, y = rng.choice([-1, 1], 1000), rng.choice([-1, 1], 1000)
        assert cosine(BipolarHV(x), BipolarHV(y)) == pytest.approx(float(x @ y) / 1000, abs=1e-12)


# -- conversions ----------------------------------------------------------------


def test_conversion_examples():
    assert to_bipolar(hv("101")) == BipolarHV([1, -1, 1])
    assert to_bipolar(BinaryHV.zeros(4)) == BipolarHV([-1, -1, -1, -1])


@given(bits_strategy())
def test_conversion_roundtrip(bits):
    v = BinaryHV(bits)
    assert to_binary(to_bipolar(v)) == v
    w = to_bipolar(v)
    assert to_bipolar(to_binary(w)) == w


def test_hv_hash_and_repr():
    assert len({hv("101"), hv("101"), hv("001")}) == 2
    assert "101" in repr(hv("101"))
