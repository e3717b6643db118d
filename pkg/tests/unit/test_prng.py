import numpy as np

from tensorbridge.conformance.prng import MASK64, SplitMix64, case_seed
from tensorbridge.core.types import DType


def test_reference_sequence():
    rng = SplitMix64(0)
    assert rng.next_u64() == 0xE220A8397B1DCDAF
    assert rng.next_u64() == 0x6E789E6AA1B965F4


def test_same_seed_same_stream():
    a, b = SplitMix64(42), SplitMix64(42)
    assert [a.next_u64() for _ in range(5)] == [b.next_u64() for _ in range(5)]
    assert SplitMix64(43).next_u64() != SplitMix64(42).next_u64()


def test_case_seed_is_xor():
    assert case_seed(42, 0) == 42
    assert case_seed(42, 3) == 42 ^ 3
    assert case_seed(MASK64, 1) == MASK64 - 1


def test_next_float_range():
    rng = SplitMix64(7)
    values = [rng.next_float() for _ in range(1000)]
    assert all(0.0 <= v < 1.0 for v in values)


def test_uniform_min_abs():
    rng = SplitMix64(11)
    values = [rng.uniform(min_abs=0.1) for _ in range(2000)]
    assert all(abs(v) >= 0.1 for v in values)
    assert all(-2.1 <= v < 2.1 for v in values)


def test_randint_and_coin():
    rng = SplitMix64(5)
    assert all(0 <= rng.randint(4) < 4 for _ in range(200))
    assert {rng.coin() for _ in range(200)} == {True, False}


def test_array_is_bit_reproducible():
    a = SplitMix64(99).array((2, 3), DType.F32)
    b = SplitMix64(99).array((2, 3), DType.F32)
    assert a.dtype == np.float32
    assert a.shape == (2, 3)
    assert a.tobytes() == b.tobytes()


def test_rank_zero_array():
    assert SplitMix64(1).array(()).shape == ()
