"""
Tests for the lane layer.
"""
import numpy as np
import pytest

from crvec.fp import BINARY64, Binary32, RoundingMode, ALL_MODES
from crvec.fp.bits import float_to_bits, ulp_distance
from crvec.vlanes import LaneBatch, LaneMask, WIDTHS, KIND_F64, KIND_F32, KIND_INT, get_backend, available_backends


BACKENDS = ["reference", "vectorized"]
NAN = float("nan")
INF = float("inf")


def _batch(*values, width=None):
    values = list(values)
    if width is None:
        width = max(w for w in WIDTHS if len(values) % w == 0)
    return LaneBatch.from_floats(values, width)


def _ints(*values, width=1):
    return LaneBatch(list(values), width, KIND_INT)


def _floats(batch):
    return batch.values().tolist()


def mixed_patterns(n, seed):
    """Random binary64 patterns spread over all value classes."""
    rng = np.random.default_rng(seed)
    classes = [
        rng.integers(0, 1 << 63, size=n, dtype=np.uint64),
        np.full(n, 0, dtype=np.uint64),
        rng.integers(1, 1 << 52, size=n, dtype=np.uint64),
        np.full(n, BINARY64.inf, dtype=np.uint64),
        rng.integers(BINARY64.inf + 1, 1 << 63, size=n, dtype=np.uint64),
        rng.uniform(-300, 300, size=n).view(np.uint64),
        rng.uniform(0.5, 2.0, size=n).view(np.uint64),
    ]
    which = rng.integers(0, len(classes), size=n)
    out = np.choose(which, classes).astype(np.uint64)
    signs = rng.integers(0, 2, size=n, dtype=np.uint64) << np.uint64(63)
    return out | signs


@pytest.fixture(params=BACKENDS)
def backend(request):
    return get_backend(request.param)


def test_available_backends():
    assert available_backends() == ["reference", "vectorized"]
    with pytest.raises(KeyError):
        get_backend("avx512")


# ================ containers ================


def test_batch_width_checked():
    with pytest.raises(AssertionError):
        LaneBatch.from_floats([1.0, 2.0, 3.0], 4)
    with pytest.raises(AssertionError):
        LaneBatch.from_floats([1.0, 2.0], 2)


def test_batch_stacking_and_regroup():
    b = LaneBatch.from_floats(np.arange(16.0), 4)
    assert b.n_batches == 4
    assert len(list(b.batches())) == 4
    assert b.regroup(8).n_batches == 2
    assert np.array_equal(b.regroup(8).data, b.data)
    assert b.lane(5).to_float() == 5.0
    assert b.take([3, 1]).to_bits() == [float_to_bits(3.0), float_to_bits(1.0)]


def test_batch_from_values_f32():
    b = LaneBatch.from_values([Binary32.from_float(1.5)] * 4, 4)
    assert b.kind == KIND_F32
    assert b.lane(0) == Binary32.from_float(1.5)


def test_mask_counts():
    m = LaneMask([True, False, False, False, True, True, False, False], 4)
    assert m.count() == 3
    assert m.per_batch_counts().tolist() == [1, 2]
    assert m.indices().tolist() == [0, 4, 5]
    assert (~m).count() == 5
    assert m.as_lane_bits().data.tolist() == [-1, 0, 0, 0, -1, -1, 0, 0]


# ================ rounded arithmetic ================


def test_fma_rn_examples(backend):
    assert _floats(backend.fma_rn(_batch(1.0), 1.0, 1.0)) == [2.0]
    # fused: no intermediate rounding of the product
    assert _floats(backend.fma_rn(_batch(2.0 ** -30), 2.0 ** -30, -(2.0 ** -60))) == [0.0]
    x = float.fromhex("0x1.0000001p0")
    # 1 + 2^-27 + 2^-56 rounds to 1 + 2^-27
    assert _floats(backend.fma_rn(_batch(x), x, 0.0)) == [1 + 2.0 ** -27]


def test_rz_examples(backend):
    assert _floats(backend.add_rz(_batch(1.0), 2.0 ** -60)) == [1.0]
    assert _floats(backend.fma_rz(_batch(-1.0), 2.0 ** -60, -1.0)) == [-1.0]
    assert _floats(backend.mul_rz(_batch(1.0 + 2.0 ** -52), 1.0 - 2.0 ** -53)) == [1.0]
    # the round to nearest result is above the exact value here
    y = 1.0 - 2.0 ** -53
    assert _floats(backend.add_rz(_batch(1.0), -(2.0 ** -60))) == [y]


def test_fma_rz_against_rn():
    ref = get_backend("reference")
    rng = np.random.default_rng(7)
    a = LaneBatch.from_floats(rng.uniform(-4, 4, size=2048), 8)
    b = LaneBatch.from_floats(rng.uniform(-4, 4, size=2048), 8)
    c = LaneBatch.from_floats(rng.uniform(-4, 4, size=2048) * 2.0 ** -20, 8)
    rz = ref.fma_rz(a, b, c).values()
    rn = ref.fma_rn(a, b, c).values()
    assert (np.abs(rz) <= np.abs(rn)).all()
    for x, y in zip(rz.tolist(), rn.tolist()):
        assert ulp_distance(float_to_bits(x), float_to_bits(y)) <= 1


def test_nan_propagation_first_operand(backend):
    n1 = LaneBatch([0x7ff4000000000001], 1, KIND_F64)
    n2 = LaneBatch([0x7ff8000000000002], 1, KIND_F64)
    result = backend.add_rn(n1, n2)
    assert result.to_bits() == [0x7ffc000000000001]
    result = backend.add_rn(_batch(1.0), n2)
    assert result.to_bits() == [0x7ff8000000000002]
    invalid = backend.add_rn(_batch(INF), -INF)
    assert invalid.to_bits() == [BINARY64.default_nan]


# ================ decomposition helpers ================


def test_reduce_frac_examples(backend):
    x = 0.3
    assert _floats(backend.reduce_frac(_batch(x), 3)) == [0.3 - 0.25]
    assert _floats(backend.reduce_frac(_batch(2.0), 3)) == [0.0]
    specials = backend.reduce_frac(_batch(INF, -INF, NAN, 0.0), 3)
    assert specials.to_bits()[:2] == [0, 0]
    assert np.isnan(specials.values()[2])


def test_reduce_frac_range(backend):
    rng = np.random.default_rng(3)
    x = rng.uniform(-200, 200, size=4096)
    r = backend.reduce_frac(LaneBatch.from_floats(x, 16), 3).values()
    assert (np.abs(r) <= 2.0 ** -4).all()
    scaled = (x - r) * 8
    assert (scaled == np.round(scaled)).all()


@pytest.mark.parametrize("x, expected", [(2.6, 5), (0.0, 0), (-0.0625, 0), (-0.125, 7)])
def test_shifter_index(backend, x, expected):
    assert backend.shifter_index(_batch(x), float.fromhex("0x1.8p+49"), 3).to_bits() == [expected]


def test_shifter_integer(backend):
    x = _batch(-3.0, 5.5, 1023.0, -1100.0)
    got = backend.shifter_integer(x, float.fromhex("0x1.8p+52")).to_bits()
    assert got == [-3, 6, 1023, -1100]


@pytest.mark.parametrize("x, expected", [(6.0, 0.75), (1.25, 1.25), (0.0, 1.0), (-0.0, 1.0), (INF, 1.0), (2.0 ** -1074, 1.0)])
def test_getmant(backend, x, expected):
    assert _floats(backend.getmant_075_15(_batch(x))) == [expected]


def test_getmant_negative_is_nan(backend):
    assert backend.getmant_075_15(_batch(-3.0)).to_bits() == [BINARY64.default_nan]
    assert backend.getmant_075_15(_batch(-INF)).to_bits() == [BINARY64.default_nan]


@pytest.mark.parametrize("x, expected", [(6.0, 2.0), (2.0 ** -149, -149.0), (2.0 ** -1074, -1074.0), (0.0, -INF), (-0.0, -INF), (-INF, INF)])
def test_getexp(backend, x, expected):
    assert _floats(backend.getexp(_batch(x))) == [expected]


@pytest.mark.parametrize("x, y, expected", [(1.5, 3.7, 12.0), (1.0, -INF, 0.0), (1.0, INF, INF), (1.0, 1.0e9, INF), (1.0, -1.0e9, 0.0), (1.0, -1074.0, 2.0 ** -1074)])
def test_scalef(backend, x, y, expected):
    assert _floats(backend.scalef(_batch(x), y)) == [expected]


def test_scalef_nan(backend):
    assert np.isnan(backend.scalef(_batch(NAN), 1.0).values()).all()
    assert np.isnan(backend.scalef(_batch(1.0), NAN).values()).all()


def test_widen_narrow(backend):
    b32 = LaneBatch.from_floats([1.5, -(2.0 ** -149), 3.0e38, -0.0], 4, KIND_F32)
    wide = backend.widen(b32)
    assert _floats(wide) == [1.5, -(2.0 ** -149), float(np.float32(3.0e38)), -0.0]
    assert backend.narrow(wide, RoundingMode.NEAREST_EVEN) == b32
    up = backend.narrow(_batch(1.0 + 2.0 ** -40), RoundingMode.TOWARD_POSITIVE)
    assert up.to_bits() == [0x3f800001]


# ================ exact lane operations ================


def test_permute_table(backend):
    table = np.array([float_to_bits(float(i)) for i in range(8)], dtype=np.uint64)
    assert _floats(backend.permute_table(table, _ints(0, 9, 7, 15, width=4))) == [0.0, 1.0, 7.0, 7.0]


def test_gather64(backend):
    table = np.arange(100, 228, dtype=np.int64)
    assert backend.gather64(table, _ints(0, 127, 5, 1, width=4)).to_bits() == [100, 227, 105, 101]
    with pytest.raises(AssertionError):
        backend.gather64(table, _ints(128))


def test_bit_ops(backend):
    assert backend.or_bits(_batch(2.0), 1).to_bits() == [float_to_bits(2.0) | 1]
    assert backend.shift_right(_ints(-1), 63).to_bits() == [1]
    assert backend.shift_right_arith(_ints(-16), 2).to_bits() == [-4]
    assert backend.and_bits(_batch(1.0), 0xFFF0000000000000).to_bits() == [float_to_bits(1.0)]
    assert backend.add_int(_ints(5), -7).to_bits() == [-2]
    assert _floats(backend.int_to_f64(_ints(-3))) == [-3.0]


def test_compare_neq(backend):
    assert not backend.compare_neq_mask(_batch(0.0), -0.0).any()
    assert backend.compare_neq_mask(_batch(NAN), _batch(NAN)).count() == 1
    assert backend.compare_mask(_batch(1.0, 2.0, NAN, -1.0), "<", 1.5).data.tolist() == [True, False, False, True]


def test_select(backend):
    mask = LaneMask([True, False, True, False], 4)
    assert _floats(backend.select(mask, _batch(1.0, 2.0, 3.0, 4.0), 0.0)) == [1.0, 0.0, 3.0, 0.0]
    assert _floats(backend.select(mask, 5.0, 6.0)) == [5.0, 6.0, 5.0, 6.0]


def test_sticky_bit_sequence(backend):
    r = _batch(0.0, 2.0 ** -60, -0.0, NAN)
    sticky = backend.shift_right(backend.compare_neq_mask(r, 0.0).as_lane_bits(), 63)
    assert sticky.to_bits() == [0, 1, 0, 1]


# ================ backend equivalence ================


BINARY_OPS = ["add_rn", "sub_rn", "mul_rn", "add_rz", "mul_rz"]


@pytest.mark.parametrize("op", BINARY_OPS)
def test_backends_agree_binary(op):
    ref, vec = get_backend("reference"), get_backend("vectorized")
    a = LaneBatch(mixed_patterns(4096, 1), 8)
    b = LaneBatch(mixed_patterns(4096, 2), 8)
    assert getattr(vec, op)(a, b) == getattr(ref, op)(a, b)


@pytest.mark.parametrize("op", ["fma_rn", "fma_rz"])
def test_backends_agree_fma(op):
    ref, vec = get_backend("reference"), get_backend("vectorized")
    a = LaneBatch(mixed_patterns(4096, 3), 8)
    b = LaneBatch(mixed_patterns(4096, 4), 8)
    c = LaneBatch(mixed_patterns(4096, 5), 8)
    assert getattr(vec, op)(a, b, c) == getattr(ref, op)(a, b, c)


def test_backends_agree_fma_cancellation():
    # products that nearly cancel the addend exercise the residual logic
    ref, vec = get_backend("reference"), get_backend("vectorized")
    rng = np.random.default_rng(11)
    a = rng.uniform(0.5, 2.0, size=4096)
    b = rng.uniform(0.5, 2.0, size=4096)
    c = -(a * b)
    batches = [LaneBatch.from_floats(v, 16) for v in (a, b, c)]
    assert vec.fma_rn(*batches) == ref.fma_rn(*batches)
    assert vec.fma_rz(*batches) == ref.fma_rz(*batches)


@pytest.mark.parametrize("op", ["getmant_075_15", "getexp"])
def test_backends_agree_unary(op):
    ref, vec = get_backend("reference"), get_backend("vectorized")
    x = LaneBatch(mixed_patterns(4096, 6), 4)
    assert getattr(vec, op)(x) == getattr(ref, op)(x)


def test_backends_agree_reduce_and_scale():
    ref, vec = get_backend("reference"), get_backend("vectorized")
    x = LaneBatch(mixed_patterns(4096, 8), 4)
    y = LaneBatch(np.random.default_rng(9).uniform(-1200, 1200, size=4096).view(np.uint64), 4)
    assert vec.reduce_frac(x, 3) == ref.reduce_frac(x, 3)
    assert vec.scalef(x, y) == ref.scalef(x, y)


@pytest.mark.parametrize("mode", ALL_MODES)
def test_backends_agree_narrow(mode):
    ref, vec = get_backend("reference"), get_backend("vectorized")
    x = LaneBatch(mixed_patterns(4096, 10), 16)
    assert vec.narrow(x, mode) == ref.narrow(x, mode)


def test_lane_independence(backend):
    rng = np.random.default_rng(12)
    a = LaneBatch(mixed_patterns(512, 13), 8)
    b = LaneBatch(mixed_patterns(512, 14), 8)
    perm = rng.permutation(512)
    direct = backend.fma_rz(a, b, 1.0).data[perm]
    permuted = backend.fma_rz(a.like(a.data[perm]), b.like(b.data[perm]), 1.0).data
    assert np.array_equal(direct, permuted)
