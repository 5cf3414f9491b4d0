"""
Tests for the binary32 exp2 and log2 kernels.
"""
import numpy as np
import pytest

from crvec.fp import Binary32, RoundingMode, ALL_MODES
from crvec.kernels import (
    cr_exp2f, cr_log2f, cr_exp2f_scalar, cr_log2f_scalar, cr_exp2f_array, cr_log2f_array,
    trace_exp2f, trace_log2f,
)
from crvec.kernels.f32 import EXP2F_SHIFTER
from crvec.oracle import correctly_rounded_bits, hardest_case_search
from crvec.vlanes import LaneBatch, KIND_F32


RNE = RoundingMode.NEAREST_EVEN
RZ = RoundingMode.TOWARD_ZERO
RD = RoundingMode.TOWARD_NEGATIVE
MAX_FINITE = 0x7f7fffff


def _batch(values, width=None):
    arr = np.asarray(values, dtype=np.float32)
    if width is None:
        width = (16 if len(arr) % 16 == 0 else 1)
    return LaneBatch.from_floats(arr, width, KIND_F32)


def _bits_batch(patterns, width=1):
    return LaneBatch(np.asarray(patterns, dtype=np.uint32), width, KIND_F32)


def _is_nan32(bits):
    return (bits & 0x7f800000) == 0x7f800000 and (bits & 0x007fffff) != 0


def _matches(got, expected):
    if _is_nan32(expected):
        return _is_nan32(got) and bool(got & 0x00400000)
    return got == expected


def _check_against_oracle(kernel, f_id, patterns, mode, backend="vectorized", tables=None):
    out = kernel(_bits_batch(patterns), mode, backend=backend, tables=tables).to_bits()
    for x, got in zip(patterns, out):
        expected = correctly_rounded_bits(f_id, Binary32(int(x)), mode=mode)
        assert _matches(got, expected), "{}({}) in {}: got 0x{:08x}, expected 0x{:08x}".format(
            f_id, Binary32(int(x)).hex(), mode.name, got, expected,
        )


def _random_patterns(seed, n, lo, hi):
    rng = np.random.default_rng(seed)
    return rng.integers(lo, hi, size=n, dtype=np.uint32, endpoint=True)


def test_exp2f_shifter():
    # adding the shifter rounds to a multiple of 2^-3
    assert EXP2F_SHIFTER == 3.0 * 2.0 ** 48
    assert (EXP2F_SHIFTER + 2.3) - EXP2F_SHIFTER == 2.25
    assert (EXP2F_SHIFTER - 0.05) - EXP2F_SHIFTER == 0.0


@pytest.mark.parametrize("mode", ALL_MODES)
def test_exp2f_specials(tables, mode):
    out = cr_exp2f(_batch([0.0, -0.0, float("inf"), float("-inf")]), mode, tables=tables).values()
    assert out.tolist() == [1.0, 1.0, float("inf"), 0.0]
    assert not np.signbit(out[3])
    nan = cr_exp2f(_bits_batch([0x7fc00000, 0x7f800001]), mode, tables=tables).to_bits()
    assert all(_is_nan32(b) and (b & 0x00400000) for b in nan)


@pytest.mark.parametrize("mode", ALL_MODES)
def test_exp2f_integers_are_exact(tables, mode):
    xs = list(range(-149, 128))
    xs += [0.0] * (-len(xs) % 16)
    out = cr_exp2f(_batch(xs), mode, tables=tables).values()
    for x, y in zip(xs, out):
        assert float(y) == 2.0 ** x


def test_exp2f_overflow(tables):
    x = _batch([128.0, 200.0, 1e30])
    assert cr_exp2f(x, RNE, tables=tables).values().tolist() == [float("inf")] * 3
    assert cr_exp2f(x, RoundingMode.TOWARD_POSITIVE, tables=tables).values().tolist() == [float("inf")] * 3
    assert cr_exp2f(x, RZ, tables=tables).to_bits() == [MAX_FINITE] * 3
    assert cr_exp2f(x, RD, tables=tables).to_bits() == [MAX_FINITE] * 3


def test_exp2f_underflow(tables):
    x = _batch([-151.0, -200.0, -1e30])
    assert cr_exp2f(x, RNE, tables=tables).to_bits() == [0, 0, 0]
    assert cr_exp2f(x, RoundingMode.TOWARD_POSITIVE, tables=tables).to_bits() == [1, 1, 1]


@pytest.mark.parametrize("mode", ALL_MODES)
def test_log2f_specials(tables, mode):
    out = cr_log2f(_batch([1.0, 0.0, -0.0, float("inf")]), mode, tables=tables).values()
    assert out.tolist() == [0.0, float("-inf"), float("-inf"), float("inf")]
    assert not np.signbit(out[0])
    nan = cr_log2f(_batch([-1.0, float("-inf"), float("nan")]), mode, tables=tables).to_bits()
    assert all(_is_nan32(b) for b in nan)


@pytest.mark.parametrize("mode", ALL_MODES)
def test_log2f_powers_of_two_are_exact(tables, mode):
    patterns = [1 << k for k in range(23)] + [e << 23 for e in range(1, 255)]
    out = cr_log2f(_bits_batch(patterns), mode, tables=tables).values()
    for p, y in zip(patterns, out):
        assert float(y) == float(np.log2(np.float64(Binary32(p).to_float())))
    assert float(cr_log2f_scalar(Binary32(1), mode, tables=tables).to_float()) == -149.0
    assert cr_log2f_scalar(Binary32.from_float(8.0), mode, tables=tables).to_float() == 3.0


@pytest.mark.parametrize("mode", ALL_MODES)
def test_exp2f_random_against_oracle(tables, mode):
    # |x| < 128 and a few far out
    patterns = np.concatenate([
        _random_patterns(1, 96, 0x00000000, 0x43000000),
        _random_patterns(2, 96, 0x80000000, 0xc3160000),
        _random_patterns(3, 32, 0x3f800000, 0x40000000),
    ])
    _check_against_oracle(cr_exp2f, "exp2", patterns, mode, tables=tables)


@pytest.mark.parametrize("mode", ALL_MODES)
def test_log2f_random_against_oracle(tables, mode):
    patterns = np.concatenate([
        _random_patterns(4, 160, 0x00000001, 0x7f7fffff),
        _random_patterns(5, 64, 0x3f700000, 0x3f900000),
    ])
    _check_against_oracle(cr_log2f, "log2", patterns, mode, tables=tables)


def test_reference_backend_against_oracle(tables):
    patterns = _random_patterns(6, 24, 0x3c000000, 0x42f00000)
    for mode in (RNE, RD):
        _check_against_oracle(cr_exp2f, "exp2", patterns, mode, backend="reference", tables=tables)
        _check_against_oracle(cr_log2f, "log2", patterns, mode, backend="reference", tables=tables)


def test_exp2f_hardest_case_in_unit_range(tables):
    lo = Binary32.from_float(1.0).bits
    ranked, _ = hardest_case_search("exp2", lo, lo + 1024)
    hard = [case.input.bits for case in ranked[:4]]
    for mode in ALL_MODES:
        _check_against_oracle(cr_exp2f, "exp2", hard, mode, tables=tables)


def test_log2f_hardest_case_near_one(tables):
    lo = Binary32.from_float(1.0).bits
    ranked, _ = hardest_case_search("log2", lo + 1, lo + 1024)
    hard = [case.input.bits for case in ranked[:4]]
    for mode in ALL_MODES:
        _check_against_oracle(cr_log2f, "log2", hard, mode, tables=tables)


@pytest.mark.parametrize("kernel, array_kernel, scalar_kernel", [
    (cr_exp2f, cr_exp2f_array, cr_exp2f_scalar),
    (cr_log2f, cr_log2f_array, cr_log2f_scalar),
])
def test_entry_points_agree(tables, kernel, array_kernel, scalar_kernel):
    patterns = _random_patterns(7, 64, 0, 0xffffffff)
    batch = _bits_batch(patterns, width=16)
    expected = kernel(batch, RNE, tables=tables).to_bits()
    for width in (1, 4, 8):
        assert kernel(batch.regroup(width), RNE, tables=tables).to_bits() == expected
    for i in range(0, 64, 7):
        assert scalar_kernel(batch.lane(i), RNE, tables=tables).bits == expected[i]
    # array entry point pads a partial batch
    values = batch.values()[:37]
    out = array_kernel(values, RNE, width=16, tables=tables)
    assert out.dtype == np.float32 and len(out) == 37
    assert out.view(np.uint32).tolist() == expected[:37]


def test_exp2f_is_monotone(tables):
    xs = np.sort(np.random.default_rng(8).uniform(-150.0, 127.5, size=512).astype(np.float32))
    for mode in ALL_MODES:
        out = cr_exp2f(_batch(xs), mode, tables=tables).values()
        assert np.all(np.diff(out.astype(np.float64)) >= 0)


def test_log2f_is_monotone(tables):
    xs = np.sort(np.random.default_rng(9).uniform(0.25, 4.0, size=512).astype(np.float32))
    for mode in ALL_MODES:
        out = cr_log2f(_batch(xs), mode, tables=tables).values()
        assert np.all(np.diff(out.astype(np.float64)) >= 0)


def test_exp2f_trace(tables):
    xs = [0.0, 1.0, 3.125, -2.5, 0.0625, -0.0625, 127.0, -149.0] * 2
    trace = trace_exp2f(_batch(xs), RNE, tables=tables)
    R = trace.R.values()
    Nd = trace.Nd.values()
    assert np.all(np.abs(R) <= 2.0 ** -4)
    assert np.all(Nd * 8 == np.round(Nd * 8))
    assert np.array_equal(Nd + R, np.asarray(xs, dtype=np.float64))
    sticky = trace.sticky.to_bits()
    for x, r, s in zip(xs, R, sticky):
        assert s == (0 if r == 0.0 else 1)
        if float(x).is_integer():
            assert s == 0
    assert trace.result == cr_exp2f(_batch(xs), RNE, tables=tables)


def test_log2f_trace(tables):
    xs = np.random.default_rng(10).uniform(1e-6, 1e6, size=32).astype(np.float32)
    trace = trace_log2f(_batch(xs), RNE, tables=tables)
    mx = trace.mx.values()
    assert np.all((mx >= 0.75) & (mx < 1.5))
    assert np.array_equal(np.ldexp(mx, trace.ex.values().astype(np.int64)), xs.astype(np.float64))
    assert np.array_equal(trace.R.values(), 1.5 * (mx - 1.0))
    assert set(trace.index.to_bits()) <= set(range(8))


@pytest.mark.slow
@pytest.mark.parametrize("mode", ALL_MODES)
def test_exp2f_dense_slice_against_oracle(tables, mode):
    lo = Binary32.from_float(-1.0).bits
    _check_against_oracle(cr_exp2f, "exp2", np.arange(lo, lo + (1 << 14), dtype=np.uint32), mode, tables=tables)
