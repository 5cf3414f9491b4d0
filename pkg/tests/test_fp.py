"""
Tests for the bit level helpers.
"""
import random
import struct
from fractions import Fraction

import pytest

from crvec.fp import (
    BINARY32, BINARY64, Binary32, Binary64, INCOMPARABLE, RoundingMode, ALL_MODES,
    decompose, compose, ulp32_distance, ulp_distance, round_scaled, convert_f64_to_f32, parse_hex_exact,
)
from crvec.fp.bits import float_to_bits, bits_to_float, split, widen_bits, ordered_key
from crvec.fp.rounding import overflow_bits


RNE = RoundingMode.NEAREST_EVEN
RZ = RoundingMode.TOWARD_ZERO
RU = RoundingMode.TOWARD_POSITIVE
RD = RoundingMode.TOWARD_NEGATIVE


def _f32(value):
    return Binary32.from_float(value)


def _value(bits, fmt):
    sign, mantissa, exponent = split(bits, fmt)
    return (-1) ** sign * Fraction(mantissa) * Fraction(2) ** exponent


def struct_round(v):
    return struct.unpack("<I", struct.pack("<f", v))[0]


@pytest.mark.parametrize("value, fields", [
    (1.0, (0, 1023, 0)),
    (-0.0, (1, 0, 0)),
    (float("inf"), (0, 2047, 0)),
    (-2.5, (1, 1024, 1 << 50)),
])
def test_decompose(value, fields):
    x = Binary64.from_float(value)
    assert decompose(x) == fields
    assert compose(*fields) == x


def test_decompose_roundtrip_random():
    rng = random.Random(1)
    patterns = [rng.getrandbits(64) for _ in range(5000)]
    patterns += [0, 1 << 63, 0x7ff0000000000000, 0x7ff8000000000001, 0xfff4000000000000, 0x000fffffffffffff]
    for bits in patterns:
        x = Binary64(bits)
        assert compose(*decompose(x)) == x


def test_decompose_roundtrip_binary32_nan_payload():
    x = Binary32(0x7fa00001)
    assert compose(*decompose(x), cls=Binary32) == x


def test_float_bits_roundtrip():
    for value in (0.0, 1.0, -1.5, 2.0 ** -1074, 1.7976931348623157e+308):
        assert bits_to_float(float_to_bits(value)) == value


def test_widen_is_exact():
    for value in (1.0, -0.375, 2.0 ** -149, 3.4028234663852886e+38):
        assert _f32(value).widen().to_float() == value
    assert widen_bits(0x80000000) == 1 << 63


@pytest.mark.parametrize("mode", ALL_MODES)
def test_convert_exact(mode):
    assert convert_f64_to_f32(Binary64.from_float(1.5), mode) == _f32(1.5)


def test_convert_tie_to_even_underflow():
    # 2^-150 lies halfway between +0 and the minimum subnormal
    assert convert_f64_to_f32(Binary64.from_float(2.0 ** -150), RNE) == _f32(0.0)
    assert convert_f64_to_f32(Binary64.from_float(2.0 ** -150), RU) == Binary32(1)
    assert convert_f64_to_f32(Binary64.from_float(-(2.0 ** -150)), RD) == Binary32(0x80000001)
    assert convert_f64_to_f32(Binary64.from_float(-(2.0 ** -150)), RNE) == _f32(-0.0)


def test_convert_overflow_per_mode():
    v = Binary64.from_float(2.0 ** 128 * (1 - 2.0 ** -30))
    assert convert_f64_to_f32(v, RZ).bits == BINARY32.max_finite
    assert convert_f64_to_f32(v, RD).bits == BINARY32.max_finite
    assert convert_f64_to_f32(v, RU).bits == BINARY32.inf
    assert convert_f64_to_f32(v, RNE).bits == BINARY32.inf
    neg = Binary64(v.bits | (1 << 63))
    assert convert_f64_to_f32(neg, RU).bits == (1 << 31) | BINARY32.max_finite
    assert convert_f64_to_f32(neg, RD).bits == (1 << 31) | BINARY32.inf


def test_convert_nan_keeps_sign_and_payload_top():
    v = Binary64(0xfff4000000000000 | (0x123 << 29))
    result = convert_f64_to_f32(v, RNE)
    assert result.is_nan()
    assert result.bits >> 31 == 1
    assert result.bits & BINARY32.quiet_bit
    assert result.bits & 0x3fffff == 0x200123


def test_convert_matches_hardware_rne():
    # the host converts with round to nearest even
    rng = random.Random(2)
    for _ in range(20000):
        bits = rng.getrandbits(64)
        v = Binary64(bits)
        if not v.is_finite():
            continue
        value = v.to_float()
        if abs(value) >= 3.4028235677973366e+38:
            continue
        assert convert_f64_to_f32(v, RNE).bits == struct_round(value), v.hex()


def test_convert_mode_ordering():
    rng = random.Random(3)
    for _ in range(5000):
        v = Binary64(rng.getrandbits(64))
        if not v.is_finite():
            continue
        results = {m: _value(convert_f64_to_f32(v, m).bits, BINARY32) for m in ALL_MODES if convert_f64_to_f32(v, m).is_finite()}
        if len(results) < 4:
            continue
        assert results[RD] <= results[RNE] <= results[RU]
        assert abs(results[RZ]) <= abs(results[RNE])


def test_convert_monotone():
    values = sorted(random.Random(4).uniform(-1e-38, 1e-38) for _ in range(3000))
    for mode in ALL_MODES:
        converted = [_value(convert_f64_to_f32(Binary64.from_float(v), mode).bits, BINARY32) for v in values]
        assert converted == sorted(converted)


@pytest.mark.parametrize("a, b, distance", [
    (1.0, 1.0, 0),
    (-0.0, 0.0, 1),
    (0.0, 2.0 ** -149, 1),
    (-(2.0 ** -149), 2.0 ** -149, 3),
])
def test_ulp32_distance(a, b, distance):
    assert ulp32_distance(_f32(a), _f32(b)) == distance


def test_ulp32_distance_next_up():
    one = _f32(1.0)
    assert ulp32_distance(one, Binary32(one.bits + 1)) == 1


def test_ulp_distance_nan_is_incomparable():
    assert ulp32_distance(Binary32(0x7fc00000), _f32(1.0)) is INCOMPARABLE
    assert ulp_distance(BINARY64.default_nan, 0, BINARY64) is INCOMPARABLE


def test_ordered_key_order():
    values = [-float("inf"), -1.0, -(2.0 ** -1074), -0.0, 0.0, 2.0 ** -1074, 1.0, float("inf")]
    keys = [ordered_key(float_to_bits(v)) for v in values]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)


@pytest.mark.parametrize("mode, expected", [
    (RNE, BINARY64.inf),
    (RZ, BINARY64.max_finite),
    (RU, BINARY64.inf),
    (RD, BINARY64.max_finite),
])
def test_overflow_bits(mode, expected):
    assert overflow_bits(0, BINARY64, mode) == expected


def test_round_scaled():
    # 3 * 2^-1 = 1.5
    assert round_scaled(0, 3, -1, BINARY64, RNE) == float_to_bits(1.5)
    # 2^53 + 1 is a tie between 2^53 and 2^53 + 2
    assert round_scaled(0, (1 << 53) + 1, 0, BINARY64, RNE) == float_to_bits(2.0 ** 53)
    assert round_scaled(0, (1 << 53) + 1, 0, BINARY64, RU) == float_to_bits(2.0 ** 53 + 2)
    assert round_scaled(1, (1 << 53) + 1, 0, BINARY64, RZ) == float_to_bits(-(2.0 ** 53))
    assert round_scaled(1, 0, 5, BINARY64, RNE) == 1 << 63
    # rounding up into the next binade
    assert round_scaled(0, (1 << 54) - 1, 0, BINARY64, RU) == float_to_bits(2.0 ** 54)


@pytest.mark.parametrize("literal, value", [
    ("0x1p+0", 1.0),
    ("0x1.8p+0", 1.5),
    ("-0x1p-1074", -(2.0 ** -1074)),
    ("0x0.0000000000001p-1022", 2.0 ** -1074),
    ("0x1.fffffffffffffp+1023", 1.7976931348623157e+308),
])
def test_parse_hex_exact(literal, value):
    assert parse_hex_exact(literal) == float_to_bits(value)


@pytest.mark.parametrize("literal", ["0x1.00000000000008p+0", "0x1p-1075", "0x1p+1024", "1.5", "0xp+0"])
def test_parse_hex_exact_rejects(literal):
    with pytest.raises(ValueError):
        parse_hex_exact(literal)


def test_parse_hex_exact_binary32():
    assert parse_hex_exact("0x1.000002p+0", BINARY32) == 0x3f800001
    with pytest.raises(ValueError):
        parse_hex_exact("0x1.000001p+0", BINARY32)


def test_rounding_mode_names():
    for mode in ALL_MODES:
        assert RoundingMode.from_name(mode.short_name) is mode
        assert RoundingMode.from_name(mode.name.lower()) is mode
    with pytest.raises(KeyError):
        RoundingMode.from_name("up")
