"""
Rounding modes and exact rounding into binary formats.

Every rounding in this package (format conversion, the soft-float
reference backend, the oracle) goes through L{round_scaled}, which rounds
an exact value given as integer mantissa and power of two. Nothing here
depends on the floating-point environment of the host.
"""
import re
from enum import IntEnum

from .bits import BINARY32, BINARY64, Binary32, split, is_nan, is_finite


class RoundingMode(IntEnum):
    """
    The four IEEE-754 rounding-direction attributes for binary formats.
    """
    NEAREST_EVEN = 0
    TOWARD_ZERO = 1
    TOWARD_POSITIVE = 2
    TOWARD_NEGATIVE = 3

    @property
    def short_name(self):
        """The short name used on the command line."""
        return _SHORT_NAMES[self]

    @classmethod
    def from_name(cls, name):
        """
        Return the rounding mode for a short or long name.

        @param name: name of the mode ("rne", "rz", "ru", "rd" or the enum name)
        @type name: L{str}
        @return: the rounding mode
        @rtype: L{RoundingMode}
        @raises KeyError: if the name is unknown
        """
        lname = name.strip().lower()
        for mode, short in _SHORT_NAMES.items():
            if lname in (short, mode.name.lower()):
                return mode
        raise KeyError("Unknown rounding mode '{}'!".format(name))


_SHORT_NAMES = {
    RoundingMode.NEAREST_EVEN: "rne",
    RoundingMode.TOWARD_ZERO: "rz",
    RoundingMode.TOWARD_POSITIVE: "ru",
    RoundingMode.TOWARD_NEGATIVE: "rd",
}

ALL_MODES = tuple(RoundingMode)
DIRECTED_MODES = (RoundingMode.TOWARD_ZERO, RoundingMode.TOWARD_POSITIVE, RoundingMode.TOWARD_NEGATIVE)


def _round_away(mode, sign, rem, half, odd):
    """
    Decide whether a truncated mantissa has to be incremented.

    @param mode: rounding mode
    @type mode: L{RoundingMode}
    @param sign: sign of the value
    @type sign: L{int}
    @param rem: the discarded bits (nonzero)
    @type rem: L{int}
    @param half: the value of the discarded bits at the exact midpoint
    @type half: L{int}
    @param odd: whether the truncated mantissa is odd
    @type odd: L{bool}
    @return: whether to increment the magnitude
    @rtype: L{bool}
    """
    if mode == RoundingMode.NEAREST_EVEN:
        return rem > half or (rem == half and odd)
    elif mode == RoundingMode.TOWARD_ZERO:
        return False
    elif mode == RoundingMode.TOWARD_POSITIVE:
        return sign == 0
    else:
        return sign == 1


def overflow_bits(sign, fmt, mode):
    """
    Return the result of an overflowing rounding.

    @param sign: sign of the exact value
    @type sign: L{int}
    @param fmt: destination format
    @type fmt: L{crvec.fp.bits.Format}
    @param mode: rounding mode
    @type mode: L{RoundingMode}
    @return: the bit pattern of either Inf or the largest finite value
    @rtype: L{int}
    """
    if mode == RoundingMode.NEAREST_EVEN:
        to_inf = True
    elif mode == RoundingMode.TOWARD_ZERO:
        to_inf = False
    elif mode == RoundingMode.TOWARD_POSITIVE:
        to_inf = (sign == 0)
    else:
        to_inf = (sign == 1)
    magnitude = (fmt.inf if to_inf else fmt.max_finite)
    return (sign << (fmt.width - 1)) | magnitude


def round_scaled(sign, mantissa, exponent, fmt, mode):
    """
    Round the exact value (-1)^sign * mantissa * 2^exponent into a format.

    Handles gradual underflow, overflow per mode and signed zeros (a zero
    mantissa yields a zero with the given sign).

    @param sign: sign bit
    @type sign: L{int}
    @param mantissa: non-negative integer mantissa
    @type mantissa: L{int}
    @param exponent: power of two scaling the mantissa
    @type exponent: L{int}
    @param fmt: destination format
    @type fmt: L{crvec.fp.bits.Format}
    @param mode: rounding mode
    @type mode: L{RoundingMode}
    @return: the bit pattern of the rounded value
    @rtype: L{int}
    """
    assert mantissa >= 0
    p = fmt.precision
    if mantissa == 0:
        return sign << (fmt.width - 1)
    top = exponent + mantissa.bit_length() - 1
    # exponent of the last kept bit
    quantum = max(top - (p - 1), fmt.emin - (p - 1))
    shift = quantum - exponent
    if shift <= 0:
        m = mantissa << -shift
    else:
        m = mantissa >> shift
        rem = mantissa & ((1 << shift) - 1)
        if rem and _round_away(mode, sign, rem, 1 << (shift - 1), m & 1):
            m += 1
            if m == (1 << p):
                m >>= 1
                quantum += 1
    if m >> (p - 1):
        top = quantum + p - 1
        if top > fmt.emax:
            return overflow_bits(sign, fmt, mode)
        field = top + fmt.bias
        frac = m & fmt.mantissa_mask
    else:
        # subnormal
        field = 0
        frac = m
    return (sign << (fmt.width - 1)) | (field << fmt.mantissa_bits) | frac


def convert_bits_f64_to_f32(bits, mode):
    """
    Convert a binary64 pattern to a binary32 pattern, see L{convert_f64_to_f32}.

    @param bits: binary64 bit pattern
    @type bits: L{int}
    @param mode: rounding mode
    @type mode: L{RoundingMode}
    @return: binary32 bit pattern
    @rtype: L{int}
    """
    sign = bits >> 63
    if not is_finite(bits, BINARY64):
        if is_nan(bits, BINARY64):
            payload = (bits & BINARY64.mantissa_mask) >> (BINARY64.mantissa_bits - BINARY32.mantissa_bits)
            return (sign << 31) | BINARY32.inf | BINARY32.quiet_bit | payload
        return (sign << 31) | BINARY32.inf
    sign, mantissa, exponent = split(bits, BINARY64)
    return round_scaled(sign, mantissa, exponent, BINARY32, mode)


def convert_f64_to_f32(v, mode=RoundingMode.NEAREST_EVEN):
    """
    Convert a binary64 value to binary32 under a rounding mode.

    NaNs are quieted, keep their sign and the top of their payload.

    @param v: value to convert
    @type v: L{crvec.fp.bits.Binary64}
    @param mode: rounding mode
    @type mode: L{RoundingMode}
    @return: the converted value
    @rtype: L{crvec.fp.bits.Binary32}
    """
    return Binary32(convert_bits_f64_to_f32(v.bits, mode))


_HEX_FLOAT = re.compile(
    r"^\s*([+-])?0[xX]([0-9a-fA-F]*)(?:\.([0-9a-fA-F]*))?[pP]([+-]?[0-9]+)\s*$"
)
_SPECIAL_LITERALS = {
    "inf": "inf", "infinity": "inf",
    "nan": "nan",
}


def parse_hex_exact(literal, fmt=BINARY64):
    """
    Parse a C99 hex-float literal into a format without rounding.

    "inf", "-inf" and "nan" are accepted as well.

    @param literal: the literal to parse, e.g. "0x1.8p+49"
    @type literal: L{str}
    @param fmt: format to parse into
    @type fmt: L{crvec.fp.bits.Format}
    @return: the bit pattern
    @rtype: L{int}
    @raises ValueError: if the literal is malformed or not exactly representable
    """
    stripped = literal.strip()
    sign = 0
    body = stripped
    if body[:1] in ("+", "-"):
        sign = (1 if body[0] == "-" else 0)
        body = body[1:]
    special = _SPECIAL_LITERALS.get(body.lower())
    if special == "inf":
        return (sign << (fmt.width - 1)) | fmt.inf
    elif special == "nan":
        return (sign << (fmt.width - 1)) | fmt.default_nan
    match = _HEX_FLOAT.match(stripped)
    if match is None:
        raise ValueError("Malformed hex-float literal '{}'".format(literal))
    int_digits, frac_digits, exp_digits = match.group(2), match.group(3) or "", match.group(4)
    if not (int_digits or frac_digits):
        raise ValueError("Hex-float literal '{}' has no digits".format(literal))
    mantissa = int((int_digits + frac_digits) or "0", 16)
    exponent = int(exp_digits) - 4 * len(frac_digits)
    bits = round_scaled(sign, mantissa, exponent, fmt, RoundingMode.NEAREST_EVEN)
    if mantissa == 0:
        return bits
    if not is_finite(bits, fmt):
        raise ValueError("Hex-float literal '{}' overflows {}".format(literal, fmt.name))
    _, m2, e2 = split(bits, fmt)
    # compare m * 2^e with m2 * 2^e2 exactly
    low = min(exponent, e2)
    if (mantissa << (exponent - low)) != (m2 << (e2 - low)):
        raise ValueError("Hex-float literal '{}' is not exactly representable in {}".format(literal, fmt.name))
    return bits
