"""
Bit-level views of IEEE-754 binary32 and binary64 values.

All values are handled as their integer bit patterns; converting to and
from python floats only ever happens where it is exact.

@var BINARY32: format descriptor of IEEE-754 binary32
@type BINARY32: L{Format}
@var BINARY64: format descriptor of IEEE-754 binary64
@type BINARY64: L{Format}
@var INCOMPARABLE: value returned by L{ulp_distance} when a NaN is involved
@type INCOMPARABLE: L{None}
"""
import struct


class Format(object):
    """
    Description of a binary interchange format.

    @ivar name: name of the format
    @type name: L{str}
    @ivar width: total number of bits
    @type width: L{int}
    @ivar precision: significand precision in bits, including the implicit bit
    @type precision: L{int}
    @ivar exponent_bits: width of the biased exponent field
    @type exponent_bits: L{int}
    """
    def __init__(self, name, width, precision, exponent_bits):
        """
        The default constructor.

        @param name: name of the format
        @type name: L{str}
        @param width: total number of bits
        @type width: L{int}
        @param precision: significand precision in bits, including the implicit bit
        @type precision: L{int}
        @param exponent_bits: width of the biased exponent field
        @type exponent_bits: L{int}
        """
        assert width == 1 + exponent_bits + precision - 1
        self.name = name
        self.width = width
        self.precision = precision
        self.exponent_bits = exponent_bits

    @property
    def mantissa_bits(self):
        """The width of the mantissa field."""
        return self.precision - 1

    @property
    def bias(self):
        """The exponent bias."""
        return (1 << (self.exponent_bits - 1)) - 1

    @property
    def emax(self):
        """The largest unbiased exponent of a finite value."""
        return self.bias

    @property
    def emin(self):
        """The smallest unbiased exponent of a normal value."""
        return 1 - self.bias

    @property
    def exponent_mask(self):
        """The biased exponent value of Inf and NaN."""
        return (1 << self.exponent_bits) - 1

    @property
    def mantissa_mask(self):
        """Mask of the mantissa field."""
        return (1 << self.mantissa_bits) - 1

    @property
    def sign_bit(self):
        """Mask of the sign bit."""
        return 1 << (self.width - 1)

    @property
    def quiet_bit(self):
        """Mask of the quiet bit of NaNs."""
        return 1 << (self.mantissa_bits - 1)

    @property
    def default_nan(self):
        """Bits of the default (positive, payload free) quiet NaN."""
        return (self.exponent_mask << self.mantissa_bits) | self.quiet_bit

    @property
    def inf(self):
        """Bits of +Inf."""
        return self.exponent_mask << self.mantissa_bits

    @property
    def max_finite(self):
        """Bits of the largest finite value."""
        return self.inf - 1

    def __repr__(self):
        return "<Format {}>".format(self.name)


BINARY32 = Format("binary32", 32, 24, 8)
BINARY64 = Format("binary64", 64, 53, 11)

INCOMPARABLE = None


# ================ raw bit helpers ================


def float_to_bits(f):
    """
    Return the binary64 bit pattern of a python float.

    @param f: value to convert
    @type f: L{float}
    @return: the bit pattern
    @rtype: L{int}
    """
    return struct.unpack("<Q", struct.pack("<d", f))[0]


def bits_to_float(b):
    """
    Return the python float with the given binary64 bit pattern.

    @param b: bit pattern
    @type b: L{int}
    @return: the float
    @rtype: L{float}
    """
    return struct.unpack("<d", struct.pack("<Q", b & 0xFFFFFFFFFFFFFFFF))[0]


def is_nan(bits, fmt=BINARY64):
    """
    Check whether a bit pattern encodes a NaN.

    @param bits: bit pattern
    @type bits: L{int}
    @param fmt: format of the pattern
    @type fmt: L{Format}
    @return: whether the pattern is a NaN
    @rtype: L{bool}
    """
    return ((bits >> fmt.mantissa_bits) & fmt.exponent_mask) == fmt.exponent_mask and (bits & fmt.mantissa_mask) != 0


def is_inf(bits, fmt=BINARY64):
    """
    Check whether a bit pattern encodes +Inf or -Inf.

    @param bits: bit pattern
    @type bits: L{int}
    @param fmt: format of the pattern
    @type fmt: L{Format}
    @return: whether the pattern is infinite
    @rtype: L{bool}
    """
    return (bits & ~fmt.sign_bit) == fmt.inf


def is_finite(bits, fmt=BINARY64):
    """
    Check whether a bit pattern encodes a finite value (including zeros and subnormals).

    @param bits: bit pattern
    @type bits: L{int}
    @param fmt: format of the pattern
    @type fmt: L{Format}
    @return: whether the pattern is finite
    @rtype: L{bool}
    """
    return ((bits >> fmt.mantissa_bits) & fmt.exponent_mask) != fmt.exponent_mask


def quiet(bits, fmt=BINARY64):
    """
    Return the quiet version of a NaN pattern (sign and payload kept).

    @param bits: NaN bit pattern
    @type bits: L{int}
    @param fmt: format of the pattern
    @type fmt: L{Format}
    @return: the quieted pattern
    @rtype: L{int}
    """
    return bits | fmt.quiet_bit


def split(bits, fmt=BINARY64):
    """
    Split a finite pattern into an exact (sign, integer mantissa, exponent) triple.

    The value is (-1)^sign * mantissa * 2^exponent.

    @param bits: finite bit pattern
    @type bits: L{int}
    @param fmt: format of the pattern
    @type fmt: L{Format}
    @return: the triple (sign, mantissa, exponent)
    @rtype: L{tuple} of (L{int}, L{int}, L{int})
    """
    sign = bits >> (fmt.width - 1)
    field = (bits >> fmt.mantissa_bits) & fmt.exponent_mask
    mantissa = bits & fmt.mantissa_mask
    assert field != fmt.exponent_mask, "split() of a non-finite pattern"
    if field == 0:
        # zero or subnormal
        return (sign, mantissa, fmt.emin - fmt.mantissa_bits)
    return (sign, mantissa | (1 << fmt.mantissa_bits), field - fmt.bias - fmt.mantissa_bits)


def widen_bits(bits32):
    """
    Exactly widen a binary32 pattern to binary64.

    NaNs keep sign and payload (shifted into the top of the binary64 payload).

    @param bits32: binary32 bit pattern
    @type bits32: L{int}
    @return: binary64 bit pattern of the same value
    @rtype: L{int}
    """
    sign = bits32 >> 31
    if not is_finite(bits32, BINARY32):
        payload = (bits32 & BINARY32.mantissa_mask) << (BINARY64.mantissa_bits - BINARY32.mantissa_bits)
        return (sign << 63) | BINARY64.inf | payload
    sign, mantissa, exponent = split(bits32, BINARY32)
    if mantissa == 0:
        return sign << 63
    # every binary32 value is a normal binary64 value
    shift = BINARY64.precision - mantissa.bit_length()
    mantissa <<= shift
    exponent -= shift
    field = exponent + BINARY64.bias + BINARY64.mantissa_bits
    return (sign << 63) | (field << 52) | (mantissa & BINARY64.mantissa_mask)


def ordered_key(bits, fmt=BINARY64):
    """
    Map a non-NaN pattern to an integer such that the order of the integers
    is the numeric order, with -0 directly below +0.

    @param bits: non-NaN bit pattern
    @type bits: L{int}
    @param fmt: format of the pattern
    @type fmt: L{Format}
    @return: the key
    @rtype: L{int}
    """
    if bits & fmt.sign_bit:
        return -(bits & ~fmt.sign_bit) - 1
    return bits


def ulp_distance(a, b, fmt=BINARY64):
    """
    Return the number of representable values strictly between a and b,
    plus one if a and b differ.

    Signed zeros are distinct and thus have distance 1.

    @param a: first bit pattern
    @type a: L{int}
    @param b: second bit pattern
    @type b: L{int}
    @param fmt: format of both patterns
    @type fmt: L{Format}
    @return: the distance or L{INCOMPARABLE} if a NaN is involved
    @rtype: L{int} or L{None}
    """
    if is_nan(a, fmt) or is_nan(b, fmt):
        return INCOMPARABLE
    return abs(ordered_key(a, fmt) - ordered_key(b, fmt))


# ================ value types ================


class _BinaryValue(object):
    """
    Base class of the bit pattern value types.

    @cvar fmt: format of the value
    @type fmt: L{Format}
    @ivar bits: the bit pattern
    @type bits: L{int}
    """
    __slots__ = ("bits", )
    fmt = None

    def __init__(self, bits):
        """
        The default constructor.

        @param bits: the bit pattern
        @type bits: L{int}
        """
        assert isinstance(bits, int) and 0 <= bits < (1 << self.fmt.width), "bits out of range: {!r}".format(bits)
        self.bits = bits

    def __eq__(self, other):
        return type(self) is type(other) and self.bits == other.bits

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((self.fmt.width, self.bits))

    def __repr__(self):
        return "{}({})".format(type(self).__name__, self.hex())

    @property
    def sign(self):
        """The sign bit."""
        return self.bits >> (self.fmt.width - 1)

    def is_nan(self):
        """Whether this is a NaN."""
        return is_nan(self.bits, self.fmt)

    def is_inf(self):
        """Whether this is +Inf or -Inf."""
        return is_inf(self.bits, self.fmt)

    def is_finite(self):
        """Whether this is finite."""
        return is_finite(self.bits, self.fmt)

    def hex(self):
        """
        Return a C99 hex-float literal of the value.

        @return: the literal (or "nan"/"inf" variants)
        @rtype: L{str}
        """
        return self.to_float().hex()

    def to_float(self):
        """
        Return the value as a python float (exact for both formats).

        @return: the value
        @rtype: L{float}
        """
        raise NotImplementedError()


class Binary64(_BinaryValue):
    """
    An IEEE-754 binary64 value, identified by its bit pattern.
    """
    __slots__ = ()
    fmt = BINARY64

    @classmethod
    def from_float(cls, f):
        """
        Create a value from a python float.

        @param f: value
        @type f: L{float}
        @return: the value
        @rtype: L{Binary64}
        """
        return cls(float_to_bits(float(f)))

    def to_float(self):
        return bits_to_float(self.bits)


class Binary32(_BinaryValue):
    """
    An IEEE-754 binary32 value, identified by its bit pattern.
    """
    __slots__ = ()
    fmt = BINARY32

    @classmethod
    def from_float(cls, f):
        """
        Create a value from a python float that is exactly representable in binary32.

        @param f: value
        @type f: L{float}
        @return: the value
        @rtype: L{Binary32}
        @raises ValueError: if f is not representable
        """
        bits = struct.unpack("<I", struct.pack("<f", f))[0]
        result = cls(bits)
        if not (result.is_nan() and f != f) and result.to_float() != f:
            raise ValueError("{!r} is not representable in binary32".format(f))
        return result

    def widen(self):
        """
        Return the exactly widened binary64 value.

        @return: the widened value
        @rtype: L{Binary64}
        """
        return Binary64(widen_bits(self.bits))

    def to_float(self):
        return bits_to_float(widen_bits(self.bits))


def decompose(x):
    """
    Decompose a binary64 value into its fields.

    @param x: value to decompose
    @type x: L{Binary64}
    @return: the triple (sign, biased_exponent, mantissa_field)
    @rtype: L{tuple} of (L{int}, L{int}, L{int})
    """
    fmt = x.fmt
    return (
        x.bits >> (fmt.width - 1),
        (x.bits >> fmt.mantissa_bits) & fmt.exponent_mask,
        x.bits & fmt.mantissa_mask,
    )


def compose(sign, biased_exponent, mantissa_field, cls=Binary64):
    """
    Compose a value from its fields. Inverse of L{decompose}.

    @param sign: sign bit
    @type sign: L{int}
    @param biased_exponent: biased exponent field
    @type biased_exponent: L{int}
    @param mantissa_field: mantissa field
    @type mantissa_field: L{int}
    @param cls: value class to create
    @type cls: L{type}
    @return: the composed value
    @rtype: L{Binary64} or L{Binary32}
    """
    fmt = cls.fmt
    assert sign in (0, 1)
    assert 0 <= biased_exponent <= fmt.exponent_mask
    assert 0 <= mantissa_field <= fmt.mantissa_mask
    return cls((sign << (fmt.width - 1)) | (biased_exponent << fmt.mantissa_bits) | mantissa_field)


def ulp32_distance(a, b):
    """
    Return the ulp distance of two binary32 values (see L{ulp_distance}).

    @param a: first value
    @type a: L{Binary32}
    @param b: second value
    @type b: L{Binary32}
    @return: the distance or L{INCOMPARABLE}
    @rtype: L{int} or L{None}
    """
    return ulp_distance(a.bits, b.bits, BINARY32)
