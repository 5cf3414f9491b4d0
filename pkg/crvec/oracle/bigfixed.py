"""
Arbitrary-precision numbers with an explicit error bound.

A L{BigFixed} is an integer mantissa scaled by a power of two together with
a bound on its distance to the true value it approximates, both in units
of the scale. All arithmetic is done on python integers.
"""
from ..fp.bits import BINARY64, split, bits_to_float
from ..fp.rounding import RoundingMode, round_scaled


class BigFixed(object):
    """
    An approximation (-1)^sign * mantissa * 2^exponent of a real number,
    whose true value lies within error * 2^exponent of it.

    @ivar sign: the sign bit
    @type sign: L{int}
    @ivar mantissa: non-negative integer mantissa
    @type mantissa: L{int}
    @ivar exponent: the scale
    @type exponent: L{int}
    @ivar error: bound of the absolute error, in units of 2^exponent
    @type error: L{int}
    @ivar exact: whether the value is known to be exact
    @type exact: L{bool}
    """
    __slots__ = ("sign", "mantissa", "exponent", "error", "exact")

    def __init__(self, sign, mantissa, exponent, error=0, exact=None):
        """
        The default constructor.

        @param sign: the sign bit
        @type sign: L{int}
        @param mantissa: non-negative integer mantissa
        @type mantissa: L{int}
        @param exponent: the scale
        @type exponent: L{int}
        @param error: bound of the absolute error, in units of 2^exponent
        @type error: L{int}
        @param exact: whether the value is exact, defaults to error == 0
        @type exact: L{bool} or L{None}
        """
        assert mantissa >= 0 and error >= 0
        self.sign = sign
        self.mantissa = mantissa
        self.exponent = exponent
        self.error = error
        self.exact = ((error == 0) if exact is None else exact)

    def __repr__(self):
        return "BigFixed({}{} * 2^{} +- {})".format(
            ("-" if self.sign else ""),
            hex(self.mantissa),
            self.exponent,
            self.error,
        )

    @classmethod
    def from_int(cls, n, exponent=0):
        """
        Return the exact value n * 2^exponent.

        @param n: the integer
        @type n: L{int}
        @param exponent: the scale
        @type exponent: L{int}
        @return: the exact number
        @rtype: L{BigFixed}
        """
        return cls((1 if n < 0 else 0), abs(n), exponent, 0)

    @classmethod
    def from_bits(cls, bits):
        """
        Return the exact value of a finite binary64 pattern.

        @param bits: the finite binary64 pattern
        @type bits: L{int}
        @return: the exact number
        @rtype: L{BigFixed}
        """
        sign, mantissa, exponent = split(bits)
        return cls(sign, mantissa, exponent, 0)

    @classmethod
    def from_relative(cls, sign, mantissa, exponent, accuracy_bits):
        """
        Return a number whose relative error is at most 2^-accuracy_bits.

        @param sign: the sign bit
        @type sign: L{int}
        @param mantissa: the mantissa
        @type mantissa: L{int}
        @param exponent: the scale
        @type exponent: L{int}
        @param accuracy_bits: the relative accuracy of the mantissa
        @type accuracy_bits: L{int}
        @return: the number
        @rtype: L{BigFixed}
        """
        return cls(sign, mantissa, exponent, (mantissa >> accuracy_bits) + 1, exact=False)

    @property
    def precision(self):
        """The number of mantissa bits."""
        return self.mantissa.bit_length()

    @property
    def top_exponent(self):
        """The exponent of the leading mantissa bit."""
        return self.exponent + self.mantissa.bit_length() - 1

    def relative_accuracy(self):
        """
        Return the number of correct leading bits guaranteed by the error bound.

        @return: floor(log2(mantissa / error)), or None for exact values
        @rtype: L{int} or L{None}
        """
        if self.error == 0:
            return None
        return self.mantissa.bit_length() - self.error.bit_length()

    def bounds(self):
        """
        Return the signed mantissa bounds of the enclosing interval.

        @return: the tuple (low, high) in units of 2^exponent
        @rtype: L{tuple} of L{int}
        """
        m = (-self.mantissa if self.sign else self.mantissa)
        return (m - self.error, m + self.error)

    def truncate(self, bits):
        """
        Return this number with the mantissa cut to at most the given width.

        @param bits: the maximum mantissa width
        @type bits: L{int}
        @return: the truncated number
        @rtype: L{BigFixed}
        """
        excess = self.mantissa.bit_length() - bits
        if excess <= 0:
            return self
        rem = self.mantissa & ((1 << excess) - 1)
        error = (self.error >> excess) + 1 + (1 if rem else 0)
        return BigFixed(self.sign, self.mantissa >> excess, self.exponent + excess, error, exact=False)

    def __neg__(self):
        return BigFixed(self.sign ^ 1, self.mantissa, self.exponent, self.error, self.exact)

    def __add__(self, other):
        low = min(self.exponent, other.exponent)
        a_lo, _ = self._aligned(low)
        b_lo, _ = other._aligned(low)
        total = a_lo + b_lo
        error = (self.error << (self.exponent - low)) + (other.error << (other.exponent - low))
        return BigFixed(
            (1 if total < 0 else 0), abs(total), low, error, exact=(self.exact and other.exact),
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        # |ab - a'b'| <= |a|eb + |b|ea + ea*eb
        error = self.mantissa * other.error + other.mantissa * self.error + self.error * other.error
        return BigFixed(
            self.sign ^ other.sign,
            self.mantissa * other.mantissa,
            self.exponent + other.exponent,
            error,
            exact=(self.exact and other.exact),
        )

    def _aligned(self, exponent):
        """
        Return the signed mantissa scaled to a lower exponent.
        """
        shift = self.exponent - exponent
        assert shift >= 0
        m = self.mantissa << shift
        return ((-m if self.sign else m), shift)

    def to_float(self):
        """
        Return the nearest binary64 value of the approximation (for diagnostics).

        @return: the value
        @rtype: L{float}
        """
        return bits_to_float(round_scaled(self.sign, self.mantissa, self.exponent, BINARY64, RoundingMode.NEAREST_EVEN))

    def round(self, fmt, mode):
        """
        Round both ends of the enclosing interval into a format.

        @param fmt: the destination format
        @type fmt: L{crvec.fp.bits.Format}
        @param mode: the rounding mode
        @type mode: L{crvec.fp.rounding.RoundingMode}
        @return: the rounded bit pattern if both ends agree, else None
        @rtype: L{int} or L{None}
        """
        low, high = self.bounds()
        if self.error == 0:
            return round_scaled(self.sign, self.mantissa, self.exponent, fmt, mode)
        if low <= 0 <= high:
            # the interval contains zero, the sign is unknown
            return None
        sign = (1 if high < 0 else 0)
        a = round_scaled(sign, abs(low), self.exponent, fmt, mode)
        b = round_scaled(sign, abs(high), self.exponent, fmt, mode)
        return (a if a == b else None)
