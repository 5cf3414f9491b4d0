"""
Correct rounding by Ziv iteration.

The function is evaluated with increasing precision until both ends of
the enclosing interval round to the same value.

@var LADDER: the escalation ladder of working precisions
@type LADDER: L{tuple} of L{int}
"""
from ..exceptions import UndecidableError
from ..fp.bits import BINARY32, BINARY64, Binary32, Binary64, is_nan, is_finite, quiet, split, widen_bits
from ..fp.rounding import RoundingMode, round_scaled, overflow_bits, convert_bits_f64_to_f32
from .evaluate import eval_hp, FUNCTIONS


LADDER = (96, 160, 256, 512, 1024, 2048, 4096)

# exp2 saturates beyond these arguments in every supported format
_EXP2_OVERFLOW = 1100
_EXP2_UNDERFLOW = -1200


class ZivResult(object):
    """
    The outcome of L{ziv_correctly_round}.

    @ivar rounded: the correctly rounded result
    @type rounded: L{crvec.fp.bits.Binary32} or L{crvec.fp.bits.Binary64}
    @ivar decided_at_precision: the precision that decided the rounding, or 0 for special and exact cases
    @type decided_at_precision: L{int}
    @ivar exact: whether the result is the exact function value
    @type exact: L{bool}
    """
    __slots__ = ("rounded", "decided_at_precision", "exact")

    def __init__(self, rounded, decided_at_precision, exact=False):
        self.rounded = rounded
        self.decided_at_precision = decided_at_precision
        self.exact = exact

    def __repr__(self):
        return "ZivResult({!r}, decided_at={}, exact={})".format(self.rounded, self.decided_at_precision, self.exact)

    @property
    def bits(self):
        """The bit pattern of the result."""
        return self.rounded.bits


def _value_type(fmt):
    return (Binary32 if fmt is BINARY32 else Binary64)


def is_representable(mantissa, exponent, fmt):
    """
    Check whether mantissa * 2^exponent is exactly representable in a format.

    @param mantissa: non-negative integer mantissa
    @type mantissa: L{int}
    @param exponent: the scale
    @type exponent: L{int}
    @param fmt: the format
    @type fmt: L{crvec.fp.bits.Format}
    @return: whether rounding is exact
    @rtype: L{bool}
    """
    if mantissa == 0:
        return True
    r = round_scaled(0, mantissa, exponent, fmt, RoundingMode.TOWARD_ZERO)
    if not is_finite(r, fmt):
        return False
    _, m2, e2 = split(r, fmt)
    low = min(exponent, e2)
    return (mantissa << (exponent - low)) == (m2 << (e2 - low))


def _special(f_id, bits, fmt, mode):
    """
    Return the result for special arguments, or None for ordinary ones.

    @return: the tuple (result bits, exact) or None
    @rtype: L{tuple} or L{None}
    """
    sign = bits >> 63
    magnitude = bits & ~BINARY64.sign_bit
    if is_nan(bits):
        if fmt is BINARY32:
            return (convert_bits_f64_to_f32(bits, mode), True)
        return (quiet(bits), True)
    if f_id == "exp2":
        if magnitude == BINARY64.inf:
            return ((0 if sign else fmt.inf), True)
        if magnitude == 0:
            return (round_scaled(0, 1, 0, fmt, mode), True)
        return None
    if magnitude == 0:
        return ((1 << (fmt.width - 1)) | fmt.inf, True)
    if sign:
        return (fmt.default_nan, True)
    if magnitude == BINARY64.inf:
        return (fmt.inf, True)
    return None


def ziv_correctly_round(f_id, x, target=None, mode=RoundingMode.NEAREST_EVEN, start_precision=LADDER[0]):
    """
    Return f(x) correctly rounded into the target format.

    @param f_id: "exp2", "log" or "log2"
    @type f_id: L{str}
    @param x: the argument
    @type x: L{crvec.fp.bits.Binary32} or L{crvec.fp.bits.Binary64}
    @param target: the destination format, defaults to the format of x
    @type target: L{crvec.fp.bits.Format} or L{None}
    @param mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @param start_precision: the first rung of the ladder to use
    @type start_precision: L{int}
    @return: the result
    @rtype: L{ZivResult}
    @raises UndecidableError: if the highest precision does not decide the rounding
    """
    assert f_id in FUNCTIONS, "Unknown function '{}'".format(f_id)
    input_fmt = (BINARY32 if isinstance(x, Binary32) else BINARY64)
    fmt = (input_fmt if target is None else target)
    cls = _value_type(fmt)
    bits = (widen_bits(x.bits) if input_fmt is BINARY32 else x.bits)

    special = _special(f_id, bits, fmt, mode)
    if special is not None:
        return ZivResult(cls(special[0]), 0, exact=special[1])

    if f_id == "exp2":
        xv = Binary64(bits).to_float()
        if xv >= _EXP2_OVERFLOW:
            return ZivResult(cls(overflow_bits(0, fmt, mode)), 0)
        if xv <= _EXP2_UNDERFLOW:
            # a positive value far below the smallest subnormal
            return ZivResult(cls(round_scaled(0, 1, 2 * _EXP2_UNDERFLOW, fmt, mode)), 0)

    ladder = [p for p in LADDER if p >= start_precision]
    last = None
    for prec in ladder:
        approx = eval_hp(f_id, Binary64(bits), prec)
        if approx.exact:
            rounded = round_scaled(approx.sign, approx.mantissa, approx.exponent, fmt, mode)
            return ZivResult(cls(rounded), 0, exact=is_representable(approx.mantissa, approx.exponent, fmt))
        rounded = approx.round(fmt, mode)
        if rounded is not None:
            return ZivResult(cls(rounded), prec)
        last = prec
    raise UndecidableError(f_id, x, last)


def correctly_rounded_bits(f_id, x, mode=RoundingMode.NEAREST_EVEN, target=None):
    """
    Shortcut returning only the bit pattern of L{ziv_correctly_round}.

    @param f_id: "exp2", "log" or "log2"
    @type f_id: L{str}
    @param x: the argument
    @type x: L{crvec.fp.bits.Binary32} or L{crvec.fp.bits.Binary64}
    @param mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @param target: the destination format, defaults to the format of x
    @type target: L{crvec.fp.bits.Format} or L{None}
    @return: the bit pattern of the correctly rounded result
    @rtype: L{int}
    """
    return ziv_correctly_round(f_id, x, target=target, mode=mode).bits
