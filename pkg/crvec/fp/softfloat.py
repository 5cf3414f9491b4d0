"""
Software binary64 arithmetic on bit patterns, with a single exact rounding
per operation under any rounding mode.

This is the arithmetic of the reference lane backend. NaN rules: the first
NaN operand (in argument order) is returned quieted; invalid operations
return the default quiet NaN.
"""
from .bits import BINARY64, split, is_nan, is_inf, quiet
from .rounding import RoundingMode, round_scaled


_SIGN = BINARY64.sign_bit
_ONE = 0x3FF0000000000000


def _is_zero(bits):
    return (bits & ~_SIGN) == 0


def _first_nan(*operands):
    """
    Return the quieted first NaN operand or None.
    """
    for op in operands:
        if is_nan(op):
            return quiet(op)
    return None


def _exact_sum(sp, mp, ep, sc, mc, ec, mode):
    """
    Round the exact sum of two scaled integers.

    @return: the rounded binary64 pattern
    @rtype: L{int}
    """
    if mp == 0 and mc == 0:
        if mode == RoundingMode.TOWARD_NEGATIVE:
            sign = sp | sc
        else:
            sign = sp & sc
        return sign << 63
    low = min(ep if mp else ec, ec if mc else ep)
    vp = (mp << (ep - low)) if mp else 0
    vc = (mc << (ec - low)) if mc else 0
    total = (-vp if sp else vp) + (-vc if sc else vc)
    if total == 0:
        # exact cancellation of nonzero terms
        return (1 << 63) if mode == RoundingMode.TOWARD_NEGATIVE else 0
    return round_scaled(1 if total < 0 else 0, abs(total), low, BINARY64, mode)


def fma_bits(a, b, c, mode=RoundingMode.NEAREST_EVEN):
    """
    Fused multiply-add a*b+c with a single rounding.

    @param a: first factor
    @type a: L{int}
    @param b: second factor
    @type b: L{int}
    @param c: addend
    @type c: L{int}
    @param mode: rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @return: the rounded result
    @rtype: L{int}
    """
    nan = _first_nan(a, b, c)
    if nan is not None:
        return nan
    sp = (a ^ b) >> 63
    a_inf, b_inf, c_inf = is_inf(a), is_inf(b), is_inf(c)
    if (a_inf and _is_zero(b)) or (b_inf and _is_zero(a)):
        return BINARY64.default_nan
    if a_inf or b_inf:
        if c_inf and (c >> 63) != sp:
            return BINARY64.default_nan
        return (sp << 63) | BINARY64.inf
    if c_inf:
        return c
    _, ma, ea = split(a)
    _, mb, eb = split(b)
    sc, mc, ec = split(c)
    return _exact_sum(sp, ma * mb, ea + eb, sc, mc, ec, mode)


def add_bits(a, b, mode=RoundingMode.NEAREST_EVEN):
    """
    Addition a+b with a single rounding.

    @param a: first operand
    @type a: L{int}
    @param b: second operand
    @type b: L{int}
    @param mode: rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @return: the rounded result
    @rtype: L{int}
    """
    # a*1 is exact, including the sign of zero and Inf
    return fma_bits(a, _ONE, b, mode)


def sub_bits(a, b, mode=RoundingMode.NEAREST_EVEN):
    """
    Subtraction a-b with a single rounding.

    @param a: first operand
    @type a: L{int}
    @param b: second operand
    @type b: L{int}
    @param mode: rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @return: the rounded result
    @rtype: L{int}
    """
    nan = _first_nan(a, b)
    if nan is not None:
        return nan
    return add_bits(a, b ^ _SIGN, mode)


def mul_bits(a, b, mode=RoundingMode.NEAREST_EVEN):
    """
    Multiplication a*b with a single rounding.

    @param a: first factor
    @type a: L{int}
    @param b: second factor
    @type b: L{int}
    @param mode: rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @return: the rounded result
    @rtype: L{int}
    """
    nan = _first_nan(a, b)
    if nan is not None:
        return nan
    sign = (a ^ b) >> 63
    if is_inf(a) or is_inf(b):
        if _is_zero(a) or _is_zero(b):
            return BINARY64.default_nan
        return (sign << 63) | BINARY64.inf
    _, ma, ea = split(a)
    _, mb, eb = split(b)
    return round_scaled(sign, ma * mb, ea + eb, BINARY64, mode)
