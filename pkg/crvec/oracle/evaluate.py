"""
High-precision evaluation of exp2, log and log2.

Everything is computed on python integers in fixed point; every result
carries a rigorous error bound (see L{crvec.oracle.bigfixed.BigFixed}).

@var FUNCTIONS: the supported function ids
@type FUNCTIONS: L{tuple} of L{str}
@var MIN_PRECISION: smallest accepted working precision
@type MIN_PRECISION: L{int}
@var MAX_PRECISION: largest accepted working precision
@type MAX_PRECISION: L{int}
"""
import math
from functools import lru_cache

from ..exceptions import DomainError
from ..fp.bits import Binary32, Binary64, is_finite, split
from .bigfixed import BigFixed


FUNCTIONS = ("exp2", "log", "log2")
MIN_PRECISION = 64
MAX_PRECISION = 4096


@lru_cache(maxsize=64)
def ln2_fixed(bits):
    """
    Return ln(2) * 2^bits, truncated, with an error below one unit.

    Uses ln(2) = 2 atanh(1/3) = sum 2 / ((2j+1) 3^(2j+1)).

    @param bits: number of fraction bits
    @type bits: L{int}
    @return: the scaled constant
    @rtype: L{int}
    """
    guard = 16
    power = (2 << (bits + guard)) // 3
    total = 0
    j = 0
    while power:
        total += power // (2 * j + 1)
        power //= 9
        j += 1
    return total >> guard


def ln2(prec):
    """
    Return ln(2) to the given number of fraction bits.

    @param prec: number of fraction bits
    @type prec: L{int}
    @return: the constant with an error bound of one unit
    @rtype: L{BigFixed}
    """
    return BigFixed(0, ln2_fixed(prec), -prec, 1, exact=False)


def _as_bits(x):
    """
    Return the binary64 pattern of an input value.
    """
    if isinstance(x, Binary32):
        return x.widen().bits
    elif isinstance(x, Binary64):
        return x.bits
    assert isinstance(x, int)
    return x


def _exp2(bits, prec):
    sign, m, e = split(bits)
    num = (-m if sign else m)
    if e >= 0:
        return BigFixed(0, 1, num << e)
    shift = -e
    # x = n + f with n = floor(x), f = fnum / 2^shift in [0, 1)
    n = num >> shift
    fnum = num - (n << shift)
    if fnum == 0:
        return BigFixed(0, 1, n)
    halvings = max(4, math.isqrt(prec))
    w = prec + halvings + 24
    t = (fnum * ln2_fixed(w + 8)) >> (shift + 8)
    t >>= halvings
    one = 1 << w
    s = one
    term = one
    k = 1
    while term:
        term = ((term * t) >> w) // k
        s += term
        k += 1
    for _ in range(halvings):
        s = (s * s) >> w
    return BigFixed.from_relative(0, s, n - w, w - halvings - 12)


def _log(bits, prec):
    _, m, e = split(bits)
    length = m.bit_length()
    k = e + length - 1
    # x = y * 2^k with y = m / 2^s in [sqrt(1/2), sqrt(2))
    s = length - 1
    if m * m >= (1 << (2 * length - 1)):
        k += 1
        s = length
    zn = m - (1 << s)
    zd = m + (1 << s)
    w = prec + 24
    total = None
    if zn != 0:
        # log(y) = 2 z sum z^2j / (2j+1), z = (y-1)/(y+1)
        zs = w + zd.bit_length() - abs(zn).bit_length() + 1
        z = (abs(zn) << zs) // zd
        u = (z * z) >> (2 * zs - w)
        power = 1 << w
        series = 0
        j = 0
        while power:
            series += power // (2 * j + 1)
            power = (power * u) >> w
            j += 1
        total = BigFixed.from_relative((1 if zn < 0 else 0), z * series, 1 - zs - w, w - 13)
    if k != 0:
        scale = w + 12
        kln2 = BigFixed((1 if k < 0 else 0), abs(k) * ln2_fixed(scale), -scale, abs(k), exact=False)
        total = (kln2 if total is None else kln2 + total)
    if total is None:
        return BigFixed(0, 0, 0)
    return total.truncate(prec + 16)


def _log2(bits, prec):
    _, m, e = split(bits)
    if m & (m - 1) == 0:
        return BigFixed.from_int(e + m.bit_length() - 1)
    lg = _log(bits, prec + 8)
    v = prec + 40
    d = (lg.mantissa << v) // ln2_fixed(v)
    accuracy = min(lg.relative_accuracy() - 2, v - 4)
    return BigFixed.from_relative(lg.sign, d, lg.exponent, accuracy)


_EVALUATORS = {
    "exp2": _exp2,
    "log": _log,
    "log2": _log2,
}


def eval_hp(f_id, x, prec):
    """
    Evaluate a function at high precision.

    The relative error of the result is below 2^-(prec-2). Exact results
    (exp2 of integers, log2 of powers of two, log of 1) have error 0.

    @param f_id: "exp2", "log" or "log2"
    @type f_id: L{str}
    @param x: the finite argument (binary32 arguments are widened exactly)
    @type x: L{crvec.fp.bits.Binary64} or L{crvec.fp.bits.Binary32} or L{int}
    @param prec: working precision in bits
    @type prec: L{int}
    @return: the enclosing approximation
    @rtype: L{BigFixed}
    @raises DomainError: if x is outside the domain of the function
    @raises KeyError: if the function is unknown
    """
    if f_id not in _EVALUATORS:
        raise KeyError("Unknown function '{}'!".format(f_id))
    if not MIN_PRECISION <= prec <= MAX_PRECISION:
        raise ValueError("Precision {} outside [{}, {}]".format(prec, MIN_PRECISION, MAX_PRECISION))
    bits = _as_bits(x)
    if not is_finite(bits):
        raise DomainError("{}() evaluated at non-finite argument 0x{:016x}".format(f_id, bits))
    if f_id != "exp2" and ((bits >> 63) or (bits << 1) == 0):
        raise DomainError("{}() evaluated at non-positive argument 0x{:016x}".format(f_id, bits))
    return _EVALUATORS[f_id](bits, prec)
