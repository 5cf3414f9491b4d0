"""
The reference backend: every floating-point operation is a loop over the
lanes calling the soft-float arithmetic in L{crvec.fp.softfloat}.

This backend defines the results every other backend has to reproduce.
"""
import numpy as np

from ..fp.bits import (
    BINARY64, split, is_nan, is_inf, quiet, widen_bits, float_to_bits,
)
from ..fp.rounding import RoundingMode, round_scaled, convert_bits_f64_to_f32
from ..fp import softfloat
from .backend import Backend, register_backend, f64_bits
from .batch import KIND_F32, KIND_F64


_RN = RoundingMode.NEAREST_EVEN
_RZ = RoundingMode.TOWARD_ZERO
_ONE = float_to_bits(1.0)
_NEG_INF = BINARY64.sign_bit | BINARY64.inf

# exponents beyond this overflow or underflow every finite binary64
SCALEF_LIMIT = 2200


# ================ scalar lane operations ================


def reduce_frac_bits(x, k):
    """
    Scalar version of L{Backend.reduce_frac} on bit patterns.

    @param x: the argument
    @type x: L{int}
    @param k: number of fraction bits kept in the rounded part
    @type k: L{int}
    @return: the reduced argument
    @rtype: L{int}
    """
    if is_nan(x):
        return quiet(x)
    if is_inf(x):
        return 0
    sign, m, e = split(x)
    shift = -(e + k)
    if m == 0 or shift <= 0:
        # x*2^k is an integer
        return 0
    n = m >> shift
    rem = m & ((1 << shift) - 1)
    half = 1 << (shift - 1)
    if rem > half or (rem == half and (n & 1)):
        n += 1
    diff = m - (n << shift)
    if diff == 0:
        return 0
    return round_scaled(sign ^ (1 if diff < 0 else 0), abs(diff), e, BINARY64, _RN)


def getmant_bits(x):
    """
    Scalar version of L{Backend.getmant_075_15} on bit patterns.

    @param x: the argument
    @type x: L{int}
    @return: the normalized mantissa
    @rtype: L{int}
    """
    if is_nan(x):
        return quiet(x)
    if (x & ~BINARY64.sign_bit) == 0 or x == BINARY64.inf:
        return _ONE
    if x >> 63:
        return BINARY64.default_nan
    _, m, _ = split(x)
    length = m.bit_length()
    # mantissa in [1, 2), halved when >= 1.5
    if length >= 2 and (m >> (length - 2)) & 1:
        return round_scaled(0, m, -length, BINARY64, _RN)
    return round_scaled(0, m, -(length - 1), BINARY64, _RN)


def getexp_bits(x):
    """
    Scalar version of L{Backend.getexp} on bit patterns.

    @param x: the argument
    @type x: L{int}
    @return: the exponent as binary64
    @rtype: L{int}
    """
    if is_nan(x):
        return quiet(x)
    if is_inf(x):
        return BINARY64.inf
    if (x & ~BINARY64.sign_bit) == 0:
        return _NEG_INF
    _, m, e = split(x)
    return float_to_bits(float(e + m.bit_length() - 1))


def scalef_bits(x, y):
    """
    Scalar version of L{Backend.scalef} on bit patterns.

    @param x: the value to scale
    @type x: L{int}
    @param y: the exponent
    @type y: L{int}
    @return: the scaled value
    @rtype: L{int}
    """
    if is_nan(x):
        return quiet(x)
    if is_nan(y):
        return quiet(y)
    x_zero = (x & ~BINARY64.sign_bit) == 0
    sign = x >> 63
    if is_inf(y):
        if y >> 63:
            if is_inf(x):
                return BINARY64.default_nan
            return sign << 63
        if x_zero:
            return BINARY64.default_nan
        return (sign << 63) | BINARY64.inf
    if is_inf(x) or x_zero:
        return x
    ys, ym, ye = split(y)
    # floor of y as integer
    if ye >= 0:
        n = ym << ye
    else:
        n = ym >> -ye
        if ys and (ym & ((1 << -ye) - 1)):
            n += 1
    n = -n if ys else n
    n = max(-SCALEF_LIMIT, min(SCALEF_LIMIT, n))
    _, m, e = split(x)
    return round_scaled(sign, m, e + n, BINARY64, _RN)


@register_backend
class ReferenceBackend(Backend):
    """
    The normative lane-by-lane backend.
    """
    name = "reference"

    def _map(self, fn, *operands):
        """
        Apply a scalar function on bit patterns to every lane.

        @param fn: the function, taking and returning bit patterns
        @type fn: callable
        @param operands: L{LaneBatch} or float operands
        @type operands: L{tuple}
        @return: the result lanes
        @rtype: L{crvec.vlanes.batch.LaneBatch}
        """
        like = next(op for op in operands if not isinstance(op, (int, float)))
        columns = [f64_bits(op, like).tolist() for op in operands]
        out = [fn(*lane) for lane in zip(*columns)]
        return like.like(np.array(out, dtype=np.uint64), KIND_F64)

    def fma_rn(self, a, b, c):
        return self._map(lambda x, y, z: softfloat.fma_bits(x, y, z, _RN), a, b, c)

    def fma_rz(self, a, b, c):
        return self._map(lambda x, y, z: softfloat.fma_bits(x, y, z, _RZ), a, b, c)

    def add_rn(self, a, b):
        return self._map(lambda x, y: softfloat.add_bits(x, y, _RN), a, b)

    def sub_rn(self, a, b):
        return self._map(lambda x, y: softfloat.sub_bits(x, y, _RN), a, b)

    def mul_rn(self, a, b):
        return self._map(lambda x, y: softfloat.mul_bits(x, y, _RN), a, b)

    def add_rz(self, a, b):
        return self._map(lambda x, y: softfloat.add_bits(x, y, _RZ), a, b)

    def mul_rz(self, a, b):
        return self._map(lambda x, y: softfloat.mul_bits(x, y, _RZ), a, b)

    def reduce_frac(self, x, k):
        return self._map(lambda v: reduce_frac_bits(v, k), x)

    def getmant_075_15(self, x):
        return self._map(getmant_bits, x)

    def getexp(self, x):
        return self._map(getexp_bits, x)

    def scalef(self, x, y):
        return self._map(scalef_bits, x, y)

    def widen(self, x):
        assert x.kind == KIND_F32
        return x.like(np.array([widen_bits(b) for b in x.to_bits()], dtype=np.uint64), KIND_F64)

    def narrow(self, x, mode):
        assert x.kind == KIND_F64
        out = [convert_bits_f64_to_f32(b, mode) for b in x.to_bits()]
        return x.like(np.array(out, dtype=np.uint32), KIND_F32)

