"""
The vectorized backend, evaluating lanes with numpy.

The host only provides binary64 arithmetic rounded to nearest-even, so
fused and round-toward-zero operations are built from error-free
transformations: Dekker's product, Knuth's TwoSum, a round-to-odd sum for
the fused multiply-add and the sign of an exact expansion for the
round-toward-zero correction. These are exact only while no intermediate
overflows or underflows; lanes outside that safe range are handed to the
reference backend, so results stay bit-identical.
"""
import numpy as np

from ..fp.rounding import RoundingMode
from .backend import Backend, register_backend, f64_bits
from .batch import LaneBatch, KIND_F32, KIND_F64
from .reference import ReferenceBackend, SCALEF_LIMIT


_QUIET64 = np.uint64(1 << 51)
_DEFAULT_NAN64 = np.uint64(0x7FF8000000000000)
_MANTISSA64 = (1 << 52) - 1
_SPLITTER = 134217729.0  # 2^27 + 1
_MIN_NORMAL = 2.0 ** -1022

# safe exponent ranges of the error-free transformations
_FACTOR_LO, _FACTOR_HI = 2.0 ** -400, 2.0 ** 400
_PRODUCT_LO = 2.0 ** -800
_ADDEND_LO, _ADDEND_HI = 2.0 ** -900, 2.0 ** 900
_RESULT_LO = 2.0 ** -900


def _values(bits):
    return bits.view(np.float64)


def _bits(values):
    return np.ascontiguousarray(values, dtype=np.float64).view(np.uint64)


def two_sum(a, b):
    """
    Knuth's TwoSum: s = RN(a+b) and the exact error a+b-s.

    @param a: first summand
    @type a: L{numpy.ndarray}
    @param b: second summand
    @type b: L{numpy.ndarray}
    @return: the tuple (s, err)
    @rtype: L{tuple} of L{numpy.ndarray}
    """
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _veltkamp(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    """
    Dekker's product: p = RN(a*b) and the exact error a*b-p.

    @param a: first factor
    @type a: L{numpy.ndarray}
    @param b: second factor
    @type b: L{numpy.ndarray}
    @return: the tuple (p, err)
    @rtype: L{tuple} of L{numpy.ndarray}
    """
    p = a * b
    ah, al = _veltkamp(a)
    bh, bl = _veltkamp(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def add_round_to_odd(a, b):
    """
    Return a+b rounded to odd.

    @param a: first summand
    @type a: L{numpy.ndarray}
    @param b: second summand
    @type b: L{numpy.ndarray}
    @return: the sum rounded to odd
    @rtype: L{numpy.ndarray}
    """
    s, err = two_sum(a, b)
    even = (_bits(s) & np.uint64(1)) == 0
    bump = (err != 0) & even
    return np.where(bump, np.nextafter(s, np.copysign(np.inf, err)), s)


def expansion_sign(terms):
    """
    Return the sign of the exact sum of the given terms.

    The terms are accumulated into a nonoverlapping expansion whose most
    significant nonzero component carries the sign.

    @param terms: the summands
    @type terms: L{list} of L{numpy.ndarray}
    @return: -1.0, 0.0 or 1.0 per lane
    @rtype: L{numpy.ndarray}
    """
    expansion = [terms[0]]
    for t in terms[1:]:
        q = t
        grown = []
        for h in expansion:
            q, err = two_sum(q, h)
            grown.append(err)
        grown.append(q)
        expansion = grown
    sign = np.zeros_like(terms[0])
    for component in reversed(expansion):
        sign = np.where(sign != 0, sign, np.sign(component))
    return sign


def fix_nans(out, *operands):
    """
    Apply the NaN rule to computed lanes: NaN results become the first
    NaN operand quieted, or the default NaN for invalid operations.

    @param out: the computed bit patterns (modified in place)
    @type out: L{numpy.ndarray} of uint64
    @param operands: the operand bit patterns in argument order
    @type operands: L{tuple} of L{numpy.ndarray}
    @return: out
    @rtype: L{numpy.ndarray}
    """
    pending = np.isnan(_values(out))
    if not pending.any():
        return out
    for op in operands:
        hit = pending & np.isnan(_values(op))
        out[hit] = op[hit] | _QUIET64
        pending &= ~hit
    out[pending] = _DEFAULT_NAN64
    return out


def _factor_safe(v):
    a = np.abs(v)
    return (a >= _FACTOR_LO) & (a < _FACTOR_HI)


@register_backend
class VectorizedBackend(Backend):
    """
    The numpy backend.

    @ivar reference: backend evaluating the lanes outside the safe ranges
    @type reference: L{crvec.vlanes.reference.ReferenceBackend}
    """
    name = "vectorized"

    def __init__(self):
        self.reference = ReferenceBackend()

    def _finish(self, like, out, safe, ref_op, *operands):
        """
        Replace the unsafe lanes of a computed result by reference lanes.

        @param like: batch giving width and lane count
        @type like: L{LaneBatch}
        @param out: the computed bit patterns
        @type out: L{numpy.ndarray} of uint64
        @param safe: lanes whose computed result is exact
        @type safe: L{numpy.ndarray} of L{bool}
        @param ref_op: the reference operation
        @type ref_op: callable
        @param operands: operands of the operation
        @type operands: L{tuple}
        @return: the result
        @rtype: L{LaneBatch}
        """
        if not safe.all():
            idx = np.flatnonzero(~safe)
            sub = [(op.take(idx) if isinstance(op, LaneBatch) else op) for op in operands]
            out[idx] = ref_op(*sub).data
        return like.like(out, KIND_F64)

    def _native(self, fn, *operands):
        like = next(op for op in operands if isinstance(op, LaneBatch))
        bits = [f64_bits(op, like) for op in operands]
        with np.errstate(all="ignore"):
            out = _bits(fn(*[_values(b) for b in bits])).copy()
        return like.like(fix_nans(out, *bits), KIND_F64)

    # ================ rounded arithmetic ================

    def add_rn(self, a, b):
        return self._native(np.add, a, b)

    def sub_rn(self, a, b):
        return self._native(np.subtract, a, b)

    def mul_rn(self, a, b):
        return self._native(np.multiply, a, b)

    def _fma_parts(self, a, b, c):
        """
        Return (like, r, uh, ul, cv, safe) where r is the fused a*b+c
        rounded to nearest-even on the safe lanes.
        """
        like = next(op for op in (a, b, c) if isinstance(op, LaneBatch))
        av = _values(f64_bits(a, like))
        bv = _values(f64_bits(b, like))
        cv = _values(f64_bits(c, like))
        with np.errstate(all="ignore"):
            uh, ul = two_prod(av, bv)
            th, tl = two_sum(cv, uh)
            r = th + add_round_to_odd(tl, ul)
            ca = np.abs(cv)
            ra = np.abs(r)
            safe = (
                _factor_safe(av) & _factor_safe(bv) & (np.abs(uh) >= _PRODUCT_LO)
                & ((cv == 0) | ((ca >= _ADDEND_LO) & (ca < _ADDEND_HI)))
                & ((r == 0) | (ra >= _RESULT_LO))
            )
            # a zero product leaves a finite nonzero addend unchanged in every mode
            zero_product = (
                ((av == 0) & np.isfinite(bv)) | ((bv == 0) & np.isfinite(av))
            ) & np.isfinite(cv) & (cv != 0)
            r = np.where(zero_product, cv, r)
            uh = np.where(zero_product, 0.0, uh)
            ul = np.where(zero_product, 0.0, ul)
            safe |= zero_product
        return like, r, uh, ul, cv, safe

    def fma_rn(self, a, b, c):
        like, r, _, _, _, safe = self._fma_parts(a, b, c)
        return self._finish(like, _bits(r).copy(), safe, self.reference.fma_rn, a, b, c)

    def fma_rz(self, a, b, c):
        like, r, uh, ul, cv, safe = self._fma_parts(a, b, c)
        with np.errstate(all="ignore"):
            residual = expansion_sign([r, -uh, -ul, -cv])
            step = (residual != 0) & (residual == np.sign(r))
            r = np.where(step, np.nextafter(r, 0.0), r)
        return self._finish(like, _bits(r).copy(), safe, self.reference.fma_rz, a, b, c)

    def add_rz(self, a, b):
        like = next(op for op in (a, b) if isinstance(op, LaneBatch))
        av = _values(f64_bits(a, like))
        bv = _values(f64_bits(b, like))
        with np.errstate(all="ignore"):
            s, err = two_sum(av, bv)
            safe = np.isfinite(s)
            step = (err != 0) & (np.sign(err) == -np.sign(s))
            s = np.where(step, np.nextafter(s, 0.0), s)
        return self._finish(like, _bits(s).copy(), safe, self.reference.add_rz, a, b)

    def mul_rz(self, a, b):
        like = next(op for op in (a, b) if isinstance(op, LaneBatch))
        av = _values(f64_bits(a, like))
        bv = _values(f64_bits(b, like))
        with np.errstate(all="ignore"):
            p, err = two_prod(av, bv)
            zero_product = ((av == 0) & np.isfinite(bv)) | ((bv == 0) & np.isfinite(av))
            safe = (_factor_safe(av) & _factor_safe(bv) & (np.abs(p) >= _PRODUCT_LO)) | zero_product
            err = np.where(zero_product, 0.0, err)
            step = (err != 0) & (np.sign(err) == -np.sign(p))
            p = np.where(step, np.nextafter(p, 0.0), p)
        return self._finish(like, _bits(p).copy(), safe, self.reference.mul_rz, a, b)

    # ================ decomposition helpers ================

    def reduce_frac(self, x, k):
        v = x.values()
        scale = 2.0 ** k
        with np.errstate(all="ignore"):
            n = np.rint(v * scale)
            r = v - n / scale
            r = np.where(np.isinf(v) | (np.abs(v) >= 2.0 ** 60) | (r == 0), 0.0, r)
        out = _bits(r).copy()
        nan = np.isnan(v)
        out[nan] = x.data[nan] | _QUIET64
        return x.like(out)

    def getmant_075_15(self, x):
        v = x.values()
        with np.errstate(all="ignore"):
            f, _ = np.frexp(v)
            m = np.where(f < 0.75, 2.0 * f, f)
            m = np.where((v == 0) | (v == np.inf), 1.0, m)
        out = _bits(m).copy()
        out[(v < 0)] = _DEFAULT_NAN64
        nan = np.isnan(v)
        out[nan] = x.data[nan] | _QUIET64
        return x.like(out)

    def getexp(self, x):
        v = x.values()
        with np.errstate(all="ignore"):
            _, e = np.frexp(v)
            g = (e - 1).astype(np.float64)
            g = np.where(v == 0, -np.inf, g)
            g = np.where(np.isinf(v), np.inf, g)
        out = _bits(g).copy()
        nan = np.isnan(v)
        out[nan] = x.data[nan] | _QUIET64
        return x.like(out)

    def scalef(self, x, y):
        xv = x.values()
        yv = _values(f64_bits(y, x))
        with np.errstate(all="ignore"):
            n = np.clip(np.floor(yv), -SCALEF_LIMIT, SCALEF_LIMIT)
            n = np.where(np.isfinite(n), n, 0).astype(np.int32)
            r = np.ldexp(xv, n)
            safe = np.isfinite(xv) & (xv != 0) & np.isfinite(yv) & (np.abs(r) >= _MIN_NORMAL)
        return self._finish(x, _bits(r).copy(), safe, self.reference.scalef, x, y)

    def widen(self, x):
        assert x.kind == KIND_F32
        with np.errstate(all="ignore"):
            out = _bits(x.values().astype(np.float64)).copy()
        nan = np.isnan(x.values())
        b = x.data[nan].astype(np.uint64)
        out[nan] = ((b >> np.uint64(31)) << np.uint64(63)) | np.uint64(0x7FF0000000000000) | ((b & np.uint64(0x7FFFFF)) << np.uint64(29))
        return x.like(out, KIND_F64)

    def narrow(self, x, mode):
        assert x.kind == KIND_F64
        v = x.values()
        with np.errstate(all="ignore"):
            r = v.astype(np.float32)
            if mode != RoundingMode.NEAREST_EVEN:
                w = r.astype(np.float64)
                if mode == RoundingMode.TOWARD_ZERO:
                    step, target = np.abs(w) > np.abs(v), np.float32(0.0)
                elif mode == RoundingMode.TOWARD_POSITIVE:
                    step, target = w < v, np.float32(np.inf)
                else:
                    step, target = w > v, np.float32(-np.inf)
                r = np.where(step, np.nextafter(r, target), r).astype(np.float32)
        out = r.view(np.uint32).copy()
        nan = np.isnan(v)
        b = x.data[nan]
        out[nan] = (
            ((b >> np.uint64(63)) << np.uint64(31)) | np.uint64(0x7FC00000)
            | ((b & np.uint64(_MANTISSA64)) >> np.uint64(29))
        ).astype(np.uint32)
        return x.like(out, KIND_F32)
