"""
Correctly rounded binary64 exp2 and log.

A lane-parallel fast path computes the result as a double-double V with a
known relative error bound. A rounding test then decides, per lane,
whether every value within the error bound of V rounds to the same
binary64 number. Lanes where it does not are handed to the oracle one by
one (the callout); the other lanes are never touched again.
"""
import numpy as np

from ..coeffgen.artifact import load_tables
from ..fp.bits import BINARY64, bits_to_float
from ..fp.rounding import RoundingMode, overflow_bits
from ..oracle import ziv_correctly_round
from ..vlanes import LaneBatch, LaneMask, get_backend
from ..vlanes.batch import KIND_F64
from .dd import DD, dd_const, dd_add, dd_mul, dd_mul_d, dd_mul_scalar, fast_two_sum


EPS = 2.0 ** -66
# widens the computed error radius over its rounding errors
_RADIUS_INFLATION = 1.0 + 2.0 ** -50

_ABS_MASK = 0x7FFFFFFFFFFFFFFF
_SIGN_MASK = 1 << 63

EXP2_CLAMP = 1100.0
EXP2_SHIFTER = float.fromhex("0x1.8p+52")
EXP2_TABLE_BITS = 12
EXP2_OVERFLOW = 1024.0
EXP2_UNDERFLOW = -1076.0
EXP2_SUBNORMAL_N = -1022
EXP2_EXACT_MIN = -1074.0

LOGD_INDEX_SHIFT = 52 - 7
LOGD_INDEX_MASK = 127


class RoundTestOutcome(object):
    """
    The result of the rounding test.

    @ivar fast_result: the rounded fast path values (meaningful where decided)
    @type fast_result: L{crvec.vlanes.batch.LaneBatch}
    @ivar decided: lanes whose fast result is known to be correctly rounded
    @type decided: L{crvec.vlanes.batch.LaneMask}
    @ivar error_bound: the relative error bound the test assumed
    @type error_bound: L{float}
    """
    def __init__(self, fast_result, decided, error_bound):
        self.fast_result = fast_result
        self.decided = decided
        self.error_bound = error_bound

    def __repr__(self):
        return "RoundTestOutcome(decided={}/{}, eps={})".format(
            self.decided.count(), len(self.decided), float(self.error_bound).hex(),
        )


def _resolve(backend, tables):
    if backend is None:
        backend = get_backend()
    elif isinstance(backend, str):
        backend = get_backend(backend)
    if tables is None:
        tables = load_tables()
    return backend, tables


def _abs(b, x):
    return b.bits_to_f64(b.and_bits(x, _ABS_MASK))


def round_test(V, eps, mode, eps_abs=0.0, backend=None):
    """
    Decide per lane whether V is close enough to a rounding boundary to
    need the slow path.

    The error radius is eps * |hi| + eps_abs. A lane is decided when
    V minus and V plus the radius round to the same binary64 value under
    the mode; that value is the fast result.

    @param V: the double-double values
    @type V: L{crvec.kernels.dd.DD}
    @param eps: relative error bound of V
    @type eps: L{float}
    @param mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @param eps_abs: absolute error bound of V
    @type eps_abs: L{float}
    @param backend: the backend
    @type backend: L{crvec.vlanes.backend.Backend} or L{None}
    @return: the outcome
    @rtype: L{RoundTestOutcome}
    """
    b = (get_backend() if backend is None else backend)
    hi, lo = V.hi, V.lo
    abs_bits = b.and_bits(hi, _ABS_MASK)
    mag = b.bits_to_f64(abs_bits)
    up = b.bits_to_f64(b.add_int(abs_bits, 1))
    down = b.bits_to_f64(b.add_int(abs_bits, -1))
    negative = b.compare_mask(hi, "<", 0.0)
    # lo measured in the direction of |hi|
    u = b.select(negative, b.mul_rn(lo, -1.0), lo)
    radius = b.mul_rn(b.fma_rn(mag, eps, eps_abs), _RADIUS_INFLATION)
    finite = b.is_finite(hi) & b.compare_mask(mag, ">", 0.0)

    if mode == RoundingMode.NEAREST_EVEN:
        margin_up = b.sub_rn(b.mul_rn(b.sub_rn(up, mag), 0.5), u)
        margin_down = b.add_rn(b.mul_rn(b.sub_rn(mag, down), 0.5), u)
        decided = b.compare_mask(radius, "<", margin_up) & b.compare_mask(radius, "<", margin_down)
        return RoundTestOutcome(hi, decided & finite, eps)

    decided = b.compare_mask(radius, "<", _abs(b, u))
    if mode == RoundingMode.TOWARD_ZERO:
        shrink = LaneMask(np.ones(len(hi), dtype=bool), hi.width)
    elif mode == RoundingMode.TOWARD_POSITIVE:
        shrink = negative
    else:
        shrink = ~negative
    below = b.compare_mask(u, "<", 0.0)
    above = b.compare_mask(u, ">", 0.0)
    rounded = b.select(shrink & below, down, b.select(~shrink & above, up, mag))
    rounded = b.or_bits(rounded, b.and_bits(hi, _SIGN_MASK))
    return RoundTestOutcome(rounded, decided & finite, eps)


def callout(f_id, x, mode=RoundingMode.NEAREST_EVEN):
    """
    Correctly round one lane with the oracle.

    @param f_id: "exp2" or "log"
    @type f_id: L{str}
    @param x: the input
    @type x: L{crvec.fp.bits.Binary64}
    @param mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @return: the correctly rounded result
    @rtype: L{crvec.fp.bits.Binary64}
    @raises UndecidableError: if the oracle reaches its precision cap
    """
    return ziv_correctly_round(f_id, x, target=BINARY64, mode=mode).rounded


def _apply_callouts(f_id, x, outcome, mode):
    """
    Replace the undecided lanes of an outcome by callout results.
    """
    out = outcome.fast_result.data.copy()
    for i in (~outcome.decided).indices():
        out[i] = callout(f_id, x.lane(int(i)), mode).bits
    return x.like(out, KIND_F64)


# ================ exp2 ================


def exp2_decompose(b, x):
    """
    Split x into k = RN(x * 4096) and R = x - k / 4096.

    @param b: the backend
    @type b: L{crvec.vlanes.backend.Backend}
    @param x: finite binary64 lanes with |x| <= 1100
    @type x: L{crvec.vlanes.batch.LaneBatch}
    @return: the tuple (k, N, i1, i2, i3, R), all but R integer lanes
    @rtype: L{tuple}
    """
    k = b.shifter_integer(b.mul_rn(x, float(1 << EXP2_TABLE_BITS)), EXP2_SHIFTER)
    N = b.shift_right_arith(k, EXP2_TABLE_BITS)
    i1 = b.and_bits(b.shift_right(k, 8), 15)
    i2 = b.and_bits(b.shift_right(k, 4), 15)
    i3 = b.and_bits(k, 15)
    R = b.reduce_frac(x, EXP2_TABLE_BITS)
    return k, N, i1, i2, i3, R


def _lookup(b, tables, name, idx):
    hi, lo = tables.planes(name)
    return DD(b.permute_table(hi, idx), b.permute_table(lo, idx))


def cr_exp2_fast(x, mode=RoundingMode.NEAREST_EVEN, backend=None, tables=None):
    """
    The binary64 exp2 fast path.

    Lanes resolved without the oracle (specials, saturation, exact powers
    and decided lanes) are marked decided.

    @param x: the binary64 inputs
    @type x: L{crvec.vlanes.batch.LaneBatch}
    @param mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @param backend: the backend or its name
    @type backend: L{crvec.vlanes.backend.Backend} or L{str} or L{None}
    @param tables: the tables
    @type tables: L{crvec.coeffgen.tables.TableSet} or L{None}
    @return: the outcome
    @rtype: L{RoundTestOutcome}
    """
    assert x.kind == KIND_F64, "exp2 takes binary64 lanes"
    b, tables = _resolve(backend, tables)
    t = tables.exp2d

    finite = b.is_finite(x)
    xc = b.select(finite, b.clamp(x, -EXP2_CLAMP, EXP2_CLAMP), 0.0)
    k, N, i1, i2, i3, R = exp2_decompose(b, xc)
    T = dd_mul(b, dd_mul(b, _lookup(b, t, "T1", i1), _lookup(b, t, "T2", i2)), _lookup(b, t, "T3", i3))

    # P = 1 + R * q(R), q(R) ~ (2^R - 1) / R
    s = LaneBatch.full(t.c[-1], len(x), x.width)
    for c in reversed(t.c[1:-1]):
        s = b.fma_rn(s, R, c)
    tail = DD(b.mul_rn(s, R), LaneBatch.full(0.0, len(x), x.width))
    q = dd_add(b, dd_const(t.c[0][0], t.c[0][1], x), tail)
    P = dd_add(b, dd_const(1.0, 0.0, x), dd_mul_d(b, q, R))
    V = dd_mul(b, T, P)

    outcome = round_test(V, EPS, mode, backend=b)
    Nf = b.int_to_f64(N)
    result = b.scalef(outcome.fast_result, Nf)
    decided = outcome.decided & b.compare_mask(Nf, ">", float(EXP2_SUBNORMAL_N))

    # integer arguments give exact powers of two
    integer = b.compare_mask(b.sub_rn(xc, Nf), "==", 0.0)
    exact = finite & integer & b.compare_mask(x, ">=", EXP2_EXACT_MIN) & b.compare_mask(x, "<", EXP2_OVERFLOW)
    result = b.select(exact, b.scalef(LaneBatch.full(1.0, len(x), x.width), Nf), result)

    overflow = finite & b.compare_mask(x, ">=", EXP2_OVERFLOW)
    underflow = finite & b.compare_mask(x, "<", EXP2_UNDERFLOW)
    result = b.select(overflow, bits_to_float(overflow_bits(0, BINARY64, mode)), result)
    tiny = (2.0 ** -1074 if mode == RoundingMode.TOWARD_POSITIVE else 0.0)
    result = b.select(underflow, tiny, result)

    nan = b.compare_neq_mask(x, x)
    special = b.select(nan, b.or_bits(x, 1 << 51), b.select(b.compare_mask(x, ">", 0.0), float("inf"), 0.0))
    result = b.select(finite, result, special)
    resolved = ~finite | exact | overflow | underflow
    return RoundTestOutcome(result, decided | resolved, EPS)


def cr_exp2(x, mode=RoundingMode.NEAREST_EVEN, backend=None, tables=None):
    """
    Correctly rounded 2^x for binary64 lanes.

    @param x: the binary64 inputs
    @type x: L{crvec.vlanes.batch.LaneBatch}
    @param mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @param backend: the backend or its name
    @type backend: L{crvec.vlanes.backend.Backend} or L{str} or L{None}
    @param tables: the tables
    @type tables: L{crvec.coeffgen.tables.TableSet} or L{None}
    @return: the results
    @rtype: L{crvec.vlanes.batch.LaneBatch}
    @raises UndecidableError: if a callout cannot be decided
    """
    outcome = cr_exp2_fast(x, mode, backend=backend, tables=tables)
    return _apply_callouts("exp2", x, outcome, mode)


# ================ log ================


def log_reduce(b, tables, x):
    """
    Reduce positive finite x to x = 2^e * mx, mx = (1 + r) / rcp.

    @param b: the backend
    @type b: L{crvec.vlanes.backend.Backend}
    @param tables: the log tables
    @type tables: L{crvec.coeffgen.tables.LogdTable}
    @param x: positive finite binary64 lanes
    @type x: L{crvec.vlanes.batch.LaneBatch}
    @return: the tuple (e, index, r, L) with r and L as double-doubles
    @rtype: L{tuple}
    """
    mx = b.getmant_075_15(x)
    e = b.sub_rn(b.getexp(x), b.getexp(mx))
    index = b.and_bits(b.shift_right(mx, LOGD_INDEX_SHIFT), LOGD_INDEX_MASK)
    rcp = b.bits_to_f64(b.gather64(tables.rcp_array, index))
    p = b.mul_rn(rcp, mx)
    r = fast_two_sum(b, b.sub_rn(p, 1.0), b.fma_rn(rcp, mx, b.mul_rn(p, -1.0)))

    L_hi = b.bits_to_f64(b.gather64(tables.L_hi_array, index))
    L_lo = b.bits_to_f64(b.gather64(tables.L_lo_array, index))
    return e, index, r, DD(L_hi, L_lo)


def cr_log_fast(x, mode=RoundingMode.NEAREST_EVEN, backend=None, tables=None):
    """
    The binary64 log fast path.

    Special lanes are resolved here and marked decided.

    @param x: the binary64 inputs
    @type x: L{crvec.vlanes.batch.LaneBatch}
    @param mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @param backend: the backend or its name
    @type backend: L{crvec.vlanes.backend.Backend} or L{str} or L{None}
    @param tables: the tables
    @type tables: L{crvec.coeffgen.tables.TableSet} or L{None}
    @return: the outcome
    @rtype: L{RoundTestOutcome}
    """
    assert x.kind == KIND_F64, "log takes binary64 lanes"
    b, tables = _resolve(backend, tables)
    t = tables.logd

    regular = b.is_finite(x) & b.compare_mask(x, ">", 0.0)
    xc = b.select(regular, x, 2.0)
    e, index, r, L = log_reduce(b, t, xc)

    # log(1 + r) = r - r^2/2 + r^3 * q(r)
    q = LaneBatch.full(t.c[-1], len(x), x.width)
    for c in reversed(t.c[:-1]):
        q = b.fma_rn(q, r.hi, c)
    sq = dd_mul(b, r, r)
    half_sq = DD(b.mul_rn(sq.hi, -0.5), b.mul_rn(sq.lo, -0.5))
    # r.lo reaches 2^-53 where rcp != 1, so r^3 is formed from the full pair
    cube = b.mul_rn(dd_mul(b, sq, r).hi, q)
    P = dd_add(b, r, dd_add(b, half_sq, DD(cube, LaneBatch.full(0.0, len(x), x.width))))
    V = dd_add(b, dd_add(b, dd_mul_scalar(b, dd_const(t.ln2[0], t.ln2[1], x), e), L), P)

    # L.hi + L.lo is within 2^-105 of -log(rcp) relative, inside EPS
    outcome = round_test(V, EPS, mode, backend=b)

    one = b.compare_mask(x, "==", 1.0)
    nan = b.compare_neq_mask(x, x)
    zero = b.compare_mask(x, "==", 0.0)
    negative = b.compare_mask(x, "<", 0.0)
    special = b.select(
        nan, b.or_bits(x, 1 << 51),
        b.select(zero, float("-inf"), b.select(negative, float("nan"), float("inf"))),
    )
    result = b.select(one, 0.0, b.select(regular, outcome.fast_result, special))
    return RoundTestOutcome(result, outcome.decided | ~regular | one, EPS)


def cr_log(x, mode=RoundingMode.NEAREST_EVEN, backend=None, tables=None):
    """
    Correctly rounded natural logarithm for binary64 lanes.

    @param x: the binary64 inputs
    @type x: L{crvec.vlanes.batch.LaneBatch}
    @param mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @param backend: the backend or its name
    @type backend: L{crvec.vlanes.backend.Backend} or L{str} or L{None}
    @param tables: the tables
    @type tables: L{crvec.coeffgen.tables.TableSet} or L{None}
    @return: the results
    @rtype: L{crvec.vlanes.batch.LaneBatch}
    @raises UndecidableError: if a callout cannot be decided
    """
    outcome = cr_log_fast(x, mode, backend=backend, tables=tables)
    return _apply_callouts("log", x, outcome, mode)


def cr_exp2_scalar(x, mode=RoundingMode.NEAREST_EVEN, backend=None, tables=None):
    """
    Width-1 entry point of L{cr_exp2}.

    @param x: the input
    @type x: L{crvec.fp.bits.Binary64}
    @return: the result
    @rtype: L{crvec.fp.bits.Binary64}
    """
    return cr_exp2(LaneBatch.from_values([x], 1), mode, backend=backend, tables=tables).lane(0)


def cr_log_scalar(x, mode=RoundingMode.NEAREST_EVEN, backend=None, tables=None):
    """
    Width-1 entry point of L{cr_log}.

    @param x: the input
    @type x: L{crvec.fp.bits.Binary64}
    @return: the result
    @rtype: L{crvec.fp.bits.Binary64}
    """
    return cr_log(LaneBatch.from_values([x], 1), mode, backend=backend, tables=tables).lane(0)


def _apply_array(kernel, values, mode, width, backend, tables):
    arr = np.ascontiguousarray(values, dtype=np.float64).reshape(-1)
    n = len(arr)
    padded = np.ones(-(-n // width) * width, dtype=np.float64)
    padded[:n] = arr
    out = kernel(LaneBatch.from_floats(padded, width, KIND_F64), mode, backend=backend, tables=tables)
    return out.values()[:n].copy()


def cr_exp2_array(values, mode=RoundingMode.NEAREST_EVEN, width=8, backend=None, tables=None):
    """
    Apply L{cr_exp2} to an array, in stacked batches of the given width.

    @param values: the inputs
    @type values: array-like of floats
    @return: the results
    @rtype: L{numpy.ndarray} of float64
    """
    return _apply_array(cr_exp2, values, mode, width, backend, tables)


def cr_log_array(values, mode=RoundingMode.NEAREST_EVEN, width=8, backend=None, tables=None):
    """
    Apply L{cr_log} to an array, in stacked batches of the given width.

    @param values: the inputs
    @type values: array-like of floats
    @return: the results
    @rtype: L{numpy.ndarray} of float64
    """
    return _apply_array(cr_log, values, mode, width, backend, tables)
