"""
Correctly rounded binary32 exp2 and log2.

Both kernels widen the input to binary64, evaluate a table-driven
polynomial approximation there and narrow the result once under the
requested rounding mode. The binary64 intermediate carries enough extra
bits that narrowing it gives the correctly rounded binary32 value. Every
lane runs the same sequence of lane operations; special inputs are
replaced by a final select.
"""
import numpy as np

from ..coeffgen.artifact import load_tables
from ..fp.rounding import RoundingMode
from ..vlanes import LaneBatch, get_backend
from ..vlanes.batch import KIND_F32


EXP2F_CLAMP = 260.0
EXP2F_SHIFTER = float.fromhex("0x1.8p+49")
EXP2F_INDEX_BITS = 3
LOG2F_INDEX_SHIFT = 52 - 3


class Exp2fTrace(object):
    """
    Intermediate lanes of the binary32 exp2 kernel.

    @ivar xd: the widened input
    @ivar R: the reduced argument, |R| <= 2^-4 for finite inputs
    @ivar d_index: the table index lanes
    @ivar Nd: xd - R, a multiple of 1/8
    @ivar T: the table values
    @ivar poly: poly(R) * T
    @ivar sticky: 1 where R != 0
    @ivar result64: the scaled binary64 value before narrowing
    @ivar result: the binary32 result
    """
    def __init__(self, **kwargs):
        self.xd = kwargs["xd"]
        self.R = kwargs["R"]
        self.d_index = kwargs["d_index"]
        self.Nd = kwargs["Nd"]
        self.T = kwargs["T"]
        self.poly = kwargs["poly"]
        self.sticky = kwargs["sticky"]
        self.result64 = kwargs["result64"]
        self.result = kwargs["result"]


class Log2fTrace(object):
    """
    Intermediate lanes of the binary32 log2 kernel.

    @ivar xd: the widened input
    @ivar mx: the mantissa in [0.75, 1.5)
    @ivar ex: the exponent with x = mx * 2^ex
    @ivar index: the sub-interval lanes (top 3 mantissa bits)
    @ivar R: 1.5 * (mx - 1)
    @ivar poly: the polynomial value
    @ivar result64: the binary64 value before narrowing
    @ivar result: the binary32 result
    """
    def __init__(self, **kwargs):
        self.xd = kwargs["xd"]
        self.mx = kwargs["mx"]
        self.ex = kwargs["ex"]
        self.index = kwargs["index"]
        self.R = kwargs["R"]
        self.poly = kwargs["poly"]
        self.result64 = kwargs["result64"]
        self.result = kwargs["result"]


def _resolve(backend, tables):
    if backend is None:
        backend = get_backend()
    elif isinstance(backend, str):
        backend = get_backend(backend)
    if tables is None:
        tables = load_tables()
    return backend, tables


def trace_exp2f(x, mode=RoundingMode.NEAREST_EVEN, backend=None, tables=None):
    """
    Run the binary32 exp2 kernel, keeping the intermediate lanes.

    @param x: the binary32 inputs
    @type x: L{crvec.vlanes.batch.LaneBatch}
    @param mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @param backend: the backend or its name, defaults to the vectorized one
    @type backend: L{crvec.vlanes.backend.Backend} or L{str} or L{None}
    @param tables: the tables, defaults to L{crvec.coeffgen.artifact.load_tables}
    @type tables: L{crvec.coeffgen.tables.TableSet} or L{None}
    @return: the trace
    @rtype: L{Exp2fTrace}
    """
    assert x.kind == KIND_F32, "exp2f takes binary32 lanes"
    b, tables = _resolve(backend, tables)
    t = tables.exp2f

    xd = b.widen(x)
    finite = b.is_finite(xd)
    # non-finite lanes run the pipeline on a placeholder
    xc = b.select(finite, b.clamp(xd, -EXP2F_CLAMP, EXP2F_CLAMP), 0.0)
    R = b.reduce_frac(xc, EXP2F_INDEX_BITS)
    d_index = b.shifter_index(xc, EXP2F_SHIFTER, EXP2F_INDEX_BITS)
    Nd = b.sub_rn(xc, R)
    T = b.permute_table(t.T_bits, d_index)

    poly = LaneBatch.full(t.c[-1], len(x), x.width)
    for c in reversed(t.c[:-1]):
        poly = b.fma_rn(poly, R, c)
    poly = b.mul_rn(poly, T)
    result = b.fma_rz(poly, R, T)
    sticky = b.shift_right(b.compare_neq_mask(R, 0.0).as_lane_bits(), 63)
    result = b.or_bits(result, sticky)
    result = b.scalef(result, Nd)

    nan = b.compare_neq_mask(xd, xd)
    special = b.select(nan, xd, b.select(b.compare_mask(xd, ">", 0.0), float("inf"), 0.0))
    result64 = b.select(finite, result, special)
    return Exp2fTrace(
        xd=xd, R=R, d_index=d_index, Nd=Nd, T=T, poly=poly, sticky=sticky,
        result64=result64, result=b.narrow(result64, mode),
    )


def trace_log2f(x, mode=RoundingMode.NEAREST_EVEN, backend=None, tables=None):
    """
    Run the binary32 log2 kernel, keeping the intermediate lanes.

    @param x: the binary32 inputs
    @type x: L{crvec.vlanes.batch.LaneBatch}
    @param mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @param backend: the backend or its name, defaults to the vectorized one
    @type backend: L{crvec.vlanes.backend.Backend} or L{str} or L{None}
    @param tables: the tables, defaults to L{crvec.coeffgen.artifact.load_tables}
    @type tables: L{crvec.coeffgen.tables.TableSet} or L{None}
    @return: the trace
    @rtype: L{Log2fTrace}
    """
    assert x.kind == KIND_F32, "log2f takes binary32 lanes"
    b, tables = _resolve(backend, tables)
    planes = tables.log2f.planes

    xd = b.widen(x)
    regular = b.is_finite(xd) & b.compare_mask(xd, ">", 0.0)
    xc = b.select(regular, xd, 1.0)
    mx = b.getmant_075_15(xc)
    ex = b.sub_rn(b.getexp(xc), b.getexp(mx))
    index = b.and_bits(b.shift_right(xc, LOG2F_INDEX_SHIFT), 7)
    R = b.fma_rn(mx, 1.5, -1.5)

    poly = b.permute_table(planes[-1], index)
    for plane in reversed(planes[:-1]):
        poly = b.fma_rn(poly, R, b.permute_table(plane, index))
    ex_rz = b.add_rz(ex, R)
    result = b.fma_rz(poly, R, ex_rz)

    nan = b.compare_neq_mask(xd, xd)
    zero = b.compare_mask(xd, "==", 0.0)
    special = b.select(
        nan, xd,
        b.select(zero, float("-inf"), b.select(b.compare_mask(xd, "<", 0.0), float("nan"), float("inf"))),
    )
    result64 = b.select(regular, result, special)
    return Log2fTrace(
        xd=xd, mx=mx, ex=ex, index=index, R=R, poly=poly,
        result64=result64, result=b.narrow(result64, mode),
    )


def cr_exp2f(x, mode=RoundingMode.NEAREST_EVEN, backend=None, tables=None):
    """
    Correctly rounded 2^x for binary32 lanes.

    @param x: the binary32 inputs
    @type x: L{crvec.vlanes.batch.LaneBatch}
    @param mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @param backend: the backend or its name, defaults to the vectorized one
    @type backend: L{crvec.vlanes.backend.Backend} or L{str} or L{None}
    @param tables: the tables
    @type tables: L{crvec.coeffgen.tables.TableSet} or L{None}
    @return: the binary32 results
    @rtype: L{crvec.vlanes.batch.LaneBatch}
    """
    return trace_exp2f(x, mode, backend=backend, tables=tables).result


def cr_log2f(x, mode=RoundingMode.NEAREST_EVEN, backend=None, tables=None):
    """
    Correctly rounded log2(x) for binary32 lanes.

    @param x: the binary32 inputs
    @type x: L{crvec.vlanes.batch.LaneBatch}
    @param mode: the rounding mode
    @type mode: L{crvec.fp.rounding.RoundingMode}
    @param backend: the backend or its name, defaults to the vectorized one
    @type backend: L{crvec.vlanes.backend.Backend} or L{str} or L{None}
    @param tables: the tables
    @type tables: L{crvec.coeffgen.tables.TableSet} or L{None}
    @return: the binary32 results
    @rtype: L{crvec.vlanes.batch.LaneBatch}
    """
    return trace_log2f(x, mode, backend=backend, tables=tables).result


def cr_exp2f_scalar(x, mode=RoundingMode.NEAREST_EVEN, backend=None, tables=None):
    """
    Width-1 entry point of L{cr_exp2f}.

    @param x: the input
    @type x: L{crvec.fp.bits.Binary32}
    @return: the result
    @rtype: L{crvec.fp.bits.Binary32}
    """
    return cr_exp2f(LaneBatch.from_values([x], 1), mode, backend=backend, tables=tables).lane(0)


def cr_log2f_scalar(x, mode=RoundingMode.NEAREST_EVEN, backend=None, tables=None):
    """
    Width-1 entry point of L{cr_log2f}.

    @param x: the input
    @type x: L{crvec.fp.bits.Binary32}
    @return: the result
    @rtype: L{crvec.fp.bits.Binary32}
    """
    return cr_log2f(LaneBatch.from_values([x], 1), mode, backend=backend, tables=tables).lane(0)


def _apply_array(kernel, values, mode, width, backend, tables):
    arr = np.ascontiguousarray(values, dtype=np.float32).reshape(-1)
    n = len(arr)
    padded = np.zeros(-(-n // width) * width, dtype=np.float32)
    padded[:n] = arr
    out = kernel(LaneBatch.from_floats(padded, width, KIND_F32), mode, backend=backend, tables=tables)
    return out.values()[:n].copy()


def cr_exp2f_array(values, mode=RoundingMode.NEAREST_EVEN, width=16, backend=None, tables=None):
    """
    Apply L{cr_exp2f} to an array, in stacked batches of the given width.

    @param values: the inputs
    @type values: array-like of binary32 values
    @param width: the batch width
    @type width: L{int}
    @return: the results
    @rtype: L{numpy.ndarray} of float32
    """
    return _apply_array(cr_exp2f, values, mode, width, backend, tables)


def cr_log2f_array(values, mode=RoundingMode.NEAREST_EVEN, width=16, backend=None, tables=None):
    """
    Apply L{cr_log2f} to an array, in stacked batches of the given width.

    @param values: the inputs
    @type values: array-like of binary32 values
    @param width: the batch width
    @type width: L{int}
    @return: the results
    @rtype: L{numpy.ndarray} of float32
    """
    return _apply_array(cr_log2f, values, mode, width, backend, tables)
