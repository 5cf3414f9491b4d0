"""
The lane operation contract.

A backend implements every lane-wise operation the kernels are built
from. The reference backend (L{crvec.vlanes.reference}) is normative,
other backends must produce bit-identical lanes. Operations on bit
patterns and integers are exact in numpy and thus implemented once here;
floating-point operations are implemented by the backends.

Float operands may be given as L{LaneBatch} or as python floats, which
are broadcast to every lane.
"""
import numpy as np

from ..fp.bits import float_to_bits
from .batch import LaneBatch, LaneMask, KIND_F64, KIND_F32, KIND_INT


def _template(*operands):
    """
    Return the first L{LaneBatch} among the operands.
    """
    for op in operands:
        if isinstance(op, LaneBatch):
            return op
    raise TypeError("At least one operand must be a LaneBatch")


def f64_bits(x, like):
    """
    Return the binary64 lanes of an operand as uint64 array.

    @param x: the operand
    @type x: L{LaneBatch} or L{float}
    @param like: batch giving the lane count
    @type like: L{LaneBatch}
    @return: the bit patterns
    @rtype: L{numpy.ndarray}
    """
    if isinstance(x, LaneBatch):
        assert x.kind == KIND_F64, "Expected binary64 lanes, got {}".format(x.kind)
        assert len(x) == len(like), "Lane count mismatch"
        return x.data
    return np.full(len(like), float_to_bits(float(x)), dtype=np.uint64)


def _int_lanes(x, like):
    """
    Return the lanes of an integer operand (or the raw pattern of a float batch) as uint64 array.
    """
    if isinstance(x, LaneBatch):
        assert len(x) == len(like)
        return x.data.astype(np.uint64) if x.kind != KIND_F64 else x.data
    return np.full(len(like), int(x) & 0xFFFFFFFFFFFFFFFF, dtype=np.uint64)


class Backend(object):
    """
    Base class of the lane backends.

    @cvar name: name of the backend
    @type name: L{str}
    """
    name = None

    # ================ rounded arithmetic ================

    def fma_rn(self, a, b, c):
        """
        Fused a*b+c rounded to nearest-even.

        @return: the result lanes
        @rtype: L{LaneBatch}
        """
        raise NotImplementedError("Backend.fma_rn() not implemented!")

    def fma_rz(self, a, b, c):
        """
        Fused a*b+c rounded toward zero.

        @return: the result lanes
        @rtype: L{LaneBatch}
        """
        raise NotImplementedError("Backend.fma_rz() not implemented!")

    def add_rn(self, a, b):
        """
        a+b rounded to nearest-even.
        """
        raise NotImplementedError("Backend.add_rn() not implemented!")

    def sub_rn(self, a, b):
        """
        a-b rounded to nearest-even.
        """
        raise NotImplementedError("Backend.sub_rn() not implemented!")

    def mul_rn(self, a, b):
        """
        a*b rounded to nearest-even.
        """
        raise NotImplementedError("Backend.mul_rn() not implemented!")

    def add_rz(self, a, b):
        """
        a+b rounded toward zero.
        """
        raise NotImplementedError("Backend.add_rz() not implemented!")

    def mul_rz(self, a, b):
        """
        a*b rounded toward zero.
        """
        raise NotImplementedError("Backend.mul_rz() not implemented!")

    # ================ decomposition helpers ================

    def reduce_frac(self, x, k):
        """
        Return R = x - RN(x*2^k)*2^-k, computed exactly.

        Ties of x*2^k round to even. ±Inf and exact zeros give +0.0, NaN is
        propagated quieted.

        @param x: the argument
        @type x: L{LaneBatch}
        @param k: number of fraction bits kept in the rounded part
        @type k: L{int}
        @return: the reduced argument
        @rtype: L{LaneBatch}
        """
        raise NotImplementedError("Backend.reduce_frac() not implemented!")

    def shifter_sum(self, x, magic):
        """
        Return the binary64 lanes RN(x + magic).

        @param x: the argument
        @type x: L{LaneBatch}
        @param magic: the shifter constant
        @type magic: L{float}
        @return: the rounded sums
        @rtype: L{LaneBatch}
        """
        return self.add_rn(x, magic)

    def shifter_index(self, x, magic, bit_count):
        """
        Return the low bits of the pattern of RN(x + magic).

        @param x: the argument
        @type x: L{LaneBatch}
        @param magic: the shifter constant, e.g. 0x1.8p+49
        @type magic: L{float}
        @param bit_count: number of low bits to keep
        @type bit_count: L{int}
        @return: the index lanes
        @rtype: L{LaneBatch} of integers
        """
        s = self.shifter_sum(x, magic)
        return s.like((s.data & np.uint64((1 << bit_count) - 1)).astype(np.int64), KIND_INT)

    def shifter_integer(self, x, magic):
        """
        Return the signed integer held by the shifter, i.e.
        bits(RN(x + magic)) - bits(magic).

        @param x: the argument
        @type x: L{LaneBatch}
        @param magic: the shifter constant, e.g. 0x1.8p+52
        @type magic: L{float}
        @return: the integer lanes
        @rtype: L{LaneBatch} of integers
        """
        s = self.shifter_sum(x, magic)
        return s.like(s.data.view(np.int64) - np.int64(float_to_bits(magic)), KIND_INT)

    def getmant_075_15(self, x):
        """
        Return the mantissa of x normalized to [0.75, 1.5).

        ±0 and +Inf give +1.0, negative x and -Inf the default NaN, NaN is
        propagated quieted.

        @param x: the argument
        @type x: L{LaneBatch}
        @return: the mantissas
        @rtype: L{LaneBatch}
        """
        raise NotImplementedError("Backend.getmant_075_15() not implemented!")

    def getexp(self, x):
        """
        Return floor(log2|x|) as binary64; ±0 gives -Inf, ±Inf gives +Inf.

        @param x: the argument
        @type x: L{LaneBatch}
        @return: the exponents
        @rtype: L{LaneBatch}
        """
        raise NotImplementedError("Backend.getexp() not implemented!")

    def scalef(self, x, y):
        """
        Return x*2^floor(y) rounded to nearest-even, with the special cases of a hardware scalef.

        @param x: the values to scale
        @type x: L{LaneBatch}
        @param y: the exponents
        @type y: L{LaneBatch} or L{float}
        @return: the scaled values
        @rtype: L{LaneBatch}
        """
        raise NotImplementedError("Backend.scalef() not implemented!")

    def widen(self, x):
        """
        Exactly widen binary32 lanes to binary64 (NaN payloads kept).

        @param x: the binary32 lanes
        @type x: L{LaneBatch}
        @return: the binary64 lanes
        @rtype: L{LaneBatch}
        """
        raise NotImplementedError("Backend.widen() not implemented!")

    def narrow(self, x, mode):
        """
        Convert binary64 lanes to binary32 under a rounding mode.

        @param x: the binary64 lanes
        @type x: L{LaneBatch}
        @param mode: rounding mode
        @type mode: L{crvec.fp.rounding.RoundingMode}
        @return: the binary32 lanes
        @rtype: L{LaneBatch}
        """
        raise NotImplementedError("Backend.narrow() not implemented!")

    # ================ exact lane operations ================

    def clamp(self, x, lo, hi):
        """
        Clamp the finite lanes of x to [lo, hi]; Inf and NaN lanes are kept.

        @param x: the lanes
        @type x: L{LaneBatch}
        @param lo: lower bound
        @type lo: L{float}
        @param hi: upper bound
        @type hi: L{float}
        @return: the clamped lanes
        @rtype: L{LaneBatch}
        """
        v = x.values()
        finite = np.isfinite(v)
        out = x.data.copy()
        out[finite & (v < lo)] = float_to_bits(lo)
        out[finite & (v > hi)] = float_to_bits(hi)
        return x.like(out)

    def is_finite(self, x):
        """
        Return the mask of finite lanes.

        @param x: binary64 or binary32 lanes
        @type x: L{LaneBatch}
        @return: the mask
        @rtype: L{LaneMask}
        """
        return LaneMask(np.isfinite(x.values()), x.width)

    def permute_table(self, table, idx):
        """
        Look up a small table: lane i receives table[idx_i mod size].

        @param table: 8 or 16 binary64 entries
        @type table: L{numpy.ndarray} of uint64 bit patterns
        @param idx: the index lanes
        @type idx: L{LaneBatch} of integers
        @return: the looked up lanes
        @rtype: L{LaneBatch}
        """
        table = np.asarray(table, dtype=np.uint64)
        assert len(table) in (8, 16)
        return idx.like(table[np.mod(idx.data.astype(np.int64), len(table))], KIND_F64)

    def gather64(self, table, idx):
        """
        Gather 64 bit integers: lane i receives table[idx_i].

        @param table: the table
        @type table: L{numpy.ndarray} of int64
        @param idx: the index lanes, all in range
        @type idx: L{LaneBatch} of integers
        @return: the gathered lanes
        @rtype: L{LaneBatch} of integers
        """
        table = np.asarray(table, dtype=np.int64)
        i = idx.data.astype(np.int64)
        assert ((i >= 0) & (i < len(table))).all(), "gather64() index out of range"
        return idx.like(table[i], KIND_INT)

    def or_bits(self, a, b):
        """
        Bitwise or of the patterns of a with b, keeping the kind of a.

        @param a: the lanes
        @type a: L{LaneBatch}
        @param b: integer lanes, float lanes or an integer constant
        @type b: L{LaneBatch} or L{int}
        @return: the combined lanes
        @rtype: L{LaneBatch}
        """
        bits = a.data.astype(np.uint64) | _int_lanes(b, a)
        return a.like(bits.astype(a.data.dtype) if a.kind != KIND_INT else bits.view(np.int64))

    def and_bits(self, a, b):
        """
        Bitwise and of the patterns of a with b, returning integer lanes.

        @param a: the lanes
        @type a: L{LaneBatch}
        @param b: integer lanes, float lanes or an integer constant
        @type b: L{LaneBatch} or L{int}
        @return: the result as integers
        @rtype: L{LaneBatch} of integers
        """
        bits = _int_lanes(a, a) & _int_lanes(b, a)
        return a.like(bits.view(np.int64), KIND_INT)

    def shift_right(self, a, n):
        """
        Logical shift right of the 64 bit patterns of a.

        @param a: the lanes
        @type a: L{LaneBatch}
        @param n: shift amount
        @type n: L{int}
        @return: the shifted patterns as integers
        @rtype: L{LaneBatch} of integers
        """
        bits = _int_lanes(a, a) >> np.uint64(n)
        return a.like(bits.view(np.int64), KIND_INT)

    def shift_right_arith(self, a, n):
        """
        Arithmetic shift right of integer lanes.

        @param a: the integer lanes
        @type a: L{LaneBatch}
        @param n: shift amount
        @type n: L{int}
        @return: the shifted lanes
        @rtype: L{LaneBatch} of integers
        """
        assert a.kind == KIND_INT
        return a.like(a.data >> np.int64(n))

    def add_int(self, a, n):
        """
        Add a constant to integer lanes (wrapping modulo 2^64).

        @param a: the integer lanes
        @type a: L{LaneBatch}
        @param n: the constant
        @type n: L{int}
        @return: the sums
        @rtype: L{LaneBatch} of integers
        """
        assert a.kind == KIND_INT
        with np.errstate(over="ignore"):
            return a.like(a.data + np.int64(n))

    def int_to_f64(self, a):
        """
        Convert integer lanes to binary64, rounding to nearest-even (exact
        for values with at most 53 significant bits).

        @param a: the integer lanes
        @type a: L{LaneBatch}
        @return: the binary64 lanes
        @rtype: L{LaneBatch}
        """
        assert a.kind == KIND_INT
        return a.like(a.data.astype(np.float64).view(np.uint64), KIND_F64)

    def bits_to_f64(self, a):
        """
        Reinterpret integer lanes as binary64 patterns.

        @param a: the integer lanes
        @type a: L{LaneBatch}
        @return: the binary64 lanes
        @rtype: L{LaneBatch}
        """
        return a.like(a.data.view(np.uint64) if a.kind == KIND_INT else a.data, KIND_F64)

    def compare_neq_mask(self, a, b):
        """
        IEEE not-equal comparison: NaN differs from everything, ±0 are equal.

        @param a: the lanes
        @type a: L{LaneBatch}
        @param b: the lanes compared against
        @type b: L{LaneBatch} or L{float}
        @return: the mask of lanes where a != b
        @rtype: L{LaneMask}
        """
        va = a.values()
        vb = (b.values() if isinstance(b, LaneBatch) else float(b))
        return LaneMask(va != vb, a.width)

    def compare_mask(self, a, op, b):
        """
        IEEE ordered comparison ("<", "<=", ">", ">=", "==").

        @param a: the lanes
        @type a: L{LaneBatch}
        @param op: the comparison
        @type op: L{str}
        @param b: the lanes compared against
        @type b: L{LaneBatch} or L{float}
        @return: the mask of lanes where the comparison holds
        @rtype: L{LaneMask}
        """
        va = a.values()
        vb = (b.values() if isinstance(b, LaneBatch) else float(b))
        res = {
            "<": np.less,
            "<=": np.less_equal,
            ">": np.greater,
            ">=": np.greater_equal,
            "==": np.equal,
        }[op](va, vb)
        return LaneMask(res, a.width)

    def select(self, mask, a, b):
        """
        Lane-wise select: a where the mask is set, else b.

        @param mask: the selector
        @type mask: L{LaneMask}
        @param a: lanes taken where set
        @type a: L{LaneBatch} or L{float}
        @param b: lanes taken where clear
        @type b: L{LaneBatch} or L{float}
        @return: the selected lanes
        @rtype: L{LaneBatch}
        """
        if isinstance(a, LaneBatch) or isinstance(b, LaneBatch):
            like = _template(a, b)
        else:
            # two constants give binary64 lanes
            like = LaneBatch(np.zeros(len(mask), dtype=np.uint64), mask.width, KIND_F64)
        if like.kind == KIND_F64:
            da, db = f64_bits(a, like), f64_bits(b, like)
        else:
            da, db = a.data, b.data
        assert len(mask) == len(like)
        return like.like(np.where(mask.data, da, db))


_BACKENDS = {}


def register_backend(cls):
    """
    Class decorator registering a backend under its name.

    @param cls: the backend class
    @type cls: L{type}
    @return: the class
    @rtype: L{type}
    """
    _BACKENDS[cls.name] = cls
    return cls


def get_backend(name="vectorized"):
    """
    Return the backend with the given name.

    @param name: name of the backend ("reference" or "vectorized")
    @type name: L{str}
    @return: the backend
    @rtype: L{Backend}
    @raises KeyError: if no such backend exists
    """
    # make sure the built-in backends are registered
    from . import reference, vectorized  # noqa: F401
    if name not in _BACKENDS:
        raise KeyError("No backend named '{}'!".format(name))
    return _BACKENDS[name]()


def available_backends():
    """
    Return the names of all backends.

    @return: the backend names
    @rtype: L{list} of L{str}
    """
    from . import reference, vectorized  # noqa: F401
    return sorted(_BACKENDS)
