"""
Double-double arithmetic on lanes.

A L{DD} holds two binary64 batches with hi = RN(hi + lo). All operations
are built from error-free transformations over the backend operations,
so they are branch-free and bit-identical across backends.
"""
from ..vlanes.batch import LaneBatch


class DD(object):
    """
    An unevaluated sum hi + lo of binary64 lanes.

    @ivar hi: the leading parts
    @type hi: L{crvec.vlanes.batch.LaneBatch}
    @ivar lo: the trailing parts
    @type lo: L{crvec.vlanes.batch.LaneBatch}
    """
    __slots__ = ("hi", "lo")

    def __init__(self, hi, lo):
        self.hi = hi
        self.lo = lo

    def __repr__(self):
        return "DD({!r}, {!r})".format(self.hi, self.lo)


def dd_const(hi, lo, like):
    """
    Broadcast a constant pair to every lane of a batch.

    @param hi: the leading part
    @type hi: L{float}
    @param lo: the trailing part
    @type lo: L{float}
    @param like: batch giving lane count and width
    @type like: L{crvec.vlanes.batch.LaneBatch}
    @return: the pair
    @rtype: L{DD}
    """
    return DD(LaneBatch.full(hi, len(like), like.width), LaneBatch.full(lo, len(like), like.width))


def two_sum(backend, a, b):
    """
    Knuth's TwoSum: s + e == a + b exactly, s = RN(a + b).

    @return: the pair (s, e)
    @rtype: L{DD}
    """
    s = backend.add_rn(a, b)
    bb = backend.sub_rn(s, a)
    aa = backend.sub_rn(s, bb)
    e = backend.add_rn(backend.sub_rn(a, aa), backend.sub_rn(b, bb))
    return DD(s, e)


def fast_two_sum(backend, a, b):
    """
    Dekker's FastTwoSum, exact when |a| >= |b| or a == 0.

    @return: the pair (s, e)
    @rtype: L{DD}
    """
    s = backend.add_rn(a, b)
    e = backend.sub_rn(b, backend.sub_rn(s, a))
    return DD(s, e)


def two_prod(backend, a, b):
    """
    p + e == a * b exactly (barring underflow), p = RN(a * b).

    @return: the pair (p, e)
    @rtype: L{DD}
    """
    p = backend.mul_rn(a, b)
    e = backend.fma_rn(a, b, backend.mul_rn(p, -1.0))
    return DD(p, e)


def dd_add(backend, a, b):
    """
    Sum of two pairs with relative error below 2^-104 (accurate variant,
    two TwoSums and no branches).

    @param backend: the lane backend
    @type backend: L{crvec.vlanes.backend.Backend}
    @param a: the first pair
    @type a: L{DD}
    @param b: the second pair
    @type b: L{DD}
    @return: the normalized sum
    @rtype: L{DD}
    """
    s = two_sum(backend, a.hi, b.hi)
    t = two_sum(backend, a.lo, b.lo)
    c = backend.add_rn(s.lo, t.hi)
    v = fast_two_sum(backend, s.hi, c)
    w = backend.add_rn(t.lo, v.lo)
    return fast_two_sum(backend, v.hi, w)


def dd_mul(backend, a, b):
    """
    Product of two pairs with relative error below 2^-102.

    @param backend: the lane backend
    @type backend: L{crvec.vlanes.backend.Backend}
    @param a: the first pair
    @type a: L{DD}
    @param b: the second pair
    @type b: L{DD}
    @return: the normalized product
    @rtype: L{DD}
    """
    p = two_prod(backend, a.hi, b.hi)
    cross = backend.fma_rn(a.hi, b.lo, backend.mul_rn(a.lo, b.hi))
    return fast_two_sum(backend, p.hi, backend.add_rn(p.lo, cross))


def dd_mul_d(backend, a, b):
    """
    Product of a pair with binary64 lanes.

    @param backend: the lane backend
    @type backend: L{crvec.vlanes.backend.Backend}
    @param a: the pair
    @type a: L{DD}
    @param b: the binary64 lanes
    @type b: L{crvec.vlanes.batch.LaneBatch}
    @return: the normalized product
    @rtype: L{DD}
    """
    p = two_prod(backend, a.hi, b)
    return fast_two_sum(backend, p.hi, backend.fma_rn(a.lo, b, p.lo))


def dd_mul_scalar(backend, a, n):
    """
    Product of a pair with integer lanes (|n| < 2^53).

    @param backend: the lane backend
    @type backend: L{crvec.vlanes.backend.Backend}
    @param a: the pair
    @type a: L{DD}
    @param n: the integers, as integer or binary64 lanes
    @type n: L{crvec.vlanes.batch.LaneBatch}
    @return: the normalized product
    @rtype: L{DD}
    """
    if not n.is_float:
        n = backend.int_to_f64(n)
    return dd_mul_d(backend, a, n)
