"""
Lane containers.

A L{LaneBatch} stores the lanes of one or more fixed-width batches as a
flat numpy array: binary64 and binary32 lanes as their unsigned bit
patterns, integer lanes as signed 64 bit integers. Several batches of the
same width may be stacked into one L{LaneBatch}; since every operation is
lane-wise this is the same as processing the batches one by one.

@var WIDTHS: the supported batch widths
@type WIDTHS: L{tuple} of L{int}
"""
import numpy as np

from ..fp.bits import BINARY32, BINARY64, Binary32, Binary64, float_to_bits


WIDTHS = (1, 4, 8, 16)

KIND_F64 = "f64"
KIND_F32 = "f32"
KIND_INT = "int"

_DTYPES = {
    KIND_F64: np.uint64,
    KIND_F32: np.uint32,
    KIND_INT: np.int64,
}
_FLOAT_DTYPES = {
    KIND_F64: np.float64,
    KIND_F32: np.float32,
}


class LaneBatch(object):
    """
    An ordered collection of lanes, grouped into batches of a fixed width.

    @ivar data: the lanes (bit patterns for float kinds)
    @type data: L{numpy.ndarray}
    @ivar width: the batch width
    @type width: L{int}
    @ivar kind: one of "f64", "f32" or "int"
    @type kind: L{str}
    """
    def __init__(self, data, width, kind=KIND_F64):
        """
        The default constructor.

        @param data: the lanes, converted to the dtype of the kind
        @type data: array-like
        @param width: the batch width
        @type width: L{int}
        @param kind: one of "f64", "f32" or "int"
        @type kind: L{str}
        """
        assert kind in _DTYPES
        assert width in WIDTHS, "Unsupported width {}".format(width)
        data = np.ascontiguousarray(data, dtype=_DTYPES[kind]).reshape(-1)
        assert len(data) % width == 0, "{} lanes do not fill batches of width {}".format(len(data), width)
        self.data = data
        self.width = width
        self.kind = kind

    @classmethod
    def from_floats(cls, values, width, kind=KIND_F64):
        """
        Create a batch from float values.

        @param values: the values (binary64 values for kind "f64", binary32 for "f32")
        @type values: array-like of L{float}
        @param width: the batch width
        @type width: L{int}
        @param kind: "f64" or "f32"
        @type kind: L{str}
        @return: the batch
        @rtype: L{LaneBatch}
        """
        arr = np.ascontiguousarray(values, dtype=_FLOAT_DTYPES[kind]).reshape(-1)
        return cls(arr.view(_DTYPES[kind]), width, kind)

    @classmethod
    def from_values(cls, values, width):
        """
        Create a batch from L{Binary64} or L{Binary32} values.

        @param values: the values, all of the same type
        @type values: L{list} of L{crvec.fp.bits.Binary64} or L{crvec.fp.bits.Binary32}
        @param width: the batch width
        @type width: L{int}
        @return: the batch
        @rtype: L{LaneBatch}
        """
        kind = (KIND_F32 if values and isinstance(values[0], Binary32) else KIND_F64)
        return cls([v.bits for v in values], width, kind)

    @classmethod
    def full(cls, value, n, width):
        """
        Create a binary64 batch with every lane set to a value.

        @param value: the value
        @type value: L{float}
        @param n: number of lanes
        @type n: L{int}
        @param width: the batch width
        @type width: L{int}
        @return: the batch
        @rtype: L{LaneBatch}
        """
        return cls(np.full(n, float_to_bits(value), dtype=np.uint64), width, KIND_F64)

    def __len__(self):
        return len(self.data)

    def __eq__(self, other):
        if not isinstance(other, LaneBatch):
            return NotImplemented
        return (self.kind == other.kind) and (self.width == other.width) and np.array_equal(self.data, other.data)

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __repr__(self):
        return "LaneBatch(kind={}, width={}, lanes={})".format(self.kind, self.width, len(self))

    @property
    def n_batches(self):
        """The number of stacked batches."""
        return len(self.data) // self.width

    @property
    def is_float(self):
        """Whether the lanes are floating-point bit patterns."""
        return self.kind != KIND_INT

    @property
    def fmt(self):
        """The floating-point format of the lanes."""
        return (BINARY32 if self.kind == KIND_F32 else BINARY64)

    def values(self):
        """
        Return the lanes as a numpy float array sharing the bit patterns.

        @return: the float view
        @rtype: L{numpy.ndarray}
        """
        assert self.is_float
        return self.data.view(_FLOAT_DTYPES[self.kind])

    def lane(self, i):
        """
        Return a single lane.

        @param i: lane index
        @type i: L{int}
        @return: the lane as value type (or int for integer batches)
        @rtype: L{crvec.fp.bits.Binary64} or L{crvec.fp.bits.Binary32} or L{int}
        """
        v = int(self.data[i])
        if self.kind == KIND_F64:
            return Binary64(v)
        elif self.kind == KIND_F32:
            return Binary32(v)
        return v

    def to_bits(self):
        """
        Return the lanes as a list of python ints.

        @return: the bit patterns (or integers)
        @rtype: L{list} of L{int}
        """
        return self.data.tolist()

    def like(self, data, kind=None):
        """
        Return a new batch with the same width.

        @param data: the lanes of the new batch
        @type data: array-like
        @param kind: kind of the new batch, defaults to this batch's kind
        @type kind: L{str}
        @return: the new batch
        @rtype: L{LaneBatch}
        """
        return LaneBatch(data, self.width, (self.kind if kind is None else kind))

    def take(self, indices):
        """
        Return the lanes at the given positions, as a width-1 batch.

        @param indices: lane positions
        @type indices: array-like of L{int}
        @return: the selected lanes
        @rtype: L{LaneBatch}
        """
        return LaneBatch(self.data[np.asarray(indices, dtype=np.int64)], 1, self.kind)

    def regroup(self, width):
        """
        Return the same lanes grouped into batches of another width.

        @param width: the new width
        @type width: L{int}
        @return: the regrouped batch
        @rtype: L{LaneBatch}
        """
        return LaneBatch(self.data, width, self.kind)

    def batches(self):
        """
        Iterate over the stacked batches.

        @return: a generator yielding one L{LaneBatch} per batch
        @rtype: generator yielding L{LaneBatch}
        """
        for start in range(0, len(self.data), self.width):
            yield LaneBatch(self.data[start:start + self.width], self.width, self.kind)


class LaneMask(object):
    """
    One boolean per lane.

    @ivar data: the lane flags
    @type data: L{numpy.ndarray} of L{bool}
    @ivar width: the batch width
    @type width: L{int}
    """
    def __init__(self, data, width):
        """
        The default constructor.

        @param data: the lane flags
        @type data: array-like of L{bool}
        @param width: the batch width
        @type width: L{int}
        """
        assert width in WIDTHS
        data = np.ascontiguousarray(data, dtype=bool).reshape(-1)
        assert len(data) % width == 0
        self.data = data
        self.width = width

    def __len__(self):
        return len(self.data)

    def __invert__(self):
        return LaneMask(~self.data, self.width)

    def __and__(self, other):
        assert len(other) == len(self)
        return LaneMask(self.data & other.data, self.width)

    def __or__(self, other):
        assert len(other) == len(self)
        return LaneMask(self.data | other.data, self.width)

    def __eq__(self, other):
        if not isinstance(other, LaneMask):
            return NotImplemented
        return self.width == other.width and np.array_equal(self.data, other.data)

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __repr__(self):
        return "LaneMask(width={}, set={}/{})".format(self.width, self.count(), len(self))

    def any(self):
        """Whether any lane is set."""
        return bool(self.data.any())

    def count(self):
        """The number of set lanes."""
        return int(self.data.sum())

    def indices(self):
        """
        Return the positions of the set lanes.

        @return: the lane positions
        @rtype: L{numpy.ndarray} of L{int}
        """
        return np.flatnonzero(self.data)

    def per_batch_counts(self):
        """
        Return the number of set lanes of every stacked batch.

        @return: one count per batch
        @rtype: L{numpy.ndarray} of L{int}
        """
        return self.data.reshape(-1, self.width).sum(axis=1)

    def as_lane_bits(self):
        """
        Return the mask as an integer batch holding all-ones in set lanes.

        A logical shift right by 63 turns this into a 0/1 sticky bit.

        @return: the integer batch
        @rtype: L{LaneBatch}
        """
        return LaneBatch(np.where(self.data, -1, 0).astype(np.int64), self.width, KIND_INT)
